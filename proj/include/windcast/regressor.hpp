#ifndef WINDCAST_REGRESSOR_HPP
#define WINDCAST_REGRESSOR_HPP

#include <span>
#include <string>
#include <vector>

namespace windcast {

/// One-step-ahead regressor over lag windows. Implementations are immutable
/// after training; predict is pure and safe to call from many threads.
class Regressor {
public:
    virtual ~Regressor() = default;

    /// Predicts the next value from the last `lag()` observations,
    /// chronological order, most recent last. Raw (unscaled) units in and out.
    virtual double predict(std::span<const double> window) const = 0;

    virtual std::size_t lag() const = 0;

    /// Model-kind tag ("svr", "forest", ...).
    virtual std::string kind() const = 0;

    /// Label of the series the model was trained on ("" when unknown).
    virtual std::string train_label() const { return {}; }

    /// Training-time warnings (e.g. non-convergence), echoed into reports.
    virtual std::vector<std::string> warnings() const { return {}; }
};

}  // namespace windcast

#endif
