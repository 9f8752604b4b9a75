#ifndef WINDCAST_SVR_HPP
#define WINDCAST_SVR_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "windcast/embed.hpp"
#include "windcast/regressor.hpp"

namespace windcast {

/// Epsilon-SVR hyperparameters. All values apply in scaled units.
struct SvrConfig {
    double c = 1.0;               // box penalty, > 0
    double epsilon = 0.05;        // tube half-width, >= 0
    double gamma = 0.0;           // RBF width; 0 resolves to 1/lag at train time
    double tolerance = 1e-3;      // KKT tolerance
    std::size_t max_passes = 0;   // bound on solver passes; 0 resolves to 10*n
    std::size_t cache_bytes = 256ull << 20;

    void validate() const;
};

/// Trained epsilon-SVR: f(x) = sum_i beta_i K(sv_i, x) + b in scaled space.
/// Support vectors are stored scaled; predict() scales its input and
/// inverse-scales the output.
class SvrModel final : public Regressor {
public:
    std::vector<double> support_vectors;  // row-major, sv_count() x lag
    std::vector<double> dual_coeffs;      // beta_i = alpha_i - alpha_i*, nonzero
    double bias = 0.0;
    SvrConfig config;                     // effective values (gamma resolved)
    ScalerParams scaler;
    std::size_t lag_ = 0;
    bool converged = true;
    double dual_objective = 0.0;          // recorded for oracle comparison
    std::size_t train_rows = 0;
    std::string label_;

    std::size_t sv_count() const { return dual_coeffs.size(); }
    std::span<const double> support_vector(std::size_t i) const {
        return {support_vectors.data() + i * lag_, lag_};
    }

    /// Decision function on an already-scaled window.
    double decision_scaled(std::span<const double> scaled_window) const;

    double predict(std::span<const double> window) const override;
    std::size_t lag() const override { return lag_; }
    std::string kind() const override { return "svr"; }
    std::string train_label() const override { return label_; }
    std::vector<std::string> warnings() const override;
};

/// Trains by sequential minimal optimization on the epsilon-SVR dual in
/// beta form: pairs of coefficients violating the KKT conditions are
/// optimized analytically under the box [-C, C] and the sum-zero constraint,
/// the bias is refreshed from in-bound vectors, and the solver stops when no
/// violator exceeds config.tolerance. Exhausting max_passes returns a model
/// flagged converged = false rather than failing.
///
/// The dataset must already be scaled; `scaler` is stored for prediction.
SvrModel train_svr(const EmbeddedDataset& scaled_dataset, const SvrConfig& config,
                   const ScalerParams& scaler = {}, const std::string& train_label = {});

double predict_svr(const SvrModel& model, std::span<const double> window);

void save_svr(const std::string& path, const SvrModel& model);
SvrModel load_svr(const std::string& path);

/// Chronological grid search: for each (C, gamma, epsilon) combination the
/// first 80% of rows train a model, the last 20% score one-step RMSE in raw
/// units. Ties keep the earlier combination. Not run by default anywhere.
struct GridSearchEntry {
    SvrConfig config;
    double validation_rmse = 0.0;
};
struct GridSearchResult {
    SvrConfig best;
    double best_rmse = 0.0;
    std::vector<GridSearchEntry> tried;
};
GridSearchResult grid_search_svr(const EmbeddedDataset& raw_dataset, ScalerKind scaler_kind,
                                 std::span<const double> c_grid,
                                 std::span<const double> gamma_grid,
                                 std::span<const double> epsilon_grid,
                                 const SvrConfig& base = {});

}  // namespace windcast

#endif
