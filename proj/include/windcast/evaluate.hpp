#ifndef WINDCAST_EVALUATE_HPP
#define WINDCAST_EVALUATE_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "windcast/regressor.hpp"
#include "windcast/series.hpp"

namespace windcast {

/// Per-origin error statistic at horizon h: RMSE over the whole 1..h window
/// (the default), or the absolute single-step error at step h.
enum class ErrorMode { window_rmse, step_abs };

std::string to_string(ErrorMode mode);
ErrorMode error_mode_from_string(const std::string& name);

struct EvalConfig {
    std::size_t horizon = 48;
    std::size_t origin_stride = 1;
    std::vector<double> thresholds = {1.5, 2.5, 3.5};  // m/s, strictly increasing
    std::size_t lag = 72;
    ErrorMode error_mode = ErrorMode::window_rmse;
    enum class Clamp { auto_detect, on, off };
    Clamp clamp = Clamp::auto_detect;  // auto: clamp iff the test series is physical
    double clamp_floor = 0.0;
    unsigned workers = 1;

    void validate() const;
};

/// Rolling-origin evaluation output. per_origin is row-major
/// origins() x horizon and is stored at full precision, so every curve can
/// be re-derived from it exactly.
struct EvaluationReport {
    std::string model_kind;
    std::string train_label;
    std::string test_label;
    EvalConfig config;
    std::vector<std::string> model_warnings;
    bool clamped = false;

    std::vector<std::int64_t> origin_indices;
    std::vector<double> per_origin;        // origins() x horizon
    std::vector<double> mean_rmse_curve;   // horizon entries, h = 1..H
    std::vector<std::vector<double>> threshold_curves;  // one curve per threshold

    std::size_t origins() const { return origin_indices.size(); }
    double origin_error(std::size_t origin, std::size_t h) const {  // h is 1-based
        return per_origin[origin * config.horizon + (h - 1)];
    }
};

/// sqrt(mean squared difference); lengths must match and be nonzero.
double rmse(std::span<const double> predicted, std::span<const double> actual);

/// Runs the recursive forecaster from every strided origin of the test
/// segment and aggregates mean-RMSE and threshold-percentage curves.
/// Origins evaluate in parallel; aggregation is a deterministic reduction
/// in origin order.
EvaluationReport evaluate_model(const Regressor& model, const TimeSeries& test,
                                const EvalConfig& config, const std::string& train_label = {});

struct LabeledRegressor {
    std::string label;
    const Regressor* model = nullptr;
};
struct LabeledSeries {
    std::string label;
    const TimeSeries* series = nullptr;
};

/// One report per (train, test) pair including the same-location diagonal,
/// row-major by train label. All models must share one lag.
std::vector<EvaluationReport> cross_evaluate(std::span<const LabeledRegressor> models,
                                             std::span<const LabeledSeries> tests,
                                             const EvalConfig& config);

/// Pools per-origin errors across reports with equal origin weight and
/// recomputes the percentage curves. Reports must share horizon,
/// thresholds and error mode.
std::vector<std::vector<double>> pool_threshold_curves(
    std::span<const EvaluationReport> reports);

void save_report(const std::string& path, const EvaluationReport& report);
EvaluationReport load_report(const std::string& path);

/// Recomputes mean_rmse_curve and threshold_curves from per_origin; used to
/// verify that a stored report re-aggregates to identical curves.
void reaggregate(EvaluationReport& report);

/// horizon,<label columns> (one per curve); the mean-RMSE-vs-horizon table.
void write_mean_rmse_csv(const std::string& path, std::span<const std::string> labels,
                         std::span<const std::vector<double>> curves,
                         const std::string& config_comment = {});

/// horizon,below_<threshold> percentage columns.
void write_threshold_csv(const std::string& path, std::span<const double> thresholds,
                         std::span<const std::vector<double>> curves,
                         const std::string& config_comment = {});

}  // namespace windcast

#endif
