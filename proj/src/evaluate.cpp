#include "windcast/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "windcast/errors.hpp"
#include "windcast/forecast.hpp"
#include "windcast/util.hpp"
#include "windcast/model_io.hpp"

namespace windcast {

std::string to_string(ErrorMode mode) {
    return mode == ErrorMode::window_rmse ? "window_rmse" : "step_abs";
}

ErrorMode error_mode_from_string(const std::string& name) {
    if (name == "window_rmse") return ErrorMode::window_rmse;
    if (name == "step_abs") return ErrorMode::step_abs;
    throw ArgumentError("unknown error mode '" + name + "'");
}

void EvalConfig::validate() const {
    if (horizon < 1) throw ArgumentError("evaluate: horizon must be >= 1");
    if (origin_stride < 1) throw ArgumentError("evaluate: origin_stride must be >= 1");
    if (lag < 1) throw ArgumentError("evaluate: lag must be >= 1");
    if (thresholds.empty()) throw ArgumentError("evaluate: need at least one threshold");
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (!(thresholds[i] > 0.0))
            throw ArgumentError("evaluate: thresholds must be positive");
        if (i > 0 && !(thresholds[i] > thresholds[i - 1]))
            throw ArgumentError("evaluate: thresholds must be strictly increasing");
    }
}

double rmse(std::span<const double> predicted, std::span<const double> actual) {
    if (predicted.size() != actual.size())
        throw ArgumentError("rmse: length mismatch (" + std::to_string(predicted.size()) +
                            " vs " + std::to_string(actual.size()) + ")");
    if (predicted.empty()) throw ArgumentError("rmse: empty input");
    double sum = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        double d = predicted[i] - actual[i];
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(predicted.size()));
}

void reaggregate(EvaluationReport& report) {
    const std::size_t H = report.config.horizon;
    const std::size_t n = report.origins();
    report.mean_rmse_curve.assign(H, 0.0);
    for (std::size_t h = 0; h < H; ++h) {
        double sum = 0.0;
        for (std::size_t o = 0; o < n; ++o) sum += report.per_origin[o * H + h];
        report.mean_rmse_curve[h] = sum / static_cast<double>(n);
    }
    report.threshold_curves.assign(report.config.thresholds.size(), std::vector<double>(H, 0.0));
    for (std::size_t ti = 0; ti < report.config.thresholds.size(); ++ti) {
        const double theta = report.config.thresholds[ti];
        for (std::size_t h = 0; h < H; ++h) {
            std::size_t below = 0;
            for (std::size_t o = 0; o < n; ++o)
                if (report.per_origin[o * H + h] < theta) ++below;
            report.threshold_curves[ti][h] =
                100.0 * static_cast<double>(below) / static_cast<double>(n);
        }
    }
}

EvaluationReport evaluate_model(const Regressor& model, const TimeSeries& test,
                                const EvalConfig& config, const std::string& train_label) {
    config.validate();
    if (model.lag() != config.lag)
        throw ArgumentError("evaluate: model lag " + std::to_string(model.lag()) +
                            " does not match config lag " + std::to_string(config.lag));
    const std::size_t N = test.size();
    const std::size_t H = config.horizon;
    const std::size_t lag = config.lag;
    if (N < lag + H + 1)
        throw DataError("evaluate: test series of length " + std::to_string(N) +
                        " too short; need at least " + std::to_string(lag + H + 1));

    const bool clamp = config.clamp == EvalConfig::Clamp::on ||
                       (config.clamp == EvalConfig::Clamp::auto_detect && test.physical);
    std::optional<double> floor;
    if (clamp) floor = config.clamp_floor;

    EvaluationReport report;
    report.model_kind = model.kind();
    report.train_label = train_label;
    report.test_label = test.label;
    report.config = config;
    report.model_warnings = model.warnings();
    report.clamped = clamp;

    const std::size_t n_origins = (N - lag - H) / config.origin_stride + 1;
    report.origin_indices.resize(n_origins);
    report.per_origin.assign(n_origins * H, 0.0);

    parallel_for(n_origins, std::max(1u, config.workers), [&](std::size_t o) {
        const std::size_t t = (lag - 1) + o * config.origin_stride;
        report.origin_indices[o] = test.start_index + static_cast<std::int64_t>(t);
        std::span<const double> window(test.values.data() + t + 1 - lag, lag);
        ForecastPath path = forecast_recursive(model, window, H, floor,
                                               report.origin_indices[o]);
        double* row = report.per_origin.data() + o * H;
        if (config.error_mode == ErrorMode::window_rmse) {
            double cum = 0.0;
            for (std::size_t h = 1; h <= H; ++h) {
                double d = path.values[h - 1] - test.values[t + h];
                cum += d * d;
                row[h - 1] = std::sqrt(cum / static_cast<double>(h));
            }
        } else {
            for (std::size_t h = 1; h <= H; ++h)
                row[h - 1] = std::abs(path.values[h - 1] - test.values[t + h]);
        }
    });

    reaggregate(report);
    return report;
}

std::vector<EvaluationReport> cross_evaluate(std::span<const LabeledRegressor> models,
                                             std::span<const LabeledSeries> tests,
                                             const EvalConfig& config) {
    if (models.empty() || tests.empty())
        throw ArgumentError("cross_evaluate: need at least one model and one test series");
    const std::size_t lag = models.front().model->lag();
    for (const auto& lm : models) {
        if (lm.model->lag() != lag)
            throw ArgumentError("cross_evaluate: models disagree on lag (" +
                                std::to_string(lag) + " vs " + std::to_string(lm.model->lag()) +
                                " for '" + lm.label + "')");
    }

    std::vector<EvaluationReport> reports;
    reports.reserve(models.size() * tests.size());
    for (const auto& lm : models) {
        for (const auto& ls : tests) {
            TimeSeries series = *ls.series;
            series.label = ls.label;
            reports.push_back(evaluate_model(*lm.model, series, config, lm.label));
        }
    }
    return reports;
}

std::vector<std::vector<double>> pool_threshold_curves(
    std::span<const EvaluationReport> reports) {
    if (reports.empty()) throw ArgumentError("pool_threshold_curves: no reports");
    const auto& ref = reports.front().config;
    for (const auto& r : reports) {
        if (r.config.horizon != ref.horizon || r.config.thresholds != ref.thresholds ||
            r.config.error_mode != ref.error_mode)
            throw ArgumentError("pool_threshold_curves: reports have incompatible configs");
    }

    const std::size_t H = ref.horizon;
    std::vector<std::vector<double>> curves(ref.thresholds.size(), std::vector<double>(H, 0.0));
    std::size_t total_origins = 0;
    for (const auto& r : reports) total_origins += r.origins();

    for (std::size_t ti = 0; ti < ref.thresholds.size(); ++ti) {
        const double theta = ref.thresholds[ti];
        for (std::size_t h = 0; h < H; ++h) {
            std::size_t below = 0;
            for (const auto& r : reports)
                for (std::size_t o = 0; o < r.origins(); ++o)
                    if (r.per_origin[o * H + h] < theta) ++below;
            curves[ti][h] = 100.0 * static_cast<double>(below) / static_cast<double>(total_origins);
        }
    }
    return curves;
}

namespace {

nlohmann::json config_to_json(const EvalConfig& c) {
    return {{"horizon", c.horizon},
            {"origin_stride", c.origin_stride},
            {"thresholds", c.thresholds},
            {"lag", c.lag},
            {"error_mode", to_string(c.error_mode)},
            {"clamp", c.clamp == EvalConfig::Clamp::auto_detect
                          ? "auto"
                          : (c.clamp == EvalConfig::Clamp::on ? "on" : "off")},
            {"clamp_floor", c.clamp_floor}};
}

EvalConfig config_from_json(const nlohmann::json& j) {
    EvalConfig c;
    c.horizon = j.at("horizon").get<std::size_t>();
    c.origin_stride = j.at("origin_stride").get<std::size_t>();
    c.thresholds = j.at("thresholds").get<std::vector<double>>();
    c.lag = j.at("lag").get<std::size_t>();
    c.error_mode = error_mode_from_string(j.at("error_mode").get<std::string>());
    auto clamp = j.at("clamp").get<std::string>();
    c.clamp = clamp == "auto" ? EvalConfig::Clamp::auto_detect
                              : (clamp == "on" ? EvalConfig::Clamp::on : EvalConfig::Clamp::off);
    c.clamp_floor = j.at("clamp_floor").get<double>();
    return c;
}

}  // namespace

void save_report(const std::string& path, const EvaluationReport& report) {
    nlohmann::json j;
    j["format"] = "windcast-report";
    j["toolkit_version"] = kToolkitVersion;
    j["version"] = 1;
    j["model_kind"] = report.model_kind;
    j["train_label"] = report.train_label;
    j["test_label"] = report.test_label;
    j["config"] = config_to_json(report.config);
    j["model_warnings"] = report.model_warnings;
    j["clamped"] = report.clamped;
    j["origin_indices"] = report.origin_indices;
    j["per_origin"] = report.per_origin;
    j["mean_rmse_curve"] = report.mean_rmse_curve;
    j["threshold_curves"] = report.threshold_curves;

    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << j.dump(1) << '\n';
    if (!out) throw DataError("write failed for '" + path + "'");
}

EvaluationReport load_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("bad report file '" + path + "': " + e.what());
    }
    if (j.value("format", "") != "windcast-report" || j.value("version", 0) != 1)
        throw DataError("'" + path + "' is not a windcast report");

    EvaluationReport r;
    r.model_kind = j.at("model_kind").get<std::string>();
    r.train_label = j.at("train_label").get<std::string>();
    r.test_label = j.at("test_label").get<std::string>();
    r.config = config_from_json(j.at("config"));
    r.model_warnings = j.at("model_warnings").get<std::vector<std::string>>();
    r.clamped = j.at("clamped").get<bool>();
    r.origin_indices = j.at("origin_indices").get<std::vector<std::int64_t>>();
    r.per_origin = j.at("per_origin").get<std::vector<double>>();
    r.mean_rmse_curve = j.at("mean_rmse_curve").get<std::vector<double>>();
    r.threshold_curves = j.at("threshold_curves").get<std::vector<std::vector<double>>>();
    if (r.per_origin.size() != r.origins() * r.config.horizon)
        throw DataError("report per-origin matrix shape mismatch in '" + path + "'");
    return r;
}

void write_mean_rmse_csv(const std::string& path, std::span<const std::string> labels,
                         std::span<const std::vector<double>> curves,
                         const std::string& config_comment) {
    if (labels.size() != curves.size())
        throw ArgumentError("write_mean_rmse_csv: label/curve count mismatch");
    if (curves.empty()) throw ArgumentError("write_mean_rmse_csv: no curves");
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    if (!config_comment.empty()) out << "# " << config_comment << '\n';
    out << "horizon";
    for (const auto& label : labels) out << ',' << label;
    out << '\n';
    const std::size_t H = curves.front().size();
    for (std::size_t h = 0; h < H; ++h) {
        out << (h + 1);
        for (const auto& curve : curves) out << ',' << curve[h];
        out << '\n';
    }
}

void write_threshold_csv(const std::string& path, std::span<const double> thresholds,
                         std::span<const std::vector<double>> curves,
                         const std::string& config_comment) {
    if (thresholds.size() != curves.size())
        throw ArgumentError("write_threshold_csv: threshold/curve count mismatch");
    if (curves.empty()) throw ArgumentError("write_threshold_csv: no curves");
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    if (!config_comment.empty()) out << "# " << config_comment << '\n';
    out << "horizon";
    for (double t : thresholds) out << ",below_" << t;
    out << '\n';
    const std::size_t H = curves.front().size();
    for (std::size_t h = 0; h < H; ++h) {
        out << (h + 1);
        for (const auto& curve : curves) out << ',' << curve[h];
        out << '\n';
    }
}

}  // namespace windcast
