#include "windcast/embed.hpp"

#include <algorithm>
#include <cmath>

#include "windcast/errors.hpp"

namespace windcast {

std::string to_string(ScalerKind kind) {
    switch (kind) {
        case ScalerKind::none: return "none";
        case ScalerKind::min_max: return "min_max";
        case ScalerKind::z_score: return "z_score";
    }
    return "none";
}

ScalerKind scaler_kind_from_string(const std::string& name) {
    if (name == "none") return ScalerKind::none;
    if (name == "min_max") return ScalerKind::min_max;
    if (name == "z_score") return ScalerKind::z_score;
    throw ArgumentError("unknown scaler kind '" + name + "'");
}

EmbeddedDataset embed(const TimeSeries& series, std::size_t lag) {
    if (lag < 1) throw ArgumentError("embed: lag must be >= 1");
    const std::size_t n = series.size();
    if (n < lag + 1)
        throw DataError("embed: series of length " + std::to_string(n) +
                        " too short for lag " + std::to_string(lag) +
                        "; need at least " + std::to_string(lag + 1) + " samples");

    const std::size_t rows = n - lag;
    EmbeddedDataset ds;
    ds.lag = lag;
    ds.features.resize(rows * lag);
    ds.targets.resize(rows);
    for (std::size_t t = 0; t < rows; ++t) {
        std::copy_n(series.values.begin() + t, lag, ds.features.begin() + t * lag);
        ds.targets[t] = series.values[t + lag];
    }
    return ds;
}

ScalerParams fit_scaler(const EmbeddedDataset& dataset, ScalerKind kind) {
    if (dataset.rows() == 0) throw DataError("fit_scaler: empty dataset");

    ScalerParams params;
    params.kind = kind;
    if (kind == ScalerKind::none) return params;

    auto for_each_value = [&](auto&& fn) {
        for (double v : dataset.features) fn(v);
        for (double v : dataset.targets) fn(v);
    };

    if (kind == ScalerKind::min_max) {
        double lo = dataset.features[0], hi = dataset.features[0];
        for_each_value([&](double v) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        });
        if (hi > lo) {
            params.offset = lo;
            params.scale = hi - lo;
        } else {
            params.kind = ScalerKind::none;
            params.fallback = true;
        }
        return params;
    }

    // z_score
    std::size_t count = 0;
    double mean = 0.0;
    for_each_value([&](double v) {
        ++count;
        mean += (v - mean) / static_cast<double>(count);
    });
    double ss = 0.0;
    for_each_value([&](double v) { ss += (v - mean) * (v - mean); });
    double sd = std::sqrt(ss / static_cast<double>(count));
    if (sd > 0.0) {
        params.offset = mean;
        params.scale = sd;
    } else {
        params.kind = ScalerKind::none;
        params.fallback = true;
    }
    return params;
}

std::vector<double> apply_scaler(std::span<const double> values, const ScalerParams& params) {
    std::vector<double> out(values.begin(), values.end());
    if (params.kind == ScalerKind::none) return out;
    for (double& v : out) v = params.apply(v);
    return out;
}

std::vector<double> invert_scaler(std::span<const double> values, const ScalerParams& params) {
    std::vector<double> out(values.begin(), values.end());
    if (params.kind == ScalerKind::none) return out;
    for (double& v : out) v = params.invert(v);
    return out;
}

void apply_scaler_inplace(EmbeddedDataset& dataset, const ScalerParams& params) {
    if (params.kind == ScalerKind::none) return;
    for (double& v : dataset.features) v = params.apply(v);
    for (double& v : dataset.targets) v = params.apply(v);
}

}  // namespace windcast
