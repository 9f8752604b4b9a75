#ifndef WINDCAST_EMBED_HPP
#define WINDCAST_EMBED_HPP

#include <span>
#include <string>
#include <vector>

#include "windcast/series.hpp"

namespace windcast {

/// Lag-window design matrix with one-step-ahead targets.
///
/// Row t holds values[t .. t+lag-1] in chronological order (column lag-1 is
/// the most recent observation) and targets[t] = values[t+lag]. Row t+1 is
/// row t shifted left by one with targets[t] appended; the recursive
/// forecaster relies on exactly that layout.
struct EmbeddedDataset {
    std::vector<double> features;  // row-major, rows() x lag
    std::vector<double> targets;
    std::size_t lag = 0;

    std::size_t rows() const { return targets.size(); }
    std::span<const double> row(std::size_t i) const {
        return {features.data() + i * lag, lag};
    }
    std::span<double> row(std::size_t i) {
        return {features.data() + i * lag, lag};
    }
};

enum class ScalerKind { none, min_max, z_score };

std::string to_string(ScalerKind kind);
ScalerKind scaler_kind_from_string(const std::string& name);

/// Affine value transform shared by features and targets (they are the same
/// physical quantity, and recursive feedback must stay on one scale).
/// Statistics are frozen at fit time. Degenerate input (zero spread) falls
/// back to `none` with `fallback` set.
struct ScalerParams {
    ScalerKind kind = ScalerKind::none;
    double offset = 0.0;  // value subtracted before scaling (min or mean)
    double scale = 1.0;   // divisor (max-min or sd); > 0
    bool fallback = false;

    double apply(double v) const { return (v - offset) / scale; }
    double invert(double v) const { return v * scale + offset; }
};

/// Builds the supervised dataset. Requires series length >= lag + 1.
EmbeddedDataset embed(const TimeSeries& series, std::size_t lag);

/// Fits over all feature values and targets jointly.
ScalerParams fit_scaler(const EmbeddedDataset& dataset, ScalerKind kind);

std::vector<double> apply_scaler(std::span<const double> values, const ScalerParams& params);
std::vector<double> invert_scaler(std::span<const double> values, const ScalerParams& params);

/// In-place variant used on whole datasets before training.
void apply_scaler_inplace(EmbeddedDataset& dataset, const ScalerParams& params);

}  // namespace windcast

#endif
