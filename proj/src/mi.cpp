#include "windcast/mi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "windcast/errors.hpp"
#include "windcast/util.hpp"

namespace windcast {

std::string to_string(LagRule rule) {
    switch (rule) {
        case LagRule::negligible_threshold: return "negligible_threshold";
        case LagRule::first_local_minimum: return "first_local_minimum";
        case LagRule::fixed: return "fixed";
    }
    return "negligible_threshold";
}

LagRule lag_rule_from_string(const std::string& name) {
    if (name == "negligible_threshold") return LagRule::negligible_threshold;
    if (name == "first_local_minimum") return LagRule::first_local_minimum;
    if (name == "fixed") return LagRule::fixed;
    throw ArgumentError("unknown lag rule '" + name + "'");
}

std::size_t default_bin_count(std::size_t n_pairs) {
    auto bins = static_cast<std::size_t>(
        std::ceil(std::sqrt(static_cast<double>(n_pairs) / 5.0)));
    return std::clamp<std::size_t>(bins, 2, 64);
}

namespace {

std::size_t bin_index(double v, double lo, double hi, std::size_t bins) {
    if (!(hi > lo)) return 0;
    auto idx = static_cast<std::ptrdiff_t>((v - lo) / (hi - lo) * static_cast<double>(bins));
    if (idx < 0) return 0;
    if (idx >= static_cast<std::ptrdiff_t>(bins)) return bins - 1;
    return static_cast<std::size_t>(idx);
}

// -sum p log p over counts, iterated in index order. Both entropy_est and
// the MI marginals go through here so the delay-0 identity is exact.
double entropy_of_counts(const std::vector<std::size_t>& counts, std::size_t total) {
    double h = 0.0;
    for (std::size_t c : counts) {
        if (c == 0) continue;
        double p = static_cast<double>(c) / static_cast<double>(total);
        h -= p * std::log(p);
    }
    return h;
}

}  // namespace

double entropy_est(const TimeSeries& series, std::size_t bins) {
    if (bins < 2) throw ArgumentError("entropy_est: bins must be >= 2");
    if (series.size() < bins)
        throw InsufficientDataError("entropy_est: need at least " + std::to_string(bins) +
                                    " samples for " + std::to_string(bins) + " bins");
    auto [lo_it, hi_it] = std::minmax_element(series.values.begin(), series.values.end());
    std::vector<std::size_t> counts(bins, 0);
    for (double v : series.values) ++counts[bin_index(v, *lo_it, *hi_it, bins)];
    return entropy_of_counts(counts, series.size());
}

double mi_of_pairs(std::span<const double> xs, std::span<const double> ys,
                   std::size_t bins, double lo, double hi) {
    if (bins < 2) throw ArgumentError("mi_of_pairs: bins must be >= 2");
    if (xs.size() != ys.size() || xs.empty())
        throw ArgumentError("mi_of_pairs: need equal nonempty pair arrays");

    const std::size_t n = xs.size();
    std::vector<std::size_t> joint(bins * bins, 0);
    std::vector<std::size_t> row(bins, 0), col(bins, 0);
    for (std::size_t t = 0; t < n; ++t) {
        std::size_t i = bin_index(xs[t], lo, hi, bins);
        std::size_t j = bin_index(ys[t], lo, hi, bins);
        ++joint[i * bins + j];
        ++row[i];
        ++col[j];
    }

    double h_joint = entropy_of_counts(joint, n);
    double h_row = entropy_of_counts(row, n);
    double h_col = entropy_of_counts(col, n);
    double mi = h_row + h_col - h_joint;
    return mi < 0.0 ? 0.0 : mi;  // guard; plug-in MI is >= 0 by construction
}

double mi_at_delay(const TimeSeries& series, std::size_t delay, std::size_t bins) {
    if (bins < 2) throw ArgumentError("mi_at_delay: bins must be >= 2");
    const std::size_t n = series.size();
    if (delay >= n || n - delay < bins)
        throw InsufficientDataError(
            "mi_at_delay: " + std::to_string(delay >= n ? 0 : n - delay) +
            " pairs at delay " + std::to_string(delay) + " cannot populate " +
            std::to_string(bins) + " bins");

    auto [lo_it, hi_it] = std::minmax_element(series.values.begin(), series.values.end());
    const std::size_t pairs = n - delay;
    std::span<const double> xs(series.values.data(), pairs);
    std::span<const double> ys(series.values.data() + delay, pairs);
    return mi_of_pairs(xs, ys, bins, *lo_it, *hi_it);
}

MiCurve mi_curve(const TimeSeries& series, std::size_t max_delay, std::size_t bins,
                 unsigned workers) {
    if (max_delay < 1) throw ArgumentError("mi_curve: max_delay must be >= 1");
    const std::size_t n = series.size();
    if (max_delay >= n)
        throw InsufficientDataError("mi_curve: max_delay " + std::to_string(max_delay) +
                                    " leaves no pairs in a series of length " + std::to_string(n));
    if (bins == 0) bins = default_bin_count(n - max_delay);

    MiCurve curve;
    curve.bin_count = bins;
    curve.delays.resize(max_delay);
    curve.mi_values.resize(max_delay);
    curve.n_effective.resize(max_delay);
    std::iota(curve.delays.begin(), curve.delays.end(), std::size_t{1});

    std::vector<std::string> failures(max_delay);
    parallel_for(max_delay, workers, [&](std::size_t k) {
        std::size_t delay = k + 1;
        try {
            curve.mi_values[k] = mi_at_delay(series, delay, bins);
            curve.n_effective[k] = n - delay;
        } catch (const Error& e) {
            failures[k] = e.what();
        }
    });
    for (std::size_t k = 0; k < max_delay; ++k) {
        if (!failures[k].empty())
            throw InsufficientDataError("mi_curve: delay " + std::to_string(k + 1) +
                                        " failed: " + failures[k]);
    }
    return curve;
}

std::vector<double> shuffle_baseline(const TimeSeries& series, std::size_t delay,
                                     std::size_t bins, std::size_t n_shuffles,
                                     std::uint64_t seed) {
    if (n_shuffles < 1) throw ArgumentError("shuffle_baseline: need at least one shuffle");
    const std::size_t n = series.size();
    if (bins == 0) bins = default_bin_count(delay < n ? n - delay : 0);
    if (delay >= n || n - delay < bins)
        throw InsufficientDataError("shuffle_baseline: too few pairs at delay " +
                                    std::to_string(delay));

    auto [lo_it, hi_it] = std::minmax_element(series.values.begin(), series.values.end());
    const double lo = *lo_it, hi = *hi_it;
    const std::size_t pairs = n - delay;
    std::span<const double> xs(series.values.data(), pairs);
    std::vector<double> ys(series.values.begin() + delay, series.values.end());

    Rng rng(seed);
    std::vector<double> mis;
    mis.reserve(n_shuffles);
    for (std::size_t s = 0; s < n_shuffles; ++s) {
        // Fisher-Yates on the y marginal.
        for (std::size_t i = pairs - 1; i > 0; --i) {
            std::size_t j = rng.bounded(i + 1);
            std::swap(ys[i], ys[j]);
        }
        mis.push_back(mi_of_pairs(xs, ys, bins, lo, hi));
    }
    return mis;
}

double shuffle_threshold(const TimeSeries& series, std::size_t delay, std::size_t bins,
                         std::size_t n_shuffles, std::uint64_t seed, double z) {
    std::vector<double> mis = shuffle_baseline(series, delay, bins, n_shuffles, seed);
    double mean = std::accumulate(mis.begin(), mis.end(), 0.0) / static_cast<double>(mis.size());
    double ss = 0.0;
    for (double m : mis) ss += (m - mean) * (m - mean);
    double sd = std::sqrt(ss / static_cast<double>(mis.size()));
    return mean + z * sd;
}

LagSelection select_lag(const MiCurve& curve, LagRule rule, double threshold,
                        std::size_t fixed_lag, std::size_t leveloff_window) {
    const std::size_t len = curve.mi_values.size();
    if (len == 0) throw ArgumentError("select_lag: empty curve");

    LagSelection sel;
    sel.rule = rule;
    sel.threshold = threshold;

    switch (rule) {
        case LagRule::fixed:
            if (fixed_lag < 1) throw ArgumentError("select_lag: fixed lag must be >= 1");
            sel.lag = fixed_lag;
            return sel;

        case LagRule::negligible_threshold: {
            if (leveloff_window < 1) throw ArgumentError("select_lag: level-off window must be >= 1");
            if (len < leveloff_window)
                throw SelectionError("select_lag: curve shorter than the level-off window; "
                                     "recompute with a larger max_delay");
            for (std::size_t k = 0; k + leveloff_window <= len; ++k) {
                if (curve.mi_values[k] > threshold) continue;
                bool leveled = true;
                for (std::size_t j = k; j + 1 < k + leveloff_window; ++j) {
                    if (curve.mi_values[j + 1] > curve.mi_values[j]) {
                        leveled = false;
                        break;
                    }
                }
                if (leveled) {
                    sel.lag = curve.delays[k];
                    return sel;
                }
            }
            throw SelectionError("select_lag: no delay meets threshold " +
                                 std::to_string(threshold) +
                                 " with a level-off; recompute with a larger max_delay");
        }

        case LagRule::first_local_minimum: {
            for (std::size_t k = 1; k + 1 < len; ++k) {
                if (curve.mi_values[k] < curve.mi_values[k - 1] &&
                    curve.mi_values[k] < curve.mi_values[k + 1]) {
                    sel.lag = curve.delays[k];
                    return sel;
                }
            }
            throw SelectionError("select_lag: no strict local minimum in the curve; "
                                 "recompute with a larger max_delay");
        }
    }
    throw ArgumentError("select_lag: unknown rule");
}

}  // namespace windcast
