#ifndef WINDCAST_MI_HPP
#define WINDCAST_MI_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "windcast/series.hpp"

namespace windcast {

/// Mutual information of a series against its delayed copy, per delay.
struct MiCurve {
    std::vector<std::size_t> delays;   // strictly increasing, starting at 1
    std::vector<double> mi_values;     // nats, >= 0
    std::size_t bin_count = 0;
    std::vector<std::size_t> n_effective;  // pairs used at each delay
};

enum class LagRule { negligible_threshold, first_local_minimum, fixed };

std::string to_string(LagRule rule);
LagRule lag_rule_from_string(const std::string& name);

struct LagSelection {
    std::size_t lag = 0;
    LagRule rule = LagRule::negligible_threshold;
    double threshold = 0.0;  // nats; meaningful for negligible_threshold
};

/// Default equal-width bin count: ceil(sqrt(n_pairs/5)) clamped to [2, 64].
/// Keeps about five expected pairs per occupied cell.
std::size_t default_bin_count(std::size_t n_pairs);

/// Plug-in histogram entropy of the series (nats), equal-width bins over
/// [min, max] of the values.
double entropy_est(const TimeSeries& series, std::size_t bins);

/// Plug-in MI of explicit pairs, both axes binned equal-width over [lo, hi].
/// Computed as H(X) + H(Y) - H(X,Y) from one joint histogram, so it is
/// non-negative and mi over identical pairs reproduces the entropy exactly.
double mi_of_pairs(std::span<const double> xs, std::span<const double> ys,
                   std::size_t bins, double lo, double hi);

/// I_est(X_t; X_{t+delay}) over pairs {(v[t], v[t+delay])}, bins spanning
/// [min, max] of the whole series. Requires length - delay >= bins.
double mi_at_delay(const TimeSeries& series, std::size_t delay, std::size_t bins);

/// Curve at delays 1..max_delay with a shared bin count (bins == 0 picks
/// the default from the pair count at max_delay). Deterministic; delays are
/// evaluated in parallel and assembled in delay order.
MiCurve mi_curve(const TimeSeries& series, std::size_t max_delay, std::size_t bins = 0,
                 unsigned workers = 1);

/// MI values of `n_shuffles` random permutations of one marginal at the
/// given delay; the independence baseline for thresholds and tests.
std::vector<double> shuffle_baseline(const TimeSeries& series, std::size_t delay,
                                     std::size_t bins, std::size_t n_shuffles,
                                     std::uint64_t seed);

/// Baseline mean + z * sd, the default negligible-threshold level.
double shuffle_threshold(const TimeSeries& series, std::size_t delay, std::size_t bins,
                         std::size_t n_shuffles, std::uint64_t seed, double z = 2.0);

/// Applies a selection rule to a computed curve. For negligible_threshold
/// the chosen delay must meet the threshold and start a non-increasing run
/// of `leveloff_window` values. Throws SelectionError (asking for a larger
/// max_delay) when the rule is never satisfied.
LagSelection select_lag(const MiCurve& curve, LagRule rule, double threshold = 0.0,
                        std::size_t fixed_lag = 0, std::size_t leveloff_window = 5);

}  // namespace windcast

#endif
