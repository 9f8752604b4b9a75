#ifndef WINDCAST_SERIES_HPP
#define WINDCAST_SERIES_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace windcast {

/// Uniformly sampled scalar series (wind speed, m/s).
///
/// `physical` marks measured wind data: values must be >= 0 and recursive
/// forecasts get clamped at the floor. Synthetic series leave it off.
struct TimeSeries {
    std::vector<double> values;
    double sample_interval_hours = 1.0;
    std::int64_t start_index = 0;
    std::string label;
    bool physical = false;

    std::size_t size() const { return values.size(); }

    // Throws DataError if empty, non-finite, or negative while physical.
    void validate() const;
};

/// Train/test boundary: a fraction of the length or an explicit index.
struct SplitSpec {
    enum class Kind { fraction, boundary };
    Kind kind = Kind::fraction;
    double train_fraction = 0.5;     // in (0,1)
    std::size_t boundary = 0;        // first index of the test segment

    static SplitSpec from_fraction(double f) { return {Kind::fraction, f, 0}; }
    static SplitSpec from_boundary(std::size_t b) { return {Kind::boundary, 0.0, b}; }
};

/// How read_csv treats missing sample indices.
///
/// reject: any gap is an error (the default; imputation must be explicit).
/// interpolate_linear: fill internal gaps of length <= max_gap linearly,
///   error on longer ones.
/// drop_leading_trailing: keep the longest contiguous run of consecutive
///   indices (earliest run on ties) and drop everything outside it.
struct GapPolicy {
    enum class Mode { reject, interpolate_linear, drop_leading_trailing };
    Mode mode = Mode::reject;
    std::size_t max_gap = 0;
};

/// Parses the `index,speed_ms` CSV contract. Row order must be strictly
/// increasing in index; gaps are handled per policy.
TimeSeries read_csv(const std::string& path, const GapPolicy& policy = {});

/// Writes the same contract back. Speeds are emitted with shortest
/// round-trip precision, so read_csv(write_csv(s)) reproduces s exactly.
void write_csv(const std::string& path, const TimeSeries& series);

/// Contiguous ordered split; concatenating the two outputs reproduces the
/// input. Throws ArgumentError when either segment would be empty.
std::pair<TimeSeries, TimeSeries> split(const TimeSeries& series, const SplitSpec& spec);

}  // namespace windcast

#endif
