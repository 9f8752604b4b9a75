#ifndef WINDCAST_FORECAST_HPP
#define WINDCAST_FORECAST_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "windcast/regressor.hpp"

namespace windcast {

/// Recursive multi-step forecast from one origin.
struct ForecastPath {
    std::int64_t origin_index = 0;  // position of the last observed sample
    std::size_t horizon = 0;
    std::vector<double> values;  // length == horizon
    std::string model_kind;
};

/// Iterated one-step forecasting: step 1 predicts from the observed window;
/// each later step drops the oldest window entry and appends the previous
/// prediction. Observed values never re-enter once the window scrolls past
/// them. When `floor` is set (physical series), every prediction is clamped
/// before it is fed back, so the recursion never sees an impossible value.
ForecastPath forecast_recursive(const Regressor& model, std::span<const double> window,
                                std::size_t horizon,
                                std::optional<double> floor = std::nullopt,
                                std::int64_t origin_index = 0);

/// Clamps an existing path from below. Identity when floor is disengaged.
ForecastPath clamp_physical(const ForecastPath& path, double floor);

}  // namespace windcast

#endif
