#include "windcast/forecast.hpp"

#include <algorithm>
#include <cmath>

#include "windcast/errors.hpp"

namespace windcast {

ForecastPath forecast_recursive(const Regressor& model, std::span<const double> window,
                                std::size_t horizon, std::optional<double> floor,
                                std::int64_t origin_index) {
    if (horizon < 1) throw ArgumentError("forecast: horizon must be >= 1");
    if (window.size() != model.lag())
        throw ArgumentError("forecast: window of size " + std::to_string(window.size()) +
                            " does not match model lag " + std::to_string(model.lag()));

    ForecastPath path;
    path.origin_index = origin_index;
    path.horizon = horizon;
    path.model_kind = model.kind();
    path.values.reserve(horizon);

    std::vector<double> buf(window.begin(), window.end());
    for (std::size_t step = 1; step <= horizon; ++step) {
        double pred = model.predict(buf);
        if (!std::isfinite(pred))
            throw DataError("forecast: non-finite prediction at step " + std::to_string(step));
        if (floor && pred < *floor) pred = *floor;
        path.values.push_back(pred);
        if (step < horizon) {
            std::rotate(buf.begin(), buf.begin() + 1, buf.end());
            buf.back() = pred;
        }
    }
    return path;
}

ForecastPath clamp_physical(const ForecastPath& path, double floor) {
    ForecastPath out = path;
    for (double& v : out.values) v = std::max(v, floor);
    return out;
}

}  // namespace windcast
