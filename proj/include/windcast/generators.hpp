#ifndef WINDCAST_GENERATORS_HPP
#define WINDCAST_GENERATORS_HPP

#include <cstdint>

#include "windcast/series.hpp"

namespace windcast {

/// Mackey-Glass delay differential equation
///     dx/dt = beta * x(t - tau) / (1 + x(t - tau)^exponent) - gamma * x(t)
/// integrated with fixed-step RK4 (delayed term linearly interpolated at
/// half steps). The defaults are the classic chaotic parameterization.
///
/// The seed perturbs the constant initial history, so different seeds give
/// different trajectories of the same system. With the default parameters
/// the post-transient trajectory stays within roughly [0.2, 1.4].
struct MackeyGlassParams {
    double tau = 17.0;            // delay
    double beta = 0.2;
    double gamma = 0.1;
    double exponent = 10.0;
    double step = 0.1;            // RK4 step; tau must be a multiple
    double sample_every = 1.0;    // time units between emitted samples
    double transient = 500.0;     // time units discarded before sampling
};

TimeSeries gen_mackey_glass(std::size_t n, std::uint64_t seed,
                            const MackeyGlassParams& params = {});

/// Sinusoid tiled from a per-phase table plus Gaussian noise:
///     v[t] = offset + amplitude * sin(2*pi*(t mod period)/period) + noise
/// Tiling makes the noise-free series exactly periodic, v[t+period] == v[t]
/// bit-for-bit.
TimeSeries gen_noisy_periodic(std::size_t n, std::size_t period, double noise_sd,
                              std::uint64_t seed, double amplitude = 1.0,
                              double offset = 0.0);

}  // namespace windcast

#endif
