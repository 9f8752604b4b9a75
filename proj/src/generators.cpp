#include "windcast/generators.hpp"

#include <cmath>
#include <deque>
#include <numbers>

#include "windcast/errors.hpp"
#include "windcast/util.hpp"

namespace windcast {

namespace {

double mg_derivative(double x, double x_delayed, const MackeyGlassParams& p) {
    return p.beta * x_delayed / (1.0 + std::pow(x_delayed, p.exponent)) - p.gamma * x;
}

}  // namespace

TimeSeries gen_mackey_glass(std::size_t n, std::uint64_t seed, const MackeyGlassParams& p) {
    if (n < 1) throw ArgumentError("gen_mackey_glass: n must be >= 1");
    if (p.step <= 0.0 || p.tau <= 0.0 || p.sample_every <= 0.0 || p.transient < 0.0)
        throw ArgumentError("gen_mackey_glass: step, tau and sample_every must be positive");

    const auto delay_steps = static_cast<std::size_t>(std::llround(p.tau / p.step));
    if (delay_steps < 1 || std::abs(delay_steps * p.step - p.tau) > 1e-9 * p.tau)
        throw ArgumentError("gen_mackey_glass: tau must be an integer multiple of step");
    const auto sample_steps = static_cast<std::size_t>(std::llround(p.sample_every / p.step));
    if (sample_steps < 1 || std::abs(sample_steps * p.step - p.sample_every) > 1e-9 * p.sample_every)
        throw ArgumentError("gen_mackey_glass: sample_every must be an integer multiple of step");
    const auto transient_steps = static_cast<std::size_t>(std::llround(p.transient / p.step));

    Rng rng(seed);
    const double x0 = 1.2 + rng.uniform(-0.25, 0.25);

    // history[k] = x(t - k*step); constant history x(t<=0) = x0.
    std::deque<double> history(delay_steps + 1, x0);

    auto delayed_at = [&](double back_steps) {
        // back_steps in [delay_steps - 1, delay_steps]; linear interpolation
        // between the two bracketing grid values.
        auto lo = static_cast<std::size_t>(std::floor(back_steps));
        double frac = back_steps - static_cast<double>(lo);
        if (lo + 1 >= history.size()) return history.back();
        return history[lo] * (1.0 - frac) + history[lo + 1] * frac;
    };

    TimeSeries out;
    out.values.reserve(n);
    out.label = "mackey_glass";
    out.physical = false;

    const std::size_t total_steps = transient_steps + (n - 1) * sample_steps + sample_steps;
    std::size_t emitted = 0;
    if (transient_steps == 0) {
        out.values.push_back(history.front());
        ++emitted;
    }

    for (std::size_t step_idx = 1; step_idx <= total_steps && emitted < n; ++step_idx) {
        const double x = history.front();
        const double xd_full = history[delay_steps];
        const double xd_half = delayed_at(static_cast<double>(delay_steps) - 0.5);

        const double k1 = mg_derivative(x, xd_full, p);
        const double k2 = mg_derivative(x + 0.5 * p.step * k1, xd_half, p);
        const double k3 = mg_derivative(x + 0.5 * p.step * k2, xd_half, p);
        // At t+step the delayed value x(t+step-tau) is history[delay_steps-1].
        const double k4 = mg_derivative(x + p.step * k3, history[delay_steps - 1], p);

        const double x_next = x + p.step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        history.pop_back();
        history.push_front(x_next);

        if (step_idx >= transient_steps && (step_idx - transient_steps) % sample_steps == 0) {
            out.values.push_back(x_next);
            ++emitted;
        }
    }

    out.validate();
    return out;
}

TimeSeries gen_noisy_periodic(std::size_t n, std::size_t period, double noise_sd,
                              std::uint64_t seed, double amplitude, double offset) {
    if (n < 1) throw ArgumentError("gen_noisy_periodic: n must be >= 1");
    if (period < 2) throw ArgumentError("gen_noisy_periodic: period must be >= 2");
    if (noise_sd < 0.0) throw ArgumentError("gen_noisy_periodic: noise_sd must be >= 0");

    std::vector<double> waveform(period);
    for (std::size_t ph = 0; ph < period; ++ph) {
        waveform[ph] = offset + amplitude *
            std::sin(2.0 * std::numbers::pi * static_cast<double>(ph) / static_cast<double>(period));
    }

    Rng rng(seed);
    TimeSeries out;
    out.values.reserve(n);
    out.label = "noisy_periodic";
    out.physical = false;
    for (std::size_t t = 0; t < n; ++t) {
        double v = waveform[t % period];
        if (noise_sd > 0.0) v += rng.normal(0.0, noise_sd);
        out.values.push_back(v);
    }

    out.validate();
    return out;
}

}  // namespace windcast
