#include "windcast/util.hpp"

#include <atomic>
#include <cmath>

namespace windcast {

double Rng::normal(double mean, double sd) {
    for (;;) {
        double u = 2.0 * uniform01() - 1.0;
        double v = 2.0 * uniform01() - 1.0;
        double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) {
            return mean + sd * u * std::sqrt(-2.0 * std::log(s) / s);
        }
    }
}

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    if (workers <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    unsigned nthreads = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (unsigned t = 0; t < nthreads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) break;
                fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

unsigned default_workers() {
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

}  // namespace windcast
