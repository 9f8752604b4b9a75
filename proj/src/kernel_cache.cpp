#include "windcast/kernel_cache.hpp"

#include <algorithm>
#include <cmath>

#include "windcast/errors.hpp"

namespace windcast {

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
    if (a.size() != b.size())
        throw ArgumentError("rbf_kernel: dimension mismatch (" + std::to_string(a.size()) +
                            " vs " + std::to_string(b.size()) + ")");
    if (!(gamma > 0.0)) throw ArgumentError("rbf_kernel: gamma must be > 0");
    double d2 = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        double d = a[k] - b[k];
        d2 += d * d;
    }
    return std::exp(-gamma * d2);
}

KernelCache::KernelCache(const std::vector<double>& features, std::size_t dim, double gamma,
                         std::size_t byte_budget)
    : features_(&features), dim_(dim), n_(dim == 0 ? 0 : features.size() / dim), gamma_(gamma) {
    if (dim == 0 || features.size() % dim != 0)
        throw ArgumentError("KernelCache: features size not a multiple of dim");
    std::size_t row_bytes = n_ * sizeof(double);
    max_rows_ = row_bytes == 0 ? 2 : std::max<std::size_t>(2, byte_budget / row_bytes);
}

std::span<const double> KernelCache::row(std::size_t i) {
    auto it = entries_.find(i);
    if (it != entries_.end()) {
        ++hits_;
        lru_.erase(it->second.lru_pos);
        lru_.push_front(i);
        it->second.lru_pos = lru_.begin();
        return it->second.values;
    }

    ++misses_;
    while (entries_.size() >= max_rows_) {
        std::size_t victim = lru_.back();
        lru_.pop_back();
        entries_.erase(victim);
    }

    Entry entry;
    entry.values.resize(n_);
    auto xi = feature_row(i);
    for (std::size_t j = 0; j < n_; ++j) {
        auto xj = feature_row(j);
        double d2 = 0.0;
        for (std::size_t k = 0; k < dim_; ++k) {
            double d = xi[k] - xj[k];
            d2 += d * d;
        }
        entry.values[j] = std::exp(-gamma_ * d2);
    }

    lru_.push_front(i);
    entry.lru_pos = lru_.begin();
    auto [pos, inserted] = entries_.emplace(i, std::move(entry));
    return pos->second.values;
}

}  // namespace windcast
