#ifndef WINDCAST_KERNEL_CACHE_HPP
#define WINDCAST_KERNEL_CACHE_HPP

#include <cstddef>
#include <list>
#include <span>
#include <unordered_map>
#include <vector>

namespace windcast {

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma);

/// LRU cache of RBF Gram-matrix rows over a fixed training matrix.
///
/// A year of hourly data (~8700 rows, 72 features) would need ~600 MB for
/// the full Gram matrix, so rows are computed on demand and evicted
/// least-recently-used under a byte budget. At least two rows are always
/// retained so a working pair never evicts itself.
class KernelCache {
public:
    /// `features` is row-major n x dim and must outlive the cache.
    KernelCache(const std::vector<double>& features, std::size_t dim, double gamma,
                std::size_t byte_budget);

    /// Row i of the Gram matrix: K(x_i, x_j) for all j. The returned span is
    /// valid until the next row() call.
    std::span<const double> row(std::size_t i);

    double diag(std::size_t) const { return 1.0; }  // exp(0) for RBF

    std::size_t size() const { return n_; }
    std::size_t rows_cached() const { return entries_.size(); }
    std::size_t hits() const { return hits_; }
    std::size_t misses() const { return misses_; }

private:
    struct Entry {
        std::vector<double> values;
        std::list<std::size_t>::iterator lru_pos;
    };

    std::span<const double> feature_row(std::size_t i) const {
        return {features_->data() + i * dim_, dim_};
    }

    const std::vector<double>* features_;
    std::size_t dim_;
    std::size_t n_;
    double gamma_;
    std::size_t max_rows_;
    std::list<std::size_t> lru_;  // front = most recent
    std::unordered_map<std::size_t, Entry> entries_;
    std::size_t hits_ = 0;
    std::size_t misses_ = 0;
};

}  // namespace windcast

#endif
