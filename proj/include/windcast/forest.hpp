#ifndef WINDCAST_FOREST_HPP
#define WINDCAST_FOREST_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "windcast/embed.hpp"
#include "windcast/regressor.hpp"

namespace windcast {

struct ForestConfig {
    std::size_t n_trees = 100;
    std::size_t mtry = 0;          // features tried per split; 0 -> max(1, lag/3)
    std::size_t min_leaf = 5;
    double bootstrap_fraction = 2.0 / 3.0;  // 1.0 -> deterministic full sample
    std::uint64_t seed = 0;
    unsigned workers = 1;

    void validate(std::size_t lag) const;
};

/// CART regression tree as a flat node array; nodes[0] is the root.
/// Branches send feature <= threshold left, > threshold right.
struct TreeNode {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0;  // leaf mean
    std::uint32_t n_samples = 0;

    bool is_leaf() const { return feature < 0; }
};

struct RegressionTree {
    std::vector<TreeNode> nodes;
    std::size_t depth = 0;
    std::size_t leaf_count = 0;

    double predict(std::span<const double> window) const;
};

class ForestModel final : public Regressor {
public:
    std::vector<RegressionTree> trees;
    ForestConfig config;  // effective values (mtry resolved)
    std::optional<double> oob_rmse;
    ScalerParams scaler;
    std::size_t lag_ = 0;
    std::size_t train_rows = 0;
    std::string label_;

    double predict(std::span<const double> window) const override;
    std::size_t lag() const override { return lag_; }
    std::string kind() const override { return "forest"; }
    std::string train_label() const override { return label_; }
};

struct SplitChoice {
    std::size_t feature = 0;
    double threshold = 0.0;
    double impurity_decrease = 0.0;
};

/// Exhaustible split search: thresholds at midpoints between consecutive
/// sorted distinct values of each candidate feature, scored by weighted sum
/// of child target variances. Ties break to the lowest feature index, then
/// the lowest threshold. Returns nullopt when nothing reduces impurity or
/// every split violates min_leaf.
std::optional<SplitChoice> best_split(const EmbeddedDataset& dataset,
                                      std::span<const std::size_t> rows,
                                      std::span<const std::size_t> candidate_features,
                                      std::size_t min_leaf);

/// Bagged CART forest. Each tree draws floor(bootstrap_fraction * n) samples
/// with replacement from a stream derived from (seed, tree index); fraction
/// 1.0 uses the full sample deterministically. oob_rmse is present iff
/// fraction < 1 and every row was out-of-bag for at least one tree.
/// Trees train in parallel and assemble in tree-index order, so the result
/// does not depend on the worker count.
ForestModel train_forest(const EmbeddedDataset& scaled_dataset, const ForestConfig& config,
                         const ScalerParams& scaler = {}, const std::string& train_label = {});

double predict_forest(const ForestModel& model, std::span<const double> window);

void save_forest(const std::string& path, const ForestModel& model);
ForestModel load_forest(const std::string& path);

}  // namespace windcast

#endif
