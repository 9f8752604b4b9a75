#include "windcast/forest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "windcast/errors.hpp"
#include "windcast/util.hpp"
#include "windcast/model_io.hpp"

namespace windcast {

void ForestConfig::validate(std::size_t lag) const {
    if (n_trees < 1) throw ArgumentError("forest: n_trees must be >= 1");
    if (mtry > lag)
        throw ArgumentError("forest: mtry " + std::to_string(mtry) +
                            " exceeds feature count " + std::to_string(lag));
    if (min_leaf < 1) throw ArgumentError("forest: min_leaf must be >= 1");
    if (!(bootstrap_fraction > 0.0 && bootstrap_fraction <= 1.0))
        throw ArgumentError("forest: bootstrap_fraction must be in (0,1]");
}

double RegressionTree::predict(std::span<const double> window) const {
    std::size_t node = 0;
    for (;;) {
        const TreeNode& nd = nodes[node];
        if (nd.is_leaf()) return nd.value;
        node = window[static_cast<std::size_t>(nd.feature)] <= nd.threshold
                   ? static_cast<std::size_t>(nd.left)
                   : static_cast<std::size_t>(nd.right);
    }
}

double ForestModel::predict(std::span<const double> window) const {
    if (window.size() != lag_)
        throw ArgumentError("forest: window of size " + std::to_string(window.size()) +
                            " does not match training lag " + std::to_string(lag_));
    std::vector<double> scaled = apply_scaler(window, scaler);
    double sum = 0.0;
    for (const auto& tree : trees) sum += tree.predict(scaled);
    return scaler.invert(sum / static_cast<double>(trees.size()));
}

double predict_forest(const ForestModel& model, std::span<const double> window) {
    return model.predict(window);
}

std::optional<SplitChoice> best_split(const EmbeddedDataset& dataset,
                                      std::span<const std::size_t> rows,
                                      std::span<const std::size_t> candidate_features,
                                      std::size_t min_leaf) {
    const std::size_t m = rows.size();
    if (m < 2 || candidate_features.empty()) return std::nullopt;

    // Pure node: nothing to gain.
    double t_min = dataset.targets[rows[0]], t_max = t_min;
    for (std::size_t r : rows) {
        t_min = std::min(t_min, dataset.targets[r]);
        t_max = std::max(t_max, dataset.targets[r]);
    }
    if (t_min == t_max) return std::nullopt;

    double parent_sum = 0.0, parent_sumsq = 0.0;
    for (std::size_t r : rows) {
        double t = dataset.targets[r];
        parent_sum += t;
        parent_sumsq += t * t;
    }
    const double parent_sse = parent_sumsq - parent_sum * parent_sum / static_cast<double>(m);

    std::optional<SplitChoice> best;
    double best_children_sse = parent_sse;

    std::vector<std::pair<double, double>> pts(m);  // (feature value, target)
    for (std::size_t feature : candidate_features) {
        for (std::size_t k = 0; k < m; ++k) {
            std::size_t r = rows[k];
            pts[k] = {dataset.features[r * dataset.lag + feature], dataset.targets[r]};
        }
        std::sort(pts.begin(), pts.end());

        double left_sum = 0.0, left_sumsq = 0.0;
        for (std::size_t k = 0; k + 1 < m; ++k) {
            left_sum += pts[k].second;
            left_sumsq += pts[k].second * pts[k].second;
            if (pts[k].first == pts[k + 1].first) continue;  // not a distinct boundary

            const std::size_t n_left = k + 1, n_right = m - n_left;
            if (n_left < min_leaf || n_right < min_leaf) continue;

            const double threshold = 0.5 * (pts[k].first + pts[k + 1].first);
            if (!(threshold < pts[k + 1].first)) continue;  // degenerate adjacent values

            const double right_sum = parent_sum - left_sum;
            const double right_sumsq = parent_sumsq - left_sumsq;
            const double sse = (left_sumsq - left_sum * left_sum / static_cast<double>(n_left)) +
                               (right_sumsq - right_sum * right_sum / static_cast<double>(n_right));
            // Strict improvement; ties keep the earlier (lower feature /
            // lower threshold) candidate because features scan ascending.
            if (sse < best_children_sse) {
                best_children_sse = sse;
                best = SplitChoice{feature, threshold,
                                   (parent_sse - sse) / static_cast<double>(m)};
            }
        }
    }
    if (best && !(best->impurity_decrease > 0.0)) return std::nullopt;
    return best;
}

namespace {

struct TreeBuilder {
    const EmbeddedDataset& data;
    std::size_t mtry;
    std::size_t min_leaf;
    Rng& rng;
    RegressionTree tree;

    std::vector<std::size_t> sample_features() {
        const std::size_t lag = data.lag;
        std::vector<std::size_t> all(lag);
        std::iota(all.begin(), all.end(), std::size_t{0});
        if (mtry >= lag) return all;
        // Partial Fisher-Yates, then ascending order for deterministic
        // tie-breaking in best_split.
        for (std::size_t k = 0; k < mtry; ++k) {
            std::size_t j = k + rng.bounded(lag - k);
            std::swap(all[k], all[j]);
        }
        all.resize(mtry);
        std::sort(all.begin(), all.end());
        return all;
    }

    std::int32_t grow(std::vector<std::size_t>& rows, std::size_t depth) {
        tree.depth = std::max(tree.depth, depth);
        const std::size_t m = rows.size();

        double t_min = data.targets[rows[0]], t_max = t_min, sum = 0.0;
        for (std::size_t r : rows) {
            double t = data.targets[r];
            t_min = std::min(t_min, t);
            t_max = std::max(t_max, t);
            sum += t;
        }

        auto make_leaf = [&]() {
            TreeNode leaf;
            leaf.value = sum / static_cast<double>(m);
            leaf.n_samples = static_cast<std::uint32_t>(m);
            tree.nodes.push_back(leaf);
            ++tree.leaf_count;
            return static_cast<std::int32_t>(tree.nodes.size() - 1);
        };

        if (m < 2 * min_leaf || t_min == t_max) return make_leaf();

        auto candidates = sample_features();
        auto choice = best_split(data, rows, candidates, min_leaf);
        if (!choice) return make_leaf();

        std::vector<std::size_t> left_rows, right_rows;
        left_rows.reserve(m);
        right_rows.reserve(m);
        for (std::size_t r : rows) {
            if (data.features[r * data.lag + choice->feature] <= choice->threshold)
                left_rows.push_back(r);
            else
                right_rows.push_back(r);
        }

        TreeNode branch;
        branch.feature = static_cast<std::int32_t>(choice->feature);
        branch.threshold = choice->threshold;
        branch.n_samples = static_cast<std::uint32_t>(m);
        tree.nodes.push_back(branch);
        const auto node_idx = static_cast<std::int32_t>(tree.nodes.size() - 1);

        rows.clear();
        rows.shrink_to_fit();
        const std::int32_t left = grow(left_rows, depth + 1);
        const std::int32_t right = grow(right_rows, depth + 1);
        tree.nodes[static_cast<std::size_t>(node_idx)].left = left;
        tree.nodes[static_cast<std::size_t>(node_idx)].right = right;
        return node_idx;
    }
};

}  // namespace

ForestModel train_forest(const EmbeddedDataset& dataset, const ForestConfig& config,
                         const ScalerParams& scaler, const std::string& train_label) {
    if (dataset.rows() == 0) throw DataError("train_forest: empty dataset");
    for (double v : dataset.features)
        if (!std::isfinite(v)) throw DataError("train_forest: non-finite feature value");
    for (double v : dataset.targets)
        if (!std::isfinite(v)) throw DataError("train_forest: non-finite target value");
    config.validate(dataset.lag);

    ForestConfig effective = config;
    if (effective.mtry == 0) effective.mtry = std::max<std::size_t>(1, dataset.lag / 3);

    const std::size_t n = dataset.rows();
    const bool full_sample = effective.bootstrap_fraction >= 1.0;
    const std::size_t draws =
        full_sample ? n
                    : static_cast<std::size_t>(std::floor(effective.bootstrap_fraction *
                                                          static_cast<double>(n)));
    if (draws == 0) throw DataError("train_forest: bootstrap_fraction draws no samples");

    ForestModel model;
    model.config = effective;
    model.scaler = scaler;
    model.lag_ = dataset.lag;
    model.train_rows = n;
    model.label_ = train_label;
    model.trees.resize(effective.n_trees);

    std::vector<std::vector<char>> in_bag(effective.n_trees);

    parallel_for(effective.n_trees, std::max(1u, effective.workers), [&](std::size_t t) {
        Rng rng(derive_stream_seed(effective.seed, t));
        std::vector<std::size_t> rows;
        rows.reserve(draws);
        std::vector<char> bag(n, 0);
        if (full_sample) {
            rows.resize(n);
            std::iota(rows.begin(), rows.end(), std::size_t{0});
            std::fill(bag.begin(), bag.end(), 1);
        } else {
            for (std::size_t d = 0; d < draws; ++d) {
                std::size_t r = static_cast<std::size_t>(rng.bounded(n));
                rows.push_back(r);
                bag[r] = 1;
            }
        }
        TreeBuilder builder{dataset, effective.mtry, effective.min_leaf, rng, {}};
        builder.grow(rows, 0);
        model.trees[t] = std::move(builder.tree);
        in_bag[t] = std::move(bag);
    });

    if (!full_sample) {
        std::vector<double> oob_sum(n, 0.0);
        std::vector<std::size_t> oob_count(n, 0);
        for (std::size_t t = 0; t < effective.n_trees; ++t) {
            for (std::size_t r = 0; r < n; ++r) {
                if (in_bag[t][r]) continue;
                oob_sum[r] += model.trees[t].predict(dataset.row(r));
                ++oob_count[r];
            }
        }
        bool all_covered = std::all_of(oob_count.begin(), oob_count.end(),
                                       [](std::size_t c) { return c > 0; });
        if (all_covered) {
            double se = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                double err = oob_sum[r] / static_cast<double>(oob_count[r]) - dataset.targets[r];
                se += err * err;
            }
            model.oob_rmse = std::sqrt(se / static_cast<double>(n));
        }
    }
    return model;
}

namespace {

nlohmann::json tree_to_json(const RegressionTree& tree) {
    nlohmann::json feats = nlohmann::json::array();
    nlohmann::json thresholds = nlohmann::json::array();
    nlohmann::json lefts = nlohmann::json::array();
    nlohmann::json rights = nlohmann::json::array();
    nlohmann::json values = nlohmann::json::array();
    nlohmann::json counts = nlohmann::json::array();
    for (const auto& nd : tree.nodes) {
        feats.push_back(nd.feature);
        thresholds.push_back(nd.threshold);
        lefts.push_back(nd.left);
        rights.push_back(nd.right);
        values.push_back(nd.value);
        counts.push_back(nd.n_samples);
    }
    return {{"feature", std::move(feats)},   {"threshold", std::move(thresholds)},
            {"left", std::move(lefts)},      {"right", std::move(rights)},
            {"value", std::move(values)},    {"n_samples", std::move(counts)},
            {"depth", tree.depth},           {"leaf_count", tree.leaf_count}};
}

RegressionTree tree_from_json(const nlohmann::json& j) {
    RegressionTree tree;
    const auto& feats = j.at("feature");
    const auto& thresholds = j.at("threshold");
    const auto& lefts = j.at("left");
    const auto& rights = j.at("right");
    const auto& values = j.at("value");
    const auto& counts = j.at("n_samples");
    const std::size_t n = feats.size();
    if (thresholds.size() != n || lefts.size() != n || rights.size() != n ||
        values.size() != n || counts.size() != n)
        throw DataError("forest model: ragged tree arrays");
    tree.nodes.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        tree.nodes[k].feature = feats[k].get<std::int32_t>();
        tree.nodes[k].threshold = thresholds[k].get<double>();
        tree.nodes[k].left = lefts[k].get<std::int32_t>();
        tree.nodes[k].right = rights[k].get<std::int32_t>();
        tree.nodes[k].value = values[k].get<double>();
        tree.nodes[k].n_samples = counts[k].get<std::uint32_t>();
    }
    tree.depth = j.at("depth").get<std::size_t>();
    tree.leaf_count = j.at("leaf_count").get<std::size_t>();
    return tree;
}

}  // namespace

void save_forest(const std::string& path, const ForestModel& model) {
    nlohmann::json j;
    j["format"] = "windcast-model";
    j["toolkit_version"] = kToolkitVersion;
    j["model"] = "forest";
    j["version"] = 1;
    j["lag"] = model.lag_;
    j["config"] = {{"n_trees", model.config.n_trees},
                   {"mtry", model.config.mtry},
                   {"min_leaf", model.config.min_leaf},
                   {"bootstrap_fraction", model.config.bootstrap_fraction},
                   {"seed", model.config.seed}};
    j["scaler"] = {{"kind", to_string(model.scaler.kind)},
                   {"offset", model.scaler.offset},
                   {"scale", model.scaler.scale},
                   {"fallback", model.scaler.fallback}};
    if (model.oob_rmse)
        j["oob_rmse"] = *model.oob_rmse;
    else
        j["oob_rmse"] = nullptr;
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& tree : model.trees) trees.push_back(tree_to_json(tree));
    j["trees"] = std::move(trees);
    j["train_rows"] = model.train_rows;
    j["train_label"] = model.label_;

    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << j.dump(1) << '\n';
    if (!out) throw DataError("write failed for '" + path + "'");
}

ForestModel load_forest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("bad model file '" + path + "': " + e.what());
    }
    if (j.value("format", "") != "windcast-model" || j.value("model", "") != "forest")
        throw DataError("'" + path + "' is not a windcast forest model");
    if (j.value("version", 0) != 1)
        throw DataError("unsupported forest model version in '" + path + "'");

    ForestModel m;
    m.lag_ = j.at("lag").get<std::size_t>();
    const auto& jc = j.at("config");
    m.config.n_trees = jc.at("n_trees").get<std::size_t>();
    m.config.mtry = jc.at("mtry").get<std::size_t>();
    m.config.min_leaf = jc.at("min_leaf").get<std::size_t>();
    m.config.bootstrap_fraction = jc.at("bootstrap_fraction").get<double>();
    m.config.seed = jc.at("seed").get<std::uint64_t>();
    const auto& js = j.at("scaler");
    m.scaler.kind = scaler_kind_from_string(js.at("kind").get<std::string>());
    m.scaler.offset = js.at("offset").get<double>();
    m.scaler.scale = js.at("scale").get<double>();
    m.scaler.fallback = js.at("fallback").get<bool>();
    if (!j.at("oob_rmse").is_null()) m.oob_rmse = j.at("oob_rmse").get<double>();
    for (const auto& jt : j.at("trees")) m.trees.push_back(tree_from_json(jt));
    if (m.trees.size() != m.config.n_trees)
        throw DataError("forest model: tree count mismatch in '" + path + "'");
    m.train_rows = j.at("train_rows").get<std::size_t>();
    m.label_ = j.at("train_label").get<std::string>();
    return m;
}

}  // namespace windcast
