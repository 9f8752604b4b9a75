#include "windcast/svr.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "windcast/errors.hpp"
#include "windcast/evaluate.hpp"
#include "windcast/kernel_cache.hpp"
#include "windcast/model_io.hpp"

namespace windcast {

void SvrConfig::validate() const {
    if (!(c > 0.0)) throw ArgumentError("svr: C must be > 0");
    if (!(epsilon >= 0.0)) throw ArgumentError("svr: epsilon must be >= 0");
    if (gamma != 0.0 && !(gamma > 0.0)) throw ArgumentError("svr: gamma must be > 0");
    if (!(tolerance > 0.0)) throw ArgumentError("svr: tolerance must be > 0");
}

double SvrModel::decision_scaled(std::span<const double> scaled_window) const {
    if (scaled_window.size() != lag_)
        throw ArgumentError("svr: window of size " + std::to_string(scaled_window.size()) +
                            " does not match training lag " + std::to_string(lag_));
    double f = bias;
    for (std::size_t i = 0; i < sv_count(); ++i)
        f += dual_coeffs[i] * rbf_kernel(support_vector(i), scaled_window, config.gamma);
    return f;
}

double SvrModel::predict(std::span<const double> window) const {
    std::vector<double> scaled = apply_scaler(window, scaler);
    return scaler.invert(decision_scaled(scaled));
}

std::vector<std::string> SvrModel::warnings() const {
    if (converged) return {};
    return {"svr solver hit the pass limit before reaching KKT tolerance"};
}

double predict_svr(const SvrModel& model, std::span<const double> window) {
    return model.predict(window);
}

namespace {

// SMO over the epsilon-SVR dual in beta form:
//   min 0.5 sum_ij beta_i beta_j K_ij + eps sum |beta_i| - sum y_i beta_i
//   s.t. sum beta_i = 0, |beta_i| <= C
// KKT in terms of E_i = f(x_i) - y_i:
//   beta_i = 0        -> |E_i| <= eps
//   beta_i in (0, C)  -> E_i = -eps
//   beta_i = C        -> E_i <= -eps      (mirrored for negative side)
class SmoSolver {
public:
    SmoSolver(const EmbeddedDataset& data, const SvrConfig& cfg)
        : data_(data),
          cfg_(cfg),
          n_(data.rows()),
          cache_(data.features, data.lag, cfg.gamma, cfg.cache_bytes),
          beta_(data.rows(), 0.0),
          u_(data.rows(), 0.0) {
        // Median start for b keeps every inside-tube dataset (constant
        // targets in particular) at zero iterations with an exact bias.
        std::vector<double> ys = data.targets;
        auto mid = ys.begin() + static_cast<std::ptrdiff_t>(ys.size() / 2);
        std::nth_element(ys.begin(), mid, ys.end());
        b_ = *mid;
    }

    bool solve(std::size_t max_passes) {
        bool examine_all = true;
        std::vector<std::size_t> order;
        order.reserve(n_);
        for (std::size_t pass = 0; pass < max_passes; ++pass) {
            order.clear();
            for (std::size_t i = 0; i < n_; ++i) {
                if (!examine_all && !in_bound(i)) continue;
                if (violation(i) > cfg_.tolerance) order.push_back(i);
            }
            if (order.empty()) {
                if (examine_all) return true;
                examine_all = true;
                continue;
            }
            // Maximal violators first.
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return violation(a) > violation(b);
            });
            std::size_t changed = 0;
            for (std::size_t i : order) {
                if (violation(i) > cfg_.tolerance && examine(i)) ++changed;
            }
            if (changed == 0) {
                if (examine_all) return false;  // violators remain but no pair moves
                examine_all = true;
            } else if (examine_all) {
                examine_all = false;
            }
        }
        return false;
    }

    SvrModel build_model(bool converged, const ScalerParams& scaler,
                         const std::string& train_label) const {
        SvrModel model;
        model.config = cfg_;
        model.scaler = scaler;
        model.lag_ = data_.lag;
        model.bias = b_;
        model.converged = converged;
        model.train_rows = n_;
        model.label_ = train_label;

        const double prune = 1e-10 * cfg_.c;
        std::vector<std::size_t> sv_idx;
        for (std::size_t i = 0; i < n_; ++i)
            if (std::abs(beta_[i]) > prune) sv_idx.push_back(i);

        model.dual_coeffs.reserve(sv_idx.size());
        model.support_vectors.reserve(sv_idx.size() * data_.lag);
        for (std::size_t i : sv_idx) {
            model.dual_coeffs.push_back(beta_[i]);
            auto row = data_.row(i);
            model.support_vectors.insert(model.support_vectors.end(), row.begin(), row.end());
        }

        // Recompute the dual objective from the pruned coefficients rather
        // than the incrementally updated caches.
        double quad = 0.0, l1 = 0.0, lin = 0.0;
        for (std::size_t a = 0; a < sv_idx.size(); ++a) {
            for (std::size_t bIdx = 0; bIdx < sv_idx.size(); ++bIdx) {
                quad += model.dual_coeffs[a] * model.dual_coeffs[bIdx] *
                        rbf_kernel(model.support_vector(a), model.support_vector(bIdx), cfg_.gamma);
            }
            l1 += std::abs(model.dual_coeffs[a]);
            lin += data_.targets[sv_idx[a]] * model.dual_coeffs[a];
        }
        model.dual_objective = 0.5 * quad + cfg_.epsilon * l1 - lin;
        return model;
    }

private:
    double error(std::size_t i) const { return u_[i] + b_ - data_.targets[i]; }

    bool in_bound(std::size_t i) const {
        const double tiny = 1e-10 * cfg_.c;
        return std::abs(beta_[i]) > tiny && std::abs(beta_[i]) < cfg_.c - tiny;
    }

    double violation(std::size_t i) const {
        const double C = cfg_.c, eps = cfg_.epsilon;
        const double tiny = 1e-10 * C;
        const double e = error(i);
        const double bi = beta_[i];
        if (bi >= C - tiny) return std::max(0.0, e + eps);
        if (bi <= -C + tiny) return std::max(0.0, eps - e);
        if (bi > tiny) return std::abs(e + eps);
        if (bi < -tiny) return std::abs(e - eps);
        return std::max(0.0, std::abs(e) - eps);
    }

    bool examine(std::size_t i) {
        const double ei = error(i);
        std::size_t best_j = n_;
        double best_gap = -1.0;
        for (std::size_t j = 0; j < n_; ++j) {
            if (j == i) continue;
            double gap = std::abs(ei - error(j));
            if (gap > best_gap) {
                best_gap = gap;
                best_j = j;
            }
        }
        if (best_j < n_ && take_step(i, best_j)) return true;

        for (std::size_t off = 1; off < n_; ++off) {
            std::size_t j = (i + off) % n_;
            if (j == best_j || !in_bound(j)) continue;
            if (take_step(i, j)) return true;
        }
        for (std::size_t off = 1; off < n_; ++off) {
            std::size_t j = (i + off) % n_;
            if (j == best_j || in_bound(j)) continue;
            if (take_step(i, j)) return true;
        }
        return false;
    }

    bool take_step(std::size_t i, std::size_t j) {
        if (i == j) return false;
        const double C = cfg_.c, eps = cfg_.epsilon;

        const double bi = beta_[i], bj = beta_[j];
        const double s = bi + bj;
        const double lo = std::max(-C, s - C);  // feasible range for new beta_i
        const double hi = std::min(C, s + C);
        if (!(hi - lo > 1e-14 * C)) return false;

        auto ki = cache_.row(i);
        auto kj = cache_.row(j);  // ki stays valid: cache keeps >= 2 rows
        const double eta = cache_.diag(i) + cache_.diag(j) - 2.0 * ki[j];
        const double g0 = (u_[i] - data_.targets[i]) - (u_[j] - data_.targets[j]);

        // The 1-D restriction is piecewise quadratic in delta = new_bi - bi
        // with kinks where either coefficient crosses zero. Evaluate every
        // stationary-point and breakpoint candidate and keep the best.
        const double dlo = lo - bi, dhi = hi - bi;
        std::array<double, 8> cand;
        std::size_t nc = 0;
        cand[nc++] = dlo;
        cand[nc++] = dhi;
        cand[nc++] = std::clamp(-bi, dlo, dhi);
        cand[nc++] = std::clamp(bj, dlo, dhi);
        if (eta > 1e-12) {
            for (double si : {-1.0, 1.0})
                for (double sj : {-1.0, 1.0})
                    cand[nc++] = std::clamp(-(g0 + eps * (si - sj)) / eta, dlo, dhi);
        }
        auto objective_change = [&](double d) {
            return 0.5 * eta * d * d + g0 * d +
                   eps * (std::abs(bi + d) - std::abs(bi)) +
                   eps * (std::abs(bj - d) - std::abs(bj));
        };
        double best_d = 0.0, best_v = 0.0;
        for (std::size_t k = 0; k < nc; ++k) {
            double v = objective_change(cand[k]);
            if (v < best_v) {
                best_v = v;
                best_d = cand[k];
            }
        }
        if (best_v >= -1e-15) return false;

        double new_bi = std::clamp(bi + best_d, lo, hi);
        if (new_bi <= -C) new_bi = -C;
        if (new_bi >= C) new_bi = C;
        double new_bj = std::clamp(s - new_bi, -C, C);

        const double di = new_bi - bi, dj = new_bj - bj;
        if (std::abs(di) < 1e-14 * (std::abs(bi) + 1.0) &&
            std::abs(dj) < 1e-14 * (std::abs(bj) + 1.0))
            return false;

        beta_[i] = new_bi;
        beta_[j] = new_bj;
        for (std::size_t k = 0; k < n_; ++k) u_[k] += di * ki[k] + dj * kj[k];
        refresh_bias();
        return true;
    }

    // Mean of the bias implied by in-bound vectors; with none, the current b
    // clamped into the interval the bound/zero coefficients allow.
    void refresh_bias() {
        const double C = cfg_.c, eps = cfg_.epsilon;
        const double tiny = 1e-10 * C;
        double sum = 0.0;
        std::size_t cnt = 0;
        for (std::size_t k = 0; k < n_; ++k) {
            const double base = data_.targets[k] - u_[k];
            if (beta_[k] > tiny && beta_[k] < C - tiny) {
                sum += base - eps;
                ++cnt;
            } else if (beta_[k] < -tiny && beta_[k] > -C + tiny) {
                sum += base + eps;
                ++cnt;
            }
        }
        if (cnt > 0) {
            b_ = sum / static_cast<double>(cnt);
            return;
        }
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n_; ++k) {
            const double base = data_.targets[k] - u_[k];
            if (std::abs(beta_[k]) <= tiny) {
                lo = std::max(lo, base - eps);
                hi = std::min(hi, base + eps);
            } else if (beta_[k] >= C - tiny) {
                hi = std::min(hi, base - eps);
            } else {
                lo = std::max(lo, base + eps);
            }
        }
        if (lo > hi)
            b_ = 0.5 * (lo + hi);
        else
            b_ = std::clamp(b_, lo, hi);
    }

    const EmbeddedDataset& data_;
    SvrConfig cfg_;
    std::size_t n_;
    KernelCache cache_;
    std::vector<double> beta_;
    std::vector<double> u_;  // sum_k beta_k K_ik, bias excluded
    double b_ = 0.0;
};

}  // namespace

SvrModel train_svr(const EmbeddedDataset& dataset, const SvrConfig& config,
                   const ScalerParams& scaler, const std::string& train_label) {
    config.validate();
    if (dataset.rows() == 0) throw DataError("train_svr: empty dataset");
    for (double v : dataset.features)
        if (!std::isfinite(v)) throw DataError("train_svr: non-finite feature value");
    for (double v : dataset.targets)
        if (!std::isfinite(v)) throw DataError("train_svr: non-finite target value");

    SvrConfig effective = config;
    if (effective.gamma == 0.0) effective.gamma = 1.0 / static_cast<double>(dataset.lag);
    std::size_t max_passes = effective.max_passes;
    if (max_passes == 0) max_passes = 10 * dataset.rows();

    SmoSolver solver(dataset, effective);
    bool converged = solver.solve(max_passes);
    return solver.build_model(converged, scaler, train_label);
}

namespace {

nlohmann::json scaler_to_json(const ScalerParams& s) {
    return {{"kind", to_string(s.kind)},
            {"offset", s.offset},
            {"scale", s.scale},
            {"fallback", s.fallback}};
}

ScalerParams scaler_from_json(const nlohmann::json& j) {
    ScalerParams s;
    s.kind = scaler_kind_from_string(j.at("kind").get<std::string>());
    s.offset = j.at("offset").get<double>();
    s.scale = j.at("scale").get<double>();
    s.fallback = j.at("fallback").get<bool>();
    return s;
}

}  // namespace

void save_svr(const std::string& path, const SvrModel& model) {
    nlohmann::json j;
    j["format"] = "windcast-model";
    j["toolkit_version"] = kToolkitVersion;
    j["model"] = "svr";
    j["version"] = 1;
    j["lag"] = model.lag_;
    j["config"] = {{"c", model.config.c},
                   {"epsilon", model.config.epsilon},
                   {"gamma", model.config.gamma},
                   {"tolerance", model.config.tolerance},
                   {"max_passes", model.config.max_passes}};
    j["scaler"] = scaler_to_json(model.scaler);
    j["bias"] = model.bias;
    j["dual_coeffs"] = model.dual_coeffs;
    nlohmann::json svs = nlohmann::json::array();
    for (std::size_t i = 0; i < model.sv_count(); ++i) {
        auto row = model.support_vector(i);
        svs.push_back(std::vector<double>(row.begin(), row.end()));
    }
    j["support_vectors"] = std::move(svs);
    j["converged"] = model.converged;
    j["dual_objective"] = model.dual_objective;
    j["train_rows"] = model.train_rows;
    j["train_label"] = model.label_;

    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << j.dump(1) << '\n';
    if (!out) throw DataError("write failed for '" + path + "'");
}

SvrModel load_svr(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("bad model file '" + path + "': " + e.what());
    }
    if (j.value("format", "") != "windcast-model" || j.value("model", "") != "svr")
        throw DataError("'" + path + "' is not a windcast svr model");
    if (j.value("version", 0) != 1)
        throw DataError("unsupported svr model version in '" + path + "'");

    SvrModel m;
    m.lag_ = j.at("lag").get<std::size_t>();
    const auto& jc = j.at("config");
    m.config.c = jc.at("c").get<double>();
    m.config.epsilon = jc.at("epsilon").get<double>();
    m.config.gamma = jc.at("gamma").get<double>();
    m.config.tolerance = jc.at("tolerance").get<double>();
    m.config.max_passes = jc.at("max_passes").get<std::size_t>();
    m.scaler = scaler_from_json(j.at("scaler"));
    m.bias = j.at("bias").get<double>();
    m.dual_coeffs = j.at("dual_coeffs").get<std::vector<double>>();
    for (const auto& row : j.at("support_vectors")) {
        auto vals = row.get<std::vector<double>>();
        if (vals.size() != m.lag_) throw DataError("support vector width mismatch in '" + path + "'");
        m.support_vectors.insert(m.support_vectors.end(), vals.begin(), vals.end());
    }
    if (m.support_vectors.size() != m.dual_coeffs.size() * m.lag_)
        throw DataError("support vector count mismatch in '" + path + "'");
    m.converged = j.at("converged").get<bool>();
    m.dual_objective = j.at("dual_objective").get<double>();
    m.train_rows = j.at("train_rows").get<std::size_t>();
    m.label_ = j.at("train_label").get<std::string>();
    return m;
}

GridSearchResult grid_search_svr(const EmbeddedDataset& raw_dataset, ScalerKind scaler_kind,
                                 std::span<const double> c_grid,
                                 std::span<const double> gamma_grid,
                                 std::span<const double> epsilon_grid,
                                 const SvrConfig& base) {
    if (c_grid.empty() || gamma_grid.empty() || epsilon_grid.empty())
        throw ArgumentError("grid_search_svr: empty grid");
    const std::size_t rows = raw_dataset.rows();
    const std::size_t train_rows = rows - rows / 5;
    if (train_rows == 0 || train_rows == rows)
        throw DataError("grid_search_svr: too few rows for a 80/20 validation split");

    EmbeddedDataset train;
    train.lag = raw_dataset.lag;
    train.features.assign(raw_dataset.features.begin(),
                          raw_dataset.features.begin() + train_rows * raw_dataset.lag);
    train.targets.assign(raw_dataset.targets.begin(), raw_dataset.targets.begin() + train_rows);

    GridSearchResult result;
    result.best_rmse = std::numeric_limits<double>::infinity();
    ScalerParams scaler = fit_scaler(train, scaler_kind);
    EmbeddedDataset scaled_train = train;
    apply_scaler_inplace(scaled_train, scaler);

    for (double c : c_grid) {
        for (double gamma : gamma_grid) {
            for (double eps : epsilon_grid) {
                SvrConfig cfg = base;
                cfg.c = c;
                cfg.gamma = gamma;
                cfg.epsilon = eps;
                SvrModel model = train_svr(scaled_train, cfg, scaler);

                std::vector<double> pred, actual;
                pred.reserve(rows - train_rows);
                for (std::size_t r = train_rows; r < rows; ++r) {
                    pred.push_back(model.predict(raw_dataset.row(r)));
                    actual.push_back(raw_dataset.targets[r]);
                }
                double score = rmse(pred, actual);
                result.tried.push_back({model.config, score});
                if (score < result.best_rmse) {
                    result.best_rmse = score;
                    result.best = model.config;
                }
            }
        }
    }
    return result;
}

}  // namespace windcast
