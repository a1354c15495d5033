#pragma once

#include <cstdint>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "shadowcone/cones.hpp"
#include "shadowcone/embedding.hpp"

namespace shadowcone {

enum class LossKind { MaxMargin, Contrastive, Shadow };
enum class EnergyKind { Distance, Angle };

struct LossConfig {
    LossKind kind = LossKind::Shadow;
    double gamma = 1.0;    // max-margin margin
    double gamma1 = 0.1;   // shadow: how far to push negatives out
    double gamma2 = 0.0;   // shadow: how deep to pull positives in
    EnergyKind energy = EnergyKind::Distance;
};

// Positive pairs with a group of corrupted pairs attached to each positive.
struct PairBatch {
    std::vector<IdPair> positives;
    std::vector<std::vector<IdPair>> negatives;  // aligned with positives
};

using GradMap = std::unordered_map<NodeId, std::vector<double>>;

struct GradResult {
    double loss = 0.0;
    GradMap grads;
};

namespace detail {

template <class S>
S pair_energy(const ConeSpec& spec, EnergyKind kind, const S* u, const S* v, int n) {
    if (kind == EnergyKind::Distance) return cone_eval(spec, u, v, n).sd;
    // legacy angle energy, clipped at the boundary
    S t = cone_axis_angle(spec, u, v, n) - cone_half_aperture(spec, u, n);
    return max_s(t, S(0.0));
}

inline double pair_energy_d(const ConeSpec& spec, EnergyKind kind, const EmbeddingTable& tbl,
                            IdPair p) {
    return pair_energy(spec, kind, tbl.row(p.first), tbl.row(p.second), tbl.dim);
}

// Accumulate coef * dE/dx for both endpoints of a pair by seeding duals
// coordinate by coordinate. The branch structure is re-decided per seed from
// identical primal values, so all seeds agree on it.
inline void accumulate_pair_grad(const ConeSpec& spec, EnergyKind kind, const EmbeddingTable& tbl,
                                 IdPair p, double coef, GradMap& out) {
    if (coef == 0.0) return;
    int n = tbl.dim;
    std::array<Dual, kMaxDim> u, v;
    const double* ur = tbl.row(p.first);
    const double* vr = tbl.row(p.second);
    for (int i = 0; i < n; ++i) {
        u[i] = Dual(ur[i]);
        v[i] = Dual(vr[i]);
    }
    out.try_emplace(p.first, std::vector<double>(n, 0.0));
    out.try_emplace(p.second, std::vector<double>(n, 0.0));
    auto& gu = out.at(p.first);
    auto& gv = out.at(p.second);
    for (int i = 0; i < n; ++i) {
        u[i].dot = 1.0;
        gu[i] += coef * pair_energy(spec, kind, u.data(), v.data(), n).dot;
        u[i].dot = 0.0;
    }
    for (int i = 0; i < n; ++i) {
        v[i].dot = 1.0;
        gv[i] += coef * pair_energy(spec, kind, u.data(), v.data(), n).dot;
        v[i].dot = 0.0;
    }
}

// Per-group outer derivatives dL/dE. Returns the group's loss contribution.
inline double group_outer(const LossConfig& cfg, double e_pos, const std::vector<double>& e_neg,
                          double& dpos, std::vector<double>& dneg) {
    dneg.assign(e_neg.size(), 0.0);
    switch (cfg.kind) {
        case LossKind::MaxMargin: {
            double l = e_pos;
            dpos = 1.0;
            for (size_t j = 0; j < e_neg.size(); ++j) {
                double m = cfg.gamma - e_neg[j];
                if (m > 0.0) {
                    l += m;
                    dneg[j] = -1.0;
                }
            }
            return l;
        }
        case LossKind::Contrastive: {
            // negated log-ratio: E_pos + log sum exp(-E_neg)
            dpos = 1.0;
            if (e_neg.empty()) return e_pos;
            double zmax = -e_neg[0];
            for (double e : e_neg) zmax = std::max(zmax, -e);
            double sum = 0.0;
            for (double e : e_neg) sum += std::exp(-e - zmax);
            for (size_t j = 0; j < e_neg.size(); ++j) dneg[j] = -std::exp(-e_neg[j] - zmax) / sum;
            return e_pos + zmax + std::log(sum);
        }
        case LossKind::Shadow: {
            // negated: max(E_pos, g2) + log sum exp(max(g1 - E_neg, 0))
            double l = std::max(e_pos, cfg.gamma2);
            dpos = e_pos > cfg.gamma2 ? 1.0 : 0.0;
            if (e_neg.empty()) return l;
            double zmax = 0.0;
            std::vector<double> z(e_neg.size());
            for (size_t j = 0; j < e_neg.size(); ++j) {
                z[j] = std::max(cfg.gamma1 - e_neg[j], 0.0);
                zmax = std::max(zmax, z[j]);
            }
            double sum = 0.0;
            for (double zj : z) sum += std::exp(zj - zmax);
            for (size_t j = 0; j < e_neg.size(); ++j) {
                double w = std::exp(z[j] - zmax) / sum;
                dneg[j] = e_neg[j] < cfg.gamma1 ? -w : 0.0;
            }
            return l + zmax + std::log(sum);
        }
    }
    throw std::logic_error("unknown loss kind");
}

}  // namespace detail

// Distance-based energy E(u,v) = d(v, Cone(u)); or the legacy clipped angle
// energy when asked for.
inline double energy(const ConeSpec& spec, const Point& u, const Point& v,
                     EnergyKind kind = EnergyKind::Distance) {
    check_apex(spec, u);
    check_model(spec, v);
    return detail::pair_energy(spec, kind, u.x.data(), v.x.data(), u.dim());
}

inline void check_batch(const PairBatch& batch, const EmbeddingTable& tbl) {
    if (batch.positives.size() != batch.negatives.size())
        throw std::invalid_argument("negatives not aligned with positives");
    auto in_range = [&](IdPair p) { return p.first < (NodeId)tbl.n() && p.second < (NodeId)tbl.n(); };
    std::unordered_set<std::uint64_t> pos_keys;
    for (auto& p : batch.positives) {
        if (!in_range(p)) throw std::invalid_argument("positive pair id out of range");
        pos_keys.insert(edge_key(p));
    }
    for (auto& g : batch.negatives)
        for (auto& p : g) {
            if (!in_range(p)) throw std::invalid_argument("negative pair id out of range");
            if (pos_keys.count(edge_key(p)))
                throw std::invalid_argument("pair appears as both positive and negative");
        }
}

inline double loss(const PairBatch& batch, const LossConfig& cfg, const ConeSpec& spec,
                   const EmbeddingTable& tbl) {
    check_batch(batch, tbl);
    double total = 0.0;
    double dpos;
    std::vector<double> dneg, e_neg;
    for (size_t i = 0; i < batch.positives.size(); ++i) {
        double e_pos = detail::pair_energy_d(spec, cfg.energy, tbl, batch.positives[i]);
        e_neg.clear();
        for (auto& p : batch.negatives[i]) e_neg.push_back(detail::pair_energy_d(spec, cfg.energy, tbl, p));
        total += detail::group_outer(cfg, e_pos, e_neg, dpos, dneg);
    }
    return total;
}

// Euclidean gradient of the loss with respect to every touched node.
inline GradResult grad(const PairBatch& batch, const LossConfig& cfg, const ConeSpec& spec,
                       const EmbeddingTable& tbl) {
    check_batch(batch, tbl);
    GradResult res;
    double dpos;
    std::vector<double> dneg, e_neg;
    for (size_t i = 0; i < batch.positives.size(); ++i) {
        double e_pos = detail::pair_energy_d(spec, cfg.energy, tbl, batch.positives[i]);
        e_neg.clear();
        for (auto& p : batch.negatives[i]) e_neg.push_back(detail::pair_energy_d(spec, cfg.energy, tbl, p));
        res.loss += detail::group_outer(cfg, e_pos, e_neg, dpos, dneg);
        detail::accumulate_pair_grad(spec, cfg.energy, tbl, batch.positives[i], dpos, res.grads);
        for (size_t j = 0; j < batch.negatives[i].size(); ++j)
            detail::accumulate_pair_grad(spec, cfg.energy, tbl, batch.negatives[i][j], dneg[j],
                                         res.grads);
    }
    return res;
}

}  // namespace shadowcone
