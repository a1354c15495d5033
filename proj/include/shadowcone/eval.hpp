#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "shadowcone/graph.hpp"
#include "shadowcone/objective.hpp"

namespace shadowcone {

struct EvalReport {
    double tau = 0.0;
    double precision = 0.0, recall = 0.0, f1 = 0.0;
    std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
    std::vector<std::pair<int, double>> per_depth_f1;  // (depth bucket, f1)
};

inline double f1_score(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn) {
    double p = tp + fp == 0 ? 0.0 : (double)tp / (double)(tp + fp);
    double r = tp + fn == 0 ? 0.0 : (double)tp / (double)(tp + fn);
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

// Threshold maximizing validation F1 over the observed energies; a pair is
// classified positive iff its energy <= tau. Ties resolve to the smallest tau.
inline double select_threshold(const std::vector<double>& pos_energy,
                               const std::vector<double>& neg_energy) {
    if (pos_energy.empty() || neg_energy.empty())
        throw std::invalid_argument("select_threshold needs nonempty validation sets");
    std::vector<std::pair<double, bool>> all;  // (energy, is_positive)
    all.reserve(pos_energy.size() + neg_energy.size());
    for (double e : pos_energy) all.emplace_back(e, true);
    for (double e : neg_energy) all.emplace_back(e, false);
    std::sort(all.begin(), all.end());
    std::uint64_t tp = 0, fp = 0;
    const std::uint64_t npos = pos_energy.size();
    double best_tau = all.front().first;
    double best_f1 = -1.0;
    size_t i = 0;
    while (i < all.size()) {
        double tau = all[i].first;
        while (i < all.size() && all[i].first == tau) {
            all[i].second ? ++tp : ++fp;
            ++i;
        }
        double f1 = f1_score(tp, fp, npos - tp);
        if (f1 > best_f1) {
            best_f1 = f1;
            best_tau = tau;
        }
    }
    return best_tau;
}

inline EvalReport evaluate(const std::vector<double>& pos_energy,
                           const std::vector<double>& neg_energy, double tau) {
    EvalReport r;
    r.tau = tau;
    for (double e : pos_energy) e <= tau ? ++r.tp : ++r.fn;
    for (double e : neg_energy) e <= tau ? ++r.fp : ++r.tn;
    r.precision = r.tp + r.fp == 0 ? 0.0 : (double)r.tp / (double)(r.tp + r.fp);
    r.recall = r.tp + r.fn == 0 ? 0.0 : (double)r.tp / (double)(r.tp + r.fn);
    r.f1 = f1_score(r.tp, r.fp, r.fn);
    return r;
}

inline std::vector<double> pair_energies(const ConeSpec& spec, const EmbeddingTable& tbl,
                                         const std::vector<Edge>& pairs,
                                         EnergyKind kind = EnergyKind::Distance) {
    std::vector<double> out;
    out.reserve(pairs.size());
    for (auto p : pairs)
        out.push_back(detail::pair_energy(spec, kind, tbl.row(p.first), tbl.row(p.second), tbl.dim));
    return out;
}

inline std::vector<double> group_energies(const ConeSpec& spec, const EmbeddingTable& tbl,
                                          const std::vector<std::vector<Edge>>& groups,
                                          EnergyKind kind = EnergyKind::Distance) {
    std::vector<double> out;
    for (auto& g : groups)
        for (auto p : g)
            out.push_back(detail::pair_energy(spec, kind, tbl.row(p.first), tbl.row(p.second), tbl.dim));
    return out;
}

// Longest-path depth of every node in a DAG given its (basic) edges.
inline std::vector<int> node_depths(NodeId n, const std::vector<Edge>& edges) {
    std::vector<NodeId> order;
    if (!topological_order(n, edges, &order))
        throw std::invalid_argument("node_depths requires an acyclic graph");
    std::vector<int> depth(n, 0);
    auto adj = detail::adjacency(n, edges);
    for (NodeId u : order)
        for (NodeId v : adj[u]) depth[v] = std::max(depth[v], depth[u] + 1);
    return depth;
}

// Full report with the optional per-depth breakdown (bucketed by the depth of
// the descendant node).
inline EvalReport evaluate_with_depths(const std::vector<Edge>& test_pos,
                                       const std::vector<double>& pos_energy,
                                       const std::vector<std::vector<Edge>>& test_neg,
                                       const std::vector<double>& neg_energy, double tau,
                                       const std::vector<int>* depths = nullptr) {
    EvalReport r = evaluate(pos_energy, neg_energy, tau);
    if (!depths) return r;
    int dmax = 0;
    for (int d : *depths) dmax = std::max(dmax, d);
    std::vector<std::uint64_t> tp(dmax + 1, 0), fn(dmax + 1, 0), fp(dmax + 1, 0);
    for (size_t i = 0; i < test_pos.size(); ++i) {
        int d = (*depths)[test_pos[i].second];
        pos_energy[i] <= tau ? ++tp[d] : ++fn[d];
    }
    size_t flat = 0;
    for (auto& g : test_neg)
        for (auto p : g) {
            int d = (*depths)[p.second];
            if (neg_energy[flat++] <= tau) ++fp[d];
        }
    for (int d = 0; d <= dmax; ++d)
        if (tp[d] + fn[d] > 0) r.per_depth_f1.emplace_back(d, f1_score(tp[d], fp[d], fn[d]));
    return r;
}

}  // namespace shadowcone
