#pragma once

#include <algorithm>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "shadowcone/types.hpp"

namespace shadowcone {

// Node table plus directed edge set; (u, v) means u precedes v (u is the
// ancestor). After preprocessing the edge set is acyclic and deduplicated,
// and `basic` flags the transitive reduction.
struct Dag {
    std::vector<std::string> labels;
    std::unordered_map<std::string, NodeId> index;
    std::vector<Edge> edges;
    std::vector<char> basic;  // aligned with edges once mark_basic ran

    NodeId n() const { return static_cast<NodeId>(labels.size()); }

    NodeId intern(const std::string& label) {
        auto it = index.find(label);
        if (it != index.end()) return it->second;
        NodeId id = n();
        labels.push_back(label);
        index.emplace(label, id);
        return id;
    }
};

namespace detail {

inline std::vector<std::vector<NodeId>> adjacency(NodeId n, const std::vector<Edge>& edges) {
    std::vector<std::vector<NodeId>> adj(n);
    for (auto [u, v] : edges) adj[u].push_back(v);
    return adj;
}

}  // namespace detail

// Topological order; empty optional means a cycle exists.
inline bool topological_order(NodeId n, const std::vector<Edge>& edges,
                              std::vector<NodeId>* order = nullptr) {
    std::vector<NodeId> indeg(n, 0);
    auto adj = detail::adjacency(n, edges);
    for (auto [u, v] : edges) ++indeg[v];
    std::vector<NodeId> queue;
    for (NodeId i = 0; i < n; ++i)
        if (indeg[i] == 0) queue.push_back(i);
    std::vector<NodeId> out;
    out.reserve(n);
    for (size_t qi = 0; qi < queue.size(); ++qi) {
        NodeId u = queue[qi];
        out.push_back(u);
        for (NodeId v : adj[u])
            if (--indeg[v] == 0) queue.push_back(v);
    }
    if (out.size() != n) return false;
    if (order) *order = std::move(out);
    return true;
}

inline void check_acyclic(const Dag& dag) {
    if (!topological_order(dag.n(), dag.edges))
        throw std::invalid_argument("graph has a cycle; run prune_cycles first");
}

// Remove one uniformly chosen edge from each detected cycle until the graph is
// acyclic. Detection order is fixed: DFS from the lexicographically smallest
// label, neighbors in label order, so results depend only on the seed.
inline Dag prune_cycles(Dag dag, std::uint64_t seed) {
    std::mt19937_64 rng(seed);

    // dedup, keep first occurrence
    {
        std::unordered_set<std::uint64_t> seen;
        std::vector<Edge> uniq;
        uniq.reserve(dag.edges.size());
        for (auto e : dag.edges)
            if (seen.insert(edge_key(e)).second) uniq.push_back(e);
        dag.edges = std::move(uniq);
    }

    NodeId n = dag.n();
    std::vector<NodeId> by_label(n);
    for (NodeId i = 0; i < n; ++i) by_label[i] = i;
    std::sort(by_label.begin(), by_label.end(),
              [&](NodeId a, NodeId b) { return dag.labels[a] < dag.labels[b]; });

    auto label_less = [&](NodeId a, NodeId b) { return dag.labels[a] < dag.labels[b]; };

    std::unordered_set<std::uint64_t> removed;
    // self loops are 1-cycles: drop immediately
    for (auto e : dag.edges)
        if (e.first == e.second) removed.insert(edge_key(e));

    while (true) {
        std::vector<std::vector<NodeId>> adj(n);
        for (auto e : dag.edges)
            if (!removed.count(edge_key(e))) adj[e.first].push_back(e.second);
        for (auto& a : adj) std::sort(a.begin(), a.end(), label_less);

        // iterative DFS, 0 = white, 1 = on stack, 2 = done
        std::vector<char> color(n, 0);
        std::vector<NodeId> parent(n, 0);
        std::vector<Edge> cycle;
        for (NodeId s0 : by_label) {
            if (!cycle.empty()) break;
            if (color[s0] != 0) continue;
            std::vector<std::pair<NodeId, size_t>> stack{{s0, 0}};
            color[s0] = 1;
            while (!stack.empty() && cycle.empty()) {
                auto& [u, idx] = stack.back();
                if (idx < adj[u].size()) {
                    NodeId v = adj[u][idx++];
                    if (color[v] == 0) {
                        color[v] = 1;
                        parent[v] = u;
                        stack.emplace_back(v, 0);
                    } else if (color[v] == 1) {
                        // walk the DFS stack back from u to v
                        cycle.push_back({u, v});
                        NodeId w = u;
                        while (w != v) {
                            cycle.push_back({parent[w], w});
                            w = parent[w];
                        }
                    }
                } else {
                    color[u] = 2;
                    stack.pop_back();
                }
            }
        }
        if (cycle.empty()) break;
        std::uniform_int_distribution<size_t> pick(0, cycle.size() - 1);
        removed.insert(edge_key(cycle[pick(rng)]));
    }

    std::vector<Edge> kept;
    kept.reserve(dag.edges.size());
    for (auto e : dag.edges)
        if (!removed.count(edge_key(e))) kept.push_back(e);
    dag.edges = std::move(kept);
    dag.basic.clear();
    return dag;
}

// Exact transitive closure by a per-node reachability sweep.
inline std::vector<Edge> transitive_closure(const Dag& dag) {
    check_acyclic(dag);
    NodeId n = dag.n();
    auto adj = detail::adjacency(n, dag.edges);
    std::vector<Edge> closure;
    std::vector<std::uint32_t> mark(n, 0);
    std::uint32_t epoch = 0;
    std::vector<NodeId> stack, found;
    for (NodeId u = 0; u < n; ++u) {
        ++epoch;
        stack.assign(adj[u].begin(), adj[u].end());
        found.clear();
        while (!stack.empty()) {
            NodeId w = stack.back();
            stack.pop_back();
            if (mark[w] == epoch || w == u) continue;
            mark[w] = epoch;
            found.push_back(w);
            for (NodeId z : adj[w]) stack.push_back(z);
        }
        std::sort(found.begin(), found.end());
        for (NodeId w : found) closure.push_back({u, w});
    }
    return closure;
}

// Transitive reduction of a DAG: the unique minimal edge set with the same
// closure. Edge (u,v) stays iff no other direct successor of u reaches v.
inline std::vector<Edge> transitive_reduction(const Dag& dag) {
    check_acyclic(dag);
    NodeId n = dag.n();
    auto adj = detail::adjacency(n, dag.edges);
    for (auto& a : adj) {
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    // descendant sets as sorted vectors
    std::vector<std::vector<NodeId>> desc(n);
    {
        std::vector<NodeId> order;
        topological_order(n, dag.edges, &order);
        std::vector<std::uint32_t> mark(n, 0);
        std::uint32_t epoch = 0;
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            NodeId u = *it;
            ++epoch;
            std::vector<NodeId> d;
            for (NodeId v : adj[u]) {
                if (mark[v] != epoch) {
                    mark[v] = epoch;
                    d.push_back(v);
                }
                for (NodeId w : desc[v])
                    if (mark[w] != epoch) {
                        mark[w] = epoch;
                        d.push_back(w);
                    }
            }
            std::sort(d.begin(), d.end());
            desc[u] = std::move(d);
        }
    }
    auto reaches = [&](NodeId w, NodeId v) {
        const auto& d = desc[w];
        return std::binary_search(d.begin(), d.end(), v);
    };
    std::vector<Edge> reduction;
    for (NodeId u = 0; u < n; ++u) {
        for (NodeId v : adj[u]) {
            bool redundant = false;
            for (NodeId w : adj[u]) {
                if (w != v && reaches(w, v)) {
                    redundant = true;
                    break;
                }
            }
            if (!redundant) reduction.push_back({u, v});
        }
    }
    return reduction;
}

// Flags dag.edges against the reduction.
inline void mark_basic(Dag& dag) {
    auto red = transitive_reduction(dag);
    std::unordered_set<std::uint64_t> keys;
    for (auto e : red) keys.insert(edge_key(e));
    dag.basic.assign(dag.edges.size(), 0);
    for (size_t i = 0; i < dag.edges.size(); ++i)
        if (keys.count(edge_key(dag.edges[i]))) dag.basic[i] = 1;
}

// Train/valid/test split. All basic edges are in train; a fixed 10% of the
// non-basic edges is held out (half validation, half test) before p% of the
// non-basic total is added to train, so splits nest across p for one seed.
struct Split {
    std::vector<Edge> train, valid, test;
    std::vector<std::vector<Edge>> valid_neg, test_neg;
    double p = 0.0;
    std::uint64_t seed = 0;
};

inline Split make_split(const std::vector<Edge>& closure, const std::vector<Edge>& basic, double p,
                        std::uint64_t seed) {
    if (p < 0.0 || p > 90.0) throw std::invalid_argument("p must be in [0, 90]");
    std::unordered_set<std::uint64_t> basic_keys;
    for (auto e : basic) basic_keys.insert(edge_key(e));
    std::vector<Edge> nonbasic;
    for (auto e : closure)
        if (!basic_keys.count(edge_key(e))) nonbasic.push_back(e);

    std::mt19937_64 rng(mix_seed(seed, 1));
    std::shuffle(nonbasic.begin(), nonbasic.end(), rng);

    size_t nb = nonbasic.size();
    size_t holdout = nb / 10;
    size_t n_valid = (holdout + 1) / 2;
    size_t n_test = holdout - n_valid;
    size_t extra = std::min((size_t)std::llround(p / 100.0 * (double)nb), nb - holdout);

    Split s;
    s.p = p;
    s.seed = seed;
    s.valid.assign(nonbasic.begin(), nonbasic.begin() + n_valid);
    s.test.assign(nonbasic.begin() + n_valid, nonbasic.begin() + holdout);
    s.train = basic;
    s.train.insert(s.train.end(), nonbasic.begin() + holdout, nonbasic.begin() + holdout + extra);
    (void)n_test;
    return s;
}

// Corrupt each positive into `ratio` negatives: first half tail-corrupted
// (u, v'), second half head-corrupted (u', v). Candidates never collide with
// `excluded` (the closure for test negatives, the train set for training
// negatives) and never form self-pairs.
struct NegativeSample {
    std::vector<std::vector<Edge>> groups;
    std::uint64_t skipped = 0;
};

inline NegativeSample sample_negatives(const std::vector<Edge>& pairs,
                                       const std::unordered_set<std::uint64_t>& excluded,
                                       NodeId n_nodes, int ratio, std::uint64_t seed) {
    if (ratio % 2 != 0) throw std::invalid_argument("negative ratio must be even");
    if (n_nodes == 0) throw std::invalid_argument("empty node set");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<NodeId> pick(0, n_nodes - 1);
    NegativeSample out;
    out.groups.resize(pairs.size());
    for (size_t i = 0; i < pairs.size(); ++i) {
        auto [u, v] = pairs[i];
        auto& grp = out.groups[i];
        grp.reserve(ratio);
        for (int j = 0; j < ratio; ++j) {
            bool tail = j < ratio / 2;
            bool ok = false;
            for (int att = 0; att < 100; ++att) {
                NodeId c = pick(rng);
                Edge cand = tail ? Edge{u, c} : Edge{c, v};
                if (cand.first == cand.second) continue;
                if (excluded.count(edge_key(cand))) continue;
                grp.push_back(cand);
                ok = true;
                break;
            }
            if (!ok) ++out.skipped;
        }
    }
    return out;
}

}  // namespace shadowcone
