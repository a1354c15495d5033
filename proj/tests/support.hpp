#pragma once

// shared helpers for trainer-level and acceptance tests

#include <string>
#include <vector>

#include "shadowcone/eval.hpp"
#include "shadowcone/graph.hpp"
#include "shadowcone/trainer.hpp"
#include "shadowcone/tsv_io.hpp"

namespace testsupport {

using namespace shadowcone;

// balanced binary tree with `depth` levels below the root
inline Dag make_balanced_tree(int depth) {
    Dag d;
    NodeId total = (NodeId)((1u << (depth + 1)) - 1);
    for (NodeId i = 0; i < total; ++i) d.intern("t" + std::to_string(i));
    for (NodeId i = 0; 2 * i + 2 < total; ++i) {
        d.edges.push_back({i, 2 * i + 1});
        d.edges.push_back({i, 2 * i + 2});
    }
    return d;
}

struct Prepared {
    Dag dag;
    std::vector<Edge> closure, basic;
    Split split;  // with negatives filled
    TrainData train_data;
    std::vector<Edge> test_pos;
    std::vector<std::vector<Edge>> test_neg;
};

// full preprocessing + split + fixed negative sets, the shared wiring of the
// training pipeline
inline Prepared prepare(Dag dag, double p, std::uint64_t seed, int ratio) {
    Prepared out;
    out.dag = std::move(dag);
    out.closure = transitive_closure(out.dag);
    out.basic = transitive_reduction(out.dag);
    out.split = make_split(out.closure, out.basic, p, seed);

    std::unordered_set<std::uint64_t> closure_keys;
    for (auto e : out.closure) closure_keys.insert(edge_key(e));
    out.split.valid_neg =
        sample_negatives(out.split.valid, closure_keys, out.dag.n(), ratio, mix_seed(seed, 101))
            .groups;
    out.split.test_neg =
        sample_negatives(out.split.test, closure_keys, out.dag.n(), ratio, mix_seed(seed, 102))
            .groups;

    out.train_data = TrainData::from_split(out.dag.n(), out.split);
    out.test_pos = out.split.test;
    out.test_neg = out.split.test_neg;
    return out;
}

// threshold on validation, F1 on test
inline double test_f1(const Prepared& prep, const TrainConfig& cfg, const EmbeddingTable& tbl) {
    ConeSpec es = cfg.eval_spec();
    auto vp = pair_energies(es, tbl, prep.split.valid, cfg.energy);
    auto vn = group_energies(es, tbl, prep.split.valid_neg, cfg.energy);
    double tau = select_threshold(vp, vn);
    auto tp = pair_energies(es, tbl, prep.test_pos, cfg.energy);
    auto tn = group_energies(es, tbl, prep.test_neg, cfg.energy);
    return evaluate(tp, tn, tau).f1;
}

inline Dag load_mammal() {
    auto raw = read_edges_tsv(std::string(SHADOWCONE_DATA_DIR) + "/mammal_closure.tsv");
    return prune_cycles(raw.dag, 0);
}

}  // namespace testsupport
