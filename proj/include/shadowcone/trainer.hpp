#pragma once

#include <chrono>
#include <cstring>
#include <fstream>
#include <map>
#include <optional>
#include <string>

#include "shadowcone/eval.hpp"
#include "shadowcone/graph.hpp"
#include "shadowcone/optim.hpp"
#include "shadowcone/tsv_io.hpp"

namespace shadowcone {

struct TrainConfig {
    ConeFamily family = ConeFamily::UmbralInfinity;
    int dim = 5;
    double k = 1.0;
    double r = 0.05;            // umbral object / penumbral source radius during training
    double eval_radius = 0.1;   // umbral families are evaluated under this slightly larger radius
    double source_height = 20;  // horosphere source height sqrt(k)*e^{sqrt(k)h}
    double gamma3 = 1e-4;

    LossKind loss = LossKind::Shadow;
    EnergyKind energy = EnergyKind::Distance;
    double gamma = 1.0;
    double gamma1 = 0.1;
    double gamma2 = 0.0;

    double lr = 0.001;
    int epochs = 400;
    int burnin_epochs = 20;
    double burnin_multiplier = 0.01;
    int batch_size = 16;
    int negative_ratio = 10;
    double init_eps = 1e-3;
    std::uint64_t seed = 0;
    std::optional<OptimizerKind> optimizer;  // default per family
    int val_every = 10;

    OptimizerKind optimizer_kind() const { return optimizer.value_or(default_optimizer(family)); }

    ConeSpec cone_spec() const {
        if (family == ConeFamily::PenumbralHorosphere)
            return ConeSpec::from_source_height(family, k, source_height, gamma3);
        ConeSpec s;
        s.family = family;
        s.k = k;
        s.r = r;
        s.gamma3 = gamma3;
        return s;
    }

    // Umbral evaluation uses the larger radius; penumbral specs are unchanged.
    ConeSpec eval_spec() const {
        ConeSpec s = cone_spec();
        if (family == ConeFamily::UmbralInfinity || family == ConeFamily::UmbralOrigin)
            s.r = eval_radius;
        return s;
    }

    LossConfig loss_config() const { return LossConfig{loss, gamma, gamma1, gamma2, energy}; }

    void validate() const {
        if (dim < 2 || dim > kMaxDim) throw std::invalid_argument("dim out of range");
        if (k <= 0) throw std::invalid_argument("k must be positive");
        if (r <= 0) throw std::invalid_argument("r must be positive");
        if (epochs < 0 || burnin_epochs < 0 || epochs < burnin_epochs)
            throw std::invalid_argument("epochs must cover burnin_epochs");
        if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
        if (negative_ratio < 2 || negative_ratio % 2 != 0)
            throw std::invalid_argument("negative_ratio must be even and >= 2");
        if (loss == LossKind::Shadow && gamma1 <= 0)
            throw std::invalid_argument("shadow loss needs gamma1 > 0");
        if (gamma2 < 0) throw std::invalid_argument("gamma2 must be >= 0");
        if ((family == ConeFamily::UmbralInfinity || family == ConeFamily::UmbralOrigin) &&
            eval_radius < r)
            throw std::invalid_argument("eval_radius must be >= training radius");
        if (family == ConeFamily::PenumbralHorosphere && source_height <= 0)
            throw std::invalid_argument("source_height must be positive");
    }
};

struct TrainData {
    NodeId n_nodes = 0;
    std::vector<Edge> train;
    std::unordered_set<std::uint64_t> train_keys;  // exclusion set for train negatives
    std::vector<Edge> valid_pos;
    std::vector<std::vector<Edge>> valid_neg;

    static TrainData from_split(NodeId n_nodes, const Split& s) {
        TrainData d;
        d.n_nodes = n_nodes;
        d.train = s.train;
        for (auto e : s.train) d.train_keys.insert(edge_key(e));
        d.valid_pos = s.valid;
        d.valid_neg = s.valid_neg;
        return d;
    }
};

struct EpochStats {
    int epoch = 0;
    double loss = 0.0;
    double val_f1 = -1.0;  // -1 when not computed this epoch
    double seconds = 0.0;
};

struct TrainResult {
    EmbeddingTable table;
    std::vector<EpochStats> history;
    bool diverged = false;
    std::uint64_t negative_skips = 0;
    std::uint64_t nonfinite_skips = 0;
};

inline double validation_f1(const TrainData& data, const TrainConfig& cfg,
                            const EmbeddingTable& tbl) {
    if (data.valid_pos.empty() || data.valid_neg.empty()) return -1.0;
    ConeSpec es = cfg.eval_spec();
    auto pe = pair_energies(es, tbl, data.valid_pos, cfg.energy);
    auto ne = group_energies(es, tbl, data.valid_neg, cfg.energy);
    if (ne.empty()) return -1.0;
    double tau = select_threshold(pe, ne);
    return evaluate(pe, ne, tau).f1;
}

// Shuffled positive batches with fresh negatives each epoch; burn-in epochs
// run at lr * burnin_multiplier. Aborts to the last finite epoch on
// divergence.
inline TrainResult train(const TrainData& data, const TrainConfig& cfg) {
    cfg.validate();
    ConeSpec spec = cfg.cone_spec();
    LossConfig lcfg = cfg.loss_config();

    TrainResult res;
    res.table = init_embeddings(data.n_nodes, cfg.dim, spec, cfg.init_eps, mix_seed(cfg.seed, 0));

    OptimizerState opt;
    opt.kind = cfg.optimizer_kind();
    opt.lr = cfg.lr;

    std::mt19937_64 shuffle_rng(mix_seed(cfg.seed, 2));
    auto t0 = std::chrono::steady_clock::now();

    std::vector<size_t> order(data.train.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;

    EmbeddingTable last_good = res.table;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        double lr_scale = epoch < cfg.burnin_epochs ? cfg.burnin_multiplier : 1.0;
        auto negs = sample_negatives(data.train, data.train_keys, data.n_nodes,
                                     cfg.negative_ratio, mix_seed(cfg.seed, 1000 + epoch));
        res.negative_skips += negs.skipped;
        std::shuffle(order.begin(), order.end(), shuffle_rng);

        double epoch_loss = 0.0;
        for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
            PairBatch batch;
            size_t stop = std::min(order.size(), start + cfg.batch_size);
            for (size_t i = start; i < stop; ++i) {
                batch.positives.push_back(data.train[order[i]]);
                batch.negatives.push_back(negs.groups[order[i]]);
            }
            GradResult g = grad(batch, lcfg, spec, res.table);
            epoch_loss += g.loss;
            step(opt, res.table, spec, g.grads, lr_scale);
        }
        res.nonfinite_skips = opt.skipped_nonfinite;

        EpochStats st;
        st.epoch = epoch + 1;
        st.loss = epoch_loss;
        if (!std::isfinite(epoch_loss)) {
            res.table = last_good;
            res.diverged = true;
            res.history.push_back(st);
            break;
        }
        last_good = res.table;
        if ((epoch + 1) % cfg.val_every == 0 || epoch + 1 == cfg.epochs)
            st.val_f1 = validation_f1(data, cfg, res.table);
        st.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        res.history.push_back(st);
    }
    return res;
}

inline std::string history_csv(const std::vector<EpochStats>& hist) {
    std::ostringstream out;
    out << "epoch,loss,val_f1,wallclock\n";
    out.precision(17);
    for (auto& h : hist) {
        out << h.epoch << ',' << h.loss << ',';
        if (h.val_f1 >= 0.0) out << h.val_f1;
        out << ',' << h.seconds << '\n';
    }
    return out.str();
}

// ---- checkpoint format ----
// magic "SHDWCN01", u32 meta bytes, meta (key=value lines), u64 n, u32 dim,
// labels (u32 length + bytes each), then n*dim little-endian doubles.

namespace detail {

template <class T>
void put_raw(std::string& out, T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.append(buf, sizeof(T));
}

template <class T>
T get_raw(const std::string& in, size_t& off) {
    if (off + sizeof(T) > in.size()) throw std::runtime_error("checkpoint truncated");
    T v;
    std::memcpy(&v, in.data() + off, sizeof(T));
    off += sizeof(T);
    return v;
}

}  // namespace detail

struct Checkpoint {
    EmbeddingTable table;
    std::vector<std::string> labels;
    std::map<std::string, std::string> meta;
};

inline void save_checkpoint(const std::string& path, const EmbeddingTable& tbl,
                            const std::vector<std::string>& labels,
                            const std::map<std::string, std::string>& meta) {
    if ((size_t)tbl.n() != labels.size())
        throw std::invalid_argument("labels do not match table rows");
    std::string out;
    out.append("SHDWCN01");
    std::string m;
    for (auto& [k, v] : meta) m += k + "=" + v + "\n";
    detail::put_raw<std::uint32_t>(out, (std::uint32_t)m.size());
    out += m;
    detail::put_raw<std::uint64_t>(out, (std::uint64_t)tbl.n());
    detail::put_raw<std::uint32_t>(out, (std::uint32_t)tbl.dim);
    for (auto& l : labels) {
        detail::put_raw<std::uint32_t>(out, (std::uint32_t)l.size());
        out += l;
    }
    for (double d : tbl.data) detail::put_raw<double>(out, d);
    write_file_atomic(path, out);
}

inline Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint " + path);
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() < 8 || buf.compare(0, 8, "SHDWCN01") != 0)
        throw std::runtime_error("bad checkpoint magic");
    size_t off = 8;
    Checkpoint ck;
    auto mlen = detail::get_raw<std::uint32_t>(buf, off);
    if (off + mlen > buf.size()) throw std::runtime_error("checkpoint truncated");
    std::istringstream ms(buf.substr(off, mlen));
    off += mlen;
    std::string line;
    while (std::getline(ms, line)) {
        auto eq = line.find('=');
        if (eq != std::string::npos) ck.meta[line.substr(0, eq)] = line.substr(eq + 1);
    }
    auto n = detail::get_raw<std::uint64_t>(buf, off);
    auto dim = detail::get_raw<std::uint32_t>(buf, off);
    auto it = ck.meta.find("dim");
    if (it != ck.meta.end() && (std::uint32_t)std::stoul(it->second) != dim)
        throw std::runtime_error("checkpoint dim mismatch");
    for (std::uint64_t i = 0; i < n; ++i) {
        auto len = detail::get_raw<std::uint32_t>(buf, off);
        if (off + len > buf.size()) throw std::runtime_error("checkpoint truncated");
        ck.labels.emplace_back(buf, off, len);
        off += len;
    }
    ck.table.model = ck.meta.count("model") && ck.meta.at("model") == std::string(model_name(Model::Ball))
                         ? Model::Ball
                         : Model::HalfSpace;
    ck.table.k = ck.meta.count("k") ? std::stod(ck.meta.at("k")) : 1.0;
    ck.table.dim = (int)dim;
    ck.table.data.resize(n * dim);
    for (auto& d : ck.table.data) d = detail::get_raw<double>(buf, off);
    if (off != buf.size()) throw std::runtime_error("checkpoint has trailing bytes");
    return ck;
}

}  // namespace shadowcone
