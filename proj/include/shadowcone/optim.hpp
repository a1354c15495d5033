#pragma once

#include <cstdint>
#include <random>
#include <unordered_map>

#include "shadowcone/cones.hpp"
#include "shadowcone/objective.hpp"

namespace shadowcone {

enum class OptimizerKind { RSGD, RAdam };

// Appendix-style defaults: plain Riemannian SGD for the half-space families,
// Riemannian Adam for the ball families.
inline OptimizerKind default_optimizer(ConeFamily f) {
    return family_model(f) == Model::HalfSpace ? OptimizerKind::RSGD : OptimizerKind::RAdam;
}

struct OptimizerState {
    OptimizerKind kind = OptimizerKind::RSGD;
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    // RAdam moment accumulators, kept in coordinate space (no transport).
    std::unordered_map<NodeId, std::vector<double>> m, v;
    std::unordered_map<NodeId, std::uint64_t> steps;
    std::uint64_t skipped_nonfinite = 0;
};

// Clamp a row into the model domain plus the family's source constraints
// (hole around an in-space source; height below a horosphere source).
inline void project_feasible_row(double* x, int n, const ConeSpec& spec) {
    double k = spec.k;
    if (family_model(spec.family) == Model::Ball) {
        double nrm = std::sqrt(vec::sq_norm(x, n));
        double lim = kBallMaxNorm / std::sqrt(k);
        if (nrm > lim) {
            double f = lim / nrm;
            for (int i = 0; i < n; ++i) x[i] *= f;
            nrm = lim;
        }
        // hole of hyperbolic radius r around the origin source
        double hole = std::tanh(std::sqrt(k) * (spec.r + 1e-9) / 2.0) / std::sqrt(k);
        if (nrm < hole) {
            if (nrm < 1e-300) {
                x[0] = hole;  // degenerate direction, pick an axis
            } else {
                double f = hole / nrm;
                for (int i = 0; i < n; ++i) x[i] *= f;
            }
        }
    } else {
        double lo = kHalfSpaceMinHeight / std::sqrt(k);
        if (x[n - 1] < lo) x[n - 1] = lo;
        if (spec.family == ConeFamily::PenumbralHorosphere) {
            double hi = spec.source_height() * (1.0 - 1e-9);
            if (x[n - 1] > hi) x[n - 1] = hi;
        }
    }
}

inline void project_feasible(EmbeddingTable& tbl, const ConeSpec& spec) {
    for (int i = 0; i < tbl.n(); ++i) project_feasible_row(tbl.row(i), tbl.dim, spec);
}

// Uniform [-eps, eps] spread per dimension around the model origin, then the
// feasibility projection (which lifts ball points out of the source hole).
inline EmbeddingTable init_embeddings(int n_nodes, int dim, const ConeSpec& spec, double eps,
                                      std::uint64_t seed) {
    if (dim < 2) throw std::invalid_argument("dim must be >= 2");
    if (dim > kMaxDim) throw std::invalid_argument("dim above kMaxDim");
    EmbeddingTable tbl;
    tbl.model = family_model(spec.family);
    tbl.k = spec.k;
    tbl.dim = dim;
    tbl.data.assign(static_cast<size_t>(n_nodes) * dim, 0.0);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-eps, eps);
    double base_n = tbl.model == Model::HalfSpace ? 1.0 / std::sqrt(spec.k) : 0.0;
    for (int i = 0; i < n_nodes; ++i) {
        double* row = tbl.row(i);
        for (int d = 0; d < dim; ++d) row[d] = u(rng);
        row[dim - 1] += base_n;
        project_feasible_row(row, dim, spec);
    }
    return tbl;
}

namespace detail {

inline void step_row(OptimizerState& st, EmbeddingTable& tbl, const ConeSpec& spec, NodeId id,
                     const std::vector<double>& g, double lr_scale) {
    int n = tbl.dim;
    double* x = tbl.row(id);
    for (double gi : g)
        if (!std::isfinite(gi)) {
            ++st.skipped_nonfinite;
            return;
        }
    // Riemannian gradient: inverse metric times Euclidean gradient.
    double scale;
    if (tbl.model == Model::HalfSpace) {
        scale = tbl.k * x[n - 1] * x[n - 1];
    } else {
        double f = (1.0 - tbl.k * vec::sq_norm(x, n)) / 2.0;
        scale = f * f;
    }
    std::array<double, kMaxDim> dir;
    if (st.kind == OptimizerKind::RSGD) {
        for (int i = 0; i < n; ++i) dir[i] = -st.lr * lr_scale * scale * g[i];
    } else {
        auto& m = st.m.try_emplace(id, std::vector<double>(n, 0.0)).first->second;
        auto& v = st.v.try_emplace(id, std::vector<double>(n, 0.0)).first->second;
        std::uint64_t t = ++st.steps[id];
        double bc1 = 1.0 - std::pow(st.beta1, (double)t);
        double bc2 = 1.0 - std::pow(st.beta2, (double)t);
        for (int i = 0; i < n; ++i) {
            double gr = scale * g[i];
            m[i] = st.beta1 * m[i] + (1.0 - st.beta1) * gr;
            v[i] = st.beta2 * v[i] + (1.0 - st.beta2) * gr * gr;
            dir[i] = -st.lr * lr_scale * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + st.eps);
        }
    }
    // retraction: exact exp map, additive fallback if it overflows
    std::array<double, kMaxDim> y;
    if (tbl.model == Model::HalfSpace)
        halfspace_exp(x, dir.data(), n, y.data());
    else
        ball_exp(x, dir.data(), n, tbl.k, y.data());
    bool ok = true;
    for (int i = 0; i < n; ++i)
        if (!std::isfinite(y[i])) ok = false;
    if (ok)
        for (int i = 0; i < n; ++i) x[i] = y[i];
    else
        for (int i = 0; i < n; ++i) x[i] += dir[i];
    project_feasible_row(x, n, spec);
}

}  // namespace detail

// One optimizer step over a sparse gradient map. lr_scale carries the burn-in
// multiplier.
inline void step(OptimizerState& st, EmbeddingTable& tbl, const ConeSpec& spec, const GradMap& grads,
                 double lr_scale = 1.0) {
    for (auto& [id, g] : grads) detail::step_row(st, tbl, spec, id, g, lr_scale);
}

}  // namespace shadowcone
