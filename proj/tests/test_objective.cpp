#include <gtest/gtest.h>

#include <random>

#include "shadowcone/objective.hpp"

using namespace shadowcone;

namespace {

std::mt19937_64 rng(4242);

double urand(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

EmbeddingTable random_table(const ConeSpec& spec, int n_nodes, int dim) {
    EmbeddingTable t;
    t.model = family_model(spec.family);
    t.k = spec.k;
    t.dim = dim;
    t.data.resize((size_t)n_nodes * dim);
    for (int i = 0; i < n_nodes; ++i) {
        double* row = t.row(i);
        if (t.model == Model::HalfSpace) {
            for (int d = 0; d < dim; ++d) row[d] = urand(-1.5, 1.5);
            row[dim - 1] = std::exp(urand(-1.2, 1.2)) / std::sqrt(spec.k);
            if (spec.family == ConeFamily::PenumbralHorosphere)
                row[dim - 1] = std::min(row[dim - 1], spec.source_height() * 0.8);
        } else {
            while (true) {
                double s = 0;
                for (int d = 0; d < dim; ++d) {
                    row[d] = urand(-1, 1);
                    s += row[d] * row[d];
                }
                double nrm = std::sqrt(s);
                if (nrm < 0.9 && nrm > std::sqrt(spec.k) * std::tanh(spec.r) * 1.3) break;
            }
            for (int d = 0; d < dim; ++d) row[d] /= std::sqrt(spec.k);
        }
    }
    return t;
}

const ConeSpec kSpecs[] = {
    ConeSpec{ConeFamily::UmbralInfinity, 1.0, 0.1, 0.0, 1e-4},
    ConeSpec{ConeFamily::UmbralOrigin, 1.0, 0.12, 0.0, 1e-4},
    ConeSpec{ConeFamily::PenumbralBall, 1.0, 0.12, 0.0, 1e-4},
    ConeSpec::from_source_height(ConeFamily::PenumbralHorosphere, 1.0, 20.0, 1e-4),
};

// keep a configuration only when no pair sits near a distance-branch boundary
// or a loss kink, where finite differences are meaningless
bool config_is_smooth(const PairBatch& b, const LossConfig& cfg, const ConeSpec& spec,
                      const EmbeddingTable& t) {
    auto probe = [&](IdPair p) {
        auto e = detail::cone_eval(spec, t.row(p.first), t.row(p.second), t.dim);
        if (std::abs(e.H) < 1e-3) return false;
        double sd = e.sd;
        if (std::abs(sd - cfg.gamma2) < 1e-3) return false;
        if (std::abs(sd - cfg.gamma1) < 1e-3) return false;
        if (std::abs(cfg.gamma - sd) < 1e-3) return false;
        if (cfg.energy == EnergyKind::Angle) {
            double a = detail::cone_axis_angle(spec, t.row(p.first), t.row(p.second), t.dim) -
                       detail::cone_half_aperture(spec, t.row(p.first), t.dim);
            if (std::abs(a) < 1e-3) return false;
        }
        return true;
    };
    for (auto& p : b.positives)
        if (!probe(p)) return false;
    for (auto& g : b.negatives)
        for (auto& p : g)
            if (!probe(p)) return false;
    return true;
}

double fd_loss(const PairBatch& b, const LossConfig& cfg, const ConeSpec& spec, EmbeddingTable t,
               NodeId id, int coord, double h) {
    t.row(id)[coord] += h;
    double up = loss(b, cfg, spec, t);
    t.row(id)[coord] -= 2 * h;
    double dn = loss(b, cfg, spec, t);
    return (up - dn) / (2 * h);
}

}  // namespace

TEST(Energy, MatchesSignedConeDistance) {
    for (const auto& spec : kSpecs) {
        auto t = random_table(spec, 8, 3);
        for (int i = 0; i < 50; ++i) {
            NodeId a = (NodeId)(rng() % 8), b = (NodeId)(rng() % 8);
            if (a == b) continue;
            Point pa = t.point(a), pb = t.point(b);
            EXPECT_DOUBLE_EQ(energy(spec, pa, pb), signed_cone_distance(spec, pa, pb));
        }
    }
}

TEST(Loss, FrozenShadowExample) {
    // one positive at E = -0.1, one negative at E = +0.3 (on/off axis umbral
    // construction), gamma1 = 0.5, gamma2 = 0 => loss = 0.2
    ConeSpec spec{ConeFamily::UmbralInfinity, 1.0, 0.1, 0.0, 0.0};
    EmbeddingTable t;
    t.model = Model::HalfSpace;
    t.k = 1.0;
    t.dim = 2;
    double h = std::sinh(0.1) / std::sinh(0.2);
    t.data = {0.0, 1.0, 0.0, h, std::sinh(0.1) + 0.9 * std::sinh(0.2), 0.9};
    ASSERT_NEAR(energy(spec, t.point(0), t.point(1)), -0.1, 1e-12);
    ASSERT_NEAR(energy(spec, t.point(0), t.point(2)), 0.3, 1e-12);

    PairBatch b;
    b.positives = {{0, 1}};
    b.negatives = {{{0, 2}}};
    LossConfig shadow{LossKind::Shadow, 1.0, 0.5, 0.0, EnergyKind::Distance};
    EXPECT_NEAR(loss(b, shadow, spec, t), 0.2, 1e-12);

    LossConfig mm{LossKind::MaxMargin, 0.2, 0.0, 0.0, EnergyKind::Distance};
    EXPECT_NEAR(loss(b, mm, spec, t), -0.1, 1e-12);

    LossConfig contrastive{LossKind::Contrastive, 0.0, 0.0, 0.0, EnergyKind::Distance};
    EXPECT_NEAR(loss(b, contrastive, spec, t), -0.4, 1e-12);
}

TEST(Loss, EqualEnergyContrastiveCancels) {
    ConeSpec spec{ConeFamily::UmbralInfinity, 1.0, 0.1, 0.0, 0.0};
    EmbeddingTable t;
    t.model = Model::HalfSpace;
    t.k = 1.0;
    t.dim = 2;
    t.data = {0.0, 1.0, 0.3, 0.8, 0.3, 0.8};  // same point twice
    PairBatch b;
    b.positives = {{0, 1}};
    b.negatives = {{{0, 2}}};
    LossConfig contrastive{LossKind::Contrastive, 0.0, 0.0, 0.0, EnergyKind::Distance};
    EXPECT_NEAR(loss(b, contrastive, spec, t), 0.0, 1e-12);
}

TEST(Loss, EmptyBatchIsZero) {
    ConeSpec spec = kSpecs[0];
    auto t = random_table(spec, 4, 3);
    PairBatch b;
    EXPECT_EQ(loss(b, LossConfig{}, spec, t), 0.0);
    auto g = grad(b, LossConfig{}, spec, t);
    EXPECT_EQ(g.loss, 0.0);
    EXPECT_TRUE(g.grads.empty());
}

TEST(Loss, MaxMarginVanishesWhenSeparated) {
    // positives exactly on the boundary energy 0 are hard to build; instead
    // assert the negative hinge vanishes once E_n >= gamma
    ConeSpec spec{ConeFamily::UmbralInfinity, 1.0, 0.1, 0.0, 0.0};
    EmbeddingTable t;
    t.model = Model::HalfSpace;
    t.k = 1.0;
    t.dim = 2;
    double h = std::sinh(0.1) / std::sinh(0.2);
    t.data = {0.0, 1.0, 0.0, h, std::sinh(0.1) + 0.9 * std::sinh(0.2), 0.9};
    PairBatch b;
    b.positives = {{0, 1}};
    b.negatives = {{{0, 2}}};
    LossConfig mm{LossKind::MaxMargin, 0.25, 0.0, 0.0, EnergyKind::Distance};
    // E_n = 0.3 >= gamma = 0.25: only the positive term remains
    EXPECT_NEAR(loss(b, mm, spec, t), -0.1, 1e-12);
    auto g = grad(b, mm, spec, t);
    // the saturated negative accumulates nothing
    if (g.grads.count(2))
        for (double c : g.grads.at(2)) EXPECT_EQ(c, 0.0);
}

TEST(Grad, FiniteDifferenceAgreement) {
    int checked = 0;
    const LossKind kinds[] = {LossKind::MaxMargin, LossKind::Contrastive, LossKind::Shadow};
    for (const auto& spec : kSpecs) {
        for (LossKind kind : kinds) {
            int done = 0;
            while (done < 6) {
                auto t = random_table(spec, 6, 3);
                PairBatch b;
                b.positives = {{0, 1}, {2, 3}};
                b.negatives = {{{0, 4}, {5, 1}}, {{2, 5}, {4, 3}}};
                LossConfig cfg{kind, urand(0.05, 1.5), urand(0.05, 1.5), urand(0.0, 0.3),
                               EnergyKind::Distance};
                if (!config_is_smooth(b, cfg, spec, t)) continue;
                ++done;
                auto g = grad(b, cfg, spec, t);
                for (auto& [id, vec] : g.grads) {
                    for (int c = 0; c < t.dim; ++c) {
                        double fd = fd_loss(b, cfg, spec, t, id, c, 1e-6);
                        double scale = std::max({1.0, std::abs(fd), std::abs(vec[c])});
                        EXPECT_NEAR(vec[c], fd, 1e-4 * scale)
                            << family_name(spec.family) << " node " << id << " coord " << c;
                        ++checked;
                    }
                }
            }
        }
    }
    EXPECT_GT(checked, 500);
}

TEST(Grad, AngleEnergyFiniteDifference) {
    ConeSpec spec = kSpecs[0];
    int done = 0;
    while (done < 8) {
        auto t = random_table(spec, 4, 3);
        PairBatch b;
        b.positives = {{0, 1}};
        b.negatives = {{{2, 3}}};
        LossConfig cfg{LossKind::MaxMargin, urand(0.05, 0.8), 0.0, 0.0, EnergyKind::Angle};
        if (!config_is_smooth(b, cfg, spec, t)) continue;
        ++done;
        auto g = grad(b, cfg, spec, t);
        for (auto& [id, vec] : g.grads)
            for (int c = 0; c < t.dim; ++c) {
                double fd = fd_loss(b, cfg, spec, t, id, c, 1e-6);
                double scale = std::max({1.0, std::abs(fd), std::abs(vec[c])});
                EXPECT_NEAR(vec[c], fd, 1e-4 * scale);
            }
    }
}

TEST(Grad, TranslationSymmetryUmbralInfinity) {
    // shifting u and v equally in the horizontal coordinates leaves the
    // energy unchanged, so those gradient components cancel pairwise
    ConeSpec spec = kSpecs[0];
    for (int it = 0; it < 100; ++it) {
        auto t = random_table(spec, 2, 4);
        PairBatch b;
        b.positives = {{0, 1}};
        b.negatives = {{}};
        auto g = grad(b, LossConfig{LossKind::Shadow, 1.0, 0.5, 0.0, EnergyKind::Distance}, spec, t);
        if (!g.grads.count(0)) continue;
        for (int c = 0; c + 1 < t.dim; ++c)
            EXPECT_NEAR(g.grads.at(0)[c] + g.grads.at(1)[c], 0.0, 1e-10);
    }
}

TEST(Grad, ShadowSaturationGivesExactZeros) {
    // positives with E <= gamma2 and negatives with E >= gamma1 contribute no
    // gradient at all
    ConeSpec spec{ConeFamily::UmbralInfinity, 1.0, 0.1, 0.0, 0.0};
    EmbeddingTable t;
    t.model = Model::HalfSpace;
    t.k = 1.0;
    t.dim = 2;
    double h = std::sinh(0.1) / std::sinh(0.2);
    t.data = {0.0, 1.0, 0.0, h, std::sinh(0.1) + 0.9 * std::sinh(0.2), 0.9};
    PairBatch b;
    b.positives = {{0, 1}};
    b.negatives = {{{0, 2}}};
    // E_pos = -0.1 <= gamma2 = 0, E_neg = 0.3 >= gamma1 = 0.25
    LossConfig cfg{LossKind::Shadow, 1.0, 0.25, 0.0, EnergyKind::Distance};
    auto g = grad(b, cfg, spec, t);
    for (auto& [id, vec] : g.grads)
        for (double c : vec) EXPECT_EQ(c, 0.0);
}

TEST(Grad, AngleEnergyBlindToInsideNegatives) {
    // the legacy angle energy clips inside-cone negatives to zero and cannot
    // push them out; the distance energy keeps a usable gradient
    ConeSpec spec{ConeFamily::UmbralInfinity, 1.0, 0.1, 0.0, 0.0};
    EmbeddingTable t;
    t.model = Model::HalfSpace;
    t.k = 1.0;
    t.dim = 2;
    // nodes 0,1: a wrongly-classified negative, v inside u's cone;
    // nodes 2,3: an unrelated positive pair
    t.data = {0.0, 1.0, 0.0, 0.5, 4.0, 1.0, 4.3, 0.8};
    PairBatch b;
    b.positives = {{2, 3}};
    b.negatives = {{{0, 1}}};

    auto contribution = [&](EnergyKind kind) {
        LossConfig cfg{LossKind::MaxMargin, 0.5, 0.0, 0.0, kind};
        auto g = grad(b, cfg, spec, t);
        double nrm = 0;
        for (NodeId id : {NodeId(0), NodeId(1)})
            if (g.grads.count(id))
                for (double c : g.grads.at(id)) nrm += c * c;
        return nrm;
    };
    EXPECT_EQ(contribution(EnergyKind::Angle), 0.0);
    EXPECT_GT(contribution(EnergyKind::Distance), 1e-6);
}

TEST(Grad, BatchValidation) {
    ConeSpec spec = kSpecs[0];
    auto t = random_table(spec, 3, 2);
    PairBatch b;
    b.positives = {{0, 7}};
    b.negatives = {{}};
    EXPECT_THROW(loss(b, LossConfig{}, spec, t), std::invalid_argument);
    PairBatch b2;
    b2.positives = {{0, 1}};
    EXPECT_THROW(loss(b2, LossConfig{}, spec, t), std::invalid_argument);
}
