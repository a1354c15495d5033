#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "shadowcone/numeric.hpp"

namespace shadowcone {

enum class Model { Ball, HalfSpace };

inline const char* model_name(Model m) { return m == Model::Ball ? "ball" : "half_space"; }

// Domain clamps keeping metric factors finite under rounding.
inline constexpr double kBallMaxNorm = 1.0 - 1e-5;  // times 1/sqrt(k)
inline constexpr double kHalfSpaceMinHeight = 1e-8;

// A point of hyperbolic space with curvature -k, in one of the two conformal
// models. Ball: k*|x|^2 < 1. HalfSpace: x[n-1] > 0.
struct Point {
    Model model = Model::Ball;
    double k = 1.0;
    std::vector<double> x;

    int dim() const { return static_cast<int>(x.size()); }
};

struct TangentVector {
    Point base;
    std::vector<double> v;
};

inline bool point_in_domain(const Point& p) {
    if (p.k <= 0.0 || p.x.empty()) return false;
    if (p.model == Model::Ball)
        return p.k * vec::sq_norm(p.x.data(), p.dim()) < 1.0;
    return p.x.back() > 0.0;
}

inline void check_point(const Point& p) {
    if (!point_in_domain(p)) throw std::invalid_argument("point outside model domain");
}

inline void check_compat(const Point& a, const Point& b) {
    if (a.model != b.model) throw std::invalid_argument("model mismatch");
    if (a.k != b.k) throw std::invalid_argument("curvature mismatch");
    if (a.dim() != b.dim()) throw std::invalid_argument("dimension mismatch");
}

namespace detail {

// ---- Poincare half-space kernels ----

template <class S>
S halfspace_dist(const S* x, const S* y, int n, double k) {
    S d = vec::sq_dist(x, y, n) / (S(2.0) * x[n - 1] * y[n - 1]);
    return acosh1p(d) / std::sqrt(k);
}

template <class S>
void halfspace_log(const S* x, const S* y, int n, double k, S* out) {
    using std::cosh;
    using std::sinh;
    S s = halfspace_dist(x, y, n, k) * std::sqrt(k);
    if (value_of(s) == 0.0) {
        for (int i = 0; i < n; ++i) out[i] = S(0.0);
        return;
    }
    S f = s / sinh(s);
    S ratio = x[n - 1] / y[n - 1];
    for (int i = 0; i < n - 1; ++i) out[i] = ratio * f * (y[i] - x[i]);
    out[n - 1] = f * (cosh(s) - ratio) * x[n - 1];
}

template <class S>
void halfspace_exp(const S* x, const S* v, int n, S* out) {
    using std::cosh;
    using std::sinh;
    using std::sqrt;
    S nv = vec::norm(v, n);
    if (value_of(nv) == 0.0) {
        for (int i = 0; i < n; ++i) out[i] = x[i];
        return;
    }
    S s = nv / x[n - 1];
    S shs = sinh(s) / s;
    S denom = cosh(s) - (v[n - 1] / x[n - 1]) * shs;
    S yn = x[n - 1] / denom;
    S g = (yn / x[n - 1]) * shs;
    for (int i = 0; i < n - 1; ++i) out[i] = x[i] + v[i] * g;
    out[n - 1] = yn;
}

// ---- Poincare ball kernels ----

template <class S>
S ball_dist(const S* x, const S* y, int n, double k) {
    S nx = vec::sq_norm(x, n), ny = vec::sq_norm(y, n);
    S d = S(2.0 * k) * vec::sq_dist(x, y, n) / ((S(1.0) - S(k) * nx) * (S(1.0) - S(k) * ny));
    return acosh1p(d) / std::sqrt(k);
}

template <class S>
void mobius_add(const S* a, const S* b, int n, double k, S* out) {
    S ab = vec::dot(a, b, n);
    S na = vec::sq_norm(a, n), nb = vec::sq_norm(b, n);
    S den = S(1.0) + S(2.0 * k) * ab + S(k * k) * na * nb;
    S ca = (S(1.0) + S(2.0 * k) * ab + S(k) * nb) / den;
    S cb = (S(1.0) - S(k) * na) / den;
    for (int i = 0; i < n; ++i) out[i] = ca * a[i] + cb * b[i];
}

template <class S>
void ball_exp(const S* x, const S* v, int n, double k, S* out) {
    using std::sqrt;
    using std::tanh;
    S nv = vec::norm(v, n);
    if (value_of(nv) == 0.0) {
        for (int i = 0; i < n; ++i) out[i] = x[i];
        return;
    }
    double sk = std::sqrt(k);
    S lam = S(2.0) / (S(1.0) - S(k) * vec::sq_norm(x, n));
    S scale = tanh(S(sk / 2.0) * lam * nv) / (S(sk) * nv);
    std::vector<S> w(n);
    for (int i = 0; i < n; ++i) w[i] = scale * v[i];
    mobius_add(x, w.data(), n, k, out);
}

template <class S>
void ball_log(const S* x, const S* y, int n, double k, S* out) {
    double sk = std::sqrt(k);
    std::vector<S> mx(n), w(n);
    for (int i = 0; i < n; ++i) mx[i] = -x[i];
    mobius_add(mx.data(), y, n, k, w.data());
    S nw = vec::norm(w.data(), n);
    if (value_of(nw) == 0.0) {
        for (int i = 0; i < n; ++i) out[i] = S(0.0);
        return;
    }
    S lam = S(2.0) / (S(1.0) - S(k) * vec::sq_norm(x, n));
    S scale = atanh_c(S(sk) * nw) * S(2.0 / sk) / (lam * nw);
    for (int i = 0; i < n; ++i) out[i] = scale * w[i];
}

template <class S>
S dist_kernel(Model m, const S* x, const S* y, int n, double k) {
    return m == Model::Ball ? ball_dist(x, y, n, k) : halfspace_dist(x, y, n, k);
}

}  // namespace detail

// Conformal factor lambda and the inverse-metric rescaling used by the
// Riemannian optimizers.
inline double metric_scale(const Point& p) {
    if (p.model == Model::HalfSpace) {
        double xn = p.x.back();
        return p.k * xn * xn;
    }
    double f = (1.0 - p.k * vec::sq_norm(p.x.data(), p.dim())) / 2.0;
    return f * f;
}

inline double riemannian_norm(const TangentVector& t) {
    double ne = std::sqrt(vec::sq_norm(t.v.data(), (int)t.v.size()));
    const Point& p = t.base;
    if (p.model == Model::HalfSpace) return ne / (std::sqrt(p.k) * p.x.back());
    return ne * 2.0 / (1.0 - p.k * vec::sq_norm(p.x.data(), p.dim()));
}

inline double dist(const Point& a, const Point& b) {
    check_compat(a, b);
    return detail::dist_kernel(a.model, a.x.data(), b.x.data(), a.dim(), a.k);
}

inline TangentVector log_map(const Point& x, const Point& y) {
    check_compat(x, y);
    TangentVector t{x, std::vector<double>(x.dim())};
    if (x.model == Model::HalfSpace)
        detail::halfspace_log(x.x.data(), y.x.data(), x.dim(), x.k, t.v.data());
    else
        detail::ball_log(x.x.data(), y.x.data(), x.dim(), x.k, t.v.data());
    return t;
}

// Clamp a computed point back into the open model domain.
inline void project_to_domain(Point& p) {
    int n = p.dim();
    if (p.model == Model::Ball) {
        double nrm = std::sqrt(vec::sq_norm(p.x.data(), n));
        double lim = kBallMaxNorm / std::sqrt(p.k);
        if (nrm > lim) {
            double f = lim / nrm;
            for (auto& c : p.x) c *= f;
        }
    } else {
        double lim = kHalfSpaceMinHeight / std::sqrt(p.k);
        if (p.x[n - 1] < lim) p.x[n - 1] = lim;
    }
}

inline Point exp_map(const Point& x, const TangentVector& t) {
    if (t.base.x != x.x || t.base.model != x.model || t.base.k != x.k)
        throw std::invalid_argument("tangent vector not based at x");
    Point y{x.model, x.k, std::vector<double>(x.dim())};
    if (x.model == Model::HalfSpace)
        detail::halfspace_exp(x.x.data(), t.v.data(), x.dim(), y.x.data());
    else
        detail::ball_exp(x.x.data(), t.v.data(), x.dim(), x.k, y.x.data());
    project_to_domain(y);
    return y;
}

// Isometry of the ball taking s to the origin (gyro-translation by -s).
inline Point translate_to_origin(const Point& s, const Point& x) {
    check_compat(s, x);
    if (s.model != Model::Ball) throw std::invalid_argument("translate_to_origin: ball model only");
    Point y{Model::Ball, s.k, std::vector<double>(s.dim())};
    std::vector<double> ms(s.x);
    for (auto& c : ms) c = -c;
    detail::mobius_add(ms.data(), x.x.data(), s.dim(), s.k, y.x.data());
    return y;
}

// Inverse of translate_to_origin: maps the origin back to s.
inline Point translate_from_origin(const Point& s, const Point& y) {
    check_compat(s, y);
    if (s.model != Model::Ball) throw std::invalid_argument("translate_from_origin: ball model only");
    Point x{Model::Ball, s.k, std::vector<double>(s.dim())};
    detail::mobius_add(s.x.data(), y.x.data(), s.dim(), s.k, x.x.data());
    return x;
}

// Cayley-type isometry between the two conformal models. The ball origin maps
// to (0,...,0,1/sqrt(k)).
inline Point convert(const Point& p, Model target) {
    if (p.model == target) return p;
    int n = p.dim();
    double sk = std::sqrt(p.k);
    Point out{target, p.k, std::vector<double>(n)};
    std::vector<double> u(n);
    for (int i = 0; i < n; ++i) u[i] = sk * p.x[i];
    if (target == Model::HalfSpace) {
        double den = vec::sq_norm(u.data(), n) - 2.0 * u[n - 1] + 1.0;  // |u - e_n|^2
        for (int i = 0; i < n - 1; ++i) out.x[i] = 2.0 * u[i] / den / sk;
        out.x[n - 1] = (1.0 - vec::sq_norm(u.data(), n)) / den / sk;
    } else {
        double den = vec::sq_norm(u.data(), n) + 2.0 * u[n - 1] + 1.0;  // |u + e_n|^2
        for (int i = 0; i < n - 1; ++i) out.x[i] = 2.0 * u[i] / den / sk;
        out.x[n - 1] = (vec::sq_norm(u.data(), n) - 1.0) / den / sk;
    }
    project_to_domain(out);
    return out;
}

}  // namespace shadowcone
