#pragma once

#include <array>
#include <stdexcept>

#include "shadowcone/geometry.hpp"

namespace shadowcone {

enum class ConeFamily { UmbralInfinity, UmbralOrigin, PenumbralBall, PenumbralHorosphere };

inline const char* family_name(ConeFamily f) {
    switch (f) {
        case ConeFamily::UmbralInfinity: return "umbral_infinity";
        case ConeFamily::UmbralOrigin: return "umbral_origin";
        case ConeFamily::PenumbralBall: return "penumbral_ball";
        case ConeFamily::PenumbralHorosphere: return "penumbral_horosphere";
    }
    return "?";
}

inline Model family_model(ConeFamily f) {
    return (f == ConeFamily::UmbralInfinity || f == ConeFamily::PenumbralHorosphere)
               ? Model::HalfSpace
               : Model::Ball;
}

// Raised when an apex violates the family's placement constraint (inside the
// source hole, or above the source horosphere). Callers are expected to
// project drifting points rather than rely on silent clamping here.
struct cone_constraint_error : std::domain_error {
    using std::domain_error::domain_error;
};

struct ConeSpec {
    ConeFamily family = ConeFamily::UmbralInfinity;
    double k = 1.0;       // space curvature -k
    double r = 0.1;       // object/source hyperbolic radius (umbral*, penumbral ball)
    double h = 3.0;       // horosphere level; source height = sqrt(k) * e^{sqrt(k) h}
    double gamma3 = 1e-4; // apex push depth used by the H > 0 distance branch

    double source_height() const { return std::sqrt(k) * std::exp(std::sqrt(k) * h); }

    ConeSpec with_radius(double rr) const {
        ConeSpec s = *this;
        s.r = rr;
        return s;
    }

    static ConeSpec from_source_height(ConeFamily f, double k, double height, double gamma3) {
        ConeSpec s;
        s.family = f;
        s.k = k;
        s.h = std::log(height / std::sqrt(k)) / std::sqrt(k);
        s.gamma3 = gamma3;
        return s;
    }
};

struct ConeQuery {
    double t = 0.0;            // temperature: sign tests the shadow
    double altitude = 0.0;     // H(v,u): > 0 iff the nearest cone point is the apex
    double signed_dist = 0.0;  // signed distance to the cone
    bool member = false;
};

inline constexpr int kMaxDim = 64;

namespace detail {

template <class S>
struct ConeEval {
    S t, H, sd;
};

// sinh/cosh/tanh of sqrt(k)*d(x,O) in the ball model, evaluated directly from
// coordinates.
template <class S> S ball_sinh_kd(const S* x, int n, double k) {
    using std::sqrt;
    S nx = vec::norm(x, n);
    return S(2.0 * std::sqrt(k)) * nx / (S(1.0) - S(k) * nx * nx);
}
template <class S> S ball_cosh_kd(const S* x, int n, double k) {
    S n2 = vec::sq_norm(x, n);
    return (S(1.0) + S(k) * n2) / (S(1.0) - S(k) * n2);
}
template <class S> S ball_tanh_kd(const S* x, int n, double k) {
    S nx = vec::norm(x, n);
    return S(2.0 * std::sqrt(k)) * nx / (S(1.0) + S(k) * nx * nx);
}

// Apex pushed gamma3 deeper into the cone along the central axis.
template <class S>
void push_apex(ConeFamily f, const S* u, int n, double k, double gamma3, S* out) {
    double sk = std::sqrt(k);
    if (family_model(f) == Model::HalfSpace) {
        for (int i = 0; i < n - 1; ++i) out[i] = u[i];
        out[n - 1] = u[n - 1] * std::exp(-sk * gamma3);
    } else {
        // radial push away from the origin source
        S z = S(sk) * vec::norm(u, n);
        double w = std::tanh(sk * gamma3 / 2.0);
        S zn = (z + S(w)) / (S(1.0) + z * S(w));  // tanh of summed half-distances
        S scale = zn / max_s(z, S(1e-300));
        for (int i = 0; i < n; ++i) out[i] = u[i] * scale;
    }
}

template <class S>
S apex_distance(ConeFamily f, const S* u, const S* v, int n, double k, double gamma3) {
    std::array<S, kMaxDim> up;
    push_apex(f, u, n, k, gamma3, up.data());
    return dist_kernel(family_model(f), up.data(), v, n, k);
}

// ---- umbral, source at infinity (half-space) ----

template <class S>
ConeEval<S> umbral_infinity_eval(const S* u, const S* v, int n, double k, double r, double gamma3) {
    using std::asinh;
    using std::cosh;
    using std::sinh;
    using std::sqrt;
    double sk = std::sqrt(k);
    S rho = sqrt(vec::sq_dist(u, v, n - 1));
    S un = u[n - 1], vn = v[n - 1];
    S t = (rho - un * S(std::sinh(sk * r))) / vn;
    S H = vn * vn * (S(1.0) + t * t) - un * un * S(std::cosh(sk * r) * std::cosh(sk * r));
    S sd = value_of(H) > 0.0
               ? apex_distance(ConeFamily::UmbralInfinity, u, v, n, k, gamma3)
               : asinh(t) / S(sk) + S(r);
    return {t, H, sd};
}

// ---- umbral, source at the ball origin ----
//
// The altitude compares the feet of u and v on the tangent light line,
// measured along the light direction: apex side positive. H(v,u) > 0 exactly
// when the nearest cone point is the apex.

template <class S>
ConeEval<S> umbral_origin_eval(const S* u, const S* v, int n, double k, double r, double gamma3) {
    using std::asinh;
    using std::cos;
    using std::sin;
    using std::sqrt;
    double sk = std::sqrt(k);
    S shu = ball_sinh_kd(u, n, k);
    S beta = asin_c(S(std::sinh(sk * r)) / shu);
    S nu = vec::norm(u, n), nv = vec::norm(v, n);
    S alpha = value_of(nv) < 1e-30 ? S(0.0) : acos_c(vec::dot(u, v, n) / (nu * nv));
    S t = ball_sinh_kd(v, n, k) * sin(alpha - beta);
    S alt_u = atanh_c(ball_tanh_kd(u, n, k) * cos(beta)) / S(sk);
    S alt_v = atanh_c(ball_tanh_kd(v, n, k) * cos(alpha - beta)) / S(sk);
    S H = alt_u - alt_v;
    S sd = value_of(H) > 0.0
               ? apex_distance(ConeFamily::UmbralOrigin, u, v, n, k, gamma3)
               : asinh(t) / S(sk) + S(r);
    return {t, H, sd};
}

// ---- penumbral shared tail: t = phi - theta, H = t - pi/2 ----

template <class S>
ConeEval<S> penumbral_eval(ConeFamily f, const S* u, const S* v, int n, double k, S phi, S theta,
                           double gamma3) {
    using std::asinh;
    using std::sin;
    using std::sinh;
    double sk = std::sqrt(k);
    S t = phi - theta;
    S H = t - S(std::numbers::pi / 2.0);
    S sd;
    if (value_of(H) > 0.0) {
        sd = apex_distance(f, u, v, n, k, gamma3);
    } else {
        S d = dist_kernel(family_model(f), u, v, n, k);
        sd = asinh(sinh(S(sk) * d) * sin(t)) / S(sk);
    }
    return {t, H, sd};
}

template <class S>
S penumbral_ball_aperture(const S* u, int n, double k, double r) {
    return asin_c(S(std::sinh(std::sqrt(k) * r)) / ball_sinh_kd(u, n, k));
}

// Angle at u between the central axis (pointing away from the origin) and the
// geodesic towards v.
template <class S>
S penumbral_ball_axis_angle(const S* u, const S* v, int n, double k) {
    using std::sqrt;
    S nu2 = vec::sq_norm(u, n), nv2 = vec::sq_norm(v, n);
    S uv = vec::dot(u, v, n);
    S num = uv * (S(1.0) + S(k) * nu2) - nu2 * (S(1.0) + S(k) * nv2);
    S den = sqrt(nu2) * sqrt(vec::sq_dist(u, v, n)) *
            sqrt(max_s(S(1.0) + S(k * k) * nu2 * nv2 - S(2.0 * k) * uv, S(1e-300)));
    return acos_c(num / den);
}

template <class S>
S penumbral_horosphere_aperture(const S* u, int n, double, double source_height) {
    return asin_c(u[n - 1] / S(source_height));
}

// Angle at u between the downward axis and log_u(v).
template <class S>
S penumbral_horosphere_axis_angle(const S* u, const S* v, int n, double k) {
    std::array<S, kMaxDim> w;
    halfspace_log(u, v, n, k, w.data());
    S nw = vec::norm(w.data(), n);
    return acos_c(-w[n - 1] / max_s(nw, S(1e-300)));
}

template <class S>
ConeEval<S> cone_eval(const ConeSpec& spec, const S* u, const S* v, int n) {
    switch (spec.family) {
        case ConeFamily::UmbralInfinity:
            return umbral_infinity_eval(u, v, n, spec.k, spec.r, spec.gamma3);
        case ConeFamily::UmbralOrigin:
            return umbral_origin_eval(u, v, n, spec.k, spec.r, spec.gamma3);
        case ConeFamily::PenumbralBall:
            return penumbral_eval(spec.family, u, v, n, spec.k,
                                  penumbral_ball_axis_angle(u, v, n, spec.k),
                                  penumbral_ball_aperture(u, n, spec.k, spec.r), spec.gamma3);
        case ConeFamily::PenumbralHorosphere:
            return penumbral_eval(spec.family, u, v, n, spec.k,
                                  penumbral_horosphere_axis_angle(u, v, n, spec.k),
                                  penumbral_horosphere_aperture(u, n, spec.k, spec.source_height()),
                                  spec.gamma3);
    }
    throw std::logic_error("unknown cone family");
}

template <class S>
S cone_half_aperture(const ConeSpec& spec, const S* u, int n) {
    using std::atan;
    using std::sinh;
    switch (spec.family) {
        case ConeFamily::UmbralInfinity:
            return atan(S(std::sinh(std::sqrt(spec.k) * spec.r)));
        case ConeFamily::UmbralOrigin:
            // angular half-width of the shadow wedge seen from the source
            return asin_c(S(std::sinh(std::sqrt(spec.k) * spec.r)) / ball_sinh_kd(u, n, spec.k));
        case ConeFamily::PenumbralBall:
            return penumbral_ball_aperture(u, n, spec.k, spec.r);
        case ConeFamily::PenumbralHorosphere:
            return penumbral_horosphere_aperture(u, n, spec.k, spec.source_height());
    }
    throw std::logic_error("unknown cone family");
}

template <class S>
S cone_axis_angle(const ConeSpec& spec, const S* u, const S* v, int n) {
    switch (spec.family) {
        case ConeFamily::UmbralInfinity: {
            // Euclidean chord angle against the downward light direction; the
            // cone boundary is a Euclidean cone in the conformal model.
            using std::sqrt;
            S dn = u[n - 1] - v[n - 1];
            S nd = sqrt(vec::sq_dist(u, v, n));
            return acos_c(dn / max_s(nd, S(1e-300)));
        }
        case ConeFamily::UmbralOrigin: {
            S nu = vec::norm(u, n), nv = vec::norm(v, n);
            if (value_of(nv) < 1e-30) return S(0.0);
            return acos_c(vec::dot(u, v, n) / (nu * nv));
        }
        case ConeFamily::PenumbralBall:
            return penumbral_ball_axis_angle(u, v, n, spec.k);
        case ConeFamily::PenumbralHorosphere:
            return penumbral_horosphere_axis_angle(u, v, n, spec.k);
    }
    throw std::logic_error("unknown cone family");
}

}  // namespace detail

inline void check_model(const ConeSpec& spec, const Point& p) {
    if (p.model != family_model(spec.family))
        throw std::invalid_argument(std::string(family_name(spec.family)) + " requires the " +
                                    model_name(family_model(spec.family)) + " model");
    if (p.k != spec.k) throw std::invalid_argument("curvature mismatch between spec and point");
    if (p.dim() > kMaxDim) throw std::invalid_argument("dimension above kMaxDim");
}

// Apex placement constraint: outside the source hole (ball families), below
// the source horosphere. Fails fast so optimizer bugs cannot hide.
inline void check_apex(const ConeSpec& spec, const Point& u) {
    check_model(spec, u);
    if (spec.family == ConeFamily::UmbralOrigin || spec.family == ConeFamily::PenumbralBall) {
        Point o{Model::Ball, spec.k, std::vector<double>(u.dim(), 0.0)};
        if (dist(u, o) < spec.r)
            throw cone_constraint_error("apex inside the source hole (d(u,O) < r)");
    } else if (spec.family == ConeFamily::PenumbralHorosphere) {
        if (u.x.back() >= spec.source_height())
            throw cone_constraint_error("apex at or above the source horosphere");
    }
}

inline double half_aperture(const ConeSpec& spec, const Point& u) {
    check_apex(spec, u);
    return detail::cone_half_aperture(spec, u.x.data(), u.dim());
}

inline double axis_angle(const ConeSpec& spec, const Point& u, const Point& v) {
    check_apex(spec, u);
    check_model(spec, v);
    if (u.x == v.x) throw std::invalid_argument("axis_angle undefined for v == u");
    return detail::cone_axis_angle(spec, u.x.data(), v.x.data(), u.dim());
}

inline double temperature(const ConeSpec& spec, const Point& u, const Point& v) {
    check_apex(spec, u);
    check_model(spec, v);
    return detail::cone_eval(spec, u.x.data(), v.x.data(), u.dim()).t;
}

inline double relative_altitude(const ConeSpec& spec, const Point& u, const Point& v) {
    check_apex(spec, u);
    check_model(spec, v);
    return detail::cone_eval(spec, u.x.data(), v.x.data(), u.dim()).H;
}

inline double signed_cone_distance(const ConeSpec& spec, const Point& u, const Point& v) {
    check_apex(spec, u);
    check_model(spec, v);
    return detail::cone_eval(spec, u.x.data(), v.x.data(), u.dim()).sd;
}

inline ConeQuery query(const ConeSpec& spec, const Point& u, const Point& v) {
    check_apex(spec, u);
    check_model(spec, v);
    if (u.x == v.x) return ConeQuery{0.0, 0.0, 0.0, true};  // reflexive
    auto e = detail::cone_eval(spec, u.x.data(), v.x.data(), u.dim());
    return ConeQuery{e.t, e.H, e.sd, e.H <= 0.0 && e.sd <= 0.0};
}

inline bool is_member(const ConeSpec& spec, const Point& u, const Point& v) {
    return query(spec, u, v).member;
}

// Membership with a slack band on the boundary comparisons.
inline bool is_member(const ConeSpec& spec, const Point& u, const Point& v, double slack) {
    check_apex(spec, u);
    check_model(spec, v);
    if (u.x == v.x) return true;
    auto e = detail::cone_eval(spec, u.x.data(), v.x.data(), u.dim());
    if (e.H <= 0.0) return e.sd <= slack;
    return dist(u, v) <= slack;
}

}  // namespace shadowcone
