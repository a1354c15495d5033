#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>

namespace shadowcone {

// Forward-mode scalar carrying one directional derivative. Evaluating the
// closed-form energies with Dual seeds yields exact partial derivatives.
struct Dual {
    double val = 0.0;
    double dot = 0.0;

    Dual() = default;
    Dual(double v) : val(v) {}
    Dual(double v, double d) : val(v), dot(d) {}
};

inline Dual operator+(Dual a, Dual b) { return {a.val + b.val, a.dot + b.dot}; }
inline Dual operator-(Dual a, Dual b) { return {a.val - b.val, a.dot - b.dot}; }
inline Dual operator-(Dual a) { return {-a.val, -a.dot}; }
inline Dual operator*(Dual a, Dual b) { return {a.val * b.val, a.dot * b.val + a.val * b.dot}; }
inline Dual operator/(Dual a, Dual b) {
    double inv = 1.0 / b.val;
    return {a.val * inv, (a.dot - a.val * b.dot * inv) * inv};
}
inline Dual& operator+=(Dual& a, Dual b) { a = a + b; return a; }
inline Dual& operator-=(Dual& a, Dual b) { a = a - b; return a; }
inline Dual& operator*=(Dual& a, Dual b) { a = a * b; return a; }

inline bool operator<(Dual a, Dual b) { return a.val < b.val; }
inline bool operator>(Dual a, Dual b) { return a.val > b.val; }
inline bool operator<=(Dual a, Dual b) { return a.val <= b.val; }
inline bool operator>=(Dual a, Dual b) { return a.val >= b.val; }

inline double value_of(double x) { return x; }
inline double value_of(Dual x) { return x.val; }

inline Dual sqrt(Dual a) {
    double s = std::sqrt(a.val);
    if (s <= 0.0) return {0.0, 0.0};  // subgradient at the tip of a norm
    return {s, a.dot / (2.0 * s)};
}
inline Dual exp(Dual a) { double e = std::exp(a.val); return {e, a.dot * e}; }
inline Dual log(Dual a) { return {std::log(a.val), a.dot / a.val}; }
inline Dual sin(Dual a) { return {std::sin(a.val), a.dot * std::cos(a.val)}; }
inline Dual cos(Dual a) { return {std::cos(a.val), -a.dot * std::sin(a.val)}; }
inline Dual sinh(Dual a) { return {std::sinh(a.val), a.dot * std::cosh(a.val)}; }
inline Dual cosh(Dual a) { return {std::cosh(a.val), a.dot * std::sinh(a.val)}; }
inline Dual tanh(Dual a) { double t = std::tanh(a.val); return {t, a.dot * (1.0 - t * t)}; }
inline Dual asinh(Dual a) { return {std::asinh(a.val), a.dot / std::sqrt(1.0 + a.val * a.val)}; }
inline Dual atan(Dual a) { return {std::atan(a.val), a.dot / (1.0 + a.val * a.val)}; }
inline Dual atanh(Dual a) { return {std::atanh(a.val), a.dot / (1.0 - a.val * a.val)}; }
inline Dual abs(Dual a) { return a.val < 0 ? -a : a; }

template <class S> S max_s(S a, S b) { return value_of(a) >= value_of(b) ? a : b; }
template <class S> S min_s(S a, S b) { return value_of(a) <= value_of(b) ? a : b; }

// arcosh with the argument clamped to >= 1 so rounding never produces NaN.
inline double acosh_c(double x) { return x <= 1.0 ? 0.0 : std::acosh(x); }
inline Dual acosh_c(Dual a) {
    if (a.val <= 1.0) return {0.0, 0.0};
    return {std::acosh(a.val), a.dot / std::sqrt(a.val * a.val - 1.0)};
}

// arcosh(1 + d) evaluated without forming 1 + d, which would absorb small d
// and wreck the relative accuracy of short distances.
inline double acosh1p(double d) {
    if (d <= 0.0) return 0.0;
    return std::log1p(d + std::sqrt(d * (d + 2.0)));
}
inline Dual acosh1p(Dual a) {
    if (a.val <= 0.0) return {0.0, 0.0};
    return {acosh1p(a.val), a.dot / std::sqrt(a.val * (a.val + 2.0))};
}

inline double asin_c(double x) { return std::asin(std::clamp(x, -1.0, 1.0)); }
inline Dual asin_c(Dual a) {
    if (a.val <= -1.0) return {-std::numbers::pi / 2.0, 0.0};
    if (a.val >= 1.0) return {std::numbers::pi / 2.0, 0.0};
    return {std::asin(a.val), a.dot / std::sqrt(1.0 - a.val * a.val)};
}

inline double acos_c(double x) { return std::acos(std::clamp(x, -1.0, 1.0)); }
inline Dual acos_c(Dual a) {
    if (a.val <= -1.0) return {std::numbers::pi, 0.0};
    if (a.val >= 1.0) return {0.0, 0.0};
    return {std::acos(a.val), -a.dot / std::sqrt(1.0 - a.val * a.val)};
}

inline double atanh_c(double x) {
    constexpr double lim = 1.0 - 1e-15;
    return std::atanh(std::clamp(x, -lim, lim));
}
inline Dual atanh_c(Dual a) {
    constexpr double lim = 1.0 - 1e-15;
    if (a.val <= -lim || a.val >= lim) return {std::atanh(std::clamp(a.val, -lim, lim)), 0.0};
    return atanh(a);
}

namespace vec {

template <class S> S dot(const S* a, const S* b, int n) {
    S s(0.0);
    for (int i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}
template <class S> S sq_norm(const S* a, int n) { return dot(a, a, n); }
template <class S> S norm(const S* a, int n) {
    using std::sqrt;
    return sqrt(sq_norm(a, n));
}
template <class S> S sq_dist(const S* a, const S* b, int n) {
    S s(0.0);
    for (int i = 0; i < n; ++i) {
        S d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

}  // namespace vec

}  // namespace shadowcone
