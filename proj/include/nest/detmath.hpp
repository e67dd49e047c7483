#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

// Deterministic elementary functions. libm's transcendentals differ in the
// last ulp between implementations, which is enough to desynchronize long
// simulations; these are plain polynomial evaluations over IEEE ops only, so
// they produce identical bits everywhere. Accuracy: ~2e-14 rel (double
// trig), ~1e-7 rel (float exp/log) -- more than the f32 pipeline needs.
namespace nest::detmath {

namespace detail {

// sin on [0, pi/4], Taylor through x^13
inline double sin_poly(double x) {
    double x2 = x * x;
    return x * (1.0 + x2 * (-1.0 / 6 + x2 * (1.0 / 120 + x2 * (-1.0 / 5040 + x2 * (1.0 / 362880 + x2 * (-1.0 / 39916800 + x2 * (1.0 / 6227020800.0)))))));
}

// cos on [0, pi/4], Taylor through x^14
inline double cos_poly(double x) {
    double x2 = x * x;
    return 1.0 + x2 * (-1.0 / 2 + x2 * (1.0 / 24 + x2 * (-1.0 / 720 + x2 * (1.0 / 40320 + x2 * (-1.0 / 3628800 + x2 * (1.0 / 479001600.0 + x2 * (-1.0 / 87178291200.0)))))));
}

constexpr double kDegToRad = 0.017453292519943295;

// sin/cos of an angle in [0, 90] degrees
inline double sin_deg90(double d) {
    return d <= 45.0 ? sin_poly(d * kDegToRad) : cos_poly((90.0 - d) * kDegToRad);
}
inline double cos_deg90(double d) {
    return d <= 45.0 ? cos_poly(d * kDegToRad) : sin_poly((90.0 - d) * kDegToRad);
}

}  // namespace detail

// reduce an angle in degrees to [0, 360)
inline double wrap_deg(double d) {
    double r = std::fmod(d, 360.0);
    if (r < 0.0) r += 360.0;
    return r;
}

inline double sin_deg(double deg) {
    double d = wrap_deg(deg);
    int q = static_cast<int>(d / 90.0);
    if (q > 3) q = 3;  // d just below 360 with rounding
    double r = d - 90.0 * q;
    switch (q) {
        case 0: return detail::sin_deg90(r);
        case 1: return detail::cos_deg90(r);
        case 2: return -detail::sin_deg90(r);
        default: return -detail::cos_deg90(r);
    }
}

inline double cos_deg(double deg) {
    double d = wrap_deg(deg);
    int q = static_cast<int>(d / 90.0);
    if (q > 3) q = 3;
    double r = d - 90.0 * q;
    switch (q) {
        case 0: return detail::cos_deg90(r);
        case 1: return -detail::sin_deg90(r);
        case 2: return -detail::cos_deg90(r);
        default: return detail::sin_deg90(r);
    }
}

// exp for f32, |rel err| < 5e-8, deterministic. Input saturates at [-87, 88]
// so the result is always finite.
inline float exp_f32(float x) {
    x = std::clamp(x, -87.0f, 88.0f);
    float t = x * 1.44269504f;  // x / ln2
    float k = std::floor(t + 0.5f);
    float y = (t - k) * 0.693147181f;  // fractional part back in nats, |y| <= 0.3466
    float p = 1.0f + y * (1.0f + y * (0.5f + y * (1.0f / 6 + y * (1.0f / 24 + y * (1.0f / 120 + y * (1.0f / 720 + y * (1.0f / 5040)))))));
    return std::ldexp(p, static_cast<int>(k));
}

// natural log for f32, x > 0 required; deterministic
inline float log_f32(float x) {
    if (x <= 0.0f) return -88.0f;  // saturating guard, callers keep x > 0
    int e = 0;
    float m = std::frexp(x, &e);  // m in [0.5, 1)
    if (m < 0.70710678f) {
        m *= 2.0f;
        e -= 1;
    }
    float u = (m - 1.0f) / (m + 1.0f);
    float u2 = u * u;
    float p = u * (2.0f + u2 * (2.0f / 3 + u2 * (2.0f / 5 + u2 * (2.0f / 7 + u2 * (2.0f / 9 + u2 * (2.0f / 11))))));
    return static_cast<float>(e) * 0.693147181f + p;
}

// scalar-type dispatch: float uses the deterministic kernels, double (used
// only inside test oracles and statistics) uses libm
template <typename T>
inline T exp_t(T x) {
    if constexpr (sizeof(T) == sizeof(float)) return exp_f32(static_cast<float>(x));
    else return std::exp(x);
}

template <typename T>
inline T log_t(T x) {
    if constexpr (sizeof(T) == sizeof(float)) return log_f32(static_cast<float>(x));
    else return std::log(x);
}

// Sum of a multiset of doubles, independent of input order: contributions
// are sorted before accumulation. Used where a reduction must be exactly
// permutation-invariant (t-SNE).
inline double stable_sum(std::vector<double>& terms) {
    std::sort(terms.begin(), terms.end());
    double s = 0.0;
    for (double t : terms) s += t;
    return s;
}

}  // namespace nest::detmath
