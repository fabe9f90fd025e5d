#pragma once

// Finite-difference calculus for radial fields on a uniform grid over
// [0, L] whose endpoints are coordinate poles.  Fields carry a definite
// parity across each pole (invariant scalars are even, the warp function
// is odd); stencils reach past the poles through parity-reflected ghost
// values.  Derivatives use 7-point sixth-order central stencils, and the
// cumulative quadrature carries Euler-Maclaurin endpoint corrections so
// integrals of smooth data are O(dt^6) as well.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace l2flow {

using RadialField = std::vector<double>;

enum class Parity { Even, Odd };

/// Sample with parity reflection about node 0 and node N.
inline double ghosted(const RadialField& v, int k, Parity p) {
    const int n = int(v.size()) - 1;
    if (k >= 0 && k <= n) return v[k];
    const int m = k < 0 ? -k : 2 * n - k;
    return p == Parity::Even ? v[m] : -v[m];
}

namespace stencil {
// 7-point central weights for offsets -3..3.
inline constexpr double d1[7] = {-1.0 / 60, 3.0 / 20, -3.0 / 4, 0.0,
                                 3.0 / 4,   -3.0 / 20, 1.0 / 60};
inline constexpr double d2[7] = {1.0 / 90, -3.0 / 20, 3.0 / 2, -49.0 / 18,
                                 3.0 / 2,  -3.0 / 20, 1.0 / 90};
// Third derivative, fourth-order accurate (used only in quadrature
// correction terms, where second-order accuracy would already suffice).
inline constexpr double d3[7] = {1.0 / 8, -1.0, 13.0 / 8, 0.0,
                                 -13.0 / 8, 1.0, -1.0 / 8};
}  // namespace stencil

inline RadialField applyStencil(const RadialField& v, const double (&w)[7],
                                double scale, Parity p) {
    const int n = int(v.size()) - 1;
    RadialField out(v.size());
    for (int k = 0; k <= n; ++k) {
        double s = 0.0;
        for (int j = -3; j <= 3; ++j) s += w[j + 3] * ghosted(v, k + j, p);
        out[k] = s * scale;
    }
    return out;
}

inline RadialField deriv(const RadialField& v, double dt, Parity p) {
    return applyStencil(v, stencil::d1, 1.0 / dt, p);
}

inline RadialField deriv2(const RadialField& v, double dt, Parity p) {
    return applyStencil(v, stencil::d2, 1.0 / (dt * dt), p);
}

inline RadialField deriv3(const RadialField& v, double dt, Parity p) {
    return applyStencil(v, stencil::d3, 1.0 / (dt * dt * dt), p);
}

/// Cumulative integral w_k = int_0^{t_k} g dt for sampled g, composite
/// trapezoid plus Euler-Maclaurin corrections through the dt^4 term.
inline RadialField cumulativeIntegral(const RadialField& g, double dt, Parity p) {
    const int n = int(g.size()) - 1;
    RadialField dg = deriv(g, dt, p);
    RadialField d3g = deriv3(g, dt, p);

    RadialField w(g.size());
    double acc = 0.0;
    w[0] = 0.0;
    for (int k = 1; k <= n; ++k) {
        acc += 0.5 * dt * (g[k - 1] + g[k]);
        w[k] = acc - dt * dt / 12.0 * (dg[k] - dg[0])
             + dt * dt * dt * dt / 720.0 * (d3g[k] - d3g[0]);
    }
    return w;
}

/// Definite integral over [0, L] with the same corrections.
inline double integralEM(const RadialField& g, double dt, Parity p) {
    return cumulativeIntegral(g, dt, p).back();
}

/// Lenient guard against grossly wrong parity (e.g. an odd field passed
/// where an invariant scalar is required).  Smooth fields of the correct
/// parity have a one-sided derivative at the pole of size O(dt^2), while
/// a parity violation shows up at O(1).
inline void requireEvenAtPoles(const RadialField& v, double dt, double length,
                               const char* who) {
    const int n = int(v.size()) - 1;
    double scale = 0.0;
    for (double x : v) scale = std::max(scale, std::abs(x));
    const double tol = 0.25 * (1.0 + scale);
    const double left = (-1.5 * v[0] + 2.0 * v[1] - 0.5 * v[2]) / dt;
    const double right = (1.5 * v[n] - 2.0 * v[n - 1] + 0.5 * v[n - 2]) / dt;
    const double norm = length / 3.141592653589793;
    if (std::abs(left) * norm > tol || std::abs(right) * norm > tol)
        throw std::invalid_argument(std::string(who) +
                                    ": field violates even parity at a pole");
}

}  // namespace l2flow
