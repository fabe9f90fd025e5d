#pragma once

// Assembly of the L2 curvature energy gradient on the warped ansatz and
// the finite-difference oracle that certifies it.
//
// In frame components, with W = 0 on this ansatz,
//   E = grad F = -2 Delta r + Hess s + (s/3) z + 4 z o z - |z|^2 g,
// and the contracts  tr E = -Delta s  and  div E = 0  hold up to stencil
// truncation.

#include <cmath>
#include <stdexcept>

#include "l2flow/warped_metric.hpp"

namespace l2flow {

inline InvariantSym2Field assembleGradF(const WarpedMetric& m, const GeometryCache& c) {
    const int n = m.segments();
    InvariantSym2Field lapR = roughLaplacianSym2(m, c.r);
    InvariantSym2Field hessS = hessianScalar(m, c.s);

    InvariantSym2Field e;
    e.rad.resize(n + 1);
    e.sph.resize(n + 1);
    for (int k = 0; k <= n; ++k) {
        const double zr = c.z.rad[k], zs = c.z.sph[k];
        const double zSq = zr * zr + 3.0 * zs * zs;
        e.rad[k] = -2.0 * lapR.rad[k] + hessS.rad[k]
                 + c.s[k] / 3.0 * zr + 4.0 * zr * zr - zSq;
        e.sph[k] = -2.0 * lapR.sph[k] + hessS.sph[k]
                 + c.s[k] / 3.0 * zs + 4.0 * zs * zs - zSq;
    }
    return e;
}

inline InvariantSym2Field assembleGradF(const WarpedMetric& m) {
    return assembleGradF(m, computeGeometry(m));
}

/// Raw discrete energy F = int |Rm|^2 dV.
inline double energyF(const WarpedMetric& m) {
    return integrate(m, computeGeometry(m).rmNormSq);
}

/// ||z||^2_{L2} = int |z|^2 dV = int 3 phi^2 dV.
inline double zNormSqL2(const WarpedMetric& m, const GeometryCache& c) {
    RadialField g(c.phi.size());
    for (size_t k = 0; k < g.size(); ++k) g[k] = 3.0 * c.phi[k] * c.phi[k];
    return integrate(m, g);
}

inline double zNormSqL2(const WarpedMetric& m) {
    return zNormSqL2(m, computeGeometry(m));
}

/// ||grad F||^2_{L2}.
inline double gradFNormSqL2(const WarpedMetric& m, const GeometryCache& c) {
    InvariantSym2Field e = assembleGradF(m, c);
    return normSqL2(m, e);
}

/// Metric perturbed multiplicatively in frame components:
/// a^2 <- a^2 (1 + eps h_rad), f^2 <- f^2 (1 + eps h_sph).
inline WarpedMetric perturbInDirection(const WarpedMetric& m,
                                       const InvariantSym2Field& h, double eps) {
    WarpedMetric out = m;
    const int n = m.segments();
    for (int k = 0; k <= n; ++k) {
        const double fa = 1.0 + eps * h.rad[k];
        const double ff = 1.0 + eps * h.sph[k];
        if (!(fa > 0.0) || !(ff > 0.0))
            throw std::invalid_argument(
                "perturbInDirection: perturbed metric is not positive");
        out.a[k] = m.a[k] * std::sqrt(fa);
        out.f[k] = m.f[k] * std::sqrt(ff);
    }
    return out;
}

/// Central difference (F(m + eps h) - F(m - eps h)) / (2 eps).  The
/// independent oracle for assembleGradF: for valid directions h this
/// converges to <grad F, h>_{L2} as eps -> 0 and the grid refines.
inline double directionalDerivativeF(const WarpedMetric& m,
                                     const InvariantSym2Field& h, double eps) {
    const double fPlus = energyF(perturbInDirection(m, h, eps));
    const double fMinus = energyF(perturbInDirection(m, h, -eps));
    return (fPlus - fMinus) / (2.0 * eps);
}

/// |grad T|^2 for an invariant 2-tensor:
/// (p'/a)^2 + 3 (q'/a)^2 + 6 lambda^2 (p - q)^2, lambda = f'/(a f).
/// The coupling term vanishes at the poles for smooth tensors.
inline RadialField gradientNormSqSym2(const WarpedMetric& m,
                                      const InvariantSym2Field& t) {
    const int n = m.segments();
    const double dt = m.spacing();
    RadialField dp = deriv(t.rad, dt, Parity::Even);
    RadialField dq = deriv(t.sph, dt, Parity::Even);
    RadialField df = deriv(m.f, dt, Parity::Odd);

    RadialField out(n + 1);
    for (int k = 1; k < n; ++k) {
        const double lam = df[k] / (m.a[k] * m.f[k]);
        const double diff = t.rad[k] - t.sph[k];
        out[k] = dp[k] * dp[k] / (m.a[k] * m.a[k])
               + 3.0 * dq[k] * dq[k] / (m.a[k] * m.a[k])
               + 6.0 * lam * lam * diff * diff;
    }
    out[0] = dp[0] * dp[0] / (m.a[0] * m.a[0])
           + 3.0 * dq[0] * dq[0] / (m.a[0] * m.a[0]);
    out[n] = dp[n] * dp[n] / (m.a[n] * m.a[n])
           + 3.0 * dq[n] * dq[n] / (m.a[n] * m.a[n]);
    return out;
}

}  // namespace l2flow
