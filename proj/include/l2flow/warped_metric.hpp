#pragma once

// Cohomogeneity-one metrics g = a(t)^2 dt^2 + f(t)^2 g_{S^3} on S^4,
// discretised on a uniform grid over the coordinate interval [0, L].
// Both endpoints are poles: f vanishes there and smoothness forces
// (f'/a) = +1 at t = 0 and -1 at t = L.  The lapse a is even across the
// poles (our gauge convention), f is odd, and every invariant scalar is
// even.
//
// Orthonormal-frame curvature data reduces to the two sectional
// curvatures
//     K_rad = -(f'/a)' / (a f),      K_sph = (1 - (f'/a)^2) / f^2,
// from which  s = 6 (K_rad + K_sph),  r = diag(3 K_rad; K_rad + 2 K_sph),
// z = diag(-3/2 phi; 1/2 phi) with phi = K_sph - K_rad, and
// |Rm|^2 = 2|z|^2 + s^2/6 (the Weyl part vanishes identically for this
// ansatz: rotationally symmetric 4-metrics are locally conformally flat).
//
// Numerical notes, load-bearing:
//  * K_sph as written is a ratio of two quantities that both vanish at
//    the poles; evaluating it pointwise from stencilled f'/a loses all
//    relative accuracy near the poles (the error of f' does not vanish
//    there while 1 - (f'/a)^2 does).  We instead integrate
//    d/dt [1 - (f'/a)^2] = -2 (f'/a)(f'/a)' from the pole, which keeps
//    the absolute error O(dt^6 * t^2), i.e. uniform relative accuracy.
//  * Pole values of singular-coefficient expressions use the regular
//    limits (L'Hopital closures); invariant traceless tensors vanish at
//    the poles exactly.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "l2flow/radial_calculus.hpp"

namespace l2flow {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kOmega3 = 2.0 * kPi * kPi;  // vol(S^3)

struct WarpedMetric {
    double L = 0.0;
    RadialField a;  // lapse, positive, even at poles
    RadialField f;  // warp, odd at poles, f[0] = f[N] = 0

    int segments() const { return int(a.size()) - 1; }
    double spacing() const { return L / segments(); }
    double node(int k) const { return L * k / segments(); }
};

/// SO(4)-invariant symmetric 2-tensor field in frame components:
/// rad = T_00, sph = T_11 = T_22 = T_33.  Both components are even at
/// the poles and agree there for smooth tensors.
struct InvariantSym2Field {
    RadialField rad, sph;

    RadialField trace() const {
        RadialField t(rad.size());
        for (size_t k = 0; k < rad.size(); ++k) t[k] = rad[k] + 3.0 * sph[k];
        return t;
    }
};

struct GeometryCache {
    RadialField s;            // scalar curvature
    InvariantSym2Field r;     // Ricci
    InvariantSym2Field z;     // traceless Ricci
    RadialField phi;          // K_sph - K_rad; z = diag(-3/2, 1/2) phi
    RadialField rmNormSq;     // |Rm|^2 = 2|z|^2 + s^2/6
    RadialField volumeDensity;  // omega_3 a f^3
};

inline void validateMetric(const WarpedMetric& m, const char* who) {
    const int n = m.segments();
    if (n < 16 || n % 2 != 0)
        throw std::invalid_argument(std::string(who) +
                                    ": node count must be even and >= 16");
    if (!(m.L > 0.0)) throw std::invalid_argument(std::string(who) + ": L <= 0");
    if (int(m.f.size()) != n + 1)
        throw std::invalid_argument(std::string(who) + ": a/f length mismatch");
    for (int k = 0; k <= n; ++k)
        if (!(m.a[k] > 0.0))
            throw std::invalid_argument(std::string(who) + ": lapse not positive");
    if (m.f[0] != 0.0 || m.f[n] != 0.0)
        throw std::invalid_argument(std::string(who) + ": warp must vanish at poles");
    for (int k = 1; k < n; ++k)
        if (!(m.f[k] > 0.0))
            throw std::invalid_argument(std::string(who) +
                                        ": warp not positive at interior node");

    // Pole regularity (f'/a) = +-1 up to discretisation slack.
    const double dt = m.spacing();
    RadialField df = deriv(m.f, dt, Parity::Odd);
    const double slack = std::max(0.05, 10.0 * dt * dt);
    if (std::abs(df[0] / m.a[0] - 1.0) > slack ||
        std::abs(df[n] / m.a[n] + 1.0) > slack)
        throw std::invalid_argument(std::string(who) + ": pole regularity violated");
}

/// Round unit S^4: a = 1, f = sin t on [0, pi].
inline WarpedMetric buildRoundMetric(int n) {
    if (n < 16 || n % 2 != 0)
        throw std::invalid_argument("buildRoundMetric: N must be even and >= 16");
    WarpedMetric m;
    m.L = kPi;
    m.a.assign(n + 1, 1.0);
    m.f.resize(n + 1);
    for (int k = 0; k <= n; ++k) m.f[k] = std::sin(kPi * k / n);
    m.f[0] = 0.0;
    m.f[n] = 0.0;
    return m;
}

/// Multiplies the warp by 1 + amplitude * sin^2(mode pi t / L).  The bump
/// and its first derivative vanish at both poles, so regularity is
/// preserved exactly.
inline WarpedMetric perturbMetric(const WarpedMetric& m, int mode, double amplitude) {
    if (!(std::abs(amplitude) < 0.5))
        throw std::invalid_argument("perturbMetric: |amplitude| must be < 0.5");
    if (mode < 0) throw std::invalid_argument("perturbMetric: mode must be >= 0");
    WarpedMetric out = m;
    const int n = m.segments();
    for (int k = 1; k < n; ++k) {
        double b = std::sin(mode * kPi * k / n);
        out.f[k] = m.f[k] * (1.0 + amplitude * b * b);
    }
    validateMetric(out, "perturbMetric");
    return out;
}

/// All pointwise curvature data of the metric.
inline GeometryCache computeGeometry(const WarpedMetric& m) {
    const int n = m.segments();
    const double dt = m.spacing();

    RadialField u(n + 1);  // f'/a, even, +-1 at the poles
    RadialField df = deriv(m.f, dt, Parity::Odd);
    for (int k = 0; k <= n; ++k) u[k] = df[k] / m.a[k];
    RadialField du = deriv(u, dt, Parity::Even);
    RadialField d2u = deriv2(u, dt, Parity::Even);

    RadialField kRad(n + 1);
    for (int k = 1; k < n; ++k) kRad[k] = -du[k] / (m.a[k] * m.f[k]);
    kRad[0] = -d2u[0] / (m.a[0] * df[0]);
    kRad[n] = -d2u[n] / (m.a[n] * df[n]);

    // w = 1 - u^2 integrated from the left pole, then the O(dt^6) defect
    // at the right pole redistributed with a weight that vanishes
    // quadratically at t = 0 and reaches 1 quadratically at t = L, so
    // w/f^2 stays bounded and accurate at both poles.
    RadialField g(n + 1);
    for (int k = 0; k <= n; ++k) g[k] = -2.0 * u[k] * du[k];
    RadialField w = cumulativeIntegral(g, dt, Parity::Odd);
    const double defect = w[n];
    for (int k = 0; k <= n; ++k) {
        double sigma = 0.5 * (1.0 - std::cos(kPi * k / n));
        w[k] -= defect * sigma;
    }

    RadialField kSph(n + 1);
    for (int k = 1; k < n; ++k) kSph[k] = w[k] / (m.f[k] * m.f[k]);
    kSph[0] = kRad[0];
    kSph[n] = kRad[n];

    GeometryCache c;
    c.s.resize(n + 1);
    c.phi.resize(n + 1);
    c.r.rad.resize(n + 1);
    c.r.sph.resize(n + 1);
    c.z.rad.resize(n + 1);
    c.z.sph.resize(n + 1);
    c.rmNormSq.resize(n + 1);
    c.volumeDensity.resize(n + 1);
    for (int k = 0; k <= n; ++k) {
        const double kr = kRad[k], ks = kSph[k];
        const double phi = ks - kr;
        c.phi[k] = phi;
        c.s[k] = 6.0 * (kr + ks);
        c.r.rad[k] = 3.0 * kr;
        c.r.sph[k] = kr + 2.0 * ks;
        c.z.rad[k] = -1.5 * phi;
        c.z.sph[k] = 0.5 * phi;
        c.rmNormSq[k] = 6.0 * phi * phi + c.s[k] * c.s[k] / 6.0;
        c.volumeDensity[k] = kOmega3 * m.a[k] * m.f[k] * m.f[k] * m.f[k];
        if (!std::isfinite(c.s[k]) || !std::isfinite(c.rmNormSq[k]))
            throw std::runtime_error("computeGeometry: non-finite curvature");
    }
    return c;
}

/// Scalar Laplacian of an even radial field,
/// Delta u = u''/a^2 + (3 f'/f - a'/a) u'/a^2, pole value 4 u''/a^2.
inline RadialField laplacianScalar(const WarpedMetric& m, const RadialField& v) {
    const int n = m.segments();
    const double dt = m.spacing();
    requireEvenAtPoles(v, dt, m.L, "laplacianScalar");

    RadialField dv = deriv(v, dt, Parity::Even);
    RadialField d2v = deriv2(v, dt, Parity::Even);
    RadialField df = deriv(m.f, dt, Parity::Odd);
    RadialField da = deriv(m.a, dt, Parity::Even);

    RadialField out(n + 1);
    for (int k = 1; k < n; ++k) {
        const double a2 = m.a[k] * m.a[k];
        out[k] = d2v[k] / a2 +
                 (3.0 * df[k] / m.f[k] - da[k] / m.a[k]) * dv[k] / a2;
    }
    out[0] = 4.0 * d2v[0] / (m.a[0] * m.a[0]);
    out[n] = 4.0 * d2v[n] / (m.a[n] * m.a[n]);
    return out;
}

/// Hessian of an even radial field as an invariant 2-tensor:
/// rad = (1/a)(u'/a)', sph = (f'/(a^2 f)) u'; they agree at the poles.
inline InvariantSym2Field hessianScalar(const WarpedMetric& m, const RadialField& v) {
    const int n = m.segments();
    const double dt = m.spacing();
    requireEvenAtPoles(v, dt, m.L, "hessianScalar");

    RadialField dv = deriv(v, dt, Parity::Even);
    RadialField df = deriv(m.f, dt, Parity::Odd);

    RadialField vn(n + 1);  // u'/a, odd
    for (int k = 0; k <= n; ++k) vn[k] = dv[k] / m.a[k];
    RadialField dvn = deriv(vn, dt, Parity::Odd);

    InvariantSym2Field h;
    h.rad.resize(n + 1);
    h.sph.resize(n + 1);
    for (int k = 0; k <= n; ++k) h.rad[k] = dvn[k] / m.a[k];
    for (int k = 1; k < n; ++k)
        h.sph[k] = df[k] / (m.a[k] * m.a[k] * m.f[k]) * dv[k];
    h.sph[0] = h.rad[0];
    h.sph[n] = h.rad[n];
    return h;
}

/// Rough Laplacian of an invariant symmetric 2-tensor.  With
/// lambda = f'/(a f) (the principal curvature of the orbits),
///   (Delta T)_rad = Delta p - 6 lambda^2 (p - q),
///   (Delta T)_sph = Delta q + 2 lambda^2 (p - q),
/// where Delta is the scalar Laplacian on the frame components.  The
/// coupling term's pole limit is (p - q)''(0) / (2 a^2).
inline InvariantSym2Field roughLaplacianSym2(const WarpedMetric& m,
                                             const InvariantSym2Field& t) {
    const int n = m.segments();
    const double dt = m.spacing();
    requireEvenAtPoles(t.rad, dt, m.L, "roughLaplacianSym2");
    requireEvenAtPoles(t.sph, dt, m.L, "roughLaplacianSym2");

    RadialField lapP = laplacianScalar(m, t.rad);
    RadialField lapQ = laplacianScalar(m, t.sph);
    RadialField df = deriv(m.f, dt, Parity::Odd);

    RadialField diff(n + 1);
    for (int k = 0; k <= n; ++k) diff[k] = t.rad[k] - t.sph[k];
    RadialField d2diff = deriv2(diff, dt, Parity::Even);

    RadialField psi(n + 1);  // lambda^2 (p - q)
    for (int k = 1; k < n; ++k) {
        const double lam = df[k] / (m.a[k] * m.f[k]);
        psi[k] = lam * lam * diff[k];
    }
    psi[0] = d2diff[0] / (2.0 * m.a[0] * m.a[0]);
    psi[n] = d2diff[n] / (2.0 * m.a[n] * m.a[n]);

    InvariantSym2Field out;
    out.rad.resize(n + 1);
    out.sph.resize(n + 1);
    for (int k = 0; k <= n; ++k) {
        out.rad[k] = lapP[k] - 6.0 * psi[k];
        out.sph[k] = lapQ[k] + 2.0 * psi[k];
    }
    return out;
}

/// Radial component of the divergence of an invariant 2-tensor,
/// (div T)_0 = p'/a + 3 lambda (p - q); the tangential components vanish
/// identically.  Odd across the poles, zero there.
inline RadialField divergenceSym2(const WarpedMetric& m, const InvariantSym2Field& t) {
    const int n = m.segments();
    const double dt = m.spacing();
    RadialField dp = deriv(t.rad, dt, Parity::Even);
    RadialField df = deriv(m.f, dt, Parity::Odd);
    RadialField out(n + 1);
    for (int k = 1; k < n; ++k) {
        const double lam = df[k] / (m.a[k] * m.f[k]);
        out[k] = dp[k] / m.a[k] + 3.0 * lam * (t.rad[k] - t.sph[k]);
    }
    out[0] = 0.0;
    out[n] = 0.0;
    return out;
}

/// Integral of an even radial scalar against the volume form,
/// omega_3 int u a f^3 dt.
inline double integrate(const WarpedMetric& m, const RadialField& v) {
    const int n = m.segments();
    RadialField g(n + 1);
    for (int k = 0; k <= n; ++k)
        g[k] = v[k] * kOmega3 * m.a[k] * m.f[k] * m.f[k] * m.f[k];
    return integralEM(g, m.spacing(), Parity::Odd);
}

/// L2 pairing of invariant 2-tensors, int (S_00 T_00 + 3 S_11 T_11) dV.
inline double innerL2(const WarpedMetric& m, const InvariantSym2Field& s,
                      const InvariantSym2Field& t) {
    RadialField g(s.rad.size());
    for (size_t k = 0; k < g.size(); ++k)
        g[k] = s.rad[k] * t.rad[k] + 3.0 * s.sph[k] * t.sph[k];
    return integrate(m, g);
}

inline double normSqL2(const WarpedMetric& m, const InvariantSym2Field& t) {
    return innerL2(m, t, t);
}

inline double normSqL2(const WarpedMetric& m, const RadialField& v) {
    RadialField g(v.size());
    for (size_t k = 0; k < v.size(); ++k) g[k] = v[k] * v[k];
    return integrate(m, g);
}

// --- snapshot persistence ---------------------------------------------

/// Plain-text snapshot: "N=", "L=", "tau=" headers then N+1 rows "t a f",
/// all floats at 17 significant digits (exact double round-trip).
inline void writeSnapshot(const std::string& path, const WarpedMetric& m, double tau) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("writeSnapshot: cannot open " + path);
    const int n = m.segments();
    char buf[128];
    std::snprintf(buf, sizeof buf, "N=%d\n", n);
    out << buf;
    std::snprintf(buf, sizeof buf, "L=%.17g\n", m.L);
    out << buf;
    std::snprintf(buf, sizeof buf, "tau=%.17g\n", tau);
    out << buf;
    for (int k = 0; k <= n; ++k) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", m.node(k), m.a[k], m.f[k]);
        out << buf;
    }
    if (!out) throw std::runtime_error("writeSnapshot: write failed for " + path);
}

struct Snapshot {
    WarpedMetric metric;
    double tau = 0.0;
};

inline Snapshot readSnapshot(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("readSnapshot: cannot open " + path);
    std::string line;
    auto headerValue = [&](const char* key) -> std::string {
        if (!std::getline(in, line) || line.rfind(key, 0) != 0)
            throw std::runtime_error("readSnapshot: malformed header in " + path);
        return line.substr(std::string(key).size());
    };
    Snapshot snap;
    const int n = std::stoi(headerValue("N="));
    snap.metric.L = std::stod(headerValue("L="));
    snap.tau = std::stod(headerValue("tau="));
    if (n < 16) throw std::runtime_error("readSnapshot: N out of range");
    snap.metric.a.resize(n + 1);
    snap.metric.f.resize(n + 1);
    for (int k = 0; k <= n; ++k) {
        if (!std::getline(in, line))
            throw std::runtime_error("readSnapshot: truncated file " + path);
        std::istringstream row(line);
        double t;
        if (!(row >> t >> snap.metric.a[k] >> snap.metric.f[k]))
            throw std::runtime_error("readSnapshot: malformed row in " + path);
    }
    validateMetric(snap.metric, "readSnapshot");
    return snap;
}

}  // namespace l2flow
