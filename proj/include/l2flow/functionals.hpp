#pragma once

// Scalar functionals of the warped metric: total curvature energy, the
// Gauss-Bonnet integrand, sigma_2, the Yamabe quotient and a descent
// estimate of the Yamabe constant, the Sobolev-constant hypothesis check,
// the coercivity monitor, and the multiplicative Sobolev inequality.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "l2flow/curvature_algebra.hpp"  // SplitMix64
#include "l2flow/gradient_assembly.hpp"
#include "l2flow/warped_metric.hpp"

namespace l2flow {

/// Euler characteristic by the Gauss-Bonnet integral,
/// (1/8 pi^2) int (s^2/24 + |W|^2 - |z|^2/2) dV, with |W|^2 = 0 here.
inline double gaussBonnetChi(const WarpedMetric& m, const GeometryCache& c) {
    RadialField g(c.s.size());
    for (size_t k = 0; k < g.size(); ++k) {
        const double zSq = 3.0 * c.phi[k] * c.phi[k];
        g[k] = c.s[k] * c.s[k] / 24.0 - 0.5 * zSq;
    }
    return integrate(m, g) / (8.0 * kPi * kPi);
}

inline double gaussBonnetChi(const WarpedMetric& m) {
    return gaussBonnetChi(m, computeGeometry(m));
}

/// sigma_2 = (1/8 pi^2) int (s^2/24 - |z|^2/2) dV; conformally invariant,
/// and equal to chi on this ansatz since the Weyl term vanishes.
inline double sigma2(const WarpedMetric& m) {
    return gaussBonnetChi(m);
}

/// int |Rm - (s/24) g(x)g|^2 dV = int (|W|^2 + 2|z|^2) dV.
inline double concircularNormSqL2(const WarpedMetric& m, const GeometryCache& c) {
    RadialField g(c.phi.size());
    for (size_t k = 0; k < g.size(); ++k) g[k] = 6.0 * c.phi[k] * c.phi[k];
    return integrate(m, g);
}

/// Yamabe test-function quotient
/// int (6 |grad u|^2 + s u^2) dV / (int u^4 dV)^{1/2}.
inline double yamabeQuotient(const WarpedMetric& m, const RadialField& u) {
    const GeometryCache c = computeGeometry(m);
    const int n = m.segments();
    const double dt = m.spacing();
    requireEvenAtPoles(u, dt, m.L, "yamabeQuotient");

    RadialField du = deriv(u, dt, Parity::Even);
    RadialField num(n + 1), den(n + 1);
    for (int k = 0; k <= n; ++k) {
        const double g = du[k] / m.a[k];
        num[k] = 6.0 * g * g + c.s[k] * u[k] * u[k];
        den[k] = u[k] * u[k] * u[k] * u[k];
    }
    const double denI = integrate(m, den);
    if (!(denI > 1e-300))
        throw std::invalid_argument("yamabeQuotient: test function vanishes");
    return integrate(m, num) / std::sqrt(denI);
}

/// Smooth random even field sum_j c_j cos(j pi t / L).
inline RadialField randomEvenField(SplitMix64& rng, int n, int modes = 4,
                                   double amplitude = 1.0) {
    std::vector<double> coeff(modes + 1);
    for (int j = 0; j <= modes; ++j)
        coeff[j] = amplitude * rng.symmetric() / ((1.0 + j) * (1.0 + j));
    RadialField u(n + 1);
    for (int k = 0; k <= n; ++k) {
        double t = kPi * k / n;  // normalized coordinate angle
        double v = 0.0;
        for (int j = 0; j <= modes; ++j) v += coeff[j] * std::cos(j * t);
        u[k] = v;
    }
    return u;
}

/// Positive variant, exp of a small random even field.
inline RadialField randomPositiveEvenField(SplitMix64& rng, int n, int modes = 4,
                                           double amplitude = 0.3) {
    RadialField u = randomEvenField(rng, n, modes, amplitude);
    for (double& x : u) x = std::exp(x);
    return u;
}

struct YamabeEstimate {
    double value = 0.0;
    bool converged = false;
};

/// Descent estimate of the Yamabe constant over radial conformal factors.
/// Projected gradient descent on the quotient with L4 renormalisation per
/// iterate; the base step is backtracked until the quotient decreases, so
/// every accepted move lowers the quotient.  Runs from u = 1 plus random
/// positive restarts and returns the best value seen.
inline YamabeEstimate estimateYamabe(const WarpedMetric& m, unsigned seed = 1,
                                     int restarts = 5, int maxIter = 10000,
                                     double baseStep = 1e-2) {
    const GeometryCache c = computeGeometry(m);
    const int n = m.segments();
    const double dt = m.spacing();

    RadialField volw(n + 1);
    for (int k = 0; k <= n; ++k)
        volw[k] = kOmega3 * m.a[k] * m.f[k] * m.f[k] * m.f[k];

    auto l4Normalize = [&](RadialField& u) {
        RadialField g(n + 1);
        for (int k = 0; k <= n; ++k) g[k] = u[k] * u[k] * u[k] * u[k] * volw[k];
        double b = integralEM(g, dt, Parity::Odd);
        double scale = std::pow(b, -0.25);
        for (double& x : u) x *= scale;
    };
    auto quotient = [&](const RadialField& u) {
        RadialField du = deriv(u, dt, Parity::Even);
        RadialField num(n + 1), den(n + 1);
        for (int k = 0; k <= n; ++k) {
            double g = du[k] / m.a[k];
            num[k] = (6.0 * g * g + c.s[k] * u[k] * u[k]) * volw[k];
            den[k] = u[k] * u[k] * u[k] * u[k] * volw[k];
        }
        return integralEM(num, dt, Parity::Odd) /
               std::sqrt(integralEM(den, dt, Parity::Odd));
    };

    YamabeEstimate best;
    best.value = std::numeric_limits<double>::infinity();

    SplitMix64 rng(seed);
    for (int run = 0; run <= restarts; ++run) {
        RadialField u(n + 1, 1.0);
        if (run > 0) u = randomPositiveEvenField(rng, n);
        l4Normalize(u);
        double q = quotient(u);

        int stall = 0;
        for (int iter = 0; iter < maxIter && stall < 25; ++iter) {
            // Euler-Lagrange direction of the quotient at unit L4 norm.
            RadialField lap = laplacianScalar(m, u);
            RadialField g(n + 1);
            for (int k = 0; k <= n; ++k)
                g[k] = 2.0 * (-6.0 * lap[k] + c.s[k] * u[k] - q * u[k] * u[k] * u[k]);
            double gmax = 0.0;
            for (double x : g) gmax = std::max(gmax, std::abs(x));
            if (gmax < 1e-14) {
                stall = 25;
                break;
            }

            double step = baseStep;
            bool moved = false;
            for (int bt = 0; bt < 30; ++bt) {
                RadialField trial = u;
                for (int k = 0; k <= n; ++k) trial[k] -= step * g[k] / gmax;
                l4Normalize(trial);
                double qt = quotient(trial);
                if (qt < q) {
                    if (q - qt < 1e-12 * (1.0 + std::abs(q)))
                        ++stall;
                    else
                        stall = 0;
                    u = std::move(trial);
                    q = qt;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if (!moved) ++stall;
        }
        best.value = std::min(best.value, q);
        best.converged = best.converged || stall >= 25;
    }
    return best;
}

struct SobolevCheck {
    bool applies = false;
    double certifiedBound = 0.0;      // 768 pi^2 when the hypothesis holds
    double empiricalLowerBound = 0.0; // max test-function Sobolev quotient
};

/// Hypothesis check for the a-priori Sobolev bound: small concircular
/// energy relative to chi together with a positive Yamabe estimate.  Also
/// probes the Sobolev quotient ||u||_{L4}^2 / (||grad u||^2 + V^{-1/2}
/// ||u||^2) on random test functions; the certified bound must dominate
/// every probe.
inline SobolevCheck sobolevHypothesisCheck(const WarpedMetric& m, double eps,
                                           unsigned seed = 7) {
    const GeometryCache c = computeGeometry(m);
    SobolevCheck out;
    const double ohat = concircularNormSqL2(m, c);
    const double chi = gaussBonnetChi(m, c);
    const double yamabe = estimateYamabe(m, seed).value;
    out.applies = (ohat <= eps * chi) && (yamabe > 0.0);
    out.certifiedBound = 768.0 * kPi * kPi;

    const int n = m.segments();
    const double dt = m.spacing();
    const double vol = integrate(m, RadialField(n + 1, 1.0));
    SplitMix64 rng(seed * 977u + 13u);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        RadialField u = randomEvenField(rng, n, 4, 1.0);
        u[n / 2] += 1e-3;  // keep it nonzero
        RadialField du = deriv(u, dt, Parity::Even);
        RadialField u2(n + 1), u4(n + 1), du2(n + 1);
        for (int k = 0; k <= n; ++k) {
            u2[k] = u[k] * u[k];
            u4[k] = u2[k] * u2[k];
            double g = du[k] / m.a[k];
            du2[k] = g * g;
        }
        double num = std::sqrt(integrate(m, u4));
        double den = integrate(m, du2) + integrate(m, u2) / std::sqrt(vol);
        if (den > 1e-300) worst = std::max(worst, num / den);
    }
    out.empiricalLowerBound = worst;
    return out;
}

struct CoercivityData {
    double gradNormSq = 0.0;   // ||grad F||^2
    double lapRicciSq = 0.0;   // ||Delta r||^2
    double zH1Sq = 0.0;        // ||z||^2 + ||grad z||^2
    double denominator() const { return lapRicciSq + zH1Sq; }
};

inline CoercivityData coercivityData(const WarpedMetric& m, const GeometryCache& c) {
    CoercivityData d;
    d.gradNormSq = normSqL2(m, assembleGradF(m, c));
    d.lapRicciSq = normSqL2(m, roughLaplacianSym2(m, c.r));
    RadialField gz = gradientNormSqSym2(m, c.z);
    d.zH1Sq = zNormSqL2(m, c) + integrate(m, gz);
    return d;
}

/// Empirical coercivity monitor
/// ||grad F||^2 / (||Delta r||^2 + ||z||^2 + ||grad z||^2).
/// Throws for metrics that are critical to machine precision.
inline double coercivityRatio(const WarpedMetric& m) {
    CoercivityData d = coercivityData(m, computeGeometry(m));
    if (d.denominator() <= 1e-14)
        throw std::domain_error("coercivityRatio: denominator degenerate (critical metric)");
    return d.gradNormSq / d.denominator();
}

/// Exponent of the multiplicative Sobolev inequality,
/// 1/alpha = (1/4 - 1/p) m + 1.
inline double sobolevAlpha(double m, double p) {
    if (!(p > 4.0)) throw std::invalid_argument("sobolevAlpha: requires p > 4");
    if (!(m >= 0.0)) throw std::invalid_argument("sobolevAlpha: requires m >= 0");
    return 1.0 / ((0.25 - 1.0 / p) * m + 1.0);
}

struct MultSobolevResult {
    double lhs = 0.0;        // sup |u|
    double rhsFactor = 0.0;  // ||u||_m^{1-a} (||grad u||_p + ||u||_p)^a
    double alpha = 0.0;
};

/// Evaluates both sides of the multiplicative Sobolev inequality on a
/// unit-volume metric.  The caller fits the constant over a function
/// family; this routine only reports the two factors.
inline MultSobolevResult multSobolevCheck(const WarpedMetric& m, const RadialField& u,
                                          double mExp, double p) {
    if (!(p > 4.0)) throw std::invalid_argument("multSobolevCheck: requires p > 4");
    if (!(mExp > 0.0)) throw std::invalid_argument("multSobolevCheck: requires m > 0");
    const int n = m.segments();
    const double vol = integrate(m, RadialField(n + 1, 1.0));
    if (std::abs(vol - 1.0) > 1e-6)
        throw std::invalid_argument("multSobolevCheck: metric must have unit volume");

    const double dt = m.spacing();
    RadialField du = deriv(u, dt, Parity::Even);
    auto lpNorm = [&](const RadialField& v, double q) {
        RadialField g(n + 1);
        for (int k = 0; k <= n; ++k) g[k] = std::pow(std::abs(v[k]), q);
        return std::pow(integrate(m, g), 1.0 / q);
    };

    RadialField gradMag(n + 1);
    for (int k = 0; k <= n; ++k) gradMag[k] = du[k] / m.a[k];

    MultSobolevResult r;
    r.alpha = sobolevAlpha(mExp, p);
    for (int k = 0; k <= n; ++k) r.lhs = std::max(r.lhs, std::abs(u[k]));
    r.rhsFactor = std::pow(lpNorm(u, mExp), 1.0 - r.alpha) *
                  std::pow(lpNorm(gradMag, p) + lpNorm(u, p), r.alpha);
    return r;
}

struct FunctionalReport {
    double F = 0.0;
    double chi = 0.0;
    double sigma2 = 0.0;
    double zNormSq = 0.0;
    double weylNormSq = 0.0;  // identically zero on the warped ansatz
    double yamabeEstimate = 0.0;
    bool sobolevBoundApplies = false;
};

inline FunctionalReport functionalReport(const WarpedMetric& m, unsigned seed = 1,
                                         double eps = 1.0 / 196.0) {
    GeometryCache c = computeGeometry(m);
    FunctionalReport r;
    r.F = integrate(m, c.rmNormSq);
    r.chi = gaussBonnetChi(m, c);
    r.sigma2 = r.chi;  // no Weyl contribution on this ansatz
    r.zNormSq = zNormSqL2(m, c);
    r.weylNormSq = 0.0;
    r.yamabeEstimate = estimateYamabe(m, seed).value;
    r.sobolevBoundApplies =
        (concircularNormSqL2(m, c) <= eps * r.chi) && (r.yamabeEstimate > 0.0);
    return r;
}

}  // namespace l2flow
