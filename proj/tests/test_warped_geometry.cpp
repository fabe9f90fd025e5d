#include <catch2/catch_amalgamated.hpp>

#include "l2flow/warped_metric.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>

using namespace l2flow;

namespace {

double supAbs(const RadialField& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double supDiff(const RadialField& v, const RadialField& w) {
    double m = 0.0;
    for (size_t k = 0; k < v.size(); ++k) m = std::max(m, std::abs(v[k] - w[k]));
    return m;
}

RadialField sampled(const WarpedMetric& m, double (*fn)(double)) {
    RadialField v(m.segments() + 1);
    for (int k = 0; k <= m.segments(); ++k) v[k] = fn(m.node(k));
    return v;
}

/// Scaled round sphere of radius rho on [0, rho pi].
WarpedMetric scaledRound(int n, double rho) {
    WarpedMetric m;
    m.L = rho * kPi;
    m.a.assign(n + 1, 1.0);
    m.f.resize(n + 1);
    for (int k = 0; k <= n; ++k) m.f[k] = rho * std::sin(kPi * k / n);
    m.f[0] = m.f[n] = 0.0;
    return m;
}

}  // namespace

TEST_CASE("round metric construction") {
    CHECK_THROWS_AS(buildRoundMetric(12), std::invalid_argument);
    CHECK_THROWS_AS(buildRoundMetric(17), std::invalid_argument);

    WarpedMetric m = buildRoundMetric(64);
    CHECK(m.a[10] == 1.0);
    CHECK(m.f[32] == Catch::Approx(1.0).margin(1e-15));
    CHECK(m.f[0] == 0.0);
    CHECK(m.f[64] == 0.0);
    validateMetric(m, "test");
}

TEST_CASE("round-sphere curvature values") {
    WarpedMetric m = buildRoundMetric(96);
    GeometryCache c = computeGeometry(m);

    RadialField twelve(m.segments() + 1, 12.0);
    CHECK(supDiff(c.s, twelve) <= 1e-8);
    CHECK(supAbs(c.phi) <= 1e-8);
    CHECK(supAbs(c.z.rad) <= 1e-8);

    double vol = integrate(m, RadialField(m.segments() + 1, 1.0));
    CHECK(vol == Catch::Approx(8.0 * kPi * kPi / 3.0).epsilon(1e-10));

    double sInt = integrate(m, c.s);
    CHECK(sInt == Catch::Approx(32.0 * kPi * kPi).epsilon(1e-8));

    for (double x : c.rmNormSq) CHECK(x == Catch::Approx(24.0).margin(1e-7));
}

TEST_CASE("scaled round sphere has s = 12 / rho^2") {
    const double rho = 3.0;
    WarpedMetric m = scaledRound(96, rho);
    GeometryCache c = computeGeometry(m);
    for (double x : c.s) CHECK(x == Catch::Approx(12.0 / (rho * rho)).margin(1e-9));
}

TEST_CASE("curvature error decreases at high order under refinement") {
    auto sError = [](int n) {
        WarpedMetric m = buildRoundMetric(n);
        GeometryCache c = computeGeometry(m);
        double worst = 0.0;
        for (double x : c.s) worst = std::max(worst, std::abs(x - 12.0));
        return worst;
    };
    double e48 = sError(48), e96 = sError(96);
    CHECK(e96 <= e48 / 3.5);  // expect ~2^6 with the 7-point stencils
}

TEST_CASE("computeGeometry keeps z exactly traceless and rmNormSq consistent") {
    WarpedMetric m = perturbMetric(buildRoundMetric(64), 3, 0.12);
    GeometryCache c = computeGeometry(m);
    for (int k = 0; k <= m.segments(); ++k) {
        CHECK(std::abs(c.z.rad[k] + 3.0 * c.z.sph[k]) <= 1e-13 * (1.0 + std::abs(c.z.rad[k])));
        double zz = c.z.rad[k] * c.z.rad[k] + 3.0 * c.z.sph[k] * c.z.sph[k];
        CHECK(c.rmNormSq[k] == Catch::Approx(2.0 * zz + c.s[k] * c.s[k] / 6.0).margin(1e-12));
        CHECK(c.s[k] == Catch::Approx(c.r.rad[k] + 3.0 * c.r.sph[k]).margin(1e-13));
    }
    CHECK(c.z.rad[0] == 0.0);
    CHECK(c.z.rad[m.segments()] == 0.0);
}

TEST_CASE("perturbMetric contracts") {
    WarpedMetric m = buildRoundMetric(64);

    WarpedMetric same = perturbMetric(m, 2, 0.0);
    CHECK(supDiff(same.f, m.f) == 0.0);

    CHECK_THROWS_AS(perturbMetric(m, 2, 0.6), std::invalid_argument);

    WarpedMetric p = perturbMetric(m, 2, 0.05);
    validateMetric(p, "test");  // pole regularity holds
    GeometryCache c = computeGeometry(p);
    RadialField z2(p.segments() + 1);
    for (int k = 0; k <= p.segments(); ++k) z2[k] = 3.0 * c.phi[k] * c.phi[k];
    CHECK(integrate(p, z2) > 1e-4);
}

TEST_CASE("scalar Laplacian") {
    WarpedMetric m = buildRoundMetric(96);

    RadialField c5(m.segments() + 1, 5.0);
    CHECK(supAbs(laplacianScalar(m, c5)) <= 1e-10);

    // First spherical harmonic on S^4: Delta cos t = -4 cos t.
    RadialField u = sampled(m, [](double t) { return std::cos(t); });
    RadialField lap = laplacianScalar(m, u);
    double worst = 0.0;
    for (int k = 0; k <= m.segments(); ++k)
        worst = std::max(worst, std::abs(lap[k] + 4.0 * u[k]));
    CHECK(worst <= 1e-8);

    // Linearity to rounding.
    RadialField v = sampled(m, [](double t) { return std::cos(2.0 * t) + 0.3; });
    RadialField sum(u.size());
    for (size_t k = 0; k < u.size(); ++k) sum[k] = 2.0 * u[k] - 0.7 * v[k];
    RadialField lhs = laplacianScalar(m, sum);
    RadialField lv = laplacianScalar(m, v);
    double lin = 0.0, scale = 0.0;
    for (size_t k = 0; k < u.size(); ++k) {
        lin = std::max(lin, std::abs(lhs[k] - (2.0 * lap[k] - 0.7 * lv[k])));
        scale = std::max(scale, std::abs(lhs[k]));
    }
    CHECK(lin <= 1e-12 * (1.0 + scale));

    // Gross parity violation is rejected.
    RadialField odd = sampled(m, [](double t) { return std::sin(t); });
    CHECK_THROWS_AS(laplacianScalar(m, odd), std::invalid_argument);
}

TEST_CASE("Hessian of a radial function") {
    WarpedMetric m = buildRoundMetric(96);

    RadialField c2(m.segments() + 1, 2.0);
    InvariantSym2Field h0 = hessianScalar(m, c2);
    CHECK(supAbs(h0.rad) <= 1e-10);
    CHECK(supAbs(h0.sph) <= 1e-10);

    // On the unit round sphere, hess(cos t) = -(cos t) g.
    RadialField u = sampled(m, [](double t) { return std::cos(t); });
    InvariantSym2Field h = hessianScalar(m, u);
    double worst = 0.0;
    for (int k = 0; k <= m.segments(); ++k) {
        worst = std::max(worst, std::abs(h.rad[k] + u[k]));
        worst = std::max(worst, std::abs(h.sph[k] + u[k]));
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("Hessian trace matches the Laplacian at stencil accuracy") {
    auto traceError = [](int n) {
        WarpedMetric m = perturbMetric(buildRoundMetric(n), 2, 0.1);
        RadialField u(n + 1);
        for (int k = 0; k <= n; ++k) u[k] = std::cos(2.0 * m.node(k)) + 0.5 * std::cos(m.node(k));
        InvariantSym2Field h = hessianScalar(m, u);
        RadialField lap = laplacianScalar(m, u);
        double worst = 0.0;
        for (int k = 0; k <= n; ++k)
            worst = std::max(worst, std::abs(h.rad[k] + 3.0 * h.sph[k] - lap[k]));
        return worst;
    };
    double e64 = traceError(64), e128 = traceError(128);
    CHECK(e64 <= 1e-4);
    CHECK(e128 <= std::max(e64 / 3.5, 1e-12));
}

TEST_CASE("rough Laplacian of invariant tensors") {
    WarpedMetric m = perturbMetric(buildRoundMetric(96), 2, 0.08);
    const int n = m.segments();

    // The metric itself is parallel.
    InvariantSym2Field g{RadialField(n + 1, 1.0), RadialField(n + 1, 1.0)};
    InvariantSym2Field lg = roughLaplacianSym2(m, g);
    CHECK(supAbs(lg.rad) <= 1e-10);
    CHECK(supAbs(lg.sph) <= 1e-10);

    // T = u g has rough Laplacian (Delta u) g.
    RadialField u(n + 1);
    for (int k = 0; k <= n; ++k) u[k] = std::cos(2.0 * m.node(k)) + 2.0;
    InvariantSym2Field ug{u, u};
    InvariantSym2Field lug = roughLaplacianSym2(m, ug);
    RadialField lap = laplacianScalar(m, u);
    CHECK(supDiff(lug.rad, lap) <= 1e-11);
    CHECK(supDiff(lug.sph, lap) <= 1e-11);

    // Trace commutes with the rough Laplacian.
    InvariantSym2Field t;
    t.rad.resize(n + 1);
    t.sph.resize(n + 1);
    for (int k = 0; k <= n; ++k) {
        double x = m.node(k);
        double common = 0.4 * std::cos(x);
        t.rad[k] = common + 0.2 * (1.0 - std::cos(2.0 * kPi * x / m.L));
        t.sph[k] = common;
    }
    InvariantSym2Field lt = roughLaplacianSym2(m, t);
    RadialField lhs = lt.trace();
    RadialField rhs = laplacianScalar(m, t.trace());
    CHECK(supDiff(lhs, rhs) <= 1e-9);
}

TEST_CASE("integrate is linear and exact for the volume") {
    WarpedMetric m = buildRoundMetric(128);
    RadialField one(m.segments() + 1, 1.0);
    RadialField u = sampled(m, [](double t) { return std::cos(2.0 * t) + 1.5; });

    double vol = integrate(m, one);
    CHECK(vol == Catch::Approx(8.0 * kPi * kPi / 3.0).epsilon(1e-10));

    RadialField combo(u.size());
    for (size_t k = 0; k < u.size(); ++k) combo[k] = 2.5 * one[k] + 1.25 * u[k];
    CHECK(integrate(m, combo) ==
          Catch::Approx(2.5 * vol + 1.25 * integrate(m, u)).margin(1e-12 * vol));
}

TEST_CASE("operators preserve pole parity") {
    WarpedMetric m = perturbMetric(buildRoundMetric(64), 2, 0.1);
    const int n = m.segments();
    RadialField u(n + 1);
    for (int k = 0; k <= n; ++k) u[k] = std::cos(2.0 * m.node(k)) + 0.1 * std::cos(m.node(k));

    // One-sided derivative of outputs at the poles must vanish at O(dt^2).
    auto poleSlope = [&](const RadialField& v) {
        double dt = m.spacing();
        double left = std::abs(-1.5 * v[0] + 2.0 * v[1] - 0.5 * v[2]) / dt;
        double right = std::abs(1.5 * v[n] - 2.0 * v[n - 1] + 0.5 * v[n - 2]) / dt;
        return std::max(left, right);
    };
    RadialField lap = laplacianScalar(m, u);
    InvariantSym2Field h = hessianScalar(m, u);
    CHECK(poleSlope(lap) <= 0.05 * (1.0 + supAbs(lap)));
    CHECK(poleSlope(h.rad) <= 0.05 * (1.0 + supAbs(h.rad)));
    CHECK(poleSlope(h.sph) <= 0.05 * (1.0 + supAbs(h.sph)));

    // Invariant-tensor outputs agree across components at poles.
    CHECK(h.rad[0] == h.sph[0]);
    CHECK(h.rad[n] == h.sph[n]);
}

TEST_CASE("snapshot round-trips to the exact doubles") {
    namespace fs = std::filesystem;
    WarpedMetric m = perturbMetric(buildRoundMetric(48), 3, 0.07);
    fs::path p = fs::temp_directory_path() / "l2flow_snapshot_test.txt";
    writeSnapshot(p.string(), m, 0.625);

    Snapshot s = readSnapshot(p.string());
    CHECK(s.tau == 0.625);
    CHECK(s.metric.L == m.L);
    for (int k = 0; k <= m.segments(); ++k) {
        CHECK(s.metric.a[k] == m.a[k]);
        CHECK(s.metric.f[k] == m.f[k]);
    }
    fs::remove(p);
}

TEST_CASE("snapshot reader rejects malformed files") {
    namespace fs = std::filesystem;
    fs::path p = fs::temp_directory_path() / "l2flow_snapshot_bad.txt";
    {
        std::ofstream out(p);
        out << "N=48\nL=oops\n";
    }
    CHECK_THROWS(readSnapshot(p.string()));
    fs::remove(p);
}
