#include <catch2/catch_amalgamated.hpp>

#include "l2flow/curvature_algebra.hpp"

#include <cmath>

using namespace l2flow;

namespace {

/// Constant-curvature tensor R_{ijkl} = K (d_ik d_jl - d_il d_jk).
AlgCurvature roundTensor(double k = 1.0) {
    AlgCurvature r;
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j)
            for (int a = 0; a < kDim; ++a)
                for (int b = 0; b < kDim; ++b)
                    r(i, j, a, b) = k * ((i == a && j == b ? 1.0 : 0.0) -
                                         (i == b && j == a ? 1.0 : 0.0));
    return r;
}

}  // namespace

TEST_CASE("Kulkarni-Nomizu of the metric with itself") {
    const Sym2 g = Sym2::identity();
    AlgCurvature gg = kulkarniNomizu(g, g);

    CHECK(gg(1, 2, 1, 2) == 2.0);
    CHECK(gg(1, 2, 2, 1) == -2.0);
    CHECK(normSq(gg) == 96.0);
    CHECK(symmetryResidual(gg) == 0.0);

    // Half of g(x)g is the unit round tensor, so |Rm_round|^2 = 24 = s^2/6.
    AlgCurvature half = 0.5 * gg;
    AlgCurvature round = roundTensor();
    CHECK(maxAbs(half - round) == 0.0);
    CHECK(normSq(round) == 24.0);
}

TEST_CASE("Kulkarni-Nomizu is symmetric and curvature-like") {
    SplitMix64 rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        Sym2 h = randomSym2(rng);
        Sym2 k = randomSym2(rng);
        AlgCurvature hk = kulkarniNomizu(h, k);
        AlgCurvature kh = kulkarniNomizu(k, h);
        CHECK(maxAbs(hk - kh) <= 1e-14);
        CHECK(symmetryResidual(hk) <= 1e-14);
    }
}

TEST_CASE("decompose on the round tensor") {
    CurvatureDecomposition d = decompose(roundTensor());
    CHECK(d.s == Catch::Approx(12.0).margin(1e-12));
    CHECK(maxAbs(d.z) <= 1e-12);
    CHECK(maxAbs(d.w) <= 1e-12);
}

TEST_CASE("decompose of zero is zero") {
    CurvatureDecomposition d = decompose(AlgCurvature{});
    CHECK(d.s == 0.0);
    CHECK(maxAbs(d.z) == 0.0);
    CHECK(maxAbs(d.w) == 0.0);
}

TEST_CASE("decompose recovers a pure traceless-Ricci part") {
    SplitMix64 rng(7);
    const Sym2 g = Sym2::identity();
    for (int trial = 0; trial < 25; ++trial) {
        Sym2 z0 = randomTracelessSym2(rng);
        AlgCurvature r = 0.5 * kulkarniNomizu(z0, g);
        CurvatureDecomposition d = decompose(r);
        CHECK(std::abs(d.s) <= 1e-12);
        CHECK(maxAbs(d.z - z0) <= 1e-12);
        CHECK(maxAbs(d.w) <= 1e-12);
    }
}

TEST_CASE("decompose rejects tensors without curvature symmetries") {
    AlgCurvature bad = roundTensor();
    bad(0, 1, 2, 3) += 1e-6;
    CHECK_THROWS_AS(decompose(bad), std::invalid_argument);
}

TEST_CASE("reconstruct of the scalar part alone") {
    CurvatureDecomposition d;
    d.s = 12.0;
    AlgCurvature r = reconstruct(d);
    CHECK(r(1, 2, 1, 2) == Catch::Approx(1.0).margin(1e-15));
    CHECK(r(1, 2, 2, 1) == Catch::Approx(-1.0).margin(1e-15));

    CurvatureDecomposition zero;
    CHECK(maxAbs(reconstruct(zero)) == 0.0);
}

TEST_CASE("reconstruct rejects non-traceless z") {
    CurvatureDecomposition d;
    d.s = 1.0;
    d.z = Sym2::identity();
    CHECK_THROWS_AS(reconstruct(d), std::invalid_argument);
}

TEST_CASE("decompose/reconstruct round-trip on random tensors") {
    SplitMix64 rng(11);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        AlgCurvature r = randomCurvature(rng);
        AlgCurvature back = reconstruct(decompose(r));
        worst = std::max(worst, maxAbs(back - r));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("irreducible parts are L2-orthogonal") {
    SplitMix64 rng(13);
    const Sym2 g = Sym2::identity();
    const AlgCurvature gg = kulkarniNomizu(g, g);
    for (int trial = 0; trial < 50; ++trial) {
        CurvatureDecomposition d = decompose(randomCurvature(rng));
        AlgCurvature zg = 0.5 * kulkarniNomizu(d.z, g);
        CHECK(std::abs(inner(d.w, zg)) <= 1e-12 * (1.0 + normSq(d.w)));
        CHECK(std::abs(inner(d.w, gg)) <= 1e-12 * (1.0 + normSq(d.w)));
        CHECK(std::abs(inner(zg, gg)) <= 1e-12 * (1.0 + normSq(zg)));
    }
}

TEST_CASE("decompose is scale covariant") {
    SplitMix64 rng(17);
    for (double lambda : {0.25, -3.0, 17.5}) {
        AlgCurvature r = randomCurvature(rng);
        CurvatureDecomposition d = decompose(r);
        CurvatureDecomposition ds = decompose(lambda * r);
        CHECK(std::abs(ds.s - lambda * d.s) <= 1e-11 * (1.0 + std::abs(d.s)));
        CHECK(maxAbs(ds.z - lambda * d.z) <= 1e-11 * (1.0 + maxAbs(d.z)));
        CHECK(maxAbs(ds.w - lambda * d.w) <= 1e-11 * (1.0 + maxAbs(d.w)));
    }
}

TEST_CASE("checkContraction on the round tensor gives 6g") {
    Sym2 c = checkContraction(roundTensor());
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j)
            CHECK(c(i, j) == Catch::Approx(i == j ? 6.0 : 0.0).margin(1e-13));

    CHECK(maxAbs(checkContraction(AlgCurvature{})) == 0.0);
}

TEST_CASE("trace of checkContraction equals the full norm") {
    SplitMix64 rng(19);
    for (int trial = 0; trial < 100; ++trial) {
        AlgCurvature r = randomCurvature(rng);
        double lhs = checkContraction(r).trace();
        double rhs = normSq(r);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + rhs));
    }
}

TEST_CASE("algebraic residuals vanish on special tensors") {
    AlgebraicResiduals zero = algebraicResiduals(AlgCurvature{});
    CHECK(zero.maxAbs() == 0.0);

    AlgebraicResiduals round = algebraicResiduals(roundTensor());
    CHECK(round.maxAbs() <= 1e-12);
}

TEST_CASE("algebraic residuals vanish on 1000 random tensors") {
    SplitMix64 rng(23);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        AlgCurvature r = randomCurvature(rng);
        worst = std::max(worst, algebraicResiduals(r).maxAbs());
    }
    CHECK(worst <= 1e-11);
}

TEST_CASE("gradFAlgebraic is traceless and matches the contraction route") {
    SplitMix64 rng(29);

    CurvatureDecomposition flat;
    flat.s = 3.7;  // z = 0, W = 0: only the (s/3) z term could survive
    CHECK(maxAbs(gradFAlgebraic(flat)) == 0.0);

    const Sym2 g = Sym2::identity();
    for (int trial = 0; trial < 100; ++trial) {
        CurvatureDecomposition d = decompose(randomCurvature(rng));
        Sym2 e = gradFAlgebraic(d);
        CHECK(std::abs(e.trace()) <= 1e-12 * (1.0 + maxAbs(e)));

        // Same quantity assembled from 2 r o r - 2 R o r - (s/3) z - 2 W o z.
        AlgCurvature r = reconstruct(d);
        Sym2 ric = ricci(r);
        Sym2 route = 2.0 * compose(ric, ric) - 2.0 * curvatureAction(r, ric)
                   - (d.s / 3.0) * d.z - 2.0 * curvatureAction(d.w, d.z);
        CHECK(maxAbs(e - route) <= 1e-11 * (1.0 + maxAbs(e)));
        (void)g;
    }
}
