#pragma once

// Pointwise algebra of 4-dimensional curvature tensors in an orthonormal
// frame: irreducible decomposition into (scalar, traceless Ricci, Weyl),
// Kulkarni-Nomizu products, quadratic contractions, and the classical
// identities relating them.  Everything here is exact component arithmetic
// on 4x4(x4x4) arrays; no grid, no derivatives.
//
// Convention: the round unit sphere has R_{ijkl} = d_ik d_jl - d_il d_jk,
// i.e. R_{1212} = +1 and scalar curvature s = 12.  Contractions are
//   ric_ij = R_ipjp,   s = ric_ii,
//   (A o B)_ij = A_ipjq B_pq   for curvature-type A and symmetric B,
//   (a o b)_ij = a_ip b_pj     for a pair of symmetric 2-tensors.

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace l2flow {

inline constexpr int kDim = 4;

/// Symmetric 2-tensor in an orthonormal frame (4x4 components).
class Sym2 {
public:
    Sym2() : c_{} {}

    double& operator()(int i, int j) { return c_[i * kDim + j]; }
    double operator()(int i, int j) const { return c_[i * kDim + j]; }

    static Sym2 identity() {
        Sym2 g;
        for (int i = 0; i < kDim; ++i) g(i, i) = 1.0;
        return g;
    }

    double trace() const {
        return c_[0] + c_[5] + c_[10] + c_[15];
    }

    Sym2& operator+=(const Sym2& o) {
        for (int k = 0; k < 16; ++k) c_[k] += o.c_[k];
        return *this;
    }
    Sym2& operator-=(const Sym2& o) {
        for (int k = 0; k < 16; ++k) c_[k] -= o.c_[k];
        return *this;
    }
    Sym2& operator*=(double a) {
        for (int k = 0; k < 16; ++k) c_[k] *= a;
        return *this;
    }
    friend Sym2 operator+(Sym2 a, const Sym2& b) { return a += b; }
    friend Sym2 operator-(Sym2 a, const Sym2& b) { return a -= b; }
    friend Sym2 operator*(double a, Sym2 b) { return b *= a; }

private:
    std::array<double, 16> c_;
};

inline double inner(const Sym2& a, const Sym2& b) {
    double s = 0.0;
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) s += a(i, j) * b(i, j);
    return s;
}

inline double normSq(const Sym2& a) { return inner(a, a); }

inline double maxAbs(const Sym2& a) {
    double m = 0.0;
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) m = std::max(m, std::abs(a(i, j)));
    return m;
}

/// Composition of symmetric 2-tensors, (a o b)_ij = a_ip b_pj.
inline Sym2 compose(const Sym2& a, const Sym2& b) {
    Sym2 r;
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) {
            double s = 0.0;
            for (int p = 0; p < kDim; ++p) s += a(i, p) * b(p, j);
            r(i, j) = s;
        }
    return r;
}

/// Algebraic curvature tensor: rank 4, frame components R_{ijkl}.
/// Valid instances satisfy R_{ijkl} = -R_{jikl} = -R_{ijlk} = R_{klij}
/// and the first Bianchi identity.
class AlgCurvature {
public:
    AlgCurvature() : c_{} {}

    double& operator()(int i, int j, int k, int l) {
        return c_[((i * kDim + j) * kDim + k) * kDim + l];
    }
    double operator()(int i, int j, int k, int l) const {
        return c_[((i * kDim + j) * kDim + k) * kDim + l];
    }

    AlgCurvature& operator+=(const AlgCurvature& o) {
        for (int k = 0; k < 256; ++k) c_[k] += o.c_[k];
        return *this;
    }
    AlgCurvature& operator-=(const AlgCurvature& o) {
        for (int k = 0; k < 256; ++k) c_[k] -= o.c_[k];
        return *this;
    }
    AlgCurvature& operator*=(double a) {
        for (int k = 0; k < 256; ++k) c_[k] *= a;
        return *this;
    }
    friend AlgCurvature operator+(AlgCurvature a, const AlgCurvature& b) { return a += b; }
    friend AlgCurvature operator-(AlgCurvature a, const AlgCurvature& b) { return a -= b; }
    friend AlgCurvature operator*(double a, AlgCurvature b) { return b *= a; }

private:
    std::array<double, 256> c_;
};

inline double inner(const AlgCurvature& a, const AlgCurvature& b) {
    double s = 0.0;
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j)
            for (int k = 0; k < kDim; ++k)
                for (int l = 0; l < kDim; ++l) s += a(i, j, k, l) * b(i, j, k, l);
    return s;
}

inline double normSq(const AlgCurvature& a) { return inner(a, a); }

inline double maxAbs(const AlgCurvature& a) {
    double m = 0.0;
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j)
            for (int k = 0; k < kDim; ++k)
                for (int l = 0; l < kDim; ++l) m = std::max(m, std::abs(a(i, j, k, l)));
    return m;
}

/// Kulkarni-Nomizu product of two symmetric 2-tensors:
/// (h (x) k)_{ijkl} = h_ik k_jl + h_jl k_ik - h_il k_jk - h_jk k_il.
inline AlgCurvature kulkarniNomizu(const Sym2& h, const Sym2& k) {
    AlgCurvature r;
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j)
            for (int a = 0; a < kDim; ++a)
                for (int b = 0; b < kDim; ++b)
                    r(i, j, a, b) = h(i, a) * k(j, b) + h(j, b) * k(i, a)
                                  - h(i, b) * k(j, a) - h(j, a) * k(i, b);
    return r;
}

/// Ricci contraction ric_ij = R_ipjp.
inline Sym2 ricci(const AlgCurvature& r) {
    Sym2 out;
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) {
            double s = 0.0;
            for (int p = 0; p < kDim; ++p) s += r(i, p, j, p);
            out(i, j) = s;
        }
    return out;
}

/// Quadratic contraction on the first slot: out_ij = R_ipqr R_jpqr.
/// Its trace equals |R|^2.
inline Sym2 checkContraction(const AlgCurvature& r) {
    Sym2 out;
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) {
            double s = 0.0;
            for (int p = 0; p < kDim; ++p)
                for (int q = 0; q < kDim; ++q)
                    for (int t = 0; t < kDim; ++t) s += r(i, p, q, t) * r(j, p, q, t);
            out(i, j) = s;
        }
    return out;
}

/// Curvature acting on a symmetric 2-tensor, (R o b)_ij = R_ipjq b_pq.
inline Sym2 curvatureAction(const AlgCurvature& r, const Sym2& b) {
    Sym2 out;
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) {
            double s = 0.0;
            for (int p = 0; p < kDim; ++p)
                for (int q = 0; q < kDim; ++q) s += r(i, p, j, q) * b(p, q);
            out(i, j) = s;
        }
    return out;
}

/// Largest violation of the pair/antisymmetry and first-Bianchi relations.
inline double symmetryResidual(const AlgCurvature& r) {
    double m = 0.0;
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j)
            for (int k = 0; k < kDim; ++k)
                for (int l = 0; l < kDim; ++l) {
                    m = std::max(m, std::abs(r(i, j, k, l) + r(j, i, k, l)));
                    m = std::max(m, std::abs(r(i, j, k, l) + r(i, j, l, k)));
                    m = std::max(m, std::abs(r(i, j, k, l) - r(k, l, i, j)));
                    m = std::max(m, std::abs(r(i, j, k, l) + r(i, k, l, j) + r(i, l, j, k)));
                }
    return m;
}

/// The triple (s, z, W): scalar part, traceless Ricci, Weyl part.
struct CurvatureDecomposition {
    double s = 0.0;
    Sym2 z;
    AlgCurvature w;
};

/// Splits R into irreducible parts:
///   s = R_ipip,  z = ric - (s/4) g,  W = R - 1/2 z(x)g - (s/24) g(x)g.
/// Throws if the input violates the curvature symmetries beyond `tol`.
inline CurvatureDecomposition decompose(const AlgCurvature& r, double tol = 1e-10) {
    const double scale = 1.0 + maxAbs(r);
    if (symmetryResidual(r) > tol * scale)
        throw std::invalid_argument("decompose: input violates curvature symmetries");

    CurvatureDecomposition d;
    const Sym2 g = Sym2::identity();
    Sym2 ric = ricci(r);
    d.s = ric.trace();
    d.z = ric - (d.s / 4.0) * g;
    d.w = r - 0.5 * kulkarniNomizu(d.z, g) - (d.s / 24.0) * kulkarniNomizu(g, g);
    return d;
}

/// Rebuilds R = W + 1/2 z(x)g + (s/24) g(x)g.  Inverse of decompose.
inline AlgCurvature reconstruct(const CurvatureDecomposition& d) {
    const double zscale = 1.0 + maxAbs(d.z);
    if (std::abs(d.z.trace()) > 1e-10 * zscale)
        throw std::invalid_argument("reconstruct: z is not traceless");

    const Sym2 g = Sym2::identity();
    return d.w + 0.5 * kulkarniNomizu(d.z, g) + (d.s / 24.0) * kulkarniNomizu(g, g);
}

/// Zeroth-order part of the energy gradient:
///   (s/3) z + 4 z o z - |z|^2 g - 4 W o z.
/// Traceless for every valid decomposition.
inline Sym2 gradFAlgebraic(const CurvatureDecomposition& d) {
    const Sym2 g = Sym2::identity();
    Sym2 zz = compose(d.z, d.z);
    Sym2 wz = curvatureAction(d.w, d.z);
    return (d.s / 3.0) * d.z + 4.0 * zz - normSq(d.z) * g - 4.0 * wz;
}

/// Max-norm residuals of the quadratic curvature identities.  All vanish
/// on valid inputs; any nonzero residual means a contraction convention
/// is wrong somewhere.
struct AlgebraicResiduals {
    double checkMinusQuarterNorm;  // R^ - 1/4|Rm|^2 g = (s/3) z + 2 W o z
    double ricciSquare;            // 2 r o r = 2 z o z + s z + 1/8 s^2 g
    double curvatureRicci;         // -2 R o r = -2 W o z - |z|^2 g + 2 z o z - (s/3) z - 1/8 s^2 g
    double normSplit;              // |Rm|^2 = |W|^2 + 2|z|^2 + s^2/6
    double concircularNorm;        // |Rm - (s/24) g(x)g|^2 = |W|^2 + 2|z|^2

    double maxAbs() const {
        return std::max({checkMinusQuarterNorm, ricciSquare, curvatureRicci,
                         normSplit, concircularNorm});
    }
};

inline AlgebraicResiduals algebraicResiduals(const AlgCurvature& r) {
    const Sym2 g = Sym2::identity();
    CurvatureDecomposition d = decompose(r);
    const Sym2 ric = ricci(r);
    const double rmSq = normSq(r);
    const double zSq = normSq(d.z);
    const double wSq = normSq(d.w);
    const Sym2 wz = curvatureAction(d.w, d.z);

    AlgebraicResiduals out{};

    Sym2 besse = checkContraction(r) - 0.25 * rmSq * g
               - ((d.s / 3.0) * d.z + 2.0 * wz);
    out.checkMinusQuarterNorm = maxAbs(besse);

    Sym2 rr = 2.0 * compose(ric, ric)
            - (2.0 * compose(d.z, d.z) + d.s * d.z + (d.s * d.s / 8.0) * g);
    out.ricciSquare = maxAbs(rr);

    Sym2 cr = -2.0 * curvatureAction(r, ric)
            - (-2.0 * wz - zSq * g + 2.0 * compose(d.z, d.z)
               - (d.s / 3.0) * d.z - (d.s * d.s / 8.0) * g);
    out.curvatureRicci = maxAbs(cr);

    out.normSplit = std::abs(rmSq - (wSq + 2.0 * zSq + d.s * d.s / 6.0));

    AlgCurvature concircular = r - (d.s / 24.0) * kulkarniNomizu(g, g);
    out.concircularNorm = std::abs(normSq(concircular) - (wSq + 2.0 * zSq));

    return out;
}

// ---------------------------------------------------------------------------
// Random generators for property tests.  Deterministic given the state of
// the caller-owned engine; uniform doubles are derived from the raw 64-bit
// stream so results do not depend on library distribution internals.

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [-1, 1).
    double symmetric() {
        return 2.0 * (double(next() >> 11) * 0x1.0p-53) - 1.0;
    }

    /// Uniform in [0, 1).
    double unit() { return double(next() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

inline Sym2 randomSym2(SplitMix64& rng, double scale = 1.0) {
    Sym2 a;
    for (int i = 0; i < kDim; ++i)
        for (int j = i; j < kDim; ++j) {
            double v = scale * rng.symmetric();
            a(i, j) = v;
            a(j, i) = v;
        }
    return a;
}

inline Sym2 randomTracelessSym2(SplitMix64& rng, double scale = 1.0) {
    Sym2 a = randomSym2(rng, scale);
    const double t = a.trace() / 4.0;
    for (int i = 0; i < kDim; ++i) a(i, i) -= t;
    return a;
}

/// Random algebraic curvature tensor with all three irreducible parts
/// well represented: draws s and a traceless z directly, and a Weyl part
/// by symmetrising a random array into a pair-symmetric Bianchi tensor
/// and projecting out its Weyl component.
inline AlgCurvature randomCurvature(SplitMix64& rng, double scale = 1.0) {
    AlgCurvature raw;
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j)
            for (int k = 0; k < kDim; ++k)
                for (int l = 0; l < kDim; ++l) raw(i, j, k, l) = rng.symmetric();

    // Antisymmetrise both index pairs, symmetrise the pair swap.
    AlgCurvature sym;
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j)
            for (int k = 0; k < kDim; ++k)
                for (int l = 0; l < kDim; ++l) {
                    double v = raw(i, j, k, l) - raw(j, i, k, l)
                             - raw(i, j, l, k) + raw(j, i, l, k);
                    v += raw(k, l, i, j) - raw(l, k, i, j)
                       - raw(k, l, j, i) + raw(l, k, j, i);
                    sym(i, j, k, l) = v / 8.0;
                }

    // Remove the totally antisymmetric component; what is left satisfies
    // the first Bianchi identity.
    AlgCurvature b;
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j)
            for (int k = 0; k < kDim; ++k)
                for (int l = 0; l < kDim; ++l)
                    b(i, j, k, l) = (sym(i, j, k, l) + sym(i, k, l, j) + sym(i, l, j, k)) / 3.0;
    AlgCurvature bianchi = sym - b;

    CurvatureDecomposition d = decompose(bianchi, 1e-9);

    CurvatureDecomposition mix;
    mix.s = 4.0 * scale * rng.symmetric();
    mix.z = randomTracelessSym2(rng, scale);
    mix.w = d.w;
    return reconstruct(mix);
}

}  // namespace l2flow
