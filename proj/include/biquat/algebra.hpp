#pragma once

// Core algebra of complexified quaternions modeled as 2x2 complex matrices.
//
// A quaternion with components (z0, z1, z2, z3) embeds as
//
//     [ z0 - i z3     -i z1 - z2 ]
//     [ -i z1 + z2    z0 + i z3  ]
//
// so that the quaternionic norm becomes the determinant and the quaternionic
// conjugate becomes the adjugate.  Everything here is templated on the scalar
// ring so the same formulas run on plain complex numbers and on the dual
// numbers used for automatic differentiation.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <type_traits>

#include "biquat/errors.hpp"

namespace biquat {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

template <class S>
struct Mat2 {
  S z11{}, z12{}, z21{}, z22{};

  static Mat2 id() { return {S(1.0), S(0.0), S(0.0), S(1.0)}; }
  static Mat2 zero() { return {}; }
};

using BiQuaternion = Mat2<cplx>;

template <class S>
Mat2<S> operator+(const Mat2<S>& x, const Mat2<S>& y) {
  return {x.z11 + y.z11, x.z12 + y.z12, x.z21 + y.z21, x.z22 + y.z22};
}

template <class S>
Mat2<S> operator-(const Mat2<S>& x, const Mat2<S>& y) {
  return {x.z11 - y.z11, x.z12 - y.z12, x.z21 - y.z21, x.z22 - y.z22};
}

template <class S>
Mat2<S> operator-(const Mat2<S>& x) {
  return {-x.z11, -x.z12, -x.z21, -x.z22};
}

template <class S>
Mat2<S> operator*(const Mat2<S>& x, const Mat2<S>& y) {
  return {x.z11 * y.z11 + x.z12 * y.z21, x.z11 * y.z12 + x.z12 * y.z22,
          x.z21 * y.z11 + x.z22 * y.z21, x.z21 * y.z12 + x.z22 * y.z22};
}

template <class S>
Mat2<S> operator*(const Mat2<S>& x, const S& s) {
  return {x.z11 * s, x.z12 * s, x.z21 * s, x.z22 * s};
}

template <class S>
Mat2<S> operator*(const S& s, const Mat2<S>& x) {
  return x * s;
}

template <class S>
Mat2<S> operator*(const Mat2<S>& x, double s) {
  return {x.z11 * s, x.z12 * s, x.z21 * s, x.z22 * s};
}

template <class S>
Mat2<S> operator*(double s, const Mat2<S>& x) {
  return x * s;
}

template <class S>
S norm(const Mat2<S>& x) {
  return x.z11 * x.z22 - x.z12 * x.z21;
}

template <class S>
S trace(const Mat2<S>& x) {
  return x.z11 + x.z22;
}

// Quaternionic conjugate = matrix adjugate: Z Z+ = N(Z) Id.
template <class S>
Mat2<S> conj_plus(const Mat2<S>& x) {
  return {x.z22, -x.z12, -x.z21, x.z11};
}

inline BiQuaternion star(const BiQuaternion& x) {
  return {std::conj(x.z11), std::conj(x.z21), std::conj(x.z12),
          std::conj(x.z22)};
}

template <class S>
Mat2<S> scalar_mat2(const S& s) {
  return {s, S(0.0), S(0.0), s};
}

inline BiQuaternion scalar_mat(cplx s) { return {s, 0.0, 0.0, s}; }

inline double max_abs(const BiQuaternion& x) {
  return std::max(std::max(std::abs(x.z11), std::abs(x.z12)),
                  std::max(std::abs(x.z21), std::abs(x.z22)));
}

template <class S>
Mat2<S> inverse(const Mat2<S>& x) {
  const S n = norm(x);
  if constexpr (std::is_same_v<S, cplx>) {
    const double scale = max_abs(x);
    if (std::abs(n) <= 1e-14 * scale * scale || scale == 0.0)
      throw SingularMatrix("2x2 inverse of a numerically singular matrix");
  }
  const Mat2<S> adj = conj_plus(x);
  const S inv = S(1.0) / n;
  return adj * inv;
}

template <class S, class = std::enable_if_t<!std::is_convertible_v<S, cplx>>>
Mat2<S> from_components(const S& z0, const S& z1, const S& z2, const S& z3) {
  const cplx i(0.0, 1.0);
  return {z0 - i * z3, -(i * z1) - z2, -(i * z1) + z2, z0 + i * z3};
}

inline BiQuaternion from_components(cplx z0, cplx z1, cplx z2, cplx z3) {
  const cplx i(0.0, 1.0);
  return {z0 - i * z3, -(i * z1) - z2, -(i * z1) + z2, z0 + i * z3};
}

inline BiQuaternion from_real(double x0, double x1, double x2, double x3) {
  return from_components(cplx(x0), cplx(x1), cplx(x2), cplx(x3));
}

template <class S>
std::array<S, 4> components(const Mat2<S>& z) {
  const cplx i(0.0, 1.0);
  return {(z.z11 + z.z22) * 0.5, (i * (z.z12 + z.z21)) * 0.5,
          (z.z21 - z.z12) * 0.5, (i * (z.z11 - z.z22)) * 0.5};
}

inline bool is_real_quaternion(const BiQuaternion& z, double tol = 1e-12) {
  const auto c = components(z);
  const double scale = std::max(1.0, max_abs(z));
  for (const auto& v : c)
    if (std::abs(v.imag()) > tol * scale) return false;
  return true;
}

// e0 = 1, e1, e2, e3; e_k^2 = -1 for k > 0.
inline BiQuaternion quaternion_unit(int k) {
  switch (k) {
    case 0: return from_real(1, 0, 0, 0);
    case 1: return from_real(0, 1, 0, 0);
    case 2: return from_real(0, 0, 1, 0);
    case 3: return from_real(0, 0, 0, 1);
    default: throw InvalidIndex("quaternion unit index must be 0..3");
  }
}

// Eigenvalues of a 2x2 complex matrix via the stabilized quadratic formula.
// Repeated roots are returned twice; no error is raised here.
inline std::pair<cplx, cplx> eigenvalues(const BiQuaternion& z) {
  const cplx tr = trace(z);
  const cplx det = norm(z);
  cplx s = std::sqrt(tr * tr - 4.0 * det);
  if ((std::conj(tr) * s).real() < 0.0) s = -s;
  const cplx l1 = 0.5 * (tr + s);
  const cplx l2 = (std::abs(l1) > 1e-300) ? det / l1 : tr - l1;
  return {l1, l2};
}

// ---------------------------------------------------------------------------
// 4x4 block matrices (conformal group elements and their Lie algebra).

struct BlockMat {
  BiQuaternion a, b, c, d;

  static BlockMat id() {
    return {BiQuaternion::id(), BiQuaternion::zero(), BiQuaternion::zero(),
            BiQuaternion::id()};
  }
};

inline BlockMat operator+(const BlockMat& x, const BlockMat& y) {
  return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d};
}

inline BlockMat operator*(const BlockMat& x, const BlockMat& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
          x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

inline BlockMat operator*(double s, const BlockMat& x) {
  return {s * x.a, s * x.b, s * x.c, s * x.d};
}

inline BlockMat operator*(cplx s, const BlockMat& x) {
  return {s * x.a, s * x.b, s * x.c, s * x.d};
}

inline double max_abs(const BlockMat& x) {
  return std::max(std::max(max_abs(x.a), max_abs(x.b)),
                  std::max(max_abs(x.c), max_abs(x.d)));
}

// exp(X) by scaling and squaring with a Taylor core.
inline BlockMat block_exp(const BlockMat& x) {
  const double m = max_abs(x);
  int squarings = 0;
  double scale = 1.0;
  while (m * scale > 0.25 && squarings < 60) {
    scale *= 0.5;
    ++squarings;
  }
  const BlockMat y = scale * x;
  BlockMat acc = BlockMat::id();
  BlockMat term = BlockMat::id();
  for (int k = 1; k <= 20; ++k) {
    term = (1.0 / k) * (term * y);
    acc = acc + term;
  }
  for (int s = 0; s < squarings; ++s) acc = acc * acc;
  return acc;
}

namespace detail {

// Gaussian elimination with partial pivoting for 4x4 complex systems.
inline std::array<std::array<cplx, 4>, 4> invert4(
    const std::array<std::array<cplx, 4>, 4>& m) {
  std::array<std::array<cplx, 8>, 4> w{};
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) w[r][c] = m[r][c];
    w[r][4 + r] = 1.0;
  }
  for (int col = 0; col < 4; ++col) {
    int piv = col;
    for (int r = col + 1; r < 4; ++r)
      if (std::abs(w[r][col]) > std::abs(w[piv][col])) piv = r;
    if (std::abs(w[piv][col]) < 1e-300)
      throw SingularMatrix("4x4 block matrix is not invertible");
    std::swap(w[piv], w[col]);
    const cplx inv = 1.0 / w[col][col];
    for (int c = col; c < 8; ++c) w[col][c] *= inv;
    for (int r = 0; r < 4; ++r) {
      if (r == col) continue;
      const cplx f = w[r][col];
      if (f == cplx(0.0)) continue;
      for (int c = col; c < 8; ++c) w[r][c] -= f * w[col][c];
    }
  }
  std::array<std::array<cplx, 4>, 4> out{};
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) out[r][c] = w[r][4 + c];
  return out;
}

inline std::array<std::array<cplx, 4>, 4> to_dense(const BlockMat& x) {
  return {{{x.a.z11, x.a.z12, x.b.z11, x.b.z12},
           {x.a.z21, x.a.z22, x.b.z21, x.b.z22},
           {x.c.z11, x.c.z12, x.d.z11, x.d.z12},
           {x.c.z21, x.c.z22, x.d.z21, x.d.z22}}};
}

inline BlockMat from_dense(const std::array<std::array<cplx, 4>, 4>& m) {
  BlockMat x;
  x.a = {m[0][0], m[0][1], m[1][0], m[1][1]};
  x.b = {m[0][2], m[0][3], m[1][2], m[1][3]};
  x.c = {m[2][0], m[2][1], m[3][0], m[3][1]};
  x.d = {m[2][2], m[2][3], m[3][2], m[3][3]};
  return x;
}

}  // namespace detail

// A conformal group element together with its cached inverse blocks.  The
// inverse is computed (or supplied) once at construction and then trusted;
// construction always validates h h^{-1} = Id.
struct GroupElement {
  BiQuaternion a, b, c, d;      // blocks of h
  BiQuaternion ai, bi, ci, di;  // blocks of h^{-1}

  static GroupElement from_pair(const BlockMat& h, const BlockMat& hinv) {
    const BlockMat p = h * hinv;
    const double scale = std::max(1.0, max_abs(h) * max_abs(hinv));
    const double err =
        std::max(std::max(max_abs(p.a - BiQuaternion::id()), max_abs(p.b)),
                 std::max(max_abs(p.c), max_abs(p.d - BiQuaternion::id())));
    if (err > 1e-10 * scale)
      throw SingularMatrix("group element inverse validation failed");
    return GroupElement{h.a, h.b, h.c, h.d, hinv.a, hinv.b, hinv.c, hinv.d};
  }

  static GroupElement from_blocks(const BiQuaternion& a, const BiQuaternion& b,
                                  const BiQuaternion& c,
                                  const BiQuaternion& d) {
    const BlockMat h{a, b, c, d};
    return from_pair(h, detail::from_dense(detail::invert4(detail::to_dense(h))));
  }

  static GroupElement identity() {
    return from_pair(BlockMat::id(), BlockMat::id());
  }

  static GroupElement from_exp(const BlockMat& x, double t) {
    return from_pair(block_exp(t * x), block_exp(-t * x));
  }

  static GroupElement scaling(double r) {
    if (r == 0.0) throw SingularMatrix("scaling element with r = 0");
    return from_pair(
        BlockMat{scalar_mat(r), BiQuaternion::zero(), BiQuaternion::zero(),
                 BiQuaternion::id()},
        BlockMat{scalar_mat(1.0 / r), BiQuaternion::zero(),
                 BiQuaternion::zero(), BiQuaternion::id()});
  }

  BlockMat blocks() const { return {a, b, c, d}; }
  BlockMat inverse_blocks() const { return {ai, bi, ci, di}; }

  GroupElement inverse() const {
    return GroupElement{ai, bi, ci, di, a, b, c, d};
  }

  GroupElement operator*(const GroupElement& o) const {
    const BlockMat h = blocks() * o.blocks();
    const BlockMat hinv = o.inverse_blocks() * inverse_blocks();
    return GroupElement{h.a, h.b, h.c, h.d, hinv.a, hinv.b, hinv.c, hinv.d};
  }
};

// Fractional-linear action Z -> (aZ + b)(cZ + d)^{-1} using h's own blocks.
template <class S>
Mat2<S> mobius_blocks(const BiQuaternion& a, const BiQuaternion& b,
                      const BiQuaternion& c, const BiQuaternion& d,
                      const Mat2<S>& z) {
  auto promote = [](const BiQuaternion& m) {
    return Mat2<S>{S(m.z11), S(m.z12), S(m.z21), S(m.z22)};
  };
  const Mat2<S> den = promote(c) * z + promote(d);
  if constexpr (std::is_same_v<S, cplx>) {
    const double scale = max_abs(den);
    if (std::abs(norm(den)) <= 1e-14 * scale * scale || scale == 0.0)
      throw SingularDenominator("mobius map denominator is singular here");
  }
  const Mat2<S> num = promote(a) * z + promote(b);
  const S inv = S(1.0) / norm(den);
  return num * conj_plus(den) * inv;
}

template <class S>
Mat2<S> mobius(const GroupElement& h, const Mat2<S>& z) {
  return mobius_blocks(h.a, h.b, h.c, h.d, z);
}

// Holomorphic Jacobian determinant of the mobius map in the four matrix
// entries: 1 / ( N(cZ+d)^2 N(a' - Z c')^2 ), primes = inverse blocks.
inline cplx mobius_jacobian_det(const GroupElement& h, const BiQuaternion& z) {
  const BiQuaternion den1 = h.c * z + h.d;
  const BiQuaternion den2 = h.ai - z * h.ci;
  const double s1 = max_abs(den1), s2 = max_abs(den2);
  if (std::abs(norm(den1)) <= 1e-14 * s1 * s1 ||
      std::abs(norm(den2)) <= 1e-14 * s2 * s2)
    throw SingularDenominator("mobius jacobian at a singular point");
  const cplx n1 = norm(den1), n2 = norm(den2);
  return 1.0 / (n1 * n1 * n2 * n2);
}

// ---------------------------------------------------------------------------
// Cayley maps between the matrix disk and the tube domains.

enum class CayleyDirection { disk_to_tube, tube_to_disk };

template <class S>
Mat2<S> cayley(CayleyDirection dir, const Mat2<S>& z) {
  const cplx i(0.0, 1.0);
  const Mat2<S> one = Mat2<S>::id();
  if (dir == CayleyDirection::disk_to_tube) {
    // Z -> (Z - i)(Z + i)^{-1}
    const Mat2<S> den = z + scalar_mat2<S>(S(i));
    if constexpr (std::is_same_v<S, cplx>) {
      const double scale = max_abs(den);
      if (std::abs(norm(den)) <= 1e-14 * scale * scale)
        throw SingularDenominator("cayley disk->tube singular at this point");
    }
    const S inv = S(1.0) / norm(den);
    return (z - scalar_mat2<S>(S(i))) * conj_plus(den) * inv;
  }
  // Z -> -i (Z + 1)(Z - 1)^{-1}
  const Mat2<S> den = z - one;
  if constexpr (std::is_same_v<S, cplx>) {
    const double scale = max_abs(den);
    if (std::abs(norm(den)) <= 1e-14 * scale * scale)
      throw SingularDenominator("cayley tube->disk singular at this point");
  }
  const S inv = S(1.0) / norm(den);
  return ((z + one) * conj_plus(den)) * (S(-i) * inv);
}

// The fixed conformal element implementing disk->tube as a mobius map.
inline GroupElement gamma_element() {
  const cplx i(0.0, 1.0);
  const double r = 1.0 / std::sqrt(2.0);
  const BlockMat g{scalar_mat(i * r), scalar_mat(r), scalar_mat(i * r),
                   scalar_mat(-r)};
  const BlockMat ginv{scalar_mat(-i * r), scalar_mat(-i * r), scalar_mat(r),
                      scalar_mat(-r)};
  return GroupElement::from_pair(g, ginv);
}

// ---------------------------------------------------------------------------
// The pseudo-unitary symmetry algebra: X = [A B; B* D], A* = -A, D* = -D.

inline std::array<BlockMat, 16> u22_basis() {
  const cplx i(0.0, 1.0);
  const std::array<BiQuaternion, 4> skew = {
      BiQuaternion{i, 0.0, 0.0, i},    // i
      BiQuaternion{0.0, i, i, 0.0},    // i sigma_x
      BiQuaternion{0.0, 1.0, -1.0, 0.0},
      BiQuaternion{i, 0.0, 0.0, -i},   // i sigma_z
  };
  const std::array<BiQuaternion, 8> bs = {
      BiQuaternion{1.0, 0.0, 0.0, 0.0}, BiQuaternion{i, 0.0, 0.0, 0.0},
      BiQuaternion{0.0, 1.0, 0.0, 0.0}, BiQuaternion{0.0, i, 0.0, 0.0},
      BiQuaternion{0.0, 0.0, 1.0, 0.0}, BiQuaternion{0.0, 0.0, i, 0.0},
      BiQuaternion{0.0, 0.0, 0.0, 1.0}, BiQuaternion{0.0, 0.0, 0.0, i},
  };
  std::array<BlockMat, 16> out{};
  const BiQuaternion zero = BiQuaternion::zero();
  for (int k = 0; k < 4; ++k) out[std::size_t(k)] = BlockMat{skew[std::size_t(k)], zero, zero, zero};
  for (int k = 0; k < 4; ++k) out[std::size_t(4 + k)] = BlockMat{zero, zero, zero, skew[std::size_t(k)]};
  for (int k = 0; k < 8; ++k)
    out[std::size_t(8 + k)] = BlockMat{zero, bs[std::size_t(k)], star(bs[std::size_t(k)]), zero};
  return out;
}

inline bool in_u22(const GroupElement& h, double tol) {
  // h* J h = J with J = diag(Id, -Id).
  const BiQuaternion as = star(h.a), bs = star(h.b), cs = star(h.c),
                     ds = star(h.d);
  const double e1 = max_abs(as * h.a - cs * h.c - BiQuaternion::id());
  const double e2 = max_abs(as * h.b - cs * h.d);
  const double e3 = max_abs(bs * h.b - ds * h.d + BiQuaternion::id());
  return std::max(std::max(e1, e2), e3) <= tol;
}

// ---------------------------------------------------------------------------
// Regions.

namespace detail {
// Positive definiteness of a (structurally) Hermitian 2x2 matrix.
inline bool posdef(const BiQuaternion& m) {
  return trace(m).real() > 0.0 && norm(m).real() > 0.0;
}
}  // namespace detail

inline bool in_disk_plus(const BiQuaternion& z, double r = 1.0) {
  return detail::posdef(scalar_mat(r * r) - z * star(z));
}

inline bool in_disk_minus(const BiQuaternion& z, double r = 1.0) {
  return detail::posdef(z * star(z) - scalar_mat(r * r));
}

inline bool on_u2(const BiQuaternion& z, double r = 1.0, double tol = 1e-10) {
  return max_abs(z * star(z) - scalar_mat(r * r)) <= tol * r * r;
}

namespace detail {
// iZ = P + iQ with P, Q Hermitian; returns Q.
inline BiQuaternion tube_imag_part(const BiQuaternion& z) {
  const cplx i(0.0, 1.0);
  const BiQuaternion iz = i * z;
  const BiQuaternion izs = star(iz);
  return 0.5 * BiQuaternion{-i * (iz.z11 - izs.z11), -i * (iz.z12 - izs.z12),
                            -i * (iz.z21 - izs.z21), -i * (iz.z22 - izs.z22)};
}
}  // namespace detail

inline bool in_tube_plus(const BiQuaternion& z) {
  return detail::posdef(-detail::tube_imag_part(z));
}

inline bool in_tube_minus(const BiQuaternion& z) {
  return detail::posdef(detail::tube_imag_part(z));
}

inline bool on_minkowski(const BiQuaternion& z, double tol = 1e-10) {
  const double scale = std::max(1.0, max_abs(z));
  return std::abs(z.z11.real()) <= tol * scale &&
         std::abs(z.z22.real()) <= tol * scale &&
         std::abs(z.z21 + std::conj(z.z12)) <= tol * scale;
}

// A real point of the boundary hypersurface, as coordinates (x0, x1, x2, x3);
// matrix() produces the corresponding matrix, which satisfies on_minkowski.
struct MinkowskiPoint {
  double x0 = 0, x1 = 0, x2 = 0, x3 = 0;
  BiQuaternion matrix() const {
    return from_components(cplx(0.0, -x0), cplx(x1), cplx(x2), cplx(x3));
  }
};

// ---------------------------------------------------------------------------
// Euler-angle point constructors.
//
//   su2_euler = diag(e^{i phi/2}, e^{-i phi/2}) K(theta)
//               diag(e^{i psi/2}, e^{-i psi/2}),
//   K(theta)  = [cos(theta/2)  i sin(theta/2); i sin(theta/2)  cos(theta/2)].
//
// Ranges phi in [0, 2pi), theta in [0, pi], psi in [-2pi, 2pi) cover the unit
// quaternions exactly once.

inline BiQuaternion su2_k(double theta) {
  const cplx i(0.0, 1.0);
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  return {c, i * s, i * s, c};
}

inline BiQuaternion su2_euler(double phi, double theta, double psi) {
  const cplx i(0.0, 1.0);
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  const cplx ep = std::exp(i * (0.5 * (phi + psi)));
  const cplx em = std::exp(i * (0.5 * (phi - psi)));
  return {ep * c, i * em * s, i * std::conj(em) * s, std::conj(ep) * c};
}

// Point of the matrix circle of radius R: R e^{i alpha} times a unit
// quaternion.
inline BiQuaternion u2_point(double r, double alpha, double phi, double theta,
                             double psi) {
  const cplx i(0.0, 1.0);
  return (r * std::exp(i * alpha)) * su2_euler(phi, theta, psi);
}

}  // namespace biquat
