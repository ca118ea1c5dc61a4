#pragma once

// Matrix coefficients of the irreducible SU(2) representations, extended as
// holomorphic polynomials of the four entries of a 2x2 matrix, plus the
// associated characters and inverse-argument transforms.
//
// Index convention: an irreducible of dimension 2l+1 is labelled by the
// half-integer l, and a coefficient by a pair (m, n) with l, m, n all
// integers or all half-integers, |m|, |n| <= l.  Indices are stored doubled
// so that everything stays integral.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>

#include "biquat/algebra.hpp"
#include "biquat/errors.hpp"

namespace biquat {

namespace detail {

// Pascal's triangle in exact 64-bit arithmetic.  Rows up to n = 64 fit:
// C(64, 32) ~ 1.83e18 < 2^64.  Larger degrees are refused at the index
// validation layer rather than silently losing precision.
inline constexpr int kMaxTwoL = 64;

inline const std::uint64_t* binomial_row(int n) {
  static const auto table = [] {
    static std::uint64_t rows[kMaxTwoL + 1][kMaxTwoL + 1] = {};
    for (int i = 0; i <= kMaxTwoL; ++i) {
      rows[i][0] = rows[i][i] = 1;
      for (int j = 1; j < i; ++j)
        rows[i][j] = rows[i - 1][j - 1] + rows[i - 1][j];
    }
    return &rows[0];
  }();
  return table[n];
}

template <class S>
inline S int_pow(const S& base, int e) {
  S acc{1.0};
  S b = base;
  int k = e;
  while (k > 0) {
    if (k & 1) acc = acc * b;
    b = b * b;
    k >>= 1;
  }
  return acc;
}

}  // namespace detail

struct CoeffIndex {
  int two_l = 0;
  int two_m = 0;
  int two_n = 0;

  void validate() const {
    if (two_l < 0 || two_l > detail::kMaxTwoL)
      throw InvalidIndex("degree 2l out of supported range [0, 64]");
    if (std::abs(two_m) > two_l || std::abs(two_n) > two_l)
      throw InvalidIndex("|m| and |n| must not exceed l");
    if (((two_l ^ two_m) & 1) || ((two_l ^ two_n) & 1))
      throw InvalidIndex("l, m, n must all be integral or all half-integral");
  }
};

// Polynomial matrix coefficient.  Works on any commutative scalar S that
// supports +, * and construction from double (complex numbers, jet types).
template <class S>
S t_coeff(const CoeffIndex& idx, const Mat2<S>& z) {
  idx.validate();
  const int A = (idx.two_l - idx.two_m) / 2;  // total degree in z11, z12
  const int B = (idx.two_l - idx.two_n) / 2;  // degree in the first column
  const int C = (idx.two_l + idx.two_n) / 2;  // degree in the second column
  const std::uint64_t* cb = detail::binomial_row(B);
  const std::uint64_t* cc = detail::binomial_row(C);
  const int i_lo = std::max(0, A - C);
  const int i_hi = std::min(A, B);
  // Kahan-compensated accumulation: at 2l ~ 40 the terms alternate over many
  // orders of magnitude and naive summation loses several digits.
  S sum{0.0};
  S comp{0.0};
  for (int i = i_lo; i <= i_hi; ++i) {
    const double coeff =
        double(cb[i]) * double(cc[A - i]);
    const S term = S{coeff} * detail::int_pow(z.z11, i) *
                   detail::int_pow(z.z21, B - i) *
                   detail::int_pow(z.z12, A - i) *
                   detail::int_pow(z.z22, C - A + i);
    const S y = term - comp;
    const S t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

// Character of the degree-2l irreducible at a matrix with eigenvalues
// lambda_1, lambda_2: the symmetric sum lambda_1^p lambda_2^{2l-p}.  This
// form is stable under eigenvalue collisions (no division by the gap).
inline cplx chi(int two_l, const BiQuaternion& z) {
  CoeffIndex{two_l, two_l % 2 ? 1 : 0, two_l % 2 ? 1 : 0}.validate();
  const auto [l1, l2] = eigenvalues(z);
  cplx sum = 0.0;
  cplx p1 = 1.0;
  std::array<cplx, detail::kMaxTwoL + 1> pow2{};
  pow2[0] = 1.0;
  for (int p = 1; p <= two_l; ++p) pow2[p] = pow2[p - 1] * l2;
  for (int p = 0; p <= two_l; ++p) {
    sum += p1 * pow2[two_l - p];
    p1 *= l1;
  }
  return sum;
}

// t at the inverse argument, cleared of the norm pole:
// t(Z^{-1}) N(Z)^{2l} as a polynomial — evaluated via the adjugate.
template <class S>
S t_inverse_transform(const CoeffIndex& idx, const Mat2<S>& z) {
  return t_coeff(idx, conj_plus(z));
}

// The inverse-argument coefficient is proportional to the index-flipped
// coefficient: t_{m,n}(Z^+) = c * t_{-n,-m}(Z).  The constant is measured
// on random samples rather than hard-coded (empirically it comes out to
// (-1)^{m-n} (l-n)!(l+n)!/((l+m)!(l-m)!), the factorial ratio reflecting the
// binomial normalization carried by the second index).  Throws NonConvergence
// if the sampled ratio fails to be constant.
inline cplx measure_inverse_constant(const CoeffIndex& idx) {
  idx.validate();
  const CoeffIndex flip{idx.two_l, -idx.two_n, -idx.two_m};
  std::uint64_t state = 0x9e3779b97f4a7c15ull ^
                        (std::uint64_t(idx.two_l) << 32) ^
                        (std::uint64_t(std::uint32_t(idx.two_m)) << 16) ^
                        std::uint64_t(std::uint32_t(idx.two_n));
  auto next = [&state] {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return double(state >> 11) * 0x1.0p-53;
  };
  cplx ratio_sum = 0.0;
  cplx first = 0.0;
  int used = 0;
  for (int trial = 0; trial < 24 && used < 6; ++trial) {
    BiQuaternion z;
    z.z11 = cplx(next() - 0.5, next() - 0.5);
    z.z12 = cplx(next() - 0.5, next() - 0.5);
    z.z21 = cplx(next() - 0.5, next() - 0.5);
    z.z22 = cplx(next() - 0.5, next() - 0.5);
    const cplx denom = t_coeff(flip, z);
    if (std::abs(denom) < 1e-6) continue;
    const cplx r = t_inverse_transform(idx, z) / denom;
    if (used == 0)
      first = r;
    else if (std::abs(r - first) > 1e-8 * std::max(1.0, std::abs(first)))
      throw NonConvergence("inverse-transform ratio is not constant");
    ratio_sum += r;
    ++used;
  }
  if (used < 6)
    throw NonConvergence("could not sample the inverse-transform ratio");
  return ratio_sum * (1.0 / double(used));
}

}  // namespace biquat
