#pragma once

// Deformed Laurent family over the hyperboloid lift.  The basis fields
// multiply a matrix coefficient t^l by powers of the two factors
// sqrt(1 + mu^2 N) -+ 1: the k-th field carries (sqrt - 1)^k over
// (sqrt + 1)^(2l+k+2), and the dual family swaps (m, n), takes the adjugate
// argument and exchanges the roles of the two factors.  Pairing over a U(2)
// cycle against the deformed volume form (the flat form divided by
// sqrt(1 + mu^2 N)) is diagonal with values mu^-(4l+4) / (2l+1); the squared
// deformed pole 1/<X^-Y^>^2 expands in the family with the inverse
// coefficients, which yields one-sided reproducing projectors.

#include <cmath>
#include <complex>
#include <utility>

#include "biquat/ads_core.hpp"
#include "biquat/spaces.hpp"

namespace biquat {

// The deformed family reuses the Laurent labels and their component split
// (plus: k >= 0, minus: k <= -(2l+2), zero: between); k now counts powers of
// w = (sqrt(1 + mu^2 N) - 1)/(sqrt(1 + mu^2 N) + 1) instead of powers of N.
using ZhMuIndex = ZhBasisIndex;

enum class ZhMuVariant { basis, dual };

namespace detail {

template <class S>
S signed_pow(const S& b, int e) {
  if (e >= 0) return int_pow(b, e);
  return S{1.0} / int_pow(b, -e);
}

inline cplx root_mu(const BiQuaternion& x, double mu) {
  return std::sqrt(cplx{1.0, 0.0} + (mu * mu) * norm(x));
}

}  // namespace detail

// t^l_{m,n}(Z) (sqrt(1+mu^2 N)-1)^k / (sqrt(1+mu^2 N)+1)^(2l+k+2); the dual
// variant is t^l_{n,m}(Z^+) (sqrt+1)^k / (sqrt-1)^(2l+k+2).  The domain
// excludes the sqrt branch region N in (-inf, -1/mu^2]; the null cone N = 0
// is excluded exactly when the requested field has a pole there (basis:
// k < 0; dual: 2l+k+2 > 0).
inline ScalarField zh_mu_basis_field(const ZhMuIndex& i, ZhMuVariant variant,
                                     double mu) {
  i.idx.validate();
  AdSParams{mu};
  const bool dualv = variant == ZhMuVariant::dual;
  const CoeffIndex idx = dualv ? detail::swap_mn(i.idx) : i.idx;
  const int kp = i.k;
  const int dp = i.idx.two_l + i.k + 2;
  const bool pole = dualv ? dp > 0 : kp < 0;
  return ScalarField::closed_form(
      [idx, mu, dualv, kp, dp](const auto& m) {
        using S = std::decay_t<decltype(m.z11)>;
        using std::sqrt;
        const S nn = norm(m);
        const S root = sqrt(S{1.0} + (mu * mu) * nn);
        const S tv = t_coeff(idx, dualv ? conj_plus(m) : m);
        const S high = root + S{1.0};
        // root - 1 written without cancellation: (root^2 - 1)/(root + 1)
        const S low = (mu * mu) * nn / high;
        const S num = dualv ? high : low;
        const S den = dualv ? low : high;
        return tv * detail::signed_pow(num, kp) * detail::signed_pow(den, -dp);
      },
      detail::deformed_domain(mu, pole));
}

// <f1, f2>_mu = (i/2pi^3) * integral over U(2)_R of f1 f2 dV_{R,mu}; the
// value is independent of R on 0 < R < 1/mu.
inline cplx pairing_Zh_mu(const ScalarField& f1, const ScalarField& f2,
                          double mu, double R, int l_max = 3,
                          int k_range = 4) {
  AdSParams{mu};
  const auto rule = build_u2_rule(R, l_max, k_range, mu);
  const cplx s = integrate_nodes(rule, [&](const BiQuaternion& z) {
    return f1.value(z) * f2.value(z);
  });
  return s * cplx{0.0, 1.0} / (2.0 * kPi * kPi * kPi);
}

// <X^-Y^, X^-Y^> continued to complex arguments through the principal
// branch:  2 mu^-2 (1 - sqrt(1+mu^2 N(X)) sqrt(1+mu^2 N(Y))) + tr(X Y^+).
// For real quaternions this is the Lorentzian square of the lift
// difference: zero iff X = Y and strictly negative otherwise, so the
// squared pole never vanishes on real cycles.
inline cplx deformed_pair(const BiQuaternion& x, const BiQuaternion& y,
                          double mu) {
  AdSParams{mu};
  const auto dom = detail::deformed_domain(mu, false);
  if (!dom(x) || !dom(y))
    throw OutOfDomain("argument norm lies on the sqrt branch cut");
  const cplx prod = detail::root_mu(x, mu) * detail::root_mu(y, mu);
  return 2.0 / (mu * mu) * (cplx{1.0, 0.0} - prod) + trace(x * conj_plus(y));
}

// Partial sum of  sum (2l+1) mu^(4l+4) f_{k,l,m,n}(X) f'_{k,l,m,n}(Y)  over
// 2l + 2k <= L_max.  The (m, n) sum collapses through the multiplication
// rule to the character chi_l(X Y^+), so each (k, l) block is a single
// closed term.  Converges to 1/<X^-Y^>^2 when X Y^-1 is diagonalizable with
// equal-modulus eigenvalues and |w(X)| < |w(Y)|; successive k blocks decay
// geometrically with ratio w(X)/w(Y).
inline cplx expansion_1overN2_deformed_partial(const BiQuaternion& x,
                                               const BiQuaternion& y,
                                               double mu, int L_max) {
  AdSParams{mu};
  if (L_max < 0 || L_max > detail::kMaxTwoL)
    throw InvalidIndex("truncation degree out of supported range [0, 64]");
  const auto dom = detail::deformed_domain(mu, false);
  if (!dom(x) || !dom(y))
    throw OutOfDomain("argument norm lies on the sqrt branch cut");
  const cplx ux = detail::root_mu(x, mu);
  const cplx uy = detail::root_mu(y, mu);
  const cplx wx = (ux - 1.0) / (ux + 1.0);
  const cplx wy = (uy - 1.0) / (uy + 1.0);
  if (!(std::abs(wx) < std::abs(wy)))
    throw OutsideConvergenceRegion("the k-series needs |w(X)| < |w(Y)|");
  const BiQuaternion p = x * inverse(y);
  const auto [l1, l2] = eigenvalues(p);
  const double lscale = std::abs(l1) + std::abs(l2);
  if (lscale > 0.0 && std::abs(std::abs(l1) - std::abs(l2)) > 1e-9 * lscale)
    throw OutsideConvergenceRegion(
        "X Y^-1 must have equal-modulus eigenvalues");
  if (std::abs(l1 - l2) <= 1e-12 * std::max(lscale, 1.0) &&
      max_abs(p - scalar_mat(l1)) > 1e-10 * std::max(max_abs(p), 1.0))
    throw OutsideConvergenceRegion("X Y^-1 must be diagonalizable");
  const BiQuaternion prod = x * conj_plus(y);
  const cplx r = wx / wy;
  cplx sum{0.0, 0.0};
  for (int two_l = 0; two_l <= L_max; ++two_l) {
    const cplx base = static_cast<double>(two_l + 1) *
                      detail::int_pow(cplx{mu * mu, 0.0}, two_l + 2) /
                      (detail::int_pow(ux + 1.0, two_l + 2) *
                       detail::int_pow(uy - 1.0, two_l + 2));
    cplx ksum{0.0, 0.0};
    cplx kf{1.0, 0.0};
    const int k_max = (L_max - two_l) / 2;
    for (int k = 0; k <= k_max; ++k) {
      ksum += kf;
      kf *= r;
    }
    sum += base * ksum * chi(two_l, prod);
  }
  return sum;
}

// (i/2pi^3) * integral over U(2)_R of f(X) / <X^-Y^>^2 dV_{R,mu}.  On the
// plus side Y must sit below the cycle in the |w|-sense (|w(Y)| under the
// cycle minimum (sqrt(1+mu^2 R^2)-1)/(sqrt(1+mu^2 R^2)+1)); the integral
// then reproduces the plus component of f and kills the rest.  On the minus
// side Y sits above the cycle maximum (1-sqrt(1-mu^2 R^2))/(1+sqrt(1-mu^2
// R^2)) and the integral reproduces the minus component.
inline cplx P_mu_eval(const ScalarField& f, const BiQuaternion& y, double mu,
                      double R, PoissonSide side, int l_max = 6,
                      int k_range = 10) {
  AdSParams{mu};
  if (!(R > 0.0) || !(R < 1.0 / mu))
    throw BadRadius("cycle radius must satisfy 0 < R < 1/mu");
  const auto dom = detail::deformed_domain(mu, false);
  if (!dom(y))
    throw OutOfDomain("evaluation point lies on the sqrt branch cut");
  const cplx uy = detail::root_mu(y, mu);
  const double wy = std::abs((uy - 1.0) / (uy + 1.0));
  const double q = mu * R;
  if (side == PoissonSide::plus) {
    const double s = std::sqrt(1.0 + q * q);
    if (!(wy < (s - 1.0) / (s + 1.0)))
      throw OutsideAdmissibleRegion(
          "|w(Y)| must lie below the cycle minimum for the plus side");
  } else {
    const double s = std::sqrt(1.0 - q * q);
    if (!(wy > (1.0 - s) / (1.0 + s)))
      throw OutsideAdmissibleRegion(
          "|w(Y)| must lie above the cycle maximum for the minus side");
  }
  const auto rule = build_u2_rule(R, l_max, k_range, mu);
  const cplx s = integrate_nodes(rule, [&](const BiQuaternion& x) {
    const cplx pr = 2.0 / (mu * mu) *
                        (cplx{1.0, 0.0} - detail::root_mu(x, mu) * uy) +
                    trace(x * conj_plus(y));
    if (std::abs(pr) < 1e-12 * (2.0 / (mu * mu)))
      throw SingularOnCycle("squared pole degenerates on the cycle");
    return f.value(x) / (pr * pr);
  });
  return s * cplx{0.0, 1.0} / (2.0 * kPi * kPi * kPi);
}

}  // namespace biquat
