#pragma once

// Hyperbolic deformation of the function theory: the hyperboloid lift of
// quaternion space into five-dimensional Lorentzian space, the deformed
// kernel -1/<X^ - Y^>, the deformed harmonic basis fields and their sphere
// pairing, the reproducing (Poisson-type) integral, the character expansion
// of the kernel, the conformal action through the cone over the hyperboloid,
// and the five-variable extensions of the basis fields.
//
// Conventions.  The deformation parameter mu is the inverse radius of the
// hyperboloid; the lift of a real quaternion X is
// X^ = (sqrt(mu^-2 + N(X)), x0, x1, x2, x3).  Deformed basis fields divide
// the matrix coefficients by (sqrt(1 + mu^2 N) +- 1)^(2l+1); the dual of a
// plus field under the sphere pairing keeps the *same* index triple and is
// built here by swapping (m, n) and evaluating at the adjugate argument, so
// pairing_mu(basis, dual) is exactly delta / mu^(4l+2) on the diagonal.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

#include "biquat/projectors.hpp"

namespace biquat {

// ---------------------------------------------------------------------------
// parameters and the hyperboloid lift

struct AdSParams {
  double mu = 1.0;
  AdSParams() = default;
  explicit AdSParams(double m) : mu(m) {
    if (!(mu > 0.0))
      throw ConfigInvalid("deformation parameter must be positive");
  }
};

inline double inner_14(const Minkowski5Point& p, const Minkowski5Point& q) {
  return p.w0 * q.w0 - p.w1 * q.w1 - p.w2 * q.w2 - p.w3 * q.w3 - p.w4 * q.w4;
}

inline Minkowski5Point operator-(const Minkowski5Point& p,
                                 const Minkowski5Point& q) {
  return {p.w0 - q.w0, p.w1 - q.w1, p.w2 - q.w2, p.w3 - q.w3, p.w4 - q.w4};
}

inline Minkowski5Point hat_embed(const BiQuaternion& x, double mu) {
  AdSParams{mu};
  if (!is_real_quaternion(x))
    throw OutOfDomain("hyperboloid lift of a non-real quaternion");
  const auto c = components(x);
  Minkowski5Point p;
  p.w0 = std::sqrt(1.0 / (mu * mu) + norm(x).real());
  p.w1 = c[0].real();
  p.w2 = c[1].real();
  p.w3 = c[2].real();
  p.w4 = c[3].real();
  return p;
}

// -1 / <X^ - Y^, X^ - Y^>; the Lorentzian square is negative for distinct
// real arguments, so the value is positive.
inline double K_mu_eval(const BiQuaternion& x, const BiQuaternion& y,
                        double mu) {
  AdSParams{mu};
  if (!is_real_quaternion(x) || !is_real_quaternion(y))
    throw OutOfDomain("deformed kernel is evaluated at real quaternions");
  const double im2 = 1.0 / (mu * mu);
  const auto cx = components(x);
  const auto cy = components(y);
  double dot = 0.0;
  for (int i = 0; i < 4; ++i) dot += cx[i].real() * cy[i].real();
  const double rx = std::sqrt(im2 + norm(x).real());
  const double ry = std::sqrt(im2 + norm(y).real());
  const double pair = 2.0 * im2 - 2.0 * rx * ry + 2.0 * dot;
  const double scale = 2.0 * im2 + 2.0 * rx * ry + 2.0 * std::abs(dot);
  if (std::abs(pair) <= 1e-14 * scale)
    throw CoincidentPoints("deformed kernel pole at coincident points");
  return -1.0 / pair;
}

// ---------------------------------------------------------------------------
// radial angles of a pair of points

// cosh t_i = sqrt(1 + mu^2 N), sinh t_i = mu sqrt(N); a and b control the
// expansion tails (ratio b/a per half step of l), lambda is the eigenvalue
// ratio of X Y^{-1} (zero when the product is singular).
struct DeformedAngles {
  cplx t1, t2;
  cplx theta1, theta2;
  cplx a, b;
  cplx lambda;
};

inline DeformedAngles deformed_angles(const BiQuaternion& x,
                                      const BiQuaternion& y, double mu) {
  AdSParams{mu};
  DeformedAngles r;
  r.t1 = std::sqrt(1.0 + mu * mu * norm(x));
  r.t2 = std::sqrt(1.0 + mu * mu * norm(y));
  r.theta1 = std::asinh(mu * std::sqrt(norm(x)));
  r.theta2 = std::asinh(mu * std::sqrt(norm(y)));
  r.a = 2.0 * std::sqrt((r.t1 + 1.0) * (r.t2 - 1.0));
  r.b = 2.0 * std::sqrt((r.t1 - 1.0) * (r.t2 + 1.0));
  const auto [l1, l2] = eigenvalues(x * conj_plus(y));
  r.lambda = std::abs(l2) > 0.0 ? l1 / l2 : cplx{0.0};
  return r;
}

// ---------------------------------------------------------------------------
// deformed basis fields

namespace detail {

inline std::function<bool(const BiQuaternion&)> deformed_domain(
    double mu, bool exclude_zero) {
  return [mu, exclude_zero](const BiQuaternion& z) {
    const cplx n = norm(z);
    const double s = std::max(1.0, max_abs(z) * max_abs(z));
    // branch cut of sqrt(1 + mu^2 N): N real and <= -1/mu^2
    if (std::abs(n.imag()) <= 1e-12 * s &&
        n.real() <= -1.0 / (mu * mu) + 1e-12 * s)
      return false;
    if (exclude_zero && std::abs(n) <= 1e-13 * s) return false;
    return true;
  };
}

}  // namespace detail

// t^l_{m,n}(X) / (sqrt(1 + mu^2 N(X)) +- 1)^(2l+1).  The minus family has a
// pole on the null cone N = 0, which the domain excludes.
inline ScalarField H_mu_basis_field(const CoeffIndex& idx, PoissonSide side,
                                    double mu) {
  idx.validate();
  AdSParams{mu};
  const double sg = side == PoissonSide::plus ? 1.0 : -1.0;
  const int pw = idx.two_l + 1;
  return ScalarField::closed_form(
      [idx, mu, sg, pw](const auto& m) {
        using S = std::decay_t<decltype(m.z11)>;
        using std::sqrt;
        const S root = sqrt(S{1.0} + (mu * mu) * norm(m));
        return t_coeff(idx, m) / detail::int_pow(root + S{sg}, pw);
      },
      detail::deformed_domain(mu, side == PoissonSide::minus));
}

// Dual of the plus field with the same index under pairing_mu:
// t^l_{n,m}(X^+) / (sqrt(1 + mu^2 N(X)) - 1)^(2l+1).
inline ScalarField H_mu_dual_field(const CoeffIndex& idx, double mu) {
  idx.validate();
  AdSParams{mu};
  const CoeffIndex sw{idx.two_l, idx.two_n, idx.two_m};
  const int pw = idx.two_l + 1;
  return ScalarField::closed_form(
      [sw, mu, pw](const auto& m) {
        using S = std::decay_t<decltype(m.z11)>;
        using std::sqrt;
        const S root = sqrt(S{1.0} + (mu * mu) * norm(m));
        return t_coeff(sw, conj_plus(m)) /
               detail::int_pow(root - S{1.0}, pw);
      },
      detail::deformed_domain(mu, true));
}

// ---------------------------------------------------------------------------
// sphere pairing and the reproducing integral

// (f1, f2)_mu = (sqrt(1 + mu^2 R^2) / 2pi^2) * integral over S^3_R of
// (deg~ f1) f2 dS / R.
inline cplx pairing_mu(const ScalarField& f1, const ScalarField& f2, double mu,
                       double R, int l_max = 8) {
  AdSParams{mu};
  const auto dt =
      std::get<ScalarField>(apply_operator(OperatorKind::deg_tilde, f1));
  const auto rule = build_sphere_rule(R, l_max);
  const cplx s = integrate_nodes(rule, [&](const BiQuaternion& z) {
    return dt.value(z) * f2.value(z);
  });
  return s * std::sqrt(1.0 + mu * mu * R * R) / (2.0 * kPi * kPi * R);
}

// Pair the field on S^3_R against the deformed kernel: the plus side
// reproduces fields regular in the ball at interior points, the minus side
// (with the opposite sign) fields regular at infinity at exterior points.
// The automatic quadrature order follows the kernel tail ratio
// tanh(theta_</2) / tanh(theta_>/2) and is capped at l_max = 48, so points
// very close to the sphere lose accuracy rather than exhaust memory.
inline cplx poisson_mu_eval(const ScalarField& phi, const BiQuaternion& y,
                            double mu, double R, PoissonSide side,
                            int l_max = -1) {
  AdSParams{mu};
  if (!(R > 0.0)) throw BadRadius("sphere radius must be positive");
  if (!is_real_quaternion(y))
    throw OutOfDomain("evaluation point must be a real quaternion");
  const double ny = norm(y).real();
  if (std::abs(ny - R * R) <= 1e-9 * R * R)
    throw OnBoundary("evaluation point lies on the integration sphere");
  const bool inside = ny < R * R;
  if (inside != (side == PoissonSide::plus))
    throw OutOfDomain("evaluation point is on the wrong side of the sphere");
  if (l_max < 0) {
    const double tr = std::tanh(0.5 * std::asinh(mu * R));
    const double ty = std::tanh(0.5 * std::asinh(mu * std::sqrt(ny)));
    const double q = inside ? ty / tr : tr / ty;
    int two_l = 0;
    if (q > 0.0)
      two_l = static_cast<int>(std::ceil(std::log(1e-13) / std::log(q)));
    l_max = std::clamp((two_l + 1) / 2 + 6, 8, 48);
  }
  const auto dt =
      std::get<ScalarField>(apply_operator(OperatorKind::deg_tilde, phi));
  const auto rule = build_sphere_rule(R, l_max);
  const cplx s = integrate_nodes(rule, [&](const BiQuaternion& x) {
    return dt.value(x) * K_mu_eval(x, y, mu);
  });
  const double sg = side == PoissonSide::plus ? 1.0 : -1.0;
  return sg * s * std::sqrt(1.0 + mu * mu * R * R) / (2.0 * kPi * kPi * R);
}

// Partial character expansion of the deformed kernel,
//   sum over 2l of (mu^2 / ((s_X + 1)(s_Y - 1)))^(2l+1) chi_l(X Y^+),
// valid for N(X) < N(Y); the tail contracts by b/a per half step of l.
inline double K_mu_expansion_partial(const BiQuaternion& x,
                                     const BiQuaternion& y, double mu,
                                     int two_l_max) {
  AdSParams{mu};
  if (two_l_max < 0 || two_l_max > detail::kMaxTwoL)
    throw InvalidIndex("truncation degree out of supported range [0, 64]");
  if (!is_real_quaternion(x) || !is_real_quaternion(y))
    throw OutOfDomain("expansion is evaluated at real quaternions");
  const double nx = norm(x).real();
  const double ny = norm(y).real();
  if (!(nx < ny))
    throw OutsideConvergenceRegion(
        "character expansion of the deformed kernel needs N(X) < N(Y)");
  const double sx = std::sqrt(1.0 + mu * mu * nx);
  const double sy = std::sqrt(1.0 + mu * mu * ny);
  const double c = mu * mu / ((sx + 1.0) * (sy - 1.0));
  const BiQuaternion prod = x * conj_plus(y);
  double sum = 0.0;
  double f = c;
  for (int two_l = 0; two_l <= two_l_max; ++two_l) {
    sum += f * chi(two_l, prod).real();
    f *= c;
  }
  return sum;
}

// ---------------------------------------------------------------------------
// the conformal action through the cone

struct Mat6 {
  std::array<std::array<double, 6>, 6> m{};

  static Mat6 id() {
    Mat6 r;
    for (int i = 0; i < 6; ++i) r.m[i][i] = 1.0;
    return r;
  }
};

inline Mat6 operator+(const Mat6& x, const Mat6& y) {
  Mat6 r;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) r.m[i][j] = x.m[i][j] + y.m[i][j];
  return r;
}

inline Mat6 operator*(const Mat6& x, const Mat6& y) {
  Mat6 r;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      double s = 0.0;
      for (int k = 0; k < 6; ++k) s += x.m[i][k] * y.m[k][j];
      r.m[i][j] = s;
    }
  return r;
}

inline Mat6 operator*(double s, const Mat6& x) {
  Mat6 r;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) r.m[i][j] = s * x.m[i][j];
  return r;
}

inline double max_abs(const Mat6& x) {
  double r = 0.0;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) r = std::max(r, std::abs(x.m[i][j]));
  return r;
}

inline Mat6 transpose(const Mat6& x) {
  Mat6 r;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) r.m[i][j] = x.m[j][i];
  return r;
}

// diag(1, -1, -1, -1, -1, -1)
inline Mat6 eta6() {
  Mat6 r = Mat6::id();
  for (int i = 1; i < 6; ++i) r.m[i][i] = -1.0;
  return r;
}

// Basis of the Lorentz algebra in signature (1,5): five boosts J_{0i}
// followed by the ten rotations J_{ij}, 1 <= i < j <= 5.
inline std::array<Mat6, 15> so15_basis() {
  std::array<Mat6, 15> r{};
  int k = 0;
  for (int i = 1; i < 6; ++i) {
    r[k].m[0][i] = 1.0;
    r[k].m[i][0] = 1.0;
    ++k;
  }
  for (int i = 1; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j) {
      r[k].m[i][j] = 1.0;
      r[k].m[j][i] = -1.0;
      ++k;
    }
  return r;
}

inline Mat6 mat6_exp(const Mat6& x) {
  int squarings = 0;
  double scale = 1.0;
  for (double m = max_abs(x); m * scale > 0.5 && squarings < 60; ++squarings)
    scale *= 0.5;
  const Mat6 xs = scale * x;
  Mat6 sum = Mat6::id();
  Mat6 term = Mat6::id();
  for (int k = 1; k <= 24; ++k) {
    term = (1.0 / k) * (term * xs);
    sum = sum + term;
    if (max_abs(term) < 1e-18) break;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

// Inverse of a group element: eta a^T eta.
inline Mat6 so15_inverse(const Mat6& a) {
  return eta6() * transpose(a) * eta6();
}

inline bool in_so15(const Mat6& a, double tol = 1e-10) {
  const Mat6 r = transpose(a) * eta6() * a + (-1.0) * eta6();
  const double s = std::max(1.0, max_abs(a) * max_abs(a));
  return max_abs(r) <= tol * s && a.m[0][0] > 0.0;
}

namespace detail {

// Projective action at one point: lift X to the cone section w5 = rho0,
// apply the inverse group element, rescale back to the section, pull the
// point down to quaternion space and weight by (nu / rho0)^lambda.
template <class S, class F>
S so15_apply(const Mat6& inv, double rho0, double mu, int lambda,
             const Mat2<S>& z, F&& phi_at) {
  using std::sqrt;
  const auto c = components(z);
  const S root = sqrt(S{1.0} + (mu * mu) * norm(z));
  std::array<S, 6> w;
  w[0] = S{rho0} * root;
  for (int i = 0; i < 4; ++i) w[1 + i] = c[i];
  w[5] = S{rho0};
  std::array<S, 6> v;
  for (int r = 0; r < 6; ++r) {
    S s{0.0};
    for (int k = 0; k < 6; ++k) s = s + S{inv.m[r][k]} * w[k];
    v[r] = s;
  }
  double sc = rho0;
  for (int k = 0; k < 6; ++k) sc = std::max(sc, std::abs(plain(w[k])));
  if (std::abs(plain(v[5])) <= 1e-12 * sc)
    throw ProjectiveSingularity("conformal action crosses the horizon w5 = 0");
  const S nu_inv = S{1.0} / v[5];
  const Mat2<S> zp = from_components(v[1] * nu_inv * (1.0 / mu),
                                     v[2] * nu_inv * (1.0 / mu),
                                     v[3] * nu_inv * (1.0 / mu),
                                     v[4] * nu_inv * (1.0 / mu));
  const S wgt = lambda <= 0 ? int_pow(S{rho0} * nu_inv, -lambda)
                            : int_pow(v[5] * S{1.0 / rho0}, lambda);
  return wgt * phi_at(zp);
}

}  // namespace detail

// Projective action of the Lorentz group of the (1,5) cone on fields of the
// quaternion variable, with weight lambda (the nu-power of the cocycle);
// lambda = -1 is the action the rest of the module is built around, other
// weights are exposed untested.  rho0 is the hyperboloid radius and fixes
// the deformation parameter mu = 1/rho0.  The matrix must satisfy
// a^T eta a = eta (see in_so15); the inverse is formed metrically.
inline ScalarField so15_action_field(const Mat6& a, const ScalarField& phi,
                                     double rho0, int lambda = -1) {
  if (!(rho0 > 0.0)) throw ConfigInvalid("hyperboloid radius must be positive");
  const double mu = 1.0 / rho0;
  const Mat6 inv = so15_inverse(a);
  ScalarField r;
  r.orders = phi.orders;
  r.f0 = [inv, rho0, mu, lambda, g = phi.f0](const BiQuaternion& z) -> cplx {
    return detail::so15_apply<cplx>(inv, rho0, mu, lambda, z, g);
  };
  if (phi.f1)
    r.f1 = [inv, rho0, mu, lambda, g = phi.f1](const Mat2<D1>& z) -> D1 {
      return detail::so15_apply<D1>(inv, rho0, mu, lambda, z, g);
    };
  if (phi.f2)
    r.f2 = [inv, rho0, mu, lambda, g = phi.f2](const Mat2<D2>& z) -> D2 {
      return detail::so15_apply<D2>(inv, rho0, mu, lambda, z, g);
    };
  if (phi.dom)
    // Horizon points are left inside the domain so the evaluator can raise
    // ProjectiveSingularity; otherwise check the pulled-back point against
    // the parent domain.
    r.dom = [inv, rho0, mu, pd = phi.dom](const BiQuaternion& z) -> bool {
      const auto c = components(z);
      const cplx root = std::sqrt(cplx{1.0} + (mu * mu) * norm(z));
      const std::array<cplx, 6> w{rho0 * root, c[0], c[1],
                                  c[2],        c[3], cplx{rho0}};
      std::array<cplx, 6> v;
      for (int rr = 0; rr < 6; ++rr) {
        cplx s{0.0};
        for (int k = 0; k < 6; ++k) s += inv.m[rr][k] * w[k];
        v[rr] = s;
      }
      double sc = rho0;
      for (int k = 0; k < 6; ++k) sc = std::max(sc, std::abs(w[k]));
      if (std::abs(v[5]) <= 1e-12 * sc) return true;
      const cplx nu_inv = 1.0 / v[5];
      return pd(from_components(v[1] * nu_inv / mu, v[2] * nu_inv / mu,
                                v[3] * nu_inv / mu, v[4] * nu_inv / mu));
    };
  return r;
}

// ---------------------------------------------------------------------------
// five-variable extensions

// rho^lambda t^l_{m,n}(X) / (w0/rho +- 1)^(2l+1) with X = (w1..w4)/(mu rho)
// and rho the Lorentzian length; lambda must solve lambda(lambda+3)+2 = 0,
// i.e. be -1 or -2.  Defined on the open future cone (minus the spatial
// origin for the minus family).
inline Field5 extension_5d_field(const CoeffIndex& idx, int lambda,
                                 PoissonSide side, double mu) {
  idx.validate();
  AdSParams{mu};
  if (lambda != -1 && lambda != -2)
    throw InvalidLambda("radial exponent must be -1 or -2");
  const double sg = side == PoissonSide::plus ? 1.0 : -1.0;
  const int pw = idx.two_l + 1;
  auto dom = [side](const Minkowski5Point& p) {
    const double sp = p.w1 * p.w1 + p.w2 * p.w2 + p.w3 * p.w3 + p.w4 * p.w4;
    const double rho2 = p.w0 * p.w0 - sp;
    const double s = std::max(1.0, p.w0 * p.w0 + sp);
    if (p.w0 <= 0.0 || rho2 <= 1e-12 * s) return false;
    if (side == PoissonSide::minus && sp <= 1e-12 * s) return false;
    return true;
  };
  return Field5::closed_form(
      [idx, lambda, mu, sg, pw](const auto& w) {
        using S = std::decay_t<decltype(w[0])>;
        using std::sqrt;
        const S rho2 = w[0] * w[0] - w[1] * w[1] - w[2] * w[2] -
                       w[3] * w[3] - w[4] * w[4];
        const S rho = sqrt(rho2);
        const S xs = S{1.0} / (S{mu} * rho);
        const Mat2<S> x = from_components(w[1] * xs, w[2] * xs, w[3] * xs,
                                          w[4] * xs);
        const S root = w[0] / rho;  // = sqrt(1 + mu^2 N(X)) on the cone
        const S radial = lambda == -1 ? S{1.0} / rho : S{1.0} / rho2;
        return radial * t_coeff(idx, x) / detail::int_pow(root + S{sg}, pw);
      },
      dom);
}

}  // namespace biquat
