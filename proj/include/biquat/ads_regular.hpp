#pragma once

// Regular functions of the deformed quaternionic calculus. A column pair
// (f1; f2) is left-regular when the deformed Dirac operator annihilates it,
// a row pair (g1, g2) is right-regular for the conjugate operator acting from
// the right. Such pairs arise as columns / rows of the shifted gradient of a
// wave-equation solution, integrate against the deformed quaternionic 3-form,
// and are reproduced by a Cauchy-type integral against the two-point kernel
// evaluated here in closed form.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <variant>

#include "biquat/ads_core.hpp"

namespace biquat {

enum class RegularSide { left, right };

// Round 3-cycle: the sphere |X - center| = radius with a real center.
// orientation +1 is the outward orientation the reproducing formula below is
// calibrated to; -1 integrates the same form with the opposite sign.
struct SphereCycle {
  BiQuaternion center = BiQuaternion::zero();
  double radius = 1.0;
  int orientation = 1;

  void validate() const {
    if (!is_real_quaternion(center))
      throw OutOfDomain("cycle center must be a real quaternion");
    if (!(radius > 0.0)) throw ConfigInvalid("cycle radius must be positive");
    if (orientation != 1 && orientation != -1)
      throw ConfigInvalid("cycle orientation must be +1 or -1");
  }
};

namespace detail {

// Spot-check that phi solves the deformed wave equation: the wave residual is
// sampled at a fixed spread of real points (those the field's domain admits)
// and compared against the field's own size there.
inline void certify_wave_kernel(const ScalarField& phi, double mu) {
  if (phi.orders < 2)
    throw DimensionMismatch(
        "regularity certification needs two derivative orders");
  const ScalarField res =
      std::get<ScalarField>(apply_operator(OperatorKind::box_mu_tilde, phi, mu));
  const std::array<BiQuaternion, 8> pts{
      from_real(0.31, 0.12, -0.23, 0.41), from_real(-0.52, 0.21, 0.33, -0.11),
      from_real(0.72, -0.41, 0.13, 0.22), from_real(0.21, 0.52, -0.31, -0.43),
      from_real(-0.13, -0.32, -0.51, 0.24), from_real(0.44, 0.16, 0.37, -0.26),
      from_real(-0.36, 0.43, -0.14, 0.32), from_real(0.61, 0.11, 0.52, 0.12)};
  int used = 0;
  for (const BiQuaternion& p : pts) {
    if (!phi.in_domain(p)) continue;
    const double scale = std::max(1.0, std::abs(phi.f0(p)));
    if (std::abs(res.f0(p)) > 1e-8 * scale)
      throw NotInKernel("field does not solve the deformed wave equation");
    ++used;
  }
  if (used == 0)
    throw NotInKernel("certification points all fall outside the field domain");
}

}  // namespace detail

// One certified regular pair from a wave-equation solution: column 1 or 2 of
// the left shifted gradient (these columns are left-regular), or row 1 or 2
// of the right shifted gradient (right-regular). The input must solve the
// deformed wave equation; this is certified by sampling before dispatch.
inline RegularPair make_regular(const ScalarField& phi, double mu,
                                RegularSide side, int column_or_row) {
  AdSParams{mu};
  if (column_or_row != 1 && column_or_row != 2)
    throw InvalidIndex("column/row selector must be 1 or 2");
  detail::certify_wave_kernel(phi, mu);
  const std::array<RegularPair, 2> parts = side == RegularSide::left
                                               ? make_regular(phi, mu)
                                               : make_regular_right(phi, mu);
  return parts[static_cast<std::size_t>(column_or_row - 1)];
}

namespace detail {

// Minkowski pairing of the two lifted points, arranged so nothing cancels for
// small mu: 2 mu^-2 (1 - s_x s_y) = -2 (nx + ny + mu^2 nx ny) / (1 + s_x s_y).
inline double lifted_pair(double nx, double ny, double tr, double mu) {
  const double sx = std::sqrt(1.0 + mu * mu * nx);
  const double sy = std::sqrt(1.0 + mu * mu * ny);
  return tr - 2.0 * (nx + ny + mu * mu * nx * ny) / (1.0 + sx * sy);
}

}  // namespace detail

// Closed form of the deformed Cauchy-Fueter kernel. side left is the kernel
// reproducing left-regular columns (it stands to the left of the 3-form in
// the reproducing integral); side right is the analogue for right-regular
// rows. The two share their off-diagonal blocks and differ in the diagonal
// ones: left carries +mu (Y X^+ + s), right carries -mu (X Y^+ + s), with the
// common scalar s equal to the lifted pairing minus half the trace term.
inline BlockMat k_mu_kernel_eval(const BiQuaternion& x, const BiQuaternion& y,
                                 double mu,
                                 RegularSide side = RegularSide::left) {
  AdSParams{mu};
  if (!is_real_quaternion(x) || !is_real_quaternion(y))
    throw OutOfDomain("kernel arguments must be real quaternions");
  const double nx = norm(x).real();
  const double ny = norm(y).real();
  const double sx = std::sqrt(1.0 + mu * mu * nx);
  const double sy = std::sqrt(1.0 + mu * mu * ny);
  const double tr = trace(x * conj_plus(y)).real();
  const double pair = detail::lifted_pair(nx, ny, tr, mu);
  if (std::abs(pair) < 1e-13 * std::max({1.0, nx, ny}))
    throw CoincidentPoints("kernel pole: the two points coincide");
  const double ip2 = 1.0 / (pair * pair);
  const double s = pair - 0.5 * tr;
  BlockMat k;
  k.b = ip2 * (sy * x - sx * y);
  k.c = ip2 * (sy * conj_plus(x) - sx * conj_plus(y));
  if (side == RegularSide::left) {
    k.a = (mu * ip2) * (y * conj_plus(x) + scalar_mat(s));
    k.d = (mu * ip2) * (conj_plus(y) * x + scalar_mat(s));
  } else {
    k.a = (-mu * ip2) * (x * conj_plus(y) + scalar_mat(s));
    k.d = (-mu * ip2) * (conj_plus(x) * y + scalar_mat(s));
  }
  return k;
}

namespace detail {

struct SphereFormBlocks {
  BiQuaternion d11, d12, d21, d22;
};

// Restriction of the deformed quaternionic 3-form to a sphere: the
// contribution of a node X with offset X' = X - center from the sphere's
// center is (row) * blocks * (column) * dS / radius. Only the conormal
// direction X' and the point X itself enter; at mu = 0 the diagonal blocks
// vanish and the classical normal form remains.
inline SphereFormBlocks sphere_form_blocks(const BiQuaternion& x,
                                           const BiQuaternion& xp, double mu) {
  SphereFormBlocks b;
  b.d12 = xp;
  b.d21 = conj_plus(xp);
  if (mu == 0.0) {
    b.d11 = BiQuaternion::zero();
    b.d22 = b.d11;
    return b;
  }
  const double h = 0.5 * mu / std::sqrt(1.0 + mu * mu * norm(x).real());
  b.d11 = h * (x * conj_plus(xp) - xp * conj_plus(x));
  b.d22 = h * (conj_plus(x) * xp - conj_plus(xp) * x);
  return b;
}

}  // namespace detail

// Surface pairing \oint (g1, g2) . Dx_mu . (f1; f2) over the cycle, a complex
// 2x2 value. g supplies the row blocks, f the column blocks; both must be
// defined on the whole cycle. order is the sphere rule degree. mu = 0
// evaluates the classical 3-form (vanishing diagonal blocks).
inline BiQuaternion surface_integral_form(const RegularPair& g,
                                          const RegularPair& f,
                                          const SphereCycle& cycle, double mu,
                                          int order = 16) {
  cycle.validate();
  if (mu < 0.0)
    throw ConfigInvalid("deformation parameter must be nonnegative");
  if (order < 1) throw ConfigInvalid("quadrature order must be positive");
  const SurfaceRule rule = build_sphere_rule(cycle.radius, order);
  const bool guarded = static_cast<bool>(g.a.dom) || static_cast<bool>(g.b.dom) ||
                       static_cast<bool>(f.a.dom) || static_cast<bool>(f.b.dom);
  BiQuaternion acc = BiQuaternion::zero();
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const BiQuaternion& xp = rule.nodes[i];
    const BiQuaternion x = cycle.center + xp;
    if (guarded && !(g.a.in_domain(x) && g.b.in_domain(x) &&
                     f.a.in_domain(x) && f.b.in_domain(x)))
      throw SingularOnCycle("integrand undefined at a cycle point");
    const detail::SphereFormBlocks d = detail::sphere_form_blocks(x, xp, mu);
    const BiQuaternion fa = f.a.f0(x);
    const BiQuaternion fb = f.b.f0(x);
    const BiQuaternion v = g.a.f0(x) * (d.d11 * fa + d.d12 * fb) +
                           g.b.f0(x) * (d.d21 * fa + d.d22 * fb);
    acc = acc + rule.weights[i] * v;
  }
  return (static_cast<double>(cycle.orientation) / cycle.radius) * acc;
}

// Reproducing integral (1 / 2 pi^2) \oint k_mu(X, Y) . Dx_mu . f(X) over the
// cycle: equals (f1(Y); f2(Y)) when the outward-oriented cycle encloses Y and
// f is left-regular inside, and 0 when Y lies outside and the cycle bounds a
// region of regularity. order < 1 picks the rule degree from the distance
// between Y and the cycle (closer points need finer rules).
inline std::array<BiQuaternion, 2> cauchy_fueter_integral(
    const RegularPair& f, const BiQuaternion& y, const SphereCycle& cycle,
    double mu, int order = -1) {
  cycle.validate();
  AdSParams{mu};
  if (!is_real_quaternion(y))
    throw OutOfDomain("evaluation point must be a real quaternion");
  const double dist = std::sqrt(norm(y - cycle.center).real());
  const double gap = std::abs(dist - cycle.radius);
  if (gap < 1e-3 * cycle.radius)
    throw SingularOnCycle("evaluation point lies on or too close to the cycle");
  if (order < 1)
    order = std::clamp(
        static_cast<int>(std::ceil(8.0 * cycle.radius / gap)) + 6, 10, 44);
  const SurfaceRule rule = build_sphere_rule(cycle.radius, order);
  const bool guarded = static_cast<bool>(f.a.dom) || static_cast<bool>(f.b.dom);
  BiQuaternion top = BiQuaternion::zero();
  BiQuaternion bot = BiQuaternion::zero();
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const BiQuaternion& xp = rule.nodes[i];
    const BiQuaternion x = cycle.center + xp;
    if (guarded && !(f.a.in_domain(x) && f.b.in_domain(x)))
      throw SingularOnCycle("integrand undefined at a cycle point");
    const BlockMat k = k_mu_kernel_eval(x, y, mu, RegularSide::left);
    const detail::SphereFormBlocks d = detail::sphere_form_blocks(x, xp, mu);
    const BiQuaternion fa = f.a.f0(x);
    const BiQuaternion fb = f.b.f0(x);
    const BiQuaternion c1 = d.d11 * fa + d.d12 * fb;
    const BiQuaternion c2 = d.d21 * fa + d.d22 * fb;
    top = top + rule.weights[i] * (k.a * c1 + k.b * c2);
    bot = bot + rule.weights[i] * (k.c * c1 + k.d * c2);
  }
  const double pref = static_cast<double>(cycle.orientation) /
                      (2.0 * kPi * kPi * cycle.radius);
  return {pref * top, pref * bot};
}

}  // namespace biquat
