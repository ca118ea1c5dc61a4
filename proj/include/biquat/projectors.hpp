// Projections of the Laurent space onto its three irreducible components,
// built from cycle integrals against first- and second-order poles of the
// norm: the two-variable embedding integral, the one-sided projectors, the
// limit projector onto the middle component, the sphere Poisson operators,
// partial sums of the pole expansions, and the four-point composite kernel.
//
// Two evaluation strategies are used.  Generic off-cycle points go through
// streamed product quadrature over the cycle, with angular orders chosen
// from the distance of the points to the cycle (the kernel's Laurent tail
// decays geometrically in that ratio).  Points of the form c * B with B a
// unitary matrix ("same-base" configurations, which include every point of
// the cycle itself) are evaluated exactly: left translation by B reduces the
// integral to the maximal torus, where the radial factor becomes an explicit
// table of contour residues and the field enters only through the Fourier
// coefficients of its Weyl symbol.  The exact route is what makes boundary
// limits — and hence the middle-component projector — computable.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "biquat/quadrature.hpp"
#include "biquat/spaces.hpp"

namespace biquat {

// ---------------------------------------------------------------------------
// limit schedule for the middle-component projector

// Stages of the two-parameter limit (radial s -> 1, then angular theta -> 0)
// together with the extrapolation order applied to each parameter and a
// quadrature order increment applied per angular stage.
struct LimitSchedule {
  std::vector<double> s_stages{0.9, 0.95, 0.975};
  std::vector<double> theta_stages{0.3, 0.15, 0.075};
  int order_boost = 2;
  int extrapolation_order = 2;

  void validate() const {
    if (s_stages.size() < 3 || theta_stages.size() < 3)
      throw ConfigInvalid("limit schedule needs at least three stages");
    for (std::size_t i = 0; i < s_stages.size(); ++i) {
      if (!(s_stages[i] > 0.0 && s_stages[i] < 1.0))
        throw ConfigInvalid("radial stages must lie in (0, 1)");
      if (i && !(s_stages[i] > s_stages[i - 1]))
        throw ConfigInvalid("radial stages must increase strictly");
    }
    for (std::size_t i = 0; i < theta_stages.size(); ++i) {
      if (!(theta_stages[i] > 0.0))
        throw ConfigInvalid("angular stages must be positive");
      if (i && !(theta_stages[i] < theta_stages[i - 1]))
        throw ConfigInvalid("angular stages must decrease strictly");
    }
    if (order_boost < 0) throw ConfigInvalid("order boost must be nonnegative");
    if (extrapolation_order < 1)
      throw ConfigInvalid("extrapolation order must be at least one");
    const std::size_t need =
        static_cast<std::size_t>(extrapolation_order) + 1;
    if (s_stages.size() < need || theta_stages.size() < need)
      throw ConfigInvalid("extrapolation order exceeds the stage count");
  }
};

enum class PoissonSide { plus, minus };
enum class KernelExpansionKind { first_order, second_order };

namespace detail {

// ---------------------------------------------------------------------------
// geometry helpers

inline std::pair<double, double> singular_values(const BiQuaternion& z) {
  const double t = std::norm(z.z11) + std::norm(z.z12) + std::norm(z.z21) +
                   std::norm(z.z22);
  const double d = std::abs(norm(z));
  const double disc = std::sqrt(std::max(0.0, t * t - 4.0 * d * d));
  const double hi = 0.5 * (t + disc);
  const double lo = (hi > 0.0) ? (d * d) / hi : 0.0;
  return {std::sqrt(lo), std::sqrt(hi)};
}

// Closest-approach ratio of a point to the cycle of radius R: the geometric
// rate of the kernel tail.  1.0 means the point straddles or touches the
// cycle.
inline double cycle_ratio(const BiQuaternion& z, double R) {
  const auto [lo, hi] = singular_values(z);
  if (hi < R) return hi / R;
  if (lo > R) return R / lo;
  return 1.0;
}

// Laurent degree at which a tail of rate q drops below 1e-11; the guard
// against points too close to the cycle lives here.
inline int tail_degree(double q) {
  if (q > 0.8)
    throw OnBoundary(
        "evaluation point too close to the integration cycle for reliable "
        "quadrature");
  if (q <= 0.05) return 24;
  const double n = (std::log(1e-11) + std::log1p(-q)) / std::log(q);
  return std::max(24, static_cast<int>(std::ceil(n)) + 12);
}

inline cplx cpow_int(const cplx& base, int e) {
  if (e >= 0) return int_pow(base, e);
  return cplx{1.0} / int_pow(base, -e);
}

// ---------------------------------------------------------------------------
// streamed product quadrature over the cycle

// Same node and weight layout as build_u2_rule (without the deformed radial
// factor), but never materialized: only one unitary frame per angular triple
// is cached and each radial slice is reduced pairwise, so arbitrarily fine
// orders stay within a fixed memory budget.
template <class F>
cplx u2_kernel_integral(double R, int l_max, int k_range, F&& f) {
  const int n_phi = 4 * l_max + 5;
  const int n_psi = 4 * l_max + 5;
  const int n_theta = 2 * l_max + 3;
  const int n_alpha = 4 * (l_max + k_range) + 5;
  const auto [gx, gw] = gauss_legendre(n_theta);

  const std::size_t frame_count =
      static_cast<std::size_t>(n_theta) * n_phi * n_psi;
  std::vector<BiQuaternion> frames;
  std::vector<double> frame_w;
  frames.reserve(frame_count);
  frame_w.reserve(frame_count);
  for (int it = 0; it < n_theta; ++it) {
    const double theta = std::acos(gx[it]);
    for (int ip = 0; ip < n_phi; ++ip) {
      const double phi = 2.0 * kPi * ip / n_phi;
      for (int is = 0; is < n_psi; ++is) {
        const double psi = 4.0 * kPi * is / n_psi;
        frames.push_back(su2_euler(phi, theta, psi));
        frame_w.push_back(gw[it]);
      }
    }
  }

  const double base = (R * R * R * R / 8.0) * (kPi / n_alpha) *
                      (2.0 * kPi / n_phi) * (4.0 * kPi / n_psi);
  std::vector<cplx> slice(frame_count);
  std::vector<cplx> partials(n_alpha);
  for (int ia = 0; ia < n_alpha; ++ia) {
    const double alpha = kPi * ia / n_alpha;
    const cplx rot = R * std::exp(cplx(0.0, alpha));
    for (std::size_t j = 0; j < frame_count; ++j)
      slice[j] = frame_w[j] * f(rot * frames[j]);
    const cplx radial =
        cplx(0.0, -1.0) * base * std::exp(cplx(0.0, 4.0 * alpha));
    partials[ia] = radial * pairwise_sum(slice.data(), slice.size());
  }
  return pairwise_sum(partials.data(), partials.size());
}

// ---------------------------------------------------------------------------
// exact evaluation at same-base configurations

struct NormalSplit {
  BiQuaternion base;  // unitary, unit determinant
  cplx c;             // z = c * base
};

inline std::optional<NormalSplit> try_normal_split(const BiQuaternion& z) {
  const cplx c = std::sqrt(norm(z));
  const double scale = std::max(1.0, max_abs(z));
  if (std::abs(c) < 1e-12 * scale) return std::nullopt;
  const BiQuaternion b = (cplx{1.0} / c) * z;
  if (max_abs(b * star(b) - BiQuaternion::id()) > 1e-10) return std::nullopt;
  return NormalSplit{b, c};
}

struct SameBasePair {
  BiQuaternion base;
  cplx c1, c2;
};

inline std::optional<SameBasePair> try_same_base(const BiQuaternion& z1,
                                                 const BiQuaternion& z2) {
  const auto s1 = try_normal_split(z1);
  if (!s1) return std::nullopt;
  const BiQuaternion m = star(s1->base) * z2;
  const cplx c2 = 0.5 * (m.z11 + m.z22);
  if (max_abs(m - scalar_mat(c2)) > 1e-10 * std::max(1.0, std::abs(c2)))
    return std::nullopt;
  return SameBasePair{s1->base, s1->c, c2};
}

// Residues of v^{r-1} / ((v - c1)(v - c2)) over the unit circle, with the
// location of each pole relative to the circle supplied explicitly so that
// boundary limits (|c| = 1) can be taken from the intended side.
struct RadialResidues {
  cplx c1, c2;
  bool in1, in2;

  cplx at(int r) const {
    const cplx d = c1 - c2;
    const bool confluent = std::abs(d) <= 1e-12 * std::max(std::abs(c1), 1.0);
    if (in1 && in2) {
      if (r <= 0) return cplx{0.0};
      if (confluent) return double(r - 1) * cpow_int(c1, r - 2);
      return (cpow_int(c1, r - 1) - cpow_int(c2, r - 1)) / d;
    }
    if (!in1 && !in2) {
      if (r >= 1) return cplx{0.0};
      if (confluent) return double(1 - r) * cpow_int(c1, r - 2);
      return (cpow_int(c2, r - 1) - cpow_int(c1, r - 1)) / d;
    }
    if (confluent)
      throw DegenerateEigenvalues(
          "coincident radial parameters on opposite sides of the circle");
    const cplx inner = in1 ? c1 : c2;
    const cplx outer = in1 ? c2 : c1;
    if (r >= 1) return cpow_int(inner, r - 1) / (inner - outer);
    return cpow_int(outer, r - 1) / (inner - outer);
  }
};

// Exact evaluator of the two-pole cycle integral at points c1 * B, c2 * B
// sharing a unitary base B.  Left translation by B and Weyl reduction turn
// the integral into a finite sum over the Fourier coefficients of
//   h(v1, v2) = int_{SU(2)} f(R * B U diag(v1, v2) U^+) dU,
// paired against contour residues of the radial factor.  Exact whenever the
// symbol's Laurent band fits inside the ring window and the SU(2) order
// resolves the field's matrix-coefficient degree.
class SameBaseContext {
 public:
  SameBaseContext(const ScalarField& f, const BiQuaternion& base, double R,
                  int su2_l_max, int ring_size)
      : n_(std::max(5, ring_size) | 1) {
    const SurfaceRule su2 = build_sphere_rule(1.0, su2_l_max);
    const double haar = 1.0 / (2.0 * kPi * kPi);
    std::vector<cplx> v(n_);
    for (int a = 0; a < n_; ++a)
      v[a] = std::exp(cplx(0.0, 2.0 * kPi * a / n_));

    std::vector<cplx> grid(static_cast<std::size_t>(n_) * n_, cplx{0.0});
    for (std::size_t u = 0; u < su2.nodes.size(); ++u) {
      const BiQuaternion p = base * su2.nodes[u];
      const BiQuaternion q = star(su2.nodes[u]);
      // rank-one pieces of P diag(v1, v2) Q
      const BiQuaternion m1{p.z11 * q.z11, p.z11 * q.z12, p.z21 * q.z11,
                            p.z21 * q.z12};
      const BiQuaternion m2{p.z12 * q.z21, p.z12 * q.z22, p.z22 * q.z21,
                            p.z22 * q.z22};
      const double w = su2.weights[u].real() * haar;
      for (int a = 0; a < n_; ++a) {
        const BiQuaternion part = v[a] * m1;
        for (int b = 0; b < n_; ++b)
          grid[static_cast<std::size_t>(a) * n_ + b] +=
              w * f.value(R * (part + v[b] * m2));
      }
    }

    // ring transform; exponents are read off the symmetric window
    std::vector<cplx> twiddle(n_);
    for (int m = 0; m < n_; ++m)
      twiddle[m] = std::exp(cplx(0.0, -2.0 * kPi * m / n_));
    hat_.assign(static_cast<std::size_t>(n_) * n_, cplx{0.0});
    const double inv = 1.0 / (static_cast<double>(n_) * n_);
    for (int pi = 0; pi < n_; ++pi)
      for (int qi = 0; qi < n_; ++qi) {
        cplx acc{0.0};
        for (int a = 0; a < n_; ++a) {
          cplx row{0.0};
          for (int b = 0; b < n_; ++b)
            row += grid[static_cast<std::size_t>(a) * n_ + b] *
                   twiddle[(b * qi) % n_];
          acc += row * twiddle[(a * pi) % n_];
        }
        hat_[static_cast<std::size_t>(pi) * n_ + qi] = acc * inv;
      }
  }

  // Value of the normalized cycle integral of f against the two-pole kernel
  // at (c1 * base, c2 * base), radii already divided out; the inside flags
  // select the residue case (and thereby the side of any boundary limit).
  cplx eval(cplx c1, bool inside1, cplx c2, bool inside2) const {
    const RadialResidues rr{c1, c2, inside1, inside2};
    const int half = (n_ - 1) / 2;
    std::vector<cplx> a(static_cast<std::size_t>(2 * half + 7));
    const int off = half + 3;  // index of r = 0
    for (int r = -half - 2; r <= half + 3; ++r) a[r + off] = rr.at(r);
    cplx acc{0.0};
    for (int pi = 0; pi < n_; ++pi) {
      const int p = (pi <= half) ? pi : pi - n_;
      for (int qi = 0; qi < n_; ++qi) {
        const int q = (qi <= half) ? qi : qi - n_;
        const cplx t = 0.5 * (2.0 * a[p + 2 + off] * a[q + 2 + off] -
                              a[p + 3 + off] * a[q + 1 + off] -
                              a[p + 1 + off] * a[q + 3 + off]);
        acc += hat_[static_cast<std::size_t>(pi) * n_ + qi] * t;
      }
    }
    return acc;
  }

  int ring_size() const { return n_; }

 private:
  int n_;
  std::vector<cplx> hat_;
};

// Polynomial extrapolation to x = 0 through the last (order + 1) samples.
inline cplx extrapolate_to_zero(const std::vector<double>& xs,
                                const std::vector<cplx>& ys, int order) {
  const int k = order + 1;
  if (static_cast<int>(xs.size()) < k || xs.size() != ys.size())
    throw ConfigInvalid("not enough stages for the extrapolation order");
  const std::size_t off = xs.size() - k;
  std::vector<cplx> t(ys.begin() + off, ys.end());
  std::vector<double> x(xs.begin() + off, xs.end());
  for (int m = 1; m < k; ++m)
    for (int i = 0; i + m < k; ++i)
      t[i] = (x[i + m] * t[i] - x[i] * t[i + 1]) / (x[i + m] - x[i]);
  return t[0];
}

inline void require_off_cycle(double c_abs, double R) {
  if (std::abs(c_abs - R) <= 1e-9 * R)
    throw OnBoundary("evaluation point lies on the integration cycle");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// the two-variable embedding integral

// Normalized cycle integral of f against the product of two first-order
// poles centered at z1 and z2.  Both points must be strictly off the cycle
// (either side is allowed; the value depends on the arrangement).  Same-base
// pairs are evaluated exactly; other pairs by streamed quadrature with
// orders chosen from their distance to the cycle, raised further by
// order_boost.
inline cplx I_R_eval(const ScalarField& f, const BiQuaternion& z1,
                     const BiQuaternion& z2, double R, int order_boost = 0) {
  if (!(R > 0.0)) throw BadRadius("cycle radius must be positive");
  if (const auto sb = detail::try_same_base(z1, z2)) {
    const double r1 = std::abs(sb->c1), r2 = std::abs(sb->c2);
    detail::require_off_cycle(r1, R);
    detail::require_off_cycle(r2, R);
    const detail::SameBaseContext ctx(f, sb->base, R, 3 + order_boost / 2,
                                      17 + 2 * order_boost);
    return ctx.eval(sb->c1 / R, r1 < R, sb->c2 / R, r2 < R);
  }
  const double q =
      std::max(detail::cycle_ratio(z1, R), detail::cycle_ratio(z2, R));
  const int deg = detail::tail_degree(q);
  const int l_max = (deg - 5 + 3) / 4 + order_boost;
  const cplx scale = cplx(0.0, 1.0) / (2.0 * kPi * kPi * kPi);
  return scale * detail::u2_kernel_integral(
                     R, l_max, 3 + order_boost, [&](const BiQuaternion& w) {
                       return f.value(w) / (norm(w - z1) * norm(w - z2));
                     });
}

// ---------------------------------------------------------------------------
// one-sided projectors (second-order pole)

// Cycle integral of f against the squared pole at z.  For z strictly inside
// the cycle this projects onto the polynomial component; strictly outside,
// onto the component generated by the inverse square of the norm.  Points
// with two equal singular values take the exact route (su2_l_max and
// ring_size bound the symbol resolution there); generic points stream.
inline cplx P_pm_eval(const ScalarField& f, const BiQuaternion& z, double R,
                      int order_boost = 0, int su2_l_max = 3,
                      int ring_size = 17) {
  if (!(R > 0.0)) throw BadRadius("cycle radius must be positive");
  if (const auto ns = detail::try_normal_split(z)) {
    const double r = std::abs(ns->c);
    detail::require_off_cycle(r, R);
    const detail::SameBaseContext ctx(f, ns->base, R, su2_l_max, ring_size);
    return ctx.eval(ns->c / R, r < R, ns->c / R, r < R);
  }
  const double q = detail::cycle_ratio(z, R);
  const int deg = detail::tail_degree(q);
  const int l_max = (deg - 5 + 3) / 4 + order_boost;
  const cplx scale = cplx(0.0, 1.0) / (2.0 * kPi * kPi * kPi);
  return scale * detail::u2_kernel_integral(
                     R, l_max, 3 + order_boost, [&](const BiQuaternion& w) {
                       const cplx n = norm(w - z);
                       return f.value(w) / (n * n);
                     });
}

// ---------------------------------------------------------------------------
// mixed-arrangement closed form

// Value of the embedding integral of the inverse norm when z1 sits inside
// and z2 outside the cycle, as a function of the eigenvalues of z1 * z2^{-1}
// (principal logarithm).  Coincident eigenvalues are refused; the confluent
// value is the continuous limit log -> 1/(1 - lambda).
inline cplx I_mixed_closed_form(const BiQuaternion& z1,
                                const BiQuaternion& z2) {
  const BiQuaternion m = z1 * inverse(z2);
  const auto [l1, l2] = eigenvalues(m);
  if (std::abs(l1 - l2) <= 1e-8 * std::max(1.0, std::abs(l1)))
    throw DegenerateEigenvalues(
        "eigenvalues of z1 z2^{-1} are numerically coincident");
  return std::log((cplx{1.0} - l1) / (cplx{1.0} - l2)) /
         (norm(z2) * (l2 - l1));
}

// ---------------------------------------------------------------------------
// the middle-component projector

// Negated symmetric two-term limit of the embedding integral at the pair
// (s e^{i theta} z, s^{-1} e^{-i theta} z) plus its radially swapped twin,
// extrapolated first in the radial stages (at fixed angle) and then in the
// angular stages, exactly in the order the limits are taken.  z must lie on
// the cycle.  Two refinements make the extrapolation well-posed: each stage
// is averaged with its mirror image across the cycle (s -> 1/s with the
// residue roles held fixed), which cancels the odd part of the radial
// expansion, and the radial offsets log s are rescaled in proportion to the
// current angular stage, since the stage function is only analytic in a
// disk of radius theta around the cycle.  The even data is extrapolated in
// (log s)^2 and then in theta^2.  Throws NonConvergence when the dropped-
// order extrapolant disagrees beyond residual_tol.
inline cplx P_zero_eval(const ScalarField& f, const BiQuaternion& z, double R,
                        const LimitSchedule& sched = {},
                        double residual_tol = 1e-3, int su2_l_max = 3,
                        int ring_size = 17) {
  if (!(R > 0.0)) throw BadRadius("cycle radius must be positive");
  sched.validate();
  const auto ns = detail::try_normal_split(z);
  if (!ns || std::abs(std::abs(ns->c) - R) > 1e-8 * R)
    throw OutOfDomain("the limit projector needs a point on the cycle");
  const cplx c0 = ns->c / R;

  std::vector<double> txs;
  std::vector<cplx> tys;
  double last_radial_residual = 0.0;
  for (std::size_t j = 0; j < sched.theta_stages.size(); ++j) {
    const double theta = sched.theta_stages[j];
    const int boost = sched.order_boost * static_cast<int>(j);
    const detail::SameBaseContext ctx(f, ns->base, R,
                                      su2_l_max + (boost + 1) / 2,
                                      ring_size + 2 * boost);
    std::vector<double> sxs;
    std::vector<cplx> sys;
    for (const double s : sched.s_stages) {
      const double u = std::log(s) * (theta / sched.theta_stages.front());
      const double sc = std::exp(u);
      const cplx in_up = std::polar(sc, theta) * c0;
      const cplx out_dn = std::polar(1.0 / sc, -theta) * c0;
      const cplx out_up = std::polar(1.0 / sc, theta) * c0;
      const cplx in_dn = std::polar(sc, -theta) * c0;
      const cplx pair = ctx.eval(in_up, true, out_dn, false) +
                        ctx.eval(out_up, false, in_dn, true);
      const cplx mirror = ctx.eval(out_up, true, in_dn, false) +
                          ctx.eval(in_up, false, out_dn, true);
      sxs.push_back(u * u);
      sys.push_back(-0.5 * (pair + mirror));
    }
    const cplx full =
        detail::extrapolate_to_zero(sxs, sys, sched.extrapolation_order);
    const cplx drop =
        detail::extrapolate_to_zero(sxs, sys, sched.extrapolation_order - 1);
    last_radial_residual = std::abs(full - drop);
    txs.push_back(theta * theta);
    tys.push_back(full);
  }
  const cplx full =
      detail::extrapolate_to_zero(txs, tys, sched.extrapolation_order);
  const cplx drop =
      detail::extrapolate_to_zero(txs, tys, sched.extrapolation_order - 1);
  const double residual = std::abs(full - drop) + last_radial_residual;
  if (residual > residual_tol * std::max(1.0, std::abs(full)))
    throw NonConvergence("limit projector extrapolation did not settle");
  return full;
}

// One-sided boundary values of the three projectors at a point of the cycle:
// the plus and minus projectors are evaluated as exact interior/exterior
// limits, the middle one through the limit schedule.  Summing the three
// components reconstructs f on the cycle.
inline cplx P_component_limit(const ScalarField& f, ZhComponent comp,
                              const BiQuaternion& z, double R,
                              const LimitSchedule& sched = {},
                              int su2_l_max = 3, int ring_size = 17) {
  if (comp == ZhComponent::zero)
    return P_zero_eval(f, z, R, sched, 1e-3, su2_l_max, ring_size);
  if (!(R > 0.0)) throw BadRadius("cycle radius must be positive");
  const auto ns = detail::try_normal_split(z);
  if (!ns || std::abs(std::abs(ns->c) - R) > 1e-8 * R)
    throw OutOfDomain("the boundary limit needs a point on the cycle");
  const detail::SameBaseContext ctx(f, ns->base, R, su2_l_max, ring_size);
  const bool inside = comp == ZhComponent::plus;
  return ctx.eval(ns->c / R, inside, ns->c / R, inside);
}

// ---------------------------------------------------------------------------
// sphere Poisson operators

// Sphere integral of the scaled-degree derivative of phi against the
// first-order pole at z, normalized by the sphere volume and radius.  The
// side declares where z sits: plus needs z strictly inside the sphere,
// minus strictly outside.
inline cplx S_poisson_eval(const ScalarField& phi, PoissonSide side,
                           const BiQuaternion& z, double R,
                           int order_boost = 0) {
  if (!(R > 0.0)) throw BadRadius("sphere radius must be positive");
  const auto [lo, hi] = detail::singular_values(z);
  double q = 0.0;
  if (side == PoissonSide::plus) {
    if (!(hi < R))
      throw OutOfDomain("plus side expects a point inside the sphere");
    q = hi / R;
  } else {
    if (!(lo > R))
      throw OutOfDomain("minus side expects a point outside the sphere");
    q = R / lo;
  }
  const int deg = detail::tail_degree(q);
  const int l_max = (deg - 5 + 3) / 4 + order_boost;
  const ScalarField dphi =
      std::get<ScalarField>(apply_operator(OperatorKind::deg_tilde, phi));
  const SurfaceRule rule = build_sphere_rule(R, l_max);
  const cplx total = integrate_nodes(rule, [&](const BiQuaternion& x) {
    return dphi.value(x) / norm(x - z);
  });
  return total / (2.0 * kPi * kPi * R);
}

// ---------------------------------------------------------------------------
// partial sums of the pole expansions

// Truncated matrix-coefficient expansions of the first- and second-order
// poles of the norm.  The first kind sums the inverse-argument coefficients
// against polynomials and converges where z z^{-1}-composed with w stays
// strictly inside the unit ball of singular values; the second kind swaps
// the roles and adds the geometric ladder in the norm power (truncated
// jointly: two_l + 2k <= two_l_max).
inline cplx kernel_expansion_partial(KernelExpansionKind kind,
                                     const BiQuaternion& z,
                                     const BiQuaternion& w, int two_l_max) {
  if (two_l_max < 0 || two_l_max > detail::kMaxTwoL)
    throw ConfigInvalid("truncation order out of range");
  const auto dominated_ok = [](const BiQuaternion& d) {
    const double scale = max_abs(d);
    return scale > 0.0 && std::abs(norm(d)) > 1e-14 * scale * scale;
  };
  if (kind == KernelExpansionKind::first_order) {
    if (!dominated_ok(w))
      throw OutsideConvergenceRegion(
          "first-kind expansion needs z strictly dominated by w");
    const auto [lo, hi] = detail::singular_values(z * inverse(w));
    (void)lo;
    if (hi >= 0.999)
      throw OutsideConvergenceRegion(
          "first-kind expansion needs z strictly dominated by w");
    const cplx nw = norm(w);
    cplx acc{0.0};
    for (int tl = 0; tl <= two_l_max; ++tl) {
      cplx s{0.0};
      for (int tm = -tl; tm <= tl; tm += 2)
        for (int tn = -tl; tn <= tl; tn += 2)
          s += t_coeff(CoeffIndex{tl, tm, tn}, z) *
               t_coeff(CoeffIndex{tl, tn, tm}, conj_plus(w));
      acc += s * detail::cpow_int(nw, -tl - 1);
    }
    return acc;
  }
  if (!dominated_ok(z))
    throw OutsideConvergenceRegion(
        "second-kind expansion needs w strictly dominated by z");
  const auto [lo, hi] = detail::singular_values(w * inverse(z));
  (void)lo;
  if (hi >= 0.999)
    throw OutsideConvergenceRegion(
        "second-kind expansion needs w strictly dominated by z");
  const cplx nz = norm(z);
  const cplx rho = norm(w) / nz;
  cplx acc{0.0};
  for (int tl = 0; tl <= two_l_max; ++tl) {
    cplx s{0.0};
    for (int tm = -tl; tm <= tl; tm += 2)
      for (int tn = -tl; tn <= tl; tn += 2)
        s += t_coeff(CoeffIndex{tl, tn, tm}, w) *
             t_coeff(CoeffIndex{tl, tm, tn}, conj_plus(z));
    cplx ladder{0.0};
    cplx term{1.0};
    const int k_max = (two_l_max - tl) / 2;
    for (int k = 0; k <= k_max; ++k) {
      ladder += term;
      term *= rho;
    }
    acc += double(tl + 1) * s * ladder * detail::cpow_int(nz, -tl - 2);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// the four-point composite kernel

// Normalized unit-cycle integral of the product of four first-order poles.
// l_max sets the angular orders directly (doubling it is the intended
// stability check); every point must sit strictly off the cycle.
inline cplx p01_eval(const BiQuaternion& z1, const BiQuaternion& z2,
                     const BiQuaternion& w1, const BiQuaternion& w2,
                     int l_max) {
  if (l_max < 0) throw ConfigInvalid("l_max must be nonnegative");
  const double q = std::max(
      std::max(detail::cycle_ratio(z1, 1.0), detail::cycle_ratio(z2, 1.0)),
      std::max(detail::cycle_ratio(w1, 1.0), detail::cycle_ratio(w2, 1.0)));
  if (q > 0.9)
    throw OnBoundary("a pole center lies on or too close to the cycle");
  const cplx scale = cplx(0.0, 1.0) / (2.0 * kPi * kPi * kPi);
  return scale *
         detail::u2_kernel_integral(1.0, l_max, 2, [&](const BiQuaternion& t) {
           return 1.0 / (norm(z1 - t) * norm(z2 - t) * norm(w1 - t) *
                         norm(w2 - t));
         });
}

// ---------------------------------------------------------------------------
// Cayley transport

// Push a field through the fractional-linear identification of the matrix
// disk with the tube domain (or back), including the first-order multiplier
// of the left scalar action; harmonicity is preserved both ways.  Poles of
// the multiplier surface as SingularDenominator on evaluation.
inline ScalarField cayley_pushforward(const ScalarField& phi,
                                      CayleyDirection dir) {
  const GroupElement g = gamma_element();
  return group_action_field(
      dir == CayleyDirection::disk_to_tube ? g : g.inverse(), phi,
      ActionKind::pi0_l);
}

}  // namespace biquat
