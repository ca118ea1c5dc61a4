#pragma once

// Spectral quadrature over the three cycles the pairings live on: the round
// sphere S^3_R, the compact form U(2)_R carrying the holomorphic 4-form dV,
// and the deformed measure dV_{R,mu} on the same cycle.  Product rules in the
// Euler coordinates (alpha, phi, theta, psi): uniform grids in the periodic
// angles (trig-polynomial exactness), Gauss-Legendre in cos(theta).
//
// Orientation is pinned by the calibration integral of 1/N^2 over U(2)_R,
// which must come out to -2*pi^3*i; the sphere rule's weights sum to the
// total mass 2*pi^2*R^3.

#include <cmath>
#include <cstdlib>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "biquat/algebra.hpp"
#include "biquat/calculus.hpp"
#include "biquat/errors.hpp"

namespace biquat {

struct RuleOrders {
  int n_alpha = 0, n_phi = 0, n_theta = 0, n_psi = 0;
};

struct RuleDescriptor {
  std::string kind;  // "s3" or "u2"
  double R = 0.0;
  std::optional<double> mu;
  RuleOrders orders;
};

struct SurfaceRule {
  std::vector<BiQuaternion> nodes;
  std::vector<cplx> weights;
  RuleDescriptor descriptor;
};

// Uniform loop in the complex plane; exact for Laurent polynomials about the
// center of degree up to count - 1.
struct ContourRule {
  cplx center{};
  double radius = 1.0;
  int count = 16;
};

namespace detail {

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on the
// three-term recurrence.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(
    int n) {
  std::vector<double> x(n), w(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = -p1 / pp;
      t += dt;
      if (std::abs(dt) < 1e-15) break;
    }
    x[i] = -t;
    x[n - 1 - i] = t;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * pp * pp);
  }
  return {std::move(x), std::move(w)};
}

inline int env_workers() {
  if (const char* s = std::getenv("BIQUAT_WORKERS")) {
    const int v = std::atoi(s);
    if (v >= 1 && v <= 64) return v;
  }
  return 1;
}

inline cplx pairwise_sum(const cplx* p, std::size_t n) {
  if (n <= 8) {
    cplx s{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) s += p[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(p, h) + pairwise_sum(p + h, n - h);
}

}  // namespace detail

inline SurfaceRule build_sphere_rule(double R, int l_max) {
  if (!(R > 0.0)) throw BadRadius("sphere radius must be positive");
  if (l_max < 0) throw ConfigInvalid("l_max must be nonnegative");
  const int n_phi = 4 * l_max + 5;
  const int n_psi = 4 * l_max + 5;
  const int n_theta = 2 * l_max + 3;
  const auto [gx, gw] = detail::gauss_legendre(n_theta);

  SurfaceRule rule;
  rule.descriptor = {"s3", R, std::nullopt, {0, n_phi, n_theta, n_psi}};
  rule.nodes.reserve(static_cast<std::size_t>(n_phi) * n_theta * n_psi);
  rule.weights.reserve(rule.nodes.capacity());
  const double base = (R * R * R / 8.0) * (2.0 * kPi / n_phi) *
                      (4.0 * kPi / n_psi);
  for (int it = 0; it < n_theta; ++it) {
    const double theta = std::acos(gx[it]);
    const double wt = base * gw[it];
    for (int ip = 0; ip < n_phi; ++ip) {
      const double phi = 2.0 * kPi * ip / n_phi;
      for (int is = 0; is < n_psi; ++is) {
        const double psi = 4.0 * kPi * is / n_psi;
        rule.nodes.push_back(su2_euler(phi, theta, psi) * R);
        rule.weights.emplace_back(wt, 0.0);
      }
    }
  }
  return rule;
}

inline SurfaceRule build_u2_rule(double R, int l_max, int k_range,
                                 std::optional<double> mu = std::nullopt) {
  if (!(R > 0.0)) throw BadRadius("cycle radius must be positive");
  if (l_max < 0 || k_range < 0)
    throw ConfigInvalid("angular orders must be nonnegative");
  if (mu) {
    if (!(*mu > 0.0)) throw BadRadius("deformation parameter must be positive");
    if (!(R < 1.0 / *mu))
      throw BadRadius("cycle radius must satisfy R < 1/mu");
  }
  const int n_phi = 4 * l_max + 5;
  const int n_psi = 4 * l_max + 5;
  const int n_theta = 2 * l_max + 3;
  int n_alpha = 4 * (l_max + k_range) + 5;
  if (mu) {
    // The deformed radial weight is no longer a trigonometric polynomial in
    // alpha; its Fourier tail decays like (mu R)^(2n), so pad the grid until
    // the truncated tail is below machine precision.
    const double q = *mu * R;
    n_alpha += static_cast<int>(std::ceil(15.0 / std::log(1.0 / q)));
  }
  const auto [gx, gw] = detail::gauss_legendre(n_theta);

  SurfaceRule rule;
  rule.descriptor = {"u2", R, mu, {n_alpha, n_phi, n_theta, n_psi}};
  const std::size_t total =
      static_cast<std::size_t>(n_alpha) * n_phi * n_theta * n_psi;
  rule.nodes.reserve(total);
  rule.weights.reserve(total);
  const double base = (R * R * R * R / 8.0) * (kPi / n_alpha) *
                      (2.0 * kPi / n_phi) * (4.0 * kPi / n_psi);
  const cplx inv_i(0.0, -1.0);
  for (int ia = 0; ia < n_alpha; ++ia) {
    const double alpha = kPi * ia / n_alpha;
    cplx radial = inv_i * base * std::exp(cplx(0.0, 4.0 * alpha));
    if (mu) {
      const double q = *mu * R;
      radial /= std::sqrt(cplx(1.0, 0.0) +
                          q * q * std::exp(cplx(0.0, 2.0 * alpha)));
    }
    for (int it = 0; it < n_theta; ++it) {
      const double theta = std::acos(gx[it]);
      const cplx wt = radial * gw[it];
      for (int ip = 0; ip < n_phi; ++ip) {
        const double phi = 2.0 * kPi * ip / n_phi;
        for (int is = 0; is < n_psi; ++is) {
          const double psi = 4.0 * kPi * is / n_psi;
          rule.nodes.push_back(u2_point(R, alpha, phi, theta, psi));
          rule.weights.push_back(wt);
        }
      }
    }
  }
  return rule;
}

// Deterministic integration: node values are evaluated into a fixed-order
// buffer (optionally in parallel) and reduced by a single pairwise tree, so
// the result is bitwise independent of the worker count.
template <class F>
cplx integrate_nodes(const SurfaceRule& rule, F&& f, int workers = 0) {
  const std::size_t n = rule.nodes.size();
  if (n == 0) return cplx{0.0, 0.0};
  if (workers <= 0) workers = detail::env_workers();
  std::vector<cplx> terms(n);
  const auto eval_range = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i)
      terms[i] = rule.weights[i] * f(rule.nodes[i]);
  };
  if (workers == 1 || n < 256) {
    eval_range(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const std::size_t lo = std::min(n, w * chunk);
      const std::size_t hi = std::min(n, lo + chunk);
      if (lo < hi) pool.emplace_back(eval_range, lo, hi);
    }
    for (auto& t : pool) t.join();
  }
  return detail::pairwise_sum(terms.data(), n);
}

inline cplx integrate(const ScalarField& f, const SurfaceRule& rule,
                      int workers = 0) {
  for (const auto& z : rule.nodes)
    if (!f.in_domain(z))
      throw OutOfDomain("quadrature node outside the field domain");
  return integrate_nodes(rule, [&f](const BiQuaternion& z) { return f.f0(z); },
                         workers);
}

// Contour integral of f along the loop, oriented counterclockwise:
// approximates the full (non-normalized) loop integral of f(z) dz.
template <class F>
cplx contour_integrate(const ContourRule& rule, F&& f) {
  if (rule.count < 1) throw ConfigInvalid("contour rule needs nodes");
  cplx s{0.0, 0.0};
  for (int j = 0; j < rule.count; ++j) {
    const double t = 2.0 * kPi * j / rule.count;
    const cplx e = std::exp(cplx(0.0, t));
    const cplx z = rule.center + rule.radius * e;
    s += f(z) * (cplx(0.0, 2.0 * kPi) * rule.radius * e /
                 static_cast<double>(rule.count));
  }
  return s;
}

inline nlohmann::ordered_json rule_to_json(const SurfaceRule& rule) {
  nlohmann::ordered_json j;
  j["kind"] = rule.descriptor.kind;
  j["R"] = rule.descriptor.R;
  if (rule.descriptor.mu) j["mu"] = *rule.descriptor.mu;
  j["orders"] = {{"n_alpha", rule.descriptor.orders.n_alpha},
                 {"n_phi", rule.descriptor.orders.n_phi},
                 {"n_theta", rule.descriptor.orders.n_theta},
                 {"n_psi", rule.descriptor.orders.n_psi}};
  j["count"] = rule.nodes.size();
  auto cj = [](const cplx& c) {
    return nlohmann::ordered_json::array({c.real(), c.imag()});
  };
  auto nodes = nlohmann::ordered_json::array();
  for (const auto& z : rule.nodes)
    nodes.push_back(nlohmann::ordered_json::array(
        {cj(z.z11), cj(z.z12), cj(z.z21), cj(z.z22)}));
  j["nodes"] = std::move(nodes);
  auto weights = nlohmann::ordered_json::array();
  for (const auto& w : rule.weights) weights.push_back(cj(w));
  j["weights"] = std::move(weights);
  return j;
}

}  // namespace biquat
