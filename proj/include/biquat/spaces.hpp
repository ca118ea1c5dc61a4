#pragma once

// Function spaces on the group of invertible biquaternions and their
// structure maps: Laurent-monomial bases t^l_{m,n} N^k and the dual bases,
// the sphere pairing (degree-weighted), the holomorphic cycle pairing and
// the inner product it induces, the three group actions, the Lie-algebra
// action in block form, and the K-type dimension identity.
//
// ZhExpander turns the cycle pairing against the dual basis into a fast
// expansion table: for Laurent-type integrands the radial direction
// factors through an exact discrete Fourier selection, leaving one Schur
// dot product on the unit quaternions per coefficient.

#include <array>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "biquat/algebra.hpp"
#include "biquat/calculus.hpp"
#include "biquat/coeff.hpp"
#include "biquat/errors.hpp"
#include "biquat/quadrature.hpp"

namespace biquat {

// ---------------------------------------------------------------------------
// index bookkeeping

struct ZhBasisIndex {
  int k = 0;
  CoeffIndex idx;
};

enum class ZhComponent { plus, minus, zero };

inline ZhComponent classify(const ZhBasisIndex& i) {
  i.idx.validate();
  if (i.k >= 0) return ZhComponent::plus;
  if (i.k <= -(i.idx.two_l + 2)) return ZhComponent::minus;
  return ZhComponent::zero;
}

enum class SpaceKind { h_plus, h_minus, zh };

namespace detail {

inline CoeffIndex swap_mn(const CoeffIndex& i) {
  return CoeffIndex{i.two_l, i.two_n, i.two_m};
}

// t-coefficient (optionally of the adjugate argument) times an integer power
// of the norm; the shared shape of every basis and dual-basis field.
inline ScalarField monomial_field(const CoeffIndex& idx, int npow,
                                  bool adjugate_arg) {
  idx.validate();
  auto eval = [idx, npow, adjugate_arg](const auto& m) {
    using S = std::decay_t<decltype(m.z11)>;
    const S tv = t_coeff(idx, adjugate_arg ? conj_plus(m) : m);
    if (npow == 0) return tv;
    const S n = norm(m);
    if (npow > 0) return tv * int_pow(n, npow);
    return tv / int_pow(n, -npow);
  };
  ScalarField f = ScalarField::closed_form(eval);
  if (npow < 0)
    f.dom = [](const BiQuaternion& z) {
      return std::abs(norm(z)) > 1e-14 * std::max(1.0, max_abs(z) * max_abs(z));
    };
  return f;
}

}  // namespace detail

inline ScalarField basis_field(const ZhBasisIndex& i) {
  return detail::monomial_field(i.idx, i.k, false);
}

inline ScalarField basis_field(SpaceKind space, const CoeffIndex& idx) {
  switch (space) {
    case SpaceKind::h_plus:
      return detail::monomial_field(idx, 0, false);
    case SpaceKind::h_minus:
      return detail::monomial_field(idx, -(idx.two_l + 1), false);
    case SpaceKind::zh:
      throw InvalidIndex("the Laurent space needs a ZhBasisIndex");
  }
  throw InvalidIndex("unknown space");
}

inline ScalarField basis_field(SpaceKind space, const ZhBasisIndex& i) {
  if (space != SpaceKind::zh)
    throw InvalidIndex("ZhBasisIndex only labels the Laurent space");
  return basis_field(i);
}

// Dual of the same-index element t^l_{m,n} of H^+ under the sphere pairing:
// t^l_{n,m}(Z^{-1}) N^{-1}, so pairing_H(basis, dual) is 1 exactly on the
// diagonal.
inline ScalarField h_dual_field(const CoeffIndex& idx) {
  return detail::monomial_field(detail::swap_mn(idx), -(idx.two_l + 1), true);
}

// Dual of the same-index element t^l_{m,n} N^k under the cycle pairing, up to
// the 1/(2l+1) factor: t^l_{n,m}(Z^{-1}) N^{-k-2}.
inline ScalarField zh_dual_field(const ZhBasisIndex& i) {
  return detail::monomial_field(detail::swap_mn(i.idx), -(i.idx.two_l + i.k + 2),
                                true);
}

// ---------------------------------------------------------------------------
// pairings

// (f1, f2)_R = (1/2pi^2) * integral over S^3_R of (deg~ f1) f2 dS / R.
inline cplx pairing_H(const ScalarField& f1, const ScalarField& f2, double R,
                      int l_max = 8) {
  const auto dt =
      std::get<ScalarField>(apply_operator(OperatorKind::deg_tilde, f1));
  const auto rule = build_sphere_rule(R, l_max);
  const cplx s = integrate_nodes(rule, [&](const BiQuaternion& z) {
    return dt.value(z) * f2.value(z);
  });
  return s / (2.0 * kPi * kPi * R);
}

// <f1, f2> = (i/2pi^3) * integral over U(2)_R of f1 f2 dV.
inline cplx pairing_Zh(const ScalarField& f1, const ScalarField& f2,
                       double R = 1.0, int l_max = 3, int k_range = 4) {
  const auto rule = build_u2_rule(R, l_max, k_range);
  const cplx s = integrate_nodes(rule, [&](const BiQuaternion& z) {
    return f1.value(z) * f2.value(z);
  });
  return s * cplx{0.0, 1.0} / (2.0 * kPi * kPi * kPi);
}

// (f1, f2) = (i/2pi^3) * integral over U(2) of f1 conj(f2) dV / N^2.
inline cplx inner_product_Zh(const ScalarField& f1, const ScalarField& f2,
                             int l_max = 3, int k_range = 4) {
  const auto rule = build_u2_rule(1.0, l_max, k_range);
  const cplx s = integrate_nodes(rule, [&](const BiQuaternion& z) {
    const cplx n = norm(z);
    return f1.value(z) * std::conj(f2.value(z)) / (n * n);
  });
  return s * cplx{0.0, 1.0} / (2.0 * kPi * kPi * kPi);
}

// ---------------------------------------------------------------------------
// group actions

enum class ActionKind { pi0_l, pi0_r, rho1 };

namespace detail {

template <class S>
Mat2<S> lift_mat(const BiQuaternion& c) {
  return {S(c.z11), S(c.z12), S(c.z21), S(c.z22)};
}

template <class S>
Mat2<S> inv_guarded(const Mat2<S>& m) {
  const S n = norm(m);
  const double scale = max_abs(plain_mat(m));
  if (std::abs(plain(n)) <= 1e-13 * std::max(1.0, scale * scale))
    throw SingularDenominator("transformed point has a singular denominator");
  return conj_plus(m) * (S{1.0} / n);
}

struct ActionEval {
  ActionKind kind;
  // transform blocks: W = (ta Z + tb)(tc Z + td)^{-1}   (pi0_l, rho1)
  //                   W = (ta - Z tc)^{-1}(Z td - tb)   (pi0_r)
  BiQuaternion ta, tb, tc, td;
  BiQuaternion xa, xc;  // second multiplier blocks (rho1 only)

  template <class S, class G>
  S operator()(const Mat2<S>& z, G&& g) const {
    if (kind == ActionKind::pi0_r) {
      const Mat2<S> den = lift_mat<S>(ta) - z * lift_mat<S>(tc);
      const Mat2<S> w = inv_guarded(den) * (z * lift_mat<S>(td) -
                                            lift_mat<S>(tb));
      return (S{1.0} / norm(den)) * g(w);
    }
    const Mat2<S> den = lift_mat<S>(tc) * z + lift_mat<S>(td);
    const Mat2<S> w =
        (lift_mat<S>(ta) * z + lift_mat<S>(tb)) * inv_guarded(den);
    if (kind == ActionKind::pi0_l) return (S{1.0} / norm(den)) * g(w);
    const S sec = norm(lift_mat<S>(xa) - z * lift_mat<S>(xc));
    if (std::abs(plain(sec)) <=
        1e-13 * std::max(1.0, max_abs(plain_mat(z)) * max_abs(plain_mat(z))))
      throw SingularDenominator("transformed point has a singular denominator");
    return (S{1.0} / (norm(den) * sec)) * g(w);
  }

  bool try_transform(const BiQuaternion& z, BiQuaternion& w) const {
    try {
      if (kind == ActionKind::pi0_r) {
        const BiQuaternion den = ta - z * tc;
        w = inv_guarded(den) * (z * td - tb);
      } else {
        const BiQuaternion den = tc * z + td;
        w = (ta * z + tb) * inv_guarded(den);
      }
      return true;
    } catch (const SingularDenominator&) {
      return false;
    }
  }
};

inline ActionEval make_action_eval(const GroupElement& h, ActionKind kind) {
  ActionEval e;
  e.kind = kind;
  if (kind == ActionKind::pi0_r) {
    e.ta = h.a;
    e.tb = h.b;
    e.tc = h.c;
    e.td = h.d;
  } else {
    e.ta = h.ai;
    e.tb = h.bi;
    e.tc = h.ci;
    e.td = h.di;
    e.xa = h.a;
    e.xc = h.c;
  }
  return e;
}

}  // namespace detail

inline ScalarField group_action_field(const GroupElement& h,
                                      const ScalarField& f, ActionKind kind) {
  const detail::ActionEval e = detail::make_action_eval(h, kind);
  ScalarField s;
  s.orders = f.orders;
  s.dom = [e, pd = f.dom](const BiQuaternion& z) {
    BiQuaternion w;
    if (!e.try_transform(z, w)) return true;  // let evaluation surface it
    return !pd || pd(w);
  };
  s.f0 = [e, g = f.f0](const BiQuaternion& z) -> cplx { return e(z, g); };
  if (f.f1) s.f1 = [e, g = f.f1](const Mat2<D1>& m) -> D1 { return e(m, g); };
  if (f.f2) s.f2 = [e, g = f.f2](const Mat2<D2>& m) -> D2 { return e(m, g); };
  return s;
}

// ---------------------------------------------------------------------------
// Lie algebra action in block form

struct LieElement {
  BiQuaternion A, B, C, D;

  static LieElement from_blocks(const BlockMat& x) { return {x.a, x.b, x.c, x.d}; }
};

namespace detail {

struct Rho1Contract {
  BiQuaternion A, B, C, D;
  template <class S>
  S operator()(const DN<S, 4>& p, const Mat2<S>& m) const {
    const Mat2<S> pf{p.d[0], p.d[2], p.d[1], p.d[3]};
    const Mat2<S> a = lift_mat<S>(A), b = lift_mat<S>(B), c = lift_mat<S>(C),
                  d = lift_mat<S>(D);
    S r = -trace(a * (m * pf + scalar_mat2<S>(p.v)));
    r = r - trace(b * pf);
    r = r + trace(c * (m * pf * m + 2.0 * (m * p.v)));
    r = r + trace(d * (pf * m + scalar_mat2<S>(p.v)));
    return r;
  }
};

}  // namespace detail

inline ScalarField rho1_apply(const LieElement& x, const ScalarField& f) {
  return detail::derive1(f, detail::Rho1Contract{x.A, x.B, x.C, x.D});
}

// ---------------------------------------------------------------------------
// K-type dimension identity

inline std::pair<long long, long long> dim_identity_check(int d) {
  if (d < 0) throw ConfigInvalid("degree must be nonnegative");
  const long long n = d;
  const long long lhs = (n + 3) * (n + 2) * (n + 1) / 6;
  long long rhs = 0;
  for (long long j = 0; n + 1 - 2 * j > 0; ++j)
    rhs += (n + 1 - 2 * j) * (n + 1 - 2 * j);
  return {lhs, rhs};
}

// ---------------------------------------------------------------------------
// fast expansion in the Laurent basis
//
// Coefficients are exact cycle pairings against the dual basis, evaluated by
// splitting the cycle into a radial phase ring times the unit quaternions.
// A discrete Fourier sum over the ring isolates each homogeneity degree
// (cross terms cancel exactly: even offsets by the ring sum, odd offsets by
// the parity of the Schur dot product), after which one weighted dot product
// on the unit-quaternion grid yields the coefficient.

class ZhExpander {
 public:
  struct Term {
    ZhBasisIndex index;
    cplx coeff;
  };

  ZhExpander(int two_l_max, int k_min, int k_max)
      : two_l_max_(two_l_max), k_min_(k_min), k_max_(k_max) {
    if (two_l_max < 0 || two_l_max > biquat::detail::kMaxTwoL || k_min > k_max)
      throw ConfigInvalid("bad expansion window");
    d_min_ = 2 * k_min;
    d_max_ = two_l_max + 2 * k_max;
    n_alpha_ = (d_max_ - d_min_) + 5;
    su2_ = build_sphere_rule(1.0, (two_l_max + 1) / 2);
    const std::size_t nn = su2_.nodes.size();
    for (int tl = 0; tl <= two_l_max; ++tl)
      for (int tm = -tl; tm <= tl; tm += 2)
        for (int tn = -tl; tn <= tl; tn += 2) {
          dual_index_.push_back(CoeffIndex{tl, tm, tn});
          auto& vals = dual_values_.emplace_back();
          vals.resize(nn);
          const CoeffIndex swapped{tl, tn, tm};
          for (std::size_t u = 0; u < nn; ++u)
            vals[u] = t_coeff(swapped, conj_plus(su2_.nodes[u]));
        }
  }

  // f must be a finite Laurent combination whose degrees and coefficient
  // indices lie inside the window; anything outside aliases and is caught by
  // the reconstruction check the callers perform.
  template <class F>
  std::vector<Term> expand_fn(F&& f) const {
    const std::size_t nn = su2_.nodes.size();
    std::vector<cplx> grid(static_cast<std::size_t>(n_alpha_) * nn);
    for (int a = 0; a < n_alpha_; ++a) {
      const double alpha = kPi * a / n_alpha_;
      const cplx phase = std::exp(cplx(0.0, alpha));
      for (std::size_t u = 0; u < nn; ++u)
        grid[static_cast<std::size_t>(a) * nn + u] = f(su2_.nodes[u] * phase);
    }
    std::vector<Term> out;
    std::vector<cplx> h(nn);
    for (int d = d_min_; d <= d_max_; ++d) {
      bool any = false;
      for (int tl = (d % 2 + 2) % 2; tl <= two_l_max_; tl += 2)
        if (k_min_ <= (d - tl) / 2 && (d - tl) / 2 <= k_max_) any = true;
      if (!any) continue;
      for (std::size_t u = 0; u < nn; ++u) h[u] = cplx{0.0, 0.0};
      for (int a = 0; a < n_alpha_; ++a) {
        const cplx w = std::exp(cplx(0.0, -d * kPi * a / n_alpha_)) /
                       static_cast<double>(n_alpha_);
        for (std::size_t u = 0; u < nn; ++u)
          h[u] += w * grid[static_cast<std::size_t>(a) * nn + u];
      }
      for (std::size_t di = 0; di < dual_index_.size(); ++di) {
        const CoeffIndex& ci = dual_index_[di];
        if ((d - ci.two_l) % 2 != 0) continue;
        const int k = (d - ci.two_l) / 2;
        if (k < k_min_ || k > k_max_) continue;
        cplx s{0.0, 0.0};
        for (std::size_t u = 0; u < nn; ++u)
          s += su2_.weights[u] * h[u] * dual_values_[di][u];
        s *= (ci.two_l + 1) / (2.0 * kPi * kPi);
        out.push_back(Term{ZhBasisIndex{k, ci}, s});
      }
    }
    return out;
  }

  std::vector<Term> expand(const ScalarField& f) const {
    return expand_fn([&f](const BiQuaternion& z) { return f.value(z); });
  }

  static cplx evaluate(const std::vector<Term>& terms, const BiQuaternion& z) {
    cplx s{0.0, 0.0};
    const cplx n = norm(z);
    for (const auto& t : terms) {
      cplx v = t_coeff(t.index.idx, z);
      if (t.index.k > 0)
        v *= biquat::detail::int_pow(n, t.index.k);
      else if (t.index.k < 0)
        v /= biquat::detail::int_pow(n, -t.index.k);
      s += t.coeff * v;
    }
    return s;
  }

  int two_l_max() const { return two_l_max_; }
  int k_min() const { return k_min_; }
  int k_max() const { return k_max_; }

 private:
  int two_l_max_, k_min_, k_max_, d_min_, d_max_, n_alpha_;
  SurfaceRule su2_;
  std::vector<CoeffIndex> dual_index_;
  std::vector<std::vector<cplx>> dual_values_;
};

}  // namespace biquat
