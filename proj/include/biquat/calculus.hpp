#pragma once

// Forward-mode jet calculus on functions of the four matrix entries (and of
// five Lorentzian coordinates), plus the differential operators built on it:
// degree operators, wave operators and their deformations, gradient matrices,
// and the deformed Dirac operator acting on block columns and rows.
//
// Fields carry up to two levels of derivative data.  A closed-form field
// (constructed from a generic callable) has two orders; every first-order
// operator consumes one level, every second-order operator consumes both.
// Evaluating outside a field's domain throws OutOfDomain, never returns NaN.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "biquat/algebra.hpp"
#include "biquat/errors.hpp"

namespace biquat {

// ---------------------------------------------------------------------------
// dual numbers

template <class T, int N>
struct DN {
  T v{};
  std::array<T, N> d{};

  DN() = default;
  template <class U, class = std::enable_if_t<
                         std::is_convertible_v<U, T> &&
                         !std::is_same_v<std::decay_t<U>, DN>>>
  DN(const U& x) : v(x) {}

  friend DN operator+(const DN& a, const DN& b) {
    DN r;
    r.v = a.v + b.v;
    for (int i = 0; i < N; ++i) r.d[i] = a.d[i] + b.d[i];
    return r;
  }
  friend DN operator-(const DN& a, const DN& b) {
    DN r;
    r.v = a.v - b.v;
    for (int i = 0; i < N; ++i) r.d[i] = a.d[i] - b.d[i];
    return r;
  }
  friend DN operator-(const DN& a) {
    DN r;
    r.v = -a.v;
    for (int i = 0; i < N; ++i) r.d[i] = -a.d[i];
    return r;
  }
  friend DN operator*(const DN& a, const DN& b) {
    DN r;
    r.v = a.v * b.v;
    for (int i = 0; i < N; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
    return r;
  }
  friend DN operator/(const DN& a, const DN& b) {
    DN r;
    r.v = a.v / b.v;
    for (int i = 0; i < N; ++i) r.d[i] = (a.d[i] - r.v * b.d[i]) / b.v;
    return r;
  }
  friend DN sqrt(const DN& a) {
    using std::sqrt;
    DN r;
    r.v = sqrt(a.v);
    for (int i = 0; i < N; ++i) r.d[i] = a.d[i] / (2.0 * r.v);
    return r;
  }
};

using D1 = DN<cplx, 4>;
using D2 = DN<D1, 4>;
using E1 = DN<cplx, 5>;
using E2 = DN<E1, 5>;

inline cplx plain(const cplx& x) { return x; }
template <class T, int N>
cplx plain(const DN<T, N>& x) {
  return plain(x.v);
}
template <class S>
BiQuaternion plain_mat(const Mat2<S>& m) {
  return BiQuaternion{plain(m.z11), plain(m.z12), plain(m.z21), plain(m.z22)};
}

// Entry order everywhere: (z11, z12, z21, z22).
template <class S>
Mat2<DN<S, 4>> seed4(const Mat2<S>& z) {
  Mat2<DN<S, 4>> r{DN<S, 4>(z.z11), DN<S, 4>(z.z12), DN<S, 4>(z.z21),
                   DN<S, 4>(z.z22)};
  r.z11.d[0] = S{1.0};
  r.z12.d[1] = S{1.0};
  r.z21.d[2] = S{1.0};
  r.z22.d[3] = S{1.0};
  return r;
}

template <class S>
std::array<DN<S, 5>, 5> seed5(const std::array<S, 5>& w) {
  std::array<DN<S, 5>, 5> r{DN<S, 5>(w[0]), DN<S, 5>(w[1]), DN<S, 5>(w[2]),
                            DN<S, 5>(w[3]), DN<S, 5>(w[4])};
  for (int i = 0; i < 5; ++i) r[i].d[i] = S{1.0};
  return r;
}

// ---------------------------------------------------------------------------
// jets

struct Jet1 {
  cplx value{};
  std::array<cplx, 4> grad{};
};

struct Jet2 {
  cplx value{};
  std::vector<cplx> grad;                // size 4 or 5
  std::vector<std::vector<cplx>> hess;   // symmetric, same size
};

// ---------------------------------------------------------------------------
// scalar fields on matrix space

struct ScalarField {
  std::function<bool(const BiQuaternion&)> dom;  // empty = everywhere
  std::function<cplx(const BiQuaternion&)> f0;
  std::function<D1(const Mat2<D1>&)> f1;
  std::function<D2(const Mat2<D2>&)> f2;
  int orders = 0;

  template <class F>
  static ScalarField closed_form(F f) {
    ScalarField s;
    s.f0 = [f](const BiQuaternion& z) -> cplx { return f(z); };
    s.f1 = [f](const Mat2<D1>& m) -> D1 { return f(m); };
    s.f2 = [f](const Mat2<D2>& m) -> D2 { return f(m); };
    s.orders = 2;
    return s;
  }
  template <class F, class D>
  static ScalarField closed_form(F f, D d) {
    ScalarField s = closed_form(std::move(f));
    s.dom = std::move(d);
    return s;
  }

  bool in_domain(const BiQuaternion& z) const { return !dom || dom(z); }
  void check(const BiQuaternion& z) const {
    if (!in_domain(z)) throw OutOfDomain("point outside the field domain");
  }
  cplx value(const BiQuaternion& z) const {
    check(z);
    return f0(z);
  }
};

inline Jet1 jet1_eval(const ScalarField& f, const BiQuaternion& z) {
  if (f.orders < 1)
    throw DimensionMismatch("field carries no first-order data");
  f.check(z);
  const D1 r = f.f1(seed4(z));
  Jet1 j;
  j.value = r.v;
  for (int i = 0; i < 4; ++i) j.grad[i] = r.d[i];
  return j;
}

inline Jet2 jet_eval(const ScalarField& f, const BiQuaternion& z) {
  if (f.orders < 2)
    throw DimensionMismatch("field carries no second-order data");
  f.check(z);
  const D2 r = f.f2(seed4(seed4(z)));
  Jet2 j;
  j.value = r.v.v;
  j.grad.resize(4);
  j.hess.assign(4, std::vector<cplx>(4));
  for (int i = 0; i < 4; ++i) {
    j.grad[i] = r.d[i].v;
    for (int k = 0; k < 4; ++k) j.hess[i][k] = r.d[i].d[k];
  }
  return j;
}

// Matrix arrangement of the first derivatives: rows follow the transposed
// entry pattern, so that Tr(Z (del f)) is the degree of f.
inline BiQuaternion partial_matrix(const Jet1& j) {
  return BiQuaternion{j.grad[0], j.grad[2], j.grad[1], j.grad[3]};
}
inline BiQuaternion partial_plus_matrix(const Jet1& j) {
  return BiQuaternion{j.grad[3], -j.grad[2], -j.grad[1], j.grad[0]};
}

// ---------------------------------------------------------------------------
// operator contractions (generic over the scalar level)

namespace detail {

template <class S>
S contract_deg(const DN<S, 4>& p, const Mat2<S>& m) {
  return m.z11 * p.d[0] + m.z12 * p.d[1] + m.z21 * p.d[2] + m.z22 * p.d[3];
}

struct DegContract {
  template <class S>
  S operator()(const DN<S, 4>& p, const Mat2<S>& m) const {
    return contract_deg(p, m);
  }
};

struct DegTildeContract {
  template <class S>
  S operator()(const DN<S, 4>& p, const Mat2<S>& m) const {
    return p.v + contract_deg(p, m);
  }
};

struct ConformalContract {
  double mu;
  template <class S>
  S operator()(const DN<S, 4>& p, const Mat2<S>& m) const {
    using std::sqrt;
    const S root = sqrt(S{1.0} + (mu * mu) * norm(m));
    return root * (p.v + contract_deg(p, m));
  }
};

struct BoxContract {
  double mu = 0.0;
  double tilde = 0.0;   // extra multiple of mu^2 f
  bool deformed = false;
  template <class S>
  S operator()(const DN<DN<S, 4>, 4>& p, const Mat2<S>& m) const {
    S r = 4.0 * (p.d[0].d[3] - p.d[1].d[2]);
    if (deformed) {
      const std::array<S, 4> e{m.z11, m.z12, m.z21, m.z22};
      S lin{0.0};
      S quad{0.0};
      for (int i = 0; i < 4; ++i) {
        lin = lin + e[i] * p.d[i].v;
        for (int k = 0; k < 4; ++k) quad = quad + e[i] * e[k] * p.d[i].d[k];
      }
      // mu^2 (deg^2 + 3 deg) f = mu^2 (sum z_i z_k d_ik f + 4 deg f)
      r = r + (mu * mu) * (quad + 4.0 * lin) + (tilde * mu * mu) * p.v.v;
    }
    return r;
  }
};

struct NablaContract {
  bool plus = false;
  template <class S>
  Mat2<S> operator()(const DN<S, 4>& p, const Mat2<S>&) const {
    const Mat2<S> g{2.0 * p.d[0], 2.0 * p.d[2], 2.0 * p.d[1], 2.0 * p.d[3]};
    return plus ? conj_plus(g) : g;
  }
};

template <class C>
ScalarField derive1(const ScalarField& p, C c) {
  if (p.orders < 1)
    throw DimensionMismatch(
        "first-order operator applied to a field with no derivative data");
  ScalarField s;
  s.dom = p.dom;
  s.orders = p.orders - 1;
  s.f0 = [p1 = p.f1, c](const BiQuaternion& z) -> cplx {
    return c(p1(seed4(z)), z);
  };
  if (p.orders >= 2)
    s.f1 = [p2 = p.f2, c](const Mat2<D1>& m) -> D1 {
      return c(p2(seed4(m)), m);
    };
  return s;
}

template <class C>
ScalarField derive2(const ScalarField& p, C c) {
  if (p.orders < 2)
    throw DimensionMismatch(
        "second-order operator applied to a field with fewer than two "
        "derivative orders");
  ScalarField s;
  s.dom = p.dom;
  s.orders = 0;
  s.f0 = [p2 = p.f2, c](const BiQuaternion& z) -> cplx {
    return c(p2(seed4(seed4(z))), z);
  };
  return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// matrix-valued fields

struct MatrixField {
  std::function<bool(const BiQuaternion&)> dom;
  std::function<BiQuaternion(const BiQuaternion&)> f0;
  std::function<Mat2<D1>(const Mat2<D1>&)> f1;
  std::function<Mat2<D2>(const Mat2<D2>&)> f2;
  int orders = 0;

  template <class F>
  static MatrixField closed_form(F f) {
    MatrixField s;
    s.f0 = [f](const BiQuaternion& z) -> BiQuaternion { return f(z); };
    s.f1 = [f](const Mat2<D1>& m) -> Mat2<D1> { return f(m); };
    s.f2 = [f](const Mat2<D2>& m) -> Mat2<D2> { return f(m); };
    s.orders = 2;
    return s;
  }
  template <class F, class D>
  static MatrixField closed_form(F f, D d) {
    MatrixField s = closed_form(std::move(f));
    s.dom = std::move(d);
    return s;
  }
  static MatrixField constant(const BiQuaternion& c) {
    return closed_form([c](const auto& m) {
      using S = std::decay_t<decltype(m.z11)>;
      return Mat2<S>{S(c.z11), S(c.z12), S(c.z21), S(c.z22)};
    });
  }
  // the scalar field times the identity matrix
  static MatrixField scalar(const ScalarField& s) {
    MatrixField r;
    r.dom = s.dom;
    r.orders = s.orders;
    r.f0 = [g = s.f0](const BiQuaternion& z) { return scalar_mat(g(z)); };
    if (s.f1)
      r.f1 = [g = s.f1](const Mat2<D1>& m) { return scalar_mat2<D1>(g(m)); };
    if (s.f2)
      r.f2 = [g = s.f2](const Mat2<D2>& m) { return scalar_mat2<D2>(g(m)); };
    return r;
  }

  bool in_domain(const BiQuaternion& z) const { return !dom || dom(z); }
  void check(const BiQuaternion& z) const {
    if (!in_domain(z)) throw OutOfDomain("point outside the field domain");
  }
  BiQuaternion value(const BiQuaternion& z) const {
    check(z);
    return f0(z);
  }
};

namespace detail {

inline std::function<bool(const BiQuaternion&)> combine_domains(
    const std::function<bool(const BiQuaternion&)>& a,
    const std::function<bool(const BiQuaternion&)>& b) {
  if (!a) return b;
  if (!b) return a;
  return [a, b](const BiQuaternion& z) { return a(z) && b(z); };
}

// Derive a matrix field from a scalar field via a generic block contraction
// (first parent derivatives in, matrix out).
template <class C>
MatrixField scalar_derived_matrix(const ScalarField& p, C c) {
  if (p.orders < 1)
    throw DimensionMismatch(
        "first-order operator applied to a field with no derivative data");
  MatrixField s;
  s.dom = p.dom;
  s.orders = p.orders - 1;
  s.f0 = [p1 = p.f1, c](const BiQuaternion& z) -> BiQuaternion {
    return c(p1(seed4(z)), z);
  };
  if (p.orders >= 2)
    s.f1 = [p2 = p.f2, c](const Mat2<D1>& m) -> Mat2<D1> {
      return c(p2(seed4(m)), m);
    };
  return s;
}

}  // namespace detail

inline MatrixField operator+(const MatrixField& x, const MatrixField& y) {
  MatrixField r;
  r.dom = detail::combine_domains(x.dom, y.dom);
  r.orders = std::min(x.orders, y.orders);
  r.f0 = [a = x.f0, b = y.f0](const BiQuaternion& z) { return a(z) + b(z); };
  if (r.orders >= 1)
    r.f1 = [a = x.f1, b = y.f1](const Mat2<D1>& m) { return a(m) + b(m); };
  if (r.orders >= 2)
    r.f2 = [a = x.f2, b = y.f2](const Mat2<D2>& m) { return a(m) + b(m); };
  return r;
}

inline MatrixField operator*(cplx c, const MatrixField& x) {
  MatrixField r;
  r.dom = x.dom;
  r.orders = x.orders;
  r.f0 = [c, a = x.f0](const BiQuaternion& z) { return a(z) * c; };
  if (x.f1) r.f1 = [c, a = x.f1](const Mat2<D1>& m) { return a(m) * D1(c); };
  if (x.f2) r.f2 = [c, a = x.f2](const Mat2<D2>& m) { return a(m) * D2(c); };
  return r;
}
inline MatrixField operator*(double c, const MatrixField& x) {
  return cplx(c) * x;
}
inline MatrixField operator-(const MatrixField& x, const MatrixField& y) {
  return x + (-1.0) * y;
}

// ---------------------------------------------------------------------------
// deformed Dirac operator on block columns / rows

namespace detail {

template <class S>
Mat2<S> nabla_left_of(const Mat2<DN<S, 4>>& R) {
  return Mat2<S>{2.0 * (R.z11.d[0] + R.z21.d[2]), 2.0 * (R.z12.d[0] + R.z22.d[2]),
                 2.0 * (R.z11.d[1] + R.z21.d[3]), 2.0 * (R.z12.d[1] + R.z22.d[3])};
}
template <class S>
Mat2<S> nabla_plus_left_of(const Mat2<DN<S, 4>>& R) {
  return Mat2<S>{2.0 * (R.z11.d[3] - R.z21.d[2]), 2.0 * (R.z12.d[3] - R.z22.d[2]),
                 2.0 * (R.z21.d[0] - R.z11.d[1]), 2.0 * (R.z22.d[0] - R.z12.d[1])};
}
template <class S>
Mat2<S> nabla_right_of(const Mat2<DN<S, 4>>& R) {
  return Mat2<S>{2.0 * (R.z11.d[0] + R.z12.d[1]), 2.0 * (R.z11.d[2] + R.z12.d[3]),
                 2.0 * (R.z21.d[0] + R.z22.d[1]), 2.0 * (R.z21.d[2] + R.z22.d[3])};
}
template <class S>
Mat2<S> nabla_plus_right_of(const Mat2<DN<S, 4>>& R) {
  return Mat2<S>{2.0 * (R.z11.d[3] - R.z12.d[1]), 2.0 * (R.z12.d[0] - R.z11.d[2]),
                 2.0 * (R.z21.d[3] - R.z22.d[1]), 2.0 * (R.z22.d[0] - R.z21.d[2])};
}
template <class S>
Mat2<S> deg_tilde_of(const Mat2<DN<S, 4>>& R, const Mat2<S>& m) {
  const auto dt = [&m](const DN<S, 4>& e) {
    return e.v + m.z11 * e.d[0] + m.z12 * e.d[1] + m.z21 * e.d[2] +
           m.z22 * e.d[3];
  };
  return Mat2<S>{dt(R.z11), dt(R.z12), dt(R.z21), dt(R.z22)};
}

template <class S>
std::pair<Mat2<S>, Mat2<S>> dirac_left_step(const Mat2<DN<S, 4>>& Rt,
                                            const Mat2<DN<S, 4>>& Rb,
                                            const Mat2<S>& m, double mu) {
  using std::sqrt;
  const S root = sqrt(S{1.0} + (mu * mu) * norm(m));
  Mat2<S> top = root * nabla_plus_left_of(Rb);
  Mat2<S> bot = root * nabla_left_of(Rt);
  if (mu != 0.0) {
    top = top + mu * (m * nabla_left_of(Rt) - deg_tilde_of(Rt, m));
    bot = bot + mu * (conj_plus(m) * nabla_plus_left_of(Rb) -
                      deg_tilde_of(Rb, m));
  }
  return {top, bot};
}

template <class S>
std::pair<Mat2<S>, Mat2<S>> dirac_right_step(const Mat2<DN<S, 4>>& R1,
                                             const Mat2<DN<S, 4>>& R2,
                                             const Mat2<S>& m, double mu) {
  using std::sqrt;
  const S root = sqrt(S{1.0} + (mu * mu) * norm(m));
  Mat2<S> first = root * nabla_right_of(R2);
  Mat2<S> second = root * nabla_plus_right_of(R1);
  if (mu != 0.0) {
    first = first + mu * (deg_tilde_of(R1, m) -
                          nabla_plus_right_of(R1) * conj_plus(m));
    second = second + mu * (deg_tilde_of(R2, m) - nabla_right_of(R2) * m);
  }
  return {first, second};
}

}  // namespace detail

// A pair of matrix-valued functions: a block column (f1; f2) for the left
// Dirac operator, a block row (g1, g2) for the right one.
struct RegularPair {
  MatrixField a, b;
};

inline RegularPair operator+(const RegularPair& x, const RegularPair& y) {
  return {x.a + y.a, x.b + y.b};
}
inline RegularPair operator*(cplx c, const RegularPair& x) {
  return {c * x.a, c * x.b};
}
inline RegularPair operator*(double c, const RegularPair& x) {
  return {c * x.a, c * x.b};
}

namespace detail {

template <bool kLeft>
RegularPair dirac_any(const RegularPair& F, double mu) {
  if (F.a.orders < 1 || F.b.orders < 1)
    throw DimensionMismatch(
        "dirac operator applied to a pair with no derivative data");
  const int o = std::min(F.a.orders, F.b.orders) - 1;
  const auto dm = combine_domains(F.a.dom, F.b.dom);
  MatrixField ra, rb;
  ra.dom = rb.dom = dm;
  ra.orders = rb.orders = o;
  const auto step0 = [ta = F.a.f1, tb = F.b.f1, mu](const BiQuaternion& z) {
    const auto s = seed4(z);
    if constexpr (kLeft) return dirac_left_step(ta(s), tb(s), z, mu);
    else return dirac_right_step(ta(s), tb(s), z, mu);
  };
  ra.f0 = [step0](const BiQuaternion& z) { return step0(z).first; };
  rb.f0 = [step0](const BiQuaternion& z) { return step0(z).second; };
  if (o >= 1) {
    const auto step1 = [ta = F.a.f2, tb = F.b.f2, mu](const Mat2<D1>& m) {
      const auto s = seed4(m);
      if constexpr (kLeft) return dirac_left_step(ta(s), tb(s), m, mu);
      else return dirac_right_step(ta(s), tb(s), m, mu);
    };
    ra.f1 = [step1](const Mat2<D1>& m) { return step1(m).first; };
    rb.f1 = [step1](const Mat2<D1>& m) { return step1(m).second; };
  }
  return {ra, rb};
}

}  // namespace detail

inline RegularPair dirac_mu_left(const RegularPair& F, double mu) {
  return detail::dirac_any<true>(F, mu);
}
inline RegularPair dirac_mu_right(const RegularPair& F, double mu) {
  return detail::dirac_any<false>(F, mu);
}

// (X f2; X^+ f1): the coordinate multiplication entering the anticommutation
// relation with the Dirac operator.
inline RegularPair mult_swap(const RegularPair& F) {
  MatrixField a, b;
  a.dom = F.b.dom;
  a.orders = F.b.orders;
  a.f0 = [g = F.b.f0](const BiQuaternion& z) { return z * g(z); };
  if (F.b.f1) a.f1 = [g = F.b.f1](const Mat2<D1>& m) { return m * g(m); };
  if (F.b.f2) a.f2 = [g = F.b.f2](const Mat2<D2>& m) { return m * g(m); };
  b.dom = F.a.dom;
  b.orders = F.a.orders;
  b.f0 = [g = F.a.f0](const BiQuaternion& z) { return conj_plus(z) * g(z); };
  if (F.a.f1)
    b.f1 = [g = F.a.f1](const Mat2<D1>& m) { return conj_plus(m) * g(m); };
  if (F.a.f2)
    b.f2 = [g = F.a.f2](const Mat2<D2>& m) { return conj_plus(m) * g(m); };
  return {a, b};
}

namespace detail {

// The four blocks of (D + shift*mu) phi for scalar phi, in the order
// e11, e12, e21, e22.
template <class S>
std::array<Mat2<S>, 4> regular_blocks(const DN<S, 4>& p, const Mat2<S>& m,
                                      double mu, double shift) {
  using std::sqrt;
  const S root = sqrt(S{1.0} + (mu * mu) * norm(m));
  const Mat2<S> grad{2.0 * p.d[0], 2.0 * p.d[2], 2.0 * p.d[1], 2.0 * p.d[3]};
  const Mat2<S> gradp = conj_plus(grad);
  const S diag = (shift * mu) * p.v - mu * (p.v + contract_deg(p, m));
  return {mu * (m * grad) + scalar_mat2<S>(diag), root * gradp, root * grad,
          mu * (conj_plus(m) * gradp) + scalar_mat2<S>(diag)};
}

// The four blocks of phi (Dbar + shift*mu), same order.
template <class S>
std::array<Mat2<S>, 4> regular_blocks_right(const DN<S, 4>& p,
                                            const Mat2<S>& m, double mu,
                                            double shift) {
  using std::sqrt;
  const S root = sqrt(S{1.0} + (mu * mu) * norm(m));
  const Mat2<S> grad{2.0 * p.d[0], 2.0 * p.d[2], 2.0 * p.d[1], 2.0 * p.d[3]};
  const Mat2<S> gradp = conj_plus(grad);
  const S diag = (shift * mu) * p.v + mu * (p.v + contract_deg(p, m));
  return {scalar_mat2<S>(diag) - mu * (gradp * conj_plus(m)), root * gradp,
          root * grad, scalar_mat2<S>(diag) - mu * (grad * m)};
}

struct RegularBlock {
  double mu, shift;
  int which;
  bool right;
  template <class S>
  Mat2<S> operator()(const DN<S, 4>& p, const Mat2<S>& m) const {
    return right ? regular_blocks_right(p, m, mu, shift)[which]
                 : regular_blocks(p, m, mu, shift)[which];
  }
};

}  // namespace detail

// Columns of (D + shift*mu) phi; with the default shift they are left-regular
// whenever the deformed wave operator annihilates phi.
inline std::array<RegularPair, 2> make_regular(const ScalarField& phi,
                                               double mu,
                                               double shift = -1.0) {
  const auto blk = [&](int which) {
    return detail::scalar_derived_matrix(
        phi, detail::RegularBlock{mu, shift, which, false});
  };
  return {RegularPair{blk(0), blk(2)}, RegularPair{blk(1), blk(3)}};
}

// Rows of phi (Dbar + shift*mu).
inline std::array<RegularPair, 2> make_regular_right(const ScalarField& phi,
                                                     double mu,
                                                     double shift = 1.0) {
  const auto blk = [&](int which) {
    return detail::scalar_derived_matrix(
        phi, detail::RegularBlock{mu, shift, which, true});
  };
  return {RegularPair{blk(0), blk(1)}, RegularPair{blk(2), blk(3)}};
}

// ---------------------------------------------------------------------------
// fields of five Lorentzian variables (w0, w1, w2, w3, w4)

struct Minkowski5Point {
  double w0 = 0, w1 = 0, w2 = 0, w3 = 0, w4 = 0;
  std::array<double, 5> coords() const { return {w0, w1, w2, w3, w4}; }
};

struct Field5 {
  std::function<bool(const Minkowski5Point&)> dom;
  std::function<cplx(const Minkowski5Point&)> f0;
  std::function<E1(const std::array<E1, 5>&)> f1;
  std::function<E2(const std::array<E2, 5>&)> f2;
  int orders = 0;

  template <class F>
  static Field5 closed_form(F f) {
    Field5 s;
    s.f0 = [f](const Minkowski5Point& p) -> cplx {
      const auto c = p.coords();
      const std::array<cplx, 5> w{c[0], c[1], c[2], c[3], c[4]};
      return f(w);
    };
    s.f1 = [f](const std::array<E1, 5>& w) -> E1 { return f(w); };
    s.f2 = [f](const std::array<E2, 5>& w) -> E2 { return f(w); };
    s.orders = 2;
    return s;
  }
  template <class F, class D>
  static Field5 closed_form(F f, D d) {
    Field5 s = closed_form(std::move(f));
    s.dom = std::move(d);
    return s;
  }

  bool in_domain(const Minkowski5Point& p) const { return !dom || dom(p); }
  void check(const Minkowski5Point& p) const {
    if (!in_domain(p)) throw OutOfDomain("point outside the field domain");
  }
  cplx value(const Minkowski5Point& p) const {
    check(p);
    return f0(p);
  }
};

inline Jet2 jet_eval(const Field5& f, const Minkowski5Point& p) {
  if (f.orders < 2)
    throw DimensionMismatch("field carries no second-order data");
  f.check(p);
  const auto c = p.coords();
  const std::array<cplx, 5> w{c[0], c[1], c[2], c[3], c[4]};
  const E2 r = f.f2(seed5(seed5(w)));
  Jet2 j;
  j.value = r.v.v;
  j.grad.resize(5);
  j.hess.assign(5, std::vector<cplx>(5));
  for (int i = 0; i < 5; ++i) {
    j.grad[i] = r.d[i].v;
    for (int k = 0; k < 5; ++k) j.hess[i][k] = r.d[i].d[k];
  }
  return j;
}

// ---------------------------------------------------------------------------
// the operator dispatcher

enum class OperatorKind {
  nabla,
  nabla_plus,
  box,
  deg,
  deg_tilde,
  box_mu,
  box_mu_tilde,
  box_14,
  conformal_generator
};

inline std::variant<ScalarField, MatrixField> apply_operator(
    OperatorKind k, const ScalarField& f, double mu = 0.0) {
  switch (k) {
    case OperatorKind::deg:
      return detail::derive1(f, detail::DegContract{});
    case OperatorKind::deg_tilde:
      return detail::derive1(f, detail::DegTildeContract{});
    case OperatorKind::conformal_generator:
      return detail::derive1(f, detail::ConformalContract{mu});
    case OperatorKind::box:
      return detail::derive2(f, detail::BoxContract{});
    case OperatorKind::box_mu:
      return detail::derive2(f, detail::BoxContract{mu, 0.0, true});
    case OperatorKind::box_mu_tilde:
      return detail::derive2(f, detail::BoxContract{mu, 2.0, true});
    case OperatorKind::nabla:
      return detail::scalar_derived_matrix(f, detail::NablaContract{false});
    case OperatorKind::nabla_plus:
      return detail::scalar_derived_matrix(f, detail::NablaContract{true});
    case OperatorKind::box_14:
      throw DimensionMismatch("box_14 acts on five-variable fields");
  }
  throw DimensionMismatch("unknown operator kind");
}

inline Field5 apply_operator(OperatorKind k, const Field5& f) {
  if (k != OperatorKind::box_14)
    throw DimensionMismatch(
        "only box_14 acts on five-variable fields");
  if (f.orders < 2)
    throw DimensionMismatch(
        "second-order operator applied to a field with fewer than two "
        "derivative orders");
  Field5 s;
  s.dom = f.dom;
  s.orders = 0;
  s.f0 = [p2 = f.f2](const Minkowski5Point& p) -> cplx {
    const auto c = p.coords();
    const std::array<cplx, 5> w{c[0], c[1], c[2], c[3], c[4]};
    const E2 r = p2(seed5(seed5(w)));
    cplx acc = r.d[0].d[0];
    for (int i = 1; i < 5; ++i) acc -= r.d[i].d[i];
    return acc;
  };
  return s;
}

}  // namespace biquat
