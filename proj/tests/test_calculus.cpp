#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <complex>

#include "biquat/calculus.hpp"
#include "biquat/coeff.hpp"
#include "helpers.hpp"

using namespace biquat;
using testutil::Rng;
using testutil::mat_dist;

namespace {

cplx& entry(BiQuaternion& z, int i) {
  switch (i) {
    case 0: return z.z11;
    case 1: return z.z12;
    case 2: return z.z21;
    default: return z.z22;
  }
}

// A generic test function with both polynomial and square-root content.
struct MixedFn {
  template <class S>
  S operator()(const Mat2<S>& m) const {
    using std::sqrt;
    return sqrt(S{1.0} + 0.49 * norm(m)) * (m.z11 * m.z22 + m.z12 * m.z21) +
           m.z11 * m.z11 * m.z11 * m.z22;
  }
};

// A dense random-ish polynomial of low degree.
struct PolyFn {
  template <class S>
  S operator()(const Mat2<S>& m) const {
    return m.z11 * m.z11 * m.z22 - 3.0 * m.z12 * m.z21 * m.z22 +
           m.z22 * m.z22 * m.z22 + cplx(0.0, 2.0) * m.z12 * m.z12 +
           m.z21 - 1.5;
  }
};

ScalarField deformed_harmonic(int two_l, int two_m, int two_n, double mu,
                              int sign) {
  return ScalarField::closed_form([=](const auto& m) {
    using S = std::decay_t<decltype(m.z11)>;
    using std::sqrt;
    const S root = sqrt(S{1.0} + (mu * mu) * norm(m));
    return t_coeff({two_l, two_m, two_n}, m) /
           detail::int_pow(root + double(sign), two_l + 1);
  });
}

BiQuaternion solid_point(Rng& rng, double r, double min_norm) {
  for (;;) {
    const BiQuaternion x = rng.rball(r);
    if (std::abs(norm(x)) > min_norm) return x;
  }
}

}  // namespace

TEST_CASE("second-order jet of the norm at the identity") {
  const auto f = ScalarField::closed_form(
      [](const auto& m) { return norm(m); });
  const Jet2 j = jet_eval(f, BiQuaternion::id());
  REQUIRE(std::abs(j.value - cplx(1.0)) < 1e-15);
  REQUIRE(j.grad.size() == 4);
  // gradient of det at Id, entry order (z11, z12, z21, z22)
  const cplx want_grad[4] = {1.0, 0.0, 0.0, 1.0};
  for (int i = 0; i < 4; ++i)
    REQUIRE(std::abs(j.grad[i] - want_grad[i]) < 1e-15);
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) {
      cplx want = 0.0;
      if ((i == 0 && k == 3) || (i == 3 && k == 0)) want = 1.0;
      if ((i == 1 && k == 2) || (i == 2 && k == 1)) want = -1.0;
      REQUIRE(std::abs(j.hess[i][k] - want) < 1e-15);
    }
}

TEST_CASE("jets agree with finite differences") {
  const auto f = ScalarField::closed_form(MixedFn{});
  const BiQuaternion z0 = from_real(0.9, 0.2, -0.3, 0.4);
  const Jet2 j = jet_eval(f, z0);
  const MixedFn raw;
  const double h = 1e-4;
  for (int i = 0; i < 4; ++i) {
    BiQuaternion zp = z0, zm = z0;
    entry(zp, i) += h;
    entry(zm, i) -= h;
    const cplx fd = (raw(zp) - raw(zm)) / (2.0 * h);
    REQUIRE(std::abs(j.grad[i] - fd) < 1e-6);
  }
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) {
      BiQuaternion zpp = z0, zpm = z0, zmp = z0, zmm = z0;
      entry(zpp, i) += h;
      entry(zpp, k) += h;
      entry(zpm, i) += h;
      entry(zpm, k) -= h;
      entry(zmp, i) -= h;
      entry(zmp, k) += h;
      entry(zmm, i) -= h;
      entry(zmm, k) -= h;
      const cplx fd =
          (raw(zpp) - raw(zpm) - raw(zmp) + raw(zmm)) / (4.0 * h * h);
      REQUIRE(std::abs(j.hess[i][k] - fd) < 1e-5);
      REQUIRE(std::abs(j.hess[i][k] - j.hess[k][i]) < 1e-13);
    }
}

TEST_CASE("wave operator on the norm and on matrix coefficients") {
  Rng rng(31);
  const auto nf = ScalarField::closed_form(
      [](const auto& m) { return norm(m); });
  const auto box_n =
      std::get<ScalarField>(apply_operator(OperatorKind::box, nf));
  REQUIRE(std::abs(box_n.value(rng.cball(2.0)) - cplx(8.0)) < 1e-12);
  // coefficients of the irreducibles are harmonic
  for (int two_l : {1, 2, 3}) {
    const auto tf = ScalarField::closed_form([two_l](const auto& m) {
      return t_coeff({two_l, two_l % 2, -(two_l % 2)}, m);
    });
    const auto bt =
        std::get<ScalarField>(apply_operator(OperatorKind::box, tf));
    REQUIRE(std::abs(bt.value(rng.cball(1.5))) < 1e-12);
  }
}

TEST_CASE("degree operators on homogeneous functions") {
  Rng rng(37);
  const BiQuaternion z = rng.cball(1.2);
  for (int two_l : {0, 1, 2}) {
    for (int k : {-2, 0, 1}) {
      const auto f = ScalarField::closed_form([=](const auto& m) {
        using S = std::decay_t<decltype(m.z11)>;
        const S t = t_coeff({two_l, two_l % 2, two_l % 2}, m);
        const S n = norm(m);
        if (k >= 0) return t * detail::int_pow(n, k);
        return t / detail::int_pow(n, -k);
      });
      const cplx base = f.value(z);
      const double degree = two_l + 2.0 * k;
      const auto df =
          std::get<ScalarField>(apply_operator(OperatorKind::deg, f));
      const auto dtf =
          std::get<ScalarField>(apply_operator(OperatorKind::deg_tilde, f));
      REQUIRE(std::abs(df.value(z) - degree * base) <
              1e-12 * std::max(1.0, std::abs(base)));
      REQUIRE(std::abs(dtf.value(z) - (degree + 1.0) * base) <
              1e-12 * std::max(1.0, std::abs(base)));
    }
  }
}

TEST_CASE("multiplying by the norm shifts the wave operator") {
  // box(N g) = N box g + 4 (deg g + 2 g)
  Rng rng(41);
  const auto g = ScalarField::closed_form(PolyFn{});
  const auto ng = ScalarField::closed_form([](const auto& m) {
    return norm(m) * PolyFn{}(m);
  });
  const auto box_ng =
      std::get<ScalarField>(apply_operator(OperatorKind::box, ng));
  const auto box_g =
      std::get<ScalarField>(apply_operator(OperatorKind::box, g));
  const auto deg_g =
      std::get<ScalarField>(apply_operator(OperatorKind::deg, g));
  for (int trial = 0; trial < 4; ++trial) {
    const BiQuaternion z = rng.cball(1.3);
    const cplx lhs = box_ng.value(z);
    const cplx rhs = norm(z) * box_g.value(z) +
                     4.0 * (deg_g.value(z) + 2.0 * g.value(z));
    REQUIRE(std::abs(lhs - rhs) < 1e-11 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("trace identity for the first-order jet") {
  // Tr(Z (del f) + f Id) = (deg + 2) f
  Rng rng(43);
  const auto f = ScalarField::closed_form(PolyFn{});
  for (int trial = 0; trial < 3; ++trial) {
    const BiQuaternion z = rng.cball(1.1);
    const Jet1 j = jet1_eval(f, z);
    const cplx lhs = trace(z * partial_matrix(j)) + 2.0 * j.value;
    const auto df =
        std::get<ScalarField>(apply_operator(OperatorKind::deg, f));
    const cplx rhs = df.value(z) + 2.0 * j.value;
    REQUIRE(std::abs(lhs - rhs) < 1e-12 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("gradient matrices of the norm") {
  Rng rng(47);
  const auto nf = ScalarField::closed_form(
      [](const auto& m) { return norm(m); });
  const MatrixField gn = std::get<MatrixField>(
      apply_operator(OperatorKind::nabla, nf));
  const MatrixField gnp = std::get<MatrixField>(
      apply_operator(OperatorKind::nabla_plus, nf));
  for (int trial = 0; trial < 3; ++trial) {
    const BiQuaternion z = rng.cball(2.0);
    REQUIRE(mat_dist(gn.value(z), 2.0 * conj_plus(z)) < 1e-13);
    REQUIRE(mat_dist(gnp.value(z), 2.0 * z) < 1e-13);
  }
}

TEST_CASE("gradient of the deformed root") {
  // nabla sqrt(1+mu^2 N) = mu^2 X^+ / sqrt(1+mu^2 N), and the plus version
  // carries X instead.
  const double mu = 0.8;
  const auto root = ScalarField::closed_form([mu](const auto& m) {
    using S = std::decay_t<decltype(m.z11)>;
    using std::sqrt;
    return sqrt(S{1.0} + (mu * mu) * norm(m));
  });
  const MatrixField gr =
      std::get<MatrixField>(apply_operator(OperatorKind::nabla, root));
  const MatrixField grp =
      std::get<MatrixField>(apply_operator(OperatorKind::nabla_plus, root));
  Rng rng(53);
  for (int trial = 0; trial < 3; ++trial) {
    const BiQuaternion x = rng.rball(0.9);
    const cplx r = std::sqrt(cplx(1.0) + mu * mu * norm(x));
    REQUIRE(mat_dist(gr.value(x), (mu * mu / r) * conj_plus(x)) < 1e-12);
    REQUIRE(mat_dist(grp.value(x), (mu * mu / r) * x) < 1e-12);
  }
}

TEST_CASE("deformed wave operators") {
  const double mu = 0.7;
  const auto one = ScalarField::closed_form(
      [](const auto& m) { return std::decay_t<decltype(m.z11)>{1.0}; });
  const auto bm = std::get<ScalarField>(
      apply_operator(OperatorKind::box_mu, one, mu));
  const auto bmt = std::get<ScalarField>(
      apply_operator(OperatorKind::box_mu_tilde, one, mu));
  Rng rng(59);
  const BiQuaternion z = rng.cball(1.0);
  REQUIRE(std::abs(bm.value(z)) < 1e-14);
  REQUIRE(std::abs(bmt.value(z) - cplx(2.0 * mu * mu)) < 1e-13);
  // tilde and plain differ by 2 mu^2 f
  const auto f = ScalarField::closed_form(PolyFn{});
  const auto f_bm = std::get<ScalarField>(
      apply_operator(OperatorKind::box_mu, f, mu));
  const auto f_bmt = std::get<ScalarField>(
      apply_operator(OperatorKind::box_mu_tilde, f, mu));
  for (int trial = 0; trial < 3; ++trial) {
    const BiQuaternion w = rng.cball(1.2);
    const cplx want = f_bm.value(w) + 2.0 * mu * mu * f.value(w);
    REQUIRE(std::abs(f_bmt.value(w) - want) <
            1e-11 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("deformed harmonics are annihilated by the tilde operator") {
  Rng rng(61);
  for (const double mu : {0.7, 1.3}) {
    for (const int sign : {+1, -1}) {
      for (int two_l : {0, 1, 2}) {
        const auto phi =
            deformed_harmonic(two_l, two_l % 2, -(two_l % 2), mu, sign);
        const auto res = std::get<ScalarField>(
            apply_operator(OperatorKind::box_mu_tilde, phi, mu));
        for (int trial = 0; trial < 3; ++trial) {
          const BiQuaternion x = solid_point(rng, 0.8, 0.15);
          REQUIRE(std::abs(res.value(x)) < 1e-9);
        }
      }
    }
  }
}

TEST_CASE("conformal generator has the harmonics as eigenfunctions") {
  Rng rng(67);
  const double mu = 0.9;
  for (const int sign : {+1, -1}) {
    for (int two_l : {0, 1, 3}) {
      const auto phi = deformed_harmonic(two_l, -(two_l % 2), two_l % 2, mu, sign);
      const auto cg = std::get<ScalarField>(
          apply_operator(OperatorKind::conformal_generator, phi, mu));
      for (int trial = 0; trial < 3; ++trial) {
        const BiQuaternion x = solid_point(rng, 0.7, 0.15);
        const cplx want = double(sign) * (two_l + 1.0) * phi.value(x);
        REQUIRE(std::abs(cg.value(x) - want) <
                1e-10 * std::max(1.0, std::abs(want)));
      }
    }
  }
}

TEST_CASE("operator chains spend derivative orders") {
  const auto nf = ScalarField::closed_form(
      [](const auto& m) { return norm(m); });
  REQUIRE(nf.orders == 2);
  const double mu = 0.5;
  const auto cg = std::get<ScalarField>(
      apply_operator(OperatorKind::conformal_generator, nf, mu));
  REQUIRE(cg.orders == 1);
  // cg(N) = 3 N sqrt(1+mu^2 N); its degree is 6N sqrt + 3 mu^2 N^2 / sqrt
  const auto dcg = std::get<ScalarField>(apply_operator(OperatorKind::deg, cg));
  REQUIRE(dcg.orders == 0);
  Rng rng(71);
  const BiQuaternion x = rng.rball(0.8);
  const cplx n = norm(x);
  const cplx r = std::sqrt(cplx(1.0) + mu * mu * n);
  REQUIRE(std::abs(cg.value(x) - 3.0 * n * r) < 1e-12);
  const cplx want = 6.0 * n * r + 3.0 * mu * mu * n * n / r;
  REQUIRE(std::abs(dcg.value(x) - want) < 1e-11);
  // no further derivative data
  REQUIRE_THROWS_AS(apply_operator(OperatorKind::deg, dcg), DimensionMismatch);
  REQUIRE_THROWS_AS(jet_eval(cg, x), DimensionMismatch);
  const auto box_n =
      std::get<ScalarField>(apply_operator(OperatorKind::box, nf));
  REQUIRE(box_n.orders == 0);
  REQUIRE_THROWS_AS(jet1_eval(box_n, x), DimensionMismatch);
}

TEST_CASE("domain predicates are enforced") {
  const auto f = ScalarField::closed_form(
      [](const auto& m) { return norm(m); },
      [](const BiQuaternion& z) { return std::abs(norm(z)) > 0.5; });
  REQUIRE_THROWS_AS(f.value(BiQuaternion{0.1, 0.0, 0.0, 0.1}), OutOfDomain);
  const auto df = std::get<ScalarField>(apply_operator(OperatorKind::deg, f));
  REQUIRE_THROWS_AS(df.value(BiQuaternion{0.1, 0.0, 0.0, 0.1}), OutOfDomain);
  REQUIRE(std::abs(f.value(BiQuaternion{2.0, 0.0, 0.0, 2.0}) - cplx(4.0)) <
          1e-15);
}

TEST_CASE("dirac operator at mu = 0 swaps gradients") {
  Rng rng(73);
  const auto f1 = ScalarField::closed_form(PolyFn{});
  const auto f2 = ScalarField::closed_form(MixedFn{});
  const RegularPair pair{MatrixField::scalar(f1), MatrixField::scalar(f2)};
  const RegularPair out = dirac_mu_left(pair, 0.0);
  const MatrixField g1 =
      std::get<MatrixField>(apply_operator(OperatorKind::nabla, f1));
  const MatrixField g2p =
      std::get<MatrixField>(apply_operator(OperatorKind::nabla_plus, f2));
  for (int trial = 0; trial < 3; ++trial) {
    const BiQuaternion x = rng.rball(0.8);
    REQUIRE(mat_dist(out.a.value(x), g2p.value(x)) < 1e-11);
    REQUIRE(mat_dist(out.b.value(x), g1.value(x)) < 1e-11);
  }
}

TEST_CASE("dirac operators on constants") {
  Rng rng(79);
  const double mu = 1.1;
  const BiQuaternion c1 = rng.cball(1.0);
  const BiQuaternion c2 = rng.cball(1.0);
  const RegularPair pair{MatrixField::constant(c1), MatrixField::constant(c2)};
  const RegularPair left = dirac_mu_left(pair, mu);
  const RegularPair right = dirac_mu_right(pair, mu);
  const BiQuaternion x = rng.rball(0.9);
  REQUIRE(mat_dist(left.a.value(x), (-mu) * c1) < 1e-13);
  REQUIRE(mat_dist(left.b.value(x), (-mu) * c2) < 1e-13);
  REQUIRE(mat_dist(right.a.value(x), mu * c1) < 1e-13);
  REQUIRE(mat_dist(right.b.value(x), mu * c2) < 1e-13);
}

TEST_CASE("left factorization of the deformed wave operator") {
  // applying the dirac operator to the columns of (D - mu) phi reproduces
  // box_mu_tilde(phi) times the identity block pattern
  Rng rng(83);
  const double mu = 0.7;
  const auto phi = ScalarField::closed_form(PolyFn{});
  const auto box_phi = std::get<ScalarField>(
      apply_operator(OperatorKind::box_mu_tilde, phi, mu));
  const auto cols = make_regular(phi, mu);
  for (int trial = 0; trial < 3; ++trial) {
    const BiQuaternion x = rng.rball(0.8);
    const cplx b = box_phi.value(x);
    const RegularPair r0 = dirac_mu_left(cols[0], mu);
    const RegularPair r1 = dirac_mu_left(cols[1], mu);
    REQUIRE(mat_dist(r0.a.value(x), scalar_mat(b)) < 1e-10);
    REQUIRE(mat_dist(r0.b.value(x), BiQuaternion::zero()) < 1e-10);
    REQUIRE(mat_dist(r1.a.value(x), BiQuaternion::zero()) < 1e-10);
    REQUIRE(mat_dist(r1.b.value(x), scalar_mat(b)) < 1e-10);
  }
}

TEST_CASE("right factorization of the deformed wave operator") {
  Rng rng(89);
  const double mu = 0.6;
  const auto phi = ScalarField::closed_form(PolyFn{});
  const auto box_phi = std::get<ScalarField>(
      apply_operator(OperatorKind::box_mu_tilde, phi, mu));
  const auto rows = make_regular_right(phi, mu, 0.0);  // rows of phi Dbar
  for (int trial = 0; trial < 3; ++trial) {
    const BiQuaternion x = rng.rball(0.8);
    const cplx b = box_phi.value(x);
    // phi Dbar (Dbar + mu): apply (Dbar + mu) to the rows of phi Dbar
    const RegularPair s0 = dirac_mu_right(rows[0], mu) + mu * rows[0];
    const RegularPair s1 = dirac_mu_right(rows[1], mu) + mu * rows[1];
    REQUIRE(mat_dist(s0.a.value(x), scalar_mat(b)) < 1e-10);
    REQUIRE(mat_dist(s0.b.value(x), BiQuaternion::zero()) < 1e-10);
    REQUIRE(mat_dist(s1.a.value(x), BiQuaternion::zero()) < 1e-10);
    REQUIRE(mat_dist(s1.b.value(x), scalar_mat(b)) < 1e-10);
  }
}

TEST_CASE("dirac square identity") {
  // D^2 = box_mu_tilde + mu D
  Rng rng(97);
  const double mu = 0.8;
  const auto phi = ScalarField::closed_form(PolyFn{});
  const auto box_phi = std::get<ScalarField>(
      apply_operator(OperatorKind::box_mu_tilde, phi, mu));
  const auto cols = make_regular(phi, mu, 0.0);  // columns of D phi, no shift
  for (int trial = 0; trial < 2; ++trial) {
    const BiQuaternion x = rng.rball(0.7);
    const cplx b = box_phi.value(x);
    for (int j = 0; j < 2; ++j) {
      const RegularPair sq = dirac_mu_left(cols[j], mu);
      const BiQuaternion id_a = j == 0 ? scalar_mat(b) : BiQuaternion::zero();
      const BiQuaternion id_b = j == 1 ? scalar_mat(b) : BiQuaternion::zero();
      REQUIRE(mat_dist(sq.a.value(x), id_a + mu * cols[j].a.value(x)) < 1e-10);
      REQUIRE(mat_dist(sq.b.value(x), id_b + mu * cols[j].b.value(x)) < 1e-10);
    }
  }
}

TEST_CASE("columns built from a deformed harmonic are regular") {
  Rng rng(101);
  const double mu = 0.9;
  const auto phi = deformed_harmonic(1, 1, -1, mu, +1);
  const auto cols = make_regular(phi, mu);
  for (int trial = 0; trial < 3; ++trial) {
    const BiQuaternion x = solid_point(rng, 0.7, 0.1);
    for (int j = 0; j < 2; ++j) {
      const RegularPair r = dirac_mu_left(cols[j], mu);
      REQUIRE(mat_dist(r.a.value(x), BiQuaternion::zero()) < 1e-9);
      REQUIRE(mat_dist(r.b.value(x), BiQuaternion::zero()) < 1e-9);
    }
  }
}

TEST_CASE("anticommutator with the coordinate swap") {
  // (D - mu)(swap F) + swap(D F) = 2 sqrt(1+mu^2 N) (deg + 2) F
  Rng rng(103);
  const double mu = 0.75;
  const auto f1 = ScalarField::closed_form(PolyFn{});
  const auto f2 = ScalarField::closed_form([](const auto& m) {
    return m.z12 * m.z22 - 2.0 * m.z11 + m.z21 * m.z21 * m.z11;
  });
  const RegularPair F{MatrixField::scalar(f1), MatrixField::scalar(f2)};
  const RegularPair lhs1 =
      dirac_mu_left(mult_swap(F), mu) + (-mu) * mult_swap(F);
  const RegularPair lhs2 = mult_swap(dirac_mu_left(F, mu));
  const auto d1 = std::get<ScalarField>(apply_operator(OperatorKind::deg, f1));
  const auto d2 = std::get<ScalarField>(apply_operator(OperatorKind::deg, f2));
  for (int trial = 0; trial < 3; ++trial) {
    const BiQuaternion x = rng.rball(0.8);
    const cplx root = std::sqrt(cplx(1.0) + mu * mu * norm(x));
    const cplx ra = 2.0 * root * (d1.value(x) + 2.0 * f1.value(x));
    const cplx rb = 2.0 * root * (d2.value(x) + 2.0 * f2.value(x));
    REQUIRE(mat_dist(lhs1.a.value(x) + lhs2.a.value(x), scalar_mat(ra)) <
            1e-10);
    REQUIRE(mat_dist(lhs1.b.value(x) + lhs2.b.value(x), scalar_mat(rb)) <
            1e-10);
  }
}

TEST_CASE("five-variable wave operator") {
  const auto f0 = Field5::closed_form([](const auto& w) { return w[0] * w[0]; });
  const auto f1 = Field5::closed_form([](const auto& w) { return w[1] * w[1]; });
  const auto lor = Field5::closed_form([](const auto& w) {
    return w[0] * w[0] - w[1] * w[1] - w[2] * w[2] - w[3] * w[3] - w[4] * w[4];
  });
  const Minkowski5Point p{0.4, 0.1, -0.2, 0.3, 0.05};
  REQUIRE(std::abs(apply_operator(OperatorKind::box_14, f0).value(p) -
                   cplx(2.0)) < 1e-13);
  REQUIRE(std::abs(apply_operator(OperatorKind::box_14, f1).value(p) -
                   cplx(-2.0)) < 1e-13);
  REQUIRE(std::abs(apply_operator(OperatorKind::box_14, lor).value(p) -
                   cplx(10.0)) < 1e-13);
  const Jet2 j = jet_eval(lor, p);
  REQUIRE(j.grad.size() == 5);
  REQUIRE(std::abs(j.grad[0] - cplx(0.8)) < 1e-14);
  REQUIRE(std::abs(j.grad[2] - cplx(0.4)) < 1e-14);
  REQUIRE(std::abs(j.hess[1][1] - cplx(-2.0)) < 1e-14);
  REQUIRE(std::abs(j.hess[0][1]) < 1e-14);
}

TEST_CASE("five-variable operator rejects four-variable kinds") {
  const auto f = Field5::closed_form([](const auto& w) { return w[0]; });
  REQUIRE_THROWS_AS(apply_operator(OperatorKind::box, f), DimensionMismatch);
  const auto g = ScalarField::closed_form([](const auto& m) { return norm(m); });
  REQUIRE_THROWS_AS(apply_operator(OperatorKind::box_14, g),
                    DimensionMismatch);
}
