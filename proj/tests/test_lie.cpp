#include "gradedcalc/lie.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace gradedcalc;

namespace {

Polynomial V(int i) { return Polynomial(vvar(i)); }
Polynomial W(int i) { return Polynomial(wvar(i)); }
Polynomial X(int i) { return Polynomial(xvar(i)); }
const Polynomial half(Rational(1, 2));

}  // namespace

TEST_CASE("built-in algebras validate") {
  CHECK(heisenberg(1).validate().ok());
  CHECK(heisenberg(3).validate().ok());
  CHECK(engel().validate().ok());
  CHECK(abelian(3).validate().ok());

  GradedLieAlgebra bad("bad", {1, 1});
  bad.set_constant(0, 1, 0, 1);
  auto d = bad.validate();
  CHECK(d.has("grading"));
  CHECK_FALSE(d.has("jacobi"));

  GradedLieAlgebra skew("skew", {1, 1, 2});
  skew.set_raw(0, 1, 2, 1);
  CHECK(skew.validate().has("antisymmetry"));

  // [X1,X2]=X3, [X2,X3]=X1 breaks nilpotency and, with these brackets, Jacobi
  GradedLieAlgebra jac("jac", {1, 1, 1, 1});
  jac.set_constant(0, 1, 2, 1);
  jac.set_constant(1, 2, 3, 1);
  jac.set_constant(0, 2, 0, 1);
  CHECK(jac.validate().has("jacobi"));
}

TEST_CASE("heisenberg group law") {
  for (int n = 1; n <= 2; ++n) {
    GroupLaw law = bch_product(heisenberg(n));
    for (int j = 1; j <= 2 * n; ++j) CHECK(law.product[j - 1] == V(j) + W(j));
    Polynomial centre = V(2 * n + 1) + W(2 * n + 1);
    for (int j = 1; j <= n; ++j) centre += half * (V(j) * W(n + j) - W(j) * V(n + j));
    CHECK(law.product[2 * n] == centre);
    CHECK(law.check().ok());
  }
}

TEST_CASE("engel group law") {
  GroupLaw law = bch_product(engel());
  const Polynomial twelfth(Rational(1, 12));
  CHECK(law.product[0] == V(1) + W(1));
  CHECK(law.product[1] == V(2) + W(2));
  CHECK(law.product[2] == V(3) + W(3) + half * (V(1) * W(2) - W(1) * V(2)));
  Polynomial expected = V(4) + W(4) + half * (V(1) * W(3) - W(1) * V(3)) +
                        twelfth * (V(1).pow(2) * W(2) - V(1) * W(1) * (V(2) + W(2)) + W(1).pow(2) * V(2));
  CHECK(law.product[3] == expected);
  CHECK(law.check().ok());
}

TEST_CASE("abelian group law is addition") {
  GroupLaw law = bch_product(abelian(3));
  for (int j = 1; j <= 3; ++j) CHECK(law.product[j - 1] == V(j) + W(j));
}

TEST_CASE("invalid algebra is rejected by bch_product") {
  GradedLieAlgebra bad("bad", {1, 1});
  bad.set_constant(0, 1, 0, 1);
  CHECK_THROWS_AS(bch_product(bad), InvalidAlgebra);
}

TEST_CASE("dilations") {
  PolyMap a = dilation(heisenberg(1));
  Polynomial lam(lamvar());
  CHECK(a[0] == lam * V(1));
  CHECK(a[2] == lam.pow(2) * V(3));
  CHECK(dilation_automorphism_check(heisenberg(1)));
  CHECK(dilation_automorphism_check(engel()));
  CHECK(dilation_automorphism_check(abelian(2, {1, 3})));
  CHECK_FALSE(dilation_automorphism_check(heisenberg(1).with_weights({1, 1, 1})));
}

TEST_CASE("quasi-norm and homogeneous dimension") {
  auto h = heisenberg(1);
  CHECK(quasi_norm(h, {1, 0, 0}, 2) == doctest::Approx(1));
  CHECK(quasi_norm(h, {0, 0, 4}, 2) == doctest::Approx(2));
  CHECK(homogeneous_dimension(h) == 4);
  CHECK_THROWS_AS(quasi_norm(h, {1, 0, 0}, 1), std::invalid_argument);

  std::mt19937 rng(5);
  std::uniform_int_distribution<int> num(-20, 20), den(1, 9), lnum(1, 30);
  auto e = engel();
  for (int trial = 0; trial < 100; ++trial) {
    double l = lnum(rng) / static_cast<double>(den(rng));
    std::vector<double> v(4), av(4);
    for (int j = 0; j < 4; ++j) {
      v[j] = num(rng) / static_cast<double>(den(rng));
      av[j] = std::pow(l, e.weight(j)) * v[j];
    }
    CHECK(quasi_norm(e, av, 6) == doctest::Approx(l * quasi_norm(e, v, 6)).epsilon(1e-12));
  }
}

TEST_CASE("left-invariant vector fields") {
  GroupLaw law = bch_product(heisenberg(1));
  auto X1 = left_invariant_vf(law, 0);
  CHECK(X1.comps[0] == Polynomial(1));
  CHECK(X1.comps[1].is_zero());
  CHECK(X1.comps[2] == -half * X(2));
  auto X3 = left_invariant_vf(law, 2);
  CHECK(X3.comps == PolyVec{Polynomial(), Polynomial(), Polynomial(1)});

  GroupLaw ab = bch_product(abelian(2));
  CHECK(left_invariant_vf(ab, 1).comps == PolyVec{Polynomial(), Polynomial(1)});
  CHECK_THROWS_AS(left_invariant_vf(law, 3), std::out_of_range);
}

TEST_CASE("left-invariant fields represent the bracket") {
  for (auto alg : {heisenberg(1), heisenberg(2), engel()}) {
    GroupLaw law = bch_product(alg);
    const std::size_t n = alg.dim();
    std::vector<PolyVectorField> f;
    for (std::size_t j = 0; j < n; ++j) f.push_back(left_invariant_vf(law, j));
    auto w = make_weights(var_range(xvar, static_cast<int>(n)), alg.weights().values());
    std::map<Var, Polynomial> at_zero;
    for (Var x : var_range(xvar, static_cast<int>(n))) at_zero.emplace(x, Polynomial());
    for (std::size_t j = 0; j < n; ++j) {
      CHECK(is_homogeneous_field(f[j], w, alg.weight(j)));
      for (std::size_t k = 0; k < n; ++k)
        CHECK(f[j].comps[k].substitute(at_zero) == Polynomial(j == k ? 1 : 0));
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        RatVec c(n);
        for (std::size_t k = 0; k < n; ++k) c[k] = alg.c(i, j, k);
        CHECK(commutator(f[i], f[j]) == linear_combination(f, c));
      }
  }
}

TEST_CASE("bar group") {
  // bar of R^n is H_n after sending (X_j, e^j, T) to (X_j, X_{n+j}, X_{2n+1})
  for (int n = 1; n <= 3; ++n) {
    GradedLieAlgebra bar = build_bar_group(abelian(n));
    CHECK(bar.dim() == static_cast<std::size_t>(2 * n + 1));
    std::vector<std::size_t> perm;
    for (int j = 0; j < n; ++j) perm.push_back(n + 1 + j);
    for (int j = 0; j < n; ++j) perm.push_back(n - 1 - j);
    perm.push_back(n);
    CHECK(bar.permuted(perm) == heisenberg(n).with_weights(bar.permuted(perm).weights().values()));
    CHECK(bar.permuted(perm).weights() == heisenberg(n).weights());
  }
  GradedLieAlgebra dh = build_bar_group(heisenberg(1));
  CHECK(dh.dim() == 7);
  CHECK(dh.validate().ok());
  CHECK(dh.nilpotency_class() == 3);
  CHECK(dh.step() == 3);
  CHECK(dh.weights().values() == std::vector<int>{1, 2, 2, 3, 1, 1, 2});
  CHECK(bch_product(dh).check().ok());
}
