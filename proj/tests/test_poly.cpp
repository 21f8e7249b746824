#include "gradedcalc/poly.hpp"

#include <doctest.h>

#include <random>

using namespace gradedcalc;

namespace {

Polynomial X(int i) { return Polynomial(xvar(i)); }
Polynomial V(int i) { return Polynomial(vvar(i)); }
Polynomial Y(int i) { return Polynomial(yvar(i)); }

Polynomial random_poly(std::mt19937& rng, const std::vector<Var>& vars, int terms, int maxdeg) {
  std::uniform_int_distribution<int> coef(-3, 3), deg(0, maxdeg), pick(0, static_cast<int>(vars.size()) - 1);
  Polynomial p;
  for (int k = 0; k < terms; ++k) {
    Polynomial m(coef(rng));
    int d = deg(rng);
    for (int j = 0; j < d; ++j) m *= Polynomial(vars[pick(rng)]);
    p += m;
  }
  return p;
}

}  // namespace

TEST_CASE("ring arithmetic") {
  CHECK((V(1) + V(2)) * (V(1) - V(2)) == V(1).pow(2) - V(2).pow(2));
  CHECK((V(1).pow(2) * V(2)).derivative(vvar(1)) == 2 * V(1) * V(2));
  Polynomial t(tvar());
  CHECK(Polynomial::var(tvar(), -1) * t.pow(2) == t);
  CHECK(Polynomial::var(tvar(), -2).derivative(tvar()) == Polynomial(-2) * Polynomial::var(tvar(), -3));
  CHECK_THROWS_AS(Monomial::var(xvar(1), -1), std::invalid_argument);
  CHECK(((V(1) + 1) - V(1) - 1).is_zero());
}

TEST_CASE("variable roles are enforced") {
  CHECK_THROWS_AS(Var("x1", Role::Group), std::invalid_argument);
  CHECK(Var("x1", Role::Space) == xvar(1));
  CHECK(xvar(2) < xvar(10));
}

TEST_CASE("printing") {
  CHECK((X(1).pow(2) - Polynomial(Rational(1, 2)) * X(2)).str() == "x1^2 - 1/2*x2");
  CHECK(Polynomial(Gaussian::i()).str() == "i");
  CHECK(Polynomial().str() == "0");
}

TEST_CASE("compose") {
  PolyMap f({xvar(1)}, {X(1).pow(2)});
  PolyMap g({xvar(1)}, {X(1) + 1});
  CHECK(compose(f, g)[0] == X(1).pow(2) + 2 * X(1) + 1);

  Polynomial lam(lamvar());
  PolyMap up({xvar(1), xvar(2)}, {lam * X(1), lam.pow(2) * X(2)});
  PolyMap down({xvar(1), xvar(2)}, {Polynomial::var(lamvar(), -1) * X(1), Polynomial::var(lamvar(), -2) * X(2)});
  CHECK(compose(up, down).is_identity());
  CHECK_THROWS_AS(compose(f, up), DimensionMismatch);
}

TEST_CASE("compose is associative") {
  std::mt19937 rng(7);
  auto xs = var_range(xvar, 2);
  for (int trial = 0; trial < 20; ++trial) {
    auto mk = [&] { return PolyMap(xs, {random_poly(rng, xs, 3, 2), random_poly(rng, xs, 3, 2)}); };
    PolyMap f = mk(), g = mk(), h = mk();
    CHECK(compose(compose(f, g), h) == compose(f, compose(g, h)));
  }
}

TEST_CASE("weighted degree") {
  auto w = make_weights(var_range(vvar, 3), {1, 1, 2});
  CHECK(weighted_degree(V(1) * V(3), w) == 3);
  CHECK(homogeneous_component(V(1).pow(2) + V(3), w, 2) == V(1).pow(2) + V(3));
  CHECK(homogeneous_component(V(1) + V(3), w, 5).is_zero());
  CHECK(is_homogeneous(V(1).pow(4) + V(2).pow(4) + V(3).pow(2), w, 4));
  CHECK_FALSE(weighted_degree(Polynomial(), w).has_value());
  CHECK(weighted_degree(Polynomial(tvar()) * V(3), w) == 2);
  CHECK_THROWS_AS(weighted_degree(X(1), w), UnknownVariable);

  std::mt19937 rng(11);
  auto vs = var_range(vvar, 3);
  for (int trial = 0; trial < 50; ++trial) {
    Polynomial p = random_poly(rng, vs, 4, 3), q = random_poly(rng, vs, 4, 3);
    if (p.is_zero() || q.is_zero()) continue;
    CHECK(*weighted_degree(p * q, w) == *weighted_degree(p, w) + *weighted_degree(q, w));
  }
}

TEST_CASE("jacobian determinant") {
  auto xs = var_range(xvar, 3);
  CHECK(jacobian_det(PolyMap::identity(xs), xs) == Polynomial(1));
  PolyMap tri({xvar(1), xvar(2)}, {X(1), X(2) + X(1).pow(2)});
  CHECK(jacobian_det(tri, {xvar(1), xvar(2)}) == Polynomial(1));
  // a 4x4 determinant with a known value
  std::vector<std::vector<Polynomial>> m = {
      {2, 0, 1, 0}, {1, 3, 0, 0}, {0, 1, 1, 1}, {1, 0, 0, 2}};
  CHECK(determinant(m) == Polynomial(17));
}

TEST_CASE("triangular inversion") {
  PolyMap f({vvar(1), vvar(2)}, {V(1), V(2) + V(1).pow(3)});
  auto r = invert_triangular(f, {vvar(1), vvar(2)});
  REQUIRE(std::holds_alternative<PolyMap>(r));
  auto& g = std::get<PolyMap>(r);
  CHECK(g[0] == V(1));
  CHECK(g[1] == V(2) - V(1).pow(3));

  PolyMap sq({vvar(1)}, {V(1).pow(2)});
  CHECK(std::holds_alternative<NotTriangular>(invert_triangular(sq, {vvar(1)})));

  PolyMap nonconst({vvar(1), vvar(2)}, {V(1), V(1) * V(2)});
  auto bad = invert_triangular(nonconst, {vvar(1), vvar(2)});
  REQUIRE(std::holds_alternative<NotTriangular>(bad));
  CHECK(std::get<NotTriangular>(bad).component == 1);

  // solving with a scaled leading coefficient and renamed targets
  PolyMap s({vvar(1), vvar(2)}, {2 * V(1), V(2) - V(1) * V(1)});
  auto rs = invert_triangular(s, {vvar(1), vvar(2)}, std::vector<Var>{yvar(1), yvar(2)});
  REQUIRE(std::holds_alternative<PolyMap>(rs));
  CHECK(std::get<PolyMap>(rs)[0] == Polynomial(Rational(1, 2)) * Y(1));
}

TEST_CASE("inverse of a random unipotent map has constant jacobian") {
  std::mt19937 rng(3);
  auto vs = var_range(vvar, 3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Polynomial> c = {V(1), V(2) + random_poly(rng, {vvar(1)}, 3, 3),
                                 -V(3) + random_poly(rng, {vvar(1), vvar(2)}, 4, 3)};
    PolyMap f(vs, c);
    auto r = invert_triangular(f, vs);
    REQUIRE(std::holds_alternative<PolyMap>(r));
    Polynomial J = jacobian_det(std::get<PolyMap>(r), vs);
    CHECK(J.is_constant());
    CHECK_FALSE(J.is_zero());
  }
}
