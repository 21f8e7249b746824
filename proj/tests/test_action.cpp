#include "gradedcalc/action.hpp"

#include <doctest.h>

using namespace gradedcalc;

namespace {

Polynomial X(int i) { return Polynomial(xvar(i)); }
Polynomial V(int i) { return Polynomial(vvar(i)); }
Polynomial Y(int i) { return Polynomial(yvar(i)); }
Polynomial T(int e = 1) { return Polynomial::var(tvar(), e); }
const Polynomial half(Rational(1, 2));

PolyVec dilate(const PolyVec& v, const WeightVector& w, const Polynomial& s) {
  PolyVec out;
  for (std::size_t j = 0; j < v.size(); ++j) out.push_back(s.pow(w[j]) * v[j]);
  return out;
}

}  // namespace

TEST_CASE("action axioms") {
  auto h = heisenberg(1);
  GroupLaw law = bch_product(h);
  auto right = make_action("right", law, h.weights(), law.multiply(coords(xvar, 3), coords(vvar, 3)));
  CHECK(validate_action(right).ok());
  CHECK(validate_action(grushin_action(1, 1, 1, 1)).ok());

  // the coset formula with x v2 / 2 in place of x v2 is not an action of H1
  auto halved = make_action("halved", law, WeightVector({1, 1}),
                            {X(1) + V(1), X(2) + V(3) + half * X(1) * V(2)});
  CHECK(validate_action(halved).has("compatibility"));

  GroupLaw ab = bch_product(abelian(1));
  auto bad = make_action("bad", ab, WeightVector({1}), {X(1) + V(1).pow(2)});
  CHECK_FALSE(validate_action(bad).ok());
}

TEST_CASE("double dilation on H1") {
  auto h = heisenberg(1);
  DeformedAction dd = double_dilation(h);
  GroupLaw law = bch_product(h);
  CHECK(dd.theta.components() == law.multiply(coords(xvar, 3), dilate(coords(vvar, 3), h.weights(), T(2))));
  CHECK(theta_zero(dd).theta.components() == coords(xvar, 3));
  CHECK(check_property_R(dd).holds);
  CHECK(zoom_check(dd));
  CHECK(check_deformed(dd).ok());
  CHECK(check_order_law(dd).ok());

  auto p = check_property_P(dd.base);
  REQUIRE(std::holds_alternative<PolyMap>(p));
  const PolyMap& omega = std::get<PolyMap>(p);
  PolyVec xs = coords(xvar, 3), ys = coords(yvar, 3);
  PolyVec expected = xs;
  for (auto& c : law.multiply(law.inverse(xs), ys)) expected.push_back(c);
  CHECK(omega.components() == expected);
  CHECK(omega[5] == Y(3) - X(3) - half * (X(1) * Y(2) - X(2) * Y(1)));
}

TEST_CASE("representation groupoid") {
  SUBCASE("abelian") {
    PolyMap field = representation_field(abelian(2));
    CHECK(field.components() == PolyVec{X(1) + T() * V(1), X(2) + T() * V(2)});
    DeformedAction rep = representation(abelian(2));
    CHECK(rep.theta.components() == PolyVec{X(1) + T(2) * V(1), X(2) + T(2) * V(2)});
    CHECK(zoom_check(rep));
  }
  SUBCASE("heisenberg") {
    PolyMap field = representation_field(heisenberg(1));
    CHECK(field[0] == X(1) + T() * V(1));
    CHECK(field[1] == X(2) + T() * V(2));
    CHECK(field[2] == X(3) + V(2) * X(1) - V(1) * X(2) + 2 * T() * V(3));

    DeformedAction rep = representation(heisenberg(1));
    CHECK(rep.beta().values() == std::vector<int>{2, 2, 1});
    CHECK(rep.theta[0] == X(1) + T(3) * V(1));
    CHECK(rep.theta[2] == X(3) + V(2) * X(1) - V(1) * X(2) + 2 * T(3) * V(3));

    // the same groupoid by conjugating the t=1 action with the dilations
    auto direct = deform(rep.base, rep.alpha, rep.beta());
    REQUIRE(std::holds_alternative<DeformedAction>(direct));
    CHECK(std::get<DeformedAction>(direct).theta == rep.theta);

    CHECK(std::holds_alternative<PolyMap>(check_property_P(rep.base)));
    CHECK(check_property_R(rep).holds);
    PolynomialAction zero = theta_zero(rep);
    CHECK(zero.theta[2] == X(3) + V(2) * X(1) - V(1) * X(2));
    CHECK(check_order_law(rep).ok());
  }
  SUBCASE("heisenberg n=2 and engel") {
    for (auto g : {heisenberg(2), engel()}) {
      DeformedAction rep = representation(g);
      CHECK(check_deformed(rep).ok());
      CHECK(check_property_R(rep).holds);
      CHECK(std::holds_alternative<PolyMap>(check_property_P(rep.base)));
      CHECK(check_order_law(rep).ok());
    }
  }
  SUBCASE("wrong exponent is rejected") {
    auto h = heisenberg(1);
    CHECK_THROWS_AS(rescale_field("x", bch_product(h), h.weights(), WeightVector({2, 2, 1}),
                                  representation_field(h), 2),
                    IncompatibleField);
  }
  SUBCASE("k=1 on a deformation") {
    DeformedAction dd = double_dilation(heisenberg(1));
    DeformedAction same = rescale_field("dd", dd.base.group, dd.alpha, dd.beta(), dd.theta, 1);
    CHECK(same.theta == dd.theta);
  }
}

TEST_CASE("engel with isotropic space dilation") {
  DeformedAction e = double_dilation(engel(), std::vector<int>{1, 1, 1, 1});
  PolynomialAction zero = theta_zero(e);
  CHECK(zero.theta[0] == X(1));
  CHECK(zero.theta[2] == X(3));
  CHECK(zero.theta[3] == X(4) + Polynomial(Rational(1, 12)) * X(1) * (X(1) * V(2) - X(2) * V(1)));
  PropertyR r = check_property_R(e);
  CHECK_FALSE(r.holds);
  CHECK(r.component == 3);
  CHECK(r.witness.find("x1^2") != std::string::npos);
  CHECK(zoom_check(e));
  CHECK_THROWS(symbol_group(e));
}

TEST_CASE("grushin family") {
  for (int k = 1; k <= 3; ++k)
    for (int l = 1; l <= 3; ++l)
      for (int p = 1; p <= 3; ++p)
        for (int q = 1; q <= 3; ++q) {
          CAPTURE(k);
          CAPTURE(l);
          CAPTURE(p);
          CAPTURE(q);
          auto r = grushin(k, l, p, q);
          CHECK(std::holds_alternative<DeformedAction>(r) == (l + q >= p));
          if (auto* da = std::get_if<DeformedAction>(&r)) {
            bool trivial = theta_zero(*da).theta.components() == coords(xvar, 2);
            CHECK(trivial == (l + q > p));
            CHECK(da->theta[1] == X(2) + T(k + l + q) * (V(3) + half * V(1) * V(2)) + T(l + q - p) * X(1) * V(2));
            CHECK(check_property_R(*da).holds);
            CHECK(check_order_law(*da).ok());
          } else {
            auto w = std::get<NotShubin>(r);
            CHECK(w.component == 1);
            CHECK(w.exponent == l + q - p);
          }
        }
  auto r = grushin(1, 1, 2, 1);
  REQUIRE(std::holds_alternative<DeformedAction>(r));
  CHECK(theta_zero(std::get<DeformedAction>(r)).theta[1] == X(2) + X(1) * V(2));
  auto bad = grushin(1, 1, 3, 1);
  REQUIRE(std::holds_alternative<NotShubin>(bad));
  CHECK(std::get<NotShubin>(bad).witness.find("t^-1") != std::string::npos);

  auto p = check_property_P(grushin_action(1, 1, 1, 1));
  CHECK(std::holds_alternative<PropertyPFailure>(p));
}

TEST_CASE("zoom check detects a corrupted deformation") {
  DeformedAction dd = double_dilation(heisenberg(1));
  PolyVec c = dd.theta.components();
  c[0] = c[0].substitute(tvar(), T(2));
  DeformedAction bad = dd;
  bad.theta = PolyMap(dd.theta.source(), c);
  CHECK_FALSE(zoom_check(bad));
  CHECK(zoom_check(representation(abelian(3))));
}

TEST_CASE("group bundle") {
  DeformedAction b = group_bundle(1, heisenberg(1));
  CHECK(b.space_dim() == 4);
  CHECK(check_deformed(b).ok());
  CHECK(check_property_R(b).holds);
  CHECK(std::holds_alternative<PropertyPFailure>(check_property_P(b.base)));
}

TEST_CASE("fundamental vector fields") {
  DeformedAction rep = representation(heisenberg(1));
  auto f1 = fundamental_vf(rep, 0, Rational(1));
  CHECK(f1.comps == PolyVec{Polynomial(1), Polynomial(), -X(2)});
  auto f3 = fundamental_vf(rep, 2, Rational(1));
  CHECK(f3.comps == PolyVec{Polynomial(), Polynomial(), Polynomial(2)});

  auto g = std::get<DeformedAction>(grushin(1, 1, 1, 1));
  CHECK(fundamental_vf(g, 0, Rational(1)).comps == PolyVec{Polynomial(1), Polynomial()});
  CHECK(fundamental_vf(g, 1, Rational(1)).comps == PolyVec{Polynomial(), X(1)});
  CHECK(fundamental_vf(g, 2, Rational(1)).comps == PolyVec{Polynomial(), Polynomial(1)});

  DeformedAction dd = double_dilation(heisenberg(1));
  for (std::size_t j = 0; j < 3; ++j)
    for (auto& c : fundamental_vf(dd, j, Rational(0)).comps) CHECK(c.is_zero());

  // fundamental fields of a right action represent the bracket
  auto h = heisenberg(1);
  std::vector<PolyVectorField> f;
  for (std::size_t j = 0; j < 3; ++j) f.push_back(fundamental_vf(rep, j, Rational(1)));
  CHECK(commutator(f[0], f[1]) == f[2]);
}

TEST_CASE("symbol groups") {
  SUBCASE("double dilation is a direct product") {
    GradedLieAlgebra s = symbol_group(double_dilation(heisenberg(1)));
    CHECK(s.dim() == 6);
    for (std::size_t j = 3; j < 6; ++j)
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t k = 0; k < 6; ++k) CHECK(sgn(s.c(j, i, k)) == 0);
    CHECK(sgn(s.c(3, 4, 5) - 1) == 0);
  }
  SUBCASE("representation of H_n") {
    for (int n = 1; n <= 2; ++n) {
      GradedLieAlgebra s = symbol_group(representation(heisenberg(n)));
      const std::size_t d = 2 * n + 1;
      auto X = [&](int j) { return d + j - 1; };
      auto eta = [](int i) { return static_cast<std::size_t>(i - 1); };
      for (int j = 1; j <= n; ++j) {
        CHECK(s.c(X(j), X(n + j), X(2 * n + 1)) == 1);
        CHECK(s.c(X(j), eta(2 * n + 1), eta(n + j)) == -1);
        CHECK(s.c(X(n + j), eta(2 * n + 1), eta(j)) == 1);
      }
      CHECK(s.validate().ok());
    }
  }
  SUBCASE("grushin") {
    GradedLieAlgebra s = symbol_group(std::get<DeformedAction>(grushin(1, 1, 2, 1)));
    // basis (eta_x, eta_y, X1, X2, X3)
    CHECK(s.c(2, 3, 4) == 1);
    CHECK(s.c(3, 1, 0) == 1);
    CHECK(s.validate().ok());
  }
}
