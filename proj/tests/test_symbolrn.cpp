#include "gradedcalc/symbolrn.hpp"

#include <doctest.h>

#include <random>

using namespace gradedcalc;

namespace {

Polynomial X(int i) { return Polynomial(xvar(i)); }
Polynomial XI(int i) { return Polynomial(xivar(i)); }

SymbolWeights aniso() { return {WeightVector({1}), WeightVector({2})}; }

}  // namespace

TEST_CASE("rational symbols") {
  SymbolWeights w = SymbolWeights::isotropic(1);
  RationalSymbol r = RationalSymbol::reciprocal(w, Polynomial(1) + X(1).pow(2));
  CHECK(r.order() == -2);
  RationalSymbol d = r.dx(0);
  CHECK(d.equals(RationalSymbol(w, Gaussian(-2) * X(1), {{Polynomial(1) + X(1).pow(2), 2}})));
  CHECK(r.dxi(0).is_zero());
  CHECK(d.evaluate({1.0}, {0.0}).real() == doctest::Approx(-0.5));

  RationalSymbol sum = r + RationalSymbol(w, X(1).pow(2), {{Polynomial(1) + X(1).pow(2), 1}});
  CHECK(sum.equals(RationalSymbol(w, Polynomial(1))));
  CHECK((r * RationalSymbol(w, Polynomial(1) + X(1).pow(2))).equals(RationalSymbol(w, Polynomial(1))));
  CHECK((r - r).is_zero());

  PolyDiffOp op = PolyDiffOp::multiplication(1, X(1)) * PolyDiffOp::partial(1, 0, 1) + PolyDiffOp::partial(1, 0, 2);
  RationalSymbol s = full_symbol(op, w);
  CHECK(s.numerator() == Gaussian::i() * X(1) * XI(1) - XI(1).pow(2));

  SymbolWeights a = aniso();
  CHECK(a.min_drop() == 3);
  CHECK(RationalSymbol(a, XI(1).pow(2) + X(1).pow(4)).order() == 4);
}

TEST_CASE("kohn-nirenberg expansion") {
  SymbolWeights w = SymbolWeights::isotropic(1);
  RationalSymbol p(w, XI(1).pow(2)), q(w, X(1).pow(2));
  KnExpansion e = kn_compose_asymptotic(p, q, 3);
  REQUIRE(e.terms.size() == 3);
  CHECK(e.terms[0].term.numerator() == XI(1).pow(2) * X(1).pow(2));
  CHECK(e.terms[1].term.numerator() == Gaussian(Rational(0), Rational(-4)) * X(1) * XI(1));
  CHECK(e.terms[2].term.numerator() == Polynomial(-2));
  CHECK(e.terms[1].declared_order == 2);
  CHECK(e.exact);
  CHECK_FALSE(kn_compose_asymptotic(p, q, 2).exact);
  CHECK(kn_compose_asymptotic(p, q, 2).remainder_order == 0);

  // composition of operators agrees with the exact expansion
  PolyDiffOp P = -PolyDiffOp::partial(1, 0, 2), Q = PolyDiffOp::multiplication(1, X(1).pow(2));
  CHECK(e.sum.equals(full_symbol(P * Q, w)));

  RationalSymbol one(w, Polynomial(1));
  KnExpansion u = kn_compose_asymptotic(one, q, 4);
  REQUIRE(u.terms.size() == 1);
  CHECK(u.sum.equals(q));
}

TEST_CASE("parametrix") {
  SymbolWeights w = SymbolWeights::isotropic(1);
  RationalSymbol p(w, XI(1).pow(2) + X(1).pow(2));
  Parametrix par = parametrix_expansion(p, 4);
  CHECK(par.order == 2);
  REQUIRE(par.residuals.size() == 4);
  CHECK(par.residual_declared[0] == -2);
  for (std::size_t k = 0; k < 4; ++k) {
    auto o = par.residuals[k].order();
    if (o) CHECK(*o <= par.residual_declared[k]);
    auto t = par.terms[k].order();
    if (t) CHECK(*t <= par.declared_orders[k]);
  }
  CHECK(*par.residuals[0].order() == -2);

  RationalSymbol pa(aniso(), XI(1).pow(2) + X(1).pow(4));
  Parametrix an = parametrix_expansion(pa, 3);
  CHECK(an.order == 4);
  for (std::size_t k = 0; k < 3; ++k) {
    auto o = an.residuals[k].order();
    if (o) CHECK(*o <= -3 * static_cast<long>(k + 1));
  }

  CHECK_THROWS_AS(parametrix_expansion(RationalSymbol(w, XI(1).pow(2)), 2), NotElliptic);
  CHECK_THROWS_AS(parametrix_expansion(RationalSymbol(w, XI(1).pow(2) - X(1).pow(2)), 2), NotElliptic);
  CHECK_THROWS_AS(parametrix_expansion(RationalSymbol(w, XI(1).pow(2) + X(1).pow(4)), 2), NotElliptic);
}

TEST_CASE("symbol estimates") {
  SymbolWeights w = SymbolWeights::isotropic(2);
  RationalSymbol p(w, XI(1).pow(2) + XI(2).pow(2) + X(1).pow(2) + X(2).pow(2));
  auto set = derivative_set(w, 2);
  CHECK(set.size() == 15);
  EstimateReport good = symbol_estimate_check(p, 2, set);
  CHECK(good.pass);
  EstimateReport bad = symbol_estimate_check(p, 1, set);
  CHECK_FALSE(bad.pass);
  CHECK(bad.rows[0].slope == doctest::Approx(1.0).epsilon(0.1));

  Parametrix par = parametrix_expansion(p, 2);
  CHECK(symbol_estimate_check(par.terms[0], -2, set).pass);
  CHECK(decay_slope(par.residuals[0]) <= -2 + 0.3);
  CHECK(decay_slope(par.terms[0]) == doctest::Approx(-2.0).epsilon(0.05));

  RationalSymbol pa(aniso(), XI(1).pow(2) + X(1).pow(4));
  CHECK(symbol_estimate_check(pa, 4, derivative_set(aniso(), 4)).pass);
}

TEST_CASE("expansion leading term is the product") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> coef(-3, 3), deg(0, 3);
  SymbolWeights w = SymbolWeights::isotropic(2);
  auto random_homogeneous = [&](int d) {
    Polynomial p;
    for (int t = 0; t < 4; ++t) {
      int e[4] = {0, 0, 0, 0};
      for (int k = 0; k < d; ++k) e[deg(rng)]++;
      Polynomial m = Polynomial::var(xvar(1), e[0]) * Polynomial::var(xvar(2), e[1]) *
                     Polynomial::var(xivar(1), e[2]) * Polynomial::var(xivar(2), e[3]);
      p += Polynomial(coef(rng)) * m;
    }
    return p;
  };
  for (int s = 0; s < 30; ++s) {
    RationalSymbol p(w, random_homogeneous(2 + s % 2)), q(w, random_homogeneous(2));
    if (p.is_zero() || q.is_zero()) continue;
    KnExpansion e = kn_compose_asymptotic(p, q, 5);
    CHECK(e.exact);
    auto rest = (e.sum - p * q).order();
    if (rest) CHECK(*rest <= *p.order() + *q.order() - w.min_drop());
  }
}
