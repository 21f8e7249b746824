#include "gradedcalc/elliptic.hpp"

#include <doctest.h>

using namespace gradedcalc;
using Status = RocklandVerdict::Status;

namespace {

Polynomial X(int i) { return Polynomial(xvar(i)); }
PolyDiffOp M(std::size_t d, const Polynomial& p) { return PolyDiffOp::multiplication(d, p); }

// X1^4 + X2^4 - X3^2 + x1^4 + x2^4 + x3^2 on the double dilation of H1 (q = 2)
PolyDiffOp rockland_with_potential(const OperatorCalculus& dd) {
  return dd.field(0).pow(4) + dd.field(1).pow(4) - dd.field(2).pow(2) +
         M(3, X(1).pow(4) + X(2).pow(4) + X(3).pow(2));
}

}  // namespace

TEST_CASE("generating families") {
  auto h = heisenberg(1);
  CHECK(generating_certificate(h, {0, 1}));
  CHECK_FALSE(generating_certificate(h, {0}));
  CHECK_FALSE(generating_certificate(h, {0, 2}));
  CHECK(generating_certificate(engel(), {0, 1}));
  CHECK(generating_certificate(abelian(2), {0, 1}));
  auto s = symbol_group(representation(h));
  CHECK(generating_certificate(s, {3, 4, 2}));
  CHECK_FALSE(generating_certificate(s, {3, 4}));
}

TEST_CASE("symbolic certificate") {
  OperatorCalculus rep(representation(heisenberg(1)));
  PolyDiffOp ho = M(3, X(3).pow(2)) - rep.field(0) * rep.field(0) - rep.field(1) * rep.field(1);
  auto sigma = rep.cocosymbol(rep.normal_form(ho), 2);
  CHECK(rockland_certificate(sigma).status == Status::CertifiedElliptic);
  CHECK(enveloping_adjoint(sigma) == sigma);
  CHECK(rockland_certificate(enveloping_adjoint(sigma)).status == Status::CertifiedElliptic);

  OperatorCalculus dd(double_dilation(heisenberg(1)));
  auto rw = dd.cocosymbol(dd.normal_form(rockland_with_potential(dd)), 4);
  CHECK(rockland_certificate(rw).status == Status::CertifiedElliptic);

  // positive rescaling of individual terms keeps the certificate
  auto e = dd.symbol_enveloping();
  auto scaled = Gaussian(3) * e->monomial({4, 0, 0, 0, 0, 0}) + Gaussian(Rational(1, 2)) * e->monomial({0, 4, 0, 0, 0, 0}) -
                Gaussian(7) * e->monomial({0, 0, 2, 0, 0, 0}) + e->monomial({0, 0, 0, 4, 0, 0}) +
                Gaussian(5) * e->monomial({0, 0, 0, 0, 4, 0}) - e->monomial({0, 0, 0, 0, 0, 2});
  CHECK(rockland_certificate(scaled).status == Status::CertifiedElliptic);
  auto wrong_sign = e->monomial({4, 0, 0, 0, 0, 0}) + e->monomial({0, 4, 0, 0, 0, 0}) + e->monomial({0, 0, 2, 0, 0, 0}) +
                    e->monomial({0, 0, 0, 4, 0, 0}) + e->monomial({0, 0, 0, 0, 4, 0}) - e->monomial({0, 0, 0, 0, 0, 2});
  CHECK(rockland_certificate(wrong_sign).status == Status::Inconclusive);

  auto u = Enveloping::make(heisenberg(1));
  CHECK(rockland_certificate(u->monomial({2, 0, 0})).status == Status::Inconclusive);
  CHECK(rockland_certificate(Gaussian(-1) * u->monomial({2, 0, 0})).status == Status::Inconclusive);
  CHECK(rockland_certificate(Gaussian(-1) * (u->monomial({2, 0, 0}) + u->monomial({0, 2, 0}))).status ==
        Status::CertifiedElliptic);
  CHECK(rockland_certificate(u->generator(0) * u->generator(1)).status == Status::Inconclusive);
}

TEST_CASE("schrodinger matrices") {
  RepMatrices r = schrodinger_rep(1, 1.0, 3);
  CMatrix x2 = CMatrix(r.generators[1]);
  CMatrix expect = CMatrix::Zero(3, 3);
  expect(0, 1) = expect(1, 0) = std::complex<double>(0, std::sqrt(0.5));
  expect(1, 2) = expect(2, 1) = std::complex<double>(0, 1.0);
  CHECK((x2 - expect).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((CMatrix(r.generators[2]) - std::complex<double>(0, 1) * CMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() == 0);
  CHECK_THROWS(schrodinger_rep(1, 0.0, 4));

  for (int n : {1, 2})
    for (double l : {-2.0, 0.5, 1.0}) CHECK(commutator_fidelity(schrodinger_rep(n, l, 8), heisenberg(n)) <= 1e-12);

  RepMatrices s = schrodinger_rep(1, 1.0, 10);
  CSparse c = s.generators[0] * s.generators[1] - s.generators[1] * s.generators[0];
  CMatrix block = interior_block(c, interior_indices(1, 10, 1));
  CHECK((block - std::complex<double>(0, 1) * CMatrix::Identity(9, 9)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("numeric rockland") {
  OperatorCalculus dd(double_dilation(heisenberg(1)));
  auto good = numeric_rockland(dd, dd.normal_form(rockland_with_potential(dd)), 4);
  CHECK(good.status == Status::NumericEvidence);
  CHECK(good.table.size() == 1 + 6 * 3 * 3);

  auto bad = numeric_rockland(dd, dd.normal_form(dd.field(0).pow(2)), 2);
  CHECK(bad.status == Status::NumericFailure);
  CHECK_FALSE(bad.witness.empty());

  OperatorCalculus line(double_dilation(abelian(1)));
  auto osc = numeric_rockland(line, line.normal_form(M(1, X(1).pow(2)) - line.field(0) * line.field(0)), 2);
  CHECK(osc.status == Status::NumericEvidence);
  REQUIRE(osc.table.size() == 1);
  CHECK(osc.table[0].sigma_min == doctest::Approx(1.0).epsilon(1e-12));

  auto det1 = numeric_rockland(dd, dd.normal_form(rockland_with_potential(dd)), 4);
  REQUIRE(det1.table.size() == good.table.size());
  for (std::size_t i = 0; i < det1.table.size(); ++i) CHECK(det1.table[i].sigma_min == good.table[i].sigma_min);

  OperatorCalculus rep(representation(heisenberg(1)));
  CHECK_THROWS_AS(numeric_rockland(rep, rep.normal_form(M(3, X(3))), 1), UnsupportedGroup);
}
