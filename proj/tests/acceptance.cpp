// Acceptance driver: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "gradedcalc/parallel.hpp"
#include "gradedcalc/spectral.hpp"
#include "gradedcalc/symbolrn.hpp"
#include "support.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

using namespace gradedcalc;
using Status = RocklandVerdict::Status;

namespace {

Polynomial V(int i) { return Polynomial(vvar(i)); }
Polynomial W(int i) { return Polynomial(wvar(i)); }
Polynomial X(int i) { return Polynomial(xvar(i)); }
Polynomial XI(int i) { return Polynomial(xivar(i)); }
Polynomial T(int e = 1) { return Polynomial::var(tvar(), e); }
const Polynomial half(Rational(1, 2));
PolyDiffOp M(std::size_t d, const Polynomial& p) { return PolyDiffOp::multiplication(d, p); }

struct Outcome {
  bool pass = true;
  std::ostringstream notes;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes << " [failed: " << what << "]";
    }
  }
};

// Every structure constant of `s` against the listed nonzero ones (and their
// antisymmetric partners).
bool same_brackets(const GradedLieAlgebra& s, const std::vector<std::tuple<int, int, int, int>>& nonzero) {
  const std::size_t n = s.dim();
  std::vector<Rational> want(n * n * n);
  for (auto [i, j, k, c] : nonzero) {
    want[(i * n + j) * n + k] = Rational(c);
    want[(j * n + i) * n + k] = Rational(-c);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        if (s.c(i, j, k) != want[(i * n + j) * n + k]) return false;
  return true;
}

void group_laws(Outcome& o) {
  for (int n = 1; n <= 2; ++n) {
    GroupLaw law = bch_product(heisenberg(n));
    PolyVec expected;
    for (int j = 1; j <= 2 * n; ++j) expected.push_back(V(j) + W(j));
    Polynomial centre = V(2 * n + 1) + W(2 * n + 1);
    for (int j = 1; j <= n; ++j) centre += half * (V(j) * W(n + j) - W(j) * V(n + j));
    expected.push_back(centre);
    o.require(law.product.components() == expected, "H" + std::to_string(n));
  }
  GroupLaw law = bch_product(engel());
  PolyVec expected{V(1) + W(1), V(2) + W(2), V(3) + W(3) + half * (V(1) * W(2) - W(1) * V(2)),
                   V(4) + W(4) + half * (V(1) * W(3) - W(1) * V(3)) +
                       Polynomial(Rational(1, 12)) *
                           (V(1).pow(2) * W(2) - V(1) * W(1) * (V(2) + W(2)) + W(1).pow(2) * V(2))};
  o.require(law.product.components() == expected, "engel");
  o.notes << "H1, H2, engel exact";
}

void deformations(Outcome& o) {
  DeformedAction dd = double_dilation(heisenberg(1));
  auto direct = deform(dd.base, dd.alpha, dd.beta());
  o.require(std::holds_alternative<DeformedAction>(direct), "DD(H1) deforms");
  if (auto* da = std::get_if<DeformedAction>(&direct))
    o.require(theta_zero(*da).theta.components() == coords(xvar, 3), "DD(H1) theta^0 = id");

  PolyMap field = representation_field(heisenberg(1));
  o.require(field.components() == PolyVec{X(1) + T() * V(1), X(2) + T() * V(2),
                                          X(3) + V(2) * X(1) - V(1) * X(2) + 2 * T() * V(3)},
            "rep(H1) field");
  DeformedAction rep = representation(heisenberg(1));
  o.require(std::holds_alternative<PolyMap>(check_property_P(rep.base)), "rep(H1) (P)");
  o.require(check_property_R(rep).holds, "rep(H1) (R)");

  DeformedAction e = double_dilation(engel(), std::vector<int>{1, 1, 1, 1});
  o.require(theta_zero(e).theta[3] == X(4) + Polynomial(Rational(1, 12)) * X(1) * (X(1) * V(2) - X(2) * V(1)),
            "engel theta^0 fourth component");
  PropertyR r = check_property_R(e);
  o.require(!r.holds, "engel fails (R)");

  int deformed = 0, trivial = 0;
  for (int k = 1; k <= 3; ++k)
    for (int l = 1; l <= 3; ++l)
      for (int p = 1; p <= 3; ++p)
        for (int q = 1; q <= 3; ++q) {
          auto g = grushin(k, l, p, q);
          bool ok = std::holds_alternative<DeformedAction>(g) == (l + q >= p);
          if (auto* da = std::get_if<DeformedAction>(&g)) {
            ++deformed;
            bool triv = theta_zero(*da).theta.components() == coords(xvar, 2);
            trivial += triv;
            ok = ok && triv == (l + q > p);
          }
          o.require(ok, "grushin(" + std::to_string(k) + "," + std::to_string(l) + "," + std::to_string(p) + "," +
                            std::to_string(q) + ")");
        }
  o.notes << "engel (R) witness " << r.witness << "; grushin grid 81: " << deformed << " deform, " << trivial
          << " trivial theta^0";
}

void symbol_groups(Outcome& o) {
  // basis (eta1, eta2, eta3, X1, X2, X3)
  GradedLieAlgebra rep = symbol_group(representation(heisenberg(1)));
  o.require(rep.dim() == 6 && same_brackets(rep, {{3, 4, 5, 1}, {3, 2, 1, -1}, {4, 2, 0, 1}}), "rep(H1)");
  // basis (eta_x, eta_y, X1, X2, X3)
  GradedLieAlgebra gr = symbol_group(std::get<DeformedAction>(grushin(1, 1, 2, 1)));
  o.require(gr.dim() == 5 && same_brackets(gr, {{2, 3, 4, 1}, {3, 1, 0, 1}}), "grushin(1,1,2,1)");
  o.notes << "all " << rep.dim() * rep.dim() * rep.dim() + gr.dim() * gr.dim() * gr.dim()
          << " structure constants match";
}

void cocosymbol_algebra(Outcome& o) {
  std::vector<DeformedAction> candidates{
      double_dilation(heisenberg(1)), double_dilation(heisenberg(2)), double_dilation(engel()),
      double_dilation(abelian(2)),    representation(heisenberg(1)),  representation(abelian(2)),
      representation(engel()),        group_bundle(1, heisenberg(1)), std::get<DeformedAction>(grushin(1, 1, 1, 1)),
      std::get<DeformedAction>(grushin(1, 1, 2, 1))};
  std::vector<std::unique_ptr<OperatorCalculus>> actions;
  for (auto& da : candidates) {
    auto oc = std::make_unique<OperatorCalculus>(da);
    if (oc->has_property_P() && oc->has_property_R()) actions.push_back(std::move(oc));
  }
  o.require(!actions.empty(), "some action has (P) and (R)");
  const int pairs = 200, trips = 200;
  std::vector<int> bad(actions.size(), 0);
  parallel_for(actions.size(), thread_cap(), [&](std::size_t i) {
    const OperatorCalculus& oc = *actions[i];
    const DeformedAction& da = oc.action();
    std::mt19937_64 rng(1000 + i);
    std::uniform_int_distribution<int> ord(1, 4);
    for (int s = 0; s < pairs; ++s) {
      long l = ord(rng), m = ord(rng);
      NormalForm p = testsupport::random_normal_form(rng, da.alpha, da.beta(), l, 3);
      NormalForm q = testsupport::random_normal_form(rng, da.alpha, da.beta(), m, 3);
      NormalForm pq = oc.normal_form(oc.reconstruct(p) * oc.reconstruct(q));
      if (oc.order(pq) != l + m || oc.cocosymbol(pq, l + m) != oc.cocosymbol(p, l) * oc.cocosymbol(q, m)) ++bad[i];
    }
    for (int s = 0; s < trips; ++s) {
      PolyDiffOp p = testsupport::random_op(rng, da.space_dim(), 3, 3, 4);
      if (oc.reconstruct(oc.normal_form(p)) != p) ++bad[i];
      NormalForm w = testsupport::random_normal_form(rng, da.alpha, da.beta(), 4, 4);
      if (oc.normal_form(oc.reconstruct(w)) != w) ++bad[i];
    }
  });
  o.notes << actions.size() << " actions:";
  for (std::size_t i = 0; i < actions.size(); ++i) {
    o.notes << " " << actions[i]->action().name;
    o.require(bad[i] == 0, actions[i]->action().name + " " + std::to_string(bad[i]) + " mismatches");
  }
  o.notes << "; " << pairs << " products and " << trips << " round trips each";
}

// X1^4 + X2^4 - X3^2 + x1^4 + x2^4 + x3^2 on the double dilation of H1
PolyDiffOp rockland_with_potential(const OperatorCalculus& dd) {
  return dd.field(0).pow(4) + dd.field(1).pow(4) - dd.field(2).pow(2) + M(3, X(1).pow(4) + X(2).pow(4) + X(3).pow(2));
}

PolyDiffOp heisenberg_oscillator(const OperatorCalculus& rep) {
  return M(3, X(3).pow(2)) - rep.field(0) * rep.field(0) - rep.field(1) * rep.field(1);
}

void ellipticity(Outcome& o) {
  OperatorCalculus dd(double_dilation(heisenberg(1)));
  NormalForm p = dd.normal_form(rockland_with_potential(dd));
  EnvelopingElement sp = dd.cocosymbol(p, 4);
  o.require(rockland_certificate(sp).status == Status::CertifiedElliptic, "potential operator certificate");

  OperatorCalculus rep(representation(heisenberg(1)));
  EnvelopingElement sh = rep.cocosymbol(rep.normal_form(heisenberg_oscillator(rep)), 2);
  auto u = rep.symbol_enveloping();
  EnvelopingElement expected = Gaussian(-1) * (u->monomial({0, 0, 0, 2, 0, 0}) + u->monomial({0, 0, 0, 0, 2, 0}) +
                                               u->monomial({0, 0, 2, 0, 0, 0}));
  o.require(sh == expected, "oscillator cocosymbol is -X1^2 - X2^2 - eta3^2");
  o.require(rockland_certificate(sh).status == Status::CertifiedElliptic, "oscillator certificate");

  RocklandConfig cfg;
  cfg.truncations = {16, 24, 32};
  cfg.threads = thread_cap();
  RocklandVerdict good = numeric_rockland(dd, p, 4, cfg);
  o.require(good.status == Status::NumericEvidence, "numeric evidence, got " + to_string(good.status));
  // sigma_min per sample point at the two largest truncations
  std::map<std::string, std::map<int, double>> sig;
  for (const SigmaRow& r : good.table) {
    std::ostringstream key;
    key << r.branch << " " << r.lambda;
    for (double x : r.x0) key << " " << x;
    sig[key.str()][r.N] = r.sigma_min;
  }
  double worst = 0;
  for (auto& [key, byN] : sig) {
    if (!byN.count(24) || !byN.count(32)) continue;
    worst = std::max(worst, std::abs(byN[32] - byN[24]) / byN[32]);
  }
  o.require(!sig.empty() && worst < 0.05, "sigma_min stable within 5%");

  RocklandVerdict bad = numeric_rockland(dd, dd.normal_form(dd.field(0).pow(2)), 2, cfg);
  o.require(bad.status == Status::NumericFailure, "X1^2 numeric failure, got " + to_string(bad.status));
  o.notes << sig.size() << " sample points, worst sigma_min drift " << std::setprecision(3) << worst * 100
          << "%; X1^2: " << bad.witness;
}

void check_discrete(Outcome& o, const std::string& name, const PolyDiffOp& p, const std::vector<int>& truncations,
                    std::size_t k) {
  StudyOptions opt;
  opt.threads = thread_cap();
  SpectrumReport r = convergence_study(p, truncations, k, opt);
  o.require(r.discrete && r.verdict == "Discrete-evidence", name + " verdict " + r.verdict + " " + r.reason);
  double worst_gap = 0, lowest = INFINITY;
  for (std::size_t s = r.eigenvalues.size() - 2; s < r.eigenvalues.size(); ++s)
    for (std::size_t i = 0; i < r.gaps[s].size(); ++i)
      worst_gap = std::max(worst_gap, r.gaps[s][i] / std::abs(r.eigenvalues[s][i]));
  for (auto& ev : r.eigenvalues)
    for (double e : ev) lowest = std::min(lowest, e);
  bool herm = selfadjoint_check(p).ok();
  for (bool h : r.hermitian) herm = herm && h;
  o.require(worst_gap < 1e-4, name + " relative gaps below 1e-4");
  o.require(lowest > 0, name + " positive eigenvalues");
  o.require(herm, name + " hermitian");
  o.notes << "; " << name << " lambda_0 " << std::setprecision(10) << r.eigenvalues.back().front()
          << ", max rel gap " << std::setprecision(2) << worst_gap;
}

void spectra(Outcome& o) {
  for (std::size_t d = 1; d <= 2; ++d) {
    PolyDiffOp ho(d);
    for (std::size_t j = 0; j < d; ++j) ho += M(d, X(static_cast<int>(j) + 1).pow(2)) - PolyDiffOp::partial(d, j, 2);
    std::vector<double> ev = low_spectrum(hermite_quantize(ho, 20), 6);
    // oracle: sums of d odd integers, sorted
    std::vector<double> want;
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < (d == 2 ? 6 : 1); ++b) want.push_back(d == 2 ? 2 * a + 2 * b + 2 : 2 * a + 1);
    std::sort(want.begin(), want.end());
    double err = 0;
    for (std::size_t i = 0; i < 6; ++i) err = std::max(err, i < ev.size() ? std::abs(ev[i] - want[i]) : INFINITY);
    o.require(err < 1e-8, "oscillator d=" + std::to_string(d));
    o.notes << (d == 1 ? "" : "; ") << "oscillator d=" << d << " max error " << std::setprecision(2) << err;
  }

  OperatorCalculus rep(representation(heisenberg(1)));
  check_discrete(o, "heisenberg oscillator", heisenberg_oscillator(rep), {20, 24, 28, 32}, 5);

  OperatorCalculus gr(std::get<DeformedAction>(grushin(1, 1, 1, 1)));
  PolyDiffOp grushin_potential =
      M(2, X(1).pow(2) + X(2).pow(2)) - gr.field(0) * gr.field(0) - gr.field(1) * gr.field(1);
  check_discrete(o, "grushin with potential", grushin_potential, {32, 40, 48, 56}, 6);
}

void parametrix(Outcome& o) {
  struct Case {
    std::string name;
    SymbolWeights w;
    Polynomial p;
  };
  std::vector<Case> cases{{"xi^2+x^2", SymbolWeights::isotropic(1), XI(1).pow(2) + X(1).pow(2)},
                          {"xi^2+x^4", {WeightVector({1}), WeightVector({2})}, XI(1).pow(2) + X(1).pow(4)}};
  for (auto& c : cases) {
    RationalSymbol p(c.w, c.p);
    Parametrix par = parametrix_expansion(p, 3);
    long m = par.order, min_weight = std::min(c.w.beta.min(), c.w.alpha.min());
    long declared = par.residual_declared[2];
    auto actual = par.residuals[2].order();
    double slope = decay_slope(par.residuals[2]);
    o.require(declared <= m - 3 * min_weight, c.name + " declared residual order");
    o.require(!actual || *actual <= declared, c.name + " symbolic residual order");
    o.require(std::abs(slope - declared) <= 0.3, c.name + " residual decay slope");
    auto set = derivative_set(c.w, 4);
    o.require(symbol_estimate_check(p, m, set).pass, c.name + " estimates of p");
    o.require(symbol_estimate_check(par.terms[0], -m, set).pass, c.name + " estimates of q0");
    o.notes << (c.name == cases[0].name ? "" : "; ") << c.name << ": residual order " << declared << ", slope "
            << std::setprecision(4) << slope << ", " << set.size() << " derivatives";
  }
}

void order_dichotomy(Outcome& o) {
  OperatorCalculus dd(double_dilation(heisenberg(1)));
  OperatorCalculus rep(representation(heisenberg(1)));
  auto a = dd.order(dd.normal_form(M(3, X(3))));
  auto b = rep.order(rep.normal_form(M(3, X(3))));
  o.require(a == 2, "double dilation");
  o.require(b == 1, "representation groupoid");
  o.notes << "order(x3): " << (a ? *a : -1) << " vs " << (b ? *b : -1);
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    std::string name;
    double budget;  // seconds
    std::function<void(Outcome&)> run;
  };
  std::vector<Criterion> criteria{{1, "group laws", 1, group_laws},
                                  {2, "deformations", 5, deformations},
                                  {3, "symbol groups", 0, symbol_groups},
                                  {4, "cocosymbol algebra", 0, cocosymbol_algebra},
                                  {5, "ellipticity", 60, ellipticity},
                                  {6, "spectra", 600, spectra},
                                  {7, "parametrix", 0, parametrix},
                                  {8, "order dichotomy", 0, order_dichotomy}};
  int failures = 0;
  for (auto& c : criteria) {
    Outcome o;
    auto start = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget > 0) o.require(secs < c.budget, "runtime budget " + std::to_string(c.budget) + " s");
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << c.id << " " << c.name << " (" << std::fixed
              << std::setprecision(2) << secs << " s): " << std::defaultfloat << o.notes.str() << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
