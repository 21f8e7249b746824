#include "gradedcalc/action.hpp"

#include <algorithm>

namespace gradedcalc {

namespace {

Polynomial T() { return Polynomial(tvar()); }

Polynomial power_of(Var p, int e) { return Polynomial::var(p, e); }

std::map<Var, Polynomial> scaling(const std::vector<Var>& vars, const WeightVector& w, Var p, int sign) {
  std::map<Var, Polynomial> m;
  for (std::size_t i = 0; i < vars.size(); ++i) m.emplace(vars[i], power_of(p, sign * w[i]) * Polynomial(vars[i]));
  return m;
}

void merge(std::map<Var, Polynomial>& into, const std::map<Var, Polynomial>& from) {
  for (auto& [k, v] : from) into.insert_or_assign(k, v);
}

std::vector<Var> action_source(std::size_t d, std::size_t n) {
  std::vector<Var> s = var_range(xvar, static_cast<int>(d));
  for (Var v : var_range(vvar, static_cast<int>(n))) s.push_back(v);
  return s;
}

}  // namespace

PolynomialAction make_action(std::string name, GroupLaw group, WeightVector beta, PolyVec theta) {
  if (beta.size() != theta.size()) throw DimensionMismatch("make_action: one space weight per component");
  std::vector<Var> source = action_source(theta.size(), group.algebra.dim());
  PolyMap m(std::move(source), std::move(theta));
  return PolynomialAction{std::move(name), std::move(group), std::move(beta), std::move(m)};
}

PolyVec act(const PolyMap& theta, const PolyVec& x, const PolyVec& v) {
  std::map<Var, Polynomial> repl;
  for (std::size_t i = 0; i < x.size(); ++i) repl.emplace(xvar(static_cast<int>(i + 1)), x[i]);
  for (std::size_t j = 0; j < v.size(); ++j) repl.emplace(vvar(static_cast<int>(j + 1)), v[j]);
  PolyVec out;
  for (auto& p : theta.components()) out.push_back(p.substitute(repl));
  return out;
}

Diagnostics validate_action(const PolynomialAction& a) {
  Diagnostics d;
  const std::size_t dx = a.space_dim(), n = a.group_dim();
  PolyVec x = coords(xvar, dx), v = coords(vvar, n), w = coords(wvar, n), zero(n);
  PolyVec unit = act(a.theta, x, zero);
  for (std::size_t i = 0; i < dx; ++i)
    if (unit[i] != x[i]) d.add("identity", "component " + std::to_string(i + 1) + ": theta(x,0) = " + unit[i].str());
  PolyVec lhs = act(a.theta, act(a.theta, x, v), w);
  PolyVec rhs = act(a.theta, x, a.group.multiply(v, w));
  for (std::size_t i = 0; i < dx; ++i)
    if (lhs[i] != rhs[i])
      d.add("compatibility", "component " + std::to_string(i + 1) + ": difference " + (lhs[i] - rhs[i]).str());
  return d;
}

std::variant<DeformedAction, NotShubin> deform(const PolynomialAction& a, const WeightVector& alpha,
                                               const WeightVector& beta) {
  const std::size_t d = a.space_dim(), n = a.group_dim();
  if (alpha.size() != n || beta.size() != d) throw DimensionMismatch("deform: weight vectors do not match");
  std::map<Var, Polynomial> repl = scaling(a.space_vars(), beta, tvar(), -1);
  merge(repl, scaling(a.group_vars(), alpha, tvar(), 1));
  PolyVec comps;
  for (std::size_t i = 0; i < d; ++i) {
    Polynomial c = power_of(tvar(), beta[i]) * a.theta[i].substitute(repl);
    int low = c.min_exponent(tvar());
    if (low < 0) {
      Polynomial worst = c.coefficient_of(tvar(), low);
      return NotShubin{i, low,
                       "component " + std::to_string(i + 1) + " contains t^" + std::to_string(low) + " (coefficient " +
                           worst.str() + ")"};
    }
    comps.push_back(std::move(c));
  }
  PolynomialAction base = a;
  base.beta = beta;
  DeformedAction da{a.name, base, alpha, PolyMap(action_source(d, n), comps)};
  Diagnostics diag = check_deformed(da);
  if (!diag.ok()) throw std::logic_error("deformation failed its invariants:\n" + diag.str());
  return da;
}

DeformedAction rescale_field(const std::string& name, const GroupLaw& group, const WeightVector& alpha,
                             const WeightVector& beta, const PolyMap& field, int k) {
  const std::size_t d = field.dim(), n = group.algebra.dim();
  if (k < 1) throw std::invalid_argument("rescale_field: exponent must be positive");
  if (alpha.size() != n || beta.size() != d) throw DimensionMismatch("rescale_field: weight vectors do not match");
  std::vector<Var> xs = var_range(xvar, static_cast<int>(d)), vs = var_range(vvar, static_cast<int>(n));
  std::map<Var, Polynomial> repl = scaling(xs, beta, lamvar(), -1);
  merge(repl, scaling(vs, alpha, lamvar(), 1));
  std::map<Var, Polynomial> stretch{{tvar(), power_of(lamvar(), k) * T()}};
  for (std::size_t i = 0; i < d; ++i) {
    Polynomial lhs = power_of(lamvar(), beta[i]) * field[i].substitute(repl);
    Polynomial rhs = field[i].substitute(stretch);
    if (lhs != rhs) {
      Polynomial diff = lhs - rhs;
      int e = diff.max_exponent(lamvar());
      throw IncompatibleField("field is not compatible with exponent " + std::to_string(k) + ": component " +
                              std::to_string(i + 1) + ", coefficient of lambda^" + std::to_string(e) + " is " +
                              diff.coefficient_of(lamvar(), e).str());
    }
  }
  std::map<Var, Polynomial> tk{{tvar(), T().pow(k)}};
  PolyVec comps;
  for (auto& c : field.components()) comps.push_back(c.substitute(tk));
  PolyMap theta(action_source(d, n), comps);
  PolyVec at_one;
  for (auto& c : comps) at_one.push_back(c.substitute(tvar(), Polynomial(1)));
  DeformedAction da{name, make_action(name, group, beta, at_one), alpha, theta};
  Diagnostics diag = check_deformed(da);
  if (!diag.ok()) throw std::logic_error("rescaled field failed its invariants:\n" + diag.str());
  return da;
}

PolynomialAction slice(const DeformedAction& da, const Rational& t0) {
  PolyVec comps;
  for (auto& c : da.theta.components()) comps.push_back(c.substitute(tvar(), Polynomial(t0)));
  return make_action(da.name, da.base.group, da.beta(), comps);
}

Diagnostics check_deformed(const DeformedAction& da) {
  Diagnostics d;
  for (std::size_t i = 0; i < da.theta.dim(); ++i)
    if (da.theta[i].min_exponent(tvar()) < 0) d.add("negative-t", "component " + std::to_string(i + 1));
  if (!d.ok()) return d;
  if (slice(da, 1).theta != da.base.theta) d.add("base", "slice at t=1 differs from the base action");
  for (const Rational& t0 : {Rational(0), Rational(1), Rational(1, 2), Rational(-1, 2), Rational(2)}) {
    Diagnostics s = validate_action(slice(da, t0));
    for (auto& issue : s.issues) d.add("slice t=" + t0.get_str(), issue.kind + ": " + issue.witness);
  }
  if (!zoom_check(da)) d.add("zoom", "zoom identity fails");
  return d;
}

std::variant<PolyMap, PropertyPFailure> check_property_P(const PolynomialAction& a) {
  const std::size_t d = a.space_dim(), n = a.group_dim();
  if (d != n)
    return PropertyPFailure{"space dimension " + std::to_string(d) + " differs from group dimension " +
                            std::to_string(n) + "; the shear map cannot be inverted"};
  std::vector<Var> xs = a.space_vars(), vs = a.group_vars(), ys = var_range(yvar, static_cast<int>(d));
  auto order = a.group.algebra.weights().order_by_weight();
  std::vector<Var> source = xs, unknowns = xs, targets = xs;
  PolyVec comps;
  for (Var x : xs) comps.emplace_back(x);
  for (Var v : vs) source.push_back(v);
  for (std::size_t j : order) {
    comps.push_back(a.theta[j]);
    unknowns.push_back(vs[j]);
    targets.push_back(ys[j]);
  }
  PolyMap shear(source, comps);
  auto r = invert_triangular(shear, unknowns, targets);
  if (auto* f = std::get_if<NotTriangular>(&r))
    return PropertyPFailure{"triangular elimination failed at component " + std::to_string(f->component + 1) + ": " +
                            f->reason};
  std::vector<Var> natural = xs;
  for (Var y : ys) natural.push_back(y);
  return PolyMap(natural, std::get<PolyMap>(r).components());
}

PropertyR check_property_R(const DeformedAction& da) {
  PolynomialAction zero = theta_zero(da);
  auto xs = zero.space_vars();
  for (std::size_t i = 0; i < zero.theta.dim(); ++i)
    for (auto& [m, c] : zero.theta[i].terms()) {
      int deg = 0;
      for (Var x : xs) deg += m.exponent(x);
      if (deg != 1) return PropertyR{false, i, Polynomial(m, c).str()};
    }
  return PropertyR{true, 0, ""};
}

bool zoom_check(const DeformedAction& da) {
  auto xs = da.base.space_vars(), vs = da.base.group_vars();
  std::map<Var, Polynomial> repl = scaling(xs, da.beta(), lamvar(), -1);
  merge(repl, scaling(vs, da.alpha, lamvar(), 1));
  repl.emplace(tvar(), power_of(lamvar(), -1) * T());
  for (std::size_t i = 0; i < da.theta.dim(); ++i)
    if (da.theta[i].substitute(repl) != power_of(lamvar(), -da.beta()[i]) * da.theta[i]) return false;
  return true;
}

namespace {

PolyVectorField field_from(const PolyMap& theta, std::size_t d, std::size_t n, std::size_t j,
                           std::optional<Rational> t0) {
  if (j >= n) throw std::out_of_range("fundamental_vf: index out of range");
  std::map<Var, Polynomial> at;
  for (Var v : var_range(vvar, static_cast<int>(n))) at.emplace(v, Polynomial());
  if (t0) at.emplace(tvar(), Polynomial(*t0));
  PolyVectorField f{var_range(xvar, static_cast<int>(d)), PolyVec(d)};
  Var vj = vvar(static_cast<int>(j + 1));
  for (std::size_t k = 0; k < d; ++k) f.comps[k] = theta[k].derivative(vj).substitute(at);
  return f;
}

}  // namespace

PolyVectorField fundamental_vf(const DeformedAction& da, std::size_t j, std::optional<Rational> t0) {
  return field_from(da.theta, da.space_dim(), da.group_dim(), j, t0);
}

PolyVectorField fundamental_vf(const PolynomialAction& a, std::size_t j) {
  return field_from(a.theta, a.space_dim(), a.group_dim(), j, std::nullopt);
}

Diagnostics check_order_law(const DeformedAction& da) {
  Diagnostics d;
  VarWeights w = da.base.space_weights();
  for (std::size_t i = 0; i < da.group_dim(); ++i) {
    PolyVectorField f0 = fundamental_vf(da, i, Rational(0)), f1 = fundamental_vf(da, i, Rational(1));
    for (std::size_t j = 0; j < da.space_dim(); ++j) {
      long target = da.alpha[i] + da.beta()[j];
      std::string where = "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
      if (!is_homogeneous(f0.comps[j], w, target)) d.add("X0-degree", where + " " + f0.comps[j].str());
      auto lower = weighted_degree(f1.comps[j] - f0.comps[j], w);
      if (lower && *lower >= target) d.add("X1-remainder", where + " " + (f1.comps[j] - f0.comps[j]).str());
    }
  }
  return d;
}

GradedLieAlgebra symbol_group(const DeformedAction& da) {
  PropertyR r = check_property_R(da);
  if (!r.holds) throw std::invalid_argument("symbol_group: property (R) fails, witness " + r.witness);
  const std::size_t d = da.space_dim(), n = da.group_dim();
  const GradedLieAlgebra& g = da.algebra();
  std::vector<int> w = da.beta().values();
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < d; ++i) labels.push_back("eta" + std::to_string(i + 1));
  for (std::size_t j = 0; j < n; ++j) {
    w.push_back(da.alpha[j]);
    labels.push_back(g.labels()[j]);
  }
  GradedLieAlgebra s("symbol(" + da.name + ")", w, labels);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      for (std::size_t k = 0; k < n; ++k)
        if (sgn(g.c(a, b, k)) != 0) s.set_constant(d + a, d + b, d + k, g.c(a, b, k));
  auto xs = da.base.space_vars();
  for (std::size_t j = 0; j < n; ++j) {
    PolyVectorField f = fundamental_vf(da, j, Rational(0));
    for (std::size_t i = 0; i < d; ++i) {
      const Polynomial& p = f.comps[i];
      for (auto& [m, c] : p.terms()) {
        if (m.total_degree() != 1 || !c.is_real() || m.factors()[0].first.role() != Role::Space)
          throw std::logic_error("symbol_group: X0 x_i is not a linear form: " + p.str());
        auto k = std::find(xs.begin(), xs.end(), m.factors()[0].first) - xs.begin();
        s.set_constant(d + j, i, static_cast<std::size_t>(k), c.re());
      }
    }
  }
  Diagnostics diag = s.validate();
  if (!diag.ok()) throw std::logic_error("symbol group is not a graded Lie algebra:\n" + diag.str());
  return s;
}

// ---------------------------------------------------------------------------
// Built-ins

DeformedAction double_dilation(const GradedLieAlgebra& g, std::optional<std::vector<int>> beta) {
  GroupLaw law = bch_product(g);
  const std::size_t n = g.dim();
  PolyVec theta = law.multiply(coords(xvar, n), coords(vvar, n));
  WeightVector b(beta.value_or(g.weights().values()));
  std::string name = "double_dilation(" + g.name() + ")";
  PolynomialAction a = make_action(name, law, b, theta);
  auto r = deform(a, g.weights(), b);
  if (auto* f = std::get_if<NotShubin>(&r)) throw NotShubinError(*f);
  return std::get<DeformedAction>(r);
}

PolyMap representation_field(const GradedLieAlgebra& g) {
  const std::size_t n = g.dim();
  const int depth = std::max(1, g.nilpotency_class());
  PolyVec minus_X = coords(vvar, n), x = coords(xvar, n), DX(n);
  for (auto& p : minus_X) p = -p;
  for (std::size_t j = 0; j < n; ++j) DX[j] = Polynomial(g.weight(j)) * Polynomial(vvar(static_cast<int>(j + 1)));
  PolyVec out = x, ad = x;
  for (int k = 1; k <= depth; ++k) {
    ad = g.bracket(minus_X, ad);
    Polynomial c(1 / factorial(k));
    for (std::size_t j = 0; j < n; ++j) out[j] += c * ad[j];
  }
  PolyVec ad2 = DX;
  for (int k = 1; k <= depth + 1; ++k) {
    if (k > 1) ad2 = g.bracket(minus_X, ad2);
    Polynomial c = Polynomial(1 / factorial(k)) * T();
    for (std::size_t j = 0; j < n; ++j) out[j] += c * ad2[j];
  }
  return PolyMap(action_source(n, n), out);
}

DeformedAction representation(const GradedLieAlgebra& g) {
  GroupLaw law = bch_product(g);
  const int r = g.step();
  std::vector<int> b;
  for (std::size_t j = 0; j < g.dim(); ++j) b.push_back(r + 1 - g.weight(j));
  return rescale_field("representation(" + g.name() + ")", law, g.weights(), WeightVector(b), representation_field(g),
                       r + 1);
}

DeformedAction group_bundle(int d, const GradedLieAlgebra& g, std::vector<int> beta1) {
  if (d < 0) throw std::invalid_argument("group_bundle: negative base dimension");
  if (beta1.empty()) beta1.assign(d, 1);
  if (static_cast<int>(beta1.size()) != d) throw DimensionMismatch("group_bundle: one weight per base coordinate");
  GroupLaw law = bch_product(g);
  const std::size_t n = g.dim();
  PolyVec theta = coords(xvar, d), w;
  for (std::size_t j = 0; j < n; ++j) w.emplace_back(xvar(static_cast<int>(d + j + 1)));
  for (auto& p : law.multiply(w, coords(vvar, n))) theta.push_back(p);
  std::vector<int> b = beta1;
  for (int q : g.weights().values()) b.push_back(q);
  std::string name = "group_bundle(" + std::to_string(d) + "," + g.name() + ")";
  auto r = deform(make_action(name, law, WeightVector(b), theta), g.weights(), WeightVector(b));
  if (auto* f = std::get_if<NotShubin>(&r)) throw NotShubinError(*f);
  return std::get<DeformedAction>(r);
}

PolynomialAction grushin_action(int k, int l, int p, int q) {
  GradedLieAlgebra h = heisenberg(1).with_weights({k, l, k + l});
  GroupLaw law = bch_product(h);
  // Right translation on the cosets exp(R X2) \ H1 with representatives
  // exp(y X3) exp(x X1), written in exponential coordinates of v.
  Polynomial x(xvar(1)), y(xvar(2)), v1(vvar(1)), v2(vvar(2)), v3(vvar(3));
  PolyVec theta = {x + v1, y + v3 + Polynomial(Rational(1, 2)) * v1 * v2 + x * v2};
  std::string name = "grushin(" + std::to_string(k) + "," + std::to_string(l) + "," + std::to_string(p) + "," +
                     std::to_string(q) + ")";
  return make_action(name, law, WeightVector({p, q}), theta);
}

std::variant<DeformedAction, NotShubin> grushin(int k, int l, int p, int q) {
  PolynomialAction a = grushin_action(k, l, p, q);
  return deform(a, a.group.algebra.weights(), a.beta);
}

}  // namespace gradedcalc
