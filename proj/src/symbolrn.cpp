#include "gradedcalc/symbolrn.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace gradedcalc {

namespace {

std::vector<Var> xs(std::size_t n) { return var_range(xvar, static_cast<int>(n)); }
std::vector<Var> xis(std::size_t n) { return var_range(xivar, static_cast<int>(n)); }

int total(const MultiIndex& a) { return std::accumulate(a.begin(), a.end(), 0); }

void check_same(const SymbolWeights& a, const SymbolWeights& b) {
  if (!(a.beta == b.beta) || !(a.alpha == b.alpha)) throw DimensionMismatch("symbols with different weights");
}

void for_each_index(std::size_t n, int max_total, const std::function<void(const MultiIndex&)>& f) {
  MultiIndex a(n, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
    if (i == n) {
      f(a);
      return;
    }
    for (int e = 0; e <= left; ++e) {
      a[i] = e;
      rec(i + 1, left - e);
    }
    a[i] = 0;
  };
  rec(0, max_total);
}

double quasi(const std::vector<double>& p, const std::vector<int>& w) {
  int q = 1;
  for (int k : w) q = std::lcm(q, k);
  double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::pow(std::abs(p[i]), 2.0 * q / w[i]);
  return std::pow(s, 1.0 / (2.0 * q));
}

struct Ray {
  std::vector<double> x, xi;
};

std::vector<Ray> sample_rays(const SymbolWeights& w, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  const std::size_t n = w.n();
  std::vector<int> joint = w.beta.values();
  for (int a : w.alpha.values()) joint.push_back(a);
  std::vector<Ray> rays;
  for (int r = 0; r < count; ++r) {
    std::vector<double> p(2 * n);
    for (double& c : p) c = g(rng);
    double rho = quasi(p, joint);
    Ray ray;
    for (std::size_t j = 0; j < n; ++j) {
      ray.x.push_back(p[j] / std::pow(rho, joint[j]));
      ray.xi.push_back(p[n + j] / std::pow(rho, joint[n + j]));
    }
    rays.push_back(ray);
  }
  return rays;
}

Ray dilate(const Ray& r, const SymbolWeights& w, double s) {
  Ray out = r;
  for (std::size_t j = 0; j < w.n(); ++j) {
    out.x[j] *= std::pow(s, w.beta[j]);
    out.xi[j] *= std::pow(s, w.alpha[j]);
  }
  return out;
}

double japanese(const Ray& p, const SymbolWeights& w) {
  return 1.0 + quasi(p.xi, w.alpha.values()) + quasi(p.x, w.beta.values());
}

/// Least-squares slope of ys against xs.
double fit_slope(const std::vector<double>& xsv, const std::vector<double>& ys) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xsv.size(); ++i) {
    mx += xsv[i];
    my += ys[i];
  }
  mx /= static_cast<double>(xsv.size());
  my /= static_cast<double>(ys.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xsv.size(); ++i) {
    sxy += (xsv[i] - mx) * (ys[i] - my);
    sxx += (xsv[i] - mx) * (xsv[i] - mx);
  }
  return sxx == 0 ? 0 : sxy / sxx;
}

}  // namespace

VarWeights SymbolWeights::var_weights() const {
  VarWeights w = make_weights(xs(n()), beta.values());
  for (auto& [v, k] : make_weights(xis(n()), alpha.values())) w.emplace(v, k);
  return w;
}

long SymbolWeights::min_drop() const {
  long d = 0;
  for (std::size_t j = 0; j < n(); ++j) {
    long s = beta[j] + alpha[j];
    if (j == 0 || s < d) d = s;
  }
  return d;
}

RationalSymbol::RationalSymbol(SymbolWeights w, Polynomial num, std::vector<Factor> den)
    : w_(std::move(w)), num_(std::move(num)) {
  if (w_.alpha.size() != w_.beta.size()) throw DimensionMismatch("RationalSymbol: one alpha and one beta weight per axis");
  for (auto& f : den) {
    if (f.power < 0) throw std::invalid_argument("RationalSymbol: negative denominator power");
    if (f.base.is_zero()) throw std::domain_error("RationalSymbol: zero denominator");
    if (f.power == 0 || f.base == Polynomial(1)) continue;
    auto it = std::find_if(den_.begin(), den_.end(), [&](const Factor& g) { return g.base == f.base; });
    if (it != den_.end())
      it->power += f.power;
    else
      den_.push_back(f);
  }
  if (num_.is_zero()) den_.clear();
}

RationalSymbol RationalSymbol::reciprocal(SymbolWeights w, const Polynomial& base, int power) {
  return RationalSymbol(std::move(w), Polynomial(1), {{base, power}});
}

Polynomial RationalSymbol::denominator() const {
  Polynomial d(1);
  for (auto& f : den_) d *= f.base.pow(f.power);
  return d;
}

std::optional<long> RationalSymbol::order() const {
  if (num_.is_zero()) return std::nullopt;
  VarWeights w = w_.var_weights();
  long o = *weighted_degree(num_, w);
  for (auto& f : den_) o -= f.power * *weighted_degree(f.base, w);
  return o;
}

RationalSymbol RationalSymbol::derive(Var v) const {
  Polynomial rest(1);  // product of bases that depend on v
  std::vector<Factor> den = den_;
  Polynomial num = num_.derivative(v);
  std::vector<std::size_t> moving;
  for (std::size_t i = 0; i < den_.size(); ++i)
    if (den_[i].base.depends_on(v)) moving.push_back(i);
  if (moving.empty()) return RationalSymbol(w_, num, den_);
  for (std::size_t i : moving) num *= den_[i].base;
  for (std::size_t i : moving) {
    Polynomial t = Polynomial(Rational(den_[i].power)) * num_ * den_[i].base.derivative(v);
    for (std::size_t j : moving)
      if (j != i) t *= den_[j].base;
    num -= t;
    den[i].power += 1;
  }
  return RationalSymbol(w_, num, den);
}

RationalSymbol RationalSymbol::dx(std::size_t j, int k) const {
  RationalSymbol r = *this;
  for (int i = 0; i < k; ++i) r = r.derive(xvar(static_cast<int>(j + 1)));
  return r;
}

RationalSymbol RationalSymbol::dxi(std::size_t j, int k) const {
  RationalSymbol r = *this;
  for (int i = 0; i < k; ++i) r = r.derive(xivar(static_cast<int>(j + 1)));
  return r;
}

RationalSymbol RationalSymbol::derivative(const MultiIndex& a_xi, const MultiIndex& b_x) const {
  RationalSymbol r = *this;
  for (std::size_t j = 0; j < a_xi.size(); ++j)
    if (a_xi[j]) r = r.dxi(j, a_xi[j]);
  for (std::size_t j = 0; j < b_x.size(); ++j)
    if (b_x[j]) r = r.dx(j, b_x[j]);
  return r;
}

RationalSymbol& RationalSymbol::operator+=(const RationalSymbol& o) {
  if (o.is_zero()) return *this;
  if (is_zero()) return *this = o;
  check_same(w_, o.w_);
  // common denominator with the larger power of each base
  std::vector<Factor> common = den_;
  for (auto& f : o.den_) {
    auto it = std::find_if(common.begin(), common.end(), [&](const Factor& g) { return g.base == f.base; });
    if (it == common.end())
      common.push_back(f);
    else
      it->power = std::max(it->power, f.power);
  }
  auto lift = [&common](const RationalSymbol& s) {
    Polynomial n = s.num_;
    for (auto& f : common) {
      auto it = std::find_if(s.den_.begin(), s.den_.end(), [&](const Factor& g) { return g.base == f.base; });
      int have = it == s.den_.end() ? 0 : it->power;
      if (f.power > have) n *= f.base.pow(f.power - have);
    }
    return n;
  };
  Polynomial num = lift(*this) + lift(o);
  *this = RationalSymbol(w_, num, num.is_zero() ? std::vector<Factor>{} : common);
  return *this;
}

RationalSymbol& RationalSymbol::operator-=(const RationalSymbol& o) { return *this += Gaussian(-1) * o; }

RationalSymbol& RationalSymbol::operator*=(const RationalSymbol& o) {
  if (w_.n() == 0) w_ = o.w_;
  check_same(w_, o.w_);
  std::vector<Factor> den = den_;
  den.insert(den.end(), o.den_.begin(), o.den_.end());
  *this = RationalSymbol(w_, num_ * o.num_, den);
  return *this;
}

RationalSymbol& RationalSymbol::operator*=(const Gaussian& c) {
  num_ *= c;
  if (num_.is_zero()) den_.clear();
  return *this;
}

bool RationalSymbol::equals(const RationalSymbol& o) const {
  return num_ * o.denominator() == o.num_ * denominator();
}

std::complex<double> RationalSymbol::evaluate(const std::vector<double>& x, const std::vector<double>& xi) const {
  std::map<Var, double> at;
  for (std::size_t j = 0; j < x.size(); ++j) at.emplace(xvar(static_cast<int>(j + 1)), x[j]);
  for (std::size_t j = 0; j < xi.size(); ++j) at.emplace(xivar(static_cast<int>(j + 1)), xi[j]);
  std::complex<double> v = num_.evaluate_numeric(at);
  for (auto& f : den_) v /= std::pow(f.base.evaluate_numeric(at), f.power);
  return v;
}

std::string RationalSymbol::str() const {
  if (den_.empty()) return num_.str();
  std::ostringstream os;
  os << "(" << num_ << ") / (";
  for (std::size_t i = 0; i < den_.size(); ++i) {
    if (i) os << " * ";
    os << "(" << den_[i].base << ")";
    if (den_[i].power != 1) os << "^" << den_[i].power;
  }
  os << ")";
  return os.str();
}

KnExpansion kn_compose_asymptotic(const RationalSymbol& p, const RationalSymbol& q, int K) {
  check_same(p.weights(), q.weights());
  const SymbolWeights& w = p.weights();
  const std::size_t n = w.n();
  KnExpansion out;
  out.sum = RationalSymbol(w, Polynomial());
  long op = p.order().value_or(0), oq = q.order().value_or(0);
  if (K > 0)
    for_each_index(n, K - 1, [&](const MultiIndex& a) {
      RationalSymbol dp = p;
      Rational fact(1);
      for (std::size_t j = 0; j < n; ++j)
        if (a[j]) {
          dp = dp.dxi(j, a[j]);
          fact *= factorial(a[j]);
        }
      if (dp.is_zero()) return;
      RationalSymbol dq = q;
      for (std::size_t j = 0; j < n; ++j)
        if (a[j]) dq = dq.dx(j, a[j]);
      if (dq.is_zero()) return;
      RationalSymbol t = (minus_i_pow(total(a)) * Gaussian(Rational(1 / fact))) * (dp * dq);
      if (t.is_zero()) return;
      out.terms.push_back({a, t, op + oq - w.alpha.length(a) - w.beta.length(a)});
      out.sum += t;
    });
  std::sort(out.terms.begin(), out.terms.end(), [](const KnTerm& x, const KnTerm& y) {
    return total(x.a) != total(y.a) ? total(x.a) < total(y.a) : x.a < y.a;
  });
  out.remainder_order = op + oq - static_cast<long>(K) * w.min_drop();
  int xi_degree = 0;
  if (p.is_polynomial())
    for (Var v : xis(n)) xi_degree += p.numerator().max_exponent(v);
  out.exact = p.is_polynomial() && xi_degree < K;
  return out;
}

long check_elliptic_pattern(const RationalSymbol& p) {
  if (!p.is_polynomial() || p.is_zero()) throw NotElliptic("parametrix: symbol must be a nonzero polynomial");
  const std::size_t n = p.weights().n();
  VarWeights w = p.weights().var_weights();
  std::optional<long> m;
  std::set<std::string> seen;
  for (auto& [mono, c] : p.numerator().terms()) {
    if (!c.is_real() || sgn(c.re()) <= 0) throw NotElliptic("parametrix: coefficient " + c.str() + " is not positive");
    if (mono.factors().size() != 1 || mono.factors()[0].second % 2)
      throw NotElliptic("parametrix: term " + Polynomial(mono, c).str() + " is not an even power of one variable");
    long d = weighted_degree(mono, w);
    if (m && *m != d) throw NotElliptic("parametrix: terms of different orders");
    m = d;
    seen.insert(mono.factors()[0].first.name());
  }
  for (Var v : xs(n))
    if (!seen.count(v.name())) throw NotElliptic("parametrix: no pure power of " + v.name());
  for (Var v : xis(n))
    if (!seen.count(v.name())) throw NotElliptic("parametrix: no pure power of " + v.name());
  return *m;
}

Parametrix parametrix_expansion(const RationalSymbol& p, int nterms) {
  Parametrix out;
  out.order = check_elliptic_pattern(p);
  const SymbolWeights& w = p.weights();
  const std::size_t n = w.n();
  const long drop = w.min_drop();
  int xi_degree = 0;
  for (Var v : xis(n)) xi_degree += p.numerator().max_exponent(v);

  RationalSymbol q0 = RationalSymbol::reciprocal(w, p.numerator());
  // (1/a!) d_xi^a p (-i)^{|a|} for each |a| <= deg_xi p
  std::vector<std::pair<MultiIndex, RationalSymbol>> dp;
  for_each_index(n, xi_degree, [&](const MultiIndex& a) {
    if (total(a) == 0) return;
    RationalSymbol d = p;
    Rational fact(1);
    for (std::size_t j = 0; j < n; ++j)
      if (a[j]) {
        d = d.dxi(j, a[j]);
        fact *= factorial(a[j]);
      }
    if (!d.is_zero()) dp.emplace_back(a, (minus_i_pow(total(a)) * Gaussian(Rational(1 / fact))) * d);
  });

  RationalSymbol partial(w, Polynomial());
  for (int k = 0; k < nterms; ++k) {
    RationalSymbol qk = q0;
    if (k > 0) {
      RationalSymbol acc(w, Polynomial());
      for (int j = 0; j < k; ++j)
        for (auto& [a, d] : dp)
          if (total(a) == k - j) acc += d * out.terms[static_cast<std::size_t>(j)].derivative(MultiIndex(n, 0), a);
      qk = Gaussian(-1) * (q0 * acc);
    }
    out.terms.push_back(qk);
    out.declared_orders.push_back(-out.order - k * drop);
    partial += qk;
    KnExpansion e = kn_compose_asymptotic(p, partial, xi_degree + 1);
    out.residuals.push_back(e.sum - RationalSymbol(w, Polynomial(1)));
    out.residual_declared.push_back(-(k + 1) * drop);
  }
  return out;
}

RationalSymbol full_symbol(const PolyDiffOp& p, const SymbolWeights& w) {
  if (!p.is_zero() && p.dim() != w.n()) throw DimensionMismatch("full_symbol: weights for a different dimension");
  Polynomial s;
  for (auto& [a, c] : p.terms()) {
    Polynomial t = c * Polynomial(pow_gauss(Gaussian::i(), total(a)));
    for (std::size_t j = 0; j < a.size(); ++j)
      if (a[j]) t *= Polynomial::var(xivar(static_cast<int>(j + 1)), a[j]);
    s += t;
  }
  return RationalSymbol(w, s);
}

std::vector<std::pair<MultiIndex, MultiIndex>> derivative_set(const SymbolWeights& w, long max_length) {
  std::vector<std::pair<MultiIndex, MultiIndex>> out;
  const std::size_t n = w.n();
  long min_w = std::min(w.alpha.min(), w.beta.min());
  int cap = static_cast<int>(max_length / std::max(1L, min_w));
  for_each_index(n, cap, [&](const MultiIndex& a) {
    if (w.alpha.length(a) > max_length) return;
    for_each_index(n, cap, [&](const MultiIndex& b) {
      if (w.alpha.length(a) + w.beta.length(b) <= max_length) out.emplace_back(a, b);
    });
  });
  return out;
}

EstimateReport symbol_estimate_check(const RationalSymbol& s, long m,
                                     const std::vector<std::pair<MultiIndex, MultiIndex>>& derivatives,
                                     const EstimateConfig& cfg) {
  EstimateReport rep;
  rep.m = m;
  const SymbolWeights& w = s.weights();
  for (int e = cfg.min_exp; e <= cfg.max_exp; ++e) rep.radii.push_back(std::ldexp(1.0, e));
  auto rays = sample_rays(w, cfg.rays, cfg.seed);
  rep.pass = true;
  for (auto& [a, b] : derivatives) {
    EstimateRow row{a, b, 0, -INFINITY, true};
    RationalSymbol d = s.derivative(a, b);
    const long target = m - w.alpha.length(a) - w.beta.length(b);
    if (d.is_zero()) {
      row.slope = 0;
      rep.rows.push_back(row);
      continue;
    }
    for (auto& ray : rays) {
      std::vector<double> lx, ly;
      for (double r : rep.radii) {
        Ray pt = dilate(ray, w, r);
        double ratio = std::abs(d.evaluate(pt.x, pt.xi)) / std::pow(japanese(pt, w), static_cast<double>(target));
        row.sup_constant = std::max(row.sup_constant, ratio);
        if (r >= std::ldexp(1.0, cfg.tail_from) && ratio > 0 && std::isfinite(ratio)) {
          lx.push_back(std::log(r));
          ly.push_back(std::log(ratio));
        }
      }
      if (lx.size() >= 2) row.slope = std::max(row.slope, fit_slope(lx, ly));
    }
    if (!std::isfinite(row.slope)) row.slope = 0;
    row.pass = row.slope <= cfg.slope_tol && std::isfinite(row.sup_constant);
    rep.pass = rep.pass && row.pass;
    rep.rows.push_back(row);
  }
  return rep;
}

double decay_slope(const RationalSymbol& s, const EstimateConfig& cfg) {
  const SymbolWeights& w = s.weights();
  std::vector<double> slopes;
  for (auto& ray : sample_rays(w, cfg.rays, cfg.seed)) {
    std::vector<double> lx, ly;
    for (int e = cfg.tail_from; e <= cfg.max_exp; ++e) {
      double r = std::ldexp(1.0, e);
      Ray pt = dilate(ray, w, r);
      double v = std::abs(s.evaluate(pt.x, pt.xi));
      if (v > 0 && std::isfinite(v)) {
        lx.push_back(std::log(r));
        ly.push_back(std::log(v));
      }
    }
    if (lx.size() >= 2) slopes.push_back(fit_slope(lx, ly));
  }
  if (slopes.empty()) return -INFINITY;
  std::sort(slopes.begin(), slopes.end());
  return slopes[slopes.size() / 2];
}

}  // namespace gradedcalc
