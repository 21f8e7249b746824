#include "gradedcalc/poly.hpp"

#include <algorithm>
#include <cctype>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>

namespace gradedcalc {

std::string to_string(Role r) {
  switch (r) {
    case Role::Space: return "space";
    case Role::Group: return "group";
    case Role::Time: return "time";
    case Role::Scale: return "scale";
    case Role::Dual: return "dual";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Variable registry

struct Var::Info {
  std::string name;
  Role role;
  std::string prefix;
  long index;  // trailing digits, -1 if none
};

namespace {

struct Registry {
  std::mutex mu;
  std::map<std::string, std::unique_ptr<Var::Info>> by_name;
};

Registry& registry() {
  static Registry r;
  return r;
}

}  // namespace

Var::Var(const std::string& name, Role role) {
  if (name.empty()) throw std::invalid_argument("empty variable name");
  auto& reg = registry();
  std::lock_guard lock(reg.mu);
  auto it = reg.by_name.find(name);
  if (it != reg.by_name.end()) {
    if (it->second->role != role)
      throw std::invalid_argument("variable '" + name + "' already declared with role " +
                                  to_string(it->second->role));
    info_ = it->second.get();
    return;
  }
  auto info = std::make_unique<Info>();
  info->name = name;
  info->role = role;
  std::size_t cut = name.size();
  while (cut > 0 && std::isdigit(static_cast<unsigned char>(name[cut - 1]))) --cut;
  info->prefix = name.substr(0, cut);
  info->index = (cut < name.size() && name.size() - cut < 12) ? std::stol(name.substr(cut)) : -1;
  info_ = info.get();
  reg.by_name.emplace(name, std::move(info));
}

const std::string& Var::name() const { return info_->name; }
Role Var::role() const { return info_->role; }

bool operator<(Var a, Var b) {
  if (a.info_ == b.info_) return false;
  if (a.info_->prefix != b.info_->prefix) return a.info_->prefix < b.info_->prefix;
  if (a.info_->index != b.info_->index) return a.info_->index < b.info_->index;
  return a.info_->name < b.info_->name;
}

std::ostream& operator<<(std::ostream& os, Var v) { return os << v.name(); }

Var xvar(int i) { return Var("x" + std::to_string(i), Role::Space); }
Var yvar(int i) { return Var("y" + std::to_string(i), Role::Space); }
Var vvar(int i) { return Var("v" + std::to_string(i), Role::Group); }
Var wvar(int i) { return Var("w" + std::to_string(i), Role::Group); }
Var uvar(int i) { return Var("u" + std::to_string(i), Role::Group); }
Var etavar(int i) { return Var("eta" + std::to_string(i), Role::Dual); }
Var xivar(int i) { return Var("xi" + std::to_string(i), Role::Dual); }
Var tvar() { return Var("t", Role::Time); }
Var lamvar() { return Var("lambda", Role::Scale); }

std::vector<Var> var_range(Var (*make)(int), int count) {
  std::vector<Var> out;
  out.reserve(count);
  for (int i = 1; i <= count; ++i) out.push_back(make(i));
  return out;
}

// ---------------------------------------------------------------------------
// Monomial

Monomial::Monomial(std::vector<std::pair<Var, int>> factors) {
  std::sort(factors.begin(), factors.end(), [](auto& a, auto& b) { return a.first < b.first; });
  for (auto& [v, e] : factors) {
    if (!f_.empty() && f_.back().first == v)
      f_.back().second += e;
    else
      f_.emplace_back(v, e);
    if (f_.back().second == 0) f_.pop_back();
  }
  for (auto& [v, e] : f_)
    if (e < 0 && !v.laurent())
      throw std::invalid_argument("negative exponent on non-parameter variable " + v.name());
}

Monomial Monomial::var(Var v, int e) { return Monomial({{v, e}}); }

Monomial Monomial::with_exponent(Var v, int e) const {
  if (e < 0 && !v.laurent())
    throw std::invalid_argument("negative exponent on non-parameter variable " + v.name());
  Monomial r;
  bool placed = false;
  for (auto& [u, k] : f_) {
    if (!placed && v < u) {
      if (e != 0) r.f_.emplace_back(v, e);
      placed = true;
    }
    if (u == v) {
      if (e != 0) r.f_.emplace_back(v, e);
      placed = true;
    } else {
      r.f_.emplace_back(u, k);
    }
  }
  if (!placed && e != 0) r.f_.emplace_back(v, e);
  return r;
}

int Monomial::exponent(Var v) const {
  for (auto& [u, e] : f_)
    if (u == v) return e;
  return 0;
}

int Monomial::total_degree() const {
  int d = 0;
  for (auto& f : f_) d += f.second;
  return d;
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  Monomial r;
  auto& out = r.f_;
  out.reserve(a.f_.size() + b.f_.size());
  auto i = a.f_.begin(), j = b.f_.begin();
  while (i != a.f_.end() || j != b.f_.end()) {
    if (j == b.f_.end() || (i != a.f_.end() && i->first < j->first)) {
      out.push_back(*i++);
    } else if (i == a.f_.end() || j->first < i->first) {
      out.push_back(*j++);
    } else {
      int e = i->second + j->second;
      if (e != 0) out.emplace_back(i->first, e);
      ++i;
      ++j;
    }
  }
  return r;
}

bool GrlexLess::operator()(const Monomial& a, const Monomial& b) const {
  int da = a.total_degree(), db = b.total_degree();
  if (da != db) return da < db;
  auto& fa = a.factors();
  auto& fb = b.factors();
  auto i = fa.begin(), j = fb.begin();
  while (i != fa.end() || j != fb.end()) {
    if (j == fb.end() || (i != fa.end() && i->first < j->first)) return i->second < 0;
    if (i == fa.end() || j->first < i->first) return j->second > 0;
    if (i->second != j->second) return i->second < j->second;
    ++i;
    ++j;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Polynomial

Polynomial::Polynomial(const Gaussian& c) {
  if (!c.is_zero()) terms_.emplace(Monomial(), c);
}

Polynomial::Polynomial(const Monomial& m, const Gaussian& c) {
  if (!c.is_zero()) terms_.emplace(m, c);
}

void Polynomial::add_term(const Monomial& m, const Gaussian& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one());
}

Gaussian Polynomial::constant_term() const { return coefficient(Monomial()); }

Gaussian Polynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Gaussian() : it->second;
}

bool Polynomial::is_real() const {
  return std::all_of(terms_.begin(), terms_.end(), [](auto& t) { return t.second.is_real(); });
}

std::vector<Var> Polynomial::variables() const {
  std::set<Var> s;
  for (auto& [m, c] : terms_)
    for (auto& [v, e] : m.factors()) s.insert(v);
  return {s.begin(), s.end()};
}

bool Polynomial::depends_on(Var v) const {
  for (auto& [m, c] : terms_)
    if (m.exponent(v) != 0) return true;
  return false;
}

int Polynomial::max_exponent(Var v) const {
  int r = 0;
  bool first = true;
  for (auto& [m, c] : terms_) {
    int e = m.exponent(v);
    if (first || e > r) r = e;
    first = false;
  }
  return r;
}

int Polynomial::min_exponent(Var v) const {
  int r = 0;
  bool first = true;
  for (auto& [m, c] : terms_) {
    int e = m.exponent(v);
    if (first || e < r) r = e;
    first = false;
  }
  return r;
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  for (auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  for (auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial r;
  for (auto& [ma, ca] : a.terms_)
    for (auto& [mb, cb] : b.terms_) r.add_term(ma * mb, ca * cb);
  return r;
}

Polynomial& Polynomial::operator*=(const Polynomial& o) { return *this = *this * o; }

Polynomial& Polynomial::operator*=(const Gaussian& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, k] : terms_) k *= c;
  return *this;
}

Polynomial Polynomial::operator-() const {
  Polynomial r = *this;
  for (auto& [m, k] : r.terms_) k = -k;
  return r;
}

Polynomial Polynomial::pow(int e) const {
  if (e < 0) {
    if (terms_.size() != 1) throw std::domain_error("negative power of a non-monomial polynomial");
    auto& [m, c] = *terms_.begin();
    std::vector<std::pair<Var, int>> f;
    for (auto& [v, k] : m.factors()) f.emplace_back(v, -k * (-e));
    return Polynomial(Monomial(f), Gaussian(1) / pow_gauss(c, -e));
  }
  Polynomial result(1), base = *this;
  while (e > 0) {
    if (e & 1) result *= base;
    e >>= 1;
    if (e) base *= base;
  }
  return result;
}

Polynomial Polynomial::conj() const {
  Polynomial r = *this;
  for (auto& [m, k] : r.terms_) k = k.conj();
  return r;
}

Polynomial Polynomial::derivative(Var v, int order) const {
  Polynomial cur = *this;
  for (int k = 0; k < order; ++k) {
    Polynomial next;
    for (auto& [m, c] : cur.terms_) {
      int e = m.exponent(v);
      if (e == 0) continue;
      next.add_term(m.with_exponent(v, e - 1), c * Gaussian(e));
    }
    cur = std::move(next);
  }
  return cur;
}

Polynomial Polynomial::substitute(const std::map<Var, Polynomial>& repl) const {
  if (repl.empty()) return *this;
  std::map<std::pair<Var, int>, Polynomial> cache;
  auto power = [&](Var v, const Polynomial& p, int e) -> const Polynomial& {
    auto key = std::make_pair(v, e);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    return cache.emplace(key, p.pow(e)).first->second;
  };
  Polynomial result;
  for (auto& [m, c] : terms_) {
    std::vector<std::pair<Var, int>> kept;
    Polynomial term(Monomial(), c);
    std::vector<const Polynomial*> factors;
    for (auto& [v, e] : m.factors()) {
      auto it = repl.find(v);
      if (it == repl.end())
        kept.emplace_back(v, e);
      else
        factors.push_back(&power(v, it->second, e));
    }
    term = Polynomial(Monomial(kept), c);
    for (auto* f : factors) {
      term = term * *f;
      if (term.is_zero()) break;
    }
    result += term;
  }
  return result;
}

Polynomial Polynomial::coefficient_of(Var v, int e) const {
  Polynomial r;
  for (auto& [m, c] : terms_)
    if (m.exponent(v) == e) r.add_term(m.with_exponent(v, 0), c);
  return r;
}

Gaussian Polynomial::evaluate(const std::map<Var, Gaussian>& at) const {
  Gaussian sum;
  for (auto& [m, c] : terms_) {
    Gaussian t = c;
    for (auto& [v, e] : m.factors()) {
      auto it = at.find(v);
      if (it == at.end()) throw UnknownVariable("evaluate: no value for " + v.name());
      Gaussian p = pow_gauss(it->second, e < 0 ? -e : e);
      if (e < 0)
        t /= p;
      else
        t *= p;
    }
    sum += t;
  }
  return sum;
}

std::complex<double> Polynomial::evaluate_numeric(const std::map<Var, double>& at) const {
  std::complex<double> sum = 0;
  for (auto& [m, c] : terms_) {
    std::complex<double> t = c.to_complex();
    for (auto& [v, e] : m.factors()) {
      auto it = at.find(v);
      if (it == at.end()) throw UnknownVariable("evaluate: no value for " + v.name());
      t *= std::pow(it->second, e);
    }
    sum += t;
  }
  return sum;
}

std::string Polynomial::str() const {
  std::ostringstream os;
  os << *this;
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Polynomial& p) {
  if (p.is_zero()) return os << "0";
  bool first = true;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    const auto& [m, c] = *it;
    Gaussian coef = c;
    bool negative = coef.is_real() ? sgn(coef.re()) < 0 : (sgn(coef.re()) == 0 && sgn(coef.im()) < 0);
    if (negative) coef = -coef;
    if (first)
      os << (negative ? "-" : "");
    else
      os << (negative ? " - " : " + ");
    first = false;
    bool unit = coef == Gaussian(1);
    if (m.is_one()) {
      os << coef;
      continue;
    }
    if (!unit) os << coef << "*";
    bool firstf = true;
    for (auto& [v, e] : m.factors()) {
      if (!firstf) os << "*";
      firstf = false;
      os << v.name();
      if (e != 1) {
        if (e < 0)
          os << "^(" << e << ")";
        else
          os << "^" << e;
      }
    }
  }
  return os;
}

// ---------------------------------------------------------------------------
// Weighted gradings

long weighted_degree(const Monomial& m, const VarWeights& w) {
  long d = 0;
  for (auto& [v, e] : m.factors()) {
    if (v.is_parameter()) continue;
    auto it = w.find(v);
    if (it == w.end()) throw UnknownVariable("no weight for variable " + v.name());
    d += static_cast<long>(e) * it->second;
  }
  return d;
}

WeightedDegree weighted_degree(const Polynomial& p, const VarWeights& w) {
  WeightedDegree best;
  for (auto& [m, c] : p.terms()) {
    long d = weighted_degree(m, w);
    if (!best || d > *best) best = d;
  }
  return best;
}

Polynomial homogeneous_component(const Polynomial& p, const VarWeights& w, long degree) {
  Polynomial r;
  for (auto& [m, c] : p.terms())
    if (weighted_degree(m, w) == degree) r += Polynomial(m, c);
  return r;
}

bool is_homogeneous(const Polynomial& p, const VarWeights& w, long degree) {
  for (auto& [m, c] : p.terms())
    if (weighted_degree(m, w) != degree) return false;
  return true;
}

VarWeights make_weights(const std::vector<Var>& vars, const std::vector<int>& weights) {
  if (vars.size() != weights.size()) throw DimensionMismatch("make_weights: size mismatch");
  VarWeights w;
  for (std::size_t i = 0; i < vars.size(); ++i) w[vars[i]] = weights[i];
  return w;
}

WeightVector::WeightVector(std::vector<int> w) : w_(std::move(w)) {
  for (int x : w_)
    if (x < 1) throw std::invalid_argument("weights must be positive integers");
}

int WeightVector::max() const { return w_.empty() ? 0 : *std::max_element(w_.begin(), w_.end()); }
int WeightVector::min() const { return w_.empty() ? 0 : *std::min_element(w_.begin(), w_.end()); }

long WeightVector::sum() const {
  long s = 0;
  for (int x : w_) s += x;
  return s;
}

long WeightVector::length(const std::vector<int>& k) const {
  if (k.size() != w_.size()) throw DimensionMismatch("multi-index length mismatch");
  long s = 0;
  for (std::size_t i = 0; i < k.size(); ++i) s += static_cast<long>(k[i]) * w_[i];
  return s;
}

std::vector<std::size_t> WeightVector::order_by_weight() const {
  std::vector<std::size_t> idx(w_.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return w_[a] < w_[b]; });
  return idx;
}

// ---------------------------------------------------------------------------
// Polynomial maps

PolyMap::PolyMap(std::vector<Var> source, std::vector<Polynomial> components)
    : source_(std::move(source)), comps_(std::move(components)) {
  std::set<Var> src(source_.begin(), source_.end());
  if (src.size() != source_.size()) throw std::invalid_argument("PolyMap: repeated source variable");
  for (std::size_t j = 0; j < comps_.size(); ++j)
    for (Var v : comps_[j].variables())
      if (!v.is_parameter() && !src.count(v))
        throw UnknownVariable("PolyMap component " + std::to_string(j) + " uses undeclared variable " + v.name());
}

PolyMap PolyMap::identity(const std::vector<Var>& vars) {
  std::vector<Polynomial> c;
  for (Var v : vars) c.emplace_back(v);
  return PolyMap(vars, c);
}

PolyMap PolyMap::substitute(const std::map<Var, Polynomial>& repl) const {
  std::vector<Polynomial> c;
  for (auto& p : comps_) c.push_back(p.substitute(repl));
  std::vector<Var> src;
  for (Var v : source_)
    if (!repl.count(v)) src.push_back(v);
  for (auto& [v, p] : repl)
    for (Var u : p.variables())
      if (!u.is_parameter() && std::find(src.begin(), src.end(), u) == src.end()) src.push_back(u);
  return PolyMap(src, c);
}

PolyMap PolyMap::with_source(std::vector<Var> source) const { return PolyMap(std::move(source), comps_); }

bool PolyMap::is_identity() const {
  if (comps_.size() != source_.size()) return false;
  for (std::size_t i = 0; i < comps_.size(); ++i)
    if (comps_[i] != Polynomial(source_[i])) return false;
  return true;
}

std::ostream& operator<<(std::ostream& os, const PolyMap& m) {
  os << "(";
  for (std::size_t i = 0; i < m.source().size(); ++i) os << (i ? "," : "") << m.source()[i];
  os << ") -> (";
  for (std::size_t i = 0; i < m.dim(); ++i) os << (i ? ", " : "") << m[i];
  return os << ")";
}

PolyMap compose(const PolyMap& f, const PolyMap& g) {
  if (f.source().size() != g.dim())
    throw DimensionMismatch("compose: f consumes " + std::to_string(f.source().size()) + " coordinates, g produces " +
                            std::to_string(g.dim()));
  std::map<Var, Polynomial> repl;
  for (std::size_t i = 0; i < g.dim(); ++i) repl.emplace(f.source()[i], g[i]);
  std::vector<Polynomial> c;
  for (auto& p : f.components()) c.push_back(p.substitute(repl));
  return PolyMap(g.source(), c);
}

Polynomial determinant(const std::vector<std::vector<Polynomial>>& m) {
  const std::size_t n = m.size();
  for (auto& row : m)
    if (row.size() != n) throw DimensionMismatch("determinant: matrix is not square");
  if (n == 0) return Polynomial(1);
  if (n > 20) throw std::invalid_argument("determinant: dimension too large");
  // Laplace expansion along rows, memoised on the set of used columns.
  std::map<unsigned long, Polynomial> memo;
  std::function<Polynomial(std::size_t, unsigned long)> minor = [&](std::size_t row, unsigned long used) -> Polynomial {
    if (row == n) return Polynomial(1);
    auto it = memo.find(used);
    if (it != memo.end()) return it->second;
    Polynomial acc;
    int sign = 1;
    for (std::size_t col = 0; col < n; ++col) {
      if (used & (1ul << col)) continue;
      if (!m[row][col].is_zero()) {
        Polynomial sub = minor(row + 1, used | (1ul << col));
        if (!sub.is_zero()) {
          Polynomial term = m[row][col] * sub;
          if (sign > 0)
            acc += term;
          else
            acc -= term;
        }
      }
      sign = -sign;
    }
    memo.emplace(used, acc);
    return acc;
  };
  return minor(0, 0);
}

std::vector<std::vector<Polynomial>> jacobian(const PolyMap& f, const std::vector<Var>& vars) {
  std::vector<std::vector<Polynomial>> J(f.dim(), std::vector<Polynomial>(vars.size()));
  for (std::size_t i = 0; i < f.dim(); ++i)
    for (std::size_t j = 0; j < vars.size(); ++j) J[i][j] = f[i].derivative(vars[j]);
  return J;
}

Polynomial jacobian_det(const PolyMap& f, const std::vector<Var>& vars) {
  if (vars.size() != f.dim()) throw DimensionMismatch("jacobian_det: |vars| must equal target dimension");
  return determinant(jacobian(f, vars));
}

std::variant<PolyMap, NotTriangular> invert_triangular(const PolyMap& f, const std::vector<Var>& unknowns,
                                                       std::optional<std::vector<Var>> target_names) {
  const std::size_t n = f.dim();
  if (unknowns.size() != n || f.source().size() != n)
    throw DimensionMismatch("invert_triangular: need as many unknowns and sources as components");
  {
    std::set<Var> a(unknowns.begin(), unknowns.end()), b(f.source().begin(), f.source().end());
    if (a != b) throw std::invalid_argument("invert_triangular: unknowns must be an ordering of the source variables");
  }
  std::vector<Var> targets = target_names.value_or(unknowns);
  if (targets.size() != n) throw DimensionMismatch("invert_triangular: wrong number of target names");

  std::map<Var, Polynomial> solution;
  std::set<Var> earlier;
  for (std::size_t j = 0; j < n; ++j) {
    const Polynomial& comp = f[j];
    Var u = unknowns[j];
    for (Var v : comp.variables()) {
      if (v.is_parameter() || v == u || earlier.count(v)) continue;
      return NotTriangular{j, "component depends on later unknown " + v.name()};
    }
    if (!comp.depends_on(u) || comp.max_exponent(u) != 1 || comp.min_exponent(u) < 0)
      return NotTriangular{j, "component is not affine-linear in unknown " + u.name()};
    Polynomial lead = comp.coefficient_of(u, 1);
    if (!lead.is_constant() || lead.is_zero())
      return NotTriangular{j, "coefficient of " + u.name() + " is not a nonzero constant: " + lead.str()};
    Polynomial rest = comp.coefficient_of(u, 0).substitute(solution);
    solution.emplace(u, (Polynomial(targets[j]) - rest) * (Gaussian(1) / lead.constant_term()));
    earlier.insert(u);
  }
  std::vector<Polynomial> comps;
  for (Var s : f.source()) comps.push_back(solution.at(s));
  PolyMap inv(targets, comps);
  if (!compose(f, inv).is_identity() || !compose(inv, f).is_identity())
    throw std::logic_error("invert_triangular: inverse failed verification");
  return inv;
}

}  // namespace gradedcalc
