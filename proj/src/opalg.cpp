#include "gradedcalc/opalg.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

namespace gradedcalc {

namespace {

void for_each_sub(const MultiIndex& a, const std::function<void(const MultiIndex&)>& f) {
  MultiIndex c(a.size(), 0);
  while (true) {
    f(c);
    std::size_t i = 0;
    while (i < a.size() && c[i] == a[i]) c[i++] = 0;
    if (i == a.size()) return;
    ++c[i];
  }
}

int total(const MultiIndex& a) { return std::accumulate(a.begin(), a.end(), 0); }

Rational multi_binomial(const MultiIndex& a, const MultiIndex& c) {
  Rational r(1);
  for (std::size_t i = 0; i < a.size(); ++i) r *= binomial(a[i], c[i]);
  return r;
}

Polynomial derive(const Polynomial& p, const MultiIndex& c) {
  Polynomial r = p;
  for (std::size_t i = 0; i < c.size() && !r.is_zero(); ++i)
    if (c[i]) r = r.derivative(xvar(static_cast<int>(i + 1)), c[i]);
  return r;
}

void put_term(std::ostream& os, bool& first, Gaussian c, const std::string& body) {
  bool negative = c.is_real() ? sgn(c.re()) < 0 : (sgn(c.re()) == 0 && sgn(c.im()) < 0);
  if (negative) c = -c;
  if (first)
    os << (negative ? "-" : "");
  else
    os << (negative ? " - " : " + ");
  first = false;
  if (body.empty()) {
    os << c;
    return;
  }
  if (c != Gaussian(1)) os << c << "*";
  os << body;
}

std::string power(const std::string& base, int e) { return e == 1 ? base : base + "^" + std::to_string(e); }

// x and d factors in the operator-expression syntax accepted by the parser.
std::string op_monomial(const Monomial& m, const MultiIndex& a) {
  std::vector<std::string> parts;
  for (auto& [v, e] : m.factors()) {
    std::string name = v.name();
    if (v.role() == Role::Space && name.size() > 1 && name[0] == 'x') name = "x(" + name.substr(1) + ")";
    parts.push_back(e < 0 ? name + "^(" + std::to_string(e) + ")" : power(name, e));
  }
  for (std::size_t j = 0; j < a.size(); ++j)
    if (a[j]) parts.push_back(power("d(" + std::to_string(j + 1) + ")", a[j]));
  std::string s;
  for (auto& p : parts) s += (s.empty() ? "" : "*") + p;
  return s;
}

}  // namespace

PolyDiffOp::PolyDiffOp(std::size_t dim, TermMap terms) : dim_(dim) {
  for (auto& [a, p] : terms) add(a, p);
}

void PolyDiffOp::add(const MultiIndex& a, const Polynomial& p) {
  if (a.size() != dim_) throw DimensionMismatch("PolyDiffOp: multi-index length differs from space dimension");
  if (p.is_zero()) return;
  auto it = terms_.find(a);
  if (it == terms_.end()) {
    terms_.emplace(a, p);
    return;
  }
  it->second += p;
  if (it->second.is_zero()) terms_.erase(it);
}

PolyDiffOp PolyDiffOp::multiplication(std::size_t dim, const Polynomial& p) {
  PolyDiffOp r(dim);
  r.add(MultiIndex(dim, 0), p);
  return r;
}

PolyDiffOp PolyDiffOp::partial(std::size_t dim, std::size_t j, int order) {
  if (j >= dim) throw std::out_of_range("PolyDiffOp::partial: index out of range");
  MultiIndex a(dim, 0);
  a[j] = order;
  PolyDiffOp r(dim);
  r.add(a, Polynomial(1));
  return r;
}

PolyDiffOp PolyDiffOp::from_field(const PolyVectorField& f) {
  const std::size_t d = f.space.size();
  for (std::size_t k = 0; k < d; ++k)
    if (f.space[k] != xvar(static_cast<int>(k + 1)))
      throw std::invalid_argument("PolyDiffOp::from_field: field must live on x1..xd");
  PolyDiffOp r(d);
  for (std::size_t k = 0; k < d; ++k) {
    MultiIndex a(d, 0);
    a[k] = 1;
    r.add(a, f.comps[k]);
  }
  return r;
}

Polynomial PolyDiffOp::coefficient(const MultiIndex& a) const {
  auto it = terms_.find(a);
  return it == terms_.end() ? Polynomial() : it->second;
}

int PolyDiffOp::differential_order() const {
  int k = -1;
  for (auto& [a, p] : terms_) k = std::max(k, total(a));
  return k;
}

int PolyDiffOp::coefficient_degree() const {
  int k = -1;
  for (auto& [a, p] : terms_)
    for (auto& [m, c] : p.terms()) k = std::max(k, m.total_degree());
  return k;
}

std::vector<int> PolyDiffOp::axis_spread() const {
  std::vector<int> s(dim_, 0);
  for (auto& [a, p] : terms_)
    for (std::size_t j = 0; j < dim_; ++j) s[j] = std::max(s[j], a[j] + p.max_exponent(xvar(static_cast<int>(j + 1))));
  return s;
}

PolyDiffOp& PolyDiffOp::operator+=(const PolyDiffOp& o) {
  if (is_zero() && dim_ == 0) dim_ = o.dim_;
  if (o.dim_ != dim_ && !o.is_zero()) throw DimensionMismatch("PolyDiffOp: operators on different spaces");
  for (auto& [a, p] : o.terms_) add(a, p);
  return *this;
}

PolyDiffOp& PolyDiffOp::operator-=(const PolyDiffOp& o) { return *this += -o; }

PolyDiffOp PolyDiffOp::operator-() const {
  PolyDiffOp r(dim_);
  for (auto& [a, p] : terms_) r.terms_.emplace(a, -p);
  return r;
}

PolyDiffOp operator*(const PolyDiffOp& a, const PolyDiffOp& b) {
  if (a.dim_ != b.dim_) throw DimensionMismatch("compose: operators on different spaces");
  PolyDiffOp r(a.dim_);
  for (auto& [ia, p] : a.terms_)
    for (auto& [ib, q] : b.terms_)
      for_each_sub(ia, [&](const MultiIndex& c) {
        Polynomial dq = derive(q, c);
        if (dq.is_zero()) return;
        MultiIndex idx(a.dim_);
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = ia[i] - c[i] + ib[i];
        r.add(idx, Polynomial(multi_binomial(ia, c)) * p * dq);
      });
  return r;
}

PolyDiffOp operator*(const Polynomial& c, const PolyDiffOp& b) {
  PolyDiffOp r(b.dim_);
  for (auto& [a, p] : b.terms_) r.add(a, c * p);
  return r;
}

Polynomial PolyDiffOp::apply(const Polynomial& f) const {
  Polynomial r;
  for (auto& [a, p] : terms_) r += p * derive(f, a);
  return r;
}

PolyDiffOp PolyDiffOp::pow(int k) const {
  if (k < 0) throw std::invalid_argument("PolyDiffOp::pow: negative exponent");
  PolyDiffOp r = multiplication(dim_, Polynomial(1));
  for (int i = 0; i < k; ++i) r = r * *this;
  return r;
}

std::string PolyDiffOp::str() const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it)
    for (auto jt = it->second.terms().rbegin(); jt != it->second.terms().rend(); ++jt)
      put_term(os, first, jt->second, op_monomial(jt->first, it->first));
  return os.str();
}

PolyDiffOp compose(const PolyDiffOp& p, const PolyDiffOp& q) { return p * q; }

PolyDiffOp commutator(const PolyDiffOp& p, const PolyDiffOp& q) { return p * q - q * p; }

PolyDiffOp formal_adjoint(const PolyDiffOp& p) {
  PolyDiffOp r(p.dim());
  for (auto& [a, coef] : p.terms()) {
    Polynomial bar = coef.conj();
    if (total(a) % 2) bar = -bar;
    r += PolyDiffOp(p.dim(), {{a, Polynomial(1)}}) * PolyDiffOp::multiplication(p.dim(), bar);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Enveloping algebra

EnvelopingElement::EnvelopingElement(std::shared_ptr<const Enveloping> ctx, TermMap terms) : ctx_(std::move(ctx)) {
  for (auto& [w, c] : terms)
    if (!c.is_zero()) terms_.emplace(w, c);
}

std::optional<long> EnvelopingElement::degree() const {
  std::optional<long> d;
  for (auto& [w, c] : terms_) {
    long k = ctx_->weight(w);
    if (!d || k > *d) d = k;
  }
  return d;
}

EnvelopingElement& EnvelopingElement::operator+=(const EnvelopingElement& o) {
  if (!ctx_) ctx_ = o.ctx_;
  for (auto& [w, c] : o.terms_) {
    auto it = terms_.find(w);
    if (it == terms_.end()) {
      terms_.emplace(w, c);
      continue;
    }
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
  return *this;
}

EnvelopingElement& EnvelopingElement::operator-=(const EnvelopingElement& o) { return *this += Gaussian(-1) * o; }

EnvelopingElement operator*(const Gaussian& c, EnvelopingElement a) {
  if (c.is_zero()) return EnvelopingElement(a.ctx_);
  for (auto& [w, k] : a.terms_) k *= c;
  return a;
}

EnvelopingElement operator*(const EnvelopingElement& a, const EnvelopingElement& b) {
  auto ctx = a.ctx_ ? a.ctx_ : b.ctx_;
  EnvelopingElement r(ctx);
  for (auto& [wa, ca] : a.terms_)
    for (auto& [wb, cb] : b.terms_) {
      EnvelopingElement::Word w = wa;
      w.insert(w.end(), wb.begin(), wb.end());
      r += (ca * cb) * ctx->normalize(w);
    }
  return r;
}

std::string EnvelopingElement::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  const auto& labels = ctx_->algebra().labels();
  for (auto& [w, c] : terms_) {
    std::string body;
    for (std::size_t i = 0; i < w.size();) {
      std::size_t j = i;
      while (j < w.size() && w[j] == w[i]) ++j;
      body += (body.empty() ? "" : "*") + power(labels[static_cast<std::size_t>(w[i])], static_cast<int>(j - i));
      i = j;
    }
    put_term(os, first, c, body);
  }
  return os.str();
}

std::shared_ptr<const Enveloping> Enveloping::make(GradedLieAlgebra alg) {
  return std::shared_ptr<const Enveloping>(new Enveloping(std::move(alg)));
}

EnvelopingElement Enveloping::zero() const { return EnvelopingElement(shared_from_this()); }

EnvelopingElement Enveloping::one() const { return EnvelopingElement(shared_from_this(), {{{}, Gaussian(1)}}); }

EnvelopingElement Enveloping::generator(std::size_t i) const {
  if (i >= alg_.dim()) throw std::out_of_range("Enveloping::generator: index out of range");
  return EnvelopingElement(shared_from_this(), {{{static_cast<int>(i)}, Gaussian(1)}});
}

EnvelopingElement Enveloping::monomial(const std::vector<int>& exponents, const Gaussian& c) const {
  if (exponents.size() != alg_.dim()) throw DimensionMismatch("Enveloping::monomial: one exponent per basis vector");
  EnvelopingElement::Word w;
  for (std::size_t i = 0; i < exponents.size(); ++i) w.insert(w.end(), static_cast<std::size_t>(exponents[i]), static_cast<int>(i));
  return EnvelopingElement(shared_from_this(), {{w, c}});
}

long Enveloping::weight(const EnvelopingElement::Word& w) const {
  long s = 0;
  for (int i : w) s += alg_.weight(static_cast<std::size_t>(i));
  return s;
}

EnvelopingElement::TermMap Enveloping::normalize_terms(const EnvelopingElement::Word& w, RewriteStrategy s) const {
  std::optional<std::size_t> pos;
  for (std::size_t i = 0; i + 1 < w.size(); ++i)
    if (w[i] > w[i + 1]) {
      pos = i;
      if (s == RewriteStrategy::FirstDescent) break;
    }
  if (!pos) return {{w, Gaussian(1)}};

  auto key = std::make_pair(w, static_cast<int>(s));
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
  }

  const std::size_t i = *pos;
  const auto y = static_cast<std::size_t>(w[i]), x = static_cast<std::size_t>(w[i + 1]);
  EnvelopingElement::TermMap out;
  auto accumulate = [&out](const EnvelopingElement::TermMap& part, const Gaussian& c) {
    for (auto& [word, k] : part) {
      auto& slot = out[word];
      slot += c * k;
      if (slot.is_zero()) out.erase(word);
    }
  };
  EnvelopingElement::Word swapped = w;
  std::swap(swapped[i], swapped[i + 1]);
  accumulate(normalize_terms(swapped, s), Gaussian(1));
  for (std::size_t k = 0; k < alg_.dim(); ++k) {
    const Rational& c = alg_.c(x, y, k);
    if (sgn(c) == 0) continue;
    EnvelopingElement::Word shorter(w.begin(), w.begin() + static_cast<long>(i));
    shorter.push_back(static_cast<int>(k));
    shorter.insert(shorter.end(), w.begin() + static_cast<long>(i) + 2, w.end());
    accumulate(normalize_terms(shorter, s), Gaussian(-c));
  }

  std::lock_guard<std::mutex> lock(mu_);
  memo_.emplace(key, out);
  return out;
}

EnvelopingElement Enveloping::normalize(const EnvelopingElement::Word& raw, RewriteStrategy s) const {
  for (int i : raw)
    if (i < 0 || static_cast<std::size_t>(i) >= alg_.dim())
      throw std::out_of_range("Enveloping::normalize: basis index out of range");
  return EnvelopingElement(shared_from_this(), normalize_terms(raw, s));
}

EnvelopingElement pbw_normal_form(const std::shared_ptr<const Enveloping>& u, const EnvelopingElement::Word& raw,
                                  RewriteStrategy s) {
  return u->normalize(raw, s);
}

// ---------------------------------------------------------------------------
// Operator calculus

PolyDiffOp fundamental_operator(const DeformedAction& da, std::size_t j, std::optional<Rational> t0) {
  return PolyDiffOp::from_field(fundamental_vf(da, j, std::move(t0)));
}

OperatorCalculus::OperatorCalculus(DeformedAction da) : da_(std::move(da)) {
  const std::size_t d = space_dim(), n = group_dim();
  for (std::size_t j = 0; j < n; ++j) fields_.push_back(fundamental_operator(da_, j));
  has_P_ = std::holds_alternative<PolyMap>(check_property_P(da_.base));
  if (has_P_) {
    PolyMat m(n, PolyVec(d));
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < d; ++k) {
        MultiIndex e(d, 0);
        e[k] = 1;
        m[j][k] = fields_[j].coefficient(e);
      }
    // X = M d, so d = M^{-1} X.
    inv_ = inverse_unimodular(m);
  }
  has_R_ = check_property_R(da_).holds;
  if (has_R_) env_ = Enveloping::make(symbol_group(da_));
}

PolyDiffOp OperatorCalculus::word(const MultiIndex& a, const MultiIndex& b) const {
  const std::size_t d = space_dim(), n = group_dim();
  if (a.size() != n || b.size() != d) throw DimensionMismatch("OperatorCalculus::word: index lengths");
  PolyDiffOp xa;
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = word_cache_.find(a);
    if (it != word_cache_.end()) xa = it->second;
  }
  if (xa.dim() == 0) {
    xa = PolyDiffOp::multiplication(d, Polynomial(1));
    for (std::size_t j = 0; j < n; ++j)
      for (int r = 0; r < a[j]; ++r) xa = xa * fields_[j];
    std::lock_guard<std::mutex> lock(mu_);
    word_cache_.emplace(a, xa);
  }
  Polynomial xb(1);
  for (std::size_t i = 0; i < d; ++i)
    if (b[i]) xb *= Polynomial::var(xvar(static_cast<int>(i + 1)), b[i]);
  return xb * xa;
}

PolyDiffOp OperatorCalculus::reconstruct(const NormalForm& nf) const {
  PolyDiffOp r(space_dim());
  for (auto& [ab, c] : nf.coeffs) r += Polynomial(c) * word(ab.first, ab.second);
  return r;
}

NormalForm OperatorCalculus::normal_form(const PolyDiffOp& p) const {
  if (!has_P_) throw PropertyPMissing("normal_form: property (P) is not established for " + da_.name);
  const std::size_t d = space_dim(), n = group_dim();
  if (p.dim() != d && !p.is_zero()) throw DimensionMismatch("normal_form: operator lives on a different space");
  std::vector<Var> zeta = var_range(xivar, static_cast<int>(n));
  // d_k as linear forms in the placeholders zeta_j standing for Xhat_j.
  std::vector<Polynomial> dk(d);
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t j = 0; j < n; ++j) dk[k] += inv_[k][j] * Polynomial(zeta[j]);
  auto split = [&](const Monomial& m, MultiIndex& a, MultiIndex& b) {
    a.assign(n, 0);
    b.assign(d, 0);
    for (auto& [v, e] : m.factors()) {
      auto z = std::find(zeta.begin(), zeta.end(), v);
      if (z != zeta.end()) {
        a[static_cast<std::size_t>(z - zeta.begin())] = e;
        continue;
      }
      bool found = false;
      for (std::size_t i = 0; i < d && !found; ++i)
        if (v == xvar(static_cast<int>(i + 1))) {
          b[i] = e;
          found = true;
        }
      if (!found) throw std::invalid_argument("normal_form: coefficient involves " + v.name());
    }
  };

  NormalForm nf;
  PolyDiffOp rest = p;
  while (!rest.is_zero()) {
    const int k = rest.differential_order();
    Polynomial top;
    for (auto& [a, coef] : rest.terms()) {
      if (total(a) != k) continue;
      Polynomial s = coef;
      for (std::size_t i = 0; i < d; ++i)
        if (a[i]) s *= dk[i].pow(a[i]);
      top += s;
    }
    PolyDiffOp q(d);
    for (auto& [m, c] : top.terms()) {
      MultiIndex a, b;
      split(m, a, b);
      auto& slot = nf.coeffs[{a, b}];
      slot += c;
      if (slot.is_zero()) nf.coeffs.erase({a, b});
      q += Polynomial(c) * word(a, b);
    }
    rest -= q;
    if (!rest.is_zero() && rest.differential_order() >= k)
      throw std::logic_error("normal_form: top order did not cancel for " + da_.name);
  }
  return nf;
}

std::optional<long> OperatorCalculus::order(const NormalForm& nf) const {
  std::optional<long> m;
  for (auto& [ab, c] : nf.coeffs) {
    long k = da_.alpha.length(ab.first) + da_.beta().length(ab.second);
    if (!m || k > *m) m = k;
  }
  return m;
}

const std::shared_ptr<const Enveloping>& OperatorCalculus::symbol_enveloping() const {
  if (!has_R_) throw std::invalid_argument("symbol algebra: property (R) fails for " + da_.name);
  return env_;
}

EnvelopingElement OperatorCalculus::cocosymbol(const NormalForm& nf, long m) const {
  const auto& env = symbol_enveloping();
  auto ord = order(nf);
  if (ord && *ord > m) throw std::invalid_argument("cocosymbol: operator order " + std::to_string(*ord) + " exceeds " + std::to_string(m));
  const std::size_t d = space_dim();
  EnvelopingElement::TermMap terms;
  for (auto& [ab, c] : nf.coeffs) {
    const auto& [a, b] = ab;
    if (da_.alpha.length(a) + da_.beta().length(b) != m) continue;
    EnvelopingElement::Word w;
    for (std::size_t i = 0; i < b.size(); ++i) w.insert(w.end(), static_cast<std::size_t>(b[i]), static_cast<int>(i));
    for (std::size_t j = 0; j < a.size(); ++j) w.insert(w.end(), static_cast<std::size_t>(a[j]), static_cast<int>(d + j));
    terms[w] += c * minus_i_pow(total(b));
  }
  return EnvelopingElement(env, std::move(terms));
}

}  // namespace gradedcalc
