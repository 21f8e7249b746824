#include "gradedcalc/lie.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace gradedcalc {

namespace {

std::string triple(std::size_t i, std::size_t j, std::size_t k) {
  return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "," + std::to_string(k + 1) + ")";
}

}  // namespace

GradedLieAlgebra::GradedLieAlgebra(std::string name, std::vector<int> weights, std::vector<std::string> labels)
    : name_(std::move(name)), weights_(std::move(weights)), labels_(std::move(labels)) {
  const std::size_t n = weights_.size();
  if (labels_.empty())
    for (std::size_t i = 0; i < n; ++i) labels_.push_back("X" + std::to_string(i + 1));
  if (labels_.size() != n) throw DimensionMismatch("one label per basis vector required");
  c_.assign(n * n * n, Rational(0));
}

void GradedLieAlgebra::set_bracket(std::size_t i, std::size_t j, const RatVec& coeffs) {
  if (coeffs.size() != dim()) throw DimensionMismatch("bracket coefficient vector has wrong length");
  for (std::size_t k = 0; k < dim(); ++k) set_constant(i, j, k, coeffs[k]);
}

void GradedLieAlgebra::set_constant(std::size_t i, std::size_t j, std::size_t k, const Rational& c) {
  if (i >= dim() || j >= dim() || k >= dim()) throw std::out_of_range("structure constant index");
  if (i == j && sgn(c) != 0) throw std::invalid_argument("[e_i, e_i] must vanish");
  at(i, j, k) = c;
  at(j, i, k) = -c;
}

void GradedLieAlgebra::set_raw(std::size_t i, std::size_t j, std::size_t k, const Rational& c) {
  if (i >= dim() || j >= dim() || k >= dim()) throw std::out_of_range("structure constant index");
  at(i, j, k) = c;
}

bool GradedLieAlgebra::is_abelian() const {
  for (auto& x : c_)
    if (sgn(x) != 0) return false;
  return true;
}

RatVec GradedLieAlgebra::bracket(const RatVec& a, const RatVec& b) const {
  const std::size_t n = dim();
  RatVec out(n, Rational(0));
  for (std::size_t i = 0; i < n; ++i) {
    if (sgn(a[i]) == 0) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (sgn(b[j]) == 0) continue;
      Rational ab = a[i] * b[j];
      for (std::size_t k = 0; k < n; ++k)
        if (sgn(c(i, j, k)) != 0) out[k] += c(i, j, k) * ab;
    }
  }
  return out;
}

PolyVec GradedLieAlgebra::bracket(const PolyVec& a, const PolyVec& b) const {
  const std::size_t n = dim();
  PolyVec out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i].is_zero()) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (b[j].is_zero()) continue;
      Polynomial ab;
      bool have = false;
      for (std::size_t k = 0; k < n; ++k) {
        if (sgn(c(i, j, k)) == 0) continue;
        if (!have) {
          ab = a[i] * b[j];
          have = true;
        }
        out[k] += ab * Polynomial(c(i, j, k));
      }
    }
  }
  return out;
}

RatVec GradedLieAlgebra::basis_vector(std::size_t i) const {
  RatVec e(dim(), Rational(0));
  e.at(i) = 1;
  return e;
}

Diagnostics GradedLieAlgebra::validate() const {
  Diagnostics d;
  const std::size_t n = dim();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        if (c(i, j, k) + c(j, i, k) != 0) d.add("antisymmetry", triple(i, j, k));
        if (sgn(c(i, j, k)) != 0 && weight(k) != weight(i) + weight(j))
          d.add("grading", triple(i, j, k) + " q_k=" + std::to_string(weight(k)) + " but q_i+q_j=" +
                               std::to_string(weight(i) + weight(j)));
      }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        auto ei = basis_vector(i), ej = basis_vector(j), ek = basis_vector(k);
        RatVec s = bracket(ei, bracket(ej, ek));
        RatVec t = bracket(ej, bracket(ek, ei));
        RatVec u = bracket(ek, bracket(ei, ej));
        for (std::size_t l = 0; l < n; ++l)
          if (s[l] + t[l] + u[l] != 0) {
            d.add("jacobi", triple(i, j, k));
            break;
          }
      }
  return d;
}

int GradedLieAlgebra::nilpotency_class() const {
  const std::size_t n = dim();
  if (n == 0) return 0;
  RatMat current;
  for (std::size_t i = 0; i < n; ++i) current.push_back(basis_vector(i));
  for (int cls = 1; cls <= static_cast<int>(n) + 1; ++cls) {
    RatMat next;
    for (std::size_t i = 0; i < n; ++i)
      for (auto& v : current) next.push_back(bracket(basis_vector(i), v));
    next = row_space(next);
    if (next.empty()) return cls;
    current = std::move(next);
  }
  throw InvalidAlgebra("algebra " + name_ + " is not nilpotent");
}

GradedLieAlgebra GradedLieAlgebra::with_weights(std::vector<int> weights) const {
  if (weights.size() != dim()) throw DimensionMismatch("with_weights: wrong number of weights");
  GradedLieAlgebra g = *this;
  g.weights_ = WeightVector(std::move(weights));
  return g;
}

GradedLieAlgebra GradedLieAlgebra::permuted(const std::vector<std::size_t>& perm) const {
  const std::size_t n = dim();
  if (perm.size() != n) throw DimensionMismatch("permutation has wrong length");
  std::vector<int> w(n);
  std::vector<std::string> lab(n);
  for (std::size_t a = 0; a < n; ++a) {
    w[a] = weight(perm[a]);
    lab[a] = labels_[perm[a]];
  }
  GradedLieAlgebra g(name_, w, lab);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (std::size_t k = 0; k < n; ++k) g.at(a, b, k) = c(perm[a], perm[b], perm[k]);
  return g;
}

GradedLieAlgebra heisenberg(int n) {
  if (n < 1) throw std::invalid_argument("heisenberg: n must be >= 1");
  std::vector<int> w(2 * n, 1);
  w.push_back(2);
  GradedLieAlgebra g("heisenberg(" + std::to_string(n) + ")", w);
  for (int j = 0; j < n; ++j) g.set_constant(j, n + j, 2 * n, 1);
  return g;
}

GradedLieAlgebra engel() {
  GradedLieAlgebra g("engel", {1, 1, 2, 3});
  g.set_constant(0, 1, 2, 1);
  g.set_constant(0, 2, 3, 1);
  return g;
}

GradedLieAlgebra abelian(int n, std::vector<int> weights) {
  if (n < 1) throw std::invalid_argument("abelian: n must be >= 1");
  if (weights.empty()) weights.assign(n, 1);
  if (static_cast<int>(weights.size()) != n) throw DimensionMismatch("abelian: one weight per coordinate");
  return GradedLieAlgebra("abelian(" + std::to_string(n) + ")", weights);
}

// ---------------------------------------------------------------------------
// Group law

PolyVec coords(Var (*make)(int), std::size_t n) {
  PolyVec v;
  for (std::size_t i = 1; i <= n; ++i) v.emplace_back(make(static_cast<int>(i)));
  return v;
}

PolyVec GroupLaw::multiply(const PolyVec& a, const PolyVec& b) const {
  const std::size_t n = algebra.dim();
  if (a.size() != n || b.size() != n) throw DimensionMismatch("multiply: wrong coordinate count");
  std::map<Var, Polynomial> repl;
  for (std::size_t i = 0; i < n; ++i) {
    repl.emplace(vvar(static_cast<int>(i + 1)), a[i]);
    repl.emplace(wvar(static_cast<int>(i + 1)), b[i]);
  }
  PolyVec out;
  for (auto& p : product.components()) out.push_back(p.substitute(repl));
  return out;
}

PolyVec GroupLaw::inverse(const PolyVec& a) const {
  PolyVec out;
  for (auto& p : a) out.push_back(-p);
  return out;
}

Diagnostics GroupLaw::check() const {
  Diagnostics d;
  const std::size_t n = algebra.dim();
  PolyVec v = coords(vvar, n), w = coords(wvar, n), u = coords(uvar, n), zero(n);
  if (multiply(v, zero) != v) d.add("unit", "m(v,0) != v");
  if (multiply(zero, w) != w) d.add("unit", "m(0,w) != w");
  PolyVec vinv = multiply(v, inverse(v));
  if (!std::all_of(vinv.begin(), vinv.end(), [](const Polynomial& p) { return p.is_zero(); }))
    d.add("inverse", "m(v,-v) != 0");
  PolyVec left = multiply(multiply(u, v), w), right = multiply(u, multiply(v, w));
  for (std::size_t j = 0; j < n; ++j)
    if (left[j] != right[j]) d.add("associativity", "component " + std::to_string(j + 1));
  VarWeights wt;
  for (std::size_t i = 0; i < n; ++i) {
    wt[vvar(static_cast<int>(i + 1))] = algebra.weight(i);
    wt[wvar(static_cast<int>(i + 1))] = algebra.weight(i);
  }
  for (std::size_t j = 0; j < n; ++j) {
    Polynomial r = product[j] - v[j] - w[j];
    for (auto& [m, c] : r.terms()) {
      bool hv = false, hw = false;
      for (auto& [x, e] : m.factors()) {
        hv |= x.name()[0] == 'v';
        hw |= x.name()[0] == 'w';
      }
      if (!hv || !hw || weighted_degree(m, wt) != algebra.weight(j)) {
        d.add("triangular", "component " + std::to_string(j + 1) + " term " + Polynomial(m, c).str());
        break;
      }
    }
  }
  return d;
}

GroupLaw bch_product(const GradedLieAlgebra& alg, bool require_valid) {
  if (require_valid) {
    Diagnostics d = alg.validate();
    if (!d.ok()) throw InvalidAlgebra("algebra " + alg.name() + " is invalid:\n" + d.str());
  }
  const std::size_t n = alg.dim();
  const int depth = alg.nilpotency_class();
  PolyVec X = coords(vvar, n), Y = coords(wvar, n);

  // Dynkin's form: sum over (p_i, q_i) blocks of the right-nested bracket of
  // X^p1 Y^q1 ... X^pk Y^qk, collected per word first.
  std::map<std::string, Rational> words;
  std::function<void(int, int, std::string, Rational)> blocks = [&](int k, int remaining, std::string word,
                                                                    Rational denom) {
    for (int p = 0; p <= remaining; ++p)
      for (int q = 0; p + q <= remaining; ++q) {
        if (p + q == 0) continue;
        std::string w2 = word + std::string(p, 'X') + std::string(q, 'Y');
        Rational d2 = denom * factorial(p) * factorial(q);
        if (k == 1) {
          words[w2] += 1 / d2 / static_cast<long>(w2.size());
        } else {
          blocks(k - 1, remaining - p - q, w2, d2);
        }
      }
  };
  for (int k = 1; k <= depth; ++k) {
    std::map<std::string, Rational> before = std::move(words);
    words.clear();
    blocks(k, depth, "", Rational(1));
    Rational sign = (k % 2 ? Rational(1) : Rational(-1)) / k;
    for (auto& [w, c] : words) before[w] += sign * c;
    words = std::move(before);
  }

  std::map<std::string, PolyVec> memo;
  std::function<const PolyVec&(const std::string&)> nested = [&](const std::string& w) -> const PolyVec& {
    auto it = memo.find(w);
    if (it != memo.end()) return it->second;
    PolyVec val;
    if (w.size() == 1)
      val = w[0] == 'X' ? X : Y;
    else
      val = alg.bracket(w[0] == 'X' ? X : Y, nested(w.substr(1)));
    return memo.emplace(w, std::move(val)).first->second;
  };

  PolyVec Z(n);
  for (auto& [w, c] : words) {
    if (sgn(c) == 0) continue;
    if (w.size() >= 2 && w[w.size() - 1] == w[w.size() - 2]) continue;
    const PolyVec& b = nested(w);
    for (std::size_t j = 0; j < n; ++j)
      if (!b[j].is_zero()) Z[j] += b[j] * Polynomial(c);
  }
  std::vector<Var> src = var_range(vvar, static_cast<int>(n));
  for (Var w : var_range(wvar, static_cast<int>(n))) src.push_back(w);
  GroupLaw law{alg, PolyMap(src, Z)};
  if (require_valid) {
    Diagnostics d = law.check();
    if (!d.ok()) throw std::logic_error("BCH law failed its invariants:\n" + d.str());
  }
  return law;
}

PolyMap dilation(const GradedLieAlgebra& alg, Var (*make)(int)) {
  std::vector<Var> src;
  PolyVec comps;
  for (std::size_t j = 0; j < alg.dim(); ++j) {
    Var v = make(static_cast<int>(j + 1));
    src.push_back(v);
    comps.push_back(Polynomial::var(lamvar(), alg.weight(j)) * Polynomial(v));
  }
  return PolyMap(src, comps);
}

bool dilation_automorphism_check(const GradedLieAlgebra& alg) {
  GroupLaw law = bch_product(alg, false);
  const std::size_t n = alg.dim();
  PolyVec av = dilation(alg, vvar).components();
  PolyVec aw = dilation(alg, wvar).components();
  PolyVec lhs = law.multiply(av, aw);
  for (std::size_t j = 0; j < n; ++j)
    if (lhs[j] != Polynomial::var(lamvar(), alg.weight(j)) * law.product[j]) return false;
  return true;
}

double quasi_norm(const GradedLieAlgebra& alg, const std::vector<double>& v, int q) {
  if (v.size() != alg.dim()) throw DimensionMismatch("quasi_norm: wrong coordinate count");
  if (q < 1) throw std::invalid_argument("quasi_norm: q must be positive");
  double s = 0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (q % alg.weight(j) != 0)
      throw std::invalid_argument("quasi_norm: q=" + std::to_string(q) + " is not a multiple of weight " +
                                  std::to_string(alg.weight(j)));
    s += std::pow(std::abs(v[j]), 2.0 * q / alg.weight(j));
  }
  return std::pow(s, 1.0 / (2.0 * q));
}

long homogeneous_dimension(const GradedLieAlgebra& alg) { return alg.weights().sum(); }

// ---------------------------------------------------------------------------
// Vector fields

Polynomial PolyVectorField::apply(const Polynomial& f) const {
  Polynomial out;
  for (std::size_t k = 0; k < space.size(); ++k)
    if (!comps[k].is_zero()) out += comps[k] * f.derivative(space[k]);
  return out;
}

PolyVectorField commutator(const PolyVectorField& a, const PolyVectorField& b) {
  if (a.space != b.space) throw DimensionMismatch("commutator: fields on different spaces");
  PolyVectorField r{a.space, PolyVec(a.space.size())};
  for (std::size_t k = 0; k < a.space.size(); ++k) r.comps[k] = a.apply(b.comps[k]) - b.apply(a.comps[k]);
  return r;
}

PolyVectorField linear_combination(const std::vector<PolyVectorField>& fields, const RatVec& coeffs) {
  if (fields.empty() || fields.size() != coeffs.size()) throw DimensionMismatch("linear_combination");
  PolyVectorField r{fields[0].space, PolyVec(fields[0].space.size())};
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (sgn(coeffs[i]) == 0) continue;
    for (std::size_t k = 0; k < r.comps.size(); ++k) r.comps[k] += fields[i].comps[k] * Polynomial(coeffs[i]);
  }
  return r;
}

PolyVectorField left_invariant_vf(const GroupLaw& law, std::size_t j) {
  const std::size_t n = law.algebra.dim();
  if (j >= n) throw std::out_of_range("left_invariant_vf: index out of range");
  std::map<Var, Polynomial> repl;
  for (std::size_t i = 0; i < n; ++i) {
    repl.emplace(vvar(static_cast<int>(i + 1)), Polynomial(xvar(static_cast<int>(i + 1))));
    repl.emplace(wvar(static_cast<int>(i + 1)), Polynomial());
  }
  PolyVectorField f{var_range(xvar, static_cast<int>(n)), PolyVec(n)};
  Var wj = wvar(static_cast<int>(j + 1));
  for (std::size_t k = 0; k < n; ++k) f.comps[k] = law.product[k].derivative(wj).substitute(repl);
  return f;
}

bool is_homogeneous_field(const PolyVectorField& f, const VarWeights& w, int degree) {
  for (std::size_t k = 0; k < f.space.size(); ++k) {
    auto it = w.find(f.space[k]);
    if (it == w.end()) throw UnknownVariable("no weight for " + f.space[k].name());
    if (!is_homogeneous(f.comps[k], w, it->second - degree)) return false;
  }
  return true;
}

GradedLieAlgebra build_bar_group(const GradedLieAlgebra& alg) {
  const std::size_t n = alg.dim();
  const int r = alg.step();
  std::vector<int> w;
  std::vector<std::string> labels;
  auto dual_index = [n](std::size_t i) { return n - 1 - i; };  // position of e^i
  const std::size_t T = n;
  auto x_index = [n](std::size_t j) { return n + 1 + j; };
  for (std::size_t p = 0; p < n; ++p) {
    std::size_t i = n - 1 - p;
    w.push_back(r + 1 - alg.weight(i));
    labels.push_back("e" + std::to_string(i + 1));
  }
  w.push_back(r + 1);
  labels.push_back("T");
  for (std::size_t j = 0; j < n; ++j) {
    w.push_back(alg.weight(j));
    labels.push_back(alg.labels()[j]);
  }
  GradedLieAlgebra bar("bar(" + alg.name() + ")", w, labels);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t l = 0; l < n; ++l)
        if (j < k && sgn(alg.c(j, k, l)) != 0) bar.set_constant(x_index(j), x_index(k), x_index(l), alg.c(j, k, l));
  // [X_j, e^i] = -sum_k c_{jk}^i e^k + q_j delta_ij T
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k)
        if (sgn(alg.c(j, k, i)) != 0) bar.set_constant(x_index(j), dual_index(i), dual_index(k), -alg.c(j, k, i));
      if (i == j) bar.set_constant(x_index(j), dual_index(i), T, alg.weight(j));
    }
  Diagnostics d = bar.validate();
  if (!d.ok()) throw std::logic_error("bar construction produced an invalid algebra:\n" + d.str());
  return bar;
}

}  // namespace gradedcalc
