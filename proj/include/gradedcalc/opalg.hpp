#pragma once

// Differential operators with polynomial coefficients, their writing in
// terms of fundamental vector fields, orders and principal cocosymbols in
// the enveloping algebra of the symbol group.

#include "gradedcalc/action.hpp"

#include <memory>
#include <mutex>

namespace gradedcalc {

using MultiIndex = std::vector<int>;

/// sum_a p_a(x) d^a with all derivatives to the right.
class PolyDiffOp {
public:
  using TermMap = std::map<MultiIndex, Polynomial>;

  PolyDiffOp() = default;
  explicit PolyDiffOp(std::size_t dim) : dim_(dim) {}
  PolyDiffOp(std::size_t dim, TermMap terms);

  static PolyDiffOp multiplication(std::size_t dim, const Polynomial& p);
  static PolyDiffOp partial(std::size_t dim, std::size_t j, int order = 1);
  static PolyDiffOp from_field(const PolyVectorField& f);

  std::size_t dim() const { return dim_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  Polynomial coefficient(const MultiIndex& a) const;
  /// Highest |a| (differential order); -1 for the zero operator.
  int differential_order() const;
  /// Highest total x-degree of a coefficient; -1 for the zero operator.
  int coefficient_degree() const;
  /// Largest a_j + deg_{x_j}(p_a) over terms, per axis.
  std::vector<int> axis_spread() const;

  PolyDiffOp& operator+=(const PolyDiffOp& o);
  PolyDiffOp& operator-=(const PolyDiffOp& o);
  PolyDiffOp operator-() const;
  friend PolyDiffOp operator+(PolyDiffOp a, const PolyDiffOp& b) { return a += b; }
  friend PolyDiffOp operator-(PolyDiffOp a, const PolyDiffOp& b) { return a -= b; }
  /// Composition (a o b), expanded with the Leibniz rule.
  friend PolyDiffOp operator*(const PolyDiffOp& a, const PolyDiffOp& b);
  friend PolyDiffOp operator*(const Polynomial& c, const PolyDiffOp& b);
  friend bool operator==(const PolyDiffOp& a, const PolyDiffOp& b) {
    return a.dim_ == b.dim_ && a.terms_ == b.terms_;
  }
  friend bool operator!=(const PolyDiffOp& a, const PolyDiffOp& b) { return !(a == b); }

  Polynomial apply(const Polynomial& f) const;
  PolyDiffOp pow(int k) const;
  std::string str() const;

private:
  void add(const MultiIndex& a, const Polynomial& p);
  std::size_t dim_ = 0;
  TermMap terms_;
};

PolyDiffOp compose(const PolyDiffOp& p, const PolyDiffOp& q);
PolyDiffOp commutator(const PolyDiffOp& p, const PolyDiffOp& q);
/// sum_a p_a d^a  ->  sum_a (-1)^{|a|} d^a o conj(p_a).
PolyDiffOp formal_adjoint(const PolyDiffOp& p);

/// Coefficients c_{a,b} of sum c_{a,b} x^b (Xhat^1)^a, where (Xhat)^a is the
/// ordered composition Xhat_1^{a_1} o ... o Xhat_n^{a_n}.
struct NormalForm {
  std::map<std::pair<MultiIndex, MultiIndex>, Gaussian> coeffs;  // key (a, b)
  bool is_zero() const { return coeffs.empty(); }
  friend bool operator==(const NormalForm& x, const NormalForm& y) { return x.coeffs == y.coeffs; }
};

class PropertyPMissing : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Element of U(s) in the PBW basis of s = symbol algebra (basis order
/// eta_1 < ... < eta_d < X_1 < ... < X_n). Words are non-decreasing index lists.
class Enveloping;

class EnvelopingElement {
public:
  using Word = std::vector<int>;
  using TermMap = std::map<Word, Gaussian>;

  EnvelopingElement() = default;
  EnvelopingElement(std::shared_ptr<const Enveloping> ctx, TermMap terms = {});

  const std::shared_ptr<const Enveloping>& context() const { return ctx_; }
  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  /// Weighted degree of the highest term; nullopt for zero.
  std::optional<long> degree() const;

  EnvelopingElement& operator+=(const EnvelopingElement& o);
  EnvelopingElement& operator-=(const EnvelopingElement& o);
  friend EnvelopingElement operator+(EnvelopingElement a, const EnvelopingElement& b) { return a += b; }
  friend EnvelopingElement operator-(EnvelopingElement a, const EnvelopingElement& b) { return a -= b; }
  friend EnvelopingElement operator*(const EnvelopingElement& a, const EnvelopingElement& b);
  friend EnvelopingElement operator*(const Gaussian& c, EnvelopingElement a);
  friend bool operator==(const EnvelopingElement& a, const EnvelopingElement& b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const EnvelopingElement& a, const EnvelopingElement& b) { return !(a == b); }

  std::string str() const;

private:
  std::shared_ptr<const Enveloping> ctx_;
  TermMap terms_;
};

enum class RewriteStrategy { FirstDescent, LastDescent };

/// Enveloping algebra of a graded Lie algebra with a memoised PBW rewriter.
class Enveloping : public std::enable_shared_from_this<Enveloping> {
public:
  static std::shared_ptr<const Enveloping> make(GradedLieAlgebra alg);

  const GradedLieAlgebra& algebra() const { return alg_; }
  EnvelopingElement zero() const;
  EnvelopingElement one() const;
  EnvelopingElement generator(std::size_t i) const;
  /// Monomial with exponent k_i on basis vector i, already ordered.
  EnvelopingElement monomial(const std::vector<int>& exponents, const Gaussian& c = Gaussian(1)) const;

  /// Rewrites an arbitrary word with YX = XY - [X, Y] until ordered.
  EnvelopingElement normalize(const EnvelopingElement::Word& raw,
                              RewriteStrategy s = RewriteStrategy::FirstDescent) const;
  long weight(const EnvelopingElement::Word& w) const;

private:
  explicit Enveloping(GradedLieAlgebra alg) : alg_(std::move(alg)) {}
  EnvelopingElement::TermMap normalize_terms(const EnvelopingElement::Word& w, RewriteStrategy s) const;

  GradedLieAlgebra alg_;
  mutable std::mutex mu_;
  mutable std::map<std::pair<EnvelopingElement::Word, int>, EnvelopingElement::TermMap> memo_;
};

EnvelopingElement pbw_normal_form(const std::shared_ptr<const Enveloping>& u, const EnvelopingElement::Word& raw,
                                  RewriteStrategy s = RewriteStrategy::FirstDescent);

/// Calculus attached to one deformed action: fundamental fields at t = 1,
/// the matrix expressing d_k through them, and the symbol algebra.
class OperatorCalculus {
public:
  explicit OperatorCalculus(DeformedAction da);

  const DeformedAction& action() const { return da_; }
  std::size_t space_dim() const { return da_.space_dim(); }
  std::size_t group_dim() const { return da_.group_dim(); }
  const PolyDiffOp& field(std::size_t j) const { return fields_.at(j); }
  bool has_property_P() const { return has_P_; }
  bool has_property_R() const { return has_R_; }

  /// x^b o Xhat^a as a differential operator.
  PolyDiffOp word(const MultiIndex& a, const MultiIndex& b) const;
  PolyDiffOp reconstruct(const NormalForm& nf) const;
  /// Unique writing under (P); throws PropertyPMissing otherwise.
  NormalForm normal_form(const PolyDiffOp& p) const;
  /// max [a]_alpha + [b]_beta over nonzero coefficients; nullopt for zero.
  std::optional<long> order(const NormalForm& nf) const;
  /// Symbol algebra and its enveloping algebra; requires (R).
  const std::shared_ptr<const Enveloping>& symbol_enveloping() const;
  /// sum over [a]+[b] = m of c_{a,b} (-i)^{|b|} eta^b X^a.
  EnvelopingElement cocosymbol(const NormalForm& nf, long m) const;

private:
  DeformedAction da_;
  std::vector<PolyDiffOp> fields_;
  bool has_P_ = false, has_R_ = false;
  std::vector<std::vector<Polynomial>> inv_;  // d_k = sum_j inv_[k][j] Xhat_j
  std::shared_ptr<const Enveloping> env_;
  mutable std::mutex mu_;
  mutable std::map<MultiIndex, PolyDiffOp> word_cache_;
};

PolyDiffOp fundamental_operator(const DeformedAction& da, std::size_t j, std::optional<Rational> t0 = Rational(1));

}  // namespace gradedcalc
