#pragma once

// Exact multivariate (Laurent) polynomials over Q(i) with named, role-tagged
// variables, plus polynomial maps between coordinate spaces.

#include "gradedcalc/scalar.hpp"

#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace gradedcalc {

enum class Role { Space, Group, Time, Scale, Dual };

std::string to_string(Role r);

/// Interned variable handle. Two Vars compare equal iff they have the same
/// name; re-declaring a name with a different role throws.
class Var {
public:
  Var(const std::string& name, Role role);

  const std::string& name() const;
  Role role() const;
  /// Negative exponents are only allowed on time and scale parameters.
  bool laurent() const { return role() == Role::Time || role() == Role::Scale; }
  bool is_parameter() const { return laurent(); }

  friend bool operator==(Var a, Var b) { return a.info_ == b.info_; }
  friend bool operator!=(Var a, Var b) { return a.info_ != b.info_; }
  friend bool operator<(Var a, Var b);

  struct Info;

private:
  const Info* info_;
};

std::ostream& operator<<(std::ostream& os, Var v);

// Conventional coordinate names used throughout the toolkit (1-based).
Var xvar(int i);    // space x_i
Var yvar(int i);    // second space copy (targets of shear maps)
Var vvar(int i);    // group v_i
Var wvar(int i);    // second group copy
Var uvar(int i);    // third group copy
Var etavar(int i);  // dual / cotangent eta_i
Var xivar(int i);   // Fourier dual xi_i
Var tvar();         // deformation parameter t
Var lamvar();       // zoom parameter lambda
std::vector<Var> var_range(Var (*make)(int), int count);

class UnknownVariable : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Sparse exponent vector with nonzero entries sorted by variable.
class Monomial {
public:
  Monomial() = default;
  explicit Monomial(std::vector<std::pair<Var, int>> factors);
  static Monomial var(Var v, int e = 1);

  const std::vector<std::pair<Var, int>>& factors() const { return f_; }
  int exponent(Var v) const;
  int total_degree() const;
  bool is_one() const { return f_.empty(); }
  /// Copy with the exponent of v replaced by e.
  Monomial with_exponent(Var v, int e) const;

  friend Monomial operator*(const Monomial& a, const Monomial& b);
  friend bool operator==(const Monomial& a, const Monomial& b) { return a.f_ == b.f_; }
  friend bool operator!=(const Monomial& a, const Monomial& b) { return !(a == b); }

private:
  std::vector<std::pair<Var, int>> f_;
};

/// Graded-lex order: total degree first, then lex on exponents.
struct GrlexLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

using VarWeights = std::map<Var, int>;
/// Weighted degree of a polynomial; nullopt stands for the zero polynomial.
using WeightedDegree = std::optional<long>;

class Polynomial {
public:
  using TermMap = std::map<Monomial, Gaussian, GrlexLess>;

  Polynomial() = default;
  Polynomial(long c) : Polynomial(Gaussian(c)) {}
  Polynomial(const Rational& c) : Polynomial(Gaussian(c)) {}
  Polynomial(const Gaussian& c);
  Polynomial(Var v) : Polynomial(Monomial::var(v)) {}
  Polynomial(const Monomial& m, const Gaussian& c = Gaussian(1));

  static Polynomial var(Var v, int e = 1) { return Polynomial(Monomial::var(v, e)); }

  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  /// Constant term (zero if absent).
  Gaussian constant_term() const;
  Gaussian coefficient(const Monomial& m) const;
  std::size_t size() const { return terms_.size(); }
  bool is_real() const;

  /// Variables that occur with nonzero exponent, sorted.
  std::vector<Var> variables() const;
  bool depends_on(Var v) const;
  int max_exponent(Var v) const;
  int min_exponent(Var v) const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(const Polynomial& o);
  Polynomial& operator*=(const Gaussian& c);
  Polynomial operator-() const;

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

  Polynomial pow(int e) const;
  Polynomial conj() const;
  /// d/dv; the Laurent rule d/dt t^-k = -k t^(-k-1) applies to parameters.
  Polynomial derivative(Var v, int order = 1) const;
  /// Simultaneous substitution v -> p. Negative powers of a substituted
  /// variable require the replacement to be a single term.
  Polynomial substitute(const std::map<Var, Polynomial>& repl) const;
  Polynomial substitute(Var v, const Polynomial& p) const { return substitute({{v, p}}); }
  /// Coefficient of v^e as a polynomial in the remaining variables.
  Polynomial coefficient_of(Var v, int e) const;

  Gaussian evaluate(const std::map<Var, Gaussian>& at) const;
  std::complex<double> evaluate_numeric(const std::map<Var, double>& at) const;

  std::string str() const;

private:
  void add_term(const Monomial& m, const Gaussian& c);
  TermMap terms_;
};

std::ostream& operator<<(std::ostream& os, const Polynomial& p);

/// Weighted degree; parameter (time/scale) variables carry weight 0.
/// Throws UnknownVariable if a non-parameter variable has no weight.
WeightedDegree weighted_degree(const Polynomial& p, const VarWeights& w);
long weighted_degree(const Monomial& m, const VarWeights& w);
Polynomial homogeneous_component(const Polynomial& p, const VarWeights& w, long degree);
bool is_homogeneous(const Polynomial& p, const VarWeights& w, long degree);
VarWeights make_weights(const std::vector<Var>& vars, const std::vector<int>& weights);

/// Positive integer weights, one per coordinate.
class WeightVector {
public:
  WeightVector() = default;
  explicit WeightVector(std::vector<int> w);

  std::size_t size() const { return w_.size(); }
  int operator[](std::size_t i) const { return w_[i]; }
  const std::vector<int>& values() const { return w_; }
  int max() const;
  int min() const;
  long sum() const;
  /// Length [k] = sum k_j w_j of a multi-index.
  long length(const std::vector<int>& k) const;
  /// Indices ordered by increasing weight, ties by position.
  std::vector<std::size_t> order_by_weight() const;

  friend bool operator==(const WeightVector& a, const WeightVector& b) { return a.w_ == b.w_; }

private:
  std::vector<int> w_;
};

/// A polynomial map R^source -> R^components.size(). Parameter variables
/// (time/scale roles) may appear without being declared as sources.
class PolyMap {
public:
  PolyMap() = default;
  PolyMap(std::vector<Var> source, std::vector<Polynomial> components);

  static PolyMap identity(const std::vector<Var>& vars);

  const std::vector<Var>& source() const { return source_; }
  const std::vector<Polynomial>& components() const { return comps_; }
  const Polynomial& operator[](std::size_t i) const { return comps_[i]; }
  std::size_t dim() const { return comps_.size(); }

  /// Substitute in every component.
  PolyMap substitute(const std::map<Var, Polynomial>& repl) const;
  /// Same components, different declared source list.
  PolyMap with_source(std::vector<Var> source) const;
  bool is_identity() const;

  friend bool operator==(const PolyMap& a, const PolyMap& b) {
    return a.source_ == b.source_ && a.comps_ == b.comps_;
  }

private:
  std::vector<Var> source_;
  std::vector<Polynomial> comps_;
};

std::ostream& operator<<(std::ostream& os, const PolyMap& m);

class DimensionMismatch : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// f o g: f's source variables are replaced by g's components.
PolyMap compose(const PolyMap& f, const PolyMap& g);

/// Determinant of the exact square matrix of polynomials.
Polynomial determinant(const std::vector<std::vector<Polynomial>>& m);
std::vector<std::vector<Polynomial>> jacobian(const PolyMap& f, const std::vector<Var>& vars);
Polynomial jacobian_det(const PolyMap& f, const std::vector<Var>& vars);

struct NotTriangular {
  std::size_t component = 0;
  std::string reason;
};

/// Successive elimination: component j must read c_j*u_j + (terms in
/// u_1..u_{j-1} and parameters) with c_j a nonzero rational. The inverse is
/// returned with source variables `target_names` (default: the unknowns)
/// and one component per entry of f.source(). Both compositions with f are
/// verified to be the identity before returning.
std::variant<PolyMap, NotTriangular> invert_triangular(const PolyMap& f, const std::vector<Var>& unknowns,
                                                       std::optional<std::vector<Var>> target_names = {});

}  // namespace gradedcalc
