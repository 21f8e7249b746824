#pragma once

// Graded nilpotent Lie algebras in a fixed basis, their BCH group laws in
// exponential coordinates, dilations and left-invariant vector fields.

#include "gradedcalc/diagnostics.hpp"
#include "gradedcalc/linalg.hpp"
#include "gradedcalc/poly.hpp"

#include <string>
#include <vector>

namespace gradedcalc {

class GradedLieAlgebra {
public:
  GradedLieAlgebra() = default;
  /// Zero brackets; labels default to X1..Xn.
  GradedLieAlgebra(std::string name, std::vector<int> weights, std::vector<std::string> labels = {});

  /// Sets [e_i, e_j] = sum_k coeffs[k] e_k and the antisymmetric partner (0-based).
  void set_bracket(std::size_t i, std::size_t j, const RatVec& coeffs);
  /// Sets a single structure constant c_ij^k and c_ji^k = -c_ij^k.
  void set_constant(std::size_t i, std::size_t j, std::size_t k, const Rational& c);
  /// Raw write of c_ij^k without touching c_ji^k (for building invalid data).
  void set_raw(std::size_t i, std::size_t j, std::size_t k, const Rational& c);

  const std::string& name() const { return name_; }
  std::size_t dim() const { return weights_.size(); }
  const WeightVector& weights() const { return weights_; }
  int weight(std::size_t i) const { return weights_[i]; }
  /// Largest weight; equals the nilpotency step of a valid graded algebra.
  int step() const { return weights_.max(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const Rational& c(std::size_t i, std::size_t j, std::size_t k) const { return c_[(i * dim() + j) * dim() + k]; }
  bool is_abelian() const;

  RatVec bracket(const RatVec& a, const RatVec& b) const;
  PolyVec bracket(const PolyVec& a, const PolyVec& b) const;
  RatVec basis_vector(std::size_t i) const;

  /// Antisymmetry, Jacobi and grading with witness indices (1-based).
  Diagnostics validate() const;
  /// Length of the lower central series computed from the brackets.
  int nilpotency_class() const;

  GradedLieAlgebra with_weights(std::vector<int> weights) const;
  /// Relabelled copy: basis vector i of the result is basis vector perm[i] here.
  GradedLieAlgebra permuted(const std::vector<std::size_t>& perm) const;

  friend bool operator==(const GradedLieAlgebra& a, const GradedLieAlgebra& b) {
    return a.weights_ == b.weights_ && a.c_ == b.c_;
  }

private:
  Rational& at(std::size_t i, std::size_t j, std::size_t k) { return c_[(i * dim() + j) * dim() + k]; }

  std::string name_;
  WeightVector weights_;
  std::vector<std::string> labels_;
  std::vector<Rational> c_;
};

GradedLieAlgebra heisenberg(int n);
GradedLieAlgebra engel();
GradedLieAlgebra abelian(int n, std::vector<int> weights = {});

class InvalidAlgebra : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Polynomial group law m(v, w) in exponential coordinates with inverse -v.
struct GroupLaw {
  GradedLieAlgebra algebra;
  PolyMap product;  // source (v1..vn, w1..wn)

  /// m(a, b) for arbitrary polynomial coordinates.
  PolyVec multiply(const PolyVec& a, const PolyVec& b) const;
  PolyVec inverse(const PolyVec& a) const;
  /// Unit, inverse, associativity and triangular form, exactly.
  Diagnostics check() const;
};

/// BCH product truncated at the nilpotency class. With require_valid the
/// algebra is validated first and InvalidAlgebra is thrown on failure.
GroupLaw bch_product(const GradedLieAlgebra& alg, bool require_valid = true);

PolyVec coords(Var (*make)(int), std::size_t n);

/// alpha_lambda(v)_j = lambda^{q_j} v_j with the formal scale variable.
PolyMap dilation(const GradedLieAlgebra& alg, Var (*make)(int) = vvar);
/// m(a_l v, a_l w) == a_l m(v, w) in Q[lambda][v, w].
bool dilation_automorphism_check(const GradedLieAlgebra& alg);

double quasi_norm(const GradedLieAlgebra& alg, const std::vector<double>& v, int q);
long homogeneous_dimension(const GradedLieAlgebra& alg);

/// First-order operator sum_k comps[k] d/d(space[k]).
struct PolyVectorField {
  std::vector<Var> space;
  PolyVec comps;

  Polynomial apply(const Polynomial& f) const;
  friend bool operator==(const PolyVectorField& a, const PolyVectorField& b) {
    return a.space == b.space && a.comps == b.comps;
  }
};

PolyVectorField commutator(const PolyVectorField& a, const PolyVectorField& b);
PolyVectorField linear_combination(const std::vector<PolyVectorField>& fields, const RatVec& coeffs);

/// Left-invariant field d/ds m(x, s e_j)|_{s=0} on the coordinates x1..xn (j 0-based).
PolyVectorField left_invariant_vf(const GroupLaw& law, std::size_t j);
/// Component k is weighted-homogeneous of degree w_k - degree for every k.
bool is_homogeneous_field(const PolyVectorField& f, const VarWeights& w, int degree);

/// Bar algebra on (e^n..e^1, T, X_1..X_n) with weights
/// (r+1-q_n, ..., r+1-q_1, r+1, q_1, ..., q_n).
GradedLieAlgebra build_bar_group(const GradedLieAlgebra& alg);

}  // namespace gradedcalc
