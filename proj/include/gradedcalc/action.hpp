#pragma once

// Polynomial right actions of graded groups on graded vector spaces, their
// deformations theta^t = beta_t o theta_{alpha_t(v)} o beta_{1/t} and the
// properties needed downstream by the operator calculus.

#include "gradedcalc/lie.hpp"

#include <optional>
#include <variant>

namespace gradedcalc {

/// Right action theta(x, v) with source (x1..xd, v1..vn).
struct PolynomialAction {
  std::string name;
  GroupLaw group;
  WeightVector beta;
  PolyMap theta;

  std::size_t space_dim() const { return theta.dim(); }
  std::size_t group_dim() const { return group.algebra.dim(); }
  std::vector<Var> space_vars() const { return var_range(xvar, static_cast<int>(space_dim())); }
  std::vector<Var> group_vars() const { return var_range(vvar, static_cast<int>(group_dim())); }
  VarWeights space_weights() const { return make_weights(space_vars(), beta.values()); }
};

PolynomialAction make_action(std::string name, GroupLaw group, WeightVector beta, PolyVec theta);

/// theta(x, 0) = x and theta(theta(x, v), w) = theta(x, m(v, w)).
Diagnostics validate_action(const PolynomialAction& a);

/// theta evaluated at polynomial points x and v.
PolyVec act(const PolyMap& theta, const PolyVec& x, const PolyVec& v);

/// theta(x, t, v): polynomial in t, equal to the base action at t = 1.
struct DeformedAction {
  std::string name;
  PolynomialAction base;
  WeightVector alpha;
  PolyMap theta;  // source (x, v); t enters as a parameter

  const WeightVector& beta() const { return base.beta; }
  std::size_t space_dim() const { return base.space_dim(); }
  std::size_t group_dim() const { return base.group_dim(); }
  const GradedLieAlgebra& algebra() const { return base.group.algebra; }
};

struct NotShubin {
  std::size_t component = 0;  // 0-based
  int exponent = 0;           // most negative power of t
  std::string witness;
};

class NotShubinError : public std::runtime_error {
public:
  NotShubinError(NotShubin w) : std::runtime_error(w.witness), info(std::move(w)) {}
  NotShubin info;
};

class IncompatibleField : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Conjugates by the dilations and inspects the Laurent exponents of t.
std::variant<DeformedAction, NotShubin> deform(const PolynomialAction& a, const WeightVector& alpha,
                                               const WeightVector& beta);

/// theta(x, t, v) = field(x, t^k, v) after checking
/// beta_l o field^s_{alpha_l v} o beta_{1/l} = field^{l^k s}_v.
DeformedAction rescale_field(const std::string& name, const GroupLaw& group, const WeightVector& alpha,
                             const WeightVector& beta, const PolyMap& field, int k);

PolynomialAction slice(const DeformedAction& da, const Rational& t0);
inline PolynomialAction theta_zero(const DeformedAction& da) { return slice(da, 0); }

/// Invariants of a deformed action: no negative t powers, slice(1) is the
/// base, slices at 0, 1, 1/2, -1/2, 2 are actions and the zoom identity.
Diagnostics check_deformed(const DeformedAction& da);

struct PropertyPFailure {
  std::string reason;
};

/// Omega(x, y) inverting (x, v) -> (x, theta(x, v)) by triangular
/// elimination; source (x1..xd, y1..yd), components (x, v). A failure means
/// the triangular method did not decide (P).
std::variant<PolyMap, PropertyPFailure> check_property_P(const PolynomialAction& a);

struct PropertyR {
  bool holds = false;
  std::size_t component = 0;
  std::string witness;
};

PropertyR check_property_R(const DeformedAction& da);

/// theta_{alpha_l v}(beta_{1/l} x, t / l) == beta_{1/l} theta_v(x, t).
bool zoom_check(const DeformedAction& da);

/// d/dv_j theta(x, t0, v)|_{v=0}; formal t when t0 is empty.
PolyVectorField fundamental_vf(const DeformedAction& da, std::size_t j, std::optional<Rational> t0 = {});
PolyVectorField fundamental_vf(const PolynomialAction& a, std::size_t j);

/// X^0_i x_j homogeneous of degree q_i + r_j, and X^1_i x_j - X^0_i x_j of
/// smaller beta-degree.
Diagnostics check_order_law(const DeformedAction& da);

/// The semidirect product X* x| g on (eta_1..eta_d, X_1..X_n) with
/// [X_j, eta_i] = X^0_j x_i read as a linear form. Throws if (R) fails.
GradedLieAlgebra symbol_group(const DeformedAction& da);

// Built-in constructions.
DeformedAction double_dilation(const GradedLieAlgebra& g, std::optional<std::vector<int>> beta = {});
/// vartheta(x, t, v) = Ad(exp(-X)) x + t sum_k 1/k! ad(-X)^{k-1}(DX).
PolyMap representation_field(const GradedLieAlgebra& g);
DeformedAction representation(const GradedLieAlgebra& g);
/// X = R^d x G with theta((x, w), v) = (x, w v).
DeformedAction group_bundle(int d, const GradedLieAlgebra& g, std::vector<int> beta1 = {});
/// H1 with weights (k, l, k+l) acting on R^2 = exp(R X2) \ H1 by
/// (x + v1, y + v3 + v1 v2 / 2 + x v2); beta = (p, q).
PolynomialAction grushin_action(int k, int l, int p, int q);
std::variant<DeformedAction, NotShubin> grushin(int k, int l, int p, int q);

}  // namespace gradedcalc
