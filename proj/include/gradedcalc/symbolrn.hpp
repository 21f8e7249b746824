#pragma once

// Anisotropic Shubin symbols on R^n x R^n: exact rational symbols, the
// Kohn-Nirenberg composition expansion, parametrices and numeric checks of
// the symbol estimates.

#include "gradedcalc/opalg.hpp"

#include <complex>
#include <cstdint>

namespace gradedcalc {

/// beta on x_1..x_n, alpha on xi_1..xi_n.
struct SymbolWeights {
  WeightVector beta, alpha;

  std::size_t n() const { return beta.size(); }
  VarWeights var_weights() const;
  /// min_j (alpha_j + beta_j): the order lost per derivative pair.
  long min_drop() const;
  static SymbolWeights isotropic(std::size_t n) {
    return {WeightVector(std::vector<int>(n, 1)), WeightVector(std::vector<int>(n, 1))};
  }
};

/// num / prod base_i^{power_i} with polynomials in x_j = xvar(j), xi_j = xivar(j).
class RationalSymbol {
public:
  struct Factor {
    Polynomial base;
    int power = 0;
    friend bool operator==(const Factor& a, const Factor& b) { return a.power == b.power && a.base == b.base; }
  };

  RationalSymbol() = default;
  RationalSymbol(SymbolWeights w, Polynomial num, std::vector<Factor> den = {});
  static RationalSymbol reciprocal(SymbolWeights w, const Polynomial& base, int power = 1);

  const SymbolWeights& weights() const { return w_; }
  const Polynomial& numerator() const { return num_; }
  const std::vector<Factor>& denominator_factors() const { return den_; }
  Polynomial denominator() const;
  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.empty(); }
  /// Top weighted degree of the numerator minus that of the denominator.
  std::optional<long> order() const;

  RationalSymbol dx(std::size_t j, int k = 1) const;
  RationalSymbol dxi(std::size_t j, int k = 1) const;
  RationalSymbol derivative(const MultiIndex& a_xi, const MultiIndex& b_x) const;

  RationalSymbol& operator+=(const RationalSymbol& o);
  RationalSymbol& operator-=(const RationalSymbol& o);
  RationalSymbol& operator*=(const RationalSymbol& o);
  RationalSymbol& operator*=(const Gaussian& c);
  friend RationalSymbol operator+(RationalSymbol a, const RationalSymbol& b) { return a += b; }
  friend RationalSymbol operator-(RationalSymbol a, const RationalSymbol& b) { return a -= b; }
  friend RationalSymbol operator*(RationalSymbol a, const RationalSymbol& b) { return a *= b; }
  friend RationalSymbol operator*(const Gaussian& c, RationalSymbol a) { return a *= c; }
  /// Equality as rational functions.
  bool equals(const RationalSymbol& o) const;

  std::complex<double> evaluate(const std::vector<double>& x, const std::vector<double>& xi) const;
  std::string str() const;

private:
  RationalSymbol derive(Var v) const;
  SymbolWeights w_;
  Polynomial num_;
  std::vector<Factor> den_;
};

struct KnTerm {
  MultiIndex a;
  RationalSymbol term;
  long declared_order = 0;
};

struct KnExpansion {
  std::vector<KnTerm> terms;
  RationalSymbol sum;
  long remainder_order = 0;  // declared order of the first omitted layer
  bool exact = false;        // p polynomial in xi of degree < K
};

/// sum_{|a| < K} (1/a!) d_xi^a p * (-i d_x)^a q.
KnExpansion kn_compose_asymptotic(const RationalSymbol& p, const RationalSymbol& q, int K);

class NotElliptic : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Positive sum of even powers of single variables, homogeneous of one
/// order and containing every x_j and xi_j; returns that order.
long check_elliptic_pattern(const RationalSymbol& p);

struct Parametrix {
  long order = 0;
  std::vector<RationalSymbol> terms;        // q_0 .. q_{N-1}
  std::vector<long> declared_orders;        // -m - k * min_drop
  std::vector<RationalSymbol> residuals;    // p # (q_0 + .. + q_k) - 1
  std::vector<long> residual_declared;      // -(k + 1) * min_drop
};

Parametrix parametrix_expansion(const RationalSymbol& p, int nterms);

/// sum_a p_a(x) (i xi)^a.
RationalSymbol full_symbol(const PolyDiffOp& p, const SymbolWeights& w);

struct EstimateConfig {
  int rays = 16;
  int min_exp = 1, max_exp = 8;  // radii 2^min_exp .. 2^max_exp
  int tail_from = 6;             // slope fitted on radii >= 2^tail_from
  double slope_tol = 0.05;
  std::uint64_t seed = 1;
};

struct EstimateRow {
  MultiIndex a, b;  // d_xi^a d_x^b
  double sup_constant = 0;
  double slope = 0;
  bool pass = false;
};

struct EstimateReport {
  long m = 0;
  std::vector<double> radii;
  std::vector<EstimateRow> rows;
  bool pass = false;
};

/// Every (a, b) with [a]_alpha + [b]_beta <= max_length.
std::vector<std::pair<MultiIndex, MultiIndex>> derivative_set(const SymbolWeights& w, long max_length);

EstimateReport symbol_estimate_check(const RationalSymbol& s, long m,
                                     const std::vector<std::pair<MultiIndex, MultiIndex>>& derivatives,
                                     const EstimateConfig& cfg = {});

/// Median over rays of the log-log slope of |s| along dilation orbits.
double decay_slope(const RationalSymbol& s, const EstimateConfig& cfg = {});

}  // namespace gradedcalc
