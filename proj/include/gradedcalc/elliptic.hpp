#pragma once

// Rockland checks: a symbolic certificate for sums of even powers of a
// generating family, and numeric checks in truncated Schroedinger
// representations and characters.

#include "gradedcalc/opalg.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <cstdint>

namespace gradedcalc {

/// Iterated brackets of the chosen basis vectors span the whole algebra.
bool generating_certificate(const GradedLieAlgebra& alg, const std::vector<std::size_t>& subset);

struct SigmaRow {
  std::string branch;  // "schrodinger" or "character"
  double lambda = 0;
  std::vector<double> x0;
  int N = 0;
  double sigma_min = 0;
  double norm1 = 0;
};

struct RocklandVerdict {
  enum class Status { CertifiedElliptic, NumericEvidence, Inconclusive, NumericFailure };
  Status status = Status::Inconclusive;
  std::vector<SigmaRow> table;
  std::string witness;
  std::vector<std::string> notes;
};

std::string to_string(RocklandVerdict::Status s);

/// Matches sum_i c_i Y_{j_i}^{2q/w_{j_i}} with sign(c_i) = (-1)^{q/w_{j_i}} over
/// distinct basis vectors generating the algebra.
RocklandVerdict rockland_certificate(const EnvelopingElement& e);

/// Formal adjoint in U(g): X -> -X on generators, conjugated coefficients,
/// reversed words.
EnvelopingElement enveloping_adjoint(const EnvelopingElement& e);

using CMatrix = Eigen::MatrixXcd;
using CSparse = Eigen::SparseMatrix<std::complex<double>>;

struct RepMatrices {
  int n = 0;  // Heisenberg rank
  double lambda = 0;
  int N = 0;  // per-axis truncation
  std::string basis;
  std::vector<CSparse> generators;  // d pi(X_1) .. d pi(X_{2n+1})
};

/// Ladder matrices on one axis: x = (a + a^dag)/sqrt2, d/du = (a - a^dag)/sqrt2.
CSparse ladder_position(int N);
CSparse ladder_derivative(int N);
/// Operator acting on tensor slot `axis` of an n-fold product of N-dim factors.
CSparse on_axis(const CSparse& a, int axis, int n, int N);
/// Same for axes of different lengths (axis 0 varies fastest).
CSparse on_axis(const CSparse& a, int axis, const std::vector<int>& dims);
/// Multi-indices with every entry below N - margin, as flat positions.
std::vector<int> interior_indices(int n, int N, int margin);
CMatrix interior_block(const CSparse& m, const std::vector<int>& idx);

RepMatrices schrodinger_rep(int n, double lambda, int N);
/// Largest interior entry of [d pi(X_i), d pi(X_j)] - d pi([X_i, X_j]).
double commutator_fidelity(const RepMatrices& r, const GradedLieAlgebra& hn);

struct RocklandConfig {
  std::vector<double> lambdas{-2, -1, -0.5, 0.5, 1, 2};
  std::vector<int> truncations{16, 24, 32};
  int directions = 2;      // seeded x0 directions on the unit quasi-sphere
  int character_samples = 400;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

class UnsupportedGroup : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Numeric Rockland test of the top part of nf (order m) for actions with
/// trivial theta^0 over an abelian or Heisenberg group.
RocklandVerdict numeric_rockland(const OperatorCalculus& oc, const NormalForm& nf, long m,
                                 const RocklandConfig& cfg = {});

}  // namespace gradedcalc
