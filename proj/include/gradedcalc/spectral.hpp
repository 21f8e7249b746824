#pragma once

// Hermite-basis discretisation of polynomial-coefficient operators on R^d and
// low-eigenvalue studies.

#include "gradedcalc/elliptic.hpp"

#include <iosfwd>

namespace gradedcalc {

struct DiscretizedOperator {
  std::vector<int> dims;  // truncation per axis
  int margin = 0;
  std::string source;
  CSparse full;
  std::vector<int> interior;  // flat indices kept
  CSparse block;              // full restricted to interior x interior
  bool hermitian = false;
};

/// |a| + deg p_a maximised over terms.
int default_margin(const PolyDiffOp& p);

/// x = (a + a^dag)/sqrt2 and d = (a - a^dag)/sqrt2 on every axis; margin < 0
/// selects default_margin(p).
DiscretizedOperator hermite_quantize(const PolyDiffOp& p, const std::vector<int>& dims, int margin = -1);
DiscretizedOperator hermite_quantize(const PolyDiffOp& p, int N, int margin = -1);

class NotHermitian : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

struct EigenOptions {
  std::size_t dense_limit = 4000;
  std::uint64_t seed = 1;
  double shift = -1;  // shift-invert point below the spectrum
};

/// k smallest eigenvalues of the interior block, ascending.
std::vector<double> low_spectrum(const DiscretizedOperator& d, std::size_t k, const EigenOptions& opt = {});

/// Lanczos with full reorthogonalisation on (A - shift)^{-1}.
std::vector<double> lanczos_lowest(const CSparse& a, std::size_t k, const EigenOptions& opt = {});

struct SpectrumReport {
  std::vector<int> truncations;
  std::vector<int> margins;
  std::vector<std::vector<double>> eigenvalues;  // per truncation, ascending
  std::vector<std::vector<double>> gaps;         // |lambda_i(N_s) - lambda_i(N_{s-1})|, empty for s = 0
  std::vector<bool> hermitian;
  double abs_tol = 1e-6, rel_tol = 1e-4;
  bool discrete = false;
  std::string verdict;  // "Discrete-evidence" or "Unresolved"
  std::string reason;
};

struct StudyOptions {
  int margin = -1;
  double abs_tol = 1e-6, rel_tol = 1e-4;
  /// Truncations (largest last) over which the Cauchy test is applied.
  std::size_t window = 3;
  unsigned threads = 1;
  EigenOptions eigen;
};

SpectrumReport convergence_study(const PolyDiffOp& p, const std::vector<int>& truncations, std::size_t k,
                                 const StudyOptions& opt = {});

/// Columns N,index,eigenvalue,gap.
void write_csv(const SpectrumReport& r, std::ostream& os);

struct SelfAdjointCheck {
  bool symbolic = false;
  bool numeric = false;
  bool ok() const { return symbolic && numeric; }
};

SelfAdjointCheck selfadjoint_check(const PolyDiffOp& p, int N = 10);

}  // namespace gradedcalc
