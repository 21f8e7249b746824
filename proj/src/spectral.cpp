#include "gradedcalc/spectral.hpp"

#include "gradedcalc/parallel.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <random>

namespace gradedcalc {

namespace {

using cd = std::complex<double>;

std::vector<int> interior_of(const std::vector<int>& dims, int margin) {
  long size = 1;
  for (int n : dims) size *= n;
  std::vector<int> idx;
  for (long i = 0; i < size; ++i) {
    long r = i;
    bool inside = true;
    for (std::size_t j = 0; j < dims.size() && inside; r /= dims[j], ++j) inside = (r % dims[j]) < dims[j] - margin;
    if (inside) idx.push_back(static_cast<int>(i));
  }
  return idx;
}

CSparse restrict_to(const CSparse& m, const std::vector<int>& idx) {
  std::vector<int> pos(static_cast<std::size_t>(m.rows()), -1);
  for (std::size_t r = 0; r < idx.size(); ++r) pos[static_cast<std::size_t>(idx[r])] = static_cast<int>(r);
  std::vector<Eigen::Triplet<cd>> t;
  for (int k = 0; k < m.outerSize(); ++k)
    for (CSparse::InnerIterator it(m, k); it; ++it) {
      int r = pos[static_cast<std::size_t>(it.row())], c = pos[static_cast<std::size_t>(it.col())];
      if (r >= 0 && c >= 0) t.emplace_back(r, c, it.value());
    }
  CSparse out(static_cast<long>(idx.size()), static_cast<long>(idx.size()));
  out.setFromTriplets(t.begin(), t.end());
  return out;
}

double max_abs(const CSparse& m) {
  double e = 0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (CSparse::InnerIterator it(m, k); it; ++it) e = std::max(e, std::abs(it.value()));
  return e;
}

bool is_real(const CSparse& m) {
  for (int k = 0; k < m.outerSize(); ++k)
    for (CSparse::InnerIterator it(m, k); it; ++it)
      if (it.value().imag() != 0) return false;
  return true;
}

CSparse identity(long n) {
  CSparse id(n, n);
  id.setIdentity();
  return id;
}

}  // namespace

int default_margin(const PolyDiffOp& p) {
  int m = 0;
  for (auto& [a, c] : p.terms()) {
    int da = std::accumulate(a.begin(), a.end(), 0);
    for (auto& [mono, k] : c.terms()) m = std::max(m, da + mono.total_degree());
  }
  return m;
}

DiscretizedOperator hermite_quantize(const PolyDiffOp& p, const std::vector<int>& dims, int margin) {
  const std::size_t d = dims.size();
  if (!p.is_zero() && p.dim() != d) throw DimensionMismatch("hermite_quantize: one truncation per axis");
  if (margin < 0) margin = default_margin(p);
  if (margin >= *std::min_element(dims.begin(), dims.end()))
    throw std::invalid_argument("hermite_quantize: margin must be below every truncation");
  long size = 1;
  for (int n : dims) size *= n;

  std::vector<CSparse> xs, ds;
  for (std::size_t j = 0; j < d; ++j) {
    xs.push_back(on_axis(ladder_position(dims[j]), static_cast<int>(j), dims));
    ds.push_back(on_axis(ladder_derivative(dims[j]), static_cast<int>(j), dims));
  }
  // cached powers per axis
  std::vector<std::vector<CSparse>> xp(d), dp(d);
  auto power = [&](std::vector<std::vector<CSparse>>& cache, const std::vector<CSparse>& base, std::size_t j,
                   int e) -> const CSparse& {
    auto& c = cache[j];
    if (c.empty()) c.push_back(identity(size));
    while (static_cast<int>(c.size()) <= e) c.push_back(CSparse(c.back() * base[j]));
    return c[static_cast<std::size_t>(e)];
  };

  CSparse full(size, size);
  for (auto& [a, coef] : p.terms()) {
    CSparse da = identity(size);
    for (std::size_t j = 0; j < d; ++j)
      if (a[j]) da = CSparse(da * power(dp, ds, j, a[j]));
    CSparse mult(size, size);
    for (auto& [mono, c] : coef.terms()) {
      CSparse xb = identity(size);
      for (auto& [v, e] : mono.factors()) {
        std::size_t j = d;
        for (std::size_t i = 0; i < d; ++i)
          if (v == xvar(static_cast<int>(i + 1))) j = i;
        if (j == d || e < 0) throw std::invalid_argument("hermite_quantize: coefficient involves " + v.name());
        xb = CSparse(xb * power(xp, xs, j, e));
      }
      mult += c.to_complex() * xb;
    }
    full += CSparse(mult * da);
  }
  full.prune(cd(0));

  DiscretizedOperator out;
  out.dims = dims;
  out.margin = margin;
  out.source = p.str();
  out.interior = interior_of(dims, margin);
  out.block = restrict_to(full, out.interior);
  out.full = std::move(full);
  CSparse skew = out.block - CSparse(out.block.adjoint());
  out.hermitian = max_abs(skew) <= 1e-10;
  return out;
}

DiscretizedOperator hermite_quantize(const PolyDiffOp& p, int N, int margin) {
  return hermite_quantize(p, std::vector<int>(p.dim(), N), margin);
}

std::vector<double> lanczos_lowest(const CSparse& a, std::size_t k, const EigenOptions& opt) {
  const long n = a.rows();
  if (n == 0 || k == 0) return {};
  k = std::min<std::size_t>(k, static_cast<std::size_t>(n));
  CSparse shifted = a - opt.shift * identity(n);
  Eigen::SparseLU<CSparse> lu;
  lu.compute(shifted);
  if (lu.info() != Eigen::Success) throw std::runtime_error("lanczos_lowest: factorisation of A - shift failed");

  // Block Krylov space of S = (A - shift)^{-1}, fully reorthogonalised, so
  // that repeated eigenvalues up to the block size are resolved.
  const long b = std::min<long>(n, std::max<long>(static_cast<long>(k), 6));
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd V(n, 0), SV(n, 0);
  Eigen::MatrixXcd block(n, b);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < b; ++j) block(i, j) = cd(g(rng), 0);
  long target = std::min<long>(n, std::max<long>(4 * b, 3 * static_cast<long>(k) + 40));
  while (true) {
    while (V.cols() < target) {
      for (int pass = 0; pass < 2 && V.cols() > 0; ++pass) block -= V * (V.adjoint() * block);
      Eigen::HouseholderQR<Eigen::MatrixXcd> qr(block);
      Eigen::MatrixXcd Q = qr.householderQ() * Eigen::MatrixXcd::Identity(n, block.cols());
      // drop directions that vanished after orthogonalisation
      Eigen::MatrixXcd R = qr.matrixQR().topRows(block.cols()).triangularView<Eigen::Upper>();
      std::vector<long> keep;
      for (long j = 0; j < block.cols(); ++j)
        if (std::abs(R(j, j)) > 1e-10) keep.push_back(j);
      if (keep.empty()) break;
      Eigen::MatrixXcd Qk(n, static_cast<long>(keep.size()));
      for (std::size_t j = 0; j < keep.size(); ++j) Qk.col(static_cast<long>(j)) = Q.col(keep[j]);
      for (int pass = 0; pass < 2 && V.cols() > 0; ++pass) Qk -= V * (V.adjoint() * Qk);
      for (long j = 0; j < Qk.cols(); ++j) Qk.col(j).normalize();
      Eigen::MatrixXcd SQ(n, Qk.cols());
      for (long j = 0; j < Qk.cols(); ++j) SQ.col(j) = lu.solve(Qk.col(j));
      V.conservativeResize(n, V.cols() + Qk.cols());
      V.rightCols(Qk.cols()) = Qk;
      SV.conservativeResize(n, SV.cols() + Qk.cols());
      SV.rightCols(Qk.cols()) = SQ;
      block = SQ;
    }
    Eigen::MatrixXcd H = V.adjoint() * SV;
    H = (H + H.adjoint()).eval() * 0.5;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    const long m = H.rows();
    bool converged = true;
    std::vector<double> out;
    for (std::size_t i = 0; i < k && static_cast<long>(i) < m; ++i) {
      long c = m - 1 - static_cast<long>(i);
      double theta = es.eigenvalues()(c);
      Eigen::VectorXcd y = es.eigenvectors().col(c);
      Eigen::VectorXcd r = SV * y - theta * (V * y);
      if (r.norm() > 1e-11 * std::abs(theta)) converged = false;
      out.push_back(opt.shift + 1.0 / theta);
    }
    if (converged || V.cols() >= n || target >= n) {
      std::sort(out.begin(), out.end());
      return out;
    }
    target = std::min(n, 2 * target);
  }
}

std::vector<double> low_spectrum(const DiscretizedOperator& d, std::size_t k, const EigenOptions& opt) {
  if (!d.hermitian) throw NotHermitian("low_spectrum: interior block is not Hermitian");
  const long n = d.block.rows();
  k = std::min<std::size_t>(k, static_cast<std::size_t>(n));
  if (static_cast<std::size_t>(n) > opt.dense_limit) return lanczos_lowest(d.block, k, opt);
  std::vector<double> out;
  if (is_real(d.block)) {
    Eigen::MatrixXd m = Eigen::MatrixXcd(d.block).real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    for (std::size_t i = 0; i < k; ++i) out.push_back(es.eigenvalues()(static_cast<long>(i)));
  } else {
    Eigen::MatrixXcd m(d.block);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    for (std::size_t i = 0; i < k; ++i) out.push_back(es.eigenvalues()(static_cast<long>(i)));
  }
  return out;
}

SpectrumReport convergence_study(const PolyDiffOp& p, const std::vector<int>& truncations, std::size_t k,
                                 const StudyOptions& opt) {
  SpectrumReport r;
  r.truncations = truncations;
  r.abs_tol = opt.abs_tol;
  r.rel_tol = opt.rel_tol;
  const std::size_t s = truncations.size();
  r.eigenvalues.resize(s);
  r.margins.resize(s);
  r.hermitian.resize(s);
  parallel_for(s, opt.threads, [&](std::size_t i) {
    DiscretizedOperator d = hermite_quantize(p, truncations[i], opt.margin);
    r.margins[i] = d.margin;
    r.hermitian[i] = d.hermitian;
    if (d.hermitian) r.eigenvalues[i] = low_spectrum(d, k, opt.eigen);
  });
  for (std::size_t i = 0; i < s; ++i) {
    std::vector<double> gap;
    if (i > 0)
      for (std::size_t j = 0; j < std::min(r.eigenvalues[i].size(), r.eigenvalues[i - 1].size()); ++j)
        gap.push_back(std::abs(r.eigenvalues[i][j] - r.eigenvalues[i - 1][j]));
    r.gaps.push_back(gap);
  }

  auto unresolved = [&r](std::string why) {
    r.discrete = false;
    r.verdict = "Unresolved";
    r.reason = std::move(why);
    return r;
  };
  if (std::find(r.hermitian.begin(), r.hermitian.end(), false) != r.hermitian.end())
    return unresolved("discretisation is not Hermitian");
  if (s < 2) return unresolved("at least two truncations are needed");
  const std::size_t first = s - std::min(s, opt.window);
  for (std::size_t i = first + 1; i < s; ++i) {
    if (r.eigenvalues[i].size() < k) return unresolved("fewer than k eigenvalues at N = " + std::to_string(truncations[i]));
    for (std::size_t j = 0; j < k; ++j) {
      double tol = std::max(opt.abs_tol, opt.rel_tol * std::abs(r.eigenvalues[i][j]));
      if (r.gaps[i][j] >= tol)
        return unresolved("eigenvalue " + std::to_string(j) + " moved by " + std::to_string(r.gaps[i][j]) +
                          " between N = " + std::to_string(truncations[i - 1]) + " and " + std::to_string(truncations[i]));
    }
  }
  // the count below a fixed bound must not change across the window
  const double bound = r.eigenvalues.back()[k - 1] + std::max(opt.abs_tol, opt.rel_tol * std::abs(r.eigenvalues.back()[k - 1]));
  std::optional<long> count;
  for (std::size_t i = first; i < s; ++i) {
    long c = std::count_if(r.eigenvalues[i].begin(), r.eigenvalues[i].end(), [&](double e) { return e <= bound; });
    if (count && *count != c) return unresolved("eigenvalue count below " + std::to_string(bound) + " changes");
    count = c;
  }
  r.discrete = true;
  r.verdict = "Discrete-evidence";
  r.reason = "lowest " + std::to_string(k) + " eigenvalues Cauchy over the last " + std::to_string(s - first) + " truncations";
  return r;
}

void write_csv(const SpectrumReport& r, std::ostream& os) {
  os << "N,index,eigenvalue,gap\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < r.truncations.size(); ++i)
    for (std::size_t j = 0; j < r.eigenvalues[i].size(); ++j) {
      os << r.truncations[i] << "," << j << "," << r.eigenvalues[i][j] << ",";
      if (j < r.gaps[i].size()) os << r.gaps[i][j];
      os << "\n";
    }
}

SelfAdjointCheck selfadjoint_check(const PolyDiffOp& p, int N) {
  SelfAdjointCheck c;
  c.symbolic = formal_adjoint(p) == p;
  int margin = std::min(default_margin(p), N - 1);
  c.numeric = hermite_quantize(p, N, margin).hermitian;
  return c;
}

}  // namespace gradedcalc
