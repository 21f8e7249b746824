#include "gradedcalc/elliptic.hpp"

#include "gradedcalc/parallel.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace gradedcalc {

bool generating_certificate(const GradedLieAlgebra& alg, const std::vector<std::size_t>& subset) {
  RatMat span;
  std::vector<RatVec> gens, frontier;
  for (std::size_t i : subset) {
    if (i >= alg.dim()) throw std::out_of_range("generating_certificate: index out of range");
    RatVec e = alg.basis_vector(i);
    gens.push_back(e);
    if (!in_span(span, e)) {
      span.push_back(e);
      span = row_space(span);
      frontier.push_back(e);
    }
  }
  while (!frontier.empty()) {
    std::vector<RatVec> next;
    for (auto& g : gens)
      for (auto& v : frontier) {
        RatVec w = alg.bracket(g, v);
        if (in_span(span, w)) continue;
        span.push_back(w);
        span = row_space(span);
        next.push_back(w);
      }
    frontier = std::move(next);
  }
  return span.size() == alg.dim();
}

std::string to_string(RocklandVerdict::Status s) {
  switch (s) {
    case RocklandVerdict::Status::CertifiedElliptic: return "CertifiedElliptic";
    case RocklandVerdict::Status::NumericEvidence: return "NumericEvidence";
    case RocklandVerdict::Status::NumericFailure: return "NumericFailure";
    default: return "Inconclusive";
  }
}

RocklandVerdict rockland_certificate(const EnvelopingElement& e) {
  RocklandVerdict v;
  auto fail = [&v](std::string why) {
    v.status = RocklandVerdict::Status::Inconclusive;
    v.notes.push_back(std::move(why));
    return v;
  };
  if (e.is_zero()) return fail("zero element");
  const GradedLieAlgebra& alg = e.context()->algebra();
  std::optional<long> q;
  std::vector<std::size_t> subset;
  for (auto& [w, c] : e.terms()) {
    std::string term = EnvelopingElement(e.context(), {{w, Gaussian(1)}}).str();
    if (w.empty() || std::any_of(w.begin(), w.end(), [&](int k) { return k != w[0]; }))
      return fail("term " + term + " is not a power of one basis vector");
    if (!c.is_real()) return fail("term " + term + " has a non-real coefficient");
    const auto j = static_cast<std::size_t>(w[0]);
    const long k = static_cast<long>(w.size()), weight = alg.weight(j);
    if (k % 2) return fail("term " + term + " has an odd exponent");
    long qq = k * weight / 2;
    if (q && *q != qq) return fail("terms are not homogeneous of one degree 2q");
    q = qq;
    int expected = (k / 2) % 2 ? -1 : 1;
    if (sgn(c.re()) != expected) return fail("term " + term + " has the wrong sign");
    subset.push_back(j);
  }
  if (!generating_certificate(alg, subset)) return fail("the basis vectors in use do not generate the algebra");
  v.status = RocklandVerdict::Status::CertifiedElliptic;
  v.notes.push_back("sum of even powers with q = " + std::to_string(*q) + " over a generating family");
  return v;
}

EnvelopingElement enveloping_adjoint(const EnvelopingElement& e) {
  EnvelopingElement r(e.context());
  for (auto& [w, c] : e.terms()) {
    EnvelopingElement::Word rev(w.rbegin(), w.rend());
    Gaussian k = c.conj();
    if (w.size() % 2) k = -k;
    r += k * e.context()->normalize(rev);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Truncated representations

namespace {

using cd = std::complex<double>;

CSparse ladder(int N, double lower_sign) {
  std::vector<Eigen::Triplet<cd>> t;
  for (int k = 1; k < N; ++k) {
    double v = std::sqrt(k / 2.0);
    t.emplace_back(k - 1, k, v);
    t.emplace_back(k, k - 1, lower_sign * v);
  }
  CSparse m(N, N);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

long ipow(long b, int e) {
  long r = 1;
  while (e-- > 0) r *= b;
  return r;
}

double sigma_min(const CMatrix& m) {
  if (m.rows() == 0) return 0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues().minCoeff();
}

std::string vec_str(const std::vector<double>& v) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ")";
  return os.str();
}

}  // namespace

CSparse ladder_position(int N) { return ladder(N, 1.0); }
CSparse ladder_derivative(int N) { return ladder(N, -1.0); }

CSparse on_axis(const CSparse& a, int axis, const std::vector<int>& dims) {
  long stride = 1, size = 1;
  for (std::size_t j = 0; j < dims.size(); ++j) {
    if (static_cast<int>(j) < axis) stride *= dims[j];
    size *= dims[j];
  }
  const int N = dims.at(static_cast<std::size_t>(axis));
  if (a.rows() != N) throw DimensionMismatch("on_axis: factor size differs from the axis length");
  std::vector<Eigen::Triplet<cd>> t;
  for (long i = 0; i < size; ++i) {
    const int digit = static_cast<int>((i / stride) % N);
    for (int k = 0; k < a.outerSize(); ++k)
      for (CSparse::InnerIterator it(a, k); it; ++it)
        if (it.row() == digit) t.emplace_back(i, i + (it.col() - digit) * stride, it.value());
  }
  CSparse m(size, size);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

CSparse on_axis(const CSparse& a, int axis, int n, int N) { return on_axis(a, axis, std::vector<int>(static_cast<std::size_t>(n), N)); }

std::vector<int> interior_indices(int n, int N, int margin) {
  std::vector<int> idx;
  const long size = ipow(N, n);
  for (long i = 0; i < size; ++i) {
    long r = i;
    bool inside = true;
    for (int j = 0; j < n && inside; ++j, r /= N) inside = (r % N) < N - margin;
    if (inside) idx.push_back(static_cast<int>(i));
  }
  return idx;
}

CMatrix interior_block(const CSparse& m, const std::vector<int>& idx) {
  std::vector<int> pos(static_cast<std::size_t>(m.rows()), -1);
  for (std::size_t r = 0; r < idx.size(); ++r) pos[static_cast<std::size_t>(idx[r])] = static_cast<int>(r);
  CMatrix out = CMatrix::Zero(static_cast<long>(idx.size()), static_cast<long>(idx.size()));
  for (int k = 0; k < m.outerSize(); ++k)
    for (CSparse::InnerIterator it(m, k); it; ++it) {
      int r = pos[static_cast<std::size_t>(it.row())], c = pos[static_cast<std::size_t>(it.col())];
      if (r >= 0 && c >= 0) out(r, c) = it.value();
    }
  return out;
}

RepMatrices schrodinger_rep(int n, double lambda, int N) {
  if (lambda == 0) throw std::invalid_argument("schrodinger_rep: lambda = 0 is not a Schroedinger representation");
  if (n < 1 || N < 1) throw std::invalid_argument("schrodinger_rep: need n >= 1 and N >= 1");
  RepMatrices r{n, lambda, N, std::to_string(n) + "-fold tensor Hermite basis, degree < " + std::to_string(N) + " per axis", {}};
  const cd il(0, lambda);
  CSparse d = ladder_derivative(N), x = ladder_position(N);
  for (int j = 0; j < n; ++j) r.generators.push_back(on_axis(d, j, n, N));
  for (int j = 0; j < n; ++j) r.generators.push_back(il * on_axis(x, j, n, N));
  CSparse id(ipow(N, n), ipow(N, n));
  id.setIdentity();
  r.generators.push_back(il * id);
  return r;
}

double commutator_fidelity(const RepMatrices& r, const GradedLieAlgebra& hn) {
  if (hn.dim() != r.generators.size()) throw DimensionMismatch("commutator_fidelity: algebra dimension");
  auto idx = interior_indices(r.n, r.N, 1);
  double err = 0;
  for (std::size_t i = 0; i < hn.dim(); ++i)
    for (std::size_t j = 0; j < hn.dim(); ++j) {
      CSparse c = r.generators[i] * r.generators[j] - r.generators[j] * r.generators[i];
      for (std::size_t k = 0; k < hn.dim(); ++k)
        if (sgn(hn.c(i, j, k)) != 0) c -= hn.c(i, j, k).get_d() * r.generators[k];
      CMatrix b = interior_block(c, idx);
      if (b.size()) err = std::max(err, b.cwiseAbs().maxCoeff());
    }
  return err;
}

// ---------------------------------------------------------------------------
// Numeric Rockland test

namespace {

struct TopTerm {
  MultiIndex a, b;
  cd c;
};

double quasi_norm_point(const std::vector<double>& p, const std::vector<int>& w) {
  int q = 1;
  for (int k : w) q = std::lcm(q, k);
  double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::pow(std::abs(p[i]), 2.0 * q / w[i]);
  return std::pow(s, 1.0 / (2.0 * q));
}

/// Dilates p onto the unit quasi-sphere of the weights w.
std::vector<double> to_sphere(std::vector<double> p, const std::vector<int>& w) {
  double r = quasi_norm_point(p, w);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] /= std::pow(r, w[i]);
  return p;
}

cd monomial_value(const std::vector<double>& x, const MultiIndex& b) {
  double v = 1;
  for (std::size_t i = 0; i < b.size(); ++i) v *= std::pow(x[i], b[i]);
  return v;
}

}  // namespace

RocklandVerdict numeric_rockland(const OperatorCalculus& oc, const NormalForm& nf, long m, const RocklandConfig& cfg) {
  const DeformedAction& da = oc.action();
  const GradedLieAlgebra& g = da.algebra();
  const std::size_t d = da.space_dim(), dim = g.dim();
  if (theta_zero(da).theta.components() != coords(xvar, d))
    throw UnsupportedGroup("numeric_rockland: theta^0 is not trivial; use the symbolic certificate");
  int hn = 0;
  if (!g.is_abelian()) {
    if (dim % 2 == 0 || !(heisenberg(static_cast<int>(dim / 2)).with_weights(g.weights().values()) == g))
      throw UnsupportedGroup("numeric_rockland: only abelian and Heisenberg groups are implemented");
    hn = static_cast<int>(dim / 2);
  }
  auto ord = oc.order(nf);
  if (ord && *ord > m) throw std::invalid_argument("numeric_rockland: operator order exceeds m");

  std::vector<TopTerm> top;
  double coef_norm = 0;
  int margin = 0;
  for (auto& [ab, c] : nf.coeffs)
    if (da.alpha.length(ab.first) + da.beta().length(ab.second) == m) {
      top.push_back({ab.first, ab.second, c.to_complex()});
      coef_norm += std::abs(c.to_complex());
      margin = std::max(margin, std::accumulate(ab.first.begin(), ab.first.end(), 0));
    }

  RocklandVerdict v;
  if (top.empty()) {
    v.status = RocklandVerdict::Status::NumericFailure;
    v.witness = "principal part of order " + std::to_string(m) + " is zero";
    return v;
  }
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss;
  std::vector<int> beta = da.beta().values();

  // Characters: pi(X_j) = i xi_j, central direction of H_n acts by 0.
  const std::size_t nchar = hn ? static_cast<std::size_t>(2 * hn) : dim;
  std::vector<int> w = beta;
  for (std::size_t j = 0; j < nchar; ++j) w.push_back(da.alpha[j]);
  std::vector<std::vector<double>> points;
  for (std::size_t k = 0; k < w.size(); ++k)
    for (double s : {1.0, -1.0}) {
      std::vector<double> p(w.size(), 0.0);
      p[k] = s;
      points.push_back(p);
    }
  for (int s = 0; s < cfg.character_samples; ++s) {
    std::vector<double> p(w.size());
    for (double& c : p) c = gauss(rng);
    points.push_back(to_sphere(p, w));
  }
  double cmin = INFINITY;
  std::vector<double> cwit;
  for (auto& p : points) {
    std::vector<double> x0(p.begin(), p.begin() + static_cast<long>(d));
    cd val = 0;
    for (auto& t : top) {
      cd term = t.c * monomial_value(x0, t.b);
      for (std::size_t j = 0; j < dim; ++j) {
        if (!t.a[j]) continue;
        cd xi = j < nchar ? cd(0, p[d + j]) : cd(0);
        term *= std::pow(xi, t.a[j]);
      }
      val += term;
    }
    if (std::abs(val) < cmin) {
      cmin = std::abs(val);
      cwit = p;
    }
  }
  v.table.push_back({"character", 0, cwit, 0, cmin, coef_norm});
  bool failed = false, all_stable = true;
  if (cmin <= 1e-12 * coef_norm) {
    failed = true;
    v.witness = "character at (x0, xi) = " + vec_str(cwit) + " annihilates the principal part";
  } else if (cmin <= 1e-6 * coef_norm) {
    all_stable = false;
  }

  if (hn) {
    std::vector<std::vector<double>> x0s{std::vector<double>(d, 0.0)};
    for (int s = 0; s < cfg.directions; ++s) {
      std::vector<double> p(d);
      for (double& c : p) c = gauss(rng);
      x0s.push_back(to_sphere(p, beta));
    }
    struct Sample {
      double lambda;
      std::vector<double> x0;
      std::vector<SigmaRow> rows;
    };
    std::vector<Sample> samples;
    for (double l : cfg.lambdas)
      for (auto& x0 : x0s) samples.push_back({l, x0, {}});
    parallel_for(samples.size(), cfg.threads, [&](std::size_t s) {
      Sample& smp = samples[s];
      for (int N : cfg.truncations) {
        RepMatrices rep = schrodinger_rep(hn, smp.lambda, N);
        const long size = rep.generators[0].rows();
        CSparse M(size, size);
        for (auto& t : top) {
          CSparse word(size, size);
          word.setIdentity();
          for (std::size_t j = 0; j < dim; ++j)
            for (int r = 0; r < t.a[j]; ++r) word = CSparse(word * rep.generators[j]);
          M += (t.c * monomial_value(smp.x0, t.b)) * word;
        }
        CMatrix block = interior_block(M, interior_indices(hn, N, margin));
        double n1 = block.size() ? block.cwiseAbs().colwise().sum().maxCoeff() : 0.0;
        smp.rows.push_back({"schrodinger", smp.lambda, smp.x0, N, sigma_min(block), n1});
      }
    });
    bool schrodinger_failed = false;
    for (auto& smp : samples) {
      const auto& r = smp.rows;
      v.table.insert(v.table.end(), r.begin(), r.end());
      if (r.size() < 2) {
        all_stable = false;
        continue;
      }
      double prev = r[r.size() - 2].sigma_min, last = r.back().sigma_min;
      bool decreasing = true;
      for (std::size_t k = 1; k < r.size(); ++k) decreasing = decreasing && r[k].sigma_min < r[k - 1].sigma_min;
      bool stable = std::abs(last - prev) < 0.05 * std::max(last, prev) && last > 1e-6 * r.back().norm1;
      if (decreasing && (prev - last) > 0.05 * prev && !schrodinger_failed) {
        failed = schrodinger_failed = true;
        std::ostringstream os;
        os << "schrodinger lambda = " << smp.lambda << ", x0 = " << vec_str(smp.x0) << ": sigma_min";
        for (auto& row : r) os << " " << row.sigma_min << " (N=" << row.N << ")";
        os << " decreasing";
        v.witness += (v.witness.empty() ? "" : "; ") + os.str();
      }
      all_stable = all_stable && stable;
    }
  }

  v.status = failed       ? RocklandVerdict::Status::NumericFailure
             : all_stable ? RocklandVerdict::Status::NumericEvidence
                          : RocklandVerdict::Status::Inconclusive;
  v.notes.push_back("numeric evidence only; stability window 5% between the two largest truncations, floor 1e-6 x 1-norm");
  return v;
}

}  // namespace gradedcalc
