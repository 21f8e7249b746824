#include "gradedcalc/linalg.hpp"

#include <stdexcept>

namespace gradedcalc {

std::vector<std::size_t> rref(RatMat& m) {
  std::vector<std::size_t> pivots;
  if (m.empty()) return pivots;
  const std::size_t rows = m.size(), cols = m[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && sgn(m[p][c]) == 0) ++p;
    if (p == rows) continue;
    std::swap(m[p], m[r]);
    Rational inv = 1 / m[r][c];
    for (auto& x : m[r]) x *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || sgn(m[i][c]) == 0) continue;
      Rational f = m[i][c];
      for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

std::size_t rank(RatMat m) { return rref(m).size(); }

RatMat row_space(RatMat m) {
  auto piv = rref(m);
  m.resize(piv.size());
  return m;
}

bool in_span(const RatMat& basis, const RatVec& v) {
  RatMat m = basis;
  std::size_t r = rank(m);
  m.push_back(v);
  return rank(m) == r;
}

PolyMat inverse_unimodular(const PolyMat& m) {
  const std::size_t n = m.size();
  Polynomial det = determinant(m);
  if (!det.is_constant() || det.is_zero())
    throw std::domain_error("matrix determinant is not a nonzero constant: " + det.str());
  Polynomial inv_det(Gaussian(1) / det.constant_term());
  PolyMat out(n, PolyVec(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      // cofactor C_ji goes to entry (i, j)
      PolyMat minor;
      for (std::size_t r = 0; r < n; ++r) {
        if (r == j) continue;
        PolyVec row;
        for (std::size_t c = 0; c < n; ++c)
          if (c != i) row.push_back(m[r][c]);
        minor.push_back(std::move(row));
      }
      Polynomial cof = determinant(minor);
      if ((i + j) % 2) cof = -cof;
      out[i][j] = cof * inv_det;
    }
  return out;
}

PolyVec mat_vec(const PolyMat& m, const PolyVec& v) {
  PolyVec out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j)
      if (!m[i][j].is_zero() && !v[j].is_zero()) out[i] += m[i][j] * v[j];
  return out;
}

}  // namespace gradedcalc
