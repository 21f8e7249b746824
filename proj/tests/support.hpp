#pragma once

// Random generators shared by the unit tests and the acceptance driver.

#include "gradedcalc/opalg.hpp"

#include <functional>
#include <random>

namespace testsupport {

using namespace gradedcalc;

inline Gaussian random_gauss(std::mt19937_64& rng, bool complex = true) {
  std::uniform_int_distribution<int> num(-5, 5), den(1, 4);
  Rational re(num(rng), den(rng));
  re.canonicalize();
  if (!complex) return Gaussian(re);
  Rational im(num(rng), den(rng));
  im.canonicalize();
  return Gaussian(re, im);
}

inline Gaussian random_nonzero(std::mt19937_64& rng) {
  Gaussian g;
  while (g.is_zero()) g = random_gauss(rng);
  return g;
}

/// Every multi-index k of the given length with weights.length(k) <= m.
inline std::vector<MultiIndex> indices_up_to(const WeightVector& w, long m) {
  std::vector<MultiIndex> out;
  MultiIndex k(w.size(), 0);
  std::function<void(std::size_t, long)> rec = [&](std::size_t i, long left) {
    if (i == w.size()) {
      out.push_back(k);
      return;
    }
    for (int e = 0; e * w[i] <= left; ++e) {
      k[i] = e;
      rec(i + 1, left - e * w[i]);
    }
    k[i] = 0;
  };
  rec(0, m);
  return out;
}

/// Random writing sum c x^b Xhat^a with order exactly m (at least one top term).
inline NormalForm random_normal_form(std::mt19937_64& rng, const WeightVector& alpha, const WeightVector& beta,
                                     long m, int terms) {
  std::vector<std::pair<MultiIndex, MultiIndex>> all, top;
  for (auto& a : indices_up_to(alpha, m))
    for (auto& b : indices_up_to(beta, m - alpha.length(a))) {
      all.emplace_back(a, b);
      if (alpha.length(a) + beta.length(b) == m) top.emplace_back(a, b);
    }
  NormalForm nf;
  std::uniform_int_distribution<std::size_t> pick_top(0, top.size() - 1), pick_all(0, all.size() - 1);
  nf.coeffs[top[pick_top(rng)]] = random_nonzero(rng);
  for (int i = 1; i < terms; ++i) {
    auto key = all[pick_all(rng)];
    if (!nf.coeffs.count(key)) nf.coeffs[key] = random_nonzero(rng);
  }
  return nf;
}

/// Random operator sum p_a(x) d^a with |a| <= max_order and coefficients of
/// total degree <= max_degree.
inline PolyDiffOp random_op(std::mt19937_64& rng, std::size_t d, int max_order, int max_degree, int terms) {
  std::uniform_int_distribution<int> ord(0, max_order), deg(0, max_degree), axis(0, static_cast<int>(d) - 1);
  PolyDiffOp p(d);
  for (int t = 0; t < terms; ++t) {
    MultiIndex a(d, 0);
    for (int k = ord(rng); k > 0; --k) ++a[static_cast<std::size_t>(axis(rng))];
    Polynomial c(random_nonzero(rng));
    for (int k = deg(rng); k > 0; --k) c *= Polynomial(xvar(axis(rng) + 1));
    p += PolyDiffOp(d, {{a, c}});
  }
  return p;
}

}  // namespace testsupport
