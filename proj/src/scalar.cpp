#include "gradedcalc/scalar.hpp"

#include <sstream>
#include <stdexcept>

namespace gradedcalc {

Gaussian& Gaussian::operator/=(const Gaussian& o) {
  if (o.is_zero()) throw std::domain_error("Gaussian: division by zero");
  if (o.is_real()) {
    re_ /= o.re_;
    im_ /= o.re_;
    return *this;
  }
  Rational n = o.re_ * o.re_ + o.im_ * o.im_;
  *this *= o.conj();
  re_ /= n;
  im_ /= n;
  return *this;
}

std::string Gaussian::str() const {
  std::ostringstream os;
  os << *this;
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Gaussian& g) {
  if (g.is_real()) return os << g.re();
  if (sgn(g.re()) == 0) {
    if (g.im() == 1) return os << "i";
    if (g.im() == -1) return os << "-i";
    return os << g.im() << "*i";
  }
  os << "(" << g.re();
  if (sgn(g.im()) > 0)
    os << "+";
  else
    os << "-";
  Rational a = abs(g.im());
  if (a != 1) os << a << "*";
  return os << "i)";
}

Gaussian minus_i_pow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return Gaussian(1);
    case 1: return Gaussian(Rational(0), Rational(-1));
    case 2: return Gaussian(-1);
    default: return Gaussian(Rational(0), Rational(1));
  }
}

Gaussian pow_gauss(Gaussian g, int k) {
  Gaussian r(1);
  while (k > 0) {
    if (k & 1) r *= g;
    k >>= 1;
    if (k) g *= g;
  }
  return r;
}

Rational factorial(int k) {
  mpz_class f = 1;
  for (int j = 2; j <= k; ++j) f *= j;
  return Rational(f);
}

Rational binomial(int n, int k) {
  if (k < 0 || k > n) return Rational(0);
  mpz_class b;
  mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return Rational(b);
}

Rational parse_rational(const std::string& text) {
  Rational q;
  if (text.empty() || q.set_str(text, 10) != 0)
    throw std::invalid_argument("not a rational literal: '" + text + "'");
  if (q.get_den() == 0) throw std::invalid_argument("zero denominator: '" + text + "'");
  q.canonicalize();
  return q;
}

}  // namespace gradedcalc
