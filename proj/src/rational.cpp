#include "qigraph/rational.hpp"

#include <ostream>
#include <stdexcept>

namespace qigraph {

namespace {

bool is_canonical_integer(std::string_view s, bool allow_sign) {
  if (s.empty()) return false;
  std::size_t i = 0;
  if (s[0] == '-') {
    if (!allow_sign) return false;
    i = 1;
  }
  if (i >= s.size()) return false;
  for (std::size_t j = i; j < s.size(); ++j) {
    if (s[j] < '0' || s[j] > '9') return false;
  }
  // no leading zeros, and no "-0"
  if (s[i] == '0' && (s.size() - i > 1 || i == 1)) return false;
  return true;
}

}  // namespace

Rational::Rational(long n, long d) {
  if (d == 0) throw std::domain_error("zero denominator");
  v_ = mpq_class(n, d);
  v_.canonicalize();
}

Rational::Rational(const mpz_class& n, const mpz_class& d) {
  if (d == 0) throw std::domain_error("zero denominator");
  v_ = mpq_class(n, d);
  v_.canonicalize();
}

Rational Rational::parse(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    if (!is_canonical_integer(text, true))
      throw std::invalid_argument("not a canonical integer: '" + std::string(text) + "'");
    return Rational(mpz_class(std::string(text)));
  }
  const auto ns = text.substr(0, slash);
  const auto ds = text.substr(slash + 1);
  if (!is_canonical_integer(ns, true) || !is_canonical_integer(ds, false))
    throw std::invalid_argument("malformed rational: '" + std::string(text) + "'");
  const mpz_class n(std::string{ns});
  const mpz_class d(std::string{ds});
  if (d == 0) throw std::invalid_argument("zero denominator: '" + std::string(text) + "'");
  if (d == 1) throw std::invalid_argument("integer written with denominator 1: '" + std::string(text) + "'");
  if (n == 0) throw std::invalid_argument("zero written as a fraction: '" + std::string(text) + "'");
  if (qigraph::gcd(n, d) != 1)
    throw std::invalid_argument("rational not in lowest terms: '" + std::string(text) + "'");
  return Rational(n, d);
}

std::string Rational::str() const {
  if (v_.get_den() == 1) return v_.get_num().get_str();
  return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

Rational Rational::inverse() const {
  if (is_zero()) throw std::domain_error("inverse of zero");
  return Rational(mpq_class(1 / v_));
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw std::domain_error("division by zero");
  v_ /= o.v_;
  return *this;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

mpz_class gcd(const mpz_class& a, const mpz_class& b) {
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

mpz_class lcm(const mpz_class& a, const mpz_class& b) {
  mpz_class l;
  mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return l;
}

}  // namespace qigraph
