#include "mclp/rational.hpp"

#include <cctype>

namespace mclp {

Rational::Rational(long num, long den) {
  if (den == 0) throw std::domain_error("zero denominator");
  v_ = mpq_class(num, den);
  v_.canonicalize();
}

Rational::Rational(const mpz_class& num, const mpz_class& den) {
  if (den == 0) throw std::domain_error("zero denominator");
  v_ = mpq_class(num, den);
  v_.canonicalize();
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

namespace {

bool valid_integer(std::string_view s, bool allow_sign) {
  if (s.empty()) return false;
  size_t i = 0;
  if (allow_sign && (s[0] == '-' || s[0] == '+')) i = 1;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

}  // namespace

Rational Rational::parse(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  auto slash = text.find('/');
  std::string_view ns = text.substr(0, slash);
  std::string_view ds = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
  if (!valid_integer(ns, true) || !valid_integer(ds, false))
    throw ParseError("malformed rational '" + std::string(text) + "'");
  std::string n(ns);
  if (n[0] == '+') n.erase(0, 1);
  mpz_class num(n, 10), den(std::string(ds), 10);
  if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
  return Rational(num, den);
}

mpz_class floor(const Rational& r) {
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), r.raw().get_num_mpz_t(), r.raw().get_den_mpz_t());
  return q;
}

mpz_class ceil(const Rational& r) {
  mpz_class q;
  mpz_cdiv_q(q.get_mpz_t(), r.raw().get_num_mpz_t(), r.raw().get_den_mpz_t());
  return q;
}

Rational simplest_between(const Rational& lo, const Rational& hi) {
  if (hi < lo) throw std::invalid_argument("empty interval");
  if (lo.sign() <= 0 && hi.sign() >= 0) return 0;
  if (hi.sign() < 0) return -simplest_between(-hi, -lo);
  const mpz_class c = ceil(lo);
  if (Rational(c, 1) <= hi) return Rational(c, 1);
  const Rational f(floor(lo), 1);
  return f + simplest_between((hi - f).inverse(), (lo - f).inverse()).inverse();
}

}  // namespace mclp
