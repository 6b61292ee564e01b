#include "msat/rational.hpp"

#include <cctype>
#include <stdexcept>
#include <utility>

namespace msat {

namespace {

BigInt pow10(unsigned n) {
  BigInt r = 1;
  for (unsigned i = 0; i < n; ++i) r *= 10;
  return r;
}

}  // namespace

Rational::Rational(const BigInt& num, const BigInt& den) {
  if (den == 0) throw std::domain_error("Rational: zero denominator");
  // the backend reduces but insists on a positive denominator
  if (den < 0) {
    v_ = Rep(-num, -den);
  } else {
    v_ = Rep(num, den);
  }
}

std::optional<Rational> Rational::from_decimal(std::string_view text) {
  std::size_t i = 0;
  const std::size_t n = text.size();
  bool negative = false;
  if (i < n && (text[i] == '-' || text[i] == '+')) {
    negative = text[i] == '-';
    ++i;
  }
  auto take_digits = [&](std::string& out) {
    std::size_t start = i;
    while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) {
      out += text[i++];
    }
    return i > start;
  };
  std::string int_part;
  if (!take_digits(int_part)) return std::nullopt;
  std::string frac_part;
  if (i < n && text[i] == '.') {
    ++i;
    if (!take_digits(frac_part)) return std::nullopt;
  }
  long exponent = 0;
  if (i < n && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool exp_neg = false;
    if (i < n && (text[i] == '-' || text[i] == '+')) {
      exp_neg = text[i] == '-';
      ++i;
    }
    std::string exp_digits;
    if (!take_digits(exp_digits)) return std::nullopt;
    if (exp_digits.size() > 6) return std::nullopt;  // absurd exponent
    exponent = std::stol(exp_digits);
    if (exp_neg) exponent = -exponent;
  }
  if (i != n) return std::nullopt;

  // strip leading zeros: cpp_int's string constructor treats them as octal
  std::string digits = int_part + frac_part;
  const auto first = digits.find_first_not_of('0');
  digits.erase(0, first == std::string::npos ? digits.size() - 1 : first);

  BigInt num(digits);
  BigInt den = pow10(static_cast<unsigned>(frac_part.size()));
  if (exponent > 0) {
    num *= pow10(static_cast<unsigned>(exponent));
  } else if (exponent < 0) {
    den *= pow10(static_cast<unsigned>(-exponent));
  }
  if (negative) num = -num;
  return Rational(num, den);
}

bool Rational::has_finite_decimal() const {
  BigInt d = denominator();
  while (d % 2 == 0) d /= 2;
  while (d % 5 == 0) d /= 5;
  return d == 1;
}

std::string Rational::to_string() const {
  BigInt num = numerator();
  BigInt den = denominator();
  if (den == 1) return num.str();

  // Count the factors of 2 and 5; if anything else remains the expansion
  // does not terminate and we print the plain fraction.
  BigInt d = den;
  unsigned twos = 0, fives = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++twos;
  }
  while (d % 5 == 0) {
    d /= 5;
    ++fives;
  }
  if (d != 1) return num.str() + "/" + den.str();

  const unsigned digits = twos > fives ? twos : fives;
  BigInt scaled = num * pow10(digits) / den;  // exact by construction
  const bool neg = scaled < 0;
  if (neg) scaled = -scaled;
  std::string body = scaled.str();
  if (body.size() <= digits) {
    body.insert(0, digits - body.size() + 1, '0');
  }
  body.insert(body.size() - digits, ".");
  return neg ? "-" + body : body;
}

Rational Rational::operator-() const { return Rational(Rep(-v_)); }

Rational& Rational::operator+=(const Rational& o) {
  v_ += o.v_;
  return *this;
}

Rational& Rational::operator-=(const Rational& o) {
  v_ -= o.v_;
  return *this;
}

Rational& Rational::operator*=(const Rational& o) {
  v_ *= o.v_;
  return *this;
}

std::optional<Rational> Rational::checked_div(const Rational& a,
                                              const Rational& b) {
  if (b.is_zero()) return std::nullopt;
  return Rational(Rep(a.v_ / b.v_));
}

Rational operator/(const Rational& a, const Rational& b) {
  auto r = Rational::checked_div(a, b);
  if (!r) throw std::domain_error("Rational: division by zero");
  return *r;
}

Rational abs(const Rational& r) {
  return r.sign() < 0 ? -r : r;
}

bool answers_equal(const Rational& a, const Rational& b,
                   const Rational& rel_tol) {
  if (a == b) return true;
  if (rel_tol.sign() <= 0) return false;
  const Rational scale = abs(a) > abs(b) ? abs(a) : abs(b);
  return abs(a - b) <= rel_tol * scale;
}

}  // namespace msat
