#pragma once

// Exact rational arithmetic for equation construction, program execution and
// answer scoring. Values are kept in lowest terms with a positive
// denominator; arbitrary-precision integers back both components so chained
// multiplications in untrusted prediction programs cannot overflow.

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace msat {

using BigInt = boost::multiprecision::cpp_int;

class Rational {
 public:
  Rational() : v_(0) {}
  Rational(long long n) : v_(n) {}  // NOLINT: implicit by design
  explicit Rational(const BigInt& n) : v_(n) {}
  Rational(const BigInt& num, const BigInt& den);  // throws on den == 0

  // Parses a decimal literal: optional sign, digits, optional fraction,
  // optional exponent ("-12.5", "3e-4"). Returns nullopt on anything else.
  static std::optional<Rational> from_decimal(std::string_view text);

  BigInt numerator() const { return boost::multiprecision::numerator(v_); }
  BigInt denominator() const { return boost::multiprecision::denominator(v_); }

  bool is_integer() const { return denominator() == 1; }
  bool is_zero() const { return v_.is_zero(); }
  int sign() const { return v_.sign(); }

  // True when the value has a terminating decimal expansion, i.e. the
  // reduced denominator is of the form 2^a * 5^b.
  bool has_finite_decimal() const;

  // "42", "-3.5", "0.125"; falls back to "num/den" when the expansion does
  // not terminate (e.g. "1/3").
  std::string to_string() const;

  Rational operator-() const;
  Rational& operator+=(const Rational& o);
  Rational& operator-=(const Rational& o);
  Rational& operator*=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }

  // Division is fallible; the interpreter turns nullopt into DIV_BY_ZERO.
  static std::optional<Rational> checked_div(const Rational& a,
                                             const Rational& b);
  // Convenience for contexts where zero divisors are impossible; throws
  // std::domain_error otherwise.
  friend Rational operator/(const Rational& a, const Rational& b);

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.v_ == b.v_;
  }
  friend std::strong_ordering operator<=>(const Rational& a,
                                          const Rational& b) {
    if (a.v_ < b.v_) return std::strong_ordering::less;
    if (a.v_ > b.v_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  friend Rational abs(const Rational& r);

 private:
  using Rep = boost::multiprecision::cpp_rational;
  explicit Rational(Rep v) : v_(std::move(v)) {}
  Rep v_;
};

// True iff a == b exactly, or |a - b| <= rel_tol * max(|a|, |b|) when
// rel_tol > 0.
bool answers_equal(const Rational& a, const Rational& b,
                   const Rational& rel_tol);

}  // namespace msat
