#include <doctest.h>

#include "msat/rational.hpp"
#include "msat/rng.hpp"

using msat::BigInt;
using msat::Rational;

TEST_CASE("from_decimal parses plain and signed decimals") {
  CHECK(*Rational::from_decimal("12") == Rational(12));
  CHECK(*Rational::from_decimal("007") == Rational(7));
  CHECK(*Rational::from_decimal("3.50") == Rational(7, 2));
  CHECK(*Rational::from_decimal("-0.25") == Rational(-1, 4));
  CHECK(*Rational::from_decimal("+4") == Rational(4));
  CHECK(*Rational::from_decimal("0") == Rational(0));
}

TEST_CASE("from_decimal parses exponents") {
  CHECK(*Rational::from_decimal("1e-4") == Rational(1, 10000));
  CHECK(*Rational::from_decimal("2.5e+3") == Rational(2500));
  CHECK(*Rational::from_decimal("1E2") == Rational(100));
}

TEST_CASE("from_decimal rejects junk") {
  CHECK_FALSE(Rational::from_decimal("").has_value());
  CHECK_FALSE(Rational::from_decimal("2.").has_value());
  CHECK_FALSE(Rational::from_decimal(".5").has_value());
  CHECK_FALSE(Rational::from_decimal("abc").has_value());
  CHECK_FALSE(Rational::from_decimal("--1").has_value());
  CHECK_FALSE(Rational::from_decimal("1.2.3").has_value());
  CHECK_FALSE(Rational::from_decimal("1e").has_value());
}

TEST_CASE("stored in lowest terms with positive denominator") {
  const Rational r(BigInt(6), BigInt(-8));
  CHECK(r.numerator() == -3);
  CHECK(r.denominator() == 4);
  CHECK_THROWS_AS(Rational(BigInt(1), BigInt(0)), std::domain_error);
}

TEST_CASE("to_string renders terminating expansions exactly") {
  CHECK(Rational(0).to_string() == "0");
  CHECK(Rational(42).to_string() == "42");
  CHECK(Rational(-17).to_string() == "-17");
  CHECK(Rational(7, 2).to_string() == "3.5");
  CHECK(Rational(1, 8).to_string() == "0.125");
  CHECK(Rational(-1, 4).to_string() == "-0.25");
  CHECK(Rational(1, 3).to_string() == "1/3");
  CHECK(Rational(-22, 7).to_string() == "-22/7");
}

TEST_CASE("to_string round-trips through from_decimal") {
  CHECK(*Rational::from_decimal(Rational(7, 2).to_string()) == Rational(7, 2));
  CHECK(*Rational::from_decimal(Rational(123, 1000).to_string()) ==
        Rational(123, 1000));
}

TEST_CASE("has_finite_decimal") {
  CHECK(Rational(5).has_finite_decimal());
  CHECK(Rational(1, 2).has_finite_decimal());
  CHECK(Rational(3, 40).has_finite_decimal());
  CHECK_FALSE(Rational(1, 3).has_finite_decimal());
  CHECK_FALSE(Rational(5, 6).has_finite_decimal());
}

TEST_CASE("checked division") {
  CHECK(*Rational::checked_div(Rational(3), Rational(2)) == Rational(3, 2));
  CHECK_FALSE(Rational::checked_div(Rational(3), Rational(0)).has_value());
  CHECK_THROWS_AS(Rational(1) / Rational(0), std::domain_error);
}

TEST_CASE("field identities hold on random values") {
  msat::rng::Rng rng(20240617);
  auto random_rational = [&rng] {
    const long long num = rng.range(-1'000'000'000, 1'000'000'000);
    const long long den = rng.range(1, 1'000'000);
    return Rational(BigInt(num), BigInt(den));
  };
  for (int i = 0; i < 200; ++i) {
    const Rational a = random_rational();
    const Rational b = random_rational();
    const Rational c = random_rational();
    CHECK(a * (b + c) == a * b + a * c);
    CHECK((a + b) + c == a + (b + c));
    CHECK(a + Rational(0) == a);
    CHECK(a * Rational(1) == a);
    CHECK(a - a == Rational(0));
    if (!b.is_zero()) {
      CHECK((a / b) * b == a);
    }
  }
}

TEST_CASE("answers_equal") {
  CHECK(answers_equal(Rational(2), Rational(2), Rational(0)));
  CHECK_FALSE(answers_equal(Rational(2), Rational(3), Rational(0)));
  // 1/3 vs 0.3333 within 1e-3 relative tolerance
  CHECK(answers_equal(Rational(1, 3), *Rational::from_decimal("0.3333"),
                      Rational(1, 1000)));
  CHECK_FALSE(answers_equal(Rational(1, 3), *Rational::from_decimal("0.3333"),
                            Rational(1, 1'000'000)));
  // symmetric
  CHECK(answers_equal(*Rational::from_decimal("0.3333"), Rational(1, 3),
                      Rational(1, 1000)));
  // zero tolerance means exact only
  CHECK_FALSE(answers_equal(Rational(0), Rational(1, 1'000'000), Rational(0)));
}
