#include <doctest.h>

#include <limits>
#include <stdexcept>

#include "reqprio/rational.hpp"

using reqprio::Rational;

TEST_SUITE("rational") {

TEST_CASE("normalizes sign and common factors") {
  CHECK(Rational(6, 4) == Rational(3, 2));
  CHECK(Rational(3, -6) == Rational(-1, 2));
  CHECK(Rational(0, 7) == Rational(0));
  CHECK(Rational(6, 3).is_integer());
  CHECK_THROWS(Rational(1, 0));
}

TEST_CASE("formats integers plainly and fractions as p/q") {
  CHECK(Rational(7).to_string() == "7");
  CHECK(Rational(3, 2).to_string() == "3/2");
  CHECK(Rational(-1, 3).to_string() == "-1/3");
}

TEST_CASE("parses fractions and decimals exactly") {
  CHECK(Rational::parse("3/2") == Rational(3, 2));
  CHECK(Rational::parse("-4/6") == Rational(-2, 3));
  CHECK(Rational::parse("0.25") == Rational(1, 4));
  CHECK(Rational::parse("1e-3") == Rational(1, 1000));
  CHECK(Rational::parse("2.5E1") == Rational(25));
  CHECK_FALSE(Rational::parse("").has_value());
  CHECK_FALSE(Rational::parse("1/0").has_value());
  CHECK_FALSE(Rational::parse("abc").has_value());
  CHECK_FALSE(Rational::parse("1/2/3").has_value());
}

TEST_CASE("from_double uses the shortest decimal form") {
  CHECK(Rational::from_double(0.1) == Rational(1, 10));
  CHECK(Rational::from_double(2.0) == Rational(2));
  CHECK_FALSE(Rational::from_double(std::numeric_limits<double>::infinity()).has_value());
}

TEST_CASE("arithmetic and ordering") {
  CHECK(Rational(1, 2) + Rational(1, 3) == Rational(5, 6));
  CHECK(Rational(1, 2) - Rational(1, 3) == Rational(1, 6));
  CHECK(Rational(2, 3) * Rational(3, 4) == Rational(1, 2));
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(Rational(-1, 2) < Rational(0));
  CHECK(Rational(2, 4) == Rational(1, 2));
}

TEST_CASE("overflow throws instead of wrapping") {
  const Rational big(std::numeric_limits<std::int64_t>::max());
  CHECK_THROWS_AS(big + Rational(1), std::overflow_error);
  CHECK_THROWS_AS(big * Rational(2), std::overflow_error);
}

}
