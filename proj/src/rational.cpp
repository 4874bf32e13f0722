#include "reqprio/rational.hpp"

#include <charconv>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace reqprio {
namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) throw std::overflow_error("rational overflow");
  return out;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) throw std::overflow_error("rational overflow");
  return out;
}

std::optional<std::int64_t> parse_int(std::string_view text) {
  std::int64_t value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || first == last) return std::nullopt;
  return value;
}

// Decimal literal [sign] digits [. digits] [e|E [sign] digits].
std::optional<Rational> parse_decimal(std::string_view text) {
  bool negative = false;
  std::size_t i = 0;
  if (i < text.size() && (text[i] == '-' || text[i] == '+')) negative = text[i++] == '-';
  std::int64_t mantissa = 0;
  int exponent = 0;
  bool any_digit = false;
  bool seen_point = false;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (c >= '0' && c <= '9') {
      any_digit = true;
      mantissa = checked_add(checked_mul(mantissa, 10), c - '0');
      if (seen_point) --exponent;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) return std::nullopt;
  if (i < text.size()) {
    if (text[i] != 'e' && text[i] != 'E') return std::nullopt;
    auto exp = parse_int(text.substr(i + 1));
    if (!exp || *exp > 18 || *exp < -18) return std::nullopt;
    exponent += static_cast<int>(*exp);
  }
  std::int64_t scale = 1;
  for (int k = 0; k < std::abs(exponent); ++k) scale = checked_mul(scale, 10);
  if (negative) mantissa = -mantissa;
  return exponent >= 0 ? Rational(checked_mul(mantissa, scale)) : Rational(mantissa, scale);
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  std::int64_t g = std::gcd(num, den);
  if (g == 0) g = 1;
  num_ = num / g;
  den_ = den / g;
}

std::string Rational::to_string() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::optional<Rational> Rational::parse(std::string_view text) {
  try {
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
      auto num = parse_int(text.substr(0, slash));
      auto den = parse_int(text.substr(slash + 1));
      if (!num || !den || *den == 0) return std::nullopt;
      return Rational(*num, *den);
    }
    return parse_decimal(text);
  } catch (const std::overflow_error&) {
    return std::nullopt;
  }
}

std::optional<Rational> Rational::from_double(double value) {
  if (!std::isfinite(value)) return std::nullopt;
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) return std::nullopt;
  return parse(std::string_view(buf, static_cast<std::size_t>(ptr - buf)));
}

Rational Rational::operator+(const Rational& other) const {
  std::int64_t g = std::gcd(den_, other.den_);
  std::int64_t lhs = checked_mul(num_, other.den_ / g);
  std::int64_t rhs = checked_mul(other.num_, den_ / g);
  return Rational(checked_add(lhs, rhs), checked_mul(den_, other.den_ / g));
}

Rational Rational::operator-(const Rational& other) const {
  return *this + Rational(-other.num_, other.den_);
}

Rational Rational::operator*(const Rational& other) const {
  std::int64_t g1 = std::gcd(num_, other.den_);
  std::int64_t g2 = std::gcd(other.num_, den_);
  if (g1 == 0) g1 = 1;
  if (g2 == 0) g2 = 1;
  return Rational(checked_mul(num_ / g1, other.num_ / g2),
                  checked_mul(den_ / g2, other.den_ / g1));
}

std::strong_ordering Rational::operator<=>(const Rational& other) const {
  __int128 lhs = static_cast<__int128>(num_) * other.den_;
  __int128 rhs = static_cast<__int128>(other.num_) * den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace reqprio
