#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace reqprio {

/// Exact rational number with a normalized positive denominator. Used for
/// constraint weights and violation costs so that optimal-cost ties are
/// compared exactly. Arithmetic throws std::overflow_error instead of wrapping.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t value) : num_(value) {}  // NOLINT(implicit)
  Rational(std::int64_t num, std::int64_t den);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  bool is_integer() const noexcept { return den_ == 1; }
  double to_double() const noexcept {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  /// "7" for integers, "3/2" otherwise.
  std::string to_string() const;

  /// Accepts "7", "-3/2", and decimal literals such as "0.25" or "1e-3".
  static std::optional<Rational> parse(std::string_view text);

  /// Exact value of the shortest decimal representation of `value`, so that
  /// 0.1 becomes 1/10 rather than its binary expansion.
  static std::optional<Rational> from_double(double value);

  Rational operator+(const Rational& other) const;
  Rational operator-(const Rational& other) const;
  Rational operator*(const Rational& other) const;
  Rational& operator+=(const Rational& other) { return *this = *this + other; }

  friend bool operator==(const Rational&, const Rational&) = default;
  std::strong_ordering operator<=>(const Rational& other) const;

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

}  // namespace reqprio
