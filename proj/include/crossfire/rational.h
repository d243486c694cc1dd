#ifndef CROSSFIRE_RATIONAL_H_
#define CROSSFIRE_RATIONAL_H_

#include <compare>
#include <cstdint>
#include <string>

namespace crossfire {

// Exact non-negative-denominator fraction, always kept in lowest terms.
// Crossfire factors and averaged counts are carried this way so rounding
// happens only when a number is rendered.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(int64_t num, int64_t den);
  static Rational Integer(int64_t n) { return Rational(n, 1); }

  int64_t num() const { return num_; }
  int64_t den() const { return den_; }
  double ToDouble() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  Rational operator+(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  Rational operator/(const Rational& o) const;

  bool operator==(const Rational& o) const = default;
  std::strong_ordering operator<=>(const Rational& o) const;

  // Decimal rendering with `digits` fractional digits, rounding half up
  // (away from zero for the magnitude). "1.3" for 36/27 with digits = 1.
  std::string ToFixed(int digits) const;
  // "36/27" form, reduced: "4/3".
  std::string ToString() const;

 private:
  int64_t num_ = 0;
  int64_t den_ = 1;
};

}  // namespace crossfire

#endif  // CROSSFIRE_RATIONAL_H_
