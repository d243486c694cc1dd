#include "crossfire/rational.h"

#include <cstdlib>
#include <numeric>
#include <stdexcept>

namespace crossfire {

namespace {

using Wide = __int128;

Rational FromWide(Wide num, Wide den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  Wide a = num < 0 ? -num : num;
  Wide b = den;
  while (b != 0) {
    const Wide t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    num /= a;
    den /= a;
  }
  return Rational(static_cast<int64_t>(num), static_cast<int64_t>(den));
}

}  // namespace

Rational::Rational(int64_t num, int64_t den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const int64_t g = std::gcd(num, den);
  num_ = g > 1 ? num / g : num;
  den_ = g > 1 ? den / g : den;
}

Rational Rational::operator+(const Rational& o) const {
  return FromWide(Wide(num_) * o.den_ + Wide(o.num_) * den_,
                  Wide(den_) * o.den_);
}

Rational Rational::operator*(const Rational& o) const {
  return FromWide(Wide(num_) * o.num_, Wide(den_) * o.den_);
}

Rational Rational::operator/(const Rational& o) const {
  return FromWide(Wide(num_) * o.den_, Wide(den_) * o.num_);
}

std::strong_ordering Rational::operator<=>(const Rational& o) const {
  const Wide lhs = Wide(num_) * o.den_;
  const Wide rhs = Wide(o.num_) * den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::string Rational::ToFixed(int digits) const {
  Wide scale = 1;
  for (int i = 0; i < digits; ++i) scale *= 10;
  const bool negative = num_ < 0;
  const Wide magnitude = negative ? -Wide(num_) : Wide(num_);
  // round(magnitude * scale / den) with ties going up.
  const Wide scaled = (2 * magnitude * scale + den_) / (2 * Wide(den_));
  const Wide whole = scaled / scale;
  Wide frac = scaled % scale;

  std::string out = negative && scaled != 0 ? "-" : "";
  out += std::to_string(static_cast<long long>(whole));
  if (digits > 0) {
    std::string f(digits, '0');
    for (int i = digits - 1; i >= 0; --i) {
      f[i] = static_cast<char>('0' + static_cast<int>(frac % 10));
      frac /= 10;
    }
    out += "." + f;
  }
  return out;
}

std::string Rational::ToString() const {
  return std::to_string(num_) + "/" + std::to_string(den_);
}

}  // namespace crossfire
