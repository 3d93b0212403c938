#ifndef SUPPSIZE_RATIONAL_HPP
#define SUPPSIZE_RATIONAL_HPP

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace suppsize {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

namespace detail {

// Quotient num/den scaled so that it carries 62..64 significant bits.
// Returns the integer part and the binary exponent such that
// num/den ~= q * 2^-shift. A set low bit marks a non-zero remainder, which
// makes the later conversion to double correctly rounded.
struct ScaledQuotient {
  std::uint64_t q;
  std::int64_t shift;
};

inline ScaledQuotient scaled_quotient(const BigInt& num, const BigInt& den) {
  using boost::multiprecision::msb;
  const auto ea = static_cast<std::int64_t>(msb(num));
  const auto eb = static_cast<std::int64_t>(msb(den));
  const std::int64_t shift = 62 - (ea - eb);
  BigInt q, rem;
  if (shift >= 0) {
    divide_qr(BigInt(num << static_cast<unsigned>(shift)), den, q, rem);
  } else {
    divide_qr(num, BigInt(den << static_cast<unsigned>(-shift)), q, rem);
  }
  auto qi = q.convert_to<std::uint64_t>();
  if (rem != 0) qi |= 1u;
  return {qi, shift};
}

inline double ratio_to_double(BigInt num, BigInt den) {
  if (den == 0) throw std::domain_error("ratio_to_double: zero denominator");
  if (num == 0) return 0.0;
  const int sign = (num < 0) != (den < 0) ? -1 : 1;
  num = abs(num);
  den = abs(den);
  const auto sq = scaled_quotient(num, den);
  if (sq.shift > 2000) return sign * 0.0;
  if (sq.shift < -2000) return sign * std::numeric_limits<double>::infinity();
  return sign * std::ldexp(static_cast<double>(sq.q), static_cast<int>(-sq.shift));
}

inline double ratio_log_abs(BigInt num, BigInt den) {
  if (num == 0) return -std::numeric_limits<double>::infinity();
  num = abs(num);
  den = abs(den);
  const auto sq = scaled_quotient(num, den);
  return std::log(static_cast<double>(sq.q)) -
         static_cast<double>(sq.shift) * std::numbers::ln2;
}

}  // namespace detail

inline double to_double(const BigInt& x) { return detail::ratio_to_double(x, BigInt(1)); }

inline double to_double(const Rational& x) {
  return detail::ratio_to_double(numerator(x), denominator(x));
}

// Natural log of |x|; finite for any non-zero size.
inline double log_abs(const BigInt& x) { return detail::ratio_log_abs(x, BigInt(1)); }

inline double log_abs(const Rational& x) {
  return detail::ratio_log_abs(numerator(x), denominator(x));
}

// Exact value of a finite double.
inline Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw std::domain_error("rational_from_double: non-finite value");
  if (x == 0.0) return Rational(0);
  int exp = 0;
  const double frac = std::frexp(x, &exp);  // x = frac * 2^exp, 0.5 <= |frac| < 1
  const auto mant = static_cast<std::int64_t>(std::ldexp(frac, 53));
  exp -= 53;
  BigInt num(mant);
  if (exp >= 0) return Rational(BigInt(num << exp));
  return Rational(num, BigInt(1) << static_cast<unsigned>(-exp));
}

inline BigInt pow10(unsigned k) { return boost::multiprecision::pow(BigInt(10), k); }

inline Rational ipow(const Rational& x, unsigned k) {
  return Rational(boost::multiprecision::pow(numerator(x), k), boost::multiprecision::pow(denominator(x), k));
}

inline BigInt floor(const Rational& x) {
  BigInt q, r;
  divide_qr(numerator(x), denominator(x), q, r);
  if (r < 0) --q;
  return q;
}

inline BigInt ceil(const Rational& x) {
  BigInt q, r;
  divide_qr(numerator(x), denominator(x), q, r);
  if (r > 0) ++q;
  return q;
}

// Accepts "p", "p/q", and decimals with an optional exponent ("0.3", "-1.5e-3").
inline Rational parse_rational(std::string_view s) {
  auto fail = [&] { return std::invalid_argument("not a number: '" + std::string(s) + "'"); };
  if (s.empty()) throw fail();
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    const Rational p = parse_rational(s.substr(0, slash));
    const Rational q = parse_rational(s.substr(slash + 1));
    if (q == 0) throw std::invalid_argument("zero denominator in '" + std::string(s) + "'");
    return p / q;
  }
  std::size_t i = 0;
  bool negative = false;
  if (s[i] == '+' || s[i] == '-') negative = s[i++] == '-';
  BigInt digits = 0;
  long scale = 0;
  bool any = false, dot = false;
  for (; i < s.size(); ++i) {
    const char c = s[i];
    if (c >= '0' && c <= '9') {
      digits = digits * 10 + (c - '0');
      any = true;
      if (dot) --scale;
    } else if (c == '.' && !dot) {
      dot = true;
    } else {
      break;
    }
  }
  if (!any) throw fail();
  if (i < s.size()) {
    if (s[i] != 'e' && s[i] != 'E') throw fail();
    ++i;
    bool eneg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) eneg = s[i++] == '-';
    if (i == s.size()) throw fail();
    long e = 0;
    for (; i < s.size(); ++i) {
      if (s[i] < '0' || s[i] > '9' || e > 100000) throw fail();
      e = e * 10 + (s[i] - '0');
    }
    scale += eneg ? -e : e;
  }
  Rational value(digits);
  if (scale > 0) value *= pow10(static_cast<unsigned>(scale));
  if (scale < 0) value /= pow10(static_cast<unsigned>(-scale));
  return negative ? Rational(-value) : value;
}

// "p" for integers, "p/q" otherwise. parse_rational reads it back exactly.
inline std::string to_string(const Rational& x) {
  if (denominator(x) == 1) return numerator(x).str();
  return numerator(x).str() + "/" + denominator(x).str();
}

}  // namespace suppsize

#endif  // SUPPSIZE_RATIONAL_HPP
