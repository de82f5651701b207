#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mtbp {

// Arbitrary-precision signed integer, little-endian base 2^32 magnitude.
// Canonical form: no leading zero limbs, and zero is non-negative.
class BigInt {
 public:
  BigInt() = default;
  BigInt(long long v);

  static BigInt from_decimal(std::string_view s);
  std::string to_decimal() const;

  bool is_zero() const { return limbs_.empty(); }
  bool is_odd() const { return !limbs_.empty() && (limbs_[0] & 1u); }
  int sign() const { return limbs_.empty() ? 0 : (neg_ ? -1 : 1); }
  bool negative() const { return neg_; }

  BigInt abs() const;
  BigInt negated() const;

  friend BigInt operator+(const BigInt& a, const BigInt& b);
  friend BigInt operator-(const BigInt& a, const BigInt& b);
  friend BigInt operator*(const BigInt& a, const BigInt& b);
  friend BigInt operator/(const BigInt& a, const BigInt& b);
  friend BigInt operator%(const BigInt& a, const BigInt& b);
  BigInt& operator+=(const BigInt& o) { return *this = *this + o; }
  BigInt& operator-=(const BigInt& o) { return *this = *this - o; }
  BigInt& operator*=(const BigInt& o) { return *this = *this * o; }

  // this += a * b without forcing fresh allocations in the caller.
  void add_mul(const BigInt& a, const BigInt& b);

  // Truncated division: q rounds toward zero, r keeps the sign of a.
  static void divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r);

  static int compare(const BigInt& a, const BigInt& b);
  friend bool operator==(const BigInt& a, const BigInt& b) { return compare(a, b) == 0; }
  friend bool operator!=(const BigInt& a, const BigInt& b) { return compare(a, b) != 0; }
  friend bool operator<(const BigInt& a, const BigInt& b) { return compare(a, b) < 0; }
  friend bool operator<=(const BigInt& a, const BigInt& b) { return compare(a, b) <= 0; }
  friend bool operator>(const BigInt& a, const BigInt& b) { return compare(a, b) > 0; }
  friend bool operator>=(const BigInt& a, const BigInt& b) { return compare(a, b) >= 0; }

  static BigInt gcd(BigInt a, BigInt b);  // non-negative
  static BigInt pow(BigInt base, unsigned long long e);

  BigInt shifted_left(size_t bits) const;
  BigInt shifted_right(size_t bits) const;

  size_t bit_length() const;
  // Saturates to +/-inf when the value exceeds double range.
  double to_double() const;
  // value ~= mantissa * 2^exp with mantissa in [0.5, 1); exact for zero.
  void frexp_approx(double& mantissa, long& exp) const;

  bool fits_int64() const;
  long long to_int64() const;

 private:
  static int compare_abs(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b);
  static void add_abs(std::vector<uint32_t>& acc, const std::vector<uint32_t>& b);
  static void sub_abs(std::vector<uint32_t>& acc, const std::vector<uint32_t>& b);
  static void divmod_abs(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b,
                         std::vector<uint32_t>& q, std::vector<uint32_t>& r);
  void trim();

  std::vector<uint32_t> limbs_;
  bool neg_ = false;
};

// Exact rational: num/den with den > 0 and gcd(|num|, den) = 1.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(long long v) : num_(v), den_(1) {}
  Rational(long long n, long long d);
  Rational(BigInt n, BigInt d);

  // Accepts "p", "-p", "p/q" with optional sign on p.
  static Rational parse(std::string_view s);
  std::string to_string() const;

  const BigInt& num() const { return num_; }
  const BigInt& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_integer() const;
  int sign() const { return num_.sign(); }

  Rational abs() const;
  Rational inverse() const;
  static Rational pow(const Rational& base, unsigned long long e);

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational operator-() const;
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  static int compare(const Rational& a, const Rational& b);
  friend bool operator==(const Rational& a, const Rational& b) { return compare(a, b) == 0; }
  friend bool operator!=(const Rational& a, const Rational& b) { return compare(a, b) != 0; }
  friend bool operator<(const Rational& a, const Rational& b) { return compare(a, b) < 0; }
  friend bool operator<=(const Rational& a, const Rational& b) { return compare(a, b) <= 0; }
  friend bool operator>(const Rational& a, const Rational& b) { return compare(a, b) > 0; }
  friend bool operator>=(const Rational& a, const Rational& b) { return compare(a, b) >= 0; }

  double to_double() const;

 private:
  void normalize();
  BigInt num_, den_;
};

}  // namespace mtbp
