#include "mtbp/rational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mtbp {

namespace {
constexpr uint64_t kBase = 1ull << 32;
}

BigInt::BigInt(long long v) {
  neg_ = v < 0;
  // Avoid overflow on LLONG_MIN by widening through unsigned.
  uint64_t m = neg_ ? ~static_cast<uint64_t>(v) + 1 : static_cast<uint64_t>(v);
  if (m != 0) limbs_.push_back(static_cast<uint32_t>(m & 0xffffffffu));
  if (m >> 32) limbs_.push_back(static_cast<uint32_t>(m >> 32));
}

void BigInt::trim() {
  while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
  if (limbs_.empty()) neg_ = false;
}

int BigInt::compare_abs(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (size_t i = a.size(); i-- > 0;) {
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  }
  return 0;
}

void BigInt::add_abs(std::vector<uint32_t>& acc, const std::vector<uint32_t>& b) {
  if (acc.size() < b.size()) acc.resize(b.size(), 0);
  uint64_t carry = 0;
  for (size_t i = 0; i < acc.size(); ++i) {
    uint64_t s = carry + acc[i] + (i < b.size() ? b[i] : 0);
    acc[i] = static_cast<uint32_t>(s);
    carry = s >> 32;
    if (carry == 0 && i >= b.size()) return;
  }
  if (carry) acc.push_back(static_cast<uint32_t>(carry));
}

// Requires |acc| >= |b|.
void BigInt::sub_abs(std::vector<uint32_t>& acc, const std::vector<uint32_t>& b) {
  int64_t borrow = 0;
  for (size_t i = 0; i < acc.size(); ++i) {
    int64_t s = static_cast<int64_t>(acc[i]) - borrow - (i < b.size() ? b[i] : 0);
    borrow = 0;
    if (s < 0) {
      s += static_cast<int64_t>(kBase);
      borrow = 1;
    }
    acc[i] = static_cast<uint32_t>(s);
    if (borrow == 0 && i >= b.size()) break;
  }
  while (!acc.empty() && acc.back() == 0) acc.pop_back();
}

BigInt BigInt::abs() const {
  BigInt r = *this;
  r.neg_ = false;
  return r;
}

BigInt BigInt::negated() const {
  BigInt r = *this;
  if (!r.limbs_.empty()) r.neg_ = !r.neg_;
  return r;
}

int BigInt::compare(const BigInt& a, const BigInt& b) {
  if (a.neg_ != b.neg_) return a.neg_ ? -1 : 1;
  int c = compare_abs(a.limbs_, b.limbs_);
  return a.neg_ ? -c : c;
}

BigInt operator+(const BigInt& a, const BigInt& b) {
  BigInt r;
  if (a.neg_ == b.neg_) {
    r.limbs_ = a.limbs_;
    BigInt::add_abs(r.limbs_, b.limbs_);
    r.neg_ = a.neg_;
  } else {
    int c = BigInt::compare_abs(a.limbs_, b.limbs_);
    if (c == 0) return BigInt();
    const BigInt& big = c > 0 ? a : b;
    const BigInt& small = c > 0 ? b : a;
    r.limbs_ = big.limbs_;
    BigInt::sub_abs(r.limbs_, small.limbs_);
    r.neg_ = big.neg_;
  }
  r.trim();
  return r;
}

BigInt operator-(const BigInt& a, const BigInt& b) { return a + b.negated(); }

BigInt operator*(const BigInt& a, const BigInt& b) {
  BigInt r;
  if (a.is_zero() || b.is_zero()) return r;
  r.limbs_.assign(a.limbs_.size() + b.limbs_.size(), 0);
  for (size_t i = 0; i < a.limbs_.size(); ++i) {
    uint64_t carry = 0;
    uint64_t ai = a.limbs_[i];
    for (size_t j = 0; j < b.limbs_.size(); ++j) {
      uint64_t cur = r.limbs_[i + j] + ai * b.limbs_[j] + carry;
      r.limbs_[i + j] = static_cast<uint32_t>(cur);
      carry = cur >> 32;
    }
    size_t k = i + b.limbs_.size();
    while (carry) {
      uint64_t cur = r.limbs_[k] + carry;
      r.limbs_[k] = static_cast<uint32_t>(cur);
      carry = cur >> 32;
      ++k;
    }
  }
  r.neg_ = a.neg_ != b.neg_;
  r.trim();
  return r;
}

void BigInt::add_mul(const BigInt& a, const BigInt& b) {
  if (a.is_zero() || b.is_zero()) return;
  if (a.neg_ != b.neg_) {
    *this = *this - a.abs() * b.abs();
    return;
  }
  if (neg_) {
    *this = *this + a * b;
    return;
  }
  // Non-negative accumulator, non-negative product: fused in place.
  size_t need = a.limbs_.size() + b.limbs_.size() + 1;
  if (limbs_.size() < need) limbs_.resize(need, 0);
  for (size_t i = 0; i < a.limbs_.size(); ++i) {
    uint64_t carry = 0;
    uint64_t ai = a.limbs_[i];
    for (size_t j = 0; j < b.limbs_.size(); ++j) {
      uint64_t cur = limbs_[i + j] + ai * b.limbs_[j] + carry;
      limbs_[i + j] = static_cast<uint32_t>(cur);
      carry = cur >> 32;
    }
    size_t k = i + b.limbs_.size();
    while (carry) {
      uint64_t cur = limbs_[k] + carry;
      limbs_[k] = static_cast<uint32_t>(cur);
      carry = cur >> 32;
      ++k;
    }
  }
  trim();
}

// Knuth algorithm D on 32-bit limbs with 64-bit intermediates.
void BigInt::divmod_abs(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b,
                        std::vector<uint32_t>& q, std::vector<uint32_t>& r) {
  q.clear();
  r.clear();
  if (b.empty()) throw std::domain_error("BigInt division by zero");
  if (compare_abs(a, b) < 0) {
    r = a;
    return;
  }
  if (b.size() == 1) {
    uint64_t d = b[0];
    q.assign(a.size(), 0);
    uint64_t rem = 0;
    for (size_t i = a.size(); i-- > 0;) {
      uint64_t cur = (rem << 32) | a[i];
      q[i] = static_cast<uint32_t>(cur / d);
      rem = cur % d;
    }
    while (!q.empty() && q.back() == 0) q.pop_back();
    if (rem) r.push_back(static_cast<uint32_t>(rem));
    return;
  }

  // Normalize so the top divisor limb has its high bit set.
  int shift = 0;
  for (uint32_t top = b.back(); !(top & 0x80000000u); top <<= 1) ++shift;
  size_t n = b.size(), m = a.size() - n;
  std::vector<uint32_t> u(a.size() + 1, 0), v(n, 0);
  for (size_t i = a.size(); i-- > 0;) {
    u[i] = a[i] << shift;
    if (shift && i > 0) u[i] |= static_cast<uint32_t>(static_cast<uint64_t>(a[i - 1]) >> (32 - shift));
  }
  u[a.size()] = shift ? static_cast<uint32_t>(static_cast<uint64_t>(a.back()) >> (32 - shift)) : 0;
  for (size_t i = n; i-- > 0;) {
    v[i] = b[i] << shift;
    if (shift && i > 0) v[i] |= static_cast<uint32_t>(static_cast<uint64_t>(b[i - 1]) >> (32 - shift));
  }

  q.assign(m + 1, 0);
  const uint64_t vtop = v[n - 1], vsecond = v[n - 2];
  for (size_t j = m + 1; j-- > 0;) {
    uint64_t numer = (static_cast<uint64_t>(u[j + n]) << 32) | u[j + n - 1];
    uint64_t qhat = numer / vtop;
    uint64_t rhat = numer % vtop;
    while (qhat >= kBase || qhat * vsecond > ((rhat << 32) | u[j + n - 2])) {
      --qhat;
      rhat += vtop;
      if (rhat >= kBase) break;
    }
    // Multiply-subtract qhat * v from u[j .. j+n].
    int64_t borrow = 0;
    uint64_t carry = 0;
    for (size_t i = 0; i < n; ++i) {
      uint64_t p = qhat * v[i] + carry;
      carry = p >> 32;
      int64_t t = static_cast<int64_t>(u[i + j]) - static_cast<int64_t>(p & 0xffffffffu) - borrow;
      borrow = 0;
      if (t < 0) {
        t += static_cast<int64_t>(kBase);
        borrow = 1;
      }
      u[i + j] = static_cast<uint32_t>(t);
    }
    int64_t t = static_cast<int64_t>(u[j + n]) - static_cast<int64_t>(carry) - borrow;
    if (t < 0) {
      // qhat was one too large: add v back once.
      t += static_cast<int64_t>(kBase);
      --qhat;
      uint64_t c = 0;
      for (size_t i = 0; i < n; ++i) {
        uint64_t s = static_cast<uint64_t>(u[i + j]) + v[i] + c;
        u[i + j] = static_cast<uint32_t>(s);
        c = s >> 32;
      }
      t += static_cast<int64_t>(c);
      t &= static_cast<int64_t>(kBase) - 1;
    }
    u[j + n] = static_cast<uint32_t>(t);
    q[j] = static_cast<uint32_t>(qhat);
  }
  while (!q.empty() && q.back() == 0) q.pop_back();
  r.assign(n, 0);
  for (size_t i = n; i-- > 0;) {
    r[i] = u[i] >> shift;
    if (shift && i + 1 < n + 1) r[i] |= static_cast<uint32_t>(static_cast<uint64_t>(u[i + 1]) << (32 - shift));
  }
  while (!r.empty() && r.back() == 0) r.pop_back();
}

void BigInt::divmod(const BigInt& a, const BigInt& b, BigInt& q, BigInt& r) {
  std::vector<uint32_t> qq, rr;
  divmod_abs(a.limbs_, b.limbs_, qq, rr);
  q.limbs_ = std::move(qq);
  r.limbs_ = std::move(rr);
  q.neg_ = a.neg_ != b.neg_;
  r.neg_ = a.neg_;
  q.trim();
  r.trim();
}

BigInt operator/(const BigInt& a, const BigInt& b) {
  BigInt q, r;
  BigInt::divmod(a, b, q, r);
  return q;
}

BigInt operator%(const BigInt& a, const BigInt& b) {
  BigInt q, r;
  BigInt::divmod(a, b, q, r);
  return r;
}

BigInt BigInt::gcd(BigInt a, BigInt b) {
  a.neg_ = false;
  b.neg_ = false;
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  // Binary GCD: strip common powers of two, then subtract-and-shift.
  auto trailing_zeros = [](const BigInt& x) {
    size_t tz = 0;
    for (uint32_t limb : x.limbs_) {
      if (limb == 0) {
        tz += 32;
      } else {
        tz += static_cast<size_t>(__builtin_ctz(limb));
        break;
      }
    }
    return tz;
  };
  size_t sa = trailing_zeros(a), sb = trailing_zeros(b);
  size_t common = std::min(sa, sb);
  a = a.shifted_right(sa);
  b = b.shifted_right(sb);
  while (true) {
    int c = compare_abs(a.limbs_, b.limbs_);
    if (c == 0) break;
    if (c < 0) std::swap(a, b);
    sub_abs(a.limbs_, b.limbs_);
    a.trim();
    if (a.is_zero()) {
      a = b;
      break;
    }
    a = a.shifted_right(trailing_zeros(a));
  }
  return a.shifted_left(common);
}

BigInt BigInt::pow(BigInt base, unsigned long long e) {
  BigInt result(1);
  while (e) {
    if (e & 1ull) result *= base;
    e >>= 1;
    if (e) base *= base;
  }
  return result;
}

BigInt BigInt::shifted_left(size_t bits) const {
  if (is_zero() || bits == 0) return *this;
  size_t words = bits / 32, rem = bits % 32;
  BigInt r;
  r.neg_ = neg_;
  r.limbs_.assign(limbs_.size() + words + 1, 0);
  for (size_t i = 0; i < limbs_.size(); ++i) {
    uint64_t v = static_cast<uint64_t>(limbs_[i]) << rem;
    r.limbs_[i + words] |= static_cast<uint32_t>(v);
    r.limbs_[i + words + 1] |= static_cast<uint32_t>(v >> 32);
  }
  r.trim();
  return r;
}

BigInt BigInt::shifted_right(size_t bits) const {
  size_t words = bits / 32, rem = bits % 32;
  if (words >= limbs_.size()) return BigInt();
  BigInt r;
  r.neg_ = neg_;
  r.limbs_.assign(limbs_.size() - words, 0);
  for (size_t i = 0; i < r.limbs_.size(); ++i) {
    uint64_t v = limbs_[i + words] >> rem;
    if (rem && i + words + 1 < limbs_.size())
      v |= static_cast<uint64_t>(limbs_[i + words + 1]) << (32 - rem);
    r.limbs_[i] = static_cast<uint32_t>(v);
  }
  r.trim();
  return r;
}

size_t BigInt::bit_length() const {
  if (limbs_.empty()) return 0;
  uint32_t top = limbs_.back();
  size_t bits = 32 - static_cast<size_t>(__builtin_clz(top));
  return (limbs_.size() - 1) * 32 + bits;
}

void BigInt::frexp_approx(double& mantissa, long& exp) const {
  if (is_zero()) {
    mantissa = 0.0;
    exp = 0;
    return;
  }
  size_t bl = bit_length();
  // Top 64 bits of the magnitude as an integer.
  uint64_t top = 0;
  size_t take = std::min<size_t>(bl, 64);
  for (size_t k = 0; k < take; ++k) {
    size_t bit = bl - 1 - k;
    uint32_t limb = limbs_[bit / 32];
    top = (top << 1) | ((limb >> (bit % 32)) & 1u);
  }
  mantissa = std::ldexp(static_cast<double>(top), -static_cast<int>(take));
  if (neg_) mantissa = -mantissa;
  exp = static_cast<long>(bl);
}

double BigInt::to_double() const {
  double m;
  long e;
  frexp_approx(m, e);
  if (e > std::numeric_limits<double>::max_exponent)
    return neg_ ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
  return std::ldexp(m, static_cast<int>(e));
}

bool BigInt::fits_int64() const {
  if (limbs_.size() > 2) return false;
  if (limbs_.size() < 2) return true;
  uint64_t m = (static_cast<uint64_t>(limbs_[1]) << 32) | limbs_[0];
  return neg_ ? m <= (1ull << 63) : m < (1ull << 63);
}

long long BigInt::to_int64() const {
  if (!fits_int64()) throw std::overflow_error("BigInt does not fit in int64");
  uint64_t m = 0;
  if (!limbs_.empty()) m = limbs_[0];
  if (limbs_.size() > 1) m |= static_cast<uint64_t>(limbs_[1]) << 32;
  return neg_ ? -static_cast<long long>(m) : static_cast<long long>(m);
}

BigInt BigInt::from_decimal(std::string_view s) {
  if (s.empty()) throw std::invalid_argument("empty integer literal");
  bool neg = false;
  size_t i = 0;
  if (s[0] == '+' || s[0] == '-') {
    neg = s[0] == '-';
    i = 1;
  }
  if (i == s.size()) throw std::invalid_argument("integer literal has no digits");
  BigInt r;
  // Consume up to nine digits at a time: r = r * scale + chunk.
  while (i < s.size()) {
    size_t take = std::min<size_t>(9, s.size() - i);
    uint64_t chunk = 0;
    uint64_t scale = 1;
    for (size_t k = 0; k < take; ++k, ++i) {
      char c = s[i];
      if (c < '0' || c > '9') throw std::invalid_argument("invalid digit in integer literal");
      chunk = chunk * 10 + static_cast<uint64_t>(c - '0');
      scale *= 10;
    }
    r = r * BigInt(static_cast<long long>(scale)) + BigInt(static_cast<long long>(chunk));
  }
  if (neg && !r.is_zero()) r.neg_ = true;
  return r;
}

std::string BigInt::to_decimal() const {
  if (is_zero()) return "0";
  std::vector<uint32_t> work = limbs_;
  std::string digits;
  while (!work.empty()) {
    // Divide by 1e9, emitting nine decimal digits per round.
    uint64_t rem = 0;
    for (size_t i = work.size(); i-- > 0;) {
      uint64_t cur = (rem << 32) | work[i];
      work[i] = static_cast<uint32_t>(cur / 1000000000ull);
      rem = cur % 1000000000ull;
    }
    while (!work.empty() && work.back() == 0) work.pop_back();
    for (int k = 0; k < 9; ++k) {
      digits.push_back(static_cast<char>('0' + rem % 10));
      rem /= 10;
    }
  }
  while (digits.size() > 1 && digits.back() == '0') digits.pop_back();
  if (neg_) digits.push_back('-');
  std::reverse(digits.begin(), digits.end());
  return digits;
}

Rational::Rational(long long n, long long d) : num_(n), den_(d) { normalize(); }

Rational::Rational(BigInt n, BigInt d) : num_(std::move(n)), den_(std::move(d)) { normalize(); }

void Rational::normalize() {
  if (den_.is_zero()) throw std::domain_error("rational with zero denominator");
  if (den_.negative()) {
    den_ = den_.negated();
    num_ = num_.negated();
  }
  if (num_.is_zero()) {
    den_ = BigInt(1);
    return;
  }
  BigInt g = BigInt::gcd(num_, den_);
  if (g != BigInt(1)) {
    num_ = num_ / g;
    den_ = den_ / g;
  }
}

Rational Rational::parse(std::string_view s) {
  size_t slash = s.find('/');
  if (slash == std::string_view::npos) return Rational(BigInt::from_decimal(s), BigInt(1));
  return Rational(BigInt::from_decimal(s.substr(0, slash)), BigInt::from_decimal(s.substr(slash + 1)));
}

std::string Rational::to_string() const {
  if (den_ == BigInt(1)) return num_.to_decimal();
  return num_.to_decimal() + "/" + den_.to_decimal();
}

bool Rational::is_integer() const { return den_ == BigInt(1); }

Rational Rational::abs() const {
  Rational r = *this;
  r.num_ = r.num_.abs();
  return r;
}

Rational Rational::inverse() const {
  if (num_.is_zero()) throw std::domain_error("inverse of zero");
  return Rational(den_, num_);
}

Rational Rational::pow(const Rational& base, unsigned long long e) {
  // num and den are coprime, so their powers need no re-reduction.
  Rational r;
  r.num_ = BigInt::pow(base.num_, e);
  r.den_ = BigInt::pow(base.den_, e);
  if (r.num_.negative() && !(e & 1ull)) r.num_ = r.num_.abs();
  return r;
}

Rational operator+(const Rational& a, const Rational& b) {
  return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) {
  return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
}

Rational operator*(const Rational& a, const Rational& b) {
  return Rational(a.num_ * b.num_, a.den_ * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.is_zero()) throw std::domain_error("rational division by zero");
  return Rational(a.num_ * b.den_, a.den_ * b.num_);
}

Rational Rational::operator-() const {
  Rational r = *this;
  r.num_ = r.num_.negated();
  return r;
}

int Rational::compare(const Rational& a, const Rational& b) {
  return BigInt::compare(a.num_ * b.den_, b.num_ * a.den_);
}

double Rational::to_double() const {
  if (num_.is_zero()) return 0.0;
  double mn, md;
  long en, ed;
  num_.frexp_approx(mn, en);
  den_.frexp_approx(md, ed);
  long e = en - ed;
  double ratio = mn / md;
  if (e > 2000) return num_.negative() ? -std::numeric_limits<double>::infinity()
                                       : std::numeric_limits<double>::infinity();
  if (e < -2000) return num_.negative() ? -0.0 : 0.0;
  return std::ldexp(ratio, static_cast<int>(e));
}

}  // namespace mtbp
