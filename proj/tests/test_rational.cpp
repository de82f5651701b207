#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "mtbp/rational.hpp"
#include "mtbp/simulate.hpp"

using mtbp::BigInt;
using mtbp::Rational;

TEST_CASE("decimal round trip") {
  const char* samples[] = {"0",
                           "1",
                           "-1",
                           "4294967295",
                           "4294967296",
                           "-4294967296",
                           "18446744073709551615",
                           "340282366920938463463374607431768211456",
                           "-99999999999999999999999999999999999999999999"};
  for (const char* s : samples) CHECK(BigInt::from_decimal(s).to_decimal() == s);
}

TEST_CASE("small arithmetic matches int64") {
  long long vals[] = {0, 1, -1, 7, -13, 1000003, -987654321, 2147483647, -2147483648LL};
  for (long long a : vals)
    for (long long b : vals) {
      CHECK((BigInt(a) + BigInt(b)).to_decimal() == std::to_string(a + b));
      CHECK((BigInt(a) - BigInt(b)).to_decimal() == std::to_string(a - b));
      CHECK((BigInt(a) * BigInt(b)).to_decimal() == std::to_string(a * b));
      if (b != 0) {
        CHECK((BigInt(a) / BigInt(b)).to_decimal() == std::to_string(a / b));
        CHECK((BigInt(a) % BigInt(b)).to_decimal() == std::to_string(a % b));
      }
    }
}

TEST_CASE("divmod identity on random big operands") {
  for (int trial = 0; trial < 200; ++trial) {
    BigInt a(1), b(1);
    int la = 1 + trial % 7, lb = 1 + (trial / 7) % 5;
    for (int i = 0; i < la; ++i)
      a = a * BigInt(1000000007LL) + BigInt((long long)(mtbp::rng_u01(5, trial, 0, i) * 1e9));
    for (int i = 0; i < lb; ++i)
      b = b * BigInt(998244353LL) + BigInt((long long)(mtbp::rng_u01(5, trial, 1, i) * 1e9) + 1);
    if (trial % 3 == 1) a = a.negated();
    if (trial % 5 == 2) b = b.negated();
    BigInt q, r;
    BigInt::divmod(a, b, q, r);
    CHECK(q * b + r == a);
    CHECK(r.abs() < b.abs());
    // truncation: q rounds toward zero, remainder keeps the dividend's sign
    if (!r.is_zero()) CHECK(r.sign() == a.sign());
  }
}

TEST_CASE("gcd and pow") {
  CHECK(BigInt::gcd(BigInt(0), BigInt(0)).to_decimal() == "0");
  CHECK(BigInt::gcd(BigInt(0), BigInt(-7)).to_decimal() == "7");
  CHECK(BigInt::gcd(BigInt(12), BigInt(18)).to_decimal() == "6");
  CHECK(BigInt::gcd(BigInt::from_decimal("123456789123456789"), BigInt(998244353)).to_decimal() ==
        "1");
  CHECK(BigInt::pow(BigInt(2), 100).to_decimal() == "1267650600228229401496703205376");
  CHECK(BigInt::pow(BigInt(-3), 3).to_decimal() == "-27");
  CHECK(BigInt::pow(BigInt(17), 0).to_decimal() == "1");
}

TEST_CASE("add_mul accumulates") {
  BigInt acc(5);
  acc.add_mul(BigInt(1000000007LL), BigInt(-999999937LL));
  CHECK(acc == BigInt(5) + BigInt(1000000007LL) * BigInt(-999999937LL));
}

TEST_CASE("to_double precision and saturation") {
  CHECK(BigInt(0).to_double() == 0.0);
  CHECK(BigInt(-12345).to_double() == -12345.0);
  CHECK(BigInt::from_decimal("9007199254740993").to_double() ==
        doctest::Approx(9007199254740993.0).epsilon(1e-15));
  BigInt huge = BigInt::pow(BigInt(10), 400);
  CHECK(std::isinf(huge.to_double()));
  CHECK(std::isinf(huge.negated().to_double()));
}

TEST_CASE("fits_int64 boundaries") {
  CHECK(BigInt(9223372036854775807LL).fits_int64());
  CHECK(BigInt::from_decimal("-9223372036854775808").fits_int64());
  CHECK(!BigInt::from_decimal("9223372036854775808").fits_int64());
  CHECK(BigInt::from_decimal("-9223372036854775808").to_int64() ==
        std::numeric_limits<long long>::min());
}

TEST_CASE("shift round trip") {
  BigInt v = BigInt::from_decimal("987654321987654321987654321");
  CHECK(v.shifted_left(95).shifted_right(95) == v);
  CHECK(BigInt(1).shifted_left(64).to_decimal() == "18446744073709551616");
}

TEST_CASE("rational normalization and parse") {
  CHECK(Rational(2, 4).to_string() == "1/2");
  CHECK(Rational(-2, 4).to_string() == "-1/2");
  CHECK(Rational(2, -4).to_string() == "-1/2");
  CHECK(Rational(0, 9).to_string() == "0");
  CHECK(Rational(6, 3).to_string() == "2");
  CHECK(Rational::parse("3/4").to_double() == 0.75);
  CHECK(Rational::parse("-7").to_string() == "-7");
  CHECK(Rational::parse("21/14") == Rational(3, 2));
  CHECK_THROWS(Rational::parse("1/0"));
  CHECK_THROWS(Rational::parse("abc"));
}

TEST_CASE("rational field identities") {
  Rational a(3, 7), b(-5, 11), c(13, 4);
  CHECK((a + b) * c == a * c + b * c);
  CHECK(a - a == Rational(0));
  CHECK(a / a == Rational(1));
  CHECK(a * a.inverse() == Rational(1));
  CHECK((a / b) * b == a);
  CHECK(-(-a) == a);
  CHECK(Rational::pow(Rational(2, 3), 10) == Rational(1024, 59049));
  CHECK(Rational::pow(b, 0) == Rational(1));
}

TEST_CASE("rational comparisons agree with doubles on moderate values") {
  Rational vals[] = {Rational(0), Rational(1, 3), Rational(-1, 3), Rational(22, 7),
                     Rational(355, 113)};
  for (const auto& a : vals)
    for (const auto& b : vals) {
      // all sample values are distinct at double precision
      CHECK((a < b) == (a.to_double() < b.to_double()));
      CHECK((a == b) == (Rational::compare(a, b) == 0));
    }
  CHECK(Rational(1, 3).to_double() == doctest::Approx(1.0 / 3.0).epsilon(1e-16));
}

TEST_CASE("to_double handles extreme ratios") {
  Rational tiny(BigInt(1), BigInt::pow(BigInt(10), 350));
  CHECK(tiny.to_double() >= 0.0);
  CHECK(tiny.to_double() < 1e-300);
  Rational big(BigInt::pow(BigInt(10), 350), BigInt(1));
  bool big_ok = std::isinf(big.to_double()) || big.to_double() > 1e300;
  CHECK(big_ok);
  // ratio of two huge numbers stays finite and accurate
  Rational ratio(BigInt::pow(BigInt(10), 350) * BigInt(3),
                 BigInt::pow(BigInt(10), 350) * BigInt(7));
  CHECK(ratio.to_double() == doctest::Approx(3.0 / 7.0).epsilon(1e-15));
}

TEST_CASE("is_integer") {
  CHECK(Rational(8, 2).is_integer());
  CHECK(!Rational(1, 3).is_integer());
  CHECK(Rational(0).is_integer());
}
