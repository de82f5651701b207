#pragma once

#include <Eigen/Core>

#include "mtbp/rational.hpp"

// Minimal scalar traits so exact rationals can live in Eigen dense vectors.
// Only coefficient-wise use is supported; norm-like operations stay on the
// double path.
namespace Eigen {

template <>
struct NumTraits<mtbp::Rational> {
  typedef mtbp::Rational Real;
  typedef mtbp::Rational NonInteger;
  typedef mtbp::Rational Literal;
  typedef mtbp::Rational Nested;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 8,
    AddCost = 64,
    MulCost = 64,
  };
  static inline Real epsilon() { return mtbp::Rational(0); }
  static inline Real dummy_precision() { return mtbp::Rational(0); }
  static inline int digits10() { return 0; }
};

}  // namespace Eigen
