#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mtbp/fixedpoint.hpp"
#include "mtbp/model_io.hpp"
#include "oracles.hpp"

using namespace mtbp;

TEST_CASE("single-type quadratic has exactly one fixed point above one") {
  ProcessModel m = load_model(oracles::data_path("single_quadratic.json"));
  FixedPointReport rep = find_fixed_points(m);
  REQUIRE(rep.points.size() == 1);
  CHECK(rep.points[0].q[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(rep.points[0].residual <= 1e-10);
  CHECK(!rep.contradicts_theorem);
}

TEST_CASE("two-type benchmark carries exactly three fixed points") {
  ProcessModel m = load_model(oracles::data_path("counterexample_d2.json"));
  FixedPointReport rep = find_fixed_points(m, 9, 1e-10);
  REQUIRE(rep.points.size() == 3);
  CHECK(!rep.contradicts_theorem);
  // report is sorted lexicographically: (lo, hi), (diag, diag), (hi, lo)
  const QVec& a = rep.points[0].q;
  const QVec& b = rep.points[1].q;
  const QVec& c = rep.points[2].q;
  CHECK(a[0] == doctest::Approx(oracles::pair_lo()).epsilon(1e-9));
  CHECK(a[1] == doctest::Approx(oracles::pair_hi()).epsilon(1e-9));
  CHECK(b[0] == doctest::Approx(oracles::diagonal_root()).epsilon(1e-9));
  CHECK(b[1] == doctest::Approx(oracles::diagonal_root()).epsilon(1e-9));
  CHECK(c[0] == doctest::Approx(oracles::pair_hi()).epsilon(1e-9));
  CHECK(c[1] == doctest::Approx(oracles::pair_lo()).epsilon(1e-9));
  for (const auto& p : rep.points) {
    CHECK(p.residual <= 1e-10);
    CHECK((p.q.array() > 1.0).all());
  }
}

TEST_CASE("finer grids find the same three points") {
  ProcessModel m = load_model(oracles::data_path("counterexample_d2.json"));
  FixedPointReport coarse = find_fixed_points(m, 9, 1e-10);
  FixedPointReport fine = find_fixed_points(m, 33, 1e-10);
  REQUIRE(coarse.points.size() == 3);
  REQUIRE(fine.points.size() == 3);
  for (int i = 0; i < 3; ++i)
    CHECK((coarse.points[i].q - fine.points[i].q).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("small extra mass on the top entry keeps the count at three") {
  ProcessModel m = load_model(oracles::data_path("counterexample_d2.json"));
  // shave 1e-3 off each death entry and put it on the (2,2) monomial
  for (int k = 0; k < 2; ++k) {
    for (auto& e : m.types[k].entries) {
      e.prob_exact.reset();
      if (e.counts.sum() == 0) e.prob -= 1e-3;
      if (e.counts[0] == 2 && e.counts[1] == 2) e.prob += 1e-3;
    }
  }
  validate_model(m);
  FixedPointReport rep = find_fixed_points(m);
  CHECK(rep.points.size() == 3);
  CHECK(!rep.contradicts_theorem);
  // points move only slightly
  CHECK(rep.points[1].q[0] == doctest::Approx(oracles::diagonal_root()).epsilon(1e-2));
}

TEST_CASE("residual floor over a fine grid confines low residuals to the roots") {
  // every grid point whose residual is below 1e-3 must lie near one of the
  // three found points or near all-ones
  ProcessModel m = load_model(oracles::data_path("counterexample_d2.json"));
  FixedPointReport rep = find_fixed_points(m);
  REQUIRE(rep.points.size() == 3);
  const int steps = 400;
  const double lo = 1.0, hi = 2.5;
  int low_count = 0;
  for (int i = 0; i <= steps; ++i) {
    for (int j = 0; j <= steps; ++j) {
      QVec q(2);
      q << lo + (hi - lo) * i / steps, lo + (hi - lo) * j / steps;
      double res = (eval_f<double>(m, q) - q).cwiseAbs().maxCoeff();
      if (res >= 1e-3) continue;
      ++low_count;
      double best = (q - QVec::Ones(2)).cwiseAbs().maxCoeff();
      for (const auto& p : rep.points)
        best = std::min(best, (q - p.q).cwiseAbs().maxCoeff());
      CHECK(best < 0.05);
    }
  }
  CHECK(low_count > 0);
}

TEST_CASE("verification labels the benchmark points") {
  ProcessModel m = load_model(oracles::data_path("counterexample_d2.json"));
  FixedPointReport rep = find_fixed_points(m);
  REQUIRE(rep.points.size() == 3);
  for (const auto& p : rep.points) {
    FixedPointCheck chk = verify_fixed_point(m, p.q);
    CHECK(chk.accepted);
    CHECK(chk.above_one);
    CHECK(!chk.is_one);
    CHECK(!chk.sub_unit);
    CHECK(chk.jac_rho > 1.0);  // interior fixed points here are repelling
    CHECK(chk.stability == "repelling");
  }
  FixedPointCheck triv = verify_fixed_point(m, QVec::Ones(2));
  CHECK(triv.accepted);
  CHECK(triv.is_one);
  CHECK(triv.jac_rho == doctest::Approx(0.79).epsilon(1e-9));
  CHECK(triv.stability == "attracting");
}

TEST_CASE("exact verification certifies the rational fixed point") {
  ProcessModel m = load_model(oracles::data_path("single_quadratic.json"));
  FixedPointCheck chk = verify_fixed_point_exact(m, {Rational(3)});
  CHECK(chk.exact_mode);
  CHECK(chk.exact_zero);
  CHECK(chk.residual_exact == "0");
  CHECK(chk.accepted);
  CHECK(chk.stability == "repelling");
  FixedPointCheck off = verify_fixed_point_exact(m, {Rational(5, 2)});
  CHECK(off.exact_mode);
  CHECK(!off.exact_zero);
  CHECK(!off.accepted);
  // |f(5/2) - 5/2| = |3/4 + 25/16 - 5/2| = 3/16
  CHECK(off.residual_exact == "3/16");
}

TEST_CASE("supercritical model is rejected before searching") {
  ProcessModel m;
  m.d = 1;
  m.types.resize(1);
  Eigen::VectorXi zero(1), two(1);
  zero << 0;
  two << 2;
  m.types[0].entries.push_back({zero, 0.2, std::nullopt});
  m.types[0].entries.push_back({two, 0.8, std::nullopt});
  validate_model(m);
  CHECK_THROWS_AS(find_fixed_points(m), HypothesisError);
}

TEST_CASE("boundary mode recovers points hugging the all-ones corner") {
  // strongly graded family: the type-k branching weight shrinks 32x per
  // level, so the fixed point's trailing coordinates sit within ~1e-11 of
  // 1, below any fixed interior margin
  const int d = 8;
  const double delta = std::ldexp(1.0, -40);  // faint coupling for regularity
  ProcessModel m;
  m.d = d;
  m.types.resize(d);
  for (int k = 0; k < d; ++k) {
    double w = 0.5 * std::pow(1.0 / 32.0, k);
    Eigen::VectorXi zero = Eigen::VectorXi::Zero(d);
    Eigen::VectorXi pair = Eigen::VectorXi::Zero(d);
    pair[0] = 1;
    pair[k] = k == 0 ? 2 : 1;
    double used = w / 2;
    m.types[k].entries.push_back({pair, w / 2, std::nullopt});
    if (k == 0) {
      for (int j = 1; j < d; ++j) {
        Eigen::VectorXi one = Eigen::VectorXi::Zero(d);
        one[j] = 1;
        m.types[k].entries.push_back({one, delta, std::nullopt});
        used += delta;
      }
    }
    m.types[k].entries.push_back({zero, 1.0 - used, std::nullopt});
  }
  validate_model(m);

  FixedPointOptions opt;
  opt.grid_per_axis = 9;
  opt.allow_boundary = true;
  // seed the corner region; mesh rays alone march past it
  QVec seed = QVec::Ones(d);
  seed[0] = 3.1;
  for (int k = 1; k < d; ++k) seed[k] = 1.0 + 0.5 * std::pow(1.0 / 32.0, k);
  opt.extra_seeds.push_back(seed);
  FixedPointReport rep = find_fixed_points(m, opt);
  REQUIRE(!rep.points.empty());
  const QVec& q = rep.points.front().q;
  // first coordinate nearly solves 3/4 + q^2/4 = q: the root at 3
  CHECK(q[0] == doctest::Approx(3.0).epsilon(1e-6));
  // trailing coordinates solve q_k = 1 - w/2 + (w/2) q_0 q_k given q_0
  for (int k = 1; k < d; ++k) {
    double half_w = 0.25 * std::pow(1.0 / 32.0, k);
    double expect = (1.0 - half_w) / (1.0 - half_w * q[0]) - 1.0;
    CHECK(q[k] - 1.0 == doctest::Approx(expect).epsilon(1e-3));
  }
  CHECK(q[d - 1] > 1.0);
  CHECK(q[d - 1] - 1.0 < 1e-9);  // genuinely below the interior margin
}

TEST_CASE("random subcritical models never contradict the existence theorem") {
  for (std::uint64_t s = 1; s <= 6; ++s) {
    ProcessModel m = oracles::random_model(s, 1 + static_cast<int>(s % 3), 3, 0.55);
    SpectralReport rep = analyze_spectral(m);
    if (rep.criticality != Criticality::Subcritical) continue;
    if (!rep.positive_regular || !rep.non_singular) continue;
    FixedPointReport fr = find_fixed_points(m, 9, 1e-9);
    CHECK(!fr.contradicts_theorem);
    CHECK(!fr.points.empty());
    for (const auto& p : fr.points) {
      FixedPointCheck chk = verify_fixed_point(m, p.q, 1e-9);
      CHECK(chk.accepted);
      CHECK(chk.above_one);
    }
  }
}
