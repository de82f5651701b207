#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "mtbp/conjugate.hpp"
#include "mtbp/model_io.hpp"
#include "mtbp/simulate.hpp"
#include "oracles.hpp"

using namespace mtbp;

TEST_CASE("counter generator reproduces the reference implementation") {
  // reference values computed with a separate implementation of the
  // splitmix64 output stage
  CHECK(rng_mix(0) == UINT64_C(0xe220a8397b1dcdaf));
  CHECK(rng_mix(1) == UINT64_C(0x910a2dec89025cc1));
  CHECK(rng_mix(UINT64_C(0xdeadbeef)) == UINT64_C(0x4adfb90f68c9eb9b));
  CHECK(rng_key(42, 0, 0, 0) == UINT64_C(0xc16129ecd0dc5b93));
  CHECK(rng_key(42, 1, 2, 3) == UINT64_C(0x3fb96077da5807fd));
  CHECK(rng_u01(42, 0, 0, 0) == 0.75538885146748791);
  CHECK(rng_u01(42, 1, 2, 3) == 0.24892237592789002);
  CHECK(rng_u01(7, 123456789, 55, 999) == 0.029909388425444439);
}

TEST_CASE("variates live in the half-open unit interval") {
  for (std::uint64_t i = 0; i < 2000; ++i) {
    double u = rng_u01(3, i, i * 7, i * 131);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("cumulative tables close at one") {
  ProcessModel m = load_model(oracles::data_path("counterexample_d2.json"));
  CumTables t = make_cum_tables(m);
  REQUIRE(t.cum.size() == 2);
  for (const auto& row : t.cum) {
    REQUIRE(!row.empty());
    for (std::size_t i = 1; i < row.size(); ++i) CHECK(row[i] >= row[i - 1]);
    CHECK(row.back() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("trajectories are pure functions of the replica index") {
  ProcessModel m = load_model(oracles::data_path("counterexample_d2.json"));
  SimConfig cfg;
  cfg.start_type = 1;
  cfg.generations = 30;
  cfg.seed = 2024;
  CumTables tables = make_cum_tables(m);
  for (long long r : {0LL, 1LL, 17LL}) {
    Trajectory a = simulate_one(m, tables, cfg, r);
    Trajectory b = simulate_one(m, cfg, r);  // convenience overload
    REQUIRE(a.counts.size() == b.counts.size());
    CHECK(a.status == b.status);
    for (std::size_t i = 0; i < a.counts.size(); ++i) CHECK(a.counts[i] == b.counts[i]);
    // starting generation is a single individual of the start type
    REQUIRE(!a.counts.empty());
    CHECK(a.counts[0][1] == 1);
    CHECK(a.counts[0][0] == 0);
  }
}

TEST_CASE("subcritical walks all die") {
  ProcessModel m = load_model(oracles::data_path("single_quadratic.json"));
  SimConfig cfg;
  cfg.generations = 100;
  cfg.replicas = 2000;
  cfg.seed = 42;
  McExtinction mc = mc_extinction(m, cfg);
  REQUIRE(mc.estimate.size() == 1);
  CHECK(mc.estimate[0] == 1.0);
  CHECK(mc.extinct[0] == 2000);
  CHECK(mc.cap_hit[0] == 0);
  CHECK(mc.alive[0] == 0);
  CHECK(mc.se[0] == 0.0);
}

TEST_CASE("supercritical extinction estimate brackets the reciprocal weight") {
  ProcessModel m = load_model(oracles::data_path("single_quadratic.json"));
  ConjugateModel conj = tilt(m, QVec::Constant(1, 3.0));
  SimConfig cfg;
  cfg.generations = 200;
  cfg.pop_cap = 200;  // survivors grow geometrically, cap them early
  cfg.replicas = 20000;
  cfg.seed = 5;
  McExtinction mc = mc_extinction(conj.tilted, cfg);
  double p = 1.0 / 3.0;
  double se = std::sqrt(p * (1 - p) / 20000.0);
  CHECK(std::abs(mc.estimate[0] - p) < 5.0 * se);
  CHECK(mc.extinct[0] + mc.cap_hit[0] + mc.alive[0] == 20000);
  CHECK(mc.cap_hit[0] > 0);  // survivors really do hit the cap
  CHECK(mc.se[0] > 0.0);
  // byte-level determinism of the whole summary
  McExtinction again = mc_extinction(conj.tilted, cfg);
  CHECK(again.estimate[0] == mc.estimate[0]);
  CHECK(again.extinct[0] == mc.extinct[0]);
}

TEST_CASE("population cap records the offending generation") {
  ProcessModel m = load_model(oracles::data_path("single_quadratic.json"));
  SimConfig cfg;
  cfg.generations = 50;
  cfg.pop_cap = 1;
  cfg.seed = 9;
  bool saw_cap = false, saw_ext = false;
  for (long long r = 0; r < 40 && !(saw_cap && saw_ext); ++r) {
    Trajectory t = simulate_one(m, cfg, r);
    if (t.status == TrajStatus::CapHit) {
      saw_cap = true;
      REQUIRE(t.counts.size() >= 2);
      CHECK(t.counts.back().sum() > 1);  // the generation that broke the cap
    }
    if (t.status == TrajStatus::Extinct) {
      saw_ext = true;
      CHECK(t.counts.back().sum() == 0);
    }
  }
  CHECK(saw_cap);
  CHECK(saw_ext);
  CHECK(std::string(to_string(TrajStatus::CapHit)) == "cap-hit");
  CHECK(std::string(to_string(TrajStatus::Extinct)) == "extinct");
  CHECK(std::string(to_string(TrajStatus::Alive)) == "alive");
}

TEST_CASE("exact generation laws of the quadratic") {
  ProcessModel m = load_model(oracles::data_path("single_quadratic.json"));
  SUBCASE("one generation") {
    ExactLaw law = exact_generation_law(m, 0, 1, 64);
    REQUIRE(law.mass.size() == 2);
    CHECK(law.mass[0].first == std::vector<int>{0});
    CHECK(law.mass[0].second == Rational(3, 4));
    CHECK(law.mass[1].first == std::vector<int>{2});
    CHECK(law.mass[1].second == Rational(1, 4));
    CHECK(law.escaped == Rational(0));
  }
  SUBCASE("two generations") {
    ExactLaw law = exact_generation_law(m, 0, 2, 64);
    // P[X(2) = 0] = 3/4 + 1/4 * (3/4)^2 = 57/64
    Rational total(0);
    for (const auto& [counts, mass] : law.mass) {
      if (counts[0] == 0) CHECK(mass == Rational(57, 64));
      total += mass;
    }
    CHECK(total + law.escaped == Rational(1));
    CHECK(law.escaped == Rational(0));  // four individuals never exceed 64
    // support is {0, 2} composed twice: totals 0, 2, 4
    for (const auto& [counts, mass] : law.mass) {
      bool ok = counts[0] == 0 || counts[0] == 2 || counts[0] == 4;
      CHECK(ok);
    }
  }
  SUBCASE("tight cap escapes mass exactly") {
    ExactLaw law = exact_generation_law(m, 0, 2, 2);
    // the 4-individual outcome P = (1/4)^3 falls outside the cap
    Rational total(0);
    for (const auto& [counts, mass] : law.mass) total += mass;
    CHECK(law.escaped == Rational(1, 64));
    CHECK(total + law.escaped == Rational(1));
  }
}

TEST_CASE("truncated law PGF brackets the exact iterate") {
  for (const char* name : {"single_quadratic.json", "counterexample_d2.json"}) {
    ProcessModel m = load_model(oracles::data_path(name));
    for (int n = 1; n <= 3; ++n) {
      for (int start = 0; start < m.d; ++start) {
        ExactLaw law = exact_generation_law(m, start, n, 64);
        double esc = law.escaped.to_double();
        for (double base : {0.0, 0.3, 0.8, 1.0}) {
          QVec q = QVec::Constant(m.d, base);
          if (m.d == 2) q[1] = std::min(1.0, base + 0.15);
          IterateResult it = eval_f_iter(m, q, n);
          double diff = it.q[start] - law_pgf(law, q);
          CHECK(diff >= -1e-12);
          CHECK(diff <= esc + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("law caps and horizons are enforced") {
  ProcessModel m = load_model(oracles::data_path("single_quadratic.json"));
  CHECK_THROWS_AS(exact_generation_law(m, 0, kExactLawMaxGen + 1, 8), std::invalid_argument);
  CHECK_THROWS_AS(exact_generation_law(m, 0, 1, kExactLawMaxCap + 1), std::invalid_argument);
  CHECK_THROWS_AS(exact_generation_law(m, 2, 1, 8), std::invalid_argument);
}
