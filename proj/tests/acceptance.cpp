// Acceptance gate: nine end-to-end criteria, one verdict line each. The
// binary exits nonzero when any criterion fails, so it slots into ctest
// next to the unit suites.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mtbp/basins.hpp"
#include "mtbp/conjugate.hpp"
#include "mtbp/countable.hpp"
#include "mtbp/fixedpoint.hpp"
#include "mtbp/model_io.hpp"
#include "mtbp/simulate.hpp"
#include "mtbp/spectral.hpp"
#include "oracles.hpp"

using namespace mtbp;

namespace {

struct Criterion {
  std::string label;
  std::function<void(std::ostringstream&)> body;  // throws on failure
};

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& what) {
  if (!cond) throw Failure(what);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string run_cli_capture(const std::string& args) {
  std::string cmd = std::string(MTBP_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  require(pipe != nullptr, "popen failed");
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  int status = pclose(pipe);
  require(WIFEXITED(status), "cli crashed: " + args);
  return out;
}

// ---- criterion bodies ------------------------------------------------

void crit_counterexample(std::ostringstream& note) {
  auto t0 = std::chrono::steady_clock::now();
  ProcessModel m = load_model(oracles::data_path("counterexample_d2.json"));
  FixedPointReport rep = find_fixed_points(m);
  double dt = seconds_since(t0);
  require(rep.points.size() == 3,
          "expected exactly 3 fixed points, found " + std::to_string(rep.points.size()));
  for (const auto& p : rep.points)
    require(p.residual <= 1e-10, "residual above 1e-10");
  double diag = oracles::diagonal_root();
  require(std::abs(rep.points[1].q[0] - diag) <= 1e-9 &&
              std::abs(rep.points[1].q[1] - diag) <= 1e-9,
          "diagonal point does not match the univariate cubic root");
  require(std::abs(rep.points[0].q[0] - oracles::pair_lo()) <= 1e-9 &&
              std::abs(rep.points[0].q[1] - oracles::pair_hi()) <= 1e-9,
          "asymmetric pair does not match its closed form");
  require(dt < 5.0, "search exceeded 5 s");
  note << "3 points, diagonal " << diag << ", " << dt << " s";
}

void crit_perturbation(std::ostringstream& note) {
  ProcessModel m = load_model(oracles::data_path("counterexample_d2.json"));
  // move 1e-3 of death mass onto a fresh (3,3) monomial in each type
  for (int k = 0; k < 2; ++k) {
    for (auto& e : m.types[k].entries) {
      if (e.counts.sum() == 0) {
        e.prob -= 1e-3;
        e.prob_exact = *e.prob_exact - Rational(1, 1000);
      }
    }
    Eigen::VectorXi top(2);
    top << 3, 3;
    m.types[k].entries.push_back({top, 1e-3, Rational(1, 1000)});
  }
  validate_model(m);
  FixedPointReport rep = find_fixed_points(m);
  require(rep.points.size() == 3,
          "perturbed model changed the count to " + std::to_string(rep.points.size()));
  for (const auto& p : rep.points)
    require(p.residual <= 1e-10, "perturbed residual above 1e-10");
  note << "still 3 points after +1e-3 at (3,3)";
}

void crit_quadratic_conjugate(std::ostringstream& note) {
  ProcessModel m = load_model(oracles::data_path("single_quadratic.json"));
  FixedPointReport rep = find_fixed_points(m);
  require(rep.points.size() == 1, "quadratic should have one fixed point above 1");
  double q = rep.points[0].q[0];
  require(std::abs(q - 3.0) <= 1e-12, "fixed point misses 3 by more than 1e-12");
  ConjugateModel conj = tilt(m, rep.points[0].q);
  require(conj.exact, "tilt at 3 did not promote to exact rationals");
  bool saw0 = false, saw2 = false;
  for (const auto& e : conj.tilted.types[0].entries) {
    require(e.prob_exact.has_value(), "tilted entry lost exactness");
    if (e.counts[0] == 0) saw0 = *e.prob_exact == Rational(1, 4);
    if (e.counts[0] == 2) saw2 = *e.prob_exact == Rational(3, 4);
  }
  require(saw0 && saw2, "tilted weights are not 1/4 and 3/4");
  ExtinctionIterate ext = extinction_vector(conj.tilted);
  require(std::abs(ext.a[0] - 1.0 / 3.0) <= 1e-9, "tilted extinction misses 1/3");
  note << "q = " << q << ", weights 1/4 and 3/4 exact, extinction 1/3";
}

void crit_tilt_back(std::ostringstream& note) {
  int checked = 0, exact = 0;
  for (const char* name : {"single_quadratic.json", "counterexample_d2.json"}) {
    ProcessModel m = load_model(oracles::data_path(name));
    FixedPointReport rep = find_fixed_points(m);
    require(!rep.points.empty(), "no fixed points to tilt by");
    for (const auto& p : rep.points) {
      ConjugateModel conj = tilt(m, p.q);
      TiltBackRecord rec = verify_tilt_back(conj);
      require(rec.ok, "tilt-back failed at a fixed point of " + std::string(name));
      if (conj.exact) {
        require(rec.exact_equal, "rational-mode tilt-back not entrywise equal");
        ++exact;
      } else {
        require(rec.entry_residual <= 1e-12, "tilt-back entry residual above 1e-12");
      }
      ++checked;
    }
  }
  note << checked << " fixed points verified, " << exact << " in exact mode";
}

void crit_simulation(std::ostringstream& note) {
  auto t0 = std::chrono::steady_clock::now();
  ProcessModel m = load_model(oracles::data_path("single_quadratic.json"));
  ConjugateModel conj = tilt(m, QVec::Constant(1, 3.0));
  const ProcessModel& sup = conj.tilted;

  SimConfig cfg;
  cfg.start_type = 0;
  cfg.generations = 60;
  cfg.pop_cap = 100;  // a uniform walk this large is already non-extinct
  cfg.replicas = 1000000;
  cfg.seed = 42;
  CumTables tables = make_cum_tables(sup);
  long long extinct = 0;
  long long gen1_zero = 0, gen1_two = 0, gen1_total = 0;
  for (long long r = 0; r < cfg.replicas; ++r) {
    Trajectory t = simulate_one(sup, tables, cfg, r);
    if (t.status == TrajStatus::Extinct) ++extinct;
    if (t.counts.size() >= 2) {
      ++gen1_total;
      if (t.counts[1][0] == 0) ++gen1_zero;
      if (t.counts[1][0] == 2) ++gen1_two;
    }
  }
  double dt = seconds_since(t0);
  double frac = static_cast<double>(extinct) / cfg.replicas;
  double p = 1.0 / 3.0;
  double se = std::sqrt(p * (1.0 - p) / cfg.replicas);
  require(std::abs(frac - p) <= 3.0 * se, "extinct fraction outside 3 standard errors of 1/3");
  require(gen1_total == cfg.replicas, "generation 1 missing from some walk");
  double tv = 0.5 * (std::abs(static_cast<double>(gen1_zero) / gen1_total - 0.25) +
                     std::abs(static_cast<double>(gen1_two) / gen1_total - 0.75));
  require(tv <= 0.005, "generation-1 total variation above 0.005");
  require(dt < 60.0, "simulation exceeded 60 s");
  note << "fraction " << frac << " (" << std::abs(frac - p) / se << " se), tv " << tv << ", "
       << dt << " s";
}

void crit_basin_certificates(std::ostringstream& note) {
  long long classified = 0, undecided = 0;
  std::uint64_t ctr = 0;
  int model_idx = 0;
  for (const char* name : {"single_quadratic.json", "counterexample_d2.json"}) {
    ProcessModel m = load_model(oracles::data_path(name));
    ModelAnalysis a = require_hypotheses(m);
    BasinContext ctx = make_basin_context(m, a);
    const int d = m.d;

    for (int i = 0; i < 10000; ++i) {
      Eigen::VectorXd u(d);
      for (int j = 0; j < d; ++j) u[j] = rng_u01(11, model_idx, 0, ctr++);
      if (u.norm() == 0.0) continue;
      u /= u.norm();
      double r = rng_u01(11, model_idx, 1, ctr++) * 1.5 * ctx.C;
      LambdaVec lam = r * u;
      BasinVerdict v = classify(ctx, lam);
      ++classified;
      if (v.verdict == Verdict::Undecided) {
        ++undecided;
        continue;
      }
      require(revalidate(ctx, lam, v), "a certificate failed to revalidate");
    }

    // radius order along sampled rays: extinction inside, escape outside
    for (int i = 0; i < 200; ++i) {
      Eigen::VectorXd u(d);
      for (int j = 0; j < d; ++j) u[j] = rng_u01(12, model_idx, 2, ctr++);
      if (u.norm() == 0.0) continue;
      u /= u.norm();
      double base = (0.05 + rng_u01(12, model_idx, 3, ctr++)) * ctx.C;
      double max_s0 = -1.0, min_inf = -1.0;
      for (double scale : {0.5, 1.0, 1.5, 2.0}) {
        double r = scale * base;
        BasinVerdict v = classify(ctx, r * u);
        if (v.verdict == Verdict::S0 && r > max_s0) max_s0 = r;
        if (v.verdict == Verdict::SInfty && (min_inf < 0.0 || r < min_inf)) min_inf = r;
      }
      if (max_s0 >= 0.0 && min_inf >= 0.0)
        require(min_inf > max_s0, "an escape radius sits below an extinction radius");
    }
    ++model_idx;
  }
  note << classified << " points classified, " << undecided << " undecided, order respected";
}

void crit_exact_law(std::ostringstream& note) {
  // truncated law PGF against the iterated generating function
  std::uint64_t ctr = 0;
  for (const char* name : {"single_quadratic.json", "counterexample_d2.json"}) {
    ProcessModel m = load_model(oracles::data_path(name));
    for (int n = 1; n <= 3; ++n) {
      for (int start = 0; start < m.d; ++start) {
        ExactLaw law = exact_generation_law(m, start, n, 64);
        double esc = law.escaped.to_double();
        for (int trial = 0; trial < 100; ++trial) {
          QVec q(m.d);
          for (int j = 0; j < m.d; ++j) q[j] = rng_u01(21, n, start, ctr++);
          double diff = eval_f_iter(m, q, n).q[start] - law_pgf(law, q);
          require(diff >= -1e-12, "law PGF exceeds the exact iterate");
          require(diff <= esc + 1e-12, "iterate exceeds law PGF by more than the escaped mass");
        }
      }
    }
  }
  // jacobians against central differences on random models
  int models = 0;
  for (std::uint64_t s = 1; s <= 100; ++s) {
    int d = 1 + static_cast<int>(s % 4);
    ProcessModel m = oracles::random_model(s, d);
    for (int trial = 0; trial < 2; ++trial) {
      QVec q(d);
      for (int j = 0; j < d; ++j) q[j] = 0.2 + rng_u01(22, s, trial, j);
      Eigen::MatrixXd J = jacobian_f<double>(m, q);
      Eigen::MatrixXd Jfd = oracles::fd_jacobian(m, q);
      double rel = (J - Jfd).cwiseAbs().maxCoeff() / std::max(1.0, J.cwiseAbs().maxCoeff());
      require(rel <= 1e-5, "jacobian mismatch beyond 1e-5 relative");
    }
    ++models;
  }
  note << "laws bracketed on both models, jacobians on " << models << " random models";
}

void crit_truncation_scan(std::ostringstream& note) {
  auto t0 = std::chrono::steady_clock::now();
  CountableFamily fam = load_family(oracles::data_path("demo_countable.json"));
  AssumptionsReport assumptions = check_assumptions(fam);
  require(assumptions.all_pass, "a sampled hypothesis check failed on the demo family");
  TruncationScan scan = truncation_scan(fam, {2, 4, 8, 16, 32});
  require(!scan.aborted, "scan aborted: " + scan.abort_reason);
  require(scan.records.size() == 5, "scan did not cover the full schedule");
  double prev_diff = -1.0;
  for (const auto& rec : scan.records) {
    require(!rec.report.points.empty(), "a truncation level lost the fixed point");
    require(rec.bound_ok, "a representative exceeded its log(1/p) bound");
    require(rec.max_head > 0.5, "head coordinate collapsed toward the trivial point");
    if (rec.has_prev) {
      if (prev_diff >= 0.0)
        require(rec.sup_diff_prev <= prev_diff + 1e-15,
                "sup-differences are not monotonically non-increasing");
      prev_diff = rec.sup_diff_prev;
    }
  }
  double dt = seconds_since(t0);
  require(dt < 120.0, "truncation scan exceeded 120 s");
  note << "levels {2,4,8,16,32}, last sup-diff " << scan.records.back().sup_diff_prev << ", "
       << dt << " s";
}

void crit_reproducibility(std::ostringstream& note) {
  std::string model = oracles::data_path("counterexample_d2.json");
  std::string quad = oracles::data_path("single_quadratic.json");
  std::string family = oracles::data_path("demo_countable.json");
  const std::vector<std::string> cmds = {
      "analyze " + model,
      "fixed-points " + model,
      "mesh " + model + " --grid 9",
      "simulate " + quad + " --seed 42 --replicas 100 --generations 20",
      "simulate " + model + " --seed 7 --replicas 50 --summary",
      "truncate-scan " + family + " --schedule 2,4",
      "pipeline " + quad,
  };
  for (const auto& c : cmds) {
    std::string a = run_cli_capture(c);
    std::string b = run_cli_capture(c);
    require(!a.empty(), "no output from: " + c);
    require(a == b, "outputs differ between runs of: " + c);
  }
  note << cmds.size() << " commands byte-identical across repeated runs";
}

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {"benchmark model has exactly three fixed points above one", crit_counterexample},
      {"fixed-point count is stable under a 1e-3 perturbation", crit_perturbation},
      {"quadratic conjugate is exact with extinction 1/3", crit_quadratic_conjugate},
      {"tilt-back verifies at every fixed point of both models", crit_tilt_back},
      {"seeded million-replica simulation matches the theory", crit_simulation},
      {"random basin certificates revalidate and respect radius order", crit_basin_certificates},
      {"exact laws bracket iterates and jacobians match differences", crit_exact_law},
      {"countable-family truncation scan converges under its bounds", crit_truncation_scan},
      {"seeded CLI runs are byte-identical", crit_reproducibility},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    std::ostringstream note;
    bool ok = true;
    std::string why;
    try {
      criteria[i].body(note);
    } catch (const std::exception& e) {
      ok = false;
      why = e.what();
    }
    if (ok) {
      std::cout << "PASS  criterion " << (i + 1) << ": " << criteria[i].label;
      if (!note.str().empty()) std::cout << " [" << note.str() << "]";
      std::cout << "\n";
    } else {
      ++failures;
      std::cout << "FAIL  criterion " << (i + 1) << ": " << criteria[i].label << " [" << why
                << "]\n";
    }
  }
  std::cout << (failures == 0 ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED") << " ("
            << (criteria.size() - failures) << "/" << criteria.size() << ")\n";
  return failures == 0 ? 0 : 1;
}
