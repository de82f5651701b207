#include "mtbp/cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "mtbp/conjugate.hpp"
#include "mtbp/countable.hpp"
#include "mtbp/model_io.hpp"
#include "mtbp/reports.hpp"
#include "mtbp/simulate.hpp"

namespace mtbp {

namespace {

constexpr const char* kVersion = "0.1.0";

// Bad flag values or flag combinations discovered after CLI11 parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelIOError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fnv1a64_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Shortest round-trip decimal form; keeps CSV output byte-stable.
std::string fmt_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::vector<double> parse_doubles(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      double v = std::stod(item, &pos);
      while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
      if (pos != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError("cannot parse '" + item + "' as a number");
    }
  }
  if (out.empty()) throw UsageError("empty number list");
  return out;
}

std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> out;
  for (double v : parse_doubles(s)) {
    int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) throw UsageError("expected an integer list");
    out.push_back(i);
  }
  return out;
}

ordered_json versions_json() {
  ordered_json v;
  v["mtbp"] = kVersion;
  v["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
               "." + std::to_string(EIGEN_MINOR_VERSION);
  v["nlohmann_json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                       std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                       std::to_string(NLOHMANN_JSON_VERSION_PATCH);
  return v;
}

ordered_json make_envelope(const std::string& command, const std::string& path,
                           const std::string& bytes) {
  ordered_json j;
  j["command"] = command;
  ordered_json in;
  in["path"] = path;
  in["fnv1a64"] = fnv1a64_hex(bytes);
  j["inputs"] = in;
  j["outputs"] = ordered_json::object();
  return j;
}

void emit(ordered_json& envelope, bool timings, double wall_ms, std::ostream& os) {
  envelope["versions"] = versions_json();
  if (timings) envelope["wall_time_ms"] = wall_ms;
  os << envelope.dump(2) << "\n";
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ModelIOError("cannot write " + path);
  return out;
}

// Selects the tilting point for conjugate, verify-conjugate, and pipeline.
const FixedPoint& pick_fixed_point(const FixedPointReport& rep, int index) {
  if (rep.points.empty())
    throw std::runtime_error("no fixed point found above 1, nothing to tilt by");
  if (index < 0 || index >= static_cast<int>(rep.points.size())) {
    std::ostringstream os;
    os << "fixed-point index " << index << " invalid; available indices: 0";
    if (rep.points.size() > 1) os << ".." << rep.points.size() - 1;
    throw UsageError(os.str());
  }
  return rep.points[static_cast<std::size_t>(index)];
}

void write_mesh_csv(const MeshResult& mesh, int d, std::ostream& os) {
  for (int j = 0; j < d; ++j) os << "u_" << j + 1 << ",";
  os << "r_lo,r_hi\n";
  std::vector<bool> is_failed(mesh.directions.size(), false);
  for (int fi : mesh.failed) is_failed[static_cast<std::size_t>(fi)] = true;
  std::size_t ri = 0;
  for (std::size_t i = 0; i < mesh.directions.size(); ++i) {
    for (int j = 0; j < d; ++j) os << fmt_double(mesh.directions[i][j]) << ",";
    if (is_failed[i]) {
      os << "nan,nan\n";
    } else {
      const RayPoint& p = mesh.rays[ri++];
      os << fmt_double(p.r_lo) << "," << fmt_double(p.r_hi) << "\n";
    }
  }
}

void write_residual_grid_csv(const ProcessModel& m, double lo, double hi, int steps,
                             std::ostream& os) {
  os << "q1,q2,res1,res2\n";
  for (int i = 0; i < steps; ++i) {
    double q1 = lo + (hi - lo) * i / (steps - 1);
    for (int j = 0; j < steps; ++j) {
      double q2 = lo + (hi - lo) * j / (steps - 1);
      QVec q(2);
      q << q1, q2;
      QVec f = eval_f<double>(m, q);
      os << fmt_double(q1) << "," << fmt_double(q2) << "," << fmt_double(f[0] - q1) << ","
         << fmt_double(f[1] - q2) << "\n";
    }
  }
}

void write_simulate_csv(const ProcessModel& m, const SimConfig& cfg, bool condition_extinct,
                        bool summary, std::ostream& os) {
  CumTables tables = make_cum_tables(m);
  if (!summary) {
    os << "replica,generation,status";
    for (int j = 0; j < m.d; ++j) os << ",n_" << j + 1;
    os << "\n";
  }
  // summary accumulators indexed by generation; "emitted" counts the
  // trajectories that recorded data at that generation (cap-hit walks stop
  // early, so later generations see fewer of them)
  std::vector<long long> emitted(cfg.generations + 1, 0), alive(cfg.generations + 1, 0),
      extinct_cum(cfg.generations + 1, 0), cap_cum(cfg.generations + 1, 0);
  std::vector<long long> total_pop(cfg.generations + 1, 0);
  for (long long r = 0; r < cfg.replicas; ++r) {
    Trajectory traj = simulate_one(m, tables, cfg, r);
    if (condition_extinct && traj.status != TrajStatus::Extinct) continue;
    if (!summary) {
      for (std::size_t n = 0; n < traj.counts.size(); ++n) {
        os << r << "," << n << "," << to_string(traj.status);
        for (int j = 0; j < m.d; ++j) os << "," << traj.counts[n][j];
        os << "\n";
      }
      continue;
    }
    int last = static_cast<int>(traj.counts.size()) - 1;
    for (int g = 0; g <= cfg.generations; ++g) {
      bool recorded = g <= last;
      bool done = g > last || (g == last && traj.status != TrajStatus::Alive);
      if (recorded) {
        ++emitted[g];
        long long tot = traj.counts[g].sum();
        total_pop[g] += tot;
        if (tot > 0) ++alive[g];
      } else if (traj.status == TrajStatus::Extinct) {
        // an extinct walk stays at zero forever; keep counting it
        ++emitted[g];
      }
      if (done && traj.status == TrajStatus::Extinct) ++extinct_cum[g];
      if (done && traj.status == TrajStatus::CapHit) ++cap_cum[g];
    }
  }
  if (summary) {
    os << "generation,emitted,alive,extinct_cum,cap_hit_cum,mean_total\n";
    for (int g = 0; g <= cfg.generations; ++g) {
      double mean = emitted[g] > 0 ? static_cast<double>(total_pop[g]) / emitted[g] : 0.0;
      os << g << "," << emitted[g] << "," << alive[g] << "," << extinct_cum[g] << "," << cap_cum[g]
         << "," << fmt_double(mean) << "\n";
    }
  }
}

struct PipelineFailure : std::runtime_error {
  PipelineFailure(const std::string& stage, const std::string& why)
      : std::runtime_error(why), stage_name(stage) {}
  std::string stage_name;
};

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"finitely supported multi-type branching processes: criticality, extinction, "
               "fixed points above 1, conjugate (tilted) processes, simulation, truncation scans"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version,-V", kVersion);
  bool timings = false;
  app.add_flag("--timings", timings, "append wall time to JSON reports (stderr for CSV commands)");

  std::string path;
  int grid = 9;
  double tol = 1e-10;
  int max_iters = kDefaultMaxIters;
  int fp_index = 0;
  std::string out_path;

  auto* c_validate = app.add_subcommand(
      "validate", "check subcriticality, positive regularity, non-singularity");
  c_validate->add_option("model", path, "model file")->required();

  auto* c_analyze =
      app.add_subcommand("analyze", "mean matrix, Perron root, criticality, witnesses");
  c_analyze->add_option("model", path, "model file")->required();

  auto* c_basin = app.add_subcommand("basin", "classify one log-space point into S0 / SInfty");
  c_basin->add_option("model", path, "model file")->required();
  std::string point_str;
  c_basin->add_option("--point", point_str, "log-space coordinates, comma-separated")->required();
  c_basin->add_option("--max-iters", max_iters, "orbit length budget");

  auto* c_mesh = app.add_subcommand("mesh", "certified basin brackets along a direction mesh, CSV");
  c_mesh->add_option("model", path, "model file")->required();
  c_mesh->add_option("--grid", grid, "directions per axis");
  c_mesh->add_option("--tol", tol, "bracket width tolerance");
  c_mesh->add_option("--out", out_path, "write CSV here instead of stdout");

  auto* c_fixed = app.add_subcommand("fixed-points", "locate all fixed points above 1");
  c_fixed->add_option("model", path, "model file")->required();
  c_fixed->add_option("--grid", grid, "directions per axis");
  c_fixed->add_option("--tol", tol, "acceptance residual");
  std::string residual_grid_path;
  double rg_lo = 0.0, rg_hi = 3.0;
  int rg_steps = 201;
  c_fixed->add_option("--emit-residual-grid", residual_grid_path,
                      "write CSV of (q1, q2, f1-q1, f2-q2) for external plotting (d = 2 only)");
  c_fixed->add_option("--grid-lo", rg_lo, "residual grid lower corner");
  c_fixed->add_option("--grid-hi", rg_hi, "residual grid upper corner");
  c_fixed->add_option("--grid-steps", rg_steps, "residual grid steps per axis");

  auto* c_conj = app.add_subcommand(
      "conjugate", "tilt by a fixed point above 1; writes the tilted model file");
  c_conj->add_option("model", path, "model file")->required();
  c_conj->add_option("--fixed-point-index", fp_index, "which fixed point to tilt by");
  c_conj->add_option("--out", out_path, "write the tilted model here instead of stdout");

  auto* c_vconj = app.add_subcommand(
      "verify-conjugate", "build the conjugate and check the tilt-back identity");
  c_vconj->add_option("model", path, "model file")->required();
  c_vconj->add_option("--fixed-point-index", fp_index, "which fixed point to tilt by");

  auto* c_sim = app.add_subcommand("simulate", "seeded population walks, CSV");
  c_sim->add_option("model", path, "model file")->required();
  int start_type = 1, generations = 10;
  long long pop_cap = 1000000, replicas = 1;
  std::uint64_t seed = 0;
  bool condition_extinct = false, summary = false;
  c_sim->add_option("--start-type", start_type, "starting type, 1-based");
  c_sim->add_option("--generations", generations, "horizon");
  c_sim->add_option("--pop-cap", pop_cap, "stop a walk when total population exceeds this");
  c_sim->add_option("--replicas", replicas, "independent walks");
  c_sim->add_option("--seed", seed, "RNG seed (required: runs are reproducible by default)")
      ->required();
  c_sim->add_flag("--condition-extinct", condition_extinct,
                  "emit only walks that die within the horizon");
  c_sim->add_flag("--summary", summary, "aggregate per generation instead of per walk");
  c_sim->add_option("--out", out_path, "write CSV here instead of stdout");

  auto* c_scan = app.add_subcommand(
      "truncate-scan", "fixed points of successive truncations of a countable-type family");
  c_scan->add_option("family", path, "family file")->required();
  int dmax = 0;
  std::string schedule_str;
  c_scan->add_option("--dmax", dmax, "largest truncation level (default: the tabulated d_max)");
  c_scan->add_option("--schedule", schedule_str,
                     "comma-separated truncation levels (default: doubling up to dmax)");
  c_scan->add_option("--grid", grid, "directions per axis for the inner searches");
  c_scan->add_option("--tol", tol, "fixed-point residual");

  auto* c_pipe = app.add_subcommand(
      "pipeline", "validate, analyze, fixed points, conjugate, tilt-back in one run");
  c_pipe->add_option("model", path, "model file")->required();
  c_pipe->add_option("--fixed-point-index", fp_index, "which fixed point to tilt by");
  c_pipe->add_option("--grid", grid, "directions per axis");
  c_pipe->add_option("--tol", tol, "fixed-point residual");
  c_pipe->add_option("--out", out_path, "also write the tilted model here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  auto t0 = std::chrono::steady_clock::now();
  auto wall_ms = [&t0]() {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
  };

  try {
    if (*c_validate) {
      std::string bytes = read_file(path);
      ProcessModel m = model_from_json_text(bytes);
      ordered_json env = make_envelope("validate", path, bytes);
      int code = 0;
      try {
        ModelAnalysis a = require_hypotheses(m);
        env["outputs"]["hypotheses_ok"] = true;
        env["outputs"]["spectral"] = report_json(a.spectral);
      } catch (const HypothesisError& e) {
        env["outputs"]["hypotheses_ok"] = false;
        env["outputs"]["failed"] = e.failed;
        env["outputs"]["detail"] = e.what();
        env["outputs"]["spectral"] = report_json(analyze_spectral(m));
        code = 1;
      }
      emit(env, timings, wall_ms(), std::cout);
      return code;
    }

    if (*c_analyze) {
      std::string bytes = read_file(path);
      ProcessModel m = model_from_json_text(bytes);
      ordered_json env = make_envelope("analyze", path, bytes);
      SpectralReport rep = analyze_spectral(m);
      env["outputs"]["spectral"] = report_json(rep);
      if (rep.positive_regular && rep.non_singular)
        env["outputs"]["gf_pos_witness"] = report_json(gf_pos_witness(m));
      else
        env["outputs"]["gf_pos_witness"] = nullptr;
      try {
        env["outputs"]["gf_bded_witness"] = report_json(gf_bded_witness(m, rep));
      } catch (const HypothesisError&) {
        env["outputs"]["gf_bded_witness"] = nullptr;
      }
      emit(env, timings, wall_ms(), std::cout);
      return 0;
    }

    if (*c_basin) {
      std::string bytes = read_file(path);
      ProcessModel m = model_from_json_text(bytes);
      std::vector<double> coords = parse_doubles(point_str);
      if (static_cast<int>(coords.size()) != m.d)
        throw UsageError("--point needs " + std::to_string(m.d) + " coordinates");
      LambdaVec lambda = Eigen::Map<Eigen::VectorXd>(coords.data(), m.d);
      ordered_json env = make_envelope("basin", path, bytes);
      BasinContext ctx;
      bool full = true;
      try {
        ModelAnalysis a = require_hypotheses(m);
        ctx = make_basin_context(m, a);
      } catch (const HypothesisError&) {
        ctx = make_basin_context(m);
        full = false;
      }
      BasinVerdict v = classify(ctx, lambda, max_iters);
      env["outputs"]["point"] = json_vec(lambda);
      env["outputs"]["context"] = full ? "full" : "degraded";
      env["outputs"]["basin"] = report_json(v);
      if (v.certificate) env["outputs"]["revalidated"] = revalidate(ctx, lambda, v);
      emit(env, timings, wall_ms(), std::cout);
      return 0;
    }

    if (*c_mesh) {
      std::string bytes = read_file(path);
      ProcessModel m = model_from_json_text(bytes);
      ModelAnalysis a = require_hypotheses(m);
      BasinContext ctx = make_basin_context(m, a);
      MeshResult mesh = lambda_mesh(ctx, grid, tol);
      if (out_path.empty()) {
        write_mesh_csv(mesh, m.d, std::cout);
      } else {
        std::ofstream out = open_out(out_path);
        write_mesh_csv(mesh, m.d, out);
      }
      if (timings) std::cerr << "wall_time_ms " << wall_ms() << "\n";
      return 0;
    }

    if (*c_fixed) {
      std::string bytes = read_file(path);
      ProcessModel m = model_from_json_text(bytes);
      FixedPointOptions opt;
      opt.grid_per_axis = grid;
      opt.tol = tol;
      FixedPointReport rep = find_fixed_points(m, opt);
      ordered_json env = make_envelope("fixed-points", path, bytes);
      env["outputs"]["report"] = report_json(rep);
      ordered_json checks = ordered_json::array();
      for (const auto& p : rep.points) checks.push_back(report_json(verify_fixed_point(m, p.q)));
      env["outputs"]["checks"] = checks;
      if (!residual_grid_path.empty()) {
        if (m.d != 2) throw UsageError("--emit-residual-grid needs a model with d = 2");
        if (rg_steps < 2 || !(rg_hi > rg_lo)) throw UsageError("bad residual grid window");
        std::ofstream out = open_out(residual_grid_path);
        write_residual_grid_csv(m, rg_lo, rg_hi, rg_steps, out);
        env["outputs"]["residual_grid"] = residual_grid_path;
      }
      emit(env, timings, wall_ms(), std::cout);
      return rep.contradicts_theorem ? 1 : 0;
    }

    if (*c_conj) {
      std::string bytes = read_file(path);
      ProcessModel m = model_from_json_text(bytes);
      FixedPointReport rep = find_fixed_points(m, FixedPointOptions{});
      const FixedPoint& fp = pick_fixed_point(rep, fp_index);
      ConjugateModel conj = tilt(m, fp.q);
      std::string text = model_to_json_text(conj.tilted);
      if (out_path.empty()) {
        std::cout << text;
      } else {
        std::ofstream out = open_out(out_path);
        out << text;
        ordered_json env = make_envelope("conjugate", path, bytes);
        env["outputs"]["conjugate"] = report_json(conj);
        env["outputs"]["tilted_model"] = out_path;
        emit(env, timings, wall_ms(), std::cout);
      }
      if (timings && out_path.empty()) std::cerr << "wall_time_ms " << wall_ms() << "\n";
      return 0;
    }

    if (*c_vconj) {
      std::string bytes = read_file(path);
      ProcessModel m = model_from_json_text(bytes);
      FixedPointReport rep = find_fixed_points(m, FixedPointOptions{});
      const FixedPoint& fp = pick_fixed_point(rep, fp_index);
      ConjugateModel conj = tilt(m, fp.q);
      TiltBackRecord rec = verify_tilt_back(conj);
      ordered_json env = make_envelope("verify-conjugate", path, bytes);
      env["outputs"]["fixed_point_index"] = fp_index;
      env["outputs"]["conjugate"] = report_json(conj);
      env["outputs"]["tilt_back"] = report_json(rec);
      emit(env, timings, wall_ms(), std::cout);
      return rec.ok ? 0 : 1;
    }

    if (*c_sim) {
      std::string bytes = read_file(path);
      ProcessModel m = model_from_json_text(bytes);
      if (start_type < 1 || start_type > m.d)
        throw UsageError("--start-type must be in 1.." + std::to_string(m.d));
      if (generations < 1 || pop_cap < 1 || replicas < 1)
        throw UsageError("--generations, --pop-cap, --replicas must be positive");
      SimConfig cfg;
      cfg.start_type = start_type - 1;
      cfg.generations = generations;
      cfg.pop_cap = pop_cap;
      cfg.replicas = replicas;
      cfg.seed = seed;
      if (out_path.empty()) {
        write_simulate_csv(m, cfg, condition_extinct, summary, std::cout);
      } else {
        std::ofstream out = open_out(out_path);
        write_simulate_csv(m, cfg, condition_extinct, summary, out);
      }
      if (timings) std::cerr << "wall_time_ms " << wall_ms() << "\n";
      return 0;
    }

    if (*c_scan) {
      std::string bytes = read_file(path);
      CountableFamily fam = family_from_json_text(bytes);
      int cap = dmax > 0 ? std::min(dmax, fam.d_max) : fam.d_max;
      std::vector<int> schedule;
      if (!schedule_str.empty()) {
        for (int v : parse_ints(schedule_str)) {
          if (v < 1 || v > cap)
            throw UsageError("schedule level " + std::to_string(v) + " outside 1.." +
                             std::to_string(cap));
          schedule.push_back(v);
        }
      } else {
        for (int v = 2; v < cap; v *= 2) schedule.push_back(v);
        if (cap >= 2) schedule.push_back(cap);
        if (schedule.empty()) schedule.push_back(cap);
      }
      FixedPointOptions opt;
      opt.grid_per_axis = grid;
      opt.tol = tol;
      AssumptionsReport assumptions = check_assumptions(fam);
      TruncationScan scan = truncation_scan(fam, schedule, opt);
      ordered_json env = make_envelope("truncate-scan", path, bytes);
      env["outputs"]["schedule"] = schedule;
      env["outputs"]["assumptions"] = report_json(assumptions);
      env["outputs"]["scan"] = report_json(scan);
      emit(env, timings, wall_ms(), std::cout);
      return scan.aborted ? 1 : 0;
    }

    if (*c_pipe) {
      std::string bytes = read_file(path);
      ProcessModel m = model_from_json_text(bytes);
      ordered_json env = make_envelope("pipeline", path, bytes);
      ordered_json& out = env["outputs"];
      int code = 0;
      try {
        ModelAnalysis a = [&] {
          try {
            return require_hypotheses(m);
          } catch (const HypothesisError& e) {
            throw PipelineFailure("validate", e.what());
          }
        }();
        out["spectral"] = report_json(a.spectral);
        out["gf_pos_witness"] = report_json(a.pos);
        out["gf_bded_witness"] = report_json(a.bded);

        FixedPointOptions opt;
        opt.grid_per_axis = grid;
        opt.tol = tol;
        FixedPointReport rep = find_fixed_points(m, opt);
        out["fixed_points"] = report_json(rep);
        ordered_json checks = ordered_json::array();
        for (const auto& p : rep.points) checks.push_back(report_json(verify_fixed_point(m, p.q)));
        out["checks"] = checks;
        if (rep.contradicts_theorem)
          throw PipelineFailure("fixed-points", "hypotheses hold but no fixed point was found");

        const FixedPoint& fp = pick_fixed_point(rep, fp_index);
        out["fixed_point_index"] = fp_index;
        ConjugateModel conj = [&] {
          try {
            return tilt(m, fp.q);
          } catch (const std::exception& e) {
            throw PipelineFailure("conjugate", e.what());
          }
        }();
        out["conjugate"] = report_json(conj);
        if (!out_path.empty()) {
          save_model(conj.tilted, out_path);
          out["tilted_model"] = out_path;
        }

        TiltBackRecord rec = verify_tilt_back(conj);
        out["tilt_back"] = report_json(rec);
        if (!rec.ok) throw PipelineFailure("verify-conjugate", "tilt-back identity failed");
      } catch (const PipelineFailure& e) {
        out["failed_stage"] = e.stage_name;
        out["detail"] = e.what();
        code = 1;
      }
      emit(env, timings, wall_ms(), std::cout);
      return code;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ModelIOError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const HypothesisError& e) {
    std::cerr << "hypothesis failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace mtbp
