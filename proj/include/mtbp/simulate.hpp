#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "mtbp/model.hpp"

namespace mtbp {

// Counter-based generator: every variate is a pure function of
// (seed, replica, generation, individual), so replicas and generations can
// be evaluated in any order with identical results. mix is the splitmix64
// output stage applied to x plus the golden-gamma increment:
//   z = x + 0x9e3779b97f4a7c15
//   z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
//   z = (z ^ (z >> 27)) * 0x94d049bb133111eb
//   return z ^ (z >> 31)
// key(seed, r, g, i) = mix(mix(mix(mix(seed) ^ r) ^ g) ^ i), and the variate
// is (key >> 11) * 2^-53 in [0, 1).
std::uint64_t rng_mix(std::uint64_t x);
std::uint64_t rng_key(std::uint64_t seed, std::uint64_t replica, std::uint64_t generation,
                      std::uint64_t individual);
double rng_u01(std::uint64_t seed, std::uint64_t replica, std::uint64_t generation,
               std::uint64_t individual);

struct SimConfig {
  int start_type = 0;  // 0-based type index
  int generations = 1;
  long long pop_cap = 1000000;
  long long replicas = 1;
  std::uint64_t seed = 0;
};

enum class TrajStatus { Extinct, CapHit, Alive };
const char* to_string(TrajStatus s);

struct Trajectory {
  // counts[n] is the population vector of generation n; counts[0] is the
  // starting individual. When the cap is hit the offending generation is
  // still recorded in full before the walk stops.
  std::vector<Eigen::VectorXi> counts;
  TrajStatus status = TrajStatus::Alive;
};

// Inverse-CDF tables, one cumulative row per type.
struct CumTables {
  std::vector<std::vector<double>> cum;
};
CumTables make_cum_tables(const ProcessModel& m);

Trajectory simulate_one(const ProcessModel& m, const CumTables& tables, const SimConfig& cfg,
                        long long replica_index);
Trajectory simulate_one(const ProcessModel& m, const SimConfig& cfg, long long replica_index);

struct McExtinction {
  // Estimates indexed by start type; cap hits are counted as non-extinct,
  // which biases estimates downward. The counts make the bias visible.
  std::vector<double> estimate;
  std::vector<double> se;
  std::vector<long long> extinct;
  std::vector<long long> cap_hit;
  std::vector<long long> alive;
  SimConfig cfg;
};

// Runs cfg.replicas walks per start type; the per-type substream seed is
// rng_mix(rng_mix(seed) ^ type).
McExtinction mc_extinction(const ProcessModel& m, const SimConfig& cfg);

struct ExactLaw {
  // Joint law of the generation-n population vector, truncated to total
  // population <= pop_cap. Coefficients are exact: truncation only removes
  // monomials above the cap, never perturbs the retained ones.
  std::vector<std::pair<std::vector<int>, Rational>> mass;  // lex-sorted support
  Rational escaped;  // 1 - retained mass
  int n = 0;
  int start_type = 0;
  long long pop_cap = 0;
};

inline constexpr int kExactLawMaxGen = 3;
inline constexpr long long kExactLawMaxCap = 64;
inline constexpr std::size_t kExactLawMaxTerms = 200000;

ExactLaw exact_generation_law(const ProcessModel& m, int start_type, int n, long long pop_cap);

// Sum of mass * prod q^x in double precision; PGF of the truncated law.
double law_pgf(const ExactLaw& law, const QVec& q);

}  // namespace mtbp
