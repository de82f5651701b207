#include "mtbp/simulate.hpp"

#include <cmath>
#include <stdexcept>

namespace mtbp {

std::uint64_t rng_mix(std::uint64_t x) {
  std::uint64_t z = x + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rng_key(std::uint64_t seed, std::uint64_t replica, std::uint64_t generation,
                      std::uint64_t individual) {
  return rng_mix(rng_mix(rng_mix(rng_mix(seed) ^ replica) ^ generation) ^ individual);
}

double rng_u01(std::uint64_t seed, std::uint64_t replica, std::uint64_t generation,
               std::uint64_t individual) {
  return static_cast<double>(rng_key(seed, replica, generation, individual) >> 11) * 0x1.0p-53;
}

const char* to_string(TrajStatus s) {
  switch (s) {
    case TrajStatus::Extinct: return "extinct";
    case TrajStatus::CapHit: return "cap-hit";
    case TrajStatus::Alive: return "alive";
  }
  return "?";
}

CumTables make_cum_tables(const ProcessModel& m) {
  CumTables t;
  t.cum.resize(m.d);
  for (int k = 0; k < m.d; ++k) {
    double acc = 0.0;
    for (const auto& e : m.types[k].entries) {
      acc += e.prob;
      t.cum[k].push_back(acc);
    }
    // guard the top so u close to 1 always lands in the last bucket
    if (!t.cum[k].empty()) t.cum[k].back() = std::max(t.cum[k].back(), 1.0);
  }
  return t;
}

namespace {

int pick_entry(const std::vector<double>& cum, double u) {
  // cum is short in every bundled model; linear scan is the simple,
  // branch-predictable choice.
  for (std::size_t i = 0; i < cum.size(); ++i)
    if (u < cum[i]) return static_cast<int>(i);
  return static_cast<int>(cum.size()) - 1;
}

}  // namespace

Trajectory simulate_one(const ProcessModel& m, const CumTables& tables, const SimConfig& cfg,
                        long long replica_index) {
  if (cfg.start_type < 0 || cfg.start_type >= m.d)
    throw std::invalid_argument("start type out of range");
  if (cfg.generations < 1 || cfg.pop_cap < 1) throw std::invalid_argument("bad simulation config");
  Trajectory traj;
  Eigen::VectorXi cur = Eigen::VectorXi::Zero(m.d);
  cur[cfg.start_type] = 1;
  traj.counts.push_back(cur);
  for (int gen = 0; gen < cfg.generations; ++gen) {
    long long total = cur.sum();
    if (total == 0) {
      traj.status = TrajStatus::Extinct;
      return traj;
    }
    // Individuals are visited in canonical order: by type, then by index
    // within the type, with one running counter across the generation.
    Eigen::VectorXi next = Eigen::VectorXi::Zero(m.d);
    std::uint64_t individual = 0;
    for (int k = 0; k < m.d; ++k) {
      for (int c = 0; c < cur[k]; ++c, ++individual) {
        double u = rng_u01(cfg.seed, static_cast<std::uint64_t>(replica_index),
                           static_cast<std::uint64_t>(gen), individual);
        int ei = pick_entry(tables.cum[k], u);
        const Eigen::VectorXi& counts = m.types[k].entries[ei].counts;
        next += counts;
      }
    }
    cur = next;
    traj.counts.push_back(cur);
    if (cur.sum() > cfg.pop_cap) {
      traj.status = TrajStatus::CapHit;
      return traj;
    }
  }
  traj.status = cur.sum() == 0 ? TrajStatus::Extinct : TrajStatus::Alive;
  return traj;
}

Trajectory simulate_one(const ProcessModel& m, const SimConfig& cfg, long long replica_index) {
  CumTables tables = make_cum_tables(m);
  return simulate_one(m, tables, cfg, replica_index);
}

McExtinction mc_extinction(const ProcessModel& m, const SimConfig& cfg) {
  if (cfg.replicas < 1) throw std::invalid_argument("bad simulation config");
  McExtinction out;
  out.cfg = cfg;
  out.estimate.assign(m.d, 0.0);
  out.se.assign(m.d, 0.0);
  out.extinct.assign(m.d, 0);
  out.cap_hit.assign(m.d, 0);
  out.alive.assign(m.d, 0);
  CumTables tables = make_cum_tables(m);
  for (int t = 0; t < m.d; ++t) {
    SimConfig sub = cfg;
    sub.start_type = t;
    sub.seed = rng_mix(rng_mix(cfg.seed) ^ static_cast<std::uint64_t>(t));
    for (long long r = 0; r < cfg.replicas; ++r) {
      Trajectory traj = simulate_one(m, tables, sub, r);
      switch (traj.status) {
        case TrajStatus::Extinct: ++out.extinct[t]; break;
        case TrajStatus::CapHit: ++out.cap_hit[t]; break;
        case TrajStatus::Alive: ++out.alive[t]; break;
      }
    }
    double p = static_cast<double>(out.extinct[t]) / static_cast<double>(cfg.replicas);
    out.estimate[t] = p;
    out.se[t] = std::sqrt(p * (1.0 - p) / static_cast<double>(cfg.replicas));
  }
  return out;
}

namespace {

// Sparse multivariate polynomial over a shared denominator: monomial
// (count vector, total <= cap) -> BigInt numerator. Keeping one denominator
// per polynomial avoids a gcd per coefficient operation.
struct Poly {
  std::map<std::vector<int>, BigInt> coef;
  BigInt den = BigInt(1);
};

long long mono_total(const std::vector<int>& x) {
  long long t = 0;
  for (int v : x) t += v;
  return t;
}

// c += a * b truncated to total degree <= cap; denominators multiply.
Poly poly_mul(const Poly& a, const Poly& b, long long cap) {
  Poly out;
  out.den = a.den * b.den;
  const int d = a.coef.empty() ? 0 : static_cast<int>(a.coef.begin()->first.size());
  std::vector<int> sum(d);
  for (const auto& [xa, ca] : a.coef) {
    long long ta = mono_total(xa);
    for (const auto& [xb, cb] : b.coef) {
      if (ta + mono_total(xb) > cap) continue;
      for (int i = 0; i < d; ++i) sum[i] = xa[i] + xb[i];
      auto [it, fresh] = out.coef.try_emplace(sum, BigInt(0));
      it->second.add_mul(ca, cb);
      (void)fresh;
    }
    if (out.coef.size() > kExactLawMaxTerms)
      throw std::invalid_argument("law truncation exceeds the term budget");
  }
  return out;
}

Poly poly_one(int d) {
  Poly p;
  p.coef.emplace(std::vector<int>(d, 0), BigInt(1));
  return p;
}

}  // namespace

ExactLaw exact_generation_law(const ProcessModel& m, int start_type, int n, long long pop_cap) {
  if (start_type < 0 || start_type >= m.d) throw std::invalid_argument("start type out of range");
  if (n < 1 || n > kExactLawMaxGen) throw std::invalid_argument("generation index beyond the cap");
  if (pop_cap < 1 || pop_cap > kExactLawMaxCap)
    throw std::invalid_argument("population cap beyond the bound");
  if (!m.rational()) throw std::invalid_argument("exact law needs a rational-mode model");
  const int d = m.d;

  // F[j] holds the truncated polynomial whose coefficient at monomial x is
  // the probability of population vector x at the current depth, started
  // from type j. Depth 1 is the offspring law itself.
  std::vector<Poly> F(d);
  for (int k = 0; k < d; ++k) {
    BigInt den(1);
    for (const auto& e : m.types[k].entries)
      den = den / BigInt::gcd(den, e.prob_exact->den()) * e.prob_exact->den();
    F[k].den = den;
    for (const auto& e : m.types[k].entries) {
      std::vector<int> x(e.counts.data(), e.counts.data() + d);
      if (mono_total(x) > pop_cap) continue;  // ends up in the escaped mass
      BigInt q, r;
      BigInt::divmod(den, e.prob_exact->den(), q, r);
      F[k].coef[x] = e.prob_exact->num() * q;
    }
  }

  for (int depth = 2; depth <= n; ++depth) {
    std::vector<Poly> G(d);
    for (int k = 0; k < d; ++k) {
      // Substitute the depth-(n-1) polynomials into the offspring law of k:
      // sum over entries p * prod_j F[j]^{x_j}, truncated throughout.
      std::vector<Poly> terms;
      std::vector<Rational> probs;
      for (const auto& e : m.types[k].entries) {
        Poly term = poly_one(d);
        for (int j = 0; j < d; ++j)
          for (int c = 0; c < e.counts[j]; ++c) term = poly_mul(term, F[j], pop_cap);
        terms.push_back(std::move(term));
        probs.push_back(*e.prob_exact);
      }
      BigInt den(1);
      for (std::size_t i = 0; i < terms.size(); ++i) {
        BigInt td = terms[i].den * probs[i].den();
        den = den / BigInt::gcd(den, td) * td;
      }
      Poly out;
      out.den = den;
      for (std::size_t i = 0; i < terms.size(); ++i) {
        BigInt scale_den = terms[i].den * probs[i].den();
        BigInt scale, rr;
        BigInt::divmod(den, scale_den, scale, rr);
        BigInt factor = probs[i].num() * scale;
        for (const auto& [x, c] : terms[i].coef) {
          auto [it, fresh] = out.coef.try_emplace(x, BigInt(0));
          it->second.add_mul(c, factor);
          (void)fresh;
        }
      }
      G[k] = std::move(out);
      if (G[k].coef.size() > kExactLawMaxTerms)
        throw std::invalid_argument("law truncation exceeds the term budget");
    }
    F = std::move(G);
  }

  ExactLaw law;
  law.n = n;
  law.start_type = start_type;
  law.pop_cap = pop_cap;
  Rational total(0);
  for (const auto& [x, c] : F[start_type].coef) {
    Rational p(c, F[start_type].den);
    law.mass.emplace_back(x, p);
    total = total + p;
  }
  law.escaped = Rational(1) - total;
  return law;
}

double law_pgf(const ExactLaw& law, const QVec& q) {
  double acc = 0.0;
  for (const auto& [x, p] : law.mass) {
    double term = p.to_double();
    for (std::size_t j = 0; j < x.size(); ++j) term *= pow_int(q[static_cast<int>(j)], x[j]);
    acc += term;
  }
  return acc;
}

}  // namespace mtbp
