#pragma once

// Shared fixtures: independently computed reference values and generators
// used across the test binaries. Everything here is either closed-form
// arithmetic or a brute-force recomputation kept deliberately separate from
// the library's own algorithms.

#include <cmath>
#include <string>
#include <vector>

#include "mtbp/model.hpp"
#include "mtbp/simulate.hpp"

namespace oracles {

inline std::string data_path(const std::string& name) {
  return std::string(MTBP_DATA_DIR) + "/" + name;
}

// On the diagonal q1 = q2 = q the two-type benchmark reduces to the cubic
// q^3 + q^2 + 26 q - 49 = 0 (after clearing the common denominator 100 and
// dividing by the symmetric factors); its unique root above 1, found by
// plain bisection.
inline double diagonal_root() {
  auto cubic = [](double q) { return q * q * q + q * q + 26.0 * q - 49.0; };
  double lo = 1.0, hi = 2.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (cubic(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// The off-diagonal pair lies on the invariant line q1 + q2 = 3 with product
// (25 - sqrt(429)) / 2, which gives the closed forms below.
inline double pair_hi() { return 0.5 * (3.0 + std::sqrt(2.0 * std::sqrt(429.0) - 41.0)); }
inline double pair_lo() { return 0.5 * (3.0 - std::sqrt(2.0 * std::sqrt(429.0) - 41.0)); }

// Central finite differences, step tuned for ~1e-7 truncation error on
// polynomial components of moderate degree.
inline Eigen::MatrixXd fd_jacobian(const mtbp::ProcessModel& m, const mtbp::QVec& q,
                                   double h = 1e-6) {
  Eigen::MatrixXd J(m.d, m.d);
  for (int j = 0; j < m.d; ++j) {
    mtbp::QVec qp = q, qm = q;
    qp[j] += h;
    qm[j] -= h;
    Eigen::VectorXd diff = (mtbp::eval_f<double>(m, qp) - mtbp::eval_f<double>(m, qm)) / (2.0 * h);
    J.col(j) = diff;
  }
  return J;
}

// Deterministic random model: each type gets a death entry plus a handful of
// sparse offspring entries with bounded counts. mass_scale < 1 keeps the
// model subcritical-ish; the caller decides what properties to demand.
inline mtbp::ProcessModel random_model(std::uint64_t seed, int d, int max_count = 3,
                                       double mass_scale = 0.6) {
  using mtbp::rng_u01;
  mtbp::ProcessModel m;
  m.d = d;
  m.types.resize(d);
  std::uint64_t ctr = 0;
  for (int k = 0; k < d; ++k) {
    int n_entries = 2 + static_cast<int>(rng_u01(seed, 1, k, ctr++) * 3.0);
    std::vector<Eigen::VectorXi> counts;
    // an entry with one child of the next type keeps the support connected
    Eigen::VectorXi chain = Eigen::VectorXi::Zero(d);
    chain[(k + 1) % d] = 1;
    counts.push_back(chain);
    // one entry with two children in some coordinate for non-singularity
    Eigen::VectorXi twin = Eigen::VectorXi::Zero(d);
    twin[static_cast<int>(rng_u01(seed, 2, k, ctr++) * d)] = 2;
    counts.push_back(twin);
    for (int e = 0; e < n_entries; ++e) {
      Eigen::VectorXi c = Eigen::VectorXi::Zero(d);
      for (int j = 0; j < d; ++j)
        c[j] = static_cast<int>(rng_u01(seed, 3, k * 131 + e, j) * (max_count + 1));
      bool dup = false;
      for (const auto& have : counts) dup = dup || (have == c);
      if (!dup && c.sum() > 0) counts.push_back(c);
    }
    double remaining = mass_scale;
    mtbp::OffspringDistribution dist;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      double w = rng_u01(seed, 4, k, ctr++) * remaining * 0.5;
      remaining -= w;
      dist.entries.push_back({counts[i], w, std::nullopt});
    }
    Eigen::VectorXi death = Eigen::VectorXi::Zero(d);
    dist.entries.push_back({death, 1.0 - (mass_scale - remaining), std::nullopt});
    m.types[k] = std::move(dist);
  }
  mtbp::validate_model(m);
  return m;
}

}  // namespace oracles
