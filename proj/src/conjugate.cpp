#include "mtbp/conjugate.hpp"

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "mtbp/simulate.hpp"

namespace mtbp {

namespace {

ProcessModel tilt_with_residuals(const ProcessModel& m, const QVec& w,
                                 Eigen::VectorXd* residuals) {
  if (w.size() != m.d) throw std::invalid_argument("weight dimension does not match model");
  for (int i = 0; i < m.d; ++i)
    if (!(w[i] > 0.0)) throw std::invalid_argument("tilt weights must be strictly positive");
  ProcessModel out;
  out.d = m.d;
  out.types.resize(m.d);
  if (residuals) residuals->setZero(m.d);
  for (int k = 0; k < m.d; ++k) {
    double sum = 0.0;
    for (const auto& e : m.types[k].entries) {
      double p = e.prob;
      for (int j = 0; j < m.d; ++j) p *= pow_int(w[j], e.counts[j]);
      p /= w[k];
      out.types[k].entries.push_back(OffspringEntry{e.counts, p, std::nullopt});
      sum += p;
    }
    if (residuals) (*residuals)[k] = std::abs(sum - 1.0);
    for (auto& e : out.types[k].entries) e.prob /= sum;
  }
  validate_model(out);
  return out;
}

}  // namespace

ProcessModel tilt_by(const ProcessModel& m, const QVec& w) {
  return tilt_with_residuals(m, w, nullptr);
}

ProcessModel tilt_by_exact(const ProcessModel& m, const std::vector<Rational>& w) {
  if (static_cast<int>(w.size()) != m.d)
    throw std::invalid_argument("weight dimension does not match model");
  if (!m.rational()) throw std::invalid_argument("exact tilt needs a rational-mode model");
  for (const Rational& v : w)
    if (v.sign() <= 0) throw std::invalid_argument("tilt weights must be strictly positive");
  ProcessModel out;
  out.d = m.d;
  out.types.resize(m.d);
  for (int k = 0; k < m.d; ++k) {
    Rational sum(0);
    std::vector<Rational> probs;
    for (const auto& e : m.types[k].entries) {
      Rational p = *e.prob_exact;
      for (int j = 0; j < m.d; ++j) p = p * Rational::pow(w[j], e.counts[j]);
      p = p * w[k].inverse();
      probs.push_back(p);
      sum = sum + p;
    }
    // A genuine fixed-point weight makes each sum exactly one; an arbitrary
    // weight needs the exact division to stay a probability vector.
    for (std::size_t i = 0; i < probs.size(); ++i) {
      Rational p = probs[i] * sum.inverse();
      out.types[k].entries.push_back(
          OffspringEntry{m.types[k].entries[i].counts, p.to_double(), p});
    }
  }
  validate_model(out);
  return out;
}

namespace {

// Best rational approximation via continued fractions, denominator capped.
// Returns true only when p/q reproduces x to near machine precision.
bool rationalize(double x, long long max_den, Rational* out) {
  if (!(x > 0.0) || !std::isfinite(x)) return false;
  long long p0 = 1, q0 = 0;  // h_{-1}/k_{-1}
  long long p1 = 0, q1 = 1;  // h_{-2}/k_{-2} rotated in below
  double rem = x;
  for (int it = 0; it < 64; ++it) {
    double fl = std::floor(rem);
    if (fl > 9e17) return false;
    long long a = static_cast<long long>(fl);
    long long p2 = a * p0 + p1;
    long long q2 = a * q0 + q1;
    if (q2 > max_den || p2 < 0 || q2 < 0) return false;
    p1 = p0;
    q1 = q0;
    p0 = p2;
    q0 = q2;
    double approx = static_cast<double>(p0) / static_cast<double>(q0);
    if (std::abs(approx - x) <= 1e-13 * std::max(1.0, std::abs(x))) {
      *out = Rational(BigInt(p0), BigInt(q0));
      return true;
    }
    double frac = rem - fl;
    if (frac < 1e-15) return false;
    rem = 1.0 / frac;
  }
  return false;
}

SpectralReport tilted_spectral_report(const ProcessModel& tilted) { return analyze_spectral(tilted); }

}  // namespace

ConjugateModel tilt(const ProcessModel& m, const QVec& A, double fixed_tol) {
  if (A.size() != m.d) throw std::invalid_argument("fixed-point dimension does not match model");
  for (int i = 0; i < m.d; ++i)
    if (!(A[i] > 1.0))
      throw std::invalid_argument(
          "tilt needs a fixed point strictly above one in every coordinate");
  double res = (eval_f<double>(m, A) - A).cwiseAbs().maxCoeff();
  if (res > fixed_tol) {
    std::ostringstream os;
    os << "supplied point is not a fixed point: residual " << res;
    throw std::invalid_argument(os.str());
  }

  // Promote to exact mode when every coordinate certifies as a small
  // rational and the fixed-point identity survives exact recomputation.
  if (m.rational()) {
    std::vector<Rational> Ar(m.d);
    bool all = true;
    for (int i = 0; i < m.d && all; ++i) all = rationalize(A[i], 1000000, &Ar[i]);
    if (all) {
      VecX<Rational> q(m.d);
      for (int i = 0; i < m.d; ++i) q[i] = Ar[i];
      VecX<Rational> fq = eval_f<Rational>(m, q);
      bool fixed = true;
      for (int i = 0; i < m.d; ++i)
        if (!(fq[i] == q[i])) {
          fixed = false;
          break;
        }
      if (fixed) return tilt_exact(m, Ar);
    }
  }

  ConjugateModel conj;
  conj.base = m;
  conj.A = A;
  conj.fixed_residual = res;
  conj.tilted = tilt_with_residuals(m, A, &conj.normalization_residuals);
  conj.extinction_vec = A.cwiseInverse();
  conj.tilted_spectral = tilted_spectral_report(conj.tilted);
  return conj;
}

ConjugateModel tilt_exact(const ProcessModel& m, const std::vector<Rational>& A) {
  if (static_cast<int>(A.size()) != m.d)
    throw std::invalid_argument("fixed-point dimension does not match model");
  if (!m.rational()) throw std::invalid_argument("exact tilt needs a rational-mode model");
  VecX<Rational> q(m.d);
  for (int i = 0; i < m.d; ++i) {
    if (!(Rational(1) < A[i]))
      throw std::invalid_argument(
          "tilt needs a fixed point strictly above one in every coordinate");
    q[i] = A[i];
  }
  VecX<Rational> fq = eval_f<Rational>(m, q);
  for (int i = 0; i < m.d; ++i)
    if (!(fq[i] == q[i]))
      throw std::invalid_argument("supplied rational point is not an exact fixed point");

  ConjugateModel conj;
  conj.base = m;
  conj.exact = true;
  conj.A_exact = A;
  conj.A.resize(m.d);
  for (int i = 0; i < m.d; ++i) conj.A[i] = A[i].to_double();
  conj.fixed_residual = 0.0;
  conj.tilted = tilt_by_exact(m, A);
  conj.normalization_residuals = Eigen::VectorXd::Zero(m.d);
  conj.extinction_vec = conj.A.cwiseInverse();
  conj.tilted_spectral = tilted_spectral_report(conj.tilted);
  return conj;
}

ExtinctionIterate extinction_vector(const ProcessModel& m, double tol, int max_iters) {
  ExtinctionIterate out;
  out.a = QVec::Zero(m.d);
  for (out.iters = 0; out.iters < max_iters; ++out.iters) {
    QVec next = eval_f<double>(m, out.a);
    out.last_step = (next - out.a).cwiseAbs().maxCoeff();
    out.a = next;
    if (out.last_step <= tol) break;
  }
  return out;
}

ProcessModel condition_on_extinction(const ProcessModel& m) {
  ExtinctionIterate ext = extinction_vector(m);
  return tilt_by(m, ext.a);
}

TiltBackRecord verify_tilt_back(const ConjugateModel& conj) {
  TiltBackRecord rec;
  rec.exact = conj.exact;

  ExtinctionIterate ext = extinction_vector(conj.tilted);
  rec.ext_iters = ext.iters;
  rec.ext_residual = (ext.a - conj.extinction_vec).cwiseAbs().maxCoeff();
  rec.ext_ok = rec.ext_residual <= 1e-9;

  if (conj.exact) {
    // The extinction vector of the tilted model is exactly 1/A, so the
    // conditioning tilt inverts the construction tilt coordinate for
    // coordinate; rational arithmetic cancels the exponents identically.
    std::vector<Rational> a(conj.A_exact.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = conj.A_exact[i].inverse();
    ProcessModel back = tilt_by_exact(conj.tilted, a);
    rec.exact_equal = true;
    Rational worst(0);
    for (int k = 0; k < back.d; ++k)
      for (std::size_t i = 0; i < back.types[k].entries.size(); ++i) {
        Rational diff =
            (*back.types[k].entries[i].prob_exact - *conj.base.types[k].entries[i].prob_exact)
                .abs();
        if (!diff.is_zero()) rec.exact_equal = false;
        if (worst < diff) {
          worst = diff;
          std::ostringstream os;
          os << "type " << (k + 1) << " entry " << i;
          rec.worst_entry = os.str();
        }
      }
    rec.entry_residual = worst.to_double();
    rec.ok = rec.ext_ok && rec.exact_equal;
    return rec;
  }

  ProcessModel back = tilt_by(conj.tilted, conj.extinction_vec);
  rec.entry_residual = 0.0;
  for (int k = 0; k < back.d; ++k)
    for (std::size_t i = 0; i < back.types[k].entries.size(); ++i) {
      double diff =
          std::abs(back.types[k].entries[i].prob - conj.base.types[k].entries[i].prob);
      if (diff > rec.entry_residual) {
        rec.entry_residual = diff;
        std::ostringstream os;
        os << "type " << (k + 1) << " entry " << i;
        rec.worst_entry = os.str();
      }
    }
  rec.ok = rec.ext_ok && rec.entry_residual <= 1e-12;
  return rec;
}

ConditionedLawReport conditioned_law_mc(const ConjugateModel& conj, int generations,
                                        long long replicas, std::uint64_t seed, int start_type) {
  if (generations < 1 || replicas < 1) throw std::invalid_argument("bad comparison parameters");
  if (start_type < 0 || start_type >= conj.base.d)
    throw std::invalid_argument("start type out of range");
  if (!conj.base.rational())
    throw std::invalid_argument("conditioned-law comparison needs a rational base model");

  ConditionedLawReport rep;
  rep.replicas = replicas;
  rep.generations = generations;
  rep.start_type = start_type;
  rep.law_cap = kExactLawMaxCap;
  rep.expected_rate = 1.0 / conj.A[start_type];

  SimConfig cfg;
  cfg.start_type = start_type;
  cfg.generations = generations;
  cfg.pop_cap = rep.law_cap;
  cfg.replicas = replicas;
  cfg.seed = seed;
  CumTables tables = make_cum_tables(conj.tilted);

  const int gens_compared = std::min(generations, 3);
  const int d = conj.base.d;
  std::vector<std::map<std::vector<int>, long long>> emp(gens_compared);
  for (long long r = 0; r < replicas; ++r) {
    Trajectory traj = simulate_one(conj.tilted, tables, cfg, r);
    if (traj.status == TrajStatus::CapHit) {
      ++rep.cap_hit;
      continue;
    }
    if (traj.status != TrajStatus::Extinct) continue;
    ++rep.accepted;
    for (int n = 1; n <= gens_compared; ++n) {
      std::vector<int> x(d, 0);
      if (n < static_cast<int>(traj.counts.size()))
        for (int j = 0; j < d; ++j) x[j] = traj.counts[n][j];
      ++emp[n - 1][x];
    }
  }
  if (rep.accepted == 0)
    throw std::runtime_error("no replica went extinct in the horizon; raise the replica count");

  rep.acceptance_rate = static_cast<double>(rep.accepted) / static_cast<double>(replicas);
  rep.acceptance_se = std::sqrt(rep.acceptance_rate * (1.0 - rep.acceptance_rate) /
                                static_cast<double>(replicas));

  for (int n = 1; n <= gens_compared; ++n) {
    ExactLaw law = exact_generation_law(conj.base, start_type, n, rep.law_cap);
    double tv = 0.0;
    const auto& e = emp[n - 1];
    double denom = static_cast<double>(rep.accepted);
    std::map<std::vector<int>, double> exact;
    for (const auto& [x, p] : law.mass) exact[x] = p.to_double();
    for (const auto& [x, p] : exact) {
      auto it = e.find(x);
      double emp_p = it == e.end() ? 0.0 : static_cast<double>(it->second) / denom;
      tv += std::abs(emp_p - p);
    }
    for (const auto& [x, c] : e)
      if (exact.find(x) == exact.end()) tv += static_cast<double>(c) / denom;
    tv += law.escaped.to_double();
    rep.tv.push_back(0.5 * tv);
  }
  return rep;
}

}  // namespace mtbp
