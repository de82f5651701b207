#include "mtbp/basins.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

namespace mtbp {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::S0: return "S0";
    case Verdict::SInfty: return "SInfty";
    case Verdict::Undecided: return "Undecided";
  }
  return "?";
}

const char* to_string(CertKind k) {
  switch (k) {
    case CertKind::Monotone: return "monotone";
    case CertKind::EpsBox: return "eps-box";
    case CertKind::CBox: return "c-box";
    case CertKind::Saturation: return "saturation";
  }
  return "?";
}

const char* to_string(CertDirection d) {
  return d == CertDirection::Below ? "below" : "above";
}

BasinContext make_basin_context(const ProcessModel& m, const ModelAnalysis& a) {
  BasinContext ctx;
  ctx.model = &m;
  ctx.cache = make_eval_cache(m);
  ctx.has_eps_box = true;
  ctx.lambda0 = a.bded.lambda0;
  ctx.has_c_box = true;
  ctx.C = a.pos.C;
  return ctx;
}

BasinContext make_basin_context(const ProcessModel& m) {
  BasinContext ctx;
  ctx.model = &m;
  ctx.cache = make_eval_cache(m);
  auto [pr, prN] = check_positive_regular(m);
  auto [ns, nsK] = check_non_singular(m);
  (void)prN;
  (void)nsK;
  if (pr && ns) {
    GfPosWitness pos = gf_pos_witness(m);
    ctx.has_c_box = true;
    ctx.C = pos.C;
  }
  SpectralReport rep = analyze_spectral(m);
  if (rep.criticality == Criticality::Subcritical && pr) {
    try {
      GfBdedWitness bded = gf_bded_witness(m, rep);
      ctx.has_eps_box = true;
      ctx.lambda0 = bded.lambda0;
    } catch (const HypothesisError&) {
      // no practical margin; classify still works through monotone certs
    }
  }
  return ctx;
}

namespace {

// Componentwise order with at least one strict coordinate.
bool strictly_below(const LambdaVec& a, const LambdaVec& b) {
  bool one = false;
  for (int i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
    if (a[i] < b[i]) one = true;
  }
  return one;
}

bool saturated_log(const LambdaVec& a) {
  for (int i = 0; i < a.size(); ++i)
    if (!std::isfinite(a[i]) || a[i] > 1e300) return true;
  return false;
}

bool in_eps_box(const BasinContext& ctx, const LambdaVec& a) {
  if (!ctx.has_eps_box) return false;
  for (int i = 0; i < a.size(); ++i)
    if (a[i] > ctx.lambda0[i]) return false;
  return true;
}

bool in_c_box(const BasinContext& ctx, const LambdaVec& a) {
  return ctx.has_c_box && a.minCoeff() >= ctx.C;
}

}  // namespace

BasinVerdict classify(const BasinContext& ctx, const LambdaVec& lambda, int max_iters) {
  if (lambda.size() != ctx.model->d)
    throw std::invalid_argument("point dimension does not match model");
  for (int i = 0; i < lambda.size(); ++i)
    if (!(lambda[i] >= 0.0))
      throw std::invalid_argument("classify expects a point in the closed positive orthant");

  BasinVerdict out;
  std::deque<LambdaVec> window;  // orbit[n - window.size() .. n - 1]
  LambdaVec cur = lambda;

  // The starting point may already sit in an absorbing box.
  if (in_eps_box(ctx, cur)) {
    out.verdict = Verdict::S0;
    out.certificate = BasinCertificate{CertKind::EpsBox, 0, 0, CertDirection::Below};
    return out;
  }
  if (in_c_box(ctx, cur)) {
    out.verdict = Verdict::SInfty;
    out.certificate = BasinCertificate{CertKind::CBox, 0, 0, CertDirection::Above};
    return out;
  }

  for (int n = 1; n <= max_iters; ++n) {
    window.push_back(cur);
    if (static_cast<int>(window.size()) > kCompareWindow) window.pop_front();
    LambdaVec next = eval_g(*ctx.model, ctx.cache, cur);
    out.orbit_len = n;

    if (saturated_log(next)) {
      out.verdict = Verdict::SInfty;
      out.certificate = BasinCertificate{CertKind::Saturation, 0, n, CertDirection::Above};
      return out;
    }
    if (in_eps_box(ctx, next)) {
      out.verdict = Verdict::S0;
      out.certificate = BasinCertificate{CertKind::EpsBox, 0, n, CertDirection::Below};
      return out;
    }
    if (in_c_box(ctx, next)) {
      out.verdict = Verdict::SInfty;
      out.certificate = BasinCertificate{CertKind::CBox, 0, n, CertDirection::Above};
      return out;
    }
    for (int back = 0; back < static_cast<int>(window.size()); ++back) {
      const LambdaVec& ref = window[window.size() - 1 - back];
      int k_offset = n - 1 - back;
      if (strictly_below(next, ref)) {
        out.verdict = Verdict::S0;
        out.certificate =
            BasinCertificate{CertKind::Monotone, back + 1, k_offset, CertDirection::Below};
        return out;
      }
      if (strictly_below(ref, next)) {
        out.verdict = Verdict::SInfty;
        out.certificate =
            BasinCertificate{CertKind::Monotone, back + 1, k_offset, CertDirection::Above};
        return out;
      }
    }
    cur = next;
  }
  out.verdict = Verdict::Undecided;
  return out;
}

bool revalidate(const BasinContext& ctx, const LambdaVec& lambda, const BasinVerdict& v) {
  if (v.verdict == Verdict::Undecided || !v.certificate) return v.verdict == Verdict::Undecided;
  const BasinCertificate& c = *v.certificate;
  LambdaVec x = lambda;
  for (int i = 0; i < c.k_offset; ++i) x = eval_g(*ctx.model, ctx.cache, x);
  switch (c.kind) {
    case CertKind::EpsBox:
      return v.verdict == Verdict::S0 && in_eps_box(ctx, x);
    case CertKind::CBox:
      return v.verdict == Verdict::SInfty && in_c_box(ctx, x);
    case CertKind::Saturation:
      return v.verdict == Verdict::SInfty && saturated_log(x);
    case CertKind::Monotone: {
      LambdaVec y = x;
      for (int i = 0; i < c.m; ++i) y = eval_g(*ctx.model, ctx.cache, y);
      if (c.direction == CertDirection::Below)
        return v.verdict == Verdict::S0 && strictly_below(y, x);
      return v.verdict == Verdict::SInfty && strictly_below(x, y);
    }
  }
  return false;
}

RayPoint ray_bisect(const BasinContext& ctx, const Eigen::VectorXd& u, double tol) {
  const int d = ctx.model->d;
  if (u.size() != d) throw std::invalid_argument("direction dimension does not match model");
  double norm = u.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("direction must be nonzero");
  Eigen::VectorXd dir = u / norm;
  bool face = false;
  for (int i = 0; i < d; ++i) {
    if (dir[i] < 0.0) throw std::invalid_argument("direction must have non-negative coordinates");
    if (dir[i] == 0.0) face = true;
  }
  if (!ctx.has_eps_box || !ctx.has_c_box)
    throw HypothesisError("ray bisection needs both absorbing-box witnesses",
                          {"subcriticality"});
  const int iters = face ? 4 * kDefaultMaxIters : kDefaultMaxIters;

  RayPoint rp;
  rp.u = dir;

  // Largest radius whose whole segment sits inside the eps-box.
  double r_lo = std::numeric_limits<double>::infinity();
  for (int i = 0; i < d; ++i)
    if (dir[i] > 0.0) r_lo = std::min(r_lo, ctx.lambda0[i] / dir[i]);
  BasinVerdict lo_v = classify(ctx, r_lo * dir, iters);
  if (lo_v.verdict != Verdict::S0)
    throw HypothesisError("inner ray endpoint failed to certify S0", {"subcriticality"});
  rp.lo_cert = *lo_v.certificate;

  // First radius whose support coordinates reach the C-box; on faces the
  // box never triggers directly, so double until the orbit certifies.
  double umin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < d; ++i)
    if (dir[i] > 0.0) umin = std::min(umin, dir[i]);
  double r_hi = ctx.C / umin;
  BasinVerdict hi_v = classify(ctx, r_hi * dir, iters);
  int doublings = 0;
  while (hi_v.verdict != Verdict::SInfty && doublings < 60) {
    r_hi *= 2.0;
    ++doublings;
    hi_v = classify(ctx, r_hi * dir, iters);
  }
  if (hi_v.verdict != Verdict::SInfty)
    throw HypothesisError("outer ray endpoint failed to certify SInfty", {"positive-regularity"});
  rp.hi_cert = *hi_v.certificate;

  const double invphi = 0.6180339887498949;
  double alpha = 0.5;
  bool last_hi = true;  // nudge toward the side that produced the last certificate
  int steps = 0;
  while (r_hi - r_lo > tol && steps < kMaxBisectSteps) {
    double t = r_lo + alpha * (r_hi - r_lo);
    if (!(t > r_lo && t < r_hi)) break;  // bracket exhausted at this precision
    BasinVerdict mid = classify(ctx, t * dir, iters);
    ++steps;
    if (mid.verdict == Verdict::S0) {
      r_lo = t;
      rp.lo_cert = *mid.certificate;
      alpha = 0.5;
      last_hi = false;
    } else if (mid.verdict == Verdict::SInfty) {
      r_hi = t;
      rp.hi_cert = *mid.certificate;
      alpha = 0.5;
      last_hi = true;
    } else {
      alpha = last_hi ? 1.0 - (1.0 - alpha) * invphi : alpha * invphi;
    }
  }
  rp.steps = steps;
  rp.r_lo = r_lo;
  rp.r_hi = r_hi;
  rp.r = 0.5 * (r_lo + r_hi);
  rp.converged = (r_hi - r_lo) <= tol;
  return rp;
}

namespace {

void compositions(int total, int parts, std::vector<int>& cur,
                  std::vector<std::vector<int>>& out) {
  if (parts == 1) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int h = total; h >= 0; --h) {
    cur.push_back(h);
    compositions(total - h, parts - 1, cur, out);
    cur.pop_back();
  }
}

long long composition_count(int level, int d) {
  // C(level + d - 1, d - 1), saturating.
  long long c = 1;
  for (int i = 1; i <= d - 1; ++i) {
    c = c * (level + i) / i;
    if (c > 100000) return c;
  }
  return c;
}

}  // namespace

std::vector<Eigen::VectorXd> direction_mesh(int d, int grid_per_axis) {
  if (d < 1 || grid_per_axis < 1) throw std::invalid_argument("bad mesh parameters");
  std::vector<Eigen::VectorXd> dirs;
  if (d == 1) {
    dirs.push_back(Eigen::VectorXd::Ones(1));
    return dirs;
  }
  if (d == 2) {
    int G = std::max(grid_per_axis, 2);
    for (int i = 0; i < G; ++i) {
      double theta = (M_PI / 2.0) * static_cast<double>(i) / (G - 1);
      Eigen::VectorXd u(2);
      u << std::cos(theta), std::sin(theta);
      if (u[0] < 1e-15) u[0] = 0.0;
      if (u[1] < 1e-15) u[1] = 0.0;
      u /= u.norm();
      dirs.push_back(u);
    }
    return dirs;
  }
  int level = std::max(grid_per_axis - 1, 1);
  while (level > 1 && composition_count(level, d) > 600) --level;
  std::vector<std::vector<int>> comps;
  std::vector<int> cur;
  compositions(level, d, cur, comps);
  for (const auto& c : comps) {
    Eigen::VectorXd u(d);
    for (int i = 0; i < d; ++i) u[i] = static_cast<double>(c[i]);
    double n = u.norm();
    if (n == 0.0) continue;
    dirs.push_back(u / n);
  }
  return dirs;
}

MeshResult lambda_mesh(const BasinContext& ctx, int grid_per_axis, double tol) {
  MeshResult res;
  res.directions = direction_mesh(ctx.model->d, grid_per_axis);
  for (int i = 0; i < static_cast<int>(res.directions.size()); ++i) {
    try {
      res.rays.push_back(ray_bisect(ctx, res.directions[i], tol));
    } catch (const std::exception& e) {
      res.failed.push_back(i);
      res.messages.push_back(e.what());
    }
  }
  return res;
}

}  // namespace mtbp
