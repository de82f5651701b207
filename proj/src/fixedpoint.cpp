#include "mtbp/fixedpoint.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace mtbp {

namespace {

struct NewtonResult {
  QVec q;
  double residual = 0.0;
  int iters = 0;
  bool converged = false;
};

double sup_residual(const ProcessModel& m, const QVec& q) {
  return (eval_f<double>(m, q) - q).cwiseAbs().maxCoeff();
}

// Damped Newton on F(q) = f(q) - q, iterates confined to the box
// [lo, cap]. The cap per coordinate comes from the fixed-point bound
// q_k <= 1/p_{k,k}(N): any fixed point above it would force the orbit to
// blow up, so nothing is lost by fencing the search. lo is 1 + 1e-9 for
// interior searches and exactly 1 when boundary-hugging points are wanted.
NewtonResult newton_polish(const ProcessModel& m, const QVec& seed, const QVec& cap, double lo) {
  const int d = m.d;
  NewtonResult res;
  QVec q = seed;
  for (int i = 0; i < d; ++i) q[i] = std::min(std::max(q[i], lo), cap[i]);
  double fres = sup_residual(m, q);
  for (res.iters = 0; res.iters < 100; ++res.iters) {
    if (fres <= 1e-12) break;
    Eigen::MatrixXd J = jacobian_f<double>(m, q) - Eigen::MatrixXd::Identity(d, d);
    Eigen::VectorXd F = eval_f<double>(m, q) - q;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
    Eigen::VectorXd step = lu.solve(-F);
    if (!step.allFinite()) break;
    double t = 1.0;
    bool accepted = false;
    for (int damp = 0; damp <= 30; ++damp) {
      QVec qn = q + t * step;
      bool inside = true;
      for (int i = 0; i < d; ++i)
        if (!(qn[i] >= lo && qn[i] <= cap[i])) {
          inside = false;
          break;
        }
      if (inside) {
        double rn = sup_residual(m, qn);
        if (rn < fres) {
          q = qn;
          fres = rn;
          accepted = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!accepted) break;  // stalled
  }
  res.q = q;
  res.residual = fres;
  res.converged = fres <= 1e-12;
  return res;
}

// Orthonormal basis of the tangent space at unit vector u: the last d-1
// columns of the Householder reflection taking e_1 to u.
Eigen::MatrixXd tangent_basis(const Eigen::VectorXd& u) {
  const int d = static_cast<int>(u.size());
  Eigen::VectorXd w = u;
  w[0] -= 1.0;  // reflects e_1 onto u (u is unit and not -e_1 on the orthant)
  double wn = w.norm();
  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(d, d);
  if (wn > 1e-14) {
    w /= wn;
    H -= 2.0 * w * w.transpose();
  }
  return H.rightCols(d - 1);
}

}  // namespace

Eigen::VectorXd direction_residual(const ProcessModel& m, const RayPoint& rayp) {
  const int d = m.d;
  if (d == 1) return Eigen::VectorXd(0);
  EvalCache cache = make_eval_cache(m);
  LambdaVec lambda = rayp.r * rayp.u;
  LambdaVec glam = eval_g(m, cache, lambda);
  double gn = glam.norm();
  if (!(gn > 0.0)) throw std::logic_error("g vanished on the unstable set");
  Eigen::VectorXd h = glam / gn;
  if (d == 2) {
    Eigen::VectorXd out(1);
    out[0] = std::atan2(h[1], h[0]) - std::atan2(rayp.u[1], rayp.u[0]);
    return out;
  }
  return tangent_basis(rayp.u).transpose() * (h - rayp.u);
}

namespace {

// Signed angle residual at direction angle theta, solving the ray first.
double angle_residual(const BasinContext& ctx, double theta, double tol, RayPoint* out) {
  Eigen::VectorXd u(2);
  u << std::cos(theta), std::sin(theta);
  if (u[0] < 0.0) u[0] = 0.0;
  if (u[1] < 0.0) u[1] = 0.0;
  u /= u.norm();
  RayPoint rp = ray_bisect(ctx, u, tol);
  if (out) *out = rp;
  return direction_residual(*ctx.model, rp)[0];
}

bool lex_less(const QVec& a, const QVec& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}

}  // namespace

FixedPointReport find_fixed_points(const ProcessModel& m, const FixedPointOptions& opt) {
  ModelAnalysis analysis = require_hypotheses(m);
  const int d = m.d;
  FixedPointReport rep;
  rep.grid_per_axis = opt.grid_per_axis;
  rep.dedup_radius = opt.dedup_radius;

  QVec cap(d);
  for (int k = 0; k < d; ++k) cap[k] = 2.0 * std::exp(-analysis.pos.log_p(k, k)) + 2.0;

  BasinContext ctx = make_basin_context(m, analysis);

  struct Candidate {
    QVec seed;
    Eigen::VectorXd dir;
  };
  std::vector<Candidate> cands;

  if (d == 1) {
    // One unknown: bracket the unique crossing of f(q) = q above 1 and let
    // Newton finish. The scan grid only needs to beat the bracket width.
    Eigen::VectorXd e1 = Eigen::VectorXd::Ones(1);
    double q_hi = cap[0];
    double q_lo = opt.allow_boundary ? 1.0 + 1e-13 : 1.0 + 1e-9;
    const int samples = std::max(512, opt.grid_per_axis);
    double prev_q = q_lo;
    double prev_F = eval_f<double>(m, QVec::Constant(1, q_lo))[0] - q_lo;
    for (int i = 1; i <= samples; ++i) {
      double q = q_lo + (q_hi - q_lo) * static_cast<double>(i) / samples;
      double F = eval_f<double>(m, QVec::Constant(1, q))[0] - q;
      if ((prev_F < 0.0 && F >= 0.0) || (prev_F > 0.0 && F <= 0.0)) {
        double a = prev_q, b = q;
        for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
          double mid = 0.5 * (a + b);
          double Fm = eval_f<double>(m, QVec::Constant(1, mid))[0] - mid;
          if ((Fm < 0.0) == (prev_F < 0.0))
            a = mid;
          else
            b = mid;
        }
        cands.push_back({QVec::Constant(1, 0.5 * (a + b)), e1});
      }
      prev_q = q;
      prev_F = F;
    }
    rep.rays_solved = 1;
  } else {
    MeshResult mesh = lambda_mesh(ctx, opt.grid_per_axis, opt.tol);
    rep.rays_solved = static_cast<int>(mesh.rays.size());
    rep.rays_failed = static_cast<int>(mesh.failed.size());

    // Newton from every solved ray midpoint.
    for (const RayPoint& rp : mesh.rays)
      cands.push_back({(rp.r * rp.u).array().exp(), rp.u});

    if (d == 2) {
      // The direction residual is a scalar angle defect; bisect each sign
      // change of it over the angle grid for seeds Newton could miss.
      std::vector<double> thetas, wvals;
      std::vector<const RayPoint*> rps;
      int mi = 0;
      for (int i = 0; i < static_cast<int>(mesh.directions.size()); ++i) {
        if (std::find(mesh.failed.begin(), mesh.failed.end(), i) != mesh.failed.end()) continue;
        const RayPoint& rp = mesh.rays[mi++];
        thetas.push_back(std::atan2(rp.u[1], rp.u[0]));
        wvals.push_back(direction_residual(m, rp)[0]);
        rps.push_back(&rp);
      }
      for (size_t i = 0; i + 1 < thetas.size(); ++i) {
        if (std::abs(wvals[i]) < 1e-14) {
          cands.push_back({(rps[i]->r * rps[i]->u).array().exp(), rps[i]->u});
          continue;
        }
        if (wvals[i] * wvals[i + 1] < 0.0) {
          double ta = thetas[i], tb = thetas[i + 1];
          double wa = wvals[i];
          RayPoint last = *rps[i];
          for (int it = 0; it < 60 && tb - ta > 1e-12; ++it) {
            double tm = 0.5 * (ta + tb);
            double wm = angle_residual(ctx, tm, opt.tol, &last);
            if (std::abs(wm) < 1e-15) break;
            if ((wm < 0.0) == (wa < 0.0)) {
              ta = tm;
              wa = wm;
            } else {
              tb = tm;
            }
          }
          cands.push_back({(last.r * last.u).array().exp(), last.u});
        }
      }
      if (!wvals.empty() && std::abs(wvals.back()) < 1e-14)
        cands.push_back({(rps.back()->r * rps.back()->u).array().exp(), rps.back()->u});
    }
  }

  for (const QVec& s : opt.extra_seeds) {
    Eigen::VectorXd dir = s.array().log();
    double n = dir.norm();
    cands.push_back({s, n > 0 ? Eigen::VectorXd(dir / n) : dir});
  }

  std::vector<FixedPoint> kept;
  const double lo = opt.allow_boundary ? 1.0 : 1.0 + 1e-9;
  for (const Candidate& c : cands) {
    NewtonResult nr = newton_polish(m, c.seed, cap, lo);
    ++rep.candidates;
    if (!nr.converged) {
      ++rep.nonconverged;
      if (nr.residual > opt.tol) continue;
    }
    bool above = true;
    if (opt.allow_boundary) {
      // the box already keeps coords >= 1; only the all-ones point is banned
      above = (nr.q.array() - 1.0).maxCoeff() > 1e-8;
    } else {
      for (int i = 0; i < d; ++i)
        if (nr.q[i] <= 1.0 + 1e-8) {
          above = false;
          break;
        }
    }
    if (!above || nr.residual > opt.tol) continue;
    kept.push_back(FixedPoint{nr.q, nr.residual, nr.iters, c.dir});
  }

  std::sort(kept.begin(), kept.end(),
            [](const FixedPoint& a, const FixedPoint& b) { return lex_less(a.q, b.q); });
  for (const FixedPoint& fp : kept) {
    bool dup = false;
    for (const FixedPoint& have : rep.points)
      if ((fp.q - have.q).cwiseAbs().maxCoeff() <= opt.dedup_radius) {
        dup = true;
        break;
      }
    if (!dup) rep.points.push_back(fp);
  }

  rep.contradicts_theorem = rep.points.empty();
  return rep;
}

FixedPointReport find_fixed_points(const ProcessModel& m, int grid_per_axis, double tol) {
  FixedPointOptions opt;
  opt.grid_per_axis = grid_per_axis;
  opt.tol = tol;
  return find_fixed_points(m, opt);
}

namespace {

void label_stability(const ProcessModel& m, FixedPointCheck& chk) {
  auto [pr, prN] = check_positive_regular(m);
  Eigen::MatrixXd J = jacobian_f<double>(m, chk.q);
  PowerResult p = power_spectral_radius(J, pr ? prN : 0);
  chk.jac_rho = p.rho;
  if (p.rho < 1.0 - 1e-9)
    chk.stability = "attracting";
  else if (p.rho > 1.0 + 1e-9)
    chk.stability = "repelling";
  else
    chk.stability = "neutral";
}

void label_position(FixedPointCheck& chk) {
  const int d = static_cast<int>(chk.q.size());
  chk.above_one = true;
  chk.sub_unit = true;
  chk.is_one = true;
  for (int i = 0; i < d; ++i) {
    if (!(chk.q[i] > 1.0)) chk.above_one = false;
    if (!(chk.q[i] < 1.0)) chk.sub_unit = false;
    if (chk.q[i] != 1.0) chk.is_one = false;
  }
}

}  // namespace

FixedPointCheck verify_fixed_point(const ProcessModel& m, const QVec& q, double tol) {
  if (q.size() != m.d) throw std::invalid_argument("point dimension does not match model");
  for (int i = 0; i < m.d; ++i)
    if (!(q[i] > 0.0)) throw std::invalid_argument("candidate must be strictly positive");
  FixedPointCheck chk;
  chk.q = q;
  chk.residual = sup_residual(m, q);
  chk.accepted = chk.residual <= tol;
  label_position(chk);
  label_stability(m, chk);
  return chk;
}

FixedPointCheck verify_fixed_point_exact(const ProcessModel& m, const std::vector<Rational>& q,
                                         double tol) {
  if (static_cast<int>(q.size()) != m.d)
    throw std::invalid_argument("point dimension does not match model");
  if (!m.rational()) throw std::invalid_argument("exact recheck needs a rational model");
  VecX<Rational> qr(m.d);
  QVec qd(m.d);
  for (int i = 0; i < m.d; ++i) {
    if (q[i].sign() <= 0) throw std::invalid_argument("candidate must be strictly positive");
    qr[i] = q[i];
    qd[i] = q[i].to_double();
  }
  VecX<Rational> fr = eval_f<Rational>(m, qr);
  Rational worst;
  for (int i = 0; i < m.d; ++i) {
    Rational diff = (fr[i] - qr[i]).abs();
    if (worst < diff) worst = diff;
  }
  FixedPointCheck chk;
  chk.q = qd;
  chk.exact_mode = true;
  chk.residual_exact = worst.to_string();
  chk.exact_zero = worst.is_zero();
  chk.residual = worst.to_double();
  chk.accepted = chk.exact_zero || chk.residual <= tol;
  label_position(chk);
  label_stability(m, chk);
  return chk;
}

}  // namespace mtbp
