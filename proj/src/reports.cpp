#include "mtbp/reports.hpp"

namespace mtbp {

ordered_json json_vec(const Eigen::VectorXd& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

ordered_json json_mat(const Eigen::MatrixXd& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

ordered_json report_json(const SpectralReport& r) {
  ordered_json j;
  j["M"] = json_mat(r.M);
  j["rho"] = r.rho;
  j["v"] = json_vec(r.v);
  j["criticality"] = to_string(r.criticality);
  j["near_critical"] = r.near_critical;
  j["positive_regular"] = r.positive_regular;
  j["pr_witness_N"] = r.pr_witness_N;
  j["non_singular"] = r.non_singular;
  j["ns_witness_type"] = r.ns_witness_type;
  j["perron_converged"] = r.perron_converged;
  j["perron_iterations"] = r.perron_iterations;
  j["perron_fallback"] = r.perron_fallback;
  return j;
}

ordered_json report_json(const GfPosWitness& w) {
  ordered_json j;
  j["N"] = w.N;
  j["log_p"] = json_mat(w.log_p);
  j["log_m_min"] = w.log_m_min;
  j["C"] = w.C;
  return j;
}

ordered_json report_json(const GfBdedWitness& w) {
  ordered_json j;
  j["eps"] = w.eps;
  j["q0"] = json_vec(w.q0);
  j["lambda0"] = json_vec(w.lambda0);
  return j;
}

ordered_json report_json(const ModelAnalysis& a) {
  ordered_json j;
  j["spectral"] = report_json(a.spectral);
  j["gf_pos_witness"] = report_json(a.pos);
  j["gf_bded_witness"] = report_json(a.bded);
  return j;
}

ordered_json report_json(const BasinCertificate& c) {
  ordered_json j;
  j["kind"] = to_string(c.kind);
  j["m"] = c.m;
  j["k_offset"] = c.k_offset;
  j["direction"] = to_string(c.direction);
  return j;
}

ordered_json report_json(const BasinVerdict& v) {
  ordered_json j;
  j["verdict"] = to_string(v.verdict);
  if (v.certificate)
    j["certificate"] = report_json(*v.certificate);
  else
    j["certificate"] = nullptr;
  j["orbit_len"] = v.orbit_len;
  return j;
}

ordered_json report_json(const FixedPoint& p) {
  ordered_json j;
  j["q"] = json_vec(p.q);
  j["residual"] = p.residual;
  j["newton_iters"] = p.newton_iters;
  j["seed_direction"] = json_vec(p.seed_direction);
  return j;
}

ordered_json report_json(const FixedPointReport& r) {
  ordered_json j;
  ordered_json pts = ordered_json::array();
  for (const auto& p : r.points) pts.push_back(report_json(p));
  j["points"] = pts;
  j["count"] = r.points.size();
  j["grid_per_axis"] = r.grid_per_axis;
  j["dedup_radius"] = r.dedup_radius;
  j["candidates"] = r.candidates;
  j["nonconverged"] = r.nonconverged;
  j["rays_solved"] = r.rays_solved;
  j["rays_failed"] = r.rays_failed;
  j["contradicts_theorem"] = r.contradicts_theorem;
  return j;
}

ordered_json report_json(const FixedPointCheck& c) {
  ordered_json j;
  j["q"] = json_vec(c.q);
  j["residual"] = c.residual;
  j["exact_mode"] = c.exact_mode;
  if (c.exact_mode) {
    j["residual_exact"] = c.residual_exact;
    j["exact_zero"] = c.exact_zero;
  }
  j["above_one"] = c.above_one;
  j["is_one"] = c.is_one;
  j["sub_unit"] = c.sub_unit;
  j["jac_rho"] = c.jac_rho;
  j["stability"] = c.stability;
  j["accepted"] = c.accepted;
  return j;
}

ordered_json report_json(const ConjugateModel& c) {
  ordered_json j;
  j["A"] = json_vec(c.A);
  j["exact"] = c.exact;
  if (c.exact) {
    ordered_json ax = ordered_json::array();
    for (const auto& r : c.A_exact) ax.push_back(r.to_string());
    j["A_exact"] = ax;
  }
  j["fixed_residual"] = c.fixed_residual;
  j["extinction_vec"] = json_vec(c.extinction_vec);
  j["normalization_residuals"] = json_vec(c.normalization_residuals);
  j["tilted_spectral"] = report_json(c.tilted_spectral);
  return j;
}

ordered_json report_json(const TiltBackRecord& r) {
  ordered_json j;
  j["ok"] = r.ok;
  j["ext_residual"] = r.ext_residual;
  j["ext_iters"] = r.ext_iters;
  j["ext_ok"] = r.ext_ok;
  j["entry_residual"] = r.entry_residual;
  j["exact"] = r.exact;
  j["exact_equal"] = r.exact_equal;
  j["worst_entry"] = r.worst_entry;
  return j;
}

ordered_json report_json(const ConditionedLawReport& r) {
  ordered_json j;
  j["replicas"] = r.replicas;
  j["generations"] = r.generations;
  j["accepted"] = r.accepted;
  j["cap_hit"] = r.cap_hit;
  j["acceptance_rate"] = r.acceptance_rate;
  j["expected_rate"] = r.expected_rate;
  j["acceptance_se"] = r.acceptance_se;
  j["tv"] = r.tv;
  j["start_type"] = r.start_type;
  j["law_cap"] = r.law_cap;
  return j;
}

ordered_json report_json(const McExtinction& r) {
  ordered_json j;
  j["estimate"] = r.estimate;
  j["se"] = r.se;
  j["extinct"] = r.extinct;
  j["cap_hit"] = r.cap_hit;
  j["alive"] = r.alive;
  j["replicas"] = r.cfg.replicas;
  j["generations"] = r.cfg.generations;
  j["pop_cap"] = r.cfg.pop_cap;
  j["seed"] = r.cfg.seed;
  return j;
}

ordered_json report_json(const TruncationRecord& r) {
  ordered_json j;
  j["d"] = r.d;
  j["fixed_points"] = report_json(r.report);
  j["representative"] = json_vec(r.representative);
  j["rep_lambda"] = json_vec(r.rep_lambda);
  j["has_prev"] = r.has_prev;
  if (r.has_prev) j["sup_diff_prev"] = r.sup_diff_prev;
  j["bound"] = json_vec(r.bound);
  j["bound_ok"] = r.bound_ok;
  j["max_head"] = r.max_head;
  return j;
}

ordered_json report_json(const TruncationScan& s) {
  ordered_json j;
  ordered_json recs = ordered_json::array();
  for (const auto& r : s.records) recs.push_back(report_json(r));
  j["records"] = recs;
  j["aborted"] = s.aborted;
  if (s.aborted) {
    j["abort_d"] = s.abort_d;
    j["abort_reason"] = s.abort_reason;
  }
  return j;
}

ordered_json report_json(const AssumptionsReport& r) {
  ordered_json j;
  ordered_json items = ordered_json::array();
  for (const auto& it : r.items) {
    ordered_json v;
    v["name"] = it.name;
    v["verdict"] = it.verdict;
    v["witness"] = it.witness;
    v["worst"] = it.worst;
    items.push_back(v);
  }
  j["items"] = items;
  j["all_pass"] = r.all_pass;
  return j;
}

}  // namespace mtbp
