#include "runner.hpp"

#include <chrono>
#include <iomanip>
#include <sstream>

#include "error.hpp"
#include "killing.hpp"
#include "tensor.hpp"

#ifndef ABF_VERSION
#define ABF_VERSION "0.0.0"
#endif

namespace abf {

const char* tool_version() { return ABF_VERSION; }

Json vec_to_json(const Vec& v) {
  Json a = Json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json mat_to_json(const Mat& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Json error_json(Code code, const std::string& message) {
  return Json{{"error", {{"code", code_name(code)}, {"message", message}}}};
}

namespace {

Json envelope(const char* subcommand, const RunConfig* cfg, uint64_t seed) {
  Json j;
  j["tool"] = "abfinsler";
  j["version"] = tool_version();
  j["subcommand"] = subcommand;
  j["seed"] = seed;
  if (cfg) j["config"] = cfg->to_json();
  return j;
}

void stamp_wall_clock(Json& j, std::chrono::steady_clock::time_point t0) {
  auto dt = std::chrono::steady_clock::now() - t0;
  j["wall_clock_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(dt).count();
}

Json scalars_to_json(const AlphaBetaScalars& sc) {
  Json j;
  j["A"] = sc.A;
  j["B"] = sc.B;
  j["bnorm"] = sc.bnorm;
  j["s_defined"] = sc.s_defined;
  if (sc.s_defined) {
    j["s"] = sc.s;
    j["rho"] = sc.rho;
  }
  return j;
}

Json verdict_to_json(const ClassificationVerdict& v) {
  Json j;
  j["family"] = v.family;
  j["is_spacetime"] = v.is_spacetime;
  j["reason"] = v.reason;
  j["cone_description"] = v.cone_description;
  if (v.grid_corroborated) j["grid_corroborated"] = true;
  return j;
}

Json report_to_json(const VerificationReport& r) {
  Json j;
  j["verdict"] = r.verdict;
  j["total_samples"] = r.total_samples;
  j["failures"] = r.failures;
  j["marginal"] = r.marginal;
  j["s_observed"] = {{"min", r.s_min}, {"max", r.s_max}};
  j["assumptions"] = r.assumptions;
  Json pts = Json::array();
  for (const auto& p : r.points) {
    Json pj;
    pj["x"] = vec_to_json(p.x);
    pj["bnorm"] = p.bnorm;
    pj["s0"] = p.s0;
    pj["samples"] = p.samples;
    pj["failures"] = p.failures;
    pj["marginal"] = p.marginal;
    pj["s_observed"] = {{"min", p.s_min}, {"max", p.s_max}};
    Json probes = Json::array();
    for (const auto& bp : p.boundary_probes)
      probes.push_back({{"decayed_to_zero", bp.decayed_to_zero},
                        {"fitted_exponent", bp.fitted_exponent},
                        {"last_L", bp.last_L},
                        {"last_s", bp.last_s}});
    pj["boundary_probes"] = probes;
    pts.push_back(pj);
  }
  j["points"] = pts;
  Json ces = Json::array();
  for (const auto& ce : r.counterexamples) {
    Json cj;
    cj["x"] = vec_to_json(ce.x);
    cj["v"] = vec_to_json(ce.v);
    cj["scalars"] = scalars_to_json(ce.scalars);
    cj["det_g"] = ce.det_g;
    cj["eigenvalues"] = ce.eigenvalues;
    cj["failed"] = ce.failed;
    ces.push_back(cj);
  }
  j["counterexamples"] = ces;
  return j;
}

ClassificationVerdict classify_at(const RunConfig& cfg, const Vec& x) {
  double bnorm = b_norm(cfg.metric, cfg.oneform, x);
  switch (cfg.psi.family()) {
    case PsiFamily::Lorentzian: {
      ClassificationVerdict v;
      v.family = "lorentzian";
      v.is_spacetime = true;
      v.reason = "kappa = " + std::to_string(cfg.psi.kappa) +
                 " > 0: spacetime conditions are trivially satisfied";
      v.cone_description = "light cones of a";
      return v;
    }
    case PsiFamily::Randers:
      return classify_randers(bnorm);
    case PsiFamily::BogoslovskyKropina:
      return classify_bogoslovsky(bnorm, cfg.psi.q);
    case PsiFamily::Kundt:
      return classify_kundt(bnorm, cfg.psi.k, cfg.psi.m, cfg.psi.p);
    case PsiFamily::Exponential:
      return classify_exponential(cfg.metric, cfg.oneform, cfg.psi.P_text, bnorm, cfg.sampling);
    default:
      fail(Code::UnsupportedFamily,
           "classification covers the built-in families (lorentzian, randers, "
           "bogoslovsky-kropina, kundt, exponential)");
  }
}

std::string fmt17(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

RunReport run_tensor(const RunConfig& cfg, const Vec& x, const Vec& v) {
  auto t0 = std::chrono::steady_clock::now();
  RunReport rep;
  rep.body = envelope("tensor", &cfg, cfg.sampling.rng_seed);

  double bnorm = b_norm(cfg.metric, cfg.oneform, x);
  PsiSpec spec = cfg.psi.with_bnorm(bnorm);
  FundamentalTensor closed = fundamental_tensor_closed(cfg.metric, cfg.oneform, spec, x, v);
  FundamentalTensor numeric = fundamental_tensor_numeric(cfg.metric, cfg.oneform, spec, x, v);

  Json payload;
  payload["x"] = vec_to_json(x);
  payload["v"] = vec_to_json(v);
  payload["scalars"] = scalars_to_json(closed.scalars);
  payload["psi"] = {{"psi", closed.psi.psi}, {"dpsi", closed.psi.dpsi}, {"d2psi", closed.psi.d2psi}};
  payload["g"] = {{"closed_form", mat_to_json(closed.g)},
                  {"numeric_hessian", mat_to_json(numeric.g)}};
  payload["det_g"] = {{"closed_form", det_g_closed(cfg.metric, cfg.oneform, spec, x, v)},
                      {"numeric_hessian", numeric.g.determinant()}};
  try {
    Mat ginv = inverse_g_closed(cfg.metric, cfg.oneform, spec, x, v);
    payload["g_inverse"] = mat_to_json(ginv);
    payload["g_inverse_provenance"] = "closed_form";
    payload["inverse_off_identity"] = off_identity(closed.g, ginv);
  } catch (const Error& e) {
    if (e.code() != Code::SingularTensor) throw;
    Eigen::FullPivLU<Mat> lu(numeric.g);
    if (lu.isInvertible()) {
      payload["g_inverse"] = mat_to_json(Mat(lu.inverse()));
      payload["g_inverse_provenance"] = "numeric_fallback";
      payload["g_inverse_note"] = e.what();
    } else {
      payload["g_inverse_provenance"] = "singular";
      payload["g_inverse_note"] = e.what();
    }
  }
  SignatureResult sig = signature(closed.g);
  payload["signature"] = {{"n_pos", sig.n_pos},
                          {"n_neg", sig.n_neg},
                          {"n_zero", sig.n_zero},
                          {"eigenvalues", sig.eigenvalues},
                          {"tolerance", sig.tol_used}};
  rep.body["payload"] = payload;
  rep.verdict = 0;
  stamp_wall_clock(rep.body, t0);
  return rep;
}

RunReport run_classify(const RunConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  RunReport rep;
  rep.body = envelope("classify", &cfg, cfg.sampling.rng_seed);
  std::vector<Vec> points = cfg.resolve_points(cfg.sampling.rng_seed);

  Json per_point = Json::array();
  bool all_yes = true;
  for (const Vec& x : points) {
    ClassificationVerdict v = classify_at(cfg, x);
    Json pj = verdict_to_json(v);
    pj["x"] = vec_to_json(x);
    pj["bnorm"] = b_norm(cfg.metric, cfg.oneform, x);
    per_point.push_back(pj);
    all_yes = all_yes && v.is_spacetime;
  }
  Json payload;
  payload["per_point"] = per_point;
  payload["is_spacetime"] = all_yes;
  payload["note"] = "bnorm is computed from the configured fields at each probe point";
  rep.body["payload"] = payload;
  rep.verdict = all_yes ? 0 : 1;
  stamp_wall_clock(rep.body, t0);
  return rep;
}

RunReport run_check(const RunConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  RunReport rep;
  rep.body = envelope("check", &cfg, cfg.sampling.rng_seed);
  std::vector<Vec> points = cfg.resolve_points(cfg.sampling.rng_seed);

  VerificationReport vr = verify_by_sampling(cfg.metric, cfg.oneform, cfg.psi, points,
                                             cfg.sampling, cfg.reference_timelike);
  rep.body["payload"] = report_to_json(vr);
  rep.verdict = vr.clean() ? 0 : 1;

  if (cfg.output == "csv" || cfg.output == "both") {
    std::ostringstream csv;
    int n = cfg.dim;
    csv << "point,sample";
    for (int i = 0; i < n; ++i) csv << ",x" << i;
    for (int i = 0; i < n; ++i) csv << ",v" << i;
    csv << ",A,B,s,det_g";
    for (int i = 0; i < n; ++i) csv << ",eig" << i;
    csv << ",cond_A,cond_psi,first_ineq,second_ineq,signature_ok,pass\n";
    for (size_t ip = 0; ip < points.size(); ++ip) {
      const Vec& x = points[ip];
      double bnorm = b_norm(cfg.metric, cfg.oneform, x);
      PsiSpec local = cfg.psi.with_bnorm(bnorm);
      std::vector<Vec> samples =
          sample_cone(local, cfg.metric, cfg.oneform, x, cfg.sampling, cfg.reference_timelike, ip);
      for (size_t is = 0; is < samples.size(); ++is) {
        const Vec& v = samples[is];
        ConditionCheck c =
            check_conditions_at(cfg.metric, cfg.oneform, local, x, v, cfg.sampling.strict_eps);
        AlphaBetaScalars sc = eval_scalars(cfg.metric, cfg.oneform, x, v);
        double detg = 0;
        SignatureResult sig;
        bool sig_ok = false;
        try {
          FundamentalTensor ft = fundamental_tensor_closed(cfg.metric, cfg.oneform, local, x, v);
          detg = det_g_closed(cfg.metric, cfg.oneform, local, x, v);
          sig = signature(ft.g);
          sig_ok = sig.n_pos == 1 && sig.n_neg == n - 1 && sig.n_zero == 0;
        } catch (const Error&) {
        }
        csv << ip << "," << is;
        for (int i = 0; i < n; ++i) csv << "," << fmt17(x[i]);
        for (int i = 0; i < n; ++i) csv << "," << fmt17(v[i]);
        csv << "," << fmt17(sc.A) << "," << fmt17(sc.B) << ","
            << fmt17(sc.s_defined ? sc.s : std::nan("")) << "," << fmt17(detg);
        for (int i = 0; i < n; ++i)
          csv << "," << (i < static_cast<int>(sig.eigenvalues.size()) ? fmt17(sig.eigenvalues[i])
                                                                      : "");
        bool pass = c.all_pass() && sig_ok && detg < 0;
        csv << "," << c.positivity_A << "," << c.positivity_Psi << "," << c.first_ineq << ","
            << c.second_ineq << "," << sig_ok << "," << pass << "\n";
      }
    }
    rep.csv = csv.str();
  }
  stamp_wall_clock(rep.body, t0);
  return rep;
}

RunReport run_killing(const RunConfig& cfg) {
  auto t0 = std::chrono::steady_clock::now();
  if (!cfg.killing)
    fail(Code::ValidationError, "killing run needs a 'killing' config section (or --xi)");
  RunReport rep;
  rep.body = envelope("killing", &cfg, cfg.sampling.rng_seed);

  std::vector<std::string> names;
  for (int i = 0; i < cfg.dim; ++i) names.push_back("x" + std::to_string(i));
  std::vector<Expr> comps;
  for (const std::string& e : cfg.killing->xi_exprs) comps.push_back(Expr::parse(e, names));
  VectorField xi = VectorField::from_expressions(comps);

  std::vector<Vec> points = cfg.resolve_points(cfg.sampling.rng_seed);
  double tol = cfg.killing->residual_tol;

  Json per_point = Json::array();
  double max_resid = 0, max_cross = 0;
  for (size_t ip = 0; ip < points.size(); ++ip) {
    const Vec& x = points[ip];
    double bnorm = b_norm(cfg.metric, cfg.oneform, x);
    PsiSpec local = cfg.psi.with_bnorm(bnorm);
    std::vector<Vec> samples =
        sample_cone(local, cfg.metric, cfg.oneform, x, cfg.sampling, cfg.reference_timelike, ip);
    double pmax = 0, cmax = 0;
    for (const Vec& v : samples) {
      KillingResidual r = killing_residual(cfg.metric, cfg.oneform, cfg.psi, xi, x, v);
      pmax = std::max(pmax, std::abs(r.normalized));
      cmax = std::max(cmax, std::abs(r.cross_check));
    }
    max_resid = std::max(max_resid, pmax);
    max_cross = std::max(max_cross, cmax);
    per_point.push_back(
        {{"x", vec_to_json(x)}, {"max_residual", pmax}, {"max_lift_L_cross_check", cmax}});
  }

  TrivialityResult tr = is_trivial_symmetry(cfg.metric, cfg.oneform, xi, points);

  Json payload;
  payload["per_point"] = per_point;
  payload["max_residual"] = max_resid;
  payload["residual_tol"] = tol;
  payload["is_killing"] = max_resid <= tol;
  payload["trivial_symmetry"] = {{"trivial", tr.trivial},
                                 {"max_lie_a", tr.max_lie_a},
                                 {"max_lie_b", tr.max_lie_b},
                                 {"equivalence_violation", tr.equivalence_violation}};
  payload["classification"] =
      max_resid <= tol ? (tr.trivial ? "trivial Killing field" : "nontrivial Killing field")
                       : "not a Killing field";

  if (cfg.killing->has_params) {
    NontrivialReport nr =
        nontrivial_condition_check(cfg.metric, cfg.oneform, xi, cfg.killing->params, points, 64,
                                   cfg.sampling.rng_seed);
    payload["nontrivial_conditions"] = {{"pass", nr.pass},
                                        {"max_rel_first", nr.max_rel_first},
                                        {"max_rel_second", nr.max_rel_second},
                                        {"kappa_per_point", nr.kappa_per_point},
                                        {"max_abs_kappa", nr.max_abs_kappa},
                                        {"trivial_kappa", nr.trivial_kappa}};
  }
  payload["assumptions"] =
      "kappa non-vanishing and residual smallness are corroborated at probed points only";
  rep.body["payload"] = payload;
  rep.verdict = max_resid <= tol ? 0 : 1;
  stamp_wall_clock(rep.body, t0);
  return rep;
}

}  // namespace abf
