#include <chrono>
#include <cmath>
#include <sstream>

#include "error.hpp"
#include "killing.hpp"
#include "rng.hpp"
#include "runner.hpp"
#include "tensor.hpp"
#include "verifier.hpp"

// The acceptance suite. Each criterion is self-contained, carries its pinned
// tolerance, and reports a detail object; the whole payload is rebuilt twice
// to check byte-level determinism.

namespace abf {

namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::vector<Vec> random_points(uint64_t seed, int dim, int count, double lo = -1.0,
                               double hi = 1.0) {
  std::vector<Vec> pts;
  for (int i = 0; i < count; ++i) {
    Rng rng = Rng::substream(seed ^ 0x7074735fULL, static_cast<uint64_t>(i));
    Vec x(dim);
    for (int k = 0; k < dim; ++k) x[k] = rng.next_in(lo, hi);
    pts.push_back(x);
  }
  return pts;
}

OneFormField expr_oneform(const std::vector<std::string>& comps) {
  int n = static_cast<int>(comps.size());
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back("x" + std::to_string(i));
  std::vector<Expr> ex;
  for (const std::string& c : comps) ex.push_back(Expr::parse(c, names));
  return OneFormField::from_expressions(ex);
}

struct FamilySet {
  std::string label;
  MetricField metric;
  OneFormField oneform;
  PsiSpec psi;
};

// All sets use a conformally rescaled Minkowski metric so x-dependence is
// genuinely exercised; the one-form is scaled to keep <b,b> constant.
std::vector<FamilySet> tensor_family_sets() {
  const double q0 = 0.3;
  MetricField cm = MetricField::conformal_minkowski(q0, 4);
  OneFormField b_time_025 = expr_oneform({"0.5*exp(0.3*x0)", "0", "0", "0"});   // <b,b> = 0.25
  OneFormField b_time_05 = expr_oneform(
      {"0.70710678118654752*exp(0.3*x0)", "0", "0", "0"});                      // <b,b> = 0.5
  OneFormField b_past_05 = expr_oneform(
      {"-0.70710678118654752*exp(0.3*x0)", "0", "0", "0"});                     // <b,b> = 0.5
  OneFormField b_space_025 = expr_oneform({"0", "0.5*exp(0.3*x0)", "0", "0"});  // <b,b> = -0.25
  // the conformal deformation example fields: lightlike b
  MetricField cm_half = MetricField::conformal_minkowski(0.5, 4);
  OneFormField b_light = expr_oneform({"exp(-0.5*x0)", "exp(-0.5*x0)", "0", "0"});

  std::vector<FamilySet> sets;
  sets.push_back({"lorentzian kappa=2", cm, b_time_025, PsiSpec::lorentzian(2.0)});
  sets.push_back({"randers bnorm=0.5", cm, b_past_05, PsiSpec::randers()});
  sets.push_back({"bogoslovsky q=-1 bnorm=0.25", cm, b_time_025,
                  PsiSpec::bogoslovsky_kropina(-1.0)});
  sets.push_back({"bogoslovsky q=-0.5 bnorm=0.25", cm, b_time_025,
                  PsiSpec::bogoslovsky_kropina(-0.5)});
  sets.push_back({"bogoslovsky q=0.5 lightlike b", cm_half, b_light,
                  PsiSpec::bogoslovsky_kropina(0.5)});
  sets.push_back({"bogoslovsky q=0.9 bnorm=-0.25", cm, b_space_025,
                  PsiSpec::bogoslovsky_kropina(0.9)});
  sets.push_back({"kundt k=1 m=-1 p=-0.5", cm, b_time_025, PsiSpec::kundt(1.0, -1.0, -0.5)});
  sets.push_back({"kundt k=1 m=-1 p=0.5", cm, b_time_025, PsiSpec::kundt(1.0, -1.0, 0.5)});
  sets.push_back({"kundt k=1 m=-1 p=1", cm, b_time_025, PsiSpec::kundt(1.0, -1.0, 1.0)});
  sets.push_back({"maxwell-boltzmann k=1 bnorm=0.5", cm, b_time_05,
                  PsiSpec::maxwell_boltzmann(1.0, 0.5)});
  return sets;
}

std::vector<FamilySet> tensor_family_sets_3d() {
  MetricField m3 = MetricField::conformal_minkowski(0.3, 3);
  OneFormField b3_time = expr_oneform({"0.5*exp(0.3*x0)", "0", "0"});
  OneFormField b3_past = expr_oneform({"-0.5*exp(0.3*x0)", "0", "0"});
  std::vector<FamilySet> sets;
  sets.push_back({"n=3 bogoslovsky q=0.5", m3, b3_time, PsiSpec::bogoslovsky_kropina(0.5)});
  sets.push_back({"n=3 randers bnorm=0.25", m3, b3_past, PsiSpec::randers()});
  sets.push_back({"n=3 kundt k=1 m=-1 p=0.5", m3, b3_time, PsiSpec::kundt(1.0, -1.0, 0.5)});
  return sets;
}

// 5 points x (samples_total/5) cone samples per set, deterministic in seed
struct SampleBatch {
  std::vector<Vec> points;
  std::vector<std::vector<Vec>> vectors;  // per point
};

SampleBatch draw_batch(const FamilySet& fs, uint64_t seed, int total) {
  SampleBatch b;
  int n_points = 5;
  b.points = random_points(seed, fs.metric.dim(), n_points);
  ConeSampleConfig cfg;
  cfg.n_samples = total / n_points;
  cfg.rng_seed = seed;
  for (size_t ip = 0; ip < b.points.size(); ++ip) {
    double bn = b_norm(fs.metric, fs.oneform, b.points[ip]);
    PsiSpec local = fs.psi.with_bnorm(bn);
    b.vectors.push_back(
        sample_cone(local, fs.metric, fs.oneform, b.points[ip], cfg, {}, ip));
  }
  return b;
}

Json criterion_1(uint64_t seed, bool& pass) {
  auto t0 = std::chrono::steady_clock::now();
  Json rows = Json::array();
  double worst = 0;
  std::string worst_label;
  for (const FamilySet& fs : tensor_family_sets()) {
    SampleBatch batch = draw_batch(fs, seed ^ 0xc1, 1000);
    double fam_max = 0;
    long count = 0;
    for (size_t ip = 0; ip < batch.points.size(); ++ip) {
      double bn = b_norm(fs.metric, fs.oneform, batch.points[ip]);
      PsiSpec local = fs.psi.with_bnorm(bn);
      for (const Vec& v : batch.vectors[ip]) {
        FundamentalTensor gc =
            fundamental_tensor_closed(fs.metric, fs.oneform, local, batch.points[ip], v);
        FundamentalTensor gn =
            fundamental_tensor_numeric(fs.metric, fs.oneform, local, batch.points[ip], v);
        double rel = (gc.g - gn.g).norm() / gn.g.norm();
        fam_max = std::max(fam_max, rel);
        ++count;
      }
    }
    rows.push_back({{"family", fs.label}, {"samples", count}, {"max_rel_frobenius", fam_max}});
    if (fam_max > worst) {
      worst = fam_max;
      worst_label = fs.label;
    }
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  pass = worst <= 1e-6 && secs < 60.0;
  return Json{{"families", rows},
              {"max_rel_frobenius", worst},
              {"worst_family", worst_label},
              {"tolerance", 1e-6},
              {"runtime_seconds", secs},
              {"runtime_budget_seconds", 60.0}};
}

// The determinant of a nearly singular Hessian carries no relative precision:
// rel error of the oracle grows like eps / (eigenvalue ratio). Comparisons are
// restricted to samples where the oracle still has >= 1e-7 of that ratio,
// leaving ~10x headroom at the 1e-6 target; skipped samples are counted.
bool det_comparison_conditioned(const Mat& g) {
  SignatureResult sig = signature(g, 0.0);
  double amax = 0, amin = std::numeric_limits<double>::infinity();
  for (double ev : sig.eigenvalues) {
    amax = std::max(amax, std::abs(ev));
    amin = std::min(amin, std::abs(ev));
  }
  return amin >= 1e-7 * amax;
}

Json criterion_2(uint64_t seed, bool& pass) {
  Json rows = Json::array();
  double worst = 0;
  long skipped = 0;
  for (int dim_case = 0; dim_case < 2; ++dim_case) {
    auto sets = dim_case == 0 ? tensor_family_sets() : tensor_family_sets_3d();
    for (const FamilySet& fs : sets) {
      SampleBatch batch = draw_batch(fs, seed ^ 0xc2, 1000);
      double fam_max = 0;
      for (size_t ip = 0; ip < batch.points.size(); ++ip) {
        double bn = b_norm(fs.metric, fs.oneform, batch.points[ip]);
        PsiSpec local = fs.psi.with_bnorm(bn);
        for (const Vec& v : batch.vectors[ip]) {
          FundamentalTensor gn =
              fundamental_tensor_numeric(fs.metric, fs.oneform, local, batch.points[ip], v);
          if (!det_comparison_conditioned(gn.g)) {
            ++skipped;
            continue;
          }
          double dc = det_g_closed(fs.metric, fs.oneform, local, batch.points[ip], v);
          double dn = gn.g.determinant();
          double rel = std::abs(dc - dn) / std::max(std::abs(dn), 1e-300);
          fam_max = std::max(fam_max, rel);
        }
      }
      rows.push_back({{"family", fs.label},
                      {"dimension", fs.metric.dim()},
                      {"max_rel_det_error", fam_max}});
      worst = std::max(worst, fam_max);
    }
  }
  pass = worst <= 1e-6;
  return Json{{"cases", rows},
              {"max_rel_det_error", worst},
              {"tolerance", 1e-6},
              {"skipped_ill_conditioned", skipped}};
}

Json criterion_3(uint64_t seed, bool& pass) {
  Json rows = Json::array();
  double worst_inv = 0, worst_nu = 0;
  long skipped = 0;
  for (const FamilySet& fs : tensor_family_sets()) {
    SampleBatch batch = draw_batch(fs, seed ^ 0xc3, 1000);
    double fam_inv = 0, fam_nu = 0;
    for (size_t ip = 0; ip < batch.points.size(); ++ip) {
      double bn = b_norm(fs.metric, fs.oneform, batch.points[ip]);
      PsiSpec local = fs.psi.with_bnorm(bn);
      SDomain dom = spacetime_s_domain(local, bn);
      for (const Vec& v : batch.vectors[ip]) {
        AlphaBetaScalars sc = eval_scalars(fs.metric, fs.oneform, batch.points[ip], v);
        PsiEval e = local.eval(sc.s);
        double nu = nu_value(local, sc.s, sc.bnorm);
        if (std::abs(nu) <= 1e-10 * e.psi * e.psi) {
          ++skipped;
          continue;
        }
        FundamentalTensor gc =
            fundamental_tensor_closed(fs.metric, fs.oneform, local, batch.points[ip], v);
        // the identity test needs cond(g) below ~1e7 or the product itself
        // rounds past 1e-8
        if (!det_comparison_conditioned(gc.g)) {
          ++skipped;
          continue;
        }
        Mat ginv = inverse_g_closed(fs.metric, fs.oneform, local, batch.points[ip], v);
        fam_inv = std::max(fam_inv, off_identity(gc.g, ginv));

        // the difference stencil needs room inside the s-domain; too close to
        // an endpoint the sigma derivatives are singular and the comparison
        // measures truncation, not the identity
        double margin = 1e-3 * std::max(1.0, std::abs(sc.s));
        bool interior = sc.s - dom.lo >= margin &&
                        (!std::isfinite(dom.hi) || dom.hi - sc.s >= margin);
        if (!interior) {
          ++skipped;
          continue;
        }
        double h = 1e-6 * std::max(1.0, std::abs(sc.s));
        auto rho_sigma = [&](double s) { return (s - sc.bnorm) * sigma_eval(local, s); };
        double fd = (rho_sigma(sc.s + h) - rho_sigma(sc.s - h)) / (2.0 * h);
        double nu_fd = e.psi * e.psi * fd;
        fam_nu = std::max(fam_nu, std::abs(nu - nu_fd) / std::max(std::abs(nu), 1e-300));
      }
    }
    rows.push_back({{"family", fs.label},
                    {"max_off_identity", fam_inv},
                    {"max_rel_nu_error", fam_nu}});
    worst_inv = std::max(worst_inv, fam_inv);
    worst_nu = std::max(worst_nu, fam_nu);
  }
  pass = worst_inv <= 1e-8 && worst_nu <= 1e-6;
  return Json{{"families", rows},
              {"max_off_identity", worst_inv},
              {"off_identity_tolerance", 1e-8},
              {"max_rel_nu_error", worst_nu},
              {"nu_tolerance", 1e-6},
              {"skipped_small_nu", skipped}};
}

Json criterion_4(bool& pass) {
  Json rows = Json::array();
  bool all = true;
  auto expect = [&](const ClassificationVerdict& v, bool want, const std::string& label) {
    bool ok = v.is_spacetime == want;
    all = all && ok;
    rows.push_back({{"case", label},
                    {"expected", want ? "yes" : "no"},
                    {"got", v.is_spacetime ? "yes" : "no"},
                    {"reason", v.reason},
                    {"ok", ok}});
  };

  expect(classify_randers(-0.25), false, "randers bnorm=-0.25");
  expect(classify_randers(0.0), true, "randers bnorm=0");
  expect(classify_randers(0.5), true, "randers bnorm=0.5");
  expect(classify_randers(1.0), false, "randers bnorm=1.0");
  expect(classify_randers(1.2), false, "randers bnorm=1.2");

  expect(classify_bogoslovsky(0.0, -1.0), true, "bogoslovsky bnorm=0 q=-1");
  expect(classify_bogoslovsky(0.0, -1.01), false, "bogoslovsky bnorm=0 q=-1.01");
  expect(classify_bogoslovsky(0.0, 0.99), true, "bogoslovsky bnorm=0 q=0.99");
  expect(classify_bogoslovsky(0.0, 1.0), false, "bogoslovsky bnorm=0 q=1");
  expect(classify_bogoslovsky(-0.5, 0.5), true, "bogoslovsky bnorm=-0.5 q=0.5");
  expect(classify_bogoslovsky(-0.5, -0.5), false, "bogoslovsky bnorm=-0.5 q=-0.5");

  expect(classify_kundt(0.25, 1.0, -1.0, 0.5), true, "kundt k=1 m=-1 sign gate");
  expect(classify_kundt(0.25, -1.0, 1.0, 0.5), false, "kundt k=-1 m=1");
  expect(classify_kundt(0.25, 1.0, -1.0, 1.0), true, "kundt p=1 bnorm=0.25");
  expect(classify_kundt(-0.2, 1.0, -1.0, 1.0), false, "kundt p=1 bnorm=-0.2");
  expect(classify_kundt(-0.2, 1.0, -1.0, -0.5), true, "kundt p=-0.5 bnorm=-0.2");

  MetricField mk = MetricField::minkowski(4);
  ConeSampleConfig cfg;
  cfg.s_probe_max = 1e8;  // the probe must extend past e^kappa/1e-6 for kappa=1
  for (double bn : {0.25, 0.5, 1.0}) {
    double t = std::sqrt(bn);
    OneFormField b = OneFormField::constant((Vec(4) << t, 0, 0, 0).finished());
    PsiSpec mb = PsiSpec::maxwell_boltzmann(1.0, bn);
    expect(classify_exponential(mk, b, mb.P_text, bn, cfg), true,
           "maxwell-boltzmann k=1 bnorm=" + num(bn));
  }

  pass = all;
  return Json{{"table", rows}};
}

struct YesRow {
  std::string label;
  FamilySet fs;
};

std::vector<YesRow> criterion5_rows() {
  const double q0 = 0.3;
  MetricField cm = MetricField::conformal_minkowski(q0, 4);
  OneFormField b_light_past = expr_oneform({"-exp(0.3*x0)", "exp(0.3*x0)", "0", "0"});
  OneFormField b_light_future = expr_oneform({"exp(0.3*x0)", "exp(0.3*x0)", "0", "0"});
  OneFormField b_past_05 = expr_oneform({"-0.70710678118654752*exp(0.3*x0)", "0", "0", "0"});
  OneFormField b_time_025 = expr_oneform({"0.5*exp(0.3*x0)", "0", "0", "0"});
  OneFormField b_time_05 = expr_oneform({"0.70710678118654752*exp(0.3*x0)", "0", "0", "0"});
  OneFormField b_time_1 = expr_oneform({"exp(0.3*x0)", "0", "0", "0"});
  OneFormField b_space_half = expr_oneform({"0", "0.70710678118654752*exp(0.3*x0)", "0", "0"});
  OneFormField b_space_02 = expr_oneform({"0", "0.44721359549995794*exp(0.3*x0)", "0", "0"});

  std::vector<YesRow> rows;
  rows.push_back({"randers bnorm=0", {"", cm, b_light_past, PsiSpec::randers()}});
  rows.push_back({"randers bnorm=0.5", {"", cm, b_past_05, PsiSpec::randers()}});
  rows.push_back(
      {"bogoslovsky bnorm=0 q=-1", {"", cm, b_light_future, PsiSpec::bogoslovsky_kropina(-1.0)}});
  rows.push_back({"bogoslovsky bnorm=0 q=0.99",
                  {"", cm, b_light_future, PsiSpec::bogoslovsky_kropina(0.99)}});
  rows.push_back({"bogoslovsky bnorm=-0.5 q=0.5",
                  {"", cm, b_space_half, PsiSpec::bogoslovsky_kropina(0.5)}});
  rows.push_back({"kundt k=1 m=-1 p=0.5 bnorm=0.25",
                  {"", cm, b_time_025, PsiSpec::kundt(1.0, -1.0, 0.5)}});
  rows.push_back(
      {"kundt k=1 m=-1 p=1 bnorm=0.25", {"", cm, b_time_025, PsiSpec::kundt(1.0, -1.0, 1.0)}});
  rows.push_back({"kundt k=1 m=-1 p=-0.5 bnorm=-0.2",
                  {"", cm, b_space_02, PsiSpec::kundt(1.0, -1.0, -0.5)}});
  rows.push_back(
      {"maxwell-boltzmann bnorm=0.25", {"", cm, b_time_025, PsiSpec::maxwell_boltzmann(1.0, 0.25)}});
  rows.push_back(
      {"maxwell-boltzmann bnorm=0.5", {"", cm, b_time_05, PsiSpec::maxwell_boltzmann(1.0, 0.5)}});
  rows.push_back(
      {"maxwell-boltzmann bnorm=1", {"", cm, b_time_1, PsiSpec::maxwell_boltzmann(1.0, 1.0)}});
  return rows;
}

Json criterion_5(uint64_t seed, bool& pass) {
  Json rows = Json::array();
  bool all = true;
  for (const YesRow& row : criterion5_rows()) {
    ConeSampleConfig cfg;
    cfg.n_samples = 1000;
    cfg.rng_seed = seed ^ 0xc5;
    std::vector<Vec> points = random_points(seed ^ 0xc5, 4, 5);
    Json rj;
    rj["row"] = row.label;
    try {
      VerificationReport rep =
          verify_by_sampling(row.fs.metric, row.fs.oneform, row.fs.psi, points, cfg);
      bool ok = rep.clean();
      rj["verdict"] = rep.verdict;
      rj["failures"] = rep.failures;
      rj["marginal"] = rep.marginal;
      rj["total_samples"] = rep.total_samples;
      rj["s_observed"] = {{"min", rep.s_min}, {"max", rep.s_max}};
      if (!rep.counterexamples.empty())
        rj["first_counterexample"] = rep.counterexamples.front().failed;
      rj["ok"] = ok;
      all = all && ok;
    } catch (const Error& e) {
      rj["ok"] = false;
      rj["error"] = e.what();
      all = false;
    }
    rows.push_back(rj);
  }
  pass = all;
  return Json{{"rows", rows}};
}

Json criterion_6(bool& pass) {
  Json rows = Json::array();
  bool all = true;
  for (double bn : {0.25, 1.0, 4.0}) {
    std::vector<double> grid;
    int N = 1000;
    for (int i = 0; i < N; ++i)
      grid.push_back(bn * std::pow(100.0, static_cast<double>(i) / (N - 1)));
    MbCheckResult r = mb_polynomial_check(bn, grid);
    rows.push_back({{"bnorm", bn},
                    {"pass", r.pass},
                    {"min_quartic", r.min_quartic},
                    {"min_margin", r.min_margin},
                    {"max_identity_resid", r.max_identity_resid}});
    all = all && r.pass;
  }
  pass = all;
  return Json{{"grids", rows}, {"grid_points", 1000}};
}

Json criterion_7(uint64_t seed, bool& pass) {
  Json rows = Json::array();
  bool all = true;
  for (double q : {0.25, 0.5, 0.75}) {
    MetricField a = MetricField::conformal_minkowski(q, 4);
    std::string eb = "exp(" + num(q - 1.0) + "*x0)";
    OneFormField b = expr_oneform({eb, eb, "0", "0"});
    PsiSpec psi = PsiSpec::bogoslovsky_kropina(q);
    VectorField xi0 = VectorField::coordinate(0, 4);
    VectorField xi2 = VectorField::coordinate(2, 4);
    std::vector<Vec> points = random_points(seed ^ 0xc7, 4, 5);

    ConeSampleConfig cfg;
    cfg.n_samples = 200;  // 5 points x 200 = 1000 (x, v) pairs
    cfg.rng_seed = seed ^ 0xc7;

    double max_resid = 0;
    for (size_t ip = 0; ip < points.size(); ++ip) {
      std::vector<Vec> vs = sample_cone(psi, a, b, points[ip], cfg, {}, ip);
      for (const Vec& v : vs) {
        KillingResidual r = killing_residual(a, b, psi, xi0, points[ip], v);
        max_resid = std::max(max_resid, std::abs(r.normalized));
      }
    }

    TrivialityResult tr0 = is_trivial_symmetry(a, b, xi0, points);
    TrivialityResult tr2 = is_trivial_symmetry(a, b, xi2, points);
    SymmetryParams sp;
    sp.kappa = 1.0;
    sp.lambda2 = q - 1.0;
    sp.mu1 = 2.0 * q;
    sp.mu2 = 0.0;
    NontrivialReport nr = nontrivial_condition_check(a, b, xi0, sp, points, 64, seed ^ 0xc7);
    SymmetryParams sp_fit = sp;
    sp_fit.kappa.reset();  // the coordinate-2 field must come out with fitted kappa = 0
    NontrivialReport nr2 = nontrivial_condition_check(a, b, xi2, sp_fit, points, 64, seed ^ 0xc7);

    bool ok = max_resid <= 1e-8 && !tr0.trivial && nr.pass && tr2.trivial && nr2.trivial_kappa;
    rows.push_back({{"q", q},
                    {"max_residual", max_resid},
                    {"residual_tolerance", 1e-8},
                    {"xi0_trivial", tr0.trivial},
                    {"xi0_nontrivial_conditions_pass", nr.pass},
                    {"xi0_max_rel_first", nr.max_rel_first},
                    {"xi0_max_rel_second", nr.max_rel_second},
                    {"xi2_trivial", tr2.trivial},
                    {"xi2_fitted_kappa_zero", nr2.trivial_kappa},
                    {"ok", ok}});
    all = all && ok;
  }
  pass = all;
  return Json{{"cases", rows}};
}

Json criterion_8(bool& pass) {
  Json rows = Json::array();
  bool all = true;
  for (double q : {0.25, 0.5, 0.75}) {
    SymmetryParams sp;
    sp.c = 1.0;
    sp.lambda2 = q - 1.0;
    sp.mu1 = 2.0 * q;
    sp.mu2 = 0.0;
    PsiSpec psi = build_symmetry_psi(sp);
    double max_dev = 0;
    for (int i = 0; i <= 200; ++i) {
      double s = 0.1 + (10.0 - 0.1) * i / 200.0;
      double want = std::pow(s, q);
      max_dev = std::max(max_dev, std::abs(psi.eval(s).psi - want) / std::max(1.0, want));
    }
    bool ok = max_dev <= 1e-10;
    rows.push_back({{"q", q}, {"max_pointwise_dev", max_dev}, {"tolerance", 1e-10}, {"ok", ok}});
    all = all && ok;
  }

  // ODE residual s - Psi/Psi' = 2 lambda2 s / (mu1 + mu2 s), both branches
  auto ode_case = [&](double c, double l2, double m1, double m2, const std::string& label) {
    PsiSpec psi = PsiSpec::symmetry_family(c, l2, m1, m2);
    double max_resid = 0;
    for (int i = 0; i <= 100; ++i) {
      double s = 0.1 + (10.0 - 0.1) * i / 100.0;
      PsiEval e = psi.eval(s);
      double lhs = s - e.psi / e.dpsi;
      double rhs = 2.0 * l2 * s / (m1 + m2 * s);
      max_resid = std::max(max_resid, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
    }
    bool ok = max_resid <= 1e-8;
    rows.push_back({{"ode_branch", label}, {"max_resid", max_resid}, {"ok", ok}});
    all = all && ok;
  };
  ode_case(1.0, -0.5, 1.0, 0.7, "branch mu1 != 2*lambda2 (mu2 != 0)");
  ode_case(2.0, -0.75, 0.5, 0.0, "branch mu1 != 2*lambda2 (mu2 = 0)");
  ode_case(1.0, 1.0, 2.0, 1.0, "branch mu1 = 2*lambda2");

  pass = all;
  return Json{{"cases", rows}, {"ode_tolerance", 1e-8}};
}

Json criterion_9(uint64_t seed, bool& pass) {
  double max_det1 = 0, max_inv1 = 0, max_det2 = 0, max_inv2 = 0;
  long redraws = 0;
  const int N = 10000;
  for (int i = 0; i < N; ++i) {
    Mat Q;
    Vec B(4), C(4);
    double delta = 0, mu = 0;
    for (uint64_t attempt = 0;; ++attempt) {
      Rng rng = Rng::substream(seed ^ 0xc9, static_cast<uint64_t>(i), attempt);
      Q = Mat(4, 4);
      for (int r = 0; r < 4; ++r)
        for (int c = r; c < 4; ++c) Q(r, c) = Q(c, r) = rng.next_normal();
      for (int r = 0; r < 4; ++r) B[r] = rng.next_normal();
      for (int r = 0; r < 4; ++r) C[r] = rng.next_normal();
      delta = rng.next_in(-1.0, 1.0);
      mu = rng.next_in(-1.0, 1.0);
      if (std::abs(Q.determinant()) < 1e-2) {
        ++redraws;
        continue;
      }
      Mat qinv = Q.inverse();
      double bb = B.dot(qinv * B), cc = C.dot(qinv * C), bc = B.dot(qinv * C);
      double bracket = (1.0 + delta * bb) * (1.0 + mu * cc) - delta * mu * bc * bc;
      // near-singular base or update measures conditioning, not the identity:
      // require every intermediate determinant to stay O(1)
      if (std::abs(1.0 + delta * bb) < 1e-1 ||
          std::abs(Q.determinant() * (1.0 + delta * bb)) < 1e-2 ||
          std::abs(Q.determinant() * bracket) < 1e-2) {
        ++redraws;
        continue;
      }
      break;
    }

    Mat M1 = Q + delta * (B * B.transpose());
    double d1 = rank_one_update_det(Q, delta, B);
    max_det1 = std::max(max_det1, std::abs(d1 - M1.determinant()) /
                                      std::max(std::abs(M1.determinant()), 1e-300));
    Mat i1 = rank_one_update_inv(Q, delta, B);
    max_inv1 = std::max(max_inv1, max_abs(Mat(i1 - M1.inverse())) / max_abs(Mat(M1.inverse())));

    Mat M2 = M1 + mu * (C * C.transpose());
    double d2 = rank_two_update_det(Q, delta, B, mu, C);
    max_det2 = std::max(max_det2, std::abs(d2 - M2.determinant()) /
                                      std::max(std::abs(M2.determinant()), 1e-300));
    Mat i2 = rank_two_update_inv(Q, delta, B, mu, C);
    max_inv2 = std::max(max_inv2, max_abs(Mat(i2 - M2.inverse())) / max_abs(Mat(M2.inverse())));
  }

  // block contractions behind the update decomposition, at admissible samples
  MetricField cm = MetricField::conformal_minkowski(0.3, 4);
  OneFormField b = expr_oneform({"0.5*exp(0.3*x0)", "0.1*exp(0.3*x0)", "0", "0"});
  PsiSpec psi = PsiSpec::bogoslovsky_kropina(0.5);
  std::vector<Vec> points = random_points(seed ^ 0xc9b, 4, 5);
  ConeSampleConfig cfg;
  cfg.n_samples = 20;
  cfg.rng_seed = seed ^ 0xc9b;
  double max_blocks = 0;
  for (size_t ip = 0; ip < points.size(); ++ip) {
    std::vector<Vec> vs = sample_cone(psi, cm, b, points[ip], cfg, {}, ip);
    Mat ainv = cm.inverse_at(points[ip]);
    for (const Vec& v : vs) {
      AlphaBetaScalars sc = eval_scalars(cm, b, points[ip], v);
      RankTwoUpdateParams up = decompose_update(cm, b, psi, points[ip], v);
      double BB = up.bvec.dot(ainv * up.bvec);
      double CC = up.cvec.dot(ainv * up.cvec);
      double BC = up.bvec.dot(ainv * up.cvec);
      double want_BB = sc.bnorm;
      double want_CC = 4.0 * sc.s / sc.A * (sc.bnorm - sc.s);
      double want_BC2 = 4.0 * sc.s / sc.A * (sc.bnorm - sc.s) * (sc.bnorm - sc.s);
      double scale = std::max({1.0, std::abs(want_BB), std::abs(want_CC), std::abs(want_BC2)});
      max_blocks = std::max(max_blocks, std::abs(BB - want_BB) / scale);
      max_blocks = std::max(max_blocks, std::abs(CC - want_CC) / scale);
      max_blocks = std::max(max_blocks, std::abs(BC * BC - want_BC2) / scale);
    }
  }

  pass = max_det1 <= 1e-10 && max_inv1 <= 1e-10 && max_det2 <= 1e-10 && max_inv2 <= 1e-10 &&
         max_blocks <= 1e-10;
  return Json{{"matrices", N},
              {"redraws", redraws},
              {"max_rel_det_rank1", max_det1},
              {"max_rel_inv_rank1", max_inv1},
              {"max_rel_det_rank2", max_det2},
              {"max_rel_inv_rank2", max_inv2},
              {"block_contractions_max_rel", max_blocks},
              {"tolerance", 1e-10}};
}

Json build_payload(uint64_t seed) {
  Json criteria = Json::array();
  auto add = [&](int id, const std::string& name, bool pass, Json detail) {
    criteria.push_back(
        {{"id", id}, {"name", name}, {"pass", pass}, {"detail", std::move(detail)}});
  };

  bool p;
  Json d;
  d = criterion_1(seed, p);
  add(1, "closed-form vs numeric-Hessian fundamental tensor", p, d);
  d = criterion_2(seed, p);
  add(2, "determinant formula (n = 3 and n = 4)", p, d);
  d = criterion_3(seed, p);
  add(3, "closed-form inverse and nu identity", p, d);
  d = criterion_4(p);
  add(4, "classification golden table", p, d);
  d = criterion_5(seed, p);
  add(5, "spacetime sampling corroboration of yes-rows", p, d);
  d = criterion_6(p);
  add(6, "Maxwell-Boltzmann quartic inequality", p, d);
  d = criterion_7(seed, p);
  add(7, "conformal-deformation Killing example", p, d);
  d = criterion_8(p);
  add(8, "symmetry-family Psi reconstruction and ODE", p, d);
  d = criterion_9(seed, p);
  add(9, "matrix determinant lemma suite", p, d);

  Json payload;
  payload["criteria"] = criteria;
  return payload;
}

}  // namespace

RunReport run_selftest(uint64_t seed) {
  auto t0 = std::chrono::steady_clock::now();
  RunReport rep;
  rep.body["tool"] = "abfinsler";
  rep.body["version"] = tool_version();
  rep.body["subcommand"] = "selftest";
  rep.body["seed"] = seed;

  Json payload = build_payload(seed);
  // criterion 10: rebuild everything from the same seed; reports must be
  // byte-identical once timing fields are stripped
  Json payload2 = build_payload(seed);
  auto strip_timing = [](Json j) {
    for (auto& c : j["criteria"])
      if (c["detail"].contains("runtime_seconds")) c["detail"].erase("runtime_seconds");
    return j;
  };
  bool deterministic = strip_timing(payload).dump() == strip_timing(payload2).dump();
  payload["criteria"].push_back(
      {{"id", 10},
       {"name", "determinism: identical seed, byte-identical report"},
       {"pass", deterministic},
       {"detail", Json{{"rebuilt_payload_bytes_equal", deterministic}}}});

  bool all = true;
  for (const auto& c : payload["criteria"]) all = all && c["pass"].get<bool>();
  payload["all_pass"] = all;
  rep.body["payload"] = payload;
  rep.verdict = all ? 0 : 1;

  auto dt = std::chrono::steady_clock::now() - t0;
  rep.body["wall_clock_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(dt).count();
  return rep;
}

}  // namespace abf
