#include "verifier.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "error.hpp"
#include "rng.hpp"

namespace abf {

namespace {

constexpr const char* kAssumptions =
    "connectedness of sampled cone fibers is assumed, not verified; "
    "corroboration is over finitely many samples, not a proof";

struct Tri {
  bool pass = false;
  bool marginal = false;
};

// Strict inequality lhs > 0 with a relative tolerance band.
Tri strict_positive(double lhs, double scale, double eps) {
  double band = eps * std::max(scale, 0.0);
  Tri t;
  if (lhs > band) {
    t.pass = true;
  } else if (lhs >= -band) {
    t.marginal = true;
  }
  return t;
}

}  // namespace

ConditionCheck check_conditions_at(const MetricField& metric, const OneFormField& oneform,
                                   const PsiSpec& base_spec, const Vec& x, const Vec& v,
                                   double strict_eps) {
  ConditionCheck c;
  AlphaBetaScalars sc = eval_scalars(metric, oneform, x, v);
  Mat a = metric.value(x);
  c.A = sc.A;

  double scale_A = std::max(1.0, max_abs(a)) * v.squaredNorm();
  Tri tA = strict_positive(sc.A, scale_A, strict_eps);
  c.positivity_A = tA.pass;
  c.marginal = c.marginal || tA.marginal;

  if (!sc.s_defined) {
    c.domain_error = true;
    c.domain_message = "A = 0: s undefined";
    return c;
  }

  PsiSpec spec = base_spec.with_bnorm(sc.bnorm);
  PsiEval e;
  try {
    e = spec.eval(sc.s);
  } catch (const Error& err) {
    c.domain_error = true;
    c.domain_message = err.what();
    return c;
  }

  c.psi = e.psi;
  Tri tP = strict_positive(e.psi, std::max(1.0, std::abs(e.psi)), strict_eps);
  c.positivity_Psi = tP.pass;
  c.marginal = c.marginal || tP.marginal;

  double w = e.psi - sc.s * e.dpsi;
  c.psi_minus_s_dpsi = w;
  double scale_w = std::max(std::abs(e.psi), std::abs(sc.s * e.dpsi));
  Tri tW = strict_positive(w, scale_w, strict_eps);
  c.first_ineq = tW.pass;
  c.marginal = c.marginal || tW.marginal;

  try {
    double sig = sigma_eval(spec, sc.s);
    double sigp = sigma_prime(spec, sc.s);
    double second = sig + sc.rho * sigp;
    c.second_lhs = second;
    double scale_2 = std::max(std::abs(sig), std::abs(sc.rho * sigp));
    Tri t2 = strict_positive(second, scale_2, strict_eps);
    c.second_ineq = t2.pass;
    c.marginal = c.marginal || t2.marginal;
  } catch (const Error& err) {
    c.domain_error = true;
    c.domain_message = err.what();
  }
  return c;
}

Vec reference_timelike(const MetricField& metric, const Vec& x,
                       const std::optional<Vec>& user_ref) {
  Mat a = metric.value(x);
  if (user_ref) {
    const Vec& t = *user_ref;
    if (t.size() != metric.dim())
      fail(Code::ValidationError, "reference timelike vector dimension mismatch");
    if (!(t.dot(a * t) > 0))
      fail(Code::ValidationError, "configured reference vector is not timelike at this point");
    return t;
  }
  Vec e0 = Vec::Zero(metric.dim());
  e0[0] = 1.0;
  if (!(a(0, 0) > 0))
    fail(Code::ValidationError,
         "default time orientation needs a_00 > 0; configure reference_timelike");
  return e0;
}

namespace {

bool future_timelike(const Mat& a, const Vec& tref, const Vec& v) {
  return v.dot(a * v) > 0 && tref.dot(a * v) > 0;
}

// Relative distance of v from the boundary of the family cone (min over the
// active constraints); negative outside. Used only to keep samples away from
// the boundary where the fundamental tensor degenerates numerically.
double membership_margin(const PsiSpec& spec, const Mat& a, const Vec& b, double bnorm,
                         const Vec& tref, const Vec& v) {
  double A = v.dot(a * v);
  double B = b.dot(v);
  double ascale = std::max(1.0, max_abs(a)) * v.squaredNorm();
  double bscale = std::max(1e-300, b.norm() * v.norm());
  double m = std::min(A / ascale, tref.dot(a * v) / ascale);
  switch (spec.family()) {
    case PsiFamily::Lorentzian:
    case PsiFamily::Exponential:
      return m;
    case PsiFamily::Randers:
      return std::min(m, (A - B * B) / (std::abs(A) + B * B + 1e-300));
    case PsiFamily::BogoslovskyKropina:
      if (bnorm < 0) m = std::min(m, B / bscale);
      return m;
    case PsiFamily::Kundt: {
      double num = spec.k * A + spec.m * B * B;
      double den = std::abs(spec.k) * std::abs(A) + std::abs(spec.m) * B * B + 1e-300;
      m = std::min(m, num / den);
      if (bnorm < 0) m = std::min(m, B / bscale);
      return m;
    }
    default:
      fail(Code::UnsupportedFamily, "cone membership is defined for built-in families only");
  }
}

}  // namespace

bool cone_membership(const PsiSpec& spec, const MetricField& metric, const OneFormField& oneform,
                     const Vec& x, const Vec& v, const std::optional<Vec>& user_ref) {
  Mat a = metric.value(x);
  Vec b = oneform.value(x);
  Vec tref = reference_timelike(metric, x, user_ref);
  double A = v.dot(a * v);
  double B = b.dot(v);

  switch (spec.family()) {
    case PsiFamily::Lorentzian:
    case PsiFamily::Exponential:
      return future_timelike(a, tref, v);
    case PsiFamily::Randers:
      return future_timelike(a, tref, v) && A - B * B > 0;
    case PsiFamily::BogoslovskyKropina: {
      double bnorm = b.dot(metric.inverse_at(x) * b);
      bool member = future_timelike(a, tref, v);
      if (bnorm < 0) member = member && B > 0;  // half-space clause for spacelike b
      return member;
    }
    case PsiFamily::Kundt: {
      double bnorm = b.dot(metric.inverse_at(x) * b);
      bool member = future_timelike(a, tref, v) && spec.k * A + spec.m * B * B > 0;
      if (bnorm < 0) member = member && B > 0;
      return member;
    }
    default:
      fail(Code::UnsupportedFamily, "cone membership is defined for built-in families only");
  }
}

std::vector<Vec> sample_cone(const PsiSpec& spec, const MetricField& metric,
                             const OneFormField& oneform, const Vec& x,
                             const ConeSampleConfig& cfg, const std::optional<Vec>& user_ref,
                             uint64_t point_index) {
  int n = metric.dim();
  Mat a = metric.value(x);
  Vec b = oneform.value(x);
  double bnorm = b.dot(metric.inverse_at(x) * b);
  Vec tref = reference_timelike(metric, x, user_ref);

  std::vector<Vec> out;
  out.reserve(cfg.n_samples);
  constexpr uint64_t kMaxDraws = 1000000;
  for (uint64_t draw = 0; draw < kMaxDraws && static_cast<int>(out.size()) < cfg.n_samples;
       ++draw) {
    Rng rng = Rng::substream(cfg.rng_seed, point_index, draw);
    Vec d(n);
    for (int i = 0; i < n; ++i) d[i] = rng.next_normal();
    double nrm = d.norm();
    if (nrm < 1e-12) continue;
    d /= nrm;
    double orient = tref.dot(a * d);
    if (orient == 0.0) continue;
    if (orient < 0.0) d = -d;
    if (!cone_membership(spec, metric, oneform, x, d, user_ref)) continue;
    if (membership_margin(spec, a, b, bnorm, tref, d) < cfg.interior_margin) continue;
    double A = d.dot(a * d);
    out.push_back(d / std::sqrt(A));  // normalize to A(v) = 1
  }
  if (out.empty())
    fail(Code::EmptyCone, "no cone member found in 1e6 draws (acceptance rate 0)");
  if (static_cast<int>(out.size()) < cfg.n_samples)
    fail(Code::EmptyCone, "cone acceptance too low: got " + std::to_string(out.size()) + " of " +
                              std::to_string(cfg.n_samples) + " samples in 1e6 draws");
  return out;
}

namespace {

// Push from an interior direction toward the cone boundary and watch L: inside
// a spacetime it must decrease monotonically to 0 (a power law in the boundary
// distance; the fitted exponent may be tiny, e.g. 1-q for Bogoslovsky-Kropina).
BoundaryProbe probe_boundary(const PsiSpec& spec0, const MetricField& metric,
                             const OneFormField& oneform, const Vec& x, const Vec& interior,
                             Rng& rng, const std::optional<Vec>& user_ref, double bnorm) {
  BoundaryProbe probe;
  PsiSpec spec = spec0.with_bnorm(bnorm);
  int n = metric.dim();
  Mat a = metric.value(x);
  Vec b = oneform.value(x);

  Vec outside;
  bool found = false;
  for (int tries = 0; tries < 256 && !found; ++tries) {
    Vec w(n);
    for (int i = 0; i < n; ++i) w[i] = rng.next_normal();
    if (w.norm() < 1e-12) continue;
    w /= w.norm();
    if (!cone_membership(spec, metric, oneform, x, w, user_ref)) {
      outside = w;
      found = true;
    }
  }
  if (!found) return probe;  // no exterior direction found; nothing to probe

  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 80; ++it) {
    double mid = 0.5 * (lo + hi);
    Vec v = (1.0 - mid) * interior + mid * outside;
    if (cone_membership(spec, metric, oneform, x, v, user_ref))
      lo = mid;
    else
      hi = mid;
  }
  double tstar = hi;

  std::vector<double> Ls;
  double last_s = 0;
  for (int k = 8; k <= 44; ++k) {
    double t = tstar * (1.0 - std::ldexp(1.0, -k));
    Vec v = (1.0 - t) * interior + t * outside;
    double A = v.dot(a * v);
    double B = b.dot(v);
    if (A == 0.0) return probe;
    double s = B * B / A;
    double L;
    try {
      L = A * spec.eval(s).psi;
    } catch (const Error&) {
      return probe;  // Psi left its domain strictly inside the cone
    }
    if (!std::isfinite(L)) return probe;
    Ls.push_back(std::abs(L));
    last_s = s;
  }

  probe.last_L = Ls.back();
  probe.last_s = last_s;

  bool monotone = true;
  for (size_t i = 12; i + 1 < Ls.size(); ++i)
    if (Ls[i + 1] > Ls[i] * (1.0 + 1e-9)) monotone = false;

  // halving the boundary distance scales L by 2^{-gamma} for L ~ C d^gamma
  std::vector<double> gammas;
  for (size_t i = Ls.size() - 13; i + 1 < Ls.size(); ++i)
    if (Ls[i] > 0 && Ls[i + 1] > 0) gammas.push_back(std::log2(Ls[i] / Ls[i + 1]));
  double gamma = 0;
  if (!gammas.empty()) {
    std::sort(gammas.begin(), gammas.end());
    gamma = gammas[gammas.size() / 2];
  }
  probe.fitted_exponent = gamma;
  probe.decayed_to_zero = monotone && gamma > 1e-4;
  return probe;
}

std::string describe_failure(const ConditionCheck& c, const SignatureResult& sig, double det_g,
                             double s, double s0, double eps, bool randers_B_ok, int n) {
  std::ostringstream os;
  if (c.domain_error) os << "Psi domain error: " << c.domain_message << "; ";
  if (!c.domain_error) {
    if (!c.positivity_A) os << "A > 0 failed; ";
    if (!c.positivity_Psi) os << "Psi > 0 failed; ";
    if (!c.first_ineq) os << "Psi - s Psi' > 0 failed (value " << c.psi_minus_s_dpsi << "); ";
    if (!c.second_ineq) os << "sigma + rho sigma' > 0 failed (value " << c.second_lhs << "); ";
    if (det_g >= 0) os << "det g = " << det_g << " >= 0; ";
    if (!(sig.n_pos == 1 && sig.n_neg == n - 1 && sig.n_zero == 0))
      os << "signature (" << sig.n_pos << "," << sig.n_neg << "," << sig.n_zero
         << ") != (1," << n - 1 << ",0); ";
    if (s < s0 - eps * std::max(1.0, std::abs(s0)))
      os << "s = " << s << " < s0 = " << s0 << "; ";
    if (!randers_B_ok) os << "B > 0 inside a Randers cone; ";
  }
  return os.str();
}

}  // namespace

VerificationReport verify_by_sampling(const MetricField& metric, const OneFormField& oneform,
                                      const PsiSpec& spec, const std::vector<Vec>& points,
                                      const ConeSampleConfig& cfg,
                                      const std::optional<Vec>& user_ref) {
  if (points.empty()) fail(Code::InvalidParams, "verify_by_sampling needs at least one point");
  VerificationReport rep;
  rep.assumptions = kAssumptions;
  rep.s_min = std::numeric_limits<double>::infinity();
  rep.s_max = -std::numeric_limits<double>::infinity();
  int n = metric.dim();
  double eps = cfg.strict_eps;

  for (size_t ip = 0; ip < points.size(); ++ip) {
    const Vec& x = points[ip];
    PointSummary ps;
    ps.x = x;
    ps.bnorm = b_norm(metric, oneform, x);
    ps.s0 = s_lower_bound(ps.bnorm);
    ps.s_min = std::numeric_limits<double>::infinity();
    ps.s_max = -std::numeric_limits<double>::infinity();
    PsiSpec local = spec.with_bnorm(ps.bnorm);
    Vec b = oneform.value(x);

    std::vector<Vec> samples = sample_cone(local, metric, oneform, x, cfg, user_ref, ip);
    for (const Vec& v : samples) {
      ++rep.total_samples;
      ++ps.samples;
      ConditionCheck c = check_conditions_at(metric, oneform, local, x, v, eps);
      AlphaBetaScalars sc = eval_scalars(metric, oneform, x, v);
      double det_g = 0;
      SignatureResult sig;
      bool tensor_ok = true;
      try {
        FundamentalTensor ft = fundamental_tensor_closed(metric, oneform, local, x, v);
        det_g = det_g_closed(metric, oneform, local, x, v);
        // zero-band just above the eigensolver noise floor (~eps * |lambda|max);
        // eigenvalues resolved beyond roundoff keep their sign even when the
        // sample sits close to the cone boundary
        sig = signature(ft.g, 1e-14);
      } catch (const Error& err) {
        tensor_ok = false;
        c.domain_error = true;
        if (c.domain_message.empty()) c.domain_message = err.what();
      }

      if (sc.s_defined) {
        ps.s_min = std::min(ps.s_min, sc.s);
        ps.s_max = std::max(ps.s_max, sc.s);
        rep.s_min = std::min(rep.s_min, sc.s);
        rep.s_max = std::max(rep.s_max, sc.s);
      }

      bool randers_B_ok = true;
      if (local.family() == PsiFamily::Randers) {
        double scale_B = std::max(1e-300, b.norm() * v.norm());
        randers_B_ok = sc.B <= eps * scale_B;
      }

      bool det_ok = false, det_marginal = false, sig_ok = false;
      if (tensor_ok) {
        PsiEval e = local.eval(sc.s);
        double w = e.psi - sc.s * e.dpsi;
        double det_scale = std::max(1e-300, e.psi * e.psi * std::pow(std::abs(w), n - 3) *
                                                std::abs(metric.value(x).determinant()));
        det_ok = det_g < -eps * det_scale;
        det_marginal = !det_ok && det_g <= eps * det_scale;
        sig_ok = sig.n_pos == 1 && sig.n_neg == n - 1 && sig.n_zero == 0;
      }
      bool s_ok = sc.s_defined && sc.s >= ps.s0 - eps * std::max(1.0, std::abs(ps.s0));

      bool conditions_marginal_only =
          !c.domain_error && c.marginal && c.positivity_A && c.positivity_Psi && c.first_ineq &&
          c.second_ineq;
      bool hard_fail = !c.all_pass() || !(det_ok || det_marginal) || !sig_ok || !s_ok ||
                       !randers_B_ok;
      if (hard_fail && conditions_marginal_only && sig_ok && s_ok && randers_B_ok &&
          (det_ok || det_marginal)) {
        hard_fail = false;  // only tolerance-band marginals; not a counterexample
      }

      if (hard_fail) {
        ++rep.failures;
        ++ps.failures;
        if (rep.counterexamples.size() < 10) {
          Counterexample ce;
          ce.x = x;
          ce.v = v;
          ce.scalars = sc;
          ce.det_g = det_g;
          ce.eigenvalues = sig.eigenvalues;
          ce.failed = describe_failure(c, sig, det_g, sc.s_defined ? sc.s : 0.0, ps.s0, eps,
                                       randers_B_ok, n);
          rep.counterexamples.push_back(std::move(ce));
        }
      } else if (c.marginal || det_marginal) {
        ++rep.marginal;
        ++ps.marginal;
      }
    }

    // boundary probes: L must fade to zero toward the cone boundary
    Rng prng = Rng::substream(cfg.rng_seed ^ 0x626f756e64ULL, ip);
    size_t n_probes = std::min<size_t>(3, samples.size());
    for (size_t ipr = 0; ipr < n_probes; ++ipr) {
      const Vec& anchor = samples[ipr * samples.size() / n_probes];
      BoundaryProbe bp = probe_boundary(local, metric, oneform, x, anchor, prng, user_ref,
                                        ps.bnorm);
      if (!bp.decayed_to_zero) {
        ++rep.failures;
        ++ps.failures;
        if (rep.counterexamples.size() < 10) {
          Counterexample ce;
          ce.x = x;
          ce.v = anchor;
          ce.scalars = eval_scalars(metric, oneform, x, anchor);
          ce.failed =
              "boundary probe: |L| does not decay to 0 toward the cone boundary "
              "(fitted exponent " +
              std::to_string(bp.fitted_exponent) + ")";
          rep.counterexamples.push_back(std::move(ce));
        }
      }
      ps.boundary_probes.push_back(bp);
    }
    rep.points.push_back(std::move(ps));
  }

  rep.verdict = rep.counterexamples.empty() ? "corroborated" : "falsified";
  return rep;
}

ClassificationVerdict classify_randers(double bnorm) {
  ClassificationVerdict v;
  v.family = "randers";
  v.cone_description = "A - B^2 > 0 intersected with the future cone of a";
  std::ostringstream os;
  if (bnorm < 0) {
    v.is_spacetime = false;
    os << "<b,b> = " << bnorm << " < 0: a spacelike one-form never defines a Randers spacetime";
  } else if (bnorm >= 1.0) {
    v.is_spacetime = false;
    os << "<b,b> = " << bnorm << " >= 1 (the bound is strict)";
  } else {
    v.is_spacetime = true;
    os << "0 <= <b,b> = " << bnorm << " < 1";
  }
  v.reason = os.str();
  return v;
}

ClassificationVerdict classify_bogoslovsky(double bnorm, double q) {
  ClassificationVerdict v;
  v.family = "bogoslovsky-kropina";
  std::ostringstream os;
  if (q == 0.0) {
    v.is_spacetime = true;
    v.cone_description = "cones of A";
    v.reason = "q = 0 reduces to the Lorentzian metric L = A";
    return v;
  }
  if (bnorm >= 0) {
    v.cone_description = "cones of A";
    if (q >= -1.0 && q < 1.0) {
      v.is_spacetime = true;
      os << "<b,b> = " << bnorm << " >= 0 and q = " << q << " in [-1, 1)";
    } else {
      v.is_spacetime = false;
      os << "<b,b> >= 0 requires q in [-1, 1); q = " << q;
    }
  } else {
    v.cone_description = "cones of A intersected with the half-space B > 0";
    if (q > 0.0 && q < 1.0) {
      v.is_spacetime = true;
      os << "<b,b> = " << bnorm << " < 0 and q = " << q << " in (0, 1)";
    } else {
      v.is_spacetime = false;
      os << "<b,b> < 0 requires q in (0, 1); q = " << q;
    }
  }
  v.reason = os.str();
  return v;
}

ClassificationVerdict classify_kundt(double bnorm, double k, double m, double p) {
  if (k == 0.0) fail(Code::InvalidParams, "k must be nonzero (k = 0 gives a degenerate metric)");
  if (m == 0.0)
    fail(Code::InvalidParams, "m must be nonzero (m = 0 is the Bogoslovsky-Kropina class)");
  ClassificationVerdict v;
  v.family = "kundt";
  v.cone_description = "connected components of kA + mB^2 > 0 inside the future cone of a";
  std::ostringstream os;
  if (!(k > 0 && m < 0)) {
    v.is_spacetime = false;
    os << "sign gate failed: need k > 0 and m < 0, got k = " << k << ", m = " << m;
    v.reason = os.str();
    return v;
  }
  double gate = k + m * bnorm;
  if (!(gate > 0)) {
    v.is_spacetime = false;
    os << "k + m<b,b> = " << gate << " <= 0: the s-interval (s0, -k/m) is empty";
    v.reason = os.str();
    return v;
  }
  if (bnorm >= 0) {
    if (p > -1.0 && p <= 1.0) {
      v.is_spacetime = true;
      os << "k > 0, m < 0, k + m<b,b> = " << gate << " > 0, <b,b> = " << bnorm
         << " >= 0, p = " << p << " in (-1, 1]";
    } else {
      v.is_spacetime = false;
      os << "<b,b> >= 0 requires p in (-1, 1]; p = " << p;
    }
  } else {
    v.cone_description += " and the half-space B > 0";
    if (p > -1.0 && p < 0.0) {
      v.is_spacetime = true;
      os << "k > 0, m < 0, k + m<b,b> = " << gate << " > 0, <b,b> = " << bnorm << " < 0, p = "
         << p << " in (-1, 0)";
    } else {
      v.is_spacetime = false;
      os << "<b,b> < 0 requires p in (-1, 0); p = " << p;
    }
  }
  v.reason = os.str();
  return v;
}

ClassificationVerdict classify_exponential(const MetricField& metric, const OneFormField& oneform,
                                           const std::string& P_expr, double bnorm,
                                           const ConeSampleConfig& cfg) {
  (void)metric;
  (void)oneform;
  ClassificationVerdict v;
  v.family = "exponential";
  v.cone_description = "cones of A (Psi = e^P has no zeros)";
  v.grid_corroborated = true;

  PsiSpec spec = PsiSpec::exponential(P_expr, bnorm);
  double s0 = s_lower_bound(bnorm);
  double lo = s0 > 0 ? s0 * (1.0 + 1e-6) : 1e-6;
  double hi = cfg.s_probe_max;
  int N = std::max(cfg.s_grid_size, 16);

  // limit condition: e^{P(s)}/s decreasing along the tail, below 1e-6 at the probe end
  std::vector<double> limit_vals;
  int NL = std::max(64, N);
  for (int i = 0; i < NL; ++i) {
    double s = lo * std::pow(hi / lo, static_cast<double>(i) / (NL - 1));
    double val = std::exp(spec.P(s)) / s;
    if (!std::isfinite(val)) {
      v.is_spacetime = false;
      v.reason = "e^{P(s)}/s non-finite on the probe grid";
      return v;
    }
    limit_vals.push_back(val);
  }
  bool tail_monotone = true;
  for (size_t i = limit_vals.size() / 2; i + 1 < limit_vals.size(); ++i)
    if (limit_vals[i + 1] > limit_vals[i] * (1.0 + 1e-12)) tail_monotone = false;
  double final_val = limit_vals.back();
  if (!tail_monotone || !(final_val < 1e-6)) {
    v.is_spacetime = false;
    std::ostringstream os;
    os << "limit condition e^{P(s)}/s -> 0 not corroborated (tail "
       << (tail_monotone ? "monotone" : "not monotone") << ", value " << final_val
       << " at s = " << hi << ")";
    v.reason = os.str();
    return v;
  }

  // the two inequalities on a dense geometric grid over (s0, s_probe_max]
  for (int i = 0; i < N; ++i) {
    double s = lo * std::pow(hi / lo, static_cast<double>(i) / (N - 1));
    double dP = spec.dP(s), d2P = spec.d2P(s);
    double first = 1.0 - s * dP;
    Tri t1 = strict_positive(first, std::max(1.0, std::abs(s * dP)), cfg.strict_eps);
    if (!t1.pass) {
      v.is_spacetime = false;
      std::ostringstream os;
      os << "1 - s P' > 0 " << (t1.marginal ? "marginal" : "violated") << " at s = " << s
         << " (value " << first << ")";
      v.reason = os.str();
      return v;
    }
    double rhs = (s - bnorm) * (s * dP * dP + 2.0 * s * d2P + dP);
    double margin = first - rhs;
    Tri t3 =
        strict_positive(margin, std::max({1.0, std::abs(first), std::abs(rhs)}), cfg.strict_eps);
    if (!t3.pass && !t3.marginal) {
      v.is_spacetime = false;
      std::ostringstream os;
      os << "1 - s P' > (s - <b,b>)(s P'^2 + 2 s P'' + P') violated at s = " << s << " (margin "
         << margin << ")";
      v.reason = os.str();
      return v;
    }
  }

  v.is_spacetime = true;
  std::ostringstream os;
  os << "all three conditions corroborated on a " << N << "-point geometric grid over (" << s0
     << ", " << hi << "]";
  v.reason = os.str();
  return v;
}

MbCheckResult mb_polynomial_check(double bnorm, const std::vector<double>& s_grid) {
  if (!(bnorm > 0)) fail(Code::InvalidParams, "Maxwell-Boltzmann check requires <b,b> > 0");
  MbCheckResult r;
  r.min_quartic = std::numeric_limits<double>::infinity();
  r.min_margin = std::numeric_limits<double>::infinity();
  double bb = bnorm;
  bool ok = true;
  for (double s : s_grid) {
    double quart = s * s * s * s + bb * s * s * s + 5.0 * bb * bb * s * s - bb * bb * bb * bb;
    double dP = bb * bb / (s * s * s);
    double d2P = -3.0 * bb * bb / (s * s * s * s);
    double margin = (1.0 - s * dP) - (s - bb) * (s * dP * dP + 2.0 * s * d2P + dP);
    // exact algebra: margin * s^5 == (s - bb) * quartic
    double lhs = margin * std::pow(s, 5);
    double rhs = (s - bb) * quart;
    double resid =
        std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), std::pow(bb, 5), 1e-300});
    if (resid > r.max_identity_resid) {
      r.max_identity_resid = resid;
      r.worst_s = s;
    }
    r.min_quartic = std::min(r.min_quartic, quart);
    r.min_margin = std::min(r.min_margin, margin);
    bool sign_agrees = s <= bb * (1.0 + 1e-12) ? margin >= -1e-9 : margin > 0;
    if (!(quart > 0) || !sign_agrees || resid > 1e-9) ok = false;
  }
  r.pass = ok;
  return r;
}

}  // namespace abf
