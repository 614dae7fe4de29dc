#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fields.hpp"
#include "psi.hpp"
#include "tensor.hpp"

namespace abf {

struct ConeSampleConfig {
  int n_samples = 1000;
  uint64_t rng_seed = 0;
  int s_grid_size = 256;
  double s_probe_max = 1e6;   // large-s probe for limit conditions
  double strict_eps = 1e-9;   // tolerance band for strict inequalities
  // Rejection sampling keeps directions whose relative distance to the cone
  // boundary exceeds this; the boundary itself is measure zero, the margin
  // keeps eigenvalue ratios above the double-precision noise floor (they can
  // scale quadratically in the boundary distance, e.g. Randers).
  double interior_margin = 1e-4;
};

// Pointwise spacetime conditions at one (x, v):
//   A > 0, Psi > 0, Psi - s Psi' > 0, sigma + rho sigma' > 0
// (the last is the log-derivative condition cleared of denominators).
struct ConditionCheck {
  bool positivity_A = false;
  bool positivity_Psi = false;
  bool first_ineq = false;
  bool second_ineq = false;
  bool boundary_L_to_zero = true;  // filled by the per-point boundary probe
  double A = 0, psi = 0, psi_minus_s_dpsi = 0, second_lhs = 0;
  bool marginal = false;       // some LHS inside the strict_eps band
  bool domain_error = false;   // Psi not evaluable: automatic failure
  std::string domain_message;

  bool all_pass() const {
    return !domain_error && positivity_A && positivity_Psi && first_ineq && second_ineq;
  }
};

struct ClassificationVerdict {
  std::string family;
  bool is_spacetime = false;
  std::string reason;
  std::string cone_description;
  bool grid_corroborated = false;  // exponential family: grid check, not a proof
};

struct Counterexample {
  Vec x, v;
  AlphaBetaScalars scalars;
  double det_g = 0;
  std::vector<double> eigenvalues;
  std::string failed;
};

struct BoundaryProbe {
  bool decayed_to_zero = false;
  double fitted_exponent = 0;
  double last_L = 0;
  double last_s = 0;
};

struct PointSummary {
  Vec x;
  double bnorm = 0;
  double s0 = 0;
  long samples = 0;
  long failures = 0;
  long marginal = 0;
  double s_min = 0, s_max = 0;
  std::vector<BoundaryProbe> boundary_probes;
};

struct VerificationReport {
  std::string verdict;  // "corroborated" | "falsified"
  long total_samples = 0;
  long failures = 0;
  long marginal = 0;
  std::vector<Counterexample> counterexamples;  // first 10
  double s_min = 0, s_max = 0;
  std::vector<PointSummary> points;
  std::string assumptions;

  bool clean() const { return verdict == "corroborated" && marginal == 0 && failures == 0; }
};

ConditionCheck check_conditions_at(const MetricField& metric, const OneFormField& oneform,
                                   const PsiSpec& spec, const Vec& x, const Vec& v,
                                   double strict_eps = 1e-9);

// Reference future-pointing timelike vector: user-supplied, else coordinate
// e_0 where a_00 > 0.
Vec reference_timelike(const MetricField& metric, const Vec& x,
                       const std::optional<Vec>& user_ref);

// Membership in the family's future-pointing cone at x.
bool cone_membership(const PsiSpec& spec, const MetricField& metric, const OneFormField& oneform,
                     const Vec& x, const Vec& v, const std::optional<Vec>& user_ref = {});

// Rejection sampling of the cone; kept vectors are normalized to A = 1.
// Deterministic under cfg.rng_seed (counter-based substreams).
std::vector<Vec> sample_cone(const PsiSpec& spec, const MetricField& metric,
                             const OneFormField& oneform, const Vec& x,
                             const ConeSampleConfig& cfg,
                             const std::optional<Vec>& user_ref = {},
                             uint64_t point_index = 0);

VerificationReport verify_by_sampling(const MetricField& metric, const OneFormField& oneform,
                                      const PsiSpec& spec, const std::vector<Vec>& points,
                                      const ConeSampleConfig& cfg,
                                      const std::optional<Vec>& user_ref = {});

ClassificationVerdict classify_randers(double bnorm);
ClassificationVerdict classify_bogoslovsky(double bnorm, double q);
ClassificationVerdict classify_kundt(double bnorm, double k, double m, double p);
ClassificationVerdict classify_exponential(const MetricField& metric, const OneFormField& oneform,
                                           const std::string& P_expr, double bnorm,
                                           const ConeSampleConfig& cfg);

struct MbCheckResult {
  bool pass = false;
  double min_quartic = 0;
  double min_margin = 0;
  double max_identity_resid = 0;  // relative residual of margin*s^5 == (s-bb)*quartic
  double worst_s = 0;
};

// Quartic inequality s^4 + bb s^3 + 5 bb^2 s^2 - bb^4 > 0 on the grid, and
// sign agreement with the directly evaluated third exponential condition.
MbCheckResult mb_polynomial_check(double bnorm, const std::vector<double>& s_grid);

}  // namespace abf
