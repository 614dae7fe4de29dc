#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "expr.hpp"

namespace abf {

enum class PsiFamily {
  Lorentzian,          // Psi = kappa
  Randers,             // Psi = (1 - sqrt(s))^2
  BogoslovskyKropina,  // Psi = s^q
  Kundt,               // Psi = (k + m s)^{p+1} / s^p
  Exponential,         // Psi = e^{P(s)}
  SymmetryFamily,      // the two integrated branches admitting nontrivial symmetries
  Custom,
};

const char* family_name(PsiFamily f);

struct PsiEval {
  double psi = 0;
  double dpsi = 0;
  double d2psi = 0;
};

struct SDomain {
  double lo = 0;
  double hi = std::numeric_limits<double>::infinity();
  bool lo_open = true;
  bool hi_open = true;
  std::string notes;
};

class PsiSpec {
 public:
  using Callback = std::function<double(double)>;

  static PsiSpec lorentzian(double kappa);
  static PsiSpec randers();
  static PsiSpec bogoslovsky_kropina(double q);
  static PsiSpec kundt(double k, double m, double p);
  // P given in the expression grammar over variables {s, bb}; bb is bound to
  // <b,b> at the evaluation point by the caller.
  static PsiSpec exponential(const std::string& P_expr, double bb_value = 0.0);
  static PsiSpec maxwell_boltzmann(double kappa, double bb_value);
  static PsiSpec symmetry_family(double c, double lambda2, double mu1, double mu2);
  static PsiSpec custom(Callback psi, Callback dpsi, Callback d2psi);

  PsiFamily family() const { return family_; }
  PsiEval eval(double s) const;

  // family parameters (meaningful per tag)
  double kappa = 0, q = 0, k = 0, m = 0, p = 0;
  double c = 0, lambda2 = 0, mu1 = 0, mu2 = 0;
  double bb = 0;
  std::string P_text;

  // Exponential-family P and its s-derivatives at the bound bb.
  double P(double s) const;
  double dP(double s) const;
  double d2P(double s) const;

  // Rebinds bb for families that close over <b,b> (Exponential); identity for others.
  PsiSpec with_bnorm(double bnorm) const;

 private:
  PsiFamily family_ = PsiFamily::Lorentzian;
  Expr P_expr_, dP_expr_, d2P_expr_;
  Callback cb_psi_, cb_dpsi_, cb_d2psi_;
};

// sigma = (Psi - s Psi')^2 / Psi
double sigma_eval(const PsiSpec& spec, double s);
double psi_minus_s_dpsi(const PsiSpec& spec, double s);
// analytic d sigma / ds
double sigma_prime(const PsiSpec& spec, double s);
// d/ds[(s - bnorm) sigma] = sigma + rho sigma'
double rho_sigma_derivative(const PsiSpec& spec, double s, double bnorm);
// nu = (Psi - s Psi')[Psi(Psi - s Psi') + (bnorm - s)(Psi Psi' + 2 s Psi Psi'' - s Psi'^2)]
double nu_value(const PsiSpec& spec, double s, double bnorm);

SDomain spacetime_s_domain(const PsiSpec& spec, double bnorm);

struct DerivCheckReport {
  double max_rel_dpsi = 0;
  double max_rel_d2psi = 0;
  double worst_s_dpsi = 0;
  double worst_s_d2psi = 0;
  bool pass = false;
};

// Central-difference cross-check of the analytic Psi', Psi'' on a grid.
DerivCheckReport derivative_selfcheck(const PsiSpec& spec, const std::vector<double>& s_grid,
                                      double tol = 1e-6);

}  // namespace abf
