#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fields.hpp"
#include "psi.hpp"

namespace abf {

class VectorField {
 public:
  using EvalFn = std::function<Vec(const Vec&)>;
  using JacobianFn = std::function<Mat(const Vec&)>;  // J(i,j) = d xi^i / d x^j

  static VectorField coordinate(int direction, int n);  // d_i
  static VectorField from_expressions(const std::vector<Expr>& comps);
  static VectorField from_callbacks(int n, EvalFn eval, JacobianFn jac = nullptr);

  int dim() const { return dim_; }
  Vec value(const Vec& x) const;
  Mat jacobian(const Vec& x) const;  // analytic if available, else central differences

 private:
  int dim_ = 0;
  EvalFn eval_;
  JacobianFn jac_;
};

struct LieDerivatives {
  Mat lie_a;  // (L_xi a)_ij
  Vec lie_b;  // (L_xi b)_i
};

// (L_xi a)_ij = xi^k a_ij,k + a_kj xi^k_,i + a_ik xi^k_,j
// (L_xi b)_i  = xi^k b_i,k + b_k xi^k_,i
LieDerivatives lie_derivatives(const MetricField& metric, const OneFormField& oneform,
                               const VectorField& xi, const Vec& x);

// xi^C(f)(x,v) = xi^i df/dx^i + xi^i_,j v^j df/dv^i, partials by central differences.
double complete_lift_apply(const VectorField& xi,
                           const std::function<double(const Vec&, const Vec&)>& f, const Vec& x,
                           const Vec& v);

struct KillingResidual {
  double normalized = 0;   // R / max(|xiC(A) W|, |2 Psi' B xiC(B)|, |L|)
  double raw = 0;          // xiC(A)(Psi - s Psi') + 2 Psi' B xiC(B)
  double lift_A = 0;       // (L_xi a)(v, v)
  double lift_B = 0;       // (L_xi b)(v)
  double cross_check = 0;  // xiC(L) by the generic lift, same normalization
};

KillingResidual killing_residual(const MetricField& metric, const OneFormField& oneform,
                                 const PsiSpec& spec, const VectorField& xi, const Vec& x,
                                 const Vec& v);

struct TrivialityResult {
  bool trivial = false;
  double max_lie_a = 0;
  double max_lie_b = 0;
  // a is preserved but b is not (or vice versa): the equivalence that holds
  // for Killing fields of a non-Riemannian L fails, worth surfacing
  bool equivalence_violation = false;
};

TrivialityResult is_trivial_symmetry(const MetricField& metric, const OneFormField& oneform,
                                     const VectorField& xi, const std::vector<Vec>& points,
                                     double tol = 1e-9);

struct SymmetryParams {
  std::optional<double> kappa;  // fitted per point when absent
  double lambda2 = 0;
  double mu1 = 0;
  double mu2 = 0;
  double c = 1.0;
};

struct NontrivialReport {
  bool pass = false;
  double max_rel_first = 0;   // xiC(B) = kappa lambda2 B
  double max_rel_second = 0;  // xiC(A) = kappa (mu1 A + mu2 B^2)
  std::vector<double> kappa_per_point;
  double max_abs_kappa = 0;
  bool trivial_kappa = false;  // kappa == 0 over all probed points
};

NontrivialReport nontrivial_condition_check(const MetricField& metric,
                                            const OneFormField& oneform, const VectorField& xi,
                                            const SymmetryParams& params,
                                            const std::vector<Vec>& points, int samples_per_point,
                                            uint64_t seed);

// The Psi(s) class admitting nontrivial symmetries, branch chosen by mu1 vs 2*lambda2.
PsiSpec build_symmetry_psi(const SymmetryParams& params);

}  // namespace abf
