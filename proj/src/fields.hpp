#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "expr.hpp"
#include "linalg.hpp"

namespace abf {

// Position-dependent Lorentzian metric a_ij(x). Built-ins and expression-based
// fields carry analytic x-partials; callback fields fall back to central
// differences with step cbrt(eps)*max(1,|x_k|).
class MetricField {
 public:
  using EvalFn = std::function<Mat(const Vec&)>;
  using PartialFn = std::function<Mat(const Vec&, int)>;

  static MetricField minkowski(int n = 4);
  static MetricField conformal_minkowski(double q, int n = 4);  // e^{2 q x0} eta
  static MetricField from_expressions(const std::vector<std::vector<Expr>>& comps);
  static MetricField from_callbacks(int n, EvalFn eval, PartialFn partial = nullptr);

  int dim() const { return dim_; }
  bool has_analytic_partials() const { return static_cast<bool>(partial_); }

  Mat value(const Vec& x) const;          // validated symmetric
  Mat partial(const Vec& x, int k) const; // d a_ij / d x^k
  Mat inverse_at(const Vec& x) const;     // throws DegenerateMetric

 private:
  int dim_ = 0;
  EvalFn eval_;
  PartialFn partial_;
};

class OneFormField {
 public:
  using EvalFn = std::function<Vec(const Vec&)>;
  using PartialFn = std::function<Vec(const Vec&, int)>;

  static OneFormField constant(const Vec& components);
  static OneFormField from_expressions(const std::vector<Expr>& comps);
  static OneFormField from_callbacks(int n, EvalFn eval, PartialFn partial = nullptr);

  int dim() const { return dim_; }
  bool has_analytic_partials() const { return static_cast<bool>(partial_); }

  Vec value(const Vec& x) const;
  Vec partial(const Vec& x, int k) const;  // d b_i / d x^k

 private:
  int dim_ = 0;
  EvalFn eval_;
  PartialFn partial_;
};

// A = a(v,v), B = b(v), s = B^2/A, <b,b> = a^{ij} b_i b_j, rho = s - <b,b>.
struct AlphaBetaScalars {
  double A = 0;
  double B = 0;
  double s = 0;       // meaningful only when s_defined
  double bnorm = 0;
  double rho = 0;     // s - bnorm (when s_defined)
  bool s_defined = false;
};

AlphaBetaScalars eval_scalars(const MetricField& metric, const OneFormField& oneform,
                              const Vec& x, const Vec& v);

double b_norm(const MetricField& metric, const OneFormField& oneform, const Vec& x);

// b~^i = a^{ij} b_j
Vec raise_index(const MetricField& metric, const OneFormField& oneform, const Vec& x);

// s_0 = max{<b,b>, 0}
double s_lower_bound(double bnorm);

struct SCriticalFlags {
  bool on_B_hyperplane = false;     // B = 0, critical value s = 0
  bool parallel_to_btilde = false;  // v ~ b~, critical value s = <b,b>
  double critical_s = 0;            // set when a flag is raised
  double gradient_residual = 0;     // |B(b_i A - B a_ij v^j)| / scale
};

SCriticalFlags s_critical_points(const MetricField& metric, const OneFormField& oneform,
                                 const Vec& x, const Vec& v);

// Central-difference step used for all field-derivative fallbacks.
double fd_step(double coord);

}  // namespace abf
