#include "fields.hpp"

#include <cmath>
#include <limits>

#include "error.hpp"

namespace abf {

namespace {

constexpr double kSymTol = 1e-12;
constexpr double kPropTol = 1e-9;  // "proportional to b~" / "B = 0" band

double cbrt_eps() {
  static const double v = std::cbrt(std::numeric_limits<double>::epsilon());
  return v;
}

void check_finite(const Mat& m, const char* what) {
  if (!m.allFinite()) fail(Code::ValidationError, std::string(what) + " has non-finite entries");
}

void check_finite(const Vec& v, const char* what) {
  if (!v.allFinite()) fail(Code::ValidationError, std::string(what) + " has non-finite entries");
}

}  // namespace

double fd_step(double coord) { return cbrt_eps() * std::max(1.0, std::abs(coord)); }

MetricField MetricField::minkowski(int n) {
  if (n < 2) fail(Code::InvalidParams, "dimension must be >= 2");
  Mat eta = -Mat::Identity(n, n);
  eta(0, 0) = 1.0;
  MetricField f;
  f.dim_ = n;
  f.eval_ = [eta](const Vec&) { return eta; };
  f.partial_ = [n](const Vec&, int) { return Mat::Zero(n, n); };
  return f;
}

MetricField MetricField::conformal_minkowski(double q, int n) {
  if (n < 2) fail(Code::InvalidParams, "dimension must be >= 2");
  Mat eta = -Mat::Identity(n, n);
  eta(0, 0) = 1.0;
  MetricField f;
  f.dim_ = n;
  f.eval_ = [eta, q](const Vec& x) { return Mat(std::exp(2.0 * q * x[0]) * eta); };
  f.partial_ = [eta, q, n](const Vec& x, int k) {
    if (k != 0) return Mat(Mat::Zero(n, n));
    return Mat(2.0 * q * std::exp(2.0 * q * x[0]) * eta);
  };
  return f;
}

MetricField MetricField::from_expressions(const std::vector<std::vector<Expr>>& comps) {
  int n = static_cast<int>(comps.size());
  if (n < 2) fail(Code::InvalidParams, "dimension must be >= 2");
  for (const auto& row : comps)
    if (static_cast<int>(row.size()) != n)
      fail(Code::ValidationError, "metric component matrix must be square");
  auto d = std::make_shared<std::vector<std::vector<std::vector<Expr>>>>();  // [k][i][j]
  d->resize(n);
  for (int k = 0; k < n; ++k) {
    (*d)[k].resize(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) (*d)[k][i].push_back(comps[i][j].derivative(k));
  }
  auto c = std::make_shared<std::vector<std::vector<Expr>>>(comps);
  MetricField f;
  f.dim_ = n;
  f.eval_ = [c, n](const Vec& x) {
    Mat m(n, n);
    std::span<const double> env(x.data(), static_cast<size_t>(x.size()));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = (*c)[i][j].eval(env);
    return m;
  };
  f.partial_ = [d, n](const Vec& x, int k) {
    Mat m(n, n);
    std::span<const double> env(x.data(), static_cast<size_t>(x.size()));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = (*d)[k][i][j].eval(env);
    return m;
  };
  return f;
}

MetricField MetricField::from_callbacks(int n, EvalFn eval, PartialFn partial) {
  if (n < 2) fail(Code::InvalidParams, "dimension must be >= 2");
  MetricField f;
  f.dim_ = n;
  f.eval_ = std::move(eval);
  f.partial_ = std::move(partial);
  return f;
}

Mat MetricField::value(const Vec& x) const {
  Mat m = eval_(x);
  check_finite(m, "metric");
  double scale = std::max(1.0, max_abs(m));
  if (max_abs_asymmetry(m) > kSymTol * scale)
    fail(Code::ValidationError, "metric evaluation is not symmetric");
  return 0.5 * (m + m.transpose());
}

Mat MetricField::partial(const Vec& x, int k) const {
  if (partial_) return partial_(x, k);
  Vec xp = x, xm = x;
  double h = fd_step(x[k]);
  xp[k] += h;
  xm[k] -= h;
  return (eval_(xp) - eval_(xm)) / (2.0 * h);
}

Mat MetricField::inverse_at(const Vec& x) const {
  Mat a = value(x);
  Eigen::FullPivLU<Mat> lu(a);
  if (!lu.isInvertible()) fail(Code::DegenerateMetric, "metric is singular at the queried point");
  return lu.inverse();
}

OneFormField OneFormField::constant(const Vec& components) {
  int n = static_cast<int>(components.size());
  OneFormField f;
  f.dim_ = n;
  Vec b = components;
  f.eval_ = [b](const Vec&) { return b; };
  f.partial_ = [n](const Vec&, int) { return Vec(Vec::Zero(n)); };
  return f;
}

OneFormField OneFormField::from_expressions(const std::vector<Expr>& comps) {
  int n = static_cast<int>(comps.size());
  auto c = std::make_shared<std::vector<Expr>>(comps);
  auto d = std::make_shared<std::vector<std::vector<Expr>>>();  // [k][i]
  d->resize(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) (*d)[k].push_back(comps[i].derivative(k));
  OneFormField f;
  f.dim_ = n;
  f.eval_ = [c, n](const Vec& x) {
    Vec b(n);
    std::span<const double> env(x.data(), static_cast<size_t>(x.size()));
    for (int i = 0; i < n; ++i) b[i] = (*c)[i].eval(env);
    return b;
  };
  f.partial_ = [d, n](const Vec& x, int k) {
    Vec b(n);
    std::span<const double> env(x.data(), static_cast<size_t>(x.size()));
    for (int i = 0; i < n; ++i) b[i] = (*d)[k][i].eval(env);
    return b;
  };
  return f;
}

OneFormField OneFormField::from_callbacks(int n, EvalFn eval, PartialFn partial) {
  OneFormField f;
  f.dim_ = n;
  f.eval_ = std::move(eval);
  f.partial_ = std::move(partial);
  return f;
}

Vec OneFormField::value(const Vec& x) const {
  Vec b = eval_(x);
  check_finite(b, "one-form");
  return b;
}

Vec OneFormField::partial(const Vec& x, int k) const {
  if (partial_) return partial_(x, k);
  Vec xp = x, xm = x;
  double h = fd_step(x[k]);
  xp[k] += h;
  xm[k] -= h;
  return (eval_(xp) - eval_(xm)) / (2.0 * h);
}

AlphaBetaScalars eval_scalars(const MetricField& metric, const OneFormField& oneform,
                              const Vec& x, const Vec& v) {
  if (v.size() != metric.dim())
    fail(Code::InvalidParams, "tangent vector dimension mismatch");
  if (max_abs(v) == 0.0) fail(Code::InvalidParams, "zero tangent vector (slit tangent bundle)");
  Mat a = metric.value(x);
  Mat ainv = metric.inverse_at(x);
  Vec b = oneform.value(x);

  AlphaBetaScalars sc;
  sc.A = v.dot(a * v);
  sc.B = b.dot(v);
  sc.bnorm = b.dot(ainv * b);
  double scale = std::max(1.0, max_abs(a)) * v.squaredNorm();
  if (std::abs(sc.A) <= 1e-14 * scale) {
    sc.s_defined = false;  // on the light cone of a; s = B^2/A is undefined
  } else {
    sc.s_defined = true;
    sc.s = sc.B * sc.B / sc.A;
    sc.rho = sc.s - sc.bnorm;
  }
  return sc;
}

double b_norm(const MetricField& metric, const OneFormField& oneform, const Vec& x) {
  Mat ainv = metric.inverse_at(x);
  Vec b = oneform.value(x);
  return b.dot(ainv * b);
}

Vec raise_index(const MetricField& metric, const OneFormField& oneform, const Vec& x) {
  return metric.inverse_at(x) * oneform.value(x);
}

double s_lower_bound(double bnorm) { return std::max(bnorm, 0.0); }

SCriticalFlags s_critical_points(const MetricField& metric, const OneFormField& oneform,
                                 const Vec& x, const Vec& v) {
  AlphaBetaScalars sc = eval_scalars(metric, oneform, x, v);
  if (!sc.s_defined) fail(Code::SOnLightCone, "s is undefined on the light cone of a (A = 0)");
  Vec b = oneform.value(x);
  Mat a = metric.value(x);
  Vec btilde = metric.inverse_at(x) * b;

  SCriticalFlags flags;
  double scale_B = std::max(1e-300, b.norm() * v.norm());
  if (std::abs(sc.B) <= kPropTol * scale_B) {
    flags.on_B_hyperplane = true;
    flags.critical_s = 0.0;
  }
  if (btilde.norm() > 0) {
    Vec r = v - (v.dot(btilde) / btilde.squaredNorm()) * btilde;
    if (r.norm() <= kPropTol * v.norm()) {
      flags.parallel_to_btilde = true;
      flags.critical_s = sc.bnorm;
    }
  }
  // gradient of s vanishes iff B (b_i A - B a_ij v^j) = 0
  Vec grad = sc.B * (b * sc.A - sc.B * (a * v));
  double gscale = std::abs(sc.B) * (b.norm() * std::abs(sc.A) + std::abs(sc.B) * (a * v).norm());
  flags.gradient_residual = grad.norm() / std::max(gscale, 1e-300);
  return flags;
}

}  // namespace abf
