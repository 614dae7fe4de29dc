#include "killing.hpp"

#include <cmath>

#include "error.hpp"
#include "rng.hpp"
#include "tensor.hpp"

namespace abf {

VectorField VectorField::coordinate(int direction, int n) {
  if (direction < 0 || direction >= n) fail(Code::InvalidParams, "coordinate direction out of range");
  VectorField f;
  f.dim_ = n;
  f.eval_ = [direction, n](const Vec&) {
    Vec v = Vec::Zero(n);
    v[direction] = 1.0;
    return v;
  };
  f.jac_ = [n](const Vec&) { return Mat(Mat::Zero(n, n)); };
  return f;
}

VectorField VectorField::from_expressions(const std::vector<Expr>& comps) {
  int n = static_cast<int>(comps.size());
  auto c = std::make_shared<std::vector<Expr>>(comps);
  auto d = std::make_shared<std::vector<std::vector<Expr>>>();  // [i][j] = d xi^i / d x^j
  d->resize(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) (*d)[i].push_back(comps[i].derivative(j));
  VectorField f;
  f.dim_ = n;
  f.eval_ = [c, n](const Vec& x) {
    Vec v(n);
    std::span<const double> env(x.data(), static_cast<size_t>(x.size()));
    for (int i = 0; i < n; ++i) v[i] = (*c)[i].eval(env);
    return v;
  };
  f.jac_ = [d, n](const Vec& x) {
    Mat J(n, n);
    std::span<const double> env(x.data(), static_cast<size_t>(x.size()));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) J(i, j) = (*d)[i][j].eval(env);
    return J;
  };
  return f;
}

VectorField VectorField::from_callbacks(int n, EvalFn eval, JacobianFn jac) {
  VectorField f;
  f.dim_ = n;
  f.eval_ = std::move(eval);
  f.jac_ = std::move(jac);
  return f;
}

Vec VectorField::value(const Vec& x) const {
  Vec v = eval_(x);
  if (!v.allFinite()) fail(Code::ValidationError, "vector field has non-finite components");
  return v;
}

Mat VectorField::jacobian(const Vec& x) const {
  if (jac_) return jac_(x);
  int n = dim_;
  Mat J(n, n);
  for (int j = 0; j < n; ++j) {
    Vec xp = x, xm = x;
    double h = fd_step(x[j]);
    xp[j] += h;
    xm[j] -= h;
    J.col(j) = (eval_(xp) - eval_(xm)) / (2.0 * h);
  }
  if (!J.allFinite()) fail(Code::ValidationError, "vector field Jacobian has non-finite entries");
  return J;
}

LieDerivatives lie_derivatives(const MetricField& metric, const OneFormField& oneform,
                               const VectorField& xi, const Vec& x) {
  int n = metric.dim();
  Mat a = metric.value(x);
  Vec b = oneform.value(x);
  Vec xiv = xi.value(x);
  Mat J = xi.jacobian(x);

  LieDerivatives ld;
  ld.lie_a = Mat::Zero(n, n);
  for (int k = 0; k < n; ++k) ld.lie_a += xiv[k] * metric.partial(x, k);
  ld.lie_a += J.transpose() * a + a * J;  // a_kj xi^k_,i + a_ik xi^k_,j

  ld.lie_b = Vec::Zero(n);
  for (int k = 0; k < n; ++k) ld.lie_b += xiv[k] * oneform.partial(x, k);
  ld.lie_b += J.transpose() * b;  // b_k xi^k_,i

  double scale = std::max(1.0, max_abs(ld.lie_a));
  if (max_abs_asymmetry(ld.lie_a) > 1e-10 * scale)
    fail(Code::Internal, "Lie derivative of the metric lost symmetry");
  ld.lie_a = 0.5 * (ld.lie_a + ld.lie_a.transpose());
  return ld;
}

namespace {

// Central difference with the step halved until the stencil stays inside the
// function's domain (near-null tangent vectors push the default step outside
// the cone).
double adaptive_central(const std::function<double(double)>& g, double h0, const char* what) {
  double h = h0;
  for (int attempt = 0; attempt < 40; ++attempt) {
    try {
      double d = (g(h) - g(-h)) / (2.0 * h);
      if (std::isfinite(d)) return d;
    } catch (const Error&) {
    }
    h *= 0.5;
  }
  fail(Code::StencilOutOfDomain, std::string(what) + " stencil left the function domain");
}

}  // namespace

double complete_lift_apply(const VectorField& xi,
                           const std::function<double(const Vec&, const Vec&)>& f, const Vec& x,
                           const Vec& v) {
  int n = xi.dim();
  Vec xiv = xi.value(x);
  Mat J = xi.jacobian(x);
  Vec vert = J * v;  // xi^i_,j v^j

  double acc = 0;
  for (int i = 0; i < n; ++i) {
    if (xiv[i] != 0.0) {
      acc += xiv[i] * adaptive_central(
                          [&](double h) {
                            Vec xp = x;
                            xp[i] += h;
                            return f(xp, v);
                          },
                          fd_step(x[i]), "x");
    }
    if (vert[i] != 0.0) {
      acc += vert[i] * adaptive_central(
                           [&](double h) {
                             Vec vp = v;
                             vp[i] += h;
                             return f(x, vp);
                           },
                           fd_step(v[i]), "v");
    }
  }
  return acc;
}

KillingResidual killing_residual(const MetricField& metric, const OneFormField& oneform,
                                 const PsiSpec& base_spec, const VectorField& xi, const Vec& x,
                                 const Vec& v) {
  AlphaBetaScalars sc = eval_scalars(metric, oneform, x, v);
  if (!sc.s_defined) fail(Code::SOnLightCone, "A = 0: Killing residual undefined on the light cone");
  PsiSpec spec = base_spec.with_bnorm(sc.bnorm);
  PsiEval e = spec.eval(sc.s);
  double w = e.psi - sc.s * e.dpsi;
  double L = sc.A * e.psi;

  LieDerivatives ld = lie_derivatives(metric, oneform, xi, x);
  KillingResidual r;
  r.lift_A = v.dot(ld.lie_a * v);
  r.lift_B = ld.lie_b.dot(v);
  double term1 = r.lift_A * w;
  double term2 = 2.0 * e.dpsi * sc.B * r.lift_B;
  r.raw = term1 + term2;
  double norm = std::max({std::abs(term1), std::abs(term2), std::abs(L), 1e-300});
  r.normalized = r.raw / norm;

  auto L_fn = [&](const Vec& xx, const Vec& vv) {
    return finsler_function(metric, oneform, base_spec.with_bnorm(b_norm(metric, oneform, xx)),
                            xx, vv);
  };
  r.cross_check = complete_lift_apply(xi, L_fn, x, v) / norm;
  return r;
}

TrivialityResult is_trivial_symmetry(const MetricField& metric, const OneFormField& oneform,
                                     const VectorField& xi, const std::vector<Vec>& points,
                                     double tol) {
  if (points.empty()) fail(Code::InvalidParams, "is_trivial_symmetry needs at least one point");
  TrivialityResult r;
  for (const Vec& x : points) {
    LieDerivatives ld = lie_derivatives(metric, oneform, xi, x);
    double sa = std::max(1.0, max_abs(metric.value(x)));
    double sb = std::max(1.0, max_abs(oneform.value(x)));
    r.max_lie_a = std::max(r.max_lie_a, max_abs(ld.lie_a) / sa);
    r.max_lie_b = std::max(r.max_lie_b, max_abs(ld.lie_b) / sb);
  }
  bool a_zero = r.max_lie_a <= tol;
  bool b_zero = r.max_lie_b <= tol;
  r.trivial = a_zero && b_zero;
  r.equivalence_violation = a_zero != b_zero;
  return r;
}

NontrivialReport nontrivial_condition_check(const MetricField& metric,
                                            const OneFormField& oneform, const VectorField& xi,
                                            const SymmetryParams& params,
                                            const std::vector<Vec>& points, int samples_per_point,
                                            uint64_t seed) {
  if (points.empty()) fail(Code::InvalidParams, "nontrivial_condition_check needs points");
  int n = metric.dim();
  NontrivialReport rep;
  rep.pass = true;

  for (size_t ip = 0; ip < points.size(); ++ip) {
    const Vec& x = points[ip];
    Mat a = metric.value(x);
    Vec b = oneform.value(x);
    LieDerivatives ld = lie_derivatives(metric, oneform, xi, x);

    struct Sample {
      double A, B, liftA, liftB;
    };
    std::vector<Sample> samples;
    for (int is = 0; is < samples_per_point; ++is) {
      Rng rng = Rng::substream(seed ^ 0x6b696c6cULL, ip, static_cast<uint64_t>(is));
      Vec v(n);
      for (int i = 0; i < n; ++i) v[i] = rng.next_normal();
      Sample s;
      s.A = v.dot(a * v);
      s.B = b.dot(v);
      s.liftA = v.dot(ld.lie_a * v);
      s.liftB = ld.lie_b.dot(v);
      samples.push_back(s);
    }

    double kappa;
    if (params.kappa) {
      kappa = *params.kappa;
    } else {
      // least squares through the origin on the first identity, restricted to
      // samples where B carries signal
      double bscale = std::max(1e-300, b.norm());
      double num = 0, den = 0;
      for (const Sample& s : samples) {
        if (std::abs(s.B) <= 1e-6 * bscale) continue;
        double rhs = params.lambda2 * s.B;
        num += s.liftB * rhs;
        den += rhs * rhs;
      }
      if (den > 0) {
        kappa = num / den;
      } else {
        // first identity carries no information (B = 0 or lambda2 = 0): fit
        // from the second
        double num2 = 0, den2 = 0;
        for (const Sample& s : samples) {
          double rhs = params.mu1 * s.A + params.mu2 * s.B * s.B;
          num2 += s.liftA * rhs;
          den2 += rhs * rhs;
        }
        if (!(den2 > 0))
          fail(Code::DegenerateFit, "kappa fit degenerate: B == 0 along all samples and the "
                                    "second identity carries no signal");
        kappa = num2 / den2;
      }
    }
    rep.kappa_per_point.push_back(kappa);
    rep.max_abs_kappa = std::max(rep.max_abs_kappa, std::abs(kappa));

    for (const Sample& s : samples) {
      double rhs1 = kappa * params.lambda2 * s.B;
      double scale1 = std::max({std::abs(s.liftB), std::abs(rhs1), 1e-6 * b.norm()});
      double rel1 = std::abs(s.liftB - rhs1) / std::max(scale1, 1e-300);
      rep.max_rel_first = std::max(rep.max_rel_first, rel1);

      double rhs2 = kappa * (params.mu1 * s.A + params.mu2 * s.B * s.B);
      double scale2 = std::max({std::abs(s.liftA), std::abs(rhs2), 1e-6 * max_abs(a)});
      double rel2 = std::abs(s.liftA - rhs2) / std::max(scale2, 1e-300);
      rep.max_rel_second = std::max(rep.max_rel_second, rel2);
    }
  }

  rep.trivial_kappa = rep.max_abs_kappa <= 1e-8;
  rep.pass = rep.max_rel_first <= 1e-6 && rep.max_rel_second <= 1e-6;
  return rep;
}

PsiSpec build_symmetry_psi(const SymmetryParams& params) {
  return PsiSpec::symmetry_family(params.c, params.lambda2, params.mu1, params.mu2);
}

}  // namespace abf
