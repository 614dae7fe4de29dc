#include "tensor.hpp"

#include <cmath>

#include "error.hpp"
#include "hyperdual.hpp"

namespace abf {

namespace {

AlphaBetaScalars admissible_scalars(const MetricField& metric, const OneFormField& oneform,
                                    const Vec& x, const Vec& v) {
  AlphaBetaScalars sc = eval_scalars(metric, oneform, x, v);
  if (!sc.s_defined)
    fail(Code::SOnLightCone, "A(v) = 0: s undefined, fundamental tensor not evaluable here");
  return sc;
}

}  // namespace

double finsler_function(const MetricField& metric, const OneFormField& oneform,
                        const PsiSpec& spec, const Vec& x, const Vec& v) {
  AlphaBetaScalars sc = admissible_scalars(metric, oneform, x, v);
  return sc.A * spec.eval(sc.s).psi;
}

FundamentalTensor fundamental_tensor_closed(const MetricField& metric, const OneFormField& oneform,
                                            const PsiSpec& spec, const Vec& x, const Vec& v) {
  AlphaBetaScalars sc = admissible_scalars(metric, oneform, x, v);
  Mat a = metric.value(x);
  Vec b = oneform.value(x);
  PsiEval e = spec.eval(sc.s);

  Vec Adot = 2.0 * (a * v);
  Vec sdot = (2.0 * sc.B * b - sc.s * Adot) / sc.A;
  double w = e.psi - sc.s * e.dpsi;

  FundamentalTensor t;
  t.g = w * a + e.dpsi * (b * b.transpose()) +
        0.5 * sc.A * e.d2psi * (sdot * sdot.transpose());
  t.provenance = Provenance::ClosedForm;
  t.x = x;
  t.v = v;
  t.scalars = sc;
  t.psi = e;
  return t;
}

FundamentalTensor fundamental_tensor_numeric(const MetricField& metric, const OneFormField& oneform,
                                             const PsiSpec& spec, const Vec& x, const Vec& v) {
  AlphaBetaScalars sc = admissible_scalars(metric, oneform, x, v);
  Mat a = metric.value(x);
  Vec b = oneform.value(x);
  int n = metric.dim();

  FundamentalTensor t;
  t.g = Mat(n, n);
  Vec av = a * v;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      // A and B along v + u e_i + w e_j, truncated at e_u e_v
      HyperDual A{sc.A, 2.0 * av[i], 2.0 * av[j], 2.0 * a(i, j)};
      HyperDual B{sc.B, b[i], b[j], 0.0};
      HyperDual s = (B * B) / A;
      PsiEval pe = spec.eval(s.f);
      HyperDual L = A * compose(s, pe.psi, pe.dpsi, pe.d2psi);
      t.g(i, j) = t.g(j, i) = 0.5 * L.duv;
    }
  }
  t.provenance = Provenance::NumericHessian;
  t.x = x;
  t.v = v;
  t.scalars = sc;
  t.psi = spec.eval(sc.s);
  return t;
}

double det_g_closed(const MetricField& metric, const OneFormField& oneform, const PsiSpec& spec,
                    const Vec& x, const Vec& v) {
  AlphaBetaScalars sc = admissible_scalars(metric, oneform, x, v);
  int n = metric.dim();
  PsiEval e = spec.eval(sc.s);
  double w = e.psi - sc.s * e.dpsi;
  double det_a = metric.value(x).determinant();
  double dds = rho_sigma_derivative(spec, sc.s, sc.bnorm);
  return e.psi * e.psi * std::pow(w, n - 3) * det_a * dds;
}

Mat inverse_g_closed(const MetricField& metric, const OneFormField& oneform, const PsiSpec& spec,
                     const Vec& x, const Vec& v) {
  AlphaBetaScalars sc = admissible_scalars(metric, oneform, x, v);
  Mat ainv = metric.inverse_at(x);
  Vec b = oneform.value(x);
  PsiEval e = spec.eval(sc.s);
  double w = e.psi - sc.s * e.dpsi;
  double nu = nu_value(spec, sc.s, sc.bnorm);
  if (std::abs(nu) <= 1e-10 * e.psi * e.psi || w == 0.0)
    fail(Code::SingularTensor,
         "nu below threshold: closed-form inverse refused, invert the numeric Hessian instead");

  Vec bt = ainv * b;
  double s = sc.s, A = sc.A, B = sc.B, rho = sc.rho;
  Mat vv = v * v.transpose();
  Mat bv = bt * v.transpose() + v * bt.transpose();
  Mat bbt = bt * bt.transpose();

  return ainv / w + (2.0 * s * s * e.d2psi * (e.dpsi * rho - e.psi) / (nu * A)) * vv +
         (2.0 * B * s * e.psi * e.d2psi / (nu * A)) * bv -
         ((e.dpsi * w + 2.0 * s * e.psi * e.d2psi) / nu) * bbt;
}

SignatureResult signature(const Mat& m, double tol) {
  if (m.rows() != m.cols()) fail(Code::InvalidParams, "signature requires a square matrix");
  double scale = std::max(1.0, max_abs(m));
  if (max_abs_asymmetry(m) > 1e-8 * scale)
    fail(Code::InvalidParams, "signature requires a symmetric matrix");
  Mat sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  if (es.info() != Eigen::Success) fail(Code::Internal, "eigensolver failed");

  SignatureResult r;
  r.tol_used = tol;
  Vec ev = es.eigenvalues();
  double emax = max_abs(ev);
  double band = tol * emax;
  r.min_abs_eigen = ev.size() ? ev.cwiseAbs().minCoeff() : 0.0;
  for (int i = 0; i < ev.size(); ++i) {
    r.eigenvalues.push_back(ev[i]);
    if (std::abs(ev[i]) < band)
      ++r.n_zero;
    else if (ev[i] > 0)
      ++r.n_pos;
    else
      ++r.n_neg;
  }
  return r;
}

namespace {

Mat checked_inverse(const Mat& Q) {
  Eigen::FullPivLU<Mat> lu(Q);
  if (!lu.isInvertible()) fail(Code::SingularBase, "base matrix is singular");
  return lu.inverse();
}

}  // namespace

double rank_one_update_det(const Mat& Q, double delta, const Vec& C) {
  Mat qinv = checked_inverse(Q);
  return Q.determinant() * (1.0 + delta * C.dot(qinv * C));
}

Mat rank_one_update_inv(const Mat& Q, double delta, const Vec& C) {
  Mat qinv = checked_inverse(Q);
  Vec cu = qinv * C;
  double denom = 1.0 + delta * C.dot(cu);
  if (std::abs(denom) <= 1e-14 * (1.0 + std::abs(delta) * cu.squaredNorm()))
    fail(Code::SingularUpdate, "1 + delta C^k C_k = 0: updated matrix is singular");
  return qinv - (delta / denom) * (cu * cu.transpose());
}

double rank_two_update_det(const Mat& Q, double delta, const Vec& B, double mu, const Vec& C) {
  Mat qinv = checked_inverse(Q);
  double bb = B.dot(qinv * B);
  double cc = C.dot(qinv * C);
  double bc = B.dot(qinv * C);
  double bracket = (1.0 + delta * bb) * (1.0 + mu * cc) - delta * mu * bc * bc;
  return Q.determinant() * bracket;
}

Mat rank_two_update_inv(const Mat& Q, double delta, const Vec& B, double mu, const Vec& C) {
  Mat qinv = checked_inverse(Q);
  Vec bu = qinv * B;
  Vec cu = qinv * C;
  double bb = B.dot(bu);
  double cc = C.dot(cu);
  double bc = B.dot(cu);
  double bracket = (1.0 + delta * bb) * (1.0 + mu * cc) - delta * mu * bc * bc;
  double scale = (1.0 + std::abs(delta * bb)) * (1.0 + std::abs(mu * cc)) +
                 std::abs(delta * mu * bc * bc);
  if (std::abs(bracket) <= 1e-14 * scale)
    fail(Code::SingularUpdate, "rank-two update bracket vanishes: updated matrix is singular");
  Mat num = mu * (1.0 + delta * bb) * (cu * cu.transpose()) -
            mu * delta * bc * (bu * cu.transpose() + cu * bu.transpose()) +
            delta * (1.0 + mu * cc) * (bu * bu.transpose());
  return qinv - num / bracket;
}

Mat RankTwoUpdateParams::reconstruct() const {
  return prefactor *
         (base + delta * (bvec * bvec.transpose()) + mu * (cvec * cvec.transpose()));
}

RankTwoUpdateParams decompose_update(const MetricField& metric, const OneFormField& oneform,
                                     const PsiSpec& spec, const Vec& x, const Vec& v) {
  AlphaBetaScalars sc = admissible_scalars(metric, oneform, x, v);
  Mat a = metric.value(x);
  Vec b = oneform.value(x);
  PsiEval e = spec.eval(sc.s);
  double w = e.psi - sc.s * e.dpsi;
  if (w == 0.0)
    fail(Code::SingularTensor, "Psi - s Psi' = 0: update decomposition undefined");

  RankTwoUpdateParams p;
  p.prefactor = w;
  p.delta = e.dpsi / w;
  p.mu = 0.5 * sc.A * e.d2psi / w;
  p.bvec = b;
  Vec Adot = 2.0 * (a * v);
  p.cvec = (2.0 * sc.B * b - sc.s * Adot) / sc.A;
  p.base = a;
  return p;
}

}  // namespace abf
