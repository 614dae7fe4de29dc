#pragma once

#include "fields.hpp"
#include "linalg.hpp"
#include "psi.hpp"

namespace abf {

enum class Provenance { ClosedForm, NumericHessian };

struct FundamentalTensor {
  Mat g;
  Provenance provenance = Provenance::ClosedForm;
  Vec x, v;
  AlphaBetaScalars scalars;
  PsiEval psi;
};

// g_ij = (Psi - s Psi') a_ij + Psi' b_i b_j + (A Psi''/2) s_i s_j,
// with s_i = (2 B b_i - s A_i)/A and A_i = 2 a_ik v^k.
FundamentalTensor fundamental_tensor_closed(const MetricField& metric, const OneFormField& oneform,
                                            const PsiSpec& spec, const Vec& x, const Vec& v);

// Independent oracle: Hessian of L = A Psi(B^2/A) by second-order forward-mode
// (hyperdual) differentiation in the tangent directions.
FundamentalTensor fundamental_tensor_numeric(const MetricField& metric, const OneFormField& oneform,
                                             const PsiSpec& spec, const Vec& x, const Vec& v);

// det g = Psi^2 (Psi - s Psi')^{n-3} det(a) * d/ds[(s - <b,b>) sigma]
double det_g_closed(const MetricField& metric, const OneFormField& oneform, const PsiSpec& spec,
                    const Vec& x, const Vec& v);

// Closed-form inverse; throws SingularTensor when |nu| <= 1e-10 * Psi^2
// (callers fall back to direct inversion of the numeric Hessian).
Mat inverse_g_closed(const MetricField& metric, const OneFormField& oneform, const PsiSpec& spec,
                     const Vec& x, const Vec& v);

struct SignatureResult {
  int n_pos = 0, n_neg = 0, n_zero = 0;
  double min_abs_eigen = 0;
  double tol_used = 0;
  std::vector<double> eigenvalues;
};

// Eigenvalue signs of a symmetric matrix; |lambda| < tol * max|lambda| counts as zero.
SignatureResult signature(const Mat& m, double tol = 1e-9);

// det(Q + delta C C^T) = det(Q)(1 + delta C^k C_k), indices raised with Q^{-1}
double rank_one_update_det(const Mat& Q, double delta, const Vec& C);
Mat rank_one_update_inv(const Mat& Q, double delta, const Vec& C);

// det(Q + delta B B^T + mu C C^T) = det(Q)[(1+delta B.B)(1+mu C.C) - delta mu (B.C)^2]
double rank_two_update_det(const Mat& Q, double delta, const Vec& B, double mu, const Vec& C);
Mat rank_two_update_inv(const Mat& Q, double delta, const Vec& B, double mu, const Vec& C);

// g = prefactor * (base + delta b b^T + mu c c^T) with prefactor = Psi - s Psi',
// delta = Psi'/(Psi - s Psi'), mu = (A Psi''/2)/(Psi - s Psi').
struct RankTwoUpdateParams {
  double prefactor = 0;
  double delta = 0;
  double mu = 0;
  Vec bvec, cvec;
  Mat base;
  Mat reconstruct() const;
};

RankTwoUpdateParams decompose_update(const MetricField& metric, const OneFormField& oneform,
                                     const PsiSpec& spec, const Vec& x, const Vec& v);

// L = A * Psi(B^2/A)
double finsler_function(const MetricField& metric, const OneFormField& oneform,
                        const PsiSpec& spec, const Vec& x, const Vec& v);

}  // namespace abf
