#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "error.hpp"
#include "rng.hpp"
#include "tensor.hpp"

using namespace abf;

namespace {

Vec v4(double a, double b, double c, double d) { return (Vec(4) << a, b, c, d).finished(); }

// Test-only oracle: 4th-order central-difference Hessian of L in the tangent
// directions. Unlike the hyperdual path it never touches the analytic Psi
// derivatives, so it cross-checks PsiEval and the forward-mode rules at once.
Mat fd_hessian(const MetricField& metric, const OneFormField& oneform, const PsiSpec& spec,
               const Vec& x, const Vec& v, double h = 1e-3) {
  int n = metric.dim();
  auto L = [&](const Vec& w) { return finsler_function(metric, oneform, spec, x, w); };
  Mat g(n, n);
  const double c1 = 2.0 / 3.0, c2 = 1.0 / 12.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      double acc = 0;
      auto shifted = [&](int ki, int kj) {
        Vec w = v;
        w[i] += ki * h;
        w[j] += kj * h;
        return L(w);
      };
      if (i == j) {
        acc = (-c2 * shifted(2, 0) + (4.0 / 3.0) * shifted(1, 0) - 2.5 * L(v) +
               (4.0 / 3.0) * shifted(-1, 0) - c2 * shifted(-2, 0)) /
              (h * h);
      } else {
        double s = 0;
        const double wts[4] = {c2, -c1, c1, -c2};
        const int off[4] = {-2, -1, 1, 2};
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b) s += wts[a] * wts[b] * shifted(off[a], off[b]);
        acc = s / (h * h);
      }
      g(i, j) = g(j, i) = 0.5 * acc;
    }
  return g;
}

struct Setup {
  MetricField metric = MetricField::minkowski(4);
  OneFormField oneform = OneFormField::constant(Vec::Zero(4));
};

Setup flat_timelike_b(double b0) {
  Setup s;
  s.oneform = OneFormField::constant(v4(b0, 0, 0, 0));
  return s;
}

}  // namespace

TEST_CASE("lorentzian: g = kappa a, det = kappa^4 det a, inverse = a^-1/kappa") {
  MetricField a = MetricField::conformal_minkowski(0.4, 4);
  OneFormField b = OneFormField::constant(v4(0.3, 0.1, 0, 0));
  PsiSpec psi = PsiSpec::lorentzian(3.0);
  Vec x = v4(0.2, 0.5, -0.3, 0.1);
  Vec v = v4(1.0, 0.2, 0.1, -0.3);

  Mat am = a.value(x);
  FundamentalTensor t = fundamental_tensor_closed(a, b, psi, x, v);
  CHECK((t.g - 3.0 * am).cwiseAbs().maxCoeff() <= 1e-12 * am.cwiseAbs().maxCoeff());

  CHECK(det_g_closed(a, b, psi, x, v) ==
        doctest::Approx(std::pow(3.0, 4) * am.determinant()).epsilon(1e-12));

  Mat ginv = inverse_g_closed(a, b, psi, x, v);
  CHECK((ginv - Mat(a.inverse_at(x) / 3.0)).cwiseAbs().maxCoeff() <= 1e-12);

  FundamentalTensor tn = fundamental_tensor_numeric(a, b, psi, x, v);
  CHECK((tn.g - 3.0 * am).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("closed form vs numeric Hessian vs finite differences") {
  struct Case {
    const char* label;
    PsiSpec psi;
    Vec v;
  };
  Setup s = flat_timelike_b(0.5);
  std::vector<Case> cases = {
      {"randers", PsiSpec::randers(), v4(1, 0.1, 0, 0)},
      {"bogoslovsky", PsiSpec::bogoslovsky_kropina(0.5), v4(1, 0.5, 0.1, 0)},
      {"kundt", PsiSpec::kundt(1.0, -1.0, 0.5), v4(1, 0.2, 0.3, 0.1)},
      {"maxwell-boltzmann", PsiSpec::maxwell_boltzmann(1.0, 0.25), v4(1, 0.3, -0.2, 0.4)},
  };
  Vec x = Vec::Zero(4);
  for (const Case& c : cases) {
    CAPTURE(c.label);
    FundamentalTensor gc = fundamental_tensor_closed(s.metric, s.oneform, c.psi, x, c.v);
    FundamentalTensor gn = fundamental_tensor_numeric(s.metric, s.oneform, c.psi, x, c.v);
    CHECK((gc.g - gn.g).norm() / gn.g.norm() <= 1e-6);
    CHECK(gn.provenance == Provenance::NumericHessian);
    CHECK(gc.provenance == Provenance::ClosedForm);

    Mat gfd = fd_hessian(s.metric, s.oneform, c.psi, x, c.v);
    CHECK((gc.g - gfd).norm() / gfd.norm() <= 1e-6);
  }
}

TEST_CASE("closed-form g agreement over random admissible draws") {
  MetricField a = MetricField::conformal_minkowski(0.3, 4);
  OneFormField b = OneFormField::constant(v4(0.5, 0.0, 0.1, 0));
  PsiSpec psi = PsiSpec::bogoslovsky_kropina(-0.5);
  Rng rng(11);
  int tested = 0;
  while (tested < 100) {
    Vec x(4), v(4);
    for (int i = 0; i < 4; ++i) {
      x[i] = rng.next_in(-1, 1);
      v[i] = rng.next_normal();
    }
    if (v[0] < 0) v = -v;
    Mat am = a.value(x);
    double A = v.dot(am * v);
    if (A <= 0.05) continue;
    double B = b.value(x).dot(v);
    if (B * B / A <= 0.05) continue;
    FundamentalTensor gc = fundamental_tensor_closed(a, b, psi, x, v);
    FundamentalTensor gn = fundamental_tensor_numeric(a, b, psi, x, v);
    CHECK((gc.g - gn.g).norm() / gn.g.norm() <= 1e-6);
    ++tested;
  }
}

TEST_CASE("homogeneity and the Euler identity") {
  Setup s = flat_timelike_b(0.4);
  PsiSpec psi = PsiSpec::kundt(1.0, -1.0, 0.5);
  Vec x = Vec::Zero(4);
  Vec v = v4(1.2, 0.4, -0.2, 0.1);
  FundamentalTensor t0 = fundamental_tensor_closed(s.metric, s.oneform, psi, x, v);
  double L0 = finsler_function(s.metric, s.oneform, psi, x, v);
  for (double lam : {0.5, 2.0, 7.0}) {
    FundamentalTensor t = fundamental_tensor_closed(s.metric, s.oneform, psi, x, Vec(lam * v));
    CHECK((t.g - t0.g).cwiseAbs().maxCoeff() <=
          1e-10 * std::max(1.0, t0.g.cwiseAbs().maxCoeff()));
    double L = finsler_function(s.metric, s.oneform, psi, x, Vec(lam * v));
    CHECK(L == doctest::Approx(lam * lam * L0).epsilon(1e-10));
  }
  CHECK(v.dot(t0.g * v) == doctest::Approx(L0).epsilon(1e-8));
}

TEST_CASE("determinant formula against the oracle, n = 4 and n = 3") {
  SUBCASE("n = 4 randers") {
    Setup s = flat_timelike_b(0.5);
    PsiSpec psi = PsiSpec::randers();
    Vec x = Vec::Zero(4), v = v4(1, 0.1, 0.05, 0);
    double dc = det_g_closed(s.metric, s.oneform, psi, x, v);
    double dn = fundamental_tensor_numeric(s.metric, s.oneform, psi, x, v).g.determinant();
    CHECK(dc == doctest::Approx(dn).epsilon(1e-6));
    CHECK(dc < 0);
  }
  SUBCASE("n = 3 exercises the (Psi - s Psi')^{n-3} exponent") {
    MetricField a3 = MetricField::minkowski(3);
    OneFormField b3 = OneFormField::constant((Vec(3) << 0.4, 0.1, 0).finished());
    PsiSpec psi = PsiSpec::bogoslovsky_kropina(0.5);
    Vec x = Vec::Zero(3);
    Vec v = (Vec(3) << 1.0, 0.3, -0.2).finished();
    double dc = det_g_closed(a3, b3, psi, x, v);
    double dn = fundamental_tensor_numeric(a3, b3, psi, x, v).g.determinant();
    CHECK(dc == doctest::Approx(dn).epsilon(1e-6));
  }
}

TEST_CASE("closed-form inverse") {
  Setup s = flat_timelike_b(0.5);
  Vec x = Vec::Zero(4);
  SUBCASE("product with g is the identity") {
    PsiSpec psi = PsiSpec::randers();
    Vec v = v4(1, 0.2, -0.1, 0.3);
    FundamentalTensor g = fundamental_tensor_closed(s.metric, s.oneform, psi, x, v);
    Mat ginv = inverse_g_closed(s.metric, s.oneform, psi, x, v);
    CHECK(off_identity(g.g, ginv) <= 1e-8);
  }
  SUBCASE("matches direct inversion of the closed-form matrix") {
    PsiSpec psi = PsiSpec::bogoslovsky_kropina(0.5);
    Vec v = v4(1, 0.4, 0.2, -0.1);
    FundamentalTensor g = fundamental_tensor_closed(s.metric, s.oneform, psi, x, v);
    Mat direct = g.g.inverse();
    Mat closed = inverse_g_closed(s.metric, s.oneform, psi, x, v);
    CHECK((closed - direct).cwiseAbs().maxCoeff() <=
          1e-8 * std::max(1.0, direct.cwiseAbs().maxCoeff()));
  }
  SUBCASE("degenerate tensor is refused with SingularTensor") {
    // q = -1 with a null one-form: nu vanishes identically
    OneFormField bnull = OneFormField::constant(v4(1, 1, 0, 0));
    PsiSpec psi = PsiSpec::bogoslovsky_kropina(-1.0);
    try {
      inverse_g_closed(s.metric, bnull, psi, x, v4(1, 0.2, 0, 0));
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.code() == Code::SingularTensor);
    }
  }
}

TEST_CASE("signature") {
  Mat m = Mat::Zero(4, 4);
  m.diagonal() << 1, -1, -1, -1;
  SignatureResult r = signature(m);
  CHECK(r.n_pos == 1);
  CHECK(r.n_neg == 3);
  CHECK(r.n_zero == 0);

  m.diagonal() << 2, 3, -1, -1;
  r = signature(m);
  CHECK(r.n_pos == 2);
  CHECK(r.n_neg == 2);

  m.diagonal() << 1, 1e-12, -1, -1;
  r = signature(m, 1e-9);
  CHECK(r.n_zero == 1);

  // a verified Randers spacetime sample
  Setup s = flat_timelike_b(-0.5);
  FundamentalTensor g =
      fundamental_tensor_closed(s.metric, s.oneform, PsiSpec::randers(), Vec::Zero(4),
                                v4(1, 0.2, 0.1, 0));
  r = signature(g.g);
  CHECK(r.n_pos == 1);
  CHECK(r.n_neg == 3);
  CHECK(r.n_zero == 0);

  Mat asym = Mat::Identity(4, 4);
  asym(0, 1) = 0.3;
  CHECK_THROWS_AS(signature(asym), Error);
}

TEST_CASE("rank-one update") {
  Mat I = Mat::Identity(4, 4);
  Vec e0 = v4(1, 0, 0, 0);
  CHECK(rank_one_update_det(I, 1.0, e0) == doctest::Approx(2.0));

  Mat eta = Mat::Zero(4, 4);
  eta.diagonal() << 1, -1, -1, -1;
  Vec e1 = v4(0, 1, 0, 0);
  CHECK(rank_one_update_det(eta, 1.0, e1) == doctest::Approx(0.0));  // 1 + C^k C_k = 0
  CHECK_THROWS_AS(rank_one_update_inv(eta, 1.0, e1), Error);

  Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    Mat Q(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j <= i; ++j) Q(i, j) = Q(j, i) = rng.next_normal();
    if (std::abs(Q.determinant()) < 1e-2) continue;
    Vec C(4);
    for (int i = 0; i < 4; ++i) C[i] = rng.next_normal();
    double delta = rng.next_in(-1, 1);
    Mat M = Q + delta * (C * C.transpose());
    double direct = M.determinant();
    CHECK(std::abs(rank_one_update_det(Q, delta, C) - direct) <=
          1e-10 * std::max(1.0, std::abs(direct)));
  }

  CHECK_THROWS_AS(rank_one_update_det(Mat::Zero(4, 4), 1.0, e0), Error);
}

TEST_CASE("rank-two update reduces to rank-one at mu = 0 and matches direct computation") {
  Rng rng(29);
  Mat Q(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j <= i; ++j) Q(i, j) = Q(j, i) = rng.next_normal();
  Q += 4.0 * Mat::Identity(4, 4);
  Vec B(4), C(4);
  for (int i = 0; i < 4; ++i) {
    B[i] = rng.next_normal();
    C[i] = rng.next_normal();
  }
  double delta = 0.6;

  CHECK(rank_two_update_det(Q, delta, B, 0.0, C) ==
        doctest::Approx(rank_one_update_det(Q, delta, B)).epsilon(1e-12));

  double mu = -0.4;
  Mat M = Q + delta * (B * B.transpose()) + mu * (C * C.transpose());
  CHECK(rank_two_update_det(Q, delta, B, mu, C) ==
        doctest::Approx(M.determinant()).epsilon(1e-10));
  Mat inv = rank_two_update_inv(Q, delta, B, mu, C);
  CHECK((inv - Mat(M.inverse())).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("update decomposition reconstructs g and its blocks contract correctly") {
  MetricField a = MetricField::conformal_minkowski(0.3, 4);
  OneFormField b = OneFormField::constant(v4(0.5, 0.1, 0, 0));
  PsiSpec psi = PsiSpec::kundt(1.0, -1.0, 0.5);
  Vec x = v4(0.1, -0.2, 0.4, 0.0);
  Vec v = v4(1.1, 0.2, 0.1, -0.05);

  RankTwoUpdateParams up = decompose_update(a, b, psi, x, v);
  FundamentalTensor g = fundamental_tensor_closed(a, b, psi, x, v);
  CHECK((up.reconstruct() - g.g).cwiseAbs().maxCoeff() <=
        1e-10 * std::max(1.0, g.g.cwiseAbs().maxCoeff()));

  AlphaBetaScalars sc = eval_scalars(a, b, x, v);
  Mat ainv = a.inverse_at(x);
  double BB = up.bvec.dot(ainv * up.bvec);
  double CC = up.cvec.dot(ainv * up.cvec);
  double BC = up.bvec.dot(ainv * up.cvec);
  CHECK(BB == doctest::Approx(sc.bnorm).epsilon(1e-10));
  CHECK(CC == doctest::Approx(4.0 * sc.s / sc.A * (sc.bnorm - sc.s)).epsilon(1e-10));
  CHECK(BC * BC ==
        doctest::Approx(4.0 * sc.s / sc.A * (sc.bnorm - sc.s) * (sc.bnorm - sc.s)).epsilon(1e-10));

  // the rank-two inverse of the decomposition agrees with the closed-form inverse
  Mat inv_update = rank_two_update_inv(up.base, up.delta, up.bvec, up.mu, up.cvec) / up.prefactor;
  Mat inv_closed = inverse_g_closed(a, b, psi, x, v);
  CHECK((inv_update - inv_closed).cwiseAbs().maxCoeff() <=
        1e-9 * std::max(1.0, inv_closed.cwiseAbs().maxCoeff()));
}

TEST_CASE("light-cone input is flagged, not NaN") {
  Setup s = flat_timelike_b(0.5);
  PsiSpec psi = PsiSpec::randers();
  try {
    fundamental_tensor_closed(s.metric, s.oneform, psi, Vec::Zero(4), v4(1, 1, 0, 0));
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == Code::SOnLightCone);
  }
}
