#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <sstream>

#include "gcs/certify.hpp"
#include "gcs/errors.hpp"
#include "gcs/models.hpp"
#include "gcs/sampling.hpp"
#include "gcs/variational.hpp"
#include "test_util.hpp"

using namespace gcs;
using gcs::testing::mat2;
using gcs::testing::vec;

namespace {

// exp(At) through an eigendecomposition; fixtures have distinct eigenvalues.
Matrix expm(const Matrix& a, double t) {
  Eigen::EigenSolver<Matrix> es(a);
  const Eigen::MatrixXcd v = es.eigenvectors();
  const Eigen::VectorXcd lam = es.eigenvalues();
  Eigen::VectorXcd e(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) e[i] = std::exp(lam[i] * t);
  return (v * e.asDiagonal() * v.inverse()).real();
}

SystemModel irreversible_constant() { return make_irreversible_binding({2.0, 1.0, 4.0, 3.0, InputSignal::constant(2.0)}); }

SystemModel expanding() { return make_linear(Matrix::Identity(1, 1), Domain::box(vec({-60.0}), vec({60.0})), "expanding"); }

}  // namespace

TEST(Variational, ZeroTangentStaysZero) {
  const auto m = make_protein_synthesis({{1.0, 1.0, 1.0}, 2.0, 1.0});
  const auto s = integrate_variational(m, m.domain().center(), Vector::Zero(3), 5.0);
  ASSERT_EQ(s.dx.size(), 201u);
  for (const auto& dx : s.dx) EXPECT_EQ(dx.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Variational, LinearModelMatchesMatrixExponential) {
  Matrix a(3, 3);
  a << -1.0, 2.0, 0.0, -2.0, -1.0, 0.5, 0.3, 0.0, -0.4;
  const auto m = make_linear(a, Domain::box(Vector::Constant(3, -5.0), Vector::Constant(3, 5.0)));
  const Vector dx0 = vec({0.2, -0.7, 1.1});
  SolverConfig cfg;
  cfg.rel_tol = 1e-11;
  cfg.abs_tol = 1e-13;
  const auto s = integrate_variational(m, vec({0.5, 0.5, -0.5}), dx0, 4.0, cfg, uniform_times(0.0, 4.0, 9));
  for (std::size_t k = 0; k < s.times.size(); ++k) {
    const Vector expect = expm(a, s.times[k]) * dx0;
    EXPECT_LT((s.dx[k] - expect).cwiseAbs().maxCoeff(), 1e-9) << s.times[k];
  }
}

TEST(Variational, MatchesFiniteDifferenceSensitivity) {
  const std::vector<SystemModel> models = {
      make_protein_synthesis({{0.8, 1.2, 0.6}, 2.5, 1.0}),
      make_rfm({1.0, 2.0, 1.0}, InputSignal::constant(1.5)),
      irreversible_constant(),
      make_multi_transcriptional({1.0, {1.0, 2.0}, {1.0, 0.5}, {1.0, 2.0}, 0.0}),
  };
  const auto cfg = certify_solver_defaults();
  const double h = 1e-5;
  for (const auto& m : models) {
    const auto starts = latin_hypercube(m.domain(), 3, 21);
    for (const auto& x0c : starts) {
      // Keep x0 +- h dx0 inside the box.
      const Vector x0 = 0.9 * x0c + 0.1 * m.domain().center();
      const Vector dx0 = (m.domain().upper() - m.domain().lower()).cwiseProduct(Vector::LinSpaced(m.dim(), 0.3, -0.2));
      const double t = 2.0;
      const auto s = integrate_variational(m, x0, dx0, t, cfg, {t});
      const auto xp = integrate(m, 0.0, x0 + h * dx0, t, cfg, {t}).final_state;
      const auto xm = integrate(m, 0.0, x0 - h * dx0, t, cfg, {t}).final_state;
      const Vector fd = (xp - xm) / (2.0 * h);
      const double rel = (s.dx.back() - fd).norm() / std::max(fd.norm(), 1e-12);
      EXPECT_LT(rel, 1e-4) << m.name();
    }
  }
}

TEST(Variational, TimeVaryingModelsRejected) {
  const auto m = make_scalar_classK(ClassK::linear());
  EXPECT_THROW(integrate_variational(m, vec({0.5}), vec({1.0}), 1.0), ConfigError);
  EXPECT_THROW(make_variational_model(m), ConfigError);
}

TEST(Variational, AugmentedJacobianMatchesFiniteDifferences) {
  const auto m = make_protein_synthesis({{0.8, 1.2}, 2.5, 1.0});
  const auto v = make_variational_model(m);
  EXPECT_EQ(v.dim(), 4);
  const Vector s = vec({0.4, 0.3, 0.7, -0.2});
  const Matrix j = v.jacobian(0.0, s);
  for (Eigen::Index k = 0; k < 4; ++k) {
    Vector sp = s, sm = s;
    sp[k] += 1e-6;
    sm[k] -= 1e-6;
    const Vector col = (v.f(0.0, sp) - v.f(0.0, sm)) / 2e-6;
    EXPECT_LT((j.col(k) - col).cwiseAbs().maxCoeff(), 1e-6) << k;
  }
}

TEST(Finsler, IrreversibleBindingPassesAndTracksStRate) {
  const auto m = irreversible_constant();
  const auto norm = NormKind::scaled(NormTag::LInf, mat2(1, 1, 0, 1));
  const auto pairs = sample_pairs(m.domain(), 8, 5);
  CertificateQuery q;
  q.kind = CertificateKind::ST;
  q.norm = norm;
  q.tau = 0.5;
  q.pairs = pairs;
  const auto st = check_st(m, q);
  FinslerOptions o;
  o.tau = 0.5;
  const auto fin = check_finsler_pairs(m, pairs, norm, o);
  ASSERT_TRUE(st.passed());
  ASSERT_EQ(fin.verdict, Verdict::Pass);
  EXPECT_NEAR(fin.rate, st.rate, 0.2 * st.rate);
}

TEST(Finsler, Preconditions) {
  const auto m = irreversible_constant();
  EXPECT_THROW(check_finsler_decay(m, vec({1.0, 1.0}), vec({1.0, 1.0}), NormKind::l1()), ConfigError);
  EXPECT_THROW(check_finsler_decay(m, vec({1.0, 1.0}), vec({5.0, 1.0}), NormKind::l1()), ConfigError);
  FinslerOptions o;
  o.tau = 20.0;
  EXPECT_THROW(check_finsler_decay(m, vec({1.0, 1.0}), vec({2.0, 1.0}), NormKind::l1(), o), ConfigError);
}

TEST(Finsler, ExpandingFixtureFails) {
  FinslerOptions o;
  o.horizon = 3.0;
  const auto r = check_finsler_decay(expanding(), vec({-0.5}), vec({0.5}), NormKind::l1(), o);
  EXPECT_EQ(r.verdict, Verdict::Fail);
  EXPECT_LT(r.worst_margin, 0.0);
}

TEST(Finsler, DefaultRSamplesAreChebyshevLobatto) {
  const auto r = default_r_samples();
  ASSERT_EQ(r.size(), 9u);
  EXPECT_EQ(r.front(), 0.0);
  EXPECT_EQ(r.back(), 1.0);
  EXPECT_NEAR(r[4], 0.5, 1e-15);
  for (std::size_t i = 1; i < r.size(); ++i) EXPECT_GT(r[i], r[i - 1]);
  // Endpoint clustering.
  EXPECT_LT(r[1] - r[0], r[5] - r[4]);
}

TEST(VariationalProperty, SegmentIntegralBoundsDirectDistance) {
  const std::vector<std::pair<SystemModel, NormKind>> cases = {
      {make_protein_synthesis({{0.5, 0.5}, 2.0, 1.0}), NormKind::l1()},
      {irreversible_constant(), NormKind::scaled(NormTag::LInf, mat2(1, 1, 0, 1))},
      {make_rfm({1.0, 2.0, 1.0}, InputSignal::constant(1.5)), NormKind::linf()},
      {make_transcriptional_module({1.0, 2.0, 0.5, 3.0, 0.0}), NormKind::l1()},
  };
  std::vector<double> fine;
  for (int k = 0; k <= 32; ++k) fine.push_back(k / 32.0);
  for (const auto& [m, norm] : cases) {
    for (const auto& p : sample_pairs(m.domain(), 4, 8)) {
      if (p.a == p.b) continue;
      for (double t : {0.5, 2.0}) {
        const auto b = segment_integral_bound(m, p.a, p.b, norm, t, fine);
        EXPECT_LE(b.direct, b.integral * (1.0 + 1e-3) + 1e-10) << m.name() << " t=" << t;
      }
    }
  }
}

TEST(VariationalProperty, FinslerVerdictMatchesSt) {
  struct Case {
    SystemModel model;
    NormKind norm;
    double tau;
  };
  const std::vector<Case> cases = {
      {make_protein_synthesis({{1.0, 1.0}, 2.0, 1.0}), NormKind::diagonal(NormTag::L1, protein_scaling({1.0, 1.0}, 0.1)), 0.5},
      {irreversible_constant(), NormKind::scaled(NormTag::LInf, mat2(1, 1, 0, 1)), 0.5},
      {make_piecewise_shift(), NormKind::l1(), 0.1},
      {make_piecewise_shift(), NormKind::l1(), 0.5},
  };
  for (const auto& c : cases) {
    const auto pairs = sample_pairs(c.model.domain(), 8, 3);
    CertificateQuery q;
    q.kind = CertificateKind::ST;
    q.norm = c.norm;
    q.tau = c.tau;
    q.pairs = pairs;
    FinslerOptions o;
    o.tau = c.tau;
    const bool st = check_st(c.model, q).passed();
    const bool fin = check_finsler_pairs(c.model, pairs, c.norm, o).verdict == Verdict::Pass;
    EXPECT_EQ(st, fin) << c.model.name() << " tau=" << c.tau;
  }
}

TEST(Variational, CsvLayout) {
  const auto m = make_linear(mat2(-1, 0, 0, -2), Domain::box(Vector::Constant(2, -1.0), Vector::Ones(2)));
  const auto s = integrate_variational(m, vec({0.5, 0.5}), vec({1.0, 1.0}), 1.0, {}, {0.0, 1.0});
  std::ostringstream out;
  write_variational_csv(out, s, NormKind::l1());
  std::istringstream in(out.str());
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  EXPECT_EQ(header, "t,x1,x2,dx1,dx2,norm_dx");
  EXPECT_EQ(first, "0,0.5,0.5,1,1,2");
}
