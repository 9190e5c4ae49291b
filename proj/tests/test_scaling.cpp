#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gcs/errors.hpp"
#include "gcs/models.hpp"
#include "gcs/scaling.hpp"
#include "test_util.hpp"

using namespace gcs;
using gcs::testing::mat2;
using gcs::testing::vec;

namespace {

SystemModel transcriptional() { return make_transcriptional_module({1.0, 1.0, 1.0, 1.0, 0.0}); }

SystemModel multi3() {
  return make_multi_transcriptional({1.0, {1.0, 2.0, 0.5}, {1.0, 0.5, 2.0}, {1.0, 2.0, 1.5}, 0.0});
}

Partition single_sminus(Eigen::Index n) {
  Partition p;
  p.sminus = {0};
  for (Eigen::Index i = 1; i < n; ++i) {
    p.s0.push_back(i);
    p.zmap[i] = 0;
  }
  return p;
}

SystemModel unit_square_linear(const Matrix& a) {
  return make_linear(a, Domain::box(Vector::Constant(a.rows(), -1.0), Vector::Ones(a.rows())));
}

// x' = -x^2 on [0, 1]: contracting inside, equilibrium on the face x = 0.
SystemModel boundary_equilibrium() {
  ModelDefinition d;
  d.name = "boundary_equilibrium";
  d.domain = Domain::box(vec({0.0}), vec({1.0}));
  d.f = [](double, const Vector& x) { return Vector(-x.cwiseProduct(x)); };
  d.jacobian = [](double, const Vector& x) { return Matrix(Matrix::Constant(1, 1, -2.0 * x[0])); };
  return SystemModel(std::move(d));
}

}  // namespace

TEST(GridSup, Examples) {
  const auto protein = make_protein_synthesis({{1.0, 1.0}, 2.0, 1.0});
  const auto d = NormKind::diagonal(NormTag::L1, protein_scaling({1.0, 1.0}, 0.1));
  EXPECT_NEAR(grid_sup_measure(protein, d, GridSpec{9}).value, -0.1, 1e-12);

  const auto relay = make_phosphorelay({{1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, InputSignal::constant(1.0)});
  EXPECT_GE(grid_sup_measure(relay, NormKind::l1(), GridSpec{5}).value, 0.0);

  const auto r = grid_sup_measure(transcriptional(), NormKind::l1(), GridSpec{9});
  EXPECT_NEAR(r.value, 0.0, 1e-14);
  EXPECT_EQ(r.points, 81u);
}

TEST(GridSup, TimeVaryingUsesTimeSamples) {
  const auto m = make_scalar_classK(ClassK::linear());
  const auto r = grid_sup_measure(m, NormKind::l1(), GridSpec{3}, m.domain(), {0.5, 1.0, 2.0});
  EXPECT_DOUBLE_EQ(r.value, -0.5);
  EXPECT_DOUBLE_EQ(r.t, 0.5);
  // No samples means the default time sampling, never t = 0 alone.
  EXPECT_EQ(grid_sup_measure(m, NormKind::l1(), GridSpec{3}, m.domain(), {}).value,
            grid_sup_measure(m, NormKind::l1(), GridSpec{3}).value);
  EXPECT_EQ(grid_sup_measure(m, NormKind::l1(), GridSpec{3}).value, 0.0);  // J(0) = 0
  EXPECT_THROW(grid_sup_measure(m, NormKind::l1(), GridSpec{2}, m.domain(), {0.0}), ConfigError);
}

TEST(PartitionMu1, TranscriptionalPasses) {
  const auto r = check_partition_mu1(transcriptional(), GridSpec{9}, single_sminus(2));
  EXPECT_EQ(r.verdict, Verdict::Pass);
  EXPECT_TRUE(r.cond1 && r.cond2 && r.cond3);
  EXPECT_GT(r.delta, 0.0);
  EXPECT_TRUE(r.violations.empty());
}

TEST(PartitionMu1, MultiModulePasses) {
  const auto r = check_partition_mu1(multi3(), GridSpec{5}, single_sminus(4));
  EXPECT_EQ(r.verdict, Verdict::Pass);
  EXPECT_NEAR(r.delta, 1.0, 1e-12);
}

TEST(PartitionMu1, SwappedRolesFailConditionTwo) {
  Partition p;
  p.s0 = {0};
  p.sminus = {1};
  p.zmap[0] = 1;
  const auto r = check_partition_mu1(transcriptional(), GridSpec{9}, p);
  EXPECT_EQ(r.verdict, Verdict::Fail);
  EXPECT_FALSE(r.cond2);
  bool saw = false;
  for (const auto& v : r.violations) saw = saw || (v.condition == 2 && v.index == 1);
  EXPECT_TRUE(saw);
}

TEST(PartitionMu1, InvalidPartitions) {
  Partition p;
  p.s0 = {1};
  p.sminus = {0, 1};
  EXPECT_THROW(p.validate(2), ConfigError);
  Partition q;
  q.s0 = {1};
  q.sminus = {0};
  q.zmap[1] = 1;
  EXPECT_THROW(q.validate(2), ConfigError);
  Partition r;
  r.sminus = {0};
  EXPECT_THROW(r.validate(2), ConfigError);
}

TEST(ConstructScaling, RecipeValues) {
  Partition p;
  p.s0 = {1};
  p.sminus = {0};
  p.zmap[1] = 0;
  EXPECT_TRUE(construct_scaling_mu1(p, 0.1, 2).isApprox(vec({0.9, 1.0})));
  EXPECT_LT((construct_scaling_mu1(p, 1e-12, 2) - Vector::Ones(2)).cwiseAbs().maxCoeff(), 1e-11);

  const auto m = make_multi_transcriptional({1.0, {1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, 0.0});
  const Vector d = construct_scaling_mu1(single_sminus(4), 0.2, 4);
  EXPECT_TRUE(d.isApprox(vec({0.8, 1.0, 1.0, 1.0})));
  EXPECT_LT(grid_sup_measure(m, NormKind::diagonal(NormTag::L1, d), GridSpec{5}).value, 0.0);
  EXPECT_THROW(construct_scaling_mu1(p, 1.0, 2), ConfigError);
  EXPECT_THROW(construct_scaling_mu1(p, 0.0, 2), ConfigError);
}

TEST(ConstructScaling, SelectedScalingContracts) {
  for (const auto& [m, grid] : {std::pair{transcriptional(), GridSpec{9}}, std::pair{multi3(), GridSpec{5}}}) {
    const auto r = select_scaling(m, grid, single_sminus(m.dim()), NormTag::L1);
    ASSERT_EQ(r.verdict, Verdict::Pass) << m.name();
    EXPECT_LT(r.grid_sup_mu, -kStrictMargin);
    EXPECT_GT(r.epsilon_used, 0.0);
    EXPECT_LE(r.epsilon_used, 0.25);
    EXPECT_NEAR(grid_sup_measure(m, r.norm(), grid).value, r.grid_sup_mu, 1e-14);
  }
}

TEST(ConstructScaling, FixedEpsilonHonoured) {
  ScalingOptions o;
  o.epsilon = 0.05;
  const auto r = select_scaling(transcriptional(), GridSpec{9}, single_sminus(2), NormTag::L1, o);
  EXPECT_DOUBLE_EQ(r.epsilon_used, 0.05);
  EXPECT_TRUE(r.d.isApprox(vec({0.95, 1.0})));
}

TEST(PartitionMuInf, TransposeFixture) {
  const Matrix a = mat2(-2, 1, 1, -1);
  Partition p = single_sminus(2);
  EXPECT_EQ(check_partition_mu1(unit_square_linear(a), GridSpec{3}, p).verdict, Verdict::Pass);
  EXPECT_EQ(check_partition_muinf(unit_square_linear(a.transpose()), GridSpec{3}, p).verdict, Verdict::Pass);
}

TEST(PartitionMuInf, IrreversibleBindingAfterSimilarity) {
  const auto m = make_irreversible_binding({2.0, 1.0, 4.0, 3.0, InputSignal::constant(2.0)});
  PartitionOptions o;
  o.similarity = mat2(1, 1, 0, 1);
  const auto r = check_partition_muinf(m, GridSpec{9}, single_sminus(2), o);
  EXPECT_TRUE(r.cond2);
  EXPECT_TRUE(r.cond1);
  EXPECT_NEAR(r.delta, 2.0, 1e-12);
}

TEST(PartitionMuInf, PositiveRowFailsConditionOne) {
  const auto r = check_partition_muinf(unit_square_linear(mat2(-1, 0, 0.3, 0.5)), GridSpec{3}, single_sminus(2));
  EXPECT_EQ(r.verdict, Verdict::Fail);
  EXPECT_FALSE(r.cond1);
  EXPECT_TRUE(r.cond2);
}

TEST(ScalingProperty, RowColumnDuality) {
  // Metzler fixtures, so "> 0" and "!= 0" coincide for the coupling entry.
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 300; ++rep) {
    const Eigen::Index n = 2 + rep % 3;
    Matrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) a(i, j) = i == j ? -u(rng) * n : std::round(u(rng) * 2) / 2;
    const Partition p = single_sminus(n);
    const auto r1 = check_partition_mu1(unit_square_linear(a), GridSpec{3}, p);
    const auto r2 = check_partition_muinf(unit_square_linear(a.transpose()), GridSpec{3}, p);
    EXPECT_EQ(r1.cond1, r2.cond1) << a;
    EXPECT_EQ(r1.cond2, r2.cond2) << a;
    EXPECT_EQ(r1.cond3, r2.cond3) << a;
    EXPECT_EQ(r1.verdict, r2.verdict) << a;
    EXPECT_DOUBLE_EQ(r1.delta, r2.delta);
  }
}

TEST(ScalingProperty, ScaledMeasureConvergesAsEpsilonShrinks) {
  struct Case {
    SystemModel model;
    GridSpec grid;
    std::function<Vector(double)> d;
  };
  const std::vector<Case> cases = {
      {transcriptional(), GridSpec{9}, [](double e) { return construct_scaling_mu1(single_sminus(2), e, 2); }},
      {multi3(), GridSpec{5}, [](double e) { return construct_scaling_mu1(single_sminus(4), e, 4); }},
      {make_protein_synthesis({{1.0, 1.0}, 2.0, 1.0}), GridSpec{9},
       [](double e) { return protein_scaling({1.0, 1.0}, e); }},
  };
  for (const auto& c : cases) {
    const double base = grid_sup_measure(c.model, NormKind::l1(), c.grid).value;
    double last = std::numeric_limits<double>::infinity();
    for (double eps : {0.2, 0.1, 0.05, 0.01}) {
      const double v = grid_sup_measure(c.model, NormKind::diagonal(NormTag::L1, c.d(eps)), c.grid).value;
      const double gap = std::abs(v - base);
      EXPECT_LT(gap, last) << c.model.name() << " eps=" << eps;
      last = gap;
    }
    EXPECT_LT(last, 0.02) << c.model.name();
  }
}

TEST(ScalingProperty, GridRefinementNeverTurnsFailIntoPass) {
  const std::vector<std::pair<SystemModel, Partition>> cases = {
      {transcriptional(), single_sminus(2)},
      {make_irreversible_binding({2.0, 1.0, 4.0, 3.0, InputSignal::constant(2.0)}), single_sminus(2)},
      {make_rfm({1.0, 2.0}, InputSignal::constant(1.0)), single_sminus(2)},
      {make_protein_synthesis({{0.5, 0.5}, 2.0, 1.0}), single_sminus(2)},
  };
  for (const auto& [m, p] : cases) {
    double last_sup = -std::numeric_limits<double>::infinity();
    bool failed = false;
    for (std::size_t pts : {5u, 9u, 17u}) {
      const double sup = grid_sup_measure(m, NormKind::l1(), GridSpec{pts}).value;
      EXPECT_GE(sup, last_sup) << m.name();
      last_sup = sup;
      const bool pass = check_partition_mu1(m, GridSpec{pts}, p).verdict == Verdict::Pass;
      if (failed) EXPECT_FALSE(pass) << m.name() << " grid " << pts;
      failed = failed || !pass;
    }
  }
}

TEST(NormDeviation, IdentityAndScaling) {
  EXPECT_DOUBLE_EQ(norm_deviation(NormKind::l1(), NormKind::l1(), 3), 0.0);
  const double s = norm_deviation(NormKind::diagonal(NormTag::L1, vec({0.9, 1.0})), NormKind::l1(), 2);
  EXPECT_GT(s, 0.0);
  EXPECT_LE(s, 0.1 + 1e-12);
}

TEST(NestedContraction, ProteinBoundaryRegime) {
  const ProteinSynthesisParams p{{0.5, 0.5}, 2.0, 1.0};
  const auto m = make_protein_synthesis(p);
  const auto family = protein_family(m, p, {0.2, 0.1, 0.05});
  const auto r = check_nested_contraction(m, family, GridSpec{9}, EntryCheck{});
  EXPECT_EQ(r.verdict, Verdict::Pass) << r.diagnostic;
  EXPECT_TRUE(r.measure_ok && r.deviation_ok && r.entry_ok);
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    if (r.rows[i].zeta < r.rows[i - 1].zeta) EXPECT_LE(r.rows[i].deviation, r.rows[i - 1].deviation + 1e-15);
  }
  for (const auto& row : r.rows) EXPECT_LT(row.grid_sup_mu, 0.0);
  EXPECT_GT(protein_family_epsilon(p, 0.1), 0.0);
}

TEST(NestedContraction, Phosphorelay) {
  const PhosphorelayParams p{{1.0, 0.5, 2.0}, {1.0, 2.0, 1.0}, InputSignal::constant(1.5)};
  const auto m = make_phosphorelay(p);
  const auto family = phosphorelay_family(p, {0.2, 0.1, 0.05});
  const auto r = check_nested_contraction(m, family, GridSpec{5}, EntryCheck{});
  EXPECT_EQ(r.verdict, Verdict::Pass) << r.diagnostic;
  const Vector d = phosphorelay_family_scaling(p, 0.1);
  EXPECT_TRUE((d.array() > 0.0).all());
}

TEST(NestedContraction, NonNestedFamilyRejected) {
  const auto region = [](double z) { return Domain::box(Vector::Zero(2), Vector::Constant(2, z)); };
  const auto norm = [](double) { return NormKind::l1(); };
  EXPECT_THROW(NestedFamily::create("growing", {0.5, 0.25}, region, norm, NormKind::l1()), ConfigError);
  EXPECT_THROW(NestedFamily::create("unsorted", {0.1, 0.2},
                                    [](double z) { return Domain::box(Vector::Constant(2, z), Vector::Ones(2)); },
                                    norm, NormKind::l1()),
               ConfigError);
}

TEST(InteriorContraction, IrreversibleBindingWithConstantInput) {
  const auto m = make_irreversible_binding({2.0, 1.0, 4.0, 3.0, InputSignal::constant(2.0)});
  const auto norm = NormKind::scaled(NormTag::LInf, mat2(1, 1, 0, 1));
  const auto r = check_interior_contractive(m, norm, GridSpec{9});
  EXPECT_EQ(r.verdict, Verdict::Pass);
  EXPECT_LT(r.interior_sup_mu, 0.0);
  EXPECT_TRUE(r.distance_monotone);
  bool left_face = false;
  for (const auto& f : r.critical_faces) left_face = left_face || (f.axis == 0 && !f.upper);
  EXPECT_TRUE(left_face);
  for (const auto& [tau, d] : r.distance) EXPECT_GT(d, 0.0) << tau;
}

TEST(InteriorContraction, BoundaryEquilibriumFailsRepulsion) {
  const auto r = check_interior_contractive(boundary_equilibrium(), NormKind::l1(), GridSpec{9});
  EXPECT_TRUE(r.interior_ok);
  EXPECT_FALSE(r.repulsion_ok);
  EXPECT_EQ(r.verdict, Verdict::Fail);
}

TEST(UniqueEquilibrium, ProteinStrictRegime) {
  const auto m = make_protein_synthesis({{1.0, 1.0}, 2.0, 1.0});
  const auto r = unique_equilibrium(m, 1e-6);
  EXPECT_LT(m.f(0.0, r.e).norm(), 1e-10);
  EXPECT_TRUE(r.interior);
  EXPECT_LT(r.spread, 1e-6);
}

TEST(UniqueEquilibrium, IrreversibleBinding) {
  const IrreversibleBindingParams p{2.0, 1.0, 4.0, 3.0, InputSignal::constant(2.0)};
  const auto r = unique_equilibrium(make_irreversible_binding(p), 1e-6);
  EXPECT_NEAR(r.e[1], p.eT, 1e-6);
  EXPECT_NEAR(r.e[0], (p.zT - p.eT) * 2.0 / (2.0 + p.delta), 1e-6);
}

TEST(UniqueEquilibrium, GradientFixture) {
  // f = -grad V, V = (x - 0.3)^2 + 2 (y + 0.2)^2.
  ModelDefinition d;
  d.name = "gradient";
  d.domain = Domain::box(Vector::Constant(2, -1.0), Vector::Ones(2));
  d.f = [](double, const Vector& x) { return vec({-2.0 * (x[0] - 0.3), -4.0 * (x[1] + 0.2)}); };
  d.jacobian = [](double, const Vector&) { return mat2(-2, 0, 0, -4); };
  const auto r = unique_equilibrium(SystemModel(std::move(d)), 1e-8);
  EXPECT_NEAR(r.e[0], 0.3, 1e-10);
  EXPECT_NEAR(r.e[1], -0.2, 1e-10);
  EXPECT_TRUE(r.interior);
}
