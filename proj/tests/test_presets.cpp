#include <cmath>

#include <gtest/gtest.h>

#include "graphsplit/analysis.hpp"
#include "graphsplit/presets.hpp"
#include "oracle.hpp"

using namespace graphsplit;
using Eigen::VectorXd;

TEST(Preset, TableRows) {
  for (const auto& [name, n] : oracle::preset_orders(8)) {
    const Preset p = preset(name, n);
    const AlphaVector computed = alpha(p.dec, degree_balance(p.pair.g));
    EXPECT_LE((computed.alpha - p.alpha_closed.alpha).cwiseAbs().maxCoeff(), 1e-12) << to_string(name) << " n=" << n;
    EXPECT_NEAR(computed.norm_sq, p.alpha_closed.norm_sq, 1e-12);
    for (int j = 1; j < n; ++j) {
      double expected = 1;
      switch (name) {
        case PresetName::generalized_ryu: expected = n + 1 - 2 * j; break;
        case PresetName::malitsky_tam: expected = 2; break;
        case PresetName::complete: expected = std::sqrt(double(n - j) * (n - j + 1) / n); break;
        default: break;
      }
      EXPECT_NEAR(computed.alpha(j - 1), expected, 1e-12) << to_string(name) << " n=" << n << " j=" << j;
    }
  }
}

TEST(Preset, GraphPairs) {
  const Preset ryu = preset(PresetName::generalized_ryu, 3);
  EXPECT_TRUE(is_kind(ryu.pair.g, GraphKind::complete));
  EXPECT_EQ(ryu.pair.sub.edges_one_based(), (std::vector<std::pair<int, int>>{{1, 3}, {2, 3}}));
  EXPECT_EQ(ryu.dec.method, FactorMethod::tree_incidence);
  EXPECT_NEAR(ryu.alpha_closed.alpha(0), 2, 1e-15);
  EXPECT_NEAR(ryu.alpha_closed.alpha(1), 0, 1e-15);

  const Preset mt = preset("malitsky_tam", 5);
  EXPECT_TRUE(is_kind(mt.pair.g, GraphKind::ring));
  EXPECT_TRUE(is_kind(mt.pair.sub, GraphKind::sequential));
  EXPECT_NEAR(mt.alpha_closed.norm_sq, 16, 1e-12);

  const Preset comp = preset(PresetName::complete, 3);
  EXPECT_EQ(comp.dec.method, FactorMethod::complete_sparse);
  EXPECT_NEAR(comp.alpha_closed.norm_sq, 8.0 / 3.0, 1e-12);
  for (int n = 2; n <= 8; ++n) EXPECT_NEAR(preset(PresetName::complete, n).alpha_closed.norm_sq, (n * n - 1) / 3.0, 1e-12);

  const Preset drs = preset(PresetName::douglas_rachford, 2);
  EXPECT_TRUE(is_kind(drs.pair.sub, GraphKind::sequential));
  EXPECT_EQ(drs.alpha_closed.alpha, VectorXd::Ones(1));
}

TEST(Preset, RejectsIncompatibleOrders) {
  EXPECT_THROW(preset(PresetName::douglas_rachford, 3), ValidationError);
  EXPECT_THROW(preset(PresetName::generalized_ryu, 2), ValidationError);
  EXPECT_THROW(preset(PresetName::malitsky_tam, 2), ValidationError);
  EXPECT_THROW(preset(PresetName::sequential, 1), ValidationError);
  EXPECT_THROW(preset("ryu", 3), ValidationError);
}

TEST(RyuNormSq, ClosedFormMatchesSum) {
  EXPECT_NEAR(ryu_norm_sq(2), 1, 1e-15);
  EXPECT_NEAR(ryu_norm_sq(3), 4, 1e-15);
  EXPECT_NEAR(ryu_norm_sq(5), 24, 1e-15);
  for (int n = 2; n <= 12; ++n) {
    double s = 0;
    for (int j = 1; j < n; ++j) s += double(n + 1 - 2 * j) * (n + 1 - 2 * j);
    EXPECT_NEAR(ryu_norm_sq(n), s, 1e-12);
    if (n >= 3) {
      EXPECT_NEAR(preset(PresetName::generalized_ryu, n).alpha_closed.norm_sq, s, 1e-12);
    }
  }
  EXPECT_THROW(ryu_norm_sq(1), ValidationError);
}

TEST(Preset, DrsWithEqualSubspacesIsIdentity) {
  std::mt19937_64 rng = make_rng(3, 0);
  const Preset p = preset(PresetName::douglas_rachford, 2);
  const auto u = LinearSubspace::span(gaussian(rng, 3, 2));
  const SplittingProblem prob(p.pair, p.dec, {Resolvent::normal_cone(u), Resolvent::normal_cone(u)}, 3);
  const Blocks v0 = gaussian(rng, 1, 3);
  const Trace t = run_alg2(prob, v0, RelaxationSchedule::constant(1.0), {1e-10, 1, 1});
  EXPECT_LE((t.last().v - v0).norm(), 1e-12);
}

TEST(Preset, RyuSweepDependencies) {
  // Shadow x3 depends on x1 and x2; x1 and x2 depend on v alone.
  const Preset p = preset(PresetName::generalized_ryu, 3);
  const SplittingProblem prob(p.pair, p.dec, std::vector<Resolvent>(3, Resolvent::normal_cone(LinearSubspace::full(1))), 1);
  EXPECT_TRUE(prob.predecessors(0).empty());
  EXPECT_TRUE(prob.predecessors(1) == std::vector<int>{0});
  EXPECT_EQ(prob.predecessors(2), (std::vector<int>{0, 1}));
  // With identity resolvents and d = (2, 2, 2): x1 = v1/2, x2 = (v2 + 2 x1)/2, x3 = (-v1 - v2 + 2x1 + 2x2)/2.
  Blocks v(2, 1);
  v << 0.8, -0.4;
  const OperatorStep s = apply_T_tilde(prob, v);
  const double x1 = 0.8 / 2;
  const double x2 = (-0.4 + 2 * x1) / 2;
  const double x3 = (-(0.8 - 0.4) + 2 * x1 + 2 * x2) / 2;
  EXPECT_NEAR(s.x(0, 0), x1, 1e-15);
  EXPECT_NEAR(s.x(1, 0), x2, 1e-15);
  EXPECT_NEAR(s.x(2, 0), x3, 1e-15);
  // Each governing variable pairs a first-stage shadow with the last one.
  EXPECT_NEAR(s.v_new(0, 0), v(0, 0) - (x1 - x3), 1e-15);
  EXPECT_NEAR(s.v_new(1, 0), v(1, 0) - (x2 - x3), 1e-15);
}

TEST(Preset, ClosedFormERoutes) {
  for (const auto& [name, n] : oracle::preset_orders(5)) {
    const Preset p = preset(name, n);
    const SubspaceProblem sp = oracle::random_problem(name, n, 3, 5 * n + int(name), false);
    const EBasis closed = closed_form_E(p.e_route, sp);
    ASSERT_EQ(closed.dim(), sp.e().dim()) << to_string(name) << " n=" << n;
    EXPECT_LE(oracle::span_residual(closed.basis, sp.e().basis), 1e-8);
  }
}

TEST(Preset, Names) {
  for (PresetName p : kAllPresets) EXPECT_EQ(preset_name_from_string(to_string(p)), p);
  EXPECT_NE(presets_table().find("malitsky_tam"), std::string::npos);
}
