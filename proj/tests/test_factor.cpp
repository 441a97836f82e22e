#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "graphsplit/factor.hpp"
#include "oracle.hpp"

using namespace graphsplit;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kTol = 1e-10;

double max_abs(const MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

void expect_onto(const OntoDecomposition& dec, const AlgorithmicGraph& sub) {
  const int n = sub.n();
  const DecompositionResiduals r = residuals(dec, laplacian(sub));
  EXPECT_LE(r.product, kTol);
  EXPECT_LE(r.inverse, kTol);
  EXPECT_LE(r.kernel, kTol);
  EXPECT_LE(max_abs(dec.z * dec.z.transpose() - laplacian(sub).cast<double>()), kTol);
  EXPECT_LE(max_abs(dec.z_dagger * dec.z - MatrixXd::Identity(n - 1, n - 1)), kTol);
  EXPECT_LE((dec.z.transpose() * VectorXd::Ones(n)).norm(), kTol);
  // Moore-Penrose axioms.
  EXPECT_LE(max_abs(dec.z * dec.z_dagger * dec.z - dec.z), kTol);
  EXPECT_LE(max_abs(dec.z_dagger * dec.z * dec.z_dagger - dec.z_dagger), kTol);
}

}  // namespace

TEST(FactorTree, SequentialAndParallelDown) {
  const auto seq = named_graph(GraphKind::sequential, 3);
  const OntoDecomposition a = factor_tree(seq);
  MatrixXd za(3, 2);
  za << 1, 0, -1, 1, 0, -1;
  EXPECT_EQ(a.z, za);
  EXPECT_EQ(a.method, FactorMethod::tree_incidence);

  const auto pd = named_graph(GraphKind::parallel_down, 3);
  const OntoDecomposition b = factor_tree(pd);
  MatrixXd zb(3, 2);
  zb << 1, 0, 0, 1, -1, -1;
  EXPECT_EQ(b.z, zb);

  for (const auto* dec : {&a, &b}) {
    const MatrixXd direct = (dec->z.transpose() * dec->z).fullPivLu().solve(dec->z.transpose());
    EXPECT_LE(max_abs(direct - dec->z_dagger), 1e-12);
    EXPECT_LE(max_abs(direct * dec->z - MatrixXd::Identity(2, 2)), 1e-12);
  }
  EXPECT_THROW(factor_tree(named_graph(GraphKind::complete, 3)), ValidationError);
}

TEST(FactorCirculant, RingEigenvalues) {
  const VectorXd l4 = circulant_eigenvalues(laplacian(named_graph(GraphKind::ring, 4)));
  EXPECT_NEAR(l4(0), 2, 1e-12);
  EXPECT_NEAR(l4(1), 4, 1e-12);
  EXPECT_NEAR(l4(2), 2, 1e-12);
  const VectorXd l3 = circulant_eigenvalues(laplacian(named_graph(GraphKind::ring, 3)));
  EXPECT_NEAR(l3(0), 3, 1e-12);
  EXPECT_NEAR(l3(1), 3, 1e-12);
  for (int n = 3; n <= 8; ++n) {
    const auto ring = named_graph(GraphKind::ring, n);
    const VectorXd lam = circulant_eigenvalues(laplacian(ring));
    for (int j = 1; j < n; ++j) {
      const double s = std::sin(std::numbers::pi * j / n);
      EXPECT_NEAR(lam(j - 1), 4 * s * s, 1e-12);
    }
    expect_onto(factor_circulant(ring), ring);
    expect_onto(factor_circulant(named_graph(GraphKind::complete, n)), named_graph(GraphKind::complete, n));
  }
}

TEST(FactorCirculant, StructuralDetection) {
  EXPECT_TRUE(is_circulant(laplacian(named_graph(GraphKind::ring, 5))));
  EXPECT_FALSE(is_circulant(laplacian(named_graph(GraphKind::sequential, 5))));
  EXPECT_THROW(factor_circulant(named_graph(GraphKind::sequential, 4)), ValidationError);
  // A circulant graph given by edges, not by a kind tag: 6-cycle plus the long diagonals.
  const auto g = new_graph(6, {{1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {1, 6}, {1, 4}, {2, 5}, {3, 6}});
  EXPECT_EQ(default_factor_method(g), FactorMethod::circulant);
  expect_onto(default_factor(g), g);
}

TEST(FactorCompleteSparse, OrderThree) {
  const OntoDecomposition dec = factor_complete_sparse(3);
  MatrixXd z(3, 2);
  z << std::sqrt(2.0), 0, -1 / std::sqrt(2.0), std::sqrt(1.5), -1 / std::sqrt(2.0), -std::sqrt(1.5);
  EXPECT_LE(max_abs(dec.z - z), 1e-14);
  EXPECT_LE(max_abs(dec.z_dagger - z.transpose() / 3), 1e-14);
  EXPECT_NEAR(complete_weight(3, 1), 1 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(complete_weight(3, 2), std::sqrt(1.5), 1e-15);
  MatrixXd k3 = 3 * MatrixXd::Identity(3, 3) - MatrixXd::Ones(3, 3);
  EXPECT_LE(max_abs(z * z.transpose() - k3), 1e-14);
  expect_onto(dec, named_graph(GraphKind::complete, 3));
}

TEST(FactorCompleteSparse, OrderTwoIsIncidence) {
  const OntoDecomposition dec = factor_complete_sparse(2);
  EXPECT_NEAR(dec.z(0, 0), 1, 1e-15);
  EXPECT_NEAR(dec.z(1, 0), -1, 1e-15);
}

TEST(FactorEigen, OrderTwo) {
  const OntoDecomposition dec = factor_eigen(named_graph(GraphKind::sequential, 2));
  EXPECT_NEAR(std::abs(dec.z(0, 0)), 1, 1e-12);
  EXPECT_NEAR(dec.z(0, 0), -dec.z(1, 0), 1e-12);
  EXPECT_GT(dec.z(0, 0), 0);  // first nonzero entry of the eigenvector is positive
}

TEST(FactorEigen, RejectsDisconnectedLaplacian) {
  MatrixXd lap = MatrixXd::Zero(4, 4);
  lap.topLeftCorner(2, 2) << 1, -1, -1, 1;
  lap.bottomRightCorner(2, 2) << 1, -1, -1, 1;
  EXPECT_THROW(factor_eigen(lap), NumericalError);
}

TEST(FactorEigen, OrthogonalFactorAgainstTree) {
  for (int n = 2; n <= 8; ++n) {
    for (GraphKind k : {GraphKind::sequential, GraphKind::parallel_up, GraphKind::parallel_down}) {
      const auto g = named_graph(k, n);
      const OntoDecomposition tree = factor_tree(g);
      const OntoDecomposition eig = factor_eigen(g);
      expect_onto(eig, g);
      const MatrixXd o = tree.z_dagger * eig.z;
      EXPECT_LE(max_abs(o.transpose() * o - MatrixXd::Identity(n - 1, n - 1)), 1e-8);
      EXPECT_LE(max_abs(eig.z - tree.z * o), 1e-8);
      // alpha transforms by O^T.
      const DegreeBalance delta = degree_balance(g);
      EXPECT_LE((alpha(eig, delta).alpha - o.transpose() * alpha(tree, delta).alpha).norm(), 1e-8);
    }
  }
}

TEST(Factor, AllMethodsAllPresetPairs) {
  for (const auto& [name, n] : oracle::preset_orders(8)) {
    const Preset p = preset(name, n);
    const DegreeBalance delta = degree_balance(p.pair.g);
    std::vector<FactorMethod> methods{FactorMethod::eigen};
    if (p.pair.sub.is_tree()) methods.push_back(FactorMethod::tree_incidence);
    if (is_circulant(laplacian(p.pair.sub))) methods.push_back(FactorMethod::circulant);
    if (is_kind(p.pair.sub, GraphKind::complete)) methods.push_back(FactorMethod::complete_sparse);
    for (FactorMethod m : methods) {
      const OntoDecomposition dec = factor(p.pair.sub, m);
      expect_onto(dec, p.pair.sub);
      const AlphaVector a = alpha(dec, delta);
      EXPECT_LE((dec.z * a.alpha - delta.delta.cast<double>()).norm(), kTol);
      EXPECT_LE((a.alpha - oracle::lsq_alpha(dec.z, delta.delta.cast<double>())).norm(), 1e-10);
      EXPECT_GT(a.alpha.norm(), 0);
      EXPECT_NEAR(a.norm_sq, a.alpha.squaredNorm(), 1e-12);
    }
  }
}

TEST(Alpha, Examples) {
  for (int n = 2; n <= 8; ++n) {
    for (GraphKind k : {GraphKind::sequential, GraphKind::parallel_up, GraphKind::parallel_down}) {
      const auto g = named_graph(k, n);
      EXPECT_LE((alpha(factor_tree(g), degree_balance(g)).alpha - VectorXd::Ones(n - 1)).norm(), 1e-12);
    }
  }
  const auto ryu = alpha(factor_tree(named_graph(GraphKind::parallel_down, 3)),
                         degree_balance(named_graph(GraphKind::complete, 3)));
  EXPECT_NEAR(ryu.alpha(0), 2, 1e-12);
  EXPECT_NEAR(ryu.alpha(1), 0, 1e-12);

  const auto comp = alpha(factor_complete_sparse(3), degree_balance(named_graph(GraphKind::complete, 3)));
  EXPECT_NEAR(comp.alpha(0), std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(comp.alpha(1), std::sqrt(2.0 / 3.0), 1e-12);
  EXPECT_NEAR(comp.norm_sq, 8.0 / 3.0, 1e-12);

  for (int n = 3; n <= 8; ++n) {
    const auto mt = alpha(factor_tree(named_graph(GraphKind::sequential, n)),
                          degree_balance(named_graph(GraphKind::ring, n)));
    EXPECT_LE((mt.alpha - 2 * VectorXd::Ones(n - 1)).norm(), 1e-12);
    EXPECT_NEAR(mt.norm_sq, 4.0 * (n - 1), 1e-12);
  }
}

TEST(Alpha, RejectsInconsistentDelta) {
  const OntoDecomposition dec = factor_tree(named_graph(GraphKind::sequential, 3));
  EXPECT_THROW(alpha(dec, degree_balance(named_graph(GraphKind::sequential, 4))), ValidationError);
  DegreeBalance bad{Eigen::VectorXi::Ones(3)};
  EXPECT_THROW(alpha(dec, bad), NumericalError);
}

TEST(Factor, DefaultLadder) {
  EXPECT_EQ(default_factor_method(named_graph(GraphKind::sequential, 5)), FactorMethod::tree_incidence);
  EXPECT_EQ(default_factor_method(named_graph(GraphKind::complete, 5)), FactorMethod::complete_sparse);
  EXPECT_EQ(default_factor_method(named_graph(GraphKind::ring, 5)), FactorMethod::circulant);
  const auto other = new_graph(4, {{1, 2}, {1, 3}, {2, 3}, {3, 4}});
  EXPECT_EQ(default_factor_method(other), FactorMethod::eigen);
  expect_onto(default_factor(other), other);
}
