#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "graphsplit/error.hpp"
#include "graphsplit/graph.hpp"

namespace graphsplit {

enum class FactorMethod { tree_incidence, circulant, complete_sparse, eigen };

inline std::string_view to_string(FactorMethod m) {
  switch (m) {
    case FactorMethod::tree_incidence: return "tree_incidence";
    case FactorMethod::circulant: return "circulant";
    case FactorMethod::complete_sparse: return "complete_sparse";
    case FactorMethod::eigen: return "eigen";
  }
  return "?";
}

inline FactorMethod factor_method_from_string(std::string_view name) {
  for (auto m : {FactorMethod::tree_incidence, FactorMethod::circulant, FactorMethod::complete_sparse,
                 FactorMethod::eigen}) {
    if (to_string(m) == name) return m;
  }
  throw ValidationError("unknown factor method '" + std::string(name) + "'");
}

/// Onto decomposition Lap = Z Z^T with Z of full column rank n-1, together
/// with its Moore-Penrose inverse.
struct OntoDecomposition {
  Eigen::MatrixXd z;         // n x (n-1)
  Eigen::MatrixXd z_dagger;  // (n-1) x n
  FactorMethod method = FactorMethod::eigen;

  int n() const { return static_cast<int>(z.rows()); }
};

/// Max-norm residuals of the three defining identities of an onto decomposition.
struct DecompositionResiduals {
  double product = 0;  // ||Z Z^T - Lap||_max
  double inverse = 0;  // ||Z^+ Z - I||_max
  double kernel = 0;   // ||Z^T 1||
};

inline DecompositionResiduals residuals(const OntoDecomposition& dec, const Eigen::MatrixXi& lap) {
  const Eigen::Index m = dec.z.cols();
  DecompositionResiduals r;
  r.product = (dec.z * dec.z.transpose() - lap.cast<double>()).cwiseAbs().maxCoeff();
  r.inverse = (dec.z_dagger * dec.z - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff();
  r.kernel = (dec.z.transpose() * Eigen::VectorXd::Ones(dec.z.rows())).norm();
  return r;
}

/// (Z^T Z)^{-1} Z^T for a full-column-rank Z.
inline Eigen::MatrixXd pseudo_inverse_full_column_rank(const Eigen::MatrixXd& z) {
  const Eigen::MatrixXd gram = z.transpose() * z;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw NumericalError("matrix does not have full column rank");
  }
  return ldlt.solve(z.transpose());
}

inline OntoDecomposition factor_tree(const AlgorithmicGraph& sub) {
  if (!sub.is_tree()) {
    throw ValidationError("tree factor requires a tree (" + std::to_string(sub.num_edges()) +
                          " edges for n = " + std::to_string(sub.n()) + ")");
  }
  OntoDecomposition dec;
  dec.z = incidence(sub).cast<double>();
  dec.z_dagger = pseudo_inverse_full_column_rank(dec.z);
  dec.method = FactorMethod::tree_incidence;
  return dec;
}

/// Entry (i, j) depends only on (j - i) mod n.
inline bool is_circulant(const Eigen::MatrixXi& m) {
  const Eigen::Index n = m.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (m(i, j) != m(0, (j - i + n) % n)) return false;
  return true;
}

/// Positive eigenvalues lambda_1..lambda_{n-1} of a circulant Laplacian,
/// computed from its first row.
inline Eigen::VectorXd circulant_eigenvalues(const Eigen::MatrixXi& lap) {
  const Eigen::Index n = lap.rows();
  Eigen::VectorXd lambda(n - 1);
  for (Eigen::Index j = 1; j < n; ++j) {
    double s = 0;
    for (Eigen::Index k = 0; k < n; ++k)
      s += lap(0, k) * std::cos(2.0 * std::numbers::pi * double(j) * double(k) / double(n));
    lambda(j - 1) = s;
  }
  return lambda;
}

inline OntoDecomposition factor_circulant(const AlgorithmicGraph& sub) {
  const Eigen::MatrixXi lap = laplacian(sub);
  if (!is_circulant(lap)) throw ValidationError("Laplacian is not circulant");
  const int n = sub.n();
  const Eigen::VectorXd lambda = circulant_eigenvalues(lap);
  for (int j = 0; j < n - 1; ++j) {
    if (lambda(j) <= 1e-12) {
      throw NumericalError("degenerate circulant spectrum: lambda_" + std::to_string(j + 1) +
                           " = " + std::to_string(lambda(j)));
    }
  }
  OntoDecomposition dec;
  dec.z.resize(n, n - 1);
  dec.z_dagger.resize(n - 1, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 1; j < n; ++j) {
      const double angle = 2.0 * std::numbers::pi * double(i) * double(j) / double(n) - std::numbers::pi / 4;
      const double zij = std::cos(angle) * std::sqrt(2.0 / n * lambda(j - 1));
      dec.z(i, j - 1) = zij;
      dec.z_dagger(j - 1, i) = zij / lambda(j - 1);
    }
  }
  dec.method = FactorMethod::circulant;
  return dec;
}

/// t_j = sqrt(n / ((n-j)(n-j+1))), 1-based j.
inline double complete_weight(int n, int j) {
  return std::sqrt(double(n) / (double(n - j) * double(n - j + 1)));
}

/// Lower-triangular decomposition of the complete-graph Laplacian nI - J.
inline OntoDecomposition factor_complete_sparse(int n) {
  if (n < 2) throw ValidationError("complete factor requires n >= 2");
  OntoDecomposition dec;
  dec.z = Eigen::MatrixXd::Zero(n, n - 1);
  for (int j = 1; j < n; ++j) {
    const double t = complete_weight(n, j);
    dec.z(j - 1, j - 1) = double(n - j) * t;
    for (int i = j + 1; i <= n; ++i) dec.z(i - 1, j - 1) = -t;
  }
  dec.z_dagger = dec.z.transpose() / double(n);
  dec.method = FactorMethod::complete_sparse;
  return dec;
}

/// Spectral factor: columns sqrt(lambda_j) v_j over the positive eigenpairs in
/// ascending order, each eigenvector signed so its first nonzero entry is positive.
inline OntoDecomposition factor_eigen(const Eigen::MatrixXd& lap) {
  const Eigen::Index n = lap.rows();
  if (n < 2 || lap.cols() != n) throw ValidationError("Laplacian must be square of order >= 2");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
  if (solver.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  const Eigen::VectorXd& evals = solver.eigenvalues();
  if (evals(1) < 1e-10) {
    throw NumericalError("second-smallest Laplacian eigenvalue " + std::to_string(evals(1)) +
                         " below 1e-10: graph numerically disconnected");
  }
  OntoDecomposition dec;
  dec.z.resize(n, n - 1);
  dec.z_dagger.resize(n - 1, n);
  for (Eigen::Index j = 1; j < n; ++j) {
    Eigen::VectorXd v = solver.eigenvectors().col(j);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(v(i)) > 1e-12) {
        if (v(i) < 0) v = -v;
        break;
      }
    }
    const double root = std::sqrt(evals(j));
    dec.z.col(j - 1) = root * v;
    dec.z_dagger.row(j - 1) = v.transpose() / root;
  }
  dec.method = FactorMethod::eigen;
  return dec;
}

inline OntoDecomposition factor_eigen(const AlgorithmicGraph& sub) {
  return factor_eigen(Eigen::MatrixXd(laplacian(sub).cast<double>()));
}

inline OntoDecomposition factor(const AlgorithmicGraph& sub, FactorMethod method) {
  switch (method) {
    case FactorMethod::tree_incidence: return factor_tree(sub);
    case FactorMethod::circulant: return factor_circulant(sub);
    case FactorMethod::complete_sparse:
      if (!is_kind(sub, GraphKind::complete)) throw ValidationError("complete_sparse factor requires a complete graph");
      return factor_complete_sparse(sub.n());
    case FactorMethod::eigen: return factor_eigen(sub);
  }
  throw ValidationError("unknown factor method");
}

/// Tree incidence, then the sparse complete factor, then circulant, then eigen.
inline FactorMethod default_factor_method(const AlgorithmicGraph& sub) {
  if (sub.is_tree()) return FactorMethod::tree_incidence;
  if (is_kind(sub, GraphKind::complete)) return FactorMethod::complete_sparse;
  if (is_circulant(laplacian(sub))) return FactorMethod::circulant;
  return FactorMethod::eigen;
}

inline OntoDecomposition default_factor(const AlgorithmicGraph& sub) {
  return factor(sub, default_factor_method(sub));
}

/// Unique solution of Z alpha = delta.
struct AlphaVector {
  Eigen::VectorXd alpha;
  double norm_sq = 0;
};

inline AlphaVector alpha(const OntoDecomposition& dec, const DegreeBalance& balance) {
  if (balance.delta.size() != dec.z.rows()) {
    throw ValidationError("degree balance has length " + std::to_string(balance.delta.size()) +
                          ", decomposition expects " + std::to_string(dec.z.rows()));
  }
  const Eigen::VectorXd delta = balance.delta.cast<double>();
  AlphaVector a;
  a.alpha = dec.z_dagger * delta;
  a.norm_sq = a.alpha.squaredNorm();
  const double residual = (dec.z * a.alpha - delta).norm();
  if (residual > 1e-8) {
    throw NumericalError("inconsistent alpha: ||Z alpha - delta|| = " + std::to_string(residual));
  }
  return a;
}

}  // namespace graphsplit
