#pragma once

#include <cassert>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "graphsplit/engine.hpp"
#include "graphsplit/error.hpp"
#include "graphsplit/factor.hpp"
#include "graphsplit/graph.hpp"
#include "graphsplit/subspace.hpp"

namespace graphsplit {

/// Orthonormal basis of the null space of `a` (columns in R^{a.cols()}).
inline Eigen::MatrixXd null_space(const Eigen::MatrixXd& a) {
  if (a.rows() == 0) return Eigen::MatrixXd::Identity(a.cols(), a.cols());
  return orthogonal_complement_basis(orthonormalize(a.transpose()));
}

/// U_1 ∩ ... ∩ U_m, as the complement of span(U_1^⊥ ∪ ... ∪ U_m^⊥).
inline LinearSubspace intersection(const std::vector<LinearSubspace>& subspaces) {
  if (subspaces.empty()) throw ValidationError("intersection of an empty family");
  const int d = subspaces.front().dim_ambient();
  std::vector<Eigen::MatrixXd> perps;
  Eigen::Index cols = 0;
  for (const auto& u : subspaces) {
    if (u.dim_ambient() != d) throw ValidationError("intersection: subspaces live in different ambient spaces");
    perps.push_back(u.complement().basis());
    cols += perps.back().cols();
  }
  Eigen::MatrixXd all(d, cols);
  Eigen::Index c = 0;
  for (const auto& p : perps) {
    all.middleCols(c, p.cols()) = p;
    c += p.cols();
  }
  return LinearSubspace::span(all).complement();
}

/// Orthonormal basis of E ⊂ (R^d)^{n-1}, columns flattened block-major.
struct EBasis {
  Eigen::MatrixXd basis;
  int blocks = 0;
  int d = 0;

  int dim() const { return static_cast<int>(basis.cols()); }

  Blocks project(const Blocks& v) const {
    const Eigen::VectorXd f = flatten(v);
    return unflatten(basis * (basis.transpose() * f), blocks, d);
  }
};

namespace detail {

// Z^+ applied to a = (B_1 c_1, ..., B_n c_n) over the null space of
// [B_1 ... B_n], i.e. Z^+(U^⊥ ∩ Δ_n^⊥) with U the product subspace.
inline EBasis e_from_dagger(const std::vector<LinearSubspace>& subspaces, const Eigen::MatrixXd& z_dagger) {
  const int n = static_cast<int>(subspaces.size());
  const int d = subspaces.front().dim_ambient();
  std::vector<Eigen::MatrixXd> perp;
  Eigen::Index total = 0;
  for (const auto& u : subspaces) {
    perp.push_back(u.complement().basis());
    total += perp.back().cols();
  }
  EBasis e{Eigen::MatrixXd((n - 1) * d, 0), n - 1, d};
  if (total == 0) return e;

  Eigen::MatrixXd stacked(d, total);
  Eigen::Index off = 0;
  for (const auto& b : perp) {
    stacked.middleCols(off, b.cols()) = b;
    off += b.cols();
  }
  const Eigen::MatrixXd coeffs = null_space(stacked);
  Eigen::MatrixXd images((n - 1) * d, coeffs.cols());
  for (Eigen::Index c = 0; c < coeffs.cols(); ++c) {
    Blocks a(n, d);
    off = 0;
    for (int i = 0; i < n; ++i) {
      a.row(i) = (perp[i] * coeffs.col(c).segment(off, perp[i].cols())).transpose();
      off += perp[i].cols();
    }
    images.col(c) = flatten(z_dagger * a);
  }
  e.basis = orthonormalize(images);
  return e;
}

// Basis of the product U_{first}^⊥ × ... (one factor per block), flattened.
inline Eigen::MatrixXd product_of_complements(const std::vector<LinearSubspace>& subspaces, int first, int count) {
  const int d = subspaces.front().dim_ambient();
  std::vector<Eigen::MatrixXd> perp;
  Eigen::Index cols = 0;
  for (int j = 0; j < count; ++j) {
    perp.push_back(subspaces[first + j].complement().basis());
    cols += perp.back().cols();
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(count * d, cols);
  Eigen::Index c = 0;
  for (int j = 0; j < count; ++j) {
    out.block(j * d, c, d, perp[j].cols()) = perp[j];
    c += perp[j].cols();
  }
  return out;
}

// Spanners of Δ_m^⊥ + (W in block `slot`, zero elsewhere), flattened.
inline Eigen::MatrixXd zero_sum_plus_slot(int m, int d, int slot, const Eigen::MatrixXd& w) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m * d, (m - 1) * d + w.cols());
  Eigen::Index c = 0;
  for (int j = 0; j + 1 < m; ++j) {
    for (int k = 0; k < d; ++k, ++c) {
      out(j * d + k, c) = 1.0;
      out((j + 1) * d + k, c) = -1.0;
    }
  }
  out.block(slot * d, c, d, w.cols()) = w;
  return out;
}

// Star-shaped closed form: (perp of the leaves) ∩ (Δ^⊥ + perp of the centre in `slot`).
inline EBasis e_star(const std::vector<LinearSubspace>& subspaces, int first_leaf, int centre, int slot) {
  const int n = static_cast<int>(subspaces.size());
  const int d = subspaces.front().dim_ambient();
  const int m = n - 1;
  const auto leaves = LinearSubspace::span(product_of_complements(subspaces, first_leaf, m));
  const auto sums =
      LinearSubspace::span(zero_sum_plus_slot(m, d, slot, subspaces[centre].complement().basis()));
  return {intersection({leaves, sums}).basis(), m, d};
}

}  // namespace detail

/// E = Z^+(U^⊥ ∩ Δ_n^⊥) for the given node subspaces and decomposition.
inline EBasis build_E(const std::vector<LinearSubspace>& subspaces, const OntoDecomposition& dec) {
  if (static_cast<Eigen::Index>(subspaces.size()) != dec.z.rows()) {
    throw ValidationError("build_E: one subspace per node required");
  }
  return detail::e_from_dagger(subspaces, dec.z_dagger);
}

struct LimitPrediction {
  Eigen::VectorXd u_bar;  // shadow limit, in U
  Blocks e_bar;           // component in E
  Blocks v_bar;           // alpha (x) u_bar + e_bar
};

/// A splitting problem whose every operator is the normal cone of a subspace,
/// with the derived quantities U = ∩ U_i, alpha and E.
class SubspaceProblem {
 public:
  /// Throws AnalysisError if some operator is not a subspace normal cone.
  explicit SubspaceProblem(SplittingProblem base)
      : base_(std::move(base)),
        subspaces_(collect_subspaces(base_)),
        intersection_(intersection(subspaces_)),
        delta_(degree_balance(base_.pair().g).delta.cast<double>()),
        alpha_(graphsplit::alpha(base_.dec(), degree_balance(base_.pair().g))),
        e_(build_E(subspaces_, base_.dec())) {}

  const SplittingProblem& base() const { return base_; }
  int n() const { return base_.n(); }
  int d() const { return base_.d(); }
  const std::vector<LinearSubspace>& subspaces() const { return subspaces_; }
  const LinearSubspace& intersection_space() const { return intersection_; }
  const Eigen::VectorXd& delta() const { return delta_; }
  const AlphaVector& alpha() const { return alpha_; }
  const EBasis& e() const { return e_; }

  /// P_U(alpha^+ v) = P_U(sum_j alpha_j v_j) / ||alpha||^2.
  Eigen::VectorXd shadow_of(const Blocks& v) const {
    const Eigen::VectorXd s = v.transpose() * alpha_.alpha;
    return intersection_.project(s) / alpha_.norm_sq;
  }

 private:
  static std::vector<LinearSubspace> collect_subspaces(const SplittingProblem& p) {
    std::vector<LinearSubspace> out;
    for (const auto& op : p.ops()) out.push_back(op.subspace());
    return out;
  }

  SplittingProblem base_;
  std::vector<LinearSubspace> subspaces_;
  LinearSubspace intersection_;
  Eigen::VectorXd delta_;
  AlphaVector alpha_;
  EBasis e_;
};

inline EBasis build_E(const SubspaceProblem& sp) { return sp.e(); }

/// E assembled from the per-graph closed form for the named subgraph kind.
inline EBasis closed_form_E(GraphKind kind, const SubspaceProblem& sp) {
  const auto& sub = sp.base().pair().sub;
  const auto method = sp.base().dec().method;
  const FactorMethod expected = kind == GraphKind::complete ? FactorMethod::complete_sparse
                                : kind == GraphKind::ring   ? FactorMethod::circulant
                                                            : FactorMethod::tree_incidence;
  if (!is_kind(sub, kind) || method != expected) {
    throw ValidationError("closed_form_E: subgraph/decomposition do not match '" + std::string(to_string(kind)) +
                          "' (decomposition is " + std::string(to_string(method)) + ")");
  }
  const auto& us = sp.subspaces();
  const int n = sp.n();
  const int d = sp.d();
  const int m = n - 1;

  switch (kind) {
    case GraphKind::sequential: {
      // e_1 ∈ U_1^⊥, e_j - e_{j-1} ∈ U_j^⊥, -e_{n-1} ∈ U_n^⊥, as Q_i^T(...) = 0.
      Eigen::Index rows = 0;
      for (const auto& u : us) rows += u.dim();
      Eigen::MatrixXd c = Eigen::MatrixXd::Zero(rows, m * d);
      Eigen::Index r = 0;
      for (int i = 0; i < n; ++i) {
        const Eigen::MatrixXd qt = us[i].basis().transpose();
        if (i < m) c.block(r, i * d, qt.rows(), d) += qt;
        if (i > 0) c.block(r, (i - 1) * d, qt.rows(), d) -= qt;
        r += qt.rows();
      }
      return {null_space(c), m, d};
    }
    case GraphKind::parallel_up:
      // (U_2^⊥ × ... × U_n^⊥) ∩ (Δ^⊥ + (U_1^⊥ × {0}))
      return detail::e_star(us, 1, 0, 0);
    case GraphKind::parallel_down:
      // (U_1^⊥ × ... × U_{n-1}^⊥) ∩ (Δ^⊥ + ({0} × U_n^⊥))
      return detail::e_star(us, 0, n - 1, m - 1);
    case GraphKind::complete: {
      // e_j = t_j((n-j+1) u_j + sum_{k<j} u_k), u_j ∈ U_j^⊥, sum_j u_j ∈ U_n^⊥.
      std::vector<Eigen::MatrixXd> perp;
      Eigen::Index total = 0;
      for (int j = 0; j < m; ++j) {
        perp.push_back(us[j].complement().basis());
        total += perp.back().cols();
      }
      EBasis e{Eigen::MatrixXd(m * d, 0), m, d};
      if (total == 0) return e;
      const Eigen::MatrixXd qt = us[n - 1].basis().transpose();
      Eigen::MatrixXd constraint(qt.rows(), total);
      Eigen::Index off = 0;
      for (const auto& b : perp) {
        constraint.middleCols(off, b.cols()) = qt * b;
        off += b.cols();
      }
      const Eigen::MatrixXd coeffs = null_space(constraint);
      Eigen::MatrixXd images(m * d, coeffs.cols());
      for (Eigen::Index c = 0; c < coeffs.cols(); ++c) {
        Blocks u(m, d);
        off = 0;
        for (int j = 0; j < m; ++j) {
          u.row(j) = (perp[j] * coeffs.col(c).segment(off, perp[j].cols())).transpose();
          off += perp[j].cols();
        }
        Blocks ev(m, d);
        Eigen::RowVectorXd prefix = Eigen::RowVectorXd::Zero(d);
        for (int j = 1; j <= m; ++j) {
          ev.row(j - 1) = complete_weight(n, j) * (double(n - j + 1) * u.row(j - 1) + prefix);
          prefix += u.row(j - 1);
        }
        images.col(c) = flatten(ev);
      }
      e.basis = orthonormalize(images);
      return e;
    }
    case GraphKind::ring: {
      // Z^+_{j,i} = sin(2π(i-1)j/n + π/4) / (sqrt(2n) sin(πj/n)).
      Eigen::MatrixXd zd(m, n);
      for (int j = 1; j <= m; ++j)
        for (int i = 1; i <= n; ++i)
          zd(j - 1, i - 1) = std::sin(2.0 * std::numbers::pi * (i - 1) * j / n + std::numbers::pi / 4) /
                             (std::sqrt(2.0 * n) * std::sin(std::numbers::pi * j / n));
      return detail::e_from_dagger(us, zd);
    }
  }
  throw ValidationError("closed_form_E: unsupported graph kind");
}

inline Blocks project_E(const SubspaceProblem& sp, const Blocks& v) {
  sp.base().check_blocks(v, sp.n() - 1, "v");
  return sp.e().project(v);
}

/// alpha (x) P_U(alpha^+ v) + P_E(v).
inline Blocks proj_fix_T_tilde(const SubspaceProblem& sp, const Blocks& v) {
  sp.base().check_blocks(v, sp.n() - 1, "v");
  const Eigen::VectorXd u = sp.shadow_of(v);
  return sp.alpha().alpha * u.transpose() + sp.e().project(v);
}

/// Limits of the reduced iteration started at v0 with constant theta in (0, 2).
inline LimitPrediction predict_limits_alg2(const SubspaceProblem& sp, const Blocks& v0) {
  sp.base().check_blocks(v0, sp.n() - 1, "v0");
  LimitPrediction out;
  out.u_bar = sp.shadow_of(v0);
  out.e_bar = sp.e().project(v0);
  out.v_bar = sp.alpha().alpha * out.u_bar.transpose() + out.e_bar;
  return out;
}

/// Limits of the lifted iteration started at (w0, v0) with constant theta in
/// (0, 2); every shadow and w block tends to u_bar.
inline LimitPrediction predict_limits_alg1(const SubspaceProblem& sp, const Blocks& w0, const Blocks& v0) {
  sp.base().check_blocks(w0, sp.n(), "w0");
  sp.base().check_blocks(v0, sp.n() - 1, "v0");
  const Eigen::VectorXd s = w0.transpose() * sp.delta() + v0.transpose() * sp.alpha().alpha;
  LimitPrediction out;
  out.u_bar = sp.intersection_space().project(s) / sp.alpha().norm_sq;
  const Blocks y = sp.base().z().transpose() * w0 + v0;
  assert((sp.shadow_of(y) - out.u_bar).norm() <= 1e-9 * std::max(1.0, out.u_bar.norm()));
  out.e_bar = sp.e().project(y);
  out.v_bar = sp.alpha().alpha * out.u_bar.transpose() + out.e_bar;
  return out;
}

struct LiftedPoint {
  Blocks w;  // n blocks
  Blocks v;  // n-1 blocks
};

/// M-projection of (w, v) onto Fix T.
inline LiftedPoint m_proj_fix_T(const SubspaceProblem& sp, const Blocks& w, const Blocks& v) {
  sp.base().check_blocks(w, sp.n(), "w");
  sp.base().check_blocks(v, sp.n() - 1, "v");
  const Blocks y = sp.base().z().transpose() * w + v;
  const Eigen::VectorXd u = sp.shadow_of(y);
  LiftedPoint out;
  out.w = Eigen::VectorXd::Ones(sp.n()) * u.transpose();
  out.v = sp.alpha().alpha * u.transpose() + sp.e().project(y);
  return out;
}

/// x_v = J_{A_1/d_1}((Z v)_1 / d_1); the solution associated with v ∈ Fix T~.
inline Eigen::VectorXd x_from_v(const SplittingProblem& p, const Blocks& v) {
  p.check_blocks(v, p.n() - 1, "v");
  const double d1 = p.degree()(0);
  const Eigen::VectorXd zv1 = (p.z().row(0) * v).transpose();
  return p.ops()[0](zv1 / d1, 1.0 / d1);
}

inline Eigen::VectorXd x_from_v(const SubspaceProblem& sp, const Blocks& v) { return x_from_v(sp.base(), v); }

/// Orthonormal basis of Fix T~ = (alpha (x) U) ⊕ E, flattened block-major.
inline Eigen::MatrixXd assemble_fix_basis(const SubspaceProblem& sp) {
  const int m = sp.n() - 1;
  const auto& ub = sp.intersection_space().basis();
  Eigen::MatrixXd cols(m * sp.d(), ub.cols() + sp.e().dim());
  for (Eigen::Index c = 0; c < ub.cols(); ++c)
    cols.col(c) = flatten(sp.alpha().alpha * ub.col(c).transpose());
  cols.rightCols(sp.e().dim()) = sp.e().basis;
  return orthonormalize(cols);
}

}  // namespace graphsplit
