#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "graphsplit/error.hpp"

namespace graphsplit {

/// Drop tolerance shared by every basis computation in the library.
inline constexpr double kDropTolerance = 1e-10;

/// Orthonormal basis of the span of the columns of `spanners`, by Gram-Schmidt
/// applied twice per column. A column is dropped when its residual norm is at
/// most `tol` times its input norm.
inline Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& spanners, double tol = kDropTolerance) {
  const Eigen::Index d = spanners.rows();
  Eigen::MatrixXd basis(d, std::min(d, spanners.cols()));
  Eigen::Index r = 0;
  for (Eigen::Index c = 0; c < spanners.cols() && r < d; ++c) {
    Eigen::VectorXd v = spanners.col(c);
    const double input_norm = v.norm();
    if (input_norm == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index k = 0; k < r; ++k) v -= basis.col(k).dot(v) * basis.col(k);
    }
    const double residual = v.norm();
    if (residual <= tol * input_norm) continue;
    basis.col(r++) = v / residual;
  }
  return basis.leftCols(r);
}

/// Extends an orthonormal set `q` (d x r) to R^d and returns only the new columns.
inline Eigen::MatrixXd orthogonal_complement_basis(const Eigen::MatrixXd& q) {
  const Eigen::Index d = q.rows();
  Eigen::MatrixXd all(d, q.cols() + d);
  all << q, Eigen::MatrixXd::Identity(d, d);
  const Eigen::MatrixXd full = orthonormalize(all);
  return full.rightCols(full.cols() - q.cols());
}

/// Linear subspace of R^d stored by an orthonormal basis (d x r, r may be 0).
class LinearSubspace {
 public:
  static LinearSubspace zero(int d) { return LinearSubspace(Eigen::MatrixXd(d, 0)); }
  static LinearSubspace full(int d) { return LinearSubspace(Eigen::MatrixXd::Identity(d, d)); }

  /// Span of the columns of `spanners` (d x k).
  static LinearSubspace span(const Eigen::MatrixXd& spanners) {
    return LinearSubspace(orthonormalize(spanners));
  }

  /// Caller guarantees orthonormal columns.
  static LinearSubspace from_orthonormal(Eigen::MatrixXd basis) { return LinearSubspace(std::move(basis)); }

  int dim_ambient() const { return static_cast<int>(basis_.rows()); }
  int dim() const { return static_cast<int>(basis_.cols()); }
  const Eigen::MatrixXd& basis() const { return basis_; }

  Eigen::MatrixXd projector() const { return basis_ * basis_.transpose(); }

  Eigen::VectorXd project(const Eigen::VectorXd& x) const {
    check_dim(x.size());
    return basis_ * (basis_.transpose() * x);
  }

  LinearSubspace complement() const { return LinearSubspace(orthogonal_complement_basis(basis_)); }

  void check_dim(Eigen::Index size) const {
    if (size != basis_.rows()) {
      throw ValidationError("dimension mismatch: vector of size " + std::to_string(size) + " for subspace of R^" +
                            std::to_string(basis_.rows()));
    }
  }

 private:
  explicit LinearSubspace(Eigen::MatrixXd basis) : basis_(std::move(basis)) {}

  Eigen::MatrixXd basis_;
};

inline LinearSubspace subspace_from_spanners(int d, const std::vector<Eigen::VectorXd>& spanners) {
  if (d < 1) throw ValidationError("ambient dimension must be positive");
  Eigen::MatrixXd cols(d, static_cast<Eigen::Index>(spanners.size()));
  for (std::size_t k = 0; k < spanners.size(); ++k) {
    if (spanners[k].size() != d) {
      throw ValidationError("dimension mismatch: spanner " + std::to_string(k) + " has size " +
                            std::to_string(spanners[k].size()) + ", expected " + std::to_string(d));
    }
    cols.col(static_cast<Eigen::Index>(k)) = spanners[k];
  }
  return LinearSubspace::span(cols);
}

inline LinearSubspace complement(const LinearSubspace& u) { return u.complement(); }

inline Eigen::VectorXd project(const LinearSubspace& u, const Eigen::VectorXd& x) { return u.project(x); }

/// Resolvent J_{gamma A} of a maximally monotone operator A on R^d. Either the
/// normal cone of a linear subspace (resolvent = projection, for every gamma)
/// or a user callback, which must be a pure function of its arguments.
class Resolvent {
 public:
  using Callback = std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)>;

  static Resolvent normal_cone(LinearSubspace u) { return Resolvent(std::move(u)); }

  static Resolvent callback(int d, Callback fn, std::string name = "callback") {
    if (d < 1) throw ValidationError("ambient dimension must be positive");
    if (!fn) throw ValidationError("empty resolvent callback");
    return Resolvent(CallbackOp{d, std::move(fn), std::move(name)});
  }

  int dim() const {
    if (const auto* u = std::get_if<LinearSubspace>(&op_)) return u->dim_ambient();
    return std::get<CallbackOp>(op_).d;
  }

  bool is_normal_cone() const { return std::holds_alternative<LinearSubspace>(op_); }

  /// The subspace U of a normal-cone operator; throws AnalysisError otherwise.
  const LinearSubspace& subspace() const {
    if (const auto* u = std::get_if<LinearSubspace>(&op_)) return *u;
    throw AnalysisError("analysis requires subspace operators ('" + std::get<CallbackOp>(op_).name +
                        "' is a callback)");
  }

  std::string name() const {
    if (is_normal_cone()) return "normal_cone";
    return std::get<CallbackOp>(op_).name;
  }

  Eigen::VectorXd operator()(const Eigen::VectorXd& x, double gamma) const {
    if (!(gamma > 0)) throw ValidationError("resolvent scale must be positive");
    if (const auto* u = std::get_if<LinearSubspace>(&op_)) return u->project(x);
    const auto& cb = std::get<CallbackOp>(op_);
    if (x.size() != cb.d) {
      throw ValidationError("dimension mismatch: resolvent input of size " + std::to_string(x.size()) +
                            ", expected " + std::to_string(cb.d));
    }
    Eigen::VectorXd y = cb.fn(x, gamma);
    if (y.size() != cb.d) {
      throw ValidationError("resolvent callback '" + cb.name + "' returned size " + std::to_string(y.size()) +
                            ", expected " + std::to_string(cb.d));
    }
#ifndef NDEBUG
    // Firm nonexpansiveness against the anchor point 0.
    const Eigen::VectorXd y0 = cb.fn(Eigen::VectorXd::Zero(cb.d), gamma);
    const Eigen::VectorXd dy = y - y0;
    const double slack = dy.squaredNorm() - x.dot(dy);
    if (slack > 1e-10 * std::max(1.0, x.squaredNorm())) {
      throw ValidationError("resolvent callback '" + cb.name + "' is not firmly nonexpansive");
    }
#endif
    return y;
  }

 private:
  struct CallbackOp {
    int d;
    Callback fn;
    std::string name;
  };

  explicit Resolvent(LinearSubspace u) : op_(std::move(u)) {}
  explicit Resolvent(CallbackOp cb) : op_(std::move(cb)) {}

  std::variant<LinearSubspace, CallbackOp> op_;
};

inline Eigen::VectorXd resolvent(const Resolvent& op, const Eigen::VectorXd& x, double gamma) {
  return op(x, gamma);
}

/// ||J x - J y||^2 - <x - y, J x - J y>; nonpositive for a firmly nonexpansive map.
inline double firm_nonexpansiveness_slack(const Resolvent& op, const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                          double gamma) {
  const Eigen::VectorXd dj = op(x, gamma) - op(y, gamma);
  return dj.squaredNorm() - (x - y).dot(dj);
}

}  // namespace graphsplit
