#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "graphsplit/error.hpp"
#include "graphsplit/factor.hpp"
#include "graphsplit/graph.hpp"
#include "graphsplit/subspace.hpp"

namespace graphsplit {

/// Element of (R^d)^m stored as an m x d matrix: row i is block i. A Kronecker
/// action (K (x) Id) is then the plain product K * blocks.
using Blocks = Eigen::MatrixXd;

/// Block-major flattening (block index outer, coordinate inner).
inline Eigen::VectorXd flatten(const Blocks& b) {
  Eigen::VectorXd out(b.size());
  for (Eigen::Index i = 0; i < b.rows(); ++i) out.segment(i * b.cols(), b.cols()) = b.row(i).transpose();
  return out;
}

inline Blocks unflatten(const Eigen::VectorXd& flat, Eigen::Index blocks, Eigen::Index d) {
  if (flat.size() != blocks * d) throw ValidationError("flattened vector has the wrong length");
  Blocks out(blocks, d);
  for (Eigen::Index i = 0; i < blocks; ++i) out.row(i) = flat.segment(i * d, d).transpose();
  return out;
}

/// Graph pair, onto decomposition of Lap(G') and one resolvent per node.
class SplittingProblem {
 public:
  SplittingProblem(GraphPair pair, OntoDecomposition dec, std::vector<Resolvent> ops, int d)
      : pair_(std::move(pair)), dec_(std::move(dec)), ops_(std::move(ops)), d_(d) {
    const int n = pair_.g.n();
    if (d_ < 1) throw ValidationError("ambient dimension must be positive");
    if (static_cast<int>(ops_.size()) != n) {
      throw ValidationError("expected " + std::to_string(n) + " operators, got " + std::to_string(ops_.size()));
    }
    for (int i = 0; i < n; ++i) {
      if (ops_[i].dim() != d_) {
        throw ValidationError("operator " + std::to_string(i + 1) + " acts on R^" + std::to_string(ops_[i].dim()) +
                              ", expected R^" + std::to_string(d_));
      }
    }
    if (dec_.z.rows() != n || dec_.z.cols() != n - 1 || dec_.z_dagger.rows() != n - 1 || dec_.z_dagger.cols() != n) {
      throw ValidationError("decomposition has the wrong shape for n = " + std::to_string(n));
    }
    const double mismatch = residuals(dec_, laplacian(pair_.sub)).product;
    if (mismatch > 1e-10) {
      throw ValidationError("decomposition does not factor Lap(G'): residual " + std::to_string(mismatch));
    }
    degree_ = degrees(pair_.g).total.cast<double>();
    sub_degree_ = degrees(pair_.sub).total.cast<double>();
    predecessors_.resize(n);
    sub_neighbours_.resize(n);
    for (int i = 0; i < n; ++i) {
      predecessors_[i] = pair_.g.predecessors(i);
      sub_neighbours_[i] = pair_.sub.neighbours(i);
    }
  }

  int n() const { return pair_.g.n(); }
  int d() const { return d_; }
  const GraphPair& pair() const { return pair_; }
  const OntoDecomposition& dec() const { return dec_; }
  const Eigen::MatrixXd& z() const { return dec_.z; }
  const std::vector<Resolvent>& ops() const { return ops_; }
  const Eigen::VectorXd& degree() const { return degree_; }
  const Eigen::VectorXd& sub_degree() const { return sub_degree_; }
  const std::vector<int>& predecessors(int i) const { return predecessors_[i]; }
  const std::vector<int>& sub_neighbours(int i) const { return sub_neighbours_[i]; }

  void check_blocks(const Blocks& b, Eigen::Index count, std::string_view what) const {
    if (b.rows() != count || b.cols() != d_) {
      throw ValidationError(std::string(what) + " must be " + std::to_string(count) + " x " + std::to_string(d_) +
                            ", got " + std::to_string(b.rows()) + " x " + std::to_string(b.cols()));
    }
  }

 private:
  GraphPair pair_;
  OntoDecomposition dec_;
  std::vector<Resolvent> ops_;
  int d_;
  Eigen::VectorXd degree_;
  Eigen::VectorXd sub_degree_;
  std::vector<std::vector<int>> predecessors_;
  std::vector<std::vector<int>> sub_neighbours_;
};

namespace detail {

// Forward sweep x_i = J_{A_i / d_i}((base_i + 2 sum_{(h,i) in E} x_h) / d_i).
// Order matters: every predecessor h of i satisfies h < i.
inline Blocks forward_sweep(const SplittingProblem& p, const Blocks& base) {
  Blocks x(p.n(), p.d());
  for (int i = 0; i < p.n(); ++i) {
    Eigen::VectorXd arg = base.row(i).transpose();
    for (int h : p.predecessors(i)) arg += 2.0 * x.row(h).transpose();
    const double di = p.degree()(i);
    try {
      x.row(i) = p.ops()[i](arg / di, 1.0 / di).transpose();
    } catch (const Error& e) {
      throw ValidationError("resolvent of node " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return x;
}

}  // namespace detail

struct ResolventSolve {
  Blocks x;  // n blocks
  Blocks y;  // n-1 blocks
};

/// (M + A)^{-1}(w, v).
inline ResolventSolve solve_m_plus_a(const SplittingProblem& p, const Blocks& w, const Blocks& v) {
  p.check_blocks(w, p.n(), "w");
  p.check_blocks(v, p.n() - 1, "v");
  ResolventSolve out;
  out.x = detail::forward_sweep(p, w);
  out.y = v - 2.0 * p.z().transpose() * out.x;
  return out;
}

/// Shadow blocks x and new governing state of one application of an operator.
struct OperatorStep {
  Blocks x;
  Blocks v_new;
};

/// T(w, v) = (x, v + Z^T(w - 2x)) where x is swept node by node.
inline OperatorStep apply_T(const SplittingProblem& p, const Blocks& w, const Blocks& v) {
  p.check_blocks(w, p.n(), "w");
  p.check_blocks(v, p.n() - 1, "v");
  const Blocks zv = p.z() * v;
  Blocks base(p.n(), p.d());
  for (int i = 0; i < p.n(); ++i) {
    Eigen::RowVectorXd row = p.sub_degree()(i) * w.row(i) + zv.row(i);
    for (int h : p.sub_neighbours(i)) row -= w.row(h);
    base.row(i) = row;
  }
  OperatorStep out;
  out.x = detail::forward_sweep(p, base);
  out.v_new = v + p.z().transpose() * (w - 2.0 * out.x);
  return out;
}

/// Reduced operator: T~(v) = v - Z^T x.
inline OperatorStep apply_T_tilde(const SplittingProblem& p, const Blocks& v) {
  p.check_blocks(v, p.n() - 1, "v");
  OperatorStep out;
  out.x = detail::forward_sweep(p, p.z() * v);
  out.v_new = v - p.z().transpose() * out.x;
  return out;
}

/// Relaxation parameters theta_k in [0, 2]: a constant, or a list whose last
/// entry is held once the list is exhausted.
class RelaxationSchedule {
 public:
  static RelaxationSchedule constant(double theta) { return RelaxationSchedule({theta}, true); }

  static RelaxationSchedule list(std::vector<double> thetas) {
    if (thetas.empty()) throw ValidationError("relaxation schedule must not be empty");
    return RelaxationSchedule(std::move(thetas), false);
  }

  double at(std::size_t k) const { return values_[std::min(k, values_.size() - 1)]; }
  bool is_constant() const { return constant_; }
  const std::vector<double>& values() const { return values_; }

  /// Constant theta strictly inside (0, 2): the regime with guaranteed strong
  /// convergence for subspace problems.
  bool admits_prediction() const { return constant_ && values_[0] > 0 && values_[0] < 2; }

 private:
  RelaxationSchedule(std::vector<double> values, bool constant) : values_(std::move(values)), constant_(constant) {
    for (double t : values_) {
      if (!(t >= 0 && t <= 2)) throw ValidationError("relaxation parameter " + std::to_string(t) + " outside [0,2]");
    }
  }

  std::vector<double> values_;
  bool constant_;
};

struct StopRule {
  double tol = 1e-10;
  std::size_t max_iters = 100000;
  /// Keep every `record_stride`-th iterate in the trace; the last one is always kept.
  std::size_t record_stride = 1;
};

enum class StopReason { converged, max_iterations };

inline std::string_view to_string(StopReason r) {
  return r == StopReason::converged ? "converged" : "max_iterations";
}

struct TraceRecord {
  std::size_t k = 0;
  Blocks x;
  std::optional<Blocks> w;
  Blocks v;
  double residual = 0;
};

/// Iterates of a run. `residual` is the norm of the unrelaxed fixed-point step.
struct Trace {
  std::vector<TraceRecord> iterations;
  bool converged = false;
  StopReason stop_reason = StopReason::max_iterations;

  const TraceRecord& last() const { return iterations.back(); }
};

namespace detail {

inline void guard_finite(const Blocks& b, std::size_t k, std::string_view what) {
  if (!b.allFinite()) throw DivergenceError(k, "non-finite " + std::string(what));
}

}  // namespace detail

/// Relaxed iteration of T on the lifted state (w, v). Record k holds the
/// state after k updates together with the shadow and residual of the step
/// evaluated there. At least one update is made; the run stops at the first
/// k >= 1 whose relaxed step is below tolerance, or at k = max_iters.
inline Trace run_alg1(const SplittingProblem& p, const Blocks& w0, const Blocks& v0,
                      const RelaxationSchedule& theta, const StopRule& stop = {}) {
  p.check_blocks(w0, p.n(), "w0");
  p.check_blocks(v0, p.n() - 1, "v0");
  if (stop.max_iters == 0) throw ValidationError("max_iters must be positive");
  Trace trace;
  Blocks w = w0;
  Blocks v = v0;
  const std::size_t stride = std::max<std::size_t>(1, stop.record_stride);
  for (std::size_t k = 0;; ++k) {
    const double t = theta.at(k);
    const OperatorStep step = apply_T(p, w, v);
    detail::guard_finite(step.x, k, "shadow iterate");
    // The v-update reads w^k, so w is overwritten only afterwards.
    const Blocks dv = p.z().transpose() * (w - 2.0 * step.x);
    const Blocks dw = step.x - w;
    const double state_norm = std::sqrt(w.squaredNorm() + v.squaredNorm());
    const double residual = std::sqrt(dw.squaredNorm() + dv.squaredNorm());

    const bool done = k >= 1 && t > 0 && t * residual <= stop.tol * std::max(1.0, state_norm);
    const bool last = done || k == stop.max_iters;
    if (k % stride == 0 || last) trace.iterations.push_back({k, step.x, w, v, residual});
    if (done) {
      trace.converged = true;
      trace.stop_reason = StopReason::converged;
    }
    if (last) break;
    w += t * dw;
    v += t * dv;
    detail::guard_finite(w, k + 1, "governing iterate w");
    detail::guard_finite(v, k + 1, "governing iterate v");
  }
  return trace;
}

/// Relaxed iteration of the reduced operator T~ on v alone; records as in run_alg1.
inline Trace run_alg2(const SplittingProblem& p, const Blocks& v0, const RelaxationSchedule& theta,
                      const StopRule& stop = {}) {
  p.check_blocks(v0, p.n() - 1, "v0");
  if (stop.max_iters == 0) throw ValidationError("max_iters must be positive");
  Trace trace;
  Blocks v = v0;
  const std::size_t stride = std::max<std::size_t>(1, stop.record_stride);
  for (std::size_t k = 0;; ++k) {
    const double t = theta.at(k);
    const OperatorStep step = apply_T_tilde(p, v);
    detail::guard_finite(step.x, k, "shadow iterate");
    const Blocks dv = -(p.z().transpose() * step.x);
    const double residual = dv.norm();

    const bool done = k >= 1 && t > 0 && t * residual <= stop.tol * std::max(1.0, v.norm());
    const bool last = done || k == stop.max_iters;
    if (k % stride == 0 || last) trace.iterations.push_back({k, step.x, std::nullopt, v, residual});
    if (done) {
      trace.converged = true;
      trace.stop_reason = StopReason::converged;
    }
    if (last) break;
    v += t * dv;
    detail::guard_finite(v, k + 1, "governing iterate v");
  }
  return trace;
}

}  // namespace graphsplit
