#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "graphsplit/error.hpp"

namespace graphsplit {

/// Directed edge between 0-based nodes, always with `from < to`.
struct Edge {
  int from = 0;
  int to = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Connected graph on nodes {0..n-1} whose edges point from lower to higher
/// index. User-facing I/O is 1-based; storage is 0-based and lexicographic.
class AlgorithmicGraph {
 public:
  /// Validates and builds a graph from 1-based `(i, j)` pairs.
  static AlgorithmicGraph from_one_based(int n, const std::vector<std::pair<int, int>>& edges) {
    if (n < 2) {
      throw ValidationError("algorithmic graph requires n >= 2, got n = " + std::to_string(n));
    }
    std::vector<Edge> stored;
    stored.reserve(edges.size());
    for (const auto& [i, j] : edges) {
      if (i < 1 || i > n || j < 1 || j > n) {
        throw ValidationError("edge (" + std::to_string(i) + "," + std::to_string(j) +
                              ") has a node outside [1," + std::to_string(n) + "]");
      }
      if (i >= j) {
        throw ValidationError("edge (" + std::to_string(i) + "," + std::to_string(j) +
                              ") violates orientation i < j");
      }
      stored.push_back({i - 1, j - 1});
    }
    std::sort(stored.begin(), stored.end());
    stored.erase(std::unique(stored.begin(), stored.end()), stored.end());

    AlgorithmicGraph g(n, std::move(stored));
    if (!g.connected()) {
      throw ValidationError("graph is disconnected");
    }
    return g;
  }

  int n() const noexcept { return n_; }
  int num_edges() const noexcept { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  std::vector<std::pair<int, int>> edges_one_based() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(edges_.size());
    for (const auto& e : edges_) out.emplace_back(e.from + 1, e.to + 1);
    return out;
  }

  bool has_edge(int from, int to) const {
    return std::binary_search(edges_.begin(), edges_.end(), Edge{from, to});
  }

  bool is_tree() const noexcept { return num_edges() == n_ - 1; }

  /// 0-based predecessors h of node i, i.e. edges (h, i).
  std::vector<int> predecessors(int i) const {
    std::vector<int> out;
    for (const auto& e : edges_)
      if (e.to == i) out.push_back(e.from);
    return out;
  }

  /// 0-based neighbours of node i in either direction.
  std::vector<int> neighbours(int i) const {
    std::vector<int> out;
    for (const auto& e : edges_) {
      if (e.to == i) out.push_back(e.from);
      if (e.from == i) out.push_back(e.to);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  friend bool operator==(const AlgorithmicGraph&, const AlgorithmicGraph&) = default;

 private:
  AlgorithmicGraph(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {}

  bool connected() const {
    std::vector<int> parent(static_cast<std::size_t>(n_));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    int components = n_;
    for (const auto& e : edges_) {
      const int a = find(e.from);
      const int b = find(e.to);
      if (a != b) {
        parent[a] = b;
        --components;
      }
    }
    return components == 1;
  }

  int n_;
  std::vector<Edge> edges_;
};

inline AlgorithmicGraph new_graph(int n, const std::vector<std::pair<int, int>>& edges) {
  return AlgorithmicGraph::from_one_based(n, edges);
}

enum class GraphKind { complete, sequential, ring, parallel_up, parallel_down };

inline std::string_view to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::complete: return "complete";
    case GraphKind::sequential: return "sequential";
    case GraphKind::ring: return "ring";
    case GraphKind::parallel_up: return "parallel_up";
    case GraphKind::parallel_down: return "parallel_down";
  }
  return "?";
}

inline GraphKind graph_kind_from_string(std::string_view name) {
  for (auto k : {GraphKind::complete, GraphKind::sequential, GraphKind::ring, GraphKind::parallel_up,
                 GraphKind::parallel_down}) {
    if (to_string(k) == name) return k;
  }
  throw ValidationError("unknown graph kind '" + std::string(name) + "'");
}

inline AlgorithmicGraph named_graph(GraphKind kind, int n) {
  if (n < 2) throw ValidationError("named graph requires n >= 2, got n = " + std::to_string(n));
  std::vector<std::pair<int, int>> edges;
  switch (kind) {
    case GraphKind::complete:
      for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) edges.emplace_back(i, j);
      break;
    case GraphKind::ring:
      if (n < 3) throw ValidationError("ring graph requires n >= 3, got n = " + std::to_string(n));
      edges.emplace_back(1, n);
      [[fallthrough]];
    case GraphKind::sequential:
      for (int i = 1; i < n; ++i) edges.emplace_back(i, i + 1);
      break;
    case GraphKind::parallel_up:
      for (int j = 2; j <= n; ++j) edges.emplace_back(1, j);
      break;
    case GraphKind::parallel_down:
      for (int i = 1; i < n; ++i) edges.emplace_back(i, n);
      break;
  }
  return new_graph(n, edges);
}

inline AlgorithmicGraph named_graph(std::string_view kind, int n) {
  return named_graph(graph_kind_from_string(kind), n);
}

/// True when `g` is exactly the named graph of its order.
inline bool is_kind(const AlgorithmicGraph& g, GraphKind kind) {
  if (kind == GraphKind::ring && g.n() < 3) return false;
  return g == named_graph(kind, g.n());
}

struct Degrees {
  Eigen::VectorXi in;
  Eigen::VectorXi out;
  Eigen::VectorXi total;
};

inline Degrees degrees(const AlgorithmicGraph& g) {
  Degrees d{Eigen::VectorXi::Zero(g.n()), Eigen::VectorXi::Zero(g.n()), Eigen::VectorXi::Zero(g.n())};
  for (const auto& e : g.edges()) {
    ++d.out(e.from);
    ++d.in(e.to);
  }
  d.total = d.in + d.out;
  return d;
}

/// Out-degree minus in-degree per node; sums to zero, positive at the first
/// node and negative at the last.
struct DegreeBalance {
  Eigen::VectorXi delta;
};

inline DegreeBalance degree_balance(const AlgorithmicGraph& g) {
  const auto d = degrees(g);
  return {d.out - d.in};
}

/// n x |E| matrix, column e has +1 at the tail and -1 at the head of edge e.
inline Eigen::MatrixXi incidence(const AlgorithmicGraph& g) {
  Eigen::MatrixXi inc = Eigen::MatrixXi::Zero(g.n(), g.num_edges());
  for (int e = 0; e < g.num_edges(); ++e) {
    inc(g.edges()[e].from, e) = 1;
    inc(g.edges()[e].to, e) = -1;
  }
  return inc;
}

inline Eigen::MatrixXi laplacian(const AlgorithmicGraph& g) {
  Eigen::MatrixXi lap = Eigen::MatrixXi::Zero(g.n(), g.n());
  for (const auto& e : g.edges()) {
    ++lap(e.from, e.from);
    ++lap(e.to, e.to);
    lap(e.from, e.to) = -1;
    lap(e.to, e.from) = -1;
  }
  return lap;
}

/// Diagonal degrees, -2 at (i, j) whenever (j, i) is an edge.
inline Eigen::MatrixXi p_matrix(const AlgorithmicGraph& g) {
  const auto d = degrees(g);
  Eigen::MatrixXi p = d.total.asDiagonal();
  for (const auto& e : g.edges()) p(e.to, e.from) = -2;
  return p;
}

/// Graph G together with a connected spanning subgraph G'.
struct GraphPair {
  AlgorithmicGraph g;
  AlgorithmicGraph sub;
};

inline GraphPair validate_pair(const AlgorithmicGraph& g, const AlgorithmicGraph& sub) {
  if (g.n() != sub.n()) {
    throw ValidationError("graph and subgraph orders differ (" + std::to_string(g.n()) + " vs " +
                          std::to_string(sub.n()) + ")");
  }
  for (const auto& e : sub.edges()) {
    if (!g.has_edge(e.from, e.to)) {
      throw ValidationError("not a subgraph: edge (" + std::to_string(e.from + 1) + "," +
                            std::to_string(e.to + 1) + ") is missing from the graph");
    }
  }
  // Connectivity of `sub` is an invariant of AlgorithmicGraph.
  return {g, sub};
}

}  // namespace graphsplit
