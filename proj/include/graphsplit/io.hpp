#pragma once

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "graphsplit/engine.hpp"
#include "graphsplit/error.hpp"
#include "graphsplit/graph.hpp"
#include "graphsplit/subspace.hpp"

namespace graphsplit::io {

using json = nlohmann::json;

/// Shortest-form-free decimal with 17 significant digits: lossless for doubles.
inline std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

inline void write_json(std::ostream& os, const json& j, int indent, int depth) {
  const auto pad = [&](int level) {
    if (indent >= 0) os << '\n' << std::string(static_cast<std::size_t>(indent * level), ' ');
  };
  // Arrays of scalars stay on one line.
  const auto flat = [](const json& a) {
    for (const auto& e : a)
      if (e.is_structured()) return false;
    return true;
  };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ',';
        first = false;
        pad(depth + 1);
        os << json(it.key()).dump() << (indent >= 0 ? ": " : ":");
        write_json(os, it.value(), indent, depth + 1);
      }
      pad(depth);
      os << '}';
      return;
    }
    case json::value_t::array: {
      os << '[';
      const bool one_line = flat(j);
      bool first = true;
      for (const auto& e : j) {
        if (!first) os << (one_line && indent >= 0 ? ", " : ",");
        first = false;
        if (!one_line) pad(depth + 1);
        write_json(os, e, indent, depth + 1);
      }
      if (!one_line && !j.empty()) pad(depth);
      os << ']';
      return;
    }
    case json::value_t::number_float:
      os << format_double(j.get<double>());
      return;
    default:
      os << j.dump();
  }
}

}  // namespace detail

/// Serializes like json::dump but with 17 significant digits for every float.
inline std::string dump(const json& j, int indent = 2) {
  std::ostringstream os;
  detail::write_json(os, j, indent, 0);
  return os.str();
}

inline json to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline json to_json(const Eigen::VectorXi& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline json to_json(const AlgorithmicGraph& g) {
  json edges = json::array();
  for (const auto& [i, j] : g.edges_one_based()) edges.push_back({i, j});
  return {{"n", g.n()}, {"edges", edges}};
}

inline double number_at(const json& j, const std::string& field) {
  if (!j.is_number()) throw ValidationError(field + ": expected a number");
  return j.get<double>();
}

inline int integer_at(const json& j, const std::string& field) {
  if (!j.is_number_integer()) throw ValidationError(field + ": expected an integer");
  return j.get<int>();
}

inline const json& member(const json& obj, const std::string& key, const std::string& field) {
  if (!obj.is_object()) throw ValidationError(field + ": expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(field + "." + key + ": missing");
  return *it;
}

inline Eigen::VectorXd vector_from_json(const json& j, const std::string& field) {
  if (!j.is_array()) throw ValidationError(field + ": expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = number_at(j[i], field + "[" + std::to_string(i) + "]");
  return v;
}

/// Rows x cols matrix from nested arrays; `cols` < 0 accepts any common width.
inline Eigen::MatrixXd matrix_from_json(const json& j, const std::string& field, Eigen::Index rows,
                                        Eigen::Index cols) {
  if (!j.is_array()) throw ValidationError(field + ": expected an array of rows");
  if (rows >= 0 && static_cast<Eigen::Index>(j.size()) != rows) {
    throw ValidationError(field + ": expected " + std::to_string(rows) + " rows, got " + std::to_string(j.size()));
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), std::max<Eigen::Index>(cols, 0));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string rf = field + "[" + std::to_string(i) + "]";
    const Eigen::VectorXd row = vector_from_json(j[i], rf);
    if (cols < 0 && i == 0) {
      cols = row.size();
      m.resize(m.rows(), cols);
    }
    if (row.size() != cols) {
      throw ValidationError(rf + ": expected " + std::to_string(cols) + " entries, got " + std::to_string(row.size()));
    }
    m.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return m;
}

/// {"n": int, "edges": [[i, j], ...]} with 1-based nodes.
inline AlgorithmicGraph graph_from_json(const json& j, const std::string& field = "graph") {
  const int n = integer_at(member(j, "n", field), field + ".n");
  const json& edges = member(j, "edges", field);
  if (!edges.is_array()) throw ValidationError(field + ".edges: expected an array of [i, j] pairs");
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const std::string ef = field + ".edges[" + std::to_string(k) + "]";
    if (!edges[k].is_array() || edges[k].size() != 2) throw ValidationError(ef + ": expected an [i, j] pair");
    pairs.emplace_back(integer_at(edges[k][0], ef), integer_at(edges[k][1], ef));
  }
  try {
    return new_graph(n, pairs);
  } catch (const ValidationError& e) {
    throw ValidationError(field + ": " + e.what());
  }
}

/// {"d": int, "spanners": [[...], ...]}; "d" may be omitted when supplied by the caller.
inline LinearSubspace subspace_from_json(const json& j, const std::string& field, int default_d = -1) {
  int d = default_d;
  if (j.is_object() && j.contains("d")) d = integer_at(j["d"], field + ".d");
  if (d < 1) throw ValidationError(field + ".d: missing or not positive");
  const json& sp = member(j, "spanners", field);
  if (!sp.is_array()) throw ValidationError(field + ".spanners: expected an array of vectors");
  std::vector<Eigen::VectorXd> vs;
  for (std::size_t k = 0; k < sp.size(); ++k) {
    const std::string sf = field + ".spanners[" + std::to_string(k) + "]";
    vs.push_back(vector_from_json(sp[k], sf));
    if (vs.back().size() != d) {
      throw ValidationError(sf + ": expected " + std::to_string(d) + " entries, got " + std::to_string(vs.back().size()));
    }
  }
  return subspace_from_spanners(d, vs);
}

// ---------------------------------------------------------------------------
// Traces

inline std::vector<std::string> trace_header(int n, int d, bool with_w) {
  std::vector<std::string> cols{"k", "residual"};
  auto add = [&](char prefix, int blocks) {
    for (int i = 1; i <= blocks; ++i)
      for (int c = 0; c < d; ++c) cols.push_back(std::string(1, prefix) + std::to_string(i) + "_" + std::to_string(c));
  };
  add('x', n);
  add('v', n - 1);
  if (with_w) add('w', n);
  return cols;
}

/// CSV: k, residual, x blocks, v blocks, then w blocks for the lifted iteration.
inline void write_trace_csv(std::ostream& os, const Trace& trace, int n, int d) {
  const bool with_w = !trace.iterations.empty() && trace.iterations.front().w.has_value();
  const auto header = trace_header(n, d, with_w);
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const auto& r : trace.iterations) {
    os << r.k << ',' << format_double(r.residual);
    for (const Blocks* b : {&r.x, &r.v})
      for (Eigen::Index i = 0; i < b->rows(); ++i)
        for (Eigen::Index c = 0; c < b->cols(); ++c) os << ',' << format_double((*b)(i, c));
    if (with_w)
      for (Eigen::Index i = 0; i < r.w->rows(); ++i)
        for (Eigen::Index c = 0; c < r.w->cols(); ++c) os << ',' << format_double((*r.w)(i, c));
    os << '\n';
  }
}

/// Inverse of write_trace_csv; n and d are recovered from the header.
inline std::vector<TraceRecord> read_trace_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ValidationError("trace CSV: empty input");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 2 || header[0] != "k" || header[1] != "residual") {
    throw ValidationError("trace CSV: header must start with k,residual");
  }
  int n = 0, d = 0;
  bool with_w = false;
  for (std::size_t i = 2; i < header.size(); ++i) {
    const auto& h = header[i];
    const auto us = h.find('_');
    if (us == std::string::npos) throw ValidationError("trace CSV: bad column '" + h + "'");
    const int block = std::stoi(h.substr(1, us - 1));
    const int coord = std::stoi(h.substr(us + 1));
    if (h[0] == 'x') n = std::max(n, block);
    if (h[0] == 'w') with_w = true;
    d = std::max(d, coord + 1);
  }
  if (header != trace_header(n, d, with_w)) throw ValidationError("trace CSV: unexpected column layout");

  std::vector<TraceRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    std::size_t k = 0;
    bool first = true;
    while (std::getline(ss, cell, ',')) {
      if (first) {
        k = std::stoull(cell);
        first = false;
      } else {
        vals.push_back(std::strtod(cell.c_str(), nullptr));
      }
    }
    if (vals.size() + 1 != header.size()) throw ValidationError("trace CSV: row width mismatch");
    TraceRecord r;
    r.k = k;
    r.residual = vals[0];
    std::size_t pos = 1;
    auto take = [&](int blocks) {
      Blocks b(blocks, d);
      for (int i = 0; i < blocks; ++i)
        for (int c = 0; c < d; ++c) b(i, c) = vals[pos++];
      return b;
    };
    r.x = take(n);
    r.v = take(n - 1);
    if (with_w) r.w = take(n);
    out.push_back(std::move(r));
  }
  return out;
}

inline json trace_to_json(const Trace& trace) {
  json its = json::array();
  for (const auto& r : trace.iterations) {
    json rec = {{"k", r.k}, {"residual", r.residual}, {"x", to_json(r.x)}, {"v", to_json(r.v)}};
    if (r.w) rec["w"] = to_json(*r.w);
    its.push_back(std::move(rec));
  }
  return {{"converged", trace.converged}, {"stop_reason", std::string(to_string(trace.stop_reason))}, {"iterations", its}};
}

}  // namespace graphsplit::io
