#pragma once

#include <array>
#include <cmath>
#include <sstream>
#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "graphsplit/error.hpp"
#include "graphsplit/factor.hpp"
#include "graphsplit/graph.hpp"

namespace graphsplit {

enum class PresetName {
  douglas_rachford,
  generalized_ryu,
  malitsky_tam,
  parallel_up,
  parallel_down,
  sequential,
  complete,
};

inline constexpr std::array<PresetName, 7> kAllPresets = {
    PresetName::douglas_rachford, PresetName::generalized_ryu, PresetName::malitsky_tam, PresetName::parallel_up,
    PresetName::parallel_down,    PresetName::sequential,      PresetName::complete,
};

inline std::string_view to_string(PresetName p) {
  switch (p) {
    case PresetName::douglas_rachford: return "douglas_rachford";
    case PresetName::generalized_ryu: return "generalized_ryu";
    case PresetName::malitsky_tam: return "malitsky_tam";
    case PresetName::parallel_up: return "parallel_up";
    case PresetName::parallel_down: return "parallel_down";
    case PresetName::sequential: return "sequential";
    case PresetName::complete: return "complete";
  }
  return "?";
}

inline PresetName preset_name_from_string(std::string_view s) {
  for (auto p : kAllPresets)
    if (to_string(p) == s) return p;
  throw ValidationError("unknown preset '" + std::string(s) + "'");
}

/// Smallest order for which a preset is defined.
inline int min_order(PresetName p) {
  return p == PresetName::generalized_ryu || p == PresetName::malitsky_tam ? 3 : 2;
}

/// A named splitting method: graph pair, its canonical onto decomposition,
/// the closed-form alpha and the closed form used for E.
struct Preset {
  PresetName name;
  int n;
  GraphPair pair;
  OntoDecomposition dec;
  AlphaVector alpha_closed;
  GraphKind e_route;
};

inline Preset preset(PresetName name, int n) {
  if (name == PresetName::douglas_rachford && n != 2) {
    throw ValidationError("douglas_rachford is defined for n = 2 only, got n = " + std::to_string(n));
  }
  if (n < min_order(name)) {
    throw ValidationError(std::string(to_string(name)) + " requires n >= " + std::to_string(min_order(name)) +
                          ", got n = " + std::to_string(n));
  }
  auto same = [&](GraphKind k) { return validate_pair(named_graph(k, n), named_graph(k, n)); };

  Eigen::VectorXd a = Eigen::VectorXd::Ones(n - 1);
  GraphPair pair = same(GraphKind::sequential);
  OntoDecomposition dec;
  GraphKind route = GraphKind::sequential;
  switch (name) {
    case PresetName::douglas_rachford:
    case PresetName::sequential:
      break;
    case PresetName::generalized_ryu:
      pair = validate_pair(named_graph(GraphKind::complete, n), named_graph(GraphKind::parallel_down, n));
      for (int j = 1; j < n; ++j) a(j - 1) = n + 1 - 2 * j;
      route = GraphKind::parallel_down;
      break;
    case PresetName::malitsky_tam:
      pair = validate_pair(named_graph(GraphKind::ring, n), named_graph(GraphKind::sequential, n));
      a *= 2.0;
      break;
    case PresetName::parallel_up:
      pair = same(GraphKind::parallel_up);
      route = GraphKind::parallel_up;
      break;
    case PresetName::parallel_down:
      pair = same(GraphKind::parallel_down);
      route = GraphKind::parallel_down;
      break;
    case PresetName::complete:
      pair = same(GraphKind::complete);
      for (int j = 1; j < n; ++j) a(j - 1) = std::sqrt(double(n - j) * double(n - j + 1) / n);
      route = GraphKind::complete;
      break;
  }
  dec = name == PresetName::complete ? factor_complete_sparse(n) : factor_tree(pair.sub);
  return Preset{name, n, std::move(pair), std::move(dec), AlphaVector{a, a.squaredNorm()}, route};
}

inline Preset preset(std::string_view name, int n) { return preset(preset_name_from_string(name), n); }

/// ||alpha||^2 for the generalized Ryu method, (n-1)((n-1)^2 + 2) / 3.
inline double ryu_norm_sq(int n) {
  if (n < 2) throw ValidationError("ryu_norm_sq requires n >= 2");
  const double m = n - 1;
  return m * (m * m + 2.0) / 3.0;
}

inline std::string presets_table() {
  std::ostringstream os;
  os << "algorithm          G              G'             alpha_j\n"
     << "douglas_rachford   sequential     sequential     1            (n = 2)\n"
     << "generalized_ryu    complete       parallel_down  n+1-2j       (n >= 3)\n"
     << "malitsky_tam       ring           sequential     2            (n >= 3)\n"
     << "parallel_up        parallel_up    parallel_up    1\n"
     << "parallel_down      parallel_down  parallel_down  1\n"
     << "sequential         sequential     sequential     1\n"
     << "complete           complete       complete       sqrt((n-j)(n-j+1)/n)\n";
  return os.str();
}

}  // namespace graphsplit
