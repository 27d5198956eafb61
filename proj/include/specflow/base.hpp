#pragma once

// Discretized parameter bases: the loop S^1 with m vertices and the torus
// T^2 with m x m vertices. Coordinates are theta = 2 pi i / m.

#include <array>
#include <functional>
#include <vector>

#include "specflow/symbol.hpp"

namespace specflow {

enum class BaseTopology { loop, torus };

class BaseGrid {
 public:
  static BaseGrid loop(int m);
  static BaseGrid torus(int m);

  BaseTopology topology() const { return topology_; }
  int resolution() const { return m_; }
  int vertex_count() const;
  int vertex(int i, int j = 0) const;
  /// (theta1, theta2); theta2 is 0 on a loop.
  std::array<double, 2> coordinates(int v) const;
  double spacing() const;

  /// Oriented edges (v, v + e_mu).
  std::vector<std::array<int, 2>> edges() const;
  /// Counter-clockwise plaquettes (v, v+e1, v+e1+e2, v+e2); empty on a loop.
  std::vector<std::array<int, 4>> plaquettes() const;

  /// Every plaquette is a closed edge cycle and V - E + F = 0.
  bool consistent() const;

 private:
  BaseTopology topology_ = BaseTopology::loop;
  int m_ = 1;
};

/// Unitary symbols at every base vertex, optionally with the smooth map they
/// were sampled from (needed for base derivatives in the odd Chern integral).
struct SymbolFamily {
  using Generator = std::function<SymbolFunction(double, double)>;

  BaseGrid grid;
  std::vector<SymbolFunction> symbols;
  Generator generator;

  static SymbolFamily sample(const BaseGrid& grid, Generator generator);
  int rank() const { return symbols.empty() ? 0 : symbols.front().rank(); }
  int bandwidth() const;
};

}  // namespace specflow
