#include "specflow/base.hpp"

#include <algorithm>
#include <set>

#include "specflow/parallel.hpp"

namespace specflow {

BaseGrid BaseGrid::loop(int m) {
  if (m < 3) throw InvalidArgument("loop base needs at least 3 vertices");
  BaseGrid g;
  g.topology_ = BaseTopology::loop;
  g.m_ = m;
  return g;
}

BaseGrid BaseGrid::torus(int m) {
  if (m < 3) throw InvalidArgument("torus base needs at least 3 x 3 vertices");
  BaseGrid g;
  g.topology_ = BaseTopology::torus;
  g.m_ = m;
  return g;
}

int BaseGrid::vertex_count() const { return topology_ == BaseTopology::loop ? m_ : m_ * m_; }

int BaseGrid::vertex(int i, int j) const {
  i = ((i % m_) + m_) % m_;
  if (topology_ == BaseTopology::loop) return i;
  j = ((j % m_) + m_) % m_;
  return i + m_ * j;
}

std::array<double, 2> BaseGrid::coordinates(int v) const {
  const double h = spacing();
  if (topology_ == BaseTopology::loop) return {h * v, 0.0};
  return {h * (v % m_), h * (v / m_)};
}

double BaseGrid::spacing() const { return 2.0 * kPi / m_; }

std::vector<std::array<int, 2>> BaseGrid::edges() const {
  std::vector<std::array<int, 2>> e;
  if (topology_ == BaseTopology::loop) {
    for (int i = 0; i < m_; ++i) e.push_back({vertex(i), vertex(i + 1)});
    return e;
  }
  for (int j = 0; j < m_; ++j)
    for (int i = 0; i < m_; ++i) {
      e.push_back({vertex(i, j), vertex(i + 1, j)});
      e.push_back({vertex(i, j), vertex(i, j + 1)});
    }
  return e;
}

std::vector<std::array<int, 4>> BaseGrid::plaquettes() const {
  std::vector<std::array<int, 4>> p;
  if (topology_ == BaseTopology::loop) return p;
  for (int j = 0; j < m_; ++j)
    for (int i = 0; i < m_; ++i)
      p.push_back({vertex(i, j), vertex(i + 1, j), vertex(i + 1, j + 1), vertex(i, j + 1)});
  return p;
}

bool BaseGrid::consistent() const {
  const auto e = edges();
  std::set<std::pair<int, int>> undirected;
  for (const auto& [a, b] : e) undirected.insert({std::min(a, b), std::max(a, b)});
  for (const auto& q : plaquettes())
    for (int s = 0; s < 4; ++s) {
      const int a = q[s], b = q[(s + 1) % 4];
      if (!undirected.count({std::min(a, b), std::max(a, b)})) return false;
    }
  const long euler = long(vertex_count()) - long(e.size()) + long(plaquettes().size());
  return euler == 0 && undirected.size() == e.size();
}

SymbolFamily SymbolFamily::sample(const BaseGrid& grid, Generator generator) {
  SymbolFamily f;
  f.grid = grid;
  f.generator = std::move(generator);
  f.symbols.resize(grid.vertex_count());
  parallel_for(f.symbols.size(), [&](std::size_t v) {
    const auto th = grid.coordinates(static_cast<int>(v));
    f.symbols[v] = f.generator(th[0], th[1]);
  });
  return f;
}

int SymbolFamily::bandwidth() const {
  int w = 0;
  for (const auto& s : symbols) w = std::max(w, s.bandwidth());
  return w;
}

}  // namespace specflow
