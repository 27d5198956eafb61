#include "specflow/json_io.hpp"

#include <fstream>
#include <set>

#include "specflow/bundles.hpp"

namespace specflow::io {

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

void require_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& what) {
  if (!j.is_object()) throw SchemaError(what + " must be a JSON object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items())
    if (!ok.count(key)) throw SchemaError("unknown key '" + key + "' in " + what);
}

namespace {

int get_int(const json& j, const char* key, const std::string& what) {
  if (!j.contains(key)) throw SchemaError(what + ": missing '" + key + "'");
  if (!j.at(key).is_number_integer()) throw SchemaError(what + ": '" + key + "' must be an integer");
  return j.at(key).get<int>();
}

double get_double(const json& j, const char* key, const std::string& what) {
  if (!j.contains(key)) throw SchemaError(what + ": missing '" + key + "'");
  if (!j.at(key).is_number()) throw SchemaError(what + ": '" + key + "' must be a number");
  return j.at(key).get<double>();
}

Eigen::MatrixXd real_block(const json& j, int rank, const std::string& what) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rank, rank);
  if (j.is_number()) {
    if (rank != 1) throw SchemaError(what + ": scalar entry needs rank 1");
    m(0, 0) = j.get<double>();
    return m;
  }
  if (!j.is_array() || static_cast<int>(j.size()) != rank) throw SchemaError(what + ": expected " +
                                                                             std::to_string(rank) + " rows");
  for (int r = 0; r < rank; ++r) {
    const json& row = j[r];
    if (!row.is_array() || static_cast<int>(row.size()) != rank)
      throw SchemaError(what + ": expected " + std::to_string(rank) + " columns");
    for (int c = 0; c < rank; ++c) {
      if (!row[c].is_number()) throw SchemaError(what + ": entries must be numbers");
      m(r, c) = row[c].get<double>();
    }
  }
  return m;
}

Matrix complex_block(const json& j, int rank, const std::string& what) {
  Matrix m = Matrix::Zero(rank, rank);
  if (j.contains("re")) m += real_block(j.at("re"), rank, what + ".re").cast<cplx>();
  if (j.contains("im")) m += kI * real_block(j.at("im"), rank, what + ".im").cast<cplx>();
  return m;
}

json real_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

SymbolFunction symbol_from_json(const json& j) {
  require_keys(j, {"rank", "modes", "samples", "max_mode"}, "symbol");
  const int rank = j.contains("rank") ? get_int(j, "rank", "symbol") : 1;
  if (rank < 1) throw SchemaError("symbol: rank must be positive");
  if (j.contains("modes") == j.contains("samples")) throw SchemaError("symbol: give exactly one of modes, samples");
  if (j.contains("modes")) {
    if (j.contains("max_mode")) throw SchemaError("symbol: max_mode applies to samples only");
    const json& modes = j.at("modes");
    if (!modes.is_array()) throw SchemaError("symbol: modes must be an array");
    std::map<int, Matrix> coeffs;
    for (const json& m : modes) {
      require_keys(m, {"k", "re", "im"}, "symbol mode");
      const int k = get_int(m, "k", "symbol mode");
      if (coeffs.count(k)) throw SchemaError("symbol: mode " + std::to_string(k) + " given twice");
      coeffs[k] = complex_block(m, rank, "mode " + std::to_string(k));
    }
    return SymbolFunction::from_modes(rank, std::move(coeffs));
  }
  const json& samples = j.at("samples");
  if (!samples.is_array() || samples.empty()) throw SchemaError("symbol: samples must be a non-empty array");
  std::vector<Matrix> values;
  for (const json& s : samples) {
    require_keys(s, {"re", "im"}, "symbol sample");
    values.push_back(complex_block(s, rank, "sample"));
  }
  const int max_mode = j.contains("max_mode") ? get_int(j, "max_mode", "symbol") : -1;
  return SymbolFunction::from_samples(values, max_mode);
}

json symbol_to_json(const SymbolFunction& s) {
  json modes = json::array();
  for (const auto& [k, c] : s.modes())
    modes.push_back({{"k", k}, {"re", real_to_json(c.real())}, {"im", real_to_json(c.imag())}});
  return {{"rank", s.rank()}, {"modes", modes}};
}

PotentialPath curve_from_json(const json& j) {
  require_keys(j, {"points", "interpolation"}, "curve");
  const std::string mode = j.value("interpolation", std::string("linear-in-symbol"));
  if (mode != "linear-in-symbol") throw SchemaError("curve: unsupported interpolation '" + mode + "'");
  if (!j.contains("points") || !j.at("points").is_array()) throw SchemaError("curve: points must be an array");
  std::vector<std::pair<double, SymbolFunction>> knots;
  for (const json& p : j.at("points")) {
    require_keys(p, {"t", "symbol"}, "curve point");
    if (!p.contains("symbol")) throw SchemaError("curve point: missing 'symbol'");
    knots.emplace_back(get_double(p, "t", "curve point"), symbol_from_json(p.at("symbol")));
  }
  if (knots.size() == 1) knots.push_back({1.0, knots.front().second});
  try {
    return PotentialPath(std::move(knots));
  } catch (const InvalidArgument& e) {
    throw SchemaError(std::string("curve: ") + e.what());
  }
}

json curve_to_json(const PotentialPath& path) {
  json points = json::array();
  for (const auto& [t, v] : path.knots()) points.push_back({{"t", t}, {"symbol", symbol_to_json(v)}});
  return {{"interpolation", "linear-in-symbol"}, {"points", points}};
}

BaseGrid parse_base(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw SchemaError("base must look like torus:12 or loop:16");
  const std::string kind = spec.substr(0, colon);
  int m = 0;
  try {
    std::size_t used = 0;
    m = std::stoi(spec.substr(colon + 1), &used);
    if (used != spec.size() - colon - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw SchemaError("base resolution is not an integer: " + spec);
  }
  if (m < 3) throw SchemaError("base resolution must be at least 3");
  if (kind == "torus") return BaseGrid::torus(m);
  if (kind == "loop") return BaseGrid::loop(m);
  throw SchemaError("unknown base kind '" + kind + "'");
}

std::string base_to_string(const BaseGrid& grid) {
  return std::string(grid.topology() == BaseTopology::torus ? "torus:" : "loop:") +
         std::to_string(grid.resolution());
}

SymbolFamily family_from_json(const json& j, const BaseGrid& grid) {
  require_keys(j, {"builtin", "rank", "vertices", "fourier"}, "family");
  const int forms = int(j.contains("builtin")) + int(j.contains("vertices")) + int(j.contains("fourier"));
  if (forms != 1) throw SchemaError("family: give exactly one of builtin, vertices, fourier");
  if (j.contains("builtin")) {
    const std::string name = j.at("builtin").is_string() ? j.at("builtin").get<std::string>() : "";
    if (name != "bott") throw SchemaError("family: unknown builtin '" + name + "'");
    return bott_family(grid);
  }
  const int rank = j.contains("rank") ? get_int(j, "rank", "family") : 1;
  if (j.contains("vertices")) {
    const json& v = j.at("vertices");
    if (!v.is_array() || static_cast<int>(v.size()) != grid.vertex_count())
      throw SchemaError("family: vertices must list " + std::to_string(grid.vertex_count()) + " symbols");
    SymbolFamily f;
    f.grid = grid;
    for (const json& s : v) {
      SymbolFunction g = symbol_from_json(s);
      if (g.rank() != rank) throw SchemaError("family: vertex symbol rank differs from family rank");
      f.symbols.push_back(std::move(g));
    }
    return f;
  }
  struct Term {
    int k, p, q;
    Matrix c;
  };
  std::vector<Term> terms;
  if (!j.at("fourier").is_array()) throw SchemaError("family: fourier must be an array");
  for (const json& t : j.at("fourier")) {
    require_keys(t, {"k", "p", "q", "re", "im"}, "family term");
    terms.push_back({get_int(t, "k", "family term"), t.contains("p") ? get_int(t, "p", "family term") : 0,
                     t.contains("q") ? get_int(t, "q", "family term") : 0, complex_block(t, rank, "family term")});
  }
  auto generator = [terms, rank](double th1, double th2) {
    std::map<int, Matrix> modes;
    for (const Term& t : terms) {
      const Matrix add = std::exp(kI * (t.p * th1 + t.q * th2)) * t.c;
      auto it = modes.find(t.k);
      if (it == modes.end())
        modes.emplace(t.k, add);
      else
        it->second += add;
    }
    return SymbolFunction::from_modes(rank, std::move(modes));
  };
  return SymbolFamily::sample(grid, generator);
}

json matrix_to_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back({m(r, c).real(), m(r, c).imag()});
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", out}};
}

}  // namespace specflow::io
