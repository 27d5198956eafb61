#include "specflow/cli/config.hpp"

#include <cstdio>
#include <map>

namespace specflow::cli {

namespace {

using F = FieldType;

const std::map<std::string, std::vector<Field>>& table() {
  static const std::map<std::string, std::vector<Field>> t = {
      {"sf",
       {{"curve", F::string, true},
        {"cutoff0", F::number},
        {"cutoff1", F::number},
        {"samples", F::integer},
        {"pairs", F::boolean}}},
      {"toeplitz", {{"symbol", F::string, true}, {"check_sf", F::boolean}}},
      {"eta",
       {{"model", F::string},
        {"a", F::number},
        {"method", F::string},
        {"potential", F::string},
        {"half_width", F::integer}}},
      {"eta-sf", {{"path", F::number_pair, true}, {"samples", F::integer}, {"method", F::string}}},
      {"higher-sf", {{"family", F::string, true}, {"base", F::string}, {"doubling", F::boolean}}},
      {"mapping-torus",
       {{"path", F::string}, {"glue", F::string}, {"flux", F::integer}, {"mu", F::integer}, {"samples", F::integer}}},
      {"chern", {{"projector", F::string}, {"family", F::string}, {"base", F::string}}},
      {"plot",
       {{"curve", F::string, true},
        {"svg", F::string, true},
        {"csv", F::string},
        {"samples", F::integer},
        {"window", F::number}}},
  };
  return t;
}

const std::vector<Field>& globals() {
  static const std::vector<Field> g = {{"subcommand", F::string, true},
                                       {"k", F::integer},
                                       {"tol", F::tolerance_map},
                                       {"seed", F::integer},
                                       {"out", F::string},
                                       {"json", F::boolean}};
  return g;
}

bool has_type(const json& v, FieldType t) {
  switch (t) {
    case F::integer:
      return v.is_number_integer();
    case F::number:
      return v.is_number();
    case F::string:
      return v.is_string();
    case F::boolean:
      return v.is_boolean();
    case F::number_pair:
      return v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number();
    case F::tolerance_map:
      return v.is_object();
  }
  return false;
}

const char* type_name(FieldType t) {
  switch (t) {
    case F::integer:
      return "an integer";
    case F::number:
      return "a number";
    case F::string:
      return "a string";
    case F::boolean:
      return "a boolean";
    case F::number_pair:
      return "a pair of numbers";
    case F::tolerance_map:
      return "an object of tolerance overrides";
  }
  return "?";
}

struct TolField {
  const char* name;
  double Tolerances::*real = nullptr;
  int Tolerances::*integer = nullptr;
};

const std::vector<TolField>& tol_fields() {
  static const std::vector<TolField> f = {
      {"hermitian", &Tolerances::hermitian},
      {"unitary", &Tolerances::unitary},
      {"eig_residual", &Tolerances::eig_residual},
      {"eig_gram", &Tolerances::eig_gram},
      {"degeneracy", &Tolerances::degeneracy},
      {"cutoff", &Tolerances::cutoff},
      {"projector_idempotent", &Tolerances::projector_idempotent},
      {"projector_hermitian", &Tolerances::projector_hermitian},
      {"section_condition", &Tolerances::section_condition},
      {"min_interval", &Tolerances::min_interval},
      {"lipschitz_safety", &Tolerances::lipschitz_safety},
      {"max_intervals", nullptr, &Tolerances::max_intervals},
      {"difference_tol", &Tolerances::difference_tol},
      {"rank_tol", &Tolerances::rank_tol},
      {"rank_gap", &Tolerances::rank_gap},
      {"winding_invariant", &Tolerances::winding_invariant},
      {"winding_ambiguous", &Tolerances::winding_ambiguous},
      {"winding_min_grid", nullptr, &Tolerances::winding_min_grid},
      {"overlap_det", &Tolerances::overlap_det},
      {"neighbor_distance", &Tolerances::neighbor_distance},
      {"kernel", &Tolerances::kernel},
      {"jump_threshold", &Tolerances::jump_threshold},
      {"jump_ambiguity", &Tolerances::jump_ambiguity},
      {"heat_quadrature", &Tolerances::heat_quadrature},
      {"gluing", &Tolerances::gluing},
  };
  return f;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> s = {"sf",        "toeplitz",      "eta",   "eta-sf",
                                             "higher-sf", "mapping-torus", "chern", "plot"};
  return s;
}

std::vector<Field> schema(const std::string& subcommand) {
  const auto it = table().find(subcommand);
  if (it == table().end()) throw SchemaError("unknown subcommand '" + subcommand + "'");
  std::vector<Field> out = globals();
  out.insert(out.end(), it->second.begin(), it->second.end());
  return out;
}

void validate(const json& config) {
  if (!config.is_object()) throw SchemaError("config must be a JSON object");
  if (!config.contains("subcommand") || !config.at("subcommand").is_string())
    throw SchemaError("config: missing subcommand");
  const std::vector<Field> fields = schema(config.at("subcommand").get<std::string>());
  for (const auto& [key, value] : config.items()) {
    const Field* f = nullptr;
    for (const Field& c : fields)
      if (c.key == key) f = &c;
    if (!f) throw SchemaError("unknown key '" + key + "' for subcommand " + config.at("subcommand").get<std::string>());
    if (!has_type(value, f->type)) throw SchemaError("'" + key + "' must be " + type_name(f->type));
  }
  for (const Field& f : fields)
    if (f.required && !config.contains(f.key)) throw SchemaError("missing required key '" + f.key + "'");
  if (config.contains("tol")) (void)tolerances_from(config);
}

Tolerances tolerances_from(const json& config) {
  Tolerances tol = Tolerances::defaults();
  if (!config.contains("tol")) return tol;
  for (const auto& [name, value] : config.at("tol").items()) {
    const TolField* f = nullptr;
    for (const TolField& c : tol_fields())
      if (name == c.name) f = &c;
    if (!f) throw SchemaError("unknown tolerance '" + name + "'");
    if (f->integer) {
      if (!value.is_number_integer()) throw SchemaError("tolerance '" + name + "' must be an integer");
      tol.*(f->integer) = value.get<int>();
    } else {
      if (!value.is_number()) throw SchemaError("tolerance '" + name + "' must be a number");
      tol.*(f->real) = value.get<double>();
    }
  }
  return tol;
}

std::vector<std::string> tolerance_names() {
  std::vector<std::string> out;
  for (const TolField& f : tol_fields()) out.emplace_back(f.name);
  return out;
}

std::uint64_t fnv1a(const std::string& bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::string> file_keys(const std::string& subcommand) {
  if (subcommand == "sf" || subcommand == "plot") return {"curve"};
  if (subcommand == "toeplitz") return {"symbol"};
  if (subcommand == "eta") return {"potential"};
  if (subcommand == "higher-sf") return {"family"};
  if (subcommand == "mapping-torus") return {"path", "glue"};
  if (subcommand == "chern") return {"family"};
  return {};
}

}  // namespace specflow::cli
