#pragma once

// JSON forms of symbols, potential curves and symbol families.
//
//   symbol: {"rank": N, "modes": [{"k": int, "re": [[..]], "im": [[..]]}]}
//       or  {"rank": N, "samples": [{"re": [[..]], "im": [[..]]}, ...], "max_mode": int}
//   curve:  {"interpolation": "linear-in-symbol", "points": [{"t": float, "symbol": symbol}]}
//   family: {"builtin": "bott"}
//       or  {"rank": N, "vertices": [symbol, ...]}            (vertex order i + m j)
//       or  {"rank": N, "fourier": [{"k", "p", "q", "re", "im"}]}
//           meaning g(theta1, theta2, x) = sum c_{k,p,q} e^{i (p theta1 + q theta2 + k x)}
//
// For rank 1, "re" and "im" may be plain numbers. Unknown keys throw SchemaError.

#include <string>

#include <json.hpp>

#include "specflow/base.hpp"

namespace specflow::io {

using nlohmann::json;

class SchemaError : public Error {
 public:
  using Error::Error;
};

json read_json_file(const std::string& path);

/// `what` names the object in error messages.
void require_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& what);

SymbolFunction symbol_from_json(const json& j);
json symbol_to_json(const SymbolFunction& s);

PotentialPath curve_from_json(const json& j);
json curve_to_json(const PotentialPath& path);

/// "loop:m" or "torus:m".
BaseGrid parse_base(const std::string& spec);
std::string base_to_string(const BaseGrid& grid);

/// Family on the given grid. Builtin and Fourier forms carry a generator, so
/// the base can be refined; vertex tables must match the grid size.
SymbolFamily family_from_json(const json& j, const BaseGrid& grid);

/// Row-major list of [re, im] pairs (debug output only).
json matrix_to_json(const Matrix& m);

}  // namespace specflow::io
