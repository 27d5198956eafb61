#pragma once

// Experiment configuration: a JSON object validated against a per-subcommand
// schema before anything runs.

#include <cstdint>
#include <string>
#include <vector>

#include "specflow/json_io.hpp"

namespace specflow::cli {

using io::json;
using io::SchemaError;

enum class FieldType { integer, number, string, boolean, number_pair, tolerance_map };

struct Field {
  std::string key;
  FieldType type;
  bool required = false;
};

/// The subcommands in dispatch order.
const std::vector<std::string>& subcommands();

/// Fields accepted by a subcommand, the global ones included. Throws
/// SchemaError for an unknown subcommand.
std::vector<Field> schema(const std::string& subcommand);

/// Checks the "subcommand" key, rejects unknown keys and wrong types, and
/// fills nothing in: defaults live with the commands.
void validate(const json& config);

/// Applies "tol" overrides by field name; unknown names throw SchemaError.
Tolerances tolerances_from(const json& config);
std::vector<std::string> tolerance_names();

/// 64-bit FNV-1a, printed as 16 hex digits.
std::uint64_t fnv1a(const std::string& bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t h);

/// Keys of a config that name input files.
std::vector<std::string> file_keys(const std::string& subcommand);

}  // namespace specflow::cli
