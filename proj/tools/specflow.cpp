// specflow: one entry point for every experiment. Options map one-to-one to
// config keys (dashes for underscores); --config supplies the same keys from
// a JSON file and explicit options override it.

#include <filesystem>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "specflow/cli/commands.hpp"

using namespace specflow;
using cli::json;

namespace {

std::string flag_name(std::string key) {
  for (char& ch : key)
    if (ch == '_') ch = '-';
  return "--" + key;
}

json convert(const cli::Field& f, const std::vector<std::string>& raw) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  };
  try {
    switch (f.type) {
      case cli::FieldType::integer: {
        std::size_t used = 0;
        const long long v = std::stoll(raw.back(), &used);
        if (used != raw.back().size()) throw std::invalid_argument(raw.back());
        return v;
      }
      case cli::FieldType::number:
        return number(raw.back());
      case cli::FieldType::string:
        return raw.back();
      case cli::FieldType::number_pair:
        return json::array({number(raw.at(0)), number(raw.at(1))});
      case cli::FieldType::tolerance_map: {
        json m = json::object();
        for (const std::string& item : raw) {
          const auto eq = item.find('=');
          if (eq == std::string::npos) throw cli::SchemaError("--tol expects name=value, got '" + item + "'");
          const std::string value = item.substr(eq + 1);
          if (value.find_first_of(".eE") == std::string::npos)
            m[item.substr(0, eq)] = std::stoll(value);
          else
            m[item.substr(0, eq)] = number(value);
        }
        return m;
      }
      case cli::FieldType::boolean:
        break;
    }
  } catch (const cli::SchemaError&) {
    throw;
  } catch (const std::exception&) {
    throw cli::SchemaError(flag_name(f.key) + ": cannot parse '" + raw.back() + "'");
  }
  return nullptr;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral flow, Toeplitz index and eta invariant experiments on the circle"};
  app.fallthrough();
  app.require_subcommand(0, 1);
  app.set_version_flag("--version", cli::kVersion);

  std::string config_path;
  app.add_option("--config", config_path, "JSON config with the same keys as the options");

  // Globals live on the top-level app so they may appear on either side of
  // the subcommand.
  std::map<std::string, CLI::Option*> global_opts;
  bool json_flag = false;
  global_opts["k"] = app.add_option("--k", "Fourier truncation K");
  global_opts["tol"] = app.add_option("--tol", "Tolerance override name=value (repeatable)")->allow_extra_args(false);
  global_opts["seed"] = app.add_option("--seed", "RNG seed for random fixtures");
  global_opts["out"] = app.add_option("--out", "Also write the result record to this path");
  global_opts["json"] = app.add_flag("--json", json_flag, "Compact single-line record");

  struct Bound {
    cli::Field field;
    CLI::Option* option;
    bool value = false;
  };
  std::map<std::string, std::vector<std::unique_ptr<Bound>>> bound;
  std::map<std::string, CLI::App*> subs;
  const std::map<std::string, std::string> about = {
      {"sf", "Spectral flow of a path of Dirac-type operators"},
      {"toeplitz", "Fredholm index of a Toeplitz operator T_g"},
      {"eta", "Eta invariant of -i d/dx + V"},
      {"eta-sf", "Spectral flow from the jumps of the reduced eta invariant"},
      {"higher-sf", "Higher spectral flow of a Toeplitz family over a base grid"},
      {"mapping-torus", "Index of d/du + D_u on a mapping torus"},
      {"chern", "Chern numbers of a projector or index bundle"},
      {"plot", "Spectrum plot (SVG and CSV) along a path"}};
  for (const std::string& name : cli::subcommands()) {
    CLI::App* sub = app.add_subcommand(name, about.at(name));
    subs[name] = sub;
    for (const cli::Field& f : cli::schema(name)) {
      if (global_opts.count(f.key) || f.key == "subcommand") continue;
      auto b = std::make_unique<Bound>();
      b->field = f;
      if (f.type == cli::FieldType::boolean) {
        b->option = sub->add_flag(flag_name(f.key) + ",!--no-" + flag_name(f.key).substr(2), b->value);
      } else if (f.type == cli::FieldType::number_pair) {
        b->option = sub->add_option(flag_name(f.key))->expected(2)->allow_extra_args();
      } else {
        b->option = sub->add_option(flag_name(f.key));
      }
      bound[name].push_back(std::move(b));
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kSchema;
  }

  json config = json::object();
  try {
    if (!config_path.empty()) config = io::read_json_file(config_path);
    if (!config.is_object()) throw cli::SchemaError("config file must hold a JSON object");
    // File references inside a config file are relative to that file.
    if (!config_path.empty() && config.contains("subcommand") && config["subcommand"].is_string()) {
      const std::filesystem::path dir = std::filesystem::path(config_path).parent_path();
      for (const std::string& key : cli::file_keys(config["subcommand"].get<std::string>())) {
        if (!config.contains(key) || !config[key].is_string()) continue;
        const std::string v = config[key].get<std::string>();
        if (v != "random" && std::filesystem::path(v).is_relative()) config[key] = (dir / v).lexically_normal().string();
      }
    }
    std::string chosen;
    for (const auto& [name, sub] : subs)
      if (sub->parsed()) chosen = name;
    if (!chosen.empty()) {
      if (config.contains("subcommand") && config["subcommand"] != chosen)
        throw cli::SchemaError("config file is for subcommand " + config["subcommand"].dump() + ", not " + chosen);
      config["subcommand"] = chosen;
    }
    if (!config.contains("subcommand")) throw cli::SchemaError("no subcommand given");
    for (const auto& [key, opt] : global_opts) {
      if (opt->count() == 0) continue;
      if (key == "json") {
        config["json"] = json_flag;
        continue;
      }
      cli::Field f{key, cli::FieldType::string};
      if (key == "k" || key == "seed") f.type = cli::FieldType::integer;
      if (key == "tol") f.type = cli::FieldType::tolerance_map;
      json v = convert(f, opt->results());
      if (key == "tol" && config.contains("tol") && config["tol"].is_object()) {
        for (auto& [name, val] : v.items()) config["tol"][name] = val;
      } else {
        config[key] = std::move(v);
      }
    }
    if (!chosen.empty())
      for (const auto& b : bound[chosen]) {
        if (b->option->count() == 0) continue;
        config[b->field.key] =
            b->field.type == cli::FieldType::boolean ? json(b->value) : convert(b->field, b->option->results());
      }
  } catch (const std::exception& e) {
    std::cerr << "specflow: " << e.what() << '\n';
    return cli::kSchema;
  }
  return cli::run_and_report(config, std::cout, std::cerr);
}
