#include <doctest.h>

#include <algorithm>

#include "specflow/cli/commands.hpp"
#include "specflow/cli/plot.hpp"

using namespace specflow;
using cli::json;

namespace {

std::string data(const char* name) { return std::string(SPECFLOW_DATA_DIR) + "/" + name; }

json strip_time(json record) {
  record.erase("wall_time_s");
  return record;
}

OperatorCurve curve_of(double a0, double a1, int k, int samples) {
  return OperatorCurve::from_path(
      PotentialPath::linear(SymbolFunction::scalar_constant(a0), SymbolFunction::scalar_constant(a1)), {k, 1}, samples);
}

int count(const std::string& text, const std::string& needle) {
  int n = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("toeplitz subcommand") {
  const cli::RunOutcome r = cli::run({{"subcommand", "toeplitz"}, {"symbol", data("e3x.json")}, {"k", 64}});
  CHECK(r.exit_code == 0);
  CHECK(r.record.outputs["index"] == -3);
  CHECK(r.record.outputs["winding"] == 3);
  CHECK(r.record.outputs["index"].is_number_integer());
  CHECK(r.record.stable);

  const cli::RunOutcome b =
      cli::run({{"subcommand", "toeplitz"}, {"symbol", data("block_e1_em4.json")}, {"k", 32}, {"check_sf", true}});
  CHECK(b.record.outputs["index"] == 3);
  CHECK(b.record.outputs["sf"] == 3);
  CHECK(b.record.outputs["match"] == true);
}

TEST_CASE("sf subcommand") {
  const cli::RunOutcome r = cli::run({{"subcommand", "sf"}, {"curve", data("const.json")}});
  CHECK(r.exit_code == 0);
  CHECK(r.record.outputs["sf"] == 0);
  const cli::RunOutcome c = cli::run({{"subcommand", "sf"}, {"curve", data("conj_e3x.json")}, {"k", 16}});
  CHECK(c.record.outputs["sf"] == -3);
  CHECK(c.record.outputs.contains("partitions"));
  CHECK(c.record.outputs.contains("min_gap"));
}

TEST_CASE("eta subcommands") {
  const cli::RunOutcome e = cli::run({{"subcommand", "eta"}, {"model", "shifted"}, {"a", 0.25}});
  CHECK(e.record.outputs["eta"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(e.record.outputs["reduced"].get<double>() == doctest::Approx(0.25).epsilon(1e-12));
  const cli::RunOutcome f = cli::run({{"subcommand", "eta-sf"}, {"path", {-0.25, 0.25}}, {"samples", 128}});
  CHECK(f.record.outputs["sf"] == 1);
  CHECK(f.record.outputs["match"] == true);
}

TEST_CASE("higher-sf subcommand on the Bott family") {
  const cli::RunOutcome r = cli::run(
      {{"subcommand", "higher-sf"}, {"family", data("bott.json")}, {"base", "torus:12"}, {"k", 8}, {"doubling", false}});
  CHECK(r.exit_code == 0);
  CHECK(r.record.outputs["ch0"] == -1);
  CHECK(r.record.outputs["ch1"] == -1);
}

TEST_CASE("schema errors exit with 2") {
  CHECK(cli::run({{"subcommand", "sf"}, {"curve", data("const.json")}, {"colour", "red"}}).exit_code == cli::kSchema);
  CHECK(cli::run({{"subcommand", "sf"}}).exit_code == cli::kSchema);
  CHECK(cli::run({{"subcommand", "nope"}}).exit_code == cli::kSchema);
  CHECK(cli::run({{"subcommand", "sf"}, {"curve", data("const.json")}, {"k", 1.5}}).exit_code == cli::kSchema);
  CHECK(cli::run({{"subcommand", "sf"}, {"curve", data("const.json")}, {"tol", {{"bogus", 1}}}}).exit_code ==
        cli::kSchema);
  CHECK(cli::run({{"subcommand", "sf"}, {"curve", data("missing.json")}}).exit_code == cli::kSchema);
}

TEST_CASE("numerical failures exit with 3 and keep partial output") {
  const cli::RunOutcome r = cli::run(
      {{"subcommand", "toeplitz"}, {"symbol", data("e3x.json")}, {"k", 8}, {"check_sf", true},
       {"tol", {{"max_intervals", 2}}}});
  CHECK(r.exit_code == cli::kUnstable);
  CHECK(r.record.outputs["index"] == -3);
  REQUIRE(r.record.error.has_value());
  CHECK((*r.record.error)["kind"] == "ResolutionExceeded");
}

TEST_CASE("records are reproducible apart from wall time") {
  const json cfg = {{"subcommand", "sf"}, {"curve", data("crossing.json")}, {"k", 8}, {"pairs", true}};
  const json a = cli::run(cfg).record.to_json(), b = cli::run(cfg).record.to_json();
  CHECK(strip_time(a).dump() == strip_time(b).dump());
  CHECK(a["config_hash"].get<std::string>().size() == 16);
  CHECK(a["version"] == cli::kVersion);
  CHECK(a["inputs"] == cfg);
  const json c = cli::run({{"subcommand", "sf"}, {"curve", data("crossing.json")}, {"k", 9}}).record.to_json();
  CHECK(c["config_hash"] != a["config_hash"]);
}

TEST_CASE("fnv1a test vectors") {
  CHECK(cli::hex64(cli::fnv1a("")) == "cbf29ce484222325");
  CHECK(cli::hex64(cli::fnv1a("a")) == "af63dc4c8601ec8c");
}

TEST_CASE("plots") {
  const double w = 4.0;
  const std::string flat = cli::spectrum_svg(cli::sample_spectra(OperatorCurve::constant(
                                                 build_dirac(SymbolFunction::scalar_constant(0.3), {4, 1}), 5)),
                                             w);
  CHECK(count(flat, "<circle") == 0);
  CHECK(count(flat, "<polyline") == 8);  // 0.3 + k in [-4, 4] for k = -4..3

  const std::string up = cli::spectrum_svg(cli::sample_spectra(curve_of(-0.25, 0.25, 8, 65)), w);
  CHECK(count(up, "class=\"up\"") == 1);
  CHECK(count(up, "class=\"down\"") == 0);

  const OperatorCurve e3 = curve_of(0.0, -3.0, 8, 65);
  const std::string down = cli::spectrum_svg(cli::sample_spectra(e3), w);
  CHECK(count(down, "class=\"down\"") == 3);
  CHECK(count(down, "class=\"up\"") == 0);
  CHECK(down == cli::spectrum_svg(cli::sample_spectra(e3), w));

  const std::string csv = cli::spectrum_csv(cli::sample_spectra(curve_of(0.0, 1.0, 1, 3)));
  CHECK(csv.substr(0, csv.find('\n')) == "t,lambda0,lambda1,lambda2");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}
