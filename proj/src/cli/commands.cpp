#include "specflow/cli/commands.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "specflow/bundles.hpp"
#include "specflow/cli/plot.hpp"
#include "specflow/eta.hpp"
#include "specflow/fixtures.hpp"
#include "specflow/mtorus.hpp"
#include "specflow/toeplitz.hpp"

namespace specflow::cli {

namespace {

struct Context {
  const json& config;
  Tolerances tol;
  ResultRecord& record;

  json& out() { return record.outputs; }
  int k(int fallback) const { return config.value("k", fallback); }
  void flag(bool ok) { record.stable = record.stable && ok; }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw std::runtime_error("cannot write " + path);
}

json load(const Context& c, const char* key) { return io::read_json_file(c.config.at(key).get<std::string>()); }

void cmd_sf(Context& c) {
  const PotentialPath path = io::curve_from_json(load(c, "curve"));
  const FourierTruncation trunc(c.k(32), path.rank());
  const int samples = c.config.value("samples", 17);
  const double c0 = c.config.value("cutoff0", 0.0), c1 = c.config.value("cutoff1", 0.0);
  const OperatorCurve curve = OperatorCurve::from_path(path, trunc, samples);
  const SpectralFlowResult r = spectral_flow(curve, c0, c1, c.tol);
  c.out()["sf"] = r.sf;
  c.out()["partitions"] = r.partitions;
  c.out()["min_gap"] = r.min_gap;
  const int refined = spectral_flow(curve.refined(), c0, c1, c.tol).sf;
  c.out()["sf_refined"] = refined;
  c.flag(refined == r.sf);
  if (c.config.value("pairs", false)) {
    const SpectralSection q0 = aps_projection(curve.operators().front(), c0, CutoffPolicy::inclusive, c.tol);
    const SpectralSection q1 = aps_projection(curve.operators().back(), c1, CutoffPolicy::inclusive, c.tol);
    c.out()["sf_pairs"] = sf_pairs(curve, q0, q1, c.tol);
  }
}

void cmd_toeplitz(Context& c) {
  SymbolFunction g;
  const std::string src = c.config.at("symbol").get<std::string>();
  if (src == "random") {
    fixtures::Rng rng(c.config.value("seed", 0));
    const auto loop = fixtures::random_unitary_loop(2, 3, 2, rng);
    g = loop.symbol;
    c.out()["fixture_winding"] = loop.winding;
  } else {
    g = io::symbol_from_json(load(c, "symbol"));
  }
  const FourierTruncation trunc(c.k(64), g.rank());
  const WindingData w = winding(g, 512, c.tol);
  c.out()["winding"] = w.winding;
  c.out()["raw_integral"] = w.raw_integral;
  const ToeplitzIndex ti = fredholm_index_detail(toeplitz_compress(hardy_section(trunc), g, c.tol), c.tol);
  c.out()["index"] = ti.index;
  c.out()["kernel_dim"] = ti.kernel_dim;
  c.out()["cokernel_dim"] = ti.cokernel_dim;
  c.out()["index_doubled"] = ti.index_doubled;
  c.out()["gap_ratio"] = ti.gap_ratio;
  c.out()["stable"] = ti.stable;
  c.flag(ti.stable);
  if (c.config.value("check_sf", false)) {
    const SymbolFunction zero = SymbolFunction::from_modes(g.rank(), {});
    const OperatorCurve curve =
        OperatorCurve::from_path(PotentialPath::linear(zero, conjugated_potential(g, zero)), trunc, 2);
    const int sf = spectral_flow(curve, 0.0, 0.0, c.tol).sf;
    c.out()["sf"] = sf;
    c.out()["match"] = sf == ti.index;
  }
}

void cmd_eta(Context& c) {
  const std::string method = c.config.value("method", std::string("hurwitz"));
  if (method != "hurwitz" && method != "heat" && method != "both")
    throw SchemaError("eta: method must be hurwitz, heat or both");
  if (c.config.contains("potential")) {
    if (c.config.contains("a") || c.config.contains("model"))
      throw SchemaError("eta: give either potential or model/a");
    if (method != "heat") throw SchemaError("eta: a potential file needs method heat");
    const SymbolFunction v = io::symbol_from_json(load(c, "potential"));
    const EtaValue e = eta_heat(build_dirac(v, FourierTruncation(c.k(64), v.rank()), c.tol), {}, c.tol);
    c.out()["eta"] = e.eta;
    c.out()["reduced"] = e.reduced;
    c.out()["kernel_dim"] = e.kernel_dim;
    c.out()["error_estimate"] = e.error_estimate;
    return;
  }
  if (c.config.value("model", std::string("shifted")) != "shifted") throw SchemaError("eta: model must be shifted");
  if (!c.config.contains("a")) throw SchemaError("eta: missing 'a'");
  const double a = c.config.at("a").get<double>();
  std::optional<EtaValue> hz, heat;
  if (method != "heat") {
    hz = eta_shifted_derivative(a);
    c.out()["eta"] = hz->eta;
    c.out()["reduced"] = hz->reduced;
    c.out()["kernel_dim"] = hz->kernel_dim;
  }
  if (method != "hurwitz") {
    heat = eta_heat(shifted_lattice(a, c.config.value("half_width", 400)), {}, c.tol);
    c.out()[method == "both" ? "eta_heat" : "eta"] = heat->eta;
    c.out()[method == "both" ? "reduced_heat" : "reduced"] = heat->reduced;
    if (method == "heat") c.out()["kernel_dim"] = heat->kernel_dim;
    c.out()["error_estimate"] = heat->error_estimate;
  }
  if (hz && heat) {
    const bool agree = std::abs(hz->eta - heat->eta) <= 1e-6;
    c.out()["agree"] = agree;
    c.flag(agree);
  }
}

void cmd_eta_sf(Context& c) {
  const double a0 = c.config.at("path")[0].get<double>(), a1 = c.config.at("path")[1].get<double>();
  const int samples = c.config.value("samples", 128);
  const std::string method = c.config.value("method", std::string("closed"));
  const FourierTruncation trunc(c.k(16), 1);
  const PotentialPath path =
      PotentialPath::linear(SymbolFunction::scalar_constant(a0), SymbolFunction::scalar_constant(a1));
  EtaProfile profile;
  if (method == "closed") {
    profile = shifted_derivative_profile(a0, a1, samples);
  } else if (method == "heat") {
    profile = heat_profile(OperatorCurve::from_path(path, FourierTruncation(c.k(400), 1), samples), {}, c.tol);
  } else {
    throw SchemaError("eta-sf: method must be closed or heat");
  }
  const EtaFlow f = sf_via_eta(profile, c.tol);
  c.out()["sf"] = f.sf;
  c.out()["integral"] = f.integral;
  c.out()["endpoints"] = f.endpoints;
  c.out()["jumps"] = f.jumps;
  const int flow = spectral_flow(OperatorCurve::from_path(path, trunc, 2), 0.0, 0.0, c.tol).sf;
  c.out()["sf_flow"] = flow;
  c.out()["match"] = flow == f.sf;
}

SymbolFamily load_family(Context& c, const BaseGrid& grid) { return io::family_from_json(load(c, "family"), grid); }

void cmd_higher_sf(Context& c) {
  const BaseGrid grid = io::parse_base(c.config.value("base", std::string("torus:12")));
  const SymbolFamily fam = load_family(c, grid);
  const FourierTruncation trunc(c.k(16), fam.rank());
  KClassNumeric k;
  bool doubling = c.config.value("doubling", true);
  if (fam.generator) {
    k = higher_spectral_flow(grid, toeplitz_path_spec(fam.generator, trunc), doubling, c.tol);
  } else {
    doubling = false;
    CurveFamily cf;
    cf.grid = grid;
    std::vector<Matrix> q0, q1;
    const SymbolFunction zero = SymbolFunction::from_modes(fam.rank(), {});
    for (const SymbolFunction& g : fam.symbols) {
      const PotentialPath p = PotentialPath::linear(zero, conjugated_potential(g, zero));
      cf.curves.push_back(OperatorCurve::from_path(p, trunc, 2));
      q0.push_back(hardy_section(trunc).projector);
      q1.push_back(aps_projection(build_dirac(p(1.0), trunc, c.tol), 0.0, CutoffPolicy::inclusive, c.tol).projector);
    }
    k = higher_spectral_flow(cf, ProjectorFamily::from_projectors(grid, q0), ProjectorFamily::from_projectors(grid, q1),
                             c.tol);
  }
  c.out()["ch0"] = k.ch0;
  c.out()["ch1"] = k.ch1 ? json(*k.ch1) : json(nullptr);
  c.out()["kernel_rank"] = k.positive.rank();
  c.out()["cokernel_rank"] = k.negative.rank();
  c.out()["base_doubling"] = doubling;
  c.out()["stable"] = k.stable;
  c.flag(k.stable);
}

void cmd_mapping_torus(Context& c) {
  TwistedLoopSpec spec;
  if (c.config.contains("flux")) {
    if (c.config.contains("path") || c.config.contains("glue"))
      throw SchemaError("mapping-torus: give either flux or path and glue");
    spec = TwistedLoopSpec::flux(c.config.at("flux").get<int>());
  } else {
    if (!c.config.contains("path") || !c.config.contains("glue"))
      throw SchemaError("mapping-torus: needs path and glue (or flux)");
    spec = TwistedLoopSpec::make(io::curve_from_json(load(c, "path")), io::symbol_from_json(load(c, "glue")), c.tol);
  }
  const int mu = c.config.value("mu", 64), k = c.k(32);
  const int sf = spectral_flow(spec.curve(k, c.config.value("samples", 2)), 0.0, 0.0, c.tol).sf;
  c.out()["sf"] = sf;
  const MappingTorusIndex r = mapping_torus_index(spec, mu, k, {}, c.tol);
  c.out()["index"] = r.index;
  c.out()["kernel_dim"] = r.kernel_dim;
  c.out()["cokernel_dim"] = r.cokernel_dim;
  c.out()["index_refined_u"] = r.index_refined_u;
  c.out()["index_refined_k"] = r.index_refined_k;
  c.out()["match"] = r.index == sf;
  c.out()["stable"] = r.stable;
  c.flag(r.stable);
}

void cmd_chern(Context& c) {
  const bool has_p = c.config.contains("projector"), has_f = c.config.contains("family");
  if (has_p == has_f) throw SchemaError("chern: give exactly one of projector, family");
  const BaseGrid grid = io::parse_base(c.config.value("base", std::string(has_p ? "torus:16" : "torus:12")));
  if (grid.topology() != BaseTopology::torus) throw SchemaError("chern: base must be a torus");
  if (has_p) {
    const std::string name = c.config.at("projector").get<std::string>();
    std::function<Matrix(double, double)> q;
    if (name == "wrap") {
      q = wrap_projector;
    } else if (name == "wrap-complement") {
      q = [](double a, double b) { return Matrix(Matrix::Identity(2, 2) - wrap_projector(a, b)); };
    } else {
      throw SchemaError("chern: unknown projector '" + name + "' (wrap, wrap-complement)");
    }
    const ProjectorFamily p = ProjectorFamily::sample(grid, q);
    const int ch = chern_number(p, c.tol);
    c.out()["chern"] = ch;
    c.out()["lattice_sum"] = chern_lattice_sum(p, c.tol);
    const int doubled = chern_number(ProjectorFamily::sample(BaseGrid::torus(2 * grid.resolution()), q), c.tol);
    c.out()["chern_doubled"] = doubled;
    c.flag(doubled == ch);
    return;
  }
  const SymbolFamily fam = load_family(c, grid);
  const KClassNumeric k = toeplitz_family_index(fam, FourierTruncation(c.k(16), fam.rank()), c.tol);
  c.out()["ch0"] = k.ch0;
  c.out()["ch1"] = k.ch1 ? json(*k.ch1) : json(nullptr);
  c.out()["stable"] = k.stable;
  c.flag(k.stable);
  const OddChernCochain odd = odd_chern_integral(fam, 1, {}, c.tol);
  c.out()["odd_chern_raw"] = odd.total;
  c.out()["odd_chern_calibrated"] = odd.calibrated;
  if (k.ch1) c.out()["odd_chern_match"] = std::abs(odd.calibrated - *k.ch1) <= 0.02;
}

void cmd_plot(Context& c) {
  const PotentialPath path = io::curve_from_json(load(c, "curve"));
  const int samples = c.config.value("samples", 65);
  if (samples < 2) throw SchemaError("plot: samples must be at least 2");
  const OperatorCurve curve = OperatorCurve::from_path(path, FourierTruncation(c.k(8), path.rank()), samples);
  const SpectrumTrack track = sample_spectra(curve, c.tol);
  const double window = c.config.value("window", 4.0);
  if (!(window > 0)) throw SchemaError("plot: window must be positive");
  const std::string svg = c.config.at("svg").get<std::string>();
  write_file(svg, spectrum_svg(track, window));
  if (c.config.contains("csv")) write_file(c.config.at("csv").get<std::string>(), spectrum_csv(track));
  int up = 0, down = 0;
  for (const Crossing& x : sampled_crossings(track)) (x.direction > 0 ? up : down)++;
  c.out()["svg"] = svg;
  c.out()["crossings_up"] = up;
  c.out()["crossings_down"] = down;
  c.out()["sf"] = spectral_flow(curve, 0.0, 0.0, c.tol).sf;
}

using Command = void (*)(Context&);

Command lookup(const std::string& name) {
  if (name == "sf") return cmd_sf;
  if (name == "toeplitz") return cmd_toeplitz;
  if (name == "eta") return cmd_eta;
  if (name == "eta-sf") return cmd_eta_sf;
  if (name == "higher-sf") return cmd_higher_sf;
  if (name == "mapping-torus") return cmd_mapping_torus;
  if (name == "chern") return cmd_chern;
  if (name == "plot") return cmd_plot;
  throw SchemaError("unknown subcommand '" + name + "'");
}

bool is_input_error(const Error& e) {
  return dynamic_cast<const InvalidArgument*>(&e) || dynamic_cast<const DimensionMismatch*>(&e) ||
         dynamic_cast<const NotHermitian*>(&e) || dynamic_cast<const NotUnitary*>(&e) ||
         dynamic_cast<const GluingInconsistent*>(&e) || dynamic_cast<const SchemaError*>(&e);
}

std::string error_kind(const std::exception& e) {
#define KIND(T) \
  if (dynamic_cast<const T*>(&e)) return #T
  KIND(io::SchemaError);
  KIND(InvalidArgument);
  KIND(DimensionMismatch);
  KIND(NotHermitian);
  KIND(NotUnitary);
  KIND(EigenvalueAtCutoff);
  KIND(IllConditioned);
  KIND(NoGapFound);
  KIND(ResolutionExceeded);
  KIND(UnstableIndex);
  KIND(RoundingAmbiguous);
  KIND(RankJump);
  KIND(SingularOverlap);
  KIND(GridTooCoarse);
  KIND(ExtrapolationFailed);
  KIND(JumpAmbiguous);
  KIND(GluingInconsistent);
  KIND(DoublingDetected);
  KIND(InvalidSection);
#undef KIND
  return "Error";
}

}  // namespace

json ResultRecord::to_json() const {
  json j = {{"tool", "specflow"},        {"version", kVersion}, {"subcommand", subcommand},
            {"inputs", inputs},          {"input_files", input_files}, {"config_hash", config_hash},
            {"outputs", outputs},        {"stable", stable},     {"wall_time_s", wall_time_s}};
  if (error) j["error"] = *error;
  return j;
}

RunOutcome run(const json& config) {
  RunOutcome r;
  const auto start = std::chrono::steady_clock::now();
  auto finish = [&](int code) {
    r.exit_code = code;
    r.record.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
  };
  try {
    validate(config);
    r.record.subcommand = config.at("subcommand").get<std::string>();
    r.record.inputs = config;
    std::string digest = config.dump();
    for (const std::string& key : file_keys(r.record.subcommand)) {
      if (!config.contains(key)) continue;
      const std::string path = config.at(key).get<std::string>();
      if (key == "symbol" && path == "random") continue;
      const std::string text = read_file(path);
      r.record.input_files[key] = {{"path", path}, {"fnv1a", hex64(fnv1a(text))}};
      digest += '\0' + key + '\0' + text;
    }
    r.record.config_hash = hex64(fnv1a(digest));
  } catch (const std::exception& e) {
    r.record.stable = false;
    r.record.error = json{{"kind", error_kind(e)}, {"message", e.what()}};
    return finish(kSchema);
  }
  Context ctx{config, Tolerances::defaults(), r.record};
  try {
    ctx.tol = tolerances_from(config);
    lookup(r.record.subcommand)(ctx);
  } catch (const Error& e) {
    r.record.stable = false;
    r.record.error = json{{"kind", error_kind(e)}, {"message", e.what()}};
    return finish(is_input_error(e) ? kSchema : kUnstable);
  } catch (const std::exception& e) {
    r.record.stable = false;
    r.record.error = json{{"kind", "runtime"}, {"message", e.what()}};
    return finish(kFailure);
  }
  return finish(r.record.stable ? kOk : kUnstable);
}

int run_and_report(const json& config, std::ostream& out, std::ostream& err) {
  RunOutcome r = run(config);
  const bool compact = config.is_object() && config.value("json", false);
  const std::string text = compact ? r.record.to_json().dump() : r.record.to_json().dump(2);
  if (r.record.error) err << "specflow: " << (*r.record.error)["kind"].get<std::string>() << ": "
                          << (*r.record.error)["message"].get<std::string>() << '\n';
  if (r.exit_code == kSchema && r.record.subcommand.empty()) return r.exit_code;
  out << text << '\n';
  if (config.is_object() && config.contains("out") && config.at("out").is_string()) {
    try {
      write_file(config.at("out").get<std::string>(), text + "\n");
    } catch (const std::exception& e) {
      err << "specflow: " << e.what() << '\n';
      return kFailure;
    }
  }
  return r.exit_code;
}

}  // namespace specflow::cli
