#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>

#include "selffield/atom.hpp"
#include "selffield/cli.hpp"
#include "selffield/dynamics.hpp"
#include "selffield/error.hpp"
#include "selffield/localization.hpp"
#include "selffield/parallel.hpp"

#ifndef SELFFIELD_VERSION
#define SELFFIELD_VERSION "0.0.0"
#endif

namespace selffield::cli {

using nlohmann::json;
using nlohmann::ordered_json;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace {

// A JSON number carrying at most 12 significant digits.
ordered_json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::stod(format_number(v));
}

ordered_json round_all(const ordered_json& j) {
  if (j.is_number_float()) return num(j.get<double>());
  if (j.is_object()) {
    ordered_json out = ordered_json::object();
    for (const auto& [k, v] : j.items()) out[k] = round_all(v);
    return out;
  }
  if (j.is_array()) {
    ordered_json out = ordered_json::array();
    for (const auto& v : j) out.push_back(round_all(v));
    return out;
  }
  return j;
}

// Buffers the whole result so a failing run leaves no partial file behind.
class Sink {
 public:
  Sink(const OutputSpec& spec, std::ostream& fallback) : spec_(spec), fallback_(fallback) {}
  std::ostream& stream() { return buf_; }
  void close() {
    const std::string text = buf_.str();
    if (!spec_.path) {
      fallback_ << text;
      fallback_.flush();
      return;
    }
    std::ofstream f(*spec_.path, std::ios::binary);
    if (!f) throw Error(ErrorKind::IoError, "cannot open output '" + *spec_.path + "'");
    f << text;
    if (!f) throw Error(ErrorKind::IoError, "failed writing '" + *spec_.path + "'");
  }

 private:
  const OutputSpec& spec_;
  std::ostream& fallback_;
  std::ostringstream buf_;
};

void write_meta(const RunConfig& cfg) {
  if (!cfg.output.path) return;
  ordered_json meta;
  meta["tool"] = "selffield";
  meta["tool_version"] = SELFFIELD_VERSION;
  meta["constants_version"] = kConstantsVersion;
  meta["command"] = std::string(to_string(cfg.command));
  if (cfg.command == Command::Energy || cfg.command == Command::Minimize || cfg.command == Command::Sweep) {
    meta["mode"] = std::string(to_string(cfg.mode));
  }
  meta["config"] = cfg.source;
  const std::string path = *cfg.output.path + ".meta.json";
  std::ofstream f(path, std::ios::binary);
  f << meta.dump(2) << '\n';
  if (!f) throw Error(ErrorKind::IoError, "cannot write metadata '" + path + "'");
}

const char* kRowHeader = "beta,b_star_m,binding_eV,b_over_lambda,mode,status";

ordered_json row_json(double beta, const std::optional<LocalizationResult>& r, std::string_view mode,
                      const std::string& status) {
  ordered_json j;
  j["beta"] = num(beta);
  j["b_star_m"] = r ? num(r->b_star) : ordered_json(nullptr);
  j["binding_eV"] = r ? num(to_ev(r->binding_energy)) : ordered_json(nullptr);
  j["b_over_lambda"] = r ? num(r->b_over_de_broglie) : ordered_json(nullptr);
  j["mode"] = std::string(mode);
  j["status"] = status;
  return j;
}

void write_row_csv(std::ostream& os, const ordered_json& j) {
  auto cell = [](const ordered_json& v) -> std::string {
    if (v.is_null()) return "";
    if (v.is_number()) return format_number(v.get<double>());
    return v.get<std::string>();
  };
  os << cell(j["beta"]) << ',' << cell(j["b_star_m"]) << ',' << cell(j["binding_eV"]) << ','
     << cell(j["b_over_lambda"]) << ',' << cell(j["mode"]) << ',' << cell(j["status"]) << '\n';
}

void warn_beta(const LocalizationResult& r, std::ostream& err) {
  if (r.beta_warning) {
    err << "warning: beta = " << format_number(r.beta) << " exceeds " << kBetaWarningThreshold
        << "; dropped beta^4 terms are no longer small\n";
  }
}

void run_energy(const RunConfig& cfg, Sink& sink) {
  const GaussianPacket packet(*cfg.particle, *cfg.b_m, *cfg.beta, cfg.direction);
  const auto budget = assemble_budget(packet, cfg.mode);
  ordered_json j;
  j["particle"] = cfg.particle->label;
  j["beta"] = num(*cfg.beta);
  j["b_m"] = num(*cfg.b_m);
  const auto parts = to_json(budget);
  for (const auto& [k, v] : parts.items()) j[k] = v;
  j = round_all(j);
  auto& os = sink.stream();
  if (cfg.output.format == "json") {
    os << j.dump(2) << '\n';
    return;
  }
  bool first = true;
  for (const auto& [k, _] : j.items()) {
    os << (first ? "" : ",") << k;
    first = false;
  }
  os << '\n';
  first = true;
  for (const auto& [_, v] : j.items()) {
    os << (first ? "" : ",");
    if (v.is_number()) {
      os << format_number(v.get<double>());
    } else if (v.is_boolean()) {
      os << (v.get<bool>() ? "true" : "false");
    } else {
      os << v.get<std::string>();
    }
    first = false;
  }
  os << '\n';
}

void emit_result(const RunConfig& cfg, Sink& sink, const LocalizationResult& r, ordered_json extra) {
  auto j = row_json(r.beta, r, to_string(r.mode), "ok");
  auto& os = sink.stream();
  if (cfg.output.format == "csv") {
    os << kRowHeader << '\n';
    write_row_csv(os, j);
    return;
  }
  for (const auto& [k, v] : extra.items()) j[k] = v;
  j["bracket_low_m"] = num(r.bracket_used.first);
  j["bracket_high_m"] = num(r.bracket_used.second);
  j["beta_warning"] = r.beta_warning;
  os << j.dump(2) << '\n';
}

void run_minimize(const RunConfig& cfg, Sink& sink, std::ostream& err) {
  const auto r = minimize_radius(*cfg.particle, *cfg.beta, cfg.mode);
  warn_beta(r, err);
  emit_result(cfg, sink, r, {{"particle", cfg.particle->label}});
}

void run_atom(const RunConfig& cfg, Sink& sink, std::ostream& err) {
  const auto r = atom_minimize(*cfg.atom, *cfg.beta);
  warn_beta(r, err);
  ordered_json extra;
  extra["atom"] = cfg.atom->label;
  extra["gamma_m"] = num(cfg.atom->gamma);
  emit_result(cfg, sink, r, extra);
}

void run_sweep(const RunConfig& cfg, Sink& sink) {
  const auto rows = sweep(*cfg.particle, cfg.beta_grid, cfg.mode, default_thread_count());
  auto& os = sink.stream();
  const auto mode = to_string(cfg.mode);
  if (cfg.output.format == "csv") {
    os << kRowHeader << '\n';
    for (const auto& r : rows) write_row_csv(os, row_json(r.beta, r.result, mode, r.status));
    return;
  }
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows) arr.push_back(row_json(r.beta, r.result, mode, r.status));
  os << arr.dump(2) << '\n';
}

void run_evolve(const RunConfig& cfg, Sink& sink, std::ostream& err) {
  const auto& g = *cfg.grid;
  GridSpec spec;
  GridState state;
  std::unique_ptr<GridSolver> solver;
  if (g.restart) {
    auto loaded = read_snapshot(*g.restart);
    spec = loaded.first;
    state = std::move(loaded.second);
    solver = std::make_unique<GridSolver>(spec);
  } else {
    spec.n = g.n;
    spec.particle = *cfg.particle;
    spec.coupling = g.coupling;
    spec.include_diagonal_nA = g.include_diagonal_nA;
    double b = *g.b_m;
    if (g.box_m) {
      spec.box = *g.box_m;
    } else {
      b = fit_width_to_grid(spec.particle, *cfg.beta, spec.n, b);
      spec.box = spec.n * b / 4.0;
    }
    if (g.dt_s) {
      spec.dt = *g.dt_s;
    } else {
      const double kmax = std::numbers::pi * spec.n / spec.box;
      spec.dt = 0.05 * 0.8 * std::numbers::pi * 2.0 * spec.particle.mass / (spec.constants.hbar * kmax * kmax);
    }
    solver = std::make_unique<GridSolver>(spec);
    state = solver->init(GaussianPacket(spec.particle, b, *cfg.beta, cfg.direction));
    err << "grid: n = " << spec.n << ", box = " << format_number(spec.box) << " m, b = " << format_number(b)
        << " m, dt = " << format_number(spec.dt) << " s\n";
  }
  const auto records = solver->evolve(state, g.steps, g.record_stride);
  if (g.snapshot) write_snapshot(*g.snapshot, spec, state);
  auto& os = sink.stream();
  if (cfg.output.format == "csv") {
    write_trajectory_csv(os, records);
    return;
  }
  ordered_json arr = ordered_json::array();
  for (const auto& r : records) {
    ordered_json j;
    j["step"] = r.step;
    j["t_s"] = num(r.t);
    j["norm"] = num(r.norm);
    j["energy_J"] = num(r.energy);
    j["px"] = num(r.momentum.x);
    j["py"] = num(r.momentum.y);
    j["pz"] = num(r.momentum.z);
    j["flux_residual_W"] = num(r.flux_residual);
    arr.push_back(j);
  }
  os << arr.dump(2) << '\n';
}

int run_validate(const RunConfig& cfg, Sink& sink) {
  const auto report = validate(codata2018(), default_thread_count());
  auto& os = sink.stream();
  if (cfg.output.format == "json") {
    os << round_all(to_json(report)).dump(2) << '\n';
  } else {
    os << "name,pass,residual,tolerance\n";
    for (const auto& e : report.entries) {
      os << e.name << ',' << (e.pass ? "true" : "false") << ',' << format_number(e.residual) << ','
         << format_number(e.tolerance) << '\n';
    }
  }
  return report.passed() ? kExitOk : kExitFailed;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SchemaError: return kExitSchema;
    case ErrorKind::IoError: return kExitIo;
    default: return kExitNumeric;
  }
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    Sink sink(cfg.output, out);
    int code = kExitOk;
    switch (cfg.command) {
      case Command::Energy: run_energy(cfg, sink); break;
      case Command::Minimize: run_minimize(cfg, sink, err); break;
      case Command::Sweep: run_sweep(cfg, sink); break;
      case Command::Atom: run_atom(cfg, sink, err); break;
      case Command::Evolve: run_evolve(cfg, sink, err); break;
      case Command::Validate: code = run_validate(cfg, sink); break;
    }
    sink.close();
    write_meta(cfg);
    return code;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  }
}

namespace {

// Flag values as typed on the command line, keyed by long name.
struct FlagSet {
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  bool diag_na = false;
  CLI::Option* diag_opt = nullptr;

  void add(CLI::App* app, const std::string& name, const std::string& help) {
    options[name] = app->add_option("--" + name, values[name], help);
  }
  bool has(const std::string& name) const {
    auto it = options.find(name);
    return it != options.end() && it->second->count() > 0;
  }
  const std::string& get(const std::string& name) const { return values.at(name); }
};

double flag_number(const FlagSet& f, const std::string& name) {
  const auto& s = f.get(name);
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::SchemaError, "--" + name + ": cannot read '" + s + "' as a number");
}

long flag_integer(const FlagSet& f, const std::string& name) {
  const auto& s = f.get(name);
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::SchemaError, "--" + name + ": cannot read '" + s + "' as an integer");
}

json flag_direction(const FlagSet& f) {
  std::stringstream ss(f.get("direction"));
  std::string item;
  json arr = json::array();
  while (std::getline(ss, item, ',')) {
    try {
      arr.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw Error(ErrorKind::SchemaError, "--direction: expected x,y,z");
    }
  }
  return arr;
}

json particle_from_flags(const FlagSet& f) {
  if (f.has("particle")) {
    if (f.has("z") || f.has("mass-kg")) {
      throw Error(ErrorKind::SchemaError, "--particle: cannot be combined with --z/--mass-kg");
    }
    return f.get("particle");
  }
  json p;
  if (f.has("z")) p["z"] = flag_integer(f, "z");
  if (f.has("mass-kg")) p["mass_kg"] = flag_number(f, "mass-kg");
  return p;
}

json config_from_flags(Command cmd, const FlagSet& f) {
  json j;
  j["command"] = std::string(to_string(cmd));
  const bool custom_particle = f.has("z") || f.has("mass-kg");
  if (f.has("particle") || custom_particle) j["particle"] = particle_from_flags(f);
  if (f.has("beta")) {
    if (cmd == Command::Sweep) {
      j["beta_grid"] = f.get("beta");
    } else {
      j["beta"] = flag_number(f, "beta");
    }
  }
  if (f.has("mode")) j["mode"] = f.get("mode");
  if (f.has("direction")) j["direction"] = flag_direction(f);
  if (cmd == Command::Energy && f.has("b-m")) j["b_m"] = flag_number(f, "b-m");
  if (cmd == Command::Atom) {
    if (f.has("atom")) {
      j["atom"] = f.get("atom");
    } else if (f.has("z-nucleus") || f.has("gamma-m") || f.has("atom-mass-kg")) {
      json a;
      if (f.has("z-nucleus")) a["z_nucleus"] = flag_integer(f, "z-nucleus");
      if (f.has("atom-mass-kg")) a["mass_kg"] = flag_number(f, "atom-mass-kg");
      if (f.has("gamma-m")) a["gamma_m"] = flag_number(f, "gamma-m");
      j["atom"] = a;
    }
  }
  if (cmd == Command::Evolve) {
    json g = json::object();
    if (f.has("n")) g["n"] = flag_integer(f, "n");
    if (f.has("box-m")) g["box_m"] = flag_number(f, "box-m");
    if (f.has("dt-s")) g["dt_s"] = flag_number(f, "dt-s");
    if (f.has("b-m")) g["b_m"] = flag_number(f, "b-m");
    if (f.has("coupling")) g["coupling"] = f.get("coupling");
    if (f.diag_opt && f.diag_opt->count() > 0) g["include_diagonal_nA"] = true;
    if (f.has("steps")) g["steps"] = flag_integer(f, "steps");
    if (f.has("stride")) g["record_stride"] = flag_integer(f, "stride");
    if (f.has("snapshot")) g["snapshot"] = f.get("snapshot");
    if (f.has("restart")) g["restart"] = f.get("restart");
    j["grid"] = g;
  }
  if (f.has("out") || f.has("format")) {
    json o;
    if (f.has("out")) o["path"] = f.get("out");
    if (f.has("format")) o["format"] = f.get("format");
    j["output"] = o;
  }
  return j;
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open config '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::SchemaError, "$: config is not valid JSON (" + std::string(e.what()) + ")");
  }
}

}  // namespace

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coherent self-field localization: energies, minimization, sweeps, atoms, grid evolution"};
  app.set_version_flag("--version", SELFFIELD_VERSION);
  std::string top_config;
  auto* top_config_opt = app.add_option("--config", top_config, "JSON run configuration");

  struct Sub {
    Command cmd;
    CLI::App* app;
    FlagSet flags;
  };
  std::vector<std::unique_ptr<Sub>> subs;
  auto make = [&](Command cmd, const std::string& help) -> Sub& {
    auto s = std::make_unique<Sub>();
    s->cmd = cmd;
    s->app = app.add_subcommand(std::string(to_string(cmd)), help);
    s->flags.add(s->app, "config", "JSON run configuration (no other flags allowed)");
    s->flags.add(s->app, "out", "output path (default stdout)");
    s->flags.add(s->app, "format", "csv or json");
    subs.push_back(std::move(s));
    return *subs.back();
  };
  auto particle_flags = [](Sub& s) {
    s.flags.add(s.app, "particle", "electron or proton");
    s.flags.add(s.app, "z", "charge multiple for a custom particle");
    s.flags.add(s.app, "mass-kg", "mass for a custom particle");
  };

  auto& energy = make(Command::Energy, "itemized energy budget of one packet");
  particle_flags(energy);
  for (const char* n : {"beta", "b-m", "mode", "direction"}) energy.flags.add(energy.app, n, n);

  auto& minimize = make(Command::Minimize, "localization radius and binding energy");
  particle_flags(minimize);
  for (const char* n : {"beta", "mode"}) minimize.flags.add(minimize.app, n, n);

  auto& sw = make(Command::Sweep, "minimize over a beta grid");
  particle_flags(sw);
  sw.flags.add(sw.app, "beta", "start:stop:step or a comma list");
  sw.flags.add(sw.app, "mode", "paper or assembled");

  auto& atom = make(Command::Atom, "centre-of-mass localization of a neutral atom");
  atom.flags.add(atom.app, "atom", "H or He");
  for (const char* n : {"z-nucleus", "atom-mass-kg", "gamma-m", "beta"}) atom.flags.add(atom.app, n, n);

  auto& evolve = make(Command::Evolve, "spectral-grid Schroedinger-Maxwell evolution");
  particle_flags(evolve);
  for (const char* n : {"beta", "direction", "n", "box-m", "dt-s", "b-m", "coupling", "steps", "stride",
                        "snapshot", "restart"}) {
    evolve.flags.add(evolve.app, n, n);
  }
  evolve.flags.diag_opt = evolve.app->add_flag("--diag-na", evolve.flags.diag_na, "include the -(q^2/M) n A current");

  make(Command::Validate, "reduced self-check of the model invariants");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitSchema;
  }

  try {
    json cfg_json;
    Sub* chosen = nullptr;
    for (auto& s : subs) {
      if (s->app->parsed()) chosen = s.get();
    }
    if (chosen == nullptr) {
      if (top_config_opt->count() == 0) {
        err << app.help();
        return kExitSchema;
      }
      cfg_json = load_config(top_config);
    } else if (chosen->flags.has("config")) {
      for (const auto& [name, opt] : chosen->flags.options) {
        if (name != "config" && opt->count() > 0) {
          throw Error(ErrorKind::SchemaError, "--config: cannot be combined with --" + name);
        }
      }
      if (chosen->flags.diag_opt && chosen->flags.diag_opt->count() > 0) {
        throw Error(ErrorKind::SchemaError, "--config: cannot be combined with --diag-na");
      }
      cfg_json = load_config(chosen->flags.get("config"));
      if (!cfg_json.is_object()) throw Error(ErrorKind::SchemaError, "$: expected an object");
      if (!cfg_json.contains("command")) {
        cfg_json["command"] = std::string(to_string(chosen->cmd));
      } else if (cfg_json["command"] != std::string(to_string(chosen->cmd))) {
        throw Error(ErrorKind::SchemaError, "$.command: config says " + cfg_json["command"].dump() +
                                                " but the subcommand is " + std::string(to_string(chosen->cmd)));
      }
    } else {
      cfg_json = config_from_flags(chosen->cmd, chosen->flags);
    }
    const auto cfg = parse_run_config(cfg_json);
    return run(cfg, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  }
}

}  // namespace selffield::cli
