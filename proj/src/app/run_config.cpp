#include <cmath>
#include <set>
#include <sstream>

#include "selffield/cli.hpp"
#include "selffield/error.hpp"

namespace selffield::cli {

using nlohmann::json;

std::string_view to_string(Command c) noexcept {
  switch (c) {
    case Command::Energy: return "energy";
    case Command::Minimize: return "minimize";
    case Command::Sweep: return "sweep";
    case Command::Atom: return "atom";
    case Command::Evolve: return "evolve";
    case Command::Validate: return "validate";
  }
  return "unknown";
}

namespace {

[[noreturn]] void schema(const std::string& path, const std::string& msg) {
  throw Error(ErrorKind::SchemaError, path + ": " + msg);
}

Command parse_command(const json& j) {
  if (!j.is_string()) schema("$.command", "expected a string");
  const auto s = j.get<std::string>();
  for (auto c : {Command::Energy, Command::Minimize, Command::Sweep, Command::Atom, Command::Evolve,
                 Command::Validate}) {
    if (s == to_string(c)) return c;
  }
  schema("$.command", "unknown command '" + s + "'");
}

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  if (!obj.is_object()) schema(path, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) schema(path + "." + key, "unknown or not allowed here");
  }
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) schema(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) schema(path, "expected a finite number");
  return v;
}

long integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) schema(path, "expected an integer");
  return j.get<long>();
}

bool boolean(const json& j, const std::string& path) {
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "on") return true;
    if (s == "off") return false;
  }
  schema(path, "expected true/false or \"on\"/\"off\"");
}

std::string string(const json& j, const std::string& path) {
  if (!j.is_string()) schema(path, "expected a string");
  return j.get<std::string>();
}

ParticleSpec parse_particle(const json& j) {
  const std::string path = "$.particle";
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (name != "electron" && name != "proton") schema(path, "unknown preset '" + name + "'");
    return particle_preset(name);
  }
  check_keys(j, path, {"z", "mass_kg", "label"});
  if (!j.contains("z")) schema(path + ".z", "required");
  if (!j.contains("mass_kg")) schema(path + ".mass_kg", "required");
  ParticleSpec p;
  p.z = static_cast<double>(integer(j["z"], path + ".z"));
  p.mass = number(j["mass_kg"], path + ".mass_kg");
  p.label = j.contains("label") ? string(j["label"], path + ".label") : "custom";
  return p;
}

NeutralAtom parse_atom(const json& j) {
  const std::string path = "$.atom";
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (name != "H" && name != "He") schema(path, "unknown preset '" + name + "'");
    return atom_preset(name);
  }
  check_keys(j, path, {"z_nucleus", "mass_kg", "gamma_m", "label"});
  for (const char* key : {"z_nucleus", "mass_kg", "gamma_m"}) {
    if (!j.contains(key)) schema(path + "." + key, "required");
  }
  NeutralAtom a;
  a.z_nucleus = static_cast<int>(integer(j["z_nucleus"], path + ".z_nucleus"));
  a.mass_total = number(j["mass_kg"], path + ".mass_kg");
  a.gamma = number(j["gamma_m"], path + ".gamma_m");
  a.label = j.contains("label") ? string(j["label"], path + ".label") : "custom";
  return a;
}

std::vector<double> parse_grid_values(const json& j) {
  const std::string path = "$.beta_grid";
  if (j.is_string()) {
    try {
      return parse_beta_grid(j.get<std::string>());
    } catch (const Error& e) {
      schema(path, e.what());
    }
  }
  if (!j.is_array()) schema(path, "expected \"start:stop:step\", a comma list or an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

GridConfig parse_grid(const json& j) {
  const std::string path = "$.grid";
  check_keys(j, path,
             {"n", "box_m", "dt_s", "b_m", "coupling", "include_diagonal_nA", "steps", "record_stride", "snapshot",
              "restart"});
  GridConfig g;
  if (j.contains("restart")) {
    g.restart = string(j["restart"], path + ".restart");
    for (const char* key : {"n", "box_m", "dt_s", "b_m", "coupling", "include_diagonal_nA"}) {
      if (j.contains(key)) schema(path + "." + key, "not allowed with restart; the snapshot fixes it");
    }
  }
  if (j.contains("n")) g.n = static_cast<int>(integer(j["n"], path + ".n"));
  if (j.contains("box_m")) g.box_m = number(j["box_m"], path + ".box_m");
  if (j.contains("dt_s")) g.dt_s = number(j["dt_s"], path + ".dt_s");
  if (j.contains("b_m")) g.b_m = number(j["b_m"], path + ".b_m");
  if (j.contains("coupling")) g.coupling = boolean(j["coupling"], path + ".coupling");
  if (j.contains("include_diagonal_nA")) {
    g.include_diagonal_nA = boolean(j["include_diagonal_nA"], path + ".include_diagonal_nA");
  }
  if (j.contains("steps")) g.steps = integer(j["steps"], path + ".steps");
  if (j.contains("record_stride")) g.record_stride = integer(j["record_stride"], path + ".record_stride");
  if (j.contains("snapshot")) g.snapshot = string(j["snapshot"], path + ".snapshot");
  if (!g.restart && !g.b_m) schema(path + ".b_m", "required unless restarting");
  return g;
}

Vec3 parse_direction(const json& j) {
  if (!j.is_array() || j.size() != 3) schema("$.direction", "expected three numbers");
  return {number(j[0], "$.direction[0]"), number(j[1], "$.direction[1]"), number(j[2], "$.direction[2]")};
}

std::string default_format(Command c) {
  return (c == Command::Sweep || c == Command::Evolve) ? "csv" : "json";
}

}  // namespace

std::vector<double> parse_beta_grid(const std::string& text) {
  auto parse_one = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
    if (used == 0 || used != s.size() || !std::isfinite(v)) {
      throw Error(ErrorKind::InvalidArgument, "cannot read '" + s + "' as a number");
    }
    return v;
  };
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3) throw Error(ErrorKind::InvalidArgument, "range must be start:stop:step");
    const double start = parse_one(parts[0]), stop = parse_one(parts[1]), step = parse_one(parts[2]);
    if (!(step > 0.0)) throw Error(ErrorKind::InvalidArgument, "range step must be positive");
    if (stop < start) throw Error(ErrorKind::InvalidArgument, "range stop is below start");
    for (long i = 0;; ++i) {
      const double v = start + static_cast<double>(i) * step;
      if (v > stop + 0.5 * step) break;
      out.push_back(v);
    }
    return out;
  }
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_one(item));
  return out;
}

RunConfig parse_run_config(const json& j) {
  if (!j.is_object()) schema("$", "expected an object");
  if (!j.contains("command")) schema("$.command", "required");
  RunConfig cfg;
  cfg.command = parse_command(j["command"]);

  std::set<std::string> allowed{"command", "output"};
  switch (cfg.command) {
    case Command::Energy: allowed.insert({"particle", "beta", "b_m", "mode", "direction"}); break;
    case Command::Minimize: allowed.insert({"particle", "beta", "mode"}); break;
    case Command::Sweep: allowed.insert({"particle", "beta_grid", "mode"}); break;
    case Command::Atom: allowed.insert({"atom", "beta"}); break;
    case Command::Evolve: allowed.insert({"particle", "beta", "direction", "grid"}); break;
    case Command::Validate: break;
  }
  check_keys(j, "$", allowed);

  auto require = [&](const char* key) {
    if (!j.contains(key)) schema(std::string("$.") + key, "required for " + std::string(to_string(cfg.command)));
  };
  const bool restart = cfg.command == Command::Evolve && j.contains("grid") && j["grid"].is_object() &&
                       j["grid"].contains("restart");
  if (j.contains("particle")) cfg.particle = parse_particle(j["particle"]);
  if (j.contains("beta")) cfg.beta = number(j["beta"], "$.beta");
  if (j.contains("b_m")) cfg.b_m = number(j["b_m"], "$.b_m");
  if (j.contains("mode")) {
    try {
      cfg.mode = parse_budget_mode(string(j["mode"], "$.mode"));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::SchemaError) throw;
      schema("$.mode", "expected \"paper\" or \"assembled\"");
    }
  }
  if (j.contains("direction")) cfg.direction = parse_direction(j["direction"]);
  if (j.contains("beta_grid")) cfg.beta_grid = parse_grid_values(j["beta_grid"]);
  if (j.contains("atom")) cfg.atom = parse_atom(j["atom"]);
  if (j.contains("grid")) cfg.grid = parse_grid(j["grid"]);

  switch (cfg.command) {
    case Command::Energy: require("particle"); require("beta"); require("b_m"); break;
    case Command::Minimize: require("particle"); require("beta"); break;
    case Command::Sweep: require("particle"); require("beta_grid"); break;
    case Command::Atom: require("atom"); require("beta"); break;
    case Command::Evolve:
      require("grid");
      if (restart) {
        for (const char* key : {"particle", "beta", "direction"}) {
          if (j.contains(key)) schema(std::string("$.") + key, "not allowed with grid.restart");
        }
      } else {
        require("particle");
        require("beta");
      }
      break;
    case Command::Validate: break;
  }

  cfg.output.format = default_format(cfg.command);
  if (j.contains("output")) {
    const auto& o = j["output"];
    check_keys(o, "$.output", {"path", "format"});
    if (o.contains("path")) cfg.output.path = string(o["path"], "$.output.path");
    if (o.contains("format")) {
      cfg.output.format = string(o["format"], "$.output.format");
      if (cfg.output.format != "csv" && cfg.output.format != "json") {
        schema("$.output.format", "expected \"csv\" or \"json\"");
      }
    }
  }
  cfg.source = j;
  return cfg;
}

}  // namespace selffield::cli
