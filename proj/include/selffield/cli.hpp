#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "selffield/atom.hpp"
#include "selffield/energy_budget.hpp"
#include "selffield/scales.hpp"
#include "selffield/vec3.hpp"

namespace selffield::cli {

enum class Command { Energy, Minimize, Sweep, Atom, Evolve, Validate };

std::string_view to_string(Command c) noexcept;

/// Exit statuses of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;  // validate found a failing entry
inline constexpr int kExitSchema = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitIo = 4;

struct OutputSpec {
  std::optional<std::string> path;  // stdout when absent
  std::string format;               // "csv" or "json"
};

struct GridConfig {
  int n = 64;
  std::optional<double> box_m;   // default n b / 4 with b fitted to the box
  std::optional<double> dt_s;    // default 5 % of the stability limit
  std::optional<double> b_m;
  bool coupling = true;
  bool include_diagonal_nA = false;
  long steps = 100;
  long record_stride = 10;
  std::optional<std::string> snapshot;  // written after the last step
  std::optional<std::string> restart;   // continue from this snapshot
};

struct RunConfig {
  Command command = Command::Minimize;
  std::optional<ParticleSpec> particle;
  std::optional<double> beta;
  std::vector<double> beta_grid;
  std::optional<double> b_m;
  Vec3 direction{1.0, 0.0, 0.0};
  BudgetMode mode = BudgetMode::PaperQuoted;
  std::optional<NeutralAtom> atom;
  std::optional<GridConfig> grid;
  OutputSpec output;
  nlohmann::json source;  // the validated JSON, echoed into the meta sidecar
};

/// Strict schema: unknown or command-irrelevant keys throw SchemaError whose
/// message starts with the JSON path of the offending field.
RunConfig parse_run_config(const nlohmann::json& j);

/// "start:stop:step" (inclusive within step/2) or a comma-separated list.
std::vector<double> parse_beta_grid(const std::string& text);

/// Executes a parsed config. Results go to config.output.path or `out`;
/// diagnostics to `err`. Returns an exit status.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full command-line entry point (argv parsing, error mapping).
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Formats with 12 significant digits.
std::string format_number(double v);

struct ValidationEntry {
  std::string name;
  bool pass = false;
  double residual = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationEntry> entries;
  bool passed() const;
};

/// Reduced-size run of the module invariants. `constants` is the set under
/// test; reference values (CODATA a_B, E_R) stay fixed, so tampering shows up
/// as named failures.
ValidationReport validate(const PhysicalConstants& constants = codata2018(), unsigned threads = 1);

nlohmann::ordered_json to_json(const ValidationReport& r);
ValidationReport report_from_json(const nlohmann::json& j);

}  // namespace selffield::cli
