#include <doctest.h>

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "selffield/cli.hpp"
#include "selffield/localization.hpp"
#include "support.hpp"

using namespace selffield;
using namespace selffield::cli;
using nlohmann::json;
using selffield::test::kind_of;
using selffield::test::rel;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome run_cli(std::initializer_list<std::string> args) {
  std::vector<std::string> storage{"selffield"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : storage) argv.push_back(s.c_str());
  std::ostringstream out, err;
  Outcome o;
  o.code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream ss(text);
  for (std::string l; std::getline(ss, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("minimize prints the electron radius and binding") {
  const auto o = run_cli({"minimize", "--particle", "electron", "--beta", "0.1"});
  REQUIRE(o.code == kExitOk);
  const auto j = json::parse(o.out);
  CHECK(rel(j["b_star_m"].get<double>(), 1.49e-8) < 0.01);
  CHECK(rel(j["binding_eV"].get<double>(), 6.4e-5) < 0.05);
  CHECK(j["mode"] == "paper_quoted");
  CHECK(j["status"] == "ok");

  const auto csv = run_cli({"minimize", "--particle", "proton", "--beta", "0.1", "--format", "csv"});
  REQUIRE(csv.code == kExitOk);
  const auto rows = lines_of(csv.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == "beta,b_star_m,binding_eV,b_over_lambda,mode,status");
}

TEST_CASE("numbers carry 12 significant digits") {
  const auto o = run_cli({"minimize", "--particle", "electron", "--beta", "0.1", "--format", "csv"});
  const auto rows = lines_of(o.out);
  REQUIRE(rows.size() == 2);
  const auto r = minimize_radius(electron(), 0.1, BudgetMode::PaperQuoted);
  CHECK(rows[1].find(format_number(r.b_star)) != std::string::npos);
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(6.02214076e23) == "6.02214076e+23");
}

TEST_CASE("sweep over a proton beta range gives five rows") {
  const auto o = run_cli({"sweep", "--particle", "proton", "--beta", "0.05:0.25:0.05"});
  REQUIRE(o.code == kExitOk);
  const auto rows = lines_of(o.out);
  REQUIRE(rows.size() == 6);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].find(",ok") != std::string::npos);
  CHECK(rows[1].rfind("0.05,", 0) == 0);
  CHECK(rows[5].rfind("0.25,", 0) == 0);
}

TEST_CASE("beta grid parsing") {
  const auto g = parse_beta_grid("0.05:0.25:0.05");
  REQUIRE(g.size() == 5);
  CHECK(g.back() == doctest::Approx(0.25));
  CHECK(parse_beta_grid("0.1:0.1:0.05").size() == 1);
  CHECK(parse_beta_grid("0.1,0.2, 0.3").size() == 3);
  CHECK(parse_beta_grid("").empty());
  // Inclusive within step/2.
  CHECK(parse_beta_grid("0:1:0.3").size() == 4);
  CHECK(parse_beta_grid("0:1.1:0.3").size() == 5);
  CHECK(kind_of([] { parse_beta_grid("0.1:0.2"); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { parse_beta_grid("0.1:0.2:0"); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { parse_beta_grid("0.3:0.2:0.1"); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { parse_beta_grid("0.1,abc"); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("energy and atom commands") {
  const auto e = run_cli({"energy", "--particle", "electron", "--beta", "0.1", "--b-m", "5.29177210903e-11"});
  REQUIRE(e.code == kExitOk);
  const auto j = json::parse(e.out);
  CHECK(rel(j["electrostatic_eV"].get<double>(), 5.428) < 1e-3);

  const auto a = run_cli({"atom", "--atom", "H", "--beta", "0.1"});
  REQUIRE(a.code == kExitOk);
  const auto aj = json::parse(a.out);
  CHECK(aj["atom"] == "H");
  CHECK(rel(aj["b_star_m"].get<double>(), 8.1e-12) < 0.05);

  const auto none = run_cli({"atom", "--atom", "H", "--beta", "0"});
  CHECK(none.code == kExitNumeric);
  CHECK(none.err.find("no convective attraction") != std::string::npos);
}

TEST_CASE("validate passes on a fresh build") {
  const auto o = run_cli({"validate"});
  CHECK(o.code == kExitOk);
  const auto j = json::parse(o.out);
  CHECK(j["passed"] == true);
  CHECK(j["entries"].size() >= 20);
  const auto report = report_from_json(j);
  CHECK(report.passed());
  bool coefficients = false;
  for (const auto& e : report.entries) coefficients = coefficients || e.name == "mean_potential_coefficient";
  CHECK(coefficients);
}

TEST_CASE("tampered constants are caught and named") {
  PhysicalConstants bad = codata2018();
  bad.hbar *= 1.01;
  const auto report = validate(bad);
  CHECK_FALSE(report.passed());
  bool named = false;
  for (const auto& e : report.entries) {
    if (e.name == "localization_radius_closed_form") {
      named = true;
      CHECK_FALSE(e.pass);
      CHECK(e.residual > e.tolerance);
    }
  }
  CHECK(named);
  const auto j = to_json(report);
  CHECK(j["passed"] == false);
}

TEST_CASE("validation report round-trips") {
  const auto report = validate();
  const auto j = to_json(report);
  const auto back = report_from_json(json::parse(j.dump()));
  REQUIRE(back.entries.size() == report.entries.size());
  for (std::size_t i = 0; i < back.entries.size(); ++i) {
    CHECK(back.entries[i].name == report.entries[i].name);
    CHECK(back.entries[i].pass == report.entries[i].pass);
    CHECK(back.entries[i].residual == report.entries[i].residual);
    CHECK(back.entries[i].tolerance == report.entries[i].tolerance);
  }
  CHECK(to_json(back).dump() == j.dump());
  json broken = j;
  broken["entries"][0].erase("tolerance");
  try {
    report_from_json(broken);
    FAIL("expected schema-error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SchemaError);
    CHECK(std::string(e.what()).find("$.entries[0]: ") != std::string::npos);
  }
}

TEST_CASE("strict schema rejects unknown and irrelevant keys with their path") {
  test::TempDir dir("cfg");
  const auto path = (dir / "run.json").string();

  spit(path, R"({"command": "minimize", "particle": "electron", "beta": 0.1, "colour": "red"})");
  auto o = run_cli({"--config", path});
  CHECK(o.code == kExitSchema);
  CHECK(o.err.find("$.colour") != std::string::npos);

  // b_m belongs to energy, not minimize.
  spit(path, R"({"command": "minimize", "particle": "electron", "beta": 0.1, "b_m": 1e-10})");
  o = run_cli({"--config", path});
  CHECK(o.code == kExitSchema);
  CHECK(o.err.find("$.b_m") != std::string::npos);

  spit(path, R"({"command": "sweep", "particle": {"z": -1, "mass_kg": 9.1e-31, "spin": 0.5}, "beta_grid": [0.1]})");
  o = run_cli({"--config", path});
  CHECK(o.code == kExitSchema);
  CHECK(o.err.find("$.particle.spin") != std::string::npos);

  spit(path, R"({"command": "minimize", "particle": "electron"})");
  o = run_cli({"--config", path});
  CHECK(o.code == kExitSchema);
  CHECK(o.err.find("$.beta") != std::string::npos);

  spit(path, R"({"command": "minimize", "particle": "electron", "beta": 0.1, "output": {"format": "xml"}})");
  o = run_cli({"--config", path});
  CHECK(o.code == kExitSchema);
  CHECK(o.err.find("$.output.format") != std::string::npos);

  spit(path, "{not json");
  o = run_cli({"--config", path});
  CHECK(o.code == kExitSchema);

  CHECK(kind_of([] { parse_run_config(json{{"command", "teleport"}}); }) == ErrorKind::SchemaError);
  CHECK(kind_of([] { parse_run_config(json::array()); }) == ErrorKind::SchemaError);
}

TEST_CASE("config and direct flags do not mix") {
  test::TempDir dir("mix");
  const auto path = (dir / "run.json").string();
  spit(path, R"({"particle": "electron", "beta": 0.1})");
  const auto ok = run_cli({"minimize", "--config", path});
  CHECK(ok.code == kExitOk);
  const auto mixed = run_cli({"minimize", "--config", path, "--beta", "0.2"});
  CHECK(mixed.code == kExitSchema);
  CHECK(mixed.err.find("--config") != std::string::npos);
  spit(path, R"({"command": "sweep", "particle": "electron", "beta_grid": [0.1]})");
  CHECK(run_cli({"minimize", "--config", path}).code == kExitSchema);
}

TEST_CASE("numeric and I/O failures map to exit codes") {
  const auto rel_v = run_cli({"minimize", "--particle", "electron", "--beta", "1.2"});
  CHECK(rel_v.code == kExitNumeric);
  CHECK(rel_v.err.find("error:") == 0);
  const auto zero = run_cli({"minimize", "--particle", "electron", "--beta", "0"});
  CHECK(zero.code == kExitNumeric);

  CHECK(run_cli({"--config", "/nonexistent/run.json"}).code == kExitIo);
  const auto unwritable =
      run_cli({"minimize", "--particle", "electron", "--beta", "0.1", "--out", "/nonexistent/dir/out.json"});
  CHECK(unwritable.code == kExitIo);
  CHECK(run_cli({"minimize", "--particle", "muon", "--beta", "0.1"}).code == kExitSchema);
  CHECK(run_cli({"minimize", "--particle", "electron", "--beta", "fast"}).code == kExitSchema);
  CHECK(run_cli({}).code == kExitSchema);
}

TEST_CASE("outputs are byte-identical across runs and carry a meta sidecar") {
  test::TempDir dir("det");
  const auto a = (dir / "a.csv").string();
  const auto b = (dir / "b.csv").string();
  REQUIRE(run_cli({"sweep", "--particle", "electron", "--beta", "0.02:0.3:0.02", "--out", a}).code == kExitOk);
  REQUIRE(run_cli({"sweep", "--particle", "electron", "--beta", "0.02:0.3:0.02", "--out", b}).code == kExitOk);
  CHECK(slurp(a) == slurp(b));
  CHECK(lines_of(slurp(a)).size() == 16);

  const auto meta = json::parse(slurp(a + ".meta.json"));
  CHECK(meta["tool"] == "selffield");
  CHECK(meta["tool_version"] == SELFFIELD_VERSION);
  CHECK(meta["constants_version"] == std::string(kConstantsVersion));
  CHECK(meta["mode"] == "paper_quoted");
  CHECK(meta["config"]["beta_grid"] == "0.02:0.3:0.02");
}

TEST_CASE("evolve writes a trajectory and restarts from its snapshot") {
  test::TempDir dir("evolve");
  const auto snap = (dir / "s.bin").string();
  const auto first = run_cli({"evolve", "--particle", "electron", "--beta", "0.1", "--b-m", "1.2e-11", "--n", "32",
                          "--steps", "4", "--stride", "2", "--snapshot", snap});
  REQUIRE(first.code == kExitOk);
  auto rows = lines_of(first.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == "step,t_s,norm,energy_J,px,py,pz,flux_residual_W");
  CHECK(rows[3].rfind("4,", 0) == 0);

  const auto resumed = run_cli({"evolve", "--restart", snap, "--steps", "2", "--stride", "2"});
  REQUIRE(resumed.code == kExitOk);
  rows = lines_of(resumed.out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[1].rfind("4,", 0) == 0);
  CHECK(rows[2].rfind("6,", 0) == 0);

  CHECK(run_cli({"evolve", "--restart", snap, "--n", "64", "--steps", "2"}).code == kExitSchema);
  CHECK(run_cli({"evolve", "--restart", (dir / "none.bin").string(), "--steps", "2"}).code == kExitIo);
  const auto mismatch = run_cli({"evolve", "--particle", "electron", "--beta", "0.1", "--b-m", "1.2e-11", "--n", "32",
                             "--box-m", "1e-9", "--steps", "2"});
  CHECK(mismatch.code == kExitNumeric);
  CHECK(mismatch.err.find("b >= 4*box/n") != std::string::npos);
}
