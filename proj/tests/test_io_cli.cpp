#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "ductmc/cli.hpp"
#include "ductmc/io.hpp"
#include "ductmc/scenario_io.hpp"
#include "test_util.hpp"

using namespace ductmc;
using ductmc::testutil::thrown_code;
namespace fs = std::filesystem;

namespace {

// Runs the CLI in-process with both standard streams captured.
struct CliRun {
  int status = 0;
  std::string out;
  std::string err;
};

CliRun cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  std::streambuf* old_out = std::cout.rdbuf(out.rdbuf());
  std::streambuf* old_err = std::cerr.rdbuf(err.rdbuf());
  CliRun run;
  run.status = run_cli(args);
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  run.out = out.str();
  run.err = err.str();
  return run;
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("ductmc_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) { return read_text_file(path.string()); }

// Small, fast variant of the reference vessel for CLI round trips.
fs::path write_quick_scenario(const fs::path& dir) {
  SimulationScenario s = preset_scenario("vein");
  s.wall = {WallKind::Permeable, 0.0};
  s.molecules_per_emission = 800;
  s.end_time_s = 0.1;
  const fs::path path = dir / "quick.json";
  save_scenario_file(s, path.string());
  return path;
}

}  // namespace

TEST_CASE("cir table formatting round-trips") {
  ChannelImpulseResponse cir;
  cir.bin_width_s = 0.05;
  cir.emitted = 500;
  cir.scenario_digest = "00ff00ff00ff00ff";
  cir.counts = {{4, 0, 9}, {1, 2, 3}};

  const std::string text = format_cir_table(cir);
  const ChannelImpulseResponse back = parse_cir_table(text);
  CHECK(back.bin_width_s == doctest::Approx(0.05));
  CHECK(back.emitted == 500);
  CHECK(back.scenario_digest == "00ff00ff00ff00ff");
  REQUIRE(back.counts.size() == 2);
  CHECK(back.counts[0] == cir.counts[0]);
  CHECK(back.counts[1] == cir.counts[1]);
  CHECK(format_cir_table(back) == text);

  CHECK(thrown_code([] { parse_cir_table("1 2 3\n"); }) == "ParseError");
  CHECK(thrown_code([] {
          parse_cir_table("# cir v1\n# receivers 2\n0.000000 4\n");
        }) == "ParseError");
}

TEST_CASE("ledger and regime records are tagged json") {
  MassLedger ledger;
  ledger.emitted = 10;
  ledger.absorbed_per_receiver = {4};
  ledger.alive_at_end = 6;
  const std::string rec = format_ledger_record(ledger);
  CHECK(rec.find("\"format\": \"ledger-v1\"") != std::string::npos);
  CHECK(rec.find("\"balanced\": true") != std::string::npos);
  CHECK(rec.back() == '\n');

  DimensionlessReport report;
  report.peclet = 0.0;
  report.regime = FlowRegime::PureDiffusion;
  const std::string reg = format_regime_record(report);
  CHECK(reg.find("\"dispersion_factor\": null") != std::string::npos);
  CHECK(reg.find("PureDiffusion") != std::string::npos);
}

TEST_CASE("ber table summarises each value label") {
  BerTable table;
  table.rows.push_back({"-", 1, BerResult{1000, 100, 0.1}});
  table.rows.push_back({"-", 2, BerResult{1000, 200, 0.2}});
  const std::string text = format_ber_table(table);
  CHECK(text.find("- 1 1000 100 0.100000 -\n") != std::string::npos);
  CHECK(text.find("- 2 1000 200 0.200000 -\n") != std::string::npos);
  // Mean 0.15, standard error sqrt(0.005 / 2) = 0.05, pooled counts.
  CHECK(text.find("- mean 2000 300 0.150000 0.050000\n") != std::string::npos);
}

TEST_CASE("manifest round trip") {
  RunManifest m;
  m.scenario_digest = "0123456789abcdef";
  m.seed = 42;
  m.version = "9.9.9";
  m.duration_s = 1.25;
  m.outputs = {"cir.txt", "ledger.json"};
  const RunManifest back = parse_manifest(format_manifest(m));
  CHECK(back.scenario_digest == m.scenario_digest);
  CHECK(back.seed == 42);
  CHECK(back.version == "9.9.9");
  CHECK(back.duration_s == doctest::Approx(1.25));
  CHECK(back.outputs == m.outputs);
  CHECK(thrown_code([] { parse_manifest("{\"format\": \"run-manifest-v1\"}"); }) ==
        "ParseError");
}

TEST_CASE("text file helpers") {
  CHECK(thrown_code([] { read_text_file("/nonexistent/ductmc/file.txt"); }) == "FileNotFound");
  const fs::path dir = fresh_dir("textio");
  const fs::path file = dir / "hello.txt";
  write_text_file(file.string(), "line\n");
  CHECK(slurp(file) == "line\n");
  fs::remove_all(dir);
}

TEST_CASE("cir command writes a reproducible bundle") {
  const fs::path dir = fresh_dir("cli_cir");
  const fs::path scenario = write_quick_scenario(dir);

  const fs::path out1 = dir / "run1";
  const CliRun first =
      cli({"cir", scenario.string(), "--out", out1.string(), "--seed", "7"});
  REQUIRE(first.status == 0);
  for (const char* name : {"cir.txt", "ledger.json", "scenario.json", "manifest.json"})
    CHECK(fs::exists(out1 / name));

  // The printed record is the ledger; the run must balance.
  CHECK(first.out.find("\"balanced\": true") != std::string::npos);

  // The manifest digest matches the scenario actually written.
  const RunManifest manifest = parse_manifest(slurp(out1 / "manifest.json"));
  const SimulationScenario written = parse_scenario(slurp(out1 / "scenario.json"));
  CHECK(manifest.scenario_digest == scenario_digest(written));
  CHECK(manifest.seed == 7);
  CHECK(written.seed == 7);

  // Same seed, fresh directory: byte-identical data outputs.
  const fs::path out2 = dir / "run2";
  REQUIRE(cli({"cir", scenario.string(), "--out", out2.string(), "--seed", "7"}).status == 0);
  CHECK(slurp(out2 / "cir.txt") == slurp(out1 / "cir.txt"));
  CHECK(slurp(out2 / "ledger.json") == slurp(out1 / "ledger.json"));

  // More workers: still byte-identical.
  const fs::path out3 = dir / "run3";
  REQUIRE(cli({"cir", scenario.string(), "--out", out3.string(), "--seed", "7", "--workers",
               "3"})
              .status == 0);
  CHECK(slurp(out3 / "cir.txt") == slurp(out1 / "cir.txt"));
  CHECK(slurp(out3 / "ledger.json") == slurp(out1 / "ledger.json"));

  // A different seed changes the data.
  const fs::path out4 = dir / "run4";
  REQUIRE(cli({"cir", scenario.string(), "--out", out4.string(), "--seed", "8"}).status == 0);
  CHECK(slurp(out4 / "cir.txt") != slurp(out1 / "cir.txt"));

  fs::remove_all(dir);
}

TEST_CASE("regime command reports the vein classification") {
  const fs::path dir = fresh_dir("cli_regime");
  const CliRun run = cli({"regime", "vein", "--out", dir.string()});
  REQUIRE(run.status == 0);
  CHECK(run.out.find("PoiseuilleDominated") != std::string::npos);
  const std::string record = slurp(dir / "regime.json");
  CHECK(record.find("\"format\": \"regime-v1\"") != std::string::npos);
  CHECK(record.find("PoiseuilleDominated") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("ber over a lossless synthetic channel is zero") {
  const fs::path dir = fresh_dir("cli_ber");
  const CliRun run = cli({"ber", "vein", "--cir-fractions", "1.0", "--bits", "200",
                          "--seeds", "3", "--out", dir.string()});
  REQUIRE(run.status == 0);
  const std::string table = slurp(dir / "ber.txt");
  std::istringstream lines(table);
  std::string line;
  int data_rows = 0;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string value, seed, bits, errors, ber;
    row >> value >> seed >> bits >> errors >> ber;
    CHECK(ber == "0.000000");
    ++data_rows;
  }
  CHECK(data_rows == 4);  // three seeds plus the summary row
  fs::remove_all(dir);
}

TEST_CASE("text command round-trips a message") {
  const fs::path dir = fresh_dir("cli_text");
  const CliRun run = cli({"text", "vein", "--cir-fractions", "1.0", "--seeds", "2",
                          "--message", "HELLO WORLD 123", "--out", dir.string()});
  REQUIRE(run.status == 0);
  const std::string report = slurp(dir / "text_report.json");
  CHECK(report.find("\"message\": \"HELLO WORLD 123\"") != std::string::npos);
  CHECK(report.find("\"decoded\": \"HELLO WORLD 123\"") != std::string::npos);
  CHECK(report.find("\"bit_errors\": 0") != std::string::npos);
  CHECK(report.find("\"shifts_inserted\": 1") != std::string::npos);

  const CliRun empty = cli({"text", "vein", "--cir-fractions", "1.0", "--seeds", "1",
                            "--message", "", "--out", (dir / "empty").string()});
  CHECK(empty.status == 0);
  CHECK(slurp(dir / "empty" / "text_report.json").find("\"telegraph_bits\": 0") !=
        std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("cli failures emit one machine-readable record") {
  const fs::path dir = fresh_dir("cli_err");

  SUBCASE("missing scenario file") {
    const CliRun run = cli({"cir", "/nonexistent/ductmc.json", "--out", dir.string()});
    CHECK(run.status == 1);
    CHECK(run.err.find("\"error\":\"FileNotFound\"") != std::string::npos);
  }

  SUBCASE("unknown sweep parameter") {
    const CliRun run = cli({"sweep", "vein", "--param", "bogus.path", "--values", "0.1",
                            "--run", "cir", "--out", dir.string()});
    CHECK(run.status == 1);
    CHECK(run.err.find("\"error\":\"UnknownParameterPath\"") != std::string::npos);
  }

  SUBCASE("unsupported text message") {
    const CliRun run = cli({"text", "vein", "--cir-fractions", "1.0", "--message", "~",
                            "--out", dir.string()});
    CHECK(run.status == 1);
    CHECK(run.err.find("\"error\":\"UnsupportedCharacter\"") != std::string::npos);
  }

  SUBCASE("usage errors are tagged too") {
    const CliRun run = cli({"cir"});  // missing the scenario argument
    CHECK(run.status != 0);
    CHECK(run.err.find("\"error\":\"UsageError\"") != std::string::npos);
  }

  fs::remove_all(dir);
}

TEST_CASE("sweep writes per-value bundles and a summary") {
  const fs::path dir = fresh_dir("cli_sweep");
  const fs::path scenario = write_quick_scenario(dir);
  const fs::path out = dir / "sweep";
  const CliRun run = cli({"sweep", scenario.string(), "--param", "wall.leak_probability",
                          "--values", "0,0.5", "--run", "cir", "--bin-width", "0.02",
                          "--out", out.string(), "--seed", "7"});
  REQUIRE(run.status == 0);
  CHECK(fs::exists(out / "sweep.txt"));
  CHECK(fs::exists(out / "value_0" / "cir.txt"));
  CHECK(fs::exists(out / "value_0.5" / "cir.txt"));
  const std::string summary = slurp(out / "sweep.txt");
  CHECK(summary.find("# param wall.leak_probability") != std::string::npos);
  CHECK(summary.find("value_0.5") != std::string::npos);

  // The swept field actually changed in the per-value scenarios.
  const SimulationScenario swept =
      parse_scenario(slurp(out / "value_0.5" / "scenario.json"));
  CHECK(swept.wall.leak_probability == doctest::Approx(0.5));
  fs::remove_all(dir);
}
