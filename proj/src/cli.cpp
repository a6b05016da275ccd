#include "ductmc/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ductmc/channel.hpp"
#include "ductmc/comms.hpp"
#include "ductmc/io.hpp"
#include "ductmc/relay.hpp"
#include "ductmc/scenario_io.hpp"
#include "ductmc/transport.hpp"
#include "ductmc/validate.hpp"
#include "ductmc/version.hpp"

namespace ductmc {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string shortest(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  (void)ec;
  return std::string(buf, end);
}

std::vector<double> parse_csv_doubles(const std::string& csv) {
  std::vector<double> values;
  std::istringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      values.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw Error("InvalidField", "not a number in list: '" + item + "'");
    }
  }
  return values;
}

std::vector<int> parse_csv_ints(const std::string& csv) {
  std::vector<int> values;
  for (double v : parse_csv_doubles(csv)) values.push_back(int(std::llround(v)));
  return values;
}

SimulationScenario resolve_scenario(const std::string& ref) {
  for (const std::string& name : preset_names())
    if (name == ref) return preset_scenario(ref);
  return load_scenario_file(ref);
}

// Largest bin width near 10 time steps that divides the slot exactly.
double aligned_bin_width(double slot_s, double dt_s) {
  auto k = std::int64_t(std::llround(slot_s / (10.0 * dt_s)));
  if (k < 1) k = 1;
  return slot_s / double(k);
}

ChannelImpulseResponse synthetic_cir(const std::vector<double>& fractions, double slot_s) {
  ChannelImpulseResponse cir;
  cir.bin_width_s = slot_s;
  cir.emitted = 1000000;
  cir.scenario_digest = std::string(16, '0');
  cir.counts.resize(1);
  for (double f : fractions) {
    if (f < 0.0 || f > 1.0)
      throw Error("InvalidField", "arrival fractions must lie in [0, 1]");
    cir.counts[0].push_back(std::int64_t(std::llround(f * 1e6)));
  }
  if (cir.counts[0].empty())
    throw Error("InvalidField", "an arrival-fraction channel needs at least one value");
  return cir;
}

Bits random_bits(std::uint64_t seed, size_t n) {
  RngStream rng(seed, lane_stream(0, lanes::kBits));
  Bits bits(n, 0);
  for (size_t i = 0; i < n; ++i) bits[i] = rng.bernoulli(0.5) ? 1 : 0;
  return bits;
}

// Collects output files for one command and closes with the manifest.
class OutputSink {
 public:
  explicit OutputSink(const std::string& dir) : dir_(dir) {
    std::filesystem::create_directories(dir_);
    start_ = std::chrono::steady_clock::now();
  }

  void write(const std::string& name, const std::string& content) {
    write_text_file((dir_ / name).string(), content);
    names_.push_back(name);
  }

  void finish(const std::string& digest, std::uint64_t seed) {
    RunManifest manifest;
    manifest.scenario_digest = digest;
    manifest.seed = seed;
    manifest.version = kVersion;
    manifest.duration_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    manifest.outputs = names_;
    write_text_file((dir_ / "manifest.json").string(), format_manifest(manifest));
  }

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> names_;
  std::chrono::steady_clock::time_point start_;
};

struct CommonOpts {
  std::uint64_t seed = 0;
  // Set during parsing; a bare Option* would be overwritten as every
  // subcommand registers its own --seed against this shared struct.
  bool seed_given = false;
  int workers = 1;
  std::string out = ".";
  std::string mode = "semi-analytic";

  bool full_particle() const { return mode == "full-particle"; }
  std::uint64_t effective_seed(const SimulationScenario& sc) const {
    return seed_given ? seed : sc.seed;
  }
};

void add_common(CLI::App* sub, CommonOpts& c, bool with_mode) {
  sub->add_option("--seed", c.seed, "Override the scenario seed")
      ->each([&c](const std::string&) { c.seed_given = true; });
  sub->add_option("--workers", c.workers, "Worker threads (never changes results)")
      ->check(CLI::Range(1, 256));
  sub->add_option("--out", c.out, "Output directory")->capture_default_str();
  if (with_mode)
    sub->add_option("--mode", c.mode, "Reception model")
        ->check(CLI::IsMember({"semi-analytic", "full-particle"}))
        ->capture_default_str();
}

// Link-layer flags shared by ber, text and relay.
struct LinkOpts {
  std::string scheme = "bcsk";
  std::int64_t molecules = 1000;
  double symbol_duration = 1.0;
  int slots = 4;
  std::string mosk_species = "";
  std::string detector = "fixed";
  double threshold = -1.0;
  double base_threshold = -1.0;
  int isi_memory = 3;
  std::string coding = "none";
  std::string cir_fractions = "";
};

void add_link_flags(CLI::App* sub, LinkOpts& l, bool with_scheme) {
  if (with_scheme)
    sub->add_option("--scheme", l.scheme, "Modulation scheme")
        ->check(CLI::IsMember({"bcsk", "ppm", "mosk"}))
        ->capture_default_str();
  sub->add_option("--molecules", l.molecules, "Molecules per pulse")->capture_default_str();
  sub->add_option("--symbol-duration", l.symbol_duration, "Symbol duration in seconds")
      ->capture_default_str();
  if (with_scheme) {
    sub->add_option("--slots", l.slots, "PPM sub-slots per symbol")->capture_default_str();
    sub->add_option("--mosk-species", l.mosk_species,
                    "Comma-separated species ids for MoSK (default: first two in the scenario)");
  }
  sub->add_option("--detector", l.detector, "Detection policy")
      ->check(CLI::IsMember({"fixed", "adaptive"}))
      ->capture_default_str();
  sub->add_option("--threshold", l.threshold,
                  "Fixed decision threshold (default: molecules / 2)");
  sub->add_option("--base-threshold", l.base_threshold,
                  "Adaptive base threshold (default: molecules / 2)");
  sub->add_option("--isi-memory", l.isi_memory, "Adaptive symbol memory")
      ->capture_default_str();
  sub->add_option("--coding", l.coding, "Channel coding")
      ->check(CLI::IsMember({"none", "constrained"}))
      ->capture_default_str();
  sub->add_option("--cir-fractions", l.cir_fractions,
                  "Comma-separated per-slot arrival fractions; replaces the simulated "
                  "channel with this synthetic one");
}

ModulationScheme build_scheme(const LinkOpts& l, const SimulationScenario& sc) {
  ModulationScheme scheme;
  if (l.scheme == "bcsk") {
    scheme = bcsk(l.molecules, l.symbol_duration);
  } else if (l.scheme == "ppm") {
    scheme = ppm(l.slots, l.molecules, l.symbol_duration);
  } else {
    std::vector<int> ids = parse_csv_ints(l.mosk_species);
    if (ids.empty())
      for (const MoleculeSpecies& sp : sc.species) {
        ids.push_back(sp.species_id);
        if (ids.size() == 2) break;
      }
    if (ids.size() < 2)
      throw Error("BadSchemeArity", "MoSK needs at least two species ids");
    scheme = mosk(ids, l.molecules, l.symbol_duration);
  }
  if (!sc.species.empty()) scheme.species_id = sc.species.front().species_id;
  return scheme;
}

DetectionConfig build_detection(const LinkOpts& l) {
  DetectionConfig d;
  const double fallback = double(l.molecules) / 2.0;
  if (l.detector == "fixed") {
    d.kind = DetectionConfig::Kind::Fixed;
    d.threshold = l.threshold >= 0.0 ? l.threshold : fallback;
  } else {
    d.kind = DetectionConfig::Kind::Adaptive;
    d.base_threshold = l.base_threshold >= 0.0 ? l.base_threshold : fallback;
    d.isi_memory = l.isi_memory;
  }
  return d;
}

struct LinkRun {
  Bits detected_data;
  BerResult ber;
  std::int64_t channel_bits = 0;
};

// One end-to-end pass: code, modulate, cross the channel, detect, decode.
LinkRun run_link_once(const SimulationScenario& sc, const ModulationScheme& scheme,
                      const DetectionConfig& detection, bool constrained,
                      bool full_particle, const ChannelImpulseResponse* cir,
                      const Bits& data_bits, std::uint64_t seed, int workers) {
  Bits channel_bits = data_bits;
  if (constrained) channel_bits = encode_constrained(data_bits).bits;

  const ModulationResult mod = modulate(channel_bits, scheme);
  const double slot = detection_slot_duration(scheme);
  const size_t n_slots =
      size_t(mod.n_symbols) *
      (scheme.kind == SchemeKind::PPM ? size_t(scheme.slots_per_symbol) : 1);

  ReceivedFrame frame;
  if (full_particle) {
    SimulationScenario run_sc = sc;
    run_sc.seed = seed;
    frame = synthesize_received_full_particle(run_sc, mod.schedule, slot, n_slots, workers);
  } else {
    if (cir == nullptr) throw Error("EmptyCir", "semi-analytic reception needs a channel");
    std::map<int, const ChannelImpulseResponse*> by_species;
    by_species[scheme.species_id] = cir;
    for (int id : scheme.species_ids) by_species[id] = cir;
    RngStream rng(seed, lane_stream(0, lanes::kReception));
    frame = synthesize_received_semi_analytic(mod.schedule, by_species, 0, slot, n_slots, rng);
  }

  Bits out = detect(frame, scheme, detection, cir);
  LinkRun run;
  run.channel_bits = std::int64_t(channel_bits.size());
  if (constrained) {
    out.resize(channel_bits.size());
    out = decode_constrained_nearest(out);
  }
  out.resize(data_bits.size());
  run.ber = evaluate_ber(data_bits, out);
  run.detected_data = std::move(out);
  return run;
}

// Measures the scenario impulse response when the link needs one.
std::optional<ChannelImpulseResponse> measure_link_cir(
    const SimulationScenario& sc, const ModulationScheme& scheme, bool full_particle,
    const DetectionConfig& detection, const std::vector<double>& fractions, int workers) {
  if (!fractions.empty()) return std::nullopt;  // synthetic channel covers it
  const bool needed =
      !full_particle || detection.kind == DetectionConfig::Kind::Adaptive;
  if (!needed) return std::nullopt;
  const double slot = detection_slot_duration(scheme);
  return simulate_cir(sc, workers, aligned_bin_width(slot, sc.time_step_s)).cir;
}

SimulationResult write_cir_outputs(const SimulationScenario& sc, const CommonOpts& common,
                                   double bin_width) {
  OutputSink sink(common.out);
  const SimulationResult result = simulate_cir(sc, common.workers, bin_width);
  sink.write("cir.txt", format_cir_table(result.cir));
  sink.write("ledger.json", format_ledger_record(result.ledger));
  sink.write("scenario.json", serialize_scenario(sc));
  sink.finish(scenario_digest(sc), sc.seed);
  return result;
}

int cmd_cir(const std::string& scenario_ref, const CommonOpts& common, double bin_width) {
  SimulationScenario sc = resolve_scenario(scenario_ref);
  sc.seed = common.effective_seed(sc);
  const SimulationResult result = write_cir_outputs(sc, common, bin_width);
  std::cout << format_ledger_record(result.ledger);
  return 0;
}

int cmd_regime(const std::string& scenario_ref, const CommonOpts& common) {
  SimulationScenario sc = resolve_scenario(scenario_ref);
  sc.seed = common.effective_seed(sc);
  require_valid(sc);
  const DimensionlessReport report =
      classify_flow_regime(sc.geometry, sc.flow, sc.species.front());
  const std::string record = format_regime_record(report);
  OutputSink sink(common.out);
  sink.write("regime.json", record);
  sink.write("scenario.json", serialize_scenario(sc));
  sink.finish(scenario_digest(sc), sc.seed);
  std::cout << record;
  return 0;
}

BerTable run_ber_table(const SimulationScenario& sc, const LinkOpts& link,
                       const CommonOpts& common, std::int64_t bits_n, int seeds,
                       const std::string& value_label) {
  const ModulationScheme scheme = build_scheme(link, sc);
  const DetectionConfig detection = build_detection(link);
  const bool constrained = link.coding == "constrained";
  const std::vector<double> fractions = parse_csv_doubles(link.cir_fractions);

  std::optional<ChannelImpulseResponse> synthetic;
  if (!fractions.empty())
    synthetic = synthetic_cir(fractions, detection_slot_duration(scheme));
  const std::optional<ChannelImpulseResponse> measured = measure_link_cir(
      sc, scheme, common.full_particle(), detection, fractions, common.workers);
  const ChannelImpulseResponse* cir =
      synthetic ? &*synthetic : (measured ? &*measured : nullptr);

  const std::uint64_t base_seed = common.effective_seed(sc);
  BerTable table;
  table.notes.push_back("scheme " + link.scheme);
  table.notes.push_back("detector " + link.detector);
  table.notes.push_back("coding " + link.coding);
  table.notes.push_back("mode " + common.mode);
  table.notes.push_back("data_bits " + std::to_string(bits_n));
  bool channel_bits_noted = false;
  for (int i = 0; i < seeds; ++i) {
    const std::uint64_t seed = base_seed + std::uint64_t(i);
    const Bits data = random_bits(seed, size_t(bits_n));
    const LinkRun run = run_link_once(sc, scheme, detection, constrained,
                                      common.full_particle(), cir, data, seed,
                                      common.workers);
    if (!channel_bits_noted) {
      table.notes.push_back("channel_bits " + std::to_string(run.channel_bits));
      channel_bits_noted = true;
    }
    table.rows.push_back({value_label, seed, run.ber});
  }
  return table;
}

int cmd_ber(const std::string& scenario_ref, const LinkOpts& link, const CommonOpts& common,
            std::int64_t bits_n, int seeds) {
  SimulationScenario sc = resolve_scenario(scenario_ref);
  sc.seed = common.effective_seed(sc);
  const BerTable table = run_ber_table(sc, link, common, bits_n, seeds, "-");
  OutputSink sink(common.out);
  sink.write("ber.txt", format_ber_table(table));
  sink.write("scenario.json", serialize_scenario(sc));
  sink.finish(scenario_digest(sc), sc.seed);
  std::cout << format_ber_table(table);
  return 0;
}

int cmd_text(const std::string& scenario_ref, const LinkOpts& link, const CommonOpts& common,
             const std::string& message, int seeds) {
  SimulationScenario sc = resolve_scenario(scenario_ref);
  sc.seed = common.effective_seed(sc);
  const Ita2EncodeResult encoded = ita2_encode(message);
  const ModulationScheme scheme = build_scheme(link, sc);
  const DetectionConfig detection = build_detection(link);
  const bool constrained = link.coding == "constrained";
  const std::vector<double> fractions = parse_csv_doubles(link.cir_fractions);

  std::optional<ChannelImpulseResponse> synthetic;
  if (!fractions.empty())
    synthetic = synthetic_cir(fractions, detection_slot_duration(scheme));
  const std::optional<ChannelImpulseResponse> measured = measure_link_cir(
      sc, scheme, common.full_particle(), detection, fractions, common.workers);
  const ChannelImpulseResponse* cir =
      synthetic ? &*synthetic : (measured ? &*measured : nullptr);

  const std::uint64_t base_seed = common.effective_seed(sc);
  ordered_json report;
  report["format"] = "text-v1";
  report["message"] = message;
  report["telegraph_bits"] = encoded.bits.size();
  report["shifts_inserted"] = encoded.shifts_inserted;
  ordered_json runs = ordered_json::array();
  for (int i = 0; i < seeds; ++i) {
    const std::uint64_t seed = base_seed + std::uint64_t(i);
    const LinkRun run = run_link_once(sc, scheme, detection, constrained,
                                      common.full_particle(), cir, encoded.bits, seed,
                                      common.workers);
    ordered_json entry;
    entry["seed"] = seed;
    entry["decoded"] = ita2_decode_lossy(run.detected_data);
    entry["bits_compared"] = run.ber.bits_compared;
    entry["bit_errors"] = run.ber.bit_errors;
    entry["ber"] = run.ber.ber;
    runs.push_back(entry);
  }
  report["runs"] = runs;
  const std::string record = report.dump(2) + "\n";
  OutputSink sink(common.out);
  sink.write("text_report.json", record);
  sink.write("scenario.json", serialize_scenario(sc));
  sink.finish(scenario_digest(sc), sc.seed);
  std::cout << record;
  return 0;
}

int cmd_relay(const std::string& scenario_ref, const LinkOpts& link, const CommonOpts& common,
              int hops, std::int64_t bits_n, int seeds, double delay) {
  SimulationScenario sc = resolve_scenario(scenario_ref);
  sc.seed = common.effective_seed(sc);
  const ModulationScheme scheme = build_scheme(link, sc);
  const DetectionConfig detection = build_detection(link);
  RelayChain chain = valve_aligned_placement(sc, hops, scheme, detection, delay);
  const ReceptionMode mode = common.full_particle() ? ReceptionMode::FullParticle
                                                    : ReceptionMode::SemiAnalytic;
  if (mode == ReceptionMode::SemiAnalytic)
    chain = with_measured_cirs(chain, scheme, common.workers);

  const std::uint64_t base_seed = common.effective_seed(sc);
  ordered_json report;
  report["format"] = "relay-report-v1";
  report["hops"] = hops;
  ordered_json runs = ordered_json::array();
  for (int i = 0; i < seeds; ++i) {
    const std::uint64_t seed = base_seed + std::uint64_t(i);
    const Bits bits = random_bits(seed, size_t(bits_n));
    const RelayResult result = simulate_relay_chain(chain, bits, seed, mode, common.workers);
    ordered_json entry = ordered_json::parse(format_relay_record(result));
    entry.erase("format");
    ordered_json tagged;
    tagged["seed"] = seed;
    for (auto& [key, value] : entry.items()) tagged[key] = value;
    runs.push_back(tagged);
  }
  report["runs"] = runs;
  const std::string record = report.dump(2) + "\n";
  OutputSink sink(common.out);
  sink.write("relay.json", record);
  sink.write("scenario.json", serialize_scenario(sc));
  sink.finish(scenario_digest(sc), sc.seed);
  std::cout << record;
  return 0;
}

int cmd_mimo(const std::string& scenario_ref, const CommonOpts& common, double bin_width,
             bool auto_pair) {
  SimulationScenario sc = resolve_scenario(scenario_ref);
  sc.seed = common.effective_seed(sc);
  if (auto_pair) {
    if (sc.receivers.empty())
      throw Error("BadPlacement", "auto-pair needs a receiver to mirror");
    const double pi = 3.14159265358979323846;
    sc.tx_position_b =
        SurfacePoint{sc.tx_position.axial_um, sc.tx_position.wall_anchor_angle_rad + pi};
    const ReceiverSpec rx0 = sc.receivers.front();
    ReceiverSpec rx1 = rx0;
    rx1.wall_anchor_angle_rad += pi;
    sc.receivers = {rx0, rx1};
  }
  const MimoLink link = simulate_mimo(sc, common.workers, bin_width);

  OutputSink sink(common.out);
  ordered_json summary;
  summary["format"] = "mimo-v1";
  for (int rx = 0; rx < 2; ++rx) {
    for (int tx = 0; tx < 2; ++tx) {
      const std::string name =
          "cir_rx" + std::to_string(rx) + "_tx" + std::to_string(tx) + ".txt";
      sink.write(name, format_cir_table(link.h[size_t(rx)][size_t(tx)]));
      const std::string key = "h" + std::to_string(rx) + std::to_string(tx);
      std::int64_t total = 0;
      for (std::int64_t c : link.h[size_t(rx)][size_t(tx)].counts[0]) total += c;
      summary[key + "_absorbed"] = total;
    }
  }
  sink.write("ledger_tx0.json", format_ledger_record(link.ledger_tx0));
  sink.write("ledger_tx1.json", format_ledger_record(link.ledger_tx1));
  sink.write("scenario.json", serialize_scenario(sc));
  sink.finish(scenario_digest(sc), sc.seed);
  const std::string record = summary.dump(2) + "\n";
  std::cout << record;
  return 0;
}

SimulationScenario apply_param(const SimulationScenario& sc, const std::string& path,
                               double value) {
  std::string pointer = "/" + path;
  std::replace(pointer.begin(), pointer.end(), '.', '/');
  ordered_json j;
  try {
    j = ordered_json::parse(serialize_scenario(sc));
    const ordered_json::json_pointer ptr(pointer);
    if (!j.contains(ptr))
      throw Error("UnknownParameterPath", "no scenario field at '" + path + "'");
    if (!j.at(ptr).is_number())
      throw Error("UnknownParameterPath", "'" + path + "' is not a scalar field");
    j[ptr] = value;
  } catch (const ordered_json::exception&) {
    throw Error("UnknownParameterPath", "no scenario field at '" + path + "'");
  }
  return parse_scenario(j.dump());
}

int cmd_sweep(const std::string& scenario_ref, const CommonOpts& common,
              const std::string& param, const std::string& values_csv,
              const std::string& run_kind, const LinkOpts& link, std::int64_t bits_n,
              int seeds, double bin_width) {
  SimulationScenario sc = resolve_scenario(scenario_ref);
  sc.seed = common.effective_seed(sc);
  const std::vector<double> values = parse_csv_doubles(values_csv);

  OutputSink sink(common.out);
  std::ostringstream summary;
  summary << "# sweep v1\n";
  summary << "# param " << param << "\n";
  summary << "# run " << run_kind << "\n";

  if (run_kind == "cir") {
    summary << "# columns value dir peak_time_s peak_amplitude total_absorbed "
               "tail_fraction\n";
    double tail_after = -1.0;
    for (double value : values) {
      const SimulationScenario sc_v = apply_param(sc, param, value);
      const std::string label = shortest(value);
      CommonOpts sub_common = common;
      sub_common.out = (sink.dir() / ("value_" + label)).string();
      const SimulationResult result = write_cir_outputs(sc_v, sub_common, bin_width);
      summary << label << " value_" << label;
      try {
        const CirStatistics base_stats = cir_statistics(result.cir, 0, 0.0);
        if (tail_after < 0.0) tail_after = 2.0 * base_stats.peak_time_s;
        const CirStatistics stats = cir_statistics(result.cir, 0, tail_after);
        summary << " " << shortest(stats.peak_time_s) << " " << stats.peak_amplitude << " "
                << stats.total_absorbed << " " << shortest(stats.tail_fraction) << "\n";
      } catch (const Error&) {
        summary << " - 0 0 -\n";
      }
    }
  } else {
    summary << "# columns value seed bits_compared bit_errors ber stderr\n";
    BerTable table;
    for (double value : values) {
      const SimulationScenario sc_v = apply_param(sc, param, value);
      const std::string label = shortest(value);
      CommonOpts sub_common = common;
      sub_common.out = (sink.dir() / ("value_" + label)).string();
      const BerTable part = run_ber_table(sc_v, link, sub_common, bits_n, seeds, label);
      OutputSink sub_sink(sub_common.out);
      sub_sink.write("ber.txt", format_ber_table(part));
      sub_sink.write("scenario.json", serialize_scenario(sc_v));
      sub_sink.finish(scenario_digest(sc_v), sc_v.seed);
      for (const BerRow& row : part.rows) table.rows.push_back(row);
    }
    std::string body = format_ber_table(table);
    // Drop the table's own header; the sweep header already names columns.
    while (!body.empty() && body.front() == '#')
      body.erase(0, body.find('\n') + 1);
    summary << body;
  }

  sink.write("sweep.txt", summary.str());
  sink.write("scenario.json", serialize_scenario(sc));
  sink.finish(scenario_digest(sc), sc.seed);
  std::cout << summary.str();
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Particle-level duct channel simulator and link harness"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  std::string scenario_ref;
  CommonOpts common;
  LinkOpts link;
  double bin_width = 0.0;
  std::int64_t bits_n = 1000;
  int seeds = 5;
  std::string message = "HELLO";
  int hops = 1;
  double delay = 0.0;
  bool auto_pair = false;
  std::string param, values_csv, run_kind = "cir";

  CLI::App* cir = app.add_subcommand("cir", "Impulse response and mass ledger");
  cir->add_option("scenario", scenario_ref, "Preset name or scenario file")->required();
  add_common(cir, common, false);
  cir->add_option("--bin-width", bin_width, "Histogram bin width in seconds (0 = auto)");

  CLI::App* regime = app.add_subcommand("regime", "Dimensionless transport report");
  regime->add_option("scenario", scenario_ref, "Preset name or scenario file")->required();
  add_common(regime, common, false);

  CLI::App* ber = app.add_subcommand("ber", "Bit error rate over seeds");
  ber->add_option("scenario", scenario_ref, "Preset name or scenario file")->required();
  add_common(ber, common, true);
  add_link_flags(ber, link, true);
  ber->add_option("--bits", bits_n, "Data bits per seed")->capture_default_str();
  ber->add_option("--seeds", seeds, "Number of seeds")->capture_default_str();

  CLI::App* text = app.add_subcommand("text", "Telegraph text over the duct link");
  text->add_option("scenario", scenario_ref, "Preset name or scenario file")->required();
  add_common(text, common, true);
  add_link_flags(text, link, false);
  text->add_option("--message", message, "Message to transmit")->capture_default_str();
  text->add_option("--seeds", seeds, "Number of seeds")->capture_default_str();

  CLI::App* relay = app.add_subcommand("relay", "Decode-and-forward relay chain");
  relay->add_option("scenario", scenario_ref, "Preset name or scenario file")->required();
  add_common(relay, common, true);
  add_link_flags(relay, link, false);
  relay->add_option("--hops", hops, "Hop count (boundaries at valve planes)")
      ->capture_default_str();
  relay->add_option("--bits", bits_n, "Data bits per seed")->capture_default_str();
  relay->add_option("--seeds", seeds, "Number of seeds")->capture_default_str();
  relay->add_option("--delay", delay, "Relay processing delay in seconds")
      ->capture_default_str();

  CLI::App* mimo = app.add_subcommand("mimo", "Two-transmitter, two-receiver responses");
  mimo->add_option("scenario", scenario_ref, "Preset name or scenario file")->required();
  add_common(mimo, common, false);
  mimo->add_option("--bin-width", bin_width, "Histogram bin width in seconds (0 = auto)");
  mimo->add_flag("--auto-pair", auto_pair,
                 "Mirror the transmitter and receiver across the duct axis to form the "
                 "second link");

  CLI::App* sweep = app.add_subcommand("sweep", "Run a command across parameter values");
  sweep->add_option("scenario", scenario_ref, "Preset name or scenario file")->required();
  add_common(sweep, common, true);
  sweep->add_option("--param", param, "Scenario field path, e.g. wall.leak_probability")
      ->required();
  sweep->add_option("--values", values_csv, "Comma-separated values")->required();
  sweep->add_option("--run", run_kind, "Command to run per value")
      ->check(CLI::IsMember({"cir", "ber"}))
      ->capture_default_str();
  add_link_flags(sweep, link, true);
  sweep->add_option("--bits", bits_n, "Data bits per seed (ber)")->capture_default_str();
  sweep->add_option("--seeds", seeds, "Number of seeds (ber)")->capture_default_str();
  sweep->add_option("--bin-width", bin_width, "Histogram bin width in seconds (cir)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    ordered_json record;
    record["error"] = "UsageError";
    record["message"] = e.what();
    std::cerr << record.dump() << "\n";
    return e.get_exit_code();
  }

  try {
    if (cir->parsed()) return cmd_cir(scenario_ref, common, bin_width);
    if (regime->parsed()) return cmd_regime(scenario_ref, common);
    if (ber->parsed()) return cmd_ber(scenario_ref, link, common, bits_n, seeds);
    if (text->parsed()) return cmd_text(scenario_ref, link, common, message, seeds);
    if (relay->parsed())
      return cmd_relay(scenario_ref, link, common, hops, bits_n, seeds, delay);
    if (mimo->parsed()) return cmd_mimo(scenario_ref, common, bin_width, auto_pair);
    if (sweep->parsed())
      return cmd_sweep(scenario_ref, common, param, values_csv, run_kind, link, bits_n,
                       seeds, bin_width);
  } catch (const Error& e) {
    ordered_json record;
    record["error"] = e.code();
    record["message"] = e.what();
    std::cerr << record.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    ordered_json record;
    record["error"] = "Internal";
    record["message"] = e.what();
    std::cerr << record.dump() << "\n";
    return 1;
  }
  return 0;
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<std::string> full;
  full.reserve(args.size() + 1);
  full.push_back("ductmc");
  full.insert(full.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(full.size());
  for (const std::string& arg : full) argv.push_back(arg.c_str());
  return run_cli(int(argv.size()), argv.data());
}

}  // namespace ductmc
