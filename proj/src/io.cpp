#include "ductmc/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "ductmc/error.hpp"

namespace ductmc {

namespace {

using ordered_json = nlohmann::ordered_json;

// Shortest decimal form that round-trips the double exactly.
std::string shortest(double value) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  (void)ec;
  return std::string(buf, end);
}

std::string fixed6(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

ordered_json ber_json(const BerResult& ber) {
  return ordered_json{{"bits_compared", ber.bits_compared},
                      {"bit_errors", ber.bit_errors},
                      {"ber", ber.ber}};
}

}  // namespace

std::string format_cir_table(const ChannelImpulseResponse& cir) {
  std::ostringstream out;
  out << "# cir v1\n";
  out << "# scenario_digest " << cir.scenario_digest << "\n";
  out << "# bin_width_s " << shortest(cir.bin_width_s) << "\n";
  out << "# emitted " << cir.emitted << "\n";
  out << "# receivers " << cir.counts.size() << "\n";
  out << "# columns bin_start_s";
  for (size_t r = 0; r < cir.counts.size(); ++r) out << " count_rx" << r;
  out << "\n";
  for (size_t b = 0; b < cir.n_bins(); ++b) {
    out << fixed6(double(b) * cir.bin_width_s);
    for (const auto& column : cir.counts) out << " " << column[b];
    out << "\n";
  }
  return out.str();
}

ChannelImpulseResponse parse_cir_table(const std::string& text) {
  ChannelImpulseResponse cir;
  std::istringstream in(text);
  std::string line;
  size_t receivers = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      std::istringstream hl(line);
      std::string hash, key;
      hl >> hash >> key;
      if (key == "cir") header_seen = true;
      else if (key == "scenario_digest") hl >> cir.scenario_digest;
      else if (key == "bin_width_s") hl >> cir.bin_width_s;
      else if (key == "emitted") hl >> cir.emitted;
      else if (key == "receivers") hl >> receivers;
      continue;
    }
    if (!header_seen || receivers == 0)
      throw Error("ParseError", "CIR table is missing its header");
    if (cir.counts.empty()) cir.counts.resize(receivers);
    std::istringstream row(line);
    double bin_start = 0.0;
    row >> bin_start;
    for (size_t r = 0; r < receivers; ++r) {
      std::int64_t count = 0;
      if (!(row >> count)) throw Error("ParseError", "short CIR row");
      cir.counts[r].push_back(count);
    }
  }
  if (!header_seen) throw Error("ParseError", "not a CIR table");
  if (cir.counts.empty()) cir.counts.resize(receivers);
  return cir;
}

std::string format_ledger_record(const MassLedger& ledger) {
  ordered_json j;
  j["format"] = "ledger-v1";
  j["emitted"] = ledger.emitted;
  j["absorbed_per_receiver"] = ledger.absorbed_per_receiver;
  j["absorbed_total"] = ledger.absorbed_total();
  j["leaked"] = ledger.leaked;
  j["degraded"] = ledger.degraded;
  j["exited"] = ledger.exited;
  j["alive_at_end"] = ledger.alive_at_end;
  j["balanced"] = ledger.balanced();
  return j.dump(2) + "\n";
}

std::string format_regime_record(const DimensionlessReport& report) {
  ordered_json j;
  j["format"] = "regime-v1";
  j["peclet"] = report.peclet;
  if (report.dispersion_factor)
    j["dispersion_factor"] = *report.dispersion_factor;
  else
    j["dispersion_factor"] = nullptr;
  j["regime"] = to_string(report.regime);
  return j.dump(2) + "\n";
}

std::string format_relay_record(const RelayResult& result) {
  ordered_json j;
  j["format"] = "relay-v1";
  ordered_json hops = ordered_json::array();
  for (const RelayHopResult& hop : result.hops) {
    ordered_json h = ber_json(hop.ber);
    h["emitted"] = hop.emitted;
    hops.push_back(h);
  }
  j["hops"] = hops;
  j["end_to_end"] = ber_json(result.end_to_end);
  j["total_emitted"] = result.total_emitted;
  j["total_latency_s"] = result.total_latency_s;
  return j.dump(2) + "\n";
}

std::string format_ber_table(const BerTable& table) {
  std::ostringstream out;
  out << "# ber v1\n";
  for (const std::string& note : table.notes) out << "# " << note << "\n";
  out << "# columns value seed bits_compared bit_errors ber stderr\n";

  std::vector<std::string> order;
  for (const BerRow& row : table.rows) {
    if (std::find(order.begin(), order.end(), row.value_label) == order.end())
      order.push_back(row.value_label);
    out << row.value_label << " " << row.seed << " " << row.ber.bits_compared << " "
        << row.ber.bit_errors << " " << fixed6(row.ber.ber) << " -\n";
  }
  for (const std::string& label : order) {
    double sum = 0.0, sum_sq = 0.0;
    std::int64_t n = 0, bits = 0, errors = 0;
    for (const BerRow& row : table.rows) {
      if (row.value_label != label) continue;
      sum += row.ber.ber;
      sum_sq += row.ber.ber * row.ber.ber;
      bits += row.ber.bits_compared;
      errors += row.ber.bit_errors;
      ++n;
    }
    const double mean = n > 0 ? sum / double(n) : 0.0;
    double stderr_mean = 0.0;
    if (n > 1) {
      const double var = (sum_sq - double(n) * mean * mean) / double(n - 1);
      stderr_mean = std::sqrt(std::max(0.0, var) / double(n));
    }
    out << label << " mean " << bits << " " << errors << " " << fixed6(mean) << " "
        << fixed6(stderr_mean) << "\n";
  }
  return out.str();
}

std::string format_manifest(const RunManifest& manifest) {
  ordered_json j;
  j["format"] = "run-manifest-v1";
  j["scenario_digest"] = manifest.scenario_digest;
  j["seed"] = manifest.seed;
  j["version"] = manifest.version;
  j["duration_s"] = manifest.duration_s;
  j["outputs"] = manifest.outputs;
  return j.dump(2) + "\n";
}

RunManifest parse_manifest(const std::string& text) {
  RunManifest m;
  try {
    const auto j = ordered_json::parse(text);
    m.scenario_digest = j.at("scenario_digest").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.version = j.at("version").get<std::string>();
    m.duration_s = j.at("duration_s").get<double>();
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
  } catch (const ordered_json::exception& e) {
    throw Error("ParseError", std::string("bad manifest: ") + e.what());
  }
  return m;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("FileNotFound", "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("FileNotFound", "cannot write " + path);
  out << content;
}

}  // namespace ductmc
