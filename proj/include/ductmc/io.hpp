#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ductmc/channel.hpp"
#include "ductmc/comms.hpp"
#include "ductmc/relay.hpp"
#include "ductmc/transport.hpp"

namespace ductmc {

// Delimited CIR table: comment header (format tag, scenario digest, bin
// width, emitted count, column names), then one row per bin with the bin
// start time (6 decimals) and one integer count column per receiver.
// Deterministic for identical inputs.
std::string format_cir_table(const ChannelImpulseResponse& cir);
ChannelImpulseResponse parse_cir_table(const std::string& text);

// Single structured records, one JSON object each, trailing newline.
std::string format_ledger_record(const MassLedger& ledger);
std::string format_regime_record(const DimensionlessReport& report);
std::string format_relay_record(const RelayResult& result);

// BER table: one row per (value, seed) plus one mean/stderr summary row per
// distinct value label. Columns: value seed bits_compared bit_errors ber
// stderr ("-" where a field does not apply).
struct BerRow {
  std::string value_label = "-";
  std::uint64_t seed = 0;
  BerResult ber;
};

struct BerTable {
  std::vector<std::string> notes;  // extra "# key value" header lines
  std::vector<BerRow> rows;
};

std::string format_ber_table(const BerTable& table);

struct RunManifest {
  std::string scenario_digest;
  std::uint64_t seed = 0;
  std::string version;
  double duration_s = 0.0;  // wall clock; the one non-reproducible field
  std::vector<std::string> outputs;
};

std::string format_manifest(const RunManifest& manifest);
RunManifest parse_manifest(const std::string& text);

std::string read_text_file(const std::string& path);  // Error("FileNotFound")
void write_text_file(const std::string& path, const std::string& content);

}  // namespace ductmc
