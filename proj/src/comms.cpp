#include "ductmc/comms.hpp"

#include <algorithm>
#include <cmath>

#include "ductmc/scenario_io.hpp"

namespace ductmc {

namespace {

bool power_of_two(std::int64_t v) { return v > 0 && (v & (v - 1)) == 0; }

int log2_int(std::int64_t v) {
  int bits = 0;
  while ((std::int64_t(1) << bits) < v) ++bits;
  return bits;
}

std::int64_t symbol_value(const Bits& bits, size_t offset, int width) {
  std::int64_t value = 0;
  for (int b = 0; b < width; ++b) {
    const std::uint8_t bit = offset + size_t(b) < bits.size() ? bits[offset + size_t(b)] : 0;
    if (bit > 1) throw Error("InvalidField", "bits must be 0 or 1");
    value = (value << 1) | bit;
  }
  return value;
}

void append_symbol_bits(Bits& bits, std::int64_t value, int width) {
  for (int b = width - 1; b >= 0; --b) bits.push_back(std::uint8_t((value >> b) & 1));
}

int species_column(const ReceivedFrame& frame, int species_id) {
  for (size_t i = 0; i < frame.species_ids.size(); ++i)
    if (frame.species_ids[i] == species_id) return int(i);
  throw Error("UnknownSpecies", "frame has no column for species " + std::to_string(species_id));
}

}  // namespace

ModulationScheme bcsk(std::int64_t molecules, double symbol_duration_s) {
  ModulationScheme s;
  s.kind = SchemeKind::CSK;
  s.symbol_duration_s = symbol_duration_s;
  s.molecules_per_level = {0, molecules};
  return s;
}

ModulationScheme ppm(int slots_per_symbol, std::int64_t molecules, double symbol_duration_s) {
  ModulationScheme s;
  s.kind = SchemeKind::PPM;
  s.symbol_duration_s = symbol_duration_s;
  s.slots_per_symbol = slots_per_symbol;
  s.molecules = molecules;
  return s;
}

ModulationScheme mosk(std::vector<int> species_ids, std::int64_t molecules,
                      double symbol_duration_s) {
  ModulationScheme s;
  s.kind = SchemeKind::MoSK;
  s.symbol_duration_s = symbol_duration_s;
  s.species_ids = std::move(species_ids);
  s.molecules = molecules;
  return s;
}

int bits_per_symbol(const ModulationScheme& scheme) {
  switch (scheme.kind) {
    case SchemeKind::CSK: {
      const std::int64_t levels = std::int64_t(scheme.molecules_per_level.size());
      if (levels < 2 || !power_of_two(levels))
        throw Error("BadSchemeArity", "CSK needs a power-of-two level count >= 2");
      return log2_int(levels);
    }
    case SchemeKind::PPM:
      if (scheme.slots_per_symbol < 2 || !power_of_two(scheme.slots_per_symbol))
        throw Error("BadSchemeArity", "PPM needs a power-of-two slot count >= 2");
      return log2_int(scheme.slots_per_symbol);
    case SchemeKind::MoSK: {
      const std::int64_t n = std::int64_t(scheme.species_ids.size());
      if (n < 2 || !power_of_two(n))
        throw Error("BadSchemeArity", "MoSK needs a power-of-two species count >= 2");
      return log2_int(n);
    }
  }
  throw Error("BadSchemeArity", "unknown scheme kind");
}

double detection_slot_duration(const ModulationScheme& scheme) {
  if (scheme.kind == SchemeKind::PPM)
    return scheme.symbol_duration_s / double(scheme.slots_per_symbol);
  return scheme.symbol_duration_s;
}

ModulationResult modulate(const Bits& bits, const ModulationScheme& scheme) {
  if (!(scheme.symbol_duration_s > 0.0))
    throw Error("InvalidField", "symbol duration must be positive");
  const int width = bits_per_symbol(scheme);
  ModulationResult result;
  result.n_symbols = int((bits.size() + size_t(width) - 1) / size_t(width));
  result.padded_bits = result.n_symbols * width - int(bits.size());

  for (int sym = 0; sym < result.n_symbols; ++sym) {
    const std::int64_t value = symbol_value(bits, size_t(sym) * size_t(width), width);
    const double t0 = double(sym) * scheme.symbol_duration_s;
    switch (scheme.kind) {
      case SchemeKind::CSK: {
        const std::int64_t count = scheme.molecules_per_level[size_t(value)];
        if (count > 0)
          result.schedule.push_back({t0, count, scheme.species_id, 0});
        break;
      }
      case SchemeKind::PPM: {
        if (scheme.molecules <= 0) throw Error("InvalidField", "PPM needs a positive pulse size");
        const double slot = scheme.symbol_duration_s / double(scheme.slots_per_symbol);
        result.schedule.push_back({t0 + double(value) * slot, scheme.molecules,
                                   scheme.species_id, 0});
        break;
      }
      case SchemeKind::MoSK: {
        if (scheme.molecules <= 0) throw Error("InvalidField", "MoSK needs a positive pulse size");
        result.schedule.push_back({t0, scheme.molecules,
                                   scheme.species_ids[size_t(value)], 0});
        break;
      }
    }
  }
  return result;
}

std::vector<double> slot_fractions(const ChannelImpulseResponse& cir, int receiver,
                                   double slot_duration_s, size_t max_lags) {
  if (receiver < 0 || size_t(receiver) >= cir.counts.size())
    throw Error("InvalidField", "receiver index out of range");
  if (cir.emitted <= 0) throw Error("EmptyCir", "impulse response has no emitted count");
  const double ratio = slot_duration_s / cir.bin_width_s;
  const auto bins_per_slot = std::int64_t(std::llround(ratio));
  if (bins_per_slot < 1 || std::abs(ratio - double(bins_per_slot)) > 1e-6)
    throw Error("BinSlotMismatch", "CIR bin width must divide the slot duration");
  const std::vector<std::int64_t>& col = cir.counts[size_t(receiver)];
  std::vector<double> fractions(max_lags, 0.0);
  for (size_t b = 0; b < col.size(); ++b) {
    const size_t lag = b / size_t(bins_per_slot);
    if (lag >= max_lags) break;
    fractions[lag] += double(col[b]) / double(cir.emitted);
  }
  return fractions;
}

std::int64_t binomial_draw(RngStream& rng, std::int64_t n, double p) {
  if (n < 0) throw Error("InvalidField", "binomial draw needs n >= 0");
  if (n == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  if (n <= 64) {
    std::int64_t hits = 0;
    for (std::int64_t i = 0; i < n; ++i)
      if (rng.uniform() < p) ++hits;
    return hits;
  }
  // waiting-time method: expected cost n*p draws
  const double log_q = std::log1p(-p);
  std::int64_t hits = 0;
  std::int64_t pos = 0;
  while (true) {
    const double u = rng.uniform_open();
    pos += std::int64_t(std::floor(std::log(u) / log_q)) + 1;
    if (pos > n) break;
    ++hits;
  }
  return hits;
}

ReceivedFrame make_received_frame(double slot_duration_s, size_t n_slots,
                                  std::vector<int> species_ids, size_t n_receivers) {
  ReceivedFrame frame;
  frame.slot_duration_s = slot_duration_s;
  frame.n_slots = n_slots;
  frame.species_ids = std::move(species_ids);
  frame.counts.assign(n_receivers,
                      std::vector<std::vector<std::int64_t>>(
                          frame.species_ids.size(), std::vector<std::int64_t>(n_slots, 0)));
  return frame;
}

void accumulate_semi_analytic(ReceivedFrame& frame, int frame_receiver,
                              const TxSchedule& schedule,
                              const std::map<int, const ChannelImpulseResponse*>& cir_by_species,
                              int cir_receiver, RngStream& rng) {
  for (const EmissionEvent& em : schedule) {
    const auto it = cir_by_species.find(em.species_id);
    if (it == cir_by_species.end() || it->second == nullptr)
      throw Error("UnknownSpecies",
                  "no impulse response for species " + std::to_string(em.species_id));
    const ChannelImpulseResponse& cir = *it->second;
    if (cir_receiver < 0 || size_t(cir_receiver) >= cir.counts.size())
      throw Error("InvalidField", "receiver index out of range");
    if (cir.emitted <= 0) throw Error("EmptyCir", "impulse response has no emitted count");

    const double ratio = frame.slot_duration_s / cir.bin_width_s;
    const auto bins_per_slot = std::int64_t(std::llround(ratio));
    if (bins_per_slot < 1 || std::abs(ratio - double(bins_per_slot)) > 1e-6)
      throw Error("BinSlotMismatch", "CIR bin width must divide the slot duration");
    const auto offset_bins = std::int64_t(std::llround(em.time_s / cir.bin_width_s));

    const int column = species_column(frame, em.species_id);
    const std::vector<std::int64_t>& col = cir.counts[size_t(cir_receiver)];
    std::vector<std::int64_t>& dst = frame.counts.at(size_t(frame_receiver))[size_t(column)];
    for (size_t b = 0; b < col.size(); ++b) {
      if (col[b] == 0) continue;
      const std::int64_t global_bin = offset_bins + std::int64_t(b);
      const std::int64_t slot = global_bin / bins_per_slot;
      if (slot < 0 || size_t(slot) >= frame.n_slots) continue;
      const double p = double(col[b]) / double(cir.emitted);
      dst[size_t(slot)] += binomial_draw(rng, em.count, p);
    }
  }
}

ReceivedFrame synthesize_received_semi_analytic(
    const TxSchedule& schedule,
    const std::map<int, const ChannelImpulseResponse*>& cir_by_species, int receiver,
    double slot_duration_s, size_t n_slots, RngStream& rng) {
  std::vector<int> ids;
  for (const auto& [species_id, cir] : cir_by_species) ids.push_back(species_id);
  ReceivedFrame frame = make_received_frame(slot_duration_s, n_slots, std::move(ids), 1);
  accumulate_semi_analytic(frame, 0, schedule, cir_by_species, receiver, rng);
  return frame;
}

ReceivedFrame synthesize_received_full_particle(const SimulationScenario& scenario,
                                                const TxSchedule& schedule,
                                                double slot_duration_s, size_t n_slots,
                                                int workers) {
  std::vector<int> ids;
  for (const MoleculeSpecies& sp : scenario.species) ids.push_back(sp.species_id);
  ReceivedFrame frame = make_received_frame(slot_duration_s, n_slots, std::move(ids),
                                            scenario.receivers.size());
  const double horizon = double(n_slots) * slot_duration_s;
  const std::vector<ParticleFate> fates =
      simulate_fates(scenario, schedule, horizon, workers);
  for (const ParticleFate& f : fates) {
    if (f.kind != ParticleStateKind::Absorbed) continue;
    const auto slot = std::int64_t(std::floor(f.time_s / slot_duration_s));
    if (slot < 0 || size_t(slot) >= n_slots) continue;
    const int column = species_column(frame, f.species_id);
    frame.counts.at(size_t(f.receiver))[size_t(column)][size_t(slot)] += 1;
  }
  return frame;
}

namespace {

const std::vector<std::int64_t>& frame_series(const ReceivedFrame& frame, int receiver,
                                              int species_id) {
  if (receiver < 0 || size_t(receiver) >= frame.counts.size())
    throw Error("InvalidField", "receiver index out of range");
  return frame.counts[size_t(receiver)][size_t(species_column(frame, species_id))];
}

}  // namespace

Bits detect_fixed(const ReceivedFrame& frame, const ModulationScheme& scheme,
                  double threshold, int receiver) {
  const int width = bits_per_symbol(scheme);
  Bits bits;
  switch (scheme.kind) {
    case SchemeKind::CSK: {
      if (scheme.molecules_per_level.size() != 2)
        throw Error("BadSchemeArity", "fixed-threshold detection handles binary CSK only");
      const std::vector<std::int64_t>& series =
          frame_series(frame, receiver, scheme.species_id);
      for (std::int64_t c : series) bits.push_back(double(c) >= threshold ? 1 : 0);
      break;
    }
    case SchemeKind::PPM: {
      const std::vector<std::int64_t>& series =
          frame_series(frame, receiver, scheme.species_id);
      const size_t slots = size_t(scheme.slots_per_symbol);
      const size_t n_symbols = frame.n_slots / slots;
      for (size_t sym = 0; sym < n_symbols; ++sym) {
        size_t best = 0;
        for (size_t k = 1; k < slots; ++k)
          if (series[sym * slots + k] > series[sym * slots + best]) best = k;
        append_symbol_bits(bits, std::int64_t(best), width);
      }
      break;
    }
    case SchemeKind::MoSK: {
      for (size_t sym = 0; sym < frame.n_slots; ++sym) {
        size_t best = 0;
        std::int64_t best_count =
            frame_series(frame, receiver, scheme.species_ids[0])[sym];
        for (size_t k = 1; k < scheme.species_ids.size(); ++k) {
          const std::int64_t c = frame_series(frame, receiver, scheme.species_ids[k])[sym];
          if (c > best_count) {
            best = k;
            best_count = c;
          }
        }
        append_symbol_bits(bits, std::int64_t(best), width);
      }
      break;
    }
  }
  return bits;
}

double adaptive_threshold(const AdaptiveDetector& det, const Bits& own_prior,
                          const Bits& cross_prior, size_t symbol_index) {
  double theta = det.base_threshold;
  for (int j = 1; j <= det.isi_memory; ++j) {
    if (size_t(j) > symbol_index) break;
    const size_t k = symbol_index - size_t(j);
    if (k < own_prior.size() && size_t(j) < det.own_fractions.size() && own_prior[k])
      theta += double(det.own_molecules) * det.own_fractions[size_t(j)];
    if (det.ili_enabled && k < cross_prior.size() &&
        size_t(j) < det.cross_fractions.size() && cross_prior[k])
      theta += double(det.cross_molecules) * det.cross_fractions[size_t(j)];
  }
  return theta;
}

Bits detect_adaptive(const ReceivedFrame& frame, const ModulationScheme& scheme,
                     const AdaptiveDetector& det, int receiver) {
  if (scheme.kind != SchemeKind::CSK || scheme.molecules_per_level.size() != 2)
    throw Error("BadSchemeArity", "adaptive detection handles binary CSK only");
  const std::vector<std::int64_t>& series = frame_series(frame, receiver, scheme.species_id);
  Bits bits;
  const Bits no_cross;
  for (size_t i = 0; i < series.size(); ++i) {
    const double theta = adaptive_threshold(det, bits, no_cross, i);
    bits.push_back(double(series[i]) >= theta ? 1 : 0);
  }
  return bits;
}

AdaptiveDetector make_adaptive_detector(const DetectionConfig& config,
                                        const ChannelImpulseResponse& cir_estimate,
                                        int receiver, double slot_duration_s,
                                        std::int64_t own_molecules,
                                        const ChannelImpulseResponse* cross_cir,
                                        std::int64_t cross_molecules) {
  AdaptiveDetector det;
  det.base_threshold = config.base_threshold;
  det.isi_memory = config.isi_memory;
  det.own_molecules = own_molecules;
  det.own_fractions = slot_fractions(cir_estimate, receiver, slot_duration_s,
                                     size_t(config.isi_memory) + 1);
  det.ili_enabled = config.ili_enabled;
  if (config.ili_enabled) {
    if (cross_cir == nullptr)
      throw Error("MissingCrossCir", "interference-aware detection needs the cross response");
    det.cross_fractions = slot_fractions(*cross_cir, receiver, slot_duration_s,
                                         size_t(config.isi_memory) + 1);
    det.cross_molecules = cross_molecules;
  }
  return det;
}

Bits detect(const ReceivedFrame& frame, const ModulationScheme& scheme,
            const DetectionConfig& config, const ChannelImpulseResponse* cir_estimate,
            int receiver) {
  if (config.kind == DetectionConfig::Kind::Fixed)
    return detect_fixed(frame, scheme, config.threshold, receiver);
  if (cir_estimate == nullptr)
    throw Error("EmptyCir", "adaptive detection needs an impulse-response estimate");
  std::int64_t own = 0;
  if (scheme.kind == SchemeKind::CSK && scheme.molecules_per_level.size() == 2)
    own = scheme.molecules_per_level[1];
  const AdaptiveDetector det = make_adaptive_detector(
      config, *cir_estimate, 0, frame.slot_duration_s, own);
  return detect_adaptive(frame, scheme, det, receiver);
}

std::pair<Bits, Bits> detect_adaptive_pair(const ReceivedFrame& frame_a,
                                           const ReceivedFrame& frame_b,
                                           const ModulationScheme& scheme,
                                           const AdaptiveDetector& det_a,
                                           const AdaptiveDetector& det_b) {
  if (scheme.kind != SchemeKind::CSK || scheme.molecules_per_level.size() != 2)
    throw Error("BadSchemeArity", "adaptive detection handles binary CSK only");
  if (frame_a.n_slots != frame_b.n_slots)
    throw Error("InvalidField", "paired frames must have the same slot count");
  const std::vector<std::int64_t>& series_a = frame_series(frame_a, 0, scheme.species_id);
  const std::vector<std::int64_t>& series_b = frame_series(frame_b, 0, scheme.species_id);
  Bits bits_a, bits_b;
  for (size_t i = 0; i < frame_a.n_slots; ++i) {
    const double theta_a = adaptive_threshold(det_a, bits_a, bits_b, i);
    bits_a.push_back(double(series_a[i]) >= theta_a ? 1 : 0);
    const double theta_b = adaptive_threshold(det_b, bits_b, bits_a, i);
    bits_b.push_back(double(series_b[i]) >= theta_b ? 1 : 0);
  }
  return {bits_a, bits_b};
}

const std::array<std::array<std::uint8_t, 4>, 4> kConstrainedCodebook = {{
    {0, 0, 0, 0},
    {0, 0, 0, 1},
    {0, 0, 1, 0},
    {0, 1, 0, 0},
}};

ConstrainedEncodeResult encode_constrained(const Bits& data_bits) {
  ConstrainedEncodeResult result;
  Bits padded = data_bits;
  if (padded.size() % 2 != 0) {
    padded.push_back(0);
    result.padded_bits = 1;
  }
  result.bits.reserve(padded.size() * 2);
  for (size_t i = 0; i < padded.size(); i += 2) {
    if (padded[i] > 1 || padded[i + 1] > 1)
      throw Error("InvalidField", "bits must be 0 or 1");
    const size_t value = size_t(padded[i]) * 2 + size_t(padded[i + 1]);
    for (std::uint8_t b : kConstrainedCodebook[value]) result.bits.push_back(b);
  }
  return result;
}

Bits decode_constrained(const Bits& code_bits) {
  if (code_bits.size() % 4 != 0)
    throw Error("BadLength", "constrained code words are 4 bits long");
  Bits data;
  for (size_t i = 0; i < code_bits.size(); i += 4) {
    int match = -1;
    for (size_t v = 0; v < 4; ++v) {
      bool equal = true;
      for (size_t b = 0; b < 4; ++b)
        if (code_bits[i + b] != kConstrainedCodebook[v][b]) { equal = false; break; }
      if (equal) { match = int(v); break; }
    }
    if (match < 0) throw Error("InvalidCodeword", "4-bit group is not a codeword");
    data.push_back(std::uint8_t(match >> 1));
    data.push_back(std::uint8_t(match & 1));
  }
  return data;
}

Bits decode_constrained_nearest(const Bits& code_bits) {
  if (code_bits.size() % 4 != 0)
    throw Error("BadLength", "constrained code words are 4 bits long");
  Bits data;
  for (size_t i = 0; i < code_bits.size(); i += 4) {
    int best = 0, best_dist = 5;
    for (int v = 0; v < 4; ++v) {
      int dist = 0;
      for (size_t b = 0; b < 4; ++b)
        dist += code_bits[i + b] != kConstrainedCodebook[size_t(v)][b];
      if (dist < best_dist) { best = v; best_dist = dist; }
    }
    data.push_back(std::uint8_t(best >> 1));
    data.push_back(std::uint8_t(best & 1));
  }
  return data;
}

namespace {

// ITA2 letters with the U.S. figures variant; see docs/ita2_table.txt.
// Index 27 shifts to figures, 31 back to letters; the sentinels below mark
// those slots (and conveniently equal the code values they sit at).
constexpr char kFigs = '\x1b';
constexpr char kLtrs = '\x1f';

const std::array<char, 32> kIta2Letters = {
    '\0', 'E',  '\n', 'A', ' ', 'S', 'I', 'U', '\r', 'D',  'R', 'J', 'N', 'F',
    'C',  'K',  'T',  'Z', 'L', 'W', 'H', 'Y', 'P',  'Q',  'O', 'B', 'G', kFigs,
    'M',  'X',  'V',  kLtrs};

const std::array<char, 32> kIta2Figures = {
    '\0', '3',  '\n', '-',  ' ', '\a', '8', '7', '\r', '$',  '4', '\'', ',', '!',
    ':',  '(',  '5',  '"',  ')', '2',  '#', '6', '0',  '1',  '9', '?',  '&', kFigs,
    '.',  '/',  ';',  kLtrs};

int find_code(const std::array<char, 32>& table, char c) {
  for (int i = 0; i < 32; ++i) {
    if (i == 0 || i == 27 || i == 31) continue;
    if (table[size_t(i)] == c) return i;
  }
  return -1;
}

void append_code_bits(Bits& bits, int code) {
  for (int b = 0; b < 5; ++b) bits.push_back(std::uint8_t((code >> b) & 1));  // b1 first
}

}  // namespace

const std::array<char, 32>& ita2_letters_table() { return kIta2Letters; }
const std::array<char, 32>& ita2_figures_table() { return kIta2Figures; }

Ita2EncodeResult ita2_encode(const std::string& text) {
  Ita2EncodeResult result;
  bool figures = false;  // transmission starts in letters case
  for (char raw : text) {
    const char c = (raw >= 'a' && raw <= 'z') ? char(raw - 'a' + 'A') : raw;
    const std::array<char, 32>& current = figures ? kIta2Figures : kIta2Letters;
    const std::array<char, 32>& other = figures ? kIta2Letters : kIta2Figures;
    int code = find_code(current, c);
    if (code < 0) {
      code = find_code(other, c);
      if (code < 0)
        throw Error("UnsupportedCharacter",
                    std::string("no telegraph code for character '") + raw + "'");
      append_code_bits(result.bits, figures ? 31 : 27);
      figures = !figures;
      ++result.shifts_inserted;
    }
    append_code_bits(result.bits, code);
  }
  return result;
}

namespace {

std::string ita2_decode_impl(const Bits& bits, bool lossy) {
  if (bits.size() % 5 != 0) throw Error("BadLength", "telegraph codes are 5 bits long");
  std::string text;
  bool figures = false;
  for (size_t i = 0; i < bits.size(); i += 5) {
    int code = 0;
    for (int b = 0; b < 5; ++b) {
      if (bits[i + size_t(b)] > 1) throw Error("InvalidField", "bits must be 0 or 1");
      code |= int(bits[i + size_t(b)]) << b;
    }
    if (code == 27) { figures = true; continue; }
    if (code == 31) { figures = false; continue; }
    const char c = (figures ? kIta2Figures : kIta2Letters)[size_t(code)];
    if (c == '\0') {
      if (lossy) text.push_back('?');
      else throw Error("UnsupportedCharacter", "blank telegraph code in stream");
    } else {
      text.push_back(c);
    }
  }
  return text;
}

}  // namespace

std::string ita2_decode(const Bits& bits) { return ita2_decode_impl(bits, false); }
std::string ita2_decode_lossy(const Bits& bits) { return ita2_decode_impl(bits, true); }

BerResult evaluate_ber(const Bits& sent, const Bits& received) {
  if (sent.size() != received.size())
    throw Error("LengthMismatch", "BER needs equal-length bit vectors");
  BerResult r;
  r.bits_compared = std::int64_t(sent.size());
  for (size_t i = 0; i < sent.size(); ++i)
    if (sent[i] != received[i]) ++r.bit_errors;
  r.ber = sent.empty() ? 0.0 : double(r.bit_errors) / double(sent.size());
  return r;
}

MimoLink simulate_mimo(const SimulationScenario& scenario, int workers, double bin_width_s) {
  if (!scenario.tx_position_b)
    throw Error("BadPlacement", "spatial multiplexing needs tx_position_b");
  if (scenario.receivers.size() != 2)
    throw Error("BadPlacement", "spatial multiplexing needs exactly two receivers");
  if (bin_width_s == 0.0) bin_width_s = 10.0 * scenario.time_step_s;

  const int species_id = scenario.species.front().species_id;
  const std::int64_t N = scenario.molecules_per_emission;
  // Both tagged single-transmitter populations run in one call so their
  // random streams stay disjoint.
  const TxSchedule schedule{{0.0, N, species_id, 0}, {0.0, N, species_id, 1}};
  const std::vector<ParticleFate> fates =
      simulate_fates(scenario, schedule, scenario.end_time_s, workers);

  std::vector<ParticleFate> fates_tx0, fates_tx1;
  for (const ParticleFate& f : fates)
    (f.emission_index == 0 ? fates_tx0 : fates_tx1).push_back(f);

  const std::string digest = scenario_digest(scenario);

  MimoLink link;
  link.ledger_tx0 = ledger_from_fates(fates_tx0, 2);
  link.ledger_tx1 = ledger_from_fates(fates_tx1, 2);
  const ChannelImpulseResponse cir_tx0 =
      bin_absorptions(fates_tx0, 2, bin_width_s, scenario.end_time_s, N, digest);
  const ChannelImpulseResponse cir_tx1 =
      bin_absorptions(fates_tx1, 2, bin_width_s, scenario.end_time_s, N, digest);

  for (int rx = 0; rx < 2; ++rx) {
    for (int tx = 0; tx < 2; ++tx) {
      const ChannelImpulseResponse& src = tx == 0 ? cir_tx0 : cir_tx1;
      ChannelImpulseResponse one;
      one.bin_width_s = src.bin_width_s;
      one.emitted = src.emitted;
      one.scenario_digest = src.scenario_digest;
      one.counts = {src.counts[size_t(rx)]};
      link.h[size_t(rx)][size_t(tx)] = std::move(one);
    }
  }
  return link;
}

}  // namespace ductmc
