#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ductmc/channel.hpp"
#include "ductmc/rng.hpp"

namespace ductmc {

using Bits = std::vector<std::uint8_t>;  // one 0/1 value per entry

enum class SchemeKind { CSK, PPM, MoSK };

struct ModulationScheme {
  SchemeKind kind = SchemeKind::CSK;
  double symbol_duration_s = 1.0;
  // CSK: symbol value k emits molecules_per_level[k] at the symbol start.
  std::vector<std::int64_t> molecules_per_level;
  // PPM: one pulse of `molecules` in 1 of slots_per_symbol sub-slots.
  int slots_per_symbol = 2;
  // MoSK: one pulse of `molecules` of species_ids[k].
  std::vector<int> species_ids;
  std::int64_t molecules = 0;
  // Emitted species for the single-species schemes (CSK, PPM).
  int species_id = 0;
};

// Binary concentration keying: levels {0, molecules}.
ModulationScheme bcsk(std::int64_t molecules, double symbol_duration_s);
ModulationScheme ppm(int slots_per_symbol, std::int64_t molecules, double symbol_duration_s);
ModulationScheme mosk(std::vector<int> species_ids, std::int64_t molecules,
                      double symbol_duration_s);

int bits_per_symbol(const ModulationScheme& scheme);

// Detection granularity: PPM decides on sub-slots, CSK/MoSK on symbols.
double detection_slot_duration(const ModulationScheme& scheme);

struct ModulationResult {
  TxSchedule schedule;
  int padded_bits = 0;  // zeros appended to fill the last symbol
  int n_symbols = 0;
};

// Bits map to symbols MSB-first; symbol k starts at k * symbol_duration_s.
// Zero-count emissions are omitted from the schedule.
ModulationResult modulate(const Bits& bits, const ModulationScheme& scheme);

// Per-slot molecule counts seen by each receiver, split by species column.
struct ReceivedFrame {
  double slot_duration_s = 0.0;
  size_t n_slots = 0;
  std::vector<int> species_ids;  // column order
  // counts[receiver][species column][slot]
  std::vector<std::vector<std::vector<std::int64_t>>> counts;
};

// Fraction of emitted molecules arriving with a given slot lag
// (lag 0 = the emission's own slot). Requires the CIR bin width to divide
// the slot duration.
std::vector<double> slot_fractions(const ChannelImpulseResponse& cir, int receiver,
                                   double slot_duration_s, size_t max_lags);

// Draws Binomial(n, p) using a fixed, platform-independent algorithm.
std::int64_t binomial_draw(RngStream& rng, std::int64_t n, double p);

ReceivedFrame make_received_frame(double slot_duration_s, size_t n_slots,
                                  std::vector<int> species_ids, size_t n_receivers);

// Semi-analytic reception: every emission is thinned through its species'
// impulse response, one independent binomial draw per CIR bin, shifted by
// the emission time and accumulated into slots. The accumulate form adds
// into an existing frame so several transmit paths (own plus interfering)
// can superpose at one receiver.
void accumulate_semi_analytic(ReceivedFrame& frame, int frame_receiver,
                              const TxSchedule& schedule,
                              const std::map<int, const ChannelImpulseResponse*>& cir_by_species,
                              int cir_receiver, RngStream& rng);

ReceivedFrame synthesize_received_semi_analytic(
    const TxSchedule& schedule,
    const std::map<int, const ChannelImpulseResponse*>& cir_by_species, int receiver,
    double slot_duration_s, size_t n_slots, RngStream& rng);

// Full-particle reception: reruns the particle engine on the schedule and
// bins actual absorption times.
ReceivedFrame synthesize_received_full_particle(const SimulationScenario& scenario,
                                                const TxSchedule& schedule,
                                                double slot_duration_s, size_t n_slots,
                                                int workers = 1);

// Fixed-threshold detection. CSK (2 levels): bit 1 iff count >= threshold.
// PPM: argmax sub-slot per symbol. MoSK: argmax species column per symbol.
// Argmax ties resolve to the lowest index.
Bits detect_fixed(const ReceivedFrame& frame, const ModulationScheme& scheme,
                  double threshold, int receiver = 0);

// Adaptive threshold for binary CSK:
//   theta_i = base + sum_{j=1..memory} n[i-j] * h[j]
//           + (ILI) sum_{j=1..memory} m[i-j] * g[j]
// where n/m are prior own/cross decisions scaled by the emission size and
// h/g are per-slot arrival fractions of the own/cross channel.
struct AdaptiveDetector {
  double base_threshold = 0.0;
  int isi_memory = 0;
  std::vector<double> own_fractions;    // h, indexed by slot lag
  std::int64_t own_molecules = 0;
  bool ili_enabled = false;
  std::vector<double> cross_fractions;  // g, indexed by slot lag
  std::int64_t cross_molecules = 0;
};

double adaptive_threshold(const AdaptiveDetector& det, const Bits& own_prior,
                          const Bits& cross_prior, size_t symbol_index);

// Threshold policy in a form links and relay hops can carry around.
struct DetectionConfig {
  enum class Kind { Fixed, Adaptive };
  Kind kind = Kind::Fixed;
  double threshold = 0.0;       // Fixed
  double base_threshold = 0.0;  // Adaptive
  int isi_memory = 0;
  bool ili_enabled = false;
};

// Builds the adaptive detector from a measured impulse response: lag
// fractions come from slot_fractions on cir_estimate, the ILI leg from
// cross_cir. Error("MissingCrossCir") when ili_enabled without cross_cir.
AdaptiveDetector make_adaptive_detector(const DetectionConfig& config,
                                        const ChannelImpulseResponse& cir_estimate,
                                        int receiver, double slot_duration_s,
                                        std::int64_t own_molecules,
                                        const ChannelImpulseResponse* cross_cir = nullptr,
                                        std::int64_t cross_molecules = 0);

// Applies a DetectionConfig: Fixed forwards to detect_fixed, Adaptive
// builds the detector from cir_estimate and forwards to detect_adaptive.
Bits detect(const ReceivedFrame& frame, const ModulationScheme& scheme,
            const DetectionConfig& config, const ChannelImpulseResponse* cir_estimate,
            int receiver = 0);

Bits detect_adaptive(const ReceivedFrame& frame, const ModulationScheme& scheme,
                     const AdaptiveDetector& det, int receiver = 0);

// Joint slot-by-slot detection of two mutually interfering binary CSK
// links; each detector sees the other link's past decisions.
std::pair<Bits, Bits> detect_adaptive_pair(const ReceivedFrame& frame_a,
                                           const ReceivedFrame& frame_b,
                                           const ModulationScheme& scheme,
                                           const AdaptiveDetector& det_a,
                                           const AdaptiveDetector& det_b);

// Rate-1/2 block code mapping 2 data bits to 4 channel bits with no
// adjacent 1s inside or across codewords: 00->0000 01->0001 10->0010
// 11->0100.
extern const std::array<std::array<std::uint8_t, 4>, 4> kConstrainedCodebook;

struct ConstrainedEncodeResult {
  Bits bits;
  int padded_bits = 0;  // data zeros appended to reach a whole codeword
};

ConstrainedEncodeResult encode_constrained(const Bits& data_bits);

// Strict decode: Error("InvalidCodeword") on any non-codeword.
Bits decode_constrained(const Bits& code_bits);

// Channel-facing decode: maps every 4-bit group to the nearest codeword by
// Hamming distance (ties to the lowest data value).
Bits decode_constrained_nearest(const Bits& code_bits);

// ITA2 telegraph code, 5 bits per code, emitted b1-first. Encoding starts
// in letters case and inserts FIGS/LTRS shifts only when forced.
struct Ita2EncodeResult {
  Bits bits;
  int shifts_inserted = 0;
};

Ita2EncodeResult ita2_encode(const std::string& text);
std::string ita2_decode(const Bits& bits);        // Error("UnsupportedCharacter") on control gaps
std::string ita2_decode_lossy(const Bits& bits);  // unmapped codes become '?'

const std::array<char, 32>& ita2_letters_table();
const std::array<char, 32>& ita2_figures_table();

struct BerResult {
  std::int64_t bits_compared = 0;
  std::int64_t bit_errors = 0;
  double ber = 0.0;
};

// Hamming distance over the overlap; lengths must match.
BerResult evaluate_ber(const Bits& sent, const Bits& received);

// Four tagged single-transmitter impulse responses of a two-transmitter,
// two-receiver duct: h[i][j] = response at receiver i to transmitter j.
// Cross terms (i != j) are the inter-link interference channels.
struct MimoLink {
  std::array<std::array<ChannelImpulseResponse, 2>, 2> h;
  MassLedger ledger_tx0;
  MassLedger ledger_tx1;
};

MimoLink simulate_mimo(const SimulationScenario& scenario, int workers = 1,
                       double bin_width_s = 0.0);

}  // namespace ductmc
