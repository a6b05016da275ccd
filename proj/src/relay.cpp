#include "ductmc/relay.hpp"

#include <algorithm>
#include <cmath>

#include "ductmc/validate.hpp"

namespace ductmc {

namespace {

// Largest bin width near 10 time steps that divides the slot exactly.
double aligned_bin_width(double slot_s, double dt_s) {
  auto k = std::int64_t(std::llround(slot_s / (10.0 * dt_s)));
  if (k < 1) k = 1;
  return slot_s / double(k);
}

std::uint64_t hop_seed(std::uint64_t seed, size_t hop) {
  return seed ^ (0x9E3779B97F4A7C15ull * (std::uint64_t(hop) + 1));
}

}  // namespace

RelayResult simulate_relay_chain(const RelayChain& chain, const Bits& bits,
                                 std::uint64_t seed, ReceptionMode mode, int workers) {
  if (chain.hops.empty()) throw Error("InvalidField", "a relay chain needs at least one hop");
  if (bits.empty()) throw Error("InvalidField", "a relay chain needs input bits");
  if (chain.processing_delay_s < 0.0)
    throw Error("InvalidField", "processing delay must be non-negative");

  const double slot = detection_slot_duration(chain.scheme);
  RelayResult result;
  Bits carry = bits;

  for (size_t hop_index = 0; hop_index < chain.hops.size(); ++hop_index) {
    const RelayHop& hop = chain.hops[hop_index];
    const ModulationResult mod = modulate(carry, chain.scheme);
    const size_t n_slots =
        size_t(mod.n_symbols) * (chain.scheme.kind == SchemeKind::PPM
                                     ? size_t(chain.scheme.slots_per_symbol)
                                     : 1);

    std::int64_t emitted = 0;
    for (const EmissionEvent& em : mod.schedule) emitted += em.count;

    // The hop's impulse response: precomputed, or measured once from the
    // hop scenario with a bin width that divides the slot.
    std::optional<ChannelImpulseResponse> measured;
    const ChannelImpulseResponse* cir = hop.cir ? &*hop.cir : nullptr;
    SimulationScenario hop_scenario;
    if (hop.scenario) {
      hop_scenario = *hop.scenario;
      hop_scenario.seed = hop_seed(seed, hop_index);
    }
    const bool need_cir =
        mode == ReceptionMode::SemiAnalytic ||
        hop.detection.kind == DetectionConfig::Kind::Adaptive;
    if (cir == nullptr && need_cir) {
      if (!hop.scenario)
        throw Error("InvalidField", "hop has neither a scenario nor an impulse response");
      measured = simulate_cir(hop_scenario, workers,
                              aligned_bin_width(slot, hop_scenario.time_step_s))
                     .cir;
      cir = &*measured;
    }

    ReceivedFrame frame;
    if (mode == ReceptionMode::SemiAnalytic) {
      std::map<int, const ChannelImpulseResponse*> by_species;
      for (const EmissionEvent& em : mod.schedule) by_species[em.species_id] = cir;
      if (by_species.empty())
        by_species[chain.scheme.species_id] = cir;  // all-zero frame still needs columns
      RngStream rng(seed, lane_stream(std::uint64_t(hop_index), lanes::kReception));
      frame = synthesize_received_semi_analytic(mod.schedule, by_species, 0, slot,
                                                n_slots, rng);
    } else {
      if (!hop.scenario)
        throw Error("InvalidField", "full-particle relay hops need a scenario");
      frame = synthesize_received_full_particle(hop_scenario, mod.schedule, slot,
                                                n_slots, workers);
    }

    Bits detected = detect(frame, chain.scheme, hop.detection, cir);
    detected.resize(carry.size());  // drop decisions for zero-padded symbols

    RelayHopResult hop_result;
    hop_result.ber = evaluate_ber(carry, detected);
    hop_result.emitted = emitted;
    result.hops.push_back(hop_result);
    result.total_emitted += emitted;
    result.total_latency_s += double(n_slots) * slot;
    if (hop_index + 1 < chain.hops.size())
      result.total_latency_s += chain.processing_delay_s;

    carry = std::move(detected);
  }

  result.end_to_end = evaluate_ber(bits, carry);
  return result;
}

RelayChain with_measured_cirs(RelayChain chain, const ModulationScheme& scheme,
                              int workers) {
  const double slot = detection_slot_duration(scheme);
  for (RelayHop& hop : chain.hops) {
    if (hop.cir || !hop.scenario) continue;
    hop.cir = simulate_cir(*hop.scenario, workers,
                           aligned_bin_width(slot, hop.scenario->time_step_s))
                  .cir;
  }
  return chain;
}

RelayChain valve_aligned_placement(const SimulationScenario& scenario, int hop_count,
                                   const ModulationScheme& scheme,
                                   const DetectionConfig& detection,
                                   double processing_delay_s) {
  if (hop_count < 1) throw Error("TooManyHops", "hop count must be at least 1");
  if (size_t(hop_count) > scenario.valves.size() + 1)
    throw Error("TooManyHops", "hop count exceeds valve count + 1");
  if (scenario.receivers.empty())
    throw Error("BadPlacement", "relay placement needs a destination receiver");

  std::vector<double> boundaries;
  {
    std::vector<double> positions;
    for (const ValveSpec& v : scenario.valves) positions.push_back(v.axial_um);
    std::sort(positions.begin(), positions.end());
    boundaries.assign(positions.begin(), positions.begin() + (hop_count - 1));
  }

  const double source = scenario.tx_position.axial_um;
  const double destination = scenario.receivers.front().center_axial_um;
  {
    double previous = source;
    for (double b : boundaries) {
      if (!(previous < b))
        throw Error("BadPlacement", "hop boundaries must be strictly downstream of the source");
      previous = b;
    }
    if (!(previous < destination))
      throw Error("BadPlacement", "the destination receiver must lie past the last boundary");
  }

  RelayChain chain;
  chain.scheme = scheme;
  chain.processing_delay_s = processing_delay_s;
  const double rx_radius = scenario.receivers.front().radius_um;
  const double anchor_angle = scenario.receivers.front().wall_anchor_angle_rad;

  for (int i = 0; i < hop_count; ++i) {
    SimulationScenario hop = scenario;
    hop.tx_position = i == 0
                          ? scenario.tx_position
                          : SurfacePoint{boundaries[size_t(i - 1)],
                                         scenario.tx_position.wall_anchor_angle_rad};
    if (i + 1 < hop_count) {
      // Relay receiver just upstream of its valve plane.
      hop.receivers = {ReceiverSpec{boundaries[size_t(i)] - rx_radius, anchor_angle,
                                    rx_radius}};
    } else {
      hop.receivers = {scenario.receivers.front()};
    }
    require_valid(hop);
    RelayHop entry;
    entry.scenario = std::move(hop);
    entry.detection = detection;
    chain.hops.push_back(std::move(entry));
  }
  return chain;
}

}  // namespace ductmc
