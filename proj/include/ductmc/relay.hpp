#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ductmc/comms.hpp"

namespace ductmc {

// One decode-and-forward segment: either a duct scenario to simulate or a
// precomputed impulse response, plus the hop's threshold policy.
struct RelayHop {
  std::optional<SimulationScenario> scenario;
  std::optional<ChannelImpulseResponse> cir;
  DetectionConfig detection;
};

struct RelayChain {
  std::vector<RelayHop> hops;     // at least one
  double processing_delay_s = 0.0;
  ModulationScheme scheme;        // shared by every hop
};

enum class ReceptionMode { SemiAnalytic, FullParticle };

struct RelayHopResult {
  BerResult ber;                // this hop's detector output vs its input bits
  std::int64_t emitted = 0;     // molecules spent by this hop's transmitter
};

struct RelayResult {
  std::vector<RelayHopResult> hops;
  BerResult end_to_end;           // source bits vs final detector output
  std::int64_t total_emitted = 0;
  double total_latency_s = 0.0;   // frame durations plus inter-hop delays
};

// Hop 1 modulates the source bits; every relay detects its hop's frame,
// re-modulates its decisions with fresh molecules after processing_delay_s,
// and transmits over the next hop. Each hop runs on its own clock, so the
// delay shifts the timeline without touching any decision. Hops draw from
// disjoint random streams; full-particle hops additionally re-key the
// scenario seed per hop so segments stay independent.
RelayResult simulate_relay_chain(const RelayChain& chain, const Bits& bits,
                                 std::uint64_t seed,
                                 ReceptionMode mode = ReceptionMode::SemiAnalytic,
                                 int workers = 1);

// Measures the impulse response of every scenario-backed hop that lacks one
// and stores it on the hop, so repeated chain runs (seed sweeps) skip the
// per-run measurement.
RelayChain with_measured_cirs(RelayChain chain, const ModulationScheme& scheme,
                              int workers = 1);

// Splits a valved duct into hop_count segments whose boundaries sit at the
// first hop_count - 1 valve planes (sorted by axial position). Relay
// receivers sit adjacent to their valve on the upstream side; each relay
// transmitter re-emits at the valve plane. The final hop keeps the
// scenario's own first receiver. Error("TooManyHops") when hop_count
// exceeds valve count + 1.
RelayChain valve_aligned_placement(const SimulationScenario& scenario, int hop_count,
                                   const ModulationScheme& scheme,
                                   const DetectionConfig& detection,
                                   double processing_delay_s = 0.0);

}  // namespace ductmc
