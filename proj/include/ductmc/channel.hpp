#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ductmc/boundary.hpp"
#include "ductmc/types.hpp"

namespace ductmc {

struct EmissionEvent {
  double time_s = 0.0;
  std::int64_t count = 0;
  int species_id = 0;
  int tx_index = 0;  // 0 = tx_position, 1 = tx_position_b
};

using TxSchedule = std::vector<EmissionEvent>;

struct ParticleFate {
  ParticleStateKind kind = ParticleStateKind::Alive;
  double time_s = 0.0;
  std::int32_t receiver = -1;
  std::int32_t emission_index = 0;
  std::int32_t species_id = 0;
};

// Exact integer accounting. emitted == absorbed + leaked + degraded +
// exited + alive_at_end must hold after every run.
struct MassLedger {
  std::int64_t emitted = 0;
  std::vector<std::int64_t> absorbed_per_receiver;
  std::int64_t leaked = 0;
  std::int64_t degraded = 0;
  std::int64_t exited = 0;
  std::int64_t alive_at_end = 0;

  std::int64_t absorbed_total() const;
  bool balanced() const;
};

struct ChannelImpulseResponse {
  double bin_width_s = 0.0;
  std::int64_t emitted = 0;
  std::string scenario_digest;
  std::vector<std::vector<std::int64_t>> counts;  // [receiver][bin]

  size_t n_bins() const { return counts.empty() ? 0 : counts.front().size(); }
};

struct SimulationResult {
  ChannelImpulseResponse cir;
  MassLedger ledger;
};

// Per-particle terminal outcomes for an arbitrary emission schedule.
// Results are a pure function of (scenario, schedule, horizon); the worker
// count only partitions the index range.
std::vector<ParticleFate> simulate_fates(const SimulationScenario& scenario,
                                         const TxSchedule& schedule, double horizon_s,
                                         int workers = 1, bool enable_chemistry = true);

// Impulse response: one emission of molecules_per_emission at t = 0,
// absorption times binned per receiver. bin_width_s = 0 selects the default
// of 10 time steps.
SimulationResult simulate_cir(const SimulationScenario& scenario, int workers = 1,
                              double bin_width_s = 0.0, bool enable_chemistry = true);

MassLedger ledger_from_fates(const std::vector<ParticleFate>& fates, size_t n_receivers);

ChannelImpulseResponse bin_absorptions(const std::vector<ParticleFate>& fates,
                                       size_t n_receivers, double bin_width_s,
                                       double horizon_s, std::int64_t emitted,
                                       const std::string& digest);

// Unbounded medium: point source, one absorbing sphere at distance_um along
// +x, optional uniform drift toward the sphere (0 = pure diffusion, the
// closed-form case).
struct FreeSpaceSpec {
  double distance_um = 0.0;
  double receiver_radius_um = 0.0;
  double diffusion_um2_s = 0.0;
  std::int64_t molecules = 0;
  double time_step_s = 1e-3;
  double end_time_s = 10.0;
  double drift_um_s = 0.0;
  std::uint64_t seed = 1;
};

SimulationResult simulate_free_space_cir(const FreeSpaceSpec& spec, int workers = 1,
                                         double bin_width_s = 0.0);

std::vector<ParticleFate> simulate_free_space_fates(const FreeSpaceSpec& spec,
                                                    int workers = 1);

// First-passage density at level distance_um for drift-diffusion started at
// 0: d / sqrt(4 pi D t^3) * exp(-(d - v t)^2 / (4 D t)).
double analytic_1d_first_passage(double distance_um, double velocity_um_s,
                                 double diffusion_um2_s, double t_s);

// Companion cumulative, stable for large d^2/D.
double analytic_1d_first_passage_cdf(double distance_um, double velocity_um_s,
                                     double diffusion_um2_s, double t_s);

struct FreeSpaceAnalytic {
  double density_per_s = 0.0;
  double cumulative = 0.0;  // -> receiver_radius / distance as t -> inf
};

FreeSpaceAnalytic analytic_free_space_absorbing_sphere(double distance_um,
                                                       double receiver_radius_um,
                                                       double diffusion_um2_s, double t_s);

struct CirStatistics {
  double peak_time_s = 0.0;        // start of the highest bin (earliest on ties)
  std::int64_t peak_amplitude = 0;
  double first_arrival_s = 0.0;    // start of the first non-empty bin
  double tail_fraction = 0.0;      // counts in bins starting at/after tail_after_s
  std::int64_t total_absorbed = 0;
};

// Raises Error("EmptyCir") when the receiver column has no counts.
CirStatistics cir_statistics(const ChannelImpulseResponse& cir, int receiver,
                             double tail_after_s);

}  // namespace ductmc
