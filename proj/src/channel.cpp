#include "ductmc/channel.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "ductmc/chemistry.hpp"
#include "ductmc/scenario_io.hpp"
#include "ductmc/validate.hpp"

namespace ductmc {

namespace {

struct RunContext {
  const SimulationScenario* scenario = nullptr;
  std::vector<ReceiverBody> receivers;
  double horizon_s = 0.0;
  bool enable_chemistry = true;
};

Vec3 spawn_position(const SimulationScenario& s, int tx_index) {
  const SurfacePoint& p =
      (tx_index == 1 && s.tx_position_b) ? *s.tx_position_b : s.tx_position;
  // 0.1 um inside the wall along the inward normal
  const double r = s.geometry.radius_um - 0.1;
  return Vec3{p.axial_um, r * std::cos(p.wall_anchor_angle_rad),
              r * std::sin(p.wall_anchor_angle_rad)};
}

const MoleculeSpecies& species_by_id(const SimulationScenario& s, int species_id) {
  for (const MoleculeSpecies& sp : s.species)
    if (sp.species_id == species_id) return sp;
  throw Error("UnknownSpecies", "schedule references species id " + std::to_string(species_id));
}

ParticleFate run_duct_particle(const RunContext& ctx, const EmissionEvent& em,
                               int emission_index, std::uint64_t particle_index) {
  const SimulationScenario& s = *ctx.scenario;
  RngStream motion(s.seed, lane_stream(particle_index, lanes::kMotion));
  RngStream leak(s.seed, lane_stream(particle_index, lanes::kLeak));
  RngStream chem(s.seed, lane_stream(particle_index, lanes::kChemistry));
  const MoleculeSpecies& sp = species_by_id(s, em.species_id);
  const double dt = s.time_step_s;

  ParticleFate fate;
  fate.emission_index = emission_index;
  fate.species_id = em.species_id;

  Vec3 pos = spawn_position(s, em.tx_index);
  if (auto hit = check_absorption(Segment{pos, pos}, ctx.receivers)) {
    fate.kind = ParticleStateKind::Absorbed;
    fate.time_s = em.time_s;
    fate.receiver = hit->receiver;
    return fate;
  }

  const std::int64_t max_steps =
      std::int64_t(std::floor((ctx.horizon_s - em.time_s) / dt + 1e-9));
  for (std::int64_t k = 0; k < max_steps; ++k) {
    const double t = em.time_s + double(k) * dt;
    const Segment seg = brownian_step(pos, sp, s.flow, s.geometry, dt, motion);
    const StepResolution res =
        resolve_step(seg, s.geometry, s.wall, s.valves, ctx.receivers, t, dt, leak);
    if (res.terminal) {
      fate.kind = res.state;
      fate.time_s = res.event_time_s;
      fate.receiver = res.receiver;
      return fate;
    }
    if (ctx.enable_chemistry && sp.degradation_rate_per_s > 0.0 &&
        !survives(sp.degradation_rate_per_s, dt, chem)) {
      fate.kind = ParticleStateKind::Degraded;
      fate.time_s = t + 0.5 * dt;
      return fate;
    }
    pos = res.position;
  }

  fate.kind = ParticleStateKind::Alive;
  fate.time_s = ctx.horizon_s;
  return fate;
}

void run_range(const RunContext& ctx, const TxSchedule& schedule,
               const std::vector<std::uint64_t>& emission_offsets,
               std::vector<ParticleFate>& fates, std::uint64_t begin, std::uint64_t end) {
  size_t em_idx = 0;
  for (std::uint64_t i = begin; i < end; ++i) {
    while (i >= emission_offsets[em_idx + 1]) ++em_idx;
    fates[i] = run_duct_particle(ctx, schedule[em_idx], int(em_idx), i);
  }
}

int resolve_workers(int workers) {
  if (workers > 0) return workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : int(hw);
}

template <typename Fn>
void parallel_over(std::uint64_t total, int workers, Fn&& body) {
  const int W = std::min<std::uint64_t>(std::max(workers, 1), std::max<std::uint64_t>(total, 1));
  if (W <= 1) {
    body(std::uint64_t(0), total);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(W);
  const std::uint64_t chunk = (total + W - 1) / W;
  for (int w = 0; w < W; ++w) {
    const std::uint64_t b = std::uint64_t(w) * chunk;
    const std::uint64_t e = std::min(total, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&body, b, e] { body(b, e); });
  }
  for (std::thread& th : pool) th.join();
}

}  // namespace

std::int64_t MassLedger::absorbed_total() const {
  std::int64_t sum = 0;
  for (std::int64_t a : absorbed_per_receiver) sum += a;
  return sum;
}

bool MassLedger::balanced() const {
  return emitted == absorbed_total() + leaked + degraded + exited + alive_at_end;
}

std::vector<ParticleFate> simulate_fates(const SimulationScenario& scenario,
                                         const TxSchedule& schedule, double horizon_s,
                                         int workers, bool enable_chemistry) {
  require_valid(scenario);
  RunContext ctx;
  ctx.scenario = &scenario;
  ctx.horizon_s = horizon_s;
  ctx.enable_chemistry = enable_chemistry;
  for (const ReceiverSpec& r : scenario.receivers)
    ctx.receivers.push_back(receiver_body(r, scenario.geometry));

  std::vector<std::uint64_t> offsets{0};
  for (const EmissionEvent& em : schedule) {
    if (em.count < 0) throw Error("InvalidRun", "emission count must be non-negative");
    if (em.tx_index == 1 && !scenario.tx_position_b)
      throw Error("BadPlacement", "schedule references a second transmitter the scenario lacks");
    species_by_id(scenario, em.species_id);
    offsets.push_back(offsets.back() + std::uint64_t(em.count));
  }
  const std::uint64_t total = offsets.back();

  std::vector<ParticleFate> fates(total);
  parallel_over(total, resolve_workers(workers), [&](std::uint64_t b, std::uint64_t e) {
    run_range(ctx, schedule, offsets, fates, b, e);
  });
  return fates;
}

MassLedger ledger_from_fates(const std::vector<ParticleFate>& fates, size_t n_receivers) {
  MassLedger ledger;
  ledger.absorbed_per_receiver.assign(n_receivers, 0);
  ledger.emitted = std::int64_t(fates.size());
  for (const ParticleFate& f : fates) {
    switch (f.kind) {
      case ParticleStateKind::Absorbed:
        ledger.absorbed_per_receiver.at(size_t(f.receiver)) += 1;
        break;
      case ParticleStateKind::Leaked: ledger.leaked += 1; break;
      case ParticleStateKind::Degraded: ledger.degraded += 1; break;
      case ParticleStateKind::ExitedEnd: ledger.exited += 1; break;
      case ParticleStateKind::Alive: ledger.alive_at_end += 1; break;
    }
  }
  return ledger;
}

ChannelImpulseResponse bin_absorptions(const std::vector<ParticleFate>& fates,
                                       size_t n_receivers, double bin_width_s,
                                       double horizon_s, std::int64_t emitted,
                                       const std::string& digest) {
  if (!(bin_width_s > 0.0)) throw Error("InvalidRun", "bin width must be positive");
  ChannelImpulseResponse cir;
  cir.bin_width_s = bin_width_s;
  cir.emitted = emitted;
  cir.scenario_digest = digest;
  const size_t n_bins = size_t(std::ceil(horizon_s / bin_width_s - 1e-12));
  cir.counts.assign(n_receivers, std::vector<std::int64_t>(n_bins, 0));
  for (const ParticleFate& f : fates) {
    if (f.kind != ParticleStateKind::Absorbed) continue;
    size_t bin = size_t(std::max(0.0, std::floor(f.time_s / bin_width_s)));
    if (bin >= n_bins) bin = n_bins - 1;
    cir.counts.at(size_t(f.receiver))[bin] += 1;
  }
  return cir;
}

SimulationResult simulate_cir(const SimulationScenario& scenario, int workers,
                              double bin_width_s, bool enable_chemistry) {
  require_valid(scenario);
  if (bin_width_s == 0.0) bin_width_s = 10.0 * scenario.time_step_s;
  TxSchedule schedule{{0.0, scenario.molecules_per_emission,
                       scenario.species.front().species_id, 0}};
  const std::vector<ParticleFate> fates =
      simulate_fates(scenario, schedule, scenario.end_time_s, workers, enable_chemistry);
  SimulationResult result;
  result.ledger = ledger_from_fates(fates, scenario.receivers.size());
  result.cir = bin_absorptions(fates, scenario.receivers.size(), bin_width_s,
                               scenario.end_time_s, scenario.molecules_per_emission,
                               scenario_digest(scenario));
  return result;
}

std::vector<ParticleFate> simulate_free_space_fates(const FreeSpaceSpec& spec, int workers) {
  if (!(spec.distance_um > spec.receiver_radius_um) || !(spec.receiver_radius_um > 0.0))
    throw Error("BadPlacement", "free-space source must lie outside the receiver sphere");
  if (!(spec.diffusion_um2_s > 0.0))
    throw Error("InvalidSpecies", "diffusion coefficient must be positive");
  if (!(spec.time_step_s > 0.0) || !(spec.end_time_s >= spec.time_step_s))
    throw Error("InvalidRun", "free-space run needs a positive step and horizon");
  if (spec.molecules < 0) throw Error("InvalidRun", "emission size must be non-negative");

  const double dt = spec.time_step_s;
  const double sigma = std::sqrt(2.0 * spec.diffusion_um2_s * dt);
  const double drift = spec.drift_um_s * dt;
  const std::int64_t max_steps = std::int64_t(std::floor(spec.end_time_s / dt + 1e-9));
  const ReceiverBody receiver{Vec3{spec.distance_um, 0.0, 0.0}, spec.receiver_radius_um};
  const std::vector<ReceiverBody> receivers{receiver};
  // With drift, a particle this far downstream of the sphere can never
  // diffuse back: P(return) <= exp(-v * excess / D) < 1e-21 at the cutoff.
  const double escape_x =
      spec.drift_um_s > 0.0
          ? spec.distance_um + spec.receiver_radius_um +
                50.0 * spec.diffusion_um2_s / spec.drift_um_s + 4.0 * spec.receiver_radius_um
          : 0.0;

  const double a2 = receiver.radius_um * receiver.radius_um;
  std::vector<ParticleFate> fates(std::uint64_t(spec.molecules));
  parallel_over(std::uint64_t(spec.molecules), resolve_workers(workers),
                [&](std::uint64_t b, std::uint64_t e) {
    for (std::uint64_t i = b; i < e; ++i) {
      RngStream motion(spec.seed, lane_stream(i, lanes::kMotion));
      ParticleFate fate;
      Vec3 pos{0.0, 0.0, 0.0};
      fate.kind = ParticleStateKind::Alive;
      fate.time_s = spec.end_time_s;
      for (std::int64_t k = 0; k < max_steps; ++k) {
        const double sx = drift + sigma * motion.normal();
        const double sy = sigma * motion.normal();
        const double sz = sigma * motion.normal();
        const double mx = pos.x - receiver.center.x;
        const double my = pos.y - receiver.center.y;
        const double mz = pos.z - receiver.center.z;
        const double r2 = mx * mx + my * my + mz * mz;
        const double s2 = sx * sx + sy * sy + sz * sz;
        // The sphere is reachable only when r < a + |step|, and
        // (a + |step|)^2 <= 2 (a^2 + |step|^2), so this reject never
        // discards a real crossing and saves the quadratic in the far field.
        if (r2 <= 2.0 * (a2 + s2)) {
          Segment seg;
          seg.start = pos;
          seg.end = Vec3{pos.x + sx, pos.y + sy, pos.z + sz};
          if (auto hit = check_absorption(seg, receivers)) {
            fate.kind = ParticleStateKind::Absorbed;
            fate.time_s = double(k) * dt + hit->fraction * dt;
            fate.receiver = 0;
            break;
          }
        }
        pos.x += sx;
        pos.y += sy;
        pos.z += sz;
        if (escape_x > 0.0 && pos.x > escape_x) {
          fate.kind = ParticleStateKind::ExitedEnd;
          fate.time_s = double(k + 1) * dt;
          break;
        }
      }
      fates[i] = fate;
    }
  });
  return fates;
}

SimulationResult simulate_free_space_cir(const FreeSpaceSpec& spec, int workers,
                                         double bin_width_s) {
  if (bin_width_s == 0.0) bin_width_s = 10.0 * spec.time_step_s;
  const std::vector<ParticleFate> fates = simulate_free_space_fates(spec, workers);
  SimulationResult result;
  result.ledger = ledger_from_fates(fates, 1);
  result.cir = bin_absorptions(fates, 1, bin_width_s, spec.end_time_s, spec.molecules,
                               std::string(16, '0'));
  return result;
}

namespace {

// log(erfc(x)) for x >= 0 without underflow; switches to the scaled
// asymptotic series once erfc itself would vanish.
double log_erfc(double x) {
  if (x < 25.0) return std::log(std::erfc(x));
  const double inv2 = 1.0 / (2.0 * x * x);
  const double series = 1.0 - inv2 * (1.0 - 3.0 * inv2 * (1.0 - 5.0 * inv2));
  return std::log(series / (x * std::sqrt(M_PI))) - x * x;
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double log_norm_cdf_neg(double z) {  // log Phi(-z), z >= 0
  return std::log(0.5) + log_erfc(z / std::sqrt(2.0));
}

void check_fp_args(double d, double D, double t) {
  if (!(d > 0.0)) throw Error("InvalidField", "distance must be positive");
  if (!(D > 0.0)) throw Error("InvalidField", "diffusion coefficient must be positive");
  if (!(t > 0.0)) throw Error("InvalidField", "time must be positive");
}

}  // namespace

double analytic_1d_first_passage(double d, double v, double D, double t) {
  check_fp_args(d, D, t);
  if (v < 0.0) throw Error("InvalidField", "velocity must be non-negative");
  const double spread = 4.0 * D * t;
  const double miss = d - v * t;
  return d / std::sqrt(M_PI * spread * t * t) * std::exp(-miss * miss / spread);
}

double analytic_1d_first_passage_cdf(double d, double v, double D, double t) {
  check_fp_args(d, D, t);
  if (v < 0.0) throw Error("InvalidField", "velocity must be non-negative");
  if (v == 0.0) return std::erfc(d / std::sqrt(4.0 * D * t));
  const double mu = d / v;
  const double lambda = d * d / (2.0 * D);
  const double s = std::sqrt(lambda / t);
  const double z1 = s * (t / mu - 1.0);
  const double z2 = s * (t / mu + 1.0);
  const double term2 = std::exp(2.0 * lambda / mu + log_norm_cdf_neg(z2));
  return std::min(1.0, norm_cdf(z1) + term2);
}

FreeSpaceAnalytic analytic_free_space_absorbing_sphere(double d, double a, double D,
                                                       double t) {
  check_fp_args(d, D, t);
  if (!(a > 0.0) || !(d > a))
    throw Error("InvalidField", "need receiver radius > 0 and distance > radius");
  const double gap = d - a;
  const double spread = 4.0 * D * t;
  FreeSpaceAnalytic out;
  out.density_per_s =
      (a / d) * gap / std::sqrt(M_PI * spread * t * t) * std::exp(-gap * gap / spread);
  out.cumulative = (a / d) * std::erfc(gap / std::sqrt(spread));
  return out;
}

CirStatistics cir_statistics(const ChannelImpulseResponse& cir, int receiver,
                             double tail_after_s) {
  if (receiver < 0 || size_t(receiver) >= cir.counts.size())
    throw Error("InvalidField", "receiver index out of range");
  const std::vector<std::int64_t>& col = cir.counts[size_t(receiver)];
  CirStatistics st;
  std::int64_t tail = 0;
  int first = -1, peak = -1;
  for (size_t b = 0; b < col.size(); ++b) {
    const std::int64_t c = col[b];
    st.total_absorbed += c;
    if (c > 0 && first < 0) first = int(b);
    if (peak < 0 || c > col[size_t(peak)]) peak = int(b);
    if (double(b) * cir.bin_width_s >= tail_after_s) tail += c;
  }
  if (st.total_absorbed == 0) throw Error("EmptyCir", "no absorptions recorded for receiver");
  st.first_arrival_s = double(first) * cir.bin_width_s;
  st.peak_time_s = double(peak) * cir.bin_width_s;
  st.peak_amplitude = col[size_t(peak)];
  st.tail_fraction = double(tail) / double(st.total_absorbed);
  return st;
}

}  // namespace ductmc
