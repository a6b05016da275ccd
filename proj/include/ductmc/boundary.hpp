#pragma once

#include <optional>
#include <vector>

#include "ductmc/rng.hpp"
#include "ductmc/transport.hpp"
#include "ductmc/types.hpp"

namespace ductmc {

// Receiver with its center resolved to duct coordinates.
struct ReceiverBody {
  Vec3 center;
  double radius_um = 0.0;
};

ReceiverBody receiver_body(const ReceiverSpec& spec, const VesselGeometry& geometry);

// True while fract((t + phase) / period) < open_fraction.
bool valve_state(const ValveSpec& valve, double t_s);

struct AbsorbHit {
  int receiver = -1;
  double fraction = 0.0;  // position along the segment, 0..1
};

// Earliest exact segment-sphere crossing over all receivers. A segment that
// starts inside a receiver hits at fraction 0. Ties: lowest receiver index.
std::optional<AbsorbHit> check_absorption(const Segment& segment,
                                          const std::vector<ReceiverBody>& receivers);

struct WallOutcome {
  bool leaked = false;
  bool reflected = false;
  double leak_fraction = 0.0;  // first wall-contact fraction when leaked
  double y = 0.0;
  double z = 0.0;
};

// Radial wall: specular reflection r' -> 2R - r' in the cross-sectional
// plane, re-checked up to four times, then clamped to the wall. On a
// permeable wall every contact draws one leak decision.
WallOutcome resolve_wall(const Segment& segment, const VesselGeometry& geometry,
                         const WallModel& wall, RngStream& leak_rng);

struct ValveOutcome {
  bool reflected = false;
  double axial_end = 0.0;
};

// Axial valve planes between step start and end. Crossings are handled
// nearest-first; a closed plane mirrors the remaining axial displacement
// (x -> 2*x_valve - x from the crossing point on). Valve state is evaluated
// at the interpolated crossing time.
ValveOutcome resolve_valves(double axial_start, double axial_end,
                            const std::vector<ValveSpec>& valves, double t_s, double dt_s);

struct EndCapOutcome {
  bool exited = false;
  bool reflected = false;
  double exit_fraction = 0.0;  // interpolated crossing when exited
  double axial_end = 0.0;
};

EndCapOutcome resolve_end_caps(double axial_start, double axial_end,
                               const VesselGeometry& geometry);

struct StepResolution {
  bool terminal = false;
  ParticleStateKind state = ParticleStateKind::Alive;
  double event_time_s = 0.0;
  int receiver = -1;
  Vec3 position;  // end-of-step position when still alive
};

// Full resolution of one tentative step, in fixed order: absorption on the
// raw segment, valve planes, radial wall, end caps, then one absorption
// re-check whenever a reflection moved the endpoint.
StepResolution resolve_step(const Segment& segment, const VesselGeometry& geometry,
                            const WallModel& wall, const std::vector<ValveSpec>& valves,
                            const std::vector<ReceiverBody>& receivers, double t_s,
                            double dt_s, RngStream& leak_rng);

}  // namespace ductmc
