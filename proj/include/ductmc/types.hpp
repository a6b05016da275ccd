#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ductmc/error.hpp"

namespace ductmc {

// Lengths are micrometers, times seconds, everywhere. Inputs in other units
// must be converted before they reach these types.

enum class EndCapPolicy { ReflectBoth, AbsorbFarEnd, AbsorbBoth };
enum class FlowKind { None, Uniform, Poiseuille };
enum class WallKind { Reflective, Permeable };

struct VesselGeometry {
  double radius_um = 0.0;
  double length_um = 0.0;
  EndCapPolicy end_cap_policy = EndCapPolicy::ReflectBoth;
};

struct FlowProfile {
  FlowKind kind = FlowKind::None;
  double mean_velocity_um_s = 0.0;
};

struct MoleculeSpecies {
  int species_id = 0;
  double diffusion_um2_s = 0.0;
  double degradation_rate_per_s = 0.0;
};

struct WallModel {
  WallKind kind = WallKind::Reflective;
  double leak_probability = 0.0;
};

// Periodic gate on a cross-sectional plane. Open while
// fract((t + phase_s) / period_s) < open_fraction.
struct ValveSpec {
  double axial_um = 0.0;
  double period_s = 1.0;
  double open_fraction = 1.0;
  double phase_s = 0.0;
};

// Point on the duct wall, parameterized so it cannot leave the surface.
struct SurfacePoint {
  double axial_um = 0.0;
  double wall_anchor_angle_rad = 0.0;
};

// Absorbing sphere whose center sits on the duct wall.
struct ReceiverSpec {
  double center_axial_um = 0.0;
  double wall_anchor_angle_rad = 0.0;
  double radius_um = 0.0;
};

enum class ParticleStateKind { Alive, Absorbed, Leaked, Degraded, ExitedEnd };

const char* to_string(ParticleStateKind kind);

struct ParticleState {
  ParticleStateKind kind = ParticleStateKind::Alive;
  double time_s = -1.0;  // event time for terminal states
};

struct Particle {
  double axial_um = 0.0;
  double lateral_y_um = 0.0;
  double lateral_z_um = 0.0;
  int species_id = 0;
  ParticleState state;

  // Terminal states are absorbing: a second transition is a logic error.
  void terminate(ParticleStateKind kind, double time_s) {
    if (state.kind != ParticleStateKind::Alive) {
      throw Error("StateMachine", "particle already in a terminal state");
    }
    state.kind = kind;
    state.time_s = time_s;
  }
};

struct SimulationScenario {
  VesselGeometry geometry;
  FlowProfile flow;
  WallModel wall;
  std::vector<ValveSpec> valves;
  std::vector<MoleculeSpecies> species;
  SurfacePoint tx_position;
  // Optional second transmitter; only spatial-multiplexing runs use it.
  std::optional<SurfacePoint> tx_position_b;
  std::vector<ReceiverSpec> receivers;
  std::int64_t molecules_per_emission = 0;
  double time_step_s = 1e-3;
  double end_time_s = 10.0;
  std::uint64_t seed = 1;
};

}  // namespace ductmc
