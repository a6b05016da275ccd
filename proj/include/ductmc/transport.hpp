#pragma once

#include <optional>

#include "ductmc/rng.hpp"
#include "ductmc/types.hpp"

namespace ductmc {

struct Vec3 {
  double x = 0.0;  // axial, um
  double y = 0.0;  // lateral, um
  double z = 0.0;  // lateral, um
};

struct Segment {
  Vec3 start;
  Vec3 end;
};

// Axial fluid velocity at radial offset r. Uniform ignores r; Poiseuille is
// the parabola 2*v_mean*(1 - (r/R)^2). r > R raises RadialOutOfRange.
double velocity_at(const FlowProfile& flow, const VesselGeometry& geometry, double radial_um);

// One Euler-Maruyama step: per-axis Gaussian increments N(0, 2*D*dt) plus
// axial advection v(r)*dt evaluated at the step start.
Segment brownian_step(const Vec3& position, const MoleculeSpecies& species,
                      const FlowProfile& flow, const VesselGeometry& geometry,
                      double dt_s, RngStream& rng);

// Peclet number R*v/D.
double peclet(double radius_um, double mean_velocity_um_s, double diffusion_um2_s);

// Dispersion factor L/(Pe*R). Pe <= 0 raises ZeroPeclet.
double dispersion_factor(double length_um, double peclet_number, double radius_um);

enum class FlowRegime { PureDiffusion, PoiseuilleDominated, UniformDispersive };

const char* to_string(FlowRegime regime);

struct DimensionlessReport {
  double peclet = 0.0;
  std::optional<double> dispersion_factor;  // absent when Pe = 0
  FlowRegime regime = FlowRegime::PureDiffusion;
};

// Classification uses the first species' diffusion coefficient.
// PureDiffusion iff v = 0; else PoiseuilleDominated iff the dispersion
// factor is below 1, UniformDispersive otherwise. The report describes the
// transport regime implied by the numbers; the scenario's flow.kind remains
// the user's choice.
DimensionlessReport classify_flow_regime(const VesselGeometry& geometry,
                                         const FlowProfile& flow,
                                         const MoleculeSpecies& species);

}  // namespace ductmc
