#include "ductmc/transport.hpp"

#include <cmath>

namespace ductmc {

double velocity_at(const FlowProfile& flow, const VesselGeometry& geometry, double radial_um) {
  if (radial_um < 0.0 || radial_um > geometry.radius_um * (1.0 + 1e-12)) {
    throw Error("RadialOutOfRange", "radial offset outside the duct cross-section");
  }
  switch (flow.kind) {
    case FlowKind::None:
      return 0.0;
    case FlowKind::Uniform:
      return flow.mean_velocity_um_s;
    case FlowKind::Poiseuille: {
      const double ratio = radial_um / geometry.radius_um;
      return 2.0 * flow.mean_velocity_um_s * (1.0 - ratio * ratio);
    }
  }
  return 0.0;
}

Segment brownian_step(const Vec3& position, const MoleculeSpecies& species,
                      const FlowProfile& flow, const VesselGeometry& geometry,
                      double dt_s, RngStream& rng) {
  const double radial = std::sqrt(position.y * position.y + position.z * position.z);
  const double drift = velocity_at(flow, geometry, std::min(radial, geometry.radius_um)) * dt_s;
  const double sigma = std::sqrt(2.0 * species.diffusion_um2_s * dt_s);
  Segment seg;
  seg.start = position;
  seg.end.x = position.x + drift + sigma * rng.normal();
  seg.end.y = position.y + sigma * rng.normal();
  seg.end.z = position.z + sigma * rng.normal();
  return seg;
}

double peclet(double radius_um, double mean_velocity_um_s, double diffusion_um2_s) {
  if (!(diffusion_um2_s > 0.0)) throw Error("InvalidSpecies", "diffusion coefficient must be positive");
  return radius_um * mean_velocity_um_s / diffusion_um2_s;
}

double dispersion_factor(double length_um, double peclet_number, double radius_um) {
  if (!(peclet_number > 0.0)) throw Error("ZeroPeclet", "dispersion factor undefined at zero Peclet number");
  return length_um / (peclet_number * radius_um);
}

const char* to_string(FlowRegime regime) {
  switch (regime) {
    case FlowRegime::PureDiffusion: return "PureDiffusion";
    case FlowRegime::PoiseuilleDominated: return "PoiseuilleDominated";
    case FlowRegime::UniformDispersive: return "UniformDispersive";
  }
  return "?";
}

DimensionlessReport classify_flow_regime(const VesselGeometry& geometry,
                                         const FlowProfile& flow,
                                         const MoleculeSpecies& species) {
  DimensionlessReport report;
  report.peclet = peclet(geometry.radius_um, flow.mean_velocity_um_s, species.diffusion_um2_s);
  if (flow.kind == FlowKind::None || flow.mean_velocity_um_s == 0.0) {
    report.regime = FlowRegime::PureDiffusion;
    return report;
  }
  report.dispersion_factor = dispersion_factor(geometry.length_um, report.peclet, geometry.radius_um);
  report.regime = *report.dispersion_factor < 1.0 ? FlowRegime::PoiseuilleDominated
                                                  : FlowRegime::UniformDispersive;
  return report;
}

}  // namespace ductmc
