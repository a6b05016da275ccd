#include "ductmc/validate.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace ductmc {

const char* to_string(ParticleStateKind kind) {
  switch (kind) {
    case ParticleStateKind::Alive: return "Alive";
    case ParticleStateKind::Absorbed: return "Absorbed";
    case ParticleStateKind::Leaked: return "Leaked";
    case ParticleStateKind::Degraded: return "Degraded";
    case ParticleStateKind::ExitedEnd: return "ExitedEnd";
  }
  return "?";
}

const char* to_string(IssueCode code) {
  switch (code) {
    case IssueCode::InvalidGeometry: return "InvalidGeometry";
    case IssueCode::InvalidFlow: return "InvalidFlow";
    case IssueCode::InvalidWall: return "InvalidWall";
    case IssueCode::InvalidValve: return "InvalidValve";
    case IssueCode::InvalidSpecies: return "InvalidSpecies";
    case IssueCode::BadPlacement: return "BadPlacement";
    case IssueCode::StepTooCoarse: return "StepTooCoarse";
    case IssueCode::InvalidRun: return "InvalidRun";
  }
  return "?";
}

namespace {

std::string idx(const char* base, size_t i, const char* field) {
  std::ostringstream os;
  os << base << "[" << i << "]." << field;
  return os.str();
}

}  // namespace

std::vector<ValidationIssue> validate_scenario(const SimulationScenario& s) {
  std::vector<ValidationIssue> out;
  auto add = [&out](IssueCode code, std::string path, std::string msg) {
    out.push_back({code, std::move(path), std::move(msg)});
  };

  const double R = s.geometry.radius_um;
  const double L = s.geometry.length_um;

  if (!(R > 0.0)) add(IssueCode::InvalidGeometry, "geometry.radius_um", "duct radius must be positive");
  if (!(L > 0.0)) add(IssueCode::InvalidGeometry, "geometry.length_um", "duct length must be positive");

  if (s.flow.mean_velocity_um_s < 0.0)
    add(IssueCode::InvalidFlow, "flow.mean_velocity_um_s", "mean velocity must be non-negative");
  if (s.flow.kind == FlowKind::None && s.flow.mean_velocity_um_s != 0.0)
    add(IssueCode::InvalidFlow, "flow.mean_velocity_um_s", "flow kind None requires zero velocity");

  if (s.wall.leak_probability < 0.0 || s.wall.leak_probability > 1.0)
    add(IssueCode::InvalidWall, "wall.leak_probability", "leak probability must lie in [0, 1]");
  if (s.wall.kind == WallKind::Reflective && s.wall.leak_probability != 0.0)
    add(IssueCode::InvalidWall, "wall.leak_probability", "reflective wall requires zero leak probability");

  for (size_t i = 0; i < s.valves.size(); ++i) {
    const ValveSpec& v = s.valves[i];
    if (!(v.axial_um > 0.0 && v.axial_um < L))
      add(IssueCode::InvalidValve, idx("valves", i, "axial_um"), "valve plane must lie strictly inside the duct");
    if (!(v.period_s > 0.0))
      add(IssueCode::InvalidValve, idx("valves", i, "period_s"), "valve period must be positive");
    if (v.open_fraction < 0.0 || v.open_fraction > 1.0)
      add(IssueCode::InvalidValve, idx("valves", i, "open_fraction"), "open fraction must lie in [0, 1]");
  }

  if (s.species.empty())
    add(IssueCode::InvalidSpecies, "species", "at least one species is required");
  std::set<int> seen_ids;
  for (size_t i = 0; i < s.species.size(); ++i) {
    const MoleculeSpecies& sp = s.species[i];
    if (!(sp.diffusion_um2_s > 0.0))
      add(IssueCode::InvalidSpecies, idx("species", i, "diffusion_um2_s"), "diffusion coefficient must be positive");
    if (sp.degradation_rate_per_s < 0.0)
      add(IssueCode::InvalidSpecies, idx("species", i, "degradation_rate_per_s"), "degradation rate must be non-negative");
    if (!seen_ids.insert(sp.species_id).second)
      add(IssueCode::InvalidSpecies, idx("species", i, "species_id"), "species ids must be distinct");
  }

  auto check_anchor = [&](const SurfacePoint& p, const std::string& path) {
    if (p.axial_um < 0.0 || p.axial_um > L)
      add(IssueCode::BadPlacement, path + ".axial_um", "anchor must lie within the duct length");
  };
  check_anchor(s.tx_position, "tx_position");
  if (s.tx_position_b) check_anchor(*s.tx_position_b, "tx_position_b");

  for (size_t i = 0; i < s.receivers.size(); ++i) {
    const ReceiverSpec& r = s.receivers[i];
    if (!(r.radius_um > 0.0))
      add(IssueCode::BadPlacement, idx("receivers", i, "radius_um"), "receiver radius must be positive");
    else if (r.radius_um >= R)
      add(IssueCode::BadPlacement, idx("receivers", i, "radius_um"), "receiver radius must be smaller than the duct radius");
    if (r.center_axial_um < 0.0 || r.center_axial_um > L)
      add(IssueCode::BadPlacement, idx("receivers", i, "center_axial_um"), "receiver center must lie within the duct length");
    if (L > 0.0 && !(L > 2.0 * r.radius_um))
      add(IssueCode::InvalidGeometry, "geometry.length_um", "duct length must exceed twice every receiver radius");
  }

  if (s.molecules_per_emission < 0)
    add(IssueCode::InvalidRun, "molecules_per_emission", "emission size must be non-negative");
  if (!(s.time_step_s > 0.0))
    add(IssueCode::InvalidRun, "time_step_s", "time step must be positive");
  if (!(s.end_time_s >= s.time_step_s))
    add(IssueCode::InvalidRun, "end_time_s", "end time must cover at least one step");

  // Resolution guard: one diffusive step must stay well below the smallest
  // receiver, or sphere crossings get skipped over.
  if (s.time_step_s > 0.0 && !s.receivers.empty()) {
    double min_radius = s.receivers.front().radius_um;
    for (const ReceiverSpec& r : s.receivers) min_radius = std::min(min_radius, r.radius_um);
    for (size_t i = 0; i < s.species.size(); ++i) {
      const MoleculeSpecies& sp = s.species[i];
      if (sp.diffusion_um2_s > 0.0 &&
          std::sqrt(2.0 * sp.diffusion_um2_s * s.time_step_s) > min_radius / 4.0) {
        add(IssueCode::StepTooCoarse, "time_step_s",
            "sqrt(2*D*dt) exceeds a quarter of the smallest receiver radius for species " +
                std::to_string(sp.species_id));
      }
    }
  }

  return out;
}

void require_valid(const SimulationScenario& s) {
  const std::vector<ValidationIssue> issues = validate_scenario(s);
  if (issues.empty()) return;
  std::ostringstream os;
  os << "scenario invalid:";
  for (const ValidationIssue& issue : issues)
    os << " [" << to_string(issue.code) << " " << issue.field_path << ": " << issue.message << "]";
  throw Error("InvalidScenario", os.str());
}

}  // namespace ductmc
