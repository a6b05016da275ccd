#include "ductmc/boundary.hpp"

#include <algorithm>
#include <cmath>

namespace ductmc {

ReceiverBody receiver_body(const ReceiverSpec& spec, const VesselGeometry& geometry) {
  ReceiverBody body;
  body.center.x = spec.center_axial_um;
  body.center.y = geometry.radius_um * std::cos(spec.wall_anchor_angle_rad);
  body.center.z = geometry.radius_um * std::sin(spec.wall_anchor_angle_rad);
  body.radius_um = spec.radius_um;
  return body;
}

bool valve_state(const ValveSpec& valve, double t_s) {
  const double cycles = (t_s + valve.phase_s) / valve.period_s;
  const double frac = cycles - std::floor(cycles);
  return frac < valve.open_fraction;
}

std::optional<AbsorbHit> check_absorption(const Segment& segment,
                                          const std::vector<ReceiverBody>& receivers) {
  std::optional<AbsorbHit> best;
  const double dx = segment.end.x - segment.start.x;
  const double dy = segment.end.y - segment.start.y;
  const double dz = segment.end.z - segment.start.z;
  const double dd = dx * dx + dy * dy + dz * dz;
  for (size_t i = 0; i < receivers.size(); ++i) {
    const ReceiverBody& r = receivers[i];
    const double mx = segment.start.x - r.center.x;
    const double my = segment.start.y - r.center.y;
    const double mz = segment.start.z - r.center.z;
    const double mm = mx * mx + my * my + mz * mz;
    const double rr = r.radius_um * r.radius_um;
    double fraction;
    if (mm <= rr) {
      fraction = 0.0;  // spawned or re-checked inside the sphere
    } else {
      if (dd <= 0.0) continue;
      const double md = mx * dx + my * dy + mz * dz;
      const double disc = md * md - dd * (mm - rr);
      if (disc < 0.0) continue;
      fraction = (-md - std::sqrt(disc)) / dd;
      if (fraction < 0.0 || fraction > 1.0) continue;
    }
    if (!best || fraction < best->fraction) best = AbsorbHit{int(i), fraction};
  }
  return best;
}

WallOutcome resolve_wall(const Segment& segment, const VesselGeometry& geometry,
                         const WallModel& wall, RngStream& leak_rng) {
  WallOutcome out;
  out.y = segment.end.y;
  out.z = segment.end.z;
  const double R = geometry.radius_um;
  double r_end = std::sqrt(out.y * out.y + out.z * out.z);
  if (r_end <= R) return out;

  // First wall contact along the lateral projection of the segment; this
  // timestamps a leak. |lat(f)| = R is a quadratic in f.
  double contact_fraction = 0.0;
  {
    const double y0 = segment.start.y, z0 = segment.start.z;
    const double dy = segment.end.y - y0, dz = segment.end.z - z0;
    const double a = dy * dy + dz * dz;
    const double b = y0 * dy + z0 * dz;
    const double c = y0 * y0 + z0 * z0 - R * R;
    if (a > 0.0) {
      const double disc = b * b - a * c;
      if (disc >= 0.0) {
        const double f = (-b + std::sqrt(disc)) / a;
        contact_fraction = std::clamp(f, 0.0, 1.0);
      }
    }
  }

  const bool permeable = wall.kind == WallKind::Permeable && wall.leak_probability > 0.0;
  for (int iter = 0; iter < 4 && r_end > R; ++iter) {
    if (permeable && leak_rng.bernoulli(wall.leak_probability)) {
      out.leaked = true;
      out.leak_fraction = contact_fraction;
      return out;
    }
    out.reflected = true;
    const double scale = (2.0 * R - r_end) / r_end;
    out.y *= scale;
    out.z *= scale;
    r_end = std::abs(2.0 * R - r_end);
  }
  if (r_end > R) {
    const double scale = R / r_end;
    out.y *= scale;
    out.z *= scale;
    out.reflected = true;
  }
  return out;
}

ValveOutcome resolve_valves(double axial_start, double axial_end,
                            const std::vector<ValveSpec>& valves, double t_s, double dt_s) {
  ValveOutcome out;
  out.axial_end = axial_end;
  if (valves.empty()) return out;

  double from = axial_start;
  double target = axial_end;
  double consumed = 0.0;  // fraction of the step already traversed
  for (int iter = 0; iter < 16; ++iter) {
    int nearest = -1;
    double nearest_dist = 0.0;
    for (size_t i = 0; i < valves.size(); ++i) {
      const double xv = valves[i].axial_um;
      const bool crosses = (from < xv && target >= xv) || (from > xv && target <= xv);
      if (!crosses) continue;
      const double dist = std::abs(xv - from);
      if (dist <= 0.0) continue;  // sitting on the plane: treat as already past
      if (nearest < 0 || dist < nearest_dist) {
        nearest = int(i);
        nearest_dist = dist;
      }
    }
    if (nearest < 0) {
      out.axial_end = target;
      return out;
    }
    const double xv = valves[nearest].axial_um;
    const double remaining = std::abs(target - from);
    const double f_cross = consumed + (1.0 - consumed) * (nearest_dist / remaining);
    if (valve_state(valves[nearest], t_s + f_cross * dt_s)) {
      consumed = f_cross;
      from = xv;  // open: pass through, keep scanning beyond the plane
    } else {
      out.reflected = true;
      consumed = f_cross;
      const double mirrored = 2.0 * xv - target;
      from = xv;
      target = mirrored;
    }
  }
  out.axial_end = from;  // pathological chatter: stop at the last plane
  return out;
}

EndCapOutcome resolve_end_caps(double axial_start, double axial_end,
                               const VesselGeometry& geometry) {
  EndCapOutcome out;
  out.axial_end = axial_end;
  const double L = geometry.length_um;
  const EndCapPolicy policy = geometry.end_cap_policy;
  if (axial_end >= 0.0 && axial_end <= L) return out;

  auto fraction_to = [&](double plane) {
    const double delta = axial_end - axial_start;
    if (delta == 0.0) return 0.0;
    return std::clamp((plane - axial_start) / delta, 0.0, 1.0);
  };

  const bool absorb_far =
      policy == EndCapPolicy::AbsorbFarEnd || policy == EndCapPolicy::AbsorbBoth;
  const bool absorb_near = policy == EndCapPolicy::AbsorbBoth;

  if (axial_end > L && absorb_far) {
    out.exited = true;
    out.exit_fraction = fraction_to(L);
    return out;
  }
  if (axial_end < 0.0 && absorb_near) {
    out.exited = true;
    out.exit_fraction = fraction_to(0.0);
    return out;
  }

  double x = axial_end;
  for (int iter = 0; iter < 4 && (x < 0.0 || x > L); ++iter) {
    if (x < 0.0) x = -x;
    if (x > L) x = 2.0 * L - x;
    out.reflected = true;
  }
  out.axial_end = std::clamp(x, 0.0, L);
  // A reflected endpoint can land beyond the opposite absorbing cap when the
  // step is absurdly long; the clamp above keeps it inside either way.
  return out;
}

StepResolution resolve_step(const Segment& segment, const VesselGeometry& geometry,
                            const WallModel& wall, const std::vector<ValveSpec>& valves,
                            const std::vector<ReceiverBody>& receivers, double t_s,
                            double dt_s, RngStream& leak_rng) {
  StepResolution res;

  if (auto hit = check_absorption(segment, receivers)) {
    res.terminal = true;
    res.state = ParticleStateKind::Absorbed;
    res.event_time_s = t_s + hit->fraction * dt_s;
    res.receiver = hit->receiver;
    return res;
  }

  const ValveOutcome valve_out =
      resolve_valves(segment.start.x, segment.end.x, valves, t_s, dt_s);

  const WallOutcome wall_out = resolve_wall(segment, geometry, wall, leak_rng);
  if (wall_out.leaked) {
    res.terminal = true;
    res.state = ParticleStateKind::Leaked;
    res.event_time_s = t_s + wall_out.leak_fraction * dt_s;
    return res;
  }

  const EndCapOutcome cap_out = resolve_end_caps(segment.start.x, valve_out.axial_end, geometry);
  if (cap_out.exited) {
    res.terminal = true;
    res.state = ParticleStateKind::ExitedEnd;
    res.event_time_s = t_s + cap_out.exit_fraction * dt_s;
    return res;
  }

  Vec3 end{cap_out.axial_end, wall_out.y, wall_out.z};
  if (valve_out.reflected || wall_out.reflected || cap_out.reflected) {
    if (auto hit = check_absorption(Segment{segment.start, end}, receivers)) {
      res.terminal = true;
      res.state = ParticleStateKind::Absorbed;
      res.event_time_s = t_s + hit->fraction * dt_s;
      res.receiver = hit->receiver;
      return res;
    }
  }

  res.position = end;
  return res;
}

}  // namespace ductmc
