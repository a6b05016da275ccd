#include "ductmc/scenario_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ductmc {

using ordered_json = nlohmann::ordered_json;

namespace {

const char* to_string(EndCapPolicy p) {
  switch (p) {
    case EndCapPolicy::ReflectBoth: return "ReflectBoth";
    case EndCapPolicy::AbsorbFarEnd: return "AbsorbFarEnd";
    case EndCapPolicy::AbsorbBoth: return "AbsorbBoth";
  }
  return "?";
}

const char* to_string(FlowKind k) {
  switch (k) {
    case FlowKind::None: return "None";
    case FlowKind::Uniform: return "Uniform";
    case FlowKind::Poiseuille: return "Poiseuille";
  }
  return "?";
}

const char* to_string(WallKind k) {
  switch (k) {
    case WallKind::Reflective: return "Reflective";
    case WallKind::Permeable: return "Permeable";
  }
  return "?";
}

EndCapPolicy end_cap_from(const std::string& s) {
  if (s == "ReflectBoth") return EndCapPolicy::ReflectBoth;
  if (s == "AbsorbFarEnd") return EndCapPolicy::AbsorbFarEnd;
  if (s == "AbsorbBoth") return EndCapPolicy::AbsorbBoth;
  throw Error("ParseError", "unknown end_cap_policy: " + s);
}

FlowKind flow_kind_from(const std::string& s) {
  if (s == "None") return FlowKind::None;
  if (s == "Uniform") return FlowKind::Uniform;
  if (s == "Poiseuille") return FlowKind::Poiseuille;
  throw Error("ParseError", "unknown flow kind: " + s);
}

WallKind wall_kind_from(const std::string& s) {
  if (s == "Reflective") return WallKind::Reflective;
  if (s == "Permeable") return WallKind::Permeable;
  throw Error("ParseError", "unknown wall kind: " + s);
}

ordered_json surface_point_json(const SurfacePoint& p) {
  ordered_json j;
  j["axial_um"] = p.axial_um;
  j["wall_anchor_angle_rad"] = p.wall_anchor_angle_rad;
  return j;
}

SurfacePoint surface_point_from(const ordered_json& j, const char* path) {
  SurfacePoint p;
  if (!j.is_object()) throw Error("ParseError", std::string(path) + " must be an object");
  p.axial_um = j.at("axial_um").get<double>();
  p.wall_anchor_angle_rad = j.at("wall_anchor_angle_rad").get<double>();
  return p;
}

}  // namespace

std::string serialize_scenario(const SimulationScenario& s) {
  ordered_json j;
  j["geometry"]["radius_um"] = s.geometry.radius_um;
  j["geometry"]["length_um"] = s.geometry.length_um;
  j["geometry"]["end_cap_policy"] = to_string(s.geometry.end_cap_policy);
  j["flow"]["kind"] = to_string(s.flow.kind);
  j["flow"]["mean_velocity_um_s"] = s.flow.mean_velocity_um_s;
  j["wall"]["kind"] = to_string(s.wall.kind);
  j["wall"]["leak_probability"] = s.wall.leak_probability;
  j["valves"] = ordered_json::array();
  for (const ValveSpec& v : s.valves) {
    ordered_json vj;
    vj["axial_um"] = v.axial_um;
    vj["period_s"] = v.period_s;
    vj["open_fraction"] = v.open_fraction;
    vj["phase_s"] = v.phase_s;
    j["valves"].push_back(vj);
  }
  j["species"] = ordered_json::array();
  for (const MoleculeSpecies& sp : s.species) {
    ordered_json sj;
    sj["species_id"] = sp.species_id;
    sj["diffusion_um2_s"] = sp.diffusion_um2_s;
    sj["degradation_rate_per_s"] = sp.degradation_rate_per_s;
    j["species"].push_back(sj);
  }
  j["tx_position"] = surface_point_json(s.tx_position);
  if (s.tx_position_b) j["tx_position_b"] = surface_point_json(*s.tx_position_b);
  j["receivers"] = ordered_json::array();
  for (const ReceiverSpec& r : s.receivers) {
    ordered_json rj;
    rj["center_axial_um"] = r.center_axial_um;
    rj["wall_anchor_angle_rad"] = r.wall_anchor_angle_rad;
    rj["radius_um"] = r.radius_um;
    j["receivers"].push_back(rj);
  }
  j["molecules_per_emission"] = s.molecules_per_emission;
  j["time_step_s"] = s.time_step_s;
  j["end_time_s"] = s.end_time_s;
  j["seed"] = s.seed;
  return j.dump(2) + "\n";
}

SimulationScenario parse_scenario(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    throw Error("ParseError", std::string("scenario is not valid JSON: ") + e.what());
  }
  try {
    SimulationScenario s;
    const ordered_json& g = j.at("geometry");
    s.geometry.radius_um = g.at("radius_um").get<double>();
    s.geometry.length_um = g.at("length_um").get<double>();
    s.geometry.end_cap_policy = end_cap_from(g.at("end_cap_policy").get<std::string>());
    const ordered_json& f = j.at("flow");
    s.flow.kind = flow_kind_from(f.at("kind").get<std::string>());
    s.flow.mean_velocity_um_s = f.at("mean_velocity_um_s").get<double>();
    const ordered_json& w = j.at("wall");
    s.wall.kind = wall_kind_from(w.at("kind").get<std::string>());
    s.wall.leak_probability = w.at("leak_probability").get<double>();
    for (const ordered_json& vj : j.at("valves")) {
      ValveSpec v;
      v.axial_um = vj.at("axial_um").get<double>();
      v.period_s = vj.at("period_s").get<double>();
      v.open_fraction = vj.at("open_fraction").get<double>();
      v.phase_s = vj.at("phase_s").get<double>();
      s.valves.push_back(v);
    }
    for (const ordered_json& sj : j.at("species")) {
      MoleculeSpecies sp;
      sp.species_id = sj.at("species_id").get<int>();
      sp.diffusion_um2_s = sj.at("diffusion_um2_s").get<double>();
      sp.degradation_rate_per_s = sj.at("degradation_rate_per_s").get<double>();
      s.species.push_back(sp);
    }
    s.tx_position = surface_point_from(j.at("tx_position"), "tx_position");
    if (j.contains("tx_position_b"))
      s.tx_position_b = surface_point_from(j.at("tx_position_b"), "tx_position_b");
    for (const ordered_json& rj : j.at("receivers")) {
      ReceiverSpec r;
      r.center_axial_um = rj.at("center_axial_um").get<double>();
      r.wall_anchor_angle_rad = rj.at("wall_anchor_angle_rad").get<double>();
      r.radius_um = rj.at("radius_um").get<double>();
      s.receivers.push_back(r);
    }
    s.molecules_per_emission = j.at("molecules_per_emission").get<std::int64_t>();
    s.time_step_s = j.at("time_step_s").get<double>();
    s.end_time_s = j.at("end_time_s").get<double>();
    s.seed = j.at("seed").get<std::uint64_t>();
    return s;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error("ParseError", std::string("scenario missing or mistyped field: ") + e.what());
  }
}

SimulationScenario load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("FileNotFound", "cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

void save_scenario_file(const SimulationScenario& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("WriteError", "cannot write scenario file: " + path);
  out << serialize_scenario(s);
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string scenario_digest(const SimulationScenario& s) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(serialize_scenario(s))));
  return std::string(buf);
}

SimulationScenario preset_scenario(const std::string& name) {
  SimulationScenario s;
  if (name == "vein") {
    // Millimeter-scale vessel; dimensionless numbers put it on the
    // parabolic-profile side of the dispersion criterion, so the default
    // profile is Poiseuille. Closed end caps keep the full emitted
    // population inside the segment, which is what gives the long response
    // tail; switch to AbsorbFarEnd to model washout instead.
    s.geometry = {30.0, 2000.0, EndCapPolicy::ReflectBoth};
    s.flow = {FlowKind::Poiseuille, 5000.0};
    s.wall = {WallKind::Reflective, 0.0};
    s.species = {{0, 670.0, 0.0}};
    s.tx_position = {0.0, 0.0};
    s.receivers = {{1990.0, 0.0, 5.0}};
    s.molecules_per_emission = 10000;
    s.time_step_s = 1e-3;
    s.end_time_s = 10.0;
    s.seed = 1;
  } else if (name == "capillary") {
    // Illustrative only: plausible micro-vessel numbers, not measured ones.
    s.geometry = {4.0, 500.0, EndCapPolicy::AbsorbFarEnd};
    s.flow = {FlowKind::Uniform, 200.0};
    s.wall = {WallKind::Permeable, 0.05};
    s.species = {{0, 600.0, 0.0}};
    s.tx_position = {0.0, 0.0};
    s.receivers = {{490.0, 0.0, 2.0}};
    s.molecules_per_emission = 10000;
    s.time_step_s = 2e-4;
    s.end_time_s = 10.0;
    s.seed = 1;
  } else if (name == "artery-distal") {
    // Illustrative only. The dispersion criterion classifies even this
    // wide, fast vessel as parabolic-profile; the preset keeps Uniform to
    // match the usual description of large-vessel flow, and the regime
    // report surfaces the tension.
    s.geometry = {1000.0, 10000.0, EndCapPolicy::AbsorbFarEnd};
    s.flow = {FlowKind::Uniform, 20000.0};
    s.wall = {WallKind::Reflective, 0.0};
    s.species = {{0, 670.0, 0.0}};
    s.tx_position = {0.0, 0.0};
    s.receivers = {{9900.0, 0.0, 20.0}};
    s.molecules_per_emission = 10000;
    s.time_step_s = 5e-3;
    s.end_time_s = 5.0;
    s.seed = 1;
  } else {
    throw Error("UnknownPreset", "unknown preset: " + name);
  }
  return s;
}

std::vector<std::string> preset_names() {
  return {"vein", "capillary", "artery-distal"};
}

}  // namespace ductmc
