#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ductmc/channel.hpp"
#include "ductmc/cli.hpp"
#include "ductmc/comms.hpp"
#include "ductmc/scenario_io.hpp"
#include "ductmc/transport.hpp"
#include "ductmc/validate.hpp"
#include "ductmc/version.hpp"

namespace py = pybind11;

namespace {

using namespace ductmc;

py::dict ledger_to_dict(const MassLedger& ledger) {
  py::dict d;
  d["emitted"] = ledger.emitted;
  d["absorbed_per_receiver"] = ledger.absorbed_per_receiver;
  d["absorbed_total"] = ledger.absorbed_total();
  d["leaked"] = ledger.leaked;
  d["degraded"] = ledger.degraded;
  d["exited"] = ledger.exited;
  d["alive_at_end"] = ledger.alive_at_end;
  d["balanced"] = ledger.balanced();
  return d;
}

py::dict cir_to_dict(const ChannelImpulseResponse& cir) {
  py::dict d;
  d["bin_width_s"] = cir.bin_width_s;
  d["emitted"] = cir.emitted;
  d["scenario_digest"] = cir.scenario_digest;
  d["counts"] = cir.counts;
  return d;
}

py::dict result_to_dict(const SimulationResult& result) {
  py::dict d;
  d["cir"] = cir_to_dict(result.cir);
  d["ledger"] = ledger_to_dict(result.ledger);
  return d;
}

}  // namespace

PYBIND11_MODULE(_ductmc, m) {
  m.doc() = "Particle-level duct channel simulator";

  static py::exception<Error> duct_error(m, "DuctError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      const std::string message = e.code() + ": " + e.what();
      py::set_error(duct_error, message.c_str());
    }
  });

  m.def("version", [] { return std::string(kVersion); });
  m.def("preset_names", &preset_names);
  m.def("preset_scenario",
        [](const std::string& name) { return serialize_scenario(preset_scenario(name)); },
        py::arg("name"), "Canonical JSON text of a built-in scenario");
  m.def("canonical_scenario",
        [](const std::string& json_text) {
          return serialize_scenario(parse_scenario(json_text));
        },
        py::arg("json_text"));
  m.def("scenario_digest",
        [](const std::string& json_text) {
          return scenario_digest(parse_scenario(json_text));
        },
        py::arg("json_text"));
  m.def("validate_scenario",
        [](const std::string& json_text) {
          std::vector<std::tuple<std::string, std::string, std::string>> out;
          for (const ValidationIssue& issue : validate_scenario(parse_scenario(json_text)))
            out.emplace_back(to_string(issue.code), issue.field_path, issue.message);
          return out;
        },
        py::arg("json_text"), "List of (code, field, message); empty when runnable");
  m.def("regime",
        [](const std::string& json_text) {
          const SimulationScenario sc = parse_scenario(json_text);
          require_valid(sc);
          const DimensionlessReport r =
              classify_flow_regime(sc.geometry, sc.flow, sc.species.front());
          py::dict d;
          d["peclet"] = r.peclet;
          if (r.dispersion_factor)
            d["dispersion_factor"] = *r.dispersion_factor;
          else
            d["dispersion_factor"] = py::none();
          d["regime"] = std::string(to_string(r.regime));
          return d;
        },
        py::arg("json_text"));
  m.def("simulate_cir",
        [](const std::string& json_text, int workers, double bin_width_s) {
          return result_to_dict(simulate_cir(parse_scenario(json_text), workers, bin_width_s));
        },
        py::arg("json_text"), py::arg("workers") = 1, py::arg("bin_width_s") = 0.0);
  m.def("simulate_free_space",
        [](double distance_um, double receiver_radius_um, double diffusion_um2_s,
           std::int64_t molecules, double time_step_s, double end_time_s, double drift_um_s,
           std::uint64_t seed, int workers, double bin_width_s) {
          FreeSpaceSpec spec;
          spec.distance_um = distance_um;
          spec.receiver_radius_um = receiver_radius_um;
          spec.diffusion_um2_s = diffusion_um2_s;
          spec.molecules = molecules;
          spec.time_step_s = time_step_s;
          spec.end_time_s = end_time_s;
          spec.drift_um_s = drift_um_s;
          spec.seed = seed;
          return result_to_dict(simulate_free_space_cir(spec, workers, bin_width_s));
        },
        py::arg("distance_um"), py::arg("receiver_radius_um"), py::arg("diffusion_um2_s"),
        py::arg("molecules"), py::arg("time_step_s") = 1e-3, py::arg("end_time_s") = 10.0,
        py::arg("drift_um_s") = 0.0, py::arg("seed") = 1, py::arg("workers") = 1,
        py::arg("bin_width_s") = 0.0);
  m.def("first_passage_cdf", &analytic_1d_first_passage_cdf, py::arg("distance_um"),
        py::arg("velocity_um_s"), py::arg("diffusion_um2_s"), py::arg("t_s"));
  m.def("free_space_analytic",
        [](double d, double a, double D, double t) {
          const FreeSpaceAnalytic r = analytic_free_space_absorbing_sphere(d, a, D, t);
          return py::make_tuple(r.density_per_s, r.cumulative);
        },
        py::arg("distance_um"), py::arg("receiver_radius_um"), py::arg("diffusion_um2_s"),
        py::arg("t_s"), "(density_per_s, cumulative) of the absorbing-sphere oracle");
  m.def("ita2_encode",
        [](const std::string& text) {
          const Ita2EncodeResult r = ita2_encode(text);
          return py::make_tuple(r.bits, r.shifts_inserted);
        },
        py::arg("text"));
  m.def("ita2_decode", &ita2_decode, py::arg("bits"));
  m.def("encode_constrained",
        [](const Bits& bits) {
          const ConstrainedEncodeResult r = encode_constrained(bits);
          return py::make_tuple(r.bits, r.padded_bits);
        },
        py::arg("bits"));
  m.def("decode_constrained", &decode_constrained, py::arg("bits"));
  m.def("decode_constrained_nearest", &decode_constrained_nearest, py::arg("bits"));
  m.def("evaluate_ber",
        [](const Bits& sent, const Bits& received) {
          const BerResult r = evaluate_ber(sent, received);
          py::dict d;
          d["bits_compared"] = r.bits_compared;
          d["bit_errors"] = r.bit_errors;
          d["ber"] = r.ber;
          return d;
        },
        py::arg("sent"), py::arg("received"));
  m.def("run_cli", [](const std::vector<std::string>& args) { return run_cli(args); },
        py::arg("args"), "Invoke the command line front end in-process");
}
