"""Particle-level duct channel simulator with a link-layer harness."""

import json as _json

from ._ductmc import (  # noqa: F401
    DuctError,
    canonical_scenario,
    decode_constrained,
    decode_constrained_nearest,
    encode_constrained,
    evaluate_ber,
    first_passage_cdf,
    free_space_analytic,
    ita2_decode,
    ita2_encode,
    preset_names,
    preset_scenario,
    regime,
    run_cli,
    scenario_digest,
    simulate_cir,
    simulate_free_space,
    validate_scenario,
    version,
)

__version__ = version()


def scenario(ref):
    """Preset name or file path -> scenario dict."""
    if ref in preset_names():
        return _json.loads(preset_scenario(ref))
    with open(ref, "r", encoding="utf-8") as f:
        return _json.loads(f.read())


def simulate(scenario_obj, workers=1, bin_width_s=0.0):
    """Run one impulse response. Accepts a scenario dict or JSON text."""
    text = scenario_obj if isinstance(scenario_obj, str) else _json.dumps(scenario_obj)
    return simulate_cir(text, workers, bin_width_s)
