"""End-to-end sanity of the python package against pinned values."""

import json

import pytest

import ductmc


def test_version_string():
    assert ductmc.version() == ductmc.__version__
    assert ductmc.version().count(".") == 2


def test_presets_round_trip():
    names = ductmc.preset_names()
    assert "vein" in names
    for name in names:
        text = ductmc.preset_scenario(name)
        assert ductmc.validate_scenario(text) == []
        digest = ductmc.scenario_digest(text)
        assert len(digest) == 16
        int(digest, 16)
        assert ductmc.canonical_scenario(text) == text


def test_vein_regime_numbers():
    rep = ductmc.regime(ductmc.preset_scenario("vein"))
    assert rep["peclet"] == pytest.approx(223.8806, abs=1e-3)
    assert rep["dispersion_factor"] == pytest.approx(0.29777, abs=1e-4)
    assert rep["regime"] == "PoiseuilleDominated"


def test_tiny_simulation_balances():
    scenario = ductmc.scenario("vein")
    scenario["molecules_per_emission"] = 300
    scenario["end_time_s"] = 0.05
    result = ductmc.simulate(scenario)
    ledger = result["ledger"]
    assert ledger["balanced"] is True
    assert ledger["emitted"] == 300
    assert result["cir"]["emitted"] == 300
    assert len(result["cir"]["counts"]) == 1


def test_analytic_oracles():
    _, cumulative = ductmc.free_space_analytic(20.0, 5.0, 670.0, 10.0)
    assert cumulative == pytest.approx(0.2242246297, rel=1e-6)
    cdf = ductmc.first_passage_cdf(100.0, 0.0, 670.0, 10.0)
    assert cdf == pytest.approx(0.3876601736, rel=1e-6)


def test_telegraph_and_constrained_codes():
    bits, shifts = ductmc.ita2_encode("HELLO WORLD 123")
    assert shifts == 1
    assert ductmc.ita2_decode(bits) == "HELLO WORLD 123"

    code, padded = ductmc.encode_constrained([1, 1])
    assert code == [0, 1, 0, 0]
    assert padded == 0
    assert ductmc.decode_constrained(code) == [1, 1]

    ber = ductmc.evaluate_ber([0, 1, 1, 0], [0, 1, 0, 0])
    assert ber["bit_errors"] == 1
    assert ber["ber"] == pytest.approx(0.25)


def test_errors_carry_stable_codes():
    with pytest.raises(ductmc.DuctError, match="UnknownPreset"):
        ductmc.preset_scenario("aorta")


def test_run_cli_in_process(tmp_path):
    assert ductmc.run_cli(["regime", "vein", "--out", str(tmp_path)]) == 0
    record = json.loads((tmp_path / "regime.json").read_text())
    assert record["regime"] == "PoiseuilleDominated"
