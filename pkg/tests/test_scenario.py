import math

import pytest

from spdclink.errors import ScenarioParseError, ValidationError
from spdclink.scenario import (
    PRESET_NAMES,
    load_scenario,
    loads_scenario,
    parse_quantity,
)

MINIMAL = """
[scenario]
name = unit_test
distance = 2 m

[source]
center_wavelength = 405.5 nm
bandwidth = 160 MHz
power = 15.4 mW

[beams]
fiber_collimated_waist = 1.55 mm
focus_lens = 300 mm
pump_focus_waist = 25 um
spdc_waist = 13.6 um
spdc_wavelength = 810 nm
collimating_mirror = 500 mm
aperture = 25.4 mm
xi_pump = 0.056

[gains]
base = 0.05

[link]
pair_rate = 4.8e5 cps

[paths]
pump_path = 2 m
dc_path_a = 1 m
dc_path_b = 1 m

[detector]
efficiency_signal = 0.0375
efficiency_idler = 0.0375
coincidence_window = 1.5 ns
integration_time = 70 ms

[scan]
duration = 70 s
stage_velocity = 180 nm/s
"""


@pytest.mark.parametrize(
    "text,kind,expected",
    [
        ("180 nm/s", "speed", 1.8e-7),
        ("160 MHz", "frequency", 1.6e8),
        ("70 ms", "time", 0.07),
        ("1.5 ns", "time", 1.5e-9),
        ("4.8e5 cps", "rate", 4.8e5),
        ("25.4 mm", "length", 0.0254),
        ("96.15 %", "dimensionless", 0.9615),
        ("0.056", "dimensionless", 0.056),
        ("1 mrad", "angle", 1e-3),
        ("30 deg", "angle", math.pi / 6.0),
    ],
)
def test_parse_quantity(text, kind, expected):
    assert parse_quantity(text, kind) == pytest.approx(expected)


def test_parse_quantity_rejects_wrong_unit():
    with pytest.raises(ScenarioParseError):
        parse_quantity("3 kg", "length")
    with pytest.raises(ScenarioParseError):
        parse_quantity("180 nm/s", "length")
    with pytest.raises(ScenarioParseError):
        parse_quantity("abc", "length")


def test_presets_load_and_validate():
    for name in PRESET_NAMES:
        scenario = load_scenario(name)
        assert scenario.name == name
        assert scenario.scan.duration == pytest.approx(70.0)


def test_2m_preset_pins_reference_parameters():
    s = load_scenario("paper_2m")
    assert s.distance == pytest.approx(2.0)
    assert s.scan.stage_velocity == pytest.approx(180e-9)
    assert s.detector.integration_time == pytest.approx(70e-3)
    assert s.detector.coincidence_window == pytest.approx(1.5e-9)
    assert s.source.fwhm_bandwidth == pytest.approx(160e6)
    assert s.reference["visibility_coincidences"] == pytest.approx(0.9615)
    assert s.paths.pump_coh_len == pytest.approx(0.596, rel=1e-3)


def test_minimal_scenario_defaults():
    s = loads_scenario(MINIMAL)
    assert s.scan.fold_factor == 2.0
    assert s.detector.timestamp_jitter == pytest.approx(100e-12)
    assert s.detector.singles_visibility_signal is None
    assert s.turbulence.sigma_angle == 0.0
    assert s.optics_wavelength == s.source.center_wavelength
    assert s.reference == {}


def test_missing_required_field_names_it():
    text = MINIMAL.replace("efficiency_signal = 0.0375\n", "")
    with pytest.raises(ValidationError) as err:
        loads_scenario(text)
    assert "detector.efficiency_signal" in str(err.value)


def test_negative_gain_rejected():
    text = MINIMAL.replace("base = 0.05", "base = -0.05")
    with pytest.raises(ValidationError) as err:
        loads_scenario(text)
    assert "gains" in str(err.value)


def test_unknown_field_rejected():
    text = MINIMAL + "\n[detector2]\nfoo = 1\n"
    with pytest.raises(ValidationError):
        loads_scenario(text)
    text = MINIMAL.replace("base = 0.05", "base = 0.05\nbanana = 3")
    with pytest.raises(ValidationError) as err:
        loads_scenario(text)
    assert "gains.banana" in str(err.value)


def test_short_scan_rejected():
    text = MINIMAL.replace("duration = 70 s", "duration = 2 s")
    with pytest.raises(ValidationError) as err:
        loads_scenario(text)
    assert "scan.duration" in str(err.value)


def test_bad_syntax_is_parse_error():
    with pytest.raises(ScenarioParseError):
        loads_scenario("not a config at all [[[")


def test_bad_unit_is_parse_error():
    text = MINIMAL.replace("180 nm/s", "180 parsecs")
    with pytest.raises(ScenarioParseError):
        loads_scenario(text)


def test_missing_file_is_parse_error(tmp_path):
    with pytest.raises(ScenarioParseError):
        load_scenario(tmp_path / "nope.cfg")


def test_load_from_path(tmp_path):
    path = tmp_path / "custom.cfg"
    path.write_text(MINIMAL)
    s = load_scenario(path)
    assert s.name == "unit_test"


def test_to_dict_echo():
    s = loads_scenario(MINIMAL)
    d = s.to_dict()
    assert d["scan"]["stage_velocity_m_s"] == pytest.approx(1.8e-7)
    assert d["detector"]["coincidence_window_s"] == pytest.approx(1.5e-9)
    assert d["name"] == "unit_test"
