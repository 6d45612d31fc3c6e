import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qkdrates.config import ConfigError, load_config, parse_config
from qkdrates.csvio import dumps, format_cell, loads, parse_cell
from qkdrates.presets import SET1, SET2, get_preset

finite = st.floats(allow_nan=False, allow_infinity=False)


@given(st.lists(st.tuples(finite, st.one_of(st.none(), finite), st.booleans()), max_size=20))
def test_csv_round_trip(rows):
    header = ["x", "K_a", "feasible_a"]
    dict_rows = [dict(zip(header, r)) for r in rows]
    h, back = loads(dumps(header, dict_rows))
    assert h == header
    assert len(back) == len(rows)
    for (x, k, ok), row in zip(rows, back):
        assert parse_cell(row["x"]) == x
        assert parse_cell(row["K_a"]) == k
        assert row["feasible_a"] == ("1" if ok else "0")
    assert dumps(header, [{c: parse_cell(row[c]) if c != "feasible_a" else row[c] == "1"
                           for c in header} for row in back]) == dumps(header, dict_rows)


def test_format_cell():
    assert format_cell(np.float64(0.1)) == "0.1"
    assert format_cell(np.float32(0.5)) == "0.5"
    assert format_cell(np.int64(3)) == "3"
    assert format_cell(np.bool_(True)) == "1"
    assert format_cell(None) == "" and format_cell(math.nan) == ""
    assert format_cell(1e-300) == "1e-300"


def test_presets_field_for_field():
    d1, c1 = SET1.dv, SET1.cv
    assert (d1.V_pm, d1.V_eb, d1.t_B, d1.eta, d1.p_d, d1.eps_cow, d1.zeta, d1.f_EC) == \
           (0.99, 0.96, 1.0, 0.1, 1e-5, 0.03, 0.0, 1.2)
    assert (c1.epsilon, c1.eta, c1.v_el, c1.beta) == (0.005, 0.6, 0.01, 0.9)
    d2, c2 = SET2.dv, SET2.cv
    assert (d2.V_pm, d2.V_eb, d2.t_B, d2.eta, d2.p_d, d2.eps_cow, d2.zeta, d2.f_EC) == \
           (0.99, 0.99, 1.0, 0.2, 1e-6, 0.01, 0.0, 1.0)
    assert (c2.epsilon, c2.eta, c2.v_el, c2.beta) == (0.001, 0.85, 0.0, 0.9)
    assert SET1.alpha_db_per_km == SET2.alpha_db_per_km == 0.2
    assert get_preset(1) is SET1 and get_preset("set2") is SET2
    with pytest.raises(ValueError):
        get_preset(3)


def test_config_preset_with_override():
    cfg = parse_config("[scenario]\nset = 1\nprotocol = decoy, wcp\ngrid = 7\n"
                       "[photon_counter]\ndetector_efficiency = 0.15\n")
    assert cfg.params.dv.eta == 0.15 and cfg.params.dv.p_d == 1e-5
    assert cfg.params.cv == SET1.cv
    assert cfg.protocols == ("decoy", "wcp") and cfg.grid == 7


FULL_DV = """[photon_counter]
visibility_pm = 0.99
visibility_eb = 0.96
bob_transmission = 1
detector_efficiency = 0.1
dark_count_prob_per_gate = 1e-5
cow_bit_error = 0.03
eb_multipair_pns_fraction = 0
f_ec = 1.2
"""


def test_config_explicit_fields():
    cfg = parse_config(FULL_DV, needs=("photon_counter",))
    assert cfg.params.dv == SET1.dv and cfg.params.cv is None


def test_config_missing_field_named():
    text = FULL_DV.replace("detector_efficiency = 0.1\n", "")
    with pytest.raises(ConfigError) as exc:
        parse_config(text, needs=("photon_counter",))
    assert exc.value.field == "photon_counter.detector_efficiency"


@pytest.mark.parametrize("text,field", [
    ("[scenario]\nset = 1\n[photon_counter]\ndetector_eff = 0.1\n", "photon_counter.detector_eff"),
    ("[scenario]\nset = 1\n[homodyne]\nexcess_noise_snu = abc\n", "homodyne.excess_noise_snu"),
    ("[scenario]\nset = 3\n", "scenario.set"),
    ("[scenario]\nset = 1\ngrid = 1\n", "scenario.grid"),
    ("[scenario]\nset = 1\nt_min = 0.5\nt_max = 0.1\n", "scenario.range"),
    ("[scenario]\nset = 1\nsweep = Q2\n", "scenario.sweep"),
    ("[scenario]\nset = 1\nscenario = trusted\n", "scenario.scenario"),
    ("not an ini", "file"),
])
def test_config_errors(text, field):
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    assert exc.value.field == field


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError) as exc:
        load_config(str(tmp_path / "nope.ini"))
    assert exc.value.field == "file"


def test_distance_sweep_keys():
    cfg = parse_config("[scenario]\nset = 2\nsweep = distance\ndistance_min_km = 1\n"
                       "distance_max_km = 100\n[fiber]\nalpha_db_per_km = 0.25\n")
    assert (cfg.x_min, cfg.x_max, cfg.params.alpha_db_per_km) == (1.0, 100.0, 0.25)
