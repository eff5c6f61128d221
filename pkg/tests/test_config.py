import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from creds.config import (SWEEPS, ConfigError, ScenarioConfig, load_config, preset, preset_names, save_config)
from creds.consensus import ConsensusConfig


def test_minimal_file_gets_defaults(tmp_path):
    p = tmp_path / "c.json"
    p.write_text("{}")
    cfg = load_config(p)
    assert cfg == ScenarioConfig()
    assert cfg.area == (1000.0, 1000.0) and cfg.sensing_radius == 300.0 and cfg.dt == 0.1


def test_homo_preset():
    cfg = preset("homo-po-25")
    assert cfg.n_agents == 5 and cfg.n_fires == 25 and cfg.observability == "partial"
    assert cfg.capabilities() == [(20.0, 20.0)] * 5
    assert cfg.radius_range == (5.0, 15.0) and cfg.sensing_radius == 300.0


def test_hetero_team_averages_match_homo():
    caps = preset("hetero-fo-20").capabilities()
    assert sorted({c[0] for c in caps}) == [16.0, 26.0]
    assert sum(c[0] for c in caps) / 5 == 20.0 and sum(c[1] for c in caps) / 5 == 20.0


def test_every_named_preset_builds():
    for name in preset_names():
        assert preset(name).name.startswith(name.split("-")[0])
    with pytest.raises(ConfigError):
        preset("nope")


@pytest.mark.parametrize("data, path", [
    ({"base_quench_rate": -1}, "base_quench_rate"),
    ({"n_fires": 0}, "n_fires"),
    ({"cost": "fast"}, "cost"),
    ({"consensus": {"w1": 0}}, "consensus.w1"),
    ({"consensus": {"speed": 1}}, "consensus.speed"),
    ({"fire_radii": [1.0, 2.0]}, "fire_radii"),
    ({"unknown": 1}, "unknown"),
    ({"agent_starts": [[0, 0]] * 4 + [[2000, 0]]}, "agent_starts[4][0]"),
    ({"spread_rate": 0}, "spread_rate"),
])
def test_validation_names_the_field(data, path):
    with pytest.raises(ConfigError) as exc:
        ScenarioConfig.from_dict(data)
    assert exc.value.path == path
    assert str(exc.value).startswith(path)


def test_bad_json_reported_with_file(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{")
    with pytest.raises(ConfigError, match="broken.json"):
        load_config(p)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")


def test_file_can_start_from_preset(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"preset": "hetero-po-20", "cost": "baseline"}))
    cfg = load_config(p)
    assert cfg.team == "hetero" and cfg.n_fires == 20 and cfg.cost == "baseline"


def test_round_trip_of_every_preset(tmp_path):
    for name in preset_names():
        cfg = preset(name)
        save_config(cfg, tmp_path / "c.json")
        assert load_config(tmp_path / "c.json") == cfg


@settings(max_examples=30)
@given(st.integers(1, 40), st.floats(0.01, 0.2), st.sampled_from(["full", "partial"]), st.integers(1, 6),
       st.booleans())
def test_round_trip_property(n_fires, spread, obs, w1, ring):
    graph = {1: [2, 5], 2: [1, 3], 3: [2, 4], 4: [3, 5], 5: [4, 1]} if ring else None
    cfg = ScenarioConfig(n_fires=n_fires, spread_rate=spread, observability=obs,
                         consensus=ConsensusConfig(w1=w1, graph=graph))
    assert ScenarioConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg


def test_sweeps_vary_one_axis():
    spec = SWEEPS["quench-rate"]
    cells = list(spec.cells())
    assert len(cells) == len(spec.values) * len(spec.ratios)
    for value, ratio, cfg in cells:
        assert cfg.base_quench_rate == value and cfg.n_fires == ratio * cfg.n_agents
        assert cfg.base_speed == 20.0
