"""Scenario configuration, JSON round-trip, validation and named presets."""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .consensus import ConsensusConfig
from .schedule import COSTS

TEAMS = ("homo", "hetero", "custom")
OBSERVABILITY = ("full", "partial")


class ConfigError(ValueError):
    """Invalid configuration; the message starts with the offending field path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass
class ScenarioConfig:
    """Everything needed to instantiate runs of one scenario.

    Fire centres are either given or drawn once per master seed and then
    shared by every run; radii and agent start positions are drawn per run
    unless given.
    """

    name: str = "custom"
    area: tuple[float, float] = (1000.0, 1000.0)
    n_fires: int = 15
    fire_centers: tuple[tuple[float, float], ...] | None = None
    fire_radii: tuple[float, ...] | None = None
    radius_range: tuple[float, float] = (5.0, 15.0)
    spread_rate: float = 0.07
    spread_rates: tuple[float, ...] | None = None
    team: str = "homo"
    n_agents: int = 5
    base_speed: float = 20.0
    base_quench_rate: float = 20.0
    hetero_high: float = 26.0
    hetero_low: float = 16.0
    speeds: tuple[float, ...] | None = None
    quench_rates: tuple[float, ...] | None = None
    agent_starts: tuple[tuple[float, float], ...] | None = None
    sensing_radius: float = 300.0
    observability: str = "partial"
    cost: str = "dpmc"
    consensus: ConsensusConfig = field(default_factory=ConsensusConfig)
    dt: float = 0.1
    horizon: float = 7200.0
    popup_rate: float = 0.0
    popup_until: float = 0.0
    infeasible_rule: str = "max"
    seed: int = 0

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        _pos = _require_positive
        if not isinstance(self.name, str):
            raise ConfigError("name", "must be a string")
        if len(self.area) != 2:
            raise ConfigError("area", "must be [width, height]")
        for k, v in enumerate(self.area):
            _pos(f"area[{k}]", v)
        _require_int("n_fires", self.n_fires, 1)
        _require_int("n_agents", self.n_agents, 1)
        if len(self.radius_range) != 2 or not 0 < self.radius_range[0] <= self.radius_range[1]:
            raise ConfigError("radius_range", "must be [lo, hi] with 0 < lo <= hi")
        _pos("spread_rate", self.spread_rate)
        for name in ("base_speed", "base_quench_rate", "hetero_high", "hetero_low", "sensing_radius", "dt",
                     "horizon"):
            _pos(name, getattr(self, name))
        if self.popup_rate < 0 or not math.isfinite(self.popup_rate):
            raise ConfigError("popup_rate", "must be >= 0")
        if self.popup_until < 0:
            raise ConfigError("popup_until", "must be >= 0")
        if self.team not in TEAMS:
            raise ConfigError("team", f"must be one of {TEAMS}, got {self.team!r}")
        if self.observability not in OBSERVABILITY:
            raise ConfigError("observability", f"must be one of {OBSERVABILITY}, got {self.observability!r}")
        if self.cost not in COSTS:
            raise ConfigError("cost", f"must be one of {COSTS}, got {self.cost!r}")
        if self.infeasible_rule not in ("min", "max"):
            raise ConfigError("infeasible_rule", "must be 'min' or 'max'")
        _require_int("seed", self.seed, 0)
        self._check_list("fire_centers", self.fire_centers, self.n_fires, point=True)
        self._check_list("fire_radii", self.fire_radii, self.n_fires)
        self._check_list("spread_rates", self.spread_rates, self.n_fires)
        self._check_list("speeds", self.speeds, self.n_agents)
        self._check_list("quench_rates", self.quench_rates, self.n_agents)
        self._check_list("agent_starts", self.agent_starts, self.n_agents, point=True)
        if self.team == "custom" and (self.speeds is None or self.quench_rates is None):
            raise ConfigError("team", "custom team needs speeds and quench_rates")
        c = self.consensus
        if not isinstance(c, ConsensusConfig):
            raise ConfigError("consensus", "must be an object")
        _require_int("consensus.w1", c.w1, 1)
        if c.w2 is not None:
            _require_int("consensus.w2", c.w2, 1)
        if c.max_iters is not None:
            _require_int("consensus.max_iters", c.max_iters, 1)
        if c.graph is not None:
            ids = set(range(1, self.n_agents + 1))
            for i, nbrs in c.graph.items():
                if i not in ids:
                    raise ConfigError(f"consensus.graph.{i}", "unknown agent id")
                for k in nbrs:
                    if k not in ids:
                        raise ConfigError(f"consensus.graph.{i}", f"unknown neighbour {k}")

    def _check_list(self, name: str, value, n: int, point: bool = False) -> None:
        if value is None:
            return
        if len(value) != n:
            raise ConfigError(name, f"expected {n} entries, got {len(value)}")
        for k, v in enumerate(value):
            if point:
                if len(v) != 2:
                    raise ConfigError(f"{name}[{k}]", "must be [x, y]")
                for d, (x, hi) in enumerate(zip(v, self.area)):
                    if not 0 <= x <= hi:
                        raise ConfigError(f"{name}[{k}][{d}]", f"outside the mission area [0, {hi}]")
            else:
                _require_positive(f"{name}[{k}]", v)

    # team capabilities -------------------------------------------------

    def capabilities(self) -> list[tuple[float, float]]:
        """(speed, quench_rate) per agent, agent ids 1..m in order."""
        m = self.n_agents
        if self.team == "homo":
            speeds = [self.base_speed] * m
            rates = [self.base_quench_rate] * m
        elif self.team == "hetero":
            n_high = hetero_high_count(m, self.hetero_high, self.hetero_low, self.base_speed)
            speeds = [self.hetero_high] * n_high + [self.hetero_low] * (m - n_high)
            rates = list(speeds)
        else:
            speeds, rates = list(self.speeds), list(self.quench_rates)
        if self.team != "custom":
            if self.speeds is not None:
                speeds = list(self.speeds)
            if self.quench_rates is not None:
                rates = list(self.quench_rates)
        return list(zip(speeds, rates))

    def to_dict(self) -> dict[str, Any]:
        d = dataclasses.asdict(self)
        g = d["consensus"]["graph"]
        if g is not None:
            d["consensus"]["graph"] = {str(k): list(v) for k, v in g.items()}
        return _jsonable(d)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ScenarioConfig:
        if not isinstance(data, dict):
            raise ConfigError("<root>", "must be a JSON object")
        names = {f.name for f in dataclasses.fields(cls)}
        for k in data:
            if k not in names and k != "preset":
                raise ConfigError(k, "unknown field")
        base = preset(data["preset"]) if "preset" in data else cls()
        kw = dataclasses.asdict(base)
        kw["consensus"] = base.consensus
        for k, v in data.items():
            if k == "preset":
                continue
            if k == "consensus":
                kw[k] = _consensus_from(v, base.consensus)
            else:
                kw[k] = _tupled(k, v)
        try:
            return cls(**kw)
        except TypeError as exc:
            raise ConfigError("<root>", str(exc)) from None

    def replace(self, **changes) -> ScenarioConfig:
        return dataclasses.replace(self, **changes)


def hetero_high_count(m: int, high: float, low: float, target: float) -> int:
    """Number of high-capability agents whose team average is closest to ``target``."""
    best = min(range(m + 1), key=lambda k: (abs((k * high + (m - k) * low) / m - target), k))
    return best


def _consensus_from(v: Any, base: ConsensusConfig) -> ConsensusConfig:
    if not isinstance(v, dict):
        raise ConfigError("consensus", "must be an object")
    names = {f.name for f in dataclasses.fields(ConsensusConfig)}
    kw = dataclasses.asdict(base)
    for k, x in v.items():
        if k not in names:
            raise ConfigError(f"consensus.{k}", "unknown field")
        if k == "graph" and x is not None:
            if not isinstance(x, dict):
                raise ConfigError("consensus.graph", "must map agent id to neighbour ids")
            try:
                x = {int(i): [int(n) for n in nbrs] for i, nbrs in x.items()}
            except (TypeError, ValueError):
                raise ConfigError("consensus.graph", "ids must be integers") from None
        kw[k] = x
    return ConsensusConfig(**kw)


_TUPLE_FIELDS = {"area", "radius_range", "fire_radii", "spread_rates", "speeds", "quench_rates"}
_POINT_FIELDS = {"fire_centers", "agent_starts"}


def _tupled(name: str, v: Any) -> Any:
    if v is None:
        return None
    try:
        if name in _TUPLE_FIELDS:
            return tuple(float(x) for x in v)
        if name in _POINT_FIELDS:
            return tuple(tuple(float(x) for x in p) for p in v)
    except (TypeError, ValueError):
        raise ConfigError(name, "must be a list of numbers") from None
    return v


def _jsonable(x: Any) -> Any:
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _require_positive(path: str, v: Any) -> None:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v) or v <= 0:
        raise ConfigError(path, f"must be a positive number, got {v!r}")


def _require_int(path: str, v: Any, lo: int) -> None:
    if isinstance(v, bool) or not isinstance(v, int) or v < lo:
        raise ConfigError(path, f"must be an integer >= {lo}, got {v!r}")


def load_config(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(str(path), f"invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return ScenarioConfig.from_dict(data)


def save_config(config: ScenarioConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(config.to_dict(), indent=2, sort_keys=True) + "\n")


# presets ---------------------------------------------------------------

DEMO_CENTERS = ((100.0, 400.0), (200.0, 600.0), (300.0, 400.0), (480.0, 480.0), (600.0, 700.0), (800.0, 200.0))
DEMO_RADII = (5.0, 50.0, 15.0, 15.0, 10.0, 5.0)
DEMO_STARTS = ((200.0, 385.0), (700.0, 610.0))
DEMO_SPREAD_RATE = 0.07


def _demo(observability: str) -> ScenarioConfig:
    return ScenarioConfig(
        name=f"demo-{'fo' if observability == 'full' else 'po'}",
        n_fires=6, fire_centers=DEMO_CENTERS, fire_radii=DEMO_RADII, spread_rate=DEMO_SPREAD_RATE,
        team="custom", n_agents=2, speeds=(26.0, 16.0), quench_rates=(26.0, 16.0), agent_starts=DEMO_STARTS,
        observability=observability,
    )


def preset_names() -> list[str]:
    table = [f"{t}-{o}-{n}" for t in ("homo", "hetero") for o in ("fo", "po") for n in (15, 20, 25)]
    return table + ["demo", "demo-fo"]


def preset(name: str) -> ScenarioConfig:
    """Named scenario: ``{homo,hetero}-{fo,po}-{15,20,25}``, ``demo`` or ``demo-fo``."""
    if name in ("demo", "demo-po"):
        return _demo("partial")
    if name == "demo-fo":
        return _demo("full")
    parts = name.split("-")
    if len(parts) == 3 and parts[0] in ("homo", "hetero") and parts[1] in ("fo", "po") and parts[2].isdigit():
        return ScenarioConfig(name=name, team=parts[0], observability="full" if parts[1] == "fo" else "partial",
                              n_fires=int(parts[2]))
    raise ConfigError("preset", f"unknown preset {name!r}; known: {', '.join(preset_names())}")


@dataclass(frozen=True)
class SweepSpec:
    """Grid over fire-to-agent ratio and one capability axis of a homogeneous team."""

    name: str
    base: str
    ratios: tuple[int, ...]
    axis: str  # "base_quench_rate" or "base_speed"
    values: tuple[float, ...]

    def cells(self):
        cfg = preset(self.base)
        for v in self.values:
            for r in self.ratios:
                yield v, r, cfg.replace(name=f"{self.name}-{self.axis}={v:g}-ratio={r}",
                                        n_fires=r * cfg.n_agents, **{self.axis: v})


SWEEPS = {
    "quench-rate": SweepSpec("quench-rate", "homo-fo-15", (3, 4, 5, 6, 7), "base_quench_rate", (20.0, 26.0)),
    "speed": SweepSpec("speed", "homo-fo-15", (3, 4, 5, 6, 7), "base_speed", (20.0, 26.0)),
}
