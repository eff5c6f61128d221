"""Circular point-fire growth and single-agent quenching.

Area dynamics under one quenching agent::

    da/dt = 2*sqrt(pi) * spread_rate * sqrt(a) - quench_rate

Everything here is closed form except :func:`evolve_under_quench`, which
inverts the closed-form travel time with a bracketed root solve.

The quench-time expression uses ``sqrt(a)`` inside the logarithm; that is
what direct integration of the ODE gives (the variant with ``a`` there is
dimensionally inconsistent).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from scipy.optimize import brentq

SQRT_PI = math.sqrt(math.pi)
K = 2.0 * SQRT_PI


class _Infeasible:
    """Singleton marker for an unattainable time or cost.

    Orders above every real number and refuses arithmetic, so it can never
    silently turn into a float.
    """

    _instance: _Infeasible | None = None

    def __new__(cls) -> _Infeasible:
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFEASIBLE"

    def __reduce__(self):
        return (_Infeasible, ())

    def __eq__(self, other: object) -> bool:
        return other is self

    def __hash__(self) -> int:
        return hash("creds.INFEASIBLE")

    def __lt__(self, other: object) -> bool:
        if other is self or isinstance(other, (int, float)):
            return False
        return NotImplemented

    def __le__(self, other: object) -> bool:
        if other is self:
            return True
        if isinstance(other, (int, float)):
            return False
        return NotImplemented

    def __gt__(self, other: object) -> bool:
        if other is self:
            return False
        if isinstance(other, (int, float)):
            return True
        return NotImplemented

    def __ge__(self, other: object) -> bool:
        if other is self or isinstance(other, (int, float)):
            return True
        return NotImplemented


INFEASIBLE = _Infeasible()


def is_feasible(value: object) -> bool:
    return value is not INFEASIBLE


class FireStatus(str, enum.Enum):
    UNDETECTED = "undetected"
    DETECTED = "detected"
    ASSIGNED = "assigned"
    QUENCHING = "quenching"
    QUENCHED = "quenched"
    INFEASIBLE = "infeasible"


@dataclass
class FireState:
    """One circular fire. ``area`` is the area at the owning world's clock."""

    id: int
    center: tuple[float, float]
    area: float
    initial_area: float
    spread_rate: float
    status: FireStatus = FireStatus.UNDETECTED
    max_area_seen: float = 0.0
    ignition_time: float = 0.0

    def __post_init__(self) -> None:
        if self.spread_rate <= 0:
            raise ValueError(f"fire {self.id}: spread_rate must be > 0")
        if self.initial_area <= 0:
            raise ValueError(f"fire {self.id}: initial_area must be > 0")
        if self.area < 0:
            raise ValueError(f"fire {self.id}: area must be >= 0")
        self.max_area_seen = max(self.max_area_seen, self.initial_area, self.area)

    @property
    def perimeter(self) -> float:
        return perimeter(self.area)

    @property
    def active(self) -> bool:
        st = self.status
        return st is not FireStatus.QUENCHED and st is not FireStatus.INFEASIBLE


@dataclass(frozen=True)
class QuenchCapability:
    quench_rate: float  # m^2/s
    speed: float  # m/s

    def __post_init__(self) -> None:
        if self.quench_rate <= 0:
            raise ValueError("quench_rate must be > 0")
        if self.speed <= 0:
            raise ValueError("speed must be > 0")


def _check_nonneg(name: str, value: float) -> None:
    if not value >= 0:
        raise ValueError(f"{name} must be >= 0, got {value!r}")


def _check_pos(name: str, value: float) -> None:
    if not value > 0:
        raise ValueError(f"{name} must be > 0, got {value!r}")


def perimeter(area: float) -> float:
    return K * math.sqrt(area)


def area_rate(area: float, spread_rate: float, quench_rate: float = 0.0) -> float:
    """Right-hand side of the area ODE."""
    return K * spread_rate * math.sqrt(max(area, 0.0)) - quench_rate


def grow(area: float, spread_rate: float, dt: float) -> float:
    """Unattended growth: the radius advances linearly at ``spread_rate``."""
    _check_nonneg("area", area)
    _check_nonneg("dt", dt)
    _check_nonneg("spread_rate", spread_rate)
    return (math.sqrt(area) + SQRT_PI * spread_rate * dt) ** 2


def critical_area(quench_rate: float, spread_rate: float) -> float:
    """Area at which perimeter growth exactly balances ``quench_rate``."""
    _check_pos("quench_rate", quench_rate)
    _check_pos("spread_rate", spread_rate)
    return (quench_rate / (K * spread_rate)) ** 2


def deadline_time(initial_area: float, spread_rate: float, quench_rate: float):
    """Time for an unattended fire to reach the critical area.

    Returns INFEASIBLE when the fire is already past it.
    """
    _check_nonneg("initial_area", initial_area)
    r_crit = math.sqrt(critical_area(quench_rate, spread_rate))
    margin = r_crit - math.sqrt(initial_area)
    if margin < 0:
        # a rounded critical area still counts as "at" it
        if margin > -1e-7 * r_crit:
            return 0.0
        return INFEASIBLE
    return margin / (spread_rate * SQRT_PI)


def _h(x: float) -> float:
    """-ln(1 - x) - x, accurate for small x."""
    if x < 1e-3:
        # series; truncation error is O(x^5) relative
        x2 = x * x
        return x2 * (0.5 + x * (1 / 3 + x * (0.25 + x * (0.2 + x / 6))))
    return -math.log1p(-x) - x


def quench_time(area_at_start: float, spread_rate: float, quench_rate: float):
    """Time for one agent to drive the area to zero, or INFEASIBLE.

    Closed form with c = 2*sqrt(pi)*spread_rate and r = sqrt(area)::

        2q/c^2 * ln(q / (q - c r)) - 2 r / c
    """
    _check_nonneg("area_at_start", area_at_start)
    _check_pos("spread_rate", spread_rate)
    _check_pos("quench_rate", quench_rate)
    if area_at_start == 0:
        return 0.0
    c = K * spread_rate
    x = c * math.sqrt(area_at_start) / quench_rate
    if x >= 1.0:
        return INFEASIBLE
    return 2.0 * quench_rate / (c * c) * _h(x)


def evolve_under_quench(area: float, spread_rate: float, quench_rate: float, dt: float) -> float:
    """Area after ``dt`` seconds of growth against ``quench_rate``; clamps at 0."""
    _check_nonneg("area", area)
    _check_nonneg("dt", dt)
    _check_pos("spread_rate", spread_rate)
    _check_nonneg("quench_rate", quench_rate)
    if quench_rate == 0:
        return grow(area, spread_rate, dt)
    if area == 0 or dt == 0:
        return area
    c = K * spread_rate
    scale = 2.0 * quench_rate / (c * c)
    x0 = c * math.sqrt(area) / quench_rate
    k = dt / scale
    if x0 < 1.0:
        h0 = _h(x0)
        if k >= h0:
            return 0.0
        target = h0 - k
        x = brentq(lambda s: _h(s) - target, 0.0, x0, xtol=1e-300, rtol=8.9e-16, maxiter=400)
    elif x0 == 1.0:
        return area
    else:
        # above critical: w + ln w advances by k, with w = x - 1
        w0 = x0 - 1.0
        target = w0 + math.log(w0) + k
        w = brentq(lambda s: s + math.log(s) - target, w0, w0 + k, xtol=1e-300, rtol=8.9e-16, maxiter=400)
        x = 1.0 + w
    r = x * quench_rate / c
    return r * r
