"""Temperature-driven multi-level search for agents with nothing to do.

Below the temperature threshold an agent takes heavy-tailed Levy legs with
uniform heading. Above it the agent does Brownian legs, switching to short
gradient-biased legs while the gradient points along its heading.

The plume model is a stand-in: each fire adds ``gain * area`` degrees at
its centre, decaying as ``exp(-distance / length_scale)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

import numpy as np

LEVY = "levy"
BROWNIAN = "brownian"
DIRECTIONAL = "directional"


@dataclass(frozen=True)
class SearchParams:
    ambient: float = 20.0
    gain: float = 0.01  # degrees per m^2 of fire area
    length_scale: float = 150.0
    threshold_fraction: float = 0.2
    levy_alpha: float = 1.5
    levy_min: float = 20.0
    levy_max: float = 1000.0
    brownian_sigma: float = 30.0
    directional_step: float = 25.0
    directional_sigma: float = 8.0


@dataclass(frozen=True)
class TemperatureField:
    centers: tuple[tuple[float, float], ...]
    amplitudes: tuple[float, ...]
    ambient: float = 20.0
    length_scale: float = 150.0
    threshold: float = 20.0
    bounds: tuple[float, float] | None = None

    @classmethod
    def from_fires(cls, fires: Iterable, params: SearchParams = SearchParams(),
                   bounds: tuple[float, float] | None = None, threshold: float | None = None) -> TemperatureField:
        """Field over fires with ``center`` and ``area``; threshold defaults to
        ambient plus ``threshold_fraction`` of the hottest single plume."""
        fires = list(fires)
        amps = tuple(params.gain * f.area for f in fires)
        if threshold is None:
            threshold = params.ambient + params.threshold_fraction * max(amps, default=0.0)
        return cls(tuple(tuple(f.center) for f in fires), amps, params.ambient, params.length_scale,
                   threshold, bounds)


@dataclass
class SearchState:
    mode: str = LEVY
    heading: float = 0.0


def sample_temperature(field: TemperatureField, position: Sequence[float]) -> tuple[float, np.ndarray]:
    """Temperature and its spatial gradient at ``position``.

    The gradient at an exact fire centre is taken as zero.
    """
    x, y = position
    if field.bounds is not None:
        x = min(max(x, 0.0), field.bounds[0])
        y = min(max(y, 0.0), field.bounds[1])
    temp = field.ambient
    gx = gy = 0.0
    for (cx, cy), amp in zip(field.centers, field.amplitudes):
        dx, dy = x - cx, y - cy
        d = math.hypot(dx, dy)
        contrib = amp * math.exp(-d / field.length_scale)
        temp += contrib
        if d > 0:
            g = -contrib / (field.length_scale * d)
            gx += g * dx
            gy += g * dy
    return temp, np.array([gx, gy])


def levy_length(rng: np.random.Generator, alpha: float, l_min: float, l_max: float | None = None) -> float:
    """Pareto step length with tail P(L > l) = (l / l_min) ** -alpha."""
    length = l_min * (1.0 - rng.random()) ** (-1.0 / alpha)
    return length if l_max is None else min(length, l_max)


def search_step(state: SearchState, temperature: float, gradient: Sequence[float], rng: np.random.Generator,
                threshold: float, params: SearchParams = SearchParams()) -> tuple[np.ndarray, SearchState]:
    """Pick the next search leg (a displacement) and the mode that produced it."""
    gx, gy = float(gradient[0]), float(gradient[1])
    gnorm = math.hypot(gx, gy)
    if temperature < threshold:
        heading = rng.uniform(-math.pi, math.pi)
        length = levy_length(rng, params.levy_alpha, params.levy_min, params.levy_max)
        delta = np.array([length * math.cos(heading), length * math.sin(heading)])
        return delta, replace(state, mode=LEVY, heading=heading)
    aligned = gnorm > 0 and gx * math.cos(state.heading) + gy * math.sin(state.heading) > 0
    if aligned:
        ux, uy = gx / gnorm, gy / gnorm
        delta = np.array([ux, uy]) * params.directional_step + rng.normal(0.0, params.directional_sigma, 2)
        mode = DIRECTIONAL
    else:
        delta = rng.normal(0.0, params.brownian_sigma, 2)
        mode = BROWNIAN
    heading = math.atan2(delta[1], delta[0]) if np.any(delta) else state.heading
    return delta, replace(state, mode=mode, heading=heading)


def reflect_into(point: Sequence[float], bounds: tuple[float, float]) -> tuple[float, float]:
    """Mirror a point back into [0, W] x [0, H]."""
    out = []
    for v, hi in zip(point, bounds):
        period = 2.0 * hi
        v = math.fmod(v, period)
        if v < 0:
            v += period
        if v > hi:
            v = period - v
        out.append(v)
    return out[0], out[1]


def try_detect(position: Sequence[float], sensing_radius: float, fires: Iterable,
               known: set[int]) -> list[int]:
    """Ids of fires strictly inside the sensing radius not yet in ``known``."""
    px, py = position
    found = []
    for f in fires:
        if f.id in known:
            continue
        if math.hypot(f.center[0] - px, f.center[1] - py) < sensing_radius:
            found.append(f.id)
    return found
