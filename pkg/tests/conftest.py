import math

import pytest

from creds.schedule import AgentSnapshot, FireSnapshot

DEMO_CENTERS = [(100, 400), (200, 600), (300, 400), (480, 480), (600, 700), (800, 200)]
DEMO_RADII = [5, 50, 15, 15, 10, 5]


def demo_instance(spread=0.07, observability="partial", sensing=300.0):
    fires = {j + 1: FireSnapshot(j + 1, c, math.pi * r * r, spread)
             for j, (c, r) in enumerate(zip(DEMO_CENTERS, DEMO_RADII))}
    agents = [AgentSnapshot(1, (200, 385), 26, 26), AgentSnapshot(2, (700, 610), 16, 16)]
    full = observability == "full"
    detected = {a.id: [j for j, f in fires.items() if full or math.dist(a.position, f.center) < sensing]
                for a in agents}
    return agents, fires, detected


@pytest.fixture
def demo():
    return demo_instance
