"""Independent oracles and random scenario generators for the test-suite."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from clearbound.cost_oracle import PolylinePath, reciprocal_cost
from clearbound.geometry import AxisAlignedBox, HalfSpace, Hypersphere, World


def random_obstacle(rng: np.random.Generator, dim: int):
    kind = rng.choice(["sphere", "sphere", "box", "halfspace"])
    if kind == "sphere":
        return Hypersphere(rng.uniform(0.0, 1.0, dim), rng.uniform(0.03, 0.2))
    if kind == "box":
        lo = rng.uniform(0.0, 0.9, dim)
        return AxisAlignedBox(lo, lo + rng.uniform(0.02, 0.25, dim))
    n = rng.normal(size=dim)
    n /= np.linalg.norm(n)
    # Keep the cut near the edge of the unit cube so the interior stays open.
    offset = float(n @ np.full(dim, 0.5)) - rng.uniform(0.45, 0.9)
    return HalfSpace(n, offset)


def random_world(rng: np.random.Generator, dim: int, n_obstacles: int) -> World:
    obstacles = [random_obstacle(rng, dim) for _ in range(n_obstacles)]
    return World(dim, obstacles, AxisAlignedBox(np.zeros(dim), np.ones(dim)))


def min_path_clearance_lower_bound(path: PolylinePath, world: World, spacing: float) -> float:
    """Certified lower bound on the minimum clearance along ``path``.

    Clearance is 1-Lipschitz, so the sampled minimum minus half the sample
    spacing bounds the true minimum from below.
    """
    n = max(2, int(np.ceil(path.length / spacing)) + 1)
    ts = np.linspace(0.0, path.length, n)
    h = ts[1] - ts[0]
    return float(world.clearance_many(path.states_at(ts)).min() - h / 2)


def random_valid_path(rng: np.random.Generator, world: World, n_waypoints: int,
                      min_clearance: float = 1e-3, tries: int = 200) -> PolylinePath | None:
    dim = world.dimension
    for _ in range(tries):
        pts = rng.uniform(0.0, 1.0, (n_waypoints, dim))
        # Short hops keep most samples away from obstacles.
        pts = pts[0] + np.cumsum(np.vstack([np.zeros(dim), rng.normal(scale=0.15, size=(n_waypoints - 1, dim))]), axis=0)
        if np.any(np.linalg.norm(np.diff(pts, axis=0), axis=1) < 1e-6):
            continue
        if np.any(world.clearance_many(pts) < min_clearance):
            continue
        path = PolylinePath(pts)
        if min_path_clearance_lower_bound(path, world, spacing=1e-3) >= min_clearance:
            return path
    return None


@dataclass
class Case:
    world: World
    path: PolylinePath
    cost: float


def make_cases(seed: int, n_cases: int, dims=(2, 3), max_obstacles: int = 8,
               waypoints=(2, 8), min_clearance: float = 1e-3) -> list[Case]:
    rng = np.random.default_rng(seed)
    cases = []
    while len(cases) < n_cases:
        dim = int(rng.choice(dims))
        world = random_world(rng, dim, int(rng.integers(0, max_obstacles + 1)))
        path = random_valid_path(rng, world, int(rng.integers(waypoints[0], waypoints[1] + 1)),
                                 min_clearance)
        if path is None:
            continue
        cases.append(Case(world, path, reciprocal_cost(path, world)))
    return cases


def inside_any(world: World, pts: np.ndarray) -> np.ndarray:
    """Membership in the closed invalid set, written independently of the distance code."""
    inside = np.zeros(len(pts), dtype=bool)
    for ob in world.obstacles:
        if isinstance(ob, Hypersphere):
            inside |= ((pts - ob.center) ** 2).sum(axis=1) <= ob.radius ** 2
        elif isinstance(ob, AxisAlignedBox):
            inside |= np.all((pts >= ob.min_corner) & (pts <= ob.max_corner), axis=1)
        else:
            inside |= pts @ ob.normal <= ob.offset
    return inside


def sampled_clearance(world: World, x: np.ndarray, rng: np.random.Generator,
                      n: int = 200_000, radius: float = 6.0) -> float:
    """Distance from ``x`` to the nearest of ``n`` random invalid points (an upper estimate)."""
    pts = x + rng.uniform(-radius, radius, (n, x.size))
    pts = pts[inside_any(world, pts)]
    if len(pts) == 0:
        return np.inf
    return float(np.sqrt(((pts - x) ** 2).sum(axis=1)).min())


def midpoint_cost(path: PolylinePath, world: World, n: int = 1_000_000) -> float:
    """Composite midpoint rule with ``n`` uniform samples over the whole arc length."""
    h = path.length / n
    total = 0.0
    for chunk in np.array_split(np.arange(n), max(1, n // 200_000)):
        ts = (chunk + 0.5) * h
        total += float((1.0 / world.clearance_many(path.states_at(ts))).sum())
    return total * h


def true_samples(path: PolylinePath, world: World, ts) -> list[tuple[float, float]]:
    ts = np.asarray(ts, dtype=float)
    ds = world.clearance_many(path.states_at(ts))
    return list(zip(ts.tolist(), ds.tolist()))


# One line per acceptance criterion, echoed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


def report(number: int, name: str, ok: bool, detail: str) -> bool:
    line = f"criterion {number} {'PASS' if ok else 'FAIL'}: {name} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok
