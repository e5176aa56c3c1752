"""States, obstacles and worlds, with exact Euclidean clearance queries.

A state is a 1-D float64 numpy array. Obstacles are closed sets, so a state on
an obstacle boundary has clearance 0 and is invalid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import InputError

ArrayLike = Union[Sequence[float], np.ndarray]

_NORMAL_TOL = 1e-12


def as_state(coords: ArrayLike, dimension: int | None = None) -> np.ndarray:
    """Convert ``coords`` to a validated state vector.

    Raises:
        InputError: if the vector is empty, non-finite, or has the wrong
            dimension.
    """
    x = np.asarray(coords, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise InputError(f"state must be a non-empty vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InputError(f"state has non-finite coordinates: {x.tolist()}")
    if dimension is not None and x.size != dimension:
        raise InputError(f"state has dimension {x.size}, expected {dimension}")
    return x


def _as_points(points: ArrayLike, dimension: int) -> np.ndarray:
    p = np.asarray(points, dtype=np.float64)
    if p.ndim == 1:
        p = p[None, :]
    if p.ndim != 2 or p.shape[1] != dimension:
        raise InputError(f"points must have shape (m, {dimension}), got {p.shape}")
    return p


@dataclass(frozen=True, eq=False)
class Hypersphere:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_state(self.center))
        r = float(self.radius)
        if not (math.isfinite(r) and r > 0):
            raise InputError(f"hypersphere radius must be positive, got {self.radius}")
        object.__setattr__(self, "radius", r)

    @property
    def dimension(self) -> int:
        return self.center.size

    def distance(self, points: np.ndarray) -> np.ndarray:
        d = np.linalg.norm(points - self.center, axis=-1) - self.radius
        return np.maximum(d, 0.0)


@dataclass(frozen=True, eq=False)
class AxisAlignedBox:
    min_corner: np.ndarray
    max_corner: np.ndarray

    def __post_init__(self):
        lo = as_state(self.min_corner)
        hi = as_state(self.max_corner, lo.size)
        if not np.all(lo < hi):
            raise InputError(
                f"box min_corner must be < max_corner componentwise: {lo.tolist()} vs {hi.tolist()}"
            )
        object.__setattr__(self, "min_corner", lo)
        object.__setattr__(self, "max_corner", hi)

    @property
    def dimension(self) -> int:
        return self.min_corner.size

    def contains(self, points: np.ndarray) -> np.ndarray:
        return np.all((points >= self.min_corner) & (points <= self.max_corner), axis=-1)

    def distance(self, points: np.ndarray) -> np.ndarray:
        gap = np.maximum(np.maximum(self.min_corner - points, points - self.max_corner), 0.0)
        return np.linalg.norm(gap, axis=-1)

    def distance_to_exterior(self, points: np.ndarray) -> np.ndarray:
        """Distance from each point to the closed complement of the box."""
        inner = np.minimum(points - self.min_corner, self.max_corner - points)
        return np.maximum(inner.min(axis=-1), 0.0)


@dataclass(frozen=True, eq=False)
class HalfSpace:
    """The closed half-space ``{x : normal . x <= offset}``."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = as_state(self.normal)
        if abs(float(np.linalg.norm(n)) - 1.0) > _NORMAL_TOL:
            raise InputError(f"half-space normal must have unit norm, got {n.tolist()}")
        off = float(self.offset)
        if not math.isfinite(off):
            raise InputError("half-space offset must be finite")
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "offset", off)

    @property
    def dimension(self) -> int:
        return self.normal.size

    def distance(self, points: np.ndarray) -> np.ndarray:
        return np.maximum(points @ self.normal - self.offset, 0.0)


Obstacle = Union[Hypersphere, AxisAlignedBox, HalfSpace]


@dataclass(frozen=True, eq=False)
class World:
    """Obstacles, optional bounds, and the clearance queries over them.

    Bounds only restrict clearance when ``bounds_are_obstacles`` is set; they
    are otherwise used by samplers and renderers.
    """

    dimension: int
    obstacles: tuple = ()
    bounds: AxisAlignedBox | None = None
    bounds_are_obstacles: bool = False
    _packed: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise InputError(f"dimension must be a positive integer, got {self.dimension}")
        object.__setattr__(self, "dimension", int(self.dimension))
        obstacles = tuple(self.obstacles)
        for i, ob in enumerate(obstacles):
            if not isinstance(ob, (Hypersphere, AxisAlignedBox, HalfSpace)):
                raise InputError(f"obstacle {i} has unsupported type {type(ob).__name__}")
            if ob.dimension != self.dimension:
                raise InputError(
                    f"obstacle {i} has dimension {ob.dimension}, world has {self.dimension}"
                )
        object.__setattr__(self, "obstacles", obstacles)
        if self.bounds is not None and self.bounds.dimension != self.dimension:
            raise InputError("bounds dimension does not match world dimension")
        if self.bounds_are_obstacles and self.bounds is None:
            raise InputError("bounds_are_obstacles requires bounds")
        object.__setattr__(self, "_packed", self._pack())

    def _pack(self) -> dict:
        # Stack obstacles per kind so one query costs a fixed number of numpy
        # calls. Queries reduce elementwise (no BLAS) so a state's clearance is
        # bit-identical whatever the batch size or obstacle count.
        d = self.dimension
        spheres = [o for o in self.obstacles if isinstance(o, Hypersphere)]
        boxes = [o for o in self.obstacles if isinstance(o, AxisAlignedBox)]
        planes = [o for o in self.obstacles if isinstance(o, HalfSpace)]
        return {
            "centers": np.array([s.center for s in spheres]).reshape(-1, d),
            "radii": np.array([s.radius for s in spheres], dtype=np.float64),
            "lo": np.array([b.min_corner for b in boxes]).reshape(-1, d),
            "hi": np.array([b.max_corner for b in boxes]).reshape(-1, d),
            "normals": np.array([p.normal for p in planes]).reshape(-1, d),
            "offsets": np.array([p.offset for p in planes], dtype=np.float64),
        }

    @property
    def is_unobstructed(self) -> bool:
        return not self.obstacles and not self.bounds_are_obstacles

    def with_obstacle(self, obstacle: Obstacle) -> "World":
        return World(self.dimension, self.obstacles + (obstacle,), self.bounds,
                     self.bounds_are_obstacles)

    def clearance_many(self, points: ArrayLike) -> np.ndarray:
        """Vectorized clearance for an ``(m, d)`` array of states."""
        p = _as_points(points, self.dimension)
        out = np.full(p.shape[0], np.inf)
        k = self._packed
        if k["radii"].size:
            diff = p[:, None, :] - k["centers"][None, :, :]
            dist = np.sqrt((diff * diff).sum(axis=-1)) - k["radii"]
            np.minimum(out, dist.min(axis=1), out=out)
        if k["lo"].shape[0]:
            gap = np.maximum(np.maximum(k["lo"][None] - p[:, None], p[:, None] - k["hi"][None]), 0.0)
            np.minimum(out, np.sqrt((gap * gap).sum(axis=-1)).min(axis=1), out=out)
        if k["offsets"].size:
            signed = (p[:, None, :] * k["normals"][None]).sum(axis=-1) - k["offsets"]
            np.minimum(out, signed.min(axis=1), out=out)
        if self.bounds_are_obstacles:
            np.minimum(out, self.bounds.distance_to_exterior(p), out=out)
        return np.maximum(out, 0.0)


def segments_blocked(world: World, starts: ArrayLike, ends: ArrayLike) -> np.ndarray:
    """Exact test of which straight segments touch the closed invalid set.

    Args:
        starts, ends: ``(m, d)`` arrays of segment end states.

    Returns:
        Boolean array of length ``m``.
    """
    a = _as_points(starts, world.dimension)
    b = _as_points(ends, world.dimension)
    ab = b - a
    hit = np.zeros(a.shape[0], dtype=bool)
    for ob in world.obstacles:
        if isinstance(ob, Hypersphere):
            denom = np.einsum("md,md->m", ab, ab)
            u = np.einsum("md,md->m", ob.center - a, ab) / np.where(denom > 0, denom, 1.0)
            closest = a + np.clip(u, 0.0, 1.0)[:, None] * ab
            hit |= np.linalg.norm(closest - ob.center, axis=1) <= ob.radius
        elif isinstance(ob, HalfSpace):
            hit |= np.minimum(a @ ob.normal, b @ ob.normal) <= ob.offset
        else:
            # Slab test on the parameter interval [0, 1].
            lo = np.zeros(a.shape[0])
            hi = np.ones(a.shape[0])
            for k in range(world.dimension):
                da = ab[:, k]
                flat = da == 0.0
                outside = flat & ((a[:, k] < ob.min_corner[k]) | (a[:, k] > ob.max_corner[k]))
                with np.errstate(divide="ignore", invalid="ignore"):
                    t0 = (ob.min_corner[k] - a[:, k]) / da
                    t1 = (ob.max_corner[k] - a[:, k]) / da
                near = np.where(flat, -np.inf, np.minimum(t0, t1))
                far = np.where(flat, np.inf, np.maximum(t0, t1))
                lo = np.maximum(lo, near)
                hi = np.minimum(hi, far)
                hi = np.where(outside, -np.inf, hi)
            hit |= lo <= hi
    if world.bounds_are_obstacles:
        # The box is convex, so a segment stays inside iff both ends do.
        hit |= (world.bounds.distance_to_exterior(a) <= 0.0) | (world.bounds.distance_to_exterior(b) <= 0.0)
    return hit


def clearance(world: World, x: ArrayLike) -> float:
    """Exact distance from ``x`` to the closest obstacle.

    Returns ``inf`` for an unobstructed world and 0 for states on or inside an
    obstacle.
    """
    x = as_state(x, world.dimension)
    return float(world.clearance_many(x[None, :])[0])


def is_valid(world: World, x: ArrayLike) -> bool:
    return clearance(world, x) > 0.0
