"""Reciprocal-clearance path cost by adaptive Simpson quadrature.

The cost of a path is the integral of ``1 / clearance`` over arc length. It is
the ground truth every heuristic in :mod:`clearbound.heuristics` is checked
against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, InputError
from .geometry import ArrayLike, World, as_state, segments_blocked

ARC_SLACK = 1e-12

# Panels per polyline segment before adaptive refinement starts.
_INITIAL_PANELS = 4


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_depth: int = 50

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise InputError("quadrature tolerances must be positive")
        if int(self.max_depth) != self.max_depth or self.max_depth < 1:
            raise InputError(f"max_depth must be a positive integer, got {self.max_depth}")


class PolylinePath:
    """A piecewise-linear path parameterized by arc length."""

    def __init__(self, waypoints: ArrayLike):
        pts = np.asarray(waypoints, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[0] < 2 or pts.shape[1] < 1:
            raise InputError(f"a path needs at least 2 waypoints, got shape {pts.shape}")
        for p in pts:
            as_state(p)
        seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        if np.any(seg <= 0.0):
            i = int(np.argmax(seg <= 0.0))
            raise InputError(f"waypoints {i} and {i + 1} coincide")
        self.waypoints = pts
        self.segment_lengths = seg
        self.cumulative = np.concatenate(([0.0], np.cumsum(seg)))
        self.waypoints.setflags(write=False)

    @property
    def dimension(self) -> int:
        return self.waypoints.shape[1]

    @property
    def length(self) -> float:
        return float(self.cumulative[-1])

    @property
    def start(self) -> np.ndarray:
        return self.waypoints[0]

    @property
    def end(self) -> np.ndarray:
        return self.waypoints[-1]

    def __len__(self) -> int:
        return self.waypoints.shape[0]

    def __repr__(self) -> str:
        return f"PolylinePath({self.waypoints.tolist()!r})"

    def _check_arc(self, t: np.ndarray) -> np.ndarray:
        l = self.length
        if np.any((t < -ARC_SLACK) | (t > l + ARC_SLACK)) or not np.all(np.isfinite(t)):
            raise InputError(f"arc-length parameter outside [0, {l}]")
        return np.clip(t, 0.0, l)

    def states_at(self, ts: ArrayLike) -> np.ndarray:
        """States at an array of arc-length parameters, shape ``(m, d)``."""
        t = self._check_arc(np.atleast_1d(np.asarray(ts, dtype=np.float64)))
        seg = np.searchsorted(self.cumulative, t, side="right") - 1
        seg = np.clip(seg, 0, len(self.segment_lengths) - 1)
        frac = (t - self.cumulative[seg]) / self.segment_lengths[seg]
        a = self.waypoints[seg]
        b = self.waypoints[seg + 1]
        out = a + frac[:, None] * (b - a)
        # Exact endpoints, free of interpolation rounding.
        out[t == self.length] = self.waypoints[-1]
        return out

    def reversed(self) -> "PolylinePath":
        return PolylinePath(self.waypoints[::-1])

    def split(self, t: float) -> tuple["PolylinePath", "PolylinePath"]:
        """Split into the sub-paths over ``[0, t]`` and ``[t, l]``."""
        if not 0.0 < t < self.length:
            raise InputError(f"split point must lie strictly inside (0, {self.length})")
        x = self.states_at([t])[0]
        k = int(np.searchsorted(self.cumulative, t, side="left"))
        head = list(self.waypoints[:k])
        tail = list(self.waypoints[k:])
        if self.cumulative[k] == t:
            tail = tail[1:]
        return PolylinePath(head + [x]), PolylinePath([x] + tail)


def state_at(path: PolylinePath, t: float) -> np.ndarray:
    """State at arc length ``t``; ``t`` may exceed ``[0, l]`` by 1e-12."""
    return path.states_at([t])[0]


def _adaptive_simpson(world: World, a: np.ndarray, direction: np.ndarray,
                      lengths: np.ndarray, group: np.ndarray, n_groups: int,
                      cfg: QuadratureConfig) -> np.ndarray:
    """Integrate ``1 / clearance`` over straight segments, summed per group.

    Each group is an independent integral with its own tolerance. Intervals
    from all groups are refined together, level by level, so the number of
    vectorized clearance calls tracks the refinement depth rather than the
    number of segments. Per-group sums go through ``np.bincount``, which adds
    in array order, so a group's result does not depend on what else is in
    the batch.

    Returns:
        Per-group integrals; ``inf`` where a probe hit zero clearance.
    """
    total = np.bincount(group, weights=lengths, minlength=n_groups)
    dead = np.zeros(n_groups, dtype=bool)
    m = _INITIAL_PANELS

    def f(seg: np.ndarray, s: np.ndarray) -> np.ndarray:
        return world.clearance_many(a[seg] + s[:, None] * direction[seg])

    # Initial panels: seg index, left, width, and clearances at left/mid/right.
    n_seg = len(lengths)
    seg = np.repeat(np.arange(n_seg), m)
    width = lengths[seg] / m
    left = np.tile(np.arange(m, dtype=np.float64), n_seg) * width
    grid_s = (np.tile(np.arange(2 * m + 1, dtype=np.float64), n_seg)
              * np.repeat(lengths / (2 * m), 2 * m + 1))
    g = f(np.repeat(np.arange(n_seg), 2 * m + 1), grid_s).reshape(n_seg, 2 * m + 1)
    dead[group[np.any(g <= 0.0, axis=1)]] = True
    with np.errstate(divide="ignore"):
        inv = 1.0 / g
    f_l = inv[:, 0:-1:2].ravel()
    f_m = inv[:, 1::2].ravel()
    f_r = inv[:, 2::2].ravel()
    whole = width / 6.0 * (f_l + 4.0 * f_m + f_r)

    accepted = np.zeros(n_groups)
    accepted_err = np.zeros(n_groups)
    for depth in range(cfg.max_depth + 1):
        live = ~dead[group[seg]]
        if not live.all():
            seg, left, width = seg[live], left[live], width[live]
            f_l, f_m, f_r, whole = f_l[live], f_m[live], f_r[live], whole[live]
        if seg.size == 0:
            break
        pg = group[seg]
        q = f(np.concatenate((seg, seg)),
              np.concatenate((left + 0.25 * width, left + 0.75 * width)))
        with np.errstate(divide="ignore"):
            f_q1, f_q3 = np.split(1.0 / q, 2)
        hit = (f_q1 == np.inf) | (f_q3 == np.inf) | np.isnan(f_q1) | np.isnan(f_q3)
        if hit.any():
            dead[pg[hit]] = True
        half = 0.5 * width
        s_left = half / 6.0 * (f_l + 4.0 * f_q1 + f_m)
        s_right = half / 6.0 * (f_m + 4.0 * f_q3 + f_r)
        refined = s_left + s_right
        err = refined - whole
        alive = ~dead[pg]
        estimate = accepted + np.bincount(pg[alive], refined[alive], minlength=n_groups)
        eps = np.maximum(cfg.abs_tol, cfg.rel_tol * np.abs(estimate))
        ok = alive & (np.abs(err) <= 15.0 * eps[pg] * (width / total[pg]))
        accepted += np.bincount(pg[ok], refined[ok] + err[ok] / 15.0, minlength=n_groups)
        accepted_err += np.bincount(pg[ok], np.abs(err[ok]) / 15.0, minlength=n_groups)
        todo = alive & ~ok
        if not np.any(todo):
            break
        if depth == cfg.max_depth:
            k = int(pg[todo][0])
            best = accepted[k] + float(refined[todo & (pg == k)].sum())
            bound = accepted_err[k] + float(np.abs(err[todo & (pg == k)]).sum()) / 15.0
            raise ConvergenceError(
                f"adaptive Simpson did not converge within depth {cfg.max_depth} "
                f"(estimate {best!r}, error bound {bound:.3e})",
                estimate=best, error_bound=bound,
            )
        seg = np.concatenate((seg[todo], seg[todo]))
        left = np.concatenate((left[todo], left[todo] + half[todo]))
        width = np.concatenate((half[todo], half[todo]))
        f_l, f_m, f_r = (np.concatenate((f_l[todo], f_m[todo])),
                         np.concatenate((f_q1[todo], f_q3[todo])),
                         np.concatenate((f_m[todo], f_r[todo])))
        whole = np.concatenate((s_left[todo], s_right[todo]))
    accepted[dead] = math.inf
    return accepted


def reciprocal_cost(path: PolylinePath, world: World,
                    cfg: QuadratureConfig | None = None) -> float:
    """Integral of ``1 / clearance`` along ``path``.

    Each polyline segment is integrated separately so that waypoint kinks sit
    on panel boundaries; the tolerance applies to the path as a whole.

    Returns:
        The cost, or ``inf`` if the path touches an obstacle between
        waypoints or any probed state has zero clearance.

    Raises:
        InputError: a waypoint is invalid or the dimensions disagree.
        ConvergenceError: ``cfg.max_depth`` was reached before tolerance.
    """
    cfg = cfg or QuadratureConfig()
    if path.dimension != world.dimension:
        raise InputError(f"path dimension {path.dimension} != world dimension {world.dimension}")
    wp_clearance = world.clearance_many(path.waypoints)
    if np.any(wp_clearance <= 0.0):
        i = int(np.argmax(wp_clearance <= 0.0))
        raise InputError(f"waypoint {i} {path.waypoints[i].tolist()} is not valid")
    if world.is_unobstructed:
        return 0.0
    # A segment can cross a thin obstacle between probes; catch it exactly.
    if np.any(segments_blocked(world, path.waypoints[:-1], path.waypoints[1:])):
        return math.inf
    a = path.waypoints[:-1]
    direction = (path.waypoints[1:] - a) / path.segment_lengths[:, None]
    group = np.zeros(len(a), dtype=np.intp)
    return float(_adaptive_simpson(world, a, direction, path.segment_lengths, group, 1, cfg)[0])


def segment_costs(world: World, starts: ArrayLike, ends: ArrayLike,
                  cfg: QuadratureConfig | None = None) -> np.ndarray:
    """Costs of many independent straight segments in one vectorized pass.

    Entry ``i`` equals ``reciprocal_cost(PolylinePath([starts[i], ends[i]]), world, cfg)``
    bit for bit; zero-length segments cost 0.

    Raises:
        InputError: an endpoint is invalid or the shapes disagree.
        ConvergenceError: some segment did not converge within ``cfg.max_depth``.
    """
    cfg = cfg or QuadratureConfig()
    a = np.asarray(starts, dtype=np.float64)
    b = np.asarray(ends, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 2 or a.shape[1] != world.dimension:
        raise InputError(f"segment endpoints must both have shape (k, {world.dimension}), "
                         f"got {a.shape} and {b.shape}")
    out = np.zeros(len(a))
    if len(a) == 0:
        return out
    for name, pts in (("start", a), ("end", b)):
        bad = ~np.isfinite(pts).all(axis=1) | (world.clearance_many(pts) <= 0.0)
        if bad.any():
            i = int(np.argmax(bad))
            raise InputError(f"segment {i} {name} {pts[i].tolist()} is not valid")
    if world.is_unobstructed:
        return out
    lengths = np.linalg.norm(b - a, axis=1)
    blocked = segments_blocked(world, a, b)
    out[blocked] = math.inf
    idx = np.flatnonzero(~blocked & (lengths > 0.0))
    if idx.size:
        direction = (b[idx] - a[idx]) / lengths[idx, None]
        out[idx] = _adaptive_simpson(world, a[idx], direction, lengths[idx],
                                     np.arange(idx.size), idx.size, cfg)
    return out
