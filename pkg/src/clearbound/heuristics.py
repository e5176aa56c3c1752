"""Admissible lower bounds on reciprocal-clearance path cost.

Every bound follows from one geometric fact: along an arc-length
parameterized path, clearance can grow no faster than distance travelled, so
a single known clearance ``d1`` at arc position ``t1`` caps clearance
everywhere at ``d1 + |t1 - t|`` (the clearance cone). Integrating the
reciprocal of that cap, or of the lower envelope of several caps, gives a
lower bound on the true cost.

Solution-cost bounds (``bound_one_endpoint``, ``bound_two_endpoint``) only
need a lower bound ``lhat`` on the arc length and are usable as cost-to-go
estimates. Path-cost bounds (``bound_single_sample``, ``bound_multi_sample``,
``bound_endpoint_chain``) need the exact arc length of a known path and get
tighter as more clearance samples are supplied.

Clearances of ``inf`` (nothing to collide with) contribute 0 to any term they
appear in.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import InputError

ARC_SLACK = 1e-12
# Relative slack for the strict consistency check; true clearances obey the
# 1-Lipschitz property only up to rounding.
CONSISTENCY_SLACK = 1e-12


class BoundKind(enum.Enum):
    ONE_ENDPOINT = "one-endpoint"
    TWO_ENDPOINT = "two-endpoint"
    SINGLE_SAMPLE = "single-sample"
    MULTI_SAMPLE = "multi-sample"
    ENDPOINT_CHAIN = "chain"


@dataclass(frozen=True)
class CostBound:
    value: float
    kind: BoundKind

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class ClearanceSample:
    """Known clearance ``d`` at arc-length position ``t`` on a path."""

    t: float
    d: float

    def __post_init__(self):
        object.__setattr__(self, "t", _finite_nonneg(self.t, "t"))
        object.__setattr__(self, "d", _clearance(self.d, "d"))


@dataclass(frozen=True)
class ArcLengthInfo:
    """Arc-length knowledge about a path: a lower bound and maybe the exact value."""

    lower_bound_lhat: float
    exact_l: float | None = None

    def __post_init__(self):
        lhat = _finite_nonneg(self.lower_bound_lhat, "lhat")
        object.__setattr__(self, "lower_bound_lhat", lhat)
        if self.exact_l is not None:
            l = _finite_nonneg(self.exact_l, "l")
            if lhat > l:
                raise InputError(f"arc-length lower bound {lhat} exceeds exact length {l}")
            object.__setattr__(self, "exact_l", l)

    @classmethod
    def between(cls, a, b, exact_l: float | None = None) -> "ArcLengthInfo":
        """Euclidean distance between two states as the lower bound."""
        lhat = float(np.linalg.norm(np.asarray(b, float) - np.asarray(a, float)))
        if exact_l is not None:
            lhat = min(lhat, exact_l)
        return cls(lhat, exact_l)


SampleLike = Union[ClearanceSample, Sequence[float]]


def _clearance(d, name: str) -> float:
    d = float(d)
    if math.isnan(d) or d <= 0.0:
        raise InputError(f"clearance {name} must be positive, got {d}")
    return d


def _finite_nonneg(x, name: str) -> float:
    x = float(x)
    if not math.isfinite(x) or x < 0.0:
        raise InputError(f"{name} must be finite and non-negative, got {x}")
    return x


def _end_term(d: float, length: float) -> float:
    # ln((d + length) / d)
    if math.isinf(d):
        return 0.0
    return math.log1p(length / d)


def _segment_term(d1: float, d2: float, length: float) -> float:
    # ln((d1 + d2 + length)^2 / (4 d1 d2)), written as log1p of the excess over
    # 1 so that the AM-GM non-negativity survives rounding.
    if math.isinf(d1) or math.isinf(d2):
        return 0.0
    den = 4.0 * d1 * d2
    excess = (d1 - d2) ** 2 + length * (2.0 * (d1 + d2) + length)
    if den == 0.0 or math.isinf(den) or math.isinf(excess):
        s = d1 + d2 + length
        return max(2.0 * math.log(s) - math.log(4.0) - math.log(d1) - math.log(d2), 0.0)
    return math.log1p(excess / den)


def clearance_cone(d1: float, t1: float, t: float) -> float:
    """Upper bound on clearance at arc position ``t`` given clearance ``d1`` at ``t1``."""
    d1 = _clearance(d1, "d1")
    return d1 + abs(float(t1) - float(t))


def cone_intersection(d1: float, d2: float, l: float) -> float:
    """Arc position where the start and goal clearance cones meet.

    Debug/plotting helper; the two-endpoint bound already integrates over it.
    """
    return (d2 - d1 + l) / 2.0


def bound_one_endpoint(d1: float, lhat: float) -> CostBound:
    """Lower bound on cost from the clearance of the start or the goal alone."""
    d1 = _clearance(d1, "d1")
    lhat = _finite_nonneg(lhat, "lhat")
    return CostBound(_end_term(d1, lhat), BoundKind.ONE_ENDPOINT)


def bound_two_endpoint(d1: float, d2: float, lhat: float) -> CostBound:
    """Lower bound on cost from the clearances of both end states.

    Computed as written for any positive clearances; it is only guaranteed
    admissible when ``|d1 - d2| <= l``, which true clearances always satisfy.
    """
    d1 = _clearance(d1, "d1")
    d2 = _clearance(d2, "d2")
    lhat = _finite_nonneg(lhat, "lhat")
    return CostBound(_segment_term(d1, d2, lhat), BoundKind.TWO_ENDPOINT)


def bound_single_sample(d1: float, t1: float, l: float) -> CostBound:
    """Lower bound on the cost of a known path of length ``l`` from one interior sample."""
    d1 = _clearance(d1, "d1")
    l = _finite_nonneg(l, "l")
    t1 = _arc_position(t1, l)
    return CostBound(_end_term(d1, t1) + _end_term(d1, l - t1), BoundKind.SINGLE_SAMPLE)


def _arc_position(t: float, l: float) -> float:
    t = float(t)
    if not math.isfinite(t) or t < -ARC_SLACK or t > l + ARC_SLACK:
        raise InputError(f"arc position {t} outside [0, {l}]")
    return min(max(t, 0.0), l)


def _coerce_samples(samples: Iterable[SampleLike], l: float) -> list[ClearanceSample]:
    out = []
    for s in samples:
        if not isinstance(s, ClearanceSample):
            t, d = s
            s = ClearanceSample(_arc_position(t, l), d)
        elif s.t > l + ARC_SLACK:
            raise InputError(f"sample position {s.t} outside [0, {l}]")
        out.append(s)
    if not out:
        raise InputError("at least one clearance sample is required")
    for i in range(len(out) - 1):
        if not out[i].t < out[i + 1].t:
            raise InputError(
                f"sample positions must be strictly increasing: "
                f"t[{i}]={out[i].t} and t[{i + 1}]={out[i + 1].t}"
            )
    return out


def check_consistency(samples: Sequence[ClearanceSample]) -> None:
    """Reject samples no real path could produce.

    Clearance is 1-Lipschitz along an arc-length path, so every pair must
    satisfy ``|d_i - d_j| <= |t_i - t_j|``.

    Raises:
        InputError: naming the first offending pair.
    """
    t = np.array([s.t for s in samples])
    d = np.array([s.d for s in samples])
    finite = np.isfinite(d)
    if not finite.all():
        if finite.any():
            raise InputError("samples mix finite and infinite clearances")
        return
    gap = np.abs(d[:, None] - d[None, :]) - np.abs(t[:, None] - t[None, :])
    slack = CONSISTENCY_SLACK * (1.0 + np.maximum(d[:, None], d[None, :]))
    bad = np.argwhere(gap > slack)
    if bad.size:
        i, j = sorted(bad[0])
        raise InputError(
            f"inconsistent samples {i} and {j}: |d_i - d_j| = {float(abs(d[i] - d[j]))!r} "
            f"exceeds |t_i - t_j| = {float(abs(t[i] - t[j]))!r}"
        )


def _chain_sum(samples: Sequence[ClearanceSample]) -> float:
    total = 0.0
    for a, b in zip(samples, samples[1:]):
        total += _segment_term(a.d, b.d, b.t - a.t)
    return total


def bound_multi_sample(samples: Iterable[SampleLike], l: float,
                       strict: bool = False) -> CostBound:
    """Lower bound on the cost of a known path from clearances at several positions.

    Args:
        samples: ``ClearanceSample`` objects or ``(t, d)`` pairs with strictly
            increasing ``t`` in ``[0, l]``.
        l: exact arc length of the path.
        strict: reject sample sets that violate the Lipschitz consistency
            condition instead of evaluating the formula as written.
    """
    l = _finite_nonneg(l, "l")
    s = _coerce_samples(samples, l)
    if strict:
        check_consistency(s)
    first, last = s[0], s[-1]
    value = _end_term(first.d, first.t) + _chain_sum(s) + _end_term(last.d, l - last.t)
    return CostBound(value, BoundKind.MULTI_SAMPLE)


def bound_endpoint_chain(samples: Iterable[SampleLike], l: float,
                         strict: bool = False) -> CostBound:
    """Sum of two-endpoint bounds over consecutive samples.

    The first sample must sit at ``t = 0`` and the last at ``t = l``.
    """
    l = _finite_nonneg(l, "l")
    s = _coerce_samples(samples, l)
    if len(s) < 2:
        raise InputError("an endpoint chain needs at least 2 samples")
    if abs(s[0].t) > ARC_SLACK or abs(s[-1].t - l) > ARC_SLACK:
        raise InputError(
            f"endpoint chain must start at t=0 and end at t=l={l}, "
            f"got {s[0].t} and {s[-1].t}"
        )
    if strict:
        check_consistency(s)
    return CostBound(_chain_sum(s), BoundKind.ENDPOINT_CHAIN)
