import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from clearbound.cost_oracle import reciprocal_cost
from clearbound.errors import InputError
from clearbound.geometry import HalfSpace, World
from clearbound.cost_oracle import PolylinePath
from clearbound.heuristics import (
    ArcLengthInfo,
    BoundKind,
    ClearanceSample,
    bound_endpoint_chain,
    bound_multi_sample,
    bound_one_endpoint,
    bound_single_sample,
    bound_two_endpoint,
    check_consistency,
    clearance_cone,
    cone_intersection,
)
from helpers import true_samples

LN2, LN3 = math.log(2.0), math.log(3.0)

clear = st.floats(1e-6, 1e6, allow_nan=False)
length = st.floats(0.0, 1e6, allow_nan=False)


def admissible(bound, cost):
    return bound <= cost + 1e-9 * (1.0 + cost)


class TestExamples:
    def test_cone(self):
        assert clearance_cone(2.0, 0.0, 0.0) == 2.0
        assert clearance_cone(1.0, 3.0, 1.0) == 3.0

    def test_one_endpoint(self):
        assert bound_one_endpoint(1.0, 0.0).value == 0.0
        b = bound_one_endpoint(1.0, 2.0)
        assert b.value == pytest.approx(LN3, rel=1e-15)
        assert b.kind is BoundKind.ONE_ENDPOINT

    def test_two_endpoint(self):
        assert bound_two_endpoint(1.0, 1.0, 0.0).value == 0.0
        assert bound_two_endpoint(1.0, 2.0, 1.0).value == pytest.approx(LN2, rel=1e-15)
        assert bound_two_endpoint(1.0, 2.0, 1.0).kind is BoundKind.TWO_ENDPOINT

    def test_single_sample(self):
        assert bound_single_sample(1.0, 0.0, 2.0).value == bound_one_endpoint(1.0, 2.0).value
        assert bound_single_sample(1.0, 1.0, 2.0).value == pytest.approx(math.log(4.0), rel=1e-15)

    def test_multi_sample(self):
        b = bound_multi_sample([(0.0, 1.0), (1.0, 1.0)], 1.0)
        assert b.value == pytest.approx(math.log(9.0 / 4.0), rel=1e-15)
        assert b.kind is BoundKind.MULTI_SAMPLE
        assert bound_multi_sample([(1.0, 1.0)], 2.0).value == bound_single_sample(1.0, 1.0, 2.0).value

    def test_chain(self):
        assert bound_endpoint_chain([(0.0, 1.0), (2.0, 1.0)], 2.0).value == bound_two_endpoint(1.0, 1.0, 2.0).value
        b = bound_endpoint_chain([(0.0, 1.0), (1.0, 2.0), (2.0, 1.0)], 2.0)
        assert b.value == pytest.approx(2.0 * LN2, rel=1e-15)
        assert b.kind is BoundKind.ENDPOINT_CHAIN

    def test_accepts_sample_objects(self):
        s = [ClearanceSample(0.0, 1.0), ClearanceSample(1.0, 2.0), ClearanceSample(2.0, 1.0)]
        assert bound_endpoint_chain(s, 2.0).value == pytest.approx(2.0 * LN2, rel=1e-15)

    def test_cone_intersection(self):
        assert cone_intersection(1.0, 1.0, 2.0) == 1.0
        assert cone_intersection(1.0, 3.0, 2.0) == 2.0


class TestTightness:
    def test_one_endpoint_equals_oracle_on_receding_path(self):
        cost = reciprocal_cost(PolylinePath([[1, 0], [3, 0]]), World(2, [HalfSpace([1, 0], 0)]))
        assert bound_one_endpoint(1.0, 2.0).value == pytest.approx(cost, rel=1e-9)

    def test_two_endpoint_equals_oracle_in_corridor(self):
        w = World(2, [HalfSpace([1, 0], 0), HalfSpace([-1, 0], -4)])
        cost = reciprocal_cost(PolylinePath([[1, 0], [3, 0]]), w)
        assert bound_two_endpoint(1.0, 1.0, 2.0).value == pytest.approx(cost, rel=1e-9)


class TestErrors:
    @pytest.mark.parametrize("call", [
        lambda: bound_one_endpoint(0.0, 1.0),
        lambda: bound_one_endpoint(-1.0, 1.0),
        lambda: bound_one_endpoint(1.0, -1.0),
        lambda: bound_one_endpoint(math.nan, 1.0),
        lambda: bound_one_endpoint(1.0, math.inf),
        lambda: bound_two_endpoint(1.0, 0.0, 1.0),
        lambda: bound_two_endpoint(1.0, 1.0, -0.5),
        lambda: bound_single_sample(1.0, 3.0, 2.0),
        lambda: bound_single_sample(1.0, -0.1, 2.0),
        lambda: bound_multi_sample([], 1.0),
        lambda: bound_multi_sample([(0.5, 1.0), (0.2, 1.0)], 1.0),
        lambda: bound_multi_sample([(0.5, 1.0), (0.5, 1.0)], 1.0),
        lambda: bound_multi_sample([(0.5, 1.0), (1.5, 1.0)], 1.0),
        lambda: bound_endpoint_chain([(0.0, 1.0)], 1.0),
        lambda: bound_endpoint_chain([(0.1, 1.0), (1.0, 1.0)], 1.0),
        lambda: bound_endpoint_chain([(0.0, 1.0), (0.9, 1.0)], 1.0),
        lambda: ClearanceSample(0.0, 0.0),
        lambda: ArcLengthInfo(2.0, exact_l=1.0),
        lambda: clearance_cone(0.0, 0.0, 1.0),
    ])
    def test_rejected(self, call):
        with pytest.raises(InputError):
            call()

    def test_strict_mode_names_offending_pair(self):
        samples = [(0.0, 1.0), (0.5, 1.2), (1.0, 2.0)]
        assert bound_multi_sample(samples, 1.0).value > 0  # permissive by default
        with pytest.raises(InputError, match="samples 1 and 2"):
            bound_multi_sample(samples, 1.0, strict=True)
        with pytest.raises(InputError, match="samples 1 and 2"):
            bound_endpoint_chain(samples, 1.0, strict=True)

    def test_chain_endpoint_slack(self):
        b = bound_endpoint_chain([(5e-13, 1.0), (1.0 - 5e-13, 1.0)], 1.0)
        assert b.value == pytest.approx(bound_two_endpoint(1.0, 1.0, 1.0).value, abs=1e-11)


def test_arc_length_info_between():
    info = ArcLengthInfo.between([0, 0], [3, 4], exact_l=6.0)
    assert info.lower_bound_lhat == 5.0 and info.exact_l == 6.0


def test_infinite_clearance_short_circuits_to_zero():
    assert bound_one_endpoint(math.inf, 3.0).value == 0.0
    assert bound_two_endpoint(math.inf, math.inf, 3.0).value == 0.0
    assert bound_multi_sample([(1.0, math.inf), (2.0, math.inf)], 3.0).value == 0.0


def test_huge_ratio_does_not_overflow():
    # The ratio (2e-300 + 1e300)^2 / 4e-600 overflows; its log does not.
    v = bound_two_endpoint(1e-300, 1e-300, 1e300).value
    expected = 2 * math.log(1e300) - math.log(4.0) - 2 * math.log(1e-300)
    assert v == pytest.approx(expected, rel=1e-12)


class TestProperties:
    @settings(max_examples=500)
    @given(clear, clear, length)
    def test_nonnegative(self, d1, d2, lhat):
        assert bound_one_endpoint(d1, lhat).value >= 0.0
        assert bound_two_endpoint(d1, d2, lhat).value >= 0.0

    @settings(max_examples=500)
    @given(clear, clear, st.floats(0.0, 1e3), st.floats(1e-6, 1e3))
    def test_strictly_increasing_in_lhat(self, d1, d2, lhat, extra):
        assume(lhat + extra > lhat)
        assume(extra / min(d1, d2) > 1e-12)
        assert bound_one_endpoint(d1, lhat + extra).value > bound_one_endpoint(d1, lhat).value
        assert bound_two_endpoint(d1, d2, lhat + extra).value > bound_two_endpoint(d1, d2, lhat).value

    @settings(max_examples=500)
    @given(clear, clear, length)
    def test_two_endpoint_symmetry(self, d1, d2, lhat):
        assert bound_two_endpoint(d1, d2, lhat).value == bound_two_endpoint(d2, d1, lhat).value

    @settings(max_examples=500)
    @given(clear, st.integers(0, 2**20), st.integers(0, 2**20))
    def test_single_sample_mirror_symmetry(self, d1, a, b):
        # Dyadic positions make l - t1 exact, so the mirror is exact too.
        t1, l = a / 1024.0, (a + b) / 1024.0
        assert bound_single_sample(d1, t1, l).value == bound_single_sample(d1, l - t1, l).value

    @settings(max_examples=500)
    @given(clear, clear, length)
    def test_dominance(self, d1, d2, lhat):
        two = bound_two_endpoint(d1, d2, lhat).value
        assert two >= bound_one_endpoint(d1, lhat).value - 1e-12
        assert two >= bound_one_endpoint(d2, lhat).value - 1e-12

    @settings(max_examples=500)
    @given(clear, st.floats(0.0, 1e3), st.floats(0.0, 1.0))
    def test_reductions(self, d1, l, frac):
        t1 = frac * l
        assert bound_multi_sample([(t1, d1)], l).value == pytest.approx(
            bound_single_sample(d1, t1, l).value, abs=1e-12)
        assert bound_single_sample(d1, 0.0, l).value == pytest.approx(bound_one_endpoint(d1, l).value, abs=1e-12)
        assert bound_single_sample(d1, l, l).value == pytest.approx(bound_one_endpoint(d1, l).value, abs=1e-12)

    @settings(max_examples=500)
    @given(clear, clear, st.floats(1e-9, 1e3))
    def test_chain_of_two_is_two_endpoint(self, d1, d2, l):
        assert bound_endpoint_chain([(0.0, d1), (l, d2)], l).value == pytest.approx(
            bound_two_endpoint(d1, d2, l).value, abs=1e-12)

    @settings(max_examples=300)
    @given(st.lists(st.tuples(st.floats(1e-3, 1.0), st.floats(-1.0, 1.0)), min_size=2, max_size=12),
           st.floats(1e-3, 2.0))
    def test_chain_equals_multi_when_anchored(self, steps, d0):
        # Build a Lipschitz-consistent, endpoint-anchored sample sequence.
        ts, ds = [0.0], [d0]
        for dt, slope in steps:
            ts.append(ts[-1] + dt)
            ds.append(max(ds[-1] + slope * dt, 1e-3))
        samples = list(zip(ts, ds))
        l = ts[-1]
        assert bound_endpoint_chain(samples, l).value == pytest.approx(
            bound_multi_sample(samples, l).value, abs=1e-12)


def test_consistent_samples_pass_strict_check():
    rng = np.random.default_rng(4)
    for _ in range(200):
        ts = np.sort(rng.uniform(0, 5, 8))
        ds = 1.0 + np.cumsum(np.concatenate([[0], np.diff(ts) * rng.uniform(-1, 1, 7)]))
        ds = np.maximum(ds, 0.01) if np.all(ds > 0) else ds - ds.min() + 0.01
        check_consistency([ClearanceSample(t, d) for t, d in zip(ts, ds)])


def _sample_positions(rng, l, k):
    return np.unique(rng.uniform(0.0, l, k))


def test_all_bounds_admissible(random_cases):
    rng = np.random.default_rng(17)
    for c in random_cases:
        path, w, cost = c.path, c.world, c.cost
        l = path.length
        d0, dl = w.clearance_many(path.waypoints[[0, -1]])
        lhat = float(np.linalg.norm(path.end - path.start))
        assert admissible(bound_one_endpoint(d0, lhat).value, cost)
        assert admissible(bound_one_endpoint(dl, lhat).value, cost)
        assert admissible(bound_two_endpoint(d0, dl, lhat).value, cost)
        t1 = rng.uniform(0.0, l)
        (t1, d1), = true_samples(path, w, [t1])
        assert admissible(bound_single_sample(d1, t1, l).value, cost)
        samples = true_samples(path, w, _sample_positions(rng, l, int(rng.integers(1, 7))))
        assert admissible(bound_multi_sample(samples, l).value, cost)
        inner = _sample_positions(rng, l, int(rng.integers(0, 6)))
        inner = inner[(inner > 0) & (inner < l)]
        chain = true_samples(path, w, np.concatenate(([0.0], inner, [l])))
        assert admissible(bound_endpoint_chain(chain, l).value, cost)


def test_refinement_never_decreases(random_cases):
    rng = np.random.default_rng(23)
    for c in random_cases:
        l = c.path.length
        ts = list(_sample_positions(rng, l, 1))
        prev = bound_multi_sample(true_samples(c.path, c.world, ts), l).value
        for t in rng.uniform(0.0, l, 3):
            if t in ts:
                continue
            ts = sorted(ts + [t])
            cur = bound_multi_sample(true_samples(c.path, c.world, ts), l).value
            assert cur >= prev - 1e-12
            prev = cur
