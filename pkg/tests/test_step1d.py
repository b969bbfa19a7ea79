import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rearrange_lab import generators
from rearrange_lab.errors import ParseError
from rearrange_lab.halfspace import Halfspace
from rearrange_lab.step1d import (
    StepFunction,
    deviation_measure,
    dumps,
    loads,
    lp_distance,
    lp_norm,
    lp_norm_pow,
    polarize,
    rearrange,
    sup_distance,
    superlevel_measure,
)


def dyadic_steps():
    """Hypothesis strategy for step functions on the 1/8 grid in [-4, 4]."""
    return st.builds(
        lambda seed: generators.random_step_function(
            random.Random(seed), span=4.0),
        st.integers(0, 10**9))


class TestStepFunction:
    def test_canonical_merges_equal_neighbours(self):
        u = StepFunction([0, 1, 2], [3.0, 3.0])
        assert u.piece_count == 1
        assert u.breakpoints.tolist() == [0.0, 2.0]

    def test_canonical_strips_zero_ends(self):
        u = StepFunction([0, 1, 2, 3], [0.0, 5.0, 0.0])
        assert u.breakpoints.tolist() == [1.0, 2.0]
        assert u.values.tolist() == [5.0]

    def test_all_zero_is_zero_function(self):
        u = StepFunction([0, 1], [0.0])
        assert u.is_zero
        assert u == StepFunction.zero()

    def test_interior_zero_pieces_kept(self):
        u = StepFunction([0, 1, 2, 3], [1.0, 0.0, 2.0])
        assert u.piece_count == 3

    def test_validation(self):
        with pytest.raises(ValueError):
            StepFunction([0, 1], [1.0, 2.0])
        with pytest.raises(ValueError):
            StepFunction([1, 0], [1.0])
        with pytest.raises(ValueError):
            StepFunction([0, 1], [-1.0])
        with pytest.raises(ValueError):
            StepFunction([0, 1], [float("nan")])

    def test_half_open_evaluation(self):
        u = StepFunction.indicator(1, 2)
        assert u.evaluate(1.0) == 1.0
        assert u.evaluate(2.0) == 0.0
        assert u.evaluate(0.999) == 0.0

    def test_evaluate_many_matches_evaluate(self):
        rng = random.Random(0)
        u = generators.random_step_function(rng)
        xs = np.array([rng.uniform(-9, 9) for _ in range(500)])
        many = u.evaluate_many(xs)
        for x, v in zip(xs, many):
            assert u.evaluate(float(x)) == v

    def test_from_intervals_fills_gaps(self):
        u = StepFunction.from_intervals([(0, 1, 2.0), (3, 4, 1.0)])
        assert u.evaluate(2.0) == 0.0
        assert u.evaluate(0.5) == 2.0
        assert u.evaluate(3.5) == 1.0

    def test_from_intervals_rejects_overlap(self):
        with pytest.raises(ValueError):
            StepFunction.from_intervals([(0, 2, 1.0), (1, 3, 1.0)])

    def test_equality_and_hash(self):
        a = StepFunction([0, 1], [2.0])
        b = StepFunction([0, 0.5, 1], [2.0, 2.0])
        assert a == b
        assert hash(a) == hash(b)


class TestPolarize:
    def test_indicator_across_origin(self):
        # 1_{[1,2)} across {x <= 0} reflects to 1_{[-2,-1)}
        u = StepFunction.indicator(1, 2)
        out = polarize(u, Halfspace.line(1, 0.0))
        assert out == StepFunction.indicator(-2, -1)

    def test_already_polarized_returns_same_object(self):
        u = StepFunction.indicator(-2, -1)
        assert polarize(u, Halfspace.line(1, 0.0)) is u

    def test_zero_function(self):
        z = StepFunction.zero()
        assert polarize(z, Halfspace.line(1, 0.5)) is z

    def test_dimension_check(self):
        with pytest.raises(ValueError):
            polarize(StepFunction.indicator(0, 1), Halfspace.plane(0.0, 0.5))

    @given(dyadic_steps(), st.sampled_from((1.0, -1.0)),
           st.integers(-64, 64))
    @settings(max_examples=150, deadline=None)
    def test_equimeasurable_exactly_on_dyadic_centers(self, u, sign, k):
        # dyadic offsets keep every reflected breakpoint representable,
        # so superlevel measures survive bit-for-bit
        h = Halfspace.line(sign, k / 64.0)
        out = polarize(u, h)
        for lam in {0.0, *(v / 2 for v in u.values.tolist()),
                    *u.values.tolist()}:
            assert superlevel_measure(out, lam) == superlevel_measure(u, lam)

    @given(dyadic_steps(), st.integers(0, 10**9))
    @settings(max_examples=100, deadline=None)
    def test_equimeasurable_approximately_anywhere(self, u, hseed):
        h = generators.random_halfspace_1d(random.Random(hseed),
                                           signed_offset=True)
        out = polarize(u, h)
        for lam in {0.0, *(v / 2 for v in u.values.tolist())}:
            assert math.isclose(superlevel_measure(out, lam),
                                superlevel_measure(u, lam),
                                rel_tol=0.0, abs_tol=1e-9)

    @given(dyadic_steps(), st.integers(0, 10**9))
    @settings(max_examples=100, deadline=None)
    def test_idempotent(self, u, hseed):
        h = generators.random_halfspace_1d(random.Random(hseed),
                                           signed_offset=True)
        once = polarize(u, h)
        assert polarize(once, h) is once

    def test_pointwise_definition(self):
        rng = random.Random(17)
        for _ in range(50):
            u = generators.random_step_function(rng, span=4.0)
            h = generators.random_halfspace_1d(rng, signed_offset=True)
            out = polarize(u, h)
            nu, d = h.normal[0], h.offset
            c = nu * d
            for _ in range(200):
                x = rng.uniform(-10, 10)
                a, b = u.evaluate(x), u.evaluate(2 * c - x)
                want = max(a, b) if nu * x <= d else min(a, b)
                assert out.evaluate(x) == want


class TestRearrange:
    def test_two_piece_example(self):
        # 2 on [0,1), 1 on [2,4): layers of measure 1 and 3
        u = StepFunction.from_intervals([(0, 1, 2.0), (2, 4, 1.0)])
        out = rearrange(u)
        assert out.breakpoints.tolist() == [-1.5, -0.5, 0.5, 1.5]
        assert out.values.tolist() == [1.0, 2.0, 1.0]

    def test_idempotent(self):
        rng = random.Random(5)
        for _ in range(100):
            u = generators.random_step_function(rng)
            s = rearrange(u)
            assert rearrange(s) is s

    def test_symmetric_and_radially_nonincreasing(self):
        rng = random.Random(6)
        for _ in range(100):
            u = generators.random_step_function(rng)
            s = rearrange(u)
            vals = s.values.tolist()
            mid = len(vals) // 2
            assert vals[:mid + 1] == sorted(vals[:mid + 1])
            assert vals[mid:] == sorted(vals[mid:], reverse=True)
            b = s.breakpoints
            if b.size:
                assert math.isclose(b[0], -b[-1], abs_tol=0.0)

    def test_layer_cake_oracle(self):
        rng = random.Random(7)
        for _ in range(100):
            u = generators.random_step_function(rng)
            s = rearrange(u)
            levels = sorted({0.0, *(v * f for v in u.values.tolist()
                                    for f in (0.5, 1.0))})
            for lam in levels:
                m = superlevel_measure(u, lam)
                assert superlevel_measure(s, lam) == m
                # the superlevel set of s is the centered interval of measure m
                if m > 0:
                    assert s.evaluate(-m / 2) > lam
                    assert s.evaluate(m / 2 - 1e-12) > lam

    def test_zero(self):
        assert rearrange(StepFunction.zero()).is_zero


class TestFunctionals:
    def test_lp_norm_indicator(self):
        u = StepFunction.indicator(0, 2, 3.0)
        assert lp_norm_pow(u, 1) == 6.0
        assert lp_norm_pow(u, 2) == 18.0
        assert lp_norm(u, 2) == math.sqrt(18.0)

    def test_lp_norm_invalid_p(self):
        with pytest.raises(ValueError):
            lp_norm(StepFunction.indicator(0, 1), 0.5)

    def test_superlevel_measures(self):
        u = StepFunction.from_intervals([(0, 1, 2.0), (2, 4, 1.0)])
        assert superlevel_measure(u, 0.0) == 3.0
        assert superlevel_measure(u, 1.0) == 1.0
        assert superlevel_measure(u, 2.0) == 0.0

    def test_lp_distance_self_is_zero(self):
        u = generators.random_step_function(random.Random(1))
        assert lp_distance(u, u, 1) == 0.0

    def test_lp_distance_disjoint_indicators(self):
        u = StepFunction.indicator(0, 1)
        v = StepFunction.indicator(2, 3)
        assert lp_distance(u, v, 1) == 2.0
        assert sup_distance(u, v) == 1.0

    def test_deviation_measure(self):
        u = StepFunction.indicator(0, 2, 1.0)
        v = StepFunction.indicator(0, 2, 1.005)
        assert deviation_measure(u, v, 0.01) == 0.0
        assert deviation_measure(u, v, 0.001) == 2.0
        with pytest.raises(ValueError):
            deviation_measure(u, v, 0.0)


class TestCsv:
    def test_roundtrip_random(self):
        rng = random.Random(11)
        for _ in range(100):
            u = generators.random_step_function(rng)
            assert loads(dumps(u)) == u

    def test_zero_roundtrip(self):
        z = StepFunction.zero()
        assert loads(dumps(z)) == z
        assert dumps(z) == "breakpoint,value\n"

    def test_format_shape(self):
        text = dumps(StepFunction.indicator(1, 2))
        assert text == "breakpoint,value\n1,1\n2,\n"

    def test_file_roundtrip(self, tmp_path):
        from rearrange_lab.step1d import read_csv, write_csv
        u = generators.random_step_function(random.Random(12))
        p = tmp_path / "u.csv"
        write_csv(u, p)
        assert read_csv(p) == u

    def test_parse_errors(self):
        with pytest.raises(ParseError):
            loads("wrong,header\n0,1\n1,\n")
        with pytest.raises(ParseError):
            loads("breakpoint,value\n0,1\n")           # missing final row
        with pytest.raises(ParseError):
            loads("breakpoint,value\n0,x\n1,\n")
        with pytest.raises(ParseError):
            loads("breakpoint,value\n0,-1\n1,\n")      # negative value
