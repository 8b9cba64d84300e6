import math

import numpy as np
import pytest

from sepcont.domains import validate_onepointed
from sepcont.errors import DomainError
from sepcont.gallery import (GALLERY, arctan_step, dyadic_counterexample, dyadic_points,
                             lookup, piecewise_linear, pow_limit)


def test_pow_stage_value():
    assert pow_limit().sequence.stage(np.array([3]), 0.5)[0] == 0.125


def test_pow_limits():
    seq = pow_limit().sequence
    assert seq.limit(1.0) == 1.0 and seq.limit(0.5) == 0.0


def test_arctan_values():
    e = arctan_step(0.5)
    assert e.sequence.limit(0.5) == 0.0
    assert e.sequence.limit(0.6) == 1.0
    assert e.sequence.stage(np.array([1]), 0.5)[0] == 0.0


def test_arctan_rejects_bad_jump():
    with pytest.raises(DomainError):
        arctan_step(1.0)


@pytest.mark.parametrize("name", ["pow_limit", "arctan_step", "identity", "constant"])
def test_known_values_honour_rate_oracle(name):
    seq = lookup(name).sequence
    for t, v, _ in lookup(name).known_values:
        assert seq.limit(t) == v
        for eps in (1e-3, 1e-6, 1e-9):
            N = seq.stages_for(eps, t)
            vals = seq.clamped(np.arange(N, N + 50), t)
            assert np.max(np.abs(vals - v)) <= eps


@pytest.mark.parametrize("name", ["pow_limit", "arctan_step"])
def test_tail_bounds_dominate(name):
    seq = lookup(name).sequence
    for t in np.linspace(0.0, 1.0, 41).tolist():
        for m in (1, 10, 100):
            vals = seq.clamped(np.arange(m, m + 500), t)
            assert np.max(np.abs(vals - seq.limit(t))) <= seq.tail_bound(m, t) + 1e-15


def test_piecewise_linear_entry():
    e = piecewise_linear([(0.0, 0.2), (0.4, 0.9), (1.0, -0.1)])
    assert e.sequence.limit(0.2) == pytest.approx(0.55)
    with pytest.raises(DomainError):
        piecewise_linear([(0.0, 1.0)])


def test_lookup_unknown():
    with pytest.raises(KeyError):
        lookup("thomae")
    assert set(GALLERY) >= {"pow_limit", "arctan_step"}


def test_dyadic_depth_one():
    ce = dyadic_counterexample(1)
    assert ce.E1.points == ((0.5, 0.75),)


def test_dyadic_depth_two_adds_points():
    pts = set(dyadic_counterexample(2).E1.points)
    assert pts == {(0.5, 0.75), (0.25, 0.375), (0.75, 0.875)}


def test_dyadic_violation():
    v = validate_onepointed(dyadic_counterexample(4).pieces)
    assert not v and v.value == 0.5


def test_dyadic_offsets_exact():
    for n in range(1, 21):
        pts = set(dyadic_points(n))
        for k in range(1, 2 ** (n - 1) + 1, max(1, 2 ** (n - 1) // 7)):
            x = (2 * k - 1) / 2 ** n
            assert (x, x + 2.0 ** -(n + 1)) in pts
    for x, y in dyadic_points(20):
        assert y > x
        assert math.log2(y - x) == int(math.log2(y - x))


def test_dyadic_values():
    ce = dyadic_counterexample(2)
    assert ce.value(0.25, 0.375) == 1.0
    assert ce.value(0.3, 0.3) == 0.0
    with pytest.raises(DomainError):
        ce.value(0.3, 0.4)


@pytest.mark.parametrize("depth", [0, 21])
def test_dyadic_depth_bounds(depth):
    with pytest.raises(DomainError):
        dyadic_counterexample(depth)
