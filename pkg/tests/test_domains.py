import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sepcont.domains import (COORD_TOL, OK, ClosedLineSet, FinitePointSet2D, GraphSet,
                             Homeomorphism1D, InGap, InSet, LeftOfSet, RightOfSet, Violation,
                             format_intervals, graph_from_onepointed, locate, parse_breakpoints,
                             parse_intervals, validate_onepointed)
from sepcont.errors import DomainError, PreconditionViolation
from sepcont.gallery import dyadic_counterexample


# ---- locate

def test_locate_gap_between_points():
    A = ClosedLineSet(((0.0, 0.0), (1.0, 1.0)))
    assert locate(0.5, A) == InGap(0.0, 1.0)


def test_locate_inside_interval():
    assert locate(0.5, ClosedLineSet.interval()) == InSet()


def test_locate_left_of_set():
    A = ClosedLineSet(((0.25, 0.5), (0.9, 0.9)))
    assert locate(0.1, A) == LeftOfSet(0.25)
    assert locate(0.95, A) == RightOfSet(0.9)
    assert locate(0.9, A) == InSet()
    assert locate(0.7, A) == InGap(0.5, 0.9)


def test_locate_empty_rejected():
    with pytest.raises(DomainError):
        locate(0.5, ClosedLineSet(()))


# ---- ClosedLineSet invariants

@pytest.mark.parametrize("comps", [((0.5, 0.2),), ((0.0, 0.5), (0.4, 0.8)), ((-0.1, 0.2),),
                                   ((0.6, 0.8), (0.1, 0.2)), ((0.2, 1.5),)])
def test_line_set_rejects_bad_components(comps):
    with pytest.raises(DomainError):
        ClosedLineSet(comps)


def test_from_pieces_merges_and_sorts():
    A = ClosedLineSet.from_pieces([(0.6, 0.8), (0.1, 0.3), (0.25, 0.4), (0.8, 0.9)])
    assert A.components == ((0.1, 0.4), (0.6, 0.9))


def test_distance_and_nearest():
    A = ClosedLineSet(((0.0, 0.5),))
    assert A.distance(0.75) == 0.25
    assert A.nearest(0.75) == 0.5
    B = ClosedLineSet(((0.0, 0.2), (0.8, 1.0)))
    assert B.distance(0.5) == pytest.approx(0.3)
    assert B.nearest(0.7) == 0.8


# ---- homeomorphisms and graphs

def test_diagonal_graph():
    E = GraphSet.diagonal()
    assert E.base.components == ((0.0, 1.0),)
    assert E.map.direction == "increasing"
    assert E.contains(0.3, 0.3) and not E.contains(0.3, 0.4)


def test_decreasing_graph():
    E = GraphSet(ClosedLineSet.interval(), Homeomorphism1D(((0.0, 1.0), (1.0, 0.0))))
    assert E.map.direction == "decreasing"
    assert E.map(0.25) == 0.75
    assert E.map.inverse(0.75) == 0.25
    assert E.image.components == ((0.0, 1.0),)


def test_homeomorphism_must_be_monotone():
    with pytest.raises(DomainError):
        Homeomorphism1D(((0.0, 0.0), (0.5, 0.7), (1.0, 0.6)))
    with pytest.raises(DomainError):
        Homeomorphism1D(((0.5, 0.0), (0.5, 1.0)))


def test_graph_leaving_square_rejected():
    with pytest.raises(DomainError):
        GraphSet(ClosedLineSet.interval(), Homeomorphism1D(((0.0, 0.0), (1.0, 2.0))))


# knot ordinates on a 1/100 grid: slopes stay well conditioned
knots = st.lists(st.integers(1, 99), min_size=1, max_size=5, unique=True)


@settings(max_examples=50, deadline=None)
@given(knots, st.booleans())
def test_round_trip(ks, decreasing):
    ys = sorted(k / 100 for k in ks)
    xs = np.linspace(0.0, 1.0, len(ys) + 2)
    ys = [0.0] + ys + [1.0]
    if decreasing:
        ys = ys[::-1]
    e = Homeomorphism1D(tuple(zip(xs.tolist(), ys)))
    for x in np.random.default_rng(0).random(1000).tolist():
        assert abs(e.inverse(e(x)) - x) <= 1e-12


def test_membership_matches_base_and_map():
    E = GraphSet(ClosedLineSet(((0.1, 0.4), (0.6, 0.9))),
                 Homeomorphism1D(((0.0, 0.1), (1.0, 0.9))))
    rng = np.random.default_rng(3)
    for x, y in rng.random((2000, 2)).tolist():
        expected = E.base.contains(x) and abs(y - E.map(x)) <= COORD_TOL
        assert E.contains(x, y) == expected
    for x in E.base.sample(200, rng).tolist():
        assert E.contains(x, E.map(x))


def test_graph_distance_is_euclidean():
    E = GraphSet.diagonal()
    assert E.distance(0.0, 1.0) == pytest.approx(np.sqrt(0.5))
    assert E.distance(0.3, 0.3) == 0.0


# ---- one-pointedness

def test_diagonal_is_onepointed():
    assert validate_onepointed([GraphSet.diagonal()]) == OK()


def test_dyadic_set_violation_witness():
    ce = dyadic_counterexample(3)
    v = validate_onepointed(ce.pieces)
    assert isinstance(v, Violation)
    assert v.axis == "vertical" and v.value == 0.5
    assert v.witnesses == ((0.5, 0.5), (0.5, 0.75))


def test_two_points_same_abscissa():
    v = validate_onepointed([FinitePointSet2D(((0.2, 0.3), (0.2, 0.8)))])
    assert not v
    assert v.axis == "vertical" and v.value == 0.2


def test_horizontal_violation():
    v = validate_onepointed([FinitePointSet2D(((0.1, 0.5), (0.7, 0.5)))])
    assert v.axis == "horizontal" and v.value == 0.5


def test_crossing_graphs():
    anti = GraphSet(ClosedLineSet.interval(), Homeomorphism1D(((0.0, 1.0), (1.0, 0.0))))
    assert not validate_onepointed([GraphSet.diagonal(), anti])


def test_swap_symmetry():
    pts = [(0.1, 0.3), (0.5, 0.9), (0.3, 0.1), (0.9, 0.5)]
    S = [FinitePointSet2D(tuple(pts))]
    S_swapped = [FinitePointSet2D(tuple((y, x) for x, y in pts))]
    assert bool(validate_onepointed(S)) == bool(validate_onepointed(S_swapped))
    bad = pts + [(0.1, 0.7)]
    vb = validate_onepointed([FinitePointSet2D(tuple(bad))])
    vs = validate_onepointed([FinitePointSet2D(tuple((y, x) for x, y in bad))])
    assert not vb and not vs
    assert {vb.axis, vs.axis} == {"vertical", "horizontal"}
    assert vb.value == vs.value == 0.1


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 8), st.integers(0, 8)), min_size=1, max_size=6,
                unique=True))
def test_validator_swap_symmetric_on_random_sets(cells):
    pts = tuple((i / 8, j / 8) for i, j in cells)
    a = bool(validate_onepointed([FinitePointSet2D(pts)]))
    b = bool(validate_onepointed([FinitePointSet2D(tuple((y, x) for x, y in pts))]))
    assert a == b


def test_graph_from_onepointed_recovers_pieces():
    left = GraphSet(ClosedLineSet.interval(0.0, 0.4), Homeomorphism1D(((0.0, 0.1), (1.0, 0.9))))
    pt = FinitePointSet2D(((0.7, 0.8),))
    X1, e = graph_from_onepointed([left, pt])
    assert X1.components == ((0.0, 0.4), (0.7, 0.7))
    assert e(0.7) == pytest.approx(0.8)
    assert e(0.2) == pytest.approx(left.map(0.2))


def test_graph_from_onepointed_rejects_violation():
    with pytest.raises(PreconditionViolation) as info:
        graph_from_onepointed(dyadic_counterexample(1).pieces)
    assert info.value.violation.witnesses == ((0.5, 0.5), (0.5, 0.75))


# ---- text format

def test_parse_intervals_and_points():
    A = parse_intervals("0..0.25, 0.5, 0.75..1")
    assert A.components == ((0.0, 0.25), (0.5, 0.5), (0.75, 1.0))
    assert parse_intervals(format_intervals(A)) == A


def test_parse_breakpoints():
    assert parse_breakpoints("0:1, 1:0") == [(0.0, 1.0), (1.0, 0.0)]
    with pytest.raises(DomainError):
        parse_breakpoints("0-1")
    with pytest.raises(DomainError):
        parse_intervals("a..b")
