"""Counting-route equivalence and frozen small-case censuses.

The exhaustive counter is checked against a per-subset location oracle, the
planar sweep against the exhaustive counter, and the exact max-stab search
against random probes it must dominate.
"""

import random
from fractions import Fraction
from itertools import combinations
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from flatstab import (
    DegenerateInputError,
    Flat2Codim,
    InputError,
    PointSet,
    StabCount,
    count_containing,
    count_containing_planar_fast,
    count_triangles_stabbed,
    max_stab_point,
    simplex_location,
    wendel_antisymmetric_count,
)
from flatstab.counting import _count_general, colex_subsets


def oracle_census(ps: PointSet, p) -> StabCount:
    # independent route: one full location query per subset
    strict = degen = 0
    for sub in combinations(ps.points, ps.dim + 1):
        loc = simplex_location(sub, p)
        if loc == 1:
            strict += 1
        elif loc == 0:
            degen += 1
    return StabCount(strict, degen, comb(len(ps), ps.dim + 1))


small_int = st.integers(min_value=-9, max_value=9)


def planar_set(n: int, rng: random.Random, span: int = 50) -> PointSet:
    pts = set()
    while len(pts) < n:
        pts.add((Fraction(rng.randint(-span, span)), Fraction(rng.randint(-span, span))))
    return PointSet(2, tuple(sorted(pts)))


# ---------------------------------------------------------------------------
# exhaustive counter


@settings(max_examples=150, deadline=None)
@given(
    st.lists(st.tuples(small_int, small_int), min_size=3, max_size=7, unique=True),
    st.tuples(small_int, small_int),
)
def test_planar_brute_matches_location_oracle(pts, p):
    ps = PointSet(2, tuple(pts))
    assert count_containing(ps, p) == oracle_census(ps, p)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.tuples(small_int, small_int, small_int), min_size=4, max_size=6, unique=True
    ),
    st.tuples(small_int, small_int, small_int),
)
def test_spatial_brute_matches_location_oracle(pts, p):
    ps = PointSet(3, tuple(pts))
    assert count_containing(ps, p) == oracle_census(ps, p)


@settings(max_examples=80, deadline=None)
@given(
    st.lists(st.tuples(small_int, small_int), min_size=3, max_size=7, unique=True),
    st.tuples(small_int, small_int),
)
def test_planar_specialization_matches_general_path(pts, p):
    ps = PointSet(2, tuple(pts))
    from flatstab.exact import point

    assert count_containing(ps, p) == _count_general(ps, point(*p))


def test_square_center_all_boundary():
    sq = PointSet(2, ((0, 0), (2, 0), (2, 2), (0, 2)))
    assert count_containing(sq, (1, 1)) == StabCount(0, 4, 4)
    assert count_containing(sq, (1, Fraction(1, 2))) == StabCount(2, 0, 4)
    assert count_containing(sq, (5, 5)) == StabCount(0, 0, 4)
    # a vertex is a boundary hit of every subset using it
    assert count_containing(sq, (0, 0)) == StabCount(0, 3, 4)


PENTAGON = PointSet(2, ((0, 5), (-5, 2), (-3, -4), (3, -4), (5, 2)))


def test_pentagon_center_census():
    assert count_containing(PENTAGON, (0, 0)) == StabCount(5, 0, 10)


def test_too_few_points():
    ps = PointSet(2, ((0, 0), (1, 0)))
    assert count_containing(ps, (0, 1)) == StabCount(0, 0, 0)


def test_dimension_mismatch():
    with pytest.raises(InputError):
        count_containing(PENTAGON, (0, 0, 0))


def test_colex_order():
    subs = list(colex_subsets(5, 3))
    assert subs[:4] == [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
    assert len(subs) == comb(5, 3)
    # colex order: reversed tuples sort lexicographically
    assert subs == sorted(subs, key=lambda s: tuple(reversed(s)))


# ---------------------------------------------------------------------------
# planar sweep


@settings(max_examples=150, deadline=None)
@given(
    st.lists(st.tuples(small_int, small_int), min_size=3, max_size=8, unique=True),
    st.tuples(small_int, small_int),
)
def test_sweep_matches_brute(pts, p):
    if tuple(Fraction(c) for c in p) in {tuple(map(Fraction, q)) for q in pts}:
        return
    ps = PointSet(2, tuple(pts))
    fast = count_containing_planar_fast(ps, p)
    brute = count_containing(ps, p)
    assert fast.strict == brute.strict
    assert fast.degenerate == brute.degenerate
    assert fast.total == brute.total


def test_sweep_larger_random_instances():
    rng = random.Random(7)
    for _ in range(25):
        ps = planar_set(rng.randint(10, 30), rng)
        p = (Fraction(rng.randint(-60, 60), 7), Fraction(rng.randint(-60, 60), 7))
        assert count_containing_planar_fast(ps, p) == count_containing(ps, p)


def test_sweep_rejects_coincident_query():
    with pytest.raises(InputError):
        count_containing_planar_fast(PENTAGON, (0, 5))


def test_sweep_fallback_on_collinear_rays():
    # two points collinear with the query: the sweep must fall back and
    # still report the boundary hits
    ps = PointSet(2, ((1, 1), (2, 2), (0, 3), (3, 0), (-1, 0)))
    res = count_containing_planar_fast(ps, (0, 0))
    assert res == count_containing(ps, (0, 0))
    assert res.degenerate > 0


# ---------------------------------------------------------------------------
# codimension-2 flats


def test_flat_validation():
    with pytest.raises(InputError):
        Flat2Codim((1, 2, 0), (2, 4, 0), 1, 1)
    with pytest.raises(InputError):
        Flat2Codim((1,), (2,), 1, 1)
    f = Flat2Codim((1, 0, 0), (0, 1, 0), "1/2", 1)
    assert f.s == Fraction(1, 2)
    assert f.dim == 3


def test_tetrahedron_line_stab():
    ps = PointSet(3, ((0, 0, 0), (6, 0, 0), (0, 6, 0), (0, 0, 6)))
    flat = Flat2Codim((1, 0, 0), (0, 1, 0), 1, 1)
    assert count_triangles_stabbed(ps, flat) == StabCount(2, 0, 4)


def test_stab_count_matches_plane_sections():
    # generic spatial set, line down the z axis: a triangle is stabbed iff
    # its xy shadow strictly contains the origin
    rng = random.Random(3)
    pts = set()
    while len(pts) < 12:
        pts.add(tuple(Fraction(rng.randint(-9, 9)) for _ in range(3)))
    ps = PointSet(3, tuple(sorted(pts)))
    flat = Flat2Codim((1, 0, 0), (0, 1, 0), 0, 0)
    got = count_triangles_stabbed(ps, flat)
    shadow = [(q[0], q[1]) for q in ps.points]
    strict = degen = 0
    for tri in combinations(shadow, 3):
        loc = simplex_location(tri, (0, 0))
        if loc == 1:
            strict += 1
        elif loc == 0:
            degen += 1
    assert got == StabCount(strict, degen, comb(12, 3))


def test_stab_flat_dimension_mismatch():
    ps = PointSet(3, ((0, 0, 0), (6, 0, 0), (0, 6, 0), (0, 0, 6)))
    with pytest.raises(InputError):
        count_triangles_stabbed(ps, Flat2Codim((1, 0), (0, 1), 1, 1))


# ---------------------------------------------------------------------------
# antisymmetric census


def test_antisymmetric_frozen_example():
    assert wendel_antisymmetric_count([(1, 0), (0, 1), (1, 1)]) == 2


def test_antisymmetric_degenerate_raises():
    with pytest.raises(DegenerateInputError):
        wendel_antisymmetric_count([(1, 0), (2, 0), (0, 1)])
    with pytest.raises(DegenerateInputError):
        wendel_antisymmetric_count([(0, 0), (1, 0), (0, 1)])
    with pytest.raises(InputError):
        wendel_antisymmetric_count([(1, 0), (-1, 0), (0, 1)])
    with pytest.raises(InputError):
        wendel_antisymmetric_count([(1, 0), (0, 1)])


@settings(max_examples=120, deadline=None)
@given(st.data())
def test_antisymmetric_count_is_two(data):
    d = data.draw(st.integers(min_value=2, max_value=4))
    coord = st.integers(min_value=-7, max_value=7)
    pts = data.draw(
        st.lists(st.tuples(*[coord] * d), min_size=d + 1, max_size=d + 1)
    )
    try:
        got = wendel_antisymmetric_count(pts)
    except (DegenerateInputError, InputError):
        return
    assert got == 2


def test_antisymmetric_seeded_sweep():
    rng = random.Random(11)
    done = 0
    while done < 60:
        d = rng.choice([2, 3, 4])
        pts = [tuple(rng.randint(-30, 30) for _ in range(d)) for _ in range(d + 1)]
        try:
            got = wendel_antisymmetric_count(pts)
        except (DegenerateInputError, InputError):
            continue
        assert got == 2
        done += 1


# ---------------------------------------------------------------------------
# max-stab search


def test_max_stab_square():
    sq = PointSet(2, ((0, 0), (2, 0), (2, 2), (0, 2)))
    res = max_stab_point(sq)
    assert res.exact
    assert res.count.strict == 2
    assert res.count.degenerate == 0


def test_max_stab_pentagon():
    res = max_stab_point(PENTAGON)
    assert res.exact
    assert res.count.strict == 5
    assert count_containing(PENTAGON, res.point).strict == 5


def test_max_stab_dominates_probes():
    rng = random.Random(23)
    for _ in range(6):
        ps = planar_set(rng.randint(5, 8), rng, span=9)
        res = max_stab_point(ps)
        assert res.exact
        assert count_containing(ps, res.point).strict == res.count.strict
        for _ in range(80):
            ids = rng.sample(range(len(ps)), 3)
            w = [Fraction(rng.randint(1, 9)) for _ in ids]
            tot = sum(w)
            probe = tuple(
                sum(w[a] * ps.points[i][j] for a, i in enumerate(ids)) / tot
                for j in range(2)
            )
            assert count_containing(ps, probe).strict <= res.count.strict


def test_max_stab_collinear_set():
    ps = PointSet(2, ((0, 0), (1, 1), (2, 2), (3, 3)))
    res = max_stab_point(ps)
    assert res.exact
    assert res.count.strict == 0


def test_max_stab_heuristic_bounded_by_exact():
    rng = random.Random(5)
    for _ in range(3):
        ps = planar_set(7, rng, span=9)
        exact = max_stab_point(ps)
        heur = max_stab_point(ps, mode="heuristic", seed=1, restarts=12, eval_budget=2500)
        assert not heur.exact
        assert heur.count.strict <= exact.count.strict
        assert heur.count == count_containing(ps, heur.point)


def test_max_stab_work_budget():
    from flatstab import ResourceLimitError

    big = PointSet(2, tuple((Fraction(2**i), Fraction(3**i)) for i in range(1, 12)))
    with pytest.raises(ResourceLimitError):
        max_stab_point(big, work_budget=1.0)


def test_max_stab_mode_validation():
    with pytest.raises(InputError):
        max_stab_point(PENTAGON, mode="annealing")
    ps3 = PointSet(3, ((0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)))
    with pytest.raises(InputError):
        max_stab_point(ps3, mode="exact")
