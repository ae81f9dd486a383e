"""Exact predicate core: frozen examples plus property tests against oracles."""

import json
from fractions import Fraction

import hypothesis.strategies as st
import pytest
from hypothesis import given, settings

from flatstab.errors import InputError
from flatstab.exact import (
    PointSet,
    _bareiss_det,
    barycentric_coordinates,
    dump_point_set,
    general_position_check,
    load_point_set,
    orientation,
    point,
    point_set_from_json,
    point_set_to_json,
    point_type,
    simplex_contains,
    simplex_location,
    to_fraction,
)

# ---------------------------------------------------------------------------
# independent oracles


def gauss_det(rows):
    """Plain fraction Gaussian elimination determinant, kept independent of
    the Bareiss kernel on purpose."""
    m = [[Fraction(x) for x in row] for row in rows]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        piv = next((i for i in range(col, n) if m[i][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        for i in range(col + 1, n):
            f = m[i][col] * inv
            if f:
                m[i] = [a - f * b for a, b in zip(m[i], m[col])]
    return det


def barycentric_inside(simplex, p):
    """Oracle: strict containment via barycentric coordinates."""
    lam = barycentric_coordinates(simplex, p)
    assert lam is not None
    return all(l > 0 for l in lam)


def barycentric_closed(simplex, p):
    lam = barycentric_coordinates(simplex, p)
    assert lam is not None
    return all(l >= 0 for l in lam)


small_int = st.integers(min_value=-40, max_value=40)


def frac(num=small_int, den=st.integers(min_value=1, max_value=12)):
    return st.builds(Fraction, num, den)


# ---------------------------------------------------------------------------
# determinant kernel


@settings(max_examples=150, deadline=None)
@given(
    st.integers(min_value=1, max_value=5).flatmap(
        lambda n: st.lists(
            st.lists(st.integers(-999, 999), min_size=n, max_size=n),
            min_size=n,
            max_size=n,
        )
    )
)
def test_bareiss_matches_gauss(rows):
    assert _bareiss_det([list(r) for r in rows]) == gauss_det(rows)


def test_bareiss_large_entries():
    a = 10**60 + 7
    rows = [[a, a - 1, 3], [2, a, a * a], [a * a, 5, a]]
    assert _bareiss_det([list(r) for r in rows]) == gauss_det(rows)


# ---------------------------------------------------------------------------
# orientation


def test_orientation_examples():
    assert orientation([point(0, 0), point(1, 0), point(0, 1)]) == 1
    assert orientation([point(0, 0), point(0, 1), point(1, 0)]) == -1
    assert orientation([point(0, 0), point(1, 1), point(2, 2)]) == 0
    assert orientation([point(0, 0, 0), point(1, 0, 0), point(0, 1, 0), point(0, 0, 1)]) == 1


def test_orientation_validates_shape():
    with pytest.raises(InputError):
        orientation([point(0, 0), point(1, 0)])
    with pytest.raises(InputError):
        orientation([point(0, 0), point(1, 0), point(0, 1, 2)])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(frac(), frac()), min_size=3, max_size=3), st.permutations([0, 1, 2]))
def test_orientation_alternates_under_permutation(pts, perm):
    pts = [tuple(p) for p in pts]
    base = orientation(pts)
    par = 1
    seen = list(perm)
    for i in range(3):  # parity of the permutation by cycle count
        j = seen.index(i)
        if j != i:
            seen[i], seen[j] = seen[j], seen[i]
            par = -par
    assert orientation([pts[i] for i in perm]) == par * base


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.tuples(frac(), frac()), min_size=3, max_size=3),
    st.tuples(frac(), frac()),
    st.integers(min_value=1, max_value=9),
)
def test_orientation_invariant_under_translation_and_scaling(pts, shift, scale):
    pts = [tuple(p) for p in pts]
    moved = [tuple(scale * c + s for c, s in zip(p, shift)) for p in pts]
    assert orientation(moved) == orientation(pts)


# ---------------------------------------------------------------------------
# simplex containment


TRI = [point(0, 0), point(4, 0), point(0, 4)]


def test_simplex_containment_examples():
    assert simplex_location(TRI, point(1, 1)) == 1
    assert simplex_location(TRI, point(2, 0)) == 0  # edge midpoint
    assert simplex_location(TRI, point(0, 0)) == 0  # vertex
    assert simplex_location(TRI, point(5, 5)) == -1
    assert simplex_contains(TRI, point(2, 0), closed=True)
    assert not simplex_contains(TRI, point(2, 0), closed=False)
    assert simplex_contains(TRI, point(1, 2), closed=False)


def test_flat_simplex_has_no_interior():
    flat = [point(0, 0), point(2, 2), point(4, 4)]
    assert simplex_location(flat, point(1, 1)) == 0
    assert simplex_location(flat, point(3, 3)) == 0
    assert simplex_location(flat, point(5, 5)) == -1
    assert simplex_location(flat, point(1, 0)) == -1


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.tuples(frac(), frac()), min_size=3, max_size=3),
    st.tuples(frac(), frac()),
)
def test_containment_agrees_with_barycentric_oracle_2d(tri, p):
    tri = [tuple(q) for q in tri]
    if orientation(tri) == 0:
        return
    assert simplex_contains(tri, p, closed=False) == barycentric_inside(tri, p)
    assert simplex_contains(tri, p, closed=True) == barycentric_closed(tri, p)


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.tuples(frac(), frac(), frac()), min_size=4, max_size=4),
    st.tuples(frac(), frac(), frac()),
)
def test_containment_agrees_with_barycentric_oracle_3d(tet, p):
    tet = [tuple(q) for q in tet]
    if orientation(tet) == 0:
        return
    assert simplex_contains(tet, p, closed=False) == barycentric_inside(tet, p)
    assert simplex_contains(tet, p, closed=True) == barycentric_closed(tet, p)


def test_centroid_is_interior():
    tet = [point(0, 0, 0), point(6, 0, 0), point(0, 6, 0), point(0, 0, 6)]
    centroid = point(Fraction(3, 2), Fraction(3, 2), Fraction(3, 2))
    assert simplex_location(tet, centroid) == 1


# ---------------------------------------------------------------------------
# point types


def test_point_type_examples():
    assert point_type(point(5, 7), point(3, 9)) == 1
    assert point_type(point(2, 9), point(3, 1)) == 0
    assert point_type(point(5, 7), point(3, 2)) == 2
    assert point_type(point(1, 1, 1), point(0, 5, 0)) == 1


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.tuples(frac(), frac(), frac()), min_size=1, max_size=12),
    st.tuples(frac(), frac(), frac()),
)
def test_point_type_partitions(points, r):
    # every point lands in exactly one of the d+1 classes
    for a in points:
        t = point_type(a, r)
        assert 0 <= t <= 3


def test_point_type_dimension_mismatch():
    with pytest.raises(InputError):
        point_type(point(1, 2), point(1, 2, 3))


# ---------------------------------------------------------------------------
# point sets and IO


def test_point_set_validation():
    with pytest.raises(InputError):
        PointSet(dim=2, points=(point(1, 1), point(1, 1)))
    with pytest.raises(InputError):
        PointSet(dim=2, points=(point(1, 1, 1),))
    with pytest.raises(InputError):
        PointSet(dim=0, points=())


def test_general_position_check():
    good = PointSet(2, (point(0, 0), point(1, 0), point(0, 1), point(3, 5)))
    assert general_position_check(good)
    bad = PointSet(2, (point(0, 0), point(1, 1), point(2, 2), point(0, 1)))
    assert not general_position_check(bad)


def test_json_round_trip(tmp_path):
    ps = PointSet(
        2,
        (point("1/3", 2), point(0, "7/5"), point("-2/7", "0.5")),
        label="demo",
    )
    path = tmp_path / "ps.json"
    dump_point_set(ps, str(path))
    back = load_point_set(str(path))
    assert back == ps
    # the serialized form uses ratio strings only where needed
    doc = json.loads(path.read_text())
    assert doc["points"][0][1] == 2
    assert doc["points"][0][0] == "1/3"


def test_json_decimal_coordinates_are_exact(tmp_path):
    path = tmp_path / "dec.json"
    path.write_text('{"dim": 1, "label": "", "points": [[0.1], [1e2]]}')
    ps = load_point_set(str(path))
    assert ps.points[0][0] == Fraction(1, 10)
    assert ps.points[1][0] == Fraction(100)


def test_json_rejects_garbage():
    with pytest.raises(InputError):
        point_set_from_json({"dim": 2})
    with pytest.raises(InputError):
        point_set_from_json({"dim": 2, "points": [["1/0", 2]]})
    with pytest.raises(InputError):
        to_fraction("spam")


def test_round_trip_preserves_json_document():
    doc = {"dim": 2, "label": "x", "points": [[1, "1/3"], ["-4/7", 0]]}
    assert point_set_to_json(point_set_from_json(doc)) == doc
