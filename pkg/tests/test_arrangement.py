"""Audit the fast arrangement cell evaluator against the exact reference."""

import random
from fractions import Fraction

import flatstab.arrangement as arr
from flatstab import PointSet, max_stab_point
from test_counting import planar_set


class _Audit:
    """Wrap _CellEvaluator.count so every visited cell is cross-checked."""

    def __init__(self):
        self.calls = 0
        self.orig = arr._CellEvaluator.count

    def __enter__(self):
        audit = self

        def checked(evaluator, vertex, bisector, incident, vertex_pt):
            got = audit.orig(evaluator, vertex, bisector, incident, vertex_pt)
            ref = arr._symbolic_cell_count_reference(
                evaluator.rows, vertex, bisector
            )
            assert got == ref, (
                f"cell evaluator {got} != reference {ref} at "
                f"vertex={vertex} bisector={bisector} vertex_pt={vertex_pt}"
            )
            audit.calls += 1
            return got

        arr._CellEvaluator.count = checked
        return self

    def __exit__(self, *exc):
        arr._CellEvaluator.count = self.orig
        return False


def test_cell_evaluator_matches_reference_random():
    rng = random.Random(4242)
    with _Audit() as audit:
        for _ in range(6):
            pts = planar_set(rng.randint(5, 9), rng, span=40)
            res = max_stab_point(PointSet(2, pts), "exact")
            assert res.exact
    assert audit.calls > 200


def test_cell_evaluator_matches_reference_grid():
    # 3x3 grid: duplicate pair lines, three-point lines, concurrences,
    # input-point vertices, multi-point rays
    grid = PointSet(2, [(x, y) for x in range(3) for y in range(3)])
    with _Audit() as audit:
        res = max_stab_point(grid, "exact")
    assert audit.calls > 50
    assert res.count.strict == res.count.total - res.count.degenerate - (
        res.count.total - res.count.strict - res.count.degenerate
    )


def test_cell_evaluator_matches_reference_wide_coordinates():
    # few points, ~300-bit coordinates: exercises the scaled-float
    # cancellation and exact-fallback paths
    rng = random.Random(99)
    base = 1 << 300
    with _Audit() as audit:
        for _ in range(3):
            pts = [
                (
                    base + rng.randint(-(1 << 290), 1 << 290),
                    base + rng.randint(-(1 << 290), 1 << 290),
                )
                for _ in range(7)
            ]
            if len(set(pts)) < 7:
                continue
            max_stab_point(PointSet(2, pts), "exact", work_budget=1e9)
    assert audit.calls > 60


def test_exact_search_deterministic():
    rng = random.Random(7)
    pts = planar_set(10, rng, span=60)
    ps = PointSet(2, pts)
    r1 = max_stab_point(ps, "exact")
    r2 = max_stab_point(ps, "exact")
    assert r1.point == r2.point
    assert r1.count == r2.count


def test_grid_maximum_matches_brute_probe():
    # every cell of the 3x3 grid arrangement probed near each vertex must
    # be dominated by the search result
    grid = PointSet(2, [(x, y) for x in range(3) for y in range(3)])
    best = max_stab_point(grid, "exact")
    from flatstab import count_containing_planar_fast

    rng = random.Random(5)
    for _ in range(120):
        q = (
            Fraction(rng.randint(-40, 80), 41),
            Fraction(rng.randint(-40, 80), 43),
        )
        got = count_containing_planar_fast(grid, q)
        assert got.strict <= best.count.strict
