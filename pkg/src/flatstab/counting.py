"""Exact counting of simplices containing a point or stabbed by a flat.

Two independent routes are kept for planar counting: an exhaustive
enumeration (`count_containing`) and an angular-sweep complement count
(`count_containing_planar_fast`).  The fast route falls back to the
exhaustive one on angular degeneracies so both always agree exactly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from itertools import combinations
from math import comb, gcd
from typing import Iterable, Sequence

from .errors import DegenerateInputError, InputError
from .exact import (
    ExactPoint,
    PointSet,
    _bareiss_det,
    _in_convex_hull,
    homogeneous_rows,
    point,
    simplex_location,
    to_fraction,
)


@dataclass(frozen=True)
class StabCount:
    """Simplex census at a query point: strictly containing, boundary hits, total."""

    strict: int
    degenerate: int
    total: int

    def __post_init__(self) -> None:
        if self.strict < 0 or self.degenerate < 0:
            raise InputError("counts must be non-negative")
        if self.strict + self.degenerate > self.total:
            raise InputError("strict + degenerate cannot exceed total")

    @property
    def closed(self) -> int:
        return self.strict + self.degenerate


@dataclass(frozen=True)
class Flat2Codim:
    """The flat {x : <v,x> = s, <w,x> = t} of codimension 2."""

    v: ExactPoint
    w: ExactPoint
    s: Fraction
    t: Fraction

    def __post_init__(self) -> None:
        v = point(*self.v)
        w = point(*self.w)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "s", to_fraction(self.s))
        object.__setattr__(self, "t", to_fraction(self.t))
        if len(v) != len(w):
            raise InputError("v and w must have equal dimension")
        if len(v) < 2:
            raise InputError("a codimension-2 flat needs ambient dimension >= 2")
        for i, j in combinations(range(len(v)), 2):
            if v[i] * w[j] - v[j] * w[i] != 0:
                return
        raise InputError("v and w must be linearly independent")

    @property
    def dim(self) -> int:
        return len(self.v)


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def colex_subsets(n: int, k: int) -> Iterable[tuple[int, ...]]:
    """(k)-subsets of range(n) in colexicographic order.

    The stream is partitionable by the largest element, which keeps chunked
    runs deterministic.
    """
    if k == 0:
        yield ()
        return
    for top in range(k - 1, n):
        for rest in colex_subsets(top, k - 1):
            yield (*rest, top)


# ---------------------------------------------------------------------------
# exhaustive counting


def _count_planar_rows(rows: Sequence[tuple[int, int, int]], prow: tuple[int, int, int]) -> StabCount:
    # rows are homogeneous (w, x, y) integer triples with w > 0
    n = len(rows)
    pw, px, py = prow
    dx = [r[1] * pw - px * r[0] for r in rows]
    dy = [r[2] * pw - py * r[0] for r in rows]
    sig = [[0] * n for _ in range(n)]
    for i in range(n):
        dxi, dyi = dx[i], dy[i]
        row = sig[i]
        for j in range(i + 1, n):
            s = _sign(dxi * dy[j] - dyi * dx[j])
            row[j] = s
            sig[j][i] = -s
    strict = 0
    degen = 0
    for i, j, k in colex_subsets(n, 3):
        a = sig[i][j]
        b = sig[j][k]
        c = sig[k][i]
        if (a > 0 or b > 0 or c > 0) and (a < 0 or b < 0 or c < 0):
            continue  # mixed signs: strictly outside
        if a == 0 and b == 0 and c == 0:
            # everything on one line through p: in hull iff p lies between
            # two of the three points
            if (
                dx[i] * dx[j] + dy[i] * dy[j] <= 0
                or dx[j] * dx[k] + dy[j] * dy[k] <= 0
                or dx[i] * dx[k] + dy[i] * dy[k] <= 0
            ):
                degen += 1
            continue
        if a != 0 and b != 0 and c != 0:
            strict += 1
        else:
            degen += 1
    return StabCount(strict=strict, degenerate=degen, total=comb(n, 3))


def _count_general(ps: PointSet, p: ExactPoint) -> StabCount:
    n = len(ps)
    d = ps.dim
    rows = [list(r) for r in homogeneous_rows(ps)]
    prow = list(homogeneous_rows([p])[0])
    strict = 0
    degen = 0
    facet_cache: dict[tuple[int, ...], int] = {}

    def facet_sign(sub: tuple[int, ...]) -> int:
        val = facet_cache.get(sub)
        if val is None:
            val = _sign(_bareiss_det([rows[t] for t in sub] + [prow]))
            facet_cache[sub] = val
        return val

    for q in colex_subsets(n, d + 1):
        s0 = _sign(_bareiss_det([rows[t] for t in q]))
        if s0 == 0:
            # flat simplex: empty interior; boundary hit iff p in its hull
            if _in_convex_hull([ps.points[t] for t in q], p):
                degen += 1
            continue
        boundary = False
        outside = False
        for k in range(d + 1):
            sk = facet_sign(q[:k] + q[k + 1 :])
            if (d - k) % 2:
                sk = -sk
            if sk == -s0:
                outside = True
                break
            if sk == 0:
                boundary = True
        if outside:
            continue
        if boundary:
            degen += 1
        else:
            strict += 1
    return StabCount(strict=strict, degenerate=degen, total=comb(n, d + 1))


def count_containing(ps: PointSet, p: Sequence) -> StabCount:
    """Exhaustive exact census of the (d+1)-subsets of S at p.

    strict counts open-simplex containment; degenerate counts subsets whose
    closed hull contains p on its boundary (including flat subsets).
    """
    pp = point(*p)
    if len(pp) != ps.dim:
        raise InputError("query point dimension mismatch")
    if len(ps) < ps.dim + 1:
        return StabCount(0, 0, 0)
    if ps.dim == 2:
        rows = homogeneous_rows(ps)
        prow = homogeneous_rows([pp])[0]
        return _count_planar_rows(rows, prow)
    return _count_general(ps, pp)


# ---------------------------------------------------------------------------
# angular-sweep counting (planar)


def _normalized_direction(dx: int, dy: int) -> tuple[int, int]:
    g = gcd(abs(dx), abs(dy))
    return (dx // g, dy // g)


def count_containing_planar_fast(ps: PointSet, p: Sequence) -> StabCount:
    """Planar census in O(n log n) exact angular comparisons.

    Requires p distinct from every point of S.  When two set points are
    collinear with p the sweep's complement formula no longer applies and
    the call transparently falls back to the exhaustive counter, so the
    result is exact in every case.
    """
    pp = point(*p)
    if ps.dim != 2 or len(pp) != 2:
        raise InputError("planar counting needs dimension 2")
    n = len(ps)
    if n < 3:
        return StabCount(0, 0, comb(n, 3))
    rows = homogeneous_rows(ps)
    pw, px, py = homogeneous_rows([pp])[0]
    dirs = []
    for r in rows:
        dx = r[1] * pw - px * r[0]
        dy = r[2] * pw - py * r[0]
        if dx == 0 and dy == 0:
            raise InputError("query point coincides with a set point")
        dirs.append((dx, dy))
    seen = set()
    degenerate_rays = False
    for dx, dy in dirs:
        nd = _normalized_direction(dx, dy)
        if nd in seen or (-nd[0], -nd[1]) in seen:
            degenerate_rays = True
            break
        seen.add(nd)
    if degenerate_rays:
        return count_containing(ps, pp)

    def upper(v: tuple[int, int]) -> bool:
        return v[1] > 0 or (v[1] == 0 and v[0] > 0)

    def cmp(a: tuple[int, int], b: tuple[int, int]) -> int:
        ua, ub = upper(a), upper(b)
        if ua != ub:
            return -1 if ua else 1
        return -_sign(a[0] * b[1] - a[1] * b[0])

    order = sorted(dirs, key=cmp_to_key(cmp))
    # windmill: h_i = number of directions strictly ccw of ray i within pi
    total_pairs = 0
    k = 1
    for i in range(n):
        if k < i + 1:
            k = i + 1
        while k - i < n:
            a = order[i]
            b = order[k % n]
            if a[0] * b[1] - a[1] * b[0] > 0:
                k += 1
            else:
                break
        h = k - i - 1
        total_pairs += comb(h, 2)
    return StabCount(strict=comb(n, 3) - total_pairs, degenerate=0, total=comb(n, 3))


# ---------------------------------------------------------------------------
# flats of codimension 2


def project_to_flat_frame(ps: PointSet, flat: Flat2Codim) -> list[tuple[Fraction, Fraction]]:
    """Image of the set under x -> (<v,x>, <w,x>), exactly."""
    if flat.dim != ps.dim:
        raise InputError("flat dimension mismatch")
    out = []
    for q in ps.points:
        out.append(
            (
                sum((a * b for a, b in zip(flat.v, q)), Fraction(0)),
                sum((a * b for a, b in zip(flat.w, q)), Fraction(0)),
            )
        )
    return out


def count_triangles_stabbed(ps: PointSet, flat: Flat2Codim) -> StabCount:
    """Number of triangles of S whose interior the flat crosses.

    A triangle is stabbed exactly when its projection along the flat's two
    normal functionals strictly contains the projected flat point (s, t).
    """
    proj = project_to_flat_frame(ps, flat)
    target = (flat.s, flat.t)
    if len(set(proj)) == len(proj) and target not in proj:
        planar = PointSet(2, tuple(proj))
        return count_containing_planar_fast(planar, target)
    # projection collapsed some points: count on the raw list
    rows = homogeneous_rows(proj)
    prow = homogeneous_rows([target])[0]
    return _count_planar_rows(rows, prow)


# ---------------------------------------------------------------------------
# antisymmetric census


def wendel_antisymmetric_count(points: Sequence[Sequence]) -> int:
    """Number of sign patterns e for which conv(e_i x_i) strictly contains 0.

    Input is d+1 points in dimension d; the 2(d+1) points x_i, -x_i must be
    pairwise distinct.  A pattern whose simplex carries the origin on its
    boundary makes the count ill-defined and raises.
    """
    pts = [point(*q) for q in points]
    d = len(pts[0])
    if len(pts) != d + 1:
        raise InputError(f"need d+1 = {d + 1} points, got {len(pts)}")
    if any(len(q) != d for q in pts):
        raise InputError("mixed dimensions")
    doubled = set()
    for q in pts:
        if all(c == 0 for c in q):
            raise DegenerateInputError("a point equals the origin")
        neg = tuple(-c for c in q)
        if q in doubled or neg in doubled:
            raise InputError("points and their negations must be pairwise distinct")
        doubled.add(q)
        doubled.add(neg)
    origin = point(*([0] * d))
    count = 0
    for mask in range(1 << (d + 1)):
        signed = [
            tuple(-c for c in q) if (mask >> i) & 1 else q for i, q in enumerate(pts)
        ]
        loc = simplex_location(signed, origin)
        if loc == 0:
            raise DegenerateInputError(
                "origin lies on a simplex boundary; perturb the input"
            )
        if loc == 1:
            count += 1
    return count


# ---------------------------------------------------------------------------
# maximum-stabbing search


@dataclass(frozen=True)
class MaxStabResult:
    point: ExactPoint
    count: StabCount
    exact: bool


def _heuristic_max_stab(
    ps: PointSet, seed: int, restarts: int, eval_budget: int
) -> MaxStabResult:
    rng = random.Random(seed)
    n = len(ps)
    d = ps.dim
    lo = [min(q[j] for q in ps.points) for j in range(d)]
    hi = [max(q[j] for q in ps.points) for j in range(d)]
    extent = [h - l for l, h in zip(lo, hi)]
    floor_steps = [e / 10**6 for e in extent]
    evals = 0

    def census(q: ExactPoint) -> int:
        nonlocal evals
        evals += 1
        return count_containing(ps, q).strict

    best_pt: ExactPoint | None = None
    best_cnt = -1
    for _ in range(restarts):
        if evals >= eval_budget:
            break
        anchor_ids = rng.sample(range(n), min(d + 1, n))
        weights = [Fraction(rng.randint(1, 64)) for _ in anchor_ids]
        tot = sum(weights)
        cur = tuple(
            sum(weights[a] * ps.points[i][j] for a, i in enumerate(anchor_ids)) / tot
            for j in range(d)
        )
        cur_cnt = census(cur)
        steps = [e / 4 if e else Fraction(1) for e in extent]
        while evals < eval_budget:
            improved = False
            for j in range(d):
                for direction in (1, -1):
                    trial = tuple(
                        c + direction * steps[j] if jj == j else c
                        for jj, c in enumerate(cur)
                    )
                    t_cnt = census(trial)
                    if t_cnt > cur_cnt:
                        cur, cur_cnt = trial, t_cnt
                        improved = True
            if not improved:
                steps = [s / 2 for s in steps]
                if all(s < f for s, f in zip(steps, floor_steps) if f):
                    break
                if not any(floor_steps):
                    break
        if cur_cnt > best_cnt:
            best_cnt, best_pt = cur_cnt, cur
    assert best_pt is not None
    return MaxStabResult(best_pt, count_containing(ps, best_pt), False)


def max_stab_point(
    ps: PointSet,
    mode: str = "exact",
    *,
    seed: int = 0,
    restarts: int = 64,
    eval_budget: int = 20000,
    work_budget: float = 2e8,
) -> MaxStabResult:
    """Point maximizing the number of strictly containing (d+1)-subsets.

    exact mode (d = 2 only) walks one interior sample per bounded cell of
    the arrangement of all point-pair lines and is certified by an exact
    recount at the returned witness.  heuristic mode is a seeded multistart
    coordinate descent usable in any dimension; its result is a lower bound.
    """
    if mode == "exact":
        if ps.dim != 2:
            raise InputError("exact max-stab search supports dimension 2 only")
        from .arrangement import exact_max_stab_planar

        return exact_max_stab_planar(ps, work_budget)
    if mode == "heuristic":
        return _heuristic_max_stab(ps, seed, restarts, eval_budget)
    raise InputError(f"unknown mode {mode!r}")
