"""Exact rational points and sign predicates.

Every predicate here returns a mathematically exact answer: coordinates are
rationals, determinant signs come from fraction-free integer elimination, and
no floating-point filter is involved anywhere.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import gcd
from typing import Iterable, Sequence, Union

import gmpy2

from .errors import InputError

Coordinate = Union[int, str, float, Fraction]
ExactPoint = tuple[Fraction, ...]

# Above this entry size integer work is routed through gmpy2, which multiplies
# large operands far faster than CPython's built-in int.
_MPZ_BITS = 4096


def to_fraction(value: Coordinate) -> Fraction:
    """Coerce a coordinate-like value to an exact Fraction.

    Strings may be decimal ("1.25", "3e2") or ratio ("num/den") notation.
    Floats are converted through their shortest repr so that a literal typed
    as 0.1 means 1/10, not the binary approximation.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InputError("boolean is not a coordinate")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"cannot parse coordinate {value!r}") from exc
    raise InputError(f"cannot parse coordinate of type {type(value).__name__}")


def point(*coords: Coordinate) -> ExactPoint:
    """Build an exact point from coordinate-like values."""
    if not coords:
        raise InputError("a point needs at least one coordinate")
    return tuple(to_fraction(c) for c in coords)


@dataclass(frozen=True)
class PointSet:
    """A finite labelled set of pairwise distinct points of equal dimension."""

    dim: int
    points: tuple[ExactPoint, ...]
    label: str = ""

    def __post_init__(self) -> None:
        if self.dim < 1:
            raise InputError(f"dimension must be >= 1, got {self.dim}")
        pts = tuple(tuple(to_fraction(c) for c in p) for p in self.points)
        object.__setattr__(self, "points", pts)
        for p in pts:
            if len(p) != self.dim:
                raise InputError(
                    f"point {p} has dimension {len(p)}, set has dimension {self.dim}"
                )
        if len(set(pts)) != len(pts):
            raise InputError("points must be pairwise distinct")

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)


def _fraction_rows_to_int(rows: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    # Per-row clearing: scaling a row by a positive integer scales the
    # determinant by the same positive factor, so signs survive.
    out = []
    for row in rows:
        scale = 1
        for c in row:
            scale = scale * c.denominator // gcd(scale, c.denominator)
        out.append([int(c.numerator * (scale // c.denominator)) for c in row])
    return out


def _bareiss_det(rows: list[list[int]]) -> int:
    """Exact determinant of a square integer matrix, fraction-free elimination."""
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise InputError("determinant needs a square matrix")
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    big = max((abs(e).bit_length() for r in rows for e in r), default=0) > _MPZ_BITS
    if big:
        m = [[gmpy2.mpz(e) for e in r] for r in rows]
    else:
        m = [list(r) for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                # exact division: Bareiss guarantees divisibility by prev
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return int(sign * m[n - 1][n - 1])


def _sign(x: int) -> int:
    return (x > 0) - (x < 0)


def orientation(points: Sequence[Sequence[Fraction]]) -> int:
    """Sign of the lifted determinant det[(1, p_0); ...; (1, p_d)].

    Returns +1, 0 or -1.  Requires exactly d+1 points of dimension d.
    """
    if not points:
        raise InputError("orientation needs points")
    d = len(points[0])
    if len(points) != d + 1:
        raise InputError(f"orientation in dimension {d} needs {d + 1} points, got {len(points)}")
    for p in points:
        if len(p) != d:
            raise InputError("orientation: mixed point dimensions")
    rows = _fraction_rows_to_int([(Fraction(1), *map(to_fraction, p)) for p in points])
    return _sign(_bareiss_det(rows))


def _affinely_independent(points: Sequence[ExactPoint]) -> bool:
    # rank test: k points are affinely independent iff the (k-1) difference
    # vectors are linearly independent; do Gaussian elimination over Q
    if len(points) == 1:
        return True
    base = points[0]
    vecs = [[p[j] - base[j] for j in range(len(base))] for p in points[1:]]
    rank = 0
    cols = len(base)
    for col in range(cols):
        pivot = next((i for i in range(rank, len(vecs)) if vecs[i][col] != 0), None)
        if pivot is None:
            continue
        vecs[rank], vecs[pivot] = vecs[pivot], vecs[rank]
        pv = vecs[rank][col]
        for i in range(rank + 1, len(vecs)):
            f = vecs[i][col] / pv
            if f:
                vecs[i] = [a - f * b for a, b in zip(vecs[i], vecs[rank])]
        rank += 1
        if rank == len(vecs):
            break
    return rank == len(vecs)


def barycentric_coordinates(
    simplex: Sequence[ExactPoint], p: ExactPoint
) -> list[Fraction] | None:
    """Exact barycentric coordinates of p in an affinely independent simplex.

    Returns None when the system is inconsistent (p outside the affine hull)
    or the input points are affinely dependent.
    """
    k = len(simplex)
    d = len(p)
    # rows: one per ambient coordinate plus the affine constraint sum(l) = 1
    aug = [[to_fraction(simplex[i][j]) for i in range(k)] + [to_fraction(p[j])] for j in range(d)]
    aug.append([Fraction(1)] * k + [Fraction(1)])
    rows = len(aug)
    pivots = []
    r = 0
    for col in range(k):
        pivot = next((i for i in range(r, rows) if aug[i][col] != 0), None)
        if pivot is None:
            return None  # dependent columns: affinely dependent input
        aug[r], aug[pivot] = aug[pivot], aug[r]
        pv = aug[r][col]
        aug[r] = [a / pv for a in aug[r]]
        for i in range(rows):
            if i != r and aug[i][col]:
                f = aug[i][col]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        pivots.append(col)
        r += 1
    for i in range(r, rows):
        if aug[i][k] != 0:
            return None  # inconsistent: p not in the affine hull
    return [aug[i][k] for i in range(k)]


def _in_convex_hull(points: Sequence[ExactPoint], p: ExactPoint) -> bool:
    # Caratheodory: p is in conv(points) iff it is in the hull of some
    # affinely independent subset.  Only used for degenerate (flat) simplices,
    # so the 2^(d+1) subset walk stays tiny.
    for k in range(1, len(points) + 1):
        for sub in combinations(points, k):
            if not _affinely_independent(sub):
                continue
            lam = barycentric_coordinates(sub, p)
            if lam is not None and all(l >= 0 for l in lam):
                return True
    return False


def simplex_location(simplex: Sequence[Sequence[Fraction]], p: Sequence[Fraction]) -> int:
    """Locate p relative to the closed simplex: +1 interior, 0 boundary, -1 outside.

    The simplex is given by d+1 points in dimension d.  A degenerate (flat)
    simplex has empty interior; membership in its closed hull reports 0.
    """
    pts = [point(*q) for q in simplex]
    pp = point(*p)
    d = len(pp)
    if len(pts) != d + 1 or any(len(q) != d for q in pts):
        raise InputError("simplex_location needs d+1 points of dimension d")
    s0 = orientation(pts)
    if s0 == 0:
        return 0 if _in_convex_hull(pts, pp) else -1
    on_boundary = False
    for k in range(d + 1):
        repl = list(pts)
        repl[k] = pp
        sk = orientation(repl)
        if sk == -s0:
            return -1
        if sk == 0:
            on_boundary = True
    return 0 if on_boundary else 1


def simplex_contains(
    simplex: Sequence[Sequence[Fraction]], p: Sequence[Fraction], *, closed: bool = True
) -> bool:
    """Exact containment of p in the simplex; closed hulls include the boundary."""
    loc = simplex_location(simplex, p)
    return loc >= 0 if closed else loc == 1


def point_type(a: Sequence[Fraction], r: Sequence[Fraction]) -> int:
    """Largest k with a_j > r_j for all j <= k (0 when a_1 <= r_1)."""
    if len(a) != len(r):
        raise InputError("point_type: dimension mismatch")
    k = 0
    for aj, rj in zip(a, r):
        if to_fraction(aj) > to_fraction(rj):
            k += 1
        else:
            break
    return k


def general_position_check(ps: PointSet) -> bool:
    """True when no d+1 points of the set are affinely dependent."""
    if len(ps) < ps.dim + 1:
        return True
    rows = homogeneous_rows(ps)
    for sub in combinations(range(len(ps)), ps.dim + 1):
        if _bareiss_det([list(rows[i]) for i in sub]) == 0:
            return False
    return True


def homogeneous_rows(ps: PointSet | Iterable[ExactPoint]) -> list[tuple[int, ...]]:
    """Integer rows (w, w*x_1, ..., w*x_d) with w > 0, one per point.

    Any determinant of such rows has the same sign as the corresponding
    lifted rational determinant, which makes them the working currency of
    the counting routines.
    """
    pts = ps.points if isinstance(ps, PointSet) else tuple(ps)
    out = []
    for p in pts:
        scale = 1
        for c in p:
            scale = scale * c.denominator // gcd(scale, c.denominator)
        out.append((scale, *(int(c.numerator * (scale // c.denominator)) for c in p)))
    return out


# ---------------------------------------------------------------------------
# JSON interchange:  {"dim": d, "label": str, "points": [[c, ...], ...]}
# with coordinates encoded as exact integers or "num/den" strings.


def _encode_coord(c: Fraction):
    if c.denominator == 1:
        return int(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def point_set_to_json(ps: PointSet) -> dict:
    return {
        "dim": ps.dim,
        "label": ps.label,
        "points": [[_encode_coord(c) for c in p] for p in ps.points],
    }


def point_set_from_json(doc: dict) -> PointSet:
    try:
        dim = doc["dim"]
        raw_points = doc["points"]
    except (TypeError, KeyError) as exc:
        raise InputError("point-set document needs 'dim' and 'points'") from exc
    if not isinstance(dim, int):
        raise InputError("'dim' must be an integer")
    label = doc.get("label", "")
    pts = tuple(tuple(to_fraction(c) for c in p) for p in raw_points)
    return PointSet(dim=dim, points=pts, label=label)


def dump_point_set(ps: PointSet, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(point_set_to_json(ps), fh)
        fh.write("\n")


def load_point_set(path: str) -> PointSet:
    with open(path, "r", encoding="utf-8") as fh:
        # parse_float keeps decimal literals exact instead of routing them
        # through binary floating point
        doc = json.load(fh, parse_float=Fraction)
    return point_set_from_json(doc)
