"""Exact Tukey depth, centerpoints, and depth of codimension-2 flats.

Depth of p is the minimum, over closed halfspaces containing p, of the
number of set points inside.  The minimum is always achieved with p on the
boundary, and the bounding hyperplane can be rotated onto candidate
positions spanned by set points; candidates are materialized as exact
rational directions by nudging a degenerate direction just far enough that
no other sign flips.  Every emitted witness is recounted exactly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from itertools import combinations
from math import comb
from typing import Sequence

from .counting import Flat2Codim, project_to_flat_frame
from .errors import InputError, ResourceLimitError, SolverError
from .exact import ExactPoint, PointSet, point, to_fraction

Vec = tuple[Fraction, ...]


@dataclass(frozen=True)
class DepthResult:
    """Depth value plus a direction whose closed halfspace attains it."""

    depth: int
    witness: ExactPoint

    def to_json(self) -> dict:
        return {
            "depth": self.depth,
            "witness": [str(c) for c in self.witness],
        }


def _primitive(vec: Sequence[Fraction]) -> tuple[int, ...]:
    den = 1
    for c in vec:
        den = den * c.denominator // _gcd(den, c.denominator)
    ints = [int(c * den) for c in vec]
    g = 0
    for v in ints:
        g = _gcd(g, abs(v))
    if g == 0:
        return tuple(ints)
    return tuple(v // g for v in ints)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def _dot(a: Sequence, b: Sequence):
    return sum(x * y for x, y in zip(a, b))


def _classes(points: Sequence[Sequence[Fraction]], q: Sequence[Fraction]):
    """Primitive direction classes of nonzero differences, with multiplicity."""
    mult_q = 0
    cls: dict[tuple[int, ...], int] = {}
    for s in points:
        diff = tuple(sc - qc for sc, qc in zip(s, q))
        if all(c == 0 for c in diff):
            mult_q += 1
            continue
        key = _primitive(diff)
        cls[key] = cls.get(key, 0) + 1
    return cls, mult_q


def _safe_step(dirs, base, wiggle) -> Fraction:
    # largest nudge that flips no strictly nonzero sign, halved
    best: Fraction | None = None
    for u in dirs:
        bd = _dot(base, u)
        if bd == 0:
            continue
        cand = Fraction(abs(bd), 1) / (abs(_dot(wiggle, u)) + 1)
        if best is None or cand < best:
            best = cand
    return Fraction(1) if best is None else best / 2


def _count_dir(v, dirs, weights, mult_q) -> int:
    total = mult_q
    for u, w in zip(dirs, weights):
        if _dot(v, u) >= 0:
            total += w
    return total


# ---------------------------------------------------------------------------
# planar core: minimum closed halfplane via the largest open semicircle


def _half2(u) -> int:
    return 0 if (u[1] > 0 or (u[1] == 0 and u[0] > 0)) else 1


def _angle_cmp(a, b) -> int:
    ha, hb = _half2(a), _half2(b)
    if ha != hb:
        return -1 if ha < hb else 1
    cr = a[0] * b[1] - a[1] * b[0]
    if cr > 0:
        return -1
    if cr < 0:
        return 1
    return 0


def _depth_2d(cls: dict, mult_q: int):
    if not cls:
        return mult_q, (Fraction(1), Fraction(0))
    dirs = sorted(cls, key=cmp_to_key(_angle_cmp))
    w = [cls[u] for u in dirs]
    k = len(dirs)
    nprime = sum(w)
    idx = {u: i for i, u in enumerate(dirs)}
    # ccw[j]: weight strictly inside the open half-turn after dirs[j]
    ccw = [0] * k
    for j in range(k):
        uj = dirs[j]
        acc = 0
        for t in range(k):
            if t == j:
                continue
            ut = dirs[t]
            if uj[0] * ut[1] - uj[1] * ut[0] > 0:
                acc += w[t]
        ccw[j] = acc
    best_count = -1
    best_js: list[int] = []
    for j in range(k):
        anti = idx.get((-dirs[j][0], -dirs[j][1]))
        a_w = w[anti] if anti is not None else 0
        count_j = nprime - a_w - ccw[j]
        if count_j > best_count:
            best_count = count_j
            best_js = [j]
        elif count_j == best_count:
            best_js.append(j)
    depth_val = mult_q + nprime - best_count
    # materialize a witness per maximizer and keep the lexicographic least
    best_wit = None
    for j in best_js:
        uj = dirs[j]
        v0 = (Fraction(-uj[1]), Fraction(uj[0]))
        wig = (Fraction(-uj[0]), Fraction(-uj[1]))
        delta = _safe_step(dirs, v0, wig)
        v = (v0[0] + delta * wig[0], v0[1] + delta * wig[1])
        cnt = _count_dir(v, dirs, w, mult_q)
        assert cnt == depth_val, "semicircle count disagrees with witness recount"
        prim = _primitive(v)
        if best_wit is None or prim < best_wit:
            best_wit = prim
    return depth_val, tuple(Fraction(c) for c in best_wit)


# ---------------------------------------------------------------------------
# dimension three: arrangement vertices on the direction sphere


def _cross3(a, b):
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def _depth_3d(cls: dict, mult_q: int):
    if not cls:
        return mult_q, (Fraction(1), Fraction(0), Fraction(0))
    dirs = list(cls)
    w = [cls[u] for u in dirs]
    k = len(dirs)
    # rank of the difference directions
    pair = None
    for i in range(k):
        for j in range(i + 1, k):
            if any(_cross3(dirs[i], dirs[j])):
                pair = (i, j)
                break
        if pair:
            break
    if pair is None:
        # all differences parallel: one-dimensional spread
        u = dirs[0]
        plus = sum(wt for d, wt in zip(dirs, w) if d == u)
        minus = sum(w) - plus
        options = [
            (mult_q + plus, tuple(Fraction(c) for c in u)),
            (mult_q + minus, tuple(Fraction(-c) for c in u)),
        ]
        return min(options)
    b1, b2 = dirs[pair[0]], dirs[pair[1]]
    rank3 = any(
        _dot(_cross3(b1, b2), d) != 0 for d in dirs
    )
    if not rank3:
        # coplanar spread: reduce to the plane spanned by b1, b2
        flat_cls: dict[tuple[int, ...], int] = {}
        for d, wt in zip(dirs, w):
            key = _primitive((Fraction(_dot(b1, d)), Fraction(_dot(b2, d))))
            flat_cls[key] = flat_cls.get(key, 0) + wt
        dv, (x, y) = _depth_2d(flat_cls, mult_q)
        wit = tuple(x * Fraction(c1) + y * Fraction(c2) for c1, c2 in zip(b1, b2))
        return dv, wit

    best = None

    def consider(v):
        nonlocal best
        prim = _primitive(tuple(Fraction(c) for c in v))
        cnt = _count_dir(prim, dirs, w, mult_q)
        cand = (cnt, prim)
        if best is None or cand < best:
            best = cand

    for i in range(k):
        for j in range(i + 1, k):
            c = _cross3(dirs[i], dirs[j])
            if not any(c):
                continue
            ai = tuple(Fraction(t) for t in dirs[i])
            for v0s in (c, tuple(-t for t in c)):
                v0 = tuple(Fraction(t) for t in v0s)
                consider(v0)
                w2 = _cross3(ai, v0)
                for s2 in (1, -1):
                    wig2 = tuple(s2 * t for t in w2)
                    d2 = _safe_step(dirs, v0, wig2)
                    v1 = tuple(a + d2 * b for a, b in zip(v0, wig2))
                    for s1 in (1, -1):
                        wig1 = tuple(s1 * t for t in ai)
                        d1 = _safe_step(dirs, v1, wig1)
                        v2 = tuple(a + d1 * b for a, b in zip(v1, wig1))
                        consider(v2)
    cnt, prim = best
    return cnt, tuple(Fraction(c) for c in prim)


# ---------------------------------------------------------------------------
# general dimension by rank reduction and candidate hyperplanes


def _nullspace_basis(rows: list[Vec], dim: int) -> list[Vec]:
    """Exact basis of the orthogonal complement of the row span."""
    mat = [[Fraction(c) for c in r] for r in rows]
    piv_cols: list[int] = []
    r = 0
    for col in range(dim):
        piv = None
        for rr in range(r, len(mat)):
            if mat[rr][col] != 0:
                piv = rr
                break
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        lead = mat[r][col]
        mat[r] = [c / lead for c in mat[r]]
        for rr in range(len(mat)):
            if rr != r and mat[rr][col] != 0:
                f = mat[rr][col]
                mat[rr] = [a - f * b for a, b in zip(mat[rr], mat[r])]
        piv_cols.append(col)
        r += 1
        if r == len(mat):
            break
    out: list[Vec] = []
    for fc in (c for c in range(dim) if c not in piv_cols):
        vec = [Fraction(0)] * dim
        vec[fc] = Fraction(1)
        for rr, pc in enumerate(piv_cols):
            vec[pc] = -mat[rr][fc]
        out.append(tuple(vec))
    return out


def _nullspace_vector(rows: list[Vec], dim: int) -> Vec | None:
    basis = _nullspace_basis(rows, dim)
    return basis[0] if basis else None


def _independent_subset(dirs: list, dim: int) -> list[int]:
    chosen: list[int] = []
    rows: list[Vec] = []
    for i, d in enumerate(dirs):
        cand = rows + [tuple(Fraction(c) for c in d)]
        if _rank(cand, dim) > len(rows):
            rows = cand
            chosen.append(i)
            if len(chosen) == dim:
                break
    return chosen


def _rank(rows: list[Vec], dim: int) -> int:
    mat = [list(r) for r in rows]
    rank = 0
    for col in range(dim):
        piv = None
        for rr in range(rank, len(mat)):
            if mat[rr][col] != 0:
                piv = rr
                break
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        lead = mat[rank][col]
        for rr in range(rank + 1, len(mat)):
            if mat[rr][col] != 0:
                f = mat[rr][col] / lead
                mat[rr] = [a - f * b for a, b in zip(mat[rr], mat[rank])]
        rank += 1
    return rank


def _depth_general(cls: dict, mult_q: int, dim: int):
    """Dimension >= 4: candidate normals from d-1 spanning classes.

    Exact in general position; with many coincident spanning hyperplanes a
    non-simple corner could in principle be missed, so highly degenerate
    high-dimensional inputs may see an overestimate.
    """
    if not cls:
        wit = (Fraction(1),) + (Fraction(0),) * (dim - 1)
        return mult_q, wit
    dirs = list(cls)
    w = [cls[u] for u in dirs]
    frac_dirs = [tuple(Fraction(c) for c in d) for d in dirs]
    rk = _rank(frac_dirs, dim)
    if rk < dim:
        basis_idx = _independent_subset(dirs, dim)[:rk]
        basis = [frac_dirs[i] for i in basis_idx]
        sub_cls: dict[tuple[int, ...], int] = {}
        for d, wt in zip(frac_dirs, w):
            key = _primitive(tuple(_dot(b, d) for b in basis))
            sub_cls[key] = sub_cls.get(key, 0) + wt
        dv, coeffs = _depth_reduced(sub_cls, mult_q, rk)
        wit = tuple(
            sum(cf * b[t] for cf, b in zip(coeffs, basis)) for t in range(dim)
        )
        return dv, wit

    best = None

    def consider(v):
        nonlocal best
        prim = _primitive(v)
        cnt = _count_dir(prim, dirs, w, mult_q)
        cand = (cnt, prim)
        if best is None or cand < best:
            best = cand

    for sub in combinations(range(len(dirs)), dim - 1):
        rows = [frac_dirs[i] for i in sub]
        if _rank(rows, dim) < dim - 1:
            continue
        v0 = _nullspace_vector(rows, dim)
        if v0 is None:
            continue
        for vbase in (v0, tuple(-c for c in v0)):
            consider(vbase)
            # peel off the constraints one at a time in every sign pattern
            stack = [(vbase, list(rows))]
            while stack:
                v, active = stack.pop()
                if not active:
                    consider(v)
                    continue
                b = active[-1]
                rest = active[:-1]
                # leave b's hyperplane while staying exactly on the others:
                # wiggle orthogonal to rest and to v, not orthogonal to b
                wig = None
                for nv in _nullspace_basis(rest + [v], dim):
                    if _dot(nv, b) != 0:
                        wig = nv
                        break
                if wig is None:
                    # b unreachable from this vertex; another subset covers it
                    continue
                for sgn in (1, -1):
                    ww = tuple(sgn * c for c in wig)
                    dd = _safe_step(dirs, v, ww)
                    stack.append(
                        (tuple(a + dd * c for a, c in zip(v, ww)), rest)
                    )
    cnt, prim = best
    return cnt, tuple(Fraction(c) for c in prim)


def _depth_reduced(cls: dict, mult_q: int, dim: int):
    if dim == 1:
        plus = sum(wt for d, wt in cls.items() if d[0] > 0)
        minus = sum(wt for d, wt in cls.items() if d[0] < 0)
        options = [
            (mult_q + plus, (Fraction(1),)),
            (mult_q + minus, (Fraction(-1),)),
        ]
        return min(options)
    if dim == 2:
        return _depth_2d(cls, mult_q)
    if dim == 3:
        return _depth_3d(cls, mult_q)
    return _depth_general(cls, mult_q, dim)


def _depth_points(points: Sequence[Sequence[Fraction]], q: Sequence[Fraction], dim: int):
    cls, mult_q = _classes(points, q)
    return _depth_reduced(cls, mult_q, dim)


def depth(ps: PointSet, p: Sequence) -> DepthResult:
    """Exact Tukey depth of p with respect to the set."""
    q = point(*p)
    if len(q) != ps.dim:
        raise InputError("query dimension mismatch")
    dv, wit = _depth_points(ps.points, q, ps.dim)
    wit = tuple(Fraction(c) for c in _primitive(wit))
    # recount on emission: the closed halfspace must hold exactly dv points
    recount = sum(
        1 for s in ps.points if _dot(wit, s) >= _dot(wit, q)
    )
    assert recount == dv, "witness recount disagrees with computed depth"
    return DepthResult(dv, wit)


# ---------------------------------------------------------------------------
# centerpoints


def _radon_point(pts: list[ExactPoint]) -> ExactPoint:
    d = len(pts[0])
    # affine dependence: sum l_i = 0, sum l_i x_i = 0, l nonzero
    rows = [[Fraction(1) for _ in pts]] + [
        [p[t] for p in pts] for t in range(d)
    ]
    lam = _nullspace_vector([tuple(r) for r in rows], len(pts))
    if lam is None:
        raise SolverError("radon system unexpectedly full rank")
    pos = [i for i, l in enumerate(lam) if l > 0]
    tot = sum(lam[i] for i in pos)
    if tot == 0:
        lam = tuple(-l for l in lam)
        pos = [i for i, l in enumerate(lam) if l > 0]
        tot = sum(lam[i] for i in pos)
    return tuple(
        sum(lam[i] * pts[i][t] for i in pos) / tot for t in range(d)
    )


def _lines_2d(ps: PointSet) -> list[tuple]:
    lines = set()
    pts = ps.points
    for i, j in combinations(range(len(pts)), 2):
        dx = pts[j][0] - pts[i][0]
        dy = pts[j][1] - pts[i][1]
        a, b = dy, -dx
        c = a * pts[i][0] + b * pts[i][1]
        prim = _primitive((Fraction(a), Fraction(b), Fraction(c)))
        if prim[0] < 0 or (prim[0] == 0 and prim[1] < 0):
            prim = tuple(-t for t in prim)
        lines.add(prim)
    return sorted(lines)


def _planes_3d(ps: PointSet) -> list[tuple]:
    planes = set()
    pts = ps.points
    for i, j, k in combinations(range(len(pts)), 3):
        u = tuple(pts[j][t] - pts[i][t] for t in range(3))
        v = tuple(pts[k][t] - pts[i][t] for t in range(3))
        nrm = _cross3(u, v)
        if not any(nrm):
            continue
        c = _dot(nrm, pts[i])
        prim = _primitive(tuple(Fraction(t) for t in nrm) + (Fraction(c),))
        lead = next(t for t in prim if t != 0)
        if lead < 0:
            prim = tuple(-t for t in prim)
        planes.add(prim)
    return sorted(planes)


def _solve2(l1, l2):
    a1, b1, c1 = l1
    a2, b2, c2 = l2
    det = a1 * b2 - a2 * b1
    if det == 0:
        return None
    x = Fraction(c1 * b2 - c2 * b1, det)
    y = Fraction(a1 * c2 - a2 * c1, det)
    return (x, y)


def _solve3(p1, p2, p3):
    rows = [p1, p2, p3]
    mat = [[Fraction(r[0]), Fraction(r[1]), Fraction(r[2])] for r in rows]
    rhs = [Fraction(r[3]) for r in rows]
    for col in range(3):
        piv = None
        for rr in range(col, 3):
            if mat[rr][col] != 0:
                piv = rr
                break
        if piv is None:
            return None
        mat[col], mat[piv] = mat[piv], mat[col]
        rhs[col], rhs[piv] = rhs[piv], rhs[col]
        lead = mat[col][col]
        mat[col] = [c / lead for c in mat[col]]
        rhs[col] = rhs[col] / lead
        for rr in range(3):
            if rr != col and mat[rr][col] != 0:
                f = mat[rr][col]
                mat[rr] = [a - f * b for a, b in zip(mat[rr], mat[col])]
                rhs[rr] = rhs[rr] - f * rhs[col]
    return tuple(rhs)


def find_centerpoint(
    ps: PointSet,
    *,
    mode: str = "auto",
    seed: int = 0,
    work_budget: float = 5e7,
) -> tuple[ExactPoint, DepthResult]:
    """A point of depth at least ceil(n / (d+1)).

    Exact mode enumerates arrangement vertices of hyperplanes spanned by
    set points (guaranteed to contain a deepest point) and is available for
    d <= 3 within the work budget; otherwise an iterated Radon-point
    heuristic returns its best verified point without the guarantee.
    """
    n, d = len(ps), ps.dim
    if n == 0:
        raise InputError("empty set has no centerpoint")
    target = -((-n) // (d + 1))
    if mode not in ("auto", "exact", "heuristic"):
        raise InputError(f"unknown mode {mode!r}")

    est = None
    if d == 1:
        order = sorted(ps.points)
        cand = order[(n - 1) // 2]
        res = depth(ps, cand)
        if res.depth < target:
            raise SolverError("median fails the depth bound; implementation falsified")
        return cand, res
    if d == 2:
        nlines = n * (n - 1) // 2
        est = (comb(nlines, 2) + n) * 40 * n
    elif d == 3:
        nplanes = comb(n, 3)
        est = (comb(nplanes, 3) + n) * 60 * n * n
    exact_ok = d <= 3 and est is not None and est <= work_budget
    if mode == "exact" and not exact_ok:
        raise ResourceLimitError(
            f"exact centerpoint enumeration needs ~{est:.2e} ops over budget {work_budget:.2e}"
        )
    if mode in ("exact",) or (mode == "auto" and exact_ok):
        cands: set[ExactPoint] = set(ps.points)
        if d == 2:
            lines = _lines_2d(ps)
            for l1, l2 in combinations(lines, 2):
                s = _solve2(l1, l2)
                if s is not None:
                    cands.add(s)
        else:
            planes = _planes_3d(ps)
            for t1, t2, t3 in combinations(planes, 3):
                s = _solve3(t1, t2, t3)
                if s is not None:
                    cands.add(s)
        best: tuple[int, ExactPoint] | None = None
        for c in sorted(cands):
            r = _depth_points(ps.points, c, d)[0]
            if best is None or r > best[0] or (r == best[0] and c < best[1]):
                best = (r, c)
        bp = best[1]
        res = depth(ps, bp)
        if res.depth < target:
            raise SolverError(
                f"exact search max depth {res.depth} below ceil(n/(d+1)) = {target}; "
                "implementation falsified"
            )
        return bp, res

    # heuristic: iterated Radon points, then verify
    rng = random.Random(seed)
    pool = list(ps.points)
    last = pool[0]
    while len(pool) > d + 2:
        idx = sorted(rng.sample(range(len(pool)), d + 2), reverse=True)
        chosen = [pool[i] for i in idx]
        for i in idx:
            pool.pop(i)
        last = tuple(
            c.limit_denominator(1 << 64) for c in _radon_point(chosen)
        )
        pool.append(last)
    centroid = tuple(
        sum(p[t] for p in ps.points) / n for t in range(d)
    )
    med = tuple(
        sorted(p[t] for p in ps.points)[(n - 1) // 2] for t in range(d)
    )
    best_pt, best_res = None, None
    for c in (last, centroid, med):
        r = depth(ps, c)
        if best_res is None or r.depth > best_res.depth:
            best_pt, best_res = c, r
    return best_pt, best_res


# ---------------------------------------------------------------------------
# depth of codimension-2 flats


def flat_depth(ps: PointSet, flat: Flat2Codim) -> DepthResult:
    """Minimum point count over closed halfspaces containing the flat.

    A halfspace containing the flat corresponds to a halfplane containing
    the flat's image under x -> (<v,x>, <w,x>), so this is the planar depth
    of (s, t) in the projected multiset.
    """
    proj = project_to_flat_frame(ps, flat)
    dv, wit2 = _depth_points(proj, (flat.s, flat.t), 2)
    # lift the witness back to ambient space for reporting
    lift = tuple(
        wit2[0] * a + wit2[1] * b for a, b in zip(flat.v, flat.w)
    )
    prim = tuple(Fraction(c) for c in _primitive(lift))
    return DepthResult(dv, prim)


__all__ = [
    "DepthResult",
    "depth",
    "find_centerpoint",
    "flat_depth",
]
