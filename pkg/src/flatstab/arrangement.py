"""Exact maximum-stabbing search over the pair-line arrangement (d = 2).

The strict count is constant on each open cell of the arrangement of all
point-pair lines, zero on unbounded cells, and every bounded cell is seen
from the lexicographically smallest vertex of its closure in a sector whose
two bounding rays both point lex-upward.  Walking one infinitesimal sample
per such sector therefore visits every candidate cell.

Coordinates may be thousands of bits wide, so angular predicates run on
scaled floats (mantissa, exponent) with a certified error margin and fall
back to exact integer arithmetic only when a comparison is too close to
call.  Directions that are exactly tied (points collinear with the vertex)
are resolved structurally from line membership, never numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from itertools import combinations
from math import comb, gcd

from .errors import InputError, ResourceLimitError

# ---------------------------------------------------------------------------
# scaled floats: value ~= m * 2**e with |m| in [1, 2), (0.0, 0) for zero.
# Sign of a nonzero xfloat is always exact; only close comparisons need
# margins.  Cancelling subtractions return None so the caller can recompute
# the component exactly.

_CANCEL_GUARD = 1e-4
_CROSS_MARGIN = 1e-8


def _xf(v: int) -> tuple[float, int]:
    if v == 0:
        return (0.0, 0)
    a = -v if v < 0 else v
    bl = a.bit_length()
    if bl <= 53:
        fr, k = math.frexp(float(a))
        m, e = fr * 2.0, k - 1
    else:
        m = float(a >> (bl - 53)) / float(1 << 52)
        e = bl - 1
    return (-m, e) if v < 0 else (m, e)


def _xf_mul(a: tuple[float, int], b: tuple[float, int]) -> tuple[float, int]:
    if a[0] == 0.0 or b[0] == 0.0:
        return (0.0, 0)
    m = a[0] * b[0]
    e = a[1] + b[1]
    if m >= 2.0 or m <= -2.0:
        return (m * 0.5, e + 1)
    return (m, e)


def _xf_sub(a: tuple[float, int], b: tuple[float, int]):
    # a - b; None means possible catastrophic cancellation
    if b[0] == 0.0:
        return a
    if a[0] == 0.0:
        return (-b[0], b[1])
    d = a[1] - b[1]
    if d > 80:
        return a
    if d < -80:
        return (-b[0], b[1])
    fa = math.ldexp(a[0], d)
    f = fa - b[0]
    mag = max(abs(fa), abs(b[0]))
    if abs(f) <= mag * _CANCEL_GUARD:
        return None
    fr, k = math.frexp(f)
    return (fr * 2.0, b[1] + k - 1)


def _sgn(x) -> int:
    return (x > 0) - (x < 0)


def _xf_cross_sign(ax, ay, bx, by):
    """Sign of ax*by - ay*bx; 0 only when exactly zero; None when too close."""
    t1 = _xf_mul(ax, by)
    t2 = _xf_mul(ay, bx)
    if t1[0] == 0.0 and t2[0] == 0.0:
        return 0
    if t1[0] == 0.0:
        return -_sgn(t2[0])
    if t2[0] == 0.0:
        return _sgn(t1[0])
    s1 = _sgn(t1[0])
    if s1 != _sgn(t2[0]):
        return s1
    d = t1[1] - t2[1]
    if d >= 2:
        return s1
    if d <= -2:
        return -s1
    f = math.ldexp(t1[0], d) - t2[0]
    if abs(f) <= max(abs(t1[0]), abs(t2[0])) * _CROSS_MARGIN:
        return None
    return _sgn(f)


def _xf_angle(x: tuple[float, int], y: tuple[float, int]) -> float:
    if x[0] == 0.0 and y[0] == 0.0:
        return 0.0
    scale = max(x[1], y[1])
    fx = math.ldexp(x[0], max(x[1] - scale, -1060)) if x[0] else 0.0
    fy = math.ldexp(y[0], max(y[1] - scale, -1060)) if y[0] else 0.0
    return math.atan2(fy, fx)


def _cross3(a, b):
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


# ---------------------------------------------------------------------------
# reference cell evaluator: fully exact, first-order lexicographic signs.
# Quadratic-ish in big-int work; kept as the oracle the fast evaluator is
# tested against and usable for very small inputs.


def _symbolic_cell_count_reference(rows, vertex, bisector) -> int:
    vx, vy, vw = vertex
    bx, by = bisector
    n = len(rows)
    ds = []
    for w, x, y in rows:
        dx = x * vw - vx * w
        dy = y * vw - vy * w
        if dx == 0 and dy == 0:
            ds.append((-bx, -by, 0, 0))
        else:
            ds.append((dx, dy, dx * by - dy * bx, w * vw))

    def cross_sign(i: int, j: int) -> int:
        a = ds[i]
        b = ds[j]
        c0 = a[0] * b[1] - a[1] * b[0]
        if c0:
            return 1 if c0 > 0 else -1
        c1 = a[3] * b[2] - b[3] * a[2]
        if c1 > 0:
            return 1
        if c1 < 0:
            return -1
        raise AssertionError("tied directions inside an open cell")

    def upper(i: int) -> bool:
        a = ds[i]
        y_sig = a[1] if a[1] else -a[3] * by
        if y_sig:
            return y_sig > 0
        x_sig = a[0] if a[0] else -a[3] * bx
        return x_sig > 0

    def cmp(i: int, j: int) -> int:
        ui, uj = upper(i), upper(j)
        if ui != uj:
            return -1 if ui else 1
        return -cross_sign(i, j)

    order = sorted(range(n), key=cmp_to_key(cmp))
    pairs = 0
    k = 1
    for i in range(n):
        if k < i + 1:
            k = i + 1
        while k - i < n and cross_sign(order[i], order[k % n]) > 0:
            k += 1
        pairs += comb(k - i - 1, 2)
    return comb(n, 3) - pairs


# ---------------------------------------------------------------------------
# fast cell evaluator


@dataclass
class _Item:
    # one angular position: a ray of an incident line carrying its points,
    # a free point, or the vertex point itself (direction -bisector)
    kind: str  # "ray" | "free" | "vpt"
    lid: int  # line id for rays, -1 otherwise
    dxf: tuple[float, int]
    dyf: tuple[float, int]
    points: list[int]
    exact_dir: tuple[int, int] | None  # known exact direction when cheap
    upper: bool = False


class _CellEvaluator:
    """Strict count at vertex + t*bisector for infinitesimal t > 0."""

    def __init__(self, rows):
        self.rows = rows
        self.n = len(rows)
        self.wxf = [_xf(r[0]) for r in rows]
        self.xxf = [_xf(r[1]) for r in rows]
        self.yxf = [_xf(r[2]) for r in rows]

    def count(self, vertex, bisector, incident, vertex_pt) -> int:
        """incident: list of (lid, prim_dir, point ids on the line)."""
        n = self.n
        vx, vy, vw = vertex
        bx, by = bisector
        vxf, vyf, vwf = _xf(vx), _xf(vy), _xf(vw)

        exact_cache: dict[int, tuple[int, int]] = {}

        def exact_d(i: int) -> tuple[int, int]:
            got = exact_cache.get(i)
            if got is None:
                w, x, y = self.rows[i]
                got = (x * vw - vx * w, y * vw - vy * w)
                exact_cache[i] = got
            return got

        dxf: list[tuple[float, int]] = [None] * n  # type: ignore[list-item]
        dyf: list[tuple[float, int]] = [None] * n  # type: ignore[list-item]
        for i in range(n):
            if i == vertex_pt:
                continue
            sx = _xf_sub(_xf_mul(self.xxf[i], vwf), _xf_mul(vxf, self.wxf[i]))
            sy = _xf_sub(_xf_mul(self.yxf[i], vwf), _xf_mul(vyf, self.wxf[i]))
            if sx is None or sy is None:
                ex = exact_d(i)
                sx = _xf(ex[0])
                sy = _xf(ex[1])
            dxf[i] = sx
            dyf[i] = sy

        on_line: dict[int, int] = {}
        for lid, _prim, pts in incident:
            for p in pts:
                if p != vertex_pt:
                    on_line[p] = lid

        # assemble items
        items: list[_Item] = []
        for lid, prim, pts in incident:
            rx, ry = prim
            use_x = _cmp_abs_xf(_xf(rx), _xf(ry)) >= 0
            plus_pts: list[int] = []
            minus_pts: list[int] = []
            for p in pts:
                if p == vertex_pt:
                    continue
                dsig = _sgn(dxf[p][0]) if use_x else _sgn(dyf[p][0])
                rsig = _sgn(rx) if use_x else _sgn(ry)
                if dsig == 0:
                    # chosen component of a nonzero parallel vector: resolve exactly
                    ex = exact_d(p)
                    dsig = _sgn(ex[0] if use_x else ex[1])
                (plus_pts if dsig == rsig else minus_pts).append(p)
            if plus_pts:
                items.append(_Item("ray", lid, _xf(rx), _xf(ry), plus_pts, (rx, ry)))
            if minus_pts:
                items.append(
                    _Item("ray", lid, _xf(-rx), _xf(-ry), minus_pts, (-rx, -ry))
                )
        for i in range(n):
            if i == vertex_pt or i in on_line:
                continue
            items.append(_Item("free", -1, dxf[i], dyf[i], [i], None))
        if vertex_pt is not None:
            items.append(_Item("vpt", -1, _xf(-bx), _xf(-by), [vertex_pt], (-bx, -by)))

        if not items:
            return comb(n, 3)

        def item_exact_dir(it: _Item) -> tuple[int, int]:
            if it.exact_dir is not None:
                return it.exact_dir
            return exact_d(it.points[0])

        # perturbation-adjusted half assignment
        for it in items:
            ys = _sgn(it.dyf[0])
            if it.kind == "ray" or it.kind == "vpt":
                if ys != 0:
                    it.upper = ys > 0
                elif by != 0:
                    it.upper = (by < 0) if it.kind == "ray" else (-by > 0)
                else:
                    it.upper = _sgn(it.dxf[0]) > 0
            else:
                if ys != 0:
                    it.upper = ys > 0
                elif by != 0:
                    it.upper = by < 0
                else:
                    xs = _sgn(it.dxf[0])
                    if xs == 0:
                        ex = exact_d(it.points[0])
                        xs = _sgn(ex[0])
                    it.upper = xs > 0

        def rig_cross(a: _Item, b: _Item) -> int:
            s = _xf_cross_sign(a.dxf, a.dyf, b.dxf, b.dyf)
            if s is None or (
                s == 0 and (a.exact_dir is None or b.exact_dir is None)
            ):
                ea = item_exact_dir(a)
                eb = item_exact_dir(b)
                s = _sgn(ea[0] * eb[1] - ea[1] * eb[0])
            return s

        def before(a: _Item, b: _Item) -> int:
            # strict angular order within one half; -1 when a comes first
            if a.kind == "ray" and b.kind == "ray" and a.lid == b.lid:
                # both rays horizontal, pushed into the same half: the one
                # matching the perturbed rotation comes first
                want_pos_x = by < 0
                axs = _sgn(a.dxf[0])
                if want_pos_x:
                    return -1 if axs > 0 else 1
                return -1 if axs < 0 else 1
            c = rig_cross(a, b)
            if c == 0:
                raise AssertionError("unexpected angular tie between items")
            return -c

        key = []
        for idx, it in enumerate(items):
            ang = _xf_angle(it.dxf, it.dyf)
            if not it.upper and ang <= 0.0:
                ang += 2.0 * math.pi
            key.append((0 if it.upper else 1, ang, idx))
        key.sort(key=lambda t: (t[0], t[1]))
        order = [items[t[2]] for t in key]
        ok = True
        for a, b in zip(order, order[1:]):
            if a.upper == b.upper and before(a, b) > 0:
                ok = False
                break
        if not ok:
            def full_cmp(ia: _Item, ib: _Item) -> int:
                if ia.upper != ib.upper:
                    return -1 if ia.upper else 1
                return before(ia, ib)

            order = sorted(items, key=cmp_to_key(full_cmp))

        m = len(order)
        sizes = [len(it.points) for it in order]
        ext = [0] * (2 * m + 1)
        for t in range(2 * m):
            ext[t + 1] = ext[t] + sizes[t % m]

        # monotone circular two-pointer over the open half-turn windows
        ends = [0] * m
        antis = [-1] * m
        k = 1
        for a in range(m):
            if k < a + 1:
                k = a + 1
            anti = -1
            cur = order[a]
            while k - a < m:
                other = order[k % m]
                if (
                    cur.kind == "ray"
                    and other.kind == "ray"
                    and cur.lid == other.lid
                ):
                    anti = k % m
                    break
                c = rig_cross(cur, other)
                if c > 0:
                    k += 1
                    continue
                if c == 0:
                    anti = k % m
                break
            ends[a] = k
            antis[a] = anti

        # kappa per ray item: rotation direction of its points under the
        # bisector perturbation
        def kappa(it: _Item) -> int:
            dx, dy = it.exact_dir  # rays always carry an exact direction
            return _sgn(dx * by - dy * bx)

        total_pairs = 0
        for a in range(m):
            it = order[a]
            base = ext[ends[a]] - ext[a + 1]
            bonus = 0
            if antis[a] >= 0 and it.kind == "ray" and kappa(it) < 0:
                bonus = sizes[antis[a]]
            if len(it.points) == 1:
                total_pairs += comb(base + bonus, 2)
                continue
            ordered = self._order_along_ray(it, exact_d)
            if kappa(it) > 0:
                ordered.reverse()  # ascending rho = descending a/c
            sz = len(ordered)
            for q in range(sz):
                total_pairs += comb(base + (sz - 1 - q) + bonus, 2)
        return comb(n, 3) - total_pairs

    def _order_along_ray(self, it: _Item, exact_d) -> list[int]:
        # ascending a_i/c_i: a = w_i*vw (vw > 0 cancels), c = support along
        # the ray direction, proportional to distance from the vertex
        dx, dy = it.exact_dir
        use_x = _cmp_abs_xf(_xf(dx), _xf(dy)) >= 0
        dcomp = dx if use_x else dy
        dcf = _xf(dcomp)

        keyed = []
        for p in it.points:
            ex = exact_d(p)
            c = _xf(ex[0] if use_x else ex[1])
            keyed.append((p, self.wxf[p], c))

        def cmp(a, b) -> int:
            # sign of (w_a/c_a - w_b/c_b) with c = Dcomp/dcomp, dcomp sign fixed
            s = _xf_cross_sign(a[1], a[2], b[1], b[2])  # w_a*c_b - w_b*c_a
            if s is None or s == 0:
                ea = exact_d(a[0])
                eb = exact_d(b[0])
                lhs = self.rows[a[0]][0] * (eb[0] if use_x else eb[1])
                rhs = self.rows[b[0]][0] * (ea[0] if use_x else ea[1])
                s = _sgn(lhs - rhs)
                if s == 0:
                    raise AssertionError("coincident points on a ray")
            return s if dcomp > 0 else -s

        keyed.sort(key=cmp_to_key(cmp))
        return [p for p, _w, _c in keyed]


def _cmp_abs_xf(a: tuple[float, int], b: tuple[float, int]) -> int:
    if a[0] == 0.0:
        return -1 if b[0] != 0.0 else 0
    if b[0] == 0.0:
        return 1
    if a[1] != b[1]:
        return 1 if a[1] > b[1] else -1
    fa, fb = abs(a[0]), abs(b[0])
    return (fa > fb) - (fa < fb)


# ---------------------------------------------------------------------------
# arrangement walk

_HASH_P = (1 << 61) - 1


def _proj_key_mod(t3: tuple[int, int, int]):
    a = [c % _HASH_P for c in t3]
    for lead in range(3):
        if a[lead]:
            inv = pow(a[lead], _HASH_P - 2, _HASH_P)
            return (lead, *(c * inv % _HASH_P for c in a))
    return None


def _lex_positive(ray: tuple[int, int]) -> bool:
    return ray[1] > 0 or (ray[1] == 0 and ray[0] > 0)


def exact_max_stab_planar(ps, work_budget: float):
    from .counting import (
        MaxStabResult,
        StabCount,
        count_containing,
        count_containing_planar_fast,
    )
    from .exact import homogeneous_rows

    n = len(ps)
    if n == 0:
        raise InputError("empty point set")
    rows = homogeneous_rows(ps)
    centroid = tuple(sum(q[j] for q in ps.points) / n for j in range(2))
    if n < 3:
        return MaxStabResult(centroid, StabCount(0, 0, comb(n, 3)), True)
    max_bits = max(abs(e).bit_length() for r in rows for e in r)
    est = comb(comb(n, 2), 2) * (n + max_bits / 100.0)
    if est > work_budget:
        raise ResourceLimitError(
            f"exact search work estimate {est:.2e} exceeds budget {work_budget:.2e}; "
            f"n={n} with {max_bits}-bit coordinates"
        )

    # pair lines, deduplicated, with the points on each line
    proj = [(r[1], r[2], r[0]) for r in rows]  # (x, y, w)
    line_index: dict[tuple[int, int, int], int] = {}
    lines: list[tuple[int, int, int]] = []
    line_points: list[set[int]] = []
    for i, j in combinations(range(n), 2):
        a, b, c = _cross3(proj[i], proj[j])
        g = gcd(gcd(abs(a), abs(b)), abs(c))
        a, b, c = a // g, b // g, c // g
        lead = a if a else (b if b else c)
        if lead < 0:
            a, b, c = -a, -b, -c
        lid = line_index.get((a, b, c))
        if lid is None:
            lid = len(lines)
            line_index[(a, b, c)] = lid
            lines.append((a, b, c))
            line_points.append({i, j})
        else:
            line_points[lid].update((i, j))
    L = len(lines)

    prim_dirs: list[tuple[int, int]] = []
    dir_class: dict[tuple[int, int], int] = {}
    line_dir_class: list[int] = []
    for a, b, c in lines:
        dx, dy = b, -a
        g = gcd(abs(dx), abs(dy))
        dx, dy = dx // g, dy // g
        if not _lex_positive((dx, dy)):
            dx, dy = -dx, -dy
        prim_dirs.append((dx, dy))
        cls = dir_class.setdefault((dx, dy), len(dir_class))
        line_dir_class.append(cls)

    lines_mod = [tuple(c % _HASH_P for c in ln) for ln in lines]
    pkeys = [_proj_key_mod((r[1], r[2], r[0])) for r in rows]

    # bucket crossings by a modular projective hash of the vertex; entries
    # sharing an input point are keyed by that point without arithmetic
    buckets: dict[object, list[tuple[int, int, int]]] = {}
    for li, lj in combinations(range(L), 2):
        if line_dir_class[li] == line_dir_class[lj]:
            continue  # parallel
        shared = line_points[li] & line_points[lj]
        if shared:
            m_pt = next(iter(shared))
            key = pkeys[m_pt]
            buckets.setdefault(key, []).append((li, lj, m_pt))
            continue
        a1, b1, c1 = lines_mod[li]
        a2, b2, c2 = lines_mod[lj]
        vm = (
            (b1 * c2 - b2 * c1) % _HASH_P,
            (c1 * a2 - c2 * a1) % _HASH_P,
            (a1 * b2 - a2 * b1) % _HASH_P,
        )
        key = _proj_key_mod(vm)
        if key is None:
            vx, vy, vw = _cross3(lines[li], lines[lj])
            g = gcd(gcd(abs(vx), abs(vy)), abs(vw))
            key = ("exact", vx // g, vy // g, vw // g)
        buckets.setdefault(key, []).append((li, lj, -1))

    evaluator = _CellEvaluator(rows)
    best_count = -1
    best_payload = None  # (vertex, bisector)

    def on_line_exact(lid: int, vert) -> bool:
        a, b, c = lines[lid]
        return a * vert[0] + b * vert[1] + c * vert[2] == 0

    for key in buckets:
        entries = buckets[key]
        # exact grouping inside the bucket
        groups: list[dict] = []
        for li, lj, m_pt in entries:
            if m_pt >= 0:
                vert = (rows[m_pt][1], rows[m_pt][2], rows[m_pt][0])
                placed = False
                for gr in groups:
                    if gr["pt"] == m_pt:
                        gr["members"].update((li, lj))
                        placed = True
                        break
                if not placed:
                    groups.append({"pt": m_pt, "vert": vert, "members": {li, lj}})
                continue
            placed = False
            for gr in groups:
                if on_line_exact(li, gr["vert"]) and on_line_exact(lj, gr["vert"]):
                    gr["members"].update((li, lj))
                    placed = True
                    break
            if not placed:
                vx, vy, vw = _cross3(lines[li], lines[lj])
                if vw < 0:
                    vx, vy, vw = -vx, -vy, -vw
                groups.append({"pt": None, "vert": (vx, vy, vw), "members": {li, lj}})

        for gr in groups:
            vert = gr["vert"]
            if vert[2] < 0:
                vert = (-vert[0], -vert[1], -vert[2])
            members = sorted(gr["members"])
            incident = [(lid, prim_dirs[lid], sorted(line_points[lid])) for lid in members]
            vertex_pt = gr["pt"] if gr["pt"] is not None else None

            rays = []
            for lid in members:
                dx, dy = prim_dirs[lid]
                rays.append((dx, dy))
                rays.append((-dx, -dy))

            def ray_cmp(a, b) -> int:
                ua, ub = _lex_positive(a), _lex_positive(b)
                if ua != ub:
                    return -1 if ua else 1
                s = _xf_cross_sign(_xf(a[0]), _xf(a[1]), _xf(b[0]), _xf(b[1]))
                if s is None:
                    s = _sgn(a[0] * b[1] - a[1] * b[0])
                return -s

            rays.sort(key=cmp_to_key(ray_cmp))
            k = len(rays)
            for idx in range(k):
                r1 = rays[idx]
                r2 = rays[(idx + 1) % k]
                if not (_lex_positive(r1) and _lex_positive(r2)):
                    continue
                bsec = (r1[0] + r2[0], r1[1] + r2[1])
                cnt = evaluator.count(vert, bsec, incident, vertex_pt)
                if cnt > best_count:
                    best_count = cnt
                    best_payload = (vert, bsec)

    if best_payload is None:
        # no two pair lines cross: the set is collinear, nothing has interior
        return MaxStabResult(centroid, count_containing(ps, centroid), True)

    vertex, bis = best_payload
    vx, vy, vw = vertex
    t_min: Fraction | None = None
    for a, b, c in lines:
        val0 = a * vx + b * vy + c * vw
        if val0 == 0:
            continue
        val1 = (a * bis[0] + b * bis[1]) * vw
        if val1 == 0:
            continue
        if (val0 > 0) != (val1 > 0):
            t = Fraction(-val0, val1)
            if t_min is None or t < t_min:
                t_min = t
    t_star = (t_min / 2) if t_min is not None else Fraction(1)
    witness = (
        Fraction(vx, vw) + t_star * bis[0],
        Fraction(vy, vw) + t_star * bis[1],
    )
    recount = count_containing_planar_fast(ps, witness)
    if recount.strict != best_count or recount.degenerate != 0:
        raise AssertionError(
            f"materialized cell recount {recount.strict} != symbolic {best_count}"
        )
    return MaxStabResult(witness, recount, True)
