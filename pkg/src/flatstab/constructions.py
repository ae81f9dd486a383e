"""Point-set generators: dominance chains, antipodal sphere sets, circle clusters.

Each generator is deterministic given its parameters (and seed, where one
exists) and verifies its own structural guarantees exactly before returning;
a set that cannot be certified raises instead of being returned quietly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import ceil, comb, factorial

import numpy as np

from .errors import ConstructionError, InputError, ResourceLimitError
from .exact import (
    ExactPoint,
    PointSet,
    general_position_check,
    point_type,
    simplex_location,
    to_fraction,
)

SCHEDULE_EXACT = "factorial-power"
SCHEDULE_FEASIBLE = "squared-exponent"

# ceiling for the largest chain value under the exact schedule; above it the
# bit count would triple per step into the gigabyte range
_DEFAULT_BIT_BUDGET = 4_000_000


@dataclass(frozen=True)
class SeparationChain:
    """Strictly increasing coordinate pool c_1 < c_2 < ... < c_count.

    Under the exact schedule every step satisfies
    c_{t+1} = factor * c_t**exponent + 1 with factor = (d+1)! and
    exponent = d+1, which makes any determinant over the resulting
    coordinates dominated by a single monomial.  Bit counts multiply by
    `exponent` each step, so once the predicted size exceeds the bit budget
    the builder switches to c_t = base**(t*t): still strictly increasing
    with rapidly widening gaps, but without the full dominance inequality.
    """

    base: int
    exponent: int
    factor: int
    values: tuple[int, ...]
    schedule: str

    def __post_init__(self) -> None:
        if self.base < 2:
            raise InputError("chain base must be at least 2")
        if self.schedule not in (SCHEDULE_EXACT, SCHEDULE_FEASIBLE):
            raise InputError(f"unknown chain schedule {self.schedule!r}")
        vals = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if not vals:
            raise InputError("chain needs at least one value")
        if vals[0] <= 1:
            raise InputError("chain values must exceed 1")
        for prev, nxt in zip(vals, vals[1:]):
            if nxt <= prev:
                raise InputError("chain values must be strictly increasing")
        if self.schedule == SCHEDULE_EXACT:
            for prev, nxt in zip(vals, vals[1:]):
                if nxt != self.factor * prev**self.exponent + 1:
                    raise InputError("chain value violates the growth recurrence")

    @property
    def separated(self) -> bool:
        """True when every step satisfies factor * prev**exponent < next."""
        return self.schedule == SCHEDULE_EXACT

    @staticmethod
    def predicted_bits(count: int, d: int, base: int = 2) -> int:
        """Upper estimate of the largest value's bit length under the exact schedule."""
        bits = max(base.bit_length(), 2)
        fac_bits = factorial(d + 1).bit_length()
        for _ in range(count - 1):
            bits = (d + 1) * bits + fac_bits
        return bits

    @classmethod
    def build(
        cls,
        count: int,
        d: int,
        base: int = 2,
        bit_budget: int = _DEFAULT_BIT_BUDGET,
    ) -> "SeparationChain":
        if count < 1:
            raise InputError("chain length must be positive")
        if d < 2:
            raise InputError("chain dimension must be at least 2")
        if base < 2:
            raise InputError("chain base must be at least 2")
        fac = factorial(d + 1)
        if cls.predicted_bits(count, d, base) <= bit_budget:
            vals = [base]
            for _ in range(count - 1):
                vals.append(fac * vals[-1] ** (d + 1) + 1)
            return cls(base, d + 1, fac, tuple(vals), SCHEDULE_EXACT)
        top_bits = count * count * base.bit_length()
        if top_bits > 64 * bit_budget:
            raise ResourceLimitError(
                f"fallback chain of {count} values would reach ~{top_bits} bits"
            )
        vals = tuple(base ** (t * t) for t in range(1, count + 1))
        return cls(base, d + 1, fac, vals, SCHEDULE_FEASIBLE)


def _verify_convex_projection(ps: PointSet, exhaustive_cap: int = 200_000) -> None:
    # strictly increasing slopes in the first two coordinates; for an
    # x-monotone sequence the consecutive-triple check already implies the
    # full condition, the exhaustive sweep is for small sets
    num = [(p[0].numerator * p[1].denominator, p[1].numerator * p[0].denominator,
            p[0].denominator * p[1].denominator) for p in ps.points]

    def cross(i: int, j: int, k: int) -> int:
        (xi, yi, wi), (xj, yj, wj) = num[i], num[j]
        xk, yk, wk = num[k]
        ax = xj * wi - xi * wj
        ay = yj * wi - yi * wj
        bx = xk * wi - xi * wk
        by = yk * wi - yi * wk
        return ax * by - ay * bx

    n = len(ps)
    if comb(n, 3) <= exhaustive_cap:
        triples = combinations(range(n), 3)
    else:
        triples = ((i, i + 1, i + 2) for i in range(n - 2))
    for i, j, k in triples:
        if cross(i, j, k) <= 0:
            raise ConstructionError(
                f"projection of points {i},{j},{k} is not strictly convex"
            )


def build_separated_set(
    n: int,
    d: int,
    *,
    base: int = 2,
    bit_budget: int = _DEFAULT_BIT_BUDGET,
) -> PointSet:
    """n points whose coordinate pool grows so fast the set is strictly convex.

    Point i takes coordinate j from chain position j*n + i (column-major),
    so every later coordinate dwarfs all earlier ones.  The first-two-
    coordinate projection is verified strictly convex, and for feasible
    sizes the whole set is verified affinely non-degenerate.
    """
    if d < 2:
        raise InputError("separated sets need dimension >= 2")
    if n < d + 1:
        raise InputError(f"need at least {d + 1} points in dimension {d}")
    chain = SeparationChain.build(n * d, d, base=base, bit_budget=bit_budget)
    vals = chain.values
    pts = tuple(
        tuple(Fraction(vals[j * n + i]) for j in range(d)) for i in range(n)
    )
    ps = PointSet(d, pts, label=f"separated n={n} d={d} {chain.schedule}")
    _verify_convex_projection(ps)
    if d >= 3 and comb(n, d + 1) <= 200_000:
        if not general_position_check(ps):
            raise ConstructionError("separated set is affinely degenerate")
    return ps


def discard_step(ps: PointSet, r: ExactPoint) -> list[int]:
    """Indices surviving the per-coordinate trim around r.

    For each coordinate j the last point at or below r_j and the first point
    at or above r_j are dropped (at most 2d points in total), so every
    surviving coordinate is strictly separated from r_j on its own scale.
    """
    pts = ps.points
    r = tuple(to_fraction(c) for c in r)
    if len(r) != ps.dim:
        raise InputError("query dimension mismatch")
    dropped: set[int] = set()
    for j in range(ps.dim):
        below = [i for i in range(len(pts)) if pts[i][j] <= r[j]]
        above = [i for i in range(len(pts)) if pts[i][j] >= r[j]]
        if below:
            dropped.add(max(below, key=lambda i: pts[i][j]))
        if above:
            dropped.add(min(above, key=lambda i: pts[i][j]))
    return [i for i in range(len(pts)) if i not in dropped]


# ---------------------------------------------------------------------------
# exact rational points on the unit sphere


def _stereographic(u: tuple[Fraction, ...]) -> ExactPoint:
    """Rational point exactly on the unit sphere, from d-1 rational parameters."""
    nrm = sum(c * c for c in u)
    den = nrm + 1
    return tuple(2 * c / den for c in u) + ((nrm - 1) / den,)


def _neg(p: ExactPoint) -> ExactPoint:
    return tuple(-c for c in p)


@dataclass(frozen=True)
class SphereConfig:
    """Parameters for the antipodal-pairs-plus-cluster sphere set."""

    n: int
    d: int
    alpha: Fraction
    cluster_radius: Fraction = Fraction(1, 1000)
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", to_fraction(self.alpha))
        object.__setattr__(self, "cluster_radius", to_fraction(self.cluster_radius))
        if self.d < 2:
            raise InputError("dimension must be at least 2")
        if self.n < self.d + 1:
            raise InputError("too few points for the dimension")
        if not (0 < self.alpha <= Fraction(1, 2)):
            raise InputError("alpha must lie in (0, 1/2]")
        if self.cluster_radius <= 0:
            raise InputError("cluster radius must be positive")
        if self.n - 2 * self.pair_count < 0:
            raise InputError(
                f"alpha={self.alpha} needs {2 * self.pair_count} points but n={self.n}"
            )

    @property
    def pair_count(self) -> int:
        return ceil(self.alpha * self.n)

    @property
    def cluster_count(self) -> int:
        return self.n - 2 * self.pair_count


def _rand_params(rng: random.Random, k: int) -> tuple[Fraction, ...]:
    return tuple(
        Fraction(rng.randint(-2_000_000, 2_000_000), 1_000_003) for _ in range(k)
    )


def _census_matches(points: list[ExactPoint], a: int, d: int) -> bool:
    # planar closed form: strict hits are two per antipodal class triple
    # plus one per cluster point and non-antipodal pair spanning the origin
    # direction; every triangle on an antipodal pair hits the origin on its
    # boundary, nothing else does
    from .counting import count_containing

    n = len(points)
    ps = PointSet(d, tuple(points))
    got = count_containing(ps, (Fraction(0),) * d)
    want_strict = 2 * comb(a, 3) + (n - 2 * a) * comb(a, 2)
    want_degenerate = a * (n - 2)
    return got.strict == want_strict and got.degenerate == want_degenerate


def _cluster_clear(points: list[ExactPoint], a: int, m: int, d: int) -> bool:
    # no d+1 points with two or more cluster members may contain the origin
    # strictly; boundary contact is allowed only through an antipodal pair,
    # whose segment passes the origin by construction
    origin = (Fraction(0),) * d
    cluster = points[2 * a :]
    others = list(range(2 * a))
    for k in range(2, d + 2):
        if k > m:
            break
        for cs in combinations(cluster, k):
            for oidx in combinations(others, d + 1 - k):
                loc = simplex_location(
                    cs + tuple(points[i] for i in oidx), origin
                )
                if loc == 1:
                    return False
                if loc == 0 and not any(
                    i < a and i + a in oidx for i in oidx
                ):
                    return False
    return True


def build_sphere_antipodal_set(cfg: SphereConfig, *, retries: int = 16) -> PointSet:
    """Antipodal pairs A, -A plus a tight cluster, all exactly on the sphere.

    Point order is the a pair representatives, then their exact negations,
    then the cluster.  Verified before returning: no hyperplane through the
    origin contains the cluster center together with d-1 pairwise
    non-antipodal set members, and the cluster is flat enough that the
    origin census has the antipodal closed form (planar case) or no
    origin-reaching simplex uses two cluster points (higher dimensions).
    """
    a = cfg.pair_count
    m = cfg.cluster_count
    d = cfg.d
    for attempt in range(retries):
        rng = random.Random(cfg.seed * 1_000_003 + attempt)
        pts: list[ExactPoint] = []
        seen: set[ExactPoint] = set()
        guard = 0
        while len(pts) < a:
            guard += 1
            if guard > 64 * a:
                break
            x = _stereographic(_rand_params(rng, d - 1))
            if x in seen or _neg(x) in seen:
                continue
            pts.append(x)
            seen.add(x)
        if len(pts) < a:
            continue
        base = pts + [_neg(x) for x in pts]
        if m == 0:
            return PointSet(d, tuple(base), label=_sphere_label(cfg))
        # cluster center, certified against origin hyperplanes
        center_u = _rand_params(rng, d - 1)
        p = _stereographic(center_u)
        if not _center_certificate(base, p, d):
            continue
        radius = cfg.cluster_radius
        for _ in range(60):
            cluster = _make_cluster(center_u, p, radius, m)
            if cluster is None:
                radius = radius / 2
                continue
            all_pts = base + cluster
            if len(set(all_pts)) != len(all_pts):
                radius = radius / 2
                continue
            flat_ok = (
                _census_matches(all_pts, a, d)
                if d == 2
                else _cluster_clear(all_pts, a, m, d)
            )
            if flat_ok:
                return PointSet(d, tuple(all_pts), label=_sphere_label(cfg))
            radius = radius / 2
    raise ConstructionError(
        f"no certifiable antipodal sphere set after {retries} attempts"
    )


def _sphere_label(cfg: SphereConfig) -> str:
    return f"sphere-antipodal n={cfg.n} d={cfg.d} alpha={cfg.alpha} seed={cfg.seed}"


def _center_certificate(base: list[ExactPoint], p: ExactPoint, d: int) -> bool:
    # a hyperplane through the origin containing p and d-1 non-antipodal
    # members would make the origin census ambiguous; reject exactly
    def det(rows: list[ExactPoint]) -> Fraction:
        if len(rows) == 2:
            return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
        total = Fraction(0)
        for c in range(len(rows)):
            minor = [r[:c] + r[c + 1 :] for r in rows[1:]]
            term = rows[0][c] * det(minor)
            total += term if c % 2 == 0 else -term
        return total

    half = len(base) // 2
    for sub in combinations(range(len(base)), d - 1):
        if any(
            (i < half and i + half in sub) for i in sub
        ):
            continue
        if det([p] + [base[i] for i in sub]) == 0:
            return False
    return True


def _make_cluster(
    center_u: tuple[Fraction, ...],
    p: ExactPoint,
    radius: Fraction,
    m: int,
) -> list[ExactPoint] | None:
    # spread m sphere points near p by nudging the stereographic parameters;
    # verified against the radius exactly, shrinking on overshoot
    step = radius / (4 * (m + 1))
    out: list[ExactPoint] = []
    r2 = radius * radius
    for k in range(1, m + 1):
        shifted = tuple(
            c + step * (k if idx == 0 else k * k % 7 + 1)
            for idx, c in enumerate(center_u)
        )
        q = _stereographic(shifted)
        if sum((qc - pc) ** 2 for qc, pc in zip(q, p)) > r2:
            return None
        out.append(q)
    if len(set(out)) != len(out) or p in out:
        return None
    return out


# ---------------------------------------------------------------------------
# three-cluster circle sets


def _circle_point(t: Fraction) -> ExactPoint:
    den = 1 + t * t
    return ((1 - t * t) / den, 2 * t / den)


def build_boros_furedi(
    n: int, cluster_scale: Fraction | int | str = Fraction(1, 1024)
) -> PointSet:
    """Three tight clusters on the unit circle, a third of the points each.

    Cluster A (uniform spacing) sits near angle 0, clusters B and C near
    +-120 degrees; inside B and C consecutive gaps grow geometrically with
    ratio 1/cluster_scale moving away from A.  Every cluster's diameter is
    verified <= cluster_scale exactly.  Point order is A, then B, then C,
    each moving away from A.
    """
    cluster_scale = to_fraction(cluster_scale)
    if n < 3:
        raise InputError("need at least three points")
    if not (0 < cluster_scale < 1):
        raise InputError("cluster scale must lie in (0, 1)")
    sizes = [n // 3 + (1 if k < n % 3 else 0) for k in range(3)]
    ratio = 1 / cluster_scale
    # tan-half-angle cluster centers: 0 and roughly +-120 degrees
    centers = [Fraction(0), Fraction(26, 15), Fraction(-26, 15)]
    # B spreads to larger t (away from A at t=0), C to smaller t
    senses = [1, 1, -1]
    pts: list[ExactPoint] = []
    for which in range(3):
        size = sizes[which]
        if size == 0:
            continue
        width = cluster_scale / 8
        for _ in range(80):
            if which == 0:
                offs = [
                    Fraction(2 * k - size + 1, 2) * width / max(size, 1)
                    for k in range(size)
                ]
            else:
                gap = width / (ratio ** (size - 1) if size > 1 else 1)
                offs = [Fraction(0)]
                g = gap
                for _k in range(size - 1):
                    offs.append(offs[-1] + g)
                    g = g * ratio
            cand = [
                _circle_point(centers[which] + senses[which] * o) for o in offs
            ]
            dia2 = max(
                (
                    sum((ac - bc) ** 2 for ac, bc in zip(x, y))
                    for x, y in combinations(cand, 2)
                ),
                default=Fraction(0),
            )
            if dia2 <= cluster_scale * cluster_scale and len(set(cand)) == len(cand):
                pts.extend(cand)
                break
            width = width / 2
        else:
            raise ConstructionError("cluster spacing failed to fit the scale")
    return PointSet(2, tuple(pts), label=f"three-cluster n={n} scale={cluster_scale}")


# ---------------------------------------------------------------------------
# random near-sphere baselines


def build_random_sphere(n: int, d: int, seed: int) -> PointSet:
    """n near-uniform random directions as exact rationals close to the sphere."""
    if d < 2:
        raise InputError("dimension must be at least 2")
    if n < d + 1:
        raise InputError("too few points for the dimension")
    for attempt in range(32):
        rng = np.random.default_rng((int(seed) << 8) + attempt)
        z = rng.standard_normal((n, d))
        norms = np.linalg.norm(z, axis=1)
        if np.any(norms < 1e-9):
            continue
        z = z / norms[:, None]
        pts = tuple(
            tuple(Fraction(float(c)).limit_denominator(1 << 20) for c in row)
            for row in z
        )
        try:
            ps = PointSet(d, pts, label=f"random-sphere n={n} d={d} seed={seed}")
        except InputError:
            continue
        if comb(n, d + 1) <= 600_000 and not general_position_check(ps):
            continue
        return ps
    raise ConstructionError("random sphere sampling kept hitting degeneracies")


__all__ = [
    "SCHEDULE_EXACT",
    "SCHEDULE_FEASIBLE",
    "SeparationChain",
    "SphereConfig",
    "build_boros_furedi",
    "build_random_sphere",
    "build_separated_set",
    "build_sphere_antipodal_set",
    "discard_step",
    "point_type",
]
