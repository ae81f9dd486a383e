"""Fans of half-hyperplanes around a codimension-2 spine, and equipartitions.

A frame (v, w) fixes a hyperplane h orthogonal to v that halves the mass,
and a spine inside h positioned along w.  Every plane point x maps to
(u, z) = (<w,x> - t, <v,x> - s); its fan angle is measured from the left
half of h, increasing through the upper side first, which is exactly the
standard angle of the reflected vector (-u, z).

Angles, quantiles, and the solver run in floating point; every fan that
leaves this module is recounted with exact rational sector predicates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .counting import Flat2Codim
from .errors import InputError, SolverError
from .exact import PointSet, to_fraction

_ORTHO_TOL = 1e-12
_BALANCE_TOL = 1e-8
_RESIDUAL_TOL = 1e-6


@dataclass(frozen=True)
class Frame:
    """Orthonormal direction pair spanning the plane transverse to the spine."""

    v: tuple[float, ...]
    w: tuple[float, ...]

    def __post_init__(self) -> None:
        v = tuple(float(c) for c in self.v)
        w = tuple(float(c) for c in self.w)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "w", w)
        if len(v) != len(w) or len(v) < 2:
            raise InputError("frame needs two directions of equal dimension >= 2")
        nv = math.fsum(c * c for c in v)
        nw = math.fsum(c * c for c in w)
        dot = math.fsum(a * b for a, b in zip(v, w))
        if abs(nv - 1) > 3 * _ORTHO_TOL or abs(nw - 1) > 3 * _ORTHO_TOL:
            raise InputError("frame directions must be unit length")
        if abs(dot) > _ORTHO_TOL:
            raise InputError("frame directions must be orthogonal")

    @property
    def d(self) -> int:
        return len(self.v)

    @classmethod
    def planar(cls, phi: float) -> "Frame":
        v = (math.cos(phi), math.sin(phi))
        return cls(v, (-v[1], v[0]))

    @classmethod
    def spherical(cls, theta: float, phi: float, psi: float) -> "Frame":
        v = (
            math.sin(theta) * math.cos(phi),
            math.sin(theta) * math.sin(phi),
            math.cos(theta),
        )
        # orthonormal basis of the plane orthogonal to v
        if abs(v[2]) < 0.9:
            a = _normalize(_cross(v, (0.0, 0.0, 1.0)))
        else:
            a = _normalize(_cross(v, (1.0, 0.0, 0.0)))
        b = _cross(v, a)
        w = tuple(
            math.cos(psi) * ac + math.sin(psi) * bc for ac, bc in zip(a, b)
        )
        return cls(v, w)


def _cross(a, b):
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def _normalize(a):
    n = math.sqrt(math.fsum(c * c for c in a))
    return tuple(c / n for c in a)


@dataclass(frozen=True)
class Fan:
    """2m half-hyperplane angles around a spine, plus certified part counts."""

    spine: Flat2Codim
    m: int
    angles: tuple[float, ...]
    part_counts: tuple[int, ...] | None = None
    residual: float | None = None

    def __post_init__(self) -> None:
        angles = tuple(float(a) for a in self.angles)
        object.__setattr__(self, "angles", angles)
        if self.m < 2:
            raise InputError("a fan needs at least two hyperplanes")
        if len(angles) != 2 * self.m:
            raise InputError("a fan of m hyperplanes carries 2m angles")
        if abs(angles[0]) > 1e-15:
            raise InputError("the first half-hyperplane must sit at angle 0")
        for a, b in zip(angles, angles[1:]):
            if b <= a:
                raise InputError("fan angles must increase strictly")
        if angles[-1] >= 2 * math.pi:
            raise InputError("fan angles live in [0, 2*pi)")

    def alignment_residual(self) -> float:
        """Largest deviation of opposite halves from forming full hyperplanes."""
        return max(
            abs((self.angles[self.m + i] - self.angles[i]) - math.pi)
            for i in range(self.m)
        )

    def to_json(self) -> dict:
        return {
            "spine": {
                "v": [str(c) for c in self.spine.v],
                "w": [str(c) for c in self.spine.w],
                "s": str(self.spine.s),
                "t": str(self.spine.t),
            },
            "m": self.m,
            "angles": list(self.angles),
            "part_counts": list(self.part_counts) if self.part_counts else None,
            "residual": self.residual,
        }


@dataclass(frozen=True)
class FanTestValue:
    """Upper/lower quantile angles and the antisymmetrized residual vector."""

    alpha: tuple[float, ...]
    beta: tuple[float, ...]
    gamma: tuple[float, ...]
    lam: tuple[float, ...]
    mu: tuple[float, ...]

    @property
    def G(self) -> tuple[float, ...]:
        return self.lam + self.mu

    @property
    def residual(self) -> float:
        return max((abs(g) for g in self.G), default=0.0)


def _as_float_rows(S) -> np.ndarray:
    if isinstance(S, PointSet):
        return np.array([[float(c) for c in p] for p in S.points], dtype=float)
    arr = np.asarray(S, dtype=float)
    if arr.ndim != 2:
        raise InputError("mass samples must form an (n, d) array")
    return arr


def halving_offset(S, v: Sequence) -> Fraction:
    """Offset s of the hyperplane <v,x> = s leaving half the mass on each side.

    The median of the projections, with midpoint tie-breaking for even
    counts; exact for rational inputs, else computed on floats and returned
    as the exact rational of the resulting double.
    """
    if isinstance(S, PointSet):
        vv = [to_fraction(c if not isinstance(c, float) else c) for c in v]
        if len(vv) != S.dim:
            raise InputError("direction dimension mismatch")
        if all(c == 0 for c in vv):
            raise InputError("direction must be nonzero")
        proj = sorted(sum(a * b for a, b in zip(vv, p)) for p in S.points)
        n = len(proj)
        if n == 0:
            raise InputError("empty set has no halving hyperplane")
        if n % 2 == 1:
            return proj[n // 2]
        return (proj[n // 2 - 1] + proj[n // 2]) / 2
    arr = _as_float_rows(S)
    if arr.shape[0] == 0:
        raise InputError("empty set has no halving hyperplane")
    vv = np.asarray([float(c) for c in v], dtype=float)
    if not np.any(vv):
        raise InputError("direction must be nonzero")
    proj = np.sort(arr @ vv)
    n = len(proj)
    med = proj[n // 2] if n % 2 == 1 else (proj[n // 2 - 1] + proj[n // 2]) / 2
    return Fraction(float(med))


def _quantile_cuts(sorted_angles: np.ndarray, m: int) -> np.ndarray:
    k = len(sorted_angles)
    if k < m:
        raise InputError(f"need at least {m} points on each side of h, got {k}")
    bnd = (np.arange(1, m) * k) // m
    return (sorted_angles[bnd - 1] + sorted_angles[bnd]) / 2


def _side_split(arr: np.ndarray, v: np.ndarray, s_h: float):
    z = arr @ v - s_h
    upper = z >= 0
    return z, upper


def _sum_gamma(p: np.ndarray, z: np.ndarray, upper: np.ndarray, m: int, t: float):
    u = p - t
    th_up = math.pi - np.arctan2(z[upper], u[upper])
    th_lo = -np.arctan2(z[~upper], u[~upper])
    alpha = _quantile_cuts(np.sort(th_up), m)
    beta = _quantile_cuts(np.sort(th_lo), m)
    return alpha, beta, float(np.sum(alpha) - np.sum(beta))


def balance_spine(S, frame: Frame) -> Fraction:
    """Spine offset along w at which the upper and lower cut angles balance.

    The angle sum difference is continuous and strictly decreasing in the
    offset, so bisection converges; the returned offset leaves the absolute
    difference below 1e-8.
    """
    arr = _as_float_rows(S)
    v = np.asarray(frame.v)
    w = np.asarray(frame.w)
    m = 2 * frame.d - 1
    s_h = float(halving_offset(S if isinstance(S, PointSet) else arr, frame.v))
    z, upper = _side_split(arr, v, s_h)
    p = arr @ w
    lo, hi = float(p.min()) - 1.0, float(p.max()) + 1.0
    g_lo = _sum_gamma(p, z, upper, m, lo)[2]
    g_hi = _sum_gamma(p, z, upper, m, hi)[2]
    if not (g_lo > 0 > g_hi):
        raise SolverError(
            f"no sign change for the spine balance: G({lo})={g_lo}, G({hi})={g_hi}"
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        g = _sum_gamma(p, z, upper, m, mid)[2]
        if abs(g) <= 1e-10 or hi - lo < 1e-14 * max(1.0, abs(mid)):
            break
        if g > 0:
            lo = mid
        else:
            hi = mid
    mid = 0.5 * (lo + hi)
    g = _sum_gamma(p, z, upper, m, mid)[2]
    if abs(g) > _BALANCE_TOL:
        raise SolverError(
            f"spine balance stalled at |sum gamma| = {abs(g):.3e} (offset {mid})"
        )
    return Fraction(mid)


def test_map(S, frame: Frame) -> FanTestValue:
    """Quantile-angle residual vector at the balanced spine position."""
    arr = _as_float_rows(S)
    m = 2 * frame.d - 1
    t = float(balance_spine(S, frame))
    v = np.asarray(frame.v)
    w = np.asarray(frame.w)
    s_h = float(halving_offset(S if isinstance(S, PointSet) else arr, frame.v))
    z, upper = _side_split(arr, v, s_h)
    p = arr @ w
    alpha, beta, _ = _sum_gamma(p, z, upper, m, t)
    gamma = alpha - beta
    half = (m - 1) // 2
    lam = tuple(float(gamma[i] - gamma[m - 2 - i]) for i in range(half))
    mu = tuple(float(gamma[i] + gamma[m - 2 - i]) for i in range(1, half))
    return FanTestValue(
        tuple(float(a) for a in alpha),
        tuple(float(b) for b in beta),
        tuple(float(g) for g in gamma),
        lam,
        mu,
    )


def fan_quantile_angles(S, frame: Frame, spine_offset, m: int) -> Fan:
    """The 2m half-hyperplane angles splitting each side of h into m equal parts."""
    if m < 2:
        raise InputError("need at least two hyperplanes")
    arr = _as_float_rows(S)
    n = arr.shape[0]
    if n < 2 * m:
        raise InputError(f"need at least {2 * m} points for a {m}-hyperplane fan")
    v = np.asarray(frame.v)
    w = np.asarray(frame.w)
    s_h = float(halving_offset(S if isinstance(S, PointSet) else arr, frame.v))
    t = float(spine_offset)
    z, upper = _side_split(arr, v, s_h)
    p = arr @ w
    alpha, beta, _ = _sum_gamma(p, z, upper, m, t)
    angles = (0.0, *map(float, alpha), math.pi, *(math.pi + b for b in beta))
    spine = Flat2Codim(
        tuple(Fraction(float(c)) for c in frame.v),
        tuple(Fraction(float(c)) for c in frame.w),
        Fraction(s_h),
        Fraction(t),
    )
    fan = Fan(spine, m, angles)
    counts = None
    if isinstance(S, PointSet):
        counts = tuple(exact_sector_counts(S, fan))
        fan = Fan(spine, m, angles, part_counts=counts)
    return fan


# ---------------------------------------------------------------------------
# exact sector assignment


def _half_theta(q: tuple[Fraction, Fraction]) -> int:
    return 0 if (q[1] > 0 or (q[1] == 0 and q[0] > 0)) else 1


def _theta_less(a, b) -> bool:
    ha, hb = _half_theta(a), _half_theta(b)
    if ha != hb:
        return ha < hb
    return a[0] * b[1] - a[1] * b[0] > 0


def exact_sector_counts(ps: PointSet, fan: Fan) -> list[int]:
    """Certified point count per sector, by exact rational predicates.

    Points on a sector boundary go to the lexicographically smallest of the
    adjacent sector indices; a point exactly on the spine goes to sector 0.
    """
    spine = fan.spine
    if spine.dim != ps.dim:
        raise InputError("fan spine dimension mismatch")
    rays = [
        (Fraction(math.cos(a)), Fraction(math.sin(a))) for a in fan.angles
    ]
    counts = [0] * (2 * fan.m)
    for x in ps.points:
        u = sum(a * b for a, b in zip(spine.w, x)) - spine.t
        zz = sum(a * b for a, b in zip(spine.v, x)) - spine.s
        q = (-u, zz)
        if q == (0, 0):
            counts[0] += 1
            continue
        sector = 0
        on_ray = None
        for j, r in enumerate(rays):
            cr = r[0] * q[1] - r[1] * q[0]
            dt = r[0] * q[0] + r[1] * q[1]
            if cr == 0 and dt > 0:
                on_ray = j
                break
            if not _theta_less(q, r):
                sector = j
        if on_ray is not None:
            counts[0 if on_ray == 0 else on_ray - 1] += 1
        else:
            counts[sector] += 1
    return counts


# ---------------------------------------------------------------------------
# equipartition solver


def _residual(S, frame: Frame) -> tuple[float, FanTestValue]:
    tv = test_map(S, frame)
    return tv.residual, tv


def _finish(S, frame: Frame, resid: float) -> Fan:
    m = 2 * frame.d - 1
    t = balance_spine(S, frame)
    fan = fan_quantile_angles(S, frame, t, m)
    return Fan(
        fan.spine,
        fan.m,
        fan.angles,
        part_counts=fan.part_counts,
        residual=resid,
    )


def solve_equipartition_fan(
    S: PointSet,
    d: int | None = None,
    *,
    tol: float = _RESIDUAL_TOL,
    seed: int = 0,
    eval_budget: int = 10_000,
) -> Fan:
    """A (2d-1)-hyperplane fan cutting the set into 4d-2 near-equal parts.

    d=2 sweeps one angle for a sign change of the scalar residual and
    bisects; d=3 runs a coarse grid over the frame space and refines the
    best seeds by damped Newton steps on the residual vector.  The returned
    fan carries exact part counts; failure to reach the tolerance raises
    with the best residual seen.
    """
    if not isinstance(S, PointSet):
        raise InputError("the discrete solver needs a point set")
    dd = S.dim if d is None else d
    if dd != S.dim:
        raise InputError("dimension argument disagrees with the set")
    if dd not in (2, 3):
        raise InputError("fan solving is implemented for dimensions 2 and 3")
    if len(S) < 4 * dd - 2:
        raise InputError(f"need at least {4 * dd - 2} points")
    if dd == 2:
        return _solve_planar(S, tol, eval_budget)
    return _solve_spatial(S, tol, seed, eval_budget)


def _g_scalar(S, phi: float) -> float:
    tv = test_map(S, Frame.planar(phi))
    return tv.G[0]


def _solve_planar(S: PointSet, tol: float, eval_budget: int) -> Fan:
    steps = 180
    phis = [math.pi * k / steps for k in range(steps)]
    vals = [_g_scalar(S, p) for p in phis]
    best_resid = min(abs(g) for g in vals)
    if best_resid <= tol:
        k = min(range(steps), key=lambda i: abs(vals[i]))
        return _finish(S, Frame.planar(phis[k]), abs(vals[k]))
    # sign changes, including the antipodal wrap G(phi+pi) = -G(phi)
    intervals = []
    for k in range(steps):
        a, b = phis[k], phis[(k + 1) % steps] + (math.pi if k == steps - 1 else 0)
        ga = vals[k]
        gb = vals[(k + 1) % steps] * (-1 if k == steps - 1 else 1)
        if ga == 0 or ga * gb < 0:
            intervals.append((a, b, ga, gb))
    budget = eval_budget
    best = (best_resid, None)
    for a, b, ga, gb in intervals:
        lo, hi, glo = a, b, ga
        while budget > 0 and hi - lo > 1e-14:
            mid = 0.5 * (lo + hi)
            g = _g_scalar(S, mid)
            budget -= 1
            if abs(g) < best[0]:
                best = (abs(g), mid)
            if abs(g) <= tol:
                return _finish(S, Frame.planar(mid), abs(g))
            if (g > 0) == (glo > 0):
                lo = mid
            else:
                hi = mid
    raise SolverError(
        f"planar fan residual stalled at {best[0]:.3e} (tolerance {tol:.1e})"
    )


def _solve_spatial(S: PointSet, tol: float, seed: int, eval_budget: int) -> Fan:
    grid = 24
    seeds = []
    evals = 0
    for i in range(grid):
        theta = math.pi * (i + 0.5) / grid
        for j in range(grid):
            phi = math.pi * j / grid
            for k in range(grid):
                psi = math.pi * k / grid
                try:
                    r, _ = _residual(S, Frame.spherical(theta, phi, psi))
                except SolverError:
                    continue
                seeds.append((r, theta, phi, psi))
    seeds.sort(key=lambda s: s[0])
    best_r = seeds[0][0] if seeds else float("inf")
    if best_r <= tol:
        _, th, ph, ps_ = seeds[0]
        return _finish(S, Frame.spherical(th, ph, ps_), best_r)

    def g_vec(x):
        nonlocal evals
        evals += 1
        tv = test_map(S, Frame.spherical(*x))
        return np.array(tv.G)

    best_overall = best_r
    for r0, th, ph, ps_ in seeds[:16]:
        x = np.array([th, ph, ps_])
        try:
            g = g_vec(x)
        except SolverError:
            continue
        r = float(np.max(np.abs(g)))
        for _ in range(60):
            if evals >= eval_budget:
                break
            if r <= tol:
                return _finish(S, Frame.spherical(*x), r)
            h = 1e-6
            jac = np.zeros((3, 3))
            ok = True
            for c in range(3):
                xp = x.copy()
                xp[c] += h
                try:
                    jac[:, c] = (g_vec(xp) - g) / h
                except SolverError:
                    ok = False
                    break
            if not ok:
                break
            try:
                step = np.linalg.solve(jac, -g)
            except np.linalg.LinAlgError:
                break
            lam = 1.0
            improved = False
            while lam > 1e-4 and evals < eval_budget:
                try:
                    g_new = g_vec(x + lam * step)
                except SolverError:
                    lam *= 0.5
                    continue
                r_new = float(np.max(np.abs(g_new)))
                if r_new < r:
                    x = x + lam * step
                    g, r = g_new, r_new
                    improved = True
                    break
                lam *= 0.5
            best_overall = min(best_overall, r)
            if not improved:
                break
        if evals >= eval_budget:
            break
        if r <= tol:
            return _finish(S, Frame.spherical(*x), r)
    raise SolverError(
        f"spatial fan residual stalled at {best_overall:.3e} (tolerance {tol:.1e})"
    )


# ---------------------------------------------------------------------------
# sector-selection triangle certificate


def sector_triangle_certificate(m: int) -> int:
    """Guaranteed origin-containing triangles among one-per-sector choices."""
    if m < 2:
        raise InputError("need at least two hyperplanes")
    return (m + 1) * m * (m - 1) // 3


def one_per_sector_config(
    m: int, seed: int, *, collinear_pairs: int = 0
) -> PointSet:
    """2m rational points, one strictly inside each sector of a regular m-fan.

    Sector j spans angles (j*pi/m, (j+1)*pi/m).  With collinear_pairs = c,
    the points of the first c opposite sector pairs are exact negatives of
    each other (scaled), putting the origin on their connecting segment.
    """
    import random as _random

    if m < 2:
        raise InputError("need at least two hyperplanes")
    if not 0 <= collinear_pairs <= m:
        raise InputError("collinear pair count out of range")
    rng = _random.Random(seed)
    for _ in range(64):
        pts: list[tuple[Fraction, Fraction]] = []
        for j in range(2 * m):
            ang = (j + 0.1 + 0.8 * rng.random()) * math.pi / m
            rad = 0.5 + 1.5 * rng.random()
            x = Fraction(rad * math.cos(ang)).limit_denominator(10**9)
            y = Fraction(rad * math.sin(ang)).limit_denominator(10**9)
            pts.append((x, y))
        for j in range(collinear_pairs):
            scale = Fraction(rng.randint(1, 9), rng.randint(1, 9))
            pts[j + m] = (-scale * pts[j][0], -scale * pts[j][1])
        # certify sector membership and the collinearity pattern exactly
        ok = all(_sector_of(p, m) == j for j, p in enumerate(pts))
        if ok:
            for a in range(2 * m):
                for b in range(a + 1, 2 * m):
                    cr = pts[a][0] * pts[b][1] - pts[a][1] * pts[b][0]
                    is_pair = b - a == m and a < collinear_pairs
                    if (cr == 0) != is_pair:
                        ok = False
                        break
                if not ok:
                    break
        if ok:
            return PointSet(2, tuple(pts), label=f"sector-config m={m} seed={seed}")
    raise SolverError("could not realize a one-per-sector configuration")


def _sector_of(p: tuple[Fraction, Fraction], m: int) -> int:
    ang = math.atan2(float(p[1]), float(p[0])) % (2 * math.pi)
    return int(ang / (math.pi / m)) % (2 * m)


def sample_ball(n: int, d: int, seed: int, radius: float = 1.0) -> np.ndarray:
    """Uniform samples in a centered ball, as a float array."""
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n, d))
    z /= np.linalg.norm(z, axis=1)[:, None]
    r = radius * rng.random(n) ** (1.0 / d)
    return z * r[:, None]


def symmetrize(arr: np.ndarray) -> np.ndarray:
    """The union of a sample with its exact reflection through the origin."""
    return np.vstack([arr, -arr])


__all__ = [
    "Fan",
    "FanTestValue",
    "Frame",
    "balance_spine",
    "exact_sector_counts",
    "fan_quantile_angles",
    "halving_offset",
    "one_per_sector_config",
    "sample_ball",
    "sector_triangle_certificate",
    "solve_equipartition_fan",
    "symmetrize",
    "test_map",
]
