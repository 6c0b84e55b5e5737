"""Moduli of one-circle packings: affine parameter c  ->  Teichmueller parameter omega.

For ``c`` on the level curve ``L_s`` there are exactly two points ``c1, c2``
on the same curve with ``c1 = c + c2`` and ``c, c1, c2`` counterclockwise;
then ``omega = c1 / c``.  The points ``c1`` are the intersections of ``L_s``
with its translate ``L_s + c``, located by scanning an angular grid for sign
changes and refining each bracket.

The twelve special points ``p1..p12`` of a level curve, their loci ``l1..l12``
and the open regions ``C1..C12`` between them live here as well.
"""

from dataclasses import dataclass
from enum import Enum
import math

import numpy as np

from .errors import CompleteStructureError, DomainError, NumericError
from .levelsets import _gap, _radius, check_level, f_value, imag_radius, real_radius
from .rootfind import illinois

THETA_GRID = 720
ROOT_XTOL = 1e-14
ANGLE_TOL = 1e-9
#: rows per vectorized block; bounds the (rows x grid) temporaries
BLOCK = 1024

OMEGA0 = complex(0.5, math.sqrt(3.0) / 2.0)

RegionId = Enum(
    "RegionId",
    [(f"C{k}", f"C{k}") for k in range(1, 13)]
    + [(f"l{k}", f"l{k}") for k in range(1, 13)]
    + [("ORIGIN", "ORIGIN")],
    type=str,
)


def region_kind(region):
    """'C', 'l' or 'ORIGIN'."""
    return "ORIGIN" if region is RegionId.ORIGIN else region.value[0]


def region_index(region):
    """1-based index of a region or locus; 0 for the origin."""
    return 0 if region is RegionId.ORIGIN else int(region.value[1:])


@dataclass(frozen=True)
class ModuliPoint:
    """A solved point of the moduli space.  Immutable; ``c1 = c + c2``."""

    c: complex
    omega: complex
    c1: complex
    c2: complex
    s: float
    region: RegionId

    @property
    def residual(self):
        """Max deviation of ``f(c1)``, ``f(c2)`` from ``f(c)``."""
        fc = f_value(self.c)
        return max(abs(f_value(self.c1) - fc), abs(f_value(self.c2) - fc))


@dataclass
class Solutions:
    """Vectorized solver output, one entry per input ``c``."""

    c: np.ndarray
    s: np.ndarray
    omega: np.ndarray
    c1: np.ndarray
    c2: np.ndarray
    roots: np.ndarray


def _check_c(c):
    c = np.atleast_1d(np.asarray(c, dtype=complex))
    if not np.all(np.isfinite(c)):
        raise DomainError("c must be finite")
    if np.any(np.abs(c.imag) >= math.pi):
        raise DomainError("c outside the strip |Im c| < pi")
    if np.any(c == 0):
        raise CompleteStructureError("c = 0 is the complete structure; omega is not determined by it")
    return c


def _orientation(a, b, d):
    return ((b - a).conjugate() * (d - a)).imag


def _solve_block(c, s, grid, xtol):
    n = c.size
    theta = np.linspace(0.0, 2.0 * math.pi, grid, endpoint=False)
    radii = _radius(s[:, None], theta[None, :])
    pts = radii * np.exp(1j * theta)[None, :]
    diff = pts - c[:, None]
    h = _gap(diff.real, diff.imag, s[:, None])
    pos = h >= 0.0
    rising = ~pos & np.roll(pos, -1, axis=1)
    falling = pos & ~np.roll(pos, -1, axis=1)
    roots = rising.sum(axis=1) + falling.sum(axis=1)
    if np.any(roots != 2):
        bad = np.flatnonzero(roots != 2)[0]
        raise NumericError(
            f"expected 2 intersections of L_s and L_s + c, found {roots[bad]}",
            c=c[bad], s=s[bad], theta=theta, h=h[bad])

    k = np.concatenate([rising.argmax(axis=1), falling.argmax(axis=1)])
    row = np.concatenate([np.arange(n), np.arange(n)])
    a = theta[k]
    b = a + 2.0 * math.pi / grid
    fa = h[row, k]
    fb = h[row, (k + 1) % grid]
    cc = c[row]
    ss = s[row]

    def curve_gap(t):
        z = _radius(ss, t) * np.exp(1j * t) - cc
        return _gap(z.real, z.imag, ss)

    t = illinois(curve_gap, a, b, fa, fb, xtol=xtol)
    q = _radius(ss, t) * np.exp(1j * t)
    q_rise, q_fall = q[:n], q[n:]
    # The counterclockwise exit from the arc around c is c1; the orientation
    # test settles it independently of the grid bookkeeping.
    ccw = _orientation(c, q_rise, q_rise - c) > 0.0
    c1 = np.where(ccw, q_rise, q_fall)
    if np.any(_orientation(c, c1, c1 - c) <= 0.0):
        raise NumericError("no counterclockwise parallelogram found", c=c)
    return c1, roots


def solve_many(c, grid=THETA_GRID, xtol=ROOT_XTOL):
    """Solve the parallelogram condition for an array of affine parameters.

    ``grid`` is the number of scan angles, ``xtol`` the angular tolerance of
    the bracket refinement.
    """
    if grid < 64:
        raise DomainError("theta grid must have at least 64 points")
    if not xtol > 0:
        raise DomainError("xtol must be positive")
    c = _check_c(c)
    s = f_value(c)
    check_level(s)
    c1 = np.empty_like(c)
    roots = np.empty(c.size, dtype=int)
    for start in range(0, c.size, BLOCK):
        sl = slice(start, start + BLOCK)
        c1[sl], roots[sl] = _solve_block(c[sl], s[sl], grid, xtol)
    # rebuild c1 from c2 so that c1 == c + c2 holds bit for bit
    c2 = c1 - c
    c1 = c + c2
    return Solutions(c=c, s=s, omega=c1 / c, c1=c1, c2=c2, roots=roots)


def special_points_many(s):
    """Rows of the twelve special points p1..p12 for each level in ``s``.

    Axis symmetry pins ``Re p3 = Re p1 / 2`` and ``Im p2 = Im p4 / 2``, so
    each point is the crossing of ``L_s`` with an axis-parallel line and
    has a closed form.
    """
    s = np.atleast_1d(check_level(s))
    a = real_radius(s)
    b = imag_radius(s)
    # Re = a/2:  cos(y/2) = (1 - s) cosh(a/4), written via 1 - cos and cosh - 1
    gap3 = s - (1.0 - s) * 2.0 * np.sinh(a / 8.0) ** 2
    y3 = 4.0 * np.arcsin(np.sqrt(0.5 * gap3))
    # Im = b/2:  cosh(x/2) = cos(b/4) / (1 - s)
    d2 = (s - 2.0 * np.sin(b / 8.0) ** 2) / (1.0 - s)
    x2 = 2.0 * np.log1p(d2 + np.sqrt(d2 * (d2 + 2.0)))
    p1 = a.astype(complex)
    p10 = -1j * b
    p3 = 0.5 * a + 1j * y3
    p2 = x2 + 0.5j * b
    return _assemble(p1, p10, p3, p3 - p1, p2 + p10, p2)


def _assemble(p1, p10, p3, p5, p12, p2):
    return np.stack([p1, p2, p3, -p10, p5, -p12, -p1, -p2, -p3, p10, -p5, p12], axis=-1)


def special_points(s):
    """The twelve special points of ``L_s``, counterclockwise from the positive real axis.

    ``p1, p7`` are on the real axis and ``p4, p10`` on the imaginary axis;
    ``p3, p5`` are the ``c1, c2`` of ``p1`` and ``p12, p2`` those of ``p10``.
    The rest follow from ``p_{i+6} = -p_i``.
    """
    if np.ndim(s) != 0:
        raise DomainError("special_points takes a single level; use special_points_many")
    return [complex(p) for p in special_points_many(s)[0]]


def locus_point(j, s):
    """Point of the locus ``l_j`` on the level ``s`` (j = 1..12)."""
    if not 1 <= j <= 12:
        raise DomainError(f"locus index must be in 1..12, got {j}")
    return special_points(s)[j - 1]


def _classify_rows(c, s, pts):
    out = []
    arg_c = np.mod(np.angle(c), 2.0 * math.pi)
    arg_p = np.mod(np.angle(pts), 2.0 * math.pi)
    arg_p[:, 0] = 0.0
    for ac, ap in zip(arg_c, arg_p):
        dist = np.abs((ac - ap + math.pi) % (2.0 * math.pi) - math.pi)
        j = int(dist.argmin())
        if dist[j] <= ANGLE_TOL:
            out.append(RegionId(f"l{j + 1}"))
            continue
        # arc k runs from p_k to p_{k+1}; p_1 sits at angle 0
        k = int(np.searchsorted(ap, ac, side="right"))
        out.append(RegionId(f"C{k}"))
    return out


def classify_many(c):
    """Region labels for an array of points in the strip."""
    c = np.atleast_1d(np.asarray(c, dtype=complex))
    if np.any(np.abs(c.imag) >= math.pi) or not np.all(np.isfinite(c)):
        raise DomainError("c outside the strip |Im c| < pi")
    out = [RegionId.ORIGIN] * c.size
    nz = np.flatnonzero(c != 0)
    if nz.size:
        s = f_value(c[nz])
        pts = special_points_many(s)
        for i, r in zip(nz, _classify_rows(c[nz], s, pts)):
            out[i] = r
    return out


def classify(c):
    """Which of the loci l1..l12 or open regions C1..C12 contains ``c``.

    Angular ties within ``ANGLE_TOL`` radians go to the locus.
    """
    return classify_many(c)[0]


def solve_parallelogram(c):
    """Solve for the Teichmueller parameter of the affine parameter ``c``.

    Raises
    ------
    CompleteStructureError
        For ``c = 0``.
    DomainError
        For ``|Im c| >= pi``.
    NumericError
        If the angular scan does not find exactly two intersections.
    """
    c = complex(_check_c(c)[0])
    s = f_value(c)
    check_level(s)
    sol = solve_many(c)
    region = _classify_rows(np.array([c]), np.array([s]), special_points_many(s))[0]
    return ModuliPoint(c=c, omega=complex(sol.omega[0]), c1=complex(sol.c1[0]),
                       c2=complex(sol.c2[0]), s=float(s), region=region)


def omega(c):
    """Teichmueller parameter of ``c``; cheaper than a full ``solve_parallelogram``."""
    return complex(solve_many(c).omega[0])


def fiber_partner(c):
    """The other affine parameter with the same omega, namely ``-c``."""
    c = complex(c)
    if c == 0:
        raise DomainError("c = 0 has no fiber partner")
    return -c


def rotate6(c):
    """Order-6 symmetry ``c -> c * omega(c)``; three steps give ``-c``."""
    return complex(solve_many(c).c1[0])


__all__ = [
    "ModuliPoint", "RegionId", "Solutions", "OMEGA0", "THETA_GRID",
    "solve_parallelogram", "solve_many", "omega", "fiber_partner", "rotate6",
    "special_points", "special_points_many", "locus_point", "classify", "classify_many",
    "region_kind", "region_index",
]
