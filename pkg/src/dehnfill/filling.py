"""Dehn filling coefficients, the slope function T, cone data and the hexagon.

The filling coefficients ``(mu, lam)`` of a moduli point solve
``mu c + lam c omega = 2 pi i`` (the ``+`` branch; ``-(mu, lam)`` is the
other solution).  ``t = mu / (mu + lam)`` depends only on ``c``; along the
level curve of ``f`` it increases counterclockwise with one jump through
infinity, taking the values -1, 0, 1/2, 1, 2, inf on the loci l1..l6.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import CompleteStructureError, DegenerateLevelError, DomainError, NumericError
from .levelsets import MAX_LEVEL, check_level, level_point
from .moduli import solve_many, special_points
from .rootfind import illinois

INF = math.inf
#: relative size of mu + lam below which t is reported as infinite
GAP_TOL = 1e-11
#: t values on the loci p1..p6 of the upper arc
LOCUS_T = (-1.0, 0.0, 0.5, 1.0, 2.0, INF)

HEXAGON_VERTICES = ((2.0, 0.0), (0.0, 2.0), (-2.0, 2.0), (-2.0, 0.0), (0.0, -2.0), (2.0, -2.0))
#: the six boundary segments, each as (label, start, end)
HEXAGON_EDGES = (
    ("mu+lambda=2", (2.0, 0.0), (0.0, 2.0)),
    ("lambda=2", (0.0, 2.0), (-2.0, 2.0)),
    ("mu=-2", (-2.0, 2.0), (-2.0, 0.0)),
    ("mu+lambda=-2", (-2.0, 0.0), (0.0, -2.0)),
    ("lambda=-2", (0.0, -2.0), (2.0, -2.0)),
    ("mu=2", (2.0, -2.0), (2.0, 0.0)),
)


@dataclass(frozen=True)
class FillingData:
    """Filling coefficients on the ``+2 pi i`` branch.

    ``t`` is ``None`` at the complete structure, where ``mu = lam = inf``.
    """

    mu: float
    lam: float
    t: float
    sign: int = 1

    def negated(self):
        """The equally valid ``-2 pi i`` solution; ``t`` is unchanged."""
        return FillingData(-self.mu, -self.lam, self.t, -self.sign)


@dataclass(frozen=True)
class ConeData:
    p: int
    q: int
    angle: float
    length: float


def _slope(c, cw):
    re_c, re_w = np.real(c), np.real(cw)
    den = re_w - re_c
    gap = np.abs(den) <= GAP_TOL * (np.abs(re_w) + np.abs(re_c))
    with np.errstate(divide="ignore", invalid="ignore"):
        t = re_w / den
    return np.where(gap, INF, t)


def _coefficients(c, cw):
    det = (np.conj(c) * cw).imag
    mu = -2.0 * math.pi * np.real(cw) / det
    lam = 2.0 * math.pi * np.real(c) / det
    return mu, lam


def _check_strip(c):
    c = complex(c)
    if not (math.isfinite(c.real) and math.isfinite(c.imag)):
        raise DomainError("c must be finite")
    if abs(c.imag) >= math.pi:
        raise DomainError("c outside the strip |Im c| < pi")
    return c


def filling_coefficients(c):
    """Dehn filling coefficients of the moduli point with affine parameter ``c``.

    Solves ``[[Re c, Re cw], [Im c, Im cw]] (mu, lam) = (0, 2 pi)``; the
    determinant ``|c|^2 Im(omega)`` is positive.  ``c = 0`` gives ``(inf, inf)``.
    """
    c = _check_strip(c)
    if c == 0:
        return FillingData(INF, INF, None)
    cw = complex(solve_many(c).c1[0])
    mu, lam = _coefficients(c, cw)
    return FillingData(float(mu), float(lam), float(_slope(c, cw)))


def filling_many(c, **solver):
    """Vectorized ``(solutions, mu, lam, t)`` for nonzero ``c`` in the strip.

    Keyword arguments go to :func:`solve_many`.
    """
    sol = solve_many(c, **solver)
    mu, lam = _coefficients(sol.c, sol.c1)
    return sol, mu, lam, _slope(sol.c, sol.c1)


def slope_t(c):
    """Slope-like number ``t = Re(c omega) / (Re(c omega) - Re(c))``; ``inf`` on the gap."""
    c = _check_strip(c)
    if c == 0:
        raise CompleteStructureError("t is undefined at the complete structure")
    return float(_slope(c, solve_many(c).c1[0]))


def basis_complement(p, q):
    """Integers ``(r, s)`` with ``p s - q r = 1`` and the smallest ``s >= 0``."""
    if math.gcd(p, q) != 1:
        raise DomainError(f"(p, q) = ({p}, {q}) is not coprime")
    if q == 0:
        return 0, p
    s = pow(p, -1, abs(q))
    r, rem = divmod(p * s - 1, q)
    assert rem == 0
    return r, s


def cone_data(c, p, q):
    """Cone angle ``|Im(p c + q c omega)|`` and singular length ``|Re(r c + s c omega)|``."""
    c = _check_strip(c)
    if c == 0:
        raise CompleteStructureError("cone data needs c != 0")
    r, s = basis_complement(p, q)
    cw = complex(solve_many(c).c1[0])
    return ConeData(p, q, abs((p * c + q * cw).imag), abs((r * c + s * cw).real))


def limit_cone_angle(p, q):
    """Limit of the cone angle along ``t = p / (p + q)`` as the boundary is approached.

    The limit ``(mu, lam)`` sits on the edge ``mu + lam = 2`` for t in [0, 1],
    on ``mu = 2`` for t >= 1 (including t = inf) and on ``lam = 2`` for t <= 0
    (up to the overall sign), so the angle ``2 pi p / mu`` is ``|p + q| pi``,
    ``|p| pi`` or ``|q| pi`` respectively.
    """
    if p + q == 0:
        return abs(p) * math.pi
    t = p / (p + q)
    if 0 <= t <= 1:
        return abs(p + q) * math.pi
    return abs(p) * math.pi if t > 1 else abs(q) * math.pi


def _upper_bracket(t):
    """Index j such that T = t has its root on the arc from p_{j+1} to p_{j+2}."""
    if t == INF or t < -1.0:
        return 5
    return next(j for j in range(5) if LOCUS_T[j] <= t <= LOCUS_T[j + 1])


def _t_residual(t, s):
    """Continuous function of theta vanishing where T = t on L_s."""
    def fun(theta):
        c = level_point(s, theta)
        cw = solve_many(c).c1
        if t == INF:
            return np.real(c) - np.real(cw)
        return t * np.real(c) + (1.0 - t) * np.real(cw)
    return fun


def _t_theta(t, s, seed=None):
    if isinstance(t, float) and math.isnan(t):
        raise DomainError("t must not be NaN")
    pts = special_points(s)
    angles = [0.0] + [math.atan2(p.imag, p.real) for p in pts[1:6]] + [math.pi]
    for j, tj in enumerate(LOCUS_T):
        if t == tj:
            return angles[j]
    j = _upper_bracket(t)
    lo, hi = angles[j], angles[j + 1]
    fun = _t_residual(t, s)
    if seed is not None and lo < seed < hi:
        # local bracket around the previous solution, widened until it straddles
        width = 1e-3
        while width < hi - lo:
            a, b = max(lo, seed - width), min(hi, seed + width)
            fa, fb = fun(np.array([a, b]))
            if fa * fb <= 0.0:
                return float(illinois(fun, [a], [b], [fa], [fb])[0])
            width *= 8.0
    fa, fb = fun(np.array([lo, hi]))
    if fa * fb > 0.0:
        raise NumericError("no bracket for the T level", t=t, s=s, lo=lo, hi=hi, fa=fa, fb=fb)
    return float(illinois(fun, [lo], [hi], [fa], [fb])[0])


def t_level_point(t, s):
    """Point ``c`` on the upper arc of ``L_s`` (from l1 to l7) with ``T(c) = t``.

    ``t = -1`` returns ``p1``.  Values below -1 sit on the arc between l6 and
    l7, past the jump through infinity.
    """
    check_level(s)
    return complex(level_point(s, _t_theta(t, s)))


def boundary_trace(t, s_list):
    """Follow the level set ``T = t`` through increasing levels ``s_list``.

    Each solve is seeded with the previous angle.  Returns ``(c, FillingData)``
    pairs on the ``+2 pi i`` branch.
    """
    s_list = [float(s) for s in s_list]
    if any(b <= a for a, b in zip(s_list, s_list[1:])):
        raise DomainError("s_list must be strictly increasing")
    if s_list and s_list[-1] >= MAX_LEVEL:
        raise DegenerateLevelError("level too close to 1")
    out = []
    theta = None
    for s in s_list:
        check_level(s)
        theta = _t_theta(t, s, seed=theta)
        c = complex(level_point(s, theta))
        cw = complex(solve_many(c).c1[0])
        mu, lam = _coefficients(c, cw)
        out.append((c, FillingData(float(mu), float(lam), float(_slope(c, cw)))))
    return out


def hexagon_contains(mu, lam, tol=0.0):
    """True iff ``|mu| <= 2``, ``|lam| <= 2`` and ``|mu + lam| <= 2`` (inflated by ``tol``)."""
    bound = 2.0 + tol
    return abs(mu) <= bound and abs(lam) <= bound and abs(mu + lam) <= bound


def edge_distances(mu, lam):
    """Distances from points ``(mu, lam)`` to each of the six hexagon edges, shape (n, 6)."""
    pts = np.column_stack([np.atleast_1d(mu), np.atleast_1d(lam)]).astype(float)
    out = np.empty((pts.shape[0], len(HEXAGON_EDGES)))
    for k, (_, a, b) in enumerate(HEXAGON_EDGES):
        a = np.asarray(a)
        d = np.asarray(b) - a
        u = np.clip(((pts - a) @ d) / (d @ d), 0.0, 1.0)
        out[:, k] = np.hypot(*(pts - a - u[:, None] * d).T)
    return out
