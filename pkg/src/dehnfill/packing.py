"""Developed one-circle packings, their dual circles and validation.

For a moduli point ``(omega, c)`` the developing map ``z -> exp(c z)`` sends
the hexagonal lattice ``m + n omega`` to the points ``exp(m c + n c omega)``.
Circle ``(m, n)`` is centered there with radius ``kappa * |center|`` where
``kappa = sqrt(s (2 - s))``.  The base circle is centered at 1.
"""

from dataclasses import dataclass, field, replace
import cmath
import itertools
import math

import numpy as np

from .errors import DomainError, NumericError, WindowError
from .levelsets import f_value
from .moduli import OMEGA0, solve_many

PACKING = "PACKING"
DUAL = "DUAL"
#: nerve edges: alpha, beta and beta alpha^-1 together with their inverses
NEIGHBOURS = ((1, 0), (-1, 0), (0, 1), (0, -1), (-1, 1), (1, -1))
MAX_EXPONENT = 300.0
OVERLAP_SLACK = 1e-9


@dataclass(frozen=True)
class CircleSpec:
    center: complex
    radius: float
    label: tuple
    kind: str = PACKING


@dataclass
class PackingSpec:
    """A developed packing on a window of lattice labels.

    For the euclidean packing ``kappa`` is 0 (the limit value) and the
    multipliers are the translation vectors ``1`` and ``omega0``.
    """

    c: complex
    omega: complex
    kappa: float
    multipliers: tuple
    circles: list
    duals: list = field(default_factory=list)
    adjacency: list = field(default_factory=list)
    euclidean: bool = False

    def by_label(self):
        return {circ.label: circ for circ in self.circles}


@dataclass(frozen=True)
class ValidationReport:
    max_tangency_residual: float
    max_orthogonality_residual: float
    local_overlap_violations: int

    def ok(self, tol):
        return (self.max_tangency_residual < tol and self.max_orthogonality_residual < tol
                and self.local_overlap_violations == 0)


def _window_labels(window):
    """Accepts an int ``w`` (labels -w..w squared) or ((m0, m1), (n0, n1)) inclusive."""
    if isinstance(window, int):
        if window < 0:
            raise DomainError("window must be nonnegative")
        (m0, m1), (n0, n1) = (-window, window), (-window, window)
    else:
        (m0, m1), (n0, n1) = window
    if m1 < m0 or n1 < n0:
        raise DomainError(f"empty window {window}")
    return [(m, n) for m in range(m0, m1 + 1) for n in range(n0, n1 + 1)]


def _adjacency(labels):
    present = set(labels)
    edges = []
    for m, n in labels:
        for dm, dn in NEIGHBOURS[::2]:
            other = (m + dm, n + dn)
            if other in present:
                edges.append(((m, n), other))
    # (1, 0), (0, 1) and (-1, 1) cover each undirected edge exactly once
    return edges


def kappa_for_level(s):
    """Radius-to-center ratio ``sqrt(1 - (1 - s)^2)`` of the developed circles."""
    return math.sqrt(s * (2.0 - s))


def build_affine_packing(c, window=3, kappa_scale=1.0):
    """Developed packing of the affine torus with parameter ``c``.

    ``kappa_scale`` is a fault-injection hook for negative tests; leave it at 1.
    """
    c = complex(c)
    if c == 0:
        raise DomainError("c = 0 is the euclidean packing; use build_euclidean_packing")
    cw = complex(solve_many(c).c1[0])
    labels = _window_labels(window)
    exps = np.array([m * c + n * cw for m, n in labels])
    if np.max(np.abs(exps.real)) > MAX_EXPONENT:
        raise WindowError(f"window reaches |Re exponent| = {np.max(np.abs(exps.real)):.1f} > {MAX_EXPONENT}")
    s = float(f_value(c))
    kappa = kappa_for_level(s) * kappa_scale
    centers = np.exp(exps)
    circles = [CircleSpec(complex(z), kappa * abs(z), lab) for z, lab in zip(centers, labels)]
    spec = PackingSpec(c=c, omega=cw / c, kappa=kappa, multipliers=(cmath.exp(c), cmath.exp(cw)),
                       circles=circles, adjacency=_adjacency(labels))
    spec.duals = dual_circles(spec)
    return spec


def build_euclidean_packing(window=3):
    """Hexagonal packing: radius 1/2 circles centered at ``m + n omega0``."""
    labels = _window_labels(window)
    circles = [CircleSpec(complex(m + n * OMEGA0), 0.5, (m, n)) for m, n in labels]
    spec = PackingSpec(c=0j, omega=OMEGA0, kappa=0.0, multipliers=(1 + 0j, OMEGA0),
                       circles=circles, adjacency=_adjacency(labels), euclidean=True)
    spec.duals = dual_circles(spec)
    return spec


def _tangency_point(a, b):
    d = b.center - a.center
    return a.center + a.radius * d / abs(d)


def _circumcircle(p, q, r):
    # center solves |z - p| = |z - q| = |z - r|
    qp, rp = q - p, r - p
    den = 2.0 * (qp.conjugate() * rp).imag
    if abs(den) <= 1e-300 or abs(den) < 1e-14 * abs(qp) * abs(rp):
        raise NumericError("collinear tangency points", points=(p, q, r))
    z = 1j * (abs(rp) ** 2 * qp - abs(qp) ** 2 * rp) / den
    return p + z, abs(z)


def interstices(labels):
    """The two triangle classes {(m,n),(m+1,n),(m,n+1)} and {(m+1,n),(m,n+1),(m+1,n+1)}."""
    present = set(labels)
    out = []
    for m, n in labels:
        up = ((m, n), (m + 1, n), (m, n + 1))
        down = ((m + 1, n), (m, n + 1), (m + 1, n + 1))
        out.extend(tri for tri in (up, down) if all(x in present for x in tri))
    return out


def dual_circles(p):
    """Circles through the three tangency points of each interstice in the window."""
    circ = p.by_label()
    duals = []
    for tri in interstices(list(circ)):
        a, b, d = (circ[x] for x in tri)
        center, radius = _circumcircle(_tangency_point(a, b), _tangency_point(b, d),
                                       _tangency_point(d, a))
        duals.append(CircleSpec(complex(center), float(radius), tri, DUAL))
    return duals


def validate_packing(p):
    """Tangency and orthogonality residuals plus a count of local overlaps.

    Overlaps are only checked between labels with ``|dm| + |dn| <= 2``.  In
    the affine case the circles live on the universal cover of C - {0}: the
    lift of circle (m, n) spans arguments within ``asin(kappa)`` of
    ``Im(m c + n c omega)``, and two circles on different sheets may cover
    each other in the plane legitimately, so such pairs are skipped.
    """
    circ = p.by_label()
    tangency = 0.0
    for u, v in p.adjacency:
        a, b = circ[u], circ[v]
        scale = a.radius + b.radius
        tangency = max(tangency, abs(abs(a.center - b.center) - scale) / scale)

    orth = 0.0
    for d in p.duals:
        for lab in d.label:
            a = circ[lab]
            lhs = abs(d.center - a.center) ** 2
            rhs = d.radius ** 2 + a.radius ** 2
            orth = max(orth, abs(lhs - rhs) / rhs)

    overlaps = 0
    labels = list(circ)
    cw = p.c * p.omega
    spread = 2.0 * math.asin(min(p.kappa, 1.0))
    for u, v in itertools.combinations(labels, 2):
        dm, dn = v[0] - u[0], v[1] - u[1]
        if abs(dm) + abs(dn) > 2:
            continue
        if not p.euclidean and abs((dm * p.c + dn * cw).imag) >= spread:
            continue
        a, b = circ[u], circ[v]
        scale = a.radius + b.radius
        if abs(a.center - b.center) < scale * (1.0 - OVERLAP_SLACK):
            overlaps += 1
    return ValidationReport(float(tangency), float(orth), overlaps)


def shift_labels(p, dm, dn):
    """Apply the deck transformation (m, n) -> (m + dm, n + dn) to every circle.

    Centers and radii are multiplied by ``e^(dm c + dn c omega)`` in modulus.
    """
    if p.euclidean:
        step = dm + dn * p.omega
        move = lambda circ: replace(circ, center=circ.center + step)
    else:
        factor = p.multipliers[0] ** dm * p.multipliers[1] ** dn
        move = lambda circ: replace(circ, center=circ.center * factor, radius=circ.radius * abs(factor))
    return [replace(move(circ), label=(circ.label[0] + dm, circ.label[1] + dn)) for circ in p.circles]
