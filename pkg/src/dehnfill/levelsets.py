"""Level function on the strip |Im z| < pi and its star-shaped level curves.

The function is ``f(z) = 1 - cos(Im z / 2) / cosh(Re z / 2)``.  Its level
curves ``L_s`` (0 < s < 1) are convex loops around the origin, symmetric in
both axes, so each one is parametrized by its polar radius ``r(s, theta)``.

Everything here accepts scalars or numpy arrays and returns the same kind.
"""

import numpy as np

from .errors import DegenerateLevelError, DomainError, NumericError

#: levels at or above this are rejected; the real radius grows like -2 log(1 - s)
MAX_LEVEL = 1.0 - 1e-12
RADIUS_MAX_ITER = 200

_EPS = np.finfo(float).eps


def _parts(x, y):
    """Shared pieces: e = exp(-|x|/2), 1 - e, cos(y/2), sin(y/2), sech(x/2)."""
    em = -np.expm1(-0.5 * np.abs(x))
    e = 1.0 - em
    cy = np.cos(0.5 * y)
    sy = np.sin(0.5 * y)
    sech = 2.0 * e / (1.0 + e * e)
    return e, em, cy, sy, sech


def _f_parts(e, em, cy, sy, sech):
    # f = (cosh(x/2) - 1 + 1 - cos(y/2)) sech(x/2) with both differences
    # rewritten cancellation-free: cosh - 1 = (1 - e)^2 / 2e, 1 - cos = sin^2 / (1 + cos).
    with np.errstate(divide="ignore", invalid="ignore"):
        inner = (em * em + 2.0 * e * sy * sy / (1.0 + cy)) / (1.0 + e * e)
    return np.where(cy > 0.0, inner, 1.0 - cy * sech)


def _f_xy(x, y):
    return _f_parts(*_parts(x, y))


def _gap_parts(parts, s):
    e, em, cy, sy, sech = parts
    # near s = 1 compare 1 - f = cos(y/2) sech(x/2) directly
    return np.where(s > 0.5, (1.0 - s) - cy * sech, _f_parts(*parts) - s)


def _gap(x, y, s):
    """f(x + iy) - s, evaluated on whichever side keeps full relative precision."""
    return _gap_parts(_parts(x, y), s)


def _scalar_or_array(value, *inputs):
    if all(np.ndim(v) == 0 for v in inputs):
        return value.item() if isinstance(value, np.ndarray) else value
    return value


def f_value(z):
    """Evaluate the level function.

    Values lie in [0, 1) on the strip |Im z| < pi and are >= 1 for
    pi <= |Im z| < 3 pi, which is what rejects spurious roots outside the strip.
    """
    z = np.asarray(z, dtype=complex)
    return _scalar_or_array(_f_xy(z.real, z.imag), z)


def level_gap(z, s):
    """``f(z) - s`` computed without cancellation near s = 0 and s = 1."""
    z = np.asarray(z, dtype=complex)
    return _scalar_or_array(_gap(z.real, z.imag, np.asarray(s, dtype=float)), z, s)


def real_radius(s):
    """Positive real root of f = s, i.e. 2 arccosh(1 / (1 - s))."""
    s = np.asarray(s, dtype=float)
    d = s / (1.0 - s)
    return 2.0 * np.log1p(d + np.sqrt(d * (d + 2.0)))


def imag_radius(s):
    """Positive imaginary root of f = s, i.e. 2 arccos(1 - s)."""
    s = np.asarray(s, dtype=float)
    return 4.0 * np.arcsin(np.sqrt(0.5 * s))


def check_level(s):
    """Validate one level or an array of levels; returns it as a float array."""
    s = np.asarray(s, dtype=float)
    if not np.all(np.isfinite(s)):
        raise DomainError("level must be finite")
    if np.any(s < 0.0) or np.any(s >= 1.0):
        raise DomainError(f"level outside [0, 1): {s}")
    if np.any(s == 0.0):
        raise DegenerateLevelError("level s = 0 is the single point 0")
    if np.any(s >= MAX_LEVEL):
        raise DegenerateLevelError(f"level too close to 1 (limit {MAX_LEVEL!r})")
    return s


def _log_cos(u):
    # log cos u for 0 <= u < pi/2; log1p branch keeps precision near u = 0
    with np.errstate(divide="ignore", invalid="ignore"):
        half = np.sin(0.5 * u)
        return np.where(u < 1.0, np.log1p(-2.0 * half * half), np.log(np.cos(u)))


def _log_cosh(v):
    # v >= 0
    small = np.log1p(2.0 * np.sinh(0.5 * np.minimum(v, 1.0)) ** 2)
    large = v + np.log1p(np.exp(-2.0 * v)) - np.log(2.0)
    return np.where(v < 1.0, small, large)


def _radius(s, theta):
    """Vectorized radius solve.  Inputs are assumed validated and broadcastable.

    Works with G(r) = log cos(y/2) - log cosh(x/2) - log(1 - s) along the
    ray, which is concave and decreasing; Newton on a concave decreasing
    function overshoots at most once and then converges monotonically.
    """
    s, theta = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(theta, dtype=float))
    # f is even in x and y, so work in the first quadrant
    cos_t = np.abs(np.cos(theta))
    sin_t = np.abs(np.sin(theta))
    a = real_radius(s)
    b = imag_radius(s)
    log_level = np.log1p(-s)

    # The sublevel set sits inside the box |x| <= a, |y| <= b, so a + b
    # over-brackets; the cap keeps the far end inside |Im| <= pi where f >= s.
    with np.errstate(divide="ignore", over="ignore"):
        cap = np.where(sin_t > 0.0, np.pi / sin_t, np.inf)
    hi = np.minimum(a + b, cap)
    lo = np.zeros_like(hi)
    f_hi = _gap(hi * cos_t, hi * sin_t, s)
    if np.any(f_hi < 0.0):
        raise NumericError("level_radius: upper bracket below level",
                           s=s[f_hi < 0.0], theta=theta[f_hi < 0.0])

    # ellipse with the same axis radii as the starting guess
    r = np.minimum(1.0 / np.sqrt((cos_t / a) ** 2 + (sin_t / b) ** 2), hi)
    for _ in range(RADIUS_MAX_ITER):
        u = 0.5 * r * sin_t
        v = 0.5 * r * cos_t
        inside = u < 0.5 * np.pi
        u = np.where(inside, u, 0.0)
        g = np.where(inside, _log_cos(u) - _log_cosh(v) - log_level, -np.inf)
        tan_u = np.tan(u)
        tanh_v = np.tanh(v)
        slope = -0.5 * (sin_t * tan_u + cos_t * tanh_v)
        curv = 0.25 * (sin_t ** 2 * (1.0 + tan_u ** 2) + cos_t ** 2 * (1.0 - tanh_v ** 2))
        above = g > 0.0
        lo = np.where(above, r, lo)
        hi = np.where(above, hi, r)
        with np.errstate(invalid="ignore", divide="ignore"):
            step = g / slope
        r_new = r - step
        outside = ~np.isfinite(r_new) | (r_new <= lo) | (r_new >= hi)
        settled = (g == 0.0) | (np.abs(step) <= 8.0 * _EPS * r) | (hi - lo <= 8.0 * _EPS * hi)
        # Newton error after this step is about step^2 |G''| / (2 |G'|)
        with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
            err_next = curv * step * step / (2.0 * np.abs(slope))
        final = ~settled & ~outside & (err_next <= 2.0 * _EPS * r)
        converged = settled | final
        r = np.where(settled, r, np.where(outside, 0.5 * (lo + hi), r_new))
        if np.all(converged):
            return r
    raise NumericError("level_radius: no convergence", s=s[~converged], theta=theta[~converged],
                       lo=lo[~converged], hi=hi[~converged])


def level_radius(s, theta):
    """Radius of the level curve ``L_s`` in direction ``theta``.

    Returns the unique ``r > 0`` with ``f(r exp(i theta)) = s``.  The solve is
    a bracketed iteration (Newton inside the bracket, bisection whenever Newton
    would leave it) and converges to a few ulps.

    Raises
    ------
    DegenerateLevelError
        For ``s = 0`` (the curve is the single point 0) or ``s`` too close to 1.
    NumericError
        If the bracket cannot be established or the iteration stalls.
    """
    check_level(s)
    return _scalar_or_array(_radius(s, theta), s, theta)


def level_point(s, theta):
    """Point ``level_radius(s, theta) * exp(i theta)`` on ``L_s``."""
    z = level_radius(s, theta) * np.exp(1j * np.asarray(theta, dtype=float))
    return _scalar_or_array(z, s, theta)
