"""Vectorized bracketed root finding used by the level-set and moduli code."""

import numpy as np

from .errors import NumericError


def illinois(fun, a, b, fa=None, fb=None, xtol=1e-14, max_iter=200):
    """Refine many brackets at once with the Illinois variant of regula falsi.

    ``fun`` maps an array of abscissae to an array of values of the same
    shape.  Every bracket ``[a, b]`` must carry a sign change.  Steps that
    would leave the bracket fall back to bisection, so convergence is never
    worse than bisection.
    """
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    fa = fun(a) if fa is None else np.array(fa, dtype=float)
    fb = fun(b) if fb is None else np.array(fb, dtype=float)
    if np.any(np.sign(fa) * np.sign(fb) > 0):
        raise NumericError("illinois: bracket without sign change", a=a, b=b, fa=fa, fb=fb)

    # b is always the latest iterate; a the retained opposite end.
    done = (fb == 0) | (fa == 0)
    b = np.where(fa == 0, a, b)
    for _ in range(max_iter):
        if np.all(done):
            return b
        with np.errstate(invalid="ignore", divide="ignore"):
            x = (a * fb - b * fa) / (fb - fa)
        lo = np.minimum(a, b)
        hi = np.maximum(a, b)
        bad = ~np.isfinite(x) | (x <= lo) | (x >= hi)
        x = np.where(bad, 0.5 * (a + b), x)
        x = np.where(done, b, x)
        fx = fun(x)
        flip = np.sign(fx) * np.sign(fb) < 0
        a_new = np.where(flip, b, a)
        fa_new = np.where(flip, fb, 0.5 * fa)
        a = np.where(done, a, a_new)
        fa = np.where(done, fa, fa_new)
        width = np.abs(x - a)
        moved = np.abs(x - b)
        b = np.where(done, b, x)
        fb = np.where(done, fb, fx)
        done = done | (fx == 0) | (width <= xtol) | (moved <= 0.5 * xtol)
    if not np.all(done):
        raise NumericError("illinois: no convergence", a=a, b=b, fa=fa, fb=fb)
    return b
