"""Small certified numeric routines.

Plain bisection and golden-section search are used instead of faster
library root finders because convergence reports quote these numbers as
certified radii: a bracketed sign change halved down to width `tol`
leaves nothing to argue about. scipy remains an independent cross-check
in the tests.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import NumericalError

__all__ = ["bisect_root", "golden_max", "geometric_grid"]

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def bisect_root(f, lo: float, hi: float, tol: float = 1e-12, maxiter: int = 200) -> float:
    """Root of f by interval halving; requires a sign change on [lo, hi]."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo < 0) == (fhi < 0):
        raise NumericalError(f"no sign change on [{lo}, {hi}]")
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol:
            return mid
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return 0.5 * (lo + hi)


def golden_max(f, lo: float, hi: float, tol: float = 1e-12, maxiter: int = 300):
    """Maximize a unimodal function on [lo, hi]; returns (argmax, max)."""
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(maxiter):
        if b - a <= tol:
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def geometric_grid(lo: float, hi: float, per_decade: int = 64) -> np.ndarray:
    """Geometrically spaced points from lo to hi, per_decade per factor 10."""
    if lo <= 0 or hi <= lo:
        raise NumericalError("geometric grid needs 0 < lo < hi")
    n = max(2, int(math.ceil(math.log10(hi / lo) * per_decade)) + 1)
    return np.geomspace(lo, hi, n)
