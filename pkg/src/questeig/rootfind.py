"""Bracketed scalar zero finder.

Every stage that solves an equation of the form ``phi(u) = 1/c`` or
``Gamma(y) = 0`` arrives with a proven sign-changing bracket, so a
safeguarded bracketing method is all that is needed: inverse-quadratic /
secant steps with a bisection fallback (Brent-style).  Endpoint function
values are allowed to be infinite (pole at a bracket edge); interpolation
is then skipped in favor of bisection.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import math

from .errors import BracketError, ConvergenceError

DEFAULT_X_TOL = 1e-12
DEFAULT_MAX_ITER = 200


def _sign_change(fa: float, fb: float) -> bool:
    if math.isnan(fa) or math.isnan(fb):
        return False
    return (fa > 0) != (fb > 0) or fa == 0 or fb == 0


@dataclass(frozen=True)
class Bracket:
    """An interval [lo, hi] with a strict sign change of f."""

    lo: float
    hi: float
    f_lo: float
    f_hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise BracketError(f"invalid bracket: lo={self.lo!r} must be < hi={self.hi!r}")
        if math.isnan(self.f_lo) or math.isnan(self.f_hi):
            raise BracketError("invalid bracket: NaN endpoint value")
        if not ((self.f_lo > 0) != (self.f_hi > 0)):
            raise BracketError(
                f"invalid bracket: no sign change (f(lo)={self.f_lo!r}, f(hi)={self.f_hi!r})"
            )


def bracket_root(f: Callable[[float], float], lo: float, hi: float) -> Bracket:
    """Evaluate f at both ends and build a :class:`Bracket`."""
    return Bracket(lo, hi, float(f(lo)), float(f(hi)))


def find_zero(
    f: Callable[[float], float],
    bracket: Bracket,
    x_tol: float = DEFAULT_X_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> float:
    """Locate the zero of f inside ``bracket``.

    Returns the iterate with the smallest |f| once the bracket has shrunk
    below ``x_tol * max(1, |x|)``.  The result always lies inside the
    initial bracket.  Raises :class:`ConvergenceError` (with the best
    iterate attached) if ``max_iter`` is exhausted.
    """
    a, fa = bracket.lo, bracket.f_lo
    b, fb = bracket.hi, bracket.f_hi
    if fa == 0:
        return a
    if fb == 0:
        return b
    c, fc = a, fa
    d = e = b - a

    best_x, best_f = (b, abs(fb)) if abs(fb) <= abs(fa) else (a, abs(fa))
    for _ in range(max_iter):
        if (fb > 0) == (fc > 0):
            # b and c no longer straddle the root: reset the counterpoint
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol = 0.5 * x_tol * max(1.0, abs(b))
        m = 0.5 * (c - b)
        if fb == 0 or abs(m) <= tol:
            return best_x if best_f < abs(fb) else b
        if (
            math.isfinite(fa)
            and math.isfinite(fb)
            and math.isfinite(fc)
            and abs(e) >= tol
            and abs(fa) > abs(fb)
        ):
            s = fb / fa
            if a == c:
                p = 2.0 * m * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0:
                q = -q
            else:
                p = -p
            s, e = e, d
            if 2.0 * p < 3.0 * m * q - abs(tol * q) and p < abs(0.5 * s * q):
                d = p / q
            else:
                e = m
                d = e
        else:
            e = m
            d = e
        a, fa = b, fb
        if abs(d) > tol:
            b += d
        elif m > 0:
            b += tol
        else:
            b -= tol
        fb = float(f(b))
        if math.isnan(fb):
            raise BracketError(f"function returned NaN at x={b!r}")
        if abs(fb) < best_f:
            best_x, best_f = b, abs(fb)
    raise ConvergenceError(
        f"find_zero: no convergence in {max_iter} iterations", best=best_x
    )
