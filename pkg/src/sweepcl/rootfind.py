"""Safeguarded scalar root finders used by the outer matching solves.

Two workhorses:

* ``illinois`` -- bracketed secant (regula falsi with the Illinois
  modification).  Used for the outer shock-location and boundary-parameter
  solves, where the residual is monotone but expensive.
* ``newton_bisection`` -- Newton iteration clipped to a shrinking bracket,
  falling back to bisection whenever the Newton step leaves the bracket or
  fails to reduce the residual.  Used for the scalar reductions of the jump
  conditions.
"""

import numpy as np

from .errors import NotBracketedError


def illinois(f, a, b, fa=None, fb=None, tol=1e-12, xtol=0.0, maxiter=200):
    """Root of f on [a, b] by Illinois-modified regula falsi.

    Requires f(a) and f(b) of opposite sign.  Stops when |f| <= tol or the
    bracket width falls below xtol.  Returns (x, fx).
    """
    fa = f(a) if fa is None else fa
    fb = f(b) if fb is None else fb
    if fa == 0.0:
        return a, fa
    if fb == 0.0:
        return b, fb
    if np.sign(fa) == np.sign(fb):
        raise NotBracketedError(
            f"no sign change on [{a}, {b}]: f(a)={fa}, f(b)={fb}")
    side = 0
    x, fx = b, fb
    for _ in range(maxiter):
        x = (a * fb - b * fa) / (fb - fa)
        # guard against stagnation at an endpoint
        if not (min(a, b) < x < max(a, b)):
            x = 0.5 * (a + b)
        fx = f(x)
        if abs(fx) <= tol or abs(b - a) <= xtol:
            return x, fx
        if np.sign(fx) == np.sign(fa):
            a, fa = x, fx
            if side == -1:
                fb *= 0.5
            side = -1
        else:
            b, fb = x, fx
            if side == 1:
                fa *= 0.5
            side = 1
    return x, fx


def newton_bisection(f, a, b, df=None, tol=1e-14, xtol=1e-15, maxiter=100):
    """Safeguarded Newton on [a, b]; bisection wherever Newton misbehaves.

    ``df`` may be None, in which case a secant slope is used.  Returns the
    root; raises NotBracketedError if f(a), f(b) share a sign.
    """
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if np.sign(fa) == np.sign(fb):
        raise NotBracketedError(
            f"no sign change on [{a}, {b}]: f(a)={fa}, f(b)={fb}")
    x = 0.5 * (a + b)
    fx = f(x)
    x_prev, f_prev = a, fa
    for _ in range(maxiter):
        if abs(fx) <= tol:
            return x
        if np.sign(fx) == np.sign(fa):
            a, fa = x, fx
        else:
            b, fb = x, fx
        if b - a <= xtol * max(1.0, abs(a), abs(b)):
            return 0.5 * (a + b)
        if df is not None:
            slope = df(x)
        else:
            slope = (fx - f_prev) / (x - x_prev) if x != x_prev else 0.0
        x_prev, f_prev = x, fx
        step_ok = slope != 0.0 and np.isfinite(slope)
        if step_ok:
            xn = x - fx / slope
            step_ok = a < xn < b
        if not step_ok:
            xn = 0.5 * (a + b)
        x = xn
        fx = f(x)
    return x


def scan_bracket(f, a, b, n=16):
    """Scan [a, b] at n+1 points for the first sign change of f.

    Returns (x0, x1, f0, f1).  Raises NotBracketedError if f is one-signed
    over the whole scan.
    """
    xs = np.linspace(a, b, n + 1)
    f_prev = f(xs[0])
    if f_prev == 0.0:
        return xs[0], xs[0], 0.0, 0.0
    for x in xs[1:]:
        fx = f(x)
        if fx == 0.0 or np.sign(fx) != np.sign(f_prev):
            return xs[np.searchsorted(xs, x) - 1], x, f_prev, fx
        f_prev = fx
    raise NotBracketedError(f"no sign change of residual found on [{a}, {b}]")
