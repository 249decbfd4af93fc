"""Entropy-satisfying solutions of the Rankine-Hugoniot conditions.

For gas-dynamics systems the jump system is reduced analytically to one
scalar equation in the post-shock normal velocity (the tangential velocity
and the total enthalpy are continuous across a stationary shock), which is
then solved by safeguarded Newton/bisection on a bracket that excludes the
continuous root by a relative margin.  Admissibility is checked twice: the
Lax inequalities on the genuinely nonlinear field and positivity of the
physical-entropy jump.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import NoJumpError, SolverError
from .rootfind import newton_bisection

CONTINUOUS_MARGIN = 1e-6    # relative exclusion of the trivial root
ENTROPY_TOL = 1e-10


@dataclass
class JumpSolution:
    post_state: np.ndarray
    residual: float
    entropy_ok: bool


@dataclass
class ObliqueJumpSolution:
    post_state: np.ndarray
    normal: np.ndarray
    residual: float = 0.0
    beta: float = None          # shock angle from the upstream flow direction


def _post_normal_velocity(g, rho1, w1, p1):
    """Scalar reduction of the jump system: solve for the post-shock normal
    velocity on a bracket that excludes the continuous root w = w1."""
    j = rho1 * w1
    h1 = g / (g - 1.0) * p1 / rho1
    h_total = h1 + 0.5 * w1 * w1

    def resid(w2):
        p2 = p1 + j * (w1 - w2)
        return g / (g - 1.0) * p2 * w2 / j + 0.5 * w2 * w2 - h_total

    hi = w1 * (1.0 - CONTINUOUS_MARGIN)
    lo = 1e-8 * w1
    if resid(hi) <= 0.0 or resid(lo) >= 0.0:
        raise NoJumpError(
            "no entropy-admissible root of the jump conditions "
            f"(upstream normal Mach {w1 / math.sqrt(g * p1 / rho1):.6f})")
    w2 = newton_bisection(resid, lo, hi, tol=1e-15 * max(1.0, abs(h_total)))
    return w2


def _entropy_increase(g, rho1, p1, rho2, p2):
    return p2 / rho2 ** g - p1 / rho1 ** g


def jump_1d(system, U_minus, allow_degenerate=False, check_entropy=True):
    """Non-trivial root of f(U) = f(U_minus), Lax-admissible.

    For the scalar quadratic flux the root is algebraic; for gas-dynamics
    systems the scalar reduction above is used.  Raises NoJumpError when the
    state is not pre-shock (no admissible root).  With ``allow_degenerate``
    a state on the sonic line returns the continuous root instead of failing.
    """
    U_minus = np.asarray(U_minus, dtype=float)
    f_minus = system.flux_x(U_minus)
    scale = 1.0 + np.linalg.norm(f_minus)

    if system.m == 1:
        u = float(U_minus[0])
        if abs(u) <= 1e-13:
            if allow_degenerate:
                return JumpSolution(U_minus.copy(), 0.0, True)
            raise NoJumpError("degenerate (sonic) state has no jump")
        if check_entropy and u < 0.0:
            raise NoJumpError(
                "entropy condition fails: state is not pre-shock")
        post = np.array([-u])
        res = float(np.linalg.norm(system.flux_x(post) - f_minus))
        return JumpSolution(post, res, u > 0.0)

    if system.kind not in ("nozzle_euler", "euler2d"):
        raise SolverError(f"jump_1d unsupported for system {system.kind!r}")

    g = system.params["gamma"]
    prim = system.to_primitive(U_minus)
    rho1, u1, p1 = prim[0], prim[1], prim[-1]
    sgn = 1.0 if u1 >= 0.0 else -1.0
    w1 = sgn * u1
    c1 = math.sqrt(g * p1 / rho1)
    if check_entropy and w1 <= c1 * (1.0 + ENTROPY_TOL):
        if allow_degenerate and abs(w1 - c1) <= 1e-8 * c1:
            return JumpSolution(U_minus.copy(), 0.0, True)
        raise NoJumpError(
            f"upstream Mach {w1 / c1:.8f} <= 1: no admissible stationary jump")
    w2 = _post_normal_velocity(g, rho1, w1, p1)
    j = rho1 * w1
    rho2 = j / w2
    p2 = p1 + j * (w1 - w2)
    if system.kind == "nozzle_euler":
        post = system.from_primitive((rho2, sgn * w2, p2))
    else:
        v1 = prim[2]
        post = system.from_primitive((rho2, sgn * w2, v1, p2))
    res = float(np.linalg.norm(system.flux_x(post) - f_minus))
    c2 = math.sqrt(g * p2 / rho2)
    lax_ok = (w1 - c1) > -ENTROPY_TOL and (w2 - c2) < ENTROPY_TOL
    ds = _entropy_increase(g, rho1, p1, rho2, p2)
    entropy_ok = bool(lax_ok and ds > -ENTROPY_TOL)
    if check_entropy and not entropy_ok:
        raise NoJumpError("computed root violates the entropy conditions")
    if res > 1e-11 * scale:
        raise SolverError(f"jump residual {res:.3e} exceeds tolerance")
    return JumpSolution(post, res, entropy_ok)


def normal_from_states(system, U_a, U_b):
    """Unit normal solving (f(Ua)-f(Ub), g(Ua)-g(Ub)) . n = 0 in least squares.

    Returns (n, residual); n is oriented so the a-side velocity crosses it
    forwards.  For states exactly connected by a jump the residual is zero.
    """
    df = system.flux_x(np.asarray(U_a, float)) - system.flux_x(
        np.asarray(U_b, float))
    dg = system.flux_y(np.asarray(U_a, float)) - system.flux_y(
        np.asarray(U_b, float))
    A = np.column_stack([df, dg])
    _, s, vt = np.linalg.svd(A, full_matrices=False)
    n = vt[-1]
    n = n / np.linalg.norm(n)
    prim = system.to_primitive(U_a)
    if system.m >= 4:
        q = np.array([prim[1], prim[2]])
    else:
        q = np.array([prim[0] if system.m == 1 else prim[1], 1.0])
    if float(q @ n) < 0.0:
        n = -n
    return n, float(s[-1])


def _post_from_normal(system, U_up, n):
    """Post state across a stationary shock with unit normal n (2D Euler)."""
    g = system.params["gamma"]
    rho1, u1, v1, p1 = system.to_primitive(U_up)
    q1 = np.array([u1, v1])
    n = np.asarray(n, dtype=float)
    n = n / np.linalg.norm(n)
    w1 = float(q1 @ n)
    if w1 < 0.0:
        n = -n
        w1 = -w1
    c1 = math.sqrt(g * p1 / rho1)
    if w1 <= c1 * (1.0 + ENTROPY_TOL):
        raise NoJumpError(
            f"upstream normal Mach {w1 / c1:.8f} <= 1: continuous root only")
    t_vec = q1 - w1 * n
    w2 = _post_normal_velocity(g, rho1, w1, p1)
    j = rho1 * w1
    rho2 = j / w2
    p2 = p1 + j * (w1 - w2)
    q2 = t_vec + w2 * n
    post = system.from_primitive((rho2, q2[0], q2[1], p2))
    if _entropy_increase(g, rho1, p1, rho2, p2) <= -ENTROPY_TOL:
        raise NoJumpError("entropy decreases across the candidate jump")
    df = system.flux_x(post) - system.flux_x(np.asarray(U_up, float))
    dg = system.flux_y(post) - system.flux_y(np.asarray(U_up, float))
    res = float(np.linalg.norm(df * n[0] + dg * n[1]))
    return post, n, res


def max_deflection_angle(mach, gamma):
    """Largest flow deflection an attached shock supports at this Mach."""
    g, m2 = gamma, mach * mach
    s2 = (1.0 / (g * m2)) * (0.25 * (g + 1.0) * m2 - 1.0 + math.sqrt(
        (g + 1.0) * ((g + 1.0) / 16.0 * m2 * m2 + 0.5 * (g - 1.0) * m2 + 1.0)))
    beta = math.asin(min(1.0, math.sqrt(s2)))
    return _deflection(mach, beta, g), beta


def _deflection(mach, beta, g):
    m2 = mach * mach
    num = m2 * math.sin(beta) ** 2 - 1.0
    den = m2 * (g + math.cos(2.0 * beta)) + 2.0
    return math.atan(2.0 / math.tan(beta) * num / den)


def jump_2d(system, U_left, normal=None, constraint=None, turn="left"):
    """Oblique jump across a stationary shock in two dimensions.

    Exactly one of ``normal`` / ``constraint`` must be given.  With a normal,
    the post state follows from the scalar reduction.  With a constraint (a
    callable of the post primitive tuple whose zero pins one scalar
    condition, e.g. ``lambda rho, u, v, p: v`` for a flat wall), the shock
    angle joins the unknowns and the weak branch (smaller angle) is selected.
    ``turn`` picks the deflection sense ('left' = counterclockwise).
    """
    if (normal is None) == (constraint is None):
        raise SolverError("give exactly one of normal= or constraint=")
    U_left = np.asarray(U_left, dtype=float)

    if system.m == 1:
        if normal is None:
            raise SolverError("scalar oblique jump requires the normal")
        n = np.asarray(normal, dtype=float)
        n = n / np.linalg.norm(n)
        if abs(n[0]) < 1e-14:
            raise NoJumpError("normal orthogonal to the nonlinear flux")
        u1 = float(U_left[0])
        u2 = -u1 - 2.0 * n[1] / n[0]
        lam1 = u1 * n[0] + n[1]
        lam2 = u2 * n[0] + n[1]
        if not (lam1 > ENTROPY_TOL and lam2 < -ENTROPY_TOL):
            raise NoJumpError("scalar jump violates the entropy condition")
        post = np.array([u2])
        df = system.flux_x(post) - system.flux_x(U_left)
        dg = system.flux_y(post) - system.flux_y(U_left)
        return ObliqueJumpSolution(post, n,
                                   float(abs(df[0] * n[0] + dg[0] * n[1])))

    if normal is not None:
        post, n, res = _post_from_normal(system, U_left, normal)
        return ObliqueJumpSolution(post, n, res)

    # unknown normal: one scalar post condition pins the shock angle
    g = system.params["gamma"]
    rho1, u1, v1, p1 = system.to_primitive(U_left)
    q = math.hypot(u1, v1)
    c1 = math.sqrt(g * p1 / rho1)
    mach = q / c1
    if mach <= 1.0:
        raise NoJumpError("upstream state subsonic: no attached shock")
    theta1 = math.atan2(v1, u1)
    sense = 1.0 if turn == "left" else -1.0
    mu = math.asin(1.0 / mach)
    _, beta_md = max_deflection_angle(mach, g)

    def post_of_beta(beta):
        sigma = theta1 + sense * beta
        n = np.array([math.sin(sigma), -math.cos(sigma)]) * sense
        return _post_from_normal(system, U_left, n)

    def cons(beta):
        post, _, _ = post_of_beta(beta)
        return constraint(*system.to_primitive(post))

    # weak branch: first sign change scanning up from the Mach angle
    lo = mu * (1.0 + 1e-9) + 1e-12
    n_scan = 160
    betas = np.linspace(lo, beta_md, n_scan)
    prev_b, prev_f = None, None
    bracket = None
    for b in betas:
        try:
            fb = cons(b)
        except NoJumpError:
            prev_b, prev_f = None, None
            continue
        if prev_f is not None and np.sign(fb) != np.sign(prev_f):
            bracket = (prev_b, b, prev_f, fb)
            break
        if fb == 0.0:
            bracket = (b, b, 0.0, 0.0)
            break
        prev_b, prev_f = b, fb
    if bracket is None:
        raise NoJumpError("no admissible shock angle satisfies the constraint")
    b0, b1 = bracket[0], bracket[1]
    if b0 != b1:
        beta = newton_bisection(cons, b0, b1, tol=1e-14, xtol=1e-15)
    else:
        beta = b0
    post, n, res = post_of_beta(beta)
    return ObliqueJumpSolution(post, n, res, beta=beta)
