"""One-dimensional solves: shock matching and sonic-point handling.

The single-shock solve finds the shock abscissa x_S as the root of the
scalar map

    x_S  ->  B_R( propagate(jump(propagate(U_L, x_L -> x_S)), x_S -> x_R) ),

with the outer root located by bracketed secant (Illinois).  Problems whose
solution passes smoothly through a point where an eigenvalue vanishes
(where flux inversion degenerates) are handled by stopping the ODE march one
cell short, extrapolating across with two-point Hermite data (values and
derivatives), and restarting the march on the far side.  When the boundary
data has a free parameter it is pinned by the compatibility condition at the
turning point.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import (ArityError, InversionError, NearSonicError,
                     NotBracketedError, StructureError)
from .jump import jump_1d
from .propagate import (Branch1D, get_integrator, propagate,
                        propagate_with_derivatives, step_once)
from .rootfind import illinois, scan_bracket

SHOCK_RESIDUAL_TOL = 1e-12


@dataclass
class MatchResult1D:
    shock_x: float
    left_branch: Branch1D
    right_branch: Branch1D
    boundary_residual: float
    pre_shock_state: np.ndarray = None
    post_shock_state: np.ndarray = None


@dataclass
class TurningPoint:
    x_t: float
    state: np.ndarray
    field_index: int
    alpha: float = None
    compatibility: float = None


@dataclass
class SonicShockResult:
    alpha: float
    turning: TurningPoint
    match: MatchResult1D
    subsonic_branch: Branch1D
    supersonic_branch: Branch1D
    restart_index: int
    gap_states: dict = None


def hermite_extrapolate(points, h):
    """Osculating-polynomial value at x_last + h from (x, U, U_x) samples.

    Two points give the cubic Hermite form (exact for cubics, O(dx^4) error
    for smooth data); three points give the quintic variant.  Built from
    Newton divided differences with doubled nodes, so no flux inversion is
    involved.
    """
    if len(points) < 2:
        raise ArityError("hermite extrapolation needs at least two points")
    xs, us, ds = zip(*points)
    m = np.asarray(us[0], dtype=float).shape[0] if np.ndim(us[0]) else 1
    n = 2 * len(points)
    z = np.empty(n)
    q = np.empty((n, n, m))
    for i, (x, u, du) in enumerate(points):
        z[2 * i] = z[2 * i + 1] = x
        q[2 * i, 0] = q[2 * i + 1, 0] = np.atleast_1d(np.asarray(u, float))
        q[2 * i + 1, 1] = np.atleast_1d(np.asarray(du, float))
        if i > 0:
            q[2 * i, 1] = (q[2 * i, 0] - q[2 * i - 1, 0]) / (
                z[2 * i] - z[2 * i - 1])
    for col in range(2, n):
        for row in range(col, n):
            q[row, col] = (q[row, col - 1] - q[row - 1, col - 1]) / (
                z[row] - z[row - col])
    x_eval = xs[-1] + h
    acc = q[n - 1, n - 1].copy()
    for row in range(n - 2, -1, -1):
        acc = acc * (x_eval - z[row]) + q[row, row]
    return acc


class SonicHandoff:
    """Halt predicate: stop stepping within one cell of a vanishing eigenvalue.

    kappa is the max slope estimate of the tracked eigenvalue seen so far;
    the march stops once |lambda| < safety * kappa * dx while lambda is
    still negative and rising, leaving the remaining stretch to Hermite
    extrapolation.  Using the running max keeps the rule from chasing a
    flattening eigenvalue all the way into the fold.
    """

    def __init__(self, system, field_index, dx, safety=1.5):
        self.system = system
        self.idx = field_index
        self.dx = dx
        self.safety = safety
        self.prev = None
        self.kappa = 0.0
        self.lambdas = []

    def __call__(self, k, x, U):
        lam = float(self.system.eigen_x(U)[0][self.idx])
        self.lambdas.append(lam)
        prev, self.prev = self.prev, lam
        if lam >= 0.0:
            return True
        if prev is None:
            return False
        self.kappa = max(self.kappa, (lam - prev) / self.dx)
        if lam <= prev or self.kappa <= 0.0:
            return False
        return lam > -self.safety * self.kappa * self.dx


def locate_turning_point(branch, system, field_index, h_max=None):
    """Zero of the tracked eigenvalue within one cell past the branch end.

    Solves lambda(H(h)) = 0 for h in [0, h_max] on the Hermite extrapolant
    built from the last two branch samples.  Raises NotBracketedError when
    the eigenvalue does not change sign over the window (the caller may
    advance another grid point or widen the window).
    """
    if branch.derivs is None:
        raise ArityError("turning-point location needs derivative samples")
    j = branch.valid_to
    if j < 1:
        raise ArityError("need at least two accepted samples")
    dx = abs(branch.grid[j] - branch.grid[j - 1])
    if h_max is None:
        h_max = dx
    pts = [(branch.grid[j - 1], branch.states[j - 1], branch.derivs[j - 1]),
           (branch.grid[j], branch.states[j], branch.derivs[j])]

    def lam_of(h):
        Uh = hermite_extrapolate(pts, h)
        if system.is_physical is not None and not system.is_physical(Uh):
            raise NotBracketedError(
                f"extrapolated state non-physical at h={h}")
        return float(system.eigen_x(Uh)[0][field_index])

    lam0 = lam_of(0.0)
    if lam0 >= 0.0:
        raise StructureError("eigenvalue already non-negative at branch end")
    # forward scan: the extrapolant may leave the physical range past the
    # crossing, so bracket on the first probe with a non-negative eigenvalue
    n_probe = 16
    h_lo, lam_lo = 0.0, lam0
    h_hi = lam_hi = None
    for i in range(1, n_probe + 1):
        h = h_max * i / n_probe
        try:
            lam = lam_of(h)
        except NotBracketedError:
            break
        if lam >= 0.0:
            h_hi, lam_hi = h, lam
            break
        h_lo, lam_lo = h, lam
    if h_hi is None:
        raise NotBracketedError(
            f"eigenvalue does not cross zero within h={h_max}")
    h_root, _ = illinois(lam_of, h_lo, h_hi, fa=lam_lo, fb=lam_hi,
                         tol=1e-13 * max(1.0, abs(lam0)), xtol=1e-15 * dx)
    U_t = hermite_extrapolate(pts, h_root)
    x_t = branch.grid[j] + h_root
    _, _, Pinv = system.eigen_x(U_t)
    comp = float((Pinv @ system.source(U_t, x_t))[field_index])
    return TurningPoint(x_t=x_t, state=U_t, field_index=field_index,
                        compatibility=comp)


def sonic_fold_state(system, V1, V2):
    """Sonic state with the given mass and momentum fluxes (closed form).

    Along the one-parameter family of states sharing (f1, f2) = (V1, V2),
    the energy flux f3 is a concave parabola in the velocity, maximised
    exactly at the sonic state.  The maximiser is algebraic for a gamma-law
    gas: u = g V2 / ((g+1) V1), p-like = V2 / (g+1).
    """
    g = system.params["gamma"]
    u = g * V2 / ((g + 1.0) * V1)
    p_like = V2 / (g + 1.0)
    r = V1 / u
    e = p_like / (g - 1.0) + 0.5 * V1 * u
    return np.array([r, V1, e])


def sonic_fold_clearance(system, V):
    """Distance of the flux value V from the sonic fold surface.

    Positive for flux values attained by real states, zero exactly on the
    fold (sonic states), negative beyond it.  Smooth in V with a
    non-degenerate gradient, unlike the eigenvalue itself which behaves
    like the square root of the clearance.
    """
    U_s = sonic_fold_state(system, V[0], V[1])
    return float(system.flux_x(U_s)[2] - V[2])


def _state_from_flux(system, V, branch):
    """Closed-form flux inverse on the requested branch of the fold.

    Along the family of states sharing (f1, f2), the energy flux is a
    concave parabola in velocity; inverting it gives the velocity directly,
    with the branch choosing the sub- or supersonic root.  The clearance is
    clamped at zero so evaluation stays defined through the tangency.
    """
    g = system.params["gamma"]
    u_s = g * V[1] / ((g + 1.0) * V[0])
    s = sonic_fold_clearance(system, V)
    du = math.sqrt(max(2.0 * (g - 1.0) * s / ((g + 1.0) * V[0]), 0.0))
    u = u_s - du if branch == "subsonic" else u_s + du
    r = V[0] / u
    p_like = V[1] - V[0] * u
    return np.array([r, V[0], p_like / (g - 1.0) + 0.5 * V[0] * u])


def _carry_flux(system, V_base, x_base, x_target, x_split, n_sub):
    """Integrate V_x = a(U(V), x) from x_base to x_target in flux space.

    With the closed-form fold inverse the right-hand side is an explicit
    algebraic function of V (no Newton inversion), regular through the
    sonic station, so plain sub-stepped RK4 carries the flux value across.
    The integration is split at x_split where the branch of the inverse
    flips from subsonic to supersonic (the integrand is analytic on each
    side and only C1 at the tangency).
    """
    def rhs(x, V, branch):
        return system.source(_state_from_flux(system, V, branch), x)

    def rk4_segment(V, xa, xb, branch, n):
        if n <= 0 or xa == xb:
            return V
        hs = (xb - xa) / n
        for i in range(n):
            x = xa + i * hs
            k1 = rhs(x, V, branch)
            k2 = rhs(x + 0.5 * hs, V + 0.5 * hs * k1, branch)
            k3 = rhs(x + 0.5 * hs, V + 0.5 * hs * k2, branch)
            k4 = rhs(x + hs, V + hs * k3, branch)
            V = V + (hs / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        return V

    V = np.asarray(V_base, dtype=float).copy()
    total = abs(x_target - x_base)
    if total == 0.0:
        return V
    x_mid = min(max(x_split, x_base), x_target) if x_target > x_base \
        else min(max(x_split, x_target), x_base)
    n1 = max(4, int(round(n_sub * abs(x_mid - x_base) / total)))
    n2 = max(4, n_sub - n1) if abs(x_target - x_mid) > 0 else 0
    V = rk4_segment(V, x_base, x_mid, "subsonic", n1)
    if abs(x_target - x_mid) > 1e-300:
        V = rk4_segment(V, x_mid, x_target, "supersonic", n2)
    return V


def _compat_station(problem):
    """Abscissa where the source component driving s vanishes (A' = 0)."""
    x0, x1 = problem.domain[0]
    deriv = problem.system.params["area_deriv"]
    lo, hi, flo, fhi = scan_bracket(deriv, x0, x1, n=32)
    x_c, _ = illinois(deriv, lo, hi, fa=flo, fb=fhi, tol=0.0,
                      xtol=1e-15 * max(1.0, abs(x1)))
    return x_c


def _family_residual(problem, integrator, N, alpha, keep=None):
    """Sonic-passage mismatch of the branch launched from the alpha state.

    The branch is marched to the handoff point; its flux value is then
    carried to the compatibility station (where the source component in the
    sonic field vanishes) and compared against the sonic fold.  Negative
    when the flux value stays strictly inside the attainable set (the
    branch never goes sonic), positive once it pierces the fold, zero at
    the admissible parameter.  Smooth through the root, unlike eigenvalue-
    based detection, because the fold clearance is quadratic in the
    eigenvalue.
    """
    system = problem.system
    idx = problem.params.get("turn_field", 0)
    x0, x1 = problem.domain[0]
    dx = (x1 - x0) / N
    x_c = problem.params.get("_compat_station")
    if x_c is None:
        x_c = _compat_station(problem)
        problem.params["_compat_station"] = x_c
    ih = _sonic_window_node(problem, N, x_c)
    grid = np.linspace(x0, x1, N + 1)
    halt = SonicHandoff(system, idx, dx)
    U0 = problem.family_state(alpha)
    branch = propagate_with_derivatives(system, integrator, U0, x0,
                                        grid[ih], ih, halt=halt)
    if keep is not None:
        keep["branch"] = branch
    if branch.status != "complete" or branch.valid_to < ih:
        # went sonic before the window even started: crossing side
        return 1.0
    V_base = system.flux_x(branch.states[ih])
    n_sub = max(16, 4 * (N - ih))
    V_c = _carry_flux(system, V_base, grid[ih], x_c, x_c, n_sub)
    res = -sonic_fold_clearance(system, V_c)
    if keep is not None:
        U_t = sonic_fold_state(system, V_c[0], V_c[1])
        _, _, Pinv = system.eigen_x(U_t)
        comp = float((Pinv @ system.source(U_t, x_c))[idx])
        keep["turning"] = TurningPoint(x_t=x_c, state=U_t, field_index=idx,
                                       compatibility=comp)
        keep["window_node"] = ih
    return res


def solve_unknown_boundary(problem, integrator, N):
    """Pin the free boundary parameter by the turning-point compatibility.

    Returns (alpha, TurningPoint, branch); the branch is the accepted march
    up to the handoff point, with derivative samples.  The returned alpha
    sits on the crossing side of the root, where the turning point exists.
    """
    integ = get_integrator(integrator)
    a_lo, a_hi = problem.params.get("alpha_bracket", (0.02, 0.95))

    def resid(alpha):
        return _family_residual(problem, integ, N, alpha)

    f_lo, f_hi = resid(a_lo), resid(a_hi)
    if np.sign(f_lo) == np.sign(f_hi):
        a_lo, a_hi, f_lo, f_hi = scan_bracket(resid, a_lo, a_hi, n=12)
    tol = 1e-14 * max(1.0, abs(f_lo), abs(f_hi))
    alpha, _ = illinois(resid, a_lo, a_hi, fa=f_lo, fb=f_hi, tol=tol,
                        xtol=1e-16, maxiter=300)
    keep = {}
    _family_residual(problem, integ, N, alpha, keep=keep)
    tp = keep.get("turning")
    if tp is None:
        raise StructureError("no turning point at the resolved parameter")
    tp.alpha = alpha
    return alpha, tp, keep["branch"]


def _sonic_window_node(problem, N, x_c):
    """Grid node where the ODE march hands off to the flux-space carry.

    A fixed fraction of the inlet-to-station distance is left to the carry
    integration, so the march never enters the region where its error is
    amplified by the approaching fold.
    """
    x0, x1 = problem.domain[0]
    h = (x1 - x0) / N
    width = problem.params.get("sonic_window", 0.2 * (x_c - x0))
    ih = int(math.floor((x_c - width - x0) / h))
    return max(2, min(ih, N - 4))


def _match_shock(system, integ, grid, left_branch, start_index, b_right,
                 bracket, keep_branches=True):
    """Locate x_S so the right-propagated post-jump state meets B_R = 0."""
    n = len(grid) - 1
    h = grid[1] - grid[0]

    def right_march(x_s):
        k = int(np.searchsorted(grid, x_s, side="right") - 1)
        k = min(max(k, start_index), n - 1)
        U_pre = step_once(system, integ, left_branch.states[k], grid[k],
                          x_s - grid[k])
        U_post = jump_1d(system, U_pre).post_state
        states = np.full((n + 1, system.m), np.nan)
        U = step_once(system, integ, U_post, x_s, grid[k + 1] - x_s)
        states[k + 1] = U
        for i in range(k + 1, n):
            U = step_once(system, integ, U, grid[i], h)
            states[i + 1] = U
        return k, U_pre, U_post, states, b_right(U)

    def resid(x_s):
        return right_march(x_s)[4]

    lo, hi = bracket
    f_lo, f_hi = resid(lo), resid(hi)
    if np.sign(f_lo) == np.sign(f_hi):
        try:
            lo, hi, f_lo, f_hi = scan_bracket(resid, lo, hi, n=12)
        except NotBracketedError:
            raise StructureError(
                "no shock abscissa matches the right boundary condition "
                f"on [{bracket[0]}, {bracket[1]}]")
    x_s, f_s = illinois(resid, lo, hi, fa=f_lo, fb=f_hi,
                        tol=SHOCK_RESIDUAL_TOL, maxiter=300)
    k, U_pre, U_post, right_states, res = right_march(x_s)
    right = Branch1D(grid=grid, states=right_states,
                     direction="left-to-right", valid_to=n)
    # the right branch is only defined past the shock
    right_valid_from = k + 1
    right.states[:right_valid_from] = np.nan
    left = Branch1D(grid=grid, states=left_branch.states.copy(),
                    direction="left-to-right", valid_to=k,
                    derivs=None if left_branch.derivs is None
                    else left_branch.derivs.copy())
    left.states[k + 1:] = np.nan
    return MatchResult1D(shock_x=float(x_s), left_branch=left,
                         right_branch=right, boundary_residual=float(res),
                         pre_shock_state=U_pre, post_shock_state=U_post)


def solve_single_shock(problem, integrator, N, bracket=None):
    """Two smooth states joined by one interior shock, matched to B_R."""
    integ = get_integrator(integrator)
    system = problem.system
    x0, x1 = problem.domain[0]
    grid = np.linspace(x0, x1, N + 1)
    U_left = problem.left_state()
    left = propagate(system, integ, U_left, x0, x1, N)
    if left.status != "complete":
        raise StructureError("left branch march failed before the shock")
    if bracket is None:
        bracket = problem.params.get("shock_bracket",
                                     (x0 + 0.05 * (x1 - x0),
                                      x1 - 0.05 * (x1 - x0)))
    return _match_shock(system, integ, grid, left, 0,
                        problem.right_residual, bracket)


def solve_sonic_then_shock(problem, integrator, N, bracket=None):
    """Full transonic pipeline: parameter solve, sonic crossing, then shock.

    Composes the compatibility solve for the inlet parameter, a flux-space
    carry across the sonic window (no flux inversion there), a restarted
    march on the supersonic side, and the single-shock matching against the
    right boundary condition.
    """
    integ = get_integrator(integrator)
    system = problem.system
    x0, x1 = problem.domain[0]
    grid = np.linspace(x0, x1, N + 1)
    h = grid[1] - grid[0]

    alpha, tp, branch_sub = solve_unknown_boundary(problem, integ, N)
    j = branch_sub.valid_to
    V_window = system.flux_x(branch_sub.states[j])
    # restart the ODE march at the far edge of the sonic window: close to
    # the turning point the trajectory's high derivatives blow up and the
    # integrator would lose its order there
    width_r = problem.params.get("sonic_window_right",
                                 0.2 * (x1 - tp.x_t))
    restart = max(j + max(1, int(math.ceil((tp.x_t - grid[j]) / h + 0.2))),
                  int(math.ceil((tp.x_t + width_r - x0) / h - 1e-12)))
    restart = min(restart, N - 5)
    idx = problem.params.get("turn_field", 0)

    # the sub-step count must match the residual carry exactly, so the
    # clearance at the tangency node sits at the solver floor rather than
    # at the (sqrt-amplified) inter-quadrature difference
    n_sub_res = max(16, 4 * (N - j))

    def carry_to(x, side):
        frac = (x - grid[j]) / max(tp.x_t - grid[j], 1e-300)
        n_sub = max(8, int(math.ceil(n_sub_res * min(frac, 2.0))))
        if abs(x - tp.x_t) < 1e-12:
            n_sub = n_sub_res
        V = _carry_flux(system, V_window, grid[j], x, tp.x_t, n_sub)
        return _state_from_flux(system, V, side)

    for _ in range(3):
        U_restart = carry_to(grid[restart], "supersonic")
        if float(system.eigen_x(U_restart)[0][idx]) > 0.0:
            break
        restart += 1
    else:
        raise StructureError("could not restart past the turning point")
    # fill the window nodes from the carried flux as well
    gap_states = {}
    for i in range(j + 1, restart):
        side = "subsonic" if grid[i] <= tp.x_t else "supersonic"
        gap_states[i] = carry_to(grid[i], side)

    n_tail = N - restart
    if n_tail < 4:
        raise StructureError("grid too coarse past the turning point")
    super_branch = propagate(system, integ, U_restart, grid[restart], x1,
                             n_tail)
    if super_branch.status != "complete":
        raise StructureError("supersonic march failed before the shock")
    # inflate to the full grid for uniform indexing
    full_states = np.full((N + 1, system.m), np.nan)
    full_states[restart:] = super_branch.states
    super_full = Branch1D(grid=grid, states=full_states,
                          direction="left-to-right", valid_to=N)
    if bracket is None:
        lo = grid[min(restart + 2, N - 2)]
        hi = x1 - 0.25 * h
        bracket = (lo, hi)
    match = _match_shock(system, integ, grid, super_full, restart,
                         problem.right_residual, bracket)
    return SonicShockResult(alpha=alpha, turning=tp, match=match,
                            subsonic_branch=branch_sub,
                            supersonic_branch=super_full,
                            restart_index=restart, gap_states=gap_states)


def composed_states(result, problem, N):
    """Node-wise composite of a SonicShockResult on the solve grid.

    Returns (grid, states, region) with region 0 before the sonic station,
    1 between it and the shock, 2 after the shock.  Nodes between the
    handoff and restart points carry the flux-integral fill.
    """
    system = problem.system
    x0, x1 = problem.domain[0]
    grid = np.linspace(x0, x1, N + 1)
    m = system.m
    states = np.full((N + 1, m), np.nan)
    region = np.zeros(N + 1, dtype=int)
    sub = result.subsonic_branch
    j = sub.valid_to
    states[: j + 1] = sub.states[: j + 1]
    for i in range(j + 1, result.restart_index):
        states[i] = result.gap_states[i]
    k_shock = result.match.left_branch.valid_to
    states[result.restart_index: k_shock + 1] = \
        result.match.left_branch.states[result.restart_index: k_shock + 1]
    states[k_shock + 1:] = result.match.right_branch.states[k_shock + 1:]
    region[grid > result.turning.x_t] = 1
    region[grid > result.match.shock_x] = 2
    return grid, states, region
