"""Discrete propagation of boundary data along a sweep direction.

The steady system f(U)_x = a(U, x) is integrated as an ODE for the flux
variable V = f(U),

    V_x = a(f^{-1}(V), x),

so every right-hand-side evaluation needs the flux inverse.  The inverse is
computed by damped Newton seeded with the previous point's state, which also
selects the solution branch by continuity.  Integrators of order 1 (explicit
Euler), 2 (implicit trapezoid) and 4 (classical RK4) are provided.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InversionError, NearSonicError, PhysicalityError  # noqa: F401

SONIC_EIG_TOL = 1e-8        # |lambda| below this aborts flux inversion
STAGE_TOL = 1e-13           # absolute residual tolerance of implicit stages
MAX_HALVINGS = 40


@dataclass(frozen=True)
class Integrator:
    name: str
    order: int


INTEGRATORS = {
    "euler": Integrator("euler", 1),
    "trapezoid": Integrator("trapezoid", 2),
    "rk4": Integrator("rk4", 4),
}


def get_integrator(name):
    if isinstance(name, Integrator):
        return name
    try:
        return INTEGRATORS[name]
    except KeyError:
        raise KeyError(
            f"unknown integrator {name!r}; choose from {sorted(INTEGRATORS)}")


@dataclass
class Branch1D:
    """A smooth solution branch sampled along a sweep.

    ``valid_to`` is the index of the last trusted sample; entries beyond it
    are unset (NaN).  ``status`` is 'complete', 'halted' (caller's halt
    predicate fired) or 'near-sonic' (inversion degenerated).
    """

    grid: np.ndarray
    states: np.ndarray              # (n, m)
    direction: str                  # 'left-to-right' | 'right-to-left'
    valid_to: int
    derivs: np.ndarray = None       # (n, m) dU/dx samples, optional
    status: str = "complete"

    def state(self, k):
        return self.states[k]

    def interp(self, x):
        """Linear interpolation of the states at x (within the valid part)."""
        g = self.grid[: self.valid_to + 1]
        lo, hi = (g[0], g[-1]) if g[0] <= g[-1] else (g[-1], g[0])
        x = min(max(x, lo), hi)
        order = np.argsort(g)
        gs = g[order]
        k = min(np.searchsorted(gs, x), len(gs) - 1)
        k0 = max(k - 1, 0)
        x0, x1 = gs[k0], gs[k]
        w = 0.0 if x1 == x0 else (x - x0) / (x1 - x0)
        s = self.states[: self.valid_to + 1][order]
        return (1.0 - w) * s[k0] + w * s[k]

    def to_csv(self, path):
        m = self.states.shape[1]
        cols = ["x"] + [f"component_{i}" for i in range(m)]
        if self.derivs is not None:
            cols += [f"deriv_{i}" for i in range(m)]
        with open(path, "w") as fh:
            fh.write(",".join(cols) + "\n")
            for k in range(self.valid_to + 1):
                row = [self.grid[k]] + list(self.states[k])
                if self.derivs is not None:
                    row += list(self.derivs[k])
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def _eig_signature(system, U):
    lam = np.sort(np.real(np.linalg.eigvals(system.jacobian_x(U)))) \
        if system.m > 1 else np.diag(system.jacobian_x(U))
    return np.sign(lam)


def _same_branch(system, U, sig_hint):
    sig = _eig_signature(system, U)
    return bool(np.all((sig == sig_hint) | (sig == 0) | (sig_hint == 0)))


def invert_flux(system, V, hint, tol=1e-12, max_iters=50):
    """Solve f(U) = V by damped Newton seeded at ``hint``.

    The seed selects the solution branch: iterates that would change the
    sign pattern of the Jacobian eigenvalues (i.e. hop across a sonic line
    to a different root) are rejected during step halving, so the iteration
    stays on the root connected to the previous grid point.  Raises
    NearSonicError when the Jacobian has an eigenvalue within SONIC_EIG_TOL
    of zero (flux inversion is ill-posed there and the caller must switch to
    extrapolation), and InversionError when Newton fails to converge.
    """
    V = np.asarray(V, dtype=float)
    U = np.asarray(hint, dtype=float).copy()
    sig_hint = _eig_signature(system, U)
    scale = 1.0 + np.linalg.norm(V)
    res = system.flux_x(U) - V
    rnorm = np.linalg.norm(res)
    for _ in range(max_iters):
        J = system.jacobian_x(U)
        lam = np.linalg.eigvals(J) if system.m > 2 else np.diag(J)
        lam_min = float(np.min(np.abs(lam)))
        if lam_min < SONIC_EIG_TOL:
            raise NearSonicError(
                "flux Jacobian nearly singular during inversion",
                eigenvalue=lam_min)
        try:
            step = np.linalg.solve(J, -res)
        except np.linalg.LinAlgError:
            raise NearSonicError("flux Jacobian singular during inversion")
        t = 1.0
        for _ in range(MAX_HALVINGS):
            U_new = U + t * step
            if ((system.is_physical is None or system.is_physical(U_new))
                    and _same_branch(system, U_new, sig_hint)):
                res_new = system.flux_x(U_new) - V
                rnorm_new = np.linalg.norm(res_new)
                if rnorm_new < rnorm or rnorm_new <= tol * scale:
                    break
            t *= 0.5
        else:
            raise InversionError(
                "damped Newton stalled inverting the flux", residual=rnorm)
        U, res, rnorm = U_new, res_new, rnorm_new
        if rnorm <= tol * scale:
            _reject_near_sonic(system, U)
            return U
    raise InversionError(
        f"flux inversion did not converge in {max_iters} iterations",
        residual=rnorm)


def _reject_near_sonic(system, U):
    lam = np.linalg.eigvals(system.jacobian_x(U)) if system.m > 2 \
        else np.diag(system.jacobian_x(U))
    lam_min = float(np.min(np.abs(lam)))
    if lam_min < SONIC_EIG_TOL:
        raise NearSonicError("state landed on the sonic line",
                             eigenvalue=lam_min)


def _state_derivative(system, U, x):
    """dU/dx = (grad f)^{-1} a(U, x) at a smooth point."""
    return np.linalg.solve(system.jacobian_x(U), system.source(U, x))


def _solve_stage(system, V_target_part, weight, x_new, U_seed):
    """Solve f(U) - V_target_part - weight * a(U, x_new) = 0 by damped Newton.

    Used for the implicit trapezoid stage; ``weight`` = h/2.
    """
    U = np.asarray(U_seed, dtype=float).copy()
    sig_hint = _eig_signature(system, U)

    def residual(Uv):
        return system.flux_x(Uv) - V_target_part - weight * system.source(Uv,
                                                                           x_new)

    res = residual(U)
    rnorm = np.linalg.norm(res)
    for _ in range(60):
        if rnorm <= STAGE_TOL * (1.0 + np.linalg.norm(V_target_part)):
            _reject_near_sonic(system, U)
            return U
        J = system.jacobian_x(U) - weight * system.source_jac(U, x_new)
        lam = np.linalg.eigvals(system.jacobian_x(U)) if system.m > 2 \
            else np.diag(system.jacobian_x(U))
        if float(np.min(np.abs(lam))) < SONIC_EIG_TOL:
            raise NearSonicError("trapezoid stage hit a sonic state",
                                 eigenvalue=float(np.min(np.abs(lam))))
        try:
            step = np.linalg.solve(J, -res)
        except np.linalg.LinAlgError:
            raise NearSonicError("trapezoid stage Jacobian singular")
        t = 1.0
        for _ in range(MAX_HALVINGS):
            U_new = U + t * step
            if ((system.is_physical is None or system.is_physical(U_new))
                    and _same_branch(system, U_new, sig_hint)):
                res_new = residual(U_new)
                rnorm_new = np.linalg.norm(res_new)
                if rnorm_new < rnorm or rnorm_new <= STAGE_TOL:
                    break
            t *= 0.5
        else:
            raise InversionError("trapezoid stage Newton stalled",
                                 residual=rnorm)
        U, res, rnorm = U_new, res_new, rnorm_new
    raise InversionError("trapezoid stage did not converge", residual=rnorm)


def _step(system, integ, U, x, h):
    """Advance one step of size h (signed).  Returns the new state."""
    V = system.flux_x(U)
    if integ.name == "euler":
        V_new = V + h * system.source(U, x)
        return invert_flux(system, V_new, U)
    if integ.name == "trapezoid":
        a0 = system.source(U, x)
        # explicit Euler predictor seeds the implicit stage; if the explicit
        # image is not invertible (near a sonic fold) seed from the current
        # state instead
        try:
            U_pred = invert_flux(system, V + h * a0, U)
        except (InversionError, NearSonicError):
            U_pred = U
        return _solve_stage(system, V + 0.5 * h * a0, 0.5 * h, x + h, U_pred)
    if integ.name == "rk4":
        k1 = system.source(U, x)
        U2 = invert_flux(system, V + 0.5 * h * k1, U)
        k2 = system.source(U2, x + 0.5 * h)
        U3 = invert_flux(system, V + 0.5 * h * k2, U2)
        k3 = system.source(U3, x + 0.5 * h)
        U4 = invert_flux(system, V + h * k3, U3)
        k4 = system.source(U4, x + h)
        V_new = V + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        return invert_flux(system, V_new, U4)
    raise KeyError(f"unknown integrator {integ.name!r}")


def propagate(system, integrator, U_start, x_start, x_end, n_steps,
              with_derivatives=False, halt=None):
    """Integrate the steady system from x_start to x_end in n_steps steps.

    Marches in the direction of sign(x_end - x_start).  If ``halt`` is given
    it is evaluated at every accepted sample as halt(k, x, U); a truthy
    return stops the march with status 'halted'.  A near-sonic failure while
    stepping stops with status 'near-sonic'; in both cases ``valid_to`` marks
    the last accepted sample.
    """
    integ = get_integrator(integrator)
    grid = np.linspace(x_start, x_end, n_steps + 1)
    m = system.m
    states = np.full((n_steps + 1, m), np.nan)
    derivs = np.full((n_steps + 1, m), np.nan) if with_derivatives else None
    direction = "left-to-right" if x_end >= x_start else "right-to-left"

    U = np.asarray(U_start, dtype=float).copy()
    system.require_physical(U)
    states[0] = U
    if with_derivatives:
        derivs[0] = _state_derivative(system, U, grid[0])
    status = "complete"
    valid_to = 0
    for k in range(n_steps):
        if halt is not None and halt(k, grid[k], U):
            status = "halted"
            break
        h = grid[k + 1] - grid[k]
        try:
            U = _step(system, integ, U, grid[k], h)
        except NearSonicError:
            status = "near-sonic"
            break
        except InversionError:
            # flux value left the attainable range: branch breaks down here
            status = "inversion-failure"
            break
        system.require_physical(U)
        if with_derivatives:
            try:
                _reject_near_sonic(system, U)
                deriv = _state_derivative(system, U, grid[k + 1])
            except NearSonicError:
                status = "near-sonic"
                break
            derivs[k + 1] = deriv
        states[k + 1] = U
        valid_to = k + 1
    else:
        if halt is not None and halt(n_steps, grid[-1], U):
            status = "halted"
    return Branch1D(grid=grid, states=states, direction=direction,
                    valid_to=valid_to, derivs=derivs, status=status)


def propagate_with_derivatives(system, integrator, U_start, x_start, x_end,
                               n_steps, halt=None):
    """propagate() storing dU/dx = (grad f)^{-1} a at every accepted point."""
    return propagate(system, integrator, U_start, x_start, x_end, n_steps,
                     with_derivatives=True, halt=halt)


def step_once(system, integrator, U, x, h):
    """Single integration step; exposed for partial steps during matching."""
    if h == 0.0:
        return np.asarray(U, dtype=float).copy()
    return _step(system, get_integrator(integrator), np.asarray(U, float),
                 x, h)
