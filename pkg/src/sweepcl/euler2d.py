"""Steady 2D Euler solves by paraxial marching and shock-curve tracking.

The equations are marched in x as f(U)_x = -g(U)_y while every eigenvalue
of the x-flux Jacobian stays positive (supersonic marching).  The flux
variable F = f(U) is the marched quantity; states are recovered per node
from the closed-form supersonic branch of the flux inverse (a quadratic for
a gamma-law gas).  Shock curves are fitted, not captured: either both
traces are known (incident shock: jump-balance normal per node) or the
downstream state is created by the jump conditions and the curve height is
adjusted per column until a discrete smoothness indicator of the downstream
column vanishes.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (NoJumpError, SolverError, StructureError,
                     TrackingError, UsageError)
from .jump import jump_2d, normal_from_states
from .rootfind import illinois

CFL_TARGET = 0.9


class ParaxialError(SolverError):
    """Loss of x-supersonicity during a paraxial march."""


@dataclass
class EulerField:
    x: np.ndarray
    y: np.ndarray
    U: np.ndarray               # (ny, nx, 4)

    def interp(self, xq, yq):
        x, y = self.x, self.y
        xq = min(max(xq, x[0]), x[-1])
        yq = min(max(yq, y[0]), y[-1])
        i = min(int((xq - x[0]) / (x[1] - x[0])), len(x) - 2)
        j = min(int((yq - y[0]) / (y[1] - y[0])), len(y) - 2)
        tx = (xq - x[i]) / (x[i + 1] - x[i])
        ty = (yq - y[j]) / (y[j + 1] - y[j])
        u = self.U
        return ((1 - tx) * (1 - ty) * u[j, i] + tx * (1 - ty) * u[j, i + 1]
                + (1 - tx) * ty * u[j + 1, i] + tx * ty * u[j + 1, i + 1])


@dataclass
class ShockCurve:
    x: np.ndarray
    phi: np.ndarray
    normals: np.ndarray = None
    upstream: np.ndarray = None
    downstream: np.ndarray = None
    residuals: np.ndarray = None

    def phi_at(self, xq):
        return float(np.interp(xq, self.x, self.phi))

    def angle_deg(self, skip=4):
        """Mean inclination of the curve from a least-squares slope fit."""
        k = min(skip, max(len(self.x) - 2, 0))
        xs, ps = self.x[k:], self.phi[k:]
        if len(xs) < 2:
            return float("nan")
        slope = np.polyfit(xs, ps, 1)[0]
        return math.degrees(math.atan(slope))


@dataclass
class Euler2DResult:
    x: np.ndarray
    y: np.ndarray
    U: np.ndarray
    region: np.ndarray
    curves: list
    report: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# closed-form supersonic flux inverse and column marching
# ---------------------------------------------------------------------------

def supersonic_flux_inverse(F, gamma):
    """State with f(U) = F on the supersonic-in-x branch (vectorised).

    The velocity solves a quadratic; the larger root is the supersonic one.
    Raises ParaxialError when the discriminant closes (sonic pinch) or the
    recovered state is not supersonic in x.
    """
    F = np.asarray(F, dtype=float)
    single = F.ndim == 1
    F = np.atleast_2d(F)
    g = gamma
    v = F[:, 2] / F[:, 0]
    a = -(g + 1.0) * F[:, 0] / (2.0 * (g - 1.0))
    b = g * F[:, 1] / (g - 1.0)
    c = -(F[:, 3] - 0.5 * F[:, 0] * v * v)
    disc = b * b - 4.0 * a * c
    if np.any(disc <= 0.0) or np.any(F[:, 0] <= 0.0):
        raise ParaxialError("flux value left the supersonic range")
    u = (-b - np.sqrt(disc)) / (2.0 * a)
    p = F[:, 1] - F[:, 0] * u
    rho = F[:, 0] / u
    if np.any(p <= 0.0) or np.any(u * u <= g * p / rho):
        raise ParaxialError("recovered state is not supersonic in x")
    E = p / (g - 1.0) + 0.5 * rho * (u * u + v * v)
    U = np.stack([rho, rho * u, rho * v, E], axis=1)
    return U[0] if single else U


def _primitive_arrays(U, g):
    rho = U[..., 0]
    u = U[..., 1] / rho
    v = U[..., 2] / rho
    p = (g - 1.0) * (U[..., 3] - 0.5 * rho * (u * u + v * v))
    return rho, u, v, p


def _flux_xy(U, g):
    rho, u, v, p = _primitive_arrays(U, g)
    fx = np.stack([rho * u, rho * u * u + p, rho * u * v,
                   u * (U[..., 3] + p)], axis=-1)
    fy = np.stack([rho * v, rho * u * v, rho * v * v + p,
                   v * (U[..., 3] + p)], axis=-1)
    return fx, fy


def _char_slope_bound(U, g):
    """Max |dy/dx| over the characteristic cones of the given states."""
    rho, u, v, p = _primitive_arrays(U, g)
    c2 = g * p / rho
    q2 = u * u + v * v
    den = np.maximum(u * u - c2, 1e-300)
    rad = np.sqrt(np.maximum(q2 - c2, 0.0) * c2)
    s1 = (np.abs(u * v) + rad) / den
    s2 = np.abs(v / u)
    return float(np.max(np.maximum(s1, s2)))


def _mirror_state(state, cos2d, sin2d):
    out = state.copy()
    mx, my = state[..., 1], state[..., 2]
    out[..., 1] = mx * cos2d + my * sin2d
    out[..., 2] = mx * sin2d - my * cos2d
    return out


def _advance_column(col, dx_seg, dy, g, bottom, top, substeps=None):
    """March one column of states from x to x + dx_seg (LF flux in y).

    ``bottom``/``top`` describe the boundary construction:
      ('mirror', cos2d, sin2d, wall_row, tanw) reflection across the wall,
      ('dirichlet', state)                    pinned top state,
      ('trace', state, row_top)               jump trace pinned at
                                              row_top and above,
      ('extrap',)                             zeroth-order outflow.
    Marched rows run from the wall row to the last free row below the
    pinned ones.
    """
    ny = col.shape[0]
    w = bottom[3] if bottom[0] == "mirror" else 0
    if top[0] == "trace":
        hi = top[2]                 # rows >= hi pinned to the trace
    elif top[0] == "dirichlet":
        hi = ny - 1                 # top row pinned to the state
    else:
        hi = ny
    U = col.copy()
    if top[0] == "trace":
        U[top[2]:] = top[1]
    elif top[0] == "dirichlet":
        U[ny - 1] = top[1]
    if hi <= w + 1:
        # no free rows between the wall and the pinned ones
        if bottom[0] == "mirror" and hi > w:
            U[w, 2] = U[w, 1] * bottom[4]
        return U
    alpha = _char_slope_bound(U[max(w, 0): min(hi + 1, ny)], g)
    n_sub = substeps or max(1, int(math.ceil(
        dx_seg * alpha / (CFL_TARGET * dy))))
    hseg = dx_seg / n_sub
    for _ in range(n_sub):
        work = np.empty((ny + 2, 4))
        work[1:-1] = U
        work[-1] = work[-2]
        if bottom[0] == "mirror":
            cos2d, sin2d = bottom[1], bottom[2]
            work[w] = _mirror_state(work[w + 2], cos2d, sin2d)
        elif bottom[0] == "dirichlet":
            work[0] = bottom[1]
        else:
            work[0] = work[1]
        fx, fy = _flux_xy(work, g)
        lam = _char_slope_bound(work[max(w, 0) + 1: min(hi, ny) + 1], g)
        ghat = 0.5 * (fy[:-1] + fy[1:]) - 0.5 * lam * (fx[1:] - fx[:-1])
        F_new = fx[1:-1] - (hseg / dy) * (ghat[1:] - ghat[:-1])
        U_new = U.copy()
        U_new[w:hi] = supersonic_flux_inverse(F_new[w:hi], g)
        if bottom[0] == "mirror":
            # hold the wall node on the wall direction
            U_new[w, 2] = U_new[w, 1] * bottom[4]
        U = U_new
    return U


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

def _wedge_rows(problem, xs, dy):
    nx = len(xs)
    wall_row = np.zeros(nx, dtype=int)
    cos2d = np.ones(nx)
    sin2d = np.zeros(nx)
    tanw = np.zeros(nx)
    wall_y = np.zeros(nx)
    bc = problem.boundaries.get("bottom")
    if bc is not None and bc.kind == "wedge":
        delta = math.radians(bc.data["delta_deg"])
        corner = bc.data["corner"]
        for i, x in enumerate(xs):
            if x > corner:
                wall_y[i] = (x - corner) * math.tan(delta)
                wall_row[i] = int(math.ceil(wall_y[i] / dy - 1e-12))
                cos2d[i] = math.cos(2 * delta)
                sin2d[i] = math.sin(2 * delta)
                tanw[i] = math.tan(delta)
    return wall_row, wall_y, cos2d, sin2d, tanw


def paraxial_sweep(problem, N, inflow=None, top=None, bottom=None,
                   use_wedge=False, counter=None):
    """Single left-to-right march of the full rectangle.

    ``inflow`` is the starting column of states (defaults to the declared
    left data); ``top``/``bottom`` override the y-boundary treatment
    ('extrap', ('dirichlet', state_fn), or the declared reflection wall).
    Returns an EulerField.
    """
    g = problem.system.params["gamma"]
    (x0, x1), (y0, y1) = problem.domain
    xs = np.linspace(x0, x1, N)
    ys = np.linspace(y0, y1, N)
    dx, dy = xs[1] - xs[0], ys[1] - ys[0]

    if inflow is None:
        inflow = np.array([problem.euler_side_state("left", y) for y in ys])
    U = np.empty((N, N, 4))
    U[:, 0, :] = inflow

    wall_row, wall_y, cos2d, sin2d, tanw = _wedge_rows(problem, xs, dy)
    if not use_wedge:
        wall_row = np.zeros(N, dtype=int)
        cos2d = np.ones(N)
        sin2d = np.zeros(N)
        tanw = np.zeros(N)

    bottom_kind = bottom
    if bottom_kind is None:
        bc = problem.boundaries.get("bottom")
        if bc is not None and bc.kind in ("reflection", "wedge"):
            bottom_kind = "mirror"
        else:
            bottom_kind = "extrap"

    col = inflow.copy()
    for i in range(1, N):
        if bottom_kind == "mirror":
            bot = ("mirror", cos2d[i], sin2d[i], int(wall_row[i]), tanw[i])
        else:
            bot = ("extrap",)
        if top is None:
            topspec = ("extrap",)
        elif top == "dirichlet":
            topspec = ("dirichlet", problem.euler_side_state("top", xs[i]))
        else:
            topspec = top
        col = _advance_column(col, dx, dy, g, bot, topspec)
        if bottom_kind == "mirror" and wall_row[i] > 0:
            # nodes below the stair wall hold mirrored values for plotting
            for j in range(wall_row[i]):
                ym = 2.0 * wall_y[i] - ys[j]
                k = min(int((ym - y0) / dy), N - 2)
                t = (ym - ys[k]) / dy
                samp = (1 - t) * col[k] + t * col[k + 1]
                col[j] = _mirror_state(samp, cos2d[i], sin2d[i])
        U[:, i, :] = col
    if counter is not None:
        counter["passes"] = counter.get("passes", 0) + 1
    return EulerField(x=xs, y=ys, U=U)


# ---------------------------------------------------------------------------
# incident shock between two known branches
# ---------------------------------------------------------------------------

def match_incident(problem, N, counter=None):
    """Sweep the left and top branches and fit the shock between them.

    The curve starts where the boundary data is discontinuous (the upper
    left corner) and integrates the slope given by the jump-balance normal
    at each node, both traces being known.  Returns (left_field, top_field,
    curve, x_star).
    """
    g = problem.system.params["gamma"]
    system = problem.system
    (x0, x1), (y0, y1) = problem.domain
    left = paraxial_sweep(problem, N, counter=counter)
    ys = left.y
    top_state = problem.euler_side_state("top", x0)
    top_col = np.tile(top_state, (N, 1))
    top = paraxial_sweep(problem, N, inflow=top_col, top="dirichlet",
                         bottom="extrap", counter=counter)

    xs = left.x
    dx = xs[1] - xs[0]
    x, y = x0, y1
    nodes = [(x, y)]
    normals = []
    residuals = []

    def slope(xq, yq):
        U_up = left.interp(xq, yq)
        U_dn = top.interp(xq, yq)
        n, res = normal_from_states(system, U_up, U_dn)
        return -n[0] / n[1], n, res

    while y > y0 and x < x1:
        s1, n, res = slope(x, y)
        xm, ym = x + 0.5 * dx, y + 0.5 * dx * s1
        s2, _, _ = slope(xm, max(ym, y0))
        x_new, y_new = x + dx, y + dx * s2
        if y_new <= y0:
            t = (y0 - y) / (y_new - y)
            x, y = x + t * dx, y0
            nodes.append((x, y))
            normals.append(n)
            residuals.append(res)
            break
        x, y = x_new, y_new
        nodes.append((x, y))
        normals.append(n)
        residuals.append(res)
    else:
        raise StructureError("incident shock does not reach the wall")
    nodes = np.array(nodes)
    curve = ShockCurve(x=nodes[:, 0], phi=nodes[:, 1],
                       normals=np.array(normals),
                       residuals=np.array(residuals))
    return left, top, curve, float(nodes[-1, 0])


def seed_reflected(problem, U_up, wall_tan=0.0):
    """Initial downstream state and normal where a shock leaves the wall.

    The wall condition pins one component of the post state
    (v = u tan(delta)); the jump conditions then determine the normal and
    the remaining components.
    """
    sol = jump_2d(problem.system, U_up,
                  constraint=lambda rho, u, v, p: v - u * wall_tan)
    return sol.post_state, sol.normal, sol


# ---------------------------------------------------------------------------
# shock-curve tracking by the smoothness condition
# ---------------------------------------------------------------------------

def track_shock(problem, upstream_field, x_start, seed_slope, N,
                seed_state=None, use_wedge=False, counter=None,
                curve_override=None, hold_cells=3.5, tol_factor=1e-6):
    """Grow the shock curve and downstream state in one left-to-right pass.

    Per column: guess the curve height, build the downstream trace from the
    jump conditions with the normal implied by the local slope, advance the
    downstream column with the trace enforced above the curve and the wall
    condition below, and adjust the height by a secant iteration until the
    three-point second difference of density just below the curve vanishes.
    Falls back to a bracketed solve on a four-cell window when the secant
    stalls.
    """
    g = problem.system.params["gamma"]
    system = problem.system
    (x0, x1), (y0, y1) = problem.domain
    xs = upstream_field.x
    ys = upstream_field.y
    dx, dy = xs[1] - xs[0], ys[1] - ys[0]
    wall_row, wall_y, cos2d, sin2d, tanw = _wedge_rows(problem, xs, dy)
    if not use_wedge:
        wall_row[:] = 0
        wall_y[:] = 0.0
        cos2d[:] = 1.0
        sin2d[:] = 0.0
        tanw[:] = 0.0

    i0 = int(np.searchsorted(xs, x_start - 1e-12))
    cols = range(i0 + 1, N)
    D = np.empty((N, N, 4))
    D[:] = np.nan
    phi = {i0: wall_y[i0] if use_wedge else y0}
    traces = {}
    normals = {}
    residuals = {}
    col_prev = None
    newton_iters = []

    def column_for(i, phi_i, phi_prev, col_prev_local):
        slope_loc = (phi_i - phi_prev) / dx
        n = np.array([slope_loc, -1.0])
        n /= np.linalg.norm(n)
        U_up = upstream_field.interp(xs[i], min(max(phi_i, y0), y1))
        sol = jump_2d(system, U_up, normal=n)
        trace = sol.post_state
        row_top = int(math.floor((phi_i - y0) / dy + 1e-12))
        row_top = min(max(row_top, wall_row[i]), N - 1)
        bot = ("mirror", cos2d[i], sin2d[i], int(wall_row[i]), tanw[i])
        top = ("trace", trace, row_top)
        col_new = _advance_column(col_prev_local, dx, dy, g, bot, top)
        return col_new, trace, n, sol.residual, row_top

    def indicator(i, phi_i, phi_prev, col_prev_local):
        try:
            col_new, trace, n, res, row_top = column_for(
                i, phi_i, phi_prev, col_prev_local)
        except (NoJumpError, ParaxialError):
            # inadmissible curve height (no entropy jump / sonic pinch)
            return None, None
        j = row_top
        if j - 2 < wall_row[i]:
            return None, (col_new, trace, n, res)
        d2 = (col_new[j, 0] - 2.0 * col_new[j - 1, 0]
              + col_new[j - 2, 0]) / (dy * dy)
        return d2, (col_new, trace, n, res)

    for i in cols:
        phi_prev = phi[i - 1]
        phi_pprev = phi.get(i - 2)
        if curve_override is not None:
            phi_i = curve_override(xs[i])
            if col_prev is not None:
                cpl = col_prev
            elif seed_state is not None:
                cpl = np.tile(seed_state, (N, 1))
            else:
                cpl = _seed_column(upstream_field, i - 1, traces,
                                   phi_prev, N)
            ind, payload = indicator(i, phi_i, phi_prev, cpl)
            if payload is None:
                raise TrackingError(
                    f"inadmissible forced curve at column {i}", column=i)
            col_prev = payload[0]
            phi[i] = phi_i
            traces[i] = payload[1]
            normals[i] = payload[2]
            residuals[i] = payload[3]
            D[:, i, :] = col_prev
            continue
        if phi_pprev is None:
            phi_guess = phi_prev + seed_slope * dx
        else:
            phi_guess = 2.0 * phi_prev - phi_pprev
        if col_prev is None:
            if seed_state is not None:
                col_prev_local = np.tile(seed_state, (N, 1))
            else:
                col_prev_local = np.tile(
                    upstream_field.interp(xs[i - 1],
                                          min(phi_prev + 2 * dy, y1)),
                    (N, 1))
        else:
            col_prev_local = col_prev

        gap = phi_guess - (wall_y[i] if use_wedge else y0)
        if gap < hold_cells * dy:
            # too few rows below the curve for the indicator: hold the
            # seed direction (exact for the attached shock foot)
            phi_i = phi_prev + seed_slope * dx
            _, payload = indicator(i, phi_i, phi_prev, col_prev_local)
            if payload is None:
                raise TrackingError(
                    f"inadmissible curve height at column {i}", column=i)
            col_prev = payload[0]
        else:
            rho_scale = float(upstream_field.interp(xs[i], min(
                max(phi_guess, y0), y1))[0])
            tol = tol_factor * rho_scale / (dy * dy)
            a_phi = phi_guess
            f_a, payload_a = indicator(i, a_phi, phi_prev, col_prev_local)
            if f_a is None:
                phi_i = phi_guess
                col_prev = payload_a[0]
                payload = payload_a
            else:
                b_phi = a_phi + 0.5 * dy
                f_b, payload_b = indicator(i, b_phi, phi_prev,
                                           col_prev_local)
                best = (a_phi, f_a, payload_a)
                it_count = 0
                for _ in range(20):
                    it_count += 1
                    if f_b is None or f_b == f_a:
                        break
                    step = -f_b * (b_phi - a_phi) / (f_b - f_a)
                    step = min(max(step, -1.5 * dy), 1.5 * dy)
                    a_phi, f_a, payload_a = b_phi, f_b, payload_b
                    b_phi = b_phi + step
                    f_b, payload_b = indicator(i, b_phi, phi_prev,
                                               col_prev_local)
                    if f_b is not None and abs(f_b) < abs(best[1]):
                        best = (b_phi, f_b, payload_b)
                    if f_b is not None and abs(f_b) < tol:
                        break
                if f_b is not None and abs(f_b) < tol:
                    phi_i, payload = b_phi, payload_b
                else:
                    phi_i, payload = _bisect_phi(indicator, i, phi_guess,
                                                 phi_prev, col_prev_local,
                                                 dy, tol, best)
                newton_iters.append(it_count)
                col_prev = payload[0]
        phi[i] = phi_i
        traces[i] = payload[1]
        normals[i] = payload[2]
        residuals[i] = payload[3]
        D[:, i, :] = col_prev

    idx = sorted(phi.keys())
    curve = ShockCurve(
        x=np.array([xs[i] for i in idx]),
        phi=np.array([phi[i] for i in idx]),
        normals=np.array([normals.get(i, (np.nan, np.nan)) for i in idx]),
        downstream=np.array([traces.get(i, np.full(4, np.nan))
                             for i in idx]),
        upstream=np.array([upstream_field.interp(
            xs[i], min(max(phi[i], y0), y1)) for i in idx]),
        residuals=np.array([residuals.get(i, np.nan) for i in idx]))
    report = {"newton_iters_mean": float(np.mean(newton_iters))
              if newton_iters else 0.0}
    if counter is not None:
        counter["passes"] = counter.get("passes", 0) + 1
    return curve, EulerField(x=xs, y=ys, U=D), report


def _seed_column(upstream_field, i, traces, phi_prev, N):
    return np.tile(upstream_field.interp(upstream_field.x[i], phi_prev),
                   (N, 1))


def _bisect_phi(indicator, i, phi_guess, phi_prev, col_prev_local, dy,
                tol, best):
    """Bracketed fallback for a stalled secant: scan a 4-cell window."""
    lo, hi = phi_guess - 2.0 * dy, phi_guess + 2.0 * dy
    samples = []
    for t in np.linspace(lo, hi, 17):
        f_t, payload = indicator(i, t, phi_prev, col_prev_local)
        if f_t is not None:
            samples.append((t, f_t, payload))
    for (t1, f1, p1), (t2, f2, p2) in zip(samples[:-1], samples[1:]):
        if np.sign(f1) != np.sign(f2):
            a, fa, pa = t1, f1, p1
            b, fb = t2, f2
            for _ in range(60):
                m = 0.5 * (a + b)
                fm, pm = indicator(i, m, phi_prev, col_prev_local)
                if fm is None:
                    break
                if abs(fm) < tol or (b - a) < 1e-14:
                    return m, pm
                if np.sign(fm) == np.sign(fa):
                    a, fa, pa = m, fm, pm
                else:
                    b, fb = m, fm
            return m, pm
    if best[1] is not None and samples:
        t_best, f_best, p_best = min(samples, key=lambda s: abs(s[1]))
        if abs(f_best) <= abs(best[1]):
            return t_best, p_best
        return best[0], best[2]
    raise TrackingError(
        f"no admissible curve height in the bracket at column {i}",
        column=i)


# ---------------------------------------------------------------------------
# full pipelines
# ---------------------------------------------------------------------------

def solve_reflection(problem, N):
    """Incident and reflected shocks on a flat wall: three grid passes."""
    g = problem.system.params["gamma"]
    (x0, x1), (y0, y1) = problem.domain
    counter = {"passes": 0}
    left, top, incident, x_star = match_incident(problem, N,
                                                 counter=counter)
    U_top_at_wall = top.interp(x_star, y0)
    seed_state, seed_n, _ = seed_reflected(problem, U_top_at_wall)
    t_vec = np.array([-seed_n[1], seed_n[0]])
    if t_vec[0] < 0:
        t_vec = -t_vec
    seed_slope = t_vec[1] / t_vec[0]
    reflected, downstream, track_rep = track_shock(
        problem, top, x_star, seed_slope, N, seed_state=seed_state,
        counter=counter)

    xs, ys = left.x, left.y
    U = np.empty((N, N, 4))
    region = np.zeros((N, N), dtype=int)
    for i in range(N):
        x = xs[i]
        y_inc = incident.phi_at(x) if x <= x_star else y0 - 1.0
        y_ref, have_ref = (reflected.phi_at(x), True) \
            if x >= reflected.x[0] else (y0 - 1.0, False)
        for j in range(N):
            y = ys[j]
            if y > y_inc and (not have_ref or y > y_ref):
                U[j, i] = top.U[j, i]
                region[j, i] = 1
            elif have_ref and y <= y_ref:
                U[j, i] = downstream.U[j, i]
                region[j, i] = 2
            else:
                U[j, i] = left.U[j, i]
                region[j, i] = 0
    report = {
        "passes": counter["passes"],
        "x_star": x_star,
        "incident_angle_deg": abs(incident.angle_deg()),
        "reflected_angle_deg": reflected.angle_deg(skip=6),
        "rh_residual_max": float(np.nanmax(reflected.residuals)),
        **track_rep,
    }
    return Euler2DResult(x=xs, y=ys, U=U, region=region,
                         curves=[incident, reflected], report=report)


def solve_oblique(problem, N):
    """Supersonic flow over a compression corner: two grid passes."""
    g = problem.system.params["gamma"]
    (x0, x1), (y0, y1) = problem.domain
    corner = problem.boundaries["bottom"].data["corner"]
    delta = math.radians(problem.boundaries["bottom"].data["delta_deg"])
    counter = {"passes": 0}
    left = paraxial_sweep(problem, N, counter=counter)
    U_up = left.interp(corner, y0)
    seed_state, seed_n, _ = seed_reflected(problem, U_up,
                                           wall_tan=math.tan(delta))
    t_vec = np.array([-seed_n[1], seed_n[0]])
    if t_vec[0] < 0:
        t_vec = -t_vec
    seed_slope = t_vec[1] / t_vec[0]
    curve, downstream, track_rep = track_shock(
        problem, left, corner, seed_slope, N, seed_state=seed_state,
        use_wedge=True, counter=counter)

    xs, ys = left.x, left.y
    dy = ys[1] - ys[0]
    wall_row, wall_y, _, _, _ = _wedge_rows(problem, xs, dy)
    U = left.U.copy()
    region = np.zeros((N, N), dtype=int)
    for i in range(N):
        x = xs[i]
        if x < curve.x[0]:
            continue
        y_c = curve.phi_at(x)
        below = ys <= y_c
        U[below, i] = downstream.U[below, i]
        region[below, i] = 2
        region[: wall_row[i], i] = 3
    rho, uu, vv, pp = _primitive_arrays(U, g)
    mach = np.sqrt(uu * uu + vv * vv) / np.sqrt(g * pp / rho)
    # representative downstream Mach: median over the fitted region away
    # from its edges
    sel = (region == 2)
    for i in range(N):
        y_c = curve.phi_at(xs[i]) if xs[i] >= curve.x[0] else -1.0
        collar = (ys > y_c - 3 * dy) & (ys <= y_c + 1e-12)
        sel[collar, i] = False
        sel[: wall_row[i] + 2, i] = False
    mach_down = float(np.median(mach[sel])) if np.any(sel) else float("nan")
    report = {
        "passes": counter["passes"],
        "shock_angle_deg": curve.angle_deg(skip=6),
        "mach_downstream": mach_down,
        "rh_residual_max": float(np.nanmax(curve.residuals)),
        **track_rep,
    }
    return Euler2DResult(x=xs, y=ys, U=U, region=region, curves=[curve],
                         report=report)
