"""Two-dimensional scalar sweeping and matching.

Smooth solution branches are generated by directional line-marching sweeps
(Lax-Friedrichs or Lax-Wendroff numerical fluxes, in conservative or
non-conservative form), then joined along match curves: shock curves follow
the discrete jump-balance slope, continuity curves follow the common
characteristic of the two branches (with a local zero-level correction of
the branch difference).  Two composition pipelines are provided: a shock
born in the interior of the domain, and an expansion fan.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CflError, NoJumpError, StructureError, UsageError
from .rootfind import illinois

CFL_TARGET = 0.9


@dataclass
class Branch2D:
    """One smooth solution branch sampled on the full rectangle."""

    x: np.ndarray
    y: np.ndarray
    values: np.ndarray          # (ny, nx)
    sweep_dir: str
    valid_mask: np.ndarray = None
    branch_id: str = ""

    def interp(self, xq, yq):
        """Bilinear value at (xq, yq), clipped to the grid."""
        x, y = self.x, self.y
        xq = min(max(xq, x[0]), x[-1])
        yq = min(max(yq, y[0]), y[-1])
        i = min(int((xq - x[0]) / (x[1] - x[0])), len(x) - 2)
        j = min(int((yq - y[0]) / (y[1] - y[0])), len(y) - 2)
        tx = (xq - x[i]) / (x[i + 1] - x[i])
        ty = (yq - y[j]) / (y[j + 1] - y[j])
        v = self.values
        return ((1 - tx) * (1 - ty) * v[j, i] + tx * (1 - ty) * v[j, i + 1]
                + (1 - tx) * ty * v[j + 1, i] + tx * ty * v[j + 1, i + 1])


@dataclass
class MatchCurve:
    nodes: np.ndarray           # (k, 2) polyline
    kind: str                   # 'shock' | 'continuity'
    left_branch_id: str = ""
    right_branch_id: str = ""
    truncated: bool = False

    def x_at(self, yq):
        """Curve abscissa at height yq (nodes must be y-monotone)."""
        ys = self.nodes[:, 1]
        xs = self.nodes[:, 0]
        if ys[0] > ys[-1]:
            ys, xs = ys[::-1], xs[::-1]
        return float(np.interp(yq, ys, xs))


def _advance_line(u, dt, dx, flux, dflux, scheme, form):
    """One sub-step of the chosen 3-point scheme on one grid line.

    Ghost cells are linear extrapolations; callers overwrite boundary
    entries afterwards when side data is declared.
    """
    ug = np.empty(len(u) + 2)
    ug[1:-1] = u
    ug[0] = 2 * u[0] - u[1]
    ug[-1] = 2 * u[-1] - u[-2]
    sig = dt / dx
    um, uc, up = ug[:-2], ug[1:-1], ug[2:]
    if form == "conservative":
        fm, fc, fp = flux(um), flux(uc), flux(up)
        if scheme == "lax_friedrichs":
            return 0.5 * (um + up) - 0.5 * sig * (fp - fm)
        if scheme == "lax_wendroff":
            ap = dflux(0.5 * (uc + up))
            am = dflux(0.5 * (um + uc))
            return (uc - 0.5 * sig * (fp - fm)
                    + 0.5 * sig * sig * (ap * (fp - fc) - am * (fc - fm)))
    else:
        a = dflux(uc)
        if scheme == "lax_friedrichs":
            return 0.5 * (um + up) - 0.5 * sig * a * (up - um)
        if scheme == "lax_wendroff":
            return (uc - 0.5 * sig * a * (up - um)
                    + 0.5 * sig * sig * a * a * (up - 2 * uc + um))
    raise UsageError(f"unknown scheme {scheme!r} / form {form!r}")


def _side_value(problem, side, coord, override):
    if override is not None and side in override:
        fn = override[side]
        return None if fn is None else fn(coord)
    bc = problem.boundaries.get(side)
    if bc is not None and bc.kind == "dirichlet":
        return bc.data["u"](coord)
    return None


def sweep_scalar(problem, scheme="lax_friedrichs", form="conservative",
                 direction="from-bottom", n=65, inflow=None,
                 side_values=None, substeps=None, branch_id=None):
    """Fill one solution branch by marching lines across the domain.

    ``inflow`` overrides the inflow-side data (callable of the transverse
    coordinate); ``side_values`` maps side names to callables (or None for
    outflow extrapolation) overriding the declared boundary data.  The
    stability ratio of each line advance is kept below 0.9 by internal
    sub-stepping; passing ``substeps`` pins the count instead (raising
    CflError when the ratio is violated).
    """
    (x0, x1), (y0, y1) = problem.domain
    xs = np.linspace(x0, x1, n)
    ys = np.linspace(y0, y1, n)
    dx, dy = xs[1] - xs[0], ys[1] - ys[0]
    system = problem.system
    # scalar quadratic x-flux and unit y-flux are assumed by the marching
    # forms below; guard against other systems
    if system.kind != "burgers2d":
        raise UsageError("scalar sweeps support the quadratic-flux system")

    flux = lambda u: 0.5 * u * u
    dflux = lambda u: u

    values = np.full((n, n), np.nan)

    if direction in ("from-bottom", "from-top"):
        marching_down = direction == "from-top"
        eff_flux = (lambda u: -flux(u)) if marching_down else flux
        eff_dflux = (lambda u: -dflux(u)) if marching_down else dflux
        inflow_side = "top" if marching_down else "bottom"
        if inflow is None:
            line = np.array([_side_value(problem, inflow_side, x, None)
                             for x in xs], dtype=float)
            if np.any(np.isnan(line)):
                raise UsageError(f"no data on the {inflow_side} side")
        else:
            line = np.asarray([inflow(x) for x in xs], dtype=float)
        rows = range(n - 2, -1, -1) if marching_down else range(1, n)
        row0 = n - 1 if marching_down else 0
        values[row0] = line
        for j in rows:
            yq = ys[j]
            speed = float(np.max(np.abs(line))) + 1e-12
            n_sub = substeps or max(1, int(math.ceil(
                dy * speed / (CFL_TARGET * dx))))
            if substeps is not None and dy * speed / (substeps * dx) \
                    > 1.0 + 1e-12:
                raise CflError(
                    f"stability ratio {dy * speed / (substeps * dx):.3f} "
                    "exceeds 1 for the requested sub-step count")
            for _ in range(n_sub):
                line = _advance_line(line, dy / n_sub, dx, eff_flux,
                                     eff_dflux, scheme, form)
                lv = _side_value(problem, "left", yq, side_values)
                rv = _side_value(problem, "right", yq, side_values)
                if lv is not None:
                    line[0] = lv
                if rv is not None:
                    line[-1] = rv
            values[j] = line
        return Branch2D(x=xs, y=ys, values=values, sweep_dir=direction,
                        branch_id=branch_id or direction)

    if direction in ("from-left", "from-right"):
        # transverse march: u_x = -g'(u) u_y / f'(u), upwind in y; used to
        # generate smooth side branches (f' must be one-signed)
        from_left = direction == "from-left"
        inflow_side = "left" if from_left else "right"
        if inflow is None:
            col = np.array([_side_value(problem, inflow_side, y, None)
                            for y in ys], dtype=float)
            if np.any(np.isnan(col)):
                raise UsageError(f"no data on the {inflow_side} side")
        else:
            col = np.asarray([inflow(y) for y in ys], dtype=float)
        cols = range(1, n) if from_left else range(n - 2, -1, -1)
        col0 = 0 if from_left else n - 1
        values[:, col0] = col
        corner = col[0]
        for i in cols:
            fp = dflux(col)
            if np.any(np.abs(fp) < 1e-10):
                raise CflError("transverse march hit a sonic value")
            slope = 1.0 / fp          # dy/dx of the characteristics
            n_sub = substeps or max(1, int(math.ceil(
                dx * float(np.max(np.abs(slope))) / (CFL_TARGET * dy))))
            for _ in range(n_sub):
                step = (dx / n_sub) * slope
                newc = col.copy()
                # upwind: positive characteristic slope looks down
                newc[1:] = np.where(step[1:] >= 0,
                                    col[1:] - step[1:] / dy
                                    * (col[1:] - col[:-1]), col[1:])
                newc[:-1] = np.where(step[:-1] < 0,
                                     col[:-1] + step[:-1] / dy
                                     * (col[:-1] - col[1:]), newc[:-1])
                newc[0] = corner if step[0] >= 0 else newc[0]
                col = newc
            values[:, i] = col
        return Branch2D(x=xs, y=ys, values=values, sweep_dir=direction,
                        branch_id=branch_id or direction)

    raise UsageError(f"unknown sweep direction {direction!r}")


def _entropy_ok(u_a, u_b, t_vec):
    """Lax admissibility of a shock segment with tangent t, a-side left."""
    n = np.array([t_vec[1], -t_vec[0]])
    if n[0] < 0:
        n = -n
    lam_a = u_a * n[0] + n[1]
    lam_b = u_b * n[0] + n[1]
    return lam_a > 0.0 > lam_b


def match_branches(branch_a, branch_b, system, start, kind,
                   direction="up", stop_x=None, n_max=100000,
                   corrector=True, guide=None):
    """March a match curve between two overlapping branches.

    Shock curves integrate the jump-balance slope dy/dx = [g]/[f] with
    branch values interpolated at the curve nodes (explicit midpoint).
    Continuity curves follow the common characteristic of the two branches
    (the ``guide`` branch supplies it when given, e.g. the crisper of the
    two), with a local zero-level correction of the branch difference where
    it changes sign transversally.  Marching stops at the domain boundary
    or at ``stop_x``.
    """
    xs, ys = branch_a.x, branch_a.y
    h = ys[1] - ys[0] if direction in ("up", "down") else xs[1] - xs[0]
    sgn = 1.0 if direction in ("up", "right") else -1.0
    x, y = start
    nodes = [(x, y)]
    truncated = False

    def dxdy(xq, yq):
        if kind == "continuity" and guide is not None:
            return guide.interp(xq, yq)
        ua = branch_a.interp(xq, yq)
        ub = branch_b.interp(xq, yq)
        if kind == "shock":
            df = 0.5 * (ua * ua - ub * ub)
            dg = ua - ub
            if abs(dg) < 1e-14:
                raise StructureError("degenerate jump along match curve")
            if not _entropy_ok(ua, ub, np.array([df / dg, 1.0])):
                raise NoJumpError("entropy violated along the match curve")
            return df / dg
        u_bar = 0.5 * (ua + ub)
        return u_bar

    if kind == "continuity":
        # degenerate case: identical branches pin the curve to the seed
        if abs(branch_a.interp(x, y) - branch_b.interp(x, y)) < 1e-13 and \
                np.allclose(branch_a.values, branch_b.values):
            return MatchCurve(nodes=np.array(nodes), kind=kind,
                              left_branch_id=branch_a.branch_id,
                              right_branch_id=branch_b.branch_id)

    x_first = x
    for _ in range(n_max):
        if direction in ("up", "down"):
            y_new = y + sgn * h
            if y_new > ys[-1] + 1e-12 or y_new < ys[0] - 1e-12:
                break
            s1 = dxdy(x, y)
            s2 = dxdy(x + s1 * (y_new - y) * 0.5, 0.5 * (y + y_new))
            x_new = x + s2 * (y_new - y)
            if kind == "continuity" and corrector:
                x_new = _zero_correct(branch_a, branch_b, x_new, y_new,
                                      3.0 * (xs[1] - xs[0]))
        else:
            x_new = x + sgn * h
            if x_new > xs[-1] + 1e-12 or x_new < xs[0] - 1e-12:
                break
            s1 = dxdy(x, y)
            s2 = dxdy(0.5 * (x + x_new), y + s1 * (x_new - x) * 0.5)
            y_new = y + (x_new - x) * s2
        if stop_x is not None and x_new != x:
            crossed = (x_first <= stop_x <= x_new) or \
                      (x_new <= stop_x <= x_first)
            if crossed and abs(x_new - stop_x) <= abs(x_new - x):
                t = (stop_x - x) / (x_new - x)
                nodes.append((stop_x, y + t * (y_new - y)))
                break
        if not (xs[0] - 1e-12 <= x_new <= xs[-1] + 1e-12):
            # clip the exit through a vertical side
            t = ((xs[-1] if x_new > xs[-1] else xs[0]) - x) / (x_new - x)
            nodes.append((min(max(x_new, xs[0]), xs[-1]),
                          y + t * (y_new - y)))
            break
        x, y = x_new, y_new
        nodes.append((x, y))
        if not (ys[0] - 1e-12 <= y <= ys[-1] + 1e-12):
            break
    else:
        truncated = True
    return MatchCurve(nodes=np.array(nodes), kind=kind,
                      left_branch_id=branch_a.branch_id,
                      right_branch_id=branch_b.branch_id,
                      truncated=truncated)


def _zero_correct(branch_a, branch_b, x_pred, y, window):
    """Correct the predictor to the local zero level of the branch
    difference.

    Acts only when the difference changes sign transversally within the
    window, or when a clear agreement plateau has an edge there (then the
    node snaps to the edge of the plateau).  Otherwise the characteristic
    predictor is kept.
    """
    xs = branch_a.x

    def d(xq):
        return branch_a.interp(xq, y) - branch_b.interp(xq, y)

    lo = max(x_pred - window, xs[0])
    hi = min(x_pred + window, xs[-1])
    if hi <= lo:
        return x_pred
    ts = np.linspace(lo, hi, 13)
    ds = np.array([d(t) for t in ts])
    pos = ds > 1e-12
    neg = ds < -1e-12
    if pos.any() and neg.any():
        for i in range(len(ts) - 1):
            if (pos[i] and neg[i + 1]) or (neg[i] and pos[i + 1]):
                x_root, _ = illinois(d, ts[i], ts[i + 1], fa=ds[i],
                                     fb=ds[i + 1], tol=1e-14, xtol=1e-14)
                return x_root
        return x_pred
    big = float(np.max(np.abs(ds)))
    if big < 1e-9 or float(np.min(np.abs(ds))) > 0.05 * big:
        return x_pred
    # one-sided agreement plateau: snap to its edge (quarter-level crossing)
    level = 0.25 * big
    crossing = np.where((np.abs(ds[:-1]) - level)
                        * (np.abs(ds[1:]) - level) < 0.0)[0]
    if len(crossing) == 0:
        return x_pred
    i = int(crossing[0])
    t = (level - abs(ds[i])) / (abs(ds[i + 1]) - abs(ds[i]))
    return float(ts[i] + t * (ts[i + 1] - ts[i]))


def extend_boundary_data(data, x_star, eps, mollify_width, side="right"):
    """Smooth continuation of one-sided boundary data past x_star.

    The trend of the data is continued linearly over a stretch ``eps`` and
    frozen beyond, and the result is convolved with a compactly supported
    smooth kernel of the given width.  Constant data comes back exactly
    constant.
    """
    sgn = 1.0 if side == "right" else -1.0
    delta = max(eps * 1e-2, 1e-9)
    u0 = float(data(x_star - sgn * 1e-12))
    slope = (u0 - float(data(x_star - sgn * delta))) / (sgn * delta)
    u_end = u0 + slope * eps

    def base(xq):
        xq = np.asarray(xq, dtype=float)
        s = sgn * (xq - x_star)
        inside = s <= 0.0
        ramp = (s > 0.0) & (s < eps)
        out = np.empty_like(xq)
        if np.any(inside):
            out[inside] = data(xq[inside]) if xq.ndim else data(float(xq))
        out[ramp] = u0 + slope * s[ramp]
        out[s >= eps] = u_end
        return out if out.ndim else float(out)

    if mollify_width <= 0.0:
        return lambda xq: base(xq)

    nodes, weights = np.polynomial.legendre.leggauss(32)
    t = mollify_width * nodes
    kern = np.exp(-1.0 / np.maximum(1.0 - nodes * nodes, 1e-300))
    norm = float(np.sum(weights * kern))

    def smooth(xq):
        if np.ndim(xq):
            return np.array([smooth(float(v)) for v in xq])
        vals = base(xq - t)
        return float(np.sum(weights * kern * vals) / norm)

    return smooth


@dataclass
class Scalar2DResult:
    x: np.ndarray
    y: np.ndarray
    u: np.ndarray               # composed field (ny, nx)
    region: np.ndarray          # branch id per node
    curves: list
    x_star: float
    y_star: float = None
    branches: dict = field(default_factory=dict)
    region_names: tuple = ()


def _locate_star(problem, xs):
    """Boundary abscissa where the x-characteristic speed vanishes/jumps."""
    u_b = problem.boundaries["bottom"].data["u"](xs)
    speeds = np.asarray(u_b, dtype=float)
    scale = float(np.max(speeds) - np.min(speeds)) + 1e-300
    sign_change = np.where(np.sign(speeds[:-1]) != np.sign(speeds[1:]))[0]
    if len(sign_change):
        i = int(sign_change[0])
        jump = abs(speeds[i + 1] - speeds[i])
        if jump > 0.25 * scale:
            # discontinuous data: the star point is the jump location
            return 0.5 * (xs[i] + xs[i + 1])
        t = speeds[i] / (speeds[i] - speeds[i + 1])
        return float(xs[i] + t * (xs[i + 1] - xs[i]))
    raise StructureError("characteristic speed does not change sign "
                         "on the inflow boundary")


def _row_blend(branch, yq):
    """Full grid row of a branch at height yq by linear row interpolation."""
    ys = branch.y
    t = (yq - ys[0]) / (ys[1] - ys[0])
    k = min(max(int(t), 0), len(ys) - 2)
    w = t - k
    return (1.0 - w) * branch.values[k] + w * branch.values[k + 1]


def solve_interior_shock(problem, scheme="lax_friedrichs", N=65,
                         form="nonconservative"):
    """Shock born inside the domain: bottom branch, side branches,
    continuity matching to the focal point, then a boundary-origin shock
    on the upper strip."""
    (x0, x1), (y0, y1) = problem.domain
    xs = np.linspace(x0, x1, N)
    ys = np.linspace(y0, y1, N)
    dx, dy = xs[1] - xs[0], ys[1] - ys[0]
    system = problem.system

    x_star = _locate_star(problem, xs)
    u_bottom = sweep_scalar(problem, scheme, form, "from-bottom", N,
                            branch_id="bottom")
    u_left = sweep_scalar(problem, scheme, form, "from-left", N,
                          branch_id="left")
    u_right = sweep_scalar(problem, scheme, form, "from-right", N,
                           branch_id="right")

    # continuity seams from the lower corners collide at the focal point;
    # the constant side branches carry the crisp characteristic direction
    seam_l = match_branches(u_left, u_bottom, system, (x0, y0),
                            "continuity", direction="up", stop_x=x_star,
                            corrector=False, guide=u_left)
    seam_r = match_branches(u_bottom, u_right, system, (x1, y0),
                            "continuity", direction="up", stop_x=x_star,
                            corrector=False, guide=u_right)
    y_star = float(seam_l.nodes[-1][1])
    j_strip = min(max(int((y_star - y0) / dy), 1), N - 3)

    # composite below the focal point
    u = u_bottom.values.copy()
    for j in range(min(j_strip + 1, N)):
        yq = ys[j]
        xl = seam_l.x_at(yq) if yq <= seam_l.nodes[-1][1] else x_star
        xr = seam_r.x_at(yq) if yq <= seam_r.nodes[-1][1] else x_star
        u[j, xs < xl] = u_left.values[j, xs < xl]
        u[j, xs > xr] = u_right.values[j, xs > xr]

    # re-posed problem on the strip above, with the composed line as data
    strip_line = u[j_strip].copy()
    data_fn = lambda xq: np.interp(xq, xs, strip_line)
    w = 2.0 * dx
    left_data = extend_boundary_data(data_fn, x_star - w, 4 * dx, 2 * dx,
                                     side="right")
    right_data = extend_boundary_data(data_fn, x_star + w, 4 * dx, 2 * dx,
                                      side="left")
    from dataclasses import replace
    sub = replace(problem, domain=((x0, x1), (ys[j_strip], y1)))
    strip_left = sweep_scalar(sub, scheme, form, "from-bottom", N,
                              inflow=left_data, branch_id="strip-left",
                              side_values={"right": None})
    strip_right = sweep_scalar(sub, scheme, form, "from-bottom", N,
                               inflow=right_data, branch_id="strip-right",
                               side_values={"left": None})

    shock = match_branches(strip_left, strip_right, system,
                           (x_star, ys[j_strip]), "shock", direction="up")

    region = np.zeros((N, N), dtype=int)
    for j in range(N):
        yq = ys[j]
        if j <= j_strip:
            xl = seam_l.x_at(yq) if yq <= seam_l.nodes[-1][1] else x_star
            xr = seam_r.x_at(yq) if yq <= seam_r.nodes[-1][1] else x_star
            region[j, xs < xl] = 0
            region[j, (xs >= xl) & (xs <= xr)] = 1
            region[j, xs > xr] = 2
        else:
            xsh = shock.x_at(yq)
            row_l = _row_blend(strip_left, yq)
            row_r = _row_blend(strip_right, yq)
            left_cells = xs < xsh
            u[j] = np.where(left_cells, row_l, row_r)
            region[j] = np.where(left_cells, 0, 2)
    return Scalar2DResult(
        x=xs, y=ys, u=u, region=region,
        curves=[seam_l, seam_r, shock], x_star=x_star, y_star=y_star,
        branches={"bottom": u_bottom, "left": u_left, "right": u_right,
                  "strip-left": strip_left, "strip-right": strip_right},
        region_names=("left", "fan", "right"))


def fan_boundary_value(system, x, y, x_star, u_lo, u_hi):
    """Value whose characteristic through (x, y) passes through the fan
    origin: solve f'(u) (y - 0) = g'(u) (x - x_star).

    The continuation runs smoothly past the fan edges (so the matched
    seams see a transversal branch difference), clamped only at a generous
    margin beyond the data hull to keep the sweep stable; the clamped zone
    lies well inside the discarded part of the branch.
    """
    if system.kind != "burgers2d":
        raise UsageError("fan construction supports the quadratic flux")
    lo, hi = min(u_lo, u_hi), max(u_lo, u_hi)
    margin = hi - lo
    if y <= 0.0:
        return 0.5 * (u_lo + u_hi)
    return min(max((x - x_star) / y, lo - margin), hi + margin)


def solve_rarefaction(problem, scheme="lax_friedrichs", N=65,
                      form="conservative"):
    """Expansion fan: constant side branches cannot be joined by an
    admissible shock; a top branch built from the fan condition is matched
    to them by continuity curves."""
    (x0, x1), (y0, y1) = problem.domain
    xs = np.linspace(x0, x1, N)
    ys = np.linspace(y0, y1, N)
    dx, dy = xs[1] - xs[0], ys[1] - ys[0]
    system = problem.system
    bottom = problem.boundaries["bottom"].data["u"]

    x_star = _locate_star(problem, xs)
    u_lo = float(bottom(x_star - 2 * dx))
    u_hi = float(bottom(x_star + 2 * dx))

    left_data = extend_boundary_data(bottom, x_star - dx, 4 * dx, 2 * dx,
                                     side="right")
    right_data = extend_boundary_data(bottom, x_star + dx, 4 * dx, 2 * dx,
                                      side="left")
    u_left = sweep_scalar(problem, scheme, form, "from-bottom", N,
                          inflow=left_data, branch_id="left")
    u_right = sweep_scalar(problem, scheme, form, "from-bottom", N,
                           inflow=right_data, branch_id="right")

    # the would-be shock between the side branches must violate entropy
    df = 0.5 * (u_lo * u_lo - u_hi * u_hi)
    dg = u_lo - u_hi
    if _entropy_ok(u_lo, u_hi, np.array([df / dg, 1.0])):
        raise StructureError(
            "side branches admit an entropy shock; no fan forms")

    top_data = lambda xq: fan_boundary_value(system, xq, y1 - y0, x_star,
                                             u_lo, u_hi)
    side_fns = {
        "left": lambda yq: fan_boundary_value(system, x0, yq - y0, x_star,
                                              u_lo, u_hi),
        "right": lambda yq: fan_boundary_value(system, x1, yq - y0, x_star,
                                               u_lo, u_hi),
    }
    u_top = sweep_scalar(problem, scheme, form, "from-top", N,
                         inflow=top_data, side_values=side_fns,
                         branch_id="top")

    # seam seeds: where the top branch meets each side value on the top
    # row; the branch difference crosses zero transversally, so the
    # zero-level corrector pins the seam each row
    seam_l = match_branches(u_left, u_top, system,
                            (_row_seed(u_top, u_left, -1), y1),
                            "continuity", direction="down",
                            corrector=True, guide=u_left)
    seam_r = match_branches(u_top, u_right, system,
                            (_row_seed(u_top, u_right, -1), y1),
                            "continuity", direction="down",
                            corrector=True, guide=u_right)

    u = np.empty((N, N))
    region = np.zeros((N, N), dtype=int)
    for j in range(N):
        yq = ys[j]
        xl = _seam_x(seam_l, yq, x0)
        xr = _seam_x(seam_r, yq, x0)
        if xl > xr:
            xl = xr = 0.5 * (xl + xr)
        left_cells = xs < xl
        right_cells = xs > xr
        mid = ~(left_cells | right_cells)
        u[j, left_cells] = u_left.values[j, left_cells]
        u[j, right_cells] = u_right.values[j, right_cells]
        u[j, mid] = u_top.values[j, mid]
        region[j, left_cells] = 0
        region[j, mid] = 1
        region[j, right_cells] = 2
    u[0, :] = bottom(xs)
    return Scalar2DResult(
        x=xs, y=ys, u=u, region=region, curves=[seam_l, seam_r],
        x_star=x_star,
        branches={"left": u_left, "right": u_right, "top": u_top},
        region_names=("left", "fan", "right"))


def _row_seed(branch_a, branch_b, row):
    """Abscissa on a grid row where two branches agree."""
    d = branch_a.values[row] - branch_b.values[row]
    sign_change = np.where(np.sign(d[:-1]) != np.sign(d[1:]))[0]
    xs = branch_a.x
    if len(sign_change):
        i = int(sign_change[0])
        t = d[i] / (d[i] - d[i + 1])
        return float(xs[i] + t * (xs[i + 1] - xs[i]))
    return float(xs[int(np.argmin(np.abs(d)))])


def _seam_x(seam, yq, x_default):
    ys = seam.nodes[:, 1]
    lo, hi = min(ys[0], ys[-1]), max(ys[0], ys[-1])
    if yq < lo - 1e-12:
        return float(seam.nodes[-1][0] if ys[0] > ys[-1]
                     else seam.nodes[0][0])
    return seam.x_at(min(max(yq, lo), hi))
