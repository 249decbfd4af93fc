"""Independent reference solutions for the benchmark problems.

Everything in this module is derived from closed-form relations or from a
plain first-order time-marching scheme, never from the sweeping solvers, so
it can serve as an oracle in tests:

* ``exact_nozzle``       -- duct-flow solution from the algebraic branch
                            invariants (mass flux, total enthalpy, entropy),
                            accurate to machine precision;
* ``characteristics_scalar`` -- closed-form scalar solutions built with the
                            method of characteristics;
* ``theta_beta_mach``    -- oblique-shock angle/state relations;
* ``reference_time_march`` -- Lax-Friedrichs pseudo-time marching to steady
                            state (smeared reference fields, cached on disk).
"""

import hashlib
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from .errors import NoJumpError, StructureError, UsageError

_EPS = np.finfo(float).eps


# ---------------------------------------------------------------------------
# Exact quasi-1D duct flow
# ---------------------------------------------------------------------------

@dataclass
class _BranchInvariants:
    mdot: float        # rho * u * A
    h_total: float     # (E + p) / rho
    entropy: float     # p / rho^gamma
    regime: str        # 'subsonic' | 'supersonic'


@dataclass
class ExactNozzleSolution:
    problem: object
    shock_x: float
    invariants_left: _BranchInvariants
    invariants_right: _BranchInvariants
    alpha: float = None          # resolved inlet Mach for family problems
    turning_x: float = None

    def _branch_at(self, x):
        if self.turning_x is not None and x < self.turning_x:
            return _BranchInvariants(self.invariants_left.mdot,
                                     self.invariants_left.h_total,
                                     self.invariants_left.entropy,
                                     "subsonic")
        if x < self.shock_x:
            return self.invariants_left
        return self.invariants_right

    def primitive(self, x):
        """Physical (rho, u, p) at x."""
        g = self.problem.system.params["gamma"]
        A = self.problem.system.params["area"](x)
        br = self._branch_at(x)
        rho = _density_root(br.mdot, br.h_total, br.entropy, A, g, br.regime)
        u = br.mdot / (rho * A)
        p = br.entropy * rho ** g
        return rho, u, p

    def evaluate(self, x):
        """Conserved state (rho A, rho u A, E A) at x."""
        rho, u, p = self.primitive(x)
        A = self.problem.system.params["area"](x)
        return self.problem.system.from_primitive((rho * A, u, p * A))

    def invariant_drift(self, xs):
        """Max relative drift of the three invariants over the points xs."""
        g = self.problem.system.params["gamma"]
        worst = 0.0
        for x in xs:
            rho, u, p = self.primitive(x)
            A = self.problem.system.params["area"](x)
            br = self._branch_at(x)
            mdot = rho * u * A
            h = g / (g - 1.0) * p / rho + 0.5 * u * u
            s = p / rho ** g
            worst = max(worst,
                        abs(mdot / br.mdot - 1.0),
                        abs(h / br.h_total - 1.0),
                        abs(s / br.entropy - 1.0))
        return worst


def _sonic_density(mdot, entropy, A, g):
    return (mdot * mdot / (g * entropy * A * A)) ** (1.0 / (g + 1.0))


def _density_root(mdot, h_total, entropy, A, g, regime):
    """Solve the enthalpy equation for density on the requested branch."""

    def G(rho):
        return (g * entropy * rho ** (g - 1.0) / (g - 1.0)
                + 0.5 * mdot * mdot / (rho * rho * A * A)) - h_total

    rho_son = _sonic_density(mdot, entropy, A, g)
    g_son = G(rho_son)
    if g_son > 1e-9 * h_total:
        raise StructureError(
            f"no real flow state: sonic enthalpy exceeds target by {g_son}")
    if g_son >= 0.0:
        return rho_son
    if regime == "supersonic":
        lo = rho_son * 1e-6
        while G(lo) < 0.0:
            lo *= 0.1
        return brentq(G, lo, rho_son, xtol=1e-300 + 1e-30, rtol=4 * _EPS)
    hi = rho_son * 1e6
    while G(hi) < 0.0:
        hi *= 10.0
    return brentq(G, rho_son, hi, xtol=1e-300 + 1e-30, rtol=4 * _EPS)


def _normal_shock_primitive(rho1, u1, p1, g):
    """Post-shock (rho, u, p) of a stationary normal shock, closed form."""
    c1 = math.sqrt(g * p1 / rho1)
    m2 = (u1 / c1) ** 2
    rho_ratio = (g + 1.0) * m2 / ((g - 1.0) * m2 + 2.0)
    p_ratio = 1.0 + 2.0 * g * (m2 - 1.0) / (g + 1.0)
    rho2 = rho1 * rho_ratio
    return rho2, u1 * rho1 / rho2, p1 * p_ratio


def _post_shock_invariants(sol_left, x_s, g, problem):
    A = problem.system.params["area"](x_s)
    br = sol_left
    rho1 = _density_root(br.mdot, br.h_total, br.entropy, A, g, br.regime)
    u1 = br.mdot / (rho1 * A)
    p1 = br.entropy * rho1 ** g
    if u1 <= math.sqrt(g * p1 / rho1):
        raise NoJumpError("pre-shock state is not supersonic")
    rho2, u2, p2 = _normal_shock_primitive(rho1, u1, p1, g)
    return _BranchInvariants(br.mdot, br.h_total, p2 / rho2 ** g, "subsonic")


def _family_alpha_star(problem):
    """Inlet Mach making the duct flow exactly sonic at the throat."""
    g = problem.system.params["gamma"]
    r_gas = problem.system.params["r_gas"]
    bc = problem.boundaries["left"].data
    p, t_total = bc["p"], bc["t_total"]
    area = problem.system.params["area"]
    x0 = problem.domain[0][0]
    # area minimum of the parabola family is its vertex
    spec = problem.system.params["area_spec"]
    x_throat = spec.coeffs[2]
    A0, A_star = area(x0), area(x_throat)
    h_total = g * r_gas * t_total / (g - 1.0)
    c_star = math.sqrt(2.0 * (g - 1.0) * h_total / (g + 1.0))

    def mismatch(alpha):
        t_s = t_total / (1.0 + 0.5 * (g - 1.0) * alpha * alpha)
        rho = p / (r_gas * t_s)
        u = alpha * math.sqrt(g * r_gas * t_s)
        entropy = p / rho ** g
        rho_star = (c_star * c_star / (g * entropy)) ** (1.0 / (g - 1.0))
        return rho * u * A0 - rho_star * c_star * A_star

    alpha = brentq(mismatch, 1e-4, 0.9999, xtol=1e-300 + 1e-30, rtol=4 * _EPS)
    return alpha, x_throat


_NOZZLE_CACHE = {}


def exact_nozzle(problem):
    """Machine-precision duct-flow solution for the two nozzle instances."""
    key = problem.name
    if key in _NOZZLE_CACHE:
        return _NOZZLE_CACHE[key]
    g = problem.system.params["gamma"]
    x0, x1 = problem.domain[0]
    bc_left = problem.boundaries["left"]

    if bc_left.kind == "state":
        d = bc_left.data
        A0 = problem.system.params["area"](x0)
        mdot = d["rho"] * d["u"] * A0
        h_total = g / (g - 1.0) * d["p"] / d["rho"] + 0.5 * d["u"] ** 2
        left = _BranchInvariants(mdot, h_total, d["p"] / d["rho"] ** g,
                                 "supersonic")
        alpha = None
        x_turn = None
        lo, hi = x0 + 0.02 * (x1 - x0), x1 - 0.02 * (x1 - x0)
    elif bc_left.kind == "family":
        alpha, x_turn = _family_alpha_star(problem)
        U0 = problem.family_state(alpha)
        rho0, u0, p0 = (u / problem.system.params["area"](x0)
                        for u in (U0[0], 0.0, 0.0))
        prim = problem.system.to_primitive(U0)
        A0 = problem.system.params["area"](x0)
        rho0 = prim[0] / A0
        u0 = prim[1]
        p0 = prim[2] / A0
        mdot = rho0 * u0 * A0
        h_total = g / (g - 1.0) * p0 / rho0 + 0.5 * u0 * u0
        left = _BranchInvariants(mdot, h_total, p0 / rho0 ** g, "supersonic")
        lo, hi = x_turn + 1e-4 * (x1 - x0), x1 - 1e-6 * (x1 - x0)
    else:
        raise UsageError(f"{problem.name}: unsupported left boundary")

    bc_right = problem.boundaries["right"]
    comp, target = bc_right.data["component"], bc_right.data["value"]
    area = problem.system.params["area"]

    def outlet_mismatch(x_s):
        right = _post_shock_invariants(left, x_s, g, problem)
        rho = _density_root(right.mdot, right.h_total, right.entropy,
                            area(x1), g, "subsonic")
        if comp == "rho":
            return rho - target
        return right.entropy * rho ** g - target

    x_shock = brentq(outlet_mismatch, lo, hi,
                     xtol=1e-300 + 1e-30, rtol=4 * _EPS)
    right = _post_shock_invariants(left, x_shock, g, problem)
    sol = ExactNozzleSolution(problem=problem, shock_x=x_shock,
                              invariants_left=left, invariants_right=right,
                              alpha=alpha, turning_x=x_turn)
    _NOZZLE_CACHE[key] = sol
    return sol


# ---------------------------------------------------------------------------
# Scalar solutions by characteristics
# ---------------------------------------------------------------------------

@dataclass
class CharacteristicSolution:
    name: str
    x_star: float
    focal: tuple = None
    seams: tuple = ()            # straight lines (x0, y0, dx/dy, y_lo, y_hi)
    shock: tuple = None

    def evaluate(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.name == "interior-shock":
            below = y < self.focal[1]
            fan = np.where(np.abs(1.0 - 2.0 * y) > 1e-300,
                           (1.5 - 2.0 * x) / (1.0 - 2.0 * y), 0.0)
            u_lo = np.where(x <= 1.5 * y, 1.5,
                            np.where(x >= 1.0 - 0.5 * y, -0.5, fan))
            x_s = 0.5 + 0.5 * y
            u_hi = np.where(x < x_s, 1.5, -0.5)
            out = np.where(below, u_lo, u_hi)
            return out if out.ndim else float(out)
        if self.name == "rarefaction":
            with np.errstate(divide="ignore", invalid="ignore"):
                fan = np.where(y > 0, x / np.maximum(y, 1e-300), 0.0)
            out = np.where(x <= -y, -1.0, np.where(x >= 0.5 * y, 0.5, fan))
            return out if out.ndim else float(out)
        raise UsageError(f"no characteristics solution for {self.name!r}")

    def segment_breaks(self, p0, p1):
        """Parameters t in (0,1) where segment p0->p1 crosses a seam/shock."""
        lines = list(self.seams)
        if self.shock is not None:
            lines.append(self.shock)
        ts = []
        (x0, y0), (x1, y1) = p0, p1
        for (xa, ya, dxdy, ylo, yhi) in lines:
            # line: x = xa + dxdy * (y - ya) for y in [ylo, yhi]
            den = (x1 - x0) - dxdy * (y1 - y0)
            if abs(den) < 1e-14:
                continue
            t = (xa + dxdy * (y0 - ya) - x0) / den
            if 1e-12 < t < 1.0 - 1e-12:
                yc = y0 + t * (y1 - y0)
                if ylo - 1e-12 <= yc <= yhi + 1e-12:
                    ts.append(t)
        return sorted(ts)

    def contour_flux_integral(self, corners, n_gauss=48):
        """Closed-contour integral of (f, g) . n ds for a polygon contour.

        Splits each edge at the known solution seams so every quadrature
        panel sees a smooth integrand.  Zero (to quadrature accuracy) for a
        weak solution, including contours crossing the shock.
        """
        nodes, weights = np.polynomial.legendre.leggauss(n_gauss)
        total = 0.0
        pts = list(corners) + [corners[0]]
        for p0, p1 in zip(pts[:-1], pts[1:]):
            breaks = [0.0] + self.segment_breaks(p0, p1) + [1.0]
            (x0, y0), (x1, y1) = p0, p1
            for ta, tb in zip(breaks[:-1], breaks[1:]):
                tm = 0.5 * (ta + tb) + 0.5 * (tb - ta) * nodes
                xs = x0 + tm * (x1 - x0)
                ys = y0 + tm * (y1 - y0)
                u = self.evaluate(xs, ys)
                # flux . n ds = f dy - g dx
                fdy = 0.5 * u * u * (y1 - y0)
                gdx = u * (x1 - x0)
                total += 0.5 * (tb - ta) * float(np.sum(weights * (fdy - gdx)))
        return total


def characteristics_scalar(problem):
    if problem.name == "interior-shock":
        return CharacteristicSolution(
            name="interior-shock", x_star=0.75, focal=(0.75, 0.5),
            seams=((0.0, 0.0, 1.5, 0.0, 0.5), (1.0, 0.0, -0.5, 0.0, 0.5)),
            shock=(0.75, 0.5, 0.5, 0.5, 1.0))
    if problem.name == "rarefaction":
        return CharacteristicSolution(
            name="rarefaction", x_star=0.0,
            seams=((0.0, 0.0, -1.0, 0.0, 1.0), (0.0, 0.0, 0.5, 0.0, 1.0)))
    raise UsageError(f"no characteristics solution for {problem.name!r}")


# ---------------------------------------------------------------------------
# Oblique-shock relations
# ---------------------------------------------------------------------------

def _tbm_deflection(mach, beta, g):
    m2 = mach * mach
    num = m2 * math.sin(beta) ** 2 - 1.0
    den = m2 * (g + math.cos(2.0 * beta)) + 2.0
    return math.atan(2.0 / math.tan(beta) * num / den)


def _tbm_beta_max(mach, g):
    m2 = mach * mach
    s2 = (1.0 / (g * m2)) * (0.25 * (g + 1.0) * m2 - 1.0 + math.sqrt(
        (g + 1.0) * ((g + 1.0) / 16.0 * m2 * m2
                     + 0.5 * (g - 1.0) * m2 + 1.0)))
    return math.asin(min(1.0, math.sqrt(s2)))


def theta_beta_mach(mach, delta, gamma=1.4, upstream=None, turn="left"):
    """Weak-branch oblique-shock solution from the closed-form relation.

    ``delta`` is the flow deflection in radians.  Returns (beta, post) where
    beta is the shock angle from the *upstream flow direction* and post is
    the primitive tuple (rho, u, v, p).  The default upstream is the unit
    sound-speed normalisation (rho=1, p=1/gamma, horizontal flow at the
    given Mach).  Raises NoJumpError in the detached regime.
    """
    g = gamma
    if upstream is None:
        upstream = (1.0, mach, 0.0, 1.0 / g)
    rho1, u1, v1, p1 = upstream
    if delta == 0.0:
        return math.asin(1.0 / mach), tuple(upstream)
    if delta < 0.0:
        raise UsageError("delta must be non-negative; use turn= for sense")
    beta_max = _tbm_beta_max(mach, g)
    delta_max = _tbm_deflection(mach, beta_max, g)
    if delta > delta_max:
        raise NoJumpError(
            f"deflection {math.degrees(delta):.3f} deg exceeds the attached "
            f"limit {math.degrees(delta_max):.3f} deg at Mach {mach:.3f}")
    mu = math.asin(1.0 / mach)
    beta = brentq(lambda b: _tbm_deflection(mach, b, g) - delta,
                  mu * (1.0 + 1e-13), beta_max,
                  xtol=1e-300 + 1e-30, rtol=4 * _EPS)
    m1n = mach * math.sin(beta)
    m1n2 = m1n * m1n
    rho_ratio = (g + 1.0) * m1n2 / ((g - 1.0) * m1n2 + 2.0)
    p_ratio = 1.0 + 2.0 * g * (m1n2 - 1.0) / (g + 1.0)
    m2n = math.sqrt(((g - 1.0) * m1n2 + 2.0) / (2.0 * g * m1n2 - (g - 1.0)))
    m2 = m2n / math.sin(beta - delta)
    rho2 = rho1 * rho_ratio
    p2 = p1 * p_ratio
    c2 = math.sqrt(g * p2 / rho2)
    q2 = m2 * c2
    theta1 = math.atan2(v1, u1)
    sense = 1.0 if turn == "left" else -1.0
    theta2 = theta1 + sense * delta
    return beta, (rho2, q2 * math.cos(theta2), q2 * math.sin(theta2), p2)


def post_shock_mach(mach, delta, gamma=1.4):
    beta, post = theta_beta_mach(mach, delta, gamma)
    rho, u, v, p = post
    return math.hypot(u, v) / math.sqrt(gamma * p / rho)


# ---------------------------------------------------------------------------
# Oracle cache
# ---------------------------------------------------------------------------

def cache_dir():
    root = os.environ.get("SWEEPCL_CACHE_DIR")
    if root:
        path = Path(root)
    else:
        path = Path.home() / ".cache" / "sweepcl"
    path.mkdir(parents=True, exist_ok=True)
    return path


def problem_hash(problem, **extra):
    import io
    import tempfile

    with tempfile.NamedTemporaryFile("w+", suffix=".cfg",
                                     delete=False) as tmp:
        name = tmp.name
    try:
        from .systems import save_config
        save_config(problem, name)
        with open(name) as fh:
            text = fh.read()
    finally:
        os.unlink(name)
    payload = text + json.dumps(extra, sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def _cache_paths(tag):
    base = cache_dir() / tag
    return base.with_suffix(".npz"), base.with_suffix(".json")


def cache_load(tag):
    npz_path, json_path = _cache_paths(tag)
    if not (npz_path.exists() and json_path.exists()):
        return None
    with open(json_path) as fh:
        header = json.load(fh)
    data = dict(np.load(npz_path))
    data["_header"] = header
    return data


def cache_store(tag, arrays, header):
    npz_path, json_path = _cache_paths(tag)
    np.savez_compressed(npz_path, **arrays)
    with open(json_path, "w") as fh:
        json.dump(header, fh, indent=1, sort_keys=True)


# ---------------------------------------------------------------------------
# Time-marched reference fields
# ---------------------------------------------------------------------------

def reference_time_march(problem, N, scheme="lax_friedrichs", cfl=0.45,
                         tol=1e-10, max_steps=None, cache=True,
                         init_field=None):
    """First-order pseudo-time marching to steady state.

    Used only as a smeared reference; stops when the max pointwise update
    falls below ``tol`` (or after 200 N^2 steps).  Results are cached on
    disk keyed by the problem hash and the marching parameters.
    """
    if scheme != "lax_friedrichs":
        raise UsageError("only the lax_friedrichs reference is provided")
    if max_steps is None:
        max_steps = 200 * N * N
    tag = "march_" + problem_hash(problem, N=N, scheme=scheme, cfl=cfl,
                                  tol=tol)
    if cache and init_field is None:
        hit = cache_load(tag)
        if hit is not None:
            return hit

    if problem.system.m == 1:
        data = _march_scalar(problem, N, cfl, tol, max_steps, init_field)
    else:
        data = _march_euler(problem, N, cfl, tol, max_steps, init_field)
    header = {"problem": problem.name, "N": N, "scheme": scheme, "cfl": cfl,
              "tol": tol, "iterations": int(data["iterations"]),
              "final_update": float(data["final_update"]),
              "hash": tag}
    data["_header"] = header
    if cache:
        arrays = {k: v for k, v in data.items() if isinstance(v, np.ndarray)}
        arrays["iterations"] = np.array(data["iterations"])
        arrays["final_update"] = np.array(data["final_update"])
        cache_store(tag, arrays, header)
    return data


def _march_scalar(problem, N, cfl, tol, max_steps, init_field):
    from .errors import StagnationError

    (x0, x1), (y0, y1) = problem.domain
    xs = np.linspace(x0, x1, N)
    ys = np.linspace(y0, y1, N)
    dx, dy = xs[1] - xs[0], ys[1] - ys[0]

    def boundary_value(side, coords):
        bc = problem.boundaries[side]
        if bc.kind == "dirichlet":
            return bc.data["u"](coords)
        return None

    bottom = boundary_value("bottom", xs)
    left = boundary_value("left", ys)
    right = boundary_value("right", ys)

    if init_field is not None:
        u = init_field.copy()
    else:
        u = np.zeros((N, N))
        if bottom is not None:
            u[:] = bottom[None, :]
    if bottom is not None:
        u[0, :] = bottom
    if left is not None:
        u[:, 0] = left
    if right is not None:
        u[:, -1] = right

    it = 0
    upd = np.inf
    while it < max_steps:
        speed = max(1e-12, np.max(np.abs(u)))
        dt = cfl * min(dx / speed, dy)
        f = 0.5 * u * u
        un = u.copy()
        un[1:-1, 1:-1] = (
            0.25 * (u[1:-1, 2:] + u[1:-1, :-2] + u[2:, 1:-1] + u[:-2, 1:-1])
            - dt / (2 * dx) * (f[1:-1, 2:] - f[1:-1, :-2])
            - dt / (2 * dy) * (u[2:, 1:-1] - u[:-2, 1:-1]))
        un[-1, :] = un[-2, :]
        if left is None:
            un[:, 0] = un[:, 1]
        if right is None:
            un[:, -1] = un[:, -2]
        if bottom is not None:
            un[0, :] = bottom
        if left is not None:
            un[:, 0] = left
        if right is not None:
            un[:, -1] = right
        upd = float(np.max(np.abs(un - u)))
        u = un
        it += 1
        if upd < tol:
            break
    else:
        raise StagnationError(
            f"scalar march stalled after {it} steps", residual=upd)
    return {"x": xs, "y": ys, "u": u, "iterations": it, "final_update": upd}


def _march_euler(problem, N, cfl, tol, max_steps, init_field):
    from . import _marchers
    return _marchers.march_euler_lf(problem, N, cfl, tol, max_steps,
                                    init_field)
