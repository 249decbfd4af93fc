"""Conservation-law system definitions and the built-in problem registry.

A SystemDef bundles the flux(es), source, Jacobian and its spectral
decomposition for one hyperbolic system.  Three concrete systems are
provided:

* scalar advection/Burgers in two dimensions (m = 1),
* quasi-one-dimensional duct flow of a perfect gas with variable
  cross-section (m = 3, conserved variables carry the area factor),
* the two-dimensional steady Euler equations (m = 4).

Problem instances (domain + boundary data + parameters) for the built-in
benchmark problems live in ``registry()`` and can be round-tripped through a
plain-text config format (see ``save_config`` / ``load_config``).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PhysicalityError, UsageError

GAMMA_DEFAULT = 1.4
R_GAS_DEFAULT = 8.3144


# ---------------------------------------------------------------------------
# Serializable coefficient families (areas and boundary profiles)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AreaSpec:
    """Duct cross-section A(x) from a named coefficient family."""

    kind: str            # 'tanh' or 'parabola'
    coeffs: tuple

    def __call__(self, x):
        c = self.coeffs
        if self.kind == "tanh":
            return c[0] + c[1] * np.tanh(c[2] * x - c[3])
        if self.kind == "parabola":
            return c[0] + c[1] * (x - c[2]) ** 2
        raise UsageError(f"unknown area kind {self.kind!r}")

    def deriv(self, x):
        c = self.coeffs
        if self.kind == "tanh":
            t = np.tanh(c[2] * x - c[3])
            return c[0] * 0.0 + c[1] * c[2] * (1.0 - t * t)
        if self.kind == "parabola":
            return 2.0 * c[1] * (x - c[2])
        raise UsageError(f"unknown area kind {self.kind!r}")


@dataclass(frozen=True)
class ProfileSpec:
    """Scalar boundary profile value(s) as a function of the arclength s."""

    kind: str
    coeffs: tuple

    def __call__(self, s):
        c = self.coeffs
        if self.kind == "constant":
            return np.full_like(np.asarray(s, dtype=float), c[0]) \
                if np.ndim(s) else c[0]
        if self.kind == "linear":
            return c[0] + c[1] * np.asarray(s, dtype=float) \
                if np.ndim(s) else c[0] + c[1] * s
        if self.kind == "step":
            s = np.asarray(s, dtype=float)
            out = np.where(s < c[0], c[1], c[2])
            return out if out.ndim else float(out)
        if self.kind == "quad_bump":
            return c[0] * np.asarray(s) * (c[1] - np.asarray(s))
        if self.kind == "sin_offset":
            return c[0] + c[1] * np.sin(c[2] * np.asarray(s))
        raise UsageError(f"unknown profile kind {self.kind!r}")


# ---------------------------------------------------------------------------
# System definitions
# ---------------------------------------------------------------------------

@dataclass
class SystemDef:
    """One conservation-law system.

    ``eigen_x(U)`` returns (lam, P, Pinv) with eigenvalues sorted ascending
    and P's columns the matching right eigenvectors, so that
    P @ diag(lam) @ Pinv reconstructs jacobian_x(U).
    """

    name: str
    kind: str              # 'burgers2d' | 'nozzle_euler' | 'euler2d' | 'custom'
    m: int
    flux_x: callable
    source: callable                    # (U, x) -> array
    jacobian_x: callable
    eigen_x: callable
    flux_y: callable = None
    source_jacobian: callable = None    # (U, x) -> m x m, optional analytic
    to_primitive: callable = None
    from_primitive: callable = None
    is_physical: callable = None
    params: dict = field(default_factory=dict)

    def require_physical(self, U):
        if self.is_physical is not None and not self.is_physical(U):
            raise PhysicalityError(
                f"non-physical state for system {self.name!r}: {U!r}")
        return U

    def source_jac(self, U, x, eps=1e-7):
        """Analytic source Jacobian if available, else central differences."""
        if self.source_jacobian is not None:
            return self.source_jacobian(U, x)
        U = np.asarray(U, dtype=float)
        J = np.empty((self.m, self.m))
        for j in range(self.m):
            h = eps * max(1.0, abs(U[j]))
            Up, Um = U.copy(), U.copy()
            Up[j] += h
            Um[j] -= h
            J[:, j] = (self.source(Up, x) - self.source(Um, x)) / (2.0 * h)
        return J


def make_burgers2d():
    """Scalar 2D system with quadratic x-flux and linear y-flux."""

    def flux_x(U):
        return 0.5 * np.asarray(U, dtype=float) ** 2

    def flux_y(U):
        return np.asarray(U, dtype=float).copy()

    def source(U, x):
        return np.zeros(1)

    def jacobian_x(U):
        return np.array([[float(U[0])]])

    def eigen_x(U):
        lam = np.array([float(U[0])])
        one = np.array([[1.0]])
        return lam, one, one

    return SystemDef(
        name="burgers2d", kind="burgers2d", m=1,
        flux_x=flux_x, flux_y=flux_y, source=source,
        jacobian_x=jacobian_x, eigen_x=eigen_x,
        source_jacobian=lambda U, x: np.zeros((1, 1)),
        to_primitive=lambda U: (float(U[0]),),
        from_primitive=lambda prim: np.array([float(prim[0])]),
        is_physical=lambda U: bool(np.isfinite(U).all()),
    )


def _euler1d_pressure(U, gamma):
    r, mom, e = U[0], U[1], U[2]
    return (gamma - 1.0) * (e - 0.5 * mom * mom / r)


def make_nozzle_euler(area, area_deriv=None, gamma=GAMMA_DEFAULT,
                      r_gas=R_GAS_DEFAULT):
    """Quasi-1D duct flow of a perfect gas.

    Conserved variables carry the cross-section: U = (rho*A, rho*u*A, E*A).
    With that choice the flux has the standard 1D gas-dynamics form and only
    the source term sees the geometry, through p * A'(x).

    ``area`` may be an AreaSpec (then area_deriv is taken from it) or a plain
    callable together with its derivative.
    """
    if isinstance(area, AreaSpec):
        area_fn, area_dfn, area_spec = area, area.deriv, area
    else:
        if area_deriv is None:
            raise UsageError("area_deriv required for a callable area")
        area_fn, area_dfn, area_spec = area, area_deriv, None

    g = float(gamma)

    def flux_x(U):
        r, mom, e = U[0], U[1], U[2]
        u = mom / r
        p = (g - 1.0) * (e - 0.5 * mom * u)
        return np.array([mom, mom * u + p, u * (e + p)])

    def source(U, x):
        p = _euler1d_pressure(U, g)
        return np.array([0.0, p * area_dfn(x) / area_fn(x), 0.0])

    def source_jacobian(U, x):
        r, mom, e = U[0], U[1], U[2]
        u = mom / r
        fac = (g - 1.0) * area_dfn(x) / area_fn(x)
        J = np.zeros((3, 3))
        J[1, 0] = fac * 0.5 * u * u
        J[1, 1] = -fac * u
        J[1, 2] = fac
        return J

    def jacobian_x(U):
        r, mom, e = U[0], U[1], U[2]
        u = mom / r
        p = (g - 1.0) * (e - 0.5 * mom * u)
        H = (e + p) / r
        return np.array([
            [0.0, 1.0, 0.0],
            [0.5 * (g - 3.0) * u * u, (3.0 - g) * u, g - 1.0],
            [0.5 * (g - 1.0) * u ** 3 - u * H, H - (g - 1.0) * u * u, g * u],
        ])

    def eigen_x(U):
        r, mom, e = U[0], U[1], U[2]
        u = mom / r
        p = (g - 1.0) * (e - 0.5 * mom * u)
        c2 = g * p / r
        c = math.sqrt(c2)
        H = (e + p) / r
        lam = np.array([u - c, u, u + c])
        P = np.array([
            [1.0, 1.0, 1.0],
            [u - c, u, u + c],
            [H - u * c, 0.5 * u * u, H + u * c],
        ])
        gm = g - 1.0
        Pinv = np.array([
            [(0.5 * gm * u * u + u * c) / (2 * c2),
             (-gm * u - c) / (2 * c2), gm / (2 * c2)],
            [(c2 - 0.5 * gm * u * u) / c2, gm * u / c2, -gm / c2],
            [(0.5 * gm * u * u - u * c) / (2 * c2),
             (-gm * u + c) / (2 * c2), gm / (2 * c2)],
        ])
        return lam, P, Pinv

    def to_primitive(U):
        r = U[0]
        u = U[1] / r
        p = _euler1d_pressure(U, g)
        return (float(r), float(u), float(p))

    def from_primitive(prim):
        r, u, p = prim
        if r <= 0.0 or p <= 0.0:
            raise PhysicalityError(
                f"non-physical primitive state (rho-like={r}, p-like={p})")
        return np.array([r, r * u, p / (g - 1.0) + 0.5 * r * u * u])

    def is_physical(U):
        return bool(U[0] > 0.0 and _euler1d_pressure(U, g) > 0.0
                    and np.isfinite(U).all())

    return SystemDef(
        name="nozzle_euler", kind="nozzle_euler", m=3,
        flux_x=flux_x, source=source, source_jacobian=source_jacobian,
        jacobian_x=jacobian_x, eigen_x=eigen_x,
        to_primitive=to_primitive, from_primitive=from_primitive,
        is_physical=is_physical,
        params={"gamma": g, "r_gas": float(r_gas), "area": area_fn,
                "area_deriv": area_dfn, "area_spec": area_spec},
    )


def make_euler2d(gamma=GAMMA_DEFAULT):
    """Two-dimensional steady Euler equations, U = (rho, rho u, rho v, E)."""
    if gamma <= 1.0:
        raise UsageError("gamma must exceed 1")
    g = float(gamma)

    def pressure(U):
        r, mx, my, e = U[0], U[1], U[2], U[3]
        return (g - 1.0) * (e - 0.5 * (mx * mx + my * my) / r)

    def flux_x(U):
        r, mx, my, e = U[0], U[1], U[2], U[3]
        u = mx / r
        p = pressure(U)
        return np.array([mx, mx * u + p, my * u, u * (e + p)])

    def flux_y(U):
        r, mx, my, e = U[0], U[1], U[2], U[3]
        v = my / r
        p = pressure(U)
        return np.array([my, mx * v, my * v + p, v * (e + p)])

    def source(U, x):
        return np.zeros(4)

    def jacobian_x(U):
        r, mx, my, e = U[0], U[1], U[2], U[3]
        u, v = mx / r, my / r
        p = pressure(U)
        H = (e + p) / r
        gm = g - 1.0
        phi2 = 0.5 * gm * (u * u + v * v)
        return np.array([
            [0.0, 1.0, 0.0, 0.0],
            [phi2 - u * u, (3.0 - g) * u, -gm * v, gm],
            [-u * v, v, u, 0.0],
            [u * (phi2 - H), H - gm * u * u, -gm * u * v, g * u],
        ])

    def eigen_x(U):
        r, mx, my, e = U[0], U[1], U[2], U[3]
        u, v = mx / r, my / r
        p = pressure(U)
        c = math.sqrt(g * p / r)
        H = (e + p) / r
        q2 = u * u + v * v
        lam = np.array([u - c, u, u, u + c])
        P = np.array([
            [1.0, 1.0, 0.0, 1.0],
            [u - c, u, 0.0, u + c],
            [v, v, 1.0, v],
            [H - u * c, 0.5 * q2, v, H + u * c],
        ])
        return lam, P, np.linalg.inv(P)

    def to_primitive(U):
        r = U[0]
        u, v = U[1] / r, U[2] / r
        return (float(r), float(u), float(v), float(pressure(U)))

    def from_primitive(prim):
        r, u, v, p = prim
        if r <= 0.0 or p <= 0.0:
            raise PhysicalityError(
                f"non-physical primitive state (rho={r}, p={p})")
        e = p / (g - 1.0) + 0.5 * r * (u * u + v * v)
        return np.array([r, r * u, r * v, e])

    def is_physical(U):
        return bool(U[0] > 0.0 and pressure(U) > 0.0
                    and np.isfinite(U).all())

    sys_def = SystemDef(
        name="euler2d", kind="euler2d", m=4,
        flux_x=flux_x, flux_y=flux_y, source=source,
        source_jacobian=lambda U, x: np.zeros((4, 4)),
        jacobian_x=jacobian_x, eigen_x=eigen_x,
        to_primitive=to_primitive, from_primitive=from_primitive,
        is_physical=is_physical,
        params={"gamma": g},
    )
    sys_def.params["pressure"] = pressure
    return sys_def


def sound_speed(system, U):
    """Sound speed of a gas-dynamics state (euler-type systems only)."""
    g = system.params["gamma"]
    prim = system.to_primitive(U)
    r, p = prim[0], prim[-1]
    return math.sqrt(g * p / r)


def mach_number(system, U):
    prim = system.to_primitive(U)
    if system.kind == "euler2d":
        speed = math.hypot(prim[1], prim[2])
    else:
        speed = abs(prim[1])
    return speed / sound_speed(system, U)


# ---------------------------------------------------------------------------
# Problem instances
# ---------------------------------------------------------------------------

@dataclass
class BoundaryCondition:
    """One declared condition on one side of the domain.

    kind is one of 'state' (full Dirichlet state), 'partial' (a single pinned
    component at the boundary), 'family' (one-parameter state family),
    'dirichlet' (2D profile data), 'reflection', 'wedge', 'none'.
    """

    kind: str
    data: dict = field(default_factory=dict)


@dataclass
class ProblemInstance:
    name: str
    system: SystemDef
    domain: tuple                    # ((x0, x1),) or ((x0, x1), (y0, y1))
    boundaries: dict
    params: dict = field(default_factory=dict)

    @property
    def ndim(self):
        return len(self.domain)

    # -- 1D helpers -------------------------------------------------------

    def conserved_from_physical(self, rho, u, p, x):
        """Nozzle systems: physical (rho, u, p) at station x -> conserved."""
        A = self.system.params["area"](x)
        return self.system.from_primitive((rho * A, u, p * A))

    def left_state(self):
        bc = self.boundaries["left"]
        if bc.kind != "state":
            raise UsageError(f"{self.name}: left boundary is not a full state")
        d = bc.data
        return self.conserved_from_physical(d["rho"], d["u"], d["p"],
                                            self.domain[0][0])

    def family_state(self, alpha):
        """Left-state family for incomplete boundary data.

        The family parameter is the inlet Mach number; the static pressure and
        the stagnation temperature are pinned, which fixes density and
        velocity through the isentropic relations.
        """
        bc = self.boundaries["left"]
        if bc.kind != "family":
            raise UsageError(f"{self.name}: left boundary is not a family")
        g = self.system.params["gamma"]
        r_gas = self.system.params["r_gas"]
        p = bc.data["p"]
        t_total = bc.data["t_total"]
        t_static = t_total / (1.0 + 0.5 * (g - 1.0) * alpha * alpha)
        rho = p / (r_gas * t_static)
        u = alpha * math.sqrt(g * r_gas * t_static)
        return self.conserved_from_physical(rho, u, p, self.domain[0][0])

    def right_residual(self, U):
        """B_R(U): pinned-component mismatch at the right boundary."""
        bc = self.boundaries["right"]
        if bc.kind != "partial":
            raise UsageError(f"{self.name}: right boundary is not partial")
        x_r = self.domain[0][1]
        A = self.system.params["area"](x_r)
        comp, val = bc.data["component"], bc.data["value"]
        if comp == "rho":
            return U[0] / A - val
        if comp == "p":
            return _euler1d_pressure(U, self.system.params["gamma"]) / A - val
        raise UsageError(f"unsupported pinned component {comp!r}")

    # -- 2D helpers -------------------------------------------------------

    def side_profiles(self, side):
        bc = self.boundaries[side]
        if bc.kind != "dirichlet":
            raise UsageError(f"{self.name}: {side} boundary has no data")
        return bc.data

    def scalar_side_value(self, side, s):
        return self.side_profiles(side)["u"](s)

    def euler_side_state(self, side, s):
        """Conserved 2D Euler state from the side profiles at arclength s."""
        prof = self.side_profiles(side)
        return self.system.from_primitive(
            (prof["rho"](s), prof["u"](s), prof["v"](s), prof["p"](s)))


def _const(v):
    return ProfileSpec("constant", (float(v),))


def registry():
    """The built-in benchmark problems with their boundary data."""
    g = GAMMA_DEFAULT
    problems = []

    # duct flow, supersonic inlet, one interior shock
    area = AreaSpec("tanh", (1.398, 0.347, 0.8, 4.0))
    problems.append(ProblemInstance(
        name="nozzle-shock",
        system=make_nozzle_euler(area),
        domain=((0.0, 10.0),),
        boundaries={
            "left": BoundaryCondition("state",
                                      {"rho": 0.502, "u": 1.299, "p": 0.3809}),
            "right": BoundaryCondition("partial",
                                       {"component": "rho", "value": 0.7519}),
        },
        params={"shock_bracket": (0.5, 9.5)},
    ))

    # duct flow through a sonic throat, then a shock
    area = AreaSpec("parabola", (1.0, 2.2, 1.5))
    problems.append(ProblemInstance(
        name="nozzle-sonic",
        system=make_nozzle_euler(area),
        domain=((0.0, 3.0),),
        boundaries={
            "left": BoundaryCondition("family", {"p": 1.0, "t_total": 300.0}),
            "right": BoundaryCondition("partial",
                                       {"component": "p", "value": 0.6784}),
        },
        params={"alpha_bracket": (0.02, 0.95), "turn_field": 0},
    ))

    # scalar problem whose shock starts inside the domain
    problems.append(ProblemInstance(
        name="interior-shock",
        system=make_burgers2d(),
        domain=((0.0, 1.0), (0.0, 1.0)),
        boundaries={
            "left": BoundaryCondition("dirichlet", {"u": _const(1.5)}),
            "right": BoundaryCondition("dirichlet", {"u": _const(-0.5)}),
            "bottom": BoundaryCondition("dirichlet",
                                        {"u": ProfileSpec("linear",
                                                          (1.5, -2.0))}),
            "top": BoundaryCondition("none"),
        },
    ))

    # scalar problem with an expansion fan
    problems.append(ProblemInstance(
        name="rarefaction",
        system=make_burgers2d(),
        domain=((-1.0, 1.0), (0.0, 1.0)),
        boundaries={
            "bottom": BoundaryCondition("dirichlet",
                                        {"u": ProfileSpec("step",
                                                          (0.0, -1.0, 0.5))}),
            "left": BoundaryCondition("none"),
            "right": BoundaryCondition("none"),
            "top": BoundaryCondition("none"),
        },
    ))

    # Euler shock reflection off a flat wall
    problems.append(ProblemInstance(
        name="reflection",
        system=make_euler2d(g),
        domain=((0.0, 4.0), (0.0, 1.0)),
        boundaries={
            "top": BoundaryCondition("dirichlet", {
                "rho": _const(1.69997), "u": _const(2.61934),
                "v": _const(-0.50632), "p": _const(1.528191)}),
            "left": BoundaryCondition("dirichlet", {
                "rho": _const(1.0), "u": _const(2.9),
                "v": _const(0.0), "p": _const(1.0 / g)}),
            "bottom": BoundaryCondition("reflection"),
            "right": BoundaryCondition("none"),
        },
    ))

    # supersonic flow over a compression wedge
    for name, left in (
        ("oblique", {
            "rho": _const(1.0), "u": _const(3.0),
            "v": _const(0.0), "p": _const(1.0 / g)}),
        ("oblique-nonconstant", {
            "rho": _const(1.0), "u": _const(3.0),
            "v": ProfileSpec("quad_bump", (10.0, 0.5)),
            "p": ProfileSpec("sin_offset", (1.0 / g, -0.3, 4.0 * math.pi))}),
    ):
        problems.append(ProblemInstance(
            name=name,
            system=make_euler2d(g),
            domain=((0.0, 1.0), (0.0, 0.5)),
            boundaries={
                "left": BoundaryCondition("dirichlet", left),
                "bottom": BoundaryCondition("wedge",
                                            {"delta_deg": 15.0,
                                             "corner": 0.5}),
                "top": BoundaryCondition("none"),
                "right": BoundaryCondition("none"),
            },
            params={"delta_deg": 15.0, "wedge_x": 0.5},
        ))

    return problems


def get_problem(name):
    for prob in registry():
        if prob.name == name:
            return prob
    known = ", ".join(p.name for p in registry())
    raise UsageError(f"unknown problem {name!r}; known problems: {known}")


# ---------------------------------------------------------------------------
# Plain-text config round-trip
# ---------------------------------------------------------------------------

_SIDES_1D = ("left", "right")
_SIDES_2D = ("left", "right", "bottom", "top")


def _fmt(v):
    return f"{float(v):.17g}"


def save_config(problem, path):
    """Write a problem instance as key = value lines, one section per side."""
    lines = ["[problem]", f"name = {problem.name}",
             f"kind = {problem.system.kind}"]
    (x0, x1) = problem.domain[0]
    lines.append(f"domain_x = {_fmt(x0)} {_fmt(x1)}")
    if problem.ndim == 2:
        (y0, y1) = problem.domain[1]
        lines.append(f"domain_y = {_fmt(y0)} {_fmt(y1)}")
    if "gamma" in problem.system.params:
        lines.append(f"gamma = {_fmt(problem.system.params['gamma'])}")
    if problem.system.kind == "nozzle_euler":
        lines.append(f"r_gas = {_fmt(problem.system.params['r_gas'])}")
        spec = problem.system.params["area_spec"]
        if spec is None:
            raise UsageError("only named area families are serialisable")
        coeffs = " ".join(_fmt(c) for c in spec.coeffs)
        lines.append(f"area = {spec.kind} {coeffs}")
    for key in ("delta_deg", "wedge_x"):
        if key in problem.params:
            lines.append(f"{key} = {_fmt(problem.params[key])}")

    sides = _SIDES_1D if problem.ndim == 1 else _SIDES_2D
    for side in sides:
        bc = problem.boundaries.get(side, BoundaryCondition("none"))
        lines.append("")
        lines.append(f"[boundary.{side}]")
        lines.append(f"kind = {bc.kind}")
        if bc.kind in ("state", "family"):
            for k, v in bc.data.items():
                lines.append(f"{k} = {_fmt(v)}")
        elif bc.kind == "partial":
            lines.append(f"component = {bc.data['component']}")
            lines.append(f"value = {_fmt(bc.data['value'])}")
        elif bc.kind == "dirichlet":
            for k, prof in bc.data.items():
                coeffs = " ".join(_fmt(c) for c in prof.coeffs)
                lines.append(f"{k} = {prof.kind} {coeffs}")
        elif bc.kind == "wedge":
            lines.append(f"delta_deg = {_fmt(bc.data['delta_deg'])}")
            lines.append(f"corner = {_fmt(bc.data['corner'])}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_config(path):
    """Parse a config written by ``save_config`` back into a ProblemInstance."""
    import configparser

    cp = configparser.ConfigParser()
    with open(path) as fh:
        cp.read_file(fh)
    sec = cp["problem"]
    kind = sec["kind"]
    name = sec.get("name", "custom")
    dom_x = tuple(float(t) for t in sec["domain_x"].split())
    domain = (dom_x,)
    if "domain_y" in sec:
        domain = (dom_x, tuple(float(t) for t in sec["domain_y"].split()))

    gamma = float(sec.get("gamma", GAMMA_DEFAULT))
    if kind == "nozzle_euler":
        toks = sec["area"].split()
        area = AreaSpec(toks[0], tuple(float(t) for t in toks[1:]))
        system = make_nozzle_euler(area, gamma=gamma,
                                   r_gas=float(sec.get("r_gas",
                                                       R_GAS_DEFAULT)))
    elif kind == "burgers2d":
        system = make_burgers2d()
    elif kind == "euler2d":
        system = make_euler2d(gamma)
    else:
        raise UsageError(f"unknown system kind {kind!r}")

    params = {}
    for key in ("delta_deg", "wedge_x"):
        if key in sec:
            params[key] = float(sec[key])

    boundaries = {}
    sides = _SIDES_1D if len(domain) == 1 else _SIDES_2D
    for side in sides:
        sname = f"boundary.{side}"
        if sname not in cp:
            boundaries[side] = BoundaryCondition("none")
            continue
        bsec = cp[sname]
        bkind = bsec["kind"]
        if bkind in ("state", "family"):
            data = {k: float(v) for k, v in bsec.items() if k != "kind"}
            boundaries[side] = BoundaryCondition(bkind, data)
        elif bkind == "partial":
            boundaries[side] = BoundaryCondition(
                "partial", {"component": bsec["component"],
                            "value": float(bsec["value"])})
        elif bkind == "dirichlet":
            data = {}
            for k, v in bsec.items():
                if k == "kind":
                    continue
                toks = v.split()
                data[k] = ProfileSpec(toks[0],
                                      tuple(float(t) for t in toks[1:]))
            boundaries[side] = BoundaryCondition("dirichlet", data)
        elif bkind == "wedge":
            boundaries[side] = BoundaryCondition(
                "wedge", {"delta_deg": float(bsec["delta_deg"]),
                          "corner": float(bsec["corner"])})
        elif bkind == "reflection":
            boundaries[side] = BoundaryCondition("reflection")
        elif bkind == "none":
            boundaries[side] = BoundaryCondition("none")
        else:
            raise UsageError(f"unknown boundary kind {bkind!r}")

    # restore the registry metadata for known problem names
    for prob in registry():
        if prob.name == name:
            params = {**prob.params, **params}
            break

    return ProblemInstance(name=name, system=system, domain=domain,
                           boundaries=boundaries, params=params)
