"""Second-order jets of geodesics along the central fiber.

A potential that is even in x and y has a 2-jet a(t) x^2 + b(t) y^2 along the
fiber, and the geodesic equation reduces to

    a'' = 4 a'^2 / (1 + 2a + 2b),      b'' = 4 b'^2 / (1 + 2a + 2b).

The substitution Z = 1 + 2a + 2b, X = 2a - 2b turns this into the geodesic
flow of the Lorentz metric (dX^2 - dZ^2)/Z^2 on the upper half-plane, where
space-like geodesics are hyperbola arcs Z^2 - (X - lam)^2 = C with C > 0,
time-like ones with X0 = X1 are vertical lines, and the causal class of a
boundary pair is read off the chords |X1 - X0| vs |Z1 - Z0|.

The quantity sigma2 = a' b' / (1 + 2a + 2b)^2 is a constant of motion; for
space-like data sigma2 = -epsilon^2 with 4*epsilon the Lorentz arc length,
and a' / (1 + 2a + 2b) = epsilon * A with A = tan(2*epsilon*t + theta0) > 0
once the axes are oriented so that a is the increasing jet.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, GeodesicDomainError, NumericError
from .timegrid import CoefficientSeries, TimeGrid, integrate

TIE_TOL = 1e-12
ENDPOINT_TOL = 1e-9
SHOOT_TOL = 1e-12


class CausalClass(enum.Enum):
    SPACE_LIKE = "SpaceLike"
    TIME_LIKE = "TimeLike"
    LIGHT_LIKE = "LightLike"
    STATIONARY = "Stationary"


@dataclass(frozen=True)
class SecondJetBoundary:
    """Boundary 2-jets (a0, b0) at t=0 and (a1, b1) at t=1."""

    a0: float
    b0: float
    a1: float
    b1: float

    def __post_init__(self):
        for name, a, b in (("a0 + b0", self.a0, self.b0), ("a1 + b1", self.a1, self.b1)):
            if not (a + b + 0.5 > 0):
                raise ValueError(f"boundary requires {name} + 1/2 > 0")


@dataclass(frozen=True)
class HalfPlanePoint:
    """Point (X, Z) of the Lorentz half-plane, Z > 0."""

    X: float
    Z: float

    def __post_init__(self):
        if not (self.Z > 0):
            raise ValueError(f"half-plane point needs Z > 0, got Z = {self.Z}")


@dataclass(frozen=True)
class Hyperbola:
    """Level set Z^2 - (X - lam)^2 = c_value carrying the path."""

    lam: float
    c_value: float


@dataclass(frozen=True)
class SecondJetPath:
    """Solved second-jet boundary value problem on a shared grid."""

    boundary: SecondJetBoundary
    causal_class: CausalClass
    a: CoefficientSeries
    b: CoefficientSeries
    sigma1: CoefficientSeries
    sigma2: float
    swapped_axes: bool
    epsilon: float | None = None
    A: CoefficientSeries | None = None
    hyperbola: Hyperbola | None = None

    @property
    def grid(self) -> TimeGrid:
        return self.a.grid


def to_halfplane(boundary: SecondJetBoundary) -> tuple[HalfPlanePoint, HalfPlanePoint]:
    """Map boundary jets to half-plane endpoints via Z = 1+2a+2b, X = 2a-2b."""
    p0 = HalfPlanePoint(2 * boundary.a0 - 2 * boundary.b0, 1 + 2 * boundary.a0 + 2 * boundary.b0)
    p1 = HalfPlanePoint(2 * boundary.a1 - 2 * boundary.b1, 1 + 2 * boundary.a1 + 2 * boundary.b1)
    return p0, p1


def connectable(p0: HalfPlanePoint, p1: HalfPlanePoint) -> bool:
    """Endpoints are joined by a geodesic iff Z1 + Z0 > |X1 - X0|."""
    return p1.Z + p0.Z > abs(p1.X - p0.X)


def _require_connectable(p0: HalfPlanePoint, p1: HalfPlanePoint) -> None:
    if connectable(p0, p1):
        return
    # Name the failing inequality in boundary terms: Z1+Z0 > X1-X0 is
    # a0 + b1 + 1/2 > 0 and Z1+Z0 > X0-X1 is a1 + b0 + 1/2 > 0.
    if p1.Z + p0.Z <= p1.X - p0.X:
        raise GeodesicDomainError("not connectable: a0 + b1 + 1/2 > 0 violated")
    raise GeodesicDomainError("not connectable: a1 + b0 + 1/2 > 0 violated")


def classify(p0: HalfPlanePoint, p1: HalfPlanePoint) -> CausalClass:
    """Causal class of a connectable pair, with ties resolved at 1e-12."""
    _require_connectable(p0, p1)
    dx = abs(p1.X - p0.X)
    dz = abs(p1.Z - p0.Z)
    if dx <= TIE_TOL and dz <= TIE_TOL:
        return CausalClass.STATIONARY
    if abs(dz - dx) <= TIE_TOL:
        return CausalClass.LIGHT_LIKE
    if dz < dx:
        return CausalClass.SPACE_LIKE
    return CausalClass.TIME_LIKE


def distance(p0: HalfPlanePoint, p1: HalfPlanePoint) -> float:
    """Lorentz distance D < pi between space-like separated points."""
    cls = classify(p0, p1)
    if cls is not CausalClass.SPACE_LIKE:
        raise GeodesicDomainError(f"distance needs space-like separation, got {cls.value}")
    rhs = (p0.Z**2 + p1.Z**2 - (p0.X - p1.X) ** 2) / (2 * p0.Z * p1.Z)
    if rhs > 1.0 or rhs < -1.0:
        if rhs > 1.0 + TIE_TOL or rhs < -1.0 - TIE_TOL:
            raise ConsistencyError(f"cos(D) = {rhs} outside [-1, 1]")
        rhs = max(-1.0, min(1.0, rhs))
    return math.acos(rhs)


def epsilon_from_boundary(boundary: SecondJetBoundary) -> float:
    """epsilon = D/4 < pi/4 for space-like boundary jets."""
    p0, p1 = to_halfplane(boundary)
    return distance(p0, p1) / 4.0


def solve_bvp(boundary: SecondJetBoundary, grid: TimeGrid) -> SecondJetPath:
    """Solve the second-jet boundary value problem on the grid.

    Space-like data gets the closed-form hyperbola arc; a vertical time-like
    chord gets the exponential line; remaining time-like and light-like data
    fall back to Newton shooting on the jet equations.
    """
    p0, p1 = to_halfplane(boundary)
    cls = classify(p0, p1)
    t = grid.nodes

    if cls is CausalClass.STATIONARY:
        a = np.full_like(t, boundary.a0)
        b = np.full_like(t, boundary.b0)
        return _assemble(boundary, cls, grid, a, b, sigma2=0.0, swapped=False)

    if cls is CausalClass.SPACE_LIKE:
        return _solve_spacelike(boundary, p0, p1, grid)

    if cls is CausalClass.TIME_LIKE and abs(p1.X - p0.X) <= TIE_TOL:
        # Vertical line X == X(0): Z is a geometric interpolation.
        Z = p0.Z * np.exp(t * math.log(p1.Z / p0.Z))
        X = np.full_like(t, p0.X)
        a = (Z + X - 1.0) / 4.0
        b = (Z - X - 1.0) / 4.0
        sigma2 = (math.log(p1.Z / p0.Z) / 4.0) ** 2
        return _assemble(boundary, cls, grid, a, b, sigma2=sigma2, swapped=False)

    a, b = _shoot(boundary, grid)
    da = grid.diff_matrix @ a
    db = grid.diff_matrix @ b
    z = 1.0 + 2.0 * a + 2.0 * b
    sigma2_nodes = da * db / z**2
    return _assemble(
        boundary, cls, grid, a, b,
        sigma2=float(np.mean(sigma2_nodes)), swapped=False,
        hyperbola=_chord_hyperbola(p0, p1),
    )


def _solve_spacelike(boundary, p0, p1, grid) -> SecondJetPath:
    swapped = p1.X < p0.X
    x0, x1 = (-p0.X, -p1.X) if swapped else (p0.X, p1.X)

    D = distance(p0, p1)
    eps = D / 4.0
    # Normalize with the isometry (X, Z) -> ((X - X0)/Z0, Z/Z0); then
    # Z(t) = Ct/sin(psi), X(t) = Xc - Ct*cot(psi) with psi = D t + 2 theta0.
    two_theta0 = math.atan2(math.sin(D), p0.Z / p1.Z - math.cos(D))
    if not (0.0 < two_theta0 and two_theta0 + D < math.pi):
        raise ConsistencyError("hyperbola angle left (0, pi); endpoints inconsistent")
    ct = math.sin(two_theta0)
    xc = math.cos(two_theta0)
    psi = D * grid.nodes + two_theta0
    zn = ct / np.sin(psi)
    xn = xc - ct * np.cos(psi) / np.sin(psi)
    Z = p0.Z * zn
    X = x0 + p0.Z * xn
    lam = x0 + p0.Z * xc
    if abs(X[-1] - x1) > ENDPOINT_TOL or abs(Z[-1] - p1.Z) > ENDPOINT_TOL:
        raise ConsistencyError("closed-form endpoint drifted past 1e-9")
    if swapped:
        X = -X
        lam = -lam
    a = (Z + X - 1.0) / 4.0
    b = (Z - X - 1.0) / 4.0
    A = np.tan(2.0 * eps * grid.nodes + two_theta0 / 2.0)
    return _assemble(
        boundary, CausalClass.SPACE_LIKE, grid, a, b,
        sigma2=-(eps**2), swapped=swapped, epsilon=eps,
        A=A, sigma1=eps * (A - 1.0 / A),
        hyperbola=Hyperbola(lam=lam, c_value=(p0.Z * ct) ** 2),
    )


def _assemble(boundary, cls, grid, a, b, *, sigma2, swapped,
              epsilon=None, A=None, sigma1=None, hyperbola=None) -> SecondJetPath:
    z = 1.0 + 2.0 * a + 2.0 * b
    if np.any(z <= 0):
        raise GeodesicDomainError("path leaves the half-plane: 1 + 2a + 2b <= 0 at a node")
    if sigma1 is None:
        sigma1 = (grid.diff_matrix @ a + grid.diff_matrix @ b) / z
    return SecondJetPath(
        boundary=boundary,
        causal_class=cls,
        a=CoefficientSeries(grid, a),
        b=CoefficientSeries(grid, b),
        sigma1=CoefficientSeries(grid, sigma1),
        sigma2=sigma2,
        swapped_axes=swapped,
        epsilon=epsilon,
        A=None if A is None else CoefficientSeries(grid, A),
        hyperbola=hyperbola,
    )


def _chord_hyperbola(p0: HalfPlanePoint, p1: HalfPlanePoint) -> Hyperbola | None:
    if abs(p1.X - p0.X) <= TIE_TOL:
        return None
    lam = (p0.Z**2 - p1.Z**2 - p0.X**2 + p1.X**2) / (2.0 * (p1.X - p0.X))
    return Hyperbola(lam=lam, c_value=p0.Z**2 - (p0.X - lam) ** 2)


def _jet_rhs(state: np.ndarray) -> np.ndarray:
    a, b, da, db = state
    z = 1.0 + 2.0 * a + 2.0 * b
    return np.array([da, db, 4.0 * da * da / z, 4.0 * db * db / z])


def _integrate_to_nodes(slopes: np.ndarray, boundary, nodes: np.ndarray, substeps: int):
    """RK4 integration of the jet system, recording values at the nodes."""
    state = np.array([boundary.a0, boundary.b0, slopes[0], slopes[1]])
    a = np.empty_like(nodes)
    b = np.empty_like(nodes)
    a[0], b[0] = boundary.a0, boundary.b0
    for i in range(1, nodes.size):
        gap = nodes[i] - nodes[i - 1]
        steps = max(2, int(math.ceil(gap * substeps)))
        h = gap / steps
        for _ in range(steps):
            k1 = _jet_rhs(state)
            k2 = _jet_rhs(state + 0.5 * h * k1)
            k3 = _jet_rhs(state + 0.5 * h * k2)
            k4 = _jet_rhs(state + h * k3)
            state = state + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        a[i], b[i] = state[0], state[1]
    return a, b


def _shoot(boundary: SecondJetBoundary, grid: TimeGrid, substeps: int = 512):
    """Newton iteration on the initial slopes to hit (a1, b1)."""
    target = np.array([boundary.a1, boundary.b1])
    slopes = np.array([boundary.a1 - boundary.a0, boundary.b1 - boundary.b0])
    endpoint = grid.nodes[[0, -1]]

    def miss(s):
        a, b = _integrate_to_nodes(s, boundary, endpoint, substeps)
        return np.array([a[-1], b[-1]]) - target

    f = miss(slopes)
    for _ in range(40):
        if np.max(np.abs(f)) < SHOOT_TOL:
            break
        jac = np.empty((2, 2))
        for k in range(2):
            h = 1e-7 * (1.0 + abs(slopes[k]))
            bumped = slopes.copy()
            bumped[k] += h
            jac[:, k] = (miss(bumped) - f) / h
        step = np.linalg.solve(jac, -f)
        damp = 1.0
        while damp > 1e-4:
            trial = slopes + damp * step
            ft = miss(trial)
            if np.max(np.abs(ft)) < np.max(np.abs(f)):
                slopes, f = trial, ft
                break
            damp *= 0.5
        else:
            raise NumericError("shooting step stalled")
    else:
        raise NumericError("shooting did not converge in 40 iterations")
    return _integrate_to_nodes(slopes, boundary, grid.nodes, substeps)


def ode_residual(path: SecondJetPath) -> float:
    """Max nodewise residual of the jet equations for the stored path."""
    grid = path.grid
    d = grid.diff_matrix
    a, b = path.a.values, path.b.values
    z = 1.0 + 2.0 * a + 2.0 * b
    da, db = d @ a, d @ b
    ra = d @ da - 4.0 * da * da / z
    rb = d @ db - 4.0 * db * db / z
    return float(max(np.max(np.abs(ra)), np.max(np.abs(rb))))


def arc_epsilon(path: SecondJetPath) -> float:
    """Quadrature of (1/4) sqrt((X'^2 - Z'^2)/Z^2) along a space-like path."""
    if path.causal_class is not CausalClass.SPACE_LIKE:
        raise GeodesicDomainError("arc length quadrature needs a space-like path")
    grid = path.grid
    dX = grid.diff_matrix @ (2.0 * path.a.values - 2.0 * path.b.values)
    dZ = grid.diff_matrix @ (2.0 * path.a.values + 2.0 * path.b.values)
    z = 1.0 + 2.0 * path.a.values + 2.0 * path.b.values
    return 0.25 * integrate(CoefficientSeries(grid, np.sqrt(dX**2 - dZ**2) / z))
