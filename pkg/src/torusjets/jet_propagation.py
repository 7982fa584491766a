"""Order-by-order propagation of jets along a space-like second-jet path.

With the second jets a, b solved, the degree-2n part P of the potential
satisfies the divided vector equation

    P'' + 4 eps^2 E_A P - 4 eps S_A P' = K1(L) / (1 + 2a + 2b)

where L collects all lower-order jets and K1(L) is the degree-2n part of
-(Lap L) L'' + |grad L'|^2.  Substituting P = U Q and expanding Q in the
eigenbasis q_k decouples the system into scalar Dirichlet problems

    f_k'' + 16 eps^2 k^2 f_k = k_k(t),    k = 0..n.

A mode with 4*eps*k equal to a positive multiple m*pi of pi is resonant: the
Dirichlet problem is solvable only under the compatibility condition

    f(0) - (-1)^m f(1) = (1/(m pi)) * int_0^1 k_k(t) sin(m pi t) dt,

which translates into a linear pairing of the order-2n boundary derivatives
with the weights of the D operator.  Propagation stops there and reports the
obstruction data instead of a hierarchy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConsistencyError, GeodesicDomainError
from .poly_ops import d_weights, q_matrix, u_eigenvalues
from .second_jet import CausalClass, SecondJetBoundary, SecondJetPath, solve_bvp
from .timegrid import CoefficientSeries, TimeGrid, integrate, require_same_grid

RESONANCE_TOL = 1e-9
NEAR_RESONANCE_TOL = 1e-6
COMPAT_TOL = 1e-8


@dataclass(frozen=True)
class ModeProblem:
    """Scalar Dirichlet problem f'' + lam f = source, f(0)=f0, f(1)=f1."""

    lam: float
    source: CoefficientSeries
    f0: float
    f1: float

    def __post_init__(self):
        if not (self.lam >= 0 and math.isfinite(self.lam)):
            raise ValueError(f"lam must be finite and >= 0, got {self.lam}")


@dataclass(frozen=True)
class ModeSolution:
    values: CoefficientSeries
    resonant: bool
    multiple: int | None = None
    boundary_term: float | None = None
    source_term: float | None = None
    compat_residual: float | None = None
    compatible: bool | None = None
    near_resonance: bool = False


@dataclass(frozen=True)
class JetHierarchy:
    """Jets of even degree 4..max solved on top of a space-like 2-jet path."""

    path2: SecondJetPath
    orders: dict[int, list[CoefficientSeries]]
    beyond_scope_orders: tuple[int, ...] = ()
    near_resonance_warnings: tuple[tuple[int, int], ...] = ()

    @property
    def grid(self) -> TimeGrid:
        return self.path2.grid

    def order_matrix(self, order: int) -> np.ndarray:
        return np.vstack([s.values for s in self.orders[order]])


@dataclass(frozen=True)
class ObstructionReport:
    """Compatibility data of the resonant order.

    u pairs with the raw derivatives of the t=0 potential and v with the
    t=1 potential; entry i multiplies D_x^(2n-2i) D_y^(2i) phi(0).
    """

    resonant_order: int
    u: np.ndarray
    v: np.ndarray
    K: float
    lhs: float
    residual: float
    satisfied: bool
    epsilon: float
    resonant_mode: int
    multiple: int
    near_resonance_warnings: tuple[tuple[int, int], ...] = ()


def solve_mode(problem: ModeProblem, grid: TimeGrid) -> ModeSolution:
    """Solve one scalar mode by spectral collocation.

    Non-resonant modes solve the square collocation system with boundary
    rows.  A resonant mode (sqrt(lam) within 1e-9 of m*pi) solves the
    bordered system that augments the operator with the kernel direction and
    pins the solution to be quadrature-orthogonal to sin(m pi t); the
    compatibility residual is reported alongside.
    """
    require_same_grid(problem.source, grid)
    t = grid.nodes
    size = grid.node_count
    mu = math.sqrt(problem.lam)
    m = round(mu / math.pi)
    gap = abs(mu - m * math.pi) if m >= 1 else math.inf
    resonant = gap < RESONANCE_TOL
    near = (not resonant) and gap < NEAR_RESONANCE_TOL

    d2 = grid.diff_matrix @ grid.diff_matrix
    k = problem.source.values

    if not resonant:
        mat = d2 + problem.lam * np.eye(size)
        rhs = k.copy()
        mat[0, :] = 0.0
        mat[0, 0] = 1.0
        rhs[0] = problem.f0
        mat[-1, :] = 0.0
        mat[-1, -1] = 1.0
        rhs[-1] = problem.f1
        f = np.linalg.solve(mat, rhs)
        return ModeSolution(CoefficientSeries(grid, f), resonant=False, near_resonance=near)

    kernel = np.sin(m * math.pi * t)
    mat = np.zeros((size + 1, size + 1))
    rhs = np.zeros(size + 1)
    mat[:size, :size] = d2 + problem.lam * np.eye(size)
    mat[:size, size] = kernel
    rhs[:size] = k
    mat[0, :] = 0.0
    mat[0, 0] = 1.0
    rhs[0] = problem.f0
    mat[size - 1, :] = 0.0
    mat[size - 1, size - 1] = 1.0
    rhs[size - 1] = problem.f1
    mat[size, :size] = grid.quad_weights * kernel
    rhs[size] = 0.0
    sol = np.linalg.solve(mat, rhs)
    f = sol[:size]

    boundary_term = problem.f0 - (-1.0) ** m * problem.f1
    source_term = integrate(CoefficientSeries(grid, k * kernel)) / (m * math.pi)
    residual = abs(boundary_term - source_term)
    return ModeSolution(
        CoefficientSeries(grid, f),
        resonant=True,
        multiple=m,
        boundary_term=boundary_term,
        source_term=source_term,
        compat_residual=residual,
        compatible=residual < COMPAT_TOL,
    )


@dataclass(frozen=True)
class _Frame:
    """Propagation state in the orientation that keeps A > 0."""

    grid: TimeGrid
    path2: SecondJetPath
    swapped: bool
    eps: float
    A: np.ndarray
    Z: np.ndarray
    orders: dict[int, np.ndarray] = field(default_factory=dict)


def _make_frame(path2: SecondJetPath) -> _Frame:
    if path2.causal_class is not CausalClass.SPACE_LIKE:
        raise GeodesicDomainError(
            f"propagation needs a space-like second-jet path, got {path2.causal_class.value}"
        )
    a = path2.a.values
    b = path2.b.values
    return _Frame(
        grid=path2.grid,
        path2=path2,
        swapped=path2.swapped_axes,
        eps=path2.epsilon,
        A=path2.A.values,
        Z=1.0 + 2.0 * a + 2.0 * b,
    )


def _frame_vec(vec: np.ndarray, swapped: bool) -> np.ndarray:
    return vec[::-1].copy() if swapped else np.asarray(vec, dtype=float)


def _normalize_jets(jets: dict, what: str) -> dict[int, np.ndarray]:
    out = {}
    for order, coeffs in jets.items():
        order = int(order)
        if order < 2 or order % 2:
            raise ValueError(f"{what} jets must come in even orders >= 2, got {order}")
        vec = np.asarray(coeffs, dtype=float)
        if vec.shape != (order // 2 + 1,):
            raise ValueError(
                f"{what} order-{order} jet needs {order // 2 + 1} coefficients, got {vec.shape}"
            )
        out[order] = vec
    if 2 not in out:
        raise ValueError(f"{what} jets must include order 2")
    return out


def _laplacian_rows(c: np.ndarray, d: int) -> np.ndarray:
    """Laplacian of a degree-2d even-even coefficient matrix (rows by y half)."""
    out = np.empty((d, c.shape[1]))
    for q in range(d):
        jx = 2 * (d - q)
        ky = 2 * (q + 1)
        out[q] = c[q] * jx * (jx - 1) + c[q + 1] * ky * (ky - 1)
    return out


def _conv_rows(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Row convolution of coefficient matrices sharing the node axis."""
    p, nodes = u.shape
    q = v.shape[0]
    out = np.zeros((p + q - 1, nodes))
    for r in range(p):
        out[r:r + q] += u[r] * v
    return out


def _k1_divided(frame: _Frame, order: int) -> np.ndarray:
    """Degree-`order` part of (-(Lap L) L'' + |grad L'|^2) / (1 + 2a + 2b).

    Only pairs of stored orders 4..order-2 contribute; the 2-jet factors are
    already accounted for on the left side of the divided equation.
    """
    n = order // 2
    nodes = frame.grid.node_count
    dt = frame.grid.diff_matrix.T
    out = np.zeros((n + 1, nodes))
    for i in range(2, n - 1 + 1):
        j = n + 1 - i
        if j < 2 or 2 * j not in frame.orders or 2 * i not in frame.orders:
            continue
        ci = frame.orders[2 * i]
        cj = frame.orders[2 * j]
        cj_ddot = cj @ dt @ dt
        ci_dot = ci @ dt
        cj_dot = cj @ dt
        out -= _conv_rows(_laplacian_rows(ci, i), cj_ddot)
        px_i = ci_dot * (2.0 * np.arange(i, -1, -1))[:, None]
        px_j = cj_dot * (2.0 * np.arange(j, -1, -1))[:, None]
        out += _conv_rows(px_i, px_j)[: n + 1]
        py_i = ci_dot[1:] * (2.0 * np.arange(1, i + 1))[:, None]
        py_j = cj_dot[1:] * (2.0 * np.arange(1, j + 1))[:, None]
        out[1:] += _conv_rows(py_i, py_j)
    return out / frame.Z[None, :]


def source_K1(lower: JetHierarchy, order: int) -> list[CoefficientSeries]:
    """Divided source of the degree-`order` jet equation from lower orders."""
    if order < 4 or order % 2:
        raise ValueError(f"source order must be even and >= 4, got {order}")
    frame = _make_frame(lower.path2)
    for stored, series_list in lower.orders.items():
        if stored >= order:
            continue
        mat = np.vstack([s.values for s in series_list])
        frame.orders[stored] = mat[::-1] if frame.swapped else mat
    vals = _k1_divided(frame, order)
    if frame.swapped:
        vals = vals[::-1]
    grid = lower.grid
    return [CoefficientSeries(grid, row) for row in vals]


def _node_u_eigenvalues(n: int, A: np.ndarray) -> np.ndarray:
    """U diagonal per node: rows by basis index, columns by node."""
    i = np.arange(n + 1)[:, None]
    return (A[None, :] ** 2 + 1.0) ** (n - i) * (1.0 + A[None, :] ** -2.0) ** i


def _apply_EA(p: np.ndarray, A: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros_like(p)
    for r in range(n + 1):
        jx = 2 * (n - r)
        ky = 2 * r
        out[r] += (A * A * jx * (jx - 1) + ky * (ky - 1) / (A * A)) * p[r]
        if r + 1 <= n:
            ky1 = 2 * (r + 1)
            out[r] += A * A * ky1 * (ky1 - 1) * p[r + 1]
        if r - 1 >= 0:
            jx1 = 2 * (n - r + 1)
            out[r] += jx1 * (jx1 - 1) / (A * A) * p[r - 1]
    return out


def _apply_SA(p: np.ndarray, A: np.ndarray, n: int) -> np.ndarray:
    out = np.empty_like(p)
    for r in range(n + 1):
        out[r] = (A * (2 * (n - r)) - (2 * r) / A) * p[r]
    return out


def order_residual(hier: JetHierarchy, order: int) -> float:
    """Max nodewise residual of the divided degree-`order` vector equation."""
    if order not in hier.orders:
        raise ValueError(f"order {order} is not stored in the hierarchy")
    frame = _make_frame(hier.path2)
    for stored, series_list in hier.orders.items():
        mat = np.vstack([s.values for s in series_list])
        frame.orders[stored] = mat[::-1] if frame.swapped else mat
    n = order // 2
    dt = hier.grid.diff_matrix.T
    p = frame.orders[order]
    p_dot = p @ dt
    p_ddot = p_dot @ dt
    lhs = p_ddot + 4.0 * frame.eps**2 * _apply_EA(p, frame.A, n) \
        - 4.0 * frame.eps * _apply_SA(p_dot, frame.A, n)
    rhs = _k1_divided(frame, order)
    return float(np.max(np.abs(lhs - rhs)))


def propagate(phi0_jets: dict, phi1_jets: dict, max_order: int, grid: TimeGrid):
    """Propagate jets up to max_order; stop with a report at a resonance.

    phi0_jets and phi1_jets map even orders to even-even monomial coefficient
    vectors (index i holds the x^(2m-2i) y^(2i) coefficient of the degree-2m
    part).  Returns a JetHierarchy, or an ObstructionReport when a mode of
    some order is resonant.
    """
    if max_order < 4 or max_order % 2:
        raise ValueError(f"max_order must be even and >= 4, got {max_order}")
    jets0 = _normalize_jets(phi0_jets, "phi0")
    jets1 = _normalize_jets(phi1_jets, "phi1")
    boundary = SecondJetBoundary(
        a0=jets0[2][0], b0=jets0[2][1], a1=jets1[2][0], b1=jets1[2][1]
    )
    path2 = solve_bvp(boundary, grid)
    frame = _make_frame(path2)

    beyond: list[int] = []
    warnings: list[tuple[int, int]] = []
    for order in range(4, max_order + 1, 2):
        n = order // 2
        p0 = _frame_vec(jets0.get(order, np.zeros(n + 1)), frame.swapped)
        p1 = _frame_vec(jets1.get(order, np.zeros(n + 1)), frame.swapped)
        src = _k1_divided(frame, order)
        qm = q_matrix(n)
        u_nodes = _node_u_eigenvalues(n, frame.A)
        k_modes = np.linalg.solve(qm, src / u_nodes)
        f0 = np.linalg.solve(qm, p0 / u_nodes[:, 0])
        f1 = np.linalg.solve(qm, p1 / u_nodes[:, -1])

        f_rows = np.empty_like(k_modes)
        for mode in range(n + 1):
            problem = ModeProblem(
                lam=16.0 * frame.eps**2 * mode**2,
                source=CoefficientSeries(grid, k_modes[mode]),
                f0=f0[mode],
                f1=f1[mode],
            )
            sol = solve_mode(problem, grid)
            if sol.resonant:
                if mode != n:
                    raise ConsistencyError(
                        f"mode {mode} of order {order} resonated after its own order"
                    )
                return _resonant_report(
                    frame, order, k_modes[mode], p0, p1, sol.multiple, tuple(warnings)
                )
            if sol.near_resonance:
                warnings.append((order, mode))
            f_rows[mode] = sol.values.values
        frame.orders[order] = u_nodes * (qm @ f_rows)
        if 4.0 * frame.eps * n > math.pi + RESONANCE_TOL:
            beyond.append(order)

    out_orders = {}
    for order, mat in frame.orders.items():
        vals = mat[::-1] if frame.swapped else mat
        out_orders[order] = [CoefficientSeries(grid, row) for row in vals]
    return JetHierarchy(
        path2=path2,
        orders=out_orders,
        beyond_scope_orders=tuple(beyond),
        near_resonance_warnings=tuple(warnings),
    )


def _resonant_report(frame, order, k_top, p0, p1, multiple, warnings) -> ObstructionReport:
    n = order // 2
    w0 = d_weights(n, frame.A[0])
    w1 = d_weights(n, frame.A[-1])
    fact = np.array(
        [math.factorial(2 * n - 2 * i) * math.factorial(2 * i) for i in range(n + 1)],
        dtype=float,
    )
    sign = -((-1.0) ** multiple)
    lhs = math.fsum(w0 * fact * p0) + sign * math.fsum(w1 * fact * p1)
    kernel = np.sin(multiple * math.pi * frame.grid.nodes)
    K = integrate(CoefficientSeries(frame.grid, k_top * kernel)) / (multiple * math.pi)
    residual = abs(lhs - K)
    u = w0[::-1] if frame.swapped else w0
    v = w1[::-1] if frame.swapped else w1
    return ObstructionReport(
        resonant_order=order,
        u=u,
        v=v,
        K=K,
        lhs=lhs,
        residual=residual,
        satisfied=residual < COMPAT_TOL,
        epsilon=frame.eps,
        resonant_mode=n,
        multiple=multiple,
        near_resonance_warnings=warnings,
    )


def compatibility_check(
    phi0_order_jets, phi1_order_jets, lower: JetHierarchy, order: int | None = None
) -> ObstructionReport:
    """Obstruction data for the resonant order sitting above `lower`.

    The hierarchy must contain every order below; the top mode of the target
    order must be resonant, otherwise the call is an invalid state.
    """
    if order is None:
        order = max(lower.orders.keys(), default=2) + 2
    n = order // 2
    frame = _make_frame(lower.path2)
    mu = 4.0 * frame.eps * n
    multiple = round(mu / math.pi)
    if multiple < 1 or abs(mu - multiple * math.pi) >= RESONANCE_TOL:
        raise ValueError(
            f"order {order} is not resonant: 4*eps*{n} = {mu} is not a multiple of pi"
        )
    for stored, series_list in lower.orders.items():
        if stored >= order:
            continue
        mat = np.vstack([s.values for s in series_list])
        frame.orders[stored] = mat[::-1] if frame.swapped else mat
    p0 = _frame_vec(np.asarray(phi0_order_jets, dtype=float), frame.swapped)
    p1 = _frame_vec(np.asarray(phi1_order_jets, dtype=float), frame.swapped)
    if p0.shape != (n + 1,) or p1.shape != (n + 1,):
        raise ValueError(f"order-{order} jets need {n + 1} coefficients")
    src = _k1_divided(frame, order)
    qm = q_matrix(n)
    u_nodes = _node_u_eigenvalues(n, frame.A)
    k_top = np.linalg.solve(qm, src / u_nodes)[n]
    return _resonant_report(frame, order, k_top, p0, p1, multiple, ())
