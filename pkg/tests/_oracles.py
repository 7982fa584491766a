"""Independent reference implementations used to pin expected test values.

Nothing here imports from torusjets: the jet ODE is integrated with a plain
RK4 shooting method, polynomial operators are rebuilt by symbolic
differentiation on exact-rational bivariate polynomials, and linear systems
are solved by fraction-preserving elimination.  Agreement between these
routines and the package is what the tests assert.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np


# ---------------------------------------------------------------------------
# RK4 shooting for the second-jet system a'' = 4 a'^2 / z, b'' = 4 b'^2 / z,
# z = 1 + 2a + 2b, vectorized over a batch of boundary values.
# ---------------------------------------------------------------------------

def _rhs(state):
    a, b, da, db = state
    z = 1.0 + 2.0 * a + 2.0 * b
    return np.stack([da, db, 4.0 * da * da / z, 4.0 * db * db / z])


def _rk4_segment(state, t0, t1, steps):
    h = (t1 - t0) / steps
    for _ in range(steps):
        k1 = _rhs(state)
        k2 = _rhs(state + 0.5 * h * k1)
        k3 = _rhs(state + 0.5 * h * k2)
        k4 = _rhs(state + h * k3)
        state = state + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return state


def _integrate(a0, b0, da0, db0, t_nodes, density=96):
    state = np.stack([a0, b0, da0, db0])
    a_path = np.empty((len(t_nodes),) + np.shape(a0))
    b_path = np.empty_like(a_path)
    a_path[0], b_path[0] = state[0], state[1]
    for i in range(1, len(t_nodes)):
        gap = t_nodes[i] - t_nodes[i - 1]
        steps = max(2, int(math.ceil(gap * density)))
        state = _rk4_segment(state, t_nodes[i - 1], t_nodes[i], steps)
        a_path[i], b_path[i] = state[0], state[1]
    return a_path, b_path


def shoot_jet_paths(a0, b0, a1, b1, t_nodes, density=96, iters=60):
    """Batched RK4 shooting solution of the jet boundary problem.

    Returns (a, b) sampled at t_nodes with shape (len(t_nodes), batch).
    Damped Newton iterates on the initial slopes with a finite-difference
    2x2 Jacobian, all boundaries advanced in lockstep; trial slopes whose
    integration blows up count as infinitely bad and get backtracked.
    """
    a0 = np.atleast_1d(np.asarray(a0, dtype=float))
    b0 = np.atleast_1d(np.asarray(b0, dtype=float))
    a1 = np.atleast_1d(np.asarray(a1, dtype=float))
    b1 = np.atleast_1d(np.asarray(b1, dtype=float))

    def miss(sa_, sb_):
        with np.errstate(over="ignore", invalid="ignore"):
            ap, bp = _integrate(a0, b0, sa_, sb_, t_nodes, density)
        finite = np.isfinite(ap[-1]) & np.isfinite(bp[-1])
        ra = np.where(finite, ap[-1] - a1, np.inf)
        rb = np.where(finite, bp[-1] - b1, np.inf)
        return ra, rb

    def merit(ra, rb):
        with np.errstate(invalid="ignore"):
            return np.where(
                np.isfinite(ra) & np.isfinite(rb),
                np.maximum(np.abs(ra), np.abs(rb)),
                np.inf,
            )

    # start from the chord, shrunk per column until the integration is finite
    sa = a1 - a0
    sb = b1 - b0
    ra, rb = miss(sa, sb)
    m0 = merit(ra, rb)
    for _ in range(60):
        bad = ~np.isfinite(m0)
        if not bad.any():
            break
        sa = np.where(bad, 0.5 * sa, sa)
        sb = np.where(bad, 0.5 * sb, sb)
        ra, rb = miss(sa, sb)
        m0 = merit(ra, rb)

    for _ in range(iters):
        if np.max(m0) < 1e-13:
            break
        h = 1e-7 * (1.0 + np.abs(sa) + np.abs(sb))
        ra_a, rb_a = miss(sa + h, sb)
        ra_b, rb_b = miss(sa, sb + h)
        with np.errstate(invalid="ignore", over="ignore"):
            j11 = (ra_a - ra) / h
            j21 = (rb_a - rb) / h
            j12 = (ra_b - ra) / h
            j22 = (rb_b - rb) / h
            det = j11 * j22 - j12 * j21
            da = (j22 * ra - j12 * rb) / det
            db = (-j21 * ra + j11 * rb) / det
        da = np.where(np.isfinite(da), da, 0.0)
        db = np.where(np.isfinite(db), db, 0.0)
        alpha = np.ones_like(sa)
        accepted = np.zeros_like(sa, dtype=bool)
        best_sa, best_sb, best_m = sa.copy(), sb.copy(), m0.copy()
        for _ in range(25):
            trial_sa = np.where(accepted, best_sa, sa - alpha * da)
            trial_sb = np.where(accepted, best_sb, sb - alpha * db)
            tra, trb = miss(trial_sa, trial_sb)
            tm = merit(tra, trb)
            better = ~accepted & (tm < best_m)
            best_sa = np.where(better, trial_sa, best_sa)
            best_sb = np.where(better, trial_sb, best_sb)
            best_m = np.where(better, tm, best_m)
            accepted |= better
            if accepted.all():
                break
            alpha = np.where(accepted, alpha, 0.5 * alpha)
        sa, sb = best_sa, best_sb
        ra, rb = miss(sa, sb)
        m0 = merit(ra, rb)
    return _integrate(a0, b0, sa, sb, t_nodes, density)


# ---------------------------------------------------------------------------
# Exact bivariate polynomials as {(i, j): Fraction or float} dictionaries.
# ---------------------------------------------------------------------------

def poly_add(p, q):
    out = dict(p)
    for key, c in q.items():
        out[key] = out.get(key, 0) + c
    return {k: c for k, c in out.items() if c != 0}


def poly_scale(p, s):
    return {k: c * s for k, c in p.items() if c * s != 0}


def poly_mul(p, q):
    out = {}
    for (i1, j1), c1 in p.items():
        for (i2, j2), c2 in q.items():
            key = (i1 + i2, j1 + j2)
            out[key] = out.get(key, 0) + c1 * c2
    return {k: c for k, c in out.items() if c != 0}


def poly_diff(p, var):
    out = {}
    for (i, j), c in p.items():
        if var == "x" and i > 0:
            out[(i - 1, j)] = out.get((i - 1, j), 0) + c * i
        if var == "y" and j > 0:
            out[(i, j - 1)] = out.get((i, j - 1), 0) + c * j
    return out


def poly_pow(p, m):
    out = {(0, 0): 1}
    for _ in range(m):
        out = poly_mul(out, p)
    return out


def even_even_from_poly(p, degree):
    """Coefficient vector (index = y half-exponent) of the degree-`degree` part."""
    n = degree // 2
    vec = [p.get((degree - 2 * i, 2 * i), 0) for i in range(n + 1)]
    mixed = [
        key for key in p
        if key[0] + key[1] == degree and (key[0] % 2 or key[1] % 2) and p[key] != 0
    ]
    if mixed:
        raise AssertionError(f"odd-exponent contamination at degree {degree}: {mixed}")
    return vec


def poly_from_even_even(vec, degree):
    n = degree // 2
    return {(degree - 2 * i, 2 * i): c for i, c in enumerate(vec) if c != 0}


def basis_even_even(degree):
    n = degree // 2
    return [{(degree - 2 * i, 2 * i): Fraction(1)} for i in range(n + 1)]


def basis_full(degree):
    return [{(degree - k, k): Fraction(1)} for k in range(degree + 1)]


def matrix_of_operator(op, basis, degree, parity="even_even"):
    """Columns are op(basis vector) expanded over the same-degree monomials."""
    cols = []
    for mono in basis:
        image = op(mono)
        if parity == "even_even":
            cols.append(even_even_from_poly(image, degree))
        else:
            cols.append([image.get((degree - k, k), 0) for k in range(degree + 1)])
    return [list(row) for row in zip(*cols)]


def boost_op(p):
    """x d_y + y d_x as a symbolic operator."""
    x = {(1, 0): Fraction(1)}
    y = {(0, 1): Fraction(1)}
    return poly_add(poly_mul(x, poly_diff(p, "y")), poly_mul(y, poly_diff(p, "x")))


def ea_op(p, A: Fraction):
    """(A^2 x^2 + y^2 / A^2) (d_xx + d_yy) as a symbolic operator."""
    lap = poly_add(poly_diff(poly_diff(p, "x"), "x"), poly_diff(poly_diff(p, "y"), "y"))
    wx = poly_scale({(2, 0): Fraction(1)}, A * A)
    wy = poly_scale({(0, 2): Fraction(1)}, 1 / (A * A))
    return poly_mul(poly_add(wx, wy), lap)


def sa_op(p, A: Fraction):
    """A x d_x - (y / A) d_y as a symbolic operator."""
    tx = poly_mul({(1, 0): A}, poly_diff(p, "x"))
    ty = poly_mul({(0, 1): -1 / A}, poly_diff(p, "y"))
    return poly_add(tx, ty)


def q_poly(n: int, k: int):
    """(x+y)^(n+k) (x-y)^(n-k) + (x+y)^(n-k) (x-y)^(n+k), exact."""
    plus = {(1, 0): Fraction(1), (0, 1): Fraction(1)}
    minus = {(1, 0): Fraction(1), (0, 1): Fraction(-1)}
    first = poly_mul(poly_pow(plus, n + k), poly_pow(minus, n - k))
    second = poly_mul(poly_pow(plus, n - k), poly_pow(minus, n + k))
    return poly_add(first, second)


def u_eigenvalue_exact(n: int, i: int, A: Fraction) -> Fraction:
    """Eigenvalue of U on x^(2n-2i) y^(2i) for rational A (exact)."""
    return (A * A + 1) ** (n - i) * (1 + 1 / (A * A)) ** i


def solve_fraction_system(matrix, rhs):
    """Gaussian elimination over Fractions with partial pivoting by magnitude."""
    n = len(rhs)
    m = [[Fraction(matrix[r][c]) for c in range(n)] + [Fraction(rhs[r])] for r in range(n)]
    for col in range(n):
        pivot = max(range(col, n), key=lambda r: abs(m[r][col]))
        if m[pivot][col] == 0:
            raise ZeroDivisionError("singular system")
        m[col], m[pivot] = m[pivot], m[col]
        for r in range(n):
            if r != col and m[r][col] != 0:
                factor = m[r][col] / m[col][col]
                m[r] = [a - factor * b for a, b in zip(m[r], m[col])]
    return [m[r][n] / m[r][r] for r in range(n)]


def dtilde_weights_exact(n: int):
    """Exact nu_j: sum_j nu_j d_x^(2j) d_y^(2n-2j) maps q_k to delta_kn.

    Built by genuinely differentiating the q polynomials and evaluating at 0.
    """
    rows = []
    for k in range(n + 1):
        qk = q_poly(n, k)
        row = []
        for j in range(n + 1):
            p = qk
            for _ in range(2 * j):
                p = poly_diff(p, "x")
            for _ in range(2 * n - 2 * j):
                p = poly_diff(p, "y")
            row.append(p.get((0, 0), Fraction(0)))
        rows.append(row)
    rhs = [Fraction(0)] * n + [Fraction(1)]
    return solve_fraction_system(rows, rhs)


def k1_from_node_data(order_data, degree):
    """Degree-`degree` part of -(Lap L) L'' + |grad L'|^2 at one time node.

    order_data maps even order -> (coeffs, dcoeffs, ddcoeffs) even-even
    vectors of the jet and its first two time derivatives at the node.
    """
    L = {}
    Ld = {}
    Ldd = {}
    for order, (c, dc, ddc) in order_data.items():
        L = poly_add(L, poly_from_even_even(c, order))
        Ld = poly_add(Ld, poly_from_even_even(dc, order))
        Ldd = poly_add(Ldd, poly_from_even_even(ddc, order))
    lap = poly_add(poly_diff(poly_diff(L, "x"), "x"), poly_diff(poly_diff(L, "y"), "y"))
    grad_sq = poly_add(
        poly_mul(poly_diff(Ld, "x"), poly_diff(Ld, "x")),
        poly_mul(poly_diff(Ld, "y"), poly_diff(Ld, "y")),
    )
    total = poly_add(poly_scale(poly_mul(lap, Ldd), -1), grad_sq)
    part = {k: c for k, c in total.items() if k[0] + k[1] == degree}
    return [part.get((degree - 2 * i, 2 * i), 0.0) for i in range(degree // 2 + 1)]
