"""Chebyshev collocation grid on the time interval [0, 1].

All time-dependent quantities in the package live on a shared grid of
Chebyshev-Gauss-Lobatto nodes mapped to [0, 1].  The grid carries a spectral
differentiation matrix (barycentric form with the negative-sum trick on the
diagonal) and Clenshaw-Curtis quadrature weights.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MIN_NODES = 8
DEFAULT_NODES = 64


@dataclass(frozen=True)
class TimeGrid:
    """Collocation nodes on [0, 1] with differentiation and quadrature."""

    nodes: np.ndarray
    diff_matrix: np.ndarray
    quad_weights: np.ndarray

    @property
    def node_count(self) -> int:
        return self.nodes.size


@dataclass(frozen=True)
class CoefficientSeries:
    """Values of one scalar coefficient sampled on a TimeGrid."""

    grid: TimeGrid
    values: np.ndarray = field()

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.node_count,):
            raise ValueError(
                f"series has {values.shape} values for {self.grid.node_count} nodes"
            )
        object.__setattr__(self, "values", values)


def make_grid(node_count: int = DEFAULT_NODES) -> TimeGrid:
    """Build the Chebyshev-Gauss-Lobatto grid with node_count points."""
    if node_count < MIN_NODES:
        raise ValueError(f"node_count must be >= {MIN_NODES}, got {node_count}")
    n = node_count - 1
    # t_j = (1 - cos(pi j / n)) / 2, assembled from the sin^2 half-angle form
    # and mirrored so that the nodes are exactly symmetric about 1/2.
    j = np.arange(n + 1)
    nodes = np.sin(np.pi * j / (2 * n)) ** 2
    m = (n + 1) // 2
    nodes[m:] = 1.0 - nodes[n - np.arange(m, n + 1)]
    if n % 2 == 0:
        nodes[n // 2] = 0.5

    # Barycentric weights for Lobatto nodes: alternating signs, halved ends.
    bary = np.where(j % 2 == 0, 1.0, -1.0)
    bary[0] *= 0.5
    bary[n] *= 0.5
    dt = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(dt, 1.0)
    diff = (bary[None, :] / bary[:, None]) / dt
    np.fill_diagonal(diff, 0.0)
    np.fill_diagonal(diff, -diff.sum(axis=1))

    weights = _clenshaw_curtis(n) * 0.5
    return TimeGrid(nodes=nodes, diff_matrix=diff, quad_weights=weights)


def _clenshaw_curtis(n: int) -> np.ndarray:
    """Clenshaw-Curtis weights for n+1 Lobatto nodes on [-1, 1]."""
    theta = np.pi * np.arange(1, n) / n
    v = np.ones(n - 1)
    if n % 2 == 0:
        w_end = 1.0 / (n * n - 1)
        for k in range(1, n // 2):
            v -= 2.0 * np.cos(2 * k * theta) / (4 * k * k - 1)
        v -= np.cos(n * theta) / (n * n - 1)
    else:
        w_end = 1.0 / (n * n)
        for k in range(1, (n - 1) // 2 + 1):
            v -= 2.0 * np.cos(2 * k * theta) / (4 * k * k - 1)
    w = np.empty(n + 1)
    w[0] = w[n] = w_end
    w[1:n] = 2.0 * v / n
    return w


def same_grid(a: TimeGrid, b: TimeGrid) -> bool:
    return a is b or np.array_equal(a.nodes, b.nodes)


def require_same_grid(series: CoefficientSeries, grid: TimeGrid) -> None:
    if not same_grid(series.grid, grid):
        raise ValueError("series grids differ; resample explicitly instead of mixing")


def sample(grid: TimeGrid, fn) -> CoefficientSeries:
    """Sample a scalar callable on the grid nodes."""
    return CoefficientSeries(grid, np.asarray([fn(t) for t in grid.nodes], dtype=float))


def derivative(series: CoefficientSeries) -> CoefficientSeries:
    """Spectral time derivative on the shared grid."""
    return CoefficientSeries(series.grid, series.grid.diff_matrix @ series.values)


def integrate(series: CoefficientSeries) -> float:
    """Clenshaw-Curtis integral of the series over [0, 1]."""
    return float(series.grid.quad_weights @ series.values)
