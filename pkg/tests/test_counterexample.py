import math

import numpy as np
import pytest

from torusjets.counterexample import (
    TorusPotential,
    build_h,
    build_h_tilde,
    cb_norm_report,
    jets_at_origin,
    obstruction_demo,
)
from torusjets.jet_propagation import ObstructionReport, propagate
from torusjets.timegrid import make_grid

GRID = make_grid(64)


# --- potentials ------------------------------------------------------------------

def test_potential_validation():
    with pytest.raises(ValueError, match="even"):
        TorusPotential(terms=((1.0, 3, 0),))
    with pytest.raises(ValueError, match="even"):
        TorusPotential(terms=((1.0, 2, -2),))
    with pytest.raises(ValueError, match="constant"):
        TorusPotential(terms=((1.0, 0, 0),))
    with pytest.raises(ValueError, match="finite"):
        TorusPotential(terms=((math.inf, 2, 0),))


def test_potential_evaluate_broadcasts():
    p = TorusPotential(terms=((2.0, 2, 0), (1.0, 0, 2)))
    x = np.linspace(0, 1, 5)[:, None]
    y = np.linspace(0, 1, 3)[None, :]
    vals = p.evaluate(x, y)
    assert vals.shape == (5, 3)
    assert abs(vals[2, 1] - (2 * math.sin(0.5) ** 2 + math.sin(0.5) ** 2)) < 1e-15
    assert p.evaluate(0.0, 0.0) == 0.0


def test_build_h():
    h = build_h(3)
    c = 0.5 * math.sin(math.pi / 6)
    assert h.terms == ((c, 2, 0), (-c, 0, 2))
    assert abs(c - 0.25) < 1e-16
    assert h.n == 3
    with pytest.raises(ValueError):
        build_h(2)
    # odd under swapping the axes
    x, y = 0.7, -0.3
    assert abs(h.evaluate(x, y) + h.evaluate(y, x)) < 1e-16


def test_build_h_tilde():
    ht = build_h_tilde(3, 1, math.exp(-3))
    assert ht.terms[:2] == build_h(3).terms
    assert ht.terms[2] == (math.exp(-3), 4, 2)
    assert (ht.n, ht.kappa, ht.chi) == (3, 1, math.exp(-3))
    with pytest.raises(ValueError, match="kappa"):
        build_h_tilde(3, 4, 0.1)
    with pytest.raises(ValueError, match="kappa"):
        build_h_tilde(3, -1, 0.1)
    with pytest.raises(ValueError, match="chi"):
        build_h_tilde(3, 1, 0.0)
    with pytest.raises(ValueError, match="chi"):
        build_h_tilde(3, 1, math.nan)


# --- jets ------------------------------------------------------------------------

def test_jets_sin_squared_series():
    # sin^2 x = x^2 - x^4/3 + 2 x^6/45 - ...
    p = TorusPotential(terms=((1.0, 2, 0),))
    jets = jets_at_origin(p, 6)
    assert np.array_equal(jets[2], [1.0, 0.0])
    assert np.array_equal(jets[4], [-1.0 / 3.0, 0.0, 0.0])
    assert np.array_equal(jets[6], [2.0 / 45.0, 0.0, 0.0, 0.0])


def test_jets_validation():
    p = build_h(3)
    with pytest.raises(ValueError):
        jets_at_origin(p, 0)
    with pytest.raises(ValueError):
        jets_at_origin(p, 5)


def test_jets_h3_second_order():
    c = 0.5 * math.sin(math.pi / 6)
    jets = jets_at_origin(build_h(3), 2)
    assert np.array_equal(jets[2], [c, -c])


def test_jets_swap_axes_reverses_vectors():
    p = TorusPotential(terms=((0.3, 2, 4), (-0.1, 6, 0)))
    swapped = TorusPotential(terms=tuple((c, py, px) for c, px, py in p.terms))
    jets = jets_at_origin(p, 8)
    jets_sw = jets_at_origin(swapped, 8)
    for order in jets:
        assert np.array_equal(jets_sw[order], jets[order][::-1])


def test_jets_perturbation_sits_at_top_order():
    n, kappa, chi = 4, 1, math.exp(-4)
    jets_h = jets_at_origin(build_h(n), 2 * n)
    jets_ht = jets_at_origin(build_h_tilde(n, kappa, chi), 2 * n)
    for order in range(2, 2 * n, 2):
        assert np.array_equal(jets_h[order], jets_ht[order])
    diff = jets_ht[2 * n] - jets_h[2 * n]
    expected = np.zeros(n + 1)
    expected[kappa] = chi
    assert np.array_equal(diff, expected)


# --- norms -----------------------------------------------------------------------

def test_cb_norm_of_zero_potential():
    assert cb_norm_report(TorusPotential(terms=()), 3) == 0.0
    with pytest.raises(ValueError):
        cb_norm_report(build_h(3), -1)


def test_cb_norm_sup_of_family():
    # sup |h_n| = c * sup |sin^2 x - sin^2 y| = c, and the grid hits pi/2
    for n in (3, 5, 10):
        c = 0.5 * math.sin(math.pi / (2 * n))
        assert abs(cb_norm_report(build_h(n), 0) - c) < 1e-13


def test_cb_norm_family_decreases_with_n():
    vals = [cb_norm_report(build_h(n), 0) for n in (3, 6, 12)]
    assert vals[0] > vals[1] > vals[2]


def test_cb_norm_grows_with_derivative_order():
    h = build_h(3)
    assert cb_norm_report(h, 4) > cb_norm_report(h, 2) > cb_norm_report(h, 0)


# --- the demo ---------------------------------------------------------------------

def test_obstruction_demo_n3():
    demo = obstruction_demo(3)
    assert demo.n == 3
    assert demo.resonant_order == 6
    assert demo.multiple == 1
    assert abs(demo.epsilon - math.pi / 12) < 1e-10
    assert demo.node_count == 64
    assert demo.kappa == int(np.argmax(np.abs(demo.v)))
    assert demo.kappa == 2
    assert demo.chi == math.exp(-3)
    assert np.max(np.abs(demo.v)) > 1e-12
    # the shift in the pairing is linear in the perturbation
    rel = abs(demo.difference - demo.predicted_difference) / abs(demo.predicted_difference)
    assert rel < 1e-12
    assert demo.difference == demo.lhs_htilde - demo.lhs_h
    assert demo.which_holds in ("h", "h_tilde", "neither")
    assert not (demo.satisfied_h and demo.satisfied_htilde)
    assert demo.residual_h == abs(demo.lhs_h - demo.K)
    assert demo.residual_htilde == abs(demo.lhs_htilde - demo.K)


def test_obstruction_demo_deterministic():
    a = obstruction_demo(3)
    b = obstruction_demo(3)
    assert a.lhs_h == b.lhs_h
    assert a.lhs_htilde == b.lhs_htilde
    assert a.K == b.K
    assert np.array_equal(a.v, b.v)


def test_obstruction_demo_rejects_small_n():
    with pytest.raises(ValueError):
        obstruction_demo(2)


def test_pairing_shift_linear_in_chi():
    n, kappa = 3, 2
    zero = {2: np.zeros(2)}
    base = propagate(zero, jets_at_origin(build_h(n), 2 * n), 2 * n, GRID)
    one = propagate(
        zero, jets_at_origin(build_h_tilde(n, kappa, 1e-3), 2 * n), 2 * n, GRID
    )
    two = propagate(
        zero, jets_at_origin(build_h_tilde(n, kappa, 2e-3), 2 * n), 2 * n, GRID
    )
    assert isinstance(base, ObstructionReport)
    d1 = one.lhs - base.lhs
    d2 = two.lhs - base.lhs
    assert abs(d2 - 2 * d1) < 1e-10 * abs(d1)
