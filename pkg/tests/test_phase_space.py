import numpy as np
import pytest
from hypothesis import given, strategies as st

from wignersteer.phase_space import (
    ModeLayout,
    PhaseGrid,
    WignerField,
    integrate,
    marginal,
    min_value,
    pair,
    sample_field,
    symplectic_form,
)
from wignersteer.gaussian import gaussian_density, make_product, make_tmsv
from wignersteer.fock import fock_wigner

from conftest import TWO_PI, fock1, vacuum

GRID = PhaseGrid(8.0, 128, 2)


def test_symplectic_form_single_mode():
    assert np.array_equal(symplectic_form(1), [[0, 1], [-1, 0]])


def test_symplectic_form_two_modes_is_direct_sum():
    om = symplectic_form(2)
    assert np.array_equal(om[:2, :2], symplectic_form(1))
    assert np.array_equal(om[2:, 2:], symplectic_form(1))
    assert not om[:2, 2:].any() and not om[2:, :2].any()


@pytest.mark.parametrize("m", [0, -1, 1.5])
def test_symplectic_form_rejects_bad_mode_count(m):
    with pytest.raises(ValueError):
        symplectic_form(m)


@given(st.integers(1, 8))
def test_symplectic_form_orthogonal_and_squares_to_minus_one(m):
    om = symplectic_form(m)
    eye = np.eye(2 * m)
    assert np.array_equal(om.T @ om, eye)
    assert np.array_equal(om @ om, -eye)
    assert np.array_equal(om.T, -om)


def test_layout_dimensions_and_split():
    lay = ModeLayout(1, 2)
    assert (lay.n_modes, lay.alice_dim, lay.bob_dim, lay.dim) == (3, 2, 4, 6)
    xa, xb = lay.split(np.arange(6.0))
    assert xa.tolist() == [0, 1] and xb.tolist() == [2, 3, 4, 5]
    with pytest.raises(ValueError):
        ModeLayout(0, 1)


@pytest.mark.parametrize("kwargs", [dict(half_width=0, n=32), dict(half_width=1, n=15),
                                    dict(half_width=1, n=14), dict(half_width=1, n=33)])
def test_grid_rejects_invalid_parameters(kwargs):
    with pytest.raises(ValueError):
        PhaseGrid(dim=2, **kwargs)


def test_grid_cell_volume_and_center():
    g = PhaseGrid(2.0, 16, 3, center=(1.0, 0.0, -1.0))
    assert g.cell_volume == pytest.approx((4.0 / 16) ** 3, rel=1e-15)
    assert g.axis(0).mean() == pytest.approx(1.0)
    assert g.axis(2).mean() == pytest.approx(-1.0)
    assert g.points().shape == (16, 16, 16, 3)


def test_integrate_vacuum():
    assert abs(integrate(sample_field(vacuum, GRID)) - 1.0) < 1e-6


def test_integrate_zero_field():
    assert integrate(WignerField(GRID, np.zeros(GRID.shape))) == 0.0


def test_integrate_fock_one():
    assert abs(integrate(sample_field(fock1, GRID)) - 1.0) < 1e-6


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_integrate_is_linear(a, b):
    w1 = sample_field(vacuum, GRID)
    w2 = sample_field(fock1, GRID)
    lhs = integrate(w1 * a + w2 * b)
    rhs = a * integrate(w1) + b * integrate(w2)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


def test_pair_vacuum_purity():
    w = sample_field(vacuum, GRID)
    assert abs(pair(w, w) - 1.0) < 1e-6


def test_pair_vacuum_fock_one_orthogonal():
    assert abs(pair(sample_field(vacuum, GRID), sample_field(fock1, GRID))) < 1e-6


def test_pair_identity_gives_trace():
    ident = WignerField(GRID, np.full(GRID.shape, 1.0 / (4 * np.pi)))
    assert abs(pair(ident, sample_field(fock1, GRID)) - 1.0) < 1e-6


def test_pair_rejects_grid_mismatch():
    other = PhaseGrid(8.0, 64, 2)
    with pytest.raises(ValueError):
        pair(sample_field(vacuum, GRID), sample_field(vacuum, other))


@given(st.integers(0, 5), st.integers(0, 5))
def test_pair_is_symmetric(n, m):
    g = PhaseGrid(8.0, 64, 2)
    w1 = sample_field(lambda x: fock_wigner(n, x), g)
    w2 = sample_field(lambda x: fock_wigner(m, x), g)
    assert pair(w1, w2) == pair(w2, w1)


def test_marginal_of_product_state():
    g4 = PhaseGrid(7.0, 32, 4)
    va = np.array([[2.0, 0.3], [0.3, 1.5]])
    state = make_product(va, np.eye(2))
    m = marginal(sample_field(state, g4), [0, 1])
    expected = gaussian_density(g4.sub([0, 1]).points(), np.zeros(2), va)
    assert np.max(np.abs(m.values - expected)) < 1e-6


def test_marginal_of_tmsv_bob():
    r = 0.5
    state = make_tmsv(r)
    g4 = PhaseGrid(6 * state.max_std(), 40, 4)
    m = marginal(sample_field(state, g4), [2, 3])
    expected = gaussian_density(g4.sub([2, 3]).points(), np.zeros(2), np.cosh(2 * r) * np.eye(2))
    assert np.max(np.abs(m.values - expected)) < 1e-6


def test_marginal_keeping_everything_is_identity():
    w = sample_field(vacuum, GRID)
    assert np.array_equal(marginal(w, [0, 1]).values, w.values)


def test_marginal_rejects_empty_keep():
    with pytest.raises(ValueError):
        marginal(sample_field(vacuum, GRID), [])


def test_min_value_fock_one_at_origin():
    g = PhaseGrid(8.0, 128, 2, center=(1 / 16, 1 / 16))
    v, loc = min_value(sample_field(fock1, g))
    assert abs(v + 1.0 / TWO_PI) < 1e-12
    assert np.allclose(loc, 0.0, atol=1e-12)


def test_min_value_vacuum_positive():
    v, _ = min_value(sample_field(vacuum, GRID))
    assert v > 0


def test_min_value_fock_two_in_laguerre_dip():
    v, loc = min_value(sample_field(lambda x: fock_wigner(2, x), GRID))
    u = float(np.sum(loc**2))
    assert v < 0
    assert 2 - np.sqrt(2) < u < 2 + np.sqrt(2)


@pytest.mark.parametrize("cov", [np.eye(2), np.diag([3.0, 0.5]), np.array([[2.0, 0.8], [0.8, 1.2]])])
def test_refinement_changes_gaussian_integral_little(cov):
    L = 6 * np.sqrt(np.max(np.linalg.eigvalsh(cov)))
    g = PhaseGrid(L, 128, 2)
    f = lambda x: gaussian_density(x, np.zeros(2), cov)
    a = integrate(sample_field(f, g))
    b = integrate(sample_field(f, g.refine()))
    assert abs(a - b) < 1e-8


def test_sample_field_chunking_does_not_change_values():
    g4 = PhaseGrid(5.0, 16, 4)
    s = make_tmsv(0.3)
    assert np.array_equal(sample_field(s, g4).values, sample_field(s, g4, chunk=777).values)
