import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import eval_laguerre

from wignersteer.fock import (
    FockMixtureState,
    find_negative_fock,
    fock_wigner,
    laguerre,
    mixture_joint_wigner,
    mixture_reduced_alice,
    thermal_cutoff,
    thermal_weights,
    thermal_wigner,
    verify_fock_recurrence,
)

from conftest import TWO_PI


def laguerre_exact(n, u):
    return sum(Fraction((-1) ** k * math.comb(n, k) * u**k, math.factorial(k)) for k in range(n + 1))


def test_laguerre_examples():
    assert laguerre(0, 17.3) == 1.0
    assert laguerre(1, 1.0) == 0.0
    assert laguerre(2, 2.0) == pytest.approx(-1.0, abs=1e-15)


@pytest.mark.parametrize("n", [3, 7, 15, 30])
@pytest.mark.parametrize("u", [0, 1, 2, 5, 10, 20])
def test_laguerre_matches_exact_rationals(n, u):
    exact = float(laguerre_exact(n, u))
    scale = max(1.0, abs(exact))
    assert abs(laguerre(n, float(u)) - exact) < 1e-10 * scale


@given(st.integers(0, 60), st.floats(0, 40))
def test_laguerre_matches_scipy(n, u):
    ref = eval_laguerre(n, u)
    # upward recurrence and scipy agree to rounding at this range
    assert laguerre(n, u) == pytest.approx(ref, rel=1e-8, abs=1e-8 * max(1.0, math.exp(u / 2)))


def test_laguerre_vectorized():
    u = np.linspace(0, 5, 7)
    assert np.allclose(laguerre(4, u), eval_laguerre(4, u), atol=1e-13)


def test_fock_wigner_examples():
    assert fock_wigner(0, np.zeros(2)) == pytest.approx(1 / TWO_PI, rel=1e-15)
    assert fock_wigner(1, np.zeros(2)) == pytest.approx(-1 / TWO_PI, rel=1e-15)
    assert fock_wigner(1, np.array([1.0, 0.0])) == pytest.approx(0.0, abs=1e-16)
    assert fock_wigner(1, np.array([0.6, 0.8])) == pytest.approx(0.0, abs=1e-16)


def test_fock_wigner_rejects_multimode_point():
    with pytest.raises(ValueError):
        fock_wigner(1, np.zeros(4))


def test_recurrence_examples():
    assert verify_fock_recurrence(1, np.zeros(2)) < 1e-15
    x3 = np.array([np.sqrt(3.0), 0.0])
    assert verify_fock_recurrence(1, x3) < 1e-15
    assert 2 * fock_wigner(2, x3) == pytest.approx(-fock_wigner(0, x3), abs=1e-15)
    with pytest.raises(ValueError):
        verify_fock_recurrence(0, np.zeros(2))


def test_recurrence_residual_on_random_points(rng):
    r = 6 * np.sqrt(rng.uniform(size=1000))
    th = rng.uniform(0, 2 * np.pi, size=1000)
    x = np.stack([r * np.cos(th), r * np.sin(th)], axis=-1)
    for m in range(1, 31):
        assert verify_fock_recurrence(m, x) < 1e-10


def test_find_negative_fock_examples():
    assert find_negative_fock(np.zeros(2), 5) == 1
    assert find_negative_fock(np.array([np.sqrt(10.0), 0.0]), 10) <= 10
    far = np.array([np.sqrt(50.0), 0.0])
    assert find_negative_fock(far, 10) is None
    assert find_negative_fock(far, 60) is not None
    with pytest.raises(ValueError):
        find_negative_fock(np.zeros(2), 0)


@given(st.floats(0, 8), st.floats(0, 2 * np.pi))
def test_find_negative_fock_bound(radius, angle):
    x = radius * np.array([np.cos(angle), np.sin(angle)])
    m = find_negative_fock(x, 80)
    assert m is not None and m <= math.ceil(radius**2 / 2) + 2
    assert fock_wigner(m, x) < 0


def test_thermal_weights_examples():
    w, tail = thermal_weights(1.0, 20)
    assert w[:3].tolist() == [0.5, 0.25, 0.125]
    assert tail == 2.0**-21
    assert w.sum() + tail == pytest.approx(1.0, abs=1e-15)


@given(st.floats(0.01, 20), st.integers(1, 80))
def test_thermal_weights_sum_with_tail(t, cutoff):
    w, tail = thermal_weights(t, cutoff)
    assert w.sum() + tail == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("t", [0.0, -1.0])
def test_thermal_weights_reject_nonpositive(t):
    with pytest.raises(ValueError):
        thermal_weights(t, 5)


def test_thermal_cutoff_is_smallest():
    for t in (0.2, 1.0, 3.0):
        c = thermal_cutoff(t)
        assert thermal_weights(t, c)[1] < 1e-8 <= thermal_weights(t, c - 1)[1]
    assert thermal_cutoff(1.0) == 26


def test_mixture_joint_at_origin():
    s = FockMixtureState.thermal(1.0, 20)
    v = mixture_joint_wigner(s, np.zeros(2), np.zeros(2))
    assert v == pytest.approx((1 - 2.0**-21) / TWO_PI**2, rel=1e-13)


def test_vacuum_mixture_is_vacuum_product(rng):
    s = FockMixtureState(np.array([1.0, 0.0]))
    xa, xb = rng.normal(size=(2, 30, 2))
    vac = lambda x: np.exp(-0.5 * np.sum(x * x, axis=-1)) / TWO_PI
    assert np.allclose(mixture_joint_wigner(s, xa, xb), vac(xa) * vac(xb), rtol=1e-14, atol=0)
    assert np.allclose(mixture_reduced_alice(s, xa), vac(xa), rtol=1e-14, atol=0)


def test_reduced_alice_examples():
    s = FockMixtureState.thermal(1.0)
    assert mixture_reduced_alice(s, np.zeros(2)) == pytest.approx(1 / (6 * np.pi), rel=1e-7)
    assert mixture_reduced_alice(s, np.array([np.sqrt(6.0), 0])) == pytest.approx(np.exp(-1) / (6 * np.pi), rel=1e-7)


@pytest.mark.parametrize("t", [0.2, 1.0, 2.5])
def test_reduced_alice_positive_and_thermal(t):
    # relative accuracy deep in the tail needs far more levels than the default
    s = FockMixtureState.thermal(t, 150)
    r = np.linspace(0, 14, 281)
    x = np.stack([r, np.zeros_like(r)], axis=-1)
    got = mixture_reduced_alice(s, x)
    ref = thermal_wigner(t, x)
    assert np.all(got > 0)
    big = ref > 1e-12
    assert np.max(np.abs(got[big] / ref[big] - 1)) < 1e-6


@pytest.mark.parametrize("t", [0.2, 1.0, 2.5])
def test_default_cutoff_within_tail_bound(t):
    s = FockMixtureState.thermal(t)
    r = np.linspace(0, 14, 281)
    x = np.stack([r, np.zeros_like(r)], axis=-1)
    err = np.abs(mixture_reduced_alice(s, x) - thermal_wigner(t, x))
    assert np.max(err) <= s.tail_mass / TWO_PI


def test_marginal_over_bob_is_thermal():
    from wignersteer.phase_space import PhaseGrid, sample_field, marginal

    s = FockMixtureState.thermal(1.0)
    g = PhaseGrid(6 * np.sqrt(3.0), 40, 4)
    m = marginal(sample_field(s, g), [0, 1])
    ref = thermal_wigner(1.0, g.sub([0, 1]).points())
    assert np.max(np.abs(m.values - ref)) < 1e-6


def test_mixture_validation_and_json():
    with pytest.raises(ValueError):
        FockMixtureState(np.array([0.5, 0.6]))
    with pytest.raises(ValueError):
        FockMixtureState(np.array([1.0]))
    with pytest.raises(ValueError):
        FockMixtureState(np.array([1.2, -0.2]))
    s = FockMixtureState.thermal(0.7)
    back = FockMixtureState.from_dict(json.loads(json.dumps(s.to_dict())))
    assert np.array_equal(back.weights, s.weights) and back.t == s.t and back.cutoff == s.cutoff


def test_single_fock_mixture():
    s = FockMixtureState.single(3)
    assert s.weights[3] == 1.0 and s.weights.sum() == 1.0
