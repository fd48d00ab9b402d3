import numpy as np
import pytest

from wignersteer.measurements import (
    completeness_defect,
    fock_projector_family,
    heterodyne_family,
    identity_family,
    outcome_probabilities,
)
from wignersteer.fock import FockMixtureState, fock_wigner, mixture_reduced_alice
from wignersteer.gaussian import attenuate, make_product, make_tmsv
from wignersteer.phase_space import PhaseGrid, sample_field

from conftest import vacuum

HET = heterodyne_family(PhaseGrid(10.0, 100, 2))


def disc_points(radius, n=400, seed=0):
    rng = np.random.default_rng(seed)
    r = radius * np.sqrt(rng.uniform(size=n))
    th = rng.uniform(0, 2 * np.pi, size=n)
    return np.stack([r * np.cos(th), r * np.sin(th)], axis=-1)


def test_heterodyne_complete_inside_radius_six():
    assert completeness_defect(HET, disc_points(6.0)) < 1e-4


def test_heterodyne_element_peaks_at_its_outcome():
    k = int(np.argmin(np.sum(HET.outcomes**2, axis=1)))
    x0 = HET.outcomes[k]
    probe = x0 + disc_points(3.0, 200)
    assert np.all(HET.element_wigner(k, probe) <= HET.element_wigner(k, x0))


def test_heterodyne_is_positive():
    assert HET.positive
    assert np.all(HET.element_wigner(0, disc_points(8.0)) > 0)


def test_fock_family_sum_on_thermal_bob():
    state = FockMixtureState.thermal(1.0, 60)
    g = PhaseGrid(8.0 * np.sqrt(3), 128, 2)
    bob = sample_field(lambda x: mixture_reduced_alice(state, x), g)
    for m_cut in (0, 3, 5, 10):
        fam = fock_projector_family(m_cut)
        assert outcome_probabilities(fam, bob).sum() == pytest.approx(1 - 2.0 ** -(m_cut + 1), abs=1e-6)


def test_fock_family_elements_and_flags():
    fam = fock_projector_family(5)
    x = disc_points(4.0, 50)
    assert np.allclose(fam.element_wigner(0, x), vacuum(x), atol=1e-16)
    assert fam.element_wigner(1, np.zeros(2)) < 0
    assert not fam.positive and not fam.complete
    with pytest.raises(ValueError):
        fock_projector_family(-1)


def test_fock_family_defect_is_remainder():
    # at the origin 4 pi sum_{m<=M} W_m(0) alternates between 2 and 0
    fam = fock_projector_family(5)
    assert completeness_defect(fam, np.zeros((1, 2))) == pytest.approx(1.0, abs=1e-12)
    fam = fock_projector_family(4)
    assert completeness_defect(fam, np.zeros((1, 2))) == pytest.approx(1.0, abs=1e-12)


def test_identity_family_exactly_complete():
    for m in (1, 2):
        fam = identity_family(m)
        assert completeness_defect(fam, np.zeros((3, 2 * m))) == 0.0


@pytest.mark.parametrize("state", [make_tmsv(0.5), FockMixtureState.thermal(1.0),
                                   make_product(2 * np.eye(2), np.eye(2)),
                                   attenuate(make_tmsv(0.7), 0.4, "alice")], ids=["tmsv", "fock", "product", "lossy"])
def test_heterodyne_probabilities_sum_to_one(state):
    g = PhaseGrid(6 * state.max_std(), 64, 2)
    alice = sample_field(state.alice_wigner, g)
    assert abs(outcome_probabilities(HET, alice).sum() - 1) < 1e-4


def test_descriptor():
    assert HET.descriptor() == {"kind": "heterodyne", "half_width": 10.0, "n": 100}
    assert fock_projector_family(3).descriptor() == {"kind": "fock", "cutoff": 3}
