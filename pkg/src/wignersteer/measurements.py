"""Wigner functions of POVM elements and the completeness relation."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .fock import fock_wigner_table
from .phase_space import PhaseGrid, WignerField, sample_field

__all__ = [
    "PovmFamily",
    "heterodyne_family",
    "fock_projector_family",
    "identity_family",
    "completeness_defect",
    "outcome_probabilities",
]


@dataclass(frozen=True)
class PovmFamily:
    """A measurement described by the Wigner functions of its elements.

    Parameters
    ----------
    kind : str
        ``"heterodyne"``, ``"fock"`` or ``"identity"``.
    n_modes : int
        Modes the measurement acts on.
    outcomes : ndarray
        Discrete labels, or for a continuum the outcome grid points
        (shape ``(n_outcomes, 2 * n_modes)``).
    element_wigner : callable
        ``element_wigner(k, x)`` gives the Wigner function of element ``k``.
    outcome_weight : float
        Measure of one outcome cell (1 for discrete outcomes).
    positive : bool
        Every element has a strictly positive Wigner function.
    complete : bool
        The elements resolve the identity (up to discretization).
    """

    kind: str
    n_modes: int
    outcomes: np.ndarray
    element_wigner: Callable
    outcome_weight: float = 1.0
    positive: bool = False
    complete: bool = True
    params: dict = None

    def __len__(self) -> int:
        return len(self.outcomes)

    def element_field(self, k: int, grid: PhaseGrid) -> WignerField:
        return sample_field(lambda x: self.element_wigner(k, x), grid, self.n_modes)

    def descriptor(self) -> dict:
        return {"kind": self.kind, **(self.params or {})}


def heterodyne_family(outcome_grid: PhaseGrid) -> PovmFamily:
    """Coherent-state projectors ``|x><x| / (4 pi)`` on an outcome grid.

    Element ``k`` has the strictly positive Wigner function
    ``exp(-|y - x_k|^2 / 2) / (2 pi (4 pi)) `` per mode, so
    ``(4 pi)^m * sum_k W_k(y) * cell = 1`` in the continuum limit.
    """
    n_modes = outcome_grid.dim // 2
    pts = outcome_grid.points().reshape(-1, outcome_grid.dim)
    norm = (2.0 * np.pi * 4.0 * np.pi) ** n_modes

    def element(k, y):
        y = np.asarray(y, dtype=float)
        d = y - pts[k]
        return np.exp(-0.5 * np.sum(d * d, axis=-1)) / norm

    return PovmFamily(
        "heterodyne",
        n_modes,
        pts,
        element,
        outcome_grid.cell_volume,
        positive=True,
        complete=True,
        params={"half_width": outcome_grid.half_width, "n": outcome_grid.n},
    )


def fock_projector_family(cutoff: int) -> PovmFamily:
    """Projectors ``|m><m|`` for ``m <= cutoff`` (incomplete, not Wigner-positive)."""
    if cutoff < 0:
        raise ValueError("cutoff must be >= 0")

    def element(k, y):
        return fock_wigner_table(int(k), y)[int(k)]

    return PovmFamily(
        "fock",
        1,
        np.arange(cutoff + 1),
        element,
        1.0,
        positive=False,
        complete=False,
        params={"cutoff": int(cutoff)},
    )


def identity_family(n_modes: int = 1) -> PovmFamily:
    """Single trivial outcome whose element is the identity."""

    def element(k, y):
        y = np.asarray(y, dtype=float)
        return np.full(y.shape[:-1], 1.0 / (4.0 * np.pi) ** n_modes)

    return PovmFamily("identity", n_modes, np.zeros(1), element, 1.0, positive=True, complete=True,
                      params={"n_modes": n_modes})


def completeness_defect(family: PovmFamily, probe_points) -> float:
    """``max |(4 pi)^m sum_a W_a(x) da - 1|`` over the probe points."""
    probe = np.asarray(probe_points, dtype=float).reshape(-1, 2 * family.n_modes)
    total = np.zeros(probe.shape[0])
    for k in range(len(family)):
        total += family.element_wigner(k, probe)
    total *= (4.0 * np.pi) ** family.n_modes * family.outcome_weight
    return float(np.max(np.abs(total - 1.0)))


def outcome_probabilities(family: PovmFamily, state: WignerField) -> np.ndarray:
    """Probability of each outcome (times the outcome cell for continua)."""
    pts = state.grid.points().reshape(-1, state.grid.dim)
    vals = state.values.reshape(-1)
    scale = (4.0 * np.pi) ** family.n_modes * state.grid.cell_volume * family.outcome_weight
    return np.array([scale * np.dot(family.element_wigner(k, pts), vals) for k in range(len(family))])
