"""Fock-state Wigner functions and the correlated Fock-pair mixture."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "NEGATIVITY_TOL",
    "FockMixtureState",
    "laguerre",
    "laguerre_table",
    "fock_wigner",
    "fock_wigner_table",
    "verify_fock_recurrence",
    "find_negative_fock",
    "thermal_weights",
    "thermal_cutoff",
    "mixture_joint_wigner",
    "mixture_reduced_alice",
    "thermal_wigner",
]

NEGATIVITY_TOL = 1e-12 / (2.0 * np.pi)


def laguerre_table(n_max: int, u) -> np.ndarray:
    """``L_0(u) .. L_{n_max}(u)`` stacked along a new leading axis.

    Uses the upward three-term recurrence
    ``(m+1) L_{m+1} = (2m+1-u) L_m - m L_{m-1}``.
    """
    if n_max < 0:
        raise ValueError("degree must be nonnegative")
    u = np.asarray(u, dtype=float)
    out = np.empty((n_max + 1,) + u.shape)
    out[0] = 1.0
    if n_max >= 1:
        out[1] = 1.0 - u
    for m in range(1, n_max):
        out[m + 1] = ((2 * m + 1 - u) * out[m] - m * out[m - 1]) / (m + 1)
    return out


def laguerre(n: int, u):
    """Laguerre polynomial ``L_n(u)``."""
    val = laguerre_table(int(n), u)[int(n)]
    return float(val) if np.ndim(val) == 0 else val


def _radius2(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 2:
        raise ValueError("Fock Wigner functions take single-mode points (q, p)")
    return np.sum(x * x, axis=-1)


def fock_wigner_table(n_max: int, x) -> np.ndarray:
    """Wigner functions of ``|0>..|n_max>`` at single-mode points ``x``."""
    r2 = _radius2(x)
    lag = laguerre_table(n_max, r2)
    signs = (-1.0) ** np.arange(n_max + 1)
    signs = signs.reshape((-1,) + (1,) * r2.ndim)
    return signs * lag * np.exp(-0.5 * r2) / (2.0 * np.pi)


def fock_wigner(n: int, x):
    """``(-1)^n L_n(|x|^2) exp(-|x|^2 / 2) / (2 pi)``."""
    val = fock_wigner_table(int(n), x)[int(n)]
    return float(val) if np.ndim(val) == 0 else val


def verify_fock_recurrence(m: int, x) -> float:
    """Residual of ``(m+1) W_{m+1} = (|x|^2 - 2m - 1) W_m - m W_{m-1}``."""
    if m < 1:
        raise ValueError("the recurrence needs m >= 1")
    w = fock_wigner_table(m + 1, x)
    r2 = _radius2(x)
    lhs = (m + 1) * w[m + 1]
    rhs = (r2 - 2 * m - 1) * w[m] - m * w[m - 1]
    return float(np.max(np.abs(lhs - rhs)))


def find_negative_fock(x, m_max: int, tol: float = NEGATIVITY_TOL):
    """Smallest ``m <= m_max`` with ``W_m(x) < -tol``, or ``None``."""
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    w = fock_wigner_table(m_max, np.asarray(x, dtype=float).reshape(2))
    hits = np.flatnonzero(w < -tol)
    return int(hits[0]) if hits.size else None


def thermal_weights(t: float, cutoff: int) -> tuple:
    """Thermal photon-number weights ``t^n / (1+t)^(n+1)`` for ``n <= cutoff``.

    Returns ``(weights, tail_mass)`` with ``tail_mass = (t / (1+t))**(cutoff+1)``.
    """
    if not t > 0:
        raise ValueError("mean photon number must be positive")
    n = np.arange(int(cutoff) + 1)
    ratio = t / (1.0 + t)
    weights = ratio**n / (1.0 + t)
    return weights, float(ratio ** (cutoff + 1))


def thermal_cutoff(t: float, tail: float = 1e-8) -> int:
    """Smallest cutoff whose thermal tail mass is below ``tail``."""
    ratio = t / (1.0 + t)
    return max(1, int(math.ceil(math.log(tail) / math.log(ratio))) - 1)


def thermal_wigner(t: float, x) -> np.ndarray:
    """Closed-form thermal Gaussian with variance ``2t + 1``."""
    v = 2.0 * t + 1.0
    return np.exp(-_radius2(x) / (2 * v)) / (2.0 * np.pi * v)


@dataclass(frozen=True)
class FockMixtureState:
    """``sum_n p_n |n><n| (x) |n><n|`` truncated at ``cutoff``.

    ``t`` records the thermal parameter when the weights came from
    :meth:`thermal`; ``tail_mass`` bounds the missing probability.
    """

    weights: np.ndarray
    tail_mass: float = 0.0
    t: float = None

    def __post_init__(self):
        w = np.array(self.weights, dtype=float).reshape(-1)
        if w.size < 2:
            raise ValueError("cutoff must be at least 1")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        deficit = 1.0 - w.sum()
        if deficit < -1e-12 or deficit > self.tail_mass + 1e-12:
            raise ValueError("weights must sum to one up to the declared tail mass")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def thermal(cls, t: float, cutoff: int = None) -> "FockMixtureState":
        if cutoff is None:
            cutoff = thermal_cutoff(t)
        w, tail = thermal_weights(t, cutoff)
        return cls(w, tail, float(t))

    @classmethod
    def single(cls, n: int, cutoff: int = None) -> "FockMixtureState":
        cutoff = max(1, n) if cutoff is None else cutoff
        w = np.zeros(cutoff + 1)
        w[n] = 1.0
        return cls(w)

    @property
    def cutoff(self) -> int:
        return self.weights.size - 1

    @property
    def n_modes(self) -> int:
        return 2

    def max_std(self) -> float:
        mean_n = float(np.sum(np.arange(self.cutoff + 1) * self.weights))
        return math.sqrt(2.0 * mean_n + 1.0)

    def alice_wigner(self, xa) -> np.ndarray:
        return mixture_reduced_alice(self, xa)

    bob_wigner = alice_wigner

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return mixture_joint_wigner(self, x[..., :2], x[..., 2:])

    def to_dict(self) -> dict:
        return {"weights": self.weights.tolist(), "t": self.t, "cutoff": self.cutoff}

    @classmethod
    def from_dict(cls, data: dict) -> "FockMixtureState":
        if data.get("t") is not None and "weights" not in data:
            return cls.thermal(float(data["t"]), data.get("cutoff"))
        w = np.asarray(data["weights"], dtype=float)
        return cls(w, max(0.0, 1.0 - float(w.sum())), data.get("t"))


def mixture_joint_wigner(state: FockMixtureState, xa, xb) -> np.ndarray:
    """``sum_n p_n W_n(x_A) W_n(x_B)`` over the stored weights."""
    wa = fock_wigner_table(state.cutoff, xa)
    wb = fock_wigner_table(state.cutoff, xb)
    return np.tensordot(state.weights, wa * wb, axes=1)


def mixture_reduced_alice(state: FockMixtureState, xa) -> np.ndarray:
    return np.tensordot(state.weights, fock_wigner_table(state.cutoff, xa), axes=1)
