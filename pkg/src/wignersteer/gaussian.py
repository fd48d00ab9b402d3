"""Gaussian states, Schur-complement conditionals and number-operator witnesses."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .phase_space import ModeLayout, symplectic_form

__all__ = [
    "HEISENBERG_TOL",
    "GaussianState",
    "ConditionalGaussian",
    "gaussian_density",
    "wigner_eval",
    "schur_complement",
    "conditional_gaussian",
    "heisenberg_defect",
    "number_witness_value",
    "optimal_number_witness",
    "squeezing_frame",
    "gaussian_steerable",
    "make_tmsv",
    "make_product",
    "attenuate",
]

HEISENBERG_TOL = 1e-9


def gaussian_density(x, mean, cov) -> np.ndarray:
    """Normalized Gaussian density evaluated along the last axis of ``x``."""
    x = np.asarray(x, dtype=float)
    mean = np.asarray(mean, dtype=float)
    cov = np.asarray(cov, dtype=float)
    d = cov.shape[0]
    if x.shape[-1] != d:
        raise ValueError(f"point dimension {x.shape[-1]} does not match covariance {d}")
    try:
        chol = la.cho_factor(cov, lower=True)
    except la.LinAlgError as exc:
        raise ValueError("covariance matrix is singular or not positive definite") from exc
    diff = (x - mean).reshape(-1, d)
    sol = la.cho_solve(chol, diff.T).T
    quad = np.einsum("ij,ij->i", diff, sol)
    logdet = 2.0 * np.sum(np.log(np.diag(chol[0])))
    out = np.exp(-0.5 * quad - 0.5 * logdet) / (2.0 * np.pi) ** (d / 2)
    return out.reshape(x.shape[:-1])


@dataclass(frozen=True)
class GaussianState:
    """Gaussian Wigner function with mean ``mean`` and covariance ``covariance``.

    The first ``2 * layout.n_alice_modes`` coordinates belong to Alice.
    Construction checks symmetry, positivity and the uncertainty relation
    ``V + i Omega >= 0``.
    """

    mean: np.ndarray
    covariance: np.ndarray
    layout: ModeLayout = ModeLayout()

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float).reshape(-1)
        cov = np.array(self.covariance, dtype=float)
        d = self.layout.dim
        if mean.shape != (d,) or cov.shape != (d, d):
            raise ValueError(f"expected mean of length {d} and a {d}x{d} covariance")
        if not np.all(np.isfinite(cov)) or not np.all(np.isfinite(mean)):
            raise ValueError("non-finite entries")
        if not np.allclose(cov, cov.T, rtol=0, atol=1e-12):
            raise ValueError("covariance matrix is not symmetric")
        cov = 0.5 * (cov + cov.T)
        if np.linalg.eigvalsh(cov)[0] <= 0:
            raise ValueError("covariance matrix is not positive definite")
        if heisenberg_defect(cov) < -HEISENBERG_TOL:
            raise ValueError("covariance matrix violates the uncertainty relation")
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", cov)

    @property
    def n_modes(self) -> int:
        return self.layout.n_modes

    @property
    def _a(self) -> slice:
        return slice(0, self.layout.alice_dim)

    @property
    def _b(self) -> slice:
        return slice(self.layout.alice_dim, self.layout.dim)

    @property
    def mean_a(self) -> np.ndarray:
        return self.mean[self._a]

    @property
    def mean_b(self) -> np.ndarray:
        return self.mean[self._b]

    @property
    def cov_a(self) -> np.ndarray:
        return self.covariance[self._a, self._a]

    @property
    def cov_b(self) -> np.ndarray:
        return self.covariance[self._b, self._b]

    @property
    def cov_ab(self) -> np.ndarray:
        return self.covariance[self._a, self._b]

    @property
    def cov_ba(self) -> np.ndarray:
        return self.covariance[self._b, self._a]

    def __call__(self, x) -> np.ndarray:
        return gaussian_density(x, self.mean, self.covariance)

    def alice_wigner(self, xa) -> np.ndarray:
        return gaussian_density(xa, self.mean_a, self.cov_a)

    def bob_wigner(self, xb) -> np.ndarray:
        return gaussian_density(xb, self.mean_b, self.cov_b)

    def max_std(self) -> float:
        return float(np.sqrt(np.max(np.diag(self.covariance))))

    def to_dict(self) -> dict:
        return {
            "mean": self.mean.tolist(),
            "covariance": self.covariance.tolist(),
            "n_alice_modes": self.layout.n_alice_modes,
            "n_bob_modes": self.layout.n_bob_modes,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GaussianState":
        layout = ModeLayout(int(data["n_alice_modes"]), int(data["n_bob_modes"]))
        return cls(np.array(data["mean"]), np.array(data["covariance"]), layout)


@dataclass(frozen=True)
class ConditionalGaussian:
    """Gaussian conditional Wigner function of Bob at a fixed ``x_A``.

    ``covariance`` is always positive definite but need not satisfy the
    uncertainty relation.
    """

    mean: np.ndarray
    covariance: np.ndarray
    x_a: np.ndarray

    def __call__(self, xb) -> np.ndarray:
        return gaussian_density(xb, self.mean, self.covariance)

    @property
    def n_modes(self) -> int:
        return self.covariance.shape[0] // 2

    def max_std(self) -> float:
        return float(np.sqrt(np.max(np.diag(self.covariance))))


def wigner_eval(state: GaussianState, x) -> np.ndarray:
    """Wigner function of ``state`` at ``x`` (vectorized over leading axes)."""
    return state(x)


def schur_complement(state: GaussianState) -> np.ndarray:
    """``V_B - V_BA V_A^{-1} V_AB``, the conditional covariance of Bob given Alice."""
    va = state.cov_a
    try:
        chol = la.cho_factor(va, lower=True)
    except la.LinAlgError as exc:
        raise ValueError("Alice's covariance block is singular") from exc
    out = state.cov_b - state.cov_ba @ la.cho_solve(chol, state.cov_ab)
    return 0.5 * (out + out.T)


def conditional_gaussian(state: GaussianState, x_a) -> ConditionalGaussian:
    x_a = np.asarray(x_a, dtype=float).reshape(-1)
    if x_a.shape != (state.layout.alice_dim,):
        raise ValueError("conditioning point has the wrong dimension")
    gain = la.solve(state.cov_a, state.cov_ab, assume_a="pos").T
    mean = state.mean_b + gain @ (x_a - state.mean_a)
    return ConditionalGaussian(mean, schur_complement(state), x_a)


def heisenberg_defect(cov) -> float:
    """Smallest eigenvalue of the Hermitian matrix ``V + i Omega``.

    A negative value certifies that ``V`` violates the uncertainty relation.
    """
    cov = np.asarray(cov, dtype=float)
    d = cov.shape[0]
    if cov.shape != (d, d) or d % 2:
        raise ValueError("covariance must be square with even dimension")
    return float(np.linalg.eigvalsh(cov + 1j * symplectic_form(d // 2))[0])


def _rotated_sum(cov) -> np.ndarray:
    cov = np.asarray(cov, dtype=float)
    omega = symplectic_form(cov.shape[0] // 2)
    return cov + omega.T @ cov @ omega


def number_witness_value(cov_cond, f) -> float:
    """Expectation of the number operator of axis ``f``, displaced to the
    conditional mean, under a Gaussian conditional with covariance ``cov_cond``.

    Equals ``(f^T [V + Omega^T V Omega] f - 2) / 4``.
    """
    f = np.asarray(f, dtype=float).reshape(-1)
    norm = np.linalg.norm(f)
    if norm == 0:
        raise ValueError("witness axis must be nonzero")
    if not np.isclose(norm, 1.0, rtol=0, atol=1e-12):
        raise ValueError("witness axis must be a unit vector")
    m = _rotated_sum(cov_cond)
    if m.shape[0] != f.shape[0]:
        raise ValueError("axis dimension does not match covariance")
    return float(0.25 * (f @ m @ f - 2.0))


def optimal_number_witness(cov_cond) -> tuple:
    """Axis minimizing :func:`number_witness_value` and the minimum value.

    Degenerate spectra resolve to the lowest-index eigenvector from ``eigh``.
    """
    w, v = np.linalg.eigh(_rotated_sum(cov_cond))
    f = v[:, 0]
    # fix the sign so the largest component is positive
    f = f * np.sign(f[np.argmax(np.abs(f))])
    return f, float(0.25 * w[0] - 0.5)


def squeezing_frame(cov) -> tuple:
    """Single-mode symplectic ``S`` with ``S^{-1} V S^{-T} = nu * I``.

    Returns ``(S, nu)`` where ``nu = sqrt(det V)``.  Used to build squeezed
    number witnesses, which detect any single-mode uncertainty violation.
    """
    cov = np.asarray(cov, dtype=float)
    if cov.shape != (2, 2):
        raise ValueError("squeezing_frame is defined for a single mode")
    nu = float(np.sqrt(np.linalg.det(cov)))
    s = np.real(la.sqrtm(cov / nu))
    return 0.5 * (s + s.T), nu


def gaussian_steerable(state: GaussianState, tol: float = HEISENBERG_TOL) -> tuple:
    """``(flag, defect)`` where the flag says Alice can steer Bob with
    Gaussian measurements, i.e. the Schur complement violates Heisenberg."""
    defect = heisenberg_defect(schur_complement(state))
    return defect < -tol, defect


def make_tmsv(r: float) -> GaussianState:
    """Two-mode squeezed vacuum with squeezing parameter ``r``."""
    r = float(r)
    if not np.isfinite(r):
        raise ValueError("squeezing must be finite")
    c, s = np.cosh(2 * r), np.sinh(2 * r)
    z = np.diag([1.0, -1.0])
    cov = np.block([[c * np.eye(2), s * z], [s * z, c * np.eye(2)]])
    return GaussianState(np.zeros(4), cov, ModeLayout(1, 1))


def make_product(cov_a, cov_b, mean_a=None, mean_b=None) -> GaussianState:
    cov_a = np.atleast_2d(np.asarray(cov_a, dtype=float))
    cov_b = np.atleast_2d(np.asarray(cov_b, dtype=float))
    la_, lb = cov_a.shape[0], cov_b.shape[0]
    mean_a = np.zeros(la_) if mean_a is None else np.asarray(mean_a, dtype=float)
    mean_b = np.zeros(lb) if mean_b is None else np.asarray(mean_b, dtype=float)
    cov = la.block_diag(cov_a, cov_b)
    return GaussianState(np.concatenate([mean_a, mean_b]), cov, ModeLayout(la_ // 2, lb // 2))


def attenuate(state: GaussianState, eta: float, party: str = "bob") -> GaussianState:
    """Pure-loss channel of transmissivity ``eta`` on one party.

    On Bob: ``V_B -> eta V_B + (1 - eta) I``, cross blocks scale by
    ``sqrt(eta)`` and the mean by ``sqrt(eta)``.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError("transmissivity must lie in [0, 1]")
    if party not in ("alice", "bob"):
        raise ValueError("party must be 'alice' or 'bob'")
    d = state.layout.dim
    sl = state._b if party == "bob" else state._a
    scale = np.ones(d)
    scale[sl] = np.sqrt(eta)
    cov = state.covariance * np.outer(scale, scale)
    idx = np.arange(d)[sl]
    cov[idx, idx] += 1.0 - eta
    return GaussianState(state.mean * scale, cov, state.layout)
