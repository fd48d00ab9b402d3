"""Conditional Wigner functions, physicality witnesses and remote heralding.

A *joint state* is any of :class:`~wignersteer.gaussian.GaussianState`,
:class:`~wignersteer.fock.FockMixtureState` or :class:`GridJoint`.  All three
expose ``layout``, ``alice_wigner``, ``bob_wigner``, ``max_std`` and a joint
evaluator used by the grid pipelines.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .fock import FockMixtureState, fock_wigner_table
from .gaussian import (
    ConditionalGaussian,
    GaussianState,
    conditional_gaussian,
    squeezing_frame,
)
from .phase_space import (
    ModeLayout,
    PhaseGrid,
    WignerField,
    integrate,
    marginal,
    min_value,
    sample_field,
    symplectic_form,
)

__all__ = [
    "POSITIVITY_FLOOR",
    "PROBABILITY_FLOOR",
    "ConditioningError",
    "HeraldImpossibleError",
    "GridJoint",
    "FockConditional",
    "GridConditional",
    "WitnessOperator",
    "fock_projector",
    "displaced_number",
    "WitnessFamily",
    "PhysicalityCertificate",
    "RemoteState",
    "alice_peak",
    "conditional_wigner",
    "conditional_moments",
    "witness_expectation",
    "witness_expectation_bounded",
    "witness_family",
    "certify_unphysical",
    "conditional_quasi_probability",
    "outcome_probability",
    "remote_conditioned_state",
    "negativity_summary",
    "joint_on_product",
    "default_grid",
]

POSITIVITY_FLOOR = 1e-12
PROBABILITY_FLOOR = 1e-10


class ConditioningError(ValueError):
    """Alice's marginal is too small at the requested conditioning point."""


class HeraldImpossibleError(ValueError):
    """The heralding outcome has (numerically) zero probability."""


@dataclass(frozen=True)
class GridJoint:
    """A joint Wigner function known only on a grid over all ``2m`` axes.

    Conditioning points and Bob grids are taken from ``field.grid``.
    """

    field: WignerField
    layout: ModeLayout = ModeLayout()

    def __post_init__(self):
        if self.field.grid.dim != self.layout.dim:
            raise ValueError("field dimension does not match the mode layout")

    @property
    def alice_axes(self) -> list:
        return list(range(self.layout.alice_dim))

    @property
    def bob_axes(self) -> list:
        return list(range(self.layout.alice_dim, self.layout.dim))

    def alice_field(self) -> WignerField:
        return marginal(self.field, self.alice_axes)

    def bob_field(self) -> WignerField:
        return marginal(self.field, self.bob_axes)

    def _alice_index(self, xa) -> tuple:
        g = self.field.grid
        xa = np.asarray(xa, dtype=float).reshape(-1)
        return tuple(int(np.argmin(np.abs(g.axis(i) - xa[i]))) for i in self.alice_axes)

    def alice_wigner(self, xa) -> np.ndarray:
        xa = np.asarray(xa, dtype=float)
        af = self.alice_field()
        flat = xa.reshape(-1, self.layout.alice_dim)
        out = np.array([af.values[self._alice_index(p)] for p in flat])
        return out.reshape(xa.shape[:-1])

    def max_std(self) -> float:
        return self.field.grid.half_width / 6.0


JointState = Union[GaussianState, FockMixtureState, GridJoint]


def _layout(joint) -> ModeLayout:
    if isinstance(joint, FockMixtureState):
        return ModeLayout(1, 1)
    return joint.layout


def default_grid(dim: int, max_std: float, n: int = None, center=None, half_width: float = None) -> PhaseGrid:
    """Grid with ``L = 6 * max_std`` and ``N = 128`` (48 above two axes)."""
    if n is None:
        n = 128 if dim <= 2 else 48
    if half_width is None:
        half_width = 6.0 * max_std
    return PhaseGrid(float(half_width), int(n), dim, center)


# --- conditional objects -------------------------------------------------


@dataclass(frozen=True)
class FockConditional:
    """``sum_n w_n W_n(x_B)`` with signed weights ``w_n = p_n W_n(x_A) / W_A(x_A)``."""

    weights: np.ndarray
    x_a: np.ndarray
    error_bound: float = 0.0

    @property
    def n_modes(self) -> int:
        return 1

    @property
    def mean(self) -> np.ndarray:
        return np.zeros(2)

    def __call__(self, xb) -> np.ndarray:
        return np.tensordot(self.weights, fock_wigner_table(self.weights.size - 1, xb), axes=1)

    def max_std(self) -> float:
        n = np.arange(self.weights.size)
        return float(np.sqrt(max(1.0, np.sum(np.abs(self.weights) * (2 * n + 1)))))


@dataclass(frozen=True)
class GridConditional:
    """Conditional Wigner function sampled on Bob's grid."""

    field: WignerField
    x_a: np.ndarray

    @property
    def n_modes(self) -> int:
        return self.field.n_modes

    @property
    def mean(self) -> np.ndarray:
        return conditional_moments(self)[0]

    def max_std(self) -> float:
        return self.field.grid.half_width / 6.0


Conditional = Union[ConditionalGaussian, FockConditional, GridConditional]


def alice_peak(joint) -> float:
    """Maximum of Alice's reduced Wigner function."""
    if isinstance(joint, GaussianState):
        return float(joint.alice_wigner(joint.mean_a))
    if isinstance(joint, FockMixtureState):
        r = np.linspace(0.0, 4.0 * joint.max_std() + 4.0, 801)
        pts = np.stack([r, np.zeros_like(r)], axis=-1)
        return float(np.max(joint.alice_wigner(pts)))
    return float(np.max(joint.alice_field().values))


def _check_support(joint, x_a, peak: float = None) -> float:
    wa = float(joint.alice_wigner(np.asarray(x_a, dtype=float)))
    if peak is None:
        peak = alice_peak(joint)
    if not wa > POSITIVITY_FLOOR * peak:
        raise ConditioningError(f"Alice's marginal {wa:.3e} is below the positivity floor at {x_a}")
    return wa


def conditional_wigner(joint: JointState, x_a, peak: float = None) -> Conditional:
    """Conditional Wigner function ``W(x_A (+) x_B) / W_A(x_A)`` of Bob.

    Gaussian joints give a :class:`ConditionalGaussian`, Fock mixtures a
    :class:`FockConditional` and grid joints a :class:`GridConditional`.
    """
    x_a = np.asarray(x_a, dtype=float).reshape(-1)
    layout = _layout(joint)
    if x_a.shape != (layout.alice_dim,):
        raise ValueError("conditioning point has the wrong dimension")
    wa = _check_support(joint, x_a, peak)
    if isinstance(joint, GaussianState):
        return conditional_gaussian(joint, x_a)
    if isinstance(joint, FockMixtureState):
        table = fock_wigner_table(joint.cutoff, x_a)
        weights = joint.weights * table / wa
        # |W_n| <= 1/(2 pi), so the truncated tail moves each weight by at most this
        bound = joint.tail_mass / (2.0 * np.pi * wa)
        return FockConditional(weights, x_a, bound)
    idx = joint._alice_index(x_a)
    vals = joint.field.values[idx] / wa
    grid_b = joint.field.grid.sub(joint.bob_axes)
    snapped = np.array([joint.field.grid.axis(i)[k] for i, k in zip(joint.alice_axes, idx)])
    return GridConditional(WignerField(grid_b, vals, layout.n_bob_modes), snapped)


def conditional_moments(cond: Conditional) -> tuple:
    """Mean and covariance of a conditional Wigner function.

    The "covariance" is ``E[x x^T] - mean mean^T`` under the quasi-distribution
    and may fail to be positive for Fock conditionals.
    """
    if isinstance(cond, ConditionalGaussian):
        return cond.mean, cond.covariance
    if isinstance(cond, FockConditional):
        n = np.arange(cond.weights.size)
        var = float(np.sum(cond.weights * (2 * n + 1)))
        return np.zeros(2), var * np.eye(2)
    g = cond.field.grid
    pts = g.points().reshape(-1, g.dim)
    w = cond.field.values.reshape(-1) * g.cell_volume
    norm = w.sum()
    mean = pts.T @ w / norm
    d = pts - mean
    cov = (d.T * w) @ d / norm
    return mean, 0.5 * (cov + cov.T)


# --- witnesses -----------------------------------------------------------


@dataclass(frozen=True)
class WitnessOperator:
    """Positive semi-definite test operator on Bob's modes.

    ``kind == "fock"``: ``D(d) |m><m| D(d)^dag`` on a single mode.
    ``kind == "number"``: ``D(d) U_S n(f) U_S^dag D(d)^dag`` where ``n(f)`` is
    the number operator of the mode along unit axis ``f`` and ``U_S``
    implements the symplectic matrix ``S`` (identity unless squeezed).
    """

    kind: str
    displacement: np.ndarray
    m: int = None
    f: np.ndarray = None
    symplectic: np.ndarray = None

    @property
    def n_modes(self) -> int:
        return self.displacement.size // 2

    def __call__(self, xb) -> np.ndarray:
        y = np.asarray(xb, dtype=float) - self.displacement
        if self.kind == "fock":
            return fock_wigner_table(self.m, y)[self.m]
        if self.symplectic is not None:
            y = np.linalg.solve(self.symplectic, y.reshape(-1, y.shape[-1]).T).T.reshape(y.shape)
        omega = symplectic_form(self.n_modes)
        q = y @ self.f
        p = y @ (self.f @ omega)
        return (q * q + p * p - 2.0) / (4.0 * (4.0 * np.pi) ** self.n_modes)

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "displacement": self.displacement.tolist()}
        if self.kind == "fock":
            out["m"] = int(self.m)
        else:
            out["f"] = self.f.tolist()
            out["symplectic"] = None if self.symplectic is None else self.symplectic.tolist()
        return out

    def label(self) -> str:
        if self.kind == "fock":
            return f"fock(m={self.m})"
        return "squeezed-number" if self.symplectic is not None else "number"


def fock_projector(m: int, displacement=None) -> WitnessOperator:
    d = np.zeros(2) if displacement is None else np.asarray(displacement, dtype=float).reshape(2)
    if m < 0:
        raise ValueError("photon number must be nonnegative")
    return WitnessOperator("fock", d, m=int(m))


def displaced_number(f, displacement=None, symplectic=None) -> WitnessOperator:
    f = np.asarray(f, dtype=float).reshape(-1)
    norm = np.linalg.norm(f)
    if norm == 0:
        raise ValueError("witness axis must be nonzero")
    d = np.zeros_like(f) if displacement is None else np.asarray(displacement, dtype=float).reshape(-1)
    s = None if symplectic is None else np.asarray(symplectic, dtype=float)
    return WitnessOperator("number", d, f=f / norm, symplectic=s)


def _number_expectation(mean, cov, w: WitnessOperator) -> float:
    mu = np.asarray(mean, dtype=float) - w.displacement
    cov = np.asarray(cov, dtype=float)
    if w.symplectic is not None:
        sinv = np.linalg.inv(w.symplectic)
        mu = sinv @ mu
        cov = sinv @ cov @ sinv.T
    omega = symplectic_form(w.n_modes)
    f, g = w.f, w.f @ omega
    second = f @ cov @ f + g @ cov @ g + (f @ mu) ** 2 + (g @ mu) ** 2
    return float(0.25 * (second - 2.0))


def _bob_grid(cond: Conditional, witness: WitnessOperator, n: int, half_width: float = None) -> PhaseGrid:
    center = np.asarray(cond.mean, dtype=float)
    if half_width is None:
        # exp(-L^2 / 2 sigma^2) < 1e-17 at L = 9 sigma; offset witnesses need the gap too
        offset = float(np.max(np.abs(witness.displacement - center)))
        half_width = max(8.0, 9.0 * cond.max_std() + offset)
    return PhaseGrid(half_width, n, 2 * cond.n_modes, tuple(center))


def _ring(values: np.ndarray) -> float:
    """Sum of |values| over the outermost layer of grid cells."""
    mask = np.ones(values.shape, dtype=bool)
    mask[(slice(1, -1),) * values.ndim] = False
    return float(np.sum(np.abs(values[mask])))


def _quadrature(cond: Conditional, witness: WitnessOperator, n: int, half_width: float = None) -> tuple:
    """``(value, boundary)`` where ``boundary`` is the outer-ring contribution."""
    scale = (4 * np.pi) ** cond.n_modes
    if isinstance(cond, GridConditional):
        g = cond.field.grid
        if n != g.n:
            # even-index nodes form a midpoint grid of step 2h shifted by -h/2
            h = g.step
            g = PhaseGrid(g.half_width, g.n // 2, g.dim, tuple(c - h / 2 for c in g.center))
            vals = cond.field.values[(slice(0, None, 2),) * g.dim]
        else:
            vals = cond.field.values
        prod = sample_field(witness, g, cond.n_modes).values * vals
    else:
        g = _bob_grid(cond, witness, n, half_width)
        prod = sample_field(lambda x: witness(x) * cond(x), g, cond.n_modes).values
    return float(scale * np.sum(prod) * g.cell_volume), scale * _ring(prod) * g.cell_volume


def witness_expectation_bounded(cond: Conditional, witness: WitnessOperator, n: int = 128,
                                half_width: float = None) -> tuple:
    """``(value, error_bound)`` for ``(4 pi)^l' * integral(W_P * W_cond)``.

    Closed forms are used where available: number witnesses need only the
    conditional moments, Fock projectors on a Fock conditional pick out one
    signed weight.  Otherwise midpoint quadrature on Bob's grid, with error
    bound ten times the change between ``N`` and ``N/2`` grids plus the
    integrand's outer-ring contribution (a truncation indicator).
    """
    if witness.n_modes != cond.n_modes:
        raise ValueError("witness and conditional act on different mode counts")
    if witness.kind == "number" and not isinstance(cond, GridConditional):
        mean, cov = conditional_moments(cond)
        bound = getattr(cond, "error_bound", 0.0)
        if bound:
            n_max = cond.weights.size
            bound *= 0.25 * (2 * n_max + 2 + float(np.sum(witness.displacement**2)))
        return _number_expectation(mean, cov, witness), bound
    if witness.kind == "fock" and isinstance(cond, FockConditional) and not np.any(witness.displacement):
        if witness.m < cond.weights.size:
            return float(cond.weights[witness.m]), cond.error_bound
        return 0.0, cond.error_bound
    if isinstance(cond, GridConditional):
        n = cond.field.grid.n
    fine, edge = _quadrature(cond, witness, n, half_width)
    coarse, _ = _quadrature(cond, witness, n // 2, half_width)
    return fine, 10.0 * (abs(fine - coarse) + edge)


def witness_expectation(cond: Conditional, witness: WitnessOperator, **kwargs) -> float:
    """``(4 pi)^l' * integral(W_P(x_B) W(x_B | x_A) dx_B)``."""
    return witness_expectation_bounded(cond, witness, **kwargs)[0]


# --- certification -------------------------------------------------------


@dataclass(frozen=True)
class WitnessFamily:
    """Finite witness family searched by :func:`certify_unphysical`.

    Fock projectors ``m <= max_fock`` at displacement zero and at the
    conditional mean, number operators along the eigen-axes of the
    conditional covariance at the conditional mean, and (single-mode Bob,
    positive-definite covariance) the squeezed number operator diagonalizing
    that covariance.
    """

    max_fock: int = 30
    displacements: tuple = ("zero", "mean")
    number_axes: bool = True
    squeezed: bool = True
    grid_n: int = 128
    grid_half_width: Optional[float] = None
    atol: float = 1e-12

    def to_dict(self) -> dict:
        return {
            "max_fock": self.max_fock,
            "displacements": list(self.displacements),
            "number_axes": self.number_axes,
            "squeezed": self.squeezed,
            "grid_n": self.grid_n,
            "grid_half_width": self.grid_half_width,
            "atol": self.atol,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "WitnessFamily":
        data = dict(data)
        if "displacements" in data:
            data["displacements"] = tuple(data["displacements"])
        return cls(**data)


@dataclass(frozen=True)
class PhysicalityCertificate:
    """A witness with robustly negative expectation at ``x_a``."""

    x_a: np.ndarray
    witness: WitnessOperator
    value: float
    error_bound: float

    def __post_init__(self):
        if not self.value + self.error_bound < 0:
            raise ValueError("certificate value is not robustly negative")

    def to_dict(self) -> dict:
        return {
            "x_a": np.asarray(self.x_a).tolist(),
            "witness": self.witness.to_dict(),
            "label": self.witness.label(),
            "value": self.value,
            "error_bound": self.error_bound,
        }


def witness_family(cond: Conditional, family: WitnessFamily = WitnessFamily()) -> list:
    """Enumerate the witnesses of ``family`` adapted to ``cond``."""
    mean, cov = conditional_moments(cond)
    out = []
    if cond.n_modes == 1:
        disps = []
        for d in family.displacements:
            vec = np.zeros(2) if d == "zero" else np.asarray(mean, dtype=float)
            if not any(np.allclose(vec, e, rtol=0, atol=1e-12) for e in disps):
                disps.append(vec)
        for vec in disps:
            out.extend(fock_projector(m, vec) for m in range(family.max_fock + 1))
    if family.number_axes:
        omega = symplectic_form(cond.n_modes)
        _, vecs = np.linalg.eigh(cov + omega.T @ cov @ omega)
        for k in range(vecs.shape[1]):
            out.append(displaced_number(vecs[:, k], mean))
    if family.squeezed and cond.n_modes == 1 and np.linalg.eigvalsh(cov)[0] > 0:
        s, _ = squeezing_frame(cov)
        out.append(displaced_number(np.array([1.0, 0.0]), mean, s))
    return out


def certify_unphysical(joint: JointState, x_a, family: WitnessFamily = WitnessFamily()):
    """Search ``family`` for a witness proving the conditional is unphysical.

    Returns the most negative robust :class:`PhysicalityCertificate`, or
    ``None`` when no violation is found; ``None`` does not prove physicality.
    """
    cond = conditional_wigner(joint, x_a)
    best = None
    for w in witness_family(cond, family):
        if isinstance(cond, FockConditional) and w.kind == "fock" and w.m >= cond.weights.size:
            continue
        value, bound = witness_expectation_bounded(cond, w, n=family.grid_n,
                                                   half_width=family.grid_half_width)
        if value + bound < -family.atol and (best is None or value < best.value):
            best = PhysicalityCertificate(np.asarray(cond.x_a, dtype=float), w, value, bound)
    return best


def conditional_quasi_probability(joint: JointState, witness: WitnessOperator, x_a, **kwargs) -> float:
    """Expectation of Bob's outcome operator under the conditional Wigner function."""
    return witness_expectation(conditional_wigner(joint, x_a), witness, **kwargs)


# --- remote heralding ----------------------------------------------------


def joint_on_product(joint: JointState, xa_pts: np.ndarray, xb_pts: np.ndarray,
                     chunk: int = 1 << 21) -> np.ndarray:
    """Matrix ``J[i, j] = W(xa_pts[i] (+) xb_pts[j])``."""
    xa_pts = np.asarray(xa_pts, dtype=float)
    xb_pts = np.asarray(xb_pts, dtype=float)
    if isinstance(joint, FockMixtureState):
        ta = fock_wigner_table(joint.cutoff, xa_pts)
        tb = fock_wigner_table(joint.cutoff, xb_pts)
        return (ta.T * joint.weights) @ tb
    if isinstance(joint, GridJoint):
        raise TypeError("grid joints are already sampled; use their field")
    na, nb = len(xa_pts), len(xb_pts)
    out = np.empty((na, nb))
    rows = max(1, chunk // nb)
    for i in range(0, na, rows):
        a = xa_pts[i : i + rows]
        pts = np.concatenate(
            [np.repeat(a[:, None, :], nb, axis=1), np.broadcast_to(xb_pts[None], (len(a), nb, xb_pts.shape[1]))],
            axis=-1,
        )
        out[i : i + rows] = joint(pts)
    return out


@dataclass(frozen=True)
class RemoteState:
    """Alice's Wigner function after heralding on Bob's outcome operator."""

    field: WignerField
    success_probability: float
    witness: WitnessOperator = None
    method: str = "grid"


def outcome_probability(joint: JointState, witness: WitnessOperator, grid_b: PhaseGrid = None) -> float:
    """``<P_b> = (4 pi)^l' * integral(W_P * W_B)`` on Bob's reduced state."""
    layout = _layout(joint)
    if isinstance(joint, FockMixtureState) and witness.kind == "fock" and not np.any(witness.displacement):
        return float(joint.weights[witness.m]) if witness.m <= joint.cutoff else 0.0
    if isinstance(joint, GaussianState) and witness.kind == "number":
        return _number_expectation(joint.mean_b, joint.cov_b, witness)
    if isinstance(joint, GridJoint):
        bf = joint.bob_field()
        wf = sample_field(witness, bf.grid, layout.n_bob_modes)
        return float((4 * np.pi) ** layout.n_bob_modes * np.sum(wf.values * bf.values) * bf.grid.cell_volume)
    if grid_b is None:
        grid_b = default_grid(layout.bob_dim, max(joint.max_std(), 8.0 / 6.0), n=128)
    prod = sample_field(lambda x: witness(x) * joint.bob_wigner(x), grid_b, layout.n_bob_modes)
    return float((4 * np.pi) ** layout.n_bob_modes * integrate(prod))


def remote_conditioned_state(joint: JointState, witness: WitnessOperator, grid_a: PhaseGrid = None,
                             grid_b: PhaseGrid = None, method: str = "grid") -> RemoteState:
    """Heralded Alice state ``W_{A|b} = <P_b>_{B|x_A} W_A / <P_b>``.

    ``method="grid"`` integrates the joint Wigner function over Bob's grid
    for every Alice grid point; ``method="conditional"`` goes through
    :func:`conditional_quasi_probability` at each Alice point (closed forms
    where available).
    """
    layout = _layout(joint)
    if isinstance(joint, GridJoint):
        grid_a = joint.field.grid.sub(joint.alice_axes)
        grid_b = joint.field.grid.sub(joint.bob_axes)
    if grid_a is None:
        grid_a = default_grid(layout.alice_dim, joint.max_std(), n=64)
    if grid_b is None:
        # 8 sigma: number witnesses weight the tails quadratically
        offset = float(np.max(np.abs(witness.displacement)))
        grid_b = default_grid(layout.bob_dim, 1.0, n=96, half_width=8.0 * max(joint.max_std(), 1.0) + offset)
    prob = outcome_probability(joint, witness, grid_b)
    if not abs(prob) > PROBABILITY_FLOOR or prob < 0:
        raise HeraldImpossibleError(f"outcome probability {prob:.3e} is below the floor")
    if method == "grid":
        wb = sample_field(witness, grid_b, layout.n_bob_modes).values.reshape(-1)
        scale = (4 * np.pi) ** layout.n_bob_modes * grid_b.cell_volume
        if isinstance(joint, GridJoint):
            j = joint.field.values.reshape(grid_a.n**grid_a.dim, -1)
            vals = scale * (j @ wb)
        else:
            xa = grid_a.points().reshape(-1, grid_a.dim)
            xb = grid_b.points().reshape(-1, grid_b.dim)
            vals = np.empty(len(xa))
            rows = 512
            for i in range(0, len(xa), rows):
                vals[i : i + rows] = scale * (joint_on_product(joint, xa[i : i + rows], xb) @ wb)
        vals = vals / prob
    elif method == "conditional":
        xa = grid_a.points().reshape(-1, grid_a.dim)
        wa = joint.alice_wigner(xa)
        floor = POSITIVITY_FLOOR * alice_peak(joint)
        vals = np.zeros(len(xa))
        for i, p in enumerate(xa):
            if wa[i] > floor:
                vals[i] = conditional_quasi_probability(joint, witness, p) * wa[i]
        vals = vals / prob
    else:
        raise ValueError(f"unknown method {method!r}")
    return RemoteState(WignerField(grid_a, vals.reshape(grid_a.shape), layout.n_alice_modes), prob, witness, method)


def negativity_summary(field: WignerField) -> dict:
    """Minimum, its location and the negative volume ``integral(max(0, -W))``."""
    vmin, loc = min_value(field)
    neg = float(np.sum(np.clip(-field.values, 0.0, None)) * field.grid.cell_volume)
    return {"min_value": vmin, "min_location": loc.tolist(), "negative_volume": neg}
