"""Homodyne steering (Reid), the conditional-variance chain and LHS checks.

Homodyne statistics are computed on a 4D grid expressed in rotated
coordinates ``(q_A, p_A, q_B, p_B)`` with ``x_A = q_A g + p_A Omega^T g`` and
``x_B = q_B f + p_B Omega^T f``.  Conditioning on ``q_A`` uses the grid
column at the nearest node instead of a delta function.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .conditional import (
    POSITIVITY_FLOOR,
    GridJoint,
    _layout,
    alice_peak,
    conditional_wigner,
    joint_on_product,
)
from .measurements import PovmFamily
from .phase_space import PhaseGrid, symplectic_form

__all__ = [
    "CHAIN_TOL",
    "REID_TOL",
    "QuadratureAxis",
    "HomodyneGrid",
    "ChainReport",
    "ChainViolation",
    "homodyne_grid",
    "conditional_probability",
    "conditional_variance",
    "reid_product",
    "avg_conditional_wigner_variance",
    "verify_variance_chain",
    "build_assemblage",
    "lhs_assemblage",
    "lhs_reconstruction_check",
]

CHAIN_TOL = 1e-4
REID_TOL = 1e-9
TAIL_FLOOR = 1e-10


class ChainViolation(AssertionError):
    """The homodyne conditional variance fell below the averaged conditional-Wigner variance."""


@dataclass(frozen=True)
class QuadratureAxis:
    """Unit axis ``direction`` in one party's single-mode phase space."""

    direction: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.direction, dtype=float).reshape(2)
        n = np.linalg.norm(d)
        if n == 0:
            raise ValueError("axis must be nonzero")
        object.__setattr__(self, "direction", d / n)

    @property
    def complementary(self) -> np.ndarray:
        """``Omega^T`` applied to the axis; the ``p`` direction paired with it."""
        return symplectic_form(1).T @ self.direction

    @property
    def frame(self) -> np.ndarray:
        return np.column_stack([self.direction, self.complementary])


def _axis(a) -> QuadratureAxis:
    if a is None:
        return QuadratureAxis(np.array([1.0, 0.0]))
    return a if isinstance(a, QuadratureAxis) else QuadratureAxis(a)


@dataclass(frozen=True)
class HomodyneGrid:
    """Joint Wigner function on a rotated 4D grid, axes ``(q_A, p_A, q_B, p_B)``."""

    values: np.ndarray
    axis_a: np.ndarray
    axis_b: np.ndarray
    step_a: float
    step_b: float

    @property
    def alice(self) -> np.ndarray:
        return self.values.sum(axis=(2, 3)) * self.step_b**2

    def pair_marginal(self, which: str) -> np.ndarray:
        """``P(q_A, q_B)`` or ``P(p_A, p_B)``."""
        if which == "q":
            return self.values.sum(axis=(1, 3)) * self.step_a * self.step_b
        if which == "p":
            return self.values.sum(axis=(0, 2)) * self.step_a * self.step_b
        raise ValueError("which must be 'q' or 'p'")


def homodyne_grid(joint, g=None, f=None, n: int = 48, half_width: float = None) -> HomodyneGrid:
    """Sample ``joint`` on the rotated grid defined by Alice's axis ``g`` and Bob's ``f``."""
    layout = _layout(joint)
    if layout.n_alice_modes != 1 or layout.n_bob_modes != 1:
        raise ValueError("homodyne steering is implemented for one mode per party")
    g, f = _axis(g), _axis(f)
    if isinstance(joint, GridJoint):
        if not (np.allclose(g.direction, [1, 0]) and np.allclose(f.direction, [1, 0])):
            raise ValueError("grid joints only support the canonical q axes")
        grid = joint.field.grid
        ax = grid.axis(0)
        return HomodyneGrid(np.asarray(joint.field.values), ax, grid.axis(2), grid.step, grid.step)
    if half_width is None:
        # second moments need more tail than normalization does
        half_width = 8.0 * joint.max_std()
    grid = PhaseGrid(half_width, n, 2)
    u = grid.points().reshape(-1, 2)
    xa = u @ g.frame.T
    xb = u @ f.frame.T
    vals = joint_on_product(joint, xa, xb).reshape((n,) * 4)
    return HomodyneGrid(vals, grid.axis(0), grid.axis(0), grid.step, grid.step)


def _hgrid(joint, g, f, hg, **kw) -> HomodyneGrid:
    return hg if hg is not None else homodyne_grid(joint, g, f, **kw)


def conditional_probability(joint, g=None, q_a: float = 0.0, f=None, which: str = "q",
                            hg: HomodyneGrid = None, **kw) -> tuple:
    """``(q_B values, P(q_B | q_A))`` at the grid column nearest ``q_a``."""
    hg = _hgrid(joint, g, f, hg, **kw)
    pm = hg.pair_marginal(which)
    k = int(np.argmin(np.abs(hg.axis_a - q_a)))
    col = pm[k]
    mass = col.sum() * hg.step_b
    if not mass > TAIL_FLOOR * pm.sum(axis=1).max() * hg.step_b:
        raise ValueError(f"conditioning slice at q_A={q_a} carries no probability")
    return hg.axis_b.copy(), col / mass


def _homodyne_variances(hg: HomodyneGrid, which: str) -> tuple:
    pm = hg.pair_marginal(which)
    pa = pm.sum(axis=1) * hg.step_b
    keep = pa > TAIL_FLOOR * pa.max()
    y = hg.axis_b
    m0 = pa[keep]
    m1 = pm[keep] @ y * hg.step_b
    m2 = pm[keep] @ (y * y) * hg.step_b
    var = m2 / m0 - (m1 / m0) ** 2
    total = float(np.sum(m0 * var) * hg.step_a)
    return total, float(pa[~keep].sum() * hg.step_a)


def conditional_variance(joint, g=None, f=None, which: str = "q", hg: HomodyneGrid = None, **kw) -> float:
    """``Var[q_B | q_A]`` averaged over Alice's homodyne outcomes.

    ``which="p"`` uses the complementary pair ``(p_A, p_B)``.
    """
    return _homodyne_variances(_hgrid(joint, g, f, hg, **kw), which)[0]


def reid_product(joint, g=None, f=None, hg: HomodyneGrid = None, tol: float = REID_TOL, **kw) -> tuple:
    """``(Var[q_B|q_A] * Var[p_B|p_A], steering_flag)``."""
    hg = _hgrid(joint, g, f, hg, **kw)
    prod = conditional_variance(joint, hg=hg, which="q") * conditional_variance(joint, hg=hg, which="p")
    return prod, bool(prod < 1.0 - tol)


def _wigner_variances(hg: HomodyneGrid) -> tuple:
    """Per-``x_A`` variances of the conditional Wigner function along q_B and p_B."""
    wa = hg.alice
    keep = wa > POSITIVITY_FLOOR * wa.max()
    y = hg.axis_b
    h2 = hg.step_b**2
    mq1 = np.einsum("abij,i->ab", hg.values, y) * h2
    mq2 = np.einsum("abij,i->ab", hg.values, y * y) * h2
    mp1 = np.einsum("abij,j->ab", hg.values, y) * h2
    mp2 = np.einsum("abij,j->ab", hg.values, y * y) * h2
    with np.errstate(divide="ignore", invalid="ignore"):
        vq = np.where(keep, mq2 / wa - (mq1 / wa) ** 2, np.nan)
        vp = np.where(keep, mp2 / wa - (mp1 / wa) ** 2, np.nan)
    return wa, keep, vq, vp


def avg_conditional_wigner_variance(joint, f=None, which: str = "q", g=None,
                                    hg: HomodyneGrid = None, **kw) -> float:
    """``integral W_A(x_A) Var[q_B | x_A] dx_A`` for the conditional Wigner function."""
    hg = _hgrid(joint, g, f, hg, **kw)
    wa, keep, vq, vp = _wigner_variances(hg)
    v = vq if which == "q" else vp
    return float(np.sum(wa[keep] * v[keep]) * hg.step_a**2)


@dataclass(frozen=True)
class ChainReport:
    var_q_cond: float
    var_p_cond: float
    var_c_q: float
    var_c_p: float
    witness_point: list = None
    witness_product: float = None

    @property
    def product(self) -> float:
        return self.var_q_cond * self.var_p_cond

    @property
    def flag(self) -> bool:
        return self.product < 1.0 - REID_TOL

    def to_dict(self) -> dict:
        return {
            "var_q_cond": self.var_q_cond,
            "var_p_cond": self.var_p_cond,
            "product": self.product,
            "flag": self.flag,
            "var_c_q": self.var_c_q,
            "var_c_p": self.var_c_p,
            "witness_point": self.witness_point,
            "witness_product": self.witness_product,
        }


def verify_variance_chain(joint, g=None, f=None, tol: float = CHAIN_TOL, hg: HomodyneGrid = None, **kw) -> ChainReport:
    """Check ``Var[q_B|q_A] >= Var_c[q_B]`` (and for p) and, when
    ``Var_c[q] Var_c[p] < 1``, locate an ``x_A`` whose conditional Wigner
    function has variance product below one.

    Raises :class:`ChainViolation` if either inequality fails beyond ``tol``.
    """
    hg = _hgrid(joint, g, f, hg, **kw)
    vq = conditional_variance(joint, hg=hg, which="q")
    vp = conditional_variance(joint, hg=hg, which="p")
    wa, keep, wq, wp = _wigner_variances(hg)
    h2 = hg.step_a**2
    cq = float(np.sum(wa[keep] * wq[keep]) * h2)
    cp = float(np.sum(wa[keep] * wp[keep]) * h2)
    if vq < cq - tol or vp < cp - tol:
        raise ChainViolation(f"chain broken: Var[q|q]={vq:.6g} Var_c[q]={cq:.6g}, Var[p|p]={vp:.6g} Var_c[p]={cp:.6g}")
    point, best = None, None
    if cq * cp < 1.0 - REID_TOL:
        prod = np.where(keep, wq * wp, np.inf)
        # most probable qualifying point; tails carry rounding noise
        ok = prod < 1.0 - REID_TOL
        if np.any(ok):
            k = np.unravel_index(int(np.argmax(np.where(ok, wa, -np.inf))), prod.shape)
            # rotated (q_A, p_A) back to Alice's phase-space coordinates
            u = np.array([hg.axis_a[k[0]], hg.axis_a[k[1]]])
            frame = _axis(g).frame if not isinstance(joint, GridJoint) else np.eye(2)
            point, best = (frame @ u).tolist(), float(prod[k])
    return ChainReport(vq, vp, cq, cp, point, best)


def _alice_points(grid_a: PhaseGrid) -> np.ndarray:
    return grid_a.points().reshape(-1, grid_a.dim)


def _check_positive(family: PovmFamily, outcomes, xa) -> None:
    if not family.positive:
        raise ValueError("measurement family is not Wigner-positive")
    for k in outcomes:
        if not np.all(family.element_wigner(k, xa) > 0):
            raise ValueError(f"outcome {k} has a non-positive Wigner value on the grid")


def build_assemblage(joint, family: PovmFamily, outcomes, grid_a: PhaseGrid, grid_b: PhaseGrid) -> np.ndarray:
    """``W_B^a(x_B) = (4 pi)^l integral W_a(x_A) W(x_A (+) x_B) dx_A``.

    Returns an array of shape ``(len(outcomes),) + grid_b.shape``.
    """
    layout = _layout(joint)
    if family.n_modes != layout.n_alice_modes or grid_a.dim != layout.alice_dim or grid_b.dim != layout.bob_dim:
        raise ValueError("grids or measurement do not match the mode layout")
    xa = _alice_points(grid_a)
    xb = grid_b.points().reshape(-1, grid_b.dim)
    j = joint_on_product(joint, xa, xb)
    wa = np.stack([family.element_wigner(k, xa) for k in outcomes])
    out = (4 * np.pi) ** family.n_modes * grid_a.cell_volume * (wa @ j)
    return out.reshape((len(outcomes),) + grid_b.shape)


def lhs_assemblage(joint, family: PovmFamily, outcomes, grid_a: PhaseGrid, grid_b: PhaseGrid) -> np.ndarray:
    """Assemblage rebuilt from the hidden-state form with ``lambda = x_A``:
    ``integral P(x_A) P(a | x_A) W(x_B | x_A) dx_A`` where
    ``P(a | x_A) = (4 pi)^l W_a(x_A)``."""
    layout = _layout(joint)
    xa = _alice_points(grid_a)
    xb = grid_b.points().reshape(-1, grid_b.dim)
    _check_positive(family, outcomes, xa)
    p_x = joint.alice_wigner(xa)
    peak = alice_peak(joint)
    keep = np.flatnonzero(p_x > POSITIVITY_FLOOR * peak)
    cond = np.empty((len(keep), len(xb)))
    for r, i in enumerate(keep):
        cond[r] = conditional_wigner(joint, xa[i], peak=peak)(xb)
    p_a = np.stack([(4 * np.pi) ** layout.n_alice_modes * family.element_wigner(k, xa[keep]) for k in outcomes])
    out = grid_a.cell_volume * ((p_a * p_x[keep]) @ cond)
    return out.reshape((len(outcomes),) + grid_b.shape)


def lhs_reconstruction_check(joint, family: PovmFamily, outcomes=None, grid_a: PhaseGrid = None,
                             grid_b: PhaseGrid = None) -> float:
    """Largest pointwise gap between the assemblage and its hidden-state rebuild.

    Only Wigner-positive families are accepted.
    """
    layout = _layout(joint)
    if outcomes is None:
        outcomes = np.linspace(0, len(family) - 1, 9).round().astype(int)
    if grid_a is None:
        grid_a = PhaseGrid(6.0 * joint.max_std(), 48, layout.alice_dim)
    if grid_b is None:
        grid_b = PhaseGrid(6.0 * joint.max_std(), 32, layout.bob_dim)
    direct = build_assemblage(joint, family, outcomes, grid_a, grid_b)
    rebuilt = lhs_assemblage(joint, family, outcomes, grid_a, grid_b)
    return float(np.max(np.abs(direct - rebuilt)))
