"""Phase-space geometry, uniform grids and midpoint quadrature.

Convention throughout the package: quadratures obey ``[q, p] = 2i`` so the
vacuum has unit variance and the Wigner function of the identity on ``m``
modes is ``1 / (4 pi)**m``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "ModeLayout",
    "PhaseGrid",
    "WignerField",
    "symplectic_form",
    "integrate",
    "pair",
    "marginal",
    "min_value",
    "sample_field",
    "default_half_width",
]


@dataclass(frozen=True)
class ModeLayout:
    """Split of the modes between Alice (first) and Bob (second)."""

    n_alice_modes: int = 1
    n_bob_modes: int = 1

    def __post_init__(self):
        if self.n_alice_modes < 1 or self.n_bob_modes < 1:
            raise ValueError("each party needs at least one mode")

    @property
    def n_modes(self) -> int:
        return self.n_alice_modes + self.n_bob_modes

    @property
    def alice_dim(self) -> int:
        return 2 * self.n_alice_modes

    @property
    def bob_dim(self) -> int:
        return 2 * self.n_bob_modes

    @property
    def dim(self) -> int:
        return 2 * self.n_modes

    def split(self, x):
        """Split ``x = x_A (+) x_B`` along the last axis."""
        x = np.asarray(x, dtype=float)
        return x[..., : self.alice_dim], x[..., self.alice_dim :]


def symplectic_form(m: int) -> np.ndarray:
    """Block-diagonal symplectic matrix with ``m`` blocks ``[[0, 1], [-1, 0]]``."""
    if int(m) != m or m < 1:
        raise ValueError(f"mode count must be a positive integer, got {m!r}")
    block = np.array([[0.0, 1.0], [-1.0, 0.0]])
    return np.kron(np.eye(int(m)), block)


def default_half_width(max_std: float, factor: float = 6.0) -> float:
    return factor * float(max_std)


@dataclass(frozen=True)
class PhaseGrid:
    """Uniform midpoint grid on the box ``center + [-L, L]**d``.

    Parameters
    ----------
    half_width : float
        Per-axis half-width ``L``.
    n : int
        Points per axis; even and at least 16.
    dim : int
        Number of phase-space axes covered (twice the number of modes).
    center : sequence of float, optional
        Box center, defaults to the origin.
    """

    half_width: float
    n: int
    dim: int = 2
    center: tuple = field(default=None)

    def __post_init__(self):
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")
        if self.n < 16 or self.n % 2:
            raise ValueError("points per axis must be an even integer >= 16")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        c = (0.0,) * self.dim if self.center is None else tuple(float(v) for v in self.center)
        if len(c) != self.dim:
            raise ValueError("center has wrong length")
        object.__setattr__(self, "center", c)

    @property
    def step(self) -> float:
        return 2.0 * self.half_width / self.n

    @property
    def cell_volume(self) -> float:
        return self.step**self.dim

    @property
    def shape(self) -> tuple:
        return (self.n,) * self.dim

    def axis(self, i: int) -> np.ndarray:
        h = self.step
        return self.center[i] - self.half_width + h * (np.arange(self.n) + 0.5)

    def axes(self) -> list:
        return [self.axis(i) for i in range(self.dim)]

    def points(self) -> np.ndarray:
        """All grid points, shape ``shape + (dim,)`` in C order."""
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack(mesh, axis=-1)

    def sub(self, axes: Sequence[int]) -> "PhaseGrid":
        return PhaseGrid(self.half_width, self.n, len(axes), tuple(self.center[i] for i in axes))

    def refine(self, factor: int = 2) -> "PhaseGrid":
        return PhaseGrid(self.half_width, self.n * factor, self.dim, self.center)

    def coarsen(self) -> "PhaseGrid":
        return PhaseGrid(self.half_width, self.n // 2, self.dim, self.center)

    def compatible(self, other: "PhaseGrid") -> bool:
        return (
            self.dim == other.dim
            and self.n == other.n
            and np.isclose(self.half_width, other.half_width, rtol=0, atol=1e-15)
            and np.allclose(self.center, other.center, rtol=0, atol=1e-15)
        )


@dataclass(frozen=True)
class WignerField:
    """Wigner function sampled at the midpoints of a :class:`PhaseGrid`.

    ``n_modes`` is the number of modes covered (``grid.dim / 2`` for whole
    modes); it fixes the ``(4 pi)**n`` factor used by :func:`pair`.
    """

    grid: PhaseGrid
    values: np.ndarray
    n_modes: int = None

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != self.grid.shape:
            vals = vals.reshape(self.grid.shape)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)
        if self.n_modes is None:
            object.__setattr__(self, "n_modes", self.grid.dim // 2)

    def __add__(self, other: "WignerField") -> "WignerField":
        _check_same(self, other)
        return WignerField(self.grid, self.values + other.values, self.n_modes)

    def __mul__(self, scale: float) -> "WignerField":
        return WignerField(self.grid, self.values * float(scale), self.n_modes)

    __rmul__ = __mul__


def sample_field(func, grid: PhaseGrid, n_modes: int = None, chunk: int = 1 << 20) -> WignerField:
    """Evaluate ``func(points)`` (points shaped ``(..., dim)``) on ``grid``."""
    axes = grid.axes()
    total = grid.n**grid.dim
    out = np.empty(total)
    for start in range(0, total, chunk):
        flat = np.arange(start, min(start + chunk, total))
        idx = np.unravel_index(flat, grid.shape)
        pts = np.stack([axes[i][idx[i]] for i in range(grid.dim)], axis=-1)
        out[start : start + len(flat)] = func(pts)
    return WignerField(grid, out.reshape(grid.shape), n_modes)


def _check_same(w1: WignerField, w2: WignerField) -> None:
    if not w1.grid.compatible(w2.grid) or w1.n_modes != w2.n_modes:
        raise ValueError("fields live on different grids or layouts")


def integrate(field: WignerField) -> float:
    """Midpoint-rule integral of a sampled field."""
    return float(np.sum(field.values) * field.grid.cell_volume)


def pair(w1: WignerField, w2: WignerField) -> float:
    """Trace pairing ``(4 pi)**n * integral(W1 * W2)``."""
    _check_same(w1, w2)
    return float((4.0 * np.pi) ** w1.n_modes * np.sum(w1.values * w2.values) * w1.grid.cell_volume)


def marginal(field: WignerField, keep: Sequence[int]) -> WignerField:
    """Integrate out every axis not listed in ``keep``."""
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise ValueError("at least one axis must be kept")
    if keep[0] < 0 or keep[-1] >= field.grid.dim:
        raise ValueError("axis out of range")
    drop = tuple(i for i in range(field.grid.dim) if i not in keep)
    if not drop:
        return field
    vals = np.sum(field.values, axis=drop) * field.grid.step ** len(drop)
    return WignerField(field.grid.sub(keep), vals, len(keep) // 2)


def min_value(field: WignerField) -> tuple:
    """Smallest sampled value and the grid point where it occurs.

    Ties resolve to the first point in C order.
    """
    idx = int(np.argmin(field.values))
    multi = np.unravel_index(idx, field.grid.shape)
    point = np.array([field.grid.axis(i)[k] for i, k in enumerate(multi)])
    return float(field.values.flat[idx]), point
