"""Flat torus model of an embedding Y = T^d in M = T^n.

Coordinates on M are split as x = (x', x'') with x' in [0, 2pi)^d and
x'' in [0, 2pi)^nu; the submanifold is the slice x'' = 0.  Grid functions
on M are flattened in C order over the axes (x'_1, ..., x'_d, x''_1, ...,
x''_nu); grid functions on Y are flattened over (x'_1, ..., x'_d).

Frequencies live on the integer dual lattice {-N/2, ..., N/2 - 1} per axis
and are always stored in increasing ("centered") order.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DimensionError

TWO_PI = 2.0 * np.pi

#: inner and outer radius of the default cutoff
CUTOFF_R1 = np.pi / 4
CUTOFF_R2 = np.pi / 2


@dataclass(frozen=True)
class TorusEmbedding:
    """The slice ``x'' = 0`` of ``T^n`` together with a uniform grid.

    Parameters
    ----------
    n : int
        Ambient dimension.
    d : int
        Dimension of the submanifold, ``1 <= d < n``.
    N : int
        Grid points per axis (even).
    """

    n: int
    d: int
    N: int

    def __post_init__(self):
        if not (1 <= self.d < self.n):
            raise DimensionError(f"need 1 <= d < n, got d={self.d}, n={self.n}")
        if self.N <= 0 or self.N % 2:
            raise DimensionError(f"N must be a positive even integer, got {self.N}")

    @property
    def nu(self) -> int:
        return self.n - self.d

    @property
    def h(self) -> float:
        """Grid spacing per axis."""
        return TWO_PI / self.N

    @property
    def m_size(self) -> int:
        return self.N ** self.n

    @property
    def y_size(self) -> int:
        return self.N ** self.d

    def weight(self, space: str) -> float:
        """Quadrature weight ``h**dim`` of the ``"M"`` or ``"Y"`` grid."""
        return self.h ** self._dim(space)

    def size(self, space: str) -> int:
        return self.N ** self._dim(space)

    def _dim(self, space: str) -> int:
        if space == "M":
            return self.n
        if space == "Y":
            return self.d
        raise ValueError(f"unknown space tag {space!r}")

    @cached_property
    def axis(self) -> np.ndarray:
        """Lattice points ``2 pi k / N`` of one axis."""
        return TWO_PI * np.arange(self.N) / self.N

    @cached_property
    def freqs(self) -> np.ndarray:
        """Integer dual lattice of one axis, centered order."""
        return np.arange(-self.N // 2, self.N // 2)

    def grid(self, space: str) -> np.ndarray:
        """Grid points, shape ``(N**dim, dim)``, flattened in C order."""
        dim = self._dim(space)
        mesh = np.meshgrid(*([self.axis] * dim), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def dual(self, dim: int) -> np.ndarray:
        """Dual lattice of dimension ``dim``, shape ``(N**dim, dim)``."""
        mesh = np.meshgrid(*([self.freqs] * dim), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1).astype(float)

    def slice_indices(self) -> np.ndarray:
        """Flat M-grid indices of the points with ``x'' = 0``, ordered by x'."""
        return np.arange(self.y_size) * self.N ** self.nu

    def zeros(self, space: str) -> "GridFunction":
        return GridFunction(space, np.zeros(self.size(space), dtype=complex))


@dataclass(frozen=True)
class GridFunction:
    """Complex samples of a function on the M- or Y-grid."""

    space: str
    values: np.ndarray

    def check(self, emb: TorusEmbedding) -> "GridFunction":
        if self.values.shape != (emb.size(self.space),):
            raise DimensionError(
                f"{self.space}-grid function needs {emb.size(self.space)} values, "
                f"got shape {self.values.shape}"
            )
        return self


def riemann_weyl(x, xi):
    """Flat Riemann-Weyl fibration ``(x, xi) -> (x, exp_x(-xi))``.

    On the torus the exponential map is translation, so the second
    component is ``(x - xi) mod 2 pi``.
    """
    x = np.asarray(x, dtype=float)
    xi = np.asarray(xi, dtype=float)
    y = np.mod(x - xi, TWO_PI)
    # mod of a tiny negative number rounds up to exactly 2 pi
    return x, np.where(y >= TWO_PI, 0.0, y)


def wrap(v):
    """Reduce displacements to the fundamental domain ``[-pi, pi)``."""
    return np.mod(np.asarray(v, dtype=float) + np.pi, TWO_PI) - np.pi


def smooth_step(t):
    """C-infinity step: 0 for t <= 0, 1 for t >= 1, built from ``exp(-1/t)``."""
    t = np.asarray(t, dtype=float)

    def f(s):
        out = np.zeros_like(s)
        pos = s > 0
        out[pos] = np.exp(-1.0 / s[pos])
        return out

    a = f(t)
    b = f(1.0 - t)
    return a / (a + b)


def cutoff_chi(v, r1: float = CUTOFF_R1, r2: float = CUTOFF_R2):
    """Radial cutoff in the displacement ``v`` (last axis = components).

    Equal to 1 for ``|v| <= r1``, 0 for ``|v| >= r2``; displacements are
    first reduced to ``[-pi, pi)``.
    """
    if not (0 < r1 < r2 < np.pi + 1e-15):
        raise ValueError("cutoff radii must satisfy 0 < r1 < r2 <= pi")
    v = wrap(v)
    r = np.sqrt(np.sum(v * v, axis=-1)) if v.ndim else np.abs(v)
    return 1.0 - smooth_step((r - r1) / (r2 - r1))


def _check_lattice(values, N, dim):
    values = np.asarray(values)
    if values.shape != (N,) * dim:
        raise DimensionError(f"expected lattice shape {(N,) * dim}, got {values.shape}")
    return values


def fiber_fourier_inverse(values, N: int, dim: int):
    """Inverse fiber Fourier transform on the torus lattice.

    ``f(x) = (2 pi)^-dim * sum_xi exp(i xi.x) values(xi)`` with ``values``
    indexed by the centered dual lattice and ``f`` by ``2 pi k / N``.
    """
    values = _check_lattice(values, N, dim)
    axes = tuple(range(dim))
    return np.fft.ifftn(np.fft.ifftshift(values, axes=axes), axes=axes) * (N / TWO_PI) ** dim


def fiber_fourier(values, N: int, dim: int):
    """Forward transform ``F(xi) = sum_x h^dim exp(-i xi.x) f(x)``; inverse of the above."""
    values = _check_lattice(values, N, dim)
    axes = tuple(range(dim))
    return np.fft.fftshift(np.fft.fftn(values, axes=axes), axes=axes) * (TWO_PI / N) ** dim
