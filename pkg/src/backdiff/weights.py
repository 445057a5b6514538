"""Interaction weight providers: dense matrices, histogram frequencies,
and local disk-shaped spatial kernels with mirrored image boundaries.

A provider serves nonnegative weights w[i, j] between particle i and
particle j together with cached row sums.  Row sums feed the step-size
bounds of the explicit scheme, so they must stay consistent with the
individual weights.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Iterable, Literal

import numpy as np

__all__ = [
    "gamma1",
    "gamma2",
    "WeightProvider",
    "DenseWeights",
    "GlobalHistogramWeights",
    "LocalDiskWeights",
    "build_global_histogram_weights",
    "build_local_disk_weights",
]

KernelName = Literal["box", "bspline"]


def gamma1(d, rho: float):
    """Box kernel: 1 inside the open disk of radius rho, 0 outside."""
    out = np.where(np.asarray(d, dtype=float) < rho, 1.0, 0.0)
    return float(out) if np.ndim(d) == 0 else out


def gamma2(d, rho: float):
    """Cubic B-spline kernel scaled to support [0, rho).

    With u = d/rho: 1 - 6u^2 + 6u^3 on [0, 1/2), 2(1-u)^3 on [1/2, 1),
    0 beyond.  Continuous, non-increasing, gamma2(0) = 1.
    """
    u = np.asarray(d, dtype=float) / rho
    inner = 1.0 - 6.0 * u * u + 6.0 * u * u * u
    outer = 2.0 * (1.0 - u) ** 3
    out = np.where(u < 0.5, inner, np.where(u < 1.0, outer, 0.0))
    return float(out) if np.ndim(d) == 0 else out


_KERNELS = {"box": gamma1, "bspline": gamma2}


class WeightProvider(ABC):
    """Nonnegative interaction weights over N particles.

    Implementations are immutable after construction; concurrent reads
    are safe.
    """

    @property
    @abstractmethod
    def size(self) -> int:
        """Number of particles N."""

    @abstractmethod
    def weight(self, i: int, j: int) -> float:
        """Interaction weight between particles i and j (>= 0)."""

    @abstractmethod
    def row_sum(self, i: int) -> float:
        """Sum of weights in row i (> 0)."""

    @abstractmethod
    def neighbours(self, i: int) -> Iterable[int]:
        """Indices j with weight(i, j) > 0."""

    @property
    @abstractmethod
    def constant_columns(self) -> bool:
        """True when weight(i, k) is independent of i."""

    def max_row_sum(self) -> float:
        return max(self.row_sum(i) for i in range(self.size))

    def to_dense(self) -> np.ndarray:
        """Materialise the full N x N matrix (small N only)."""
        n = self.size
        m = np.empty((n, n), dtype=float)
        for i in range(n):
            for j in range(n):
                m[i, j] = self.weight(i, j)
        return m


class DenseWeights(WeightProvider):
    """Explicit N x N weight matrix."""

    def __init__(self, matrix) -> None:
        m = np.array(matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"weight matrix must be square, got shape {m.shape}")
        if np.any(m < 0):
            raise ValueError("weights must be nonnegative")
        if np.any(np.diag(m) <= 0):
            raise ValueError("diagonal weights must be positive")
        self._m = m
        self._row_sums = m.sum(axis=1)
        self._constant_columns = bool(np.all(m == m[0]))

    @property
    def size(self) -> int:
        return self._m.shape[0]

    def weight(self, i: int, j: int) -> float:
        return float(self._m[i, j])

    def row_sum(self, i: int) -> float:
        return float(self._row_sums[i])

    def neighbours(self, i: int) -> np.ndarray:
        return np.nonzero(self._m[i] > 0)[0]

    @property
    def constant_columns(self) -> bool:
        return self._constant_columns

    def max_row_sum(self) -> float:
        return float(self._row_sums.max())

    def to_dense(self) -> np.ndarray:
        return self._m.copy()


class GlobalHistogramWeights(WeightProvider):
    """Frequency weights of the global model.

    Particle j stands for one distinct value; every row holds the value
    frequencies, so weight(i, j) = counts[j] independent of i and all row
    sums equal the total count.
    """

    def __init__(self, values, counts) -> None:
        v = np.asarray(values, dtype=float)
        c = np.asarray(counts, dtype=float)
        if v.size == 0:
            raise ValueError("histogram must contain at least one value")
        if v.shape != c.shape or v.ndim != 1:
            raise ValueError("values and counts must be 1-d arrays of equal length")
        if np.any(np.diff(v) <= 0):
            raise ValueError("values must be strictly ascending")
        if np.any(c <= 0):
            raise ValueError("counts must be positive")
        self.values = v
        self.counts = c
        self.total = float(c.sum())

    @property
    def size(self) -> int:
        return self.values.size

    def weight(self, i: int, j: int) -> float:
        return float(self.counts[j])

    def row_sum(self, i: int) -> float:
        return self.total

    def neighbours(self, i: int) -> np.ndarray:
        return np.arange(self.size)

    @property
    def constant_columns(self) -> bool:
        return True

    def max_row_sum(self) -> float:
        return self.total

    def to_dense(self) -> np.ndarray:
        return np.tile(self.counts, (self.size, 1))


def build_global_histogram_weights(values, counts) -> GlobalHistogramWeights:
    """Frequency weights over distinct values sorted ascending."""
    return GlobalHistogramWeights(values, counts)


class LocalDiskWeights(WeightProvider):
    """Disk-shaped spatial weights over the pixels of an n_x x n_y grid.

    Particle i sits at grid position x_i and interacts with every cell of
    the mirrored extension image whose centre lies closer than rho, with
    weight gamma(distance).  The extension reflects the image once across
    each boundary (half-sample symmetric: index -1 -> 0, -2 -> 1, ...),
    giving a canvas of 3 x 3 mirror tiles; offsets reaching beyond the
    canvas are clipped.  Mirrored cells map back to interior pixels and
    multiple mirror images of the same pixel accumulate their weights.

    The N x N matrix is never materialised for real images; weights are
    served through the offset stencil.  For rho <= min(n_x, n_y) no
    clipping occurs and all row sums equal the total kernel mass.
    """

    def __init__(self, n_x: int, n_y: int, rho: float, kernel: KernelName = "box") -> None:
        if n_x < 1 or n_y < 1:
            raise ValueError("image dimensions must be positive")
        if not rho > 0:
            raise ValueError("disk radius must be positive")
        if kernel not in _KERNELS:
            raise ValueError(f"unknown kernel {kernel!r}; expected 'box' or 'bspline'")
        self.n_x = int(n_x)
        self.n_y = int(n_y)
        self.rho = float(rho)
        self.kernel = kernel

        gamma = _KERNELS[kernel]
        r = int(np.floor(self.rho))
        # offsets beyond the 3x3 mirror canvas can never be reached
        rx = min(r, 2 * self.n_x - 1)
        ry = min(r, 2 * self.n_y - 1)
        dx, dy = np.meshgrid(np.arange(-rx, rx + 1), np.arange(-ry, ry + 1), indexing="ij")
        dx = dx.ravel()
        dy = dy.ravel()
        inside = dx * dx + dy * dy < self.rho * self.rho
        self.offsets_x = dx[inside].astype(np.int64)
        self.offsets_y = dy[inside].astype(np.int64)
        self.offset_weights = gamma(np.sqrt((dx[inside] ** 2 + dy[inside] ** 2).astype(float)), self.rho)
        self._row_sums = self._accumulate_row_sums()

    def _accumulate_row_sums(self) -> np.ndarray:
        rs = np.zeros((self.n_y, self.n_x))
        for dx, dy, g in zip(self.offsets_x, self.offsets_y, self.offset_weights):
            x0 = max(0, -self.n_x - dx)
            x1 = min(self.n_x, 2 * self.n_x - dx)
            y0 = max(0, -self.n_y - dy)
            y1 = min(self.n_y, 2 * self.n_y - dy)
            if x0 < x1 and y0 < y1:
                rs[y0:y1, x0:x1] += g
        return rs.ravel()

    @property
    def size(self) -> int:
        return self.n_x * self.n_y

    def _mirror(self, c: np.ndarray, n: int) -> np.ndarray:
        return np.where(c < 0, -1 - c, np.where(c >= n, 2 * n - 1 - c, c))

    def _targets(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Interior indices hit from pixel i, one entry per valid offset."""
        y, x = divmod(i, self.n_x)
        cx = x + self.offsets_x
        cy = y + self.offsets_y
        ok = (cx >= -self.n_x) & (cx < 2 * self.n_x) & (cy >= -self.n_y) & (cy < 2 * self.n_y)
        j = self._mirror(cy[ok], self.n_y) * self.n_x + self._mirror(cx[ok], self.n_x)
        return j, self.offset_weights[ok]

    def weight(self, i: int, j: int) -> float:
        targets, g = self._targets(i)
        return float(g[targets == j].sum())

    def row_sum(self, i: int) -> float:
        return float(self._row_sums[i])

    def neighbours(self, i: int) -> np.ndarray:
        targets, _ = self._targets(i)
        return np.unique(targets)

    @property
    def constant_columns(self) -> bool:
        return self.size == 1

    def max_row_sum(self) -> float:
        return float(self._row_sums.max())

    def to_dense(self) -> np.ndarray:
        n = self.size
        if n > 4096:
            raise ValueError(f"refusing to materialise {n} x {n} local weight matrix")
        m = np.zeros((n, n))
        idx = np.arange(n)
        ys, xs = np.divmod(idx, self.n_x)
        for dx, dy, g in zip(self.offsets_x, self.offsets_y, self.offset_weights):
            cx = xs + dx
            cy = ys + dy
            ok = (cx >= -self.n_x) & (cx < 2 * self.n_x) & (cy >= -self.n_y) & (cy < 2 * self.n_y)
            if not ok.any():
                continue
            j = self._mirror(cy[ok], self.n_y) * self.n_x + self._mirror(cx[ok], self.n_x)
            np.add.at(m, (idx[ok], j), g)
        return m


def build_local_disk_weights(
    n_x: int, n_y: int, rho: float, kernel: KernelName = "box"
) -> LocalDiskWeights:
    """Disk weights over all pixel sites with mirrored boundaries."""
    return LocalDiskWeights(n_x, n_y, rho, kernel)
