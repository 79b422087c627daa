"""Uniform periodic meshes on an interval."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["Mesh1D", "build_uniform"]


@dataclass(frozen=True)
class Mesh1D:
    """Uniform tessellation of [a, b] into ``n_cells`` half-open cells,
    identified periodically."""

    a: float
    b: float
    n_cells: int
    edges: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.b > self.a:
            raise ValueError(f"need b > a, got a={self.a}, b={self.b}")
        if int(self.n_cells) != self.n_cells or self.n_cells < 2:
            raise ValueError(f"need at least 2 cells, got {self.n_cells}")
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "n_cells", int(self.n_cells))
        edges = self.a + self.h * np.arange(self.n_cells + 1)
        edges[-1] = self.b
        edges.setflags(write=False)
        object.__setattr__(self, "edges", edges)

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.n_cells

    @property
    def length(self) -> float:
        return self.b - self.a

    @property
    def centers(self) -> np.ndarray:
        return self.edges[:-1] + 0.5 * self.h

    def wrap(self, x):
        """Map ``x`` periodically into [a, b)."""
        y = self.a + np.mod(np.asarray(x, dtype=float) - self.a, self.length)
        return np.where(y >= self.b, self.a, y) if y.ndim else (self.a if y >= self.b else float(y))

    def cell_of(self, x):
        """Index of the (half-open) cell containing ``x`` after periodic wrap."""
        x = self.wrap(x)
        j = np.floor((x - self.a) / self.h).astype(int)
        # rounding can push points sitting on an edge into the wrong cell
        j = np.where(x < self.edges[np.clip(j, 0, self.n_cells)], j - 1, j)
        j = np.where(x >= self.edges[np.clip(j + 1, 0, self.n_cells)], j + 1, j)
        j = np.mod(j, self.n_cells)
        return j if j.ndim else int(j)

    def ref_to_phys(self, j, xi):
        return self.edges[j] + (np.asarray(xi) + 1.0) * (0.5 * self.h)

    def phys_to_ref(self, j, x):
        return 2.0 * (np.asarray(x) - self.edges[j]) / self.h - 1.0

    def locate(self, x):
        """Return ``(cell, xi)`` for ``x`` using the half-open convention."""
        j = self.cell_of(x)
        return j, self.phys_to_ref(j, self.wrap(x))

    def left_neighbor(self, j: int) -> int:
        return (j - 1) % self.n_cells

    def right_neighbor(self, j: int) -> int:
        return (j + 1) % self.n_cells


def build_uniform(a: float, b: float, n_cells: int) -> Mesh1D:
    return Mesh1D(a, b, n_cells)
