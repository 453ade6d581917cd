"""Uniform 1D/2D grids and the fields sampled on them."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

MIN_INTERVALS = 8


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid with nodes ``x_j = a + j*h`` for ``j = 0..N`` (both ends included)."""

    a: float
    b: float
    N: int
    h: float = field(init=False)
    x: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.N, (int, np.integer)) or isinstance(self.N, bool):
            raise GridError(f"N must be an integer, got {self.N!r}")
        if self.N < MIN_INTERVALS:
            raise GridError(
                f"N={self.N} is too small: need N >= {MIN_INTERVALS} intervals "
                "to fit the one-sided boundary stencils"
            )
        if not (np.isfinite(self.a) and np.isfinite(self.b)) or self.b <= self.a:
            raise GridError(f"need finite a < b, got a={self.a}, b={self.b}")
        h = (self.b - self.a) / self.N
        x = self.a + np.arange(self.N + 1) * h
        x.setflags(write=False)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "x", x)

    @property
    def size(self) -> int:
        return self.N + 1

    @property
    def unknown(self) -> slice:
        """Nodes solved for under Dirichlet closure (nodes 0, 1, N-1, N are prescribed)."""
        return slice(2, self.N - 1)

    @property
    def boundary_index(self) -> np.ndarray:
        return np.array([0, 1, self.N - 1, self.N])


@dataclass(frozen=True)
class Grid2D:
    gx: Grid1D
    gy: Grid1D

    @property
    def shape(self) -> tuple[int, int]:
        return (self.gx.size, self.gy.size)

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        # row index runs along x, y varies fastest within a row
        return np.meshgrid(self.gx.x, self.gy.x, indexing="ij")


def make_grid(a: float, b: float, N: int) -> Grid1D:
    return Grid1D(float(a), float(b), N)


def make_grid_2d(ax: float, bx: float, Nx: int, ay: float, by: float, Ny: int) -> Grid2D:
    return Grid2D(make_grid(ax, bx, Nx), make_grid(ay, by, Ny))


@dataclass(frozen=True)
class Field1D:
    values: np.ndarray
    grid: Grid1D
    diverged: bool = False

    def __post_init__(self):
        if self.values.shape != (self.grid.size,):
            raise GridError(
                f"field has shape {self.values.shape}, grid needs ({self.grid.size},)"
            )
        if not self.diverged and not np.all(np.isfinite(self.values)):
            raise GridError("field contains non-finite values")


@dataclass(frozen=True)
class Field2D:
    values: np.ndarray
    grid: Grid2D
    diverged: bool = False

    def __post_init__(self):
        if self.values.shape != self.grid.shape:
            raise GridError(
                f"field has shape {self.values.shape}, grid needs {self.grid.shape}"
            )
        if not self.diverged and not np.all(np.isfinite(self.values)):
            raise GridError("field contains non-finite values")


def sample(fn: Callable, g: Grid1D | Grid2D) -> Field1D | Field2D:
    """Evaluate ``fn`` at every node.

    ``fn`` is called once with the full coordinate array(s), so it should be
    vectorised (numpy ufuncs are). Scalar-only callables are retried node by node.
    """
    if isinstance(g, Grid2D):
        X, Y = g.mesh()
        try:
            vals = np.broadcast_to(np.asarray(fn(X, Y), dtype=float), X.shape).copy()
        except TypeError:
            vals = np.array([[fn(xi, yj) for yj in g.gy.x] for xi in g.gx.x], dtype=float)
        if not np.all(np.isfinite(vals)):
            raise GridError("sampled function returned non-finite values")
        return Field2D(vals, g)
    try:
        vals = np.broadcast_to(np.asarray(fn(g.x), dtype=float), g.x.shape).copy()
    except TypeError:
        vals = np.array([fn(xi) for xi in g.x], dtype=float)
    if not np.all(np.isfinite(vals)):
        bad = int(np.flatnonzero(~np.isfinite(vals))[0])
        raise GridError(f"sampled function is non-finite at node {bad} (x={g.x[bad]})")
    return Field1D(vals, g)
