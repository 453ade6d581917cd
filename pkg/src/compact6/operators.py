"""Sixth-order compact (Compact6) first and second derivative operators.

Two closures are available:

* ``INTERIOR`` -- the pure tridiagonal/pentadiagonal stencil on all N+1 nodes,
  simply truncated at the ends. Only accurate away from the boundary; it is
  kept for Fourier-symbol checks and as a reference operator.
* ``DIRICHLET`` -- nodes 0, 1, N-1, N are prescribed and the derivative is
  produced at the unknown nodes 2..N-2. The rows at nodes 2 and N-2 use
  explicit one-sided stencils, and contributions of the prescribed values
  enter through a correction vector ``C``::

      A u' = (B u + C) / h        A u'' = (B u + C) / h**2
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction as F

import numpy as np

from .banded import BandedLU, BandedMatrix, banded_lu, banded_matvec
from .grid import Field1D, Grid1D


class ClosureKind(enum.Enum):
    INTERIOR = "interior"
    DIRICHLET = "dirichlet"


# Interior stencils: lhs over (j-1, j, j+1), rhs over (j-2 .. j+2).
FIRST_LHS = (F(1, 3), F(1), F(1, 3))
FIRST_RHS = (F(-1, 36), F(-7, 9), F(0), F(7, 9), F(1, 36))
SECOND_LHS = (F(2, 11), F(1), F(2, 11))
SECOND_RHS = (F(3, 44), F(12, 11), F(-51, 22), F(12, 11), F(3, 44))

# One-sided closure at node 2, over nodes 0..5 (first) and 0..4 (second).
FIRST_BOUNDARY = (F(1, 20), F(-1, 2), F(-1, 3), F(1), F(-1, 4), F(1, 30))
SECOND_BOUNDARY = (F(-1, 12), F(4, 3), F(-5, 2), F(4, 3), F(-1, 12))

# Explicit 7-point one-sided first derivatives at nodes 0 and 1 (over nodes 0..6).
# Only used where the compact operator produces nothing (invariant integrands).
EDGE_FIRST_NODE0 = (F(-49, 20), F(6), F(-15, 2), F(20, 3), F(-15, 4), F(6, 5), F(-1, 6))
EDGE_FIRST_NODE1 = (F(-1, 6), F(-77, 60), F(5, 2), F(-5, 3), F(5, 6), F(-1, 4), F(1, 30))


def _f(coeffs) -> np.ndarray:
    return np.array([float(c) for c in coeffs])


@dataclass(frozen=True)
class DerivativeOperator:
    order: int
    grid: Grid1D
    closure: ClosureKind
    lhs: BandedMatrix
    rhs: BandedMatrix
    lu: BandedLU
    # rows [0, 1, m-2, m-1] of C = correction_map @ (u_0, u_1, u_{N-1}, u_N)
    correction_map: np.ndarray

    @property
    def scale(self) -> float:
        return self.grid.h ** (-self.order)

    @property
    def size(self) -> int:
        return self.lhs.n

    @property
    def correction_rows(self) -> np.ndarray:
        m = self.size
        return np.array([0, 1, m - 2, m - 1])

    def correction(self, bvals) -> np.ndarray:
        c = np.zeros(self.size)
        if self.closure is ClosureKind.DIRICHLET:
            bvals = np.asarray(bvals, dtype=float)
            c[self.correction_rows] = self.correction_map @ bvals
        return c

    def dense(self) -> tuple[np.ndarray, np.ndarray]:
        return self.lhs.to_dense(), self.rhs.to_dense()


def _interior_operator(g: Grid1D, order: int, lhs_st, rhs_st) -> DerivativeOperator:
    n = g.size
    lhs = BandedMatrix.zeros(n, 1, 1)
    rhs = BandedMatrix.zeros(n, 2, 2)
    lc, rc = _f(lhs_st), _f(rhs_st)
    for i in range(n):
        for k, off in enumerate((-1, 0, 1)):
            if 0 <= i + off < n:
                lhs[i, i + off] = lc[k]
        for k, off in enumerate((-2, -1, 0, 1, 2)):
            if 0 <= i + off < n:
                rhs[i, i + off] = rc[k]
    return DerivativeOperator(
        order, g, ClosureKind.INTERIOR, lhs, rhs, banded_lu(lhs), np.zeros((4, 4))
    )


def _dirichlet_first(g: Grid1D) -> DerivativeOperator:
    m = g.N - 3
    lhs = BandedMatrix.zeros(m, 1, 1)
    rhs = BandedMatrix.zeros(m, 3, 3)
    lc, rc, bc = _f(FIRST_LHS), _f(FIRST_RHS), _f(FIRST_BOUNDARY)
    for i in range(1, m - 1):
        lhs.set_row(i, i - 1, lc)
    lhs[0, 0] = 1.0
    lhs[m - 1, m - 1] = 1.0
    # unknown k <-> node k+2; the rows at nodes 3 and N-3 lose one known neighbour
    for i in range(2, m - 2):
        rhs.set_row(i, i - 2, rc)
    rhs.set_row(1, 0, rc[1:])
    rhs.set_row(m - 2, m - 4, rc[:-1])
    rhs.set_row(0, 0, bc[2:])
    rhs.set_row(m - 1, m - 4, -bc[2:][::-1])
    cmap = np.zeros((4, 4))
    cmap[0, 0:2] = bc[0:2]
    cmap[1, 1] = rc[0]
    cmap[2, 2] = rc[4]
    cmap[3, 2:4] = -bc[0:2][::-1]
    return DerivativeOperator(1, g, ClosureKind.DIRICHLET, lhs, rhs, banded_lu(lhs), cmap)


def _dirichlet_second(g: Grid1D) -> DerivativeOperator:
    m = g.N - 3
    lhs = BandedMatrix.zeros(m, 1, 1)
    rhs = BandedMatrix.zeros(m, 2, 2)
    lc, rc, bc = _f(SECOND_LHS), _f(SECOND_RHS), _f(SECOND_BOUNDARY)
    for i in range(1, m - 1):
        lhs.set_row(i, i - 1, lc)
    lhs[0, 0] = 1.0
    lhs[m - 1, m - 1] = 1.0
    for i in range(2, m - 2):
        rhs.set_row(i, i - 2, rc)
    rhs.set_row(1, 0, rc[1:])
    rhs.set_row(m - 2, m - 4, rc[:-1])
    rhs.set_row(0, 0, bc[2:])
    rhs.set_row(m - 1, m - 3, bc[2:][::-1])
    cmap = np.zeros((4, 4))
    cmap[0, 0:2] = bc[0:2]
    cmap[1, 1] = rc[0]
    cmap[2, 2] = rc[4]
    cmap[3, 2:4] = bc[0:2][::-1]
    return DerivativeOperator(2, g, ClosureKind.DIRICHLET, lhs, rhs, banded_lu(lhs), cmap)


def build_first_derivative(g: Grid1D, closure: ClosureKind = ClosureKind.DIRICHLET) -> DerivativeOperator:
    closure = ClosureKind(closure)
    if closure is ClosureKind.INTERIOR:
        return _interior_operator(g, 1, FIRST_LHS, FIRST_RHS)
    return _dirichlet_first(g)


def build_second_derivative(g: Grid1D, closure: ClosureKind = ClosureKind.DIRICHLET) -> DerivativeOperator:
    closure = ClosureKind(closure)
    if closure is ClosureKind.INTERIOR:
        return _interior_operator(g, 2, SECOND_LHS, SECOND_RHS)
    return _dirichlet_second(g)


def _values(u, g: Grid1D) -> np.ndarray:
    vals = u.values if isinstance(u, Field1D) else np.asarray(u, dtype=float)
    if vals.shape != (g.size,):
        raise ValueError(f"expected {g.size} nodal values, got shape {vals.shape}")
    return vals


def boundary_values(u, g: Grid1D) -> np.ndarray:
    return _values(u, g)[g.boundary_index].copy()


def assemble_dirichlet_system(op: DerivativeOperator, known_boundary_values):
    """Return the banded ``B`` matrix and the correction vector ``C`` of ``A u^(k) = (B u + C) h^-k``."""
    if op.closure is not ClosureKind.DIRICHLET:
        raise ValueError("assemble_dirichlet_system needs a Dirichlet-closed operator")
    return op.rhs, op.correction(known_boundary_values)


def apply(op: DerivativeOperator, u, bvals=None) -> np.ndarray:
    """Derivative of nodal values ``u``.

    Dirichlet closure returns values at nodes 2..N-2; ``bvals`` gives
    ``u`` at nodes (0, 1, N-1, N) and defaults to the entries of ``u`` there.
    Interior closure returns all N+1 nodes and ignores ``bvals``.
    """
    g = op.grid
    vals = _values(u, g)
    if op.closure is ClosureKind.INTERIOR:
        rhs = banded_matvec(op.rhs, vals)
    else:
        if bvals is None:
            bvals = vals[g.boundary_index]
        bvals = np.asarray(bvals, dtype=float)
        if bvals.shape != (4,) or not np.all(np.isfinite(bvals)):
            raise ValueError(f"need four finite boundary values, got {bvals!r}")
        rhs = banded_matvec(op.rhs, np.ascontiguousarray(vals[g.unknown])) + op.correction(bvals)
    return op.lu.solve(rhs) * op.scale


def first_derivative_all_nodes(u, g: Grid1D, op: DerivativeOperator | None = None, bvals=None) -> np.ndarray:
    """u_x at every node: compact Dirichlet operator inside, explicit 7-point stencils on nodes 0, 1, N-1, N."""
    vals = _values(u, g)
    op = op or build_first_derivative(g, ClosureKind.DIRICHLET)
    out = np.empty(g.size)
    out[g.unknown] = apply(op, vals, bvals)
    e0, e1 = _f(EDGE_FIRST_NODE0), _f(EDGE_FIRST_NODE1)
    out[0] = e0 @ vals[:7] / g.h
    out[1] = e1 @ vals[:7] / g.h
    out[-1] = -(e0 @ vals[::-1][:7]) / g.h
    out[-2] = -(e1 @ vals[::-1][:7]) / g.h
    return out


def dense_differentiation(op: DerivativeOperator) -> tuple[np.ndarray, np.ndarray]:
    """Dense ``(D, G)`` with ``derivative = D @ u_unknown + G @ bvals`` (scale included)."""
    A, B = op.dense()
    Ainv = np.linalg.inv(A)
    D = Ainv @ B * op.scale
    G = np.zeros((op.size, 4))
    if op.closure is ClosureKind.DIRICHLET:
        G = Ainv[:, op.correction_rows] @ op.correction_map * op.scale
    return D, G
