"""Dense reference implementations used only by the tests.

Everything here is assembled from scratch over the full node set (0..N) with
plain numpy, without touching the banded storage, correction maps or compiled
kernels of the package.
"""

from fractions import Fraction as F

import numpy as np

# stencils written out again on purpose; the audit compares against these
D1_LHS = [F(1, 3), F(1), F(1, 3)]
D1_RHS = [F(-1, 36), F(-7, 9), F(0), F(7, 9), F(1, 36)]
D2_LHS = [F(2, 11), F(1), F(2, 11)]
D2_RHS = [F(3, 44), F(12, 11), F(-51, 22), F(12, 11), F(3, 44)]
D1_EDGE = [F(1, 20), F(-1, 2), F(-1, 3), F(1), F(-1, 4), F(1, 30)]  # node 2 over nodes 0..5
D2_EDGE = [F(-1, 12), F(4, 3), F(-5, 2), F(4, 3), F(-1, 12)]  # node 2 over nodes 0..4


def _fl(c):
    return np.array([float(v) for v in c])


def dense_dirichlet(N, h, order):
    """Full-node differentiation matrix (m x N+1) of the Dirichlet-closed operator.

    Row r is the derivative at node r+2; columns run over all nodes, so the
    prescribed values multiply columns 0, 1, N-1, N.
    """
    m = N - 3
    A = np.zeros((m, m))
    B = np.zeros((m, N + 1))
    if order == 1:
        lhs, rhs, edge, sign = _fl(D1_LHS), _fl(D1_RHS), _fl(D1_EDGE), -1.0
    else:
        lhs, rhs, edge, sign = _fl(D2_LHS), _fl(D2_RHS), _fl(D2_EDGE), 1.0
    for r in range(m):
        j = r + 2
        if r == 0:
            A[r, r] = 1.0
            B[r, : edge.size] = edge
        elif r == m - 1:
            A[r, r] = 1.0
            B[r, N + 1 - edge.size :] = sign * edge[::-1]
        else:
            A[r, r - 1 : r + 2] = lhs
            B[r, j - 2 : j + 3] = rhs
    return np.linalg.solve(A, B) / h**order


def dense_step(u, t, tau, spec, g):
    """One step of the fully discrete scheme in its textbook dense form.

    (I - delta D2) U^{n+1} = U^n - tau f'(U^n) D1 u^n + (tau gamma - delta) D2 u^n + tau g^n
    with D1, D2 acting on full nodal vectors and the n+1 boundary values moved
    to the right-hand side.
    """
    N, h = g.N, g.h
    D1 = dense_dirichlet(N, h, 1)
    D2 = dense_dirichlet(N, h, 2)
    unk = np.arange(2, N - 1)
    bnd = np.array([0, 1, N - 1, N])
    u = np.array(u, dtype=float)
    u[bnd] = spec.boundary_values(g, t)
    U = u[unk]
    rhs = (
        U
        - tau * np.asarray(spec.fprime(U)) * (D1 @ u)
        + (tau * spec.gamma - spec.delta) * (D2 @ u)
        + tau * spec.forcing_values(g.x[unk], t)
    )
    b1 = spec.boundary_values(g, t + tau)
    rhs += spec.delta * D2[:, bnd] @ b1
    M = np.eye(unk.size) - spec.delta * D2[:, unk]
    out = u.copy()
    out[bnd] = b1
    out[unk] = np.linalg.solve(M, rhs)
    return out


def kron_mass(Nx, hx, Ny, hy, delta):
    """Dense I - delta (Dxx (x) I + I (x) Dyy) over the 2D unknowns, row-major (y fastest)."""
    Dx = dense_dirichlet(Nx, hx, 2)[:, 2 : Nx - 1]
    Dy = dense_dirichlet(Ny, hy, 2)[:, 2 : Ny - 1]
    mx, my = Dx.shape[0], Dy.shape[0]
    return np.eye(mx * my) - delta * (np.kron(Dx, np.eye(my)) + np.kron(np.eye(mx), Dy))
