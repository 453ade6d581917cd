"""Forward-Euler time stepping with the implicit Compact6 mass matrix.

Each 1D step solves, over the unknown nodes 2..N-2,

    (h^2 A2 - delta B2) U^{n+1} = h^2 A2 (U^n + tau g^n - tau f'(U^n) u'^n)
                                  + (tau gamma - delta)(B2 U^n + C2^n)
                                  + delta C2^{n+1}

which is the Dirichlet-closed forward-Euler scheme multiplied through by
h^2 A2, so every operator stays banded. ``u'^n`` comes from one tridiagonal
solve with the first-derivative operator.

The kernels solve the same system for the increment U^{n+1} - U^n,

    (h^2 A2 - delta B2) dU = tau h^2 A2 (g^n - f'(U^n) u'^n)
                             + tau gamma (B2 U^n + C2^n)
                             + delta (C2^{n+1} - C2^n)

which avoids the O(1/h^2) cancellation in h^2 A2 U - delta B2 U. Over the
millions of steps a tau = h^6 run takes, that cancellation otherwise builds
up to errors around 1e-8.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numba
import numpy as np
import scipy.sparse.linalg as spla

from .banded import BandedLU, BandedMatrix, banded_lu, banded_matvec
from .grid import Grid1D, Grid2D
from .models import EquationSpec, LinearSpec2D
from .operators import (
    ClosureKind,
    DerivativeOperator,
    build_first_derivative,
    build_second_derivative,
    dense_differentiation,
)

log = logging.getLogger(__name__)

DIVERGENCE_LIMIT = 1e300
CHUNK_STEPS = 4096


class Status(enum.Enum):
    RUNNING = "running"
    FINISHED = "finished"
    DIVERGED = "diverged"


class DivergenceError(RuntimeError):
    def __init__(self, step: int, t: float):
        super().__init__(f"solution diverged at step {step} (t={t:.6g})")
        self.step = step
        self.t = t


@dataclass
class SimState:
    u: np.ndarray
    t: float = 0.0
    n: int = 0
    status: Status = Status.RUNNING

    def copy(self) -> "SimState":
        return SimState(self.u.copy(), self.t, self.n, self.status)


@dataclass(frozen=True)
class SteppingPlan:
    grid: Grid1D
    tau: float
    op1: DerivativeOperator
    op2: DerivativeOperator
    mass: BandedMatrix
    mass_lu: BandedLU
    delta: float
    sample_times: tuple = ()
    a1_factor: "BandFactor" = None
    mass_factor: "BandFactor" = None
    kernel_args: tuple = field(default=(), repr=False, compare=False)


def assemble_mass_system(g: Grid1D, delta: float, op2: Optional[DerivativeOperator] = None):
    """Banded ``h^2 A2 - delta B2`` and its LU factor."""
    if delta < 0:
        raise ValueError("delta must be non-negative")
    op2 = op2 or build_second_derivative(g, ClosureKind.DIRICHLET)
    mass = op2.lhs.scaled_sum(g.h**2, op2.rhs, -delta)
    return mass, banded_lu(mass)


def make_plan(g: Grid1D, delta: float, tau: float, sample_times: Sequence[float] = ()) -> SteppingPlan:
    if not tau > 0:
        raise ValueError(f"tau must be positive, got {tau}")
    op1 = build_first_derivative(g, ClosureKind.DIRICHLET)
    op2 = build_second_derivative(g, ClosureKind.DIRICHLET)
    mass, lu = assemble_mass_system(g, delta, op2)
    plan = SteppingPlan(
        g, float(tau), op1, op2, mass, lu, float(delta), tuple(sorted(sample_times)),
        band_factor(op1.lhs), band_factor(mass),
    )
    object.__setattr__(plan, "kernel_args", _kernel_args(plan))
    return plan


# --- compiled kernels ---------------------------------------------------------
#
# Banded operators are passed to the kernels in row-stencil form:
# ``S[i, k] = A[i, i - kl + k]`` (zero where the column falls outside).


def row_stencils(m: BandedMatrix) -> np.ndarray:
    out = np.zeros((m.n, m.kl + m.ku + 1))
    for i in range(m.n):
        for k in range(m.kl + m.ku + 1):
            j = i - m.kl + k
            if 0 <= j < m.n:
                out[i, k] = m[i, j]
    return out


@dataclass(frozen=True)
class BandFactor:
    """Unpivoted LU in row-stencil form: ``lower`` (n, kl), ``upper`` (n, ku+1), ``inv_diag``."""

    kl: int
    ku: int
    lower: np.ndarray
    upper: np.ndarray
    inv_diag: np.ndarray

    def solve(self, rhs) -> np.ndarray:
        x = np.array(rhs, dtype=float)
        _band_solve(self.lower, self.upper, self.inv_diag, x)
        return x


def band_factor(m: BandedMatrix, check_tol: float = 1e-9) -> BandFactor:
    """Doolittle LU without pivoting, checked against the pivoted factor.

    Both matrices factored here are diagonally dominant, so pivoting never
    triggers; the check guards against a caller handing in something else.
    """
    kl, ku, n = m.kl, m.ku, m.n
    a = row_stencils(m)  # a[i, kl + (j - i)]
    for i in range(n):
        for k in range(1, kl + 1):
            r = i + k
            if r >= n:
                break
            piv = a[i, kl]
            if piv == 0.0:
                raise np.linalg.LinAlgError(f"zero pivot at {i} in unpivoted band LU")
            lik = a[r, kl - k] / piv
            a[r, kl - k] = lik
            for c in range(1, ku + 1):
                if i + c < n and kl - k + c <= kl + ku:
                    a[r, kl - k + c] -= lik * a[i, kl + c]
    if np.any(a[:, kl] == 0.0):
        raise np.linalg.LinAlgError("zero pivot in unpivoted band LU")
    fac = BandFactor(kl, ku, np.ascontiguousarray(a[:, :kl]),
                     np.ascontiguousarray(a[:, kl:]), 1.0 / a[:, kl])
    rng = np.random.default_rng(0)
    b = rng.standard_normal(n)
    x = fac.solve(b)
    res = np.max(np.abs(banded_matvec(m, x) - b)) / max(np.max(np.abs(b)), 1e-300)
    if not res < check_tol:
        raise np.linalg.LinAlgError(f"unpivoted band LU is inaccurate (residual {res:.2e})")
    return fac


@numba.njit(cache=True)
def _band_matvec(S, kl, x, out):
    n = x.shape[0]
    w = S.shape[1]
    for i in range(n):
        s = 0.0
        for k in range(w):
            j = i - kl + k
            if 0 <= j < n:
                s += S[i, k] * x[j]
        out[i] = s


@numba.njit(cache=True)
def _matvec3(S, x, out):
    n = x.shape[0]
    out[0] = S[0, 1] * x[0] + S[0, 2] * x[1]
    # interior rows share one stencil
    c0, c1, c2 = S[1, 0], S[1, 1], S[1, 2]
    for i in range(1, n - 1):
        out[i] = c0 * x[i - 1] + c1 * x[i] + c2 * x[i + 1]
    out[n - 1] = S[n - 1, 0] * x[n - 2] + S[n - 1, 1] * x[n - 1]


@numba.njit(cache=True)
def _matvec5(S, x, out):
    n = x.shape[0]
    for i in (0, 1, n - 2, n - 1):
        s = 0.0
        for k in range(5):
            j = i - 2 + k
            if 0 <= j < n:
                s += S[i, k] * x[j]
        out[i] = s
    c0, c1, c2, c3, c4 = S[2, 0], S[2, 1], S[2, 2], S[2, 3], S[2, 4]
    for i in range(2, n - 2):
        out[i] = c0 * x[i - 2] + c1 * x[i - 1] + c2 * x[i] + c3 * x[i + 1] + c4 * x[i + 2]


@numba.njit(cache=True)
def _matvec7(S, x, out):
    n = x.shape[0]
    for i in (0, 1, 2, n - 3, n - 2, n - 1):
        s = 0.0
        for k in range(7):
            j = i - 3 + k
            if 0 <= j < n:
                s += S[i, k] * x[j]
        out[i] = s
    c0, c1, c2, c3, c4, c5, c6 = S[3, 0], S[3, 1], S[3, 2], S[3, 3], S[3, 4], S[3, 5], S[3, 6]
    for i in range(3, n - 3):
        out[i] = (c0 * x[i - 3] + c1 * x[i - 2] + c2 * x[i - 1] + c3 * x[i]
                  + c4 * x[i + 1] + c5 * x[i + 2] + c6 * x[i + 3])


@numba.njit(cache=True)
def _band_solve(L, U, inv_diag, b):
    n = b.shape[0]
    kl = L.shape[1]
    ku = U.shape[1] - 1
    for i in range(n):
        s = b[i]
        for k in range(1, kl + 1):
            if i - k >= 0:
                s -= L[i, kl - k] * b[i - k]
        b[i] = s
    for i in range(n - 1, -1, -1):
        s = b[i]
        for c in range(1, ku + 1):
            if i + c < n:
                s -= U[i, c] * b[i + c]
        b[i] = s * inv_diag[i]


@numba.njit(cache=True)
def _solve3(L, U, inv_diag, b):
    # kl = ku = 1; the running value stays in a register
    n = b.shape[0]
    p = b[0]
    for i in range(1, n):
        p = b[i] - L[i, 0] * p
        b[i] = p
    p = b[n - 1] * inv_diag[n - 1]
    b[n - 1] = p
    for i in range(n - 2, -1, -1):
        p = (b[i] - U[i, 1] * p) * inv_diag[i]
        b[i] = p


@numba.njit(cache=True)
def _solve5(L, U, inv_diag, b):
    # kl = ku = 2
    n = b.shape[0]
    p2 = b[0]
    p1 = b[1] - L[1, 1] * p2
    b[1] = p1
    for i in range(2, n):
        q = b[i] - L[i, 1] * p1 - L[i, 0] * p2
        b[i] = q
        p2 = p1
        p1 = q
    p2 = b[n - 1] * inv_diag[n - 1]
    b[n - 1] = p2
    p1 = (b[n - 2] - U[n - 2, 1] * p2) * inv_diag[n - 2]
    b[n - 2] = p1
    for i in range(n - 3, -1, -1):
        q = (b[i] - U[i, 1] * p1 - U[i, 2] * p2) * inv_diag[i]
        b[i] = q
        p2 = p1
        p1 = q


@numba.njit(cache=True)
def _add_correction(cmap, bv, scale, out):
    m = out.shape[0]
    for r in range(4):
        s = 0.0
        for c in range(4):
            s += cmap[r, c] * bv[c]
        row = r if r < 2 else m - 4 + r
        out[row] += scale * s


@numba.njit(cache=True)
def _step_inplace(
    u, fp, g, tau, h, gamma, delta, bv_now, bv_next,
    a1L, a1U, a1D, b1, cmap1, a2, b2, cmap2, mL, mU, mD,
    v, d1, w, tmp, rhs,
):
    n1 = u.shape[0]
    m = n1 - 4
    for i in range(m):
        v[i] = u[i + 2]
    # first derivative at unknown nodes
    _matvec7(b1, v, d1)
    _add_correction(cmap1, bv_now, 1.0, d1)
    _solve3(a1L, a1U, a1D, d1)
    for i in range(m):
        w[i] = tau * (g[i] - fp[i] * d1[i] / h)
    # A2-multiplied right-hand side for the increment u^{n+1} - u^n; solving
    # for u^{n+1} directly loses ~1/h^2 digits per step to cancellation
    _matvec3(a2, w, rhs)
    _matvec5(b2, v, tmp)
    _add_correction(cmap2, bv_now, 1.0, tmp)
    coef = tau * gamma
    h2 = h * h
    for i in range(m):
        rhs[i] = h2 * rhs[i] + coef * tmp[i]
    _add_correction(cmap2, bv_next - bv_now, delta, rhs)
    _solve5(mL, mU, mD, rhs)
    ok = True
    for i in range(m):
        u[i + 2] = v[i] + rhs[i]
        if not (abs(u[i + 2]) <= 1e300):
            ok = False
    u[0] = bv_next[0]
    u[1] = bv_next[1]
    u[n1 - 2] = bv_next[2]
    u[n1 - 1] = bv_next[3]
    return ok


@numba.njit(cache=True)
def _advance_affine(
    u, taus, bvals, forcing, has_forcing, c0, c1, h, gamma, delta,
    a1L, a1U, a1D, b1, cmap1, a2, b2, cmap2, mL, mU, mD,
):
    """Advance ``len(taus)`` steps; returns the number of steps that stayed finite."""
    m = u.shape[0] - 4
    v = np.empty(m)
    d1 = np.empty(m)
    w = np.empty(m)
    tmp = np.empty(m)
    rhs = np.empty(m)
    fp = np.empty(m)
    g = np.zeros(m)
    for s in range(taus.shape[0]):
        for i in range(m):
            fp[i] = c0 + c1 * u[i + 2]
        if has_forcing:
            for i in range(m):
                g[i] = forcing[s, i]
        ok = _step_inplace(
            u, fp, g, taus[s], h, gamma, delta, bvals[s], bvals[s + 1],
            a1L, a1U, a1D, b1, cmap1, a2, b2, cmap2, mL, mU, mD,
            v, d1, w, tmp, rhs,
        )
        if not ok:
            return s + 1
    return taus.shape[0]


def _kernel_args(plan: SteppingPlan):
    op1, op2 = plan.op1, plan.op2
    a1, mf = plan.a1_factor, plan.mass_factor
    # the kernels hard-code these bandwidths
    assert (a1.kl, a1.ku, op1.rhs.kl, op1.rhs.ku) == (1, 1, 3, 3)
    assert (op2.lhs.kl, op2.rhs.kl, mf.kl, mf.ku) == (1, 2, 2, 2)
    # interior rows of every matvec operand must be uniform (checked against row 3)
    for S in (row_stencils(op1.rhs), row_stencils(op2.lhs), row_stencils(op2.rhs)):
        assert np.array_equal(S[3:-3], np.broadcast_to(S[3], S[3:-3].shape))
    return (
        a1.lower, a1.upper, a1.inv_diag, row_stencils(op1.rhs), op1.correction_map,
        row_stencils(op2.lhs), row_stencils(op2.rhs), op2.correction_map,
        mf.lower, mf.upper, mf.inv_diag,
    )


# --- 1D stepping ---------------------------------------------------------------


def step_1d(state: SimState, spec: EquationSpec, plan: SteppingPlan, tau: Optional[float] = None) -> SimState:
    """One forward-Euler step. Diverged states are returned unchanged."""
    if state.status is Status.DIVERGED:
        return state
    g = plan.grid
    tau = plan.tau if tau is None else float(tau)
    m = g.N - 3
    u = np.array(state.u, dtype=float)
    v = u[g.unknown]
    fp = np.ascontiguousarray(np.broadcast_to(spec.fprime(v), (m,)), dtype=float)
    gvec = np.ascontiguousarray(
        np.broadcast_to(spec.forcing_values(g.x[g.unknown], state.t), (m,)), dtype=float
    )
    bv_now = spec.boundary_values(g, state.t)
    bv_next = spec.boundary_values(g, state.t + tau)
    work = [np.empty(m) for _ in range(5)]
    ok = _step_inplace(
        u, fp, gvec, tau, g.h, spec.gamma, spec.delta, bv_now, bv_next,
        *plan.kernel_args, *work,
    )
    status = Status.RUNNING if ok else Status.DIVERGED
    return SimState(u, state.t + tau, state.n + 1, status)


@dataclass(frozen=True)
class TimeConfig:
    """Final time plus either a fixed ``tau`` or ``tau_rule='h6'`` (tau = h^6)."""

    T: float
    tau: Optional[float] = None
    tau_rule: str = "fixed"
    sample_times: tuple = ()

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError("T must be positive")
        if self.tau_rule not in ("fixed", "h6"):
            raise ValueError(f"unknown tau rule {self.tau_rule!r}")
        if self.tau_rule == "fixed" and not (self.tau and self.tau > 0):
            raise ValueError("a fixed tau must be positive")

    def resolve_tau(self, h: float) -> float:
        return h**6 if self.tau_rule == "h6" else float(self.tau)


def step_schedule(T: float, tau: float) -> np.ndarray:
    """Step sizes reaching T exactly: full steps then one shortened final step."""
    M = max(1, math.ceil(T / tau * (1.0 - 1e-12)))
    taus = np.full(M, tau)
    taus[-1] = T - (M - 1) * tau
    return taus


def _time_levels(T: float, tau: float, M: int) -> np.ndarray:
    t = np.arange(M + 1) * tau
    t[-1] = T
    return t


@dataclass
class RunResult:
    grid: Grid1D
    tau: float
    times: list
    samples: list
    final: SimState
    steps: int
    max_abs: float = 0.0

    @property
    def diverged(self) -> bool:
        return self.final.status is Status.DIVERGED


def _sample_steps(sample_times, T, tau, M) -> list[int]:
    idx = []
    for ts in sample_times:
        if ts < 0 or ts > T * (1 + 1e-12):
            raise ValueError(f"sample time {ts} outside [0, {T}]")
        s = M if ts >= T else min(M, int(round(ts / tau)))
        idx.append(s)
    return idx


def run(
    spec: EquationSpec,
    grid: Grid1D,
    time_config: TimeConfig,
    raise_on_divergence: bool = False,
    track_max: bool = False,
) -> RunResult:
    """Integrate from t=0 to T, recording the solution at the requested sample times.

    A sample time is served by the nearest completed step (the final time is
    always hit exactly). With ``track_max`` the largest |u| seen at chunk
    boundaries and samples is reported in ``max_abs``.
    """
    if spec.initial is None:
        raise ValueError(f"model {spec.name!r} has no initial condition")
    T = float(time_config.T)
    tau = time_config.resolve_tau(grid.h)
    taus = step_schedule(T, tau)
    M = taus.size
    tlev = _time_levels(T, tau, M)
    plan = make_plan(grid, spec.delta, tau)
    u = np.array(np.broadcast_to(spec.initial(grid.x), grid.x.shape), dtype=float)
    u[grid.boundary_index] = spec.boundary_values(grid, 0.0)

    sample_idx = _sample_steps(time_config.sample_times, T, tau, M)
    stops = sorted(set(sample_idx) | {M})
    samples: dict[int, np.ndarray] = {}
    if 0 in sample_idx:
        samples[0] = u.copy()
    state = SimState(u, 0.0, 0)
    xu = grid.x[grid.unknown]
    kargs = plan.kernel_args
    max_abs = float(np.max(np.abs(u)))

    n = 0
    for stop in stops:
        while n < stop:
            k = min(CHUNK_STEPS, stop - n)
            if spec.fprime_affine is not None:
                bv = np.ascontiguousarray(spec.boundary_values(grid, tlev[n : n + k + 1]))
                has_g = spec.forcing is not None
                forcing = (
                    np.ascontiguousarray(spec.forcing_values(xu, tlev[n : n + k]))
                    if has_g else np.zeros((1, xu.size))
                )
                c0, c1 = spec.fprime_affine
                done = _advance_affine(
                    state.u, taus[n : n + k], bv, forcing, has_g, c0, c1,
                    grid.h, spec.gamma, spec.delta, *kargs,
                )
            else:
                done = 0
                for s in range(k):
                    nxt = step_1d(SimState(state.u, tlev[n + s], n + s), spec, plan, taus[n + s])
                    state.u[:] = nxt.u
                    done += 1
                    if nxt.status is Status.DIVERGED:
                        break
            n += done
            state.n, state.t = n, float(tlev[n])
            if done < k or not np.all(np.abs(state.u) <= DIVERGENCE_LIMIT):
                state.status = Status.DIVERGED
                log.warning("divergence at step %d, t=%g", n, state.t)
                if raise_on_divergence:
                    raise DivergenceError(n, state.t)
                break
            if track_max:
                max_abs = max(max_abs, float(np.max(np.abs(state.u))))
        if state.status is Status.DIVERGED:
            break
        if stop in sample_idx:
            samples[stop] = state.u.copy()

    if state.status is not Status.DIVERGED:
        state.status = Status.FINISHED
    times = [float(tlev[s]) for s in sample_idx if s in samples]
    return RunResult(
        grid, tau, times, [samples[s] for s in sample_idx if s in samples],
        state, n, max_abs,
    )


# --- 2D stepping ---------------------------------------------------------------


@dataclass(frozen=True)
class Plan2D:
    grid: Grid2D
    tau: float
    delta: float
    D1: tuple  # (D, G) per axis
    D2: tuple
    eig: Optional[tuple]  # (Vx, Vx_inv, lam_x, Vy, Vy_inv, lam_y) or None -> iterative
    denom: Optional[np.ndarray] = None


def _real_eig(D: np.ndarray, tol: float = 1e-8):
    lam, V = np.linalg.eig(D)
    scale = max(1.0, float(np.max(np.abs(lam))))
    if np.max(np.abs(lam.imag)) > tol * scale or np.max(np.abs(V.imag)) > tol:
        return None
    V = V.real
    return V, np.linalg.inv(V), lam.real


def make_plan_2d(g: Grid2D, delta: float, tau: float, force_iterative: bool = False) -> Plan2D:
    ops1, ops2, eigs = [], [], []
    for ax in (g.gx, g.gy):
        ops1.append(dense_differentiation(build_first_derivative(ax)))
        D2, G2 = dense_differentiation(build_second_derivative(ax))
        ops2.append((D2, G2))
        eigs.append(None if force_iterative else _real_eig(D2))
    if any(e is None for e in eigs):
        log.info("2D mass operator: eigenvalues not real, using GMRES")
        return Plan2D(g, tau, delta, tuple(ops1), tuple(ops2), None)
    (Vx, Vxi, lx), (Vy, Vyi, ly) = eigs
    denom = 1.0 - delta * (lx[:, None] + ly[None, :])
    return Plan2D(g, tau, delta, tuple(ops1), tuple(ops2), (Vx, Vxi, lx, Vy, Vyi, ly), denom)


def _strip_values(u: np.ndarray):
    """Prescribed values feeding the x-sweeps (4 x my) and y-sweeps (mx x 4)."""
    nx, ny = u.shape[0] - 1, u.shape[1] - 1
    bx = u[[0, 1, nx - 1, nx], 2 : ny - 1]
    by = u[2 : nx - 1, [0, 1, ny - 1, ny]]
    return bx, by


def _dxx(D, G, U, bx):
    return D @ U + G @ bx


def _dyy(D, G, U, by):
    return U @ D.T + by @ G.T


def mass_solve_2d(plan: Plan2D, R: np.ndarray) -> np.ndarray:
    """Solve U - delta (Dxx U + Dyy U) = R with homogeneous corrections."""
    if plan.eig is not None:
        Vx, Vxi, _, Vy, Vyi, _ = plan.eig
        W = (Vxi @ R @ Vyi.T) / plan.denom
        return Vx @ W @ Vy.T
    (Dx, _), (Dy, _) = plan.D2
    shape = R.shape
    delta = plan.delta

    def matvec(x):
        U = x.reshape(shape)
        return (U - delta * (Dx @ U + U @ Dy.T)).ravel()

    A = spla.LinearOperator((R.size, R.size), matvec=matvec, dtype=float)
    x, info = spla.gmres(A, R.ravel(), rtol=1e-11, atol=0.0, restart=100, maxiter=500)
    resid = np.linalg.norm(matvec(x) - R.ravel()) / max(np.linalg.norm(R), 1e-300)
    if info != 0 or resid > 1e-10:
        raise RuntimeError(f"2D mass solve did not converge (info={info}, residual={resid:.2e})")
    return x.reshape(shape)


def _boundary_fill_2d(spec: LinearSpec2D, g: Grid2D, u: np.ndarray, t: float) -> None:
    nx, ny = g.gx.N, g.gy.N
    rows = [0, 1, nx - 1, nx]
    cols = [0, 1, ny - 1, ny]
    if spec.exact is None:
        u[rows, :] = spec.boundary_value
        u[:, cols] = spec.boundary_value
        return
    X, Y = g.mesh()
    u[rows, :] = spec.exact(X[rows, :], Y[rows, :], t)
    u[:, cols] = spec.exact(X[:, cols], Y[:, cols], t)


def step_2d(state: SimState, spec: LinearSpec2D, plan: Plan2D, tau: Optional[float] = None) -> SimState:
    if state.status is Status.DIVERGED:
        return state
    g = plan.grid
    tau = plan.tau if tau is None else float(tau)
    u = state.u
    nx, ny = g.gx.N, g.gy.N
    U = u[2 : nx - 1, 2 : ny - 1]
    bx, by = _strip_values(u)
    (D1x, G1x), (D1y, G1y) = plan.D1
    (D2x, G2x), (D2y, G2y) = plan.D2
    lap = _dxx(D2x, G2x, U, bx) + _dyy(D2y, G2y, U, by)
    # solve for the increment, as in 1D
    R = tau * spec.gamma * lap
    if spec.alpha_x:
        R -= tau * spec.alpha_x * _dxx(D1x, G1x, U, bx)
    if spec.alpha_y:
        R -= tau * spec.alpha_y * _dyy(D1y, G1y, U, by)
    if spec.forcing is not None:
        X, Y = g.mesh()
        R += tau * spec.forcing(X[2 : nx - 1, 2 : ny - 1], Y[2 : nx - 1, 2 : ny - 1], state.t)
    new = u.copy()
    _boundary_fill_2d(spec, g, new, state.t + tau)
    if spec.delta:
        bx1, by1 = _strip_values(new)
        R += spec.delta * (G2x @ (bx1 - bx) + (by1 - by) @ G2y.T)
    new[2 : nx - 1, 2 : ny - 1] = U + mass_solve_2d(plan, R)
    ok = bool(np.all(np.abs(new) <= DIVERGENCE_LIMIT))
    return SimState(new, state.t + tau, state.n + 1, Status.RUNNING if ok else Status.DIVERGED)


@dataclass
class RunResult2D:
    grid: Grid2D
    tau: float
    final: SimState
    steps: int
    times: list = field(default_factory=list)
    samples: list = field(default_factory=list)

    @property
    def diverged(self) -> bool:
        return self.final.status is Status.DIVERGED


def run_2d(spec: LinearSpec2D, grid: Grid2D, time_config: TimeConfig,
           force_iterative: bool = False) -> RunResult2D:
    """2D driver; the h^6 rule uses the x spacing."""
    T = float(time_config.T)
    tau = time_config.resolve_tau(grid.gx.h)
    taus = step_schedule(T, tau)
    M = taus.size
    tlev = _time_levels(T, tau, M)
    plan = make_plan_2d(grid, spec.delta, tau, force_iterative=force_iterative)
    X, Y = grid.mesh()
    u = np.array(np.broadcast_to(spec.initial(X, Y), X.shape), dtype=float)
    _boundary_fill_2d(spec, grid, u, 0.0)
    sample_idx = set(_sample_steps(time_config.sample_times, T, tau, M))
    state = SimState(u, 0.0, 0)
    times, samples = [], []
    if 0 in sample_idx:
        times.append(0.0)
        samples.append(u.copy())
    for s in range(M):
        state = step_2d(SimState(state.u, float(tlev[s]), s), spec, plan, taus[s])
        if state.status is Status.DIVERGED:
            break
        if s + 1 in sample_idx:
            times.append(float(tlev[s + 1]))
            samples.append(state.u.copy())
    if state.status is not Status.DIVERGED:
        state.status = Status.FINISHED
        state.t = T
    return RunResult2D(grid, tau, state, state.n, times, samples)
