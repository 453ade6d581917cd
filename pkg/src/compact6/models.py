"""PDE instances of the form

    u_t + f(u)_x - gamma u_xx - delta u_xxt = g(x, t)

together with their initial/boundary data, exact solutions and analytic
invariant values.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .grid import Grid1D


class ModelError(ValueError):
    pass


def _sech(z):
    return 1.0 / np.cosh(z)


@dataclass(frozen=True)
class EquationSpec:
    """One Sobolev-type problem.

    ``boundary`` selects how the prescribed nodes 0, 1, N-1, N are filled:
    ``"exact"`` evaluates :attr:`exact` there, ``"constant"`` uses
    ``left_value`` for nodes 0 and 1 and ``right_value`` for nodes N-1 and N.
    """

    name: str
    f: Callable
    fprime: Callable
    fsecond: Callable
    gamma: float = 0.0
    delta: float = 0.0
    alpha: float = 0.0
    forcing: Optional[Callable] = None
    initial: Optional[Callable] = None
    exact: Optional[Callable] = None
    boundary: str = "constant"
    left_value: float = 0.0
    right_value: float = 0.0
    # f'(u) = c0 + c1*u, lets the stepper stay inside compiled code
    fprime_affine: Optional[tuple[float, float]] = None
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.gamma < 0 or self.delta < 0:
            raise ModelError(f"need gamma, delta >= 0, got {self.gamma}, {self.delta}")
        if self.boundary not in ("exact", "constant"):
            raise ModelError(f"unknown boundary policy {self.boundary!r}")
        if self.boundary == "exact" and self.exact is None:
            raise ModelError("boundary='exact' requires an exact solution")

    def replace(self, **changes) -> "EquationSpec":
        return dataclasses.replace(self, **changes)

    def with_data(self, initial=None, exact=None, boundary=None, **changes) -> "EquationSpec":
        if exact is not None and initial is None:
            initial = lambda x, _e=exact: _e(x, 0.0)  # noqa: E731
        if boundary is None:
            boundary = "exact" if exact is not None else self.boundary
        return dataclasses.replace(self, initial=initial, exact=exact, boundary=boundary, **changes)

    def boundary_values(self, g: Grid1D, t) -> np.ndarray:
        """Values at nodes (0, 1, N-1, N); shape ``(4,)`` for scalar t, ``(len(t), 4)`` otherwise."""
        t = np.asarray(t, dtype=float)
        if self.boundary == "exact":
            xb = g.x[g.boundary_index]
            vals = np.asarray(self.exact(xb[None, :], t.reshape(-1, 1)), dtype=float)
            vals = np.broadcast_to(vals, (t.size, 4))
        else:
            row = np.array([self.left_value, self.left_value, self.right_value, self.right_value])
            vals = np.broadcast_to(row, (t.size, 4))
        return vals.reshape(4) if t.ndim == 0 else np.array(vals)

    def forcing_values(self, x: np.ndarray, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.forcing is None:
            return np.zeros(t.shape + x.shape)
        return np.asarray(self.forcing(x, t[..., None] if t.ndim else t), dtype=float)


def linear_sobolev(alpha: float, gamma: float, delta: float) -> EquationSpec:
    """u_t + alpha u_x = gamma u_xx + delta u_xxt."""
    a = float(alpha)
    return EquationSpec(
        name="linear",
        f=lambda u: a * u,
        fprime=lambda u: a + 0.0 * u,
        fsecond=lambda u: 0.0 * u,
        gamma=float(gamma),
        delta=float(delta),
        alpha=a,
        fprime_affine=(a, 0.0),
        params={"alpha": a, "gamma": gamma, "delta": delta},
    )


def linear_sine_solution(alpha: float, gamma: float, delta: float, omega: float = 1.0) -> Callable:
    """Exact solution of the linear model started from sin(omega x)."""
    lam = complex(-gamma * omega**2, -alpha * omega) / (1.0 + delta * omega**2)

    def exact(x, t):
        return np.exp(lam.real * t) * np.sin(omega * x + lam.imag * t)

    return exact


def linear_sine_problem(alpha: float, gamma: float, delta: float) -> EquationSpec:
    return linear_sobolev(alpha, gamma, delta).with_data(
        exact=linear_sine_solution(alpha, gamma, delta)
    )


def ew_equation(delta: float) -> EquationSpec:
    """Equal Width equation u_t + u u_x = delta u_xxt."""
    if not delta > 0:
        raise ModelError(f"EW equation needs delta > 0, got {delta}")
    return EquationSpec(
        name="ew",
        f=lambda u: 0.5 * u * u,
        fprime=lambda u: u,
        fsecond=lambda u: 1.0 + 0.0 * u,
        gamma=0.0,
        delta=float(delta),
        fprime_affine=(0.0, 1.0),
        params={"delta": delta},
    )


def bbmb_equation(gamma: float, delta: float, forcing: Optional[Callable] = None) -> EquationSpec:
    """BBM-Burgers u_t + (1+u) u_x - gamma u_xx - delta u_xxt = g, flux u + u^2/2."""
    return EquationSpec(
        name="bbmb",
        f=lambda u: u + 0.5 * u * u,
        fprime=lambda u: 1.0 + u,
        fsecond=lambda u: 1.0 + 0.0 * u,
        gamma=float(gamma),
        delta=float(delta),
        forcing=forcing,
        fprime_affine=(1.0, 1.0),
        params={"gamma": gamma, "delta": delta},
    )


def bbmb_sech_forcing(x, t):
    s = x - t
    th = np.tanh(s)
    sh = _sech(s)
    return (1.0 - 6.0 * th**3 - 2.0 * th**2 - (sh - 5.0) * th) * sh


def bbmb_sech_exact(x, t):
    return _sech(x - t)


def bbmb_sech_problem() -> EquationSpec:
    return bbmb_equation(1.0, 1.0, bbmb_sech_forcing).with_data(exact=bbmb_sech_exact)


@dataclass(frozen=True)
class SolitaryWaveParams:
    c: float
    x0: float
    delta: float = 1.0
    k: Optional[float] = None

    def __post_init__(self):
        if not self.delta > 0:
            raise ModelError("solitary wave needs delta > 0")
        k_ew = math.sqrt(1.0 / (4.0 * self.delta))
        if self.k is None:
            object.__setattr__(self, "k", k_ew)
        elif abs(self.k - k_ew) > 1e-12:
            raise ModelError(f"k={self.k} is not sqrt(1/(4 delta))={k_ew}")


def solitary_wave(p: SolitaryWaveParams) -> tuple[Callable, Callable]:
    """Initial profile and travelling-wave solution 3c sech^2(k(x - x0 - ct))."""

    def exact(x, t):
        return 3.0 * p.c * _sech(p.k * (x - p.x0 - p.c * t)) ** 2

    def ic(x):
        return exact(x, 0.0)

    return ic, exact


def solitary_problem(p: SolitaryWaveParams, boundary: str = "exact") -> EquationSpec:
    ic, exact = solitary_wave(p)
    spec = ew_equation(p.delta).with_data(initial=ic, exact=exact)
    return spec.replace(boundary=boundary, params={**spec.params, "solitary": p})


def multi_soliton_ic(waves: Sequence[tuple[float, float, float]]) -> Callable:
    """Superposition 3 sum c_j sech^2(k_j (x - x_j)) of ``(c_j, k_j, x_j)`` triples."""
    waves = [tuple(map(float, w)) for w in waves]

    def ic(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for c, k, xj in waves:
            out = out + 3.0 * c * _sech(k * (x - xj)) ** 2
        return out

    return ic


@dataclass(frozen=True)
class BoreParams:
    u0: float
    d: float
    xc: float = 0.0

    def __post_init__(self):
        if not (self.u0 > 0 and self.d > 0):
            raise ModelError(f"need u0 > 0 and d > 0, got u0={self.u0}, d={self.d}")


def bore_ic(p: BoreParams) -> Callable:
    def ic(x):
        return 0.5 * p.u0 * (1.0 - np.tanh((np.asarray(x, dtype=float) - p.xc) / p.d))

    return ic


def bore_problem(p: BoreParams, delta: float = 1.0) -> EquationSpec:
    return ew_equation(delta).with_data(initial=bore_ic(p), boundary="constant").replace(
        left_value=p.u0, right_value=0.0
    )


def analytic_invariants_solitary(params) -> tuple[float, float, float]:
    """(I1, I2, I3) of one solitary wave, or the sum over a list of them.

    Each entry is a :class:`SolitaryWaveParams` or a ``(c, k, delta)`` triple.
    """
    if isinstance(params, SolitaryWaveParams):
        params = [(params.c, params.k, params.delta)]
    I1 = I2 = I3 = 0.0
    for p in params:
        c, k, delta = (p.c, p.k, p.delta) if isinstance(p, SolitaryWaveParams) else p
        I1 += 6.0 * c / k
        I2 += 12.0 * c**2 / k + 48.0 * k * c**2 * delta / 5.0
        I3 += 144.0 * c**3 / (5.0 * k)
    return I1, I2, I3


def analytic_bore_rates(u0: float) -> tuple[float, float, float]:
    return 0.5 * u0**2, 2.0 * u0**3 / 3.0, 0.75 * u0**4


# --- two-dimensional linear model --------------------------------------------


@dataclass(frozen=True)
class LinearSpec2D:
    """u_t + ax u_x + ay u_y = gamma (u_xx + u_yy) + delta (u_xxt + u_yyt) + g."""

    alpha_x: float
    alpha_y: float
    gamma: float
    delta: float
    initial: Optional[Callable] = None
    exact: Optional[Callable] = None
    forcing: Optional[Callable] = None
    boundary_value: float = 0.0

    def __post_init__(self):
        if self.gamma < 0 or self.delta < 0:
            raise ModelError("need gamma, delta >= 0")


def linear_sine_solution_2d(alpha_x, alpha_y, gamma, delta) -> Callable:
    """Exact solution for initial data sin(x) sin(y), a sum of the (1,1) and (1,-1) modes."""
    decay = -2.0 * gamma / (1.0 + 2.0 * delta)
    shift_sum = (alpha_x + alpha_y) / (1.0 + 2.0 * delta)
    shift_diff = (alpha_x - alpha_y) / (1.0 + 2.0 * delta)

    def exact(x, y, t):
        return 0.5 * np.exp(decay * t) * (
            np.cos(x - y - shift_diff * t) - np.cos(x + y - shift_sum * t)
        )

    return exact


def linear_sine_problem_2d(alpha_x, alpha_y, gamma, delta) -> LinearSpec2D:
    exact = linear_sine_solution_2d(alpha_x, alpha_y, gamma, delta)
    return LinearSpec2D(
        float(alpha_x), float(alpha_y), float(gamma), float(delta),
        initial=lambda x, y: exact(x, y, 0.0), exact=exact,
    )
