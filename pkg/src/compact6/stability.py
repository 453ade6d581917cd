"""Von Neumann analysis of the Compact6 / forward-Euler scheme.

For a Fourier mode with phase theta = omega*h the compact operators act as

    h^2 d2 -> P(theta) / 2,    h d1 -> i Q(theta) / 6

which gives the semi-discrete factor C(theta) and the one-step factor
L(theta) of the fully discrete scheme.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .grid import Field1D
from .models import EquationSpec
from .operators import DerivativeOperator, first_derivative_all_nodes

SWEEP_SAMPLES = 100_000
NEUTRAL_TOL = 1e-14


@dataclass(frozen=True)
class SymbolParams:
    alpha: float
    gamma: float
    delta: float
    h: float
    tau: float = 0.0
    theta: float = 0.0

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError(f"h must be positive, got {self.h}")
        if not np.all(np.isfinite(self.theta)):
            raise ValueError("theta must be finite")


def symbol_P(theta):
    theta = np.asarray(theta, dtype=float)
    return (48.0 * np.cos(theta) + 3.0 * np.cos(2 * theta) - 51.0) / (11.0 + 4.0 * np.cos(theta))


def symbol_Q(theta):
    theta = np.asarray(theta, dtype=float)
    return (28.0 * np.sin(theta) + np.sin(2 * theta)) / (3.0 + 2.0 * np.cos(theta))


def _parts(alpha, gamma, delta, h, theta):
    """(D, a, b): mass denominator, real and imaginary numerator of C(theta)."""
    P, Q = symbol_P(theta), symbol_Q(theta)
    D = 1.0 - delta * P / (2.0 * h * h)
    a = gamma * P / (2.0 * h * h)
    b = alpha * Q / (6.0 * h)
    return D, a, b


def semi_discrete_amplification(p: SymbolParams):
    D, a, b = _parts(p.alpha, p.gamma, p.delta, p.h, p.theta)
    return (a - 1j * b) / D


def fully_discrete_amplification(p: SymbolParams):
    D, a, b = _parts(p.alpha, p.gamma, p.delta, p.h, p.theta)
    P = symbol_P(p.theta)
    num = 1.0 + (p.gamma * p.tau - p.delta) * P / (2.0 * p.h * p.h) - 1j * p.tau * b
    return num / D


@dataclass(frozen=True)
class StableTau:
    tau: float
    theta: float  # phase attaining the bound
    unconditionally_unstable: bool = False


def _tau_bound(theta, alpha, gamma, delta, h, growth):
    D, a, b = _parts(alpha, gamma, delta, h, theta)
    den = a * a + b * b
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(den > 0, 2.0 * D * (growth * D - a) / den, np.inf)


def max_stable_tau(alpha: float, gamma: float, delta: float, h: float, growth: float = 0.0) -> StableTau:
    """Largest tau with |L(theta)|^2 <= 1 + 2*growth*tau over theta in (0, pi].

    |L|^2 = 1 + 2 tau a/D + tau^2 (a^2 + b^2)/D^2, so each mode gives the
    bound tau <= 2 D (growth D - a) / (a^2 + b^2). The neutral mode
    theta -> 0 (where P and Q both vanish) is excluded.
    """
    if not h > 0:
        raise ValueError("h must be positive")
    if gamma == 0 and growth == 0 and alpha != 0:
        # a = 0 leaves only the tau^2 b^2 term: any tau > 0 amplifies
        return StableTau(0.0, float("nan"), True)
    theta = np.linspace(0.0, np.pi, SWEEP_SAMPLES + 1)[1:]
    P, Q = symbol_P(theta), symbol_Q(theta)
    keep = (np.abs(P) >= NEUTRAL_TOL) | (np.abs(Q) >= NEUTRAL_TOL)
    theta = theta[keep]
    vals = _tau_bound(theta, alpha, gamma, delta, h, growth)
    k = int(np.argmin(vals))
    if not np.isfinite(vals[k]):
        return StableTau(float("inf"), float("nan"))
    step = theta[1] - theta[0]
    lo, hi = max(theta[k] - step, theta[0]), min(theta[k] + step, np.pi)
    res = minimize_scalar(
        lambda t: float(_tau_bound(t, alpha, gamma, delta, h, growth)),
        bounds=(lo, hi), method="bounded", options={"xatol": 1e-10},
    )
    if res.fun < vals[k]:
        return StableTau(float(res.fun), float(res.x))
    return StableTau(float(vals[k]), float(theta[k]))


def decay_envelope(theta, t, u0_norm, alpha=0.0, gamma=1.0, delta=1.0, h=1.0):
    """exp(Re C(theta) t) * ||u0||_inf."""
    c = semi_discrete_amplification(SymbolParams(alpha, gamma, delta, h, theta=theta))
    return np.exp(np.real(c) * np.asarray(t, dtype=float)) * u0_norm


@dataclass(frozen=True)
class FrozenCoefficients:
    alpha_loc: np.ndarray  # f'(u_j)
    zeroth: np.ndarray  # f''(u_j) (u_x)_j

    @property
    def alpha_max(self) -> float:
        return float(np.max(np.abs(self.alpha_loc)))


def linearize_about(u, spec: EquationSpec, operator1: DerivativeOperator | None = None) -> FrozenCoefficients:
    vals = u.values if isinstance(u, Field1D) else np.asarray(u, dtype=float)
    g = operator1.grid if operator1 is not None else u.grid
    ux = first_derivative_all_nodes(vals, g, operator1)
    alpha_loc = np.broadcast_to(spec.fprime(vals), vals.shape).astype(float)
    zeroth = np.broadcast_to(spec.fsecond(vals), vals.shape) * ux
    return FrozenCoefficients(alpha_loc, zeroth)


def nonlinear_stable_tau(u, spec: EquationSpec, operator1=None, growth: float = 0.0) -> StableTau:
    """Conservative bound using the largest frozen advection speed."""
    fc = linearize_about(u, spec, operator1)
    g = operator1.grid if operator1 is not None else u.grid
    return max_stable_tau(fc.alpha_max, spec.gamma, spec.delta, g.h, growth)
