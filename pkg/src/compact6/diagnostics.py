"""Error norms, convergence orders, Simpson quadrature and EW invariants."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .grid import Field1D
from .operators import DerivativeOperator, first_derivative_all_nodes


@dataclass(frozen=True)
class ErrorReport:
    linf: float
    l1: float
    l2: float
    rate_linf: Optional[float] = None
    rate_l1: Optional[float] = None
    rate_l2: Optional[float] = None

    def with_rates(self, coarser: "ErrorReport", base: float = 2.0) -> "ErrorReport":
        return ErrorReport(
            self.linf, self.l1, self.l2,
            observed_order(coarser.linf, self.linf, base),
            observed_order(coarser.l1, self.l1, base),
            observed_order(coarser.l2, self.l2, base),
        )


def _vals(u):
    return u.values if isinstance(u, Field1D) else np.asarray(u, dtype=float)


def error_norms(numeric, exact, h: Optional[float] = None, weighting: str = "mean") -> ErrorReport:
    """Discrete L-inf, L1 and L2 norms of ``numeric - exact`` over all nodes.

    ``weighting="mean"`` averages over the nodes (sum/(N+1)), which is what
    reproduces the tabulated L1/L2 magnitudes; ``weighting="h"`` gives the
    Riemann-sum norms h*sum|e| and sqrt(h*sum e^2).
    """
    if isinstance(numeric, Field1D) and isinstance(exact, Field1D) and numeric.grid != exact.grid:
        raise ValueError("fields live on different grids")
    a, b = _vals(numeric), _vals(exact)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    e = np.abs(a - b).ravel()
    if weighting == "mean":
        w = 1.0 / e.size
    elif weighting == "h":
        if h is None:
            h = numeric.grid.h if isinstance(numeric, Field1D) else None
        if h is None or not h > 0:
            raise ValueError("h-weighted norms need a positive h")
        w = h
    else:
        raise ValueError(f"unknown weighting {weighting!r}")
    return ErrorReport(float(e.max()), float(w * e.sum()), float(math.sqrt(w * np.sum(e * e))))


def observed_order(e_coarse: float, e_fine: float, base: float = 2.0) -> float:
    """log_base(e_coarse / e_fine): base 2 for grid halving, 10 per decade of tau."""
    if e_coarse <= 0 or e_fine <= 0:
        return float("nan")
    return math.log(e_coarse / e_fine) / math.log(base)


def simpson(values, h: float) -> float:
    """Composite Simpson; an odd interval count gets a 3/8-rule patch on the last three intervals."""
    f = _vals(values)
    n = f.size - 1
    if n < 2:
        raise ValueError("Simpson's rule needs at least 3 nodes")
    if n % 2 == 0:
        return h / 3.0 * (f[0] + f[-1] + 4.0 * f[1:-1:2].sum() + 2.0 * f[2:-1:2].sum())
    if n == 3:
        return 3.0 * h / 8.0 * (f[0] + 3.0 * f[1] + 3.0 * f[2] + f[3])
    head = simpson(f[: n - 2], h)
    t = f[n - 3 :]
    return head + 3.0 * h / 8.0 * (t[0] + 3.0 * t[1] + 3.0 * t[2] + t[3])


@dataclass(frozen=True)
class InvariantReport:
    I1: float
    I2: float
    I3: float
    t: float = 0.0
    pct_err_1: Optional[float] = None
    pct_err_2: Optional[float] = None
    pct_err_3: Optional[float] = None

    def against(self, exact: Sequence[float]) -> "InvariantReport":
        pct = [percent_error(v, x) for v, x in zip((self.I1, self.I2, self.I3), exact)]
        return InvariantReport(self.I1, self.I2, self.I3, self.t, *pct)


def percent_error(value: float, exact: float) -> float:
    if exact == 0:
        raise ValueError("percentage error needs a non-zero reference")
    return 100.0 * abs(value - exact) / abs(exact)


def invariants(u, delta: float, op1: DerivativeOperator, bvals=None, t: float = 0.0) -> InvariantReport:
    """I1 = int u, I2 = int (u^2 + delta u_x^2), I3 = int u^3 by composite Simpson.

    u_x comes from the compact operator at nodes 2..N-2 and explicit
    seventh-order one-sided stencils at the four prescribed nodes.
    """
    vals = _vals(u)
    h = op1.grid.h
    ux = first_derivative_all_nodes(vals, op1.grid, op1, bvals)
    return InvariantReport(
        simpson(vals, h), simpson(vals**2 + delta * ux**2, h), simpson(vals**3, h), float(t)
    )


def bore_rates(samples: Sequence[tuple[float, InvariantReport]]) -> tuple[float, float, float]:
    """Least-squares slopes dI_j/dt over the samples."""
    if len(samples) < 2:
        raise ValueError("need at least two samples")
    t = np.array([s[0] for s in samples], dtype=float)
    if np.ptp(t) == 0:
        raise ValueError("samples span no time")
    I = np.array([[r.I1, r.I2, r.I3] for _, r in samples])
    slopes = np.polyfit(t, I, 1)[0]
    return tuple(float(s) for s in slopes)


@dataclass(frozen=True)
class BoreMetrics:
    M1: float
    M2: float
    M3: float
    lead_x: float
    lead_amp: float


def leading_undulation(u, x=None) -> tuple[float, float]:
    """Position and value of max u; ties go to the rightmost node."""
    vals = _vals(u)
    if x is None:
        if not isinstance(u, Field1D):
            raise ValueError("pass node positions for a bare array")
        x = u.grid.x
    k = vals.size - 1 - int(np.argmax(vals[::-1]))
    return float(x[k]), float(vals[k])
