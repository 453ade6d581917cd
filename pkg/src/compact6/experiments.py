"""Experiment runners behind the CLI subcommands.

Each runner takes an :class:`ExperimentConfig`, does the numerical work and
returns plain rows; ``write_*`` helpers turn them into CSV text so that the
same config always yields byte-identical files.
"""

from __future__ import annotations

import io
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import diagnostics as dg
from . import models, stability
from .config import ConfigError, ExperimentConfig
from .grid import Grid1D
from .operators import build_first_derivative, first_derivative_all_nodes
from .stepper import TimeConfig, run, run_2d

log = logging.getLogger(__name__)

ERR_FMT = "%.4e"
RATE_FMT = "%.4f"
SERIES_FMT = "%.17g"


class DivergedRun(RuntimeError):
    def __init__(self, label: str, step: int, t: float):
        super().__init__(f"run {label} diverged at step {step} (t={t:.6g})")
        self.label = label


def worker_count(n_tasks: int) -> int:
    raw = os.environ.get("COMPACT6_THREADS")
    if raw is None:
        cap = os.cpu_count() or 1
    else:
        try:
            cap = int(raw)
        except ValueError:
            raise ConfigError([f"COMPACT6_THREADS must be an integer >= 1, got {raw!r}"]) from None
        if cap < 1:
            raise ConfigError([f"COMPACT6_THREADS must be an integer >= 1, got {raw!r}"])
    return max(1, min(cap, n_tasks))


def _map(fn, tasks: list) -> list:
    """Run ``fn`` over ``tasks`` in worker processes; results keep task order."""
    workers = worker_count(len(tasks))
    if workers == 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def _time_config(cfg: ExperimentConfig, tau: Optional[float] = None, T: Optional[float] = None,
                 samples=()) -> TimeConfig:
    tm = cfg.time
    T = tm["T"] if T is None else T
    if tau is not None:
        return TimeConfig(T, tau=tau, sample_times=tuple(samples))
    if tm.get("tau_rule", "h6") == "h6":
        return TimeConfig(T, tau_rule="h6", sample_times=tuple(samples))
    return TimeConfig(T, tau=tm["tau"], sample_times=tuple(samples))


# --- convergence -----------------------------------------------------------------


@dataclass(frozen=True)
class ConvergenceRow:
    label: float  # N or tau
    report: dg.ErrorReport
    steps: int


def _error_run(task) -> tuple[dg.ErrorReport, int, bool, float]:
    cfg, N, tau = task
    spec = cfg.problem()
    g = cfg.grid(N)
    tc = _time_config(cfg, tau)
    T = tc.T
    if cfg.is_2d:
        res = run_2d(spec, g, tc)
        X, Y = g.mesh()
        exact = spec.exact(X, Y, T)
    else:
        res = run(spec, g, tc)
        exact = spec.exact(g.x, T)
    if res.diverged:
        return None, res.steps, True, res.final.t
    return dg.error_norms(res.final.u, exact), res.steps, False, T


def run_convergence(cfg: ExperimentConfig) -> list[ConvergenceRow]:
    """Error ladder over N (``convergence_space``) or tau (``convergence_time``)."""
    spec = cfg.problem()
    if spec.exact is None:
        raise ConfigError(["/model/data: convergence needs a model with an exact solution"])
    temporal = cfg.experiment == "convergence_time"
    if temporal:
        if "tau_list" not in cfg.time:
            raise ConfigError(["/time/tau_list: temporal convergence needs a tau ladder"])
        labels = list(cfg.time["tau_list"])
        tasks = [(cfg, cfg.N_list[0], tau) for tau in labels]
    else:
        labels = cfg.N_list
        tasks = [(cfg, N, None) for N in labels]
    results = _map(_error_run, tasks)
    rows: list[ConvergenceRow] = []
    for label, (rep, steps, diverged, t) in zip(labels, results):
        if diverged:
            raise DivergedRun(f"{'tau' if temporal else 'N'}={label}", steps, t)
        if rows:
            prev = rows[-1]
            base = prev.label / label if temporal else label / prev.label
            rep = rep.with_rates(prev.report, base)
        rows.append(ConvergenceRow(label, rep, steps))
    return rows


def _fmt_rate(r) -> str:
    return "" if r is None else RATE_FMT % r


def convergence_csv(rows: list[ConvergenceRow], temporal: bool = False) -> str:
    out = io.StringIO()
    out.write(("tau" if temporal else "N") + ",Linf,rate,L1,rate,L2,rate\n")
    for row in rows:
        r = row.report
        label = ("%g" % row.label) if temporal else str(row.label)
        out.write(",".join([
            label, ERR_FMT % r.linf, _fmt_rate(r.rate_linf), ERR_FMT % r.l1, _fmt_rate(r.rate_l1),
            ERR_FMT % r.l2, _fmt_rate(r.rate_l2),
        ]) + "\n")
    return out.getvalue()


# --- stability sweep / decay check ----------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    tau: float
    final_linf: float
    max_linf: float
    status: str  # "bounded" | "diverged"
    steps: int


DIVERGED_LIMIT = 1e6


def _sweep_run(task) -> SweepRow:
    cfg, tau = task
    spec = cfg.problem()
    g = cfg.grid()
    res = run(spec, g, _time_config(cfg, tau), track_max=True)
    final = float(np.max(np.abs(res.final.u))) if not res.diverged else float("inf")
    limit = cfg.time.get("diverged_limit", DIVERGED_LIMIT)
    status = "diverged" if res.diverged or res.max_abs > limit else "bounded"
    return SweepRow(tau, final, max(res.max_abs, final), status, res.steps)


def run_stability_sweep(cfg: ExperimentConfig) -> tuple[list[SweepRow], stability.StableTau]:
    if cfg.is_2d:
        raise ConfigError(["/model/equation: the stability sweep is one-dimensional"])
    taus = cfg.time.get("tau_list") or [cfg.time["tau"]]
    rows = _map(_sweep_run, [(cfg, t) for t in taus])
    spec = cfg.problem()
    bound = stability.max_stable_tau(spec.alpha, spec.gamma, spec.delta, cfg.grid().h)
    return rows, bound


def sweep_verdicts(cfg: ExperimentConfig, rows: list[SweepRow]) -> list[bool]:
    """Compare statuses with ``time.expect``; a bounded run must also stay under ``bounded_limit``."""
    expect = cfg.time.get("expect")
    if not expect:
        return [True] * len(rows)
    lim = cfg.time.get("bounded_limit", math.inf)
    out = []
    for row, want in zip(rows, expect):
        ok = row.status == want
        if want == "bounded":
            ok = ok and row.final_linf <= lim
        out.append(ok)
    return out


def sweep_csv(rows: list[SweepRow], verdicts: list[bool]) -> str:
    out = io.StringIO()
    out.write("tau,final_linf,max_linf,status,steps,verdict\n")
    for row, ok in zip(rows, verdicts):
        out.write(f"{row.tau:g},{ERR_FMT % row.final_linf},{ERR_FMT % row.max_linf},"
                  f"{row.status},{row.steps},{'pass' if ok else 'fail'}\n")
    return out.getvalue()


@dataclass(frozen=True)
class DecayRow:
    t: float
    linf: float
    envelope: float

    @property
    def ok(self) -> bool:
        return self.linf <= self.envelope


def run_decay_check(cfg: ExperimentConfig) -> list[DecayRow]:
    """||u(t)||_inf against exp(Re C(theta) t) ||u0||_inf for the mode sin(x), theta = h."""
    spec = cfg.problem()
    g = cfg.grid()
    n = cfg.time.get("samples", 100)
    T = cfg.time["T"]
    times = tuple(T * (k + 1) / n for k in range(n))
    res = run(spec, g, _time_config(cfg, samples=times))
    if res.diverged:
        raise DivergedRun("decay", res.steps, res.final.t)
    u0 = float(np.max(np.abs(spec.initial(g.x))))
    env = stability.decay_envelope(g.h, np.array(res.times), u0, spec.alpha, spec.gamma, spec.delta, g.h)
    return [DecayRow(t, float(np.max(np.abs(u))), float(e)) for t, u, e in zip(res.times, res.samples, env)]


def decay_csv(rows: list[DecayRow]) -> str:
    out = io.StringIO()
    out.write("t,linf,envelope,ok\n")
    for r in rows:
        out.write(f"{r.t:.6g},{SERIES_FMT % r.linf},{SERIES_FMT % r.envelope},{int(r.ok)}\n")
    return out.getvalue()


# --- invariants ---------------------------------------------------------------------


@dataclass
class InvariantRun:
    reports: list
    exact: Optional[tuple] = None
    bore: Optional[dg.BoreMetrics] = None
    lead: list = field(default_factory=list)  # (x, amp) per sample for bores


def exact_invariants(spec: models.EquationSpec) -> Optional[tuple]:
    if "waves" in spec.params:
        return models.analytic_invariants_solitary(
            [(c, k, spec.delta) for c, k, _ in spec.params["waves"]]
        )
    if spec.name == "ew" and spec.exact is not None:
        # single solitary wave: recover (c, k) from its own profile parameters
        p = spec.params.get("solitary")
        if p is not None:
            return models.analytic_invariants_solitary(p)
    return None


def run_invariants(cfg: ExperimentConfig) -> InvariantRun:
    spec = cfg.problem()
    if spec.name != "ew":
        raise ConfigError(["/model/equation: invariants are defined for the EW equation"])
    g = cfg.grid()
    times = cfg.sample_times or (cfg.time["T"],)
    res = run(spec, g, _time_config(cfg, samples=times))
    if res.diverged:
        raise DivergedRun(f"N={g.N}", res.steps, res.final.t)
    op = build_first_derivative(g)
    exact = exact_invariants(spec)
    reps = []
    for t, u in zip(res.times, res.samples):
        r = dg.invariants(u, spec.delta, op, t=t)
        reps.append(r.against(exact) if exact else r)
    out = InvariantRun(reps, exact)
    if cfg.model.get("data", {}).get("kind") == "bore":
        out.lead = [dg.leading_undulation(u, g.x) for u in res.samples]
        lo, hi = cfg.outputs.get("rate_window", (-math.inf, math.inf))
        window = [(r.t, r) for r in reps if lo <= r.t <= hi]
        if len(window) >= 2:
            M = dg.bore_rates(window)
            x, amp = out.lead[-1]
            out.bore = dg.BoreMetrics(*M, x, amp)
    return out


def invariants_csv(run_: InvariantRun) -> str:
    out = io.StringIO()
    if run_.lead:
        out.write("t,I1,I2,I3,x_lead,amp\n")
        for r, (x, amp) in zip(run_.reports, run_.lead):
            out.write(f"{r.t:g},{r.I1:.6f},{r.I2:.6f},{r.I3:.6f},{x:.2f},{amp:.6f}\n")
        return out.getvalue()
    out.write("t,I1,pct1,I2,pct2,I3,pct3\n")
    for r in run_.reports:
        pct = [r.pct_err_1, r.pct_err_2, r.pct_err_3]
        cells = [f"{r.t:g}"]
        for v, p in zip((r.I1, r.I2, r.I3), pct):
            cells += [ERR_FMT % v, "" if p is None else ERR_FMT % p]
        out.write(",".join(cells) + "\n")
    return out.getvalue()


def bore_csv(m: dg.BoreMetrics, exact: tuple) -> str:
    out = io.StringIO()
    out.write("quantity,fitted,analytic,pct_err\n")
    for name, v, e in zip(("M1", "M2", "M3"), (m.M1, m.M2, m.M3), exact):
        out.write(f"{name},{ERR_FMT % v},{ERR_FMT % e},{ERR_FMT % dg.percent_error(v, e)}\n")
    return out.getvalue()


# --- series ---------------------------------------------------------------------------


def run_series(cfg: ExperimentConfig):
    """Solution snapshots at the configured sample times (final time if none)."""
    spec = cfg.problem()
    g = cfg.grid()
    times = cfg.sample_times or (cfg.time["T"],)
    if cfg.is_2d:
        return g, run_2d(spec, g, _time_config(cfg, samples=times))
    return g, run(spec, g, _time_config(cfg, samples=times))


def series_csv(g, u: np.ndarray) -> str:
    out = io.StringIO()
    if isinstance(g, Grid1D):
        out.write("x,u\n")
        np.savetxt(out, np.column_stack([g.x, u]), fmt=SERIES_FMT, delimiter=",")
    else:
        X, Y = g.mesh()
        out.write("x,y,u\n")
        np.savetxt(out, np.column_stack([X.ravel(), Y.ravel(), u.ravel()]), fmt=SERIES_FMT, delimiter=",")
    return out.getvalue()


def emit_series(cfg: ExperimentConfig, out_dir: Path) -> list[Path]:
    g, res = run_series(cfg)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for t, u in zip(res.times, res.samples):
        p = out_dir / f"series_t{t:g}.csv"
        p.write_text(series_csv(g, u))
        paths.append(p)
    if res.diverged:
        raise DivergedRun("simulate", res.steps, res.final.t)
    return paths


def slope_growth(g: Grid1D, u0: np.ndarray, u1: np.ndarray) -> tuple[float, float]:
    """max |u_x| at two snapshots, for the front-steepening check."""
    return (float(np.max(np.abs(first_derivative_all_nodes(u0, g)))),
            float(np.max(np.abs(first_derivative_all_nodes(u1, g)))))


# --- symbol analysis (no time stepping) -----------------------------------------------


def run_analyze(cfg: ExperimentConfig, n_theta: int = 181):
    spec = cfg.problem()
    g = cfg.grid()
    h = g.gx.h if cfg.is_2d else g.h
    alpha = spec.alpha_x if cfg.is_2d else spec.alpha
    taus = cfg.time.get("tau_list") or [cfg.time.get("tau", h**6)]
    theta = np.linspace(0.0, np.pi, n_theta)
    rows = []
    for tau in taus:
        p = stability.SymbolParams(alpha, spec.gamma, spec.delta, h, tau, theta)
        C = stability.semi_discrete_amplification(p)
        L = stability.fully_discrete_amplification(p)
        for k in range(n_theta):
            rows.append((tau, theta[k], stability.symbol_P(theta[k]), stability.symbol_Q(theta[k]),
                         C[k].real, C[k].imag, abs(L[k]) ** 2))
    bound = stability.max_stable_tau(alpha, spec.gamma, spec.delta, h)
    return rows, bound


def analyze_csv(rows) -> str:
    out = io.StringIO()
    out.write("tau,theta,P,Q,ReC,ImC,absL2\n")
    for r in rows:
        out.write(",".join(SERIES_FMT % v for v in r) + "\n")
    return out.getvalue()
