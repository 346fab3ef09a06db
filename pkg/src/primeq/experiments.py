"""Experiment harnesses: plain runs, twin-run dependence and the eps-study."""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig
from .estimates import (GronwallReport, fit_gronwall_constant, gronwall_envelope, h2_panel,
                        norm_panel, phi)
from .fields import DiagRecord, State
from .grid import fft_workers
from .io import DiagnosticsCSV, read_checkpoint, write_checkpoint, write_csv
from .presets import initial_state, twin_perturbation
from .timestepper import Stepper, _check_blowup, cfl_dt, run

__all__ = [
    "build_initial_state",
    "run_experiment",
    "twin_experiment",
    "write_twin_report",
    "EpsilonReport",
    "epsilon_experiment",
    "write_epsilon_report",
]

log = logging.getLogger(__name__)


def _prepare(cfg: RunConfig) -> None:
    if cfg.deterministic:
        fft_workers(1)


def build_initial_state(cfg: RunConfig) -> State:
    grid = cfg.grid()
    if cfg.ic == "checkpoint":
        state, _ = read_checkpoint(cfg.checkpoint)
        if state.grid != grid:
            raise ConfigError(f"checkpoint grid {state.grid.shape} does not match config")
        return state
    try:
        return initial_state(cfg.ic, grid, amplitude=cfg.amplitude, seed=cfg.seed, kmax=cfg.kmax)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


class _CheckpointSink:
    def __init__(self, outdir: Path, params, every: int):
        self.outdir, self.params, self.every = outdir, params, every
        self.calls = 0

    def __call__(self, state: State) -> None:
        if self.every and self.calls % self.every == 0:
            write_checkpoint(self.outdir / f"checkpoint_{self.calls:06d}.peqc", state, self.params)
        self.calls += 1


def run_experiment(cfg: RunConfig, s0: State | None = None) -> State:
    """Integrate one configuration, writing diagnostics.csv and checkpoints.

    ``checkpoint_every`` counts diagnostic ticks; ``final.peqc`` is always
    written on success.
    """
    _prepare(cfg)
    outdir = cfg.resolved_output_dir()
    outdir.mkdir(parents=True, exist_ok=True)
    s0 = build_initial_state(cfg) if s0 is None else s0
    params = cfg.params()
    diag = DiagnosticsCSV(outdir / "diagnostics.csv", params)
    sinks = [diag, _CheckpointSink(outdir, params, cfg.checkpoint_every)]
    try:
        final = run(s0, params, cfg.step_config(), sinks, every=cfg.output_every)
    finally:
        diag.close()
    write_checkpoint(outdir / "final.peqc", final, params)
    return final


def _d(a: State, b: State) -> float:
    da = [x - y for x, y in zip(a.arrays(), b.arrays())]
    g = a.grid
    return float(sum(np.sum(x * x) for x in da) * g.cell_volume)


def twin_experiment(cfg: RunConfig, delta: float, s0: State | None = None) -> GronwallReport:
    """Run s0 and s0 + delta * perturbation in lockstep.

    Both runs take identical step sizes (CFL from the unperturbed run when
    ``dt`` is auto).  Logged every ``output_every`` steps: the squared L2
    difference d(t) and phi(t) of the perturbed run.
    """
    _prepare(cfg)
    if delta < 0:
        raise ValueError("delta must be >= 0")
    base = build_initial_state(cfg) if s0 is None else s0
    g = base.grid
    pert = twin_perturbation(g)
    other = State.from_arrays(g, *(a + delta * b for a, b in zip(base.arrays(), pert.arrays())),
                              time=base.time)
    params = cfg.params()
    sc = cfg.step_config()
    stepper = Stepper(g, params, sc.scheme)

    times, ds, phis = [base.time], [_d(other, base)], [phi(other)]
    ua, ub = base.spectral(), other.spectral()
    sa, sb = base, other
    t, n = base.time, 0
    t0 = base.time
    while t < cfg.t_end - 1e-12 * max(1.0, cfg.t_end):
        dt = sc.dt if sc.dt is not None else cfl_dt(sa, params, sc)
        remaining = cfg.t_end - t
        if dt >= remaining * (1 - 1e-12):
            dt = remaining
        ua, ub = stepper(ua, dt), stepper(ub, dt)
        n += 1
        if dt == remaining:
            t = cfg.t_end
        else:
            t = t0 + n * dt if sc.dt is not None else t + dt
        _check_blowup(g, ua, t, sc.blowup_guard)
        _check_blowup(g, ub, t, sc.blowup_guard)
        last = t >= cfg.t_end - 1e-12 * max(1.0, cfg.t_end)
        if sc.dt is None or n % cfg.output_every == 0 or last:
            sa = State.from_spectral(g, *ua, time=t)
            sb = State.from_spectral(g, *ub, time=t)
        if n % cfg.output_every == 0 or last:
            times.append(t)
            ds.append(_d(sb, sa))
            phis.append(phi(sb))
    times, ds, phis = np.array(times), np.array(ds), np.array(phis)
    d0 = ds[0]
    C = fit_gronwall_constant(times, phis, ds, d0)
    with np.errstate(over="ignore"):
        env = gronwall_envelope(times, phis, C, d0)
    return GronwallReport(d0=d0, times=times, d=ds, phi=phis, envelope=env, C=C)


def write_twin_report(report: GronwallReport, outdir, delta: float) -> None:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    write_csv(outdir / "twin_report.csv", ["time", "d", "phi", "envelope"],
              zip(report.times, report.d, report.phi, report.envelope))
    amp = report.d[-1] / report.d0 if report.d0 > 0 else 0.0
    write_csv(outdir / "twin_summary.csv", ["delta", "d0", "d_end", "amplification", "C"],
              [(delta, report.d0, report.d[-1], amp, report.C)])


@dataclass(frozen=True)
class EpsilonReport:
    eps: np.ndarray
    D: np.ndarray
    sup_h2: np.ndarray
    panels: list[DiagRecord]

    @property
    def uniform_ratio(self) -> float:
        """max over eps of sup_t H2 panel divided by the min over eps."""
        return float(self.sup_h2.max() / self.sup_h2.min())

    @property
    def loglog_slope(self) -> float:
        """Least-squares slope of log D against log eps over eps > 0."""
        pos = self.eps > 0
        return float(np.polyfit(np.log(self.eps[pos]), np.log(self.D[pos]), 1)[0])


def epsilon_experiment(cfg: RunConfig, eps_list, s0: State | None = None) -> EpsilonReport:
    """Run identical initial data for every eps and compare with eps = 0.

    All runs share one fixed step size (``dt``, or the CFL step of the
    initial state) so differences reflect eps alone.
    """
    _prepare(cfg)
    eps_list = [float(e) for e in eps_list]
    if not eps_list:
        raise ValueError("eps_list is empty")
    if 0.0 not in eps_list:
        raise ValueError("eps_list must include 0 as the baseline")
    s0 = build_initial_state(cfg) if s0 is None else s0
    sc = cfg.step_config()
    dt = sc.dt if sc.dt is not None else cfl_dt(s0, cfg.params(), sc)
    finals, sups, panels = {}, {}, {}
    for eps in sorted(set(eps_list)):
        params = cfg.params(eps=eps)
        sup = [h2_panel(s0)]
        final = run(s0, params, replace(sc, dt=dt), [lambda s: sup.append(h2_panel(s))])
        finals[eps], sups[eps] = final, max(sup)
        panels[eps] = norm_panel(final, params)
        log.info("eps=%g done, sup H2=%g", eps, sups[eps])
    ref = finals[0.0]
    D = [_state_distance(finals[eps], ref) for eps in eps_list]
    return EpsilonReport(np.array(eps_list), np.array(D), np.array([sups[e] for e in eps_list]),
                         [panels[e] for e in eps_list])


def _state_distance(a: State, b: State) -> float:
    """||v_a - v_b||_2 + ||T_a - T_b||_2."""
    g = a.grid
    dv = [x - y for x, y in zip(a.arrays()[:2], b.arrays()[:2])]
    dT = a.T.data - b.T.data
    return float(np.sqrt(sum(np.sum(x * x) for x in dv) * g.cell_volume)
                 + np.sqrt(np.sum(dT * dT) * g.cell_volume))


def write_epsilon_report(report: EpsilonReport, outdir) -> None:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    header = ["eps", "D", "sup_H2"] + DiagRecord.columns()
    rows = [[e, d, s] + rec.values()
            for e, d, s, rec in zip(report.eps, report.D, report.sup_h2, report.panels)]
    write_csv(outdir / "epsilon_report.csv", header, rows)
