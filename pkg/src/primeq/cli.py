"""Command-line entry points.

Usage::

    python3 -m primeq run      [--config FILE] [key=value ...]
    python3 -m primeq twin     [--config FILE] [--delta D] [--seed S] [key=value ...]
    python3 -m primeq epsilon  [--config FILE] [--eps-list 0,1e-4,...] [key=value ...]
    python3 -m primeq selftest

Exit status: 0 success, 1 selftest failure, 2 configuration error,
3 blow-up, 4 I/O error.  ``PRIMEQ_OUTPUT_DIR`` overrides ``output_dir`` and
``PRIMEQ_THREADS`` sets the FFT worker count.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
import time

import numpy as np

from .config import ConfigError, RunConfig, load_config
from .dynamics import advection, barotropic_project, check_constraint
from .estimates import energy_identity_residual, u_equation_residual
from .experiments import (epsilon_experiment, run_experiment, twin_experiment,
                          write_epsilon_report, write_twin_report)
from .fields import Params, State, norm, w_boundary
from .io import CheckpointError
from .grid import Field3, Grid
from .presets import initial_state, random_h
from .symmetry import extend, restrict, symmetry_residual
from .timestepper import BlowUpError, StepConfig, run, step

__all__ = ["main", "selftest", "EXIT_OK", "EXIT_SELFTEST", "EXIT_CONFIG", "EXIT_BLOWUP",
           "EXIT_IO"]

EXIT_OK, EXIT_SELFTEST, EXIT_CONFIG, EXIT_BLOWUP, EXIT_IO = 0, 1, 2, 3, 4

log = logging.getLogger("primeq")


# --- selftest ---------------------------------------------------------------

def _rel(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    scale = max(np.abs(b).max(), 1e-300)
    return float(np.abs(a - b).max() / scale)


def _band_limited_velocity(g: Grid, seed: int) -> tuple[Field3, Field3]:
    """Random velocity on every mode kept by ``g.dealias_mask``, Nyquist excluded."""
    rng = np.random.default_rng(seed)
    keep = g.dealias_mask.copy()
    for m, n in zip(g.mode_index, g.shape):
        keep &= np.abs(m) < n // 2
    comps = []
    for _ in range(2):
        ch = rng.standard_normal(g.spectral_shape) + 1j * rng.standard_normal(g.spectral_shape)
        comps.append(Field3(g, g.ifft(ch * keep)))
    return barotropic_project(*comps)


def _check_grid(g: Grid) -> float:
    X, Y, Z = g.mesh
    k = np.pi / g.h
    f = np.sin(2 * np.pi * X) * np.cos(4 * np.pi * Y) * np.sin(k * Z)
    fh = g.fft(f)
    errs = [
        _rel(g.ifft(g.deriv_hat(fh, 0)), 2 * np.pi * np.cos(2 * np.pi * X)
             * np.cos(4 * np.pi * Y) * np.sin(k * Z)),
        _rel(g.ifft(g.deriv_hat(fh, 2, 2)), -k**2 * f),
        _rel(g.ifft(fh), f),
        abs(g.inner_hat(fh, fh) - g.inner(f, f)) / g.inner(f, f),
    ]
    return max(errs)


def _check_parity(g: Grid, s: State) -> float:
    half = restrict(s.T)
    back = extend(half, "odd", g)
    return max(symmetry_residual(s) / norm((s.v1, s.v2, s.T)), _rel(back.values, s.T.values))


def _check_constraint(g: Grid, s: State, p: Params) -> float:
    out = run(s, p, StepConfig(dt=1e-3, t_end=5e-3))
    d = check_constraint(out, tol=1e-10)
    bottom, top = w_boundary(out.v1, out.v2)
    return max(d, np.abs(bottom).max(), np.abs(top).max())


def _check_skew(g: Grid) -> float:
    v1, v2 = _band_limited_velocity(g, seed=11)
    worst = 0.0
    for f in (v1, v2):
        a = advection(v1, v2, f)
        scale = norm(a) * norm(f)
        worst = max(worst, abs(g.inner(a.values, f.values)) / scale)
    return worst


def _check_exact(g: Grid) -> float:
    p = Params(h=g.h, f0=0.0, nu_h=1.0, nu_z=1.0, kappa_h=1.0)
    s0 = initial_state("mode-decay", g, amplitude=1.0)
    out = run(s0, p, StepConfig(dt=0.01, t_end=0.1))
    decay = _rel(out.v2.values, s0.v2.values * math.exp(-4 * np.pi**2 * 0.1))

    p_rot = Params(h=g.h, f0=1.0, nu_h=1.0, nu_z=1.0, kappa_h=1.0)
    s0 = initial_state("inertial", g, amplitude=1.0)
    # quarter period: (1, 0) rotates to (0, -1)
    out = run(s0, p_rot, StepConfig(dt=2 * np.pi / 2000, t_end=np.pi / 2))
    inertial = _rel(np.stack(out.arrays()[:2]), np.stack([s0.v2.values, -s0.v1.values]))

    Z = g.mesh[2]
    rest = State.from_arrays(g, 0.0, 0.0, np.sin(np.pi * Z / g.h))
    sc = StepConfig(dt=0.01, t_end=0.1)
    out = rest
    for n in range(1, 11):
        out = step(out, p, sc, 0.01, n)
    steady = max(np.abs(a - b).max() for a, b in zip(out.arrays(), rest.arrays()))
    return max(decay, inertial, steady)


def selftest(dealias_cutoff=None, out=None) -> bool:
    """Run the invariant suite on a 16^3 grid; print one line per item.

    ``dealias_cutoff`` overrides the 2/3-rule band (fault injection).
    """
    out = sys.stdout if out is None else out
    g = Grid(16, 16, 16, 1.0, dealias_cutoff=dealias_cutoff)
    p = Params(h=1.0, f0=0.5, nu_h=0.5, nu_z=0.5, kappa_h=0.5, eps=0.0)
    s = random_h(g, seed=3, amplitude=0.5)
    items = [
        ("grid exactness", lambda: _check_grid(g), 1e-12),
        ("parity", lambda: _check_parity(g, s), 1e-12),
        ("constraint", lambda: _check_constraint(g, s, p), 1e-10),
        ("skew-symmetry", lambda: _check_skew(g), 1e-10),
        ("energy residual", lambda: energy_identity_residual(s, p), 1e-8),
        ("u-equation residual", lambda: u_equation_residual(s, p), 1e-9),
        ("exact solutions", lambda: _check_exact(g), 1e-6),
    ]
    ok = True
    t0 = time.perf_counter()
    for name, fn, tol in items:
        try:
            value = fn()
            passed = bool(np.isfinite(value) and value < tol)
            detail = f"{value:.3e} (tol {tol:.0e})"
        except Exception as exc:  # noqa: BLE001 - a failing item must not abort the suite
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'}  {name:<22s} {detail}", file=out)
    print(f"selftest {'passed' if ok else 'FAILED'} in {time.perf_counter() - t0:.1f} s",
          file=out)
    return ok


# --- argument handling ------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="primeq", description=__doc__.split("\n\n")[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="key = value configuration file")
        sp.set_defaults(overrides=[])
        sp.epilog = "Trailing key=value arguments override the configuration, last wins."

    common(sub.add_parser("run", help="integrate one configuration"))
    tw = sub.add_parser("twin", help="twin-run continuous dependence report")
    common(tw)
    tw.add_argument("--delta", type=float)
    tw.add_argument("--seed", type=int)
    ep = sub.add_parser("epsilon", help="vanishing vertical diffusivity study")
    common(ep)
    ep.add_argument("--eps-list", help="comma-separated eps values, must include 0")
    sub.add_parser("selftest", help="run the invariant suite on a 16^3 grid")
    return ap


def _load(args) -> RunConfig:
    overrides = list(args.overrides)
    if getattr(args, "seed", None) is not None:
        overrides.append(f"seed={args.seed}")
    if getattr(args, "delta", None) is not None:
        overrides.append(f"delta={args.delta!r}")
    if getattr(args, "eps_list", None) is not None:
        overrides.append(f"eps_list={args.eps_list}")
    return load_config(args.config, overrides)


def _dispatch(args) -> int:
    if args.command == "selftest":
        return EXIT_OK if selftest() else EXIT_SELFTEST
    cfg = _load(args)
    outdir = cfg.resolved_output_dir()
    if args.command == "run":
        final = run_experiment(cfg)
        log.info("finished at t=%.6g; output in %s", final.time, outdir)
    elif args.command == "twin":
        report = twin_experiment(cfg, cfg.delta)
        write_twin_report(report, outdir, cfg.delta)
        log.info("twin: d0=%.3e d_end=%.3e C=%g", report.d0, report.d[-1], report.C)
    elif args.command == "epsilon":
        if 0.0 not in cfg.eps_list:
            raise ConfigError("eps_list must include 0 as the baseline")
        report = epsilon_experiment(cfg, cfg.eps_list)
        write_epsilon_report(report, outdir)
        log.info("epsilon: slope=%.3f uniform ratio=%.3f", report.loglog_slope
                 if np.count_nonzero(report.eps) >= 2 else float("nan"), report.uniform_ratio)
    return EXIT_OK


def main(argv=None) -> int:
    ap = _parser()
    args, rest = ap.parse_known_args(argv)
    bad = [r for r in rest if "=" not in r or r.startswith("-")]
    if bad or (rest and args.command == "selftest"):
        ap.error(f"unrecognized arguments: {' '.join(bad or rest)}")
    args.overrides = rest
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _dispatch(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BlowUpError as exc:
        print(f"blow-up: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    except (OSError, CheckpointError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
