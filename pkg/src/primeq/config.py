"""Flat ``key = value`` run configuration with last-wins overrides."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .fields import Params
from .grid import make_grid
from .timestepper import SCHEMES, StepConfig

__all__ = ["RunConfig", "ConfigError", "parse_config", "load_config", "OUTPUT_DIR_ENV",
           "THREADS_ENV"]

OUTPUT_DIR_ENV = "PRIMEQ_OUTPUT_DIR"
THREADS_ENV = "PRIMEQ_THREADS"


class ConfigError(ValueError):
    pass


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_dt(text: str):
    return None if text.strip().lower() == "auto" else float(text)


def _parse_floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x.strip())


@dataclass(frozen=True)
class RunConfig:
    # grid
    nx: int = 32
    ny: int = 32
    nz: int = 32
    h: float = 1.0
    # physics
    f0: float = 0.0
    nu_h: float = 1.0
    nu_z: float = 1.0
    kappa_h: float = 1.0
    eps: float = 0.0
    # time stepping
    dt: float | None = None
    cfl: float = 0.5
    t_end: float = 1.0
    scheme: str = "RK3-IMF"
    resymmetrize_every: int = 0
    blowup_guard: float = 1e8
    # initial condition: preset name or "checkpoint"
    ic: str = "random-H"
    checkpoint: str = ""
    seed: int = 0
    amplitude: float = 0.5
    kmax: int = 3
    # output
    output_dir: str = "output"
    output_every: int = 1
    checkpoint_every: int = 0
    deterministic: bool = True
    # harnesses
    delta: float = 1e-5
    eps_list: tuple[float, ...] = field(default=(0.0, 1e-4, 1e-3, 1e-2))

    def __post_init__(self):
        for name in ("nu_h", "nu_z", "kappa_h", "eps", "t_end", "delta"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")
        if self.h <= 0:
            raise ConfigError("h must be > 0")
        if self.scheme not in SCHEMES:
            raise ConfigError(f"unknown scheme {self.scheme!r}")
        if self.output_every < 1:
            raise ConfigError("output_every must be >= 1")
        if any(e < 0 for e in self.eps_list):
            raise ConfigError("eps_list values must be >= 0")

    def grid(self):
        try:
            return make_grid(self.nx, self.ny, self.nz, self.h)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def params(self, **kw) -> Params:
        base = dict(h=self.h, f0=self.f0, nu_h=self.nu_h, nu_z=self.nu_z,
                    kappa_h=self.kappa_h, eps=self.eps)
        base.update(kw)
        return Params(**base)

    def step_config(self) -> StepConfig:
        try:
            return StepConfig(dt=self.dt, t_end=self.t_end, cfl=self.cfl, scheme=self.scheme,
                              resymmetrize_every=self.resymmetrize_every,
                              blowup_guard=self.blowup_guard)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def resolved_output_dir(self) -> Path:
        env = os.environ.get(OUTPUT_DIR_ENV)
        return Path(env) if env else Path(self.output_dir)


_PARSERS = {
    "int": int,
    "float": float,
    "str": str,
    "bool": _parse_bool,
    "float | None": _parse_dt,
    "tuple[float, ...]": _parse_floats,
}


def parse_config(lines, overrides=(), base: RunConfig | None = None) -> RunConfig:
    """Parse ``key = value`` lines, then apply ``key=value`` overrides in order."""
    types = {f.name: f.type for f in fields(RunConfig)}
    values = {}
    items = []
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if line:
            items.append((f"line {lineno}", line))
    items.extend(("override", o) for o in overrides)
    for where, item in items:
        if "=" not in item:
            raise ConfigError(f"{where}: expected key=value, got {item!r}")
        key, val = (s.strip() for s in item.split("=", 1))
        if key not in types:
            raise ConfigError(f"{where}: unknown key {key!r}")
        try:
            values[key] = _PARSERS[types[key]](val)
        except ValueError as exc:
            raise ConfigError(f"{where}: bad value for {key}: {exc}") from exc
    try:
        return replace(base or RunConfig(), **values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path=None, overrides=()) -> RunConfig:
    lines = []
    if path is not None:
        try:
            lines = Path(path).read_text().splitlines()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(lines, overrides)
