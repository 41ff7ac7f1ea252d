"""Run configuration: presets for the paper-style figures, INI files, pi-literals.

Precedence: preset < config file < explicit CLI flags.  The fully resolved
configuration is echoed into every metadata sidecar and round-trips to an
identical run.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, asdict, fields
from math import pi

from .errors import ValidationError
from .model import ChainSpec, KernelMode, StepDrive


def parse_quantity(text) -> float:
    """Float with an optional 'pi' suffix: '0.25pi' -> 0.25*pi, 'pi' -> pi."""
    if isinstance(text, (int, float)):
        return float(text)
    s = str(text).strip().lower().replace(" ", "")
    if s.endswith("pi"):
        head = s[:-2]
        if head in ("", "+", "-"):
            head += "1"
        try:
            return float(head) * pi
        except ValueError as exc:
            raise ValidationError(f"cannot parse quantity {text!r}") from exc
    try:
        return float(s)
    except ValueError as exc:
        raise ValidationError(f"cannot parse quantity {text!r}") from exc


# figure-caption parameter sets; values are parse_quantity inputs
PRESETS = {
    "fig1": dict(L=800, g=1.0, lam=20.0, T="0.25pi", tau="0.1pi", a1=0.0, a2=0.0,
                 horizon=20.0, scan="0:40:0.5", axis="a2"),
    "fig2": dict(L=800, g=1.0, lam=20.0, T="0.05pi", tau="0.02pi", a1=0.0, a2=36.0,
                 horizon=100.0),
    "fig3tau": dict(L=800, g=1.0, lam=20.0, T="0.25pi", tau="0.1pi", a1=0.0, a2=3.5,
                    horizon=100.0, scan="0.03:0.75:0.03", axis="tau"),
    "fig3T": dict(L=800, g=1.0, lam=20.0, T="0.25pi", tau="0.1pi", a1=0.0, a2=3.5,
                  horizon=100.0, scan="0.4:3.1:0.09", axis="T"),
    "fig4": dict(L=800, g=1.0, lam=20.0, T="0.4pi", tau="0.2pi", a1=-10.0, a2=10.0,
                 horizon=50.0, scan="0.5:35:0.5", axis="sym_a2"),
    "fig5": dict(L=800, g=1.0, lam=20.0, T="0.25pi", tau="0.1pi", a1=0.0, a2=3.2,
                 horizon=100.0),
    "fig6": dict(L=800, g=1.0, lam=20.0, T="0.25pi", tau="0.1pi", a1=0.0, a2=3.2,
                 horizon=100.0),
}

_FLOATISH = {"J", "g", "lam", "T", "tau", "a1", "a2", "horizon", "h", "gap_tol",
             "w_min", "alpha", "beta", "profile_t", "ktol"}
_INTISH = {"L", "samples_per_period", "k0", "kstep", "kmax", "j_loc", "workers", "nt"}


@dataclass
class RunConfig:
    # chain
    L: int = 800
    J: float = 1.0
    g: float = 1.0
    lam: float = 20.0
    kernel_mode: str = "open_chain"
    # drive
    a1: float = 0.0
    a2: float = 0.0
    tau: float = parse_quantity("0.1pi")
    T: float = parse_quantity("0.25pi")
    # solver options
    h: float | None = None
    horizon: float = 20.0
    samples_per_period: int = 40
    k0: int = 12
    kstep: int = 4
    ktol: float = 1e-8
    kmax: int = 40
    gap_tol: float | None = None
    w_min: float = 0.25
    j_loc: int = 20
    workers: int | None = None
    nt: int = 201
    # superposition / profile extras
    alpha: float = 0.7071067811865476
    beta: float = 0.7071067811865476
    profile_t: float | None = None     # defaults to T/4
    # sweep
    scan: str | None = None            # "start:stop:step"
    axis: str = "a2"
    # bookkeeping
    preset: str | None = None
    outdir: str = "out"

    def chain(self) -> ChainSpec:
        return ChainSpec(L=self.L, J=self.J, g=self.g, lam=self.lam,
                         kernel_mode=KernelMode(self.kernel_mode))

    def drive(self) -> StepDrive:
        return StepDrive(a1=self.a1, a2=self.a2, tau=self.tau, T=self.T)

    def scan_triplet(self):
        if not self.scan:
            raise ValidationError("no scan range configured")
        parts = self.scan.split(":")
        if len(parts) != 3:
            raise ValidationError(f"scan must be start:stop:step, got {self.scan!r}")
        return tuple(parse_quantity(p) for p in parts)

    def resolved(self) -> dict:
        return asdict(self)


_FIELDS = {f.name for f in fields(RunConfig)}
_CANON = {f.lower(): f for f in _FIELDS}   # INI parsing lowercases keys


def _coerce(key: str, value):
    if value is None:
        return None
    if key in _INTISH:
        return int(value)
    if key in _FLOATISH:
        return parse_quantity(value)
    return value


def build_config(preset: str | None = None, config_file: str | None = None,
                 overrides: dict | None = None) -> RunConfig:
    """Merge preset, INI file, and explicit overrides into a RunConfig."""
    data: dict = {}
    if preset:
        if preset not in PRESETS:
            raise ValidationError(f"unknown preset {preset!r}; "
                                  f"choose from {sorted(PRESETS)}")
        data.update(PRESETS[preset])
        data["preset"] = preset
    if config_file:
        cp = configparser.ConfigParser()
        read = cp.read(config_file)
        if not read:
            raise OSError(f"config file not found: {config_file}")
        for section in cp.sections():
            for key, val in cp.items(section):
                if key not in _CANON:
                    raise ValidationError(f"unknown config key [{section}] {key}")
                data[_CANON[key]] = val
    for key, val in (overrides or {}).items():
        if val is None:
            continue
        if key.lower() not in _CANON:
            raise ValidationError(f"unknown option {key}")
        data[_CANON[key.lower()]] = val
    clean = {k: _coerce(k, v) for k, v in data.items() if k in _FIELDS}
    cfg = RunConfig(**clean)
    cfg.chain()   # validate now
    cfg.drive()
    return cfg


def config_from_resolved(resolved: dict) -> RunConfig:
    """Rebuild a RunConfig from a metadata sidecar echo (exact round trip)."""
    return RunConfig(**{k: v for k, v in resolved.items() if k in _FIELDS})
