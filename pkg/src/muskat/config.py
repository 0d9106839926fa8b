"""Run configuration: JSON file, ``MUSKAT_*`` environment overrides, validation."""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Mapping, Optional

from .dynamics import EvolutionOptions
from .errors import ConfigError
from .scenarios import SCENARIOS
from .vorticity_solver import FluidParams, SolverOptions


@dataclass(frozen=True)
class DiagnosticsConfig:
    every: int = 1
    lam: float = 0.0
    strip_xi: float = 0.0
    C: float = 1.0
    h0: float = 1.0


@dataclass(frozen=True)
class ProbeConfig:
    enabled: bool = False
    branch_angle: float = 0.0
    threshold: float = 1e4


@dataclass(frozen=True)
class RunConfig:
    scenario: str = "graph"
    scenario_params: Mapping[str, Any] = field(default_factory=lambda: {"a1": 0.1})
    n_points: int = 64
    fluid: FluidParams = field(default_factory=FluidParams)
    evolution: EvolutionOptions = field(default_factory=lambda: EvolutionOptions(t_end=0.1))
    diagnostics: DiagnosticsConfig = field(default_factory=DiagnosticsConfig)
    probe: ProbeConfig = field(default_factory=ProbeConfig)
    out: str = "muskat-run"
    seed: Optional[int] = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["scenario_params"] = dict(self.scenario_params)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def scenario_arguments(self) -> dict:
        params = dict(self.scenario_params)
        params["n"] = self.n_points
        if self.seed is not None and self.scenario == "graph":
            params.setdefault("seed", self.seed)
        return params

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "RunConfig":
        d = dict(d)
        kw: dict[str, Any] = {}
        try:
            if "fluid" in d:
                kw["fluid"] = _build(FluidParams, d.pop("fluid"), "fluid")
            if "evolution" in d:
                ev = dict(_mapping(d.pop("evolution"), "evolution"))
                if "solver" in ev:
                    ev["solver"] = _build(SolverOptions, ev["solver"], "evolution.solver")
                kw["evolution"] = _build(EvolutionOptions, ev, "evolution")
            if "diagnostics" in d:
                kw["diagnostics"] = _build(DiagnosticsConfig, d.pop("diagnostics"), "diagnostics")
            if "probe" in d:
                kw["probe"] = _build(ProbeConfig, d.pop("probe"), "probe")
            if "scenario_params" in d:
                kw["scenario_params"] = dict(_mapping(d.pop("scenario_params"), "scenario_params"))
            names = {f.name for f in fields(cls)}
            unknown = sorted(set(d) - names)
            if unknown:
                raise ConfigError(f"unknown configuration keys {unknown}")
            kw.update(d)
            cfg = cls(**kw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        return cfg.validated()

    def validated(self) -> "RunConfig":
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; choose from {SCENARIOS}")
        if not isinstance(self.n_points, int) or self.n_points < 16 or self.n_points % 2:
            raise ConfigError(f"n_points must be an even integer >= 16, got {self.n_points!r}")
        g = self.evolution.galerkin_N
        if g is not None and g > self.n_points // 2:
            raise ConfigError(f"galerkin_N={g} exceeds n_points/2")
        dg = self.diagnostics
        if dg.every < 1:
            raise ConfigError("diagnostics.every must be >= 1")
        if dg.lam < 0 or dg.strip_xi < 0 or dg.h0 <= 0 or dg.C < 0:
            raise ConfigError("diagnostics: lam, strip_xi, C must be >= 0 and h0 > 0")
        if self.probe.threshold <= 0:
            raise ConfigError("probe.threshold must be positive")
        if self.evolution.snapshot_every < 0:
            raise ConfigError("evolution.snapshot_every must be >= 0")
        return self


def _mapping(obj, name):
    if not isinstance(obj, Mapping):
        raise ConfigError(f"{name} must be an object")
    return obj


def _build(cls, obj, name):
    obj = dict(_mapping(obj, name))
    allowed = {f.name for f in fields(cls)}
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise ConfigError(f"unknown keys in {name}: {unknown}")
    return cls(**obj)


def load_config(path) -> RunConfig:
    try:
        d = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return RunConfig.from_dict(_mapping(d, "config"))


def _parse_bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off", ""):
        return False
    raise ConfigError(f"cannot read {s!r} as a boolean")


def apply_overrides(cfg: RunConfig, scenario=None, n=None, dt=None, t_end=None, out=None,
                    probe=None, branch_angle=None, seed=None) -> RunConfig:
    """Replace individual settings; ``None`` leaves a setting unchanged."""
    if scenario is not None and scenario != cfg.scenario:
        cfg = replace(cfg, scenario=scenario, scenario_params={})
    if n is not None:
        cfg = replace(cfg, n_points=int(n))
    ev = cfg.evolution
    try:
        if dt is not None:
            ev = replace(ev, dt=float(dt))
        if t_end is not None:
            ev = replace(ev, t_end=float(t_end))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    cfg = replace(cfg, evolution=ev)
    if out is not None:
        cfg = replace(cfg, out=str(out))
    pr = cfg.probe
    if probe is not None:
        pr = replace(pr, enabled=bool(probe))
    if branch_angle is not None:
        pr = replace(pr, branch_angle=float(branch_angle))
    cfg = replace(cfg, probe=pr)
    if seed is not None:
        cfg = replace(cfg, seed=int(seed))
    return cfg.validated()


ENV_KEYS = {
    "MUSKAT_SCENARIO": ("scenario", str),
    "MUSKAT_N": ("n", int),
    "MUSKAT_DT": ("dt", float),
    "MUSKAT_T_END": ("t_end", float),
    "MUSKAT_OUT": ("out", str),
    "MUSKAT_PROBE": ("probe", _parse_bool),
    "MUSKAT_BRANCH_ANGLE": ("branch_angle", float),
    "MUSKAT_SEED": ("seed", int),
}


def env_overrides(environ: Optional[Mapping[str, str]] = None) -> dict:
    environ = os.environ if environ is None else environ
    out = {}
    for key, (name, conv) in ENV_KEYS.items():
        if key in environ:
            try:
                out[name] = conv(environ[key])
            except ValueError as exc:
                raise ConfigError(f"{key}: {exc}") from exc
    return out
