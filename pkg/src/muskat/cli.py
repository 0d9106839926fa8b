"""Command line entry point: ``muskat {run,diagnose,probe,sweep}``."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .config import RunConfig, apply_overrides, env_overrides, load_config
from .conformal_splat import (
    TildeState,
    tilde_rt_energy,
    tilde_sigma,
    tilde_step_rk4,
    tilde_velocity,
    transform_curve,
)
from .diagnostics import DiagRecord, diagnose, format_float
from .dynamics import velocity
from .errors import ClearanceError, ConfigError, MuskatError, SingularityError, SnapshotFormatError
from .persistence import Snapshot, load, save
from .runner import EXIT_COMPLETED, EXIT_CONFIG, EXIT_SINGULAR, run
from .scenarios import SCENARIOS, scenario
from .spectral_curve import arc_chord

log = logging.getLogger("muskat")


def _base_config(args) -> RunConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    env = env_overrides()
    cfg = apply_overrides(cfg, **env)
    return cfg


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--out", help="output directory")
    p.add_argument("--scenario", choices=SCENARIOS)
    p.add_argument("--n", type=int, help="grid points (even, >= 16)")
    p.add_argument("--dt", type=float, help="time step (default: stability rule)")
    p.add_argument("--t-end", type=float, dest="t_end")
    p.add_argument("--probe", action="store_true", default=None,
                   help="emit a tilde snapshot when the arc-chord threshold is crossed")
    p.add_argument("--branch-angle", type=float, dest="branch_angle")
    p.add_argument("--seed", type=int, help="seed for random graph phases")


def _cli_overrides(args) -> dict:
    keys = ("scenario", "n", "dt", "t_end", "out", "probe", "branch_angle", "seed")
    return {k: getattr(args, k, None) for k in keys if getattr(args, k, None) is not None}


def cmd_run(args) -> int:
    cfg = apply_overrides(_base_config(args), **_cli_overrides(args))
    res = run(cfg)
    print(f"{res.reason} t={format_float(res.t)} steps={res.steps} out={res.out}")
    if res.message:
        print(res.message, file=sys.stderr)
    return res.exit_code


def _tilde_report(state: TildeState, cfg: RunConfig) -> dict:
    vel = tilde_velocity(state, cfg.fluid, cfg.evolution)
    _, m = tilde_sigma(state, vel.vorticity, vel.br, cfg.fluid)
    en = tilde_rt_energy(state, cfg.fluid, cfg.diagnostics.lam, cfg.diagnostics.strip_xi,
                         cfg.diagnostics.C, opts=cfg.evolution, vel=vel)
    rep = {"arc_chord": arc_chord(state.curve).value, "m_Q2sigma": m,
           "rt_energy": en.value}
    for l, v in enumerate(state.clearances):
        rep[f"m_q{l}"] = float(v)
    return rep


def cmd_diagnose(args) -> int:
    cfg = _base_config(args)
    snap = load(args.snapshot)
    if snap.domain == "physical":
        dg = cfg.diagnostics
        rec = diagnose(snap.curve, cfg.fluid, snap.t, dg.lam, dg.strip_xi, dg.C,
                       opts=cfg.evolution)
        print(DiagRecord.csv_header())
        print(rec.csv_row())
    else:
        state = TildeState.from_curve(snap.curve, snap.branch_angle or 0.0)
        rep = _tilde_report(state, cfg)
        print(",".join(["t"] + list(rep)))
        print(",".join(format_float(v) for v in [snap.t] + list(rep.values())))
    return EXIT_COMPLETED


def cmd_probe(args) -> int:
    cfg = _base_config(args)
    snap = load(args.snapshot)
    angle = args.branch_angle if args.branch_angle is not None else cfg.probe.branch_angle
    if snap.domain == "physical":
        state = transform_curve(snap.curve, angle)
    else:
        state = TildeState.from_curve(snap.curve, snap.branch_angle or 0.0)
    out = Path(args.out)
    save(out / "tilde_000000.json", Snapshot(state.curve, snap.t, "tilde", state.branch_angle))
    lines = []
    t = snap.t
    code = EXIT_COMPLETED
    try:
        for k in range(args.steps + 1):
            if k:
                state = tilde_step_rk4(state, cfg.fluid, args.dt, cfg.evolution)
                t += args.dt
            rep = _tilde_report(state, cfg)
            if k == 0:
                lines.append(",".join(["t"] + list(rep)))
            lines.append(",".join(format_float(v) for v in [t] + list(rep.values())))
    except MuskatError as exc:
        print(f"probe stopped: {exc}", file=sys.stderr)
        code = EXIT_SINGULAR
    save(out / "tilde_final.json", Snapshot(state.curve, t, "tilde", state.branch_angle))
    (out / "probe.csv").write_text("\n".join(lines) + "\n")
    print("\n".join(lines))
    return code


def _parse_value(s: str):
    try:
        return int(s)
    except ValueError:
        return float(s)


def cmd_sweep(args) -> int:
    over = _cli_overrides(args)
    over.setdefault("t_end", 0.0)
    cfg = apply_overrides(_base_config(args), **over)
    values = [_parse_value(v) for v in args.values.split(",") if v]
    if not values:
        raise ConfigError("--values is empty")
    header = ["value", "reason", "arc_chord_max", "sigma_min", "tilde_arc_chord",
              "m_q0", "m_q1", "m_q2", "m_q3", "m_q4"]
    rows = [",".join([args.param] + header[1:])]
    worst = EXIT_COMPLETED
    for v in values:
        params = dict(cfg.scenario_params)
        params[args.param] = v
        sub = replace(cfg, scenario_params=params,
                      out=str(Path(cfg.out) / f"{args.param}={v}"))
        if sub.evolution.t_end > 0:
            res = run(sub)
            curve = load(res.out / "final.json").curve
            reason = res.reason
            worst = max(worst, res.exit_code)
        else:
            curve = scenario(sub.scenario, sub.scenario_arguments())
            reason = "initial"
        vel = velocity(curve, sub.fluid, sub.evolution)
        rec = diagnose(curve, sub.fluid, 0.0, opts=sub.evolution, vel=vel)
        try:
            st = transform_curve(curve, sub.probe.branch_angle)
            tilde = [arc_chord(st.curve).value] + [float(c) for c in st.clearances]
        except (ClearanceError, SingularityError):
            tilde = [np.nan] * 6
        rows.append(",".join([str(v), reason] + [format_float(x) for x in
                                                 [rec.arc_chord_max, rec.sigma_min] + tilde]))
    text = "\n".join(rows) + "\n"
    Path(cfg.out).mkdir(parents=True, exist_ok=True)
    (Path(cfg.out) / "sweep.csv").write_text(text)
    print(text, end="")
    return worst


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="muskat", description="One-phase Muskat contour dynamics")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="evolve a scenario")
    _add_run_flags(r)
    r.set_defaults(func=cmd_run)

    d = sub.add_parser("diagnose", help="diagnostics of a snapshot")
    d.add_argument("snapshot")
    d.add_argument("--config")
    d.set_defaults(func=cmd_diagnose)

    pr = sub.add_parser("probe", help="transform a snapshot and step the tilde system")
    pr.add_argument("snapshot")
    pr.add_argument("--config")
    pr.add_argument("--out", required=True)
    pr.add_argument("--steps", type=int, default=0)
    pr.add_argument("--dt", type=float, default=1e-3)
    pr.add_argument("--branch-angle", type=float, dest="branch_angle")
    pr.set_defaults(func=cmd_probe)

    s = sub.add_parser("sweep", help="scan one scenario parameter")
    _add_run_flags(s)
    s.add_argument("--param", required=True)
    s.add_argument("--values", required=True, help="comma separated")
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SnapshotFormatError as exc:
        print(f"snapshot error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, MuskatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SINGULAR if isinstance(exc, MuskatError) else 1


if __name__ == "__main__":
    sys.exit(main())
