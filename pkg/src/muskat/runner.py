"""Run driver: evolve a scenario, log diagnostics, persist states, report termination."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from .config import RunConfig
from .conformal_splat import transform_curve
from .diagnostics import CSV_COLUMNS, diagnose, g_proxy
from .dynamics import evolve, velocity
from .errors import (
    BlowUpError,
    ClearanceError,
    ConditioningError,
    IterationError,
    SelfIntersectionError,
    SingularityError,
)
from .persistence import CSVWriter, Snapshot, save, write_json
from .scenarios import scenario

log = logging.getLogger(__name__)

EXIT_COMPLETED = 0
EXIT_SINGULAR = 2
EXIT_CONFIG = 3


@dataclass(frozen=True)
class RunResult:
    reason: str
    t: float
    steps: int
    out: Path
    message: str = ""

    @property
    def exit_code(self) -> int:
        return EXIT_COMPLETED if self.reason == "completed" else EXIT_SINGULAR


class _HTracker:
    """Incremental ``h(t) = (h0 + 1) exp(-10 int G) - 1`` with trapezoidal ``int G``."""

    def __init__(self, h0: float):
        self.h0 = h0
        self.I = 0.0
        self.last: Optional[tuple[float, float]] = None

    def update(self, t: float, G: float) -> float:
        if self.last is not None:
            t0, g0 = self.last
            if t > t0:
                self.I += 0.5 * (G + g0) * (t - t0)
        self.last = (t, G)
        return self.h0 * math.exp(-10.0 * self.I) + math.expm1(-10.0 * self.I)


def run(cfg: RunConfig) -> RunResult:
    """Execute a run; artifacts land in ``cfg.out``.

    Writes ``config.json``, ``diagnostics.csv``, optional ``snapshots/``,
    ``final.json`` (last finite state), ``termination.json`` and, when the
    probe triggers, ``probe_tilde.json``.
    """
    cfg = cfg.validated()
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.json").write_text(cfg.to_json())

    curve = scenario(cfg.scenario, cfg.scenario_arguments())
    params = cfg.fluid
    opts = cfg.evolution
    dg = cfg.diagnostics
    h = _HTracker(dg.h0)
    state, t, step = curve, 0.0, 0
    probed = False
    reason, message = "completed", ""

    csv = CSVWriter(out / "diagnostics.csv")
    try:
        n_steps = None
        for step, t, state in evolve(curve, params, opts):
            if step == 0:
                dt = opts.time_step(state.n_points, params.R)
                n_steps = int(math.ceil(opts.t_end / dt - 1e-12)) if opts.t_end > 0 else 0
            last = step == n_steps
            if step % dg.every == 0 or last:
                vel = velocity(state, params, opts)
                rec = diagnose(state, params, t, dg.lam, dg.strip_xi, dg.C, opts=opts, vel=vel)
                G = g_proxy(rec.arc_chord_max, rec.sobolev_h4, dg.C)
                rec = replace(rec, h_of_t=h.update(t, G))
                csv.write(rec)
                if cfg.probe.enabled and not probed and rec.arc_chord_max > cfg.probe.threshold:
                    tilde = transform_curve(state, cfg.probe.branch_angle)
                    save(out / "probe_tilde.json",
                         Snapshot(tilde.curve, t, "tilde", cfg.probe.branch_angle))
                    probed = True
                    log.info("probe triggered at t=%g (arc-chord %.3e)", t, rec.arc_chord_max)
            if opts.snapshot_every and step % opts.snapshot_every == 0:
                save(out / "snapshots" / f"snap_{step:06d}.json", state, t)
    except BlowUpError as exc:
        reason, message = "blow-up", str(exc)
        if exc.state is not None:
            state = exc.state
        if exc.t is not None and not math.isnan(exc.t):
            t = exc.t
    except SelfIntersectionError as exc:
        reason, message = "singular-kernel", str(exc)
    except (ClearanceError, SingularityError) as exc:
        reason, message = "clearance", str(exc)
    except (IterationError, ConditioningError) as exc:
        reason, message = "blow-up", f"vorticity solve failed: {exc}"
    finally:
        csv.close()

    save(out / "final.json", state, t)
    write_json(out / "termination.json", {
        "reason": reason,
        "t": t,
        "step": step,
        "message": message,
        "columns": list(CSV_COLUMNS),
    })
    return RunResult(reason, t, step, out, message)
