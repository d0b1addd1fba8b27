"""Top-level run driver: couple the steppers, keep the ledger, emit files.

A run advances the coupled system until t_end or until steady state is
detected (all three thresholds strict). Outputs land under the configured
output directory and nowhere else: ledger.csv, numbered checkpoint/
snapshot pairs at the checkpoint cadence, final state files and
report.json. On error the partial ledger and the last state are flushed
before the exception propagates.
"""

import json
import os
from dataclasses import dataclass

from vesflow.config import RunConfig, Setup, build_setup
from vesflow.flow import NsStepParams
from vesflow.io import write_checkpoint, write_ledger_csv, write_snapshot
from vesflow.phase import ChStepParams, stable_dt_hint
from vesflow.simulation import (
    ConvergenceReport,
    DissipationLedger,
    SimState,
    build_report,
    detect_steady,
    make_state,
    step_coupled,
)

__all__ = ["RunResult", "run"]


@dataclass
class RunResult:
    config: RunConfig
    setup: Setup
    checkpoints: list
    ledger: DissipationLedger
    report: ConvergenceReport
    final_state: SimState


def _write_state_files(state: SimState, outdir, stem):
    write_checkpoint(state.psi, state.u, os.path.join(outdir, f"{stem}.bin"))
    write_snapshot(
        state.psi,
        state.z,
        state.u,
        os.path.join(outdir, f"{stem}.vtk"),
        title=f"vesflow t={state.t:.9g} step={state.step}",
    )


def run(cfg: RunConfig, output_dir=None, log=None) -> RunResult:
    """Execute a configured simulation; returns checkpoints, ledger, report."""
    setup = build_setup(cfg)
    p = setup.params
    st = cfg.stepping
    ch_params = ChStepParams(dt=st.dt, stab=setup.stab)
    ns_params = NsStepParams(dt=st.dt)
    tol = cfg.tolerances

    outdir = output_dir if output_dir is not None else cfg.output_dir
    if outdir:
        os.makedirs(outdir, exist_ok=True)
    if log:
        hint = stable_dt_hint(p, setup.grid)
        log(f"dt = {st.dt:.3e} (advisory explicit-part hint {hint:.3e}), "
            f"stab = {setup.stab:.3g}, grid {setup.grid.nx}x{setup.grid.ny}")

    state = make_state(0.0, 0, setup.psi0, setup.u0, p)
    ledger = DissipationLedger(p)
    ledger.append_state(state)
    checkpoints = [state.copy()]
    if outdir:
        _write_state_files(state, outdir, "checkpoint_000000")

    n_steps = max(1, int(round(st.t_end / st.dt)))
    steady = False
    steady_time = None

    try:
        prev = state
        for k in range(1, n_steps + 1):
            prev = state
            state = step_coupled(state, p, ch_params, ns_params)
            on_ledger = (k % st.ledger_every == 0) or (k == n_steps)
            on_checkpoint = (k % st.checkpoint_every == 0)
            if on_ledger:
                ledger.append_state(state)
            if on_checkpoint:
                checkpoints.append(state.copy())
                if outdir:
                    _write_state_files(state, outdir, f"checkpoint_{k:06d}")
            if on_ledger and detect_steady(
                [prev, state], tol.steady_u, tol.steady_z, tol.steady_dpsi
            ):
                steady = True
                steady_time = state.t
                if log:
                    log(f"steady state detected at t = {state.t:.6g} (step {k})")
                break
    except Exception:
        if outdir:
            write_ledger_csv(ledger, os.path.join(outdir, "ledger.csv"))
            _write_state_files(state, outdir, "checkpoint_error")
        raise

    if checkpoints[-1].step != state.step:
        checkpoints.append(state.copy())
    if ledger.rows[-1].step != state.step:
        ledger.append_state(state)

    report = build_report(ledger, checkpoints)
    report.steady_reached = steady
    report.steady_time = steady_time

    if outdir:
        write_ledger_csv(ledger, os.path.join(outdir, "ledger.csv"))
        _write_state_files(state, outdir, "checkpoint_final")
        with open(os.path.join(outdir, "report.json"), "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=2)

    return RunResult(
        config=cfg,
        setup=setup,
        checkpoints=checkpoints,
        ledger=ledger,
        report=report,
        final_state=state,
    )
