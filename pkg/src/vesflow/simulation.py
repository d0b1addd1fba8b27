"""Coupled time loop, dissipation ledger, and long-time diagnostics.

The per-step energy balance that the ledger certifies is

    dE/dt + nu |grad u|^2 + lam * gamma * |grad z|^2 = 0,

with E the total (kinetic + lam * bending) energy. Each ledger row
records the backward-difference dE/dt, both dissipation terms, and their
sum R, which measures the departure of the discrete trajectory from the
exact balance; R shrinks linearly with dt.

Long-time diagnostics mirror the structural results the scheme is
expected to reproduce: the phase average is conserved, the energy
decreases to a limit E_inf, velocity and the chemical-force gradient
decay, the trajectory is Cauchy and lands on a critical point of the
bending energy (z = 0), and the third-order norm of the phase stays
bounded. A decay-exponent fit of log|z| against log(E - E_inf) is
reported as a descriptive statistic.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from vesflow.energy import (
    EnergyBreakdown,
    PhysParams,
    bending_energy,
    total_energy,
    z_of,
)
from vesflow.errors import (
    InsufficientTail,
    InvariantViolation,
    NonFiniteState,
    NotConverged,
)
from vesflow.flow import (
    NsStepParams,
    elastic_force,
    ns_step,
    velocity_h1_seminorm,
    velocity_l2,
)
from vesflow.grid import FaceVelocity, ScalarField
from vesflow.operators import mean, norm_hk, norm_l2, seminorm_h1
from vesflow.phase import ChStepParams, ch_step, stable_dt_hint

__all__ = [
    "SimState",
    "make_state",
    "LedgerRow",
    "DissipationLedger",
    "ConvergenceReport",
    "LojaFit",
    "HigherNormVerdict",
    "step_coupled",
    "detect_steady",
    "find_equilibrium",
    "lojasiewicz_estimate",
    "higher_norm_watch",
]

MEAN_DRIFT_TOL = 1.0e-9


@dataclass
class SimState:
    """Snapshot of the coupled system: (u, psi) plus derived z and energy."""

    t: float
    step: int
    psi: ScalarField
    u: FaceVelocity
    z: ScalarField
    energy: EnergyBreakdown

    def copy(self):
        return SimState(self.t, self.step, self.psi.copy(), self.u.copy(), self.z.copy(), self.energy)


def make_state(t, step, psi: ScalarField, u: FaceVelocity, p: PhysParams) -> SimState:
    """Assemble a state, recomputing z and the energy, and check invariants."""
    z = z_of(psi, p)
    e = total_energy(u, psi, p)
    m_psi = mean(psi)
    m_z = mean(z)
    # psi is O(1), so its mean is checked absolutely; z values can be
    # huge, so its mean is checked against the field scale.
    if abs(m_psi) > MEAN_DRIFT_TOL or abs(m_z) > MEAN_DRIFT_TOL * max(1.0, norm_l2(z)):
        raise InvariantViolation(
            f"mean drift: mean(psi) = {m_psi:.3e}, mean(z) = {m_z:.3e}"
        )
    if not (math.isfinite(e.total) and e.total >= 0.0):
        raise InvariantViolation(f"energy total invalid: {e.total}")
    return SimState(t, step, psi, u, z, e)


def step_coupled(
    state: SimState,
    p: PhysParams,
    ch_params: ChStepParams,
    ns_params: NsStepParams,
) -> SimState:
    """One coupled step: flow forced by the current phase, phase advected
    by the current velocity. Both cross terms are evaluated at time n, so
    their discrete work contributions cancel exactly."""
    if ch_params.dt != ns_params.dt:
        raise ValueError("phase and flow steps must share one dt")
    force = elastic_force(state.z, state.psi, p)
    u_next, _ = ns_step(state.u, force, p, ns_params)
    psi_next, _ = ch_step(state.psi, state.u, p, ch_params)
    return make_state(state.t + ch_params.dt, state.step + 1, psi_next, u_next, p)


# ---------------------------------------------------------------------------
# dissipation ledger


@dataclass(frozen=True)
class LedgerRow:
    t: float
    step: int
    e_total: float
    e_kin: float
    e_willmore: float
    e_penalty: float
    area: float
    mass_mean: float
    u_l2: float
    grad_u_l2: float
    z_l2: float
    grad_z_l2: float
    psi_h1: float
    psi_h3: float
    de_dt: float
    visc_dissipation: float
    phase_dissipation: float
    residual: float
    cumulative_dissipation: float


class DissipationLedger:
    """Per-step record of the energy balance.

    The first row carries de_dt = residual = 0 (no backward difference is
    available yet); cumulative dissipation integrates with the same
    right-endpoint rectangles the residual uses, so

        cumulative <= E(0) - E(t) + sum |R| dt

    holds by construction.
    """

    def __init__(self, p: PhysParams):
        self.p = p
        self.rows: list[LedgerRow] = []

    def append_state(self, state: SimState):
        p = self.p
        e = state.energy
        grad_u = velocity_h1_seminorm(state.u)
        grad_z = seminorm_h1(state.z)
        visc = p.nu * grad_u * grad_u
        phase = p.lam * p.gamma * grad_z * grad_z
        if self.rows:
            prev = self.rows[-1]
            dt_row = state.t - prev.t
            de_dt = (e.total - prev.e_total) / dt_row
            residual = de_dt + visc + phase
            cumulative = prev.cumulative_dissipation + dt_row * (visc + phase)
        else:
            de_dt = 0.0
            residual = 0.0
            cumulative = 0.0
        self.rows.append(
            LedgerRow(
                t=state.t,
                step=state.step,
                e_total=e.total,
                e_kin=e.kinetic,
                e_willmore=e.willmore,
                e_penalty=e.penalty,
                area=e.area,
                mass_mean=p.m0 + mean(state.psi),
                u_l2=velocity_l2(state.u),
                grad_u_l2=grad_u,
                z_l2=norm_l2(state.z),
                grad_z_l2=grad_z,
                psi_h1=norm_hk(state.psi, 1),
                psi_h3=norm_hk(state.psi, 3),
                de_dt=de_dt,
                visc_dissipation=visc,
                phase_dissipation=phase,
                residual=residual,
                cumulative_dissipation=cumulative,
            )
        )
        return self.rows[-1]

    def column(self, name):
        return np.array([getattr(r, name) for r in self.rows])


# ---------------------------------------------------------------------------
# steady state and equilibrium


def detect_steady(history, tol_u, tol_z, tol_dpsi) -> bool:
    """True when velocity, chemical-force gradient and phase rate are all
    strictly below their tolerances (equality counts as not steady)."""
    if len(history) < 2:
        raise ValueError("detect_steady needs at least two states")
    prev, cur = history[-2], history[-1]
    dt = cur.t - prev.t
    if dt <= 0.0:
        raise ValueError("history must advance in time")
    u_ok = velocity_l2(cur.u) < tol_u
    z_ok = seminorm_h1(cur.z) < tol_z
    rate = norm_l2(ScalarField(cur.psi.grid, cur.psi.values - prev.psi.values)) / dt
    return bool(u_ok and z_ok and rate < tol_dpsi)


def find_equilibrium(
    psi0: ScalarField,
    p: PhysParams,
    tol: float,
    dt: float | None = None,
    stab: float | None = None,
    max_iters: int = 60000,
    grow: float = 1.25,
    shrink: float = 0.5,
    slack: float = 0.02,
) -> tuple[ScalarField, list[float]]:
    """Relax psi under the pure phase gradient flow until |z|_2 < tol.

    Reuses the dynamic stepper with u = 0 under simple step-size control:
    dt is multiplied by ``grow`` after an accepted step and by ``shrink``
    after a rejected one. A step is accepted when the bending energy
    decreased; once energy differences fall below measurement precision
    (1e-12 relative), acceptance switches to the residual trend, allowing
    per-step growth up to the ``slack`` factor so dt can ride the
    stability limit while the slow modes drain.

    Returns the relaxed field and the accepted-residual history (first
    entry is the initial residual); the trend is monotone by
    construction. Raises NotConverged with the last residual when the
    budget is exhausted. The phase average is untouched.
    """
    m = mean(psi0)
    if abs(m) > 1.0e-10:
        raise InvariantViolation(f"find_equilibrium input must be mean-free (mean {m:.3e})")
    s = 2.0 / p.eps if stab is None else stab
    if dt is None:
        dt = stable_dt_hint(p, psi0.grid)

    psi = psi0
    e_cur = bending_energy(psi, p).bending
    history = [norm_l2(z_of(psi, p))]
    if history[0] < tol:
        return psi, history
    # below this the update is round-off; the residual has hit the
    # evaluation floor of eps*lap^2 and cannot be certified any tighter
    dt_floor = dt * 2.0**-60
    for it in range(max_iters):
        if dt < dt_floor:
            raise NotConverged(it, history[-1])
        try:
            with np.errstate(all="ignore"):
                cand, _ = ch_step(psi, None, p, ChStepParams(dt=dt, stab=s))
                e_new = bending_energy(cand, p).bending
                r_new = norm_l2(z_of(cand, p))
        except NonFiniteState:
            dt *= shrink
            continue
        if not (math.isfinite(e_new) and math.isfinite(r_new)):
            dt *= shrink
            continue
        de = e_new - e_cur
        measurable = abs(de) > 1.0e-12 * max(abs(e_cur), 1.0)
        if (measurable and de > 0.0) or (not measurable and r_new > history[-1] * (1.0 + slack)):
            dt *= shrink
            continue
        psi = cand
        e_cur = e_new
        history.append(r_new)
        dt *= grow
        if r_new < tol:
            return psi, history
    raise NotConverged(max_iters, history[-1])


# ---------------------------------------------------------------------------
# asymptotic diagnostics


@dataclass(frozen=True)
class LojaFit:
    """Least-squares decay-exponent fit from the ledger tail."""

    theta_hat: float
    slope: float
    r_squared: float
    n_samples: int
    e_inf_hat: float

    @property
    def valid(self):
        return 0.0 < self.theta_hat < 1.0


def lojasiewicz_estimate(e_total, z_l2, e_inf_hat, min_samples=20) -> LojaFit:
    """Fit log|z| = s * log(E - E_inf) + b on the usable tail samples and
    report theta_hat = 1 - s. Only samples with E > E_inf and |z| > 0
    enter the fit; fewer than ``min_samples`` of them raises
    InsufficientTail."""
    e_total = np.asarray(e_total, dtype=float)
    z_l2 = np.asarray(z_l2, dtype=float)
    mask = (e_total > e_inf_hat) & (z_l2 > 0.0)
    n = int(mask.sum())
    if n < min_samples:
        raise InsufficientTail(
            f"only {n} usable samples (need {min_samples}) with E > {e_inf_hat:.6e}"
        )
    x = np.log(e_total[mask] - e_inf_hat)
    y = np.log(z_l2[mask])
    a = np.vstack([x, np.ones_like(x)]).T
    coef, _, _, _ = np.linalg.lstsq(a, y, rcond=None)
    slope = float(coef[0])
    yhat = a @ coef
    ss_res = float(np.sum((y - yhat) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return LojaFit(theta_hat=1.0 - slope, slope=slope, r_squared=r2, n_samples=n, e_inf_hat=e_inf_hat)


def default_e_inf_hat(e_total) -> float:
    """Tail-energy estimate: final energy minus half the last recorded
    dissipation step (the energy drop across the final ledger interval)."""
    e_total = np.asarray(e_total, dtype=float)
    if e_total.size < 2:
        raise InsufficientTail("need at least two ledger rows to estimate E_inf")
    drop = e_total[-2] - e_total[-1]
    return float(e_total[-1] - 0.5 * drop)


@dataclass(frozen=True)
class HigherNormVerdict:
    series: tuple
    first_half_max: float
    tail_max: float
    bounded: bool


def higher_norm_watch(psi_h3_series) -> HigherNormVerdict:
    """Boundedness verdict for the third-order phase norm: the max over
    the tail (second half) must not exceed 1.05x the max over the first
    half."""
    series = tuple(float(v) for v in psi_h3_series)
    if len(series) < 2:
        raise ValueError("higher_norm_watch needs at least two samples")
    half = len(series) // 2
    first = max(series[: max(half, 1)])
    tail = max(series[half:])
    return HigherNormVerdict(
        series=series,
        first_half_max=first,
        tail_max=tail,
        bounded=bool(tail <= 1.05 * first),
    )


# ---------------------------------------------------------------------------
# convergence report


@dataclass
class ConvergenceReport:
    """End-of-run summary of the long-time behavior."""

    u_l2_tail: list = field(default_factory=list)
    grad_z_tail: list = field(default_factory=list)
    cauchy_increments: list = field(default_factory=list)  # (t_i, |psi(t_i)-psi(end)|)
    psi_h3_series: list = field(default_factory=list)
    e_infinity_hat: float | None = None
    theta_hat: float | None = None
    theta_slope: float | None = None
    theta_r_squared: float | None = None
    theta_samples: int | None = None
    h3_bounded: bool | None = None
    steady_reached: bool = False
    steady_time: float | None = None

    def to_dict(self):
        return {
            "u_l2_tail": list(self.u_l2_tail),
            "grad_z_tail": list(self.grad_z_tail),
            "cauchy_increments": [list(pair) for pair in self.cauchy_increments],
            "psi_h3_series": list(self.psi_h3_series),
            "e_infinity_hat": self.e_infinity_hat,
            "theta_hat": self.theta_hat,
            "theta_slope": self.theta_slope,
            "theta_r_squared": self.theta_r_squared,
            "theta_samples": self.theta_samples,
            "h3_bounded": self.h3_bounded,
            "steady_reached": self.steady_reached,
            "steady_time": self.steady_time,
        }


def build_report(ledger: DissipationLedger, checkpoints, tail_rows=50) -> ConvergenceReport:
    """Assemble the convergence report from the ledger and checkpoints."""
    report = ConvergenceReport()
    rows = ledger.rows
    if rows:
        tail = rows[-min(tail_rows, len(rows)):]
        report.u_l2_tail = [r.u_l2 for r in tail]
        report.grad_z_tail = [r.grad_z_l2 for r in tail]
        report.psi_h3_series = [r.psi_h3 for r in rows]
        if len(rows) >= 2:
            report.h3_bounded = higher_norm_watch(report.psi_h3_series).bounded
            report.e_infinity_hat = default_e_inf_hat(ledger.column("e_total"))
            try:
                fit = lojasiewicz_estimate(
                    ledger.column("e_total"), ledger.column("z_l2"), report.e_infinity_hat
                )
                report.theta_hat = fit.theta_hat
                report.theta_slope = fit.slope
                report.theta_r_squared = fit.r_squared
                report.theta_samples = fit.n_samples
            except InsufficientTail:
                pass
    if len(checkpoints) >= 2:
        final = checkpoints[-1]
        for st in checkpoints[-9:-1]:
            d = norm_l2(ScalarField(final.psi.grid, st.psi.values - final.psi.values))
            report.cauchy_increments.append((st.t, d))
    return report
