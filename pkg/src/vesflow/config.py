"""Run configuration: JSON parsing, validation, and initial states.

The configuration document is strict JSON with the exact key names shown
in ``config_schema.json`` (shipped with the package); unknown keys are
rejected so typos fail loudly. ``load_config`` only validates;
``build_setup`` turns a config into concrete grid, parameters and initial
fields.

The conserved phase average m0 is derived from the constructed initial
phase. If ``params.m0`` is present it must agree with the derived value
(a mismatch would silently break the mean-free formulation); it is
mandatory for ``from_file`` initial conditions, where the stored phase is
already mean-free and the average cannot be recovered.
"""

import json
import math
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from vesflow.energy import AREA_FORMS, PhysParams
from vesflow.errors import ParseError, ValidationError
from vesflow.grid import FaceVelocity, Grid, ScalarField
from vesflow.operators import mean

__all__ = [
    "GridConfig",
    "SteppingConfig",
    "Tolerances",
    "RunConfig",
    "Setup",
    "load_config",
    "parse_config",
    "build_setup",
    "schema_text",
]

M0_MATCH_TOL = 1.0e-8

IC_KINDS = {
    "uniform": {"required": ("c",), "optional": ("noise",)},
    "disk": {"required": ("cx", "cy", "r"), "optional": ("width", "noise")},
    "annulus": {"required": ("cx", "cy", "r_in", "r_out"), "optional": ("width", "noise")},
    "strip": {"required": ("x0",), "optional": ("width", "noise")},
    "from_file": {"required": ("path",), "optional": ()},
}


@dataclass(frozen=True)
class GridConfig:
    nx: int
    ny: int
    lx: float
    ly: float


@dataclass(frozen=True)
class SteppingConfig:
    dt: float
    t_end: float
    stab: float | None = None  # None -> 2/eps
    checkpoint_every: int = 100
    ledger_every: int = 1


@dataclass(frozen=True)
class Tolerances:
    steady_u: float = 1.0e-6
    steady_z: float = 1.0e-6
    steady_dpsi: float = 1.0e-6
    equilibrium: float = 1.0e-6


@dataclass(frozen=True)
class RunConfig:
    grid: GridConfig
    params: dict
    stepping: SteppingConfig
    initial_condition: dict
    area_form: str = "full"
    tolerances: Tolerances = field(default_factory=Tolerances)
    seed: int = 0
    output_dir: str = "out"


@dataclass
class Setup:
    """Concrete objects derived from a RunConfig."""

    grid: Grid
    params: PhysParams
    psi0: ScalarField
    u0: FaceVelocity
    stab: float


def schema_text() -> str:
    return resources.files("vesflow").joinpath("config_schema.json").read_text()


# ---------------------------------------------------------------------------
# parsing and validation


def _require_section(doc, name):
    if name not in doc:
        raise ValidationError(f"missing required section '{name}'")
    if not isinstance(doc[name], dict):
        raise ValidationError(f"section '{name}' must be an object", doc[name])
    return doc[name]


def _reject_unknown(section, allowed, where):
    for key in section:
        if key not in allowed:
            raise ValidationError(f"unknown key '{key}' in {where}")


def _number(section, key, where, required=True, default=None):
    if key not in section:
        if required:
            raise ValidationError(f"missing key '{key}' in {where}")
        return default
    v = section[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValidationError(f"{where}.{key} must be a number", v)
    return float(v)


def _integer(section, key, where, required=True, default=None):
    if key not in section:
        if required:
            raise ValidationError(f"missing key '{key}' in {where}")
        return default
    v = section[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ValidationError(f"{where}.{key} must be an integer", v)
    return int(v)


def parse_config(text: str) -> RunConfig:
    """Parse and validate a configuration document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise ValidationError("top-level document must be an object")

    _reject_unknown(
        doc,
        ("grid", "params", "stepping", "initial_condition", "area_form",
         "tolerances", "seed", "output_dir"),
        "top level",
    )

    # grid
    gsec = _require_section(doc, "grid")
    _reject_unknown(gsec, ("nx", "ny", "lx", "ly"), "grid")
    nx = _integer(gsec, "nx", "grid")
    ny = _integer(gsec, "ny", "grid")
    lx = _number(gsec, "lx", "grid")
    ly = _number(gsec, "ly", "grid")
    if nx < 4 or ny < 4:
        raise ValidationError("nx, ny >= 4", (nx, ny))
    if not (lx > 0.0 and ly > 0.0):
        raise ValidationError("lx, ly > 0", (lx, ly))
    grid = GridConfig(nx, ny, lx, ly)

    # params
    psec = _require_section(doc, "params")
    _reject_unknown(psec, ("eps", "lambda", "nu", "gamma", "m_pen", "alpha", "m0"), "params")
    eps = _number(psec, "eps", "params")
    lam = _number(psec, "lambda", "params")
    nu = _number(psec, "nu", "params")
    gamma = _number(psec, "gamma", "params")
    m_pen = _number(psec, "m_pen", "params")
    alpha = _number(psec, "alpha", "params")
    m0 = _number(psec, "m0", "params", required=False)
    for name, v in (("eps", eps), ("lambda", lam), ("nu", nu), ("gamma", gamma)):
        if not v > 0.0:
            raise ValidationError(f"{name} > 0", v)
    if m_pen < 0.0:
        raise ValidationError("m_pen >= 0", m_pen)
    if alpha < 0.0:
        raise ValidationError("alpha >= 0", alpha)
    params = {"eps": eps, "lambda": lam, "nu": nu, "gamma": gamma,
              "m_pen": m_pen, "alpha": alpha}
    if m0 is not None:
        params["m0"] = m0

    # stepping
    ssec = _require_section(doc, "stepping")
    _reject_unknown(ssec, ("dt", "t_end", "stab", "checkpoint_every", "ledger_every"), "stepping")
    dt = _number(ssec, "dt", "stepping")
    t_end = _number(ssec, "t_end", "stepping")
    stab = _number(ssec, "stab", "stepping", required=False)
    checkpoint_every = _integer(ssec, "checkpoint_every", "stepping", required=False, default=100)
    ledger_every = _integer(ssec, "ledger_every", "stepping", required=False, default=1)
    if not dt > 0.0:
        raise ValidationError("dt > 0", dt)
    if not t_end > 0.0:
        raise ValidationError("t_end > 0", t_end)
    if stab is not None and stab < 0.0:
        raise ValidationError("stab >= 0", stab)
    if checkpoint_every < 1:
        raise ValidationError("checkpoint_every >= 1", checkpoint_every)
    if ledger_every < 1:
        raise ValidationError("ledger_every >= 1", ledger_every)
    h = min(lx / nx, ly / ny)
    bound = h * h / (4.0 * nu)
    if dt > bound:
        raise ValidationError(
            "dt <= h^2/(4*nu)", f"dt = {dt:.6e}, bound = {bound:.6e}"
        )
    stepping = SteppingConfig(dt, t_end, stab, checkpoint_every, ledger_every)

    # initial condition
    if "initial_condition" in doc:
        icsec = doc["initial_condition"]
        if not isinstance(icsec, dict):
            raise ValidationError("initial_condition must be an object", icsec)
        kind = icsec.get("kind")
        if kind not in IC_KINDS:
            raise ValidationError(
                f"initial_condition.kind must be one of {sorted(IC_KINDS)}", kind
            )
        spec = IC_KINDS[kind]
        _reject_unknown(icsec, ("kind",) + spec["required"] + spec["optional"],
                        f"initial_condition ({kind})")
        for key in spec["required"]:
            if key not in icsec:
                raise ValidationError(f"missing key '{key}' in initial_condition ({kind})")
        ic = dict(icsec)
    else:
        ic = {"kind": "uniform", "c": params.get("m0", 0.0)}

    # area form
    area_form = doc.get("area_form", "full")
    if area_form not in AREA_FORMS:
        raise ValidationError(f"area_form must be one of {AREA_FORMS}", area_form)

    # tolerances
    tol_kwargs = {}
    if "tolerances" in doc:
        tsec = doc["tolerances"]
        if not isinstance(tsec, dict):
            raise ValidationError("tolerances must be an object", tsec)
        _reject_unknown(tsec, ("steady_u", "steady_z", "steady_dpsi", "equilibrium"), "tolerances")
        for key in ("steady_u", "steady_z", "steady_dpsi", "equilibrium"):
            if key in tsec:
                v = _number(tsec, key, "tolerances")
                if not v > 0.0:
                    raise ValidationError(f"tolerances.{key} > 0", v)
                tol_kwargs[key] = v
    tolerances = Tolerances(**tol_kwargs)

    seed = _integer(doc, "seed", "top level", required=False, default=0)
    output_dir = doc.get("output_dir", "out")
    if not isinstance(output_dir, str):
        raise ValidationError("output_dir must be a string", output_dir)

    return RunConfig(
        grid=grid,
        params=params,
        stepping=stepping,
        initial_condition=ic,
        area_form=area_form,
        tolerances=tolerances,
        seed=seed,
        output_dir=output_dir,
    )


def load_config(path) -> RunConfig:
    """Read and validate a JSON configuration file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)


# ---------------------------------------------------------------------------
# initial conditions


def _tanh_profile(signed_distance, width):
    return np.tanh(signed_distance / width)


def build_phase_ic(grid: Grid, ic: dict, eps: float, seed: int) -> ScalarField:
    """Construct the initial phase phi0 from an analytic profile spec.

    Interfaces are tanh(signed distance / width) with width defaulting to
    eps * sqrt(2), the equilibrium layer scale.
    """
    kind = ic["kind"]
    width = float(ic.get("width", eps * math.sqrt(2.0)))
    if kind != "uniform" and not width > 0.0:
        raise ValidationError("initial_condition.width > 0", width)
    X, Y = grid.cell_centers()
    if kind == "uniform":
        phi = np.full(grid.shape, float(ic["c"]))
    elif kind == "disk":
        r = np.hypot(X - float(ic["cx"]), Y - float(ic["cy"]))
        phi = _tanh_profile(float(ic["r"]) - r, width)
    elif kind == "annulus":
        r_in = float(ic["r_in"])
        r_out = float(ic["r_out"])
        if not r_in < r_out:
            raise ValidationError("annulus needs r_in < r_out", (r_in, r_out))
        r = np.hypot(X - float(ic["cx"]), Y - float(ic["cy"]))
        sd = np.minimum(r - r_in, r_out - r)  # positive inside the ring
        phi = _tanh_profile(sd, width)
    elif kind == "strip":
        phi = _tanh_profile(X - float(ic["x0"]), width)
    else:
        raise ValidationError(f"analytic builder cannot handle kind '{kind}'")
    noise = float(ic.get("noise", 0.0))
    if noise != 0.0:
        rng = np.random.default_rng(seed)
        phi = phi + noise * rng.standard_normal(grid.shape)
    return ScalarField(grid, phi)


def build_setup(cfg: RunConfig) -> Setup:
    """Construct the grid, parameters and initial state for a run."""
    grid = Grid(cfg.grid.nx, cfg.grid.ny, cfg.grid.lx, cfg.grid.ly)
    eps = cfg.params["eps"]
    ic = cfg.initial_condition

    if ic["kind"] == "from_file":
        from vesflow.io import read_checkpoint

        if "m0" not in cfg.params:
            raise ValidationError("params.m0 is required with a from_file initial condition")
        m0 = float(cfg.params["m0"])
        psi0, u0 = read_checkpoint(ic["path"], grid)
        m = mean(psi0)
        if abs(m) > 1.0e-10:
            raise ValidationError("stored phase must be mean-free", m)
        if u0.wall_residual() != 0.0:
            raise ValidationError("stored velocity must satisfy no-slip", u0.wall_residual())
    else:
        phi0 = build_phase_ic(grid, ic, eps, cfg.seed)
        m0 = mean(phi0)
        if "m0" in cfg.params and abs(float(cfg.params["m0"]) - m0) > M0_MATCH_TOL:
            raise ValidationError(
                "params.m0 must match the initial-condition average",
                f"m0 = {cfg.params['m0']}, derived = {m0!r}",
            )
        psi0 = ScalarField(grid, phi0.values - m0)
        u0 = FaceVelocity.zeros(grid)

    params = PhysParams(
        eps=eps,
        lam=cfg.params["lambda"],
        nu=cfg.params["nu"],
        gamma=cfg.params["gamma"],
        m_pen=cfg.params["m_pen"],
        alpha=cfg.params["alpha"],
        m0=m0,
        area_form=cfg.area_form,
    )
    stab = cfg.stepping.stab if cfg.stepping.stab is not None else 2.0 / eps
    return Setup(grid=grid, params=params, psi0=psi0, u0=u0, stab=stab)
