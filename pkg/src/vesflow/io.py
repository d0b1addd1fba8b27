"""Persistent outputs: diagnostics CSV, VTK snapshots, binary checkpoints.

Three formats with distinct purposes:

* ledger CSV - fixed 15-column header, every float rendered with 17
  significant digits so parsing the file back reproduces the doubles
  exactly;
* legacy-VTK structured points (ASCII) - human inspection in standard
  viewers; phase and chemical force as cell data, velocity interpolated
  to cell centers;
* "VESFLOW1" checkpoint - raw little-endian binary enabling bitwise
  restart: 8-byte magic, nx and ny as int64, then psi (row-major), ux,
  uy as float64.
"""

import numpy as np

from vesflow.errors import IoError, ValidationError
from vesflow.grid import FaceVelocity, Grid, ScalarField

__all__ = [
    "CSV_HEADER",
    "write_ledger_csv",
    "read_ledger_csv",
    "write_snapshot",
    "write_checkpoint",
    "read_checkpoint",
    "CHECKPOINT_MAGIC",
]

CSV_HEADER = (
    "t,step,E_total,E_kin,E_willmore,E_penalty,area,mass_mean,"
    "u_l2,grad_u_l2,z_l2,grad_z_l2,psi_h1,psi_h3,residual"
)

CHECKPOINT_MAGIC = b"VESFLOW1"

_CSV_FIELDS = (
    ("t", "t"),
    ("step", "step"),
    ("E_total", "e_total"),
    ("E_kin", "e_kin"),
    ("E_willmore", "e_willmore"),
    ("E_penalty", "e_penalty"),
    ("area", "area"),
    ("mass_mean", "mass_mean"),
    ("u_l2", "u_l2"),
    ("grad_u_l2", "grad_u_l2"),
    ("z_l2", "z_l2"),
    ("grad_z_l2", "grad_z_l2"),
    ("psi_h1", "psi_h1"),
    ("psi_h3", "psi_h3"),
    ("residual", "residual"),
)


def _fmt(x):
    return f"{x:.17g}"


def write_ledger_csv(ledger, path):
    """Write the ledger rows (17-significant-digit decimal rendering)."""
    rows = getattr(ledger, "rows", ledger)
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(CSV_HEADER + "\n")
            for row in rows:
                cells = []
                for _, attr in _CSV_FIELDS:
                    v = getattr(row, attr)
                    cells.append(str(v) if attr == "step" else _fmt(v))
                fh.write(",".join(cells) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write ledger {path}: {exc}") from exc


def read_ledger_csv(path):
    """Read a ledger CSV back into a dict of numpy columns."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
    except OSError as exc:
        raise IoError(f"cannot read ledger {path}: {exc}") from exc
    if not lines or lines[0] != CSV_HEADER:
        raise IoError(f"{path} does not start with the ledger header")
    names = CSV_HEADER.split(",")
    cols = {name: [] for name in names}
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != len(names):
            raise IoError(f"malformed ledger row: {ln!r}")
        for name, part in zip(names, parts):
            cols[name].append(part)
    out = {}
    for name in names:
        if name == "step":
            out[name] = np.array([int(v) for v in cols[name]], dtype=np.int64)
        else:
            out[name] = np.array([float(v) for v in cols[name]])
    return out


def write_snapshot(psi: ScalarField, z: ScalarField, u: FaceVelocity, path, title="vesflow snapshot"):
    """Legacy-VTK structured-points snapshot (ASCII, cell samples as points)."""
    g = psi.grid
    ucx = 0.5 * (u.ux[:-1] + u.ux[1:])
    ucy = 0.5 * (u.uy[:, :-1] + u.uy[:, 1:])

    def flat(a):
        # VTK point order: x fastest, then y.
        return a.T.ravel()

    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("# vtk DataFile Version 3.0\n")
            fh.write(title[:255] + "\n")
            fh.write("ASCII\n")
            fh.write("DATASET STRUCTURED_POINTS\n")
            fh.write(f"DIMENSIONS {g.nx} {g.ny} 1\n")
            fh.write(f"ORIGIN {0.5 * g.hx:.17g} {0.5 * g.hy:.17g} 0.0\n")
            fh.write(f"SPACING {g.hx:.17g} {g.hy:.17g} 1.0\n")
            fh.write(f"POINT_DATA {g.nx * g.ny}\n")
            for name, data in (("psi", psi.values), ("z", z.values)):
                fh.write(f"SCALARS {name} double 1\n")
                fh.write("LOOKUP_TABLE default\n")
                for v in flat(data):
                    fh.write(_fmt(v) + "\n")
            fh.write("VECTORS velocity double\n")
            for vx, vy in zip(flat(ucx), flat(ucy)):
                fh.write(f"{_fmt(vx)} {_fmt(vy)} 0\n")
    except OSError as exc:
        raise IoError(f"cannot write snapshot {path}: {exc}") from exc


def write_checkpoint(psi: ScalarField, u: FaceVelocity, path):
    """Raw binary state for bitwise restart (layout documented above)."""
    g = psi.grid
    try:
        with open(path, "wb") as fh:
            fh.write(CHECKPOINT_MAGIC)
            fh.write(np.array([g.nx, g.ny], dtype="<i8").tobytes())
            fh.write(np.ascontiguousarray(psi.values, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(u.ux, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(u.uy, dtype="<f8").tobytes())
    except OSError as exc:
        raise IoError(f"cannot write checkpoint {path}: {exc}") from exc


def read_checkpoint(path, grid: Grid):
    """Read a VESFLOW1 checkpoint; shapes must match the given grid."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise IoError(f"cannot read checkpoint {path}: {exc}") from exc
    if len(raw) < 24 or raw[:8] != CHECKPOINT_MAGIC:
        raise IoError(f"{path} is not a VESFLOW1 checkpoint")
    nx, ny = (int(v) for v in np.frombuffer(raw[8:24], dtype="<i8"))
    if (nx, ny) != grid.shape:
        raise ValidationError(
            "checkpoint grid must match the configured grid",
            f"file {nx}x{ny}, config {grid.nx}x{grid.ny}",
        )
    counts = (nx * ny, (nx + 1) * ny, nx * (ny + 1))
    expected = 24 + 8 * sum(counts)
    if len(raw) != expected:
        raise IoError(f"{path} has {len(raw)} bytes, expected {expected}")
    off = 24
    arrays = []
    for count, shape in zip(counts, ((nx, ny), (nx + 1, ny), (nx, ny + 1))):
        a = np.frombuffer(raw, dtype="<f8", count=count, offset=off).reshape(shape)
        arrays.append(a.copy())
        off += 8 * count
    psi = ScalarField(grid, arrays[0])
    u = FaceVelocity(grid, arrays[1], arrays[2])
    return psi, u
