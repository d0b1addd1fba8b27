import json
import os

import numpy as np
import pytest

import vesflow.operators as ops
from vesflow.config import build_setup, load_config, parse_config, schema_text
from vesflow.errors import IoError, ParseError, ValidationError
from vesflow.grid import FaceVelocity, Grid, ScalarField
from vesflow.io import (
    CSV_HEADER,
    read_checkpoint,
    read_ledger_csv,
    write_checkpoint,
    write_ledger_csv,
    write_snapshot,
)
from vesflow.runner import run


def minimal_doc(**overrides):
    doc = {
        "grid": {"nx": 16, "ny": 16, "lx": 1.0, "ly": 1.0},
        "params": {"eps": 0.1, "lambda": 0.5, "nu": 1.0, "gamma": 1.0,
                   "m_pen": 5.0, "alpha": 0.5},
        "stepping": {"dt": 1e-6, "t_end": 1e-5},
    }
    doc.update(overrides)
    return doc


class TestConfigParsing:
    def test_minimal_document_gets_defaults(self):
        cfg = parse_config(json.dumps(minimal_doc()))
        assert cfg.stepping.checkpoint_every == 100
        assert cfg.stepping.ledger_every == 1
        assert cfg.stepping.stab is None
        assert cfg.area_form == "full"
        assert cfg.tolerances.steady_u == 1e-6
        assert cfg.tolerances.equilibrium == 1e-6
        assert cfg.seed == 0
        assert cfg.output_dir == "out"
        assert cfg.initial_condition == {"kind": "uniform", "c": 0.0}

    def test_malformed_json_is_parse_error(self):
        with pytest.raises(ParseError):
            parse_config("{not json")

    def test_unknown_key_rejected(self):
        doc = minimal_doc()
        doc["grid"]["nz"] = 4
        with pytest.raises(ValidationError, match="unknown key 'nz'"):
            parse_config(json.dumps(doc))
        doc = minimal_doc()
        doc["extra"] = 1
        with pytest.raises(ValidationError, match="unknown key 'extra'"):
            parse_config(json.dumps(doc))

    def test_negative_nu_rejected(self):
        doc = minimal_doc()
        doc["params"]["nu"] = -1.0
        with pytest.raises(ValidationError, match="nu > 0"):
            parse_config(json.dumps(doc))

    def test_diffusion_bound_reported_with_numbers(self):
        doc = minimal_doc()
        doc["stepping"]["dt"] = 1.0
        with pytest.raises(ValidationError) as err:
            parse_config(json.dumps(doc))
        msg = str(err.value)
        assert "dt <= h^2/(4*nu)" in msg
        assert "dt = 1" in msg and "bound = " in msg

    def test_bad_ic_kind(self):
        doc = minimal_doc(initial_condition={"kind": "blob"})
        with pytest.raises(ValidationError, match="kind"):
            parse_config(json.dumps(doc))

    def test_ic_missing_key(self):
        doc = minimal_doc(initial_condition={"kind": "disk", "cx": 0.5, "cy": 0.5})
        with pytest.raises(ValidationError, match="missing key 'r'"):
            parse_config(json.dumps(doc))

    def test_load_config_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            load_config(tmp_path / "nope.json")

    def test_schema_ships_and_parses(self):
        schema = json.loads(schema_text())
        assert schema["required"] == ["grid", "params", "stepping"]
        assert set(schema["properties"]) >= {"grid", "params", "stepping",
                                             "initial_condition", "area_form",
                                             "tolerances", "seed", "output_dir"}


class TestSetup:
    def test_uniform_ic(self):
        cfg = parse_config(json.dumps(minimal_doc(
            initial_condition={"kind": "uniform", "c": 0.25})))
        setup = build_setup(cfg)
        assert setup.params.m0 == pytest.approx(0.25, abs=1e-15)
        assert np.abs(setup.psi0.values).max() <= 1e-15
        assert setup.stab == pytest.approx(2.0 / 0.1)

    def test_m0_mismatch_rejected(self):
        doc = minimal_doc(initial_condition={"kind": "uniform", "c": 0.25})
        doc["params"]["m0"] = 0.5
        with pytest.raises(ValidationError, match="m0"):
            build_setup(parse_config(json.dumps(doc)))

    def test_annulus_ic_profile(self):
        doc = minimal_doc(initial_condition={
            "kind": "annulus", "cx": 0.5, "cy": 0.5, "r_in": 0.15, "r_out": 0.35,
            "width": 0.03})
        doc["grid"] = {"nx": 48, "ny": 48, "lx": 1.0, "ly": 1.0}
        setup = build_setup(parse_config(json.dumps(doc)))
        phi = setup.psi0.values + setup.params.m0
        X, Y = setup.grid.cell_centers()
        ring = np.hypot(X - 0.5, Y - 0.5)
        assert phi[(np.abs(ring - 0.25) < 0.03)].min() > 0.9
        assert phi[ring < 0.05].max() < -0.9
        assert abs(ops.mean(setup.psi0)) <= 1e-14

    def test_strip_ic_sign(self):
        doc = minimal_doc(initial_condition={"kind": "strip", "x0": 0.5})
        setup = build_setup(parse_config(json.dumps(doc)))
        phi = setup.psi0.values + setup.params.m0
        assert phi[0, 0] < -0.9 and phi[-1, 0] > 0.9

    def test_seeded_noise_reproducible(self):
        doc = minimal_doc(initial_condition={"kind": "uniform", "c": 0.0, "noise": 0.01})
        doc["seed"] = 7
        a = build_setup(parse_config(json.dumps(doc)))
        b = build_setup(parse_config(json.dumps(doc)))
        assert np.array_equal(a.psi0.values, b.psi0.values)
        doc["seed"] = 8
        c = build_setup(parse_config(json.dumps(doc)))
        assert not np.array_equal(a.psi0.values, c.psi0.values)

    def test_from_file_requires_m0(self, tmp_path):
        g = Grid(16, 16, 1.0, 1.0)
        path = tmp_path / "state.bin"
        write_checkpoint(ScalarField.zeros(g), FaceVelocity.zeros(g), path)
        doc = minimal_doc(initial_condition={"kind": "from_file", "path": str(path)})
        with pytest.raises(ValidationError, match="m0"):
            build_setup(parse_config(json.dumps(doc)))
        doc["params"]["m0"] = 0.1
        setup = build_setup(parse_config(json.dumps(doc)))
        assert setup.params.m0 == 0.1


class TestLedgerCsv:
    def make_ledger_file(self, tmp_path):
        doc = minimal_doc()
        doc["stepping"] = {"dt": 1e-6, "t_end": 2e-5, "ledger_every": 2,
                           "checkpoint_every": 10}
        doc["initial_condition"] = {"kind": "strip", "x0": 0.5}
        cfg = parse_config(json.dumps(doc))
        result = run(cfg, output_dir=str(tmp_path / "out"))
        return result, tmp_path / "out" / "ledger.csv"

    def test_header_and_row_count(self, tmp_path):
        result, path = self.make_ledger_file(tmp_path)
        with open(path) as fh:
            lines = fh.read().strip().split("\n")
        assert lines[0] == CSV_HEADER
        # 20 steps at ledger_every=2 -> 10 rows plus the initial one
        assert len(lines) == 1 + 10 + 1

    def test_roundtrip_is_lossless(self, tmp_path):
        result, path = self.make_ledger_file(tmp_path)
        cols = read_ledger_csv(path)
        rows = result.ledger.rows
        assert np.array_equal(cols["E_total"], np.array([r.e_total for r in rows]))
        assert np.array_equal(cols["psi_h3"], np.array([r.psi_h3 for r in rows]))
        assert np.array_equal(cols["residual"], np.array([r.residual for r in rows]))
        assert cols["step"].tolist() == [r.step for r in rows]

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(IoError):
            read_ledger_csv(path)


def validate_vtk_structured_points(path):
    """Minimal legacy-VTK grammar check: header, geometry, record counts."""
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    assert lines[0].startswith("# vtk DataFile Version")
    assert lines[2] == "ASCII"
    assert lines[3] == "DATASET STRUCTURED_POINTS"
    dims = lines[4].split()
    assert dims[0] == "DIMENSIONS"
    nx, ny, nz = int(dims[1]), int(dims[2]), int(dims[3])
    assert nz == 1
    assert lines[5].split()[0] == "ORIGIN"
    assert lines[6].split()[0] == "SPACING"
    pd = lines[7].split()
    assert pd[0] == "POINT_DATA" and int(pd[1]) == nx * ny
    i = 8
    npoints = nx * ny
    seen = []
    while i < len(lines):
        tok = lines[i].split()
        if not tok:
            i += 1
            continue
        if tok[0] == "SCALARS":
            assert lines[i + 1] == "LOOKUP_TABLE default"
            vals = lines[i + 2: i + 2 + npoints]
            assert len(vals) == npoints
            for v in vals:
                float(v)  # parses
            seen.append(("scalar", tok[1]))
            i += 2 + npoints
        elif tok[0] == "VECTORS":
            vals = lines[i + 1: i + 1 + npoints]
            assert len(vals) == npoints
            for v in vals:
                parts = v.split()
                assert len(parts) == 3
                [float(x) for x in parts]
            seen.append(("vector", tok[1]))
            i += 1 + npoints
        else:
            raise AssertionError(f"unexpected record {lines[i]!r}")
    return seen


class TestSnapshot:
    def test_vtk_structure(self, tmp_path, rng):
        g = Grid(12, 9, 1.0, 0.7)
        psi = ScalarField(g, rng.standard_normal(g.shape))
        z = ScalarField(g, rng.standard_normal(g.shape))
        u = FaceVelocity(g, rng.standard_normal((13, 9)), rng.standard_normal((12, 10)))
        path = tmp_path / "snap.vtk"
        write_snapshot(psi, z, u, path)
        seen = validate_vtk_structured_points(path)
        assert seen == [("scalar", "psi"), ("scalar", "z"), ("vector", "velocity")]

    def test_vtk_point_order_x_fastest(self, tmp_path):
        g = Grid(4, 5, 1.0, 1.0)
        X, _ = g.cell_centers()
        psi = ScalarField(g, X)
        path = tmp_path / "snap.vtk"
        write_snapshot(psi, ScalarField.zeros(g), FaceVelocity.zeros(g), path)
        with open(path) as fh:
            lines = fh.read().split("\n")
        start = lines.index("LOOKUP_TABLE default") + 1
        first_row = [float(v) for v in lines[start:start + 4]]
        assert first_row == pytest.approx([0.125, 0.375, 0.625, 0.875])


class TestCheckpoint:
    def test_bitwise_roundtrip(self, tmp_path, rng):
        g = Grid(16, 12, 1.0, 0.5)
        psi = ScalarField(g, rng.standard_normal(g.shape))
        u = FaceVelocity(g, rng.standard_normal((17, 12)), rng.standard_normal((16, 13)))
        path = tmp_path / "state.bin"
        write_checkpoint(psi, u, path)
        psi2, u2 = read_checkpoint(path, g)
        assert np.array_equal(psi.values, psi2.values)
        assert np.array_equal(u.ux, u2.ux) and np.array_equal(u.uy, u2.uy)

    def test_layout(self, tmp_path):
        g = Grid(5, 4, 1.0, 1.0)
        psi = ScalarField(g, np.arange(20, dtype=float).reshape(5, 4))
        u = FaceVelocity.zeros(g)
        path = tmp_path / "state.bin"
        write_checkpoint(psi, u, path)
        raw = path.read_bytes()
        assert raw[:8] == b"VESFLOW1"
        nx, ny = np.frombuffer(raw[8:24], dtype="<i8")
        assert (nx, ny) == (5, 4)
        vals = np.frombuffer(raw[24:24 + 8 * 20], dtype="<f8")
        assert np.array_equal(vals, np.arange(20, dtype=float))
        assert len(raw) == 24 + 8 * (20 + 6 * 4 + 5 * 5)

    def test_grid_mismatch_rejected(self, tmp_path):
        g = Grid(8, 8, 1.0, 1.0)
        path = tmp_path / "state.bin"
        write_checkpoint(ScalarField.zeros(g), FaceVelocity.zeros(g), path)
        with pytest.raises(ValidationError):
            read_checkpoint(path, Grid(16, 16, 1.0, 1.0))

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "junk.bin"
        path.write_bytes(b"NOTVESALTS" + b"\x00" * 64)
        with pytest.raises(IoError):
            read_checkpoint(path, Grid(8, 8, 1.0, 1.0))


class TestRunner:
    def test_outputs_land_in_output_dir(self, tmp_path):
        doc = minimal_doc()
        doc["stepping"] = {"dt": 1e-6, "t_end": 1e-5, "checkpoint_every": 5}
        doc["initial_condition"] = {"kind": "disk", "cx": 0.5, "cy": 0.5, "r": 0.25}
        out = tmp_path / "results"
        cfg = parse_config(json.dumps(doc))
        result = run(cfg, output_dir=str(out))
        names = sorted(os.listdir(out))
        assert "ledger.csv" in names
        assert "report.json" in names
        assert "checkpoint_000000.bin" in names and "checkpoint_000000.vtk" in names
        assert "checkpoint_final.bin" in names and "checkpoint_final.vtk" in names
        assert result.final_state.step == 10
        with open(out / "report.json") as fh:
            report = json.load(fh)
        assert report["h3_bounded"] in (True, False)

    def test_partial_outputs_flushed_on_error(self, tmp_path):
        # slack diffusion bound (tiny nu) lets a phase-unstable dt through
        # the load-time check; the run must flush what it has, then raise
        doc = minimal_doc()
        doc["grid"] = {"nx": 32, "ny": 32, "lx": 1.0, "ly": 1.0}
        doc["params"] = {"eps": 0.05, "lambda": 0.5, "nu": 1e-6, "gamma": 1.0,
                         "m_pen": 5.0, "alpha": 0.5}
        doc["stepping"] = {"dt": 5e-2, "t_end": 5.0}
        doc["initial_condition"] = {"kind": "annulus", "cx": 0.5, "cy": 0.5,
                                    "r_in": 0.15, "r_out": 0.35}
        out = tmp_path / "out"
        from vesflow.errors import VesflowError

        with pytest.raises(VesflowError), np.errstate(all="ignore"):
            run(parse_config(json.dumps(doc)), output_dir=str(out))
        names = os.listdir(out)
        assert "ledger.csv" in names
        assert any(n.startswith("checkpoint_error") for n in names)

    def test_steady_detection_stops_shipped_config(self, tmp_path):
        # the example annulus configuration must reach steady state well
        # before t_end and produce a complete report
        path = os.path.join(os.path.dirname(__file__), "..", "configs",
                            "annulus_relax.json")
        cfg = load_config(path)
        result = run(cfg, output_dir=str(tmp_path / "out"))
        assert result.report.steady_reached
        assert result.final_state.t < cfg.stepping.t_end
        rows = result.ledger.rows
        assert rows[-1].u_l2 < cfg.tolerances.steady_u
        assert rows[-1].grad_z_l2 < cfg.tolerances.steady_z
        # energies decrease monotonically and the report is populated
        assert all(b.e_total <= a.e_total + 1e-10 for a, b in zip(rows, rows[1:]))
        assert result.report.h3_bounded
        assert result.report.theta_hat is None or 0.0 < result.report.theta_hat < 1.0
        assert len(result.report.cauchy_increments) >= 5

    def test_restart_continues_bitwise(self, tmp_path):
        base = minimal_doc()
        base["grid"] = {"nx": 24, "ny": 24, "lx": 1.0, "ly": 1.0}
        base["stepping"] = {"dt": 2e-6, "t_end": 8e-5, "checkpoint_every": 20}
        base["initial_condition"] = {"kind": "annulus", "cx": 0.5, "cy": 0.5,
                                     "r_in": 0.15, "r_out": 0.35}
        out_a = tmp_path / "a"
        cfg = parse_config(json.dumps(base))
        full = run(cfg, output_dir=str(out_a))

        setup = build_setup(cfg)
        restart = dict(base)
        restart["params"] = dict(base["params"], m0=setup.params.m0)
        restart["stepping"] = {"dt": 2e-6, "t_end": 4e-5, "checkpoint_every": 20}
        restart["initial_condition"] = {
            "kind": "from_file", "path": str(out_a / "checkpoint_000020.bin")}
        out_b = tmp_path / "b"
        resumed = run(parse_config(json.dumps(restart)), output_dir=str(out_b))

        assert np.array_equal(resumed.final_state.psi.values, full.final_state.psi.values)
        assert np.array_equal(resumed.final_state.u.ux, full.final_state.u.ux)
        assert np.array_equal(resumed.final_state.u.uy, full.final_state.u.uy)
        # the final checkpoints are bytewise identical files
        assert (out_a / "checkpoint_final.bin").read_bytes() == \
            (out_b / "checkpoint_final.bin").read_bytes()
