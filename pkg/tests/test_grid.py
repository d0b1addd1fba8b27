import numpy as np
import pytest

from vesflow.grid import FaceVelocity, Grid, ScalarField


class TestGrid:
    def test_spacings(self):
        g = Grid(32, 24, 1.0, 1.5)
        assert g.hx == 1.0 / 32
        assert g.hy == 1.5 / 24
        assert g.shape == (32, 24)

    @pytest.mark.parametrize("nx,ny", [(3, 8), (8, 3), (0, 8)])
    def test_too_small_rejected(self, nx, ny):
        with pytest.raises(ValueError):
            Grid(nx, ny, 1.0, 1.0)

    @pytest.mark.parametrize("lx,ly", [(0.0, 1.0), (1.0, -2.0)])
    def test_bad_lengths_rejected(self, lx, ly):
        with pytest.raises(ValueError):
            Grid(8, 8, lx, ly)

    def test_eigenvalue_table(self):
        g = Grid(16, 12, 2.0, 1.0)
        eig = g.eig_lap
        assert eig.shape == (16, 12)
        assert eig[0, 0] == 0.0
        mask = np.ones(eig.shape, dtype=bool)
        mask[0, 0] = False
        assert np.all(eig[mask] < 0.0)
        # closed form for a sample mode
        j, k = 3, 5
        lam = -((2.0 / g.hx) * np.sin(j * np.pi / (2 * 16))) ** 2 - (
            (2.0 / g.hy) * np.sin(k * np.pi / (2 * 12))
        ) ** 2
        assert eig[j, k] == pytest.approx(lam, rel=1e-14)

    def test_cell_centers(self):
        g = Grid(4, 4, 1.0, 1.0)
        X, Y = g.cell_centers()
        assert X[0, 0] == 0.125 and Y[0, 0] == 0.125
        assert X[-1, 0] == 0.875


class TestFields:
    def test_scalar_shape_mismatch(self):
        g = Grid(8, 8, 1.0, 1.0)
        with pytest.raises(ValueError):
            ScalarField(g, np.zeros((8, 9)))

    def test_face_shapes(self):
        g = Grid(8, 6, 1.0, 1.0)
        u = FaceVelocity.zeros(g)
        assert u.ux.shape == (9, 6)
        assert u.uy.shape == (8, 7)
        with pytest.raises(ValueError):
            FaceVelocity(g, np.zeros((8, 6)), np.zeros((8, 7)))

    def test_noslip_walls(self, rng):
        g = Grid(8, 6, 1.0, 1.0)
        u = FaceVelocity(g, rng.standard_normal((9, 6)), rng.standard_normal((8, 7)))
        assert u.wall_residual() > 0
        u.enforce_noslip()
        assert u.wall_residual() == 0.0

    def test_copy_is_deep(self):
        g = Grid(8, 6, 1.0, 1.0)
        f = ScalarField.full(g, 1.0)
        f2 = f.copy()
        f2.values[0, 0] = 5.0
        assert f.values[0, 0] == 1.0
