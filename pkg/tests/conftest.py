import numpy as np
import pytest
import scipy.fft

from vesflow.grid import FaceVelocity, Grid, ScalarField


@pytest.fixture
def grid():
    return Grid(32, 24, 1.0, 1.5)


@pytest.fixture
def square_grid():
    return Grid(48, 48, 1.0, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(42)


def random_field(grid, rng, zero_mean=False):
    v = rng.standard_normal(grid.shape)
    if zero_mean:
        v = v - v.mean()
    return ScalarField(grid, v)


def smooth_field(grid, rng, amp=0.5, modes=5, zero_mean=True):
    """Band-limited random field from a few low cosine modes."""
    c = np.zeros(grid.shape)
    c[:modes, :modes] = rng.standard_normal((modes, modes))
    if zero_mean:
        c[0, 0] = 0.0
    v = scipy.fft.idctn(c, type=2, norm="ortho")
    v *= amp / max(np.abs(v).max(), 1e-30)
    if zero_mean:
        v -= v.mean()
    return ScalarField(grid, v)


def random_noslip(grid, rng):
    u = FaceVelocity(
        grid,
        rng.standard_normal((grid.nx + 1, grid.ny)),
        rng.standard_normal((grid.nx, grid.ny + 1)),
    )
    return u.enforce_noslip()


def solenoidal(grid, rng, scale=None):
    """Exactly divergence-free no-slip velocity from a corner stream function."""
    phi = np.zeros((grid.nx + 1, grid.ny + 1))
    phi[1:-1, 1:-1] = rng.standard_normal((grid.nx - 1, grid.ny - 1))
    ux = (phi[:, 1:] - phi[:, :-1]) / grid.hy
    uy = -(phi[1:] - phi[:-1]) / grid.hx
    u = FaceVelocity(grid, ux, uy)
    if scale is not None:
        w = grid.hx * grid.hy
        n = np.sqrt(w * (np.sum(ux * ux) + np.sum(uy * uy)))
        u.ux *= scale / n
        u.uy *= scale / n
    return u


def annulus_phase(grid, cx, cy, r_in, r_out, width):
    X, Y = grid.cell_centers()
    r = np.hypot(X - cx, Y - cy)
    sd = np.minimum(r - r_in, r_out - r)
    return np.tanh(sd / width)
