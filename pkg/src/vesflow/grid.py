"""Cell-centered rectangular grid and the two field types living on it.

The domain is the rectangle [0, lx] x [0, ly] split into nx x ny uniform
cells. Scalars are sampled at cell centers, velocities on the staggered
(MAC) face arrangement: the x component on vertical faces, the y
component on horizontal faces. Array index ``[i, j]`` always means
(x index, y index).

The grid owns the eigenvalue table of the mirror-ghost Laplacian in the
cell-centered cosine basis, which diagonalizes every constant-coefficient
Neumann solve exactly (it is the eigenbasis of the discrete operator, not
a spectral approximation of the continuous one).
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

__all__ = ["Grid", "ScalarField", "FaceVelocity"]


@dataclass(frozen=True)
class Grid:
    """Uniform cell-centered grid on a rectangle."""

    nx: int
    ny: int
    lx: float
    ly: float

    def __post_init__(self):
        if self.nx < 4 or self.ny < 4:
            raise ValueError(f"grid needs nx, ny >= 4 (got {self.nx} x {self.ny})")
        if not (self.lx > 0.0 and self.ly > 0.0):
            raise ValueError(f"domain lengths must be positive (got {self.lx}, {self.ly})")

    @property
    def hx(self):
        return self.lx / self.nx

    @property
    def hy(self):
        return self.ly / self.ny

    @property
    def shape(self):
        return (self.nx, self.ny)

    @property
    def area(self):
        return self.lx * self.ly

    @cached_property
    def eig_lap(self):
        """Eigenvalues of the mirror-ghost Laplacian per cosine mode (j, k).

        lambda[j, k] = -((2/hx) sin(j pi / (2 nx)))^2
                       -((2/hy) sin(k pi / (2 ny)))^2

        Mode (0, 0) is exactly 0; every other mode is strictly negative.
        """
        sx = (2.0 / self.hx) * np.sin(np.arange(self.nx) * (np.pi / (2 * self.nx)))
        sy = (2.0 / self.hy) * np.sin(np.arange(self.ny) * (np.pi / (2 * self.ny)))
        table = -(sx * sx)[:, None] - (sy * sy)[None, :]
        table.flags.writeable = False
        return table

    def cell_centers(self):
        """Arrays X, Y of cell-center coordinates, shape (nx, ny)."""
        x = (np.arange(self.nx) + 0.5) * self.hx
        y = (np.arange(self.ny) + 0.5) * self.hy
        return np.meshgrid(x, y, indexing="ij")

    def cosine_mode(self, j, k):
        """Discrete cosine eigenfunction for mode (j, k), as a ScalarField."""
        i = np.arange(self.nx)
        m = np.arange(self.ny)
        vx = np.cos(j * np.pi * (2 * i + 1) / (2 * self.nx))
        vy = np.cos(k * np.pi * (2 * m + 1) / (2 * self.ny))
        return ScalarField(self, vx[:, None] * vy[None, :])


@dataclass
class ScalarField:
    """Cell-centered scalar samples over a Grid."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.float64)
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"field shape {self.values.shape} does not match grid {self.grid.shape}"
            )

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def full(cls, grid, value):
        return cls(grid, np.full(grid.shape, float(value)))

    @classmethod
    def from_function(cls, grid, fn):
        X, Y = grid.cell_centers()
        return cls(grid, np.asarray(fn(X, Y), dtype=np.float64))

    def copy(self):
        return ScalarField(self.grid, self.values.copy())

    def is_finite(self):
        return bool(np.isfinite(self.values).all())


@dataclass
class FaceVelocity:
    """Staggered velocity: ux on vertical faces, uy on horizontal faces.

    ux has shape (nx+1, ny) with ux[0, :] and ux[nx, :] on the side walls;
    uy has shape (nx, ny+1) with uy[:, 0] and uy[:, ny] on top and bottom.
    Under no-slip those wall faces are zero (tangential no-slip enters the
    operators through ghost values, not stored samples).
    """

    grid: Grid
    ux: np.ndarray = field(repr=False)
    uy: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.ux = np.ascontiguousarray(self.ux, dtype=np.float64)
        self.uy = np.ascontiguousarray(self.uy, dtype=np.float64)
        nx, ny = self.grid.shape
        if self.ux.shape != (nx + 1, ny) or self.uy.shape != (nx, ny + 1):
            raise ValueError(
                f"face shapes {self.ux.shape}, {self.uy.shape} do not match grid {self.grid.shape}"
            )

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros((grid.nx + 1, grid.ny)), np.zeros((grid.nx, grid.ny + 1)))

    def copy(self):
        return FaceVelocity(self.grid, self.ux.copy(), self.uy.copy())

    def wall_residual(self):
        """Largest absolute velocity stored on a wall face."""
        return max(
            float(np.abs(self.ux[0]).max()),
            float(np.abs(self.ux[-1]).max()),
            float(np.abs(self.uy[:, 0]).max()),
            float(np.abs(self.uy[:, -1]).max()),
        )

    def enforce_noslip(self):
        """Zero the wall faces in place."""
        self.ux[0] = 0.0
        self.ux[-1] = 0.0
        self.uy[:, 0] = 0.0
        self.uy[:, -1] = 0.0
        return self

    def is_finite(self):
        return bool(np.isfinite(self.ux).all() and np.isfinite(self.uy).all())
