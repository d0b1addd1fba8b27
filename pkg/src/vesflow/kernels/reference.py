"""Pure-numpy stencil kernels (fallback backend).

All kernels operate on raw float64 arrays laid out as ``a[i, j]`` with
``i`` the x index and ``j`` the y index. Scalars live at cell centers
(shape ``(nx, ny)``); x face data has shape ``(nx+1, ny)`` and y face
data ``(nx, ny+1)``.

Boundary conventions baked into every kernel:

* scalars: homogeneous Neumann via mirror ghosts (ghost = adjacent cell);
* normal velocity: wall faces are stored in the arrays and read as-is
  (zero under no-slip);
* tangential velocity: linear no-slip ghost (ghost = -interior sample).

The compiled backend replicates each formula with the same association
order so the two backends agree bitwise (modulo FMA, which the build
disables).
"""

import numpy as np

BACKEND_NAME = "numpy"


def laplacian(f, hx, hy):
    """5-point Laplacian with mirror (zero normal derivative) ghosts."""
    invx = 1.0 / (hx * hx)
    invy = 1.0 / (hy * hy)
    nx, ny = f.shape
    px = np.empty((nx + 2, ny))
    px[1:-1] = f
    px[0] = f[0]
    px[-1] = f[-1]
    py = np.empty((nx, ny + 2))
    py[:, 1:-1] = f
    py[:, 0] = f[:, 0]
    py[:, -1] = f[:, -1]
    return (px[:-2] + px[2:] - 2.0 * f) * invx + (py[:, :-2] + py[:, 2:] - 2.0 * f) * invy


def gradient(f, hx, hy):
    """Face-centered gradient; boundary faces carry the Neumann value 0."""
    nx, ny = f.shape
    invx = 1.0 / hx
    invy = 1.0 / hy
    gx = np.zeros((nx + 1, ny))
    gx[1:-1] = (f[1:] - f[:-1]) * invx
    gy = np.zeros((nx, ny + 1))
    gy[:, 1:-1] = (f[:, 1:] - f[:, :-1]) * invy
    return gx, gy


def divergence(vx, vy, hx, hy):
    """Cell-centered divergence of face data; exact adjoint of -gradient."""
    invx = 1.0 / hx
    invy = 1.0 / hy
    return (vx[1:] - vx[:-1]) * invx + (vy[:, 1:] - vy[:, :-1]) * invy


def interp_to_faces(c):
    """Centered interpolation of a cell field to faces; 0 on boundary faces."""
    nx, ny = c.shape
    cx = np.zeros((nx + 1, ny))
    cx[1:-1] = 0.5 * (c[1:] + c[:-1])
    cy = np.zeros((nx, ny + 1))
    cy[:, 1:-1] = 0.5 * (c[:, 1:] + c[:, :-1])
    return cx, cy


def advect(ux, uy, f, hx, hy):
    """u . grad(f) at cell centers.

    Per cell, the average over its faces of (face velocity x face
    gradient). Pairing this with any cell field by the plain weighted sum
    reproduces the face pairing sum(u * interp(g) * grad(f)), which makes
    the advective and elastic terms exact adjoints and yields discrete
    skew-symmetry: (advect(u, f), f) = -(f^2, div u)/2.
    """
    nx, ny = f.shape
    invx = 1.0 / hx
    invy = 1.0 / hy
    fx = np.zeros((nx + 1, ny))
    fx[1:-1] = ux[1:-1] * ((f[1:] - f[:-1]) * invx)
    fy = np.zeros((nx, ny + 1))
    fy[:, 1:-1] = uy[:, 1:-1] * ((f[:, 1:] - f[:, :-1]) * invy)
    return 0.5 * (fx[:-1] + fx[1:]) + 0.5 * (fy[:, :-1] + fy[:, 1:])


def convective(ux, uy, hx, hy):
    """(u . grad)u on the staggered grid, energy-neutral form.

    Each velocity component is advected on its own control volume with
    centered advecting velocities (cell centers for the normal direction,
    corners for the tangential one). For divergence-free u the quadratic
    form vanishes identically, up to round-off.
    """
    nx = ux.shape[0] - 1
    ny = ux.shape[1]
    invx = 1.0 / hx
    invy = 1.0 / hy

    cx = np.zeros_like(ux)
    cy = np.zeros_like(uy)

    # x momentum: control volumes centered on interior vertical faces.
    uc = 0.5 * (ux[:-1] + ux[1:])                      # (nx, ny) at cell centers
    vcor = np.zeros((nx + 1, ny + 1))                  # corners
    vcor[1:-1] = 0.5 * (uy[:-1] + uy[1:])
    uxp = np.empty((nx + 1, ny + 2))                   # no-slip ghosts in y
    uxp[:, 1:-1] = ux
    uxp[:, 0] = -ux[:, 0]
    uxp[:, -1] = -ux[:, -1]
    dxe = (ux[2:] - ux[1:-1]) * invx
    dxw = (ux[1:-1] - ux[:-2]) * invx
    dyn = (uxp[1:-1, 2:] - uxp[1:-1, 1:-1]) * invy
    dys = (uxp[1:-1, 1:-1] - uxp[1:-1, :-2]) * invy
    cx[1:-1] = 0.5 * (uc[1:] * dxe + uc[:-1] * dxw) + 0.5 * (
        vcor[1:-1, 1:] * dyn + vcor[1:-1, :-1] * dys
    )

    # y momentum, mirrored construction.
    vc = 0.5 * (uy[:, :-1] + uy[:, 1:])                # (nx, ny) at cell centers
    ucor = np.zeros((nx + 1, ny + 1))
    ucor[:, 1:-1] = 0.5 * (ux[:, :-1] + ux[:, 1:])
    uyp = np.empty((nx + 2, ny + 1))                   # no-slip ghosts in x
    uyp[1:-1] = uy
    uyp[0] = -uy[0]
    uyp[-1] = -uy[-1]
    dyn = (uy[:, 2:] - uy[:, 1:-1]) * invy
    dys = (uy[:, 1:-1] - uy[:, :-2]) * invy
    dxe = (uyp[2:, 1:-1] - uyp[1:-1, 1:-1]) * invx
    dxw = (uyp[1:-1, 1:-1] - uyp[:-2, 1:-1]) * invx
    cy[:, 1:-1] = 0.5 * (vc[:, 1:] * dyn + vc[:, :-1] * dys) + 0.5 * (
        ucor[1:, 1:-1] * dxe + ucor[:-1, 1:-1] * dxw
    )
    return cx, cy


def velocity_laplacian(ux, uy, hx, hy):
    """Componentwise Laplacian of the staggered velocity.

    Normal-direction neighbors read the stored wall faces directly;
    tangential walls use the linear no-slip ghost -u, which is first-order
    accurate at walls and keeps the operator symmetric negative definite.
    """
    invx = 1.0 / (hx * hx)
    invy = 1.0 / (hy * hy)

    lx = np.zeros_like(ux)
    uxp = np.empty((ux.shape[0], ux.shape[1] + 2))
    uxp[:, 1:-1] = ux
    uxp[:, 0] = -ux[:, 0]
    uxp[:, -1] = -ux[:, -1]
    lx[1:-1] = (ux[:-2] + ux[2:] - 2.0 * ux[1:-1]) * invx + (
        uxp[1:-1, :-2] + uxp[1:-1, 2:] - 2.0 * ux[1:-1]
    ) * invy

    ly = np.zeros_like(uy)
    uyp = np.empty((uy.shape[0] + 2, uy.shape[1]))
    uyp[1:-1] = uy
    uyp[0] = -uy[0]
    uyp[-1] = -uy[-1]
    ly[:, 1:-1] = (uy[:, :-2] + uy[:, 2:] - 2.0 * uy[:, 1:-1]) * invy + (
        uyp[:-2, 1:-1] + uyp[2:, 1:-1] - 2.0 * uy[:, 1:-1]
    ) * invx
    return lx, ly
