# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled stencil kernels (hot-loop backend).

Same contracts as vesflow.kernels.reference; every per-element formula
uses the same association order as the numpy expressions there, so with
FMA contraction disabled the two backends agree bitwise on the stencil
outputs.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = "compiled"

ctypedef cnp.float64_t f64


def laplacian(cnp.ndarray[f64, ndim=2] f, double hx, double hy):
    cdef Py_ssize_t nx = f.shape[0], ny = f.shape[1]
    cdef double invx = 1.0 / (hx * hx)
    cdef double invy = 1.0 / (hy * hy)
    cdef cnp.ndarray[f64, ndim=2] out = np.empty((nx, ny))
    cdef Py_ssize_t i, j
    cdef double fxm, fxp, fym, fyp, c
    for i in range(nx):
        for j in range(ny):
            c = f[i, j]
            fxm = f[i - 1, j] if i > 0 else c
            fxp = f[i + 1, j] if i < nx - 1 else c
            fym = f[i, j - 1] if j > 0 else c
            fyp = f[i, j + 1] if j < ny - 1 else c
            out[i, j] = (fxm + fxp - 2.0 * c) * invx + (fym + fyp - 2.0 * c) * invy
    return out


def gradient(cnp.ndarray[f64, ndim=2] f, double hx, double hy):
    cdef Py_ssize_t nx = f.shape[0], ny = f.shape[1]
    cdef double invx = 1.0 / hx
    cdef double invy = 1.0 / hy
    cdef cnp.ndarray[f64, ndim=2] gx = np.zeros((nx + 1, ny))
    cdef cnp.ndarray[f64, ndim=2] gy = np.zeros((nx, ny + 1))
    cdef Py_ssize_t i, j
    for i in range(1, nx):
        for j in range(ny):
            gx[i, j] = (f[i, j] - f[i - 1, j]) * invx
    for i in range(nx):
        for j in range(1, ny):
            gy[i, j] = (f[i, j] - f[i, j - 1]) * invy
    return gx, gy


def divergence(cnp.ndarray[f64, ndim=2] vx, cnp.ndarray[f64, ndim=2] vy,
               double hx, double hy):
    cdef Py_ssize_t nx = vy.shape[0], ny = vx.shape[1]
    cdef double invx = 1.0 / hx
    cdef double invy = 1.0 / hy
    cdef cnp.ndarray[f64, ndim=2] out = np.empty((nx, ny))
    cdef Py_ssize_t i, j
    for i in range(nx):
        for j in range(ny):
            out[i, j] = (vx[i + 1, j] - vx[i, j]) * invx + (vy[i, j + 1] - vy[i, j]) * invy
    return out


def interp_to_faces(cnp.ndarray[f64, ndim=2] c):
    cdef Py_ssize_t nx = c.shape[0], ny = c.shape[1]
    cdef cnp.ndarray[f64, ndim=2] cx = np.zeros((nx + 1, ny))
    cdef cnp.ndarray[f64, ndim=2] cy = np.zeros((nx, ny + 1))
    cdef Py_ssize_t i, j
    for i in range(1, nx):
        for j in range(ny):
            cx[i, j] = 0.5 * (c[i, j] + c[i - 1, j])
    for i in range(nx):
        for j in range(1, ny):
            cy[i, j] = 0.5 * (c[i, j] + c[i, j - 1])
    return cx, cy


def advect(cnp.ndarray[f64, ndim=2] ux, cnp.ndarray[f64, ndim=2] uy,
           cnp.ndarray[f64, ndim=2] f, double hx, double hy):
    cdef Py_ssize_t nx = f.shape[0], ny = f.shape[1]
    cdef double invx = 1.0 / hx
    cdef double invy = 1.0 / hy
    cdef cnp.ndarray[f64, ndim=2] out = np.empty((nx, ny))
    cdef Py_ssize_t i, j
    cdef double fxw, fxe, fys, fyn
    for i in range(nx):
        for j in range(ny):
            fxw = ux[i, j] * ((f[i, j] - f[i - 1, j]) * invx) if i > 0 else 0.0
            fxe = ux[i + 1, j] * ((f[i + 1, j] - f[i, j]) * invx) if i < nx - 1 else 0.0
            fys = uy[i, j] * ((f[i, j] - f[i, j - 1]) * invy) if j > 0 else 0.0
            fyn = uy[i, j + 1] * ((f[i, j + 1] - f[i, j]) * invy) if j < ny - 1 else 0.0
            out[i, j] = 0.5 * (fxw + fxe) + 0.5 * (fys + fyn)
    return out


def convective(cnp.ndarray[f64, ndim=2] ux, cnp.ndarray[f64, ndim=2] uy,
               double hx, double hy):
    cdef Py_ssize_t nx = ux.shape[0] - 1, ny = ux.shape[1]
    cdef double invx = 1.0 / hx
    cdef double invy = 1.0 / hy
    cdef cnp.ndarray[f64, ndim=2] cx = np.zeros((nx + 1, ny))
    cdef cnp.ndarray[f64, ndim=2] cy = np.zeros((nx, ny + 1))
    cdef Py_ssize_t i, j
    cdef double uce, ucw, vct, vcb, dxe, dxw, dyn, dys
    cdef double uxn, uxs, uyw, uye
    # x momentum on interior vertical faces
    for i in range(1, nx):
        for j in range(ny):
            ucw = 0.5 * (ux[i - 1, j] + ux[i, j])
            uce = 0.5 * (ux[i, j] + ux[i + 1, j])
            dxw = (ux[i, j] - ux[i - 1, j]) * invx
            dxe = (ux[i + 1, j] - ux[i, j]) * invx
            vcb = 0.5 * (uy[i - 1, j] + uy[i, j])
            vct = 0.5 * (uy[i - 1, j + 1] + uy[i, j + 1])
            uxs = ux[i, j - 1] if j > 0 else -ux[i, j]
            uxn = ux[i, j + 1] if j < ny - 1 else -ux[i, j]
            dys = (ux[i, j] - uxs) * invy
            dyn = (uxn - ux[i, j]) * invy
            cx[i, j] = 0.5 * (uce * dxe + ucw * dxw) + 0.5 * (vct * dyn + vcb * dys)
    # y momentum on interior horizontal faces
    for i in range(nx):
        for j in range(1, ny):
            vcb = 0.5 * (uy[i, j - 1] + uy[i, j])
            vct = 0.5 * (uy[i, j] + uy[i, j + 1])
            dys = (uy[i, j] - uy[i, j - 1]) * invy
            dyn = (uy[i, j + 1] - uy[i, j]) * invy
            ucw = 0.5 * (ux[i, j - 1] + ux[i, j])
            uce = 0.5 * (ux[i + 1, j - 1] + ux[i + 1, j])
            uyw = uy[i - 1, j] if i > 0 else -uy[i, j]
            uye = uy[i + 1, j] if i < nx - 1 else -uy[i, j]
            dxw = (uy[i, j] - uyw) * invx
            dxe = (uye - uy[i, j]) * invx
            cy[i, j] = 0.5 * (vct * dyn + vcb * dys) + 0.5 * (uce * dxe + ucw * dxw)
    return cx, cy


def velocity_laplacian(cnp.ndarray[f64, ndim=2] ux, cnp.ndarray[f64, ndim=2] uy,
                       double hx, double hy):
    cdef Py_ssize_t nx = ux.shape[0] - 1, ny = ux.shape[1]
    cdef double invx = 1.0 / (hx * hx)
    cdef double invy = 1.0 / (hy * hy)
    cdef cnp.ndarray[f64, ndim=2] lx = np.zeros((nx + 1, ny))
    cdef cnp.ndarray[f64, ndim=2] ly = np.zeros((nx, ny + 1))
    cdef Py_ssize_t i, j
    cdef double um, up, c
    for i in range(1, nx):
        for j in range(ny):
            c = ux[i, j]
            um = ux[i, j - 1] if j > 0 else -c
            up = ux[i, j + 1] if j < ny - 1 else -c
            lx[i, j] = (ux[i - 1, j] + ux[i + 1, j] - 2.0 * c) * invx + (um + up - 2.0 * c) * invy
    for i in range(nx):
        for j in range(1, ny):
            c = uy[i, j]
            um = uy[i - 1, j] if i > 0 else -c
            up = uy[i + 1, j] if i < nx - 1 else -c
            ly[i, j] = (uy[i, j - 1] + uy[i, j + 1] - 2.0 * c) * invy + (um + up - 2.0 * c) * invx
    return lx, ly
