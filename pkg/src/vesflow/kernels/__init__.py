"""Stencil-kernel backend selection.

Two interchangeable backends provide the hot finite-difference kernels:

* ``vesflow.kernels._core`` - Cython extension (preferred when built);
* ``vesflow.kernels.reference`` - pure numpy fallback.

Selection happens once at import. Set ``VESFLOW_KERNELS`` to ``numpy`` or
``compiled`` to force a backend (``compiled`` raises if the extension is
missing); the default ``auto`` picks the extension when available.
"""

import importlib
import os

from vesflow.kernels import reference

_choice = os.environ.get("VESFLOW_KERNELS", "auto").lower()

if _choice not in ("auto", "numpy", "compiled"):
    raise ValueError(f"VESFLOW_KERNELS must be auto, numpy or compiled, not {_choice!r}")


def _import_core():
    return importlib.import_module("vesflow.kernels._core")


_compiled = None
if _choice in ("auto", "compiled"):
    try:
        _compiled = _import_core()
    except ImportError:
        if _choice == "compiled":
            raise

backend = _compiled if _compiled is not None else reference
backend_name = backend.BACKEND_NAME

laplacian = backend.laplacian
gradient = backend.gradient
divergence = backend.divergence
interp_to_faces = backend.interp_to_faces
advect = backend.advect
convective = backend.convective
velocity_laplacian = backend.velocity_laplacian


def available_backends():
    """Names of importable backends, fallback first."""
    names = ["numpy"]
    try:
        _import_core()
        names.append("compiled")
    except ImportError:
        pass
    return names


def get_backend(name):
    """Return a backend module by name ('numpy' or 'compiled')."""
    if name == "numpy":
        return reference
    if name == "compiled":
        return _import_core()
    raise ValueError(f"unknown kernel backend {name!r}")
