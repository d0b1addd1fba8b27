"""Bending-energy functionals and their exact discrete variations.

The membrane is described by a phase field phi = psi + m0, where psi is
the mean-free working variable and m0 the conserved average. The layer
energy is

    E_b = (1/(2 eps)) int mu^2 + (m_pen/2) (A - alpha)^2,
    mu  = -eps lap(phi) + F'(phi)/eps,
    F   = (phi^2 - 1)^2 / 4,

with A the diffuse surface area. Every functional here is differentiated
*discretely*: z_of returns the exact gradient of the discrete energy with
respect to the cell values (under the hx*hy-weighted product, restricted
to mean-free variations). That exactness is what the finite-difference
gradient check certifies, and it pins two sign/derivative choices:

* the area integrand uses F (so that its variation is mu);
* the middle term of the chemical-potential chain uses F'' (the
  derivative of mu with respect to phi), not F'.

A trimmed area form (gradient term only) is available via
``area_form="gradient_only"``; the penalty then varies through
-eps*lap(phi) instead of mu, keeping the discrete gradient exact.
"""

from dataclasses import dataclass

import numpy as np

from vesflow import kernels
from vesflow.grid import FaceVelocity, ScalarField
from vesflow.operators import bilaplacian, inner, mean, norm_l2

__all__ = [
    "PhysParams",
    "EnergyBreakdown",
    "potential",
    "potential_d1",
    "potential_d2",
    "potential_d3",
    "surface_area",
    "chemical_potential",
    "bending_energy",
    "g_of",
    "g_bar",
    "z_of",
    "total_energy",
    "kinetic_energy",
]

AREA_FORMS = ("full", "gradient_only")


@dataclass(frozen=True)
class PhysParams:
    """Model constants.

    eps     interface width scale (> 0)
    lam     elastic coupling between membrane and flow (> 0)
    nu      kinematic viscosity (> 0)
    gamma   phase mobility (> 0)
    m_pen   surface-area penalty stiffness (> 0)
    alpha   target surface area (>= 0)
    m0      conserved phase average
    area_form  "full" (gradient + well terms) or "gradient_only"
    """

    eps: float
    lam: float
    nu: float
    gamma: float
    m_pen: float
    alpha: float
    m0: float
    area_form: str = "full"

    def __post_init__(self):
        for name in ("eps", "lam", "nu", "gamma"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be > 0 (got {getattr(self, name)})")
        if self.m_pen < 0.0:
            raise ValueError(f"m_pen must be >= 0 (got {self.m_pen})")
        if self.alpha < 0.0:
            raise ValueError(f"alpha must be >= 0 (got {self.alpha})")
        if self.area_form not in AREA_FORMS:
            raise ValueError(f"area_form must be one of {AREA_FORMS} (got {self.area_form!r})")


@dataclass(frozen=True)
class EnergyBreakdown:
    """Per-state energy components.

    total = kinetic + lam * (willmore + penalty); the bending part
    willmore + penalty is independent of lam.
    """

    kinetic: float
    willmore: float
    penalty: float
    area: float
    total: float

    @property
    def bending(self):
        return self.willmore + self.penalty

    @classmethod
    def build(cls, kinetic, willmore, penalty, area, lam):
        return cls(
            kinetic=kinetic,
            willmore=willmore,
            penalty=penalty,
            area=area,
            total=kinetic + lam * (willmore + penalty),
        )


def potential(c):
    """Double-well F(c) = (c^2 - 1)^2 / 4."""
    s = c * c - 1.0
    return 0.25 * s * s


def potential_d1(c):
    return (c * c - 1.0) * c


def potential_d2(c):
    return 3.0 * c * c - 1.0


def potential_d3(c):
    return 6.0 * c


def _phi(psi: ScalarField, p: PhysParams):
    return psi.values + p.m0


def surface_area(psi: ScalarField, p: PhysParams) -> float:
    """Diffuse surface area A(phi) = int (eps/2)|grad phi|^2 + F(phi)/eps.

    With area_form="gradient_only" the well term is dropped.
    """
    g = psi.grid
    phi = _phi(psi, p)
    gx, gy = kernels.gradient(phi, g.hx, g.hy)
    quad = 0.5 * p.eps * (np.sum(gx * gx) + np.sum(gy * gy))
    if p.area_form == "full":
        quad += np.sum(potential(phi)) / p.eps
    return float(g.hx * g.hy * quad)


def chemical_potential(psi: ScalarField, p: PhysParams) -> ScalarField:
    """mu = -eps lap(phi) + F'(phi)/eps, the variation of the full area."""
    g = psi.grid
    phi = _phi(psi, p)
    lap = kernels.laplacian(phi, g.hx, g.hy)
    return ScalarField(g, -p.eps * lap + potential_d1(phi) / p.eps)


def _area_variation(psi: ScalarField, p: PhysParams) -> ScalarField:
    """Variation of the configured area form (mu, or -eps lap(phi))."""
    if p.area_form == "full":
        return chemical_potential(psi, p)
    g = psi.grid
    lap = kernels.laplacian(_phi(psi, p), g.hx, g.hy)
    return ScalarField(g, -p.eps * lap)


def bending_energy(psi: ScalarField, p: PhysParams) -> EnergyBreakdown:
    """Layer energy of the phase alone (kinetic component zero)."""
    mu = chemical_potential(psi, p)
    a = surface_area(psi, p)
    will = inner(mu, mu) / (2.0 * p.eps)
    pen = 0.5 * p.m_pen * (a - p.alpha) ** 2
    return EnergyBreakdown.build(0.0, will, pen, a, p.lam)


def g_of(psi: ScalarField, p: PhysParams) -> ScalarField:
    """Lower-order part of the energy gradient:

    G = -(1/eps) lap(F'(phi)) + (1/eps^2) F''(phi) mu
        + m_pen (A - alpha) * (area variation).

    Together with eps*lap^2(phi) this reconstructs the full variation of
    the bending energy.
    """
    g = psi.grid
    phi = _phi(psi, p)
    mu = chemical_potential(psi, p)
    lap_fp = kernels.laplacian(potential_d1(phi), g.hx, g.hy)
    vals = -lap_fp / p.eps + potential_d2(phi) * mu.values / (p.eps * p.eps)
    a = surface_area(psi, p)
    vals += p.m_pen * (a - p.alpha) * _area_variation(psi, p).values
    return ScalarField(g, vals)


def g_bar(psi: ScalarField, p: PhysParams) -> ScalarField:
    """g_of recentered to zero mean."""
    raw = g_of(psi, p)
    return ScalarField(psi.grid, raw.values - mean(raw))


def z_of(psi: ScalarField, p: PhysParams) -> ScalarField:
    """Exact discrete gradient of the bending energy on mean-free fields:

    z = eps * lap(lap(psi)) + g_bar(psi),

    recentered to zero mean. The bilaplacian term is mean-free in exact
    arithmetic (its cell sum telescopes), but its values can reach 1e5 and
    larger, so the floating-point mean is removed explicitly to keep z
    mean-free at round-off scale.
    """
    zb = bilaplacian(psi)
    gb = g_bar(psi, p)
    vals = p.eps * zb.values + gb.values
    return ScalarField(psi.grid, vals - vals.mean())


def kinetic_energy(u: FaceVelocity) -> float:
    """(1/2) |u|_2^2 over the face samples."""
    w = u.grid.hx * u.grid.hy
    return float(0.5 * w * (np.sum(u.ux * u.ux) + np.sum(u.uy * u.uy)))


def total_energy(u: FaceVelocity, psi: ScalarField, p: PhysParams) -> EnergyBreakdown:
    """Kinetic plus lam times the bending energy."""
    bend = bending_energy(psi, p)
    return EnergyBreakdown.build(
        kinetic_energy(u), bend.willmore, bend.penalty, bend.area, p.lam
    )


def residual_norm(psi: ScalarField, p: PhysParams) -> float:
    """|z(psi)|_2, the distance of psi from the critical-point set."""
    return norm_l2(z_of(psi, p))
