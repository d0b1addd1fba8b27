import numpy as np
import pytest

import vesflow.operators as ops
from conftest import smooth_field, solenoidal
from vesflow.energy import (
    PhysParams,
    bending_energy,
    chemical_potential,
    g_bar,
    g_of,
    kinetic_energy,
    potential,
    potential_d1,
    potential_d2,
    potential_d3,
    surface_area,
    total_energy,
    z_of,
)
from vesflow.grid import FaceVelocity, Grid, ScalarField


@pytest.fixture
def params():
    return PhysParams(eps=0.1, lam=0.5, nu=1.0, gamma=1.0, m_pen=10.0, alpha=0.5, m0=0.1)


def const_psi(grid, phi_value, p):
    """Mean-free field whose phase is the given constant."""
    return ScalarField.full(grid, phi_value - p.m0)


class TestPotential:
    def test_well_minimum(self):
        assert potential(1.0) == 0.0
        assert potential_d1(1.0) == 0.0

    def test_origin_values(self):
        assert potential(0.0) == 0.25
        assert potential_d2(0.0) == -1.0

    def test_outer_branch(self):
        assert potential_d1(2.0) == 6.0
        assert potential_d3(2.0) == 12.0

    def test_derivative_consistency_fd(self):
        h = 1e-6
        for c in (-1.3, -0.4, 0.2, 0.9, 1.7):
            fd = (potential(c + h) - potential(c - h)) / (2 * h)
            assert fd == pytest.approx(potential_d1(c), rel=1e-8, abs=1e-8)
            fd2 = (potential_d1(c + h) - potential_d1(c - h)) / (2 * h)
            assert fd2 == pytest.approx(potential_d2(c), rel=1e-8, abs=1e-8)


class TestSurfaceArea:
    def test_pure_phase_vanishes(self, square_grid, params):
        assert surface_area(const_psi(square_grid, 1.0, params), params) == 0.0

    def test_uniform_zero_phase(self, params):
        g = Grid(16, 16, 1.0, 1.0)
        a = surface_area(const_psi(g, 0.0, params), params)
        assert a == pytest.approx(1.0 / (4 * params.eps), rel=1e-13)

    def test_tanh_strip_against_quadrature(self):
        # fine 1D midpoint quadrature of the layer energy density
        eps = 0.05
        xs = (np.arange(400000) + 0.5) / 400000
        prof = np.tanh((xs - 0.5) / (eps * np.sqrt(2.0)))
        dprof = np.gradient(prof, xs)
        density = 0.5 * eps * dprof**2 + potential(prof) / eps
        oracle = float(np.trapezoid(density, xs))
        assert oracle == pytest.approx(2.0 * np.sqrt(2.0) / 3.0, rel=2e-3)

        g = Grid(256, 8, 1.0, 1.0 / 32)
        X, _ = g.cell_centers()
        phi = np.tanh((X - 0.5) / (eps * np.sqrt(2.0)))
        m0 = float(phi.mean())
        p = PhysParams(eps=eps, lam=1.0, nu=1.0, gamma=1.0, m_pen=1.0, alpha=0.0, m0=m0)
        a = surface_area(ScalarField(g, phi - m0), p) / g.ly
        assert a == pytest.approx(2.0 * np.sqrt(2.0) / 3.0, rel=0.01)

    def test_gradient_only_form(self, square_grid, rng):
        psi = smooth_field(square_grid, rng)
        full = PhysParams(eps=0.1, lam=1.0, nu=1.0, gamma=1.0, m_pen=1.0, alpha=0.0, m0=0.0)
        gonly = PhysParams(eps=0.1, lam=1.0, nu=1.0, gamma=1.0, m_pen=1.0, alpha=0.0,
                           m0=0.0, area_form="gradient_only")
        diff = surface_area(psi, full) - surface_area(psi, gonly)
        well = square_grid.hx * square_grid.hy * np.sum(potential(psi.values)) / 0.1
        assert diff == pytest.approx(well, rel=1e-12)


class TestChemicalPotential:
    @pytest.mark.parametrize("phi,expected", [(1.0, 0.0), (0.0, 0.0)])
    def test_constant_zeros(self, square_grid, params, phi, expected):
        mu = chemical_potential(const_psi(square_grid, phi, params), params)
        assert np.abs(mu.values - expected).max() == 0.0

    def test_constant_outer(self, square_grid, params):
        mu = chemical_potential(const_psi(square_grid, 2.0, params), params)
        assert np.abs(mu.values - 6.0 / params.eps).max() <= 1e-12 / params.eps


class TestBendingEnergy:
    def test_pure_phase(self, square_grid, params):
        e = bending_energy(const_psi(square_grid, 1.0, params), params)
        assert e.willmore == 0.0
        assert e.penalty == pytest.approx(0.5 * params.m_pen * params.alpha**2, rel=1e-14)
        assert e.kinetic == 0.0

    def test_uniform_zero_phase(self, params):
        g = Grid(16, 16, 1.0, 1.0)
        e = bending_energy(const_psi(g, 0.0, params), params)
        assert e.willmore == 0.0
        expected = 0.5 * params.m_pen * (1.0 / (4 * params.eps) - params.alpha) ** 2
        assert e.penalty == pytest.approx(expected, rel=1e-13)

    def test_nonnegative_components(self, square_grid, rng, params):
        for _ in range(20):
            e = bending_energy(smooth_field(square_grid, rng), params)
            assert e.willmore >= 0.0 and e.penalty >= 0.0 and e.area >= 0.0

    def test_lambda_independence_of_bending(self, square_grid, rng):
        psi = smooth_field(square_grid, rng)
        kw = dict(eps=0.1, nu=1.0, gamma=1.0, m_pen=10.0, alpha=0.5, m0=0.1)
        e1 = bending_energy(psi, PhysParams(lam=1.0, **kw))
        e2 = bending_energy(psi, PhysParams(lam=7.0, **kw))
        assert e1.bending == e2.bending

    def test_penalty_monotone_in_area_mismatch(self, square_grid, rng):
        psi = smooth_field(square_grid, rng)
        kw = dict(eps=0.1, lam=1.0, nu=1.0, gamma=1.0, m_pen=10.0, m0=0.1)
        a = surface_area(psi, PhysParams(alpha=0.0, **kw))
        pens = [bending_energy(psi, PhysParams(alpha=alpha, **kw)).penalty
                for alpha in (a, a + 0.5, a + 1.0)]
        assert pens[0] < pens[1] < pens[2]

    def test_willmore_disk_scaling_against_radial_quadrature(self):
        # leading-order layer energy of a circle scales like 1/R; the
        # radial quadrature oracle integrates the exact layer profile
        eps = 0.08

        # the discrete check: halving of the energy under radius doubling
        vals = {}
        for radius in (0.3, 0.6):
            g = Grid(128, 128, 2.0, 2.0)
            X, Y = g.cell_centers()
            rr = np.hypot(X - 1.0, Y - 1.0)
            phi = np.tanh((radius - rr) / (eps * np.sqrt(2.0)))
            m0 = float(phi.mean())
            p = PhysParams(eps=eps, lam=1.0, nu=1.0, gamma=1.0, m_pen=1.0,
                           alpha=0.0, m0=m0)
            vals[radius] = bending_energy(ScalarField(g, phi - m0), p).willmore
        assert vals[0.6] / vals[0.3] == pytest.approx(0.5, rel=0.10)

        # radial quadrature of the leading curvature term (pi/R)*(2 sqrt2/3)
        def leading(radius):
            r = np.linspace(radius - 10 * eps, radius + 10 * eps, 400000)
            prof_d = (1.0 - np.tanh((r - radius) / (eps * np.sqrt(2.0))) ** 2) / (eps * np.sqrt(2.0))
            mu_sq = (eps * prof_d / r) ** 2
            return float(np.trapezoid(mu_sq * 2 * np.pi * r, r)) / (2 * eps)

        for radius in (0.3, 0.6):
            assert vals[radius] == pytest.approx(leading(radius), rel=0.15)


class TestGradientChain:
    def test_pure_phase_identically_zero(self, square_grid, params):
        psi = const_psi(square_grid, 1.0, params)
        assert np.abs(g_of(psi, params).values).max() == 0.0
        assert np.abs(g_bar(psi, params).values).max() == 0.0
        assert np.abs(z_of(psi, params).values).max() == 0.0

    def test_constant_closed_form(self, square_grid, params):
        c = 0.37
        psi = const_psi(square_grid, c, params)
        a = square_grid.lx * square_grid.ly * potential(c) / params.eps
        expected = (
            potential_d2(c) * potential_d1(c) / params.eps**3
            + params.m_pen * (a - params.alpha) * potential_d1(c) / params.eps
        )
        got = g_of(psi, params).values
        assert np.abs(got - expected).max() <= 1e-12 * abs(expected)

    def test_mean_identity(self, square_grid, rng, params):
        # mean(G) keeps only the zero-mean-free parts: the lap(F') term
        # integrates to zero on the mirror grid
        psi = smooth_field(square_grid, rng, amp=0.6)
        G = g_of(psi, params)
        mu = chemical_potential(psi, params)
        phi = psi.values + params.m0
        a = surface_area(psi, params)
        expected = (
            ops.mean(ScalarField(square_grid, potential_d2(phi) * mu.values)) / params.eps**2
            + params.m_pen * (a - params.alpha) * ops.mean(mu)
        )
        scale = max(np.abs(G.values).max(), 1.0)
        assert abs(ops.mean(G) - expected) <= 1e-12 * scale

    def test_g_bar_and_z_mean_free(self, square_grid, rng, params):
        for _ in range(20):
            psi = smooth_field(square_grid, rng, amp=0.8)
            gb = g_bar(psi, params)
            zz = z_of(psi, params)
            assert abs(ops.mean(gb)) <= 1e-13 * max(np.abs(gb.values).max(), 1.0)
            assert abs(ops.mean(zz)) <= 1e-12 * max(ops.norm_l2(zz), 1.0)

    def test_g_bar_is_recentred_g(self, square_grid, rng, params):
        psi = smooth_field(square_grid, rng)
        raw = g_of(psi, params)
        gb = g_bar(psi, params)
        assert np.abs(gb.values - (raw.values - ops.mean(raw))).max() == 0.0


class TestVariationalDerivative:
    """z must be the exact gradient of the discrete bending energy; the
    centered-difference oracle is the arbiter for the derivative chain."""

    @pytest.mark.parametrize("area_form", ["full", "gradient_only"])
    def test_directional_derivative(self, rng, area_form):
        g = Grid(48, 48, 1.0, 1.0)
        p = PhysParams(eps=0.1, lam=0.5, nu=1.0, gamma=1.0, m_pen=10.0,
                       alpha=0.5, m0=0.1, area_form=area_form)
        for _ in range(5):
            psi = smooth_field(g, rng, amp=0.5)
            xi = smooth_field(g, rng, amp=1.0)
            ref = ops.inner(z_of(psi, p), xi)
            best = np.inf
            for h in (1e-3, 1e-4, 1e-5, 1e-6):
                ep = bending_energy(ScalarField(g, psi.values + h * xi.values), p).bending
                em = bending_energy(ScalarField(g, psi.values - h * xi.values), p).bending
                best = min(best, abs((ep - em) / (2 * h) - ref) / max(abs(ref), 1e-30))
            assert best < 1e-5


class TestTotalEnergy:
    def test_rest_pure_phase(self, square_grid, params):
        u = FaceVelocity.zeros(square_grid)
        e = total_energy(u, const_psi(square_grid, 1.0, params), params)
        assert e.total == pytest.approx(
            params.lam * params.m_pen * params.alpha**2 / 2, rel=1e-14
        )

    def test_rest_equals_scaled_bending(self, square_grid, rng, params):
        psi = smooth_field(square_grid, rng)
        e = total_energy(FaceVelocity.zeros(square_grid), psi, params)
        assert e.total == pytest.approx(params.lam * e.bending, rel=1e-14)
        assert e.kinetic == 0.0

    def test_lambda_scaling_exact(self, square_grid, rng):
        psi = smooth_field(square_grid, rng)
        u = solenoidal(square_grid, rng, scale=0.7)
        kw = dict(eps=0.1, nu=1.0, gamma=1.0, m_pen=10.0, alpha=0.5, m0=0.1)
        e1 = total_energy(u, psi, PhysParams(lam=1.0, **kw))
        e2 = total_energy(u, psi, PhysParams(lam=2.0, **kw))
        assert e2.total - e2.kinetic == 2.0 * (e1.total - e1.kinetic)

    def test_kinetic_consistency(self, square_grid, rng):
        u = solenoidal(square_grid, rng, scale=1.3)
        from vesflow.flow import velocity_l2

        assert kinetic_energy(u) == pytest.approx(0.5 * velocity_l2(u) ** 2, rel=1e-14)

    def test_component_consistency(self, square_grid, rng, params):
        psi = smooth_field(square_grid, rng)
        u = solenoidal(square_grid, rng, scale=0.5)
        e = total_energy(u, psi, params)
        assert e.total == pytest.approx(
            e.kinetic + params.lam * (e.willmore + e.penalty), rel=1e-12
        )


class TestParamsValidation:
    @pytest.mark.parametrize("field,value", [
        ("eps", 0.0), ("lam", -1.0), ("nu", 0.0), ("gamma", -0.1),
    ])
    def test_positivity(self, field, value):
        kw = dict(eps=0.1, lam=1.0, nu=1.0, gamma=1.0, m_pen=1.0, alpha=0.0, m0=0.0)
        kw[field] = value
        with pytest.raises(ValueError):
            PhysParams(**kw)

    def test_zero_penalty_allowed(self):
        PhysParams(eps=0.1, lam=1.0, nu=1.0, gamma=1.0, m_pen=0.0, alpha=0.0, m0=0.0)

    def test_bad_area_form(self):
        with pytest.raises(ValueError):
            PhysParams(eps=0.1, lam=1.0, nu=1.0, gamma=1.0, m_pen=1.0,
                       alpha=0.0, m0=0.0, area_form="fancy")
