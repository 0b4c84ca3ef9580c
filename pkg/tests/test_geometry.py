"""Droplet geometry: shapes, the exterior map and its inverse, areas, Schwarz functions."""
from __future__ import annotations

import math

import numpy as np
import pytest

import oracles
from droplet_lab.geometry import (
    DiscSpec,
    DoublyConnectedDroplet,
    EllipseSpec,
    InsideDomainError,
    SimplyConnectedDroplet,
    area,
    build_droplet,
    conformal_f,
    conformal_f_prime,
    conformal_inverse,
    contains,
    droplet_cells,
    polyline_self_intersects,
    sample_boundary,
    schwarz,
    schwarz_disc,
    schwarz_ellipse_exterior,
    solve_R,
)
from droplet_lab.params import (
    ConformalParams,
    DomainError,
    ModelParams,
    UnsupportedRegimeError,
    kappa_max,
)
from droplet_lab.phases import classify


@pytest.fixture(scope="module")
def cp_moderate() -> tuple[ConformalParams, float]:
    a, kappa, tau = 0.7, 0.1, 0.3
    return ConformalParams(R=solve_R(a, kappa, tau), a=a, kappa=kappa), tau


@pytest.fixture(scope="module")
def droplet_holed():
    model = ModelParams(p=0.3, c=0.4, tau=0.5)
    return build_droplet(model, classify(model))


@pytest.fixture(scope="module")
def droplet_simply():
    model = ModelParams(p=2.0, c=1.0, tau=0.0)
    return build_droplet(model, classify(model))


class TestShapeSpecs:
    def test_ellipse_from_params(self):
        e = EllipseSpec.from_params(c=0.4, tau=0.5)
        s = math.sqrt(1.4)
        assert e.semi_major == pytest.approx(1.5 * s, rel=1e-15)
        assert e.semi_minor == pytest.approx(0.5 * s, rel=1e-15)
        assert e.contains(complex(1.5 * s, 0.0))
        assert not e.contains(complex(1.5 * s + 1e-6, 0.0))

    def test_disc_from_params(self):
        d = DiscSpec.from_params(p=0.3, c=0.4, tau=0.5)
        assert d.center == 0.3
        assert d.radius == pytest.approx(math.sqrt(0.3), rel=1e-15)
        assert d.contains_open(0.3 + 0.0j)
        assert not d.contains_open(complex(0.3 + d.radius, 0.0))

    def test_spec_validation(self):
        with pytest.raises(DomainError):
            EllipseSpec(semi_major=0.0, semi_minor=1.0)
        with pytest.raises(DomainError):
            DiscSpec(center=0.0, radius=-0.1)


class TestSolveR:
    def test_matches_mass_constraint(self):
        a, kappa, tau = 0.7, 0.1, 0.3
        R = solve_R(a, kappa, tau)
        lhs = R * R * (1.0 - tau**2 + 2.0 * tau * kappa - (kappa / (1.0 - a * a)) ** 2)
        assert lhs == pytest.approx(1.0 - tau**2, rel=1e-14)

    def test_frozen_value(self):
        assert solve_R(0.41244672232463619, 0.15780975929295035, 0.0) == pytest.approx(
            1.0185856160730156, rel=1e-12
        )

    def test_no_charge_gives_unit_scale(self):
        assert solve_R(0.5, 0.0, 0.4) == 1.0

    def test_rejects_degenerate_scale(self):
        # at tau = 0 the mass constraint blows up as kappa -> 1 - a^2
        with pytest.raises(DomainError):
            solve_R(0.5, 0.75, 0.0)


class TestConformalMap:
    def test_poles_rejected(self, cp_moderate):
        cp, tau = cp_moderate
        for z in (0.0, cp.a):
            with pytest.raises(DomainError):
                conformal_f(z, cp, tau)
            with pytest.raises(DomainError):
                conformal_f_prime(z, cp, tau)

    def test_linear_growth_at_infinity(self, cp_moderate):
        cp, tau = cp_moderate
        z = 1e9 + 0.0j
        assert conformal_f(z, cp, tau) / z == pytest.approx(cp.R, rel=1e-8)
        assert conformal_f_prime(z, cp, tau) == pytest.approx(cp.R, rel=1e-8)

    def test_derivative_matches_finite_difference(self, cp_moderate):
        cp, tau = cp_moderate
        h = 1e-6
        for z in (1.3 + 0.4j, -0.9 + 1.1j, 2.0 - 0.3j):
            fd = (conformal_f(z + h, cp, tau) - conformal_f(z - h, cp, tau)) / (2.0 * h)
            assert conformal_f_prime(z, cp, tau) == pytest.approx(fd, rel=1e-8)

    def test_real_symmetry(self, cp_moderate):
        cp, tau = cp_moderate
        z = 1.4 + 0.7j
        assert conformal_f(np.conj(z), cp, tau) == pytest.approx(
            np.conj(conformal_f(z, cp, tau)), rel=1e-14
        )

    def test_array_evaluation_matches_scalar(self, cp_moderate):
        cp, tau = cp_moderate
        zs = np.array([1.2 + 0.1j, 3.0 - 2.0j, -1.01 + 0.0j])
        vals = conformal_f(zs, cp, tau)
        assert vals.shape == zs.shape
        for z, v in zip(zs, vals):
            assert v == conformal_f(complex(z), cp, tau)


class TestConformalInverse:
    def test_round_trip_exterior(self, cp_moderate):
        cp, tau = cp_moderate
        for z in (1.001 * np.exp(0.3j), 1.7 * np.exp(2.2j), 5.0 - 3.0j, -1.2 + 0.0j):
            zeta = conformal_f(complex(z), cp, tau)
            back = conformal_inverse(zeta, cp, tau)
            assert back == pytest.approx(complex(z), abs=1e-10)

    def test_round_trip_on_boundary(self, cp_moderate):
        cp, tau = cp_moderate
        for theta in np.linspace(0.1, 2.0 * math.pi, 17):
            z = np.exp(1j * theta)
            back = conformal_inverse(conformal_f(complex(z), cp, tau), cp, tau)
            assert abs(back - z) < 1e-9

    def test_interior_point_raises(self, cp_moderate):
        cp, tau = cp_moderate
        _, boundary = sample_boundary(cp, tau, n=256)
        inner = complex(np.mean(boundary))
        with pytest.raises(InsideDomainError):
            conformal_inverse(inner, cp, tau)

    def test_preimage_is_exterior(self, cp_moderate):
        cp, tau = cp_moderate
        rng = np.random.default_rng(3)
        for _ in range(50):
            z = (1.0 + 2.0 * rng.random()) * np.exp(2j * math.pi * rng.random())
            zeta = conformal_f(complex(z), cp, tau)
            assert abs(conformal_inverse(zeta, cp, tau)) >= 1.0 - 1e-12


class TestSampleBoundary:
    def test_sorted_resolved_and_closed(self, cp_moderate):
        cp, tau = cp_moderate
        theta, zeta = sample_boundary(cp, tau, n=256)
        assert len(theta) == len(zeta) >= 256
        assert np.all(np.diff(theta) > 0)
        gaps = np.abs(np.roll(zeta, -1) - zeta)
        diam = max(np.ptp(zeta.real), np.ptp(zeta.imag))
        assert gaps.max() <= 0.01 * diam

    def test_jordan_curve_when_subcritical(self, cp_moderate):
        cp, tau = cp_moderate
        _, zeta = sample_boundary(cp, tau, n=512)
        assert not polyline_self_intersects(zeta)

    def test_counter_clockwise_orientation(self, cp_moderate):
        cp, tau = cp_moderate
        _, zeta = sample_boundary(cp, tau, n=512)
        inner = complex(np.mean(zeta))
        assert oracles.winding_number(zeta, inner) == 1
        assert oracles.winding_number(zeta, complex(10.0, 10.0)) == 0

    def test_rejects_tiny_sample_count(self, cp_moderate):
        cp, tau = cp_moderate
        with pytest.raises(DomainError):
            sample_boundary(cp, tau, n=4)


class TestPolylineSelfIntersection:
    def test_figure_eight_detected(self):
        # Phase offset keeps vertices off the crossing point, so the curve
        # crosses itself mid-segment (only proper crossings are counted).
        t = np.linspace(0.0, 2.0 * math.pi, 400, endpoint=False) + 0.37
        eight = np.sin(2.0 * t) + 1j * np.sin(t)
        assert polyline_self_intersects(eight)

    def test_circle_clean(self):
        t = np.linspace(0.0, 2.0 * math.pi, 400, endpoint=False)
        assert not polyline_self_intersects(np.exp(1j * t))

    def test_overdriven_map_loses_injectivity(self):
        a, tau = 0.7, 0.3
        kappa = 1.05 * kappa_max(a, tau)
        cp = ConformalParams(R=1.0, a=a, kappa=kappa)
        t = np.linspace(0.0, 2.0 * math.pi, 4096, endpoint=False)
        zeta = conformal_f(np.exp(1j * t), cp, tau)
        assert polyline_self_intersects(zeta)


class TestBuildDroplet:
    def test_holed_droplet_shapes(self, droplet_holed):
        assert isinstance(droplet_holed, DoublyConnectedDroplet)
        assert droplet_holed.ellipse == EllipseSpec.from_params(0.4, 0.5)
        assert droplet_holed.disc == DiscSpec.from_params(0.3, 0.4, 0.5)

    def test_simply_connected_carries_boundary(self, droplet_simply):
        assert isinstance(droplet_simply, SimplyConnectedDroplet)
        assert len(droplet_simply.boundary) >= 1024
        assert not polyline_self_intersects(droplet_simply.boundary)

    def test_two_component_geometry_unsupported(self):
        model = ModelParams(p=1.0, c=0.4, tau=0.5)
        with pytest.raises(UnsupportedRegimeError):
            build_droplet(model, classify(model))


class TestArea:
    def test_holed_area_closed_form(self, droplet_holed):
        # ellipse minus disc keeps the flat-measure mass at one
        assert area(droplet_holed) == pytest.approx(math.pi * (1.0 - 0.5**2), rel=1e-14)

    def test_simply_connected_area_by_quadrature(self, droplet_simply):
        assert area(droplet_simply) == pytest.approx(math.pi, rel=1e-10)

    def test_area_independent_of_p_inside_band(self):
        for p in (0.0, 0.2, 0.45):
            model = ModelParams(p=p, c=0.3, tau=0.4)
            droplet = build_droplet(model, classify(model))
            assert area(droplet) == pytest.approx(math.pi * (1.0 - 0.4**2), rel=1e-13)


class TestContains:
    def test_holed_membership(self, droplet_holed):
        assert contains(droplet_holed, -1.0 + 0.0j)
        assert not contains(droplet_holed, 0.3 + 0.0j)  # inside the hole
        assert not contains(droplet_holed, 3.0 + 0.0j)
        rim = 0.3 + droplet_holed.disc.radius  # hole boundary belongs to the droplet
        assert contains(droplet_holed, complex(rim, 0.0))

    def test_simply_connected_membership(self, droplet_simply):
        assert contains(droplet_simply, 0.0 + 0.0j)
        assert not contains(droplet_simply, -1.5 + 0.0j)
        assert not contains(droplet_simply, 0.5 + 0.0j)

    def test_boundary_counts_as_inside(self, droplet_simply):
        cp, tau = droplet_simply.conformal, droplet_simply.params.tau
        zeta = conformal_f(complex(np.exp(0.7j)), cp, tau)
        assert contains(droplet_simply, zeta)


class TestDropletCells:
    @pytest.mark.parametrize("fixture_name", ["droplet_holed", "droplet_simply"])
    def test_cell_area_consistency(self, fixture_name, request):
        droplet = request.getfixturevalue(fixture_name)
        centers, h = droplet_cells(droplet, resolution=256)
        assert centers.dtype.kind == "c"
        assert len(centers) * h * h == pytest.approx(area(droplet), rel=5e-3)

    def test_cells_lie_inside(self, droplet_holed):
        centers, _ = droplet_cells(droplet_holed, resolution=64)
        for zeta in centers[:: max(1, len(centers) // 40)]:
            assert contains(droplet_holed, complex(zeta))

    def test_resolution_floor(self, droplet_holed):
        with pytest.raises(DomainError):
            droplet_cells(droplet_holed, resolution=8)


class TestSchwarzFunctions:
    def test_boundary_identity_simply_connected(self, cp_moderate):
        cp, tau = cp_moderate
        for theta in np.linspace(0.05, 2.0 * math.pi, 11):
            zeta = conformal_f(complex(np.exp(1j * theta)), cp, tau)
            assert schwarz(zeta, cp, tau) == pytest.approx(np.conj(zeta), abs=1e-9)

    def test_boundary_identity_ellipse(self):
        c, tau = 0.4, 0.5
        e = EllipseSpec.from_params(c, tau)
        for theta in np.linspace(0.1, 2.0 * math.pi, 9):
            zeta = complex(e.semi_major * math.cos(theta), e.semi_minor * math.sin(theta))
            assert schwarz_ellipse_exterior(zeta, c, tau) == pytest.approx(
                np.conj(zeta), abs=1e-10
            )

    def test_boundary_identity_disc(self):
        p, c, tau = 0.3, 0.4, 0.5
        d = DiscSpec.from_params(p, c, tau)
        for theta in np.linspace(0.2, 2.0 * math.pi, 9):
            zeta = complex(p + d.radius * math.cos(theta), d.radius * math.sin(theta))
            assert schwarz_disc(zeta, p, c, tau) == pytest.approx(np.conj(zeta), abs=1e-12)

    def test_round_ellipse_reduces_to_disc_form(self):
        c = 0.7
        for zeta in (2.0 + 1.0j, -1.5 + 0.4j, 0.0 + 3.0j):
            assert schwarz_ellipse_exterior(zeta, c, 0.0) == (1.0 + c) / zeta
            assert schwarz_ellipse_exterior(zeta, c, 1e-9) == pytest.approx(
                (1.0 + c) / zeta, rel=1e-6
            )

    def test_pole_rejection(self):
        with pytest.raises(DomainError):
            schwarz_ellipse_exterior(0.0 + 0.0j, 0.4, 0.5)
        with pytest.raises(DomainError):
            schwarz_disc(0.3 + 0.0j, 0.3, 0.4, 0.5)
