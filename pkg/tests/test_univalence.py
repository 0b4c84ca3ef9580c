"""Univalence decision: Schur-Cohn test, shared-image quadratic, interval law."""
from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from droplet_lab.geometry import conformal_f
from droplet_lab.params import ConformalParams, DomainError, kappa_max, kappa_min
from droplet_lab.univalence import (
    images_pairwise_distinct,
    is_univalent,
    pz_coeffs,
    schur_cohn_quadratic,
)

# Components are either exactly zero or of sane magnitude; denormal leading
# coefficients overflow the reference root finder's companion matrix.
component = st.one_of(
    st.just(0.0),
    st.floats(min_value=1e-6, max_value=3.0),
    st.floats(min_value=-3.0, max_value=-1e-6),
)
coeff = st.builds(complex, component, component)


class TestSchurCohnQuadratic:
    @given(a0=coeff, a1=coeff, a2=coeff)
    @settings(max_examples=200, deadline=None)
    def test_agrees_with_root_finder(self, a0, a1, a2):
        if a2 == 0 and a1 == 0:
            # constant polynomials have no roots outside the disc
            assert schur_cohn_quadratic(a0, a1, a2)
            return
        roots = np.roots([a2, a1, a0] if a2 != 0 else [a1, a0])
        if any(abs(abs(r) - 1.0) < 1e-5 for r in roots):
            return  # tangent configurations are tolerance calls either way
        assert schur_cohn_quadratic(a0, a1, a2) == bool(np.all(np.abs(roots) <= 1.0))

    def test_degenerate_polynomials(self):
        assert schur_cohn_quadratic(0.0, 0.0, 0.0)
        assert schur_cohn_quadratic(0.5, 1.0, 0.0)  # root at -0.5
        assert not schur_cohn_quadratic(2.0, 1.0, 0.0)  # root at -2
        assert schur_cohn_quadratic(0.25, 0.0, 1.0)  # roots +-i/2
        assert not schur_cohn_quadratic(1.0, 0.0, 0.25)  # roots +-2i

    def test_tangent_counts_as_inside(self):
        # (w - 1)(w + 0.5) = w^2 - 0.5 w - 0.5
        assert schur_cohn_quadratic(-0.5, -0.5, 1.0)


class TestPzCoeffs:
    @pytest.mark.parametrize("theta", [0.0, 0.4, 1.1, 2.0, 3.1, 4.4, 5.6])
    def test_roots_share_the_image(self, theta):
        a, kappa, tau = 0.7, 0.2, 0.3
        cp = ConformalParams(R=1.0, a=a, kappa=kappa)
        z = complex(np.exp(1j * theta))
        a0, a1, a2 = pz_coeffs(z, a, kappa, tau)
        fz = conformal_f(z, cp, tau)
        for w in np.roots([a2, a1, a0]):
            if min(abs(w), abs(w - a)) < 1e-8:
                continue  # poles of the map carry no image to compare
            assert conformal_f(complex(w), cp, tau) == pytest.approx(fz, rel=1e-10)

    def test_charge_free_roots_are_pole_reflections(self):
        # kappa = 0 turns f into the ellipse map z + tau/z, whose partner
        # points satisfy w = tau/z exactly (plus the root pinned at a)
        a, tau = 0.6, 0.4
        z = complex(np.exp(0.9j))
        a0, a1, a2 = pz_coeffs(z, a, 0.0, tau)
        roots = sorted(np.roots([a2, a1, a0]), key=lambda w: abs(w - a))
        assert roots[0] == pytest.approx(a, abs=1e-12)
        assert roots[1] == pytest.approx(tau / z, abs=1e-12)

    def test_rejects_bad_parameters(self):
        with pytest.raises(DomainError):
            pz_coeffs(1.0 + 0.0j, 1.2, 0.1, 0.3)
        with pytest.raises(DomainError):
            pz_coeffs(1.0 + 0.0j, 0.5, 0.1, 1.0)


class TestIsUnivalent:
    @pytest.mark.parametrize("a", [0.3, 0.5, 0.7])
    @pytest.mark.parametrize("tau", [0.0, 0.3, 0.6])
    def test_matches_closed_interval(self, a, tau):
        lo, hi = kappa_min(a, tau), kappa_max(a, tau)
        for kappa in np.linspace(1.2 * lo, 1.2 * hi, 15):
            if min(abs(kappa - lo), abs(kappa - hi)) < 1e-9:
                continue
            assert is_univalent(a, float(kappa), tau) == (lo <= kappa <= hi)

    def test_endpoints_are_univalent(self):
        for a, tau in [(0.4, 0.2), (0.7, 0.3), (0.6, 0.0)]:
            assert is_univalent(a, kappa_min(a, tau), tau)
            assert is_univalent(a, kappa_max(a, tau), tau)

    def test_validation(self):
        with pytest.raises(DomainError):
            is_univalent(0.5, 0.1, 0.3, n_samples=8)
        with pytest.raises(DomainError):
            is_univalent(0.0, 0.1, 0.3)


class TestImagesPairwiseDistinct:
    def test_univalent_map_passes(self):
        from droplet_lab.geometry import solve_R

        a, kappa, tau = 0.7, 0.15, 0.3
        cp = ConformalParams(R=solve_R(a, kappa, tau), a=a, kappa=kappa)
        ok, min_d = images_pairwise_distinct(cp, tau, n=1500, seed=0)
        assert ok
        assert min_d > 1e-9

    def test_overdriven_map_brings_boundary_points_together(self):
        a, tau = 0.7, 0.3
        kappa = 1.05 * kappa_max(a, tau)
        cp = ConformalParams(R=1.0, a=a, kappa=kappa)
        theta = np.linspace(0.0, 2.0 * math.pi, 4096, endpoint=False)
        zeta = conformal_f(np.exp(1j * theta), cp, tau)
        d = np.abs(zeta[:, None] - zeta[None, :])
        sep = np.minimum(
            np.abs(theta[:, None] - theta[None, :]),
            2.0 * math.pi - np.abs(theta[:, None] - theta[None, :]),
        )
        d[sep < 0.5] = np.inf  # ignore neighbours along the curve
        assert float(d.min()) < 5e-3
