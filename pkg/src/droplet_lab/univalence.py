"""Univalence of the exterior map via a quadratic root-location test.

For two exterior points z and w with f(z) = f(w), eliminating the symmetric
combination leaves, for each z on the unit circle, the quadratic

    p_z(w) = z (z - a) w^2 - ((a z + tau)(z - a) - kappa z) w + a tau (z - a)

whose roots are the partners w that share the image of z.  The map is
univalent on {|z| >= 1} exactly when, for every |z| = 1, both roots stay in
the closed unit disc.  That root condition is decided by the Schur-Cohn
reduction: with p(w) = a0 + a1 w + a2 w^2 form

    p1(0) = |a0|^2 - |a2|^2,
    p2(0) = p1(0)^2 - |conj(a0) a1 - a2 conj(a1)|^2;

given p1(0) < 0, the roots lie in the closed disc iff p2(0) >= 0.

The outcome is the interval test kappa_min <= kappa <= kappa_max with the
closed-form endpoints held in params; equality is attained at z = 1 for
kappa_min and at the conjugate pair

    z = (a (1 + tau) +- i sqrt((1 - a^2)(1 - tau^2 a^2))) / (1 + tau a^2)

for kappa_max, so those points are always rechecked exactly alongside the
circle scan.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from . import params as _params
from .params import _require

__all__ = [
    "schur_cohn_quadratic",
    "pz_coeffs",
    "is_univalent",
    "images_pairwise_distinct",
]

logger = logging.getLogger(__name__)

#: fuzz for classifying a tangent (boundary) root configuration as inside,
#: relative to the magnitude of the cancelling Schur-Cohn terms
_TANGENT_TOL = 1e-12


def schur_cohn_quadratic(a0: complex, a1: complex, a2: complex) -> bool:
    """True when every root of a0 + a1 w + a2 w^2 lies in the closed unit disc.

    Degenerate leading coefficients fall back to the lower-degree test; the
    zero polynomial counts as True.  Each sign decision is fuzzed relative to
    the terms being subtracted (both p1(0) and p2(0) are differences of
    squares), so tangent configurations count as inside regardless of the
    overall coefficient scale.
    """
    a0, a1, a2 = complex(a0), complex(a1), complex(a2)
    if a2 == 0:
        if a1 == 0:
            return True
        return abs(-a0 / a1) <= 1.0
    lo, hi = abs(a0) ** 2, abs(a2) ** 2
    p1_0 = lo - hi
    if abs(p1_0) <= _TANGENT_TOL * max(lo, hi):
        # |a0| = |a2| up to rounding: the reduction degenerates (the product
        # of the roots has unit modulus), so locate the roots directly.
        scale = max(abs(a0), abs(a1), abs(a2))
        roots = np.roots([a2 / scale, a1 / scale, a0 / scale])
        return bool(np.all(np.abs(roots) <= 1.0 + _TANGENT_TOL))
    if p1_0 > 0.0:
        return False
    t1 = p1_0 * p1_0
    t2 = abs(a0.conjugate() * a1 - a2 * a1.conjugate()) ** 2
    return t1 - t2 >= -_TANGENT_TOL * max(t1, t2)


def pz_coeffs(z: complex, a: float, kappa: float, tau: float) -> tuple[complex, complex, complex]:
    """Ascending coefficients (a0, a1, a2) of the shared-image quadratic p_z.

    Intended for |z| = 1 (z = a never lies there since a < 1), although the
    formula itself is valid for any z.
    """
    a, tau = _params._check_a_tau(a, tau)
    z = complex(z)
    zma = z - a
    a0 = a * tau * zma
    a1 = -((a * z + tau) * zma - kappa * z)
    a2 = z * zma
    return a0, a1, a2


def is_univalent(a: float, kappa: float, tau: float, n_samples: int = 4096) -> bool:
    """Scan the unit circle with the quadratic root test.

    Uses the vectorised Schur-Cohn quantity p2(0) on n_samples equispaced
    circle points (p1(0) < 0 holds identically there), plus exact checks at
    the analytically extremal points where tangency first occurs.
    """
    a, tau = _params._check_a_tau(a, tau)
    _require(n_samples >= 16, f"n_samples must be >= 16, got {n_samples}")
    theta = 2.0 * math.pi * np.arange(n_samples) / n_samples
    z = np.exp(1j * theta)
    zma = z - a
    a0 = a * tau * zma
    a1 = -((a * z + tau) * zma - kappa * z)
    a2 = z * zma
    p1_0 = np.abs(a0) ** 2 - np.abs(a2) ** 2
    t1 = p1_0 * p1_0
    t2 = np.abs(np.conj(a0) * a1 - a2 * np.conj(a1)) ** 2
    if bool(np.any(t1 - t2 < -_TANGENT_TOL * np.maximum(t1, t2))):
        return False
    ta2 = tau * a * a
    s = math.sqrt((1.0 - a * a) * (1.0 - tau * tau * a * a))
    extremal = [
        1.0 + 0.0j,
        complex(a * (1.0 + tau), s) / (1.0 + ta2),
        complex(a * (1.0 + tau), -s) / (1.0 + ta2),
    ]
    return all(schur_cohn_quadratic(*pz_coeffs(zx, a, kappa, tau)) for zx in extremal)


def images_pairwise_distinct(
    cp: _params.ConformalParams,
    tau: float,
    n: int = 2000,
    seed: int = 0,
    min_separation: float = 1e-9,
) -> tuple[bool, float]:
    """Brute-force injectivity probe on random exterior points.

    Draws n points with modulus in (1, 5], maps them through f, and returns
    whether all images stay at least min_separation apart, together with the
    smallest image distance observed.
    """
    from .geometry import conformal_f

    rng = np.random.default_rng(seed)
    r = 5.0 - 4.0 * rng.random(n)
    theta = 2.0 * math.pi * rng.random(n)
    z = r * np.exp(1j * theta)
    images = conformal_f(z, cp, tau)
    min_d = math.inf
    chunk = 256
    for i0 in range(0, n, chunk):
        block = images[i0 : i0 + chunk]
        d = np.abs(block[:, None] - images[None, :])
        il, jl = np.meshgrid(
            np.arange(i0, i0 + block.size), np.arange(n), indexing="ij"
        )
        d[il == jl] = np.inf
        min_d = min(min_d, float(d.min()))
    return min_d > min_separation, min_d
