"""Critical charge strength for the simply connected family.

Away from the unit disc the exterior map f can develop extra "critical"
points where the boundary-defining equation f(conj(z)) = f(1/z) has exterior
solutions.  There is always one on the real axis,

    z_* : z + 1/z = a + 1/a + kappa / (a (1 - tau)),   z_* >= 1/a,

and for kappa in (kappa_one, kappa_max) an additional conjugate pair appears
off the axis.  The sign of the gap functional

    H(a, kappa) = (1-tau)/a (1 + tau a^2 - (1-tau a^2)/(1-tau) kappa/(1-a^2))
                      (z_* - 1/z_*)
                  - 2 ((1-tau a^2) kappa/a^2 + kappa^2/(1-a^2)^2)
                      log(|a z_* - 1| / |z_* - a|)
                  - 2 (1 - tau^2 + (1 + tau a^2) kappa/a^2) log|z_*|

at the real critical point decides whether the simply connected droplet is
still the energy minimiser: H > 0 keeps it, H <= 0 means the gas prefers to
split.  H is concave in kappa, positive up to kappa_one, and non-positive at
kappa_max, so its unique zero kappa_cri in (kappa_one, kappa_max] is found
by bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from . import geometry, params
from .params import ConformalParams, _require

__all__ = ["CriticalPoints", "z_star", "H", "kappa_cri", "critical_points"]

#: tau below this is treated as the Ginibre point, where kappa_cri = kappa_max.
_TAU_FLOOR = 1e-12


@dataclass(frozen=True)
class CriticalPoints:
    """Exterior critical points of the boundary equation.

    ``real_point`` is f(z_*) on the real axis with preimage ``real_preimage``;
    ``conjugate_pair`` holds the off-axis image pair (upper first) when it
    exists, together with the matching ``conjugate_preimages``.
    """

    real_point: complex
    real_preimage: float
    conjugate_pair: tuple[complex, complex] | None = None
    conjugate_preimages: tuple[complex, complex] | None = None


def z_star(a: float, kappa: float, tau: float) -> float:
    """Real exterior critical preimage.

    The larger root of z + 1/z = a + 1/a + kappa/(a (1 - tau)); it equals
    1/a exactly when kappa = 0 and grows with kappa.
    """
    a, tau = params._check_a_tau(a, tau)
    _require(kappa >= 0.0, f"z_star needs kappa >= 0, got {kappa}")
    b = a * a + 1.0 + kappa / (1.0 - tau)
    return (b + math.sqrt(b * b - 4.0 * a * a)) / (2.0 * a)


def H(a: float, kappa: float, tau: float) -> float:
    """Gap functional at the real critical point; see the module docstring.

    Defined for kappa in (0, kappa_max]; the logarithm diverges against a
    vanishing coefficient as kappa -> 0, so kappa = 0 itself is excluded.
    """
    a, tau = params._check_a_tau(a, tau)
    _require(kappa > 0.0, f"H needs kappa > 0, got {kappa}")
    _require(
        kappa <= params.kappa_max(a, tau) * (1.0 + 1e-12),
        f"H needs kappa <= kappa_max, got {kappa}",
    )
    zs = z_star(a, kappa, tau)
    a2 = a * a
    one_m_a2 = 1.0 - a2
    t1 = (
        (1.0 - tau)
        / a
        * (1.0 + tau * a2 - (1.0 - tau * a2) / (1.0 - tau) * kappa / one_m_a2)
        * (zs - 1.0 / zs)
    )
    t2 = (
        -2.0
        * ((1.0 - tau * a2) * kappa / a2 + (kappa / one_m_a2) ** 2)
        * math.log(abs(a * zs - 1.0) / abs(zs - a))
    )
    t3 = -2.0 * (1.0 - tau * tau + (1.0 + tau * a2) * kappa / a2) * math.log(abs(zs))
    return t1 + t2 + t3


@lru_cache(maxsize=16384)
def kappa_cri(a: float, tau: float, tol_h: float = 1e-12, max_iter: int = 200) -> float:
    """Critical kappa where H crosses zero, separating phases II and III.

    Bisection on (kappa_one, kappa_max], stopping when |H| < tol_h or the
    bracket is exhausted, followed by one finite-difference Newton step.
    For tau below 1e-12 the crossing sits exactly at kappa_max.
    """
    a, tau = params._check_a_tau(a, tau)
    k_hi = params.kappa_max(a, tau)
    if tau < _TAU_FLOOR:
        return k_hi
    k_lo = params.kappa_one(a, tau)
    h_lo = H(a, k_lo, tau)
    h_hi = H(a, k_hi, tau)
    if h_lo <= 0.0 or h_hi > 0.0:
        raise RuntimeError(
            f"gap functional failed to bracket a sign change for a={a}, tau={tau}"
        )
    lo, hi = k_lo, k_hi
    root = 0.5 * (lo + hi)
    for _ in range(max_iter):
        root = 0.5 * (lo + hi)
        h_mid = H(a, root, tau)
        if abs(h_mid) < tol_h or (hi - lo) < 1e-16 * hi:
            break
        if h_mid > 0.0:
            lo = root
        else:
            hi = root
    # one Newton polish with a centred difference derivative
    delta = 1e-7 * max(1.0, abs(root))
    if k_lo < root - delta and root + delta < k_hi:
        dh = (H(a, root + delta, tau) - H(a, root - delta, tau)) / (2.0 * delta)
        if dh != 0.0:
            candidate = root - H(a, root, tau) / dh
            if k_lo < candidate <= k_hi:
                root = candidate
    return root


def critical_points(a: float, kappa: float, tau: float, R: float) -> CriticalPoints:
    """Locate all exterior critical points and their images under f.

    The real one always exists.  The conjugate pair exists exactly for
    kappa in (kappa_one, kappa_max): its preimages r e^{+-i theta} solve

        cos^2 theta = (1+tau)/(4 tau) (1 + tau - kappa/(1 - a^2)),
        (1 + r^2)/(2 r) = (1 + tau a^2) cos theta / (a (1 + tau)).
    """
    a, tau = params._check_a_tau(a, tau)
    _require(kappa >= 0.0, f"critical_points needs kappa >= 0, got {kappa}")
    cp = ConformalParams(R=R, a=a, kappa=kappa)
    zs = z_star(a, kappa, tau)
    real_point = geometry.conformal_f(zs, cp, tau)
    pair = None
    preimages = None
    if tau >= _TAU_FLOOR and params.kappa_one(a, tau) < kappa < params.kappa_max(a, tau):
        cos2 = (1.0 + tau) / (4.0 * tau) * (1.0 + tau - kappa / (1.0 - a * a))
        if 0.0 <= cos2 < 1.0:
            ct = math.sqrt(cos2)
            m = (1.0 + tau * a * a) * ct / (a * (1.0 + tau))
            if m > 1.0:
                r = m + math.sqrt(m * m - 1.0)
                z_up = r * complex(ct, math.sqrt(1.0 - cos2))
                z_dn = z_up.conjugate()
                preimages = (z_up, z_dn)
                pair = (
                    geometry.conformal_f(z_up, cp, tau),
                    geometry.conformal_f(z_dn, cp, tau),
                )
    return CriticalPoints(
        real_point=complex(real_point),
        real_preimage=zs,
        conjugate_pair=pair,
        conjugate_preimages=preimages,
    )
