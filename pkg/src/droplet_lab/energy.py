"""Equilibrium energies, Robin constants, and the exterior potential gap.

With the flat reference measure dA = d^2z / pi, the weighted logarithmic
energy of the (uniform) equilibrium measure mu on the droplet K is

    I[mu] = int int log 1/|z - w| dmu(z) dmu(w) + int Q dmu,

and the Euler-Lagrange constant C (half the modified Robin constant) obeys

    I[mu] = C + (1/2) int Q dmu.

Everything here is closed form.  Doubly connected droplets:

    I_d = 3/4 + 3c/2 + c^2/2 log(c (1-tau^2)) - (1+c)^2/2 log(1+c)
          - c p^2/(1+tau),
    C_d = (1+c)/2 (1 - log(1+c)).

Simply connected droplets use the map data (R, a, kappa) (see geometry);
their I_s, C_s and int Q dmu are long but explicit, and the same identity
ties them together to machine precision.

The exterior gap

    u(zeta) = 2 int log 1/|zeta - w| dmu(w) + Q(zeta) - 2 C

vanishes on the droplet boundary, is positive outside while the droplet is
the true minimiser, and first dips negative at the exterior critical point
when kappa passes kappa_cri.  ``u_gap`` evaluates it in closed form through
the exterior map; ``u_gap_numeric`` checks it against midpoint quadrature
over rasterised droplet cells.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import geometry, phases
from .geometry import (
    Droplet,
    DoublyConnectedDroplet,
    InsideDomainError,
    conformal_f,
    conformal_inverse,
    droplet_cells,
    solve_R,
)
from .params import (
    ConformalParams,
    DomainError,
    ModelParams,
    Regime,
    RegimeTag,
    UnsupportedRegimeError,
    _require,
)

__all__ = [
    "EnergyReport",
    "potential_Q",
    "energy_doubly",
    "energy_simply",
    "u_gap",
    "u_gap_numeric",
    "moments_coeff",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EnergyReport:
    """Energy summary: I[mu], the constant C, int Q dmu, and the moment
    coefficient K = 3/4 - I[mu]."""

    regime: Regime
    energy: float
    robin: float
    potential_integral: float
    moments_coeff: float


def potential_Q(zeta, model: ModelParams):
    """External potential Q; scalar or array valued.

    At zeta = p with c > 0 the potential is +inf (the point charge sits
    there), returned as a float infinity rather than raised.
    """
    z = np.asarray(zeta, dtype=complex)
    tau, c, p = model.tau, model.c, model.p
    quad = (np.abs(z) ** 2 - tau * (z * z).real) / (1.0 - tau * tau)
    if c > 0.0:
        with np.errstate(divide="ignore"):
            out = quad - 2.0 * c * np.log(np.abs(z - p))
    else:
        out = quad
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# closed forms, doubly connected
# ---------------------------------------------------------------------------


def _moments_Kd(z: float, c: float, tau: float) -> float:
    if c == 0.0:
        return 0.0
    return (
        c * z * z / (1.0 + tau)
        - 1.5 * c
        + 0.5 * (1.0 + c) ** 2 * math.log(1.0 + c)
        - 0.5 * c * c * math.log(c * (1.0 - tau * tau))
    )


def energy_doubly(model: ModelParams) -> EnergyReport:
    """Closed-form energy report for the ellipse-minus-disc family.

    Valid as written for any (p, c, tau); it is the physical energy only
    while the droplet really is doubly connected.
    """
    c, p, tau = model.c, model.p, model.tau
    if c == 0.0:
        energy, robin, int_q = 0.75, 0.5, 0.5
    else:
        log_c = math.log(c * (1.0 - tau * tau))
        log_1c = math.log(1.0 + c)
        energy = (
            0.75
            + 1.5 * c
            + 0.5 * c * c * log_c
            - 0.5 * (1.0 + c) ** 2 * log_1c
            - c * p * p / (1.0 + tau)
        )
        robin = 0.5 * (1.0 + c) * (1.0 - log_1c)
        int_q = (
            0.5
            + 2.0 * c
            + c * c * log_c
            - c * (1.0 + c) * log_1c
            - 2.0 * c * p * p / (1.0 + tau)
        )
    return EnergyReport(
        regime=Regime(RegimeTag.DOUBLY_CONNECTED),
        energy=energy,
        robin=robin,
        potential_integral=int_q,
        moments_coeff=_moments_Kd(p, c, tau),
    )


# ---------------------------------------------------------------------------
# closed forms, simply connected
# ---------------------------------------------------------------------------


def _simply_terms(c: float, p: float, tau: float, cp: ConformalParams):
    """Shared pieces of the simply connected closed forms."""
    R, a, k = cp.R, cp.a, cp.kappa
    a2 = a * a
    one_m_a2 = 1.0 - a2
    t_plus = 2.0 - 3.0 * a2 - 3.0 * tau * a2 + 2.0 * tau * a2 * a2
    t_minus = 2.0 - 3.0 * a2 + 3.0 * tau * a2 - 2.0 * tau * a2 * a2
    # kappa bracket of the energy, expanded so a vanishing t_plus is harmless
    bracket = (1.0 - tau) * t_plus - t_minus * k / one_m_a2
    return R, a, k, a2, one_m_a2, bracket


def _moments_Ks(z: float, c: float, tau: float, cp: ConformalParams) -> float:
    if c == 0.0 or cp.kappa == 0.0:
        return 0.0
    R, a, k, a2, one_m_a2, bracket = _simply_terms(c, z, tau, cp)
    one_m_t2 = 1.0 - tau * tau
    return (
        c * z * z / (1.0 + tau)
        - 1.5 * c
        - R**3 * k * z * bracket / (2.0 * one_m_t2**2 * a2 * a)
        - 2.0 * c * (1.0 + c) * math.log(a)
        - c * c * math.log(c * one_m_t2 * one_m_a2 / (R * k))
        + (1.0 + c) ** 2 * math.log(R)
    )


def energy_simply(
    model: ModelParams,
    cp: ConformalParams,
    check_consistency: bool = True,
    tol: float = 1e-6,
) -> EnergyReport:
    """Closed-form energy report for the simply connected family.

    The map data must reproduce (c, p) through the forward map (checked to
    tol unless check_consistency is switched off) so that mixed formulas in
    both parameterisations agree.
    """
    c, p, tau = model.c, model.p, model.tau
    if check_consistency:
        c_fwd, p_fwd = phases.forward_map(cp.a, cp.kappa, tau)
        scale = max(1.0, abs(c), abs(p))
        _require(
            abs(c_fwd - c) <= tol * scale and abs(p_fwd - p) <= tol * scale,
            f"conformal parameters reproduce (c, p)=({c_fwd:.6g}, {p_fwd:.6g}), "
            f"not ({c:.6g}, {p:.6g})",
        )
        _require(
            abs(solve_R(cp.a, cp.kappa, tau) - cp.R) <= tol * max(1.0, cp.R),
            f"R={cp.R} is inconsistent with (a, kappa)=({cp.a}, {cp.kappa})",
        )
    if c == 0.0 or cp.kappa == 0.0:
        # charge-free limit: the droplet is an ellipse and R = 1
        return EnergyReport(
            regime=Regime(RegimeTag.SIMPLY_CONNECTED),
            energy=0.75,
            robin=0.5,
            potential_integral=0.5,
            moments_coeff=0.0,
        )
    R, a, k, a2, one_m_a2, bracket = _simply_terms(c, p, tau, cp)
    one_m_t2 = 1.0 - tau * tau
    log_a = math.log(a)
    log_R = math.log(R)
    energy = (
        0.75
        + 1.5 * c
        - c * p * p / (1.0 + tau)
        + R**3 * k * p * bracket / (2.0 * one_m_t2**2 * a2 * a)
        + 2.0 * c * (1.0 + c) * log_a
        + c * c * math.log(c * one_m_t2 * one_m_a2 / (R * k))
        - (1.0 + c) ** 2 * log_R
    )
    robin = (
        0.5 * (1.0 + c)
        - R * k * p / (2.0 * a * one_m_t2)
        + c * log_a
        - (1.0 + c) * log_R
    )
    int_q = (
        0.5
        + 2.0 * c
        - 2.0 * c * p * p / (1.0 + tau)
        + 2.0 * c * (1.0 + 2.0 * c) * (log_a - log_R)
        + 2.0 * c * c * math.log(c * one_m_t2 * one_m_a2 / k)
        - R**3 * k * p / (one_m_t2**2 * a2 * a)
        * ((1.0 + tau * a2) * k - (1.0 - tau) * one_m_a2 * (1.0 - tau * a2))
        + one_m_a2 * R * c * p / (a * (1.0 + tau))
        - R * c * k * p / (a * one_m_t2)
    )
    return EnergyReport(
        regime=Regime(RegimeTag.SIMPLY_CONNECTED),
        energy=energy,
        robin=robin,
        potential_integral=int_q,
        moments_coeff=_moments_Ks(p, c, tau, cp),
    )


# ---------------------------------------------------------------------------
# exterior potential gap
# ---------------------------------------------------------------------------


def u_gap(zeta: complex, model: ModelParams, cp: ConformalParams) -> float:
    """Exterior gap u(zeta) in closed form through the exterior map.

    With z = F(zeta) the exterior preimage,

        u = (|f(z)|^2 - Re[f(z) f(1/z)] + Re[R kappa p (z^2-1) /
             ((z-a)(a z-1))]) / (1 - tau^2)
            - 2 c log(|a z - 1| / |z - a|) - 2 (1 + c) log|z|.

    It is exactly zero on |z| = 1 (the droplet boundary), +inf at the
    charge location, and raises on droplet-interior input.
    """
    zeta = complex(zeta)
    tau, c, p = model.tau, model.c, model.p
    z = conformal_inverse(zeta, cp, tau)
    R, a, k = cp.R, cp.a, cp.kappa
    az1 = a * z - 1.0
    if az1 == 0:
        return math.inf
    fz = conformal_f(z, cp, tau)
    f_inv = conformal_f(1.0 / z, cp, tau)
    rational = R * k * p * (z * z - 1.0) / ((z - a) * az1)
    quad = (abs(fz) ** 2 - (fz * f_inv).real + rational.real) / (1.0 - tau * tau)
    return float(
        quad
        - 2.0 * c * math.log(abs(az1) / abs(z - a))
        - 2.0 * (1.0 + c) * math.log(abs(z))
    )


def _robin_for(droplet: Droplet) -> float:
    if isinstance(droplet, DoublyConnectedDroplet):
        return energy_doubly(droplet.params).robin
    return energy_simply(droplet.params, droplet.conformal).robin


def u_gap_numeric(
    zeta,
    model: ModelParams,
    droplet: Droplet,
    resolution: int = 1024,
) -> float | np.ndarray:
    """Quadrature version of the exterior gap; scalar or array in zeta.

    The potential of the uniform droplet measure is approximated by the
    midpoint rule over the rasterised cells, so accuracy is set by the grid
    (around 1e-4 relative at the default resolution for exterior points).
    """
    cells, _h = droplet_cells(droplet, resolution)
    robin = _robin_for(droplet)
    z = np.atleast_1d(np.asarray(zeta, dtype=complex))
    out = np.empty(z.shape, dtype=float)
    n = cells.size
    chunk = max(1, int(2e6) // max(n, 1)) if n else 1
    for start in range(0, z.size, max(chunk, 1)):
        block = z.ravel()[start : start + max(chunk, 1)]
        d = np.abs(block[:, None] - cells[None, :])
        log_sum = -np.log(d).sum(axis=1) / n
        out.ravel()[start : start + block.size] = 2.0 * log_sum
    out += potential_Q(z, model).reshape(out.shape) - 2.0 * robin
    return float(out[0]) if np.isscalar(zeta) or np.asarray(zeta).ndim == 0 else out


# ---------------------------------------------------------------------------
# moment coefficient
# ---------------------------------------------------------------------------


def moments_coeff(z: float, c: float, tau: float) -> float:
    """Leading charge-deflection coefficient K(z) = 3/4 - I[mu].

    Classifies (z, c, tau) and evaluates the regime-appropriate closed form;
    two-component droplets are unsupported.  K vanishes as c -> 0.
    """
    model = ModelParams(p=z, c=c, tau=tau)
    regime, cp = phases.classify(model)
    if regime.tag is RegimeTag.DOUBLY_CONNECTED:
        return _moments_Kd(z, c, tau)
    if regime.tag is RegimeTag.SIMPLY_CONNECTED:
        assert cp is not None
        return _moments_Ks(z, c, tau, cp)
    raise UnsupportedRegimeError(
        f"moment coefficient has no closed form for the two-component droplet at "
        f"z={z}, c={c}, tau={tau}"
    )
