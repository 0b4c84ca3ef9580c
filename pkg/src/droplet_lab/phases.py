"""Phase classification of (p, c, tau) into the three droplet topologies.

The doubly connected phase is decided in closed form through
``regime1_max_p``.  Outside it, the point is simply connected exactly when
the two-parameter family

    c(a, kappa) = kappa/a^2 ((1-a^2)^2 (1 - tau a^2) + a^2 kappa) / Delta,
    p(a, kappa) = sqrt((1+tau)/(1-tau))
                  ((1-tau)(1-a^2)(1+tau a^2) - (1-tau a^2) kappa) / (a sqrt(Delta)),
    Delta      = (1-a^2)^2 (1 - tau^2 + 2 tau kappa) - kappa^2,

restricted to the admissible strip {0 < a < 1, 0 <= kappa < kappa_cri(a, tau)},
passes through (c, p).  ``invert_regime2`` searches that strip with a coarse
grid followed by a damped Newton iteration; failure to invert marks the
two-component phase.
"""

from __future__ import annotations

import logging
import math
from typing import NamedTuple

import numpy as np

from . import params as _params
from .critical import kappa_cri
from .geometry import solve_R
from .params import (
    ConformalParams,
    DomainError,
    ModelParams,
    Regime,
    RegimeTag,
    _require,
    regime1_max_p,
    triple_point,
)

__all__ = [
    "Classification",
    "ScanResult",
    "in_regime1",
    "forward_map",
    "invert_regime2",
    "classify",
    "phase_diagram_scan",
]

logger = logging.getLogger(__name__)

_TAU_FLOOR = 1e-12


class Classification(NamedTuple):
    regime: Regime
    conformal: ConformalParams | None


class ScanResult(NamedTuple):
    """Row-major phase-diagram grid: tags[i, j] classifies (p_values[j], c_values[i])."""

    p_values: np.ndarray
    c_values: np.ndarray
    tags: np.ndarray


def in_regime1(model: ModelParams) -> bool:
    """True when the droplet is doubly connected (boundary included)."""
    return model.p <= regime1_max_p(model.c, model.tau)


def _forward_arrays(a, kappa, tau):
    """Vectorised (c, p) with an admissibility mask; invalid cells are nan."""
    a = np.asarray(a, dtype=float)
    kappa = np.asarray(kappa, dtype=float)
    one_m_a2 = 1.0 - a * a
    delta = one_m_a2**2 * (1.0 - tau * tau + 2.0 * tau * kappa) - kappa**2
    valid = delta > 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        c = kappa / a**2 * (one_m_a2**2 * (1.0 - tau * a * a) + a * a * kappa) / delta
        p = (
            math.sqrt((1.0 + tau) / (1.0 - tau))
            * ((1.0 - tau) * one_m_a2 * (1.0 + tau * a * a) - (1.0 - tau * a * a) * kappa)
            / (a * np.sqrt(np.where(valid, delta, np.nan)))
        )
    c = np.where(valid, c, np.nan)
    return c, p, valid


def forward_map(a: float, kappa: float, tau: float) -> tuple[float, float]:
    """Physical parameters (c, p) reached by the exterior map (a, kappa).

    kappa = 0 returns (0, (1 + tau a^2)/a), the simply connected ellipse
    family.  Combinations with Delta <= 0 are out of domain.
    """
    a, tau = _params._check_a_tau(a, tau)
    kappa = _params._as_finite_float(kappa, "kappa")
    _require(kappa >= 0.0, f"forward_map needs kappa >= 0, got {kappa}")
    c, p, valid = _forward_arrays(a, kappa, tau)
    if not bool(valid):
        raise DomainError(f"no droplet for a={a}, kappa={kappa}, tau={tau} (Delta <= 0)")
    return float(c), float(p)


def _kappa_cri_column(a: float, tau: float) -> float:
    if tau < _TAU_FLOOR:
        return _params.kappa_max(a, tau)
    return kappa_cri(a, tau)


def _newton_invert(
    model: ModelParams,
    a0: float,
    k0: float,
    tol_inv: float,
    max_iter: int = 60,
) -> tuple[float, float, float] | None:
    """Damped Newton on the residual of the forward map; None on failure."""
    tau = model.tau
    target = np.array([model.c, model.p])

    def residual(a, k):
        c, p, valid = _forward_arrays(a, k, tau)
        if not bool(valid):
            return None
        return np.array([float(c) - target[0], float(p) - target[1]])

    def clamp(a, k):
        a = min(max(a, 1e-6), 1.0 - 1e-9)
        k_cap = _params.kappa_max(a, tau)
        one_m_a2 = 1.0 - a * a
        # keep Delta > 0: kappa below its positive root
        k_delta = one_m_a2 * (
            tau * one_m_a2 + math.sqrt((tau * one_m_a2) ** 2 + 1.0 - tau * tau)
        )
        k = min(max(k, 0.0), min(k_cap, 0.999 * k_delta))
        return a, k

    a, k = clamp(a0, k0)
    r = residual(a, k)
    if r is None:
        return None
    best = float(np.max(np.abs(r)))
    stalls = 0
    for _ in range(max_iter):
        if best < tol_inv:
            break
        # forward-difference Jacobian
        ha = 1e-7 * max(1.0, abs(a))
        hk = 1e-7 * max(1.0, abs(k))
        ra = residual(*clamp(a + ha, k))
        rk = residual(*clamp(a, k + hk))
        if ra is None or rk is None:
            return None
        jac = np.column_stack([(ra - r) / ha, (rk - r) / hk])
        try:
            step = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError:
            return None
        # backtracking on the residual norm
        lam = 1.0
        improved = False
        for _ in range(25):
            a_new, k_new = clamp(a + lam * step[0], k + lam * step[1])
            r_new = residual(a_new, k_new)
            if r_new is not None and float(np.max(np.abs(r_new))) < best:
                a, k, r = a_new, k_new, r_new
                best = float(np.max(np.abs(r)))
                improved = True
                break
            lam *= 0.5
        if not improved:
            stalls += 1
            if stalls >= 2:
                break
    if best >= tol_inv:
        return None
    return a, k, best


def invert_regime2(
    model: ModelParams,
    tol_inv: float = 1e-10,
    grid_size: int = 64,
) -> ConformalParams | None:
    """Recover (R, a, kappa) with forward_map(a, kappa) = (c, p), if possible.

    Seeds a damped Newton iteration from the best cells of a grid over the
    admissible strip (kappa capped by kappa_cri per column, cached).  Returns
    None when no admissible solution reproduces (c, p) to tol_inv in max
    norm, which is the two-component signature.  Distinct admissible
    solutions found from separated seeds are logged as a diagnostic.
    """
    c, p, tau = model.c, model.p, model.tau
    if c == 0.0:
        # charge-free family: droplet is the bare ellipse
        if p <= 1.0 + tau:
            return None
        a = 1.0 / p if tau < _TAU_FLOOR else (p - math.sqrt(p * p - 4.0 * tau)) / (2.0 * tau)
        return ConformalParams(R=1.0, a=a, kappa=0.0)

    a_vals = (np.arange(grid_size) + 0.5) / grid_size
    k_caps = np.array([_kappa_cri_column(float(a), tau) for a in a_vals])
    frac = (np.arange(grid_size) + 0.5) / grid_size
    A = np.repeat(a_vals[:, None], grid_size, axis=1)
    K = k_caps[:, None] * frac[None, :]
    c_grid, p_grid, valid = _forward_arrays(A, K, tau)
    sc = max(1.0, abs(c))
    sp = max(1.0, abs(p))
    score = ((c_grid - c) / sc) ** 2 + ((p_grid - p) / sp) ** 2
    score = np.where(valid, score, np.inf)
    if not np.isfinite(score).any():
        return None
    order = np.argsort(score.ravel())
    first = np.unravel_index(order[0], score.shape)
    seeds = [first]
    # second seed from a well-separated cell, to expose non-uniqueness
    for flat in order[1:]:
        idx = np.unravel_index(flat, score.shape)
        if not np.isfinite(score[idx]):
            break
        if abs(idx[0] - first[0]) + abs(idx[1] - first[1]) >= grid_size // 4:
            seeds.append(idx)
            break

    solutions: list[tuple[float, float, float]] = []
    for i, j in seeds:
        sol = _newton_invert(model, float(A[i, j]), float(K[i, j]), tol_inv)
        if sol is None:
            continue
        a_sol, k_sol, res = sol
        if not 0.0 <= k_sol < _kappa_cri_column(a_sol, tau):
            continue
        solutions.append((a_sol, k_sol, res))
    if not solutions:
        return None
    distinct = [solutions[0]]
    for s in solutions[1:]:
        if abs(s[0] - distinct[0][0]) > 1e-6 or abs(s[1] - distinct[0][1]) > 1e-6:
            distinct.append(s)
    if len(distinct) > 1:
        logger.warning(
            "inversion found %d admissible (a, kappa) solutions for p=%g c=%g tau=%g",
            len(distinct),
            p,
            c,
            tau,
        )
    a_sol, k_sol, _ = min(distinct, key=lambda s: s[2])
    return ConformalParams(R=solve_R(a_sol, k_sol, tau), a=a_sol, kappa=k_sol)


def classify(model: ModelParams, tol: float = 1e-9) -> Classification:
    """Full classification with boundary proximity flags.

    Points within tol of a phase boundary get the matching flag; exact
    boundary points of the doubly connected region are classified into it
    (the region is closed).  A simply connected point with kappa within tol
    of kappa_cri is flagged II_III; kappa = kappa_cri itself already belongs
    to the two-component side.
    """
    flags: dict[str, float] = {}
    p_max = regime1_max_p(model.c, model.tau)
    if model.tau >= _TAU_FLOOR:
        c_tri, p_tri = triple_point(model.tau)
        d_tri = math.hypot(model.p - p_tri, model.c - c_tri)
        if d_tri <= tol:
            flags["Triple"] = d_tri
        if math.isfinite(p_max) and abs(model.p - p_max) <= tol:
            key = "I_II" if model.c <= c_tri else "I_III"
            flags[key] = abs(model.p - p_max)
    elif abs(model.p - p_max) <= tol:
        flags["I_II"] = abs(model.p - p_max)
    if model.p <= p_max:
        return Classification(Regime(RegimeTag.DOUBLY_CONNECTED, flags), None)
    cp = invert_regime2(model)
    if cp is not None:
        gap = _kappa_cri_column(cp.a, model.tau) - cp.kappa
        if gap <= tol:
            flags["II_III"] = max(gap, 0.0)
        return Classification(Regime(RegimeTag.SIMPLY_CONNECTED, flags), cp)
    return Classification(Regime(RegimeTag.TWO_COMPONENTS, flags), None)


def phase_diagram_scan(
    tau: float,
    p_range: tuple[float, float],
    c_range: tuple[float, float],
    resolution: int | tuple[int, int] = 32,
) -> ScanResult:
    """Classify a deterministic row-major grid over a (p, c) window.

    ``tags[i, j]`` is the regime code ("I", "II" or "III") at
    (p_values[j], c_values[i]).  tau = 0 uses the closed-form boundary
    p = sqrt(1 + c) - sqrt(c), below which every point is doubly connected
    and above which every point is simply connected.
    """
    if isinstance(resolution, int):
        n_p = n_c = resolution
    else:
        n_p, n_c = resolution
    _require(n_p >= 1 and n_c >= 1, "resolution must be positive")
    _require(p_range[0] <= p_range[1], "p_range must be ordered")
    _require(c_range[0] <= c_range[1], "c_range must be ordered")
    p_values = np.linspace(p_range[0], p_range[1], n_p)
    c_values = np.linspace(c_range[0], c_range[1], n_c)
    tags = np.empty((n_c, n_p), dtype="<U3")
    if tau < _TAU_FLOOR:
        P, C = np.meshgrid(p_values, c_values)
        boundary = np.sqrt(1.0 + C) - np.sqrt(C)
        tags[:] = np.where(P <= boundary, "I", "II")
        return ScanResult(p_values, c_values, tags)
    for i, c in enumerate(c_values):
        p_max = regime1_max_p(float(c), tau)
        for j, p in enumerate(p_values):
            if p <= p_max:
                tags[i, j] = "I"
            else:
                cls = classify(ModelParams(p=float(p), c=float(c), tau=tau))
                tags[i, j] = cls.regime.tag.value
    return ScanResult(p_values, c_values, tags)
