"""Droplet geometry: explicit shapes, the exterior rational map, and its inverse.

Doubly connected droplets are described exactly as an ellipse minus a disc:

    E: semi-axes (1 + tau) sqrt(1 + c) and (1 - tau) sqrt(1 + c),
    D: centre p, radius sqrt(c (1 - tau^2)).

Simply connected droplets are described through the rational exterior map

    f(z) = R (z + tau/z - kappa/(z - a) - kappa/(a (1 - tau))),

which sends {|z| > 1} conformally onto the droplet complement, with the unit
circle going to the boundary.  The scale R is pinned by requiring the droplet
to carry unit mass under the flat measure of density 1/(pi (1 - tau^2)):

    R^2 (1 - tau^2 + 2 tau kappa - kappa^2 / (1 - a^2)^2) = 1 - tau^2.

The inverse map amounts to a cubic in z; the exterior root (|z| >= 1) is the
physical branch.  Schwarz functions, areas, membership tests, and a cell
rasteriser used by quadrature routines live here as well.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass

import numpy as np

from .params import (
    ConformalParams,
    DomainError,
    ModelParams,
    RegimeTag,
    UnsupportedRegimeError,
    _require,
)

__all__ = [
    "InsideDomainError",
    "EllipseSpec",
    "DiscSpec",
    "DoublyConnectedDroplet",
    "SimplyConnectedDroplet",
    "Droplet",
    "conformal_f",
    "conformal_f_prime",
    "solve_R",
    "conformal_inverse",
    "sample_boundary",
    "build_droplet",
    "area",
    "contains",
    "schwarz",
    "schwarz_ellipse_exterior",
    "schwarz_disc",
    "droplet_cells",
    "polyline_self_intersects",
]

logger = logging.getLogger(__name__)

#: Exterior-root selection slack for the inverse map.
_EXTERIOR_TOL = 1e-12


class InsideDomainError(ValueError):
    """The point lies inside the droplet where the exterior map has no preimage."""


# ---------------------------------------------------------------------------
# shape records
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EllipseSpec:
    """Origin-centred axis-aligned ellipse."""

    semi_major: float
    semi_minor: float

    def __post_init__(self) -> None:
        _require(self.semi_major > 0.0, "semi_major must be > 0")
        _require(self.semi_minor > 0.0, "semi_minor must be > 0")

    @classmethod
    def from_params(cls, c: float, tau: float) -> "EllipseSpec":
        s = math.sqrt(1.0 + c)
        return cls(semi_major=(1.0 + tau) * s, semi_minor=(1.0 - tau) * s)

    def contains(self, zeta: complex, tol: float = 1e-12) -> bool:
        x, y = zeta.real, zeta.imag
        v = (x / self.semi_major) ** 2 + (y / self.semi_minor) ** 2
        return v <= 1.0 + tol


@dataclass(frozen=True)
class DiscSpec:
    """Disc centred on the real axis."""

    center: float
    radius: float

    def __post_init__(self) -> None:
        _require(self.radius >= 0.0, "radius must be >= 0")

    @classmethod
    def from_params(cls, p: float, c: float, tau: float) -> "DiscSpec":
        return cls(center=p, radius=math.sqrt(c * (1.0 - tau * tau)))

    def contains_open(self, zeta: complex, tol: float = 1e-12) -> bool:
        return abs(zeta - self.center) < self.radius * (1.0 - tol)


@dataclass(frozen=True)
class DoublyConnectedDroplet:
    params: ModelParams
    ellipse: EllipseSpec
    disc: DiscSpec

    tag = RegimeTag.DOUBLY_CONNECTED


@dataclass(frozen=True)
class SimplyConnectedDroplet:
    params: ModelParams
    conformal: ConformalParams
    #: boundary samples f(e^{i theta}), counter-clockwise
    theta: np.ndarray
    boundary: np.ndarray

    tag = RegimeTag.SIMPLY_CONNECTED


Droplet = DoublyConnectedDroplet | SimplyConnectedDroplet


# ---------------------------------------------------------------------------
# exterior map
# ---------------------------------------------------------------------------


def conformal_f(z, cp: ConformalParams, tau: float):
    """Evaluate the exterior map f(z); scalar or array valued.

    z = 0 and z = a are poles and are rejected.
    """
    zz = np.asarray(z, dtype=complex)
    if np.any(zz == 0.0) or np.any(zz == cp.a):
        raise DomainError("conformal map has poles at z = 0 and z = a")
    out = cp.R * (
        zz
        + tau / zz
        - cp.kappa / (zz - cp.a)
        - cp.kappa / (cp.a * (1.0 - tau))
    )
    return complex(out) if out.ndim == 0 else out


def conformal_f_prime(z, cp: ConformalParams, tau: float):
    """Derivative f'(z) = R (1 - tau/z^2 + kappa/(z - a)^2)."""
    zz = np.asarray(z, dtype=complex)
    if np.any(zz == 0.0) or np.any(zz == cp.a):
        raise DomainError("conformal map has poles at z = 0 and z = a")
    out = cp.R * (1.0 - tau / zz**2 + cp.kappa / (zz - cp.a) ** 2)
    return complex(out) if out.ndim == 0 else out


def solve_R(a: float, kappa: float, tau: float) -> float:
    """Scale R > 0 of the exterior map, from the unit-mass constraint.

    R = sqrt((1 - tau^2) / (1 - tau^2 + 2 tau kappa - kappa^2/(1 - a^2)^2)).
    Parameter combinations making the denominator vanish or go negative are
    out of domain.
    """
    _require(0.0 < a < 1.0, f"a must lie in (0, 1), got {a}")
    _require(0.0 <= tau < 1.0, f"tau must lie in [0, 1), got {tau}")
    one_m_t2 = 1.0 - tau * tau
    denom = one_m_t2 + 2.0 * tau * kappa - (kappa / (1.0 - a * a)) ** 2
    _require(denom > 0.0, f"no positive scale R for a={a}, kappa={kappa}, tau={tau}")
    return math.sqrt(one_m_t2 / denom)


def _cubic_roots(c2: complex, c1: complex, c0: complex) -> list[complex]:
    """All roots of z^3 + c2 z^2 + c1 z + c0, Cardano plus a Newton polish."""
    # depressed cubic t^3 + P t + Q with z = t - c2/3
    shift = c2 / 3.0
    P = c1 - c2 * c2 / 3.0
    Q = 2.0 * c2**3 / 27.0 - c2 * c1 / 3.0 + c0
    if P == 0 and Q == 0:
        roots = [-shift, -shift, -shift]
    else:
        disc = (Q / 2.0) ** 2 + (P / 3.0) ** 3
        s = cmath.sqrt(disc)
        u3 = -Q / 2.0 + s
        if abs(u3) < abs(-Q / 2.0 - s):
            u3 = -Q / 2.0 - s
        u = u3 ** (1.0 / 3.0)
        omega = complex(-0.5, math.sqrt(3.0) / 2.0)
        roots = []
        for k in range(3):
            uk = u * omega**k
            t = uk - P / (3.0 * uk)
            roots.append(t - shift)
    # one or two Newton steps to clean up rounding from the radicals
    polished = []
    for z in roots:
        for _ in range(2):
            f = ((z + c2) * z + c1) * z + c0
            df = (3.0 * z + 2.0 * c2) * z + c1
            if df == 0:
                break
            step = f / df
            z = z - step
            if abs(step) < 1e-15 * max(1.0, abs(z)):
                break
        polished.append(z)
    return polished


def conformal_inverse(zeta: complex, cp: ConformalParams, tau: float) -> complex:
    """Exterior preimage F(zeta): the root of f(z) = zeta with |z| >= 1.

    Clearing denominators in f(z) = zeta gives

        z^3 - (a + kappa/(a(1 - tau)) + zeta/R) z^2
            + (tau + tau kappa/(1 - tau) + a zeta/R) z - tau a = 0.

    Exactly one root lies in {|z| >= 1} when zeta is outside or on the
    droplet boundary; ties are broken toward the largest modulus.  A point
    with no exterior root is inside the droplet.
    """
    zeta = complex(zeta)
    R, a, kappa = cp.R, cp.a, cp.kappa
    c2 = -(a + kappa / (a * (1.0 - tau)) + zeta / R)
    c1 = tau + tau * kappa / (1.0 - tau) + a * zeta / R
    c0 = -tau * a
    roots = _cubic_roots(c2, c1, c0)
    exterior = [z for z in roots if abs(z) >= 1.0 - _EXTERIOR_TOL]
    if not exterior:
        raise InsideDomainError(
            f"zeta={zeta} has no exterior preimage; the point is inside the droplet"
        )
    return max(exterior, key=abs)


# ---------------------------------------------------------------------------
# boundary sampling and droplet construction
# ---------------------------------------------------------------------------


def sample_boundary(
    cp: ConformalParams,
    tau: float,
    n: int = 1024,
    max_refinements: int = 4,
) -> tuple[np.ndarray, np.ndarray]:
    """Sample the boundary curve f(e^{i theta}) with adaptive refinement.

    Starts from n equispaced angles and inserts midpoints wherever adjacent
    samples are farther apart than 1% of the current diameter, up to
    max_refinements rounds.  Persistent under-resolution is logged, not
    raised.  Returns (theta, boundary) sorted by angle.
    """
    _require(n >= 8, f"need at least 8 boundary samples, got {n}")
    theta = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    zeta = conformal_f(np.exp(1j * theta), cp, tau)
    for _ in range(max_refinements):
        gaps = np.abs(np.roll(zeta, -1) - zeta)
        diam = max(np.ptp(zeta.real), np.ptp(zeta.imag))
        bad = gaps > 0.01 * diam
        if not bad.any():
            break
        theta_next = np.roll(theta, -1).copy()
        theta_next[-1] += 2.0 * math.pi
        mids = 0.5 * (theta[bad] + theta_next[bad])
        theta = np.sort(np.concatenate([theta, mids % (2.0 * math.pi)]))
        zeta = conformal_f(np.exp(1j * theta), cp, tau)
    else:
        gaps = np.abs(np.roll(zeta, -1) - zeta)
        diam = max(np.ptp(zeta.real), np.ptp(zeta.imag))
        n_bad = int((gaps > 0.01 * diam).sum())
        if n_bad:
            logger.warning(
                "boundary still under-resolved on %d segments after %d refinements",
                n_bad,
                max_refinements,
            )
    return theta, zeta


def build_droplet(params: ModelParams, classification, n_boundary: int = 1024) -> Droplet:
    """Construct the droplet geometry for an already classified parameter point.

    ``classification`` is the (Regime, ConformalParams | None) pair returned
    by the phase classifier.  Two-component droplets carry no closed-form
    geometry and are rejected.
    """
    regime, cp = classification
    if regime.tag is RegimeTag.DOUBLY_CONNECTED:
        return DoublyConnectedDroplet(
            params=params,
            ellipse=EllipseSpec.from_params(params.c, params.tau),
            disc=DiscSpec.from_params(params.p, params.c, params.tau),
        )
    if regime.tag is RegimeTag.SIMPLY_CONNECTED:
        _require(cp is not None, "simply connected droplet needs conformal parameters")
        theta, boundary = sample_boundary(cp, params.tau, n=n_boundary)
        return SimplyConnectedDroplet(
            params=params, conformal=cp, theta=theta, boundary=boundary
        )
    raise UnsupportedRegimeError(
        "no closed-form geometry is available for a two-component droplet"
    )


def area(droplet: Droplet) -> float:
    """Droplet area.

    Ellipse-minus-disc areas are closed form.  For simply connected droplets
    the area is the contour integral (1/2i) oint conj(zeta) dzeta over the
    image of the unit circle, evaluated with 256-node Gauss-Legendre
    quadrature in the angle.  Either way the result equals pi (1 - tau^2)
    for consistent parameters.
    """
    if isinstance(droplet, DoublyConnectedDroplet):
        e, d = droplet.ellipse, droplet.disc
        return math.pi * (e.semi_major * e.semi_minor - d.radius**2)
    cp, tau = droplet.conformal, droplet.params.tau
    x, w = np.polynomial.legendre.leggauss(256)
    theta = math.pi * (x + 1.0)
    weights = math.pi * w
    z = np.exp(1j * theta)
    f = conformal_f(z, cp, tau)
    fp = conformal_f_prime(z, cp, tau)
    # A = (1/2) Re int conj(f) f'(z) e^{i theta} dtheta
    return 0.5 * float(np.sum(weights * (np.conj(f) * fp * z).real))


def contains(droplet: Droplet, zeta: complex, tol: float = 1e-10) -> bool:
    """Closed-droplet membership test (boundary points count as inside)."""
    zeta = complex(zeta)
    if isinstance(droplet, DoublyConnectedDroplet):
        if not droplet.ellipse.contains(zeta):
            return False
        return not droplet.disc.contains_open(zeta)
    try:
        z = conformal_inverse(zeta, droplet.conformal, droplet.params.tau)
    except InsideDomainError:
        return True
    return abs(z) <= 1.0 + tol


# ---------------------------------------------------------------------------
# Schwarz functions
# ---------------------------------------------------------------------------


def schwarz(zeta: complex, cp: ConformalParams, tau: float) -> complex:
    """Schwarz function S(zeta) = f(1/F(zeta)) of a simply connected droplet.

    Defined on the closed droplet complement; equals conj(zeta) on the
    boundary and behaves as tau zeta + (1 + c)(1 - tau^2)/zeta at infinity.
    """
    z = conformal_inverse(zeta, cp, tau)
    return conformal_f(1.0 / z, cp, tau)


def schwarz_ellipse_exterior(zeta: complex, c: float, tau: float) -> complex:
    """Schwarz function of the ellipse E, analytic on the ellipse exterior.

    S(zeta) = (1 + tau^2)/(2 tau) zeta
              - (1 - tau^2)/(2 tau) zeta sqrt(1 - 4 tau (1 + c)/zeta^2),

    with the principal square root; the tau -> 0 limit is (1 + c)/zeta.
    """
    zeta = complex(zeta)
    if tau == 0.0:
        if zeta == 0:
            raise DomainError("Schwarz function of the disc has a pole at 0")
        return (1.0 + c) / zeta
    s = 4.0 * tau * (1.0 + c)
    if zeta == 0:
        raise DomainError("zeta = 0 lies inside the ellipse")
    root = cmath.sqrt(1.0 - s / (zeta * zeta))
    return (1.0 + tau * tau) / (2.0 * tau) * zeta - (1.0 - tau * tau) / (
        2.0 * tau
    ) * zeta * root


def schwarz_disc(zeta: complex, p: float, c: float, tau: float) -> complex:
    """Schwarz function of the disc D, analytic off its centre.

    S(zeta) = p + c (1 - tau^2)/(zeta - p).
    """
    zeta = complex(zeta)
    if zeta == p:
        raise DomainError("Schwarz function of the disc has a pole at its centre")
    return p + c * (1.0 - tau * tau) / (zeta - p)


# ---------------------------------------------------------------------------
# rasterisation and curve utilities
# ---------------------------------------------------------------------------


def droplet_cells(droplet: Droplet, resolution: int = 512) -> tuple[np.ndarray, float]:
    """Midpoints of square grid cells covering the droplet, plus the cell side.

    A uniform grid of square cells is laid over the bounding box with
    ``resolution`` cells along the longer side; a cell belongs to the droplet
    when its midpoint does.  Simply connected membership uses even-odd
    containment in the sampled boundary polygon, which keeps this routine
    independent of the conformal inverse.
    """
    _require(resolution >= 16, f"resolution must be >= 16, got {resolution}")
    if isinstance(droplet, DoublyConnectedDroplet):
        A, B = droplet.ellipse.semi_major, droplet.ellipse.semi_minor
        x0, x1, y0, y1 = -A, A, -B, B
    else:
        b = droplet.boundary
        x0, x1 = float(b.real.min()), float(b.real.max())
        y0, y1 = float(b.imag.min()), float(b.imag.max())
    span = max(x1 - x0, y1 - y0)
    h = span / resolution
    nx = max(1, math.ceil((x1 - x0) / h))
    ny = max(1, math.ceil((y1 - y0) / h))
    xs = x0 + h * (np.arange(nx) + 0.5)
    ys = y0 + h * (np.arange(ny) + 0.5)
    X, Y = np.meshgrid(xs, ys)
    if isinstance(droplet, DoublyConnectedDroplet):
        e, d = droplet.ellipse, droplet.disc
        inside = (X / e.semi_major) ** 2 + (Y / e.semi_minor) ** 2 <= 1.0
        if d.radius > 0.0:
            inside &= (X - d.center) ** 2 + Y**2 >= d.radius**2
    else:
        from matplotlib.path import Path

        verts = np.column_stack([droplet.boundary.real, droplet.boundary.imag])
        path = Path(verts, closed=True)
        pts = np.column_stack([X.ravel(), Y.ravel()])
        inside = path.contains_points(pts).reshape(X.shape)
    centers = (X + 1j * Y)[inside]
    return centers, h


def polyline_self_intersects(points: np.ndarray) -> bool:
    """True when the closed polyline through ``points`` properly crosses itself.

    Adjacent segments (sharing an endpoint) are ignored; only transversal
    crossings count.  Used to witness loss of univalence on boundary curves.
    """
    pts = np.asarray(points, dtype=complex)
    n = len(pts)
    if n < 4:
        return False
    p = np.column_stack([pts.real, pts.imag])
    q = np.roll(p, -1, axis=0)

    def _ccw(ax, ay, bx, by, cx, cy):
        return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)

    # chunk over the first segment index to bound memory
    chunk = 256
    for i0 in range(0, n, chunk):
        i1 = min(i0 + chunk, n)
        idx_i = np.arange(i0, i1)
        a = p[idx_i][:, None, :]
        b = q[idx_i][:, None, :]
        cpts = p[None, :, :]
        dpts = q[None, :, :]
        d1 = _ccw(a[..., 0], a[..., 1], b[..., 0], b[..., 1], cpts[..., 0], cpts[..., 1])
        d2 = _ccw(a[..., 0], a[..., 1], b[..., 0], b[..., 1], dpts[..., 0], dpts[..., 1])
        d3 = _ccw(cpts[..., 0], cpts[..., 1], dpts[..., 0], dpts[..., 1], a[..., 0], a[..., 1])
        d4 = _ccw(cpts[..., 0], cpts[..., 1], dpts[..., 0], dpts[..., 1], b[..., 0], b[..., 1])
        cross = (d1 * d2 < 0) & (d3 * d4 < 0)
        # mask out self and cyclically adjacent pairs
        idx_j = np.arange(n)[None, :]
        diff = (idx_j - idx_i[:, None]) % n
        adjacent = (diff == 0) | (diff == 1) | (diff == n - 1)
        cross &= ~adjacent
        if cross.any():
            return True
    return False
