"""Independent numerical oracles for the test suite.

Everything in this module is deliberately built from different primitives
than the library under test: brute-force quadrature over rasterised grids,
direct polynomial root enumeration, dense geometric sampling.  Slow but
unarguable, so test expectations can be checked against first principles
rather than against the code being tested.
"""
from __future__ import annotations

import functools
import math

import numpy as np
from scipy import integrate
from scipy.signal import fftconvolve

from droplet_lab.energy import potential_Q
from droplet_lab.geometry import Droplet, droplet_cells
from droplet_lab.params import ModelParams


@functools.cache
def unit_square_log_moment() -> float:
    """Mean of log|u - v| for u, v independent uniform on the unit square.

    Reduces to a 2D integral of log r against the triangular difference
    density (1 - |dx|)(1 - |dy|) on [-1, 1]^2; by symmetry one quadrant is
    integrated and scaled by 4.  Accurate to ~1e-13.
    """
    val, _ = integrate.dblquad(
        lambda dy, dx: 0.0
        if dx == 0.0 and dy == 0.0
        else (1.0 - dx) * (1.0 - dy) * 0.5 * math.log(dx * dx + dy * dy),
        0.0,
        1.0,
        0.0,
        1.0,
        epsabs=1e-14,
        epsrel=1e-14,
    )
    return 4.0 * val


def _pair_log_sum(cells: np.ndarray, h: float) -> float:
    """Sum of log|z_i - z_j| over ordered pairs of distinct cell centers.

    The cells sit on a square lattice with spacing h, so the sum collapses
    onto displacement counts obtained by FFT autocorrelation of the 0/1
    occupancy mask.  Counts are exact integers well inside float64 range.
    """
    x_idx = np.rint((cells.real - cells.real.min()) / h).astype(int)
    y_idx = np.rint((cells.imag - cells.imag.min()) / h).astype(int)
    mask = np.zeros((x_idx.max() + 1, y_idx.max() + 1))
    mask[x_idx, y_idx] = 1.0
    counts = fftconvolve(mask, mask[::-1, ::-1])
    nx, ny = mask.shape
    dx = (np.arange(counts.shape[0]) - (nx - 1))[:, None]
    dy = (np.arange(counts.shape[1]) - (ny - 1))[None, :]
    dist2 = (dx * h) ** 2 + (dy * h) ** 2
    with np.errstate(divide="ignore"):
        log_dist = 0.5 * np.log(dist2)
    log_dist[nx - 1, ny - 1] = 0.0  # zero displacement handled separately
    return float(np.sum(np.rint(counts) * log_dist))


def energy_quadrature(model: ModelParams, droplet: Droplet, resolution: int = 512) -> float:
    """Brute-force weighted logarithmic energy of the uniform droplet measure.

    The droplet is rasterised into square cells of side h.  The double
    integral of log 1/|z - w| uses the midpoint value per distinct cell pair
    plus the exact same-cell moment h^4 (log h + unit_square_log_moment());
    the external-field term integrates Q by the midpoint rule.  Accuracy is
    roughly 1e-5 at resolution 512.
    """
    cells, h = droplet_cells(droplet, resolution)
    rho = 1.0 / (math.pi * (1.0 - model.tau**2))
    n = len(cells)
    pair_term = _pair_log_sum(cells, h) * h**4
    same_cell = n * h**4 * (math.log(h) + unit_square_log_moment())
    interaction = -(rho**2) * (pair_term + same_cell)
    field = rho * h * h * float(np.sum(potential_Q(cells, model)))
    return interaction + field


def winding_number(polyline: np.ndarray, point: complex) -> int:
    """Winding of a closed polyline around a point, by summed turn angles."""
    rel = np.asarray(polyline, dtype=complex) - point
    angles = np.angle(np.roll(rel, -1) / rel)
    return int(round(float(np.sum(angles)) / (2.0 * math.pi)))


def disc_fits_in_ellipse(p: float, c: float, tau: float, n_theta: int = 8192) -> bool:
    """Geometric test that the excised disc lies inside the outer ellipse.

    Samples the disc boundary densely and checks the ellipse's implicit
    inequality at every sample (sufficient for a convex disc with its
    center on the major axis, which always lies inside when its boundary
    does).  A zero-radius disc only needs its center inside.
    """
    A = (1.0 + tau) * math.sqrt(1.0 + c)
    B = (1.0 - tau) * math.sqrt(1.0 + c)
    r = math.sqrt(c * (1.0 - tau * tau))
    theta = np.linspace(0.0, 2.0 * math.pi, n_theta, endpoint=False)
    x = p + r * np.cos(theta)
    y = r * np.sin(theta)
    return bool(np.max((x / A) ** 2 + (y / B) ** 2) <= 1.0)


def cubic_invert_tau0(p: float, c: float) -> tuple[float, float, float]:
    """Closed-form (R, a, kappa) for the exterior map at tau = 0.

    x = a^2 is the smallest positive root of

        x^3 - (p^2 + 4c + 2)/(2 p^2) x^2 + 1/(2 p^4) = 0

    subject to 0 < a < 1 and kappa > 0, and then

        R = (1 + p^2 a^2) / (2 p a),
        kappa = (1 - a^2)(1 - p^2 a^2) / (1 + p^2 a^2).
    """
    coeffs = [1.0, -(p * p + 4.0 * c + 2.0) / (2.0 * p * p), 0.0, 1.0 / (2.0 * p**4)]
    roots = np.roots(coeffs)
    candidates = sorted(
        float(x.real) for x in roots if abs(x.imag) < 1e-10 and 0.0 < x.real < 1.0
    )
    for x in candidates:
        a = math.sqrt(x)
        kappa = (1.0 - x) * (1.0 - p * p * x) / (1.0 + p * p * x)
        if kappa > 0.0:
            R = (1.0 + p * p * x) / (2.0 * p * a)
            return R, a, kappa
    raise ValueError(f"no admissible root for p={p}, c={c}")
