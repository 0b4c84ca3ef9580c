"""Weighted Fekete configurations by descent on the discrete Hamiltonians.

Two finite-N energies are supported, both with the droplet potential
Q as external field (see energy.potential_Q).  Writing W = Q,

complex ensemble (N points z_1..z_N):

    H = sum_{j<k} log 1/|z_j - z_k|^2 + N sum_j W(z_j),

symplectic ensemble (N points in the open upper half-plane, each standing
for itself and its mirror image):

    H = sum_{j<k} log 1/|z_j - z_k|^2 + sum_{j<=k} log 1/|z_j - conj(z_k)|^2
        + 2 N sum_j W(z_j),

where the j = k mirror term is log 1/(2 Im z_j)^2.  Minimisers spread out
over the droplet of the continuum problem, which is what droplet_match
quantifies.

Gradients are taken with respect to the planar coordinates and encoded as
complex numbers g_j = dH/dx_j + i dH/dy_j = 2 dH/dconj(z_j).  Descent uses
either a fixed step or Armijo backtracking (monotone in H); an optional
limited-memory quasi-Newton direction is available behind a flag.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .energy import potential_Q
from .geometry import (
    Droplet,
    DoublyConnectedDroplet,
    EllipseSpec,
    contains,
)
from .params import ModelParams, _require

__all__ = [
    "Ensemble",
    "StepPolicy",
    "FeketeConfig",
    "FeketeResult",
    "MatchReport",
    "hamiltonian",
    "gradient",
    "minimize",
    "droplet_match",
    "component_count",
]

logger = logging.getLogger(__name__)

_ARMIJO_C1 = 1e-4
_MAX_HALVINGS = 40


class Ensemble(Enum):
    COMPLEX = "complex"
    SYMPLECTIC = "symplectic"


class StepPolicy(Enum):
    FIXED = "fixed"
    BACKTRACKING = "backtracking"


@dataclass(frozen=True)
class FeketeConfig:
    n_points: int
    ensemble: Ensemble
    params: ModelParams
    seed: int = 0
    max_iters: int = 2000
    grad_tol: float = 1e-6
    step_policy: StepPolicy = StepPolicy.BACKTRACKING
    step_size: float = 1e-3
    collision_guard: float = 1e-9
    use_quasi_newton: bool = False

    def __post_init__(self) -> None:
        _require(self.n_points >= 2, f"n_points must be >= 2, got {self.n_points}")
        _require(self.max_iters >= 1, "max_iters must be >= 1")
        _require(self.grad_tol > 0.0, "grad_tol must be > 0")
        _require(self.step_size > 0.0, "step_size must be > 0")
        _require(self.collision_guard > 0.0, "collision_guard must be > 0")


@dataclass
class FeketeResult:
    points: np.ndarray
    final_energy: float
    grad_norm: float
    iterations: int
    converged: bool
    energy_trace: np.ndarray = field(repr=False, default_factory=lambda: np.empty(0))


@dataclass(frozen=True)
class MatchReport:
    """How well a point cloud fills a droplet (fractions in [0, 1])."""

    inside_fraction: float
    hole_violations: int
    hull_distance: float


# ---------------------------------------------------------------------------
# energies and gradients
# ---------------------------------------------------------------------------


def _min_separation(z: np.ndarray, ensemble: Ensemble) -> float:
    dz = np.abs(z[:, None] - z[None, :])
    np.fill_diagonal(dz, np.inf)
    sep = float(dz.min()) if z.size > 1 else math.inf
    if ensemble is Ensemble.SYMPLECTIC:
        dm = np.abs(z[:, None] - np.conj(z)[None, :])
        sep = min(sep, float(dm.min()))
    return sep


def hamiltonian(points, config: FeketeConfig) -> float:
    """Discrete energy of a configuration; +inf on collisions.

    For the symplectic ensemble, points must lie in the open upper
    half-plane (a point on the axis collides with its own mirror).
    """
    z = np.asarray(points, dtype=complex).ravel()
    n = z.size
    model = config.params
    dz = np.abs(z[:, None] - z[None, :])
    iu = np.triu_indices(n, k=1)
    pair = dz[iu]
    if pair.size and pair.min() == 0.0:
        return math.inf
    w = potential_Q(z, model)
    if not np.all(np.isfinite(w)):
        return math.inf
    log_pair = -2.0 * float(np.log(pair).sum()) if pair.size else 0.0
    if config.ensemble is Ensemble.COMPLEX:
        return log_pair + n * float(np.sum(w))
    dm = np.abs(z[:, None] - np.conj(z)[None, :])
    il = np.triu_indices(n, k=0)
    mirror = dm[il]
    if mirror.min() == 0.0:
        return math.inf
    return log_pair - 2.0 * float(np.log(mirror).sum()) + 2.0 * n * float(np.sum(w))


def _grad_potential(z: np.ndarray, model: ModelParams) -> np.ndarray:
    """2 dQ/dconj(z) as a complex array."""
    out = (z - model.tau * np.conj(z)) / (1.0 - model.tau**2)
    if model.c > 0.0:
        out = out - model.c / np.conj(z - model.p)
    return 2.0 * out


def gradient(points, config: FeketeConfig) -> np.ndarray:
    """Planar gradient of the Hamiltonian, one complex number per point."""
    z = np.asarray(points, dtype=complex).ravel()
    n = z.size
    model = config.params
    dz = z[:, None] - z[None, :]
    np.fill_diagonal(dz, 1.0)
    inv = 1.0 / np.conj(dz)
    np.fill_diagonal(inv, 0.0)
    pair_sum = inv.sum(axis=1)
    if config.ensemble is Ensemble.COMPLEX:
        return n * _grad_potential(z, model) - 2.0 * pair_sum
    dm = z[:, None] - np.conj(z)[None, :]
    np.fill_diagonal(dm, 1.0)
    inv_m = 1.0 / np.conj(dm)
    np.fill_diagonal(inv_m, 0.0)
    mirror_sum = inv_m.sum(axis=1)
    diag = 4.0 / (z - np.conj(z))
    return (
        2.0 * n * _grad_potential(z, model)
        - 2.0 * pair_sum
        - 2.0 * mirror_sum
        + diag
    )


# ---------------------------------------------------------------------------
# initialisation and descent
# ---------------------------------------------------------------------------


def _initial_points(config: FeketeConfig) -> np.ndarray:
    """Uniform rejection sample inside the outer ellipse of the model."""
    model = config.params
    ell = EllipseSpec.from_params(model.c, model.tau)
    rng = np.random.default_rng(config.seed)
    out = np.empty(config.n_points, dtype=complex)
    have = 0
    while have < config.n_points:
        m = 2 * (config.n_points - have) + 16
        x = ell.semi_major * (2.0 * rng.random(m) - 1.0)
        y = ell.semi_minor * (2.0 * rng.random(m) - 1.0)
        keep = (x / ell.semi_major) ** 2 + (y / ell.semi_minor) ** 2 <= 1.0
        if config.ensemble is Ensemble.SYMPLECTIC:
            y = np.abs(y)
            keep &= y > 1e-6
        pts = (x + 1j * y)[keep]
        take = min(pts.size, config.n_points - have)
        out[have : have + take] = pts[:take]
        have += take
    return out


def _lbfgs_direction(
    g: np.ndarray, s_list: list[np.ndarray], y_list: list[np.ndarray]
) -> np.ndarray:
    """Two-loop recursion on the planar inner product Re<u, v>."""

    def dot(u, v):
        return float(np.sum((np.conj(u) * v).real))

    q = g.copy()
    alphas = []
    rhos = []
    for s, y in zip(reversed(s_list), reversed(y_list)):
        rho = 1.0 / dot(y, s)
        alpha = rho * dot(s, q)
        q -= alpha * y
        alphas.append(alpha)
        rhos.append(rho)
    if y_list:
        s, y = s_list[-1], y_list[-1]
        q *= dot(s, y) / dot(y, y)
    for (s, y), alpha, rho in zip(zip(s_list, y_list), reversed(alphas), reversed(rhos)):
        beta = rho * dot(y, q)
        q += (alpha - beta) * s
    return -q


def minimize(config: FeketeConfig) -> FeketeResult:
    """Descend the Hamiltonian from a random admissible start.

    Backtracking accepts only strict Armijo decreases, so the recorded
    energy trace is non-increasing under that policy.  Hitting max_iters
    or a fully stalled line search reports converged=False rather than
    raising.
    """
    z = _initial_points(config)
    energy = hamiltonian(z, config)
    trace = [energy]
    g = gradient(z, config)
    gnorm = float(np.max(np.abs(g)))
    step = config.step_size if config.step_policy is StepPolicy.FIXED else 0.5 / config.n_points
    s_hist: list[np.ndarray] = []
    y_hist: list[np.ndarray] = []
    iterations = 0
    converged = gnorm <= config.grad_tol
    for iterations in range(1, config.max_iters + 1):
        if gnorm <= config.grad_tol:
            break
        direction = -g
        if config.use_quasi_newton and s_hist:
            direction = _lbfgs_direction(g, s_hist, y_hist)
            if float(np.sum((np.conj(direction) * g).real)) >= 0.0:
                direction = -g
        if config.step_policy is StepPolicy.FIXED:
            z_new = z + config.step_size * direction
            if _min_separation(z_new, config.ensemble) < config.collision_guard:
                logger.warning("fixed step hit the collision guard; stopping early")
                break
            e_new = hamiltonian(z_new, config)
            accepted = True
        else:
            slope = float(np.sum((np.conj(g) * direction).real))
            eta = step * 2.0
            accepted = False
            for _ in range(_MAX_HALVINGS):
                z_new = z + eta * direction
                if _min_separation(z_new, config.ensemble) >= config.collision_guard:
                    e_new = hamiltonian(z_new, config)
                    if e_new <= energy + _ARMIJO_C1 * eta * slope:
                        accepted = True
                        break
                eta *= 0.5
            if not accepted:
                logger.warning("line search stalled at iteration %d", iterations)
                break
            step = eta
        if config.use_quasi_newton:
            g_new = gradient(z_new, config)
            s_hist.append(z_new - z)
            y_hist.append(g_new - g)
            if len(s_hist) > 5:
                s_hist.pop(0)
                y_hist.pop(0)
            if float(np.sum((np.conj(s_hist[-1]) * y_hist[-1]).real)) <= 0.0:
                s_hist.clear()
                y_hist.clear()
            g = g_new
        z = z_new
        energy = e_new
        trace.append(energy)
        if not config.use_quasi_newton:
            g = gradient(z, config)
        gnorm = float(np.max(np.abs(g)))
        converged = gnorm <= config.grad_tol
    return FeketeResult(
        points=z,
        final_energy=energy,
        grad_norm=gnorm,
        iterations=iterations,
        converged=converged,
        energy_trace=np.asarray(trace),
    )


# ---------------------------------------------------------------------------
# geometric diagnostics
# ---------------------------------------------------------------------------


def _point_segment_distance(pts: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Min distance from each point to a closed polyline with vertices a->b."""
    ab = b[None, :] - a[None, :]
    ap = pts[:, None] - a[None, :]
    denom = np.abs(ab) ** 2
    t = np.clip((np.conj(ab) * ap).real / np.where(denom > 0, denom, 1.0), 0.0, 1.0)
    proj = a[None, :] + t * ab
    return np.abs(pts[:, None] - proj).min(axis=1)


def _outer_boundary(droplet: Droplet, n: int = 1024) -> np.ndarray:
    if isinstance(droplet, DoublyConnectedDroplet):
        t = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
        e = droplet.ellipse
        return e.semi_major * np.cos(t) + 1j * e.semi_minor * np.sin(t)
    return droplet.boundary


def droplet_match(result, droplet: Droplet, margin: float | None = None) -> MatchReport:
    """Compare a configuration (or FeketeResult) against an analytic droplet.

    inside_fraction counts points within the droplet dilated by margin
    (default 3 / sqrt(N)); hole_violations counts points strictly inside the
    removed disc shrunk by the same margin; hull_distance is the Hausdorff
    distance between the convex hull of the points and the outer boundary.
    """
    from scipy.spatial import ConvexHull

    pts = np.asarray(result.points if isinstance(result, FeketeResult) else result)
    pts = pts.astype(complex).ravel()
    n = pts.size
    if margin is None:
        margin = 3.0 / math.sqrt(n)
    holes = 0
    if isinstance(droplet, DoublyConnectedDroplet):
        e, d = droplet.ellipse, droplet.disc
        x, y = pts.real, pts.imag
        in_outer = (x / (e.semi_major + margin)) ** 2 + (
            y / (e.semi_minor + margin)
        ) ** 2 <= 1.0
        r_in = d.radius - margin
        dist_hole = np.abs(pts - d.center)
        if r_in > 0.0:
            holes = int(np.sum(dist_hole < r_in))
            inside = in_outer & (dist_hole >= r_in)
        else:
            inside = in_outer
    else:
        boundary = droplet.boundary
        dist = _point_segment_distance(pts, boundary, np.roll(boundary, -1))
        member = np.array([contains(droplet, complex(w)) for w in pts])
        inside = member | (dist <= margin)
    outer = _outer_boundary(droplet)
    hull = ConvexHull(np.column_stack([pts.real, pts.imag]))
    # hull.vertices is ordered, so the hull rim is itself a closed polyline;
    # measure against segments rather than vertex sets so that points lying
    # mid-edge (e.g. collinear samples) do not inflate the distance.
    rim = pts[hull.vertices]
    hull_distance = max(
        float(_point_segment_distance(rim, outer, np.roll(outer, -1)).max()),
        float(_point_segment_distance(outer, rim, np.roll(rim, -1)).max()),
    )
    return MatchReport(
        inside_fraction=float(np.mean(inside)),
        hole_violations=holes,
        hull_distance=float(hull_distance),
    )


def component_count(points, radius: float) -> int:
    """Connected components of the union of discs of the given radius.

    Single-linkage clustering: two points join when closer than 2 * radius.
    """
    pts = np.asarray(points, dtype=complex).ravel()
    n = pts.size
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    d = np.abs(pts[:, None] - pts[None, :])
    ii, jj = np.where(d <= 2.0 * radius)
    for i, j in zip(ii.tolist(), jj.tolist()):
        if i < j:
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[ri] = rj
    return len({find(i) for i in range(n)})
