"""Parameter containers and closed-form threshold values.

The model is a planar Coulomb gas in the external potential

    Q(z) = (|z|^2 - tau Re z^2) / (1 - tau^2) - 2 c log|z - p|,

where ``c >= 0`` is the strength of a point charge inserted at ``p >= 0``
on the positive real axis and ``tau in [0, 1)`` controls the eccentricity
of the unperturbed elliptic droplet.  Depending on (p, c, tau) the droplet
(the support of the equilibrium measure) is

* doubly connected: the ellipse E with a disc D removed,
* simply connected: the image of the unit circle under a rational
  exterior map with parameters (R, a, kappa), or
* disconnected with two components.

This module holds the two parameter records plus every closed-form
threshold the classifiers and solvers build on:

    kappa_min(a, tau) = -(1 - tau) (1 - a)^2
    kappa_max(a, tau) = (1 - tau a^2)^2 / (1 + tau a^2)^2 * (1 + tau)(1 - a^2)
    kappa_one(a, tau) = (1 - tau)^2 (1 - a^2) / (1 + tau)
    c_tri(tau) = (1 - tau)^3 / (2 tau (3 + tau^2))
    p_tri(tau) = 2 sqrt(2 tau (1 + tau) / (3 + tau^2))

``[kappa_min, kappa_max]`` is the interval on which the exterior map stays
univalent, ``kappa_one`` is where off-axis critical points of the map first
appear, and ``(p_tri, c_tri)`` is the point where all three phases meet.
``regime1_max_p`` gives the largest p keeping the droplet doubly connected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

__all__ = [
    "DomainError",
    "UnsupportedRegimeError",
    "ModelParams",
    "ConformalParams",
    "RegimeTag",
    "Regime",
    "kappa_min",
    "kappa_max",
    "kappa_one",
    "triple_point",
    "regime1_max_p",
]


class DomainError(ValueError):
    """Arguments are outside the mathematical domain of a formula."""


class UnsupportedRegimeError(Exception):
    """The requested quantity has no implemented form in this regime."""


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise DomainError(message)


def _as_finite_float(value: float, name: str) -> float:
    try:
        out = float(value)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"{name} must be a real number, got {value!r}") from exc
    _require(math.isfinite(out), f"{name} must be finite, got {out!r}")
    return out


def _check_a_tau(a: float, tau: float) -> tuple[float, float]:
    a = _as_finite_float(a, "a")
    tau = _as_finite_float(tau, "tau")
    _require(0.0 < a < 1.0, f"a must lie in (0, 1), got {a}")
    _require(0.0 <= tau < 1.0, f"tau must lie in [0, 1), got {tau}")
    return a, tau


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters (p, c, tau) of the external potential."""

    p: float
    c: float
    tau: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", _as_finite_float(self.p, "p"))
        object.__setattr__(self, "c", _as_finite_float(self.c, "c"))
        object.__setattr__(self, "tau", _as_finite_float(self.tau, "tau"))
        _require(self.p >= 0.0, f"p must be >= 0, got {self.p}")
        _require(self.c >= 0.0, f"c must be >= 0, got {self.c}")
        _require(0.0 <= self.tau < 1.0, f"tau must lie in [0, 1), got {self.tau}")


@dataclass(frozen=True)
class ConformalParams:
    """Parameters (R, a, kappa) of the exterior rational map.

    The map sends the exterior of the unit disc onto the exterior of a
    simply connected droplet:

        f(z) = R (z + tau/z - kappa/(z - a) - kappa/(a (1 - tau))).
    """

    R: float
    a: float
    kappa: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "R", _as_finite_float(self.R, "R"))
        object.__setattr__(self, "a", _as_finite_float(self.a, "a"))
        object.__setattr__(self, "kappa", _as_finite_float(self.kappa, "kappa"))
        _require(self.R > 0.0, f"R must be > 0, got {self.R}")
        _require(0.0 < self.a < 1.0, f"a must lie in (0, 1), got {self.a}")


class RegimeTag(Enum):
    """Topology of the droplet."""

    DOUBLY_CONNECTED = "I"
    SIMPLY_CONNECTED = "II"
    TWO_COMPONENTS = "III"


#: Recognised keys of ``Regime.boundary_flags``.
BOUNDARY_FLAGS = ("I_II", "I_III", "II_III", "Triple")


@dataclass(frozen=True)
class Regime:
    """Classification result: a topology tag plus proximity diagnostics.

    ``boundary_flags`` maps a phase-boundary name to a distance estimate;
    a key is present only when the parameter point sits within the
    classification tolerance of that boundary.
    """

    tag: RegimeTag
    boundary_flags: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for key in self.boundary_flags:
            _require(key in BOUNDARY_FLAGS, f"unknown boundary flag {key!r}")


# ---------------------------------------------------------------------------
# closed-form thresholds
# ---------------------------------------------------------------------------


def kappa_min(a: float, tau: float) -> float:
    """Lower endpoint of the univalence interval: -(1 - tau)(1 - a)^2."""
    a, tau = _check_a_tau(a, tau)
    return -(1.0 - tau) * (1.0 - a) ** 2


def kappa_max(a: float, tau: float) -> float:
    """Upper endpoint of the univalence interval.

    kappa_max = (1 - tau a^2)^2 / (1 + tau a^2)^2 * (1 + tau)(1 - a^2);
    at tau = 0 this reduces to 1 - a^2.
    """
    a, tau = _check_a_tau(a, tau)
    ta2 = tau * a * a
    return ((1.0 - ta2) / (1.0 + ta2)) ** 2 * (1.0 + tau) * (1.0 - a * a)


def kappa_one(a: float, tau: float) -> float:
    """Threshold above which the map has off-axis exterior critical points.

    kappa_one = (1 - tau)^2 (1 - a^2) / (1 + tau).  It coincides with
    kappa_max at tau = 0 and stays below it for tau > 0.
    """
    a, tau = _check_a_tau(a, tau)
    return (1.0 - tau) ** 2 * (1.0 - a * a) / (1.0 + tau)


def triple_point(tau: float) -> tuple[float, float]:
    """Parameters (c_tri, p_tri) where all three phases meet.

    c_tri = (1 - tau)^3 / (2 tau (3 + tau^2)),
    p_tri = 2 sqrt(2 tau (1 + tau) / (3 + tau^2)).

    Requires tau > 0; as tau -> 0 the triple point escapes to c = +inf.
    """
    tau = _as_finite_float(tau, "tau")
    _require(0.0 < tau < 1.0, f"triple_point needs tau in (0, 1), got {tau}")
    c_tri = (1.0 - tau) ** 3 / (2.0 * tau * (3.0 + tau * tau))
    p_tri = 2.0 * math.sqrt(2.0 * tau * (1.0 + tau) / (3.0 + tau * tau))
    return c_tri, p_tri


def regime1_max_p(c: float, tau: float) -> float:
    """Largest p at which the droplet with charge c stays doubly connected.

    Two mechanisms end the doubly connected phase as p grows.  Below the
    triple-point charge c_tri(tau) the hole touches the ellipse at its
    rightmost point first:

        p = (1 + tau) sqrt(1 + c) - sqrt(c (1 - tau^2)).

    Above c_tri the hole is too large for that and first touches at a
    conjugate pair of boundary points:

        p = 2 sqrt(tau (1 - tau - 2 c tau) / (1 - tau)).

    The branches agree at c = c_tri.  For c > (1 - tau) / (2 tau) the hole
    cannot fit inside the ellipse for any p and -inf is returned.  At c = 0
    the value is 1 + tau, the rightmost point of the bare ellipse.
    """
    c = _as_finite_float(c, "c")
    tau = _as_finite_float(tau, "tau")
    _require(c >= 0.0, f"c must be >= 0, got {c}")
    _require(0.0 <= tau < 1.0, f"tau must lie in [0, 1), got {tau}")
    if tau == 0.0:
        return math.sqrt(1.0 + c) - math.sqrt(c)
    c_tri, _ = triple_point(tau)
    if c <= c_tri:
        return (1.0 + tau) * math.sqrt(1.0 + c) - math.sqrt(c * (1.0 - tau * tau))
    radicand = tau * (1.0 - tau - 2.0 * c * tau) / (1.0 - tau)
    if radicand < 0.0:
        return -math.inf
    return 2.0 * math.sqrt(radicand)
