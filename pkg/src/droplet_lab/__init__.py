"""Droplet geometry, phase diagrams, and electrostatic energies for a planar
Coulomb gas with an inserted point charge."""

from .critical import CriticalPoints, H, critical_points, kappa_cri, z_star
from .energy import (
    EnergyReport,
    energy_doubly,
    energy_simply,
    moments_coeff,
    potential_Q,
    u_gap,
    u_gap_numeric,
)
from .fekete import (
    Ensemble,
    FeketeConfig,
    FeketeResult,
    MatchReport,
    StepPolicy,
    component_count,
    droplet_match,
    gradient,
    hamiltonian,
    minimize,
)
from .geometry import (
    DiscSpec,
    DoublyConnectedDroplet,
    Droplet,
    EllipseSpec,
    InsideDomainError,
    SimplyConnectedDroplet,
    area,
    build_droplet,
    conformal_f,
    conformal_f_prime,
    conformal_inverse,
    contains,
    sample_boundary,
    schwarz,
    schwarz_disc,
    schwarz_ellipse_exterior,
    solve_R,
)
from .params import (
    ConformalParams,
    DomainError,
    ModelParams,
    Regime,
    RegimeTag,
    UnsupportedRegimeError,
    kappa_max,
    kappa_min,
    kappa_one,
    regime1_max_p,
    triple_point,
)
from .phases import (
    Classification,
    ScanResult,
    classify,
    forward_map,
    in_regime1,
    invert_regime2,
    phase_diagram_scan,
)
from .univalence import (
    images_pairwise_distinct,
    is_univalent,
    pz_coeffs,
    schur_cohn_quadratic,
)

__version__ = "0.1.0"

__all__ = [
    "CriticalPoints",
    "H",
    "critical_points",
    "kappa_cri",
    "z_star",
    "EnergyReport",
    "energy_doubly",
    "energy_simply",
    "moments_coeff",
    "potential_Q",
    "u_gap",
    "u_gap_numeric",
    "Ensemble",
    "FeketeConfig",
    "FeketeResult",
    "MatchReport",
    "StepPolicy",
    "component_count",
    "droplet_match",
    "gradient",
    "hamiltonian",
    "minimize",
    "DiscSpec",
    "DoublyConnectedDroplet",
    "Droplet",
    "EllipseSpec",
    "InsideDomainError",
    "SimplyConnectedDroplet",
    "area",
    "build_droplet",
    "conformal_f",
    "conformal_f_prime",
    "conformal_inverse",
    "contains",
    "sample_boundary",
    "schwarz",
    "schwarz_disc",
    "schwarz_ellipse_exterior",
    "solve_R",
    "ConformalParams",
    "DomainError",
    "ModelParams",
    "Regime",
    "RegimeTag",
    "UnsupportedRegimeError",
    "kappa_max",
    "kappa_min",
    "kappa_one",
    "regime1_max_p",
    "triple_point",
    "Classification",
    "ScanResult",
    "classify",
    "forward_map",
    "in_regime1",
    "invert_regime2",
    "phase_diagram_scan",
    "images_pairwise_distinct",
    "is_univalent",
    "pz_coeffs",
    "schur_cohn_quadratic",
    "__version__",
]
