"""Deterministic simulator and geometric-control toolkit for a 2D
shape-changing swimmer in an unbounded ideal fluid."""

from . import errors
from .dynamics import (
    Impulses,
    RigidState,
    TrajectorySample,
    flapping_bound,
    impulses,
    integrate,
    rigid_velocity,
    rigid_velocity_body,
)
from .fields import (
    ConfigField,
    RankCertificate,
    ShapeField,
    commutator_maneuver,
    config_fields,
    field_eval,
    lie_bracket,
    rank_certificate,
    shape_field,
    standard_fields,
)
from .forces import (
    GeneralizedForce,
    force_from_shape,
    lagrangian_reduced,
    shape_from_force,
)
from .matrices import MassMatrices, ReducedMassMatrix, assemble, d_k_dc, reduced_k
from .potentials import (
    CoefficientPair,
    alpha_coeffs,
    boundary_data_fft_oracle,
    mu_nu_coeffs,
    weighted_dot,
)
from .shape import (
    PhysicalConstants,
    ShapeCoefficients,
    ShapeVelocity,
    chi_eval,
    constraint_F,
    constraint_G,
    density_eval,
    in_domain_D,
    inertia,
    norm_S,
    norm_T,
    phi_eval,
    project_sphere,
    volume,
)
from .strokes import StrokeProgram, preset

__version__ = "0.1.0"
