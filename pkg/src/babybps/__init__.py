"""babybps: construct, solve and verify the first-order (Bogomolny)
structure of restricted and full baby Skyrme models in two dimensions."""

from .errors import (BabyBpsError, BlowUpError, InputError, NonHarmonicError,
                     PotentialDomainError, SpacingError, ToleranceFailure)
from .fields import (ComplexField2D, FieldGradient, Grid2D, ScalarField2D,
                     UnitVectorField, interior_mask, jacobian_det, linf,
                     partial_x, partial_y, stereographic_inverse,
                     stereographic_project)
from .fullmodel import (FullSolution, HarmonicFunction, check_harmonic,
                        conjugate_of, residual_full_system, solve_full_bps,
                        subset_check)
from .potentials import (ModelParams, PotentialSpec, build_full_model_potential,
                         builtin_potential, gauge_from_potential,
                         potential_from_U, potential_from_callable,
                         sqrt_clip_counter, zero_potential)
from .restricted import (HedgehogProfile, hedgehog_exclusions, profile_to_field,
                         radial_rhs, residual_bogomolny_restricted, solve_profile)
from .verify import (DualResiduals, EnergyBreakdown, SaturationReport,
                     VerificationReport, charge_density, charge_density_sform,
                     dual_residuals_restricted, el_residual_full,
                     el_residual_restricted, energy_full, energy_restricted,
                     integrate2d, saturation_check, topological_charge,
                     verification_report)

__version__ = "0.1.0"

__all__ = [
    "BabyBpsError", "BlowUpError", "InputError", "NonHarmonicError",
    "PotentialDomainError", "SpacingError", "ToleranceFailure",
    "ComplexField2D", "FieldGradient", "Grid2D", "ScalarField2D",
    "UnitVectorField", "interior_mask", "jacobian_det", "linf",
    "partial_x", "partial_y", "stereographic_inverse", "stereographic_project",
    "FullSolution", "HarmonicFunction", "check_harmonic", "conjugate_of",
    "residual_full_system", "solve_full_bps", "subset_check",
    "ModelParams", "PotentialSpec", "build_full_model_potential",
    "builtin_potential", "gauge_from_potential", "potential_from_U",
    "potential_from_callable", "sqrt_clip_counter", "zero_potential",
    "HedgehogProfile", "hedgehog_exclusions", "profile_to_field", "radial_rhs",
    "residual_bogomolny_restricted", "solve_profile",
    "DualResiduals", "EnergyBreakdown", "SaturationReport", "VerificationReport",
    "charge_density", "charge_density_sform", "dual_residuals_restricted",
    "el_residual_full", "el_residual_restricted", "energy_full",
    "energy_restricted", "integrate2d", "saturation_check",
    "topological_charge", "verification_report",
]
