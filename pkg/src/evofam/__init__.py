"""Evolution families of holomorphic disk self-maps: construction,
continuity diagnostics, univalence certificates, and an exact
discontinuous counterexample built on additive time arithmetic.

Layering: :mod:`~evofam.diskmap` (maps and sharp bounds) underpins
:mod:`~evofam.evolution` (two-parameter families), which both
:mod:`~evofam.diagnostics` (numerical scans and reports) and
:mod:`~evofam.hamel` (the exact counterexample) build on;
:mod:`~evofam.cli` fronts everything.
"""

from .diskmap import (BoundLedger, Compose, Custom, DiskMap, DiskRegion,
                      Identity, Mobius, Rotation, Scale, center_bound,
                      fixed_origin_growth, hyperbolic_sum, identity_deviation,
                      landau_radius, lipschitz_bound, sample_map,
                      schwarz_pick_upper)
from .errors import (BasisMismatch, CertificationFailure, ConfigError,
                     DomainError, EvofamError, IntervalMismatch,
                     InversionFailure, LatticeError, NotDiscontinuous,
                     RangeError)
from .evolution import (EvolutionFamily, ReverseFamily, Trajectory,
                        conjugate_to_fix_origin, from_loewner_chain, glue,
                        make_corrupted, make_radial, make_rotation,
                        reverse_dual, time_value)
from .diagnostics import (BoundAuditReport, ContinuityModulus,
                          DiagnosticsReport, GridSpec, SampleTestResult,
                          UnivalenceCertificate, bound_audit, diagonal_limits,
                          ef1_score, ef2_residual, hyperbolic_bound_sup,
                          joint_continuity_modulus, left_parameter_modulus,
                          lu_distance, modulus_decays, quasi_disk_points,
                          render_json, report_to_dict, right_parameter_modulus,
                          run_verification, semigroup_residual,
                          univalence_certificate, univalence_sample_test,
                          write_modulus_csv)
from .hamel import (AdditiveSpec, HamelBasis, TimeVector, additive_eval,
                    additive_eval_exact, default_spec, discontinuity_witness,
                    hamel_family, load_spec_file, semigroup_exact_check,
                    sqrt2_convergents)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "EvofamError", "DomainError", "IntervalMismatch", "InversionFailure",
    "RangeError", "CertificationFailure", "BasisMismatch", "LatticeError",
    "NotDiscontinuous", "ConfigError",
    # disk maps and bounds
    "DiskMap", "Identity", "Rotation", "Scale", "Mobius", "Compose", "Custom",
    "DiskRegion", "BoundLedger", "schwarz_pick_upper", "center_bound",
    "fixed_origin_growth", "identity_deviation", "landau_radius",
    "lipschitz_bound", "hyperbolic_sum", "sample_map",
    # families
    "EvolutionFamily", "ReverseFamily", "Trajectory", "time_value",
    "make_radial", "make_rotation", "make_corrupted", "glue",
    "conjugate_to_fix_origin", "reverse_dual", "from_loewner_chain",
    # diagnostics
    "GridSpec", "ContinuityModulus", "UnivalenceCertificate",
    "SampleTestResult", "BoundAuditReport", "DiagnosticsReport",
    "quasi_disk_points", "lu_distance", "ef1_score", "ef2_residual",
    "semigroup_residual", "hyperbolic_bound_sup", "right_parameter_modulus",
    "left_parameter_modulus", "joint_continuity_modulus", "diagonal_limits",
    "modulus_decays", "univalence_certificate", "univalence_sample_test",
    "bound_audit", "run_verification", "report_to_dict", "render_json",
    "write_modulus_csv",
    # exact counterexample
    "HamelBasis", "TimeVector", "AdditiveSpec", "default_spec",
    "additive_eval", "additive_eval_exact", "sqrt2_convergents",
    "hamel_family", "discontinuity_witness", "semigroup_exact_check",
    "load_spec_file",
]
