"""Instance generators: synthetic ensembles, real-style thinning, lower-bound family."""

from .ensemble import EnsembleRanges, gen_ensemble, member_name, read_ensemble, sample_spec, write_ensemble
from .lowerbound import LowerBoundSpec, gen_lowerbound_instance, lowerbound_rates
from .synthetic import (gen_instance, gen_observation, gen_rate_matrix, gen_real_style_instance, representative_spec,
                        thin_perturb)

__all__ = [
    "EnsembleRanges",
    "LowerBoundSpec",
    "gen_ensemble",
    "gen_instance",
    "gen_lowerbound_instance",
    "gen_observation",
    "gen_rate_matrix",
    "gen_real_style_instance",
    "lowerbound_rates",
    "member_name",
    "read_ensemble",
    "representative_spec",
    "sample_spec",
    "thin_perturb",
    "write_ensemble",
]
