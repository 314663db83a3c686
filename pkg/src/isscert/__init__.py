"""Input-specific sampling (ISS) certification for randomized smoothing."""

from .certify import ABSTAIN, CertificationOutcome, certify_ias, certify_iss, default_k0, predict_only
from .decline import (DeclineBudget, DeclineKind, SmoothingParams, absolute_decline,
                      radius_hat, relative_decline)
from .errors import (ConfigurationError, DomainError, InvariantViolation, MappingFormatError,
                     MappingValidationError)
from .harness import ExperimentConfig, MetricsReport, PopulationSpec, compare_reports, run_experiment
from .mapping import (MappingTable, build_mapping, load_mapping, lookup, psi_exact, read_mapping,
                      save_mapping, write_mapping)
from .oracle import InputSpec, OracleModel, PopulationKind, gen_population, sample_labels
from .stats import (ConfidenceParams, SampleCounts, beta_quantile, cp_lower, cp_two_sided,
                    reg_inc_beta, std_normal_cdf, std_normal_quantile)

__version__ = "0.1.0"
