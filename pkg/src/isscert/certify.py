"""Certification with a fixed sample size (IAS) and with input-specific sizes (ISS)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .decline import DeclineKind
from .errors import ConfigurationError
from .mapping import MappingTable, lookup
from .oracle import ClassifierOracle
from .stats import cp_lower, cp_two_sided, std_normal_quantile, _check_alpha

ABSTAIN = -1

# set when the stage-2 majority label differs from the stage-1 prediction
FLAG_ARGMAX_CHANGED = "stage2_argmax_changed"


@dataclass(frozen=True)
class CertificationOutcome:
    prediction: int
    radius: float
    p_lower_onesided: float
    samples_consumed: int
    interval: Optional[tuple] = None
    k_hat: Optional[int] = None
    flags: tuple = ()

    @property
    def abstained(self) -> bool:
        return self.prediction == ABSTAIN


def default_k0(k_bar: int, fraction: float = 0.01) -> int:
    return max(1, int(round(fraction * k_bar)))


def _top(draws):
    # ties resolve to the smallest label id (np.argmax returns the first max)
    counts = np.bincount(draws)
    label = int(np.argmax(counts))
    return label, int(counts[label])


def _finish(prediction, k_a, k, sigma, alpha):
    p_lower = cp_lower(alpha, k_a, k)
    if p_lower < 0.5:
        return ABSTAIN, 0.0, p_lower
    return prediction, sigma * std_normal_quantile(p_lower), p_lower


def certify_ias(oracle: ClassifierOracle, input_id: int, k: int, sigma: float,
                alpha: float) -> CertificationOutcome:
    """Standard certification: ``k`` votes, top label, one-sided bound, radius."""
    if k < 2:
        raise ConfigurationError(f"IAS needs k >= 2, got {k}")
    _check_alpha(alpha)
    draws = oracle.sample(input_id, k)
    label, k_a = _top(draws)
    prediction, radius, p_lower = _finish(label, k_a, k, sigma, alpha)
    return CertificationOutcome(prediction=prediction, radius=radius,
                                p_lower_onesided=p_lower, samples_consumed=int(k))


def predict_only(oracle: ClassifierOracle, input_id: int, k0: int) -> int:
    if k0 < 1:
        raise ConfigurationError(f"k0 must be >= 1, got {k0}")
    return _top(oracle.sample(input_id, k0))[0]


def check_table(table: MappingTable, k0: int, sigma: float, alpha: float) -> None:
    if k0 < 1:
        raise ConfigurationError(f"k0 must be >= 1, got {k0}")
    if k0 > table.k_bar:
        raise ConfigurationError(f"k0={k0} exceeds the table's k_bar={table.k_bar}")
    if table.alpha != alpha:
        raise ConfigurationError(f"table built for alpha={table.alpha}, certifying at {alpha}")
    if table.budget.kind is DeclineKind.ABSOLUTE and table.sigma != sigma:
        raise ConfigurationError(
            f"absolute-decline table built for sigma={table.sigma}, certifying at {sigma}")


def certify_iss(oracle: ClassifierOracle, input_id: int, table: MappingTable, k0: int,
                alpha: float, sigma: float) -> CertificationOutcome:
    """Two-stage certification with the sample size chosen from ``table``.

    Stage 1 draws ``k0`` votes, predicts their majority label and brackets its
    probability with a two-sided interval.  The table maps both endpoints to
    sample sizes and the larger one, ``k_hat``, is used.  Stage 2 tops the
    vote pool up to ``k_hat`` and counts over the first ``k_hat`` votes only,
    so when ``k_hat < k0`` part of stage 1 is discarded.  ``k_hat = 0`` means
    no affordable size can beat the budgeted radius floor and the input
    abstains without stage 2.
    """
    check_table(table, k0, sigma, alpha)
    first = oracle.sample(input_id, k0)
    prediction, k0_a = _top(first)
    p_low, p_up = cp_two_sided(alpha, k0_a, k0)
    k_hat = max(lookup(table, p_low), lookup(table, p_up))
    if k_hat == 0:
        return CertificationOutcome(prediction=ABSTAIN, radius=0.0, p_lower_onesided=0.0,
                                    samples_consumed=int(k0), interval=(p_low, p_up),
                                    k_hat=0)
    extra = max(k_hat - k0, 0)
    if extra:
        pool = np.concatenate([first, oracle.sample(input_id, extra)])
    else:
        pool = first[:k_hat]
    label, k_a = _top(pool)
    flags = (FLAG_ARGMAX_CHANGED,) if label != prediction else ()
    prediction, radius, p_lower = _finish(prediction, k_a, k_hat, sigma, alpha)
    return CertificationOutcome(prediction=prediction, radius=radius,
                                p_lower_onesided=p_lower,
                                samples_consumed=int(max(k_hat, k0)),
                                interval=(p_low, p_up), k_hat=int(k_hat), flags=flags)
