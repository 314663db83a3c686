"""Normal distribution, incomplete beta and Clopper-Pearson bounds.

All functions are scalar and pure.  The heavy lifting happens in
:mod:`isscert._kernels`; this module validates arguments and applies the
degenerate-shape conventions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import _kernels as K
from .errors import DomainError


@dataclass(frozen=True)
class ConfidenceParams:
    """Per-stage failure probability ``alpha``; the confidence level is ``1 - alpha``."""

    alpha: float = 0.001

    def __post_init__(self):
        _check_alpha(self.alpha)


@dataclass(frozen=True)
class SampleCounts:
    total: int
    top_count: int
    top_label: int

    def __post_init__(self):
        if self.total < 0 or self.top_count < 0:
            raise DomainError("counts must be nonnegative")
        if self.top_count > self.total:
            raise DomainError(f"top_count {self.top_count} exceeds total {self.total}")


def _check_alpha(alpha):
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")


def std_normal_cdf(x: float) -> float:
    return K.ndtr(float(x))


def std_normal_quantile(p: float) -> float:
    """Inverse of :func:`std_normal_cdf` on the open interval (0, 1)."""
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DomainError(f"normal quantile needs 0 < p < 1, got {p!r}")
    return K.ndtri(p)


def reg_inc_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function ``I_x(a, b)``."""
    if not (a > 0.0 and b > 0.0):
        raise DomainError(f"shape parameters must be positive, got a={a!r}, b={b!r}")
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x must lie in [0, 1], got {x!r}")
    return K.incbeta(float(a), float(b), float(x))


def beta_quantile(q: float, a: float, b: float) -> float:
    """The ``q``-quantile of Beta(a, b).

    The residual ``|I_x(a, b) - q|`` is driven to the spacing of doubles around
    the answer, which is below 1e-10 except when ``b < 1`` pins ``x`` within
    about 1e-8 of one.
    """
    if not 0.0 < q < 1.0:
        raise DomainError(f"q must lie in (0, 1), got {q!r}")
    if not (a > 0.0 and b > 0.0):
        raise DomainError(f"shape parameters must be positive, got a={a!r}, b={b!r}")
    return K.incbeta_inv(float(q), float(a), float(b))


def _check_counts(k_a, k):
    if not k > 0:
        raise DomainError(f"sample size must be positive, got {k!r}")
    if not 0 <= k_a <= k:
        raise DomainError(f"need 0 <= k_A <= k, got k_A={k_a!r}, k={k!r}")


def cp_lower(alpha: float, k_a: float, k: float) -> float:
    """One-sided Clopper-Pearson lower bound ``B(alpha; k_A, k - k_A + 1)``.

    ``k_A`` and ``k`` may be fractional.  Zero successes give exactly 0.
    """
    _check_alpha(alpha)
    _check_counts(k_a, k)
    return K.cp_lower(float(alpha), float(k_a), float(k))


def cp_two_sided(alpha: float, k_a: int, k: int) -> tuple[float, float]:
    """Two-sided interval with ``alpha / 2`` in each tail.

    Returns ``(B(alpha/2; k_A, k-k_A+1), B(1-alpha/2; k_A+1, k-k_A))`` with the
    endpoints pinned to 0 and 1 for ``k_A = 0`` and ``k_A = k``.
    """
    _check_alpha(alpha)
    _check_counts(k_a, k)
    half = 0.5 * float(alpha)
    return K.cp_lower(half, float(k_a), float(k)), K.cp_upper(half, float(k_a), float(k))


def is_undefined_radius(r: float) -> bool:
    return r == -math.inf
