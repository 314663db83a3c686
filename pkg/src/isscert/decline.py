"""Certified-radius arithmetic at a fixed success ratio.

``radius_hat(k, p)`` is the radius one would certify from ``k`` samples if
exactly a fraction ``p`` of them voted for the top label.  The absolute and
relative declines compare it with the radius at the reference size ``k_bar``.

Radii are signed.  When the Clopper-Pearson bound collapses to zero the radius
does not exist and :data:`UNDEFINED_RADIUS` (``-inf``) is returned; the decline
functions turn that into ``None``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

from . import _kernels as K
from .errors import DomainError
from .stats import _check_alpha

UNDEFINED_RADIUS = -math.inf


class DeclineKind(enum.Enum):
    ABSOLUTE = "absolute"
    RELATIVE = "relative"

    @property
    def code(self) -> int:
        return K.ABSOLUTE if self is DeclineKind.ABSOLUTE else K.RELATIVE

    @property
    def short(self) -> str:
        return "AD" if self is DeclineKind.ABSOLUTE else "RD"

    @classmethod
    def parse(cls, text) -> "DeclineKind":
        if isinstance(text, cls):
            return text
        key = str(text).strip().lower()
        if key in ("ad", "abs", "absolute"):
            return cls.ABSOLUTE
        if key in ("rd", "rel", "relative"):
            return cls.RELATIVE
        raise ValueError(f"unknown decline kind {text!r} (expected 'ad' or 'rd')")


@dataclass(frozen=True)
class SmoothingParams:
    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError(f"sigma must be positive, got {self.sigma!r}")


@dataclass(frozen=True)
class DeclineBudget:
    """Which decline is bounded and by how much.

    ``bound`` is in radius units for :attr:`DeclineKind.ABSOLUTE` and a
    fraction in (0, 1) for :attr:`DeclineKind.RELATIVE`.
    """

    kind: DeclineKind
    bound: float

    def __post_init__(self):
        object.__setattr__(self, "kind", DeclineKind.parse(self.kind))
        if not self.bound > 0:
            raise DomainError(f"decline bound must be positive, got {self.bound!r}")
        if self.kind is DeclineKind.RELATIVE and not self.bound < 1:
            raise DomainError(f"relative decline bound must be < 1, got {self.bound!r}")

    @classmethod
    def parse(cls, text: str) -> "DeclineBudget":
        """Parse ``"ad:0.05"`` / ``"rd:0.01"``."""
        try:
            kind, bound = str(text).split(":")
            return cls(DeclineKind.parse(kind), float(bound))
        except ValueError as exc:
            raise ValueError(f"bad budget {text!r}: expected '<ad|rd>:<bound>'") from exc

    @property
    def label(self) -> str:
        return f"{self.kind.short}-{self.bound:g}"

    def __str__(self):
        return f"{self.kind.short.lower()}:{self.bound:g}"


def _check(k, p, sigma, alpha):
    _check_alpha(alpha)
    if not k >= 1:
        raise DomainError(f"sample size must be >= 1, got {k!r}")
    if not 0.0 < p <= 1.0:
        raise DomainError(f"success ratio must lie in (0, 1], got {p!r}")
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma!r}")


def radius_hat(k: float, p: float, sigma: float, alpha: float) -> float:
    _check(k, p, sigma, alpha)
    return K.radius_hat(float(k), float(p), float(sigma), float(alpha))


def absolute_decline(k, k_bar, p, sigma, alpha) -> Optional[float]:
    """Desired radius at ``k_bar`` minus the radius at ``k``, or None if either is undefined."""
    if not k <= k_bar:
        raise DomainError(f"need k <= k_bar, got k={k!r}, k_bar={k_bar!r}")
    r_bar = radius_hat(k_bar, p, sigma, alpha)
    r_k = radius_hat(k, p, sigma, alpha)
    if r_bar == UNDEFINED_RADIUS or r_k == UNDEFINED_RADIUS:
        return None
    return K.decline(K.ABSOLUTE, r_bar, r_k)


def relative_decline(k, k_bar, p, alpha) -> Optional[float]:
    """Absolute decline as a fraction of the desired radius (sigma cancels).

    None when the desired radius is not positive or the radius at ``k`` is undefined.
    """
    if not k <= k_bar:
        raise DomainError(f"need k <= k_bar, got k={k!r}, k_bar={k_bar!r}")
    r_bar = radius_hat(k_bar, p, 1.0, alpha)
    r_k = radius_hat(k, p, 1.0, alpha)
    if not r_bar > 0 or r_k == UNDEFINED_RADIUS:
        return None
    return K.decline(K.RELATIVE, r_bar, r_k)


def budget_decline(budget: DeclineBudget, k, k_bar, p, sigma, alpha) -> Optional[float]:
    if budget.kind is DeclineKind.ABSOLUTE:
        return absolute_decline(k, k_bar, p, sigma, alpha)
    return relative_decline(k, k_bar, p, alpha)
