"""The precomputed sample-size table used by input-specific sampling.

A :class:`MappingTable` stores, for every grid point ``p = N * delta``, the
smallest sample size whose certified radius stays within a decline budget of
the radius at the reference size ``k_bar``.  Off-grid queries take the larger
of the two neighbouring entries, so a lookup never undershoots the exact
per-point requirement.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels as K
from .decline import DeclineBudget, DeclineKind
from .errors import ConfigurationError, DomainError, MappingFormatError, MappingValidationError
from .stats import _check_alpha

FORMAT_VERSION = 1
DEFAULT_DELTA = 0.001

# p * steps within this many ulps of an integer counts as a grid point
_SNAP_ULPS = 4


def grid_steps(delta: float) -> int:
    """Number of subintervals ``1 / delta``; raises if that is not an integer."""
    if not (isinstance(delta, (int, float)) and 0.0 < delta < 1.0):
        raise ConfigurationError(f"delta must lie in (0, 1), got {delta!r}")
    steps = round(1.0 / delta)
    if steps < 1 or abs(steps * delta - 1.0) > 1e-9:
        raise ConfigurationError(f"1/delta must be an integer, got delta={delta!r}")
    return int(steps)


def _check_common(k_bar, sigma, alpha):
    _check_alpha(alpha)
    if int(k_bar) != k_bar or k_bar < 1:
        raise ConfigurationError(f"k_bar must be a positive integer, got {k_bar!r}")
    if not sigma > 0:
        raise ConfigurationError(f"sigma must be positive, got {sigma!r}")


def psi_exact(p: float, budget: DeclineBudget, k_bar: int, sigma: float, alpha: float) -> int:
    """Minimum sample size meeting ``budget`` at success ratio ``p`` (0 if none is useful)."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must lie in [0, 1], got {p!r}")
    _check_common(k_bar, sigma, alpha)
    return int(K.psi(float(p), budget.kind.code, float(budget.bound), int(k_bar),
                     float(sigma), float(alpha)))


@dataclass(frozen=True, eq=False)
class MappingTable:
    delta: float
    k_bar: int
    alpha: float
    sigma: float
    budget: DeclineBudget
    sizes: np.ndarray = field(repr=False)

    def __post_init__(self):
        steps = grid_steps(self.delta)
        sizes = np.array(self.sizes, dtype=np.int64)
        if sizes.shape != (steps + 1,):
            raise MappingValidationError(
                f"expected {steps + 1} sizes for delta={self.delta!r}, got {sizes.size}")
        if np.any(sizes < 0) or np.any(sizes > self.k_bar):
            raise MappingValidationError("sizes must lie in [0, k_bar]")
        sizes.setflags(write=False)
        object.__setattr__(self, "sizes", sizes)

    @property
    def steps(self) -> int:
        return self.sizes.size - 1

    @property
    def grid(self) -> np.ndarray:
        """Grid points ``N / steps``, computed exactly as during the build."""
        return np.arange(self.steps + 1) / self.steps

    def __eq__(self, other):
        if not isinstance(other, MappingTable):
            return NotImplemented
        return (self.delta == other.delta and self.k_bar == other.k_bar
                and self.alpha == other.alpha and self.sigma == other.sigma
                and self.budget == other.budget and np.array_equal(self.sizes, other.sizes))

    def __hash__(self):
        return hash((self.delta, self.k_bar, self.alpha, self.sigma, self.budget,
                     self.sizes.tobytes()))


def build_mapping(delta: float, budget: DeclineBudget, k_bar: int, sigma: float,
                  alpha: float) -> MappingTable:
    steps = grid_steps(delta)
    _check_common(k_bar, sigma, alpha)
    out = np.zeros(steps + 1, dtype=np.int64)
    K.build_sizes(steps, budget.kind.code, float(budget.bound), int(k_bar),
                  float(sigma), float(alpha), out)
    return MappingTable(delta=float(delta), k_bar=int(k_bar), alpha=float(alpha),
                        sigma=float(sigma), budget=budget, sizes=out)


def lookup(table: MappingTable, p: float) -> int:
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must lie in [0, 1], got {p!r}")
    x = p * table.steps
    n = round(x)
    if abs(x - n) <= _SNAP_ULPS * K.EPS * max(n, 1):
        return int(table.sizes[n])
    lo = math.floor(x)
    return int(max(table.sizes[lo], table.sizes[min(lo + 1, table.steps)]))


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _real(x: float) -> str:
    return format(float(x), ".17g")


def save_mapping(table: MappingTable) -> str:
    """Render ``table`` as a JSON document, header first, 20 sizes per line."""
    header = [
        ("format_version", str(FORMAT_VERSION)),
        ("kind", json.dumps(table.budget.kind.value)),
        ("bound", _real(table.budget.bound)),
        ("k_bar", str(table.k_bar)),
        ("alpha", _real(table.alpha)),
        ("sigma", _real(table.sigma)),
        ("delta", _real(table.delta)),
    ]
    lines = ["{"]
    lines += [f'  "{key}": {value},' for key, value in header]
    rows = [", ".join(str(int(s)) for s in table.sizes[i:i + 20])
            for i in range(0, table.sizes.size, 20)]
    lines.append('  "sizes": [')
    lines.append(",\n".join("    " + row for row in rows))
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


_KEYS = ("format_version", "kind", "bound", "k_bar", "alpha", "sigma", "delta", "sizes")


def load_mapping(text, *, expect_kind=None, expect_bound=None, expect_k_bar=None,
                 expect_alpha=None, expect_sigma=None) -> MappingTable:
    """Parse a document produced by :func:`save_mapping`.

    ``expect_*`` arguments are checked against the header and raise
    :class:`MappingValidationError` on mismatch.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MappingFormatError(f"malformed mapping table: {exc.msg}",
                                 line=exc.lineno, column=exc.colno) from None
    if not isinstance(doc, dict):
        raise MappingFormatError("mapping table must be a JSON object", line=1, column=1)
    missing = [k for k in _KEYS if k not in doc]
    if missing:
        raise MappingFormatError(f"mapping table lacks fields {missing}")
    if doc["format_version"] != FORMAT_VERSION:
        raise MappingFormatError(f"unsupported format_version {doc['format_version']!r}")
    sizes = doc["sizes"]
    if not isinstance(sizes, list) or not all(isinstance(s, int) and not isinstance(s, bool)
                                              for s in sizes):
        raise MappingFormatError("sizes must be a list of integers")
    try:
        budget = DeclineBudget(DeclineKind.parse(doc["kind"]), float(doc["bound"]))
        table = MappingTable(delta=float(doc["delta"]), k_bar=int(doc["k_bar"]),
                             alpha=float(doc["alpha"]), sigma=float(doc["sigma"]),
                             budget=budget, sizes=sizes)
    except (ValueError, TypeError) as exc:
        if isinstance(exc, MappingValidationError):
            raise
        raise MappingValidationError(str(exc)) from exc

    checks = [
        ("kind", expect_kind and DeclineKind.parse(expect_kind), table.budget.kind),
        ("bound", expect_bound, table.budget.bound),
        ("k_bar", expect_k_bar, table.k_bar),
        ("alpha", expect_alpha, table.alpha),
        ("sigma", expect_sigma, table.sigma),
    ]
    for name, want, got in checks:
        if want is not None and want != got:
            raise MappingValidationError(f"table {name} is {got!r}, expected {want!r}")
    return table


def atomic_write_text(path, text: str) -> None:
    """Write ``text`` next to ``path`` then rename, so readers never see a partial file."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_mapping(table: MappingTable, path) -> None:
    atomic_write_text(path, save_mapping(table))


def read_mapping(path, **expect) -> MappingTable:
    return load_mapping(Path(path).read_text(encoding="utf-8"), **expect)
