"""Flat TOML experiment configs.

Every key sits at the top level, so files stay easy to diff::

    population_kind = "concentrated_high"
    population_count = 500
    law_beta_a = 5.0          # any law_* key is passed to the population law
    sigma = 1.0
    alpha = 0.001
    budgets = ["ad:0.05", "rd:0.05"]
    k_bar = 100000
    k0_fraction = 0.01
    delta = 0.001
    radii = [0.0, 0.5, 1.0]
    ias_sizes = [50000]
    match_iss = true
    master_seed = 0
    workers = 1
    out_dir = "report"

Unknown keys and wrongly typed values raise :class:`ConfigurationError`.
"""

from __future__ import annotations

import sys
from dataclasses import replace
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .decline import DeclineBudget
from .errors import ConfigurationError
from .harness import ExperimentConfig, PopulationSpec

_NUM = (int, float)

# key -> (accepted python types, element types for lists or None)
SCHEMA = {
    "population_kind": (str, None),
    "population_count": (int, None),
    "population_label_count": (int, None),
    "population_accuracy": (_NUM, None),
    "population_seed": (int, None),
    "sigma": (_NUM, None),
    "alpha": (_NUM, None),
    "budgets": (list, str),
    "k_bar": (int, None),
    "k0_fraction": (_NUM, None),
    "delta": (_NUM, None),
    "radii": (list, _NUM),
    "ias_sizes": (list, int),
    "match_iss": (bool, None),
    "master_seed": (int, None),
    "workers": (int, None),
    "out_dir": (str, None),
}


def _typecheck(key, value):
    if key.startswith("law_"):
        types, elem = _NUM, None
    else:
        types, elem = SCHEMA[key]
    bad = isinstance(value, bool) and types is not bool
    if bad or not isinstance(value, types):
        raise ConfigurationError(f"config key {key!r} has the wrong type ({type(value).__name__})")
    if elem is not None:
        for v in value:
            if (isinstance(v, bool)) or not isinstance(v, elem):
                raise ConfigurationError(f"config key {key!r} holds a non-{getattr(elem, '__name__', 'number')} item")


def parse_config(text: str) -> dict:
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError(f"malformed config: {exc}") from None
    for key, value in doc.items():
        if key not in SCHEMA and not key.startswith("law_"):
            raise ConfigurationError(f"unknown config key {key!r}")
        _typecheck(key, value)
    return doc


def read_config(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)


def apply_config(base: ExperimentConfig, values: dict) -> ExperimentConfig:
    """Overlay parsed ``values`` on ``base``; later callers overlay CLI flags the same way."""
    pop = base.population
    pop_fields = {}
    law = dict(pop.params)
    top = {}
    for key, value in values.items():
        if key.startswith("law_"):
            law[key[4:]] = float(value)
        elif key.startswith("population_"):
            pop_fields[key[len("population_"):]] = value
        elif key == "budgets":
            top["budgets"] = tuple(DeclineBudget.parse(b) for b in value)
        elif key in ("radii", "ias_sizes"):
            top[key] = tuple(value)
        elif key in ("sigma", "alpha", "k0_fraction", "delta"):
            top[key] = float(value)
        else:
            top[key] = value
    pop = replace(pop, params=law, **pop_fields)
    return replace(base, population=pop, **top)


def load_experiment_config(path, base: ExperimentConfig = None) -> ExperimentConfig:
    return apply_config(base or ExperimentConfig(), read_config(path))
