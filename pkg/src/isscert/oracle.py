"""Simulated base classifiers with known top-label probability.

Each input owns a categorical label law.  Draws come from Philox streams keyed
by ``(master_seed, input_id, stream_tag)``, so an input's sequence does not
depend on which other inputs were sampled first, and different certification
runs over the same population can use independent streams by picking
different tags.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Protocol

import numpy as np

from .errors import ConfigurationError


class ClassifierOracle(Protocol):
    """Anything that can return ``n`` noisy label votes for an input.

    Successive calls for the same input continue its stream.
    """

    def sample(self, input_id: int, n: int) -> np.ndarray: ...


@dataclass(frozen=True, eq=False)
class InputSpec:
    input_id: int
    true_label: int
    label_probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        probs = np.asarray(self.label_probs, dtype=np.float64)
        if probs.ndim != 1 or probs.size == 0 or np.any(probs < 0):
            raise ConfigurationError("label_probs must be a nonnegative vector")
        if abs(probs.sum() - 1.0) > 1e-12:
            raise ConfigurationError(f"label_probs sum to {probs.sum()!r}, not 1")
        if not 0 <= self.true_label < probs.size:
            raise ConfigurationError(f"true_label {self.true_label} out of range")
        probs.setflags(write=False)
        object.__setattr__(self, "label_probs", probs)
        cdf = np.cumsum(probs)
        cdf[-1] = 1.0
        object.__setattr__(self, "_cdf", cdf)

    @property
    def top_label(self) -> int:
        return int(np.argmax(self.label_probs))

    @property
    def p_a(self) -> float:
        return float(self.label_probs.max())

    @property
    def correct(self) -> bool:
        return self.top_label == self.true_label


class OracleModel:
    """A population of simulated inputs plus their random streams.

    ``model.sample(i, n)`` draws from stream tag 0; ``model.stream(tag)`` gives
    an oracle view whose streams are independent of every other tag.
    """

    def __init__(self, inputs, label_count: int, master_seed: int):
        self.inputs = list(inputs)
        self.label_count = int(label_count)
        self.master_seed = int(master_seed)
        self._by_id = {spec.input_id: spec for spec in self.inputs}
        if len(self._by_id) != len(self.inputs):
            raise ConfigurationError("duplicate input ids")
        for spec in self.inputs:
            if spec.label_probs.size != self.label_count:
                raise ConfigurationError(
                    f"input {spec.input_id} has {spec.label_probs.size} labels, "
                    f"expected {self.label_count}")
        self._views = {}

    def __len__(self):
        return len(self.inputs)

    def __getitem__(self, input_id) -> InputSpec:
        try:
            return self._by_id[input_id]
        except KeyError:
            raise KeyError(f"unknown input_id {input_id!r}") from None

    def stream(self, tag: int = 0) -> "OracleView":
        view = self._views.get(tag)
        if view is None:
            view = self._views[tag] = OracleView(self, tag)
        return view

    def sample(self, input_id: int, n: int) -> np.ndarray:
        return self.stream(0).sample(input_id, n)


class OracleView:
    """Per-tag view of an :class:`OracleModel`; implements :class:`ClassifierOracle`."""

    def __init__(self, model: OracleModel, tag: int):
        self.model = model
        self.tag = int(tag)
        self._gens = {}

    def _generator(self, input_id):
        gen = self._gens.get(input_id)
        if gen is None:
            seq = np.random.SeedSequence(self.model.master_seed,
                                         spawn_key=(int(input_id), self.tag))
            gen = self._gens[input_id] = np.random.Generator(np.random.Philox(seq))
        return gen

    def reset(self, input_id: Optional[int] = None):
        if input_id is None:
            self._gens.clear()
        else:
            self._gens.pop(input_id, None)

    def sample(self, input_id: int, n: int) -> np.ndarray:
        spec = self.model[input_id]
        if n < 0:
            raise ValueError(f"cannot draw a negative number of labels ({n})")
        u = self._generator(input_id).random(int(n))
        return np.searchsorted(spec._cdf, u, side="right").astype(np.int64)


def sample_labels(model: OracleModel, input_id: int, n: int) -> np.ndarray:
    return model.sample(input_id, n)


# ---------------------------------------------------------------------------
# populations
# ---------------------------------------------------------------------------

class PopulationKind(enum.Enum):
    CONCENTRATED_HIGH = "concentrated_high"
    UNIFORM = "uniform"
    POINT_MASS = "point_mass"
    TWO_CLUSTERS = "two_clusters"


DEFAULT_LAW_PARAMS = {
    # p_A = 0.5 + 0.5 * Beta(beta_a, beta_b)
    PopulationKind.CONCENTRATED_HIGH: {"beta_a": 5.0, "beta_b": 0.5},
    PopulationKind.UNIFORM: {"low": 0.5, "high": 1.0},
    PopulationKind.POINT_MASS: {"p": 1.0},
    # mixture of two narrow uniform clusters
    PopulationKind.TWO_CLUSTERS: {"low_center": 0.7, "high_center": 0.995,
                                  "width": 0.01, "high_weight": 0.5},
}


def _draw_pa(kind, count, params, rng):
    if kind is PopulationKind.CONCENTRATED_HIGH:
        p = 0.5 + 0.5 * rng.beta(params["beta_a"], params["beta_b"], count)
        return np.clip(p, np.nextafter(0.5, 1.0), 1.0)
    if kind is PopulationKind.UNIFORM:
        return rng.uniform(params["low"], params["high"], count)
    if kind is PopulationKind.POINT_MASS:
        return np.full(count, float(params["p"]))
    if kind is PopulationKind.TWO_CLUSTERS:
        high = rng.random(count) < params["high_weight"]
        centers = np.where(high, params["high_center"], params["low_center"])
        p = centers + params["width"] * (rng.random(count) - 0.5)
        return np.clip(p, 0.0, 1.0)
    raise ConfigurationError(f"unknown population kind {kind!r}")


def gen_population(kind, count: int, label_count: int = 10, accuracy: float = 1.0,
                   seed: int = 0, params: Optional[dict] = None,
                   stream_seed: Optional[int] = None) -> OracleModel:
    """Generate ``count`` inputs whose top-label mass follows the law ``kind``.

    Exactly ``round(accuracy * count)`` inputs have their top label equal to
    the true label.  Mass not on the top label is spread evenly over the
    remaining labels.  Label streams are keyed by ``stream_seed`` (default:
    ``seed``).
    """
    kind = PopulationKind(kind)
    if count < 1:
        raise ConfigurationError(f"count must be >= 1, got {count}")
    if label_count < 1:
        raise ConfigurationError(f"label_count must be >= 1, got {label_count}")
    if not 0.0 <= accuracy <= 1.0:
        raise ConfigurationError(f"accuracy must lie in [0, 1], got {accuracy}")
    if accuracy < 1.0 and label_count < 2:
        raise ConfigurationError("misclassified inputs need at least two labels")
    law = dict(DEFAULT_LAW_PARAMS[kind])
    unknown = set(params or {}) - set(law)
    if unknown:
        raise ConfigurationError(f"unknown parameters for {kind.value}: {sorted(unknown)}")
    law.update(params or {})

    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0x9097,)))
    p_a = _draw_pa(kind, count, law, rng)
    if np.any(p_a > 1.0) or (label_count > 1 and np.any(p_a <= 1.0 / label_count)):
        raise ConfigurationError(
            f"{kind.value} law produced p_A outside (1/{label_count}, 1]")
    if label_count == 1 and np.any(p_a != 1.0):
        raise ConfigurationError("a single-label population needs p_A = 1")

    n_correct = int(round(accuracy * count))
    correct = np.zeros(count, dtype=bool)
    correct[rng.permutation(count)[:n_correct]] = True
    top = rng.integers(0, label_count, count)

    inputs = []
    for i in range(count):
        probs = np.full(label_count, (1.0 - p_a[i]) / max(label_count - 1, 1))
        probs[top[i]] = p_a[i]
        # rounding guard so the vector sums to one
        probs[top[i]] += 1.0 - probs.sum()
        if correct[i]:
            true_label = int(top[i])
        else:
            true_label = int(rng.integers(0, label_count - 1))
            if true_label >= top[i]:
                true_label += 1
        inputs.append(InputSpec(input_id=i, true_label=true_label, label_probs=probs))
    return OracleModel(inputs, label_count=label_count,
                       master_seed=seed if stream_seed is None else stream_seed)
