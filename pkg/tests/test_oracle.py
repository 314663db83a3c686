import numpy as np
import pytest

from isscert.errors import ConfigurationError
from isscert.oracle import (DEFAULT_LAW_PARAMS, InputSpec, OracleModel, PopulationKind,
                            gen_population, sample_labels)


def _model(probs, seed=5):
    specs = [InputSpec(input_id=i, true_label=int(np.argmax(p)), label_probs=p)
             for i, p in enumerate(probs)]
    return OracleModel(specs, label_count=len(probs[0]), master_seed=seed)


def test_one_hot_draws():
    m = _model([[0.0, 0.0, 1.0]])
    assert np.all(sample_labels(m, 0, 1000) == 2)


def test_empirical_frequency():
    m = _model([[0.7, 0.3]])
    draws = sample_labels(m, 0, 100_000)
    assert abs(np.mean(draws == 0) - 0.7) <= 0.006


def test_zero_draws_and_errors():
    m = _model([[0.5, 0.5]])
    assert sample_labels(m, 0, 0).size == 0
    with pytest.raises(KeyError):
        sample_labels(m, 7, 3)
    with pytest.raises(ValueError):
        sample_labels(m, 0, -1)


def test_stream_continues_and_resets():
    m = _model([[0.4, 0.3, 0.3]])
    view = m.stream(3)
    whole = _model([[0.4, 0.3, 0.3]]).stream(3).sample(0, 200)
    parts = np.concatenate([view.sample(0, 50), view.sample(0, 150)])
    assert np.array_equal(whole, parts)
    view.reset(0)
    assert np.array_equal(view.sample(0, 200), whole)


def test_order_independence_and_tags():
    probs = [[0.6, 0.4], [0.2, 0.8], [0.5, 0.5]]
    a, b = _model(probs), _model(probs)
    fwd = [a.sample(i, 300) for i in range(3)]
    rev = [b.sample(i, 300) for i in reversed(range(3))][::-1]
    for x, y in zip(fwd, rev):
        assert np.array_equal(x, y)
    # a different tag is a different stream; a different seed too
    assert not np.array_equal(a.stream(1).sample(0, 300), fwd[0])
    assert not np.array_equal(_model(probs, seed=6).sample(0, 300), fwd[0])


def test_input_spec_validation():
    with pytest.raises(ConfigurationError):
        InputSpec(0, 0, [0.5, 0.6])
    with pytest.raises(ConfigurationError):
        InputSpec(0, 0, [1.2, -0.2])
    with pytest.raises(ConfigurationError):
        InputSpec(0, 3, [0.5, 0.5])
    spec = InputSpec(0, 1, [0.3, 0.4, 0.3])
    assert spec.top_label == 1 and spec.p_a == 0.4 and spec.correct
    # ties resolve to the smallest label
    assert InputSpec(0, 0, [0.5, 0.5]).top_label == 0
    with pytest.raises(ConfigurationError):
        OracleModel([InputSpec(0, 0, [1.0]), InputSpec(0, 0, [1.0])], 1, 0)


def test_point_mass_population():
    m = gen_population(PopulationKind.POINT_MASS, 10, label_count=4, seed=1)
    for s in m.inputs:
        assert s.p_a == 1.0 and s.correct
        assert np.count_nonzero(s.label_probs) == 1


def test_concentrated_high_shape():
    m = gen_population("concentrated_high", 10_000, seed=2)
    p = np.array([s.p_a for s in m.inputs])
    assert np.all((p > 0.5) & (p <= 1.0))
    assert np.mean(p > 0.95) >= 0.5


@pytest.mark.parametrize("kind", list(PopulationKind))
def test_probabilities_sum_to_one(kind):
    m = gen_population(kind, 200, label_count=7, seed=3)
    for s in m.inputs:
        assert abs(s.label_probs.sum() - 1.0) <= 1e-12
        assert s.p_a > 1 / 7


@pytest.mark.parametrize("accuracy,expected", [(0.0, 0), (1.0, 100), (0.37, 37)])
def test_accuracy_is_exact(accuracy, expected):
    m = gen_population("uniform", 100, accuracy=accuracy, seed=4)
    assert sum(s.correct for s in m.inputs) == expected


def test_population_reproducible_and_stream_seed():
    a = gen_population("two_clusters", 50, seed=9)
    b = gen_population("two_clusters", 50, seed=9)
    assert [s.p_a for s in a.inputs] == [s.p_a for s in b.inputs]
    assert np.array_equal(a.sample(3, 100), b.sample(3, 100))
    c = gen_population("two_clusters", 50, seed=9, stream_seed=10)
    assert [s.p_a for s in c.inputs] == [s.p_a for s in a.inputs]
    assert c.master_seed == 10


def test_population_errors():
    with pytest.raises(ConfigurationError):
        gen_population("uniform", 0)
    with pytest.raises(ConfigurationError):
        gen_population("uniform", 10, accuracy=1.5)
    with pytest.raises(ConfigurationError):
        gen_population("uniform", 10, params={"nope": 1})
    with pytest.raises(ConfigurationError):
        # law that puts p_A below 1 / label_count
        gen_population("uniform", 10, label_count=2, params={"low": 0.1, "high": 0.4})
    with pytest.raises(ValueError):
        gen_population("bogus", 10)
    assert DEFAULT_LAW_PARAMS[PopulationKind.CONCENTRATED_HIGH] == {"beta_a": 5.0, "beta_b": 0.5}
