"""Paired ISS / IAS experiments over simulated populations.

For every input the harness runs

* the reference IAS certification at ``k_bar`` (the baseline),
* ISS with each configured decline budget,
* IAS at each explicitly configured sample size, and
* IAS at the realized average sample size of each ISS run (``match_iss``),

each on its own random stream.  Results go to a per-input CSV, a summary CSV
and JSON, and a timing sidecar that holds every wall-clock number so the other
files are byte-reproducible.
"""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from ._jit import backend
from .certify import ABSTAIN, CertificationOutcome, certify_ias, certify_iss, default_k0
from .decline import DeclineBudget, DeclineKind, absolute_decline
from .errors import ConfigurationError, InvariantViolation
from .mapping import MappingTable, atomic_write_text, build_mapping, grid_steps
from .oracle import PopulationKind, gen_population
from .stats import _check_alpha

DEFAULT_RADII = (0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0)

PER_INPUT_COLUMNS = (
    "input_id", "method", "k_hat", "samples_consumed", "p_low", "p_up",
    "p_lower_onesided", "radius", "correct", "abstained", "diag_flags",
    "p_true", "expected_decline",
)


@dataclass
class PopulationSpec:
    kind: str = PopulationKind.CONCENTRATED_HIGH.value
    count: int = 500
    label_count: int = 10
    accuracy: float = 1.0
    seed: Optional[int] = None
    params: dict = field(default_factory=dict)


@dataclass
class ExperimentConfig:
    population: PopulationSpec = field(default_factory=PopulationSpec)
    sigma: float = 1.0
    alpha: float = 0.001
    budgets: tuple = (DeclineBudget(DeclineKind.ABSOLUTE, 0.05),)
    k_bar: int = 100_000
    k0_fraction: float = 0.01
    delta: float = 0.001
    radii: tuple = DEFAULT_RADII
    ias_sizes: tuple = ()
    match_iss: bool = True
    master_seed: int = 0
    workers: int = 1
    out_dir: Optional[str] = None

    def validate(self):
        _check_alpha(self.alpha)
        if not self.sigma > 0:
            raise ConfigurationError(f"sigma must be positive, got {self.sigma}")
        if int(self.k_bar) != self.k_bar or self.k_bar < 2:
            raise ConfigurationError(f"k_bar must be an integer >= 2, got {self.k_bar}")
        if not 0.0 < self.k0_fraction <= 1.0:
            raise ConfigurationError(f"k0_fraction must lie in (0, 1], got {self.k0_fraction}")
        grid_steps(self.delta)
        radii = list(self.radii)
        if any(r < 0 for r in radii) or any(b <= a for a, b in zip(radii, radii[1:])):
            raise ConfigurationError("radii must be nonnegative and strictly increasing")
        for k in self.ias_sizes:
            if int(k) != k or k < 2:
                raise ConfigurationError(f"IAS sample sizes must be integers >= 2, got {k}")
        if self.workers < 1:
            raise ConfigurationError("workers must be >= 1")
        for b in self.budgets:
            if not isinstance(b, DeclineBudget):
                raise ConfigurationError(f"budget {b!r} is not a DeclineBudget")
        PopulationKind(self.population.kind)
        return self

    @property
    def k0(self) -> int:
        return default_k0(self.k_bar, self.k0_fraction)

    @property
    def population_seed(self) -> int:
        seed = self.population.seed
        return self.master_seed if seed is None else seed


@dataclass
class MethodSpec:
    name: str
    kind: str  # "ias" or "iss"
    tag: int
    k: Optional[int] = None
    budget: Optional[DeclineBudget] = None
    baseline: bool = False


@dataclass
class MethodSummary:
    method: str
    avg_samples: float
    acr: float
    mad: float
    ca: dict
    abstain_rate: float
    expected_mad: Optional[float]


@dataclass
class MetricsReport:
    config: ExperimentConfig
    methods: list
    summaries: list
    records: list
    timing: dict
    outcomes: dict = field(repr=False, default_factory=dict)

    def summary(self, method: str) -> MethodSummary:
        for s in self.summaries:
            if s.method == method:
                return s
        raise KeyError(method)

    @property
    def baseline(self) -> str:
        return next(m.name for m in self.methods if m.baseline)

    def iss_methods(self):
        return [m.name for m in self.methods if m.kind == "iss"]

    def matched_ias(self, iss_name: str) -> str:
        return f"{iss_name}~IAS"

    # -- rendering --------------------------------------------------------

    def per_input_csv(self) -> str:
        return _csv(PER_INPUT_COLUMNS, [[r[c] for c in PER_INPUT_COLUMNS] for r in self.records])

    def summary_columns(self):
        return (["method", "avg_samples", "ACR", "MAD"]
                + [f"CA@{r:g}" for r in self.config.radii]
                + ["abstain_rate", "expected_MAD"])

    def summary_rows(self):
        rows = []
        for s in self.summaries:
            rows.append([s.method, _num(s.avg_samples), _num(s.acr), _num(s.mad)]
                        + [_num(s.ca[r]) for r in self.config.radii]
                        + [_num(s.abstain_rate), _num(s.expected_mad)])
        return rows

    def summary_csv(self) -> str:
        return _csv(self.summary_columns(), self.summary_rows())

    def summary_json(self) -> str:
        doc = {
            "config": config_to_dict(self.config),
            "k0": self.config.k0,
            "methods": [
                {"method": s.method, "avg_samples": s.avg_samples, "ACR": s.acr, "MAD": s.mad,
                 "CA": {f"{r:g}": s.ca[r] for r in self.config.radii},
                 "abstain_rate": s.abstain_rate, "expected_MAD": s.expected_mad}
                for s in self.summaries
            ],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def write(self, out_dir) -> dict:
        out = Path(out_dir)
        paths = {
            "per_input": out / "per_input.csv",
            "summary": out / "summary.csv",
            "summary_json": out / "summary.json",
            "timing": out / "timing.json",
        }
        atomic_write_text(paths["per_input"], self.per_input_csv())
        atomic_write_text(paths["summary"], self.summary_csv())
        atomic_write_text(paths["summary_json"], self.summary_json())
        atomic_write_text(paths["timing"], json.dumps(self.timing, indent=2, sort_keys=True) + "\n")
        return paths


def _num(x):
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return int(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    return repr(float(x))


def _csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    w.writerows(rows)
    return buf.getvalue()


def config_to_dict(cfg: ExperimentConfig) -> dict:
    d = asdict(cfg)
    d["budgets"] = [str(b) for b in cfg.budgets]
    d["radii"] = list(cfg.radii)
    d["ias_sizes"] = list(cfg.ias_sizes)
    d.pop("out_dir", None)
    d.pop("workers", None)
    return d


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------

def average_certified_radius(radii, correct) -> float:
    radii = np.asarray(radii, dtype=float)
    return float(np.mean(radii * np.asarray(correct, dtype=bool))) if radii.size else 0.0


def certified_accuracy(radii, correct, r: float) -> float:
    radii = np.asarray(radii, dtype=float)
    if not radii.size:
        return 0.0
    return float(np.mean((radii > r) & np.asarray(correct, dtype=bool)))


def max_absolute_decline(base_radii, radii, base_correct, correct) -> float:
    """Largest baseline-minus-method radius over inputs both predicted correctly, floored at 0."""
    mask = np.asarray(base_correct, dtype=bool) & np.asarray(correct, dtype=bool)
    if not mask.any():
        return 0.0
    gap = np.asarray(base_radii, dtype=float)[mask] - np.asarray(radii, dtype=float)[mask]
    return float(max(gap.max(), 0.0))


# ---------------------------------------------------------------------------
# runner
# ---------------------------------------------------------------------------

def _run_method(model, spec: MethodSpec, input_id, cfg, tables, k0):
    oracle = model.stream(spec.tag)
    if spec.kind == "ias":
        return certify_ias(oracle, input_id, spec.k, cfg.sigma, cfg.alpha)
    return certify_iss(oracle, input_id, tables[spec.budget], k0, cfg.alpha, cfg.sigma)


def _run_batch(model, specs, cfg, tables, k0, workers):
    ids = [spec.input_id for spec in model.inputs]
    seconds = {s.name: 0.0 for s in specs}

    def one(input_id):
        res = {}
        for s in specs:
            t0 = time.perf_counter()
            res[s.name] = _run_method(model, s, input_id, cfg, tables, k0)
            res[s.name + "\0t"] = time.perf_counter() - t0
        return res

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_input = list(pool.map(one, ids))
    else:
        per_input = [one(i) for i in ids]
    outcomes = {s.name: [] for s in specs}
    for res in per_input:
        for s in specs:
            outcomes[s.name].append(res[s.name])
            seconds[s.name] += res[s.name + "\0t"]
    return outcomes, seconds


def check_iss_invariants(outcomes, k0: int, k_bar: int) -> None:
    cap = max(k0, k_bar)
    for out in outcomes:
        if out.k_hat is None or out.k_hat > k_bar:
            raise InvariantViolation(f"ISS chose k_hat={out.k_hat} above k_bar={k_bar}")
        if out.samples_consumed > cap:
            raise InvariantViolation(
                f"ISS consumed {out.samples_consumed} samples, cap is {cap}")
        if out.prediction == ABSTAIN and out.radius != 0.0:
            raise InvariantViolation("abstained outcome with nonzero radius")


def run_experiment(config: ExperimentConfig, tables: Optional[dict] = None) -> MetricsReport:
    """Run the paired protocol and, if ``config.out_dir`` is set, write the reports."""
    cfg = config.validate()
    pop = cfg.population
    model = gen_population(pop.kind, pop.count, pop.label_count, pop.accuracy,
                           seed=cfg.population_seed, params=pop.params,
                           stream_seed=cfg.master_seed)
    k0 = cfg.k0
    timing = {"backend": backend(), "build_seconds": {}, "certify_seconds": {}}

    tables = dict(tables or {})
    for budget in cfg.budgets:
        if budget not in tables:
            t0 = time.perf_counter()
            tables[budget] = build_mapping(cfg.delta, budget, cfg.k_bar, cfg.sigma, cfg.alpha)
            timing["build_seconds"][budget.label] = time.perf_counter() - t0
        table: MappingTable = tables[budget]
        if (table.k_bar, table.alpha, table.delta) != (cfg.k_bar, cfg.alpha, cfg.delta):
            raise ConfigurationError(f"supplied table for {budget} does not match the config")

    tag = 0
    methods = [MethodSpec(f"IAS-{cfg.k_bar}", "ias", tag, k=cfg.k_bar, baseline=True)]
    for budget in cfg.budgets:
        tag += 1
        methods.append(MethodSpec(f"ISS-{budget.label}", "iss", tag, budget=budget))
    for k in cfg.ias_sizes:
        if int(k) == cfg.k_bar:
            continue
        tag += 1
        methods.append(MethodSpec(f"IAS-{int(k)}", "ias", tag, k=int(k)))

    outcomes, seconds = _run_batch(model, methods, cfg, tables, k0, cfg.workers)
    for m in methods:
        if m.kind == "iss":
            check_iss_invariants(outcomes[m.name], k0, cfg.k_bar)

    if cfg.match_iss:
        matched = []
        for m in [m for m in methods if m.kind == "iss"]:
            avg = np.mean([o.samples_consumed for o in outcomes[m.name]])
            tag += 1
            matched.append(MethodSpec(f"{m.name}~IAS", "ias", tag, k=max(2, int(round(avg)))))
        if matched:
            more, more_s = _run_batch(model, matched, cfg, tables, k0, cfg.workers)
            outcomes.update(more)
            seconds.update(more_s)
            methods += matched
    timing["certify_seconds"] = seconds

    records, summaries = _assemble(model, methods, outcomes, cfg)
    report = MetricsReport(config=cfg, methods=methods, summaries=summaries,
                           records=records, timing=timing, outcomes=outcomes)
    if cfg.out_dir:
        report.write(cfg.out_dir)
    return report


def _expected_decline(k_used, p_true, cfg):
    if not k_used or p_true <= 0.5:
        return None
    return absolute_decline(min(k_used, cfg.k_bar), cfg.k_bar, p_true, cfg.sigma, cfg.alpha)


def _assemble(model, methods, outcomes, cfg):
    inputs = model.inputs
    truth = np.array([s.true_label for s in inputs])
    base = outcomes[methods[0].name]
    base_r = np.array([o.radius for o in base])
    base_ok = np.array([o.prediction for o in base]) == truth

    records, summaries = [], []
    for m in methods:
        outs = outcomes[m.name]
        radii = np.array([o.radius for o in outs])
        ok = np.array([o.prediction for o in outs]) == truth
        expected = []
        for spec, o, good in zip(inputs, outs, ok):
            k_used = o.k_hat if m.kind == "iss" else m.k
            exp_d = _expected_decline(k_used, spec.p_a, cfg)
            expected.append(exp_d)
            p_low, p_up = o.interval if o.interval is not None else (None, None)
            records.append({
                "input_id": spec.input_id,
                "method": m.name,
                "k_hat": "" if o.k_hat is None else o.k_hat,
                "samples_consumed": o.samples_consumed,
                "p_low": _num(p_low),
                "p_up": _num(p_up),
                "p_lower_onesided": _num(o.p_lower_onesided),
                "radius": _num(o.radius),
                "correct": int(good),
                "abstained": int(o.abstained),
                "diag_flags": ";".join(o.flags),
                "p_true": _num(spec.p_a),
                "expected_decline": _num(exp_d),
            })
        defined = [e for e in expected if e is not None]
        summaries.append(MethodSummary(
            method=m.name,
            avg_samples=float(np.mean([o.samples_consumed for o in outs])),
            acr=average_certified_radius(radii, ok),
            mad=0.0 if m.baseline else max_absolute_decline(base_r, radii, base_ok, ok),
            ca={r: certified_accuracy(radii, ok, r) for r in cfg.radii},
            abstain_rate=float(np.mean([o.abstained for o in outs])),
            expected_mad=max(defined) if defined else None,
        ))
    return records, summaries


# ---------------------------------------------------------------------------
# comparison of two written reports
# ---------------------------------------------------------------------------

COMPARE_COLUMNS = ("report", "method", "avg_samples", "wall_seconds", "ACR", "MAD",
                   "speedup_vs_baseline")


def _read_report(path):
    path = Path(path)
    try:
        with open(path / "summary.csv", newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        timing = json.loads((path / "timing.json").read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read report in {path}: {exc}") from exc
    return rows, timing


def compare_reports(a, b) -> str:
    """Join two report directories into one ACR-versus-time table (CSV text)."""
    out = []
    for path in (a, b):
        rows, timing = _read_report(path)
        seconds = timing.get("certify_seconds", {})
        base = rows[0]["method"] if rows else None
        base_t = seconds.get(base)
        for r in rows:
            t = seconds.get(r["method"])
            speed = base_t / t if (t and base_t) else None
            out.append([Path(path).name, r["method"], r["avg_samples"],
                        _num(t), r["ACR"], r["MAD"], _num(speed)])
    return _csv(COMPARE_COLUMNS, out)
