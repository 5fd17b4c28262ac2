"""Benchmark harness: time split, filling-order simulation, ranking
metrics, baseline adapters and significance testing.

Test cases are generated once per run and shared across algorithms. A
case counts toward coverage whenever an algorithm answers it; the mean
reciprocal rank averages only over answered cases.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import baselines
from .bayesnet import BnConfig
from .builder import ModelBundle, build
from .errors import TargetError
from .preprocess import UNKNOWN, PreprocessConfig
from .schema import EMPTY, Dataset
from .suggest import SuggestionRequest, suggest

SCENARIOS = ("sequential", "random")


@dataclass(frozen=True)
class TestCase:
    filled: dict[str, str]
    target: str
    ground_truth: str
    scenario: str
    source_instance: int


@dataclass
class TargetStats:
    provided: int = 0
    total: int = 0
    reciprocal_ranks: list[float] = field(default_factory=list)

    @property
    def mrr(self) -> float | None:
        return mrr(self.reciprocal_ranks)

    @property
    def pcr(self) -> float:
        return pcr(self.provided, self.total)


@dataclass
class EvaluationReport:
    algorithm: str
    scenario: str
    seed: int
    per_target: dict[str, TargetStats]
    error: str | None = None

    @property
    def provided(self) -> int:
        return sum(t.provided for t in self.per_target.values())

    @property
    def total(self) -> int:
        return sum(t.total for t in self.per_target.values())

    @property
    def reciprocal_ranks(self) -> list[float]:
        out: list[float] = []
        for name in sorted(self.per_target):
            out.extend(self.per_target[name].reciprocal_ranks)
        return out

    @property
    def mrr(self) -> float | None:
        return mrr(self.reciprocal_ranks)

    @property
    def macro_mrr(self) -> float | None:
        """Mean of per-target MRRs (targets with at least one answer)."""
        vals = [t.mrr for t in self.per_target.values() if t.mrr is not None]
        return sum(vals) / len(vals) if vals else None

    @property
    def pcr(self) -> float:
        return pcr(self.provided, self.total) if self.total else 0.0

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "scenario": self.scenario,
            "seed": self.seed,
            "error": self.error,
            "mrr": self.mrr,
            "macro_mrr": self.macro_mrr,
            "pcr": self.pcr,
            "provided": self.provided,
            "total": self.total,
            "per_target": {
                name: {
                    "mrr": st.mrr,
                    "pcr": st.pcr,
                    "provided": st.provided,
                    "total": st.total,
                }
                for name, st in sorted(self.per_target.items())
            },
        }

    def flat_rows(self) -> list[dict]:
        rows = []
        for name, st in sorted(self.per_target.items()):
            rows.append(
                {
                    "algorithm": self.algorithm,
                    "scenario": self.scenario,
                    "target": name,
                    "mrr": st.mrr,
                    "pcr": st.pcr,
                    "provided": st.provided,
                    "total": st.total,
                }
            )
        return rows


def split_by_time(dataset: Dataset, ratio: float = 0.8) -> tuple[Dataset, Dataset]:
    """First ceil(ratio*N) instances for training, the rest for testing."""
    n = len(dataset.instances)
    if n < 2:
        raise ValueError("need at least 2 instances to split")
    n_train = math.ceil(ratio * n)
    if n_train >= n:
        raise ValueError(f"ratio {ratio} leaves no test instances")
    if n_train < 1:
        raise ValueError(f"ratio {ratio} leaves no training instances")
    return (
        Dataset(schema=dataset.schema, instances=dataset.instances[:n_train]),
        Dataset(schema=dataset.schema, instances=dataset.instances[n_train:]),
    )


def eligible_targets(dataset: Dataset, min_candidates: int = 10) -> list[str]:
    """Categorical fields with enough candidate values to be worth suggesting."""
    return [
        f.name
        for f in dataset.schema.categorical_fields()
        if len(f.candidates) >= min_candidates
    ]


def generate_cases(
    test: Dataset,
    scenario: str,
    seed: int = 0,
    targets: list[str] | None = None,
    min_candidates: int = 10,
) -> list[TestCase]:
    """Simulate filling orders over the test instances.

    Sequential: filled fields are those before the target in tab order.
    Random: one seeded uniform field permutation per instance. Only
    non-EMPTY fields count as filled; targets with EMPTY ground truth
    yield no case.
    """
    if scenario not in SCENARIOS:
        raise ValueError(f"unknown scenario {scenario!r}")
    schema = test.schema
    if targets is None:
        targets = eligible_targets(test, min_candidates)
    else:
        for t in targets:
            if schema.field(t).kind != "categorical":
                raise ValueError(f"target {t!r} is not categorical")

    tab_order = [f.name for f in schema.fields_by_tab()]
    cases = []
    for idx, inst in enumerate(test.instances):
        if scenario == "random":
            rng = np.random.default_rng([seed, idx])
            order = [tab_order[i] for i in rng.permutation(len(tab_order))]
        else:
            order = tab_order
        position = {name: i for i, name in enumerate(order)}
        for target in targets:
            truth = inst.values.get(target)
            if truth is EMPTY:
                continue
            filled = {
                name: inst.values[name]
                for name in order[: position[target]]
                if inst.values.get(name) is not EMPTY
            }
            cases.append(
                TestCase(
                    filled=filled,
                    target=target,
                    ground_truth=str(truth),
                    scenario=scenario,
                    source_instance=idx,
                )
            )
    return cases


def reciprocal_rank(suggested: list[str], truth: str) -> float:
    """1/position of the truth in a provided list; 0 when absent."""
    for i, v in enumerate(suggested, start=1):
        if v == truth:
            return 1.0 / i
    return 0.0


def mrr(reciprocal_ranks: list[float]) -> float | None:
    """Mean reciprocal rank over provided suggestions; None when none."""
    if not reciprocal_ranks:
        return None
    return sum(reciprocal_ranks) / len(reciprocal_ranks)


def pcr(provided: int, total: int) -> float:
    """Prediction coverage rate: answered cases over all cases."""
    if total <= 0:
        raise ValueError("total must be positive")
    if provided > total:
        raise ValueError("provided cannot exceed total")
    return provided / total


def mann_whitney_u(sample_a: list[float], sample_b: list[float]) -> tuple[float, float]:
    """Rank-sum U statistic for sample_a and a two-sided p-value from the
    normal approximation with tie correction."""
    if not sample_a or not sample_b:
        raise ValueError("both samples must be non-empty")
    n1, n2 = len(sample_a), len(sample_b)
    pooled = sorted((v, 0 if i < n1 else 1) for i, v in enumerate(sample_a + sample_b))
    ranks = [0.0] * (n1 + n2)
    i = 0
    while i < len(pooled):
        j = i
        while j + 1 < len(pooled) and pooled[j + 1][0] == pooled[i][0]:
            j += 1
        avg = (i + j) / 2 + 1
        for t in range(i, j + 1):
            ranks[t] = avg
        i = j + 1
    r1 = sum(r for r, (_, grp) in zip(ranks, pooled) if grp == 0)
    u = r1 - n1 * (n1 + 1) / 2

    n = n1 + n2
    tie_counts = []
    i = 0
    values = [v for v, _ in pooled]
    while i < n:
        j = i
        while j + 1 < n and values[j + 1] == values[i]:
            j += 1
        tie_counts.append(j - i + 1)
        i = j + 1
    tie_term = sum(t**3 - t for t in tie_counts)
    var = n1 * n2 / 12 * ((n + 1) - tie_term / (n * (n - 1)))
    if var <= 0:
        return u, 1.0
    z = (u - n1 * n2 / 2) / math.sqrt(var)
    p = math.erfc(abs(z) / math.sqrt(2))
    return u, p


class Algorithm:
    """Shared interface the harness drives: train once, answer many cases."""

    name = "base"

    def train(self, train: Dataset) -> None:
        raise NotImplementedError

    def suggest_values(self, case: TestCase) -> list[str]:
        """Ranked values, or an empty list when the algorithm withholds."""
        raise NotImplementedError


class _CandidateIndex:
    """Per-target working candidate sets (declared plus observed), cached."""

    def __init__(self, train: Dataset):
        self.train = train
        self._cache: dict[str, list[str]] = {}

    def candidates(self, target: str) -> list[str]:
        if target not in self._cache:
            observed = {
                str(v)
                for inst in self.train.instances
                if (v := inst.values.get(target)) is not EMPTY
            }
            declared = set(self.train.schema.field(target).candidates)
            self._cache[target] = sorted((observed | declared) - {UNKNOWN})
        return self._cache[target]


class EngineAlgorithm(Algorithm):
    """The Bayesian-network suggester, with ablation switches."""

    def __init__(
        self,
        name: str = "fieldsense",
        use_locals: bool = True,
        use_endorser: bool = True,
        seed: int = 0,
        top_percent: float = 5.0,
        theta: float = 0.7,
        pre_cfg: PreprocessConfig | None = None,
        bn_cfg: BnConfig | None = None,
    ):
        self.name = name
        self.use_locals = use_locals
        self.use_endorser = use_endorser
        self.seed = seed
        self.top_percent = top_percent
        self.theta = theta
        self.pre_cfg = pre_cfg
        self.bn_cfg = bn_cfg
        self.bundle: ModelBundle | None = None

    def train(self, train: Dataset) -> None:
        self.bundle = build(train, pre_cfg=self.pre_cfg, bn_cfg=self.bn_cfg, seed=self.seed)

    def suggest_values(self, case: TestCase) -> list[str]:
        assert self.bundle is not None, "train() must run first"
        request = SuggestionRequest(
            filled=dict(case.filled),
            target=case.target,
            top_percent=self.top_percent,
            theta=self.theta,
            use_locals=self.use_locals,
            force_endorse=not self.use_endorser,
        )
        try:
            result = suggest(self.bundle, request)
        except TargetError:
            return []
        return [v for v, _ in result.items]


class MfmAlgorithm(Algorithm):
    name = "mfm"

    def __init__(self, top_percent: float = 5.0):
        self.top_percent = top_percent
        self.rankings: dict[str, list[str]] = {}
        self.index: _CandidateIndex | None = None

    def train(self, train: Dataset) -> None:
        self.index = _CandidateIndex(train)
        rows = [inst.values for inst in train.instances]
        for field_schema in train.schema.fields:
            self.rankings[field_schema.name] = baselines.mfm_suggest(rows, field_schema.name)

    def _n_r(self, target: str) -> int:
        base = len(self.index.candidates(target))
        return max(1, math.ceil(base * self.top_percent / 100.0))

    def suggest_values(self, case: TestCase) -> list[str]:
        return self.rankings.get(case.target, [])[: self._n_r(case.target)]


class ArmAlgorithm(Algorithm):
    name = "arm"

    def __init__(self, min_support: int = 5, min_confidence: float = 0.3,
                 max_antecedent: int = 3, top_percent: float = 5.0):
        self.min_support = min_support
        self.min_confidence = min_confidence
        self.max_antecedent = max_antecedent
        self.top_percent = top_percent
        self.rules: list[baselines.AssociationRule] = []
        self.index: _CandidateIndex | None = None

    def train(self, train: Dataset) -> None:
        self.index = _CandidateIndex(train)
        self.rules = baselines.arm_train(
            [inst.values for inst in train.instances],
            min_support=self.min_support,
            min_confidence=self.min_confidence,
            max_antecedent=self.max_antecedent,
        )

    def suggest_values(self, case: TestCase) -> list[str]:
        base = len(self.index.candidates(case.target))
        n_r = max(1, math.ceil(base * self.top_percent / 100.0))
        return baselines.arm_suggest(self.rules, case.filled, case.target, n_r)


class FlsAlgorithm(Algorithm):
    """First-letter search; evaluation-only, the typed letter comes from
    the ground truth."""

    name = "fls"

    def __init__(self):
        self.index: _CandidateIndex | None = None

    def train(self, train: Dataset) -> None:
        self.index = _CandidateIndex(train)

    def suggest_values(self, case: TestCase) -> list[str]:
        candidates = self.index.candidates(case.target)
        return baselines.fls_suggest(candidates, case.ground_truth[:1])


def make_algorithm(name: str, seed: int = 0) -> Algorithm:
    registry = {
        "fieldsense": lambda: EngineAlgorithm(seed=seed),
        "fieldsense-nolocal": lambda: EngineAlgorithm(
            name="fieldsense-nolocal", use_locals=False, seed=seed),
        "fieldsense-noendorser": lambda: EngineAlgorithm(
            name="fieldsense-noendorser", use_endorser=False, seed=seed),
        "fieldsense-plain": lambda: EngineAlgorithm(
            name="fieldsense-plain", use_locals=False, use_endorser=False, seed=seed),
        "mfm": MfmAlgorithm,
        "arm": ArmAlgorithm,
        "fls": FlsAlgorithm,
    }
    if name not in registry:
        raise ValueError(
            f"unknown algorithm {name!r}; valid names: {', '.join(sorted(registry))}"
        )
    return registry[name]()


@dataclass
class BenchmarkResult:
    reports: dict[str, EvaluationReport]
    significance: dict[str, dict[str, float]]
    n_cases: int
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "n_cases": self.n_cases,
            "reports": {name: r.to_dict() for name, r in sorted(self.reports.items())},
            "significance": self.significance,
        }


def run_benchmark(
    dataset: Dataset,
    algorithms: list[str],
    scenario: str = "sequential",
    seed: int = 0,
    ratio: float = 0.8,
    targets: list[str] | None = None,
    min_candidates: int = 10,
) -> BenchmarkResult:
    """Split, train every algorithm on the train half, and score all of
    them against one shared case list."""
    train, test = split_by_time(dataset, ratio)
    cases = generate_cases(test, scenario, seed=seed, targets=targets,
                           min_candidates=min_candidates)

    reports: dict[str, EvaluationReport] = {}
    for name in algorithms:
        algo = make_algorithm(name, seed=seed)
        report = EvaluationReport(
            algorithm=name, scenario=scenario, seed=seed, per_target={}
        )
        try:
            algo.train(train)
        except Exception as exc:  # a broken algorithm must not sink the others
            report.error = f"training failed: {exc}"
            reports[name] = report
            continue
        for case in cases:
            stats = report.per_target.setdefault(case.target, TargetStats())
            stats.total += 1
            values = algo.suggest_values(case)
            if values:
                stats.provided += 1
                stats.reciprocal_ranks.append(reciprocal_rank(values, case.ground_truth))
        reports[name] = report

    significance: dict[str, dict[str, float]] = {}
    names = [n for n in algorithms if reports[n].error is None]
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            ra, rb = reports[a].reciprocal_ranks, reports[b].reciprocal_ranks
            if ra and rb:
                u, p = mann_whitney_u(ra, rb)
                significance[f"{a}|{b}"] = {"u": u, "p": p}
    return BenchmarkResult(
        reports=reports,
        significance=significance,
        n_cases=len(cases),
        config={
            "algorithms": list(algorithms),
            "scenario": scenario,
            "seed": seed,
            "ratio": ratio,
            "targets": targets,
            "min_candidates": min_candidates,
        },
    )
