"""Training-data cleaning pipeline and its suggestion-time counterpart.

Fitting runs, in order: drop mostly-missing fields, drop high-uniqueness
textual/file fields, drop mostly-missing instances, impute what remains,
and discretize numerical fields into half-open intervals chosen by
entropy-based recursive splitting (equal-frequency bins when no split
passes the MDL stopping test). The fitted model then maps any partial
input onto the same discrete value space.
"""
from __future__ import annotations

import math
from bisect import bisect_right
from collections import Counter
from dataclasses import dataclass

from .errors import PreprocessError
from .schema import EMPTY, Dataset
from .table import DiscreteTable

UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class PreprocessConfig:
    """Cleaning thresholds; percentages in [0,100], ratio in [0,1]."""

    t_missing_field_pct: float = 90.0
    t_unique_ratio: float = 0.9
    t_missing_instance_pct: float = 50.0
    fallback_bins: int = 4

    def __post_init__(self):
        if not 0 <= self.t_missing_field_pct <= 100:
            raise ValueError("t_missing_field_pct must be in [0,100]")
        if not 0 <= self.t_unique_ratio <= 1:
            raise ValueError("t_unique_ratio must be in [0,1]")
        if not 0 <= self.t_missing_instance_pct <= 100:
            raise ValueError("t_missing_instance_pct must be in [0,100]")


@dataclass
class PreprocessModel:
    """Fitted cleaning state, reusable on partial inputs at suggestion time."""

    retained_fields: list[str]
    removed_fields: list[tuple[str, str]]
    field_kinds: dict[str, str]
    bins: dict[str, list[float]]
    impute: dict[str, str]
    value_universe: dict[str, list[str]]

    def to_dict(self) -> dict:
        return {
            "retained_fields": self.retained_fields,
            "removed_fields": [list(pair) for pair in self.removed_fields],
            "field_kinds": self.field_kinds,
            "bins": self.bins,
            "impute": self.impute,
            "value_universe": self.value_universe,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "PreprocessModel":
        return cls(
            retained_fields=list(doc["retained_fields"]),
            removed_fields=[(a, b) for a, b in doc["removed_fields"]],
            field_kinds=dict(doc["field_kinds"]),
            bins={k: [float(c) for c in v] for k, v in doc["bins"].items()},
            impute=dict(doc["impute"]),
            value_universe={k: list(v) for k, v in doc["value_universe"].items()},
        )


def interval_labels(cuts: list[float]) -> list[str]:
    """Canonical half-open interval labels covering the whole real line."""
    if not cuts:
        return ["(-inf,inf)"]
    labels = [f"(-inf,{cuts[0]!r})"]
    for lo, hi in zip(cuts, cuts[1:]):
        labels.append(f"[{lo!r},{hi!r})")
    labels.append(f"[{cuts[-1]!r},inf)")
    return labels


def interval_label_for(cuts: list[float], x: float) -> str:
    return interval_labels(cuts)[bisect_right(cuts, x)]


def _entropy(labels: list[str]) -> float:
    n = len(labels)
    if n == 0:
        return 0.0
    return -sum(
        (c / n) * math.log2(c / n) for c in Counter(labels).values()
    )


def _best_split(xs: list[float], ys: list[str]) -> tuple[float, float] | None:
    """Best midpoint cut by information gain, or None if <2 distinct values."""
    order = sorted(range(len(xs)), key=lambda i: xs[i])
    xs = [xs[i] for i in order]
    ys = [ys[i] for i in order]
    n = len(xs)
    base = _entropy(ys)
    best: tuple[float, float] | None = None
    for i in range(1, n):
        if xs[i] == xs[i - 1]:
            continue
        cut = (xs[i] + xs[i - 1]) / 2.0
        left, right = ys[:i], ys[i:]
        gain = base - (len(left) / n) * _entropy(left) - (len(right) / n) * _entropy(right)
        if best is None or gain > best[1]:
            best = (cut, gain)
    return best


def _mdlp_accepts(xs: list[float], ys: list[str], cut: float, gain: float) -> bool:
    n = len(xs)
    left = [y for x, y in zip(xs, ys) if x < cut]
    right = [y for x, y in zip(xs, ys) if x >= cut]
    k = len(set(ys))
    k1 = len(set(left))
    k2 = len(set(right))
    delta = math.log2(3**k - 2) - (
        k * _entropy(ys) - k1 * _entropy(left) - k2 * _entropy(right)
    )
    threshold = math.log2(n - 1) / n + delta / n
    return gain > threshold


def discretize_numeric(column: list[float], class_column: list[str]) -> list[float]:
    """Recursive entropy-based binary splitting with the MDL stopping rule.

    Returns a sorted (possibly empty) cut-point list. Splits are accepted
    only when the information gain beats the MDL acceptance threshold.
    """
    if len(column) != len(class_column):
        raise ValueError("column and class_column must have the same length")

    cuts: list[float] = []

    def recurse(xs: list[float], ys: list[str]) -> None:
        if len(xs) < 2 or len(set(xs)) < 2:
            return
        best = _best_split(xs, ys)
        if best is None:
            return
        cut, gain = best
        if gain <= 0 or not _mdlp_accepts(xs, ys, cut, gain):
            return
        cuts.append(cut)
        left_idx = [i for i, x in enumerate(xs) if x < cut]
        right_idx = [i for i, x in enumerate(xs) if x >= cut]
        recurse([xs[i] for i in left_idx], [ys[i] for i in left_idx])
        recurse([xs[i] for i in right_idx], [ys[i] for i in right_idx])

    recurse(list(column), list(class_column))
    return sorted(cuts)


def equal_frequency_cuts(column: list[float], bins: int) -> list[float]:
    """Quantile cut points for `bins` buckets, deduplicated and in-range."""
    xs = sorted(column)
    n = len(xs)
    lo, hi = xs[0], xs[-1]
    if lo == hi:
        return []
    cuts = []
    for b in range(1, bins):
        q = b / bins
        pos = q * (n - 1)
        i = int(math.floor(pos))
        frac = pos - i
        c = xs[i] if frac == 0 else xs[i] + frac * (xs[i + 1] - xs[i])
        if lo < c <= hi and (not cuts or c > cuts[-1]):
            cuts.append(float(c))
    return cuts


def _mutual_information(a: list, b: list) -> float:
    n = len(a)
    ca, cb, cab = Counter(a), Counter(b), Counter(zip(a, b))
    mi = 0.0
    for (va, vb), c in cab.items():
        mi += (c / n) * math.log((c * n) / (ca[va] * cb[vb]))
    return mi


def _parse_number(value) -> float | None:
    if value is EMPTY:
        return None
    try:
        return float(str(value).strip())
    except ValueError:
        return None


def fit(dataset: Dataset, config: PreprocessConfig | None = None) -> tuple[PreprocessModel, DiscreteTable]:
    """Fit the cleaning pipeline on a dataset; return the model and the
    fully discrete training table (columns in tab order)."""
    config = config or PreprocessConfig()
    if not dataset.instances:
        raise PreprocessError("cannot fit on an empty dataset")

    schema_fields = dataset.schema.fields_by_tab()
    n = len(dataset.instances)
    retained = []
    removed: list[tuple[str, str]] = []

    # Step 1: drop fields with too many missing values.
    for f in schema_fields:
        missing = sum(1 for inst in dataset.instances if inst.values.get(f.name) is EMPTY)
        pct = 100.0 * missing / n
        if pct >= config.t_missing_field_pct:
            removed.append((f.name, f"missing>={config.t_missing_field_pct:g}%"))
        else:
            retained.append(f)

    # Step 2: drop textual/file fields whose values are mostly unique.
    survivors = []
    for f in retained:
        if f.kind in ("textual", "file"):
            observed = [
                inst.values[f.name]
                for inst in dataset.instances
                if inst.values.get(f.name) is not EMPTY
            ]
            ratio = len(set(observed)) / len(observed) if observed else 0.0
            if ratio > config.t_unique_ratio:
                removed.append((f.name, f"unique-ratio>{config.t_unique_ratio:g}"))
                continue
        survivors.append(f)
    retained = survivors
    if not retained:
        raise PreprocessError(
            "all fields removed by thresholds "
            f"(t_missing_field_pct={config.t_missing_field_pct:g}, "
            f"t_unique_ratio={config.t_unique_ratio:g})"
        )

    # Step 3: drop instances with too many missing values among retained fields.
    kept_rows = []
    for inst in dataset.instances:
        missing = sum(1 for f in retained if inst.values.get(f.name) is EMPTY)
        if 100.0 * missing / len(retained) > config.t_missing_instance_pct:
            continue
        kept_rows.append(inst)
    if not kept_rows:
        raise PreprocessError(
            "all instances removed "
            f"(t_missing_instance_pct={config.t_missing_instance_pct:g})"
        )

    field_kinds = {f.name: f.kind for f in retained}
    numeric_fields = [f.name for f in retained if f.kind == "numerical"]
    categorical_fields = [f.name for f in retained if f.kind == "categorical"]

    # Step 4: impute. Numerical missing/unparseable cells get the column
    # mean; all other kinds get the UNKNOWN label.
    numeric_cols: dict[str, list[float]] = {}
    impute: dict[str, str] = {}
    columns: dict[str, list[str]] = {}
    means: dict[str, float] = {}
    for f in retained:
        name = f.name
        if f.kind == "numerical":
            parsed = [_parse_number(inst.values.get(name)) for inst in kept_rows]
            present = [v for v in parsed if v is not None]
            mean = sum(present) / len(present) if present else 0.0
            means[name] = mean
            numeric_cols[name] = [mean if v is None else v for v in parsed]
        else:
            col = []
            for inst in kept_rows:
                v = inst.values.get(name)
                col.append(UNKNOWN if v is EMPTY else str(v))
            columns[name] = col
            if f.kind != "numerical":
                impute[name] = UNKNOWN

    # Step 5: discretize numerical fields. The splitting class for each
    # numerical field is the categorical field with maximal empirical
    # mutual information against it (tie: smallest tab_index).
    bins: dict[str, list[float]] = {}
    for name in numeric_fields:
        xs = numeric_cols[name]
        class_col = None
        if categorical_fields and len(set(xs)) >= 2:
            best_mi = -1.0
            for cname in categorical_fields:  # already in tab order
                mi = _mutual_information(xs, columns[cname])
                if mi > best_mi:
                    best_mi = mi
                    class_col = columns[cname]
        cuts = discretize_numeric(xs, class_col) if class_col is not None else []
        if not cuts and len(set(xs)) >= 2:
            cuts = equal_frequency_cuts(xs, config.fallback_bins)
        bins[name] = cuts
        labels = interval_labels(cuts)
        columns[name] = [labels[bisect_right(cuts, x)] for x in xs]
        impute[name] = labels[bisect_right(cuts, means[name])]

    # Final discrete value universes, in canonical order.
    universe: dict[str, list[str]] = {}
    for f in retained:
        name = f.name
        if f.kind == "numerical":
            universe[name] = interval_labels(bins[name]) + [UNKNOWN]
        else:
            universe[name] = sorted(set(columns[name]) | {UNKNOWN})

    model = PreprocessModel(
        retained_fields=[f.name for f in retained],
        removed_fields=removed,
        field_kinds=field_kinds,
        bins=bins,
        impute=impute,
        value_universe=universe,
    )
    table = DiscreteTable(fields=model.retained_fields, columns=columns)
    return model, table


def apply(model: PreprocessModel, partial: dict) -> dict[str, str]:
    """Map a partial raw input onto the model's discrete value space.

    Total function: removed fields and EMPTY entries are dropped (absent
    evidence is not imputed at suggestion time); numbers land in their
    interval; unseen or unparseable values become UNKNOWN.
    """
    out: dict[str, str] = {}
    for name, value in partial.items():
        if name not in model.field_kinds:
            continue
        if value is EMPTY:
            continue
        text = str(value).strip()
        if not text:
            continue
        if model.field_kinds[name] == "numerical":
            num = _parse_number(text)
            if num is None:
                out[name] = UNKNOWN
            else:
                cuts = model.bins[name]
                out[name] = interval_labels(cuts)[bisect_right(cuts, num)]
        else:
            out[name] = text if text in set(model.value_universe[name]) else UNKNOWN
    return out
