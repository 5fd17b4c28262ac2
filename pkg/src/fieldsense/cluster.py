"""K-modes clustering of categorical rows and knee-based choice of k.

Distance is the Hamming mismatch count between a row and a centroid;
centroids are per-field modes. Iterations are Lloyd-style and fully
deterministic given a seed.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .table import DiscreteTable


@dataclass(frozen=True)
class Centroid:
    """Per-field modes of one cluster over the clustering fields."""

    values: dict[str, str]

    def as_tuple(self, fields: list[str]) -> tuple[str, ...]:
        return tuple(self.values[f] for f in fields)


@dataclass
class ClusterSet:
    """A total partition of the training rows into k non-empty clusters."""

    k: int
    fields: list[str]
    centroids: list[Centroid]
    assignment: list[int]
    objective: float = 0.0
    objective_trace: list[float] = field(default_factory=list)


def _hamming(a: tuple[str, ...], b: tuple[str, ...]) -> int:
    return sum(1 for x, y in zip(a, b) if x != y)


def kmodes(table: DiscreteTable, k: int, seed: int = 0, max_iters: int = 100) -> ClusterSet:
    """Cluster rows (already projected onto the clustering fields) into k modes.

    Initial centroids are k distinct rows drawn uniformly (seeded); empty
    clusters are repaired by promoting the row farthest from its centroid.
    The mismatch objective is non-increasing across iterations.
    """
    fields = list(table.fields)
    n = table.n_rows
    if k < 1:
        raise ValueError("k must be >= 1")
    rows = [tuple(table.columns[f][i] for f in fields) for i in range(n)]
    distinct = sorted(set(rows))
    counts = Counter(rows)
    weights = [counts[d] for d in distinct]
    if k > len(distinct):
        raise ValueError(f"k={k} exceeds the {len(distinct)} distinct rows")

    rng = np.random.default_rng(seed)
    init = sorted(rng.choice(len(distinct), size=k, replace=False).tolist())
    centroids = [distinct[i] for i in init]

    def assign() -> list[int]:
        out = []
        for d in distinct:
            dists = [_hamming(d, c) for c in centroids]
            out.append(dists.index(min(dists)))
        return out

    def objective(assignment: list[int]) -> float:
        return float(sum(
            w * _hamming(d, centroids[c])
            for d, w, c in zip(distinct, weights, assignment)
        ))

    trace: list[float] = []
    assignment = assign()
    prev = None
    for _ in range(max_iters):
        # repair empty clusters: promote the farthest row to be the centroid
        for _ in range(k):
            occupied = set(assignment)
            empty = [c for c in range(k) if c not in occupied]
            if not empty:
                break
            far = max(
                range(len(distinct)),
                key=lambda i: (_hamming(distinct[i], centroids[assignment[i]]), -i),
            )
            centroids[empty[0]] = distinct[far]
            assignment = assign()

        trace.append(objective(assignment))
        if assignment == prev:
            break
        prev = assignment

        # recompute centroids as per-field weighted modes (tie: smallest value)
        for c in range(k):
            members = [i for i, a in enumerate(assignment) if a == c]
            mode = []
            for fi in range(len(fields)):
                tally: Counter = Counter()
                for i in members:
                    tally[distinct[i][fi]] += weights[i]
                best = min(tally.items(), key=lambda kv: (-kv[1], kv[0]))[0]
                mode.append(best)
            centroids[c] = tuple(mode)
        assignment = assign()

    # Degenerate duplicate-centroid runs can exhaust max_iters with an empty
    # cluster left; force-promote farthest rows so the partition is total.
    for c in range(k):
        occupied = set(assignment)
        if c in occupied:
            continue
        far = max(
            (i for i in range(len(distinct)) if assignment.count(assignment[i]) > 1),
            key=lambda i: (_hamming(distinct[i], centroids[assignment[i]]), -i),
            default=None,
        )
        if far is None:
            break
        centroids[c] = distinct[far]
        assignment[far] = c

    final_obj = objective(assignment)
    trace.append(final_obj)
    distinct_index = {d: i for i, d in enumerate(distinct)}
    per_row = [assignment[distinct_index[r]] for r in rows]
    return ClusterSet(
        k=k,
        fields=fields,
        centroids=[Centroid(values=dict(zip(fields, c))) for c in centroids],
        assignment=per_row,
        objective=final_obj,
        objective_trace=trace,
    )


def select_k(table: DiscreteTable, k_max: int = 100, seed: int = 0) -> int:
    """Choose k at the knee of the average within-cluster mismatch curve.

    Runs k-modes for k = 1..min(k_max, distinct rows) and returns the k
    maximizing the perpendicular distance to the chord between the curve's
    endpoints (axes normalized); flat or linear curves fall back to k=1.
    """
    n = table.n_rows
    if n == 0:
        raise ValueError("no rows to cluster")
    rows = {tuple(table.columns[f][i] for f in table.fields) for i in range(n)}
    k_hi = min(k_max, len(rows))
    if k_hi == 1:
        return 1

    ks = list(range(1, k_hi + 1))
    js: list[float] = []
    for k in ks:
        if js and js[-1] == 0.0:
            js.append(0.0)  # adding clusters cannot make a zero objective worse
            continue
        js.append(kmodes(table, k, seed=seed).objective / n)

    x1, y1 = ks[0], js[0]
    x2, y2 = ks[-1], js[-1]
    if y1 == y2:
        return 1
    best_k, best_dist = 1, 0.0
    for k, j in zip(ks, js):
        xs = (k - x1) / (x2 - x1)
        ys = (j - y2) / (y1 - y2)
        # chord in normalized space runs (0,1) -> (1,0)
        dist = abs(xs + ys - 1.0) / np.sqrt(2.0)
        if dist > best_dist + 1e-9:
            best_k, best_dist = k, dist
    return best_k
