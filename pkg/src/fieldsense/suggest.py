"""Suggestion pipeline: preprocess the partial input, pick a model by
centroid distance, rank candidate values, and endorse or withhold.

A suggestion is endorsed when the target directly depends on a filled
field in the selected model (check_dep) or the top-ranked probability
mass clears the confidence threshold (check_prob); otherwise the value
list is withheld and only diagnostics are returned.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from . import preprocess as prep
from .bayesnet import BayesNet, infer_posterior
from .builder import ModelBundle
from .errors import TargetError

GLOBAL_MODEL = "global"


@dataclass(frozen=True)
class SuggestionRequest:
    """One ask: current raw filled values and the target field."""

    filled: dict[str, object]
    target: str
    top_percent: float = 5.0
    n_r: int | None = None
    theta: float = 0.7
    use_locals: bool = True
    force_endorse: bool = False

    def __post_init__(self):
        if self.target in self.filled:
            raise ValueError(f"target {self.target!r} is already filled")
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError("theta must be in [0,1]")


@dataclass
class Suggestion:
    """Ranked values (when endorsed) plus the endorsement diagnostics."""

    endorsed: bool
    items: list[tuple[str, float]]
    model_used: str
    check_dep: bool
    check_prob: bool
    top_mass: float
    n_r: int
    target: str

    def to_dict(self) -> dict:
        return {
            "endorsed": self.endorsed,
            "items": [{"value": v, "probability": p} for v, p in self.items],
            "model_used": self.model_used,
            "check_dep": self.check_dep,
            "check_prob": self.check_prob,
            "top_mass": self.top_mass,
            "n_r": self.n_r,
            "target": self.target,
        }


def centroid_distances(bundle: ModelBundle, pre_filled: dict[str, str]) -> list[int]:
    """Mismatch counts between the preprocessed filled fields and each centroid.

    Unfilled clustering fields count as mismatches.
    """
    if not bundle.clusters:
        raise ValueError("bundle has no clusters")
    dists = []
    for centroid in bundle.clusters.centroids:
        d = 0
        for f in bundle.independent_fields:
            if pre_filled.get(f) != centroid.values[f]:
                d += 1
        dists.append(d)
    return dists


def select_model(bundle: ModelBundle, pre_filled: dict[str, str],
                 use_locals: bool = True) -> tuple[BayesNet, str]:
    """The local model of the uniquely nearest centroid, else the global one."""
    if not use_locals or not bundle.clusters or not bundle.locals:
        return bundle.global_net, GLOBAL_MODEL
    dists = centroid_distances(bundle, pre_filled)
    lowest = min(dists)
    winners = [i for i, d in enumerate(dists) if d == lowest]
    if len(winners) != 1:
        return bundle.global_net, GLOBAL_MODEL
    idx = winners[0]
    return bundle.locals[idx], f"local-{idx + 1}"


def resolve_n_r(universe: list[str], top_percent: float, explicit: int | None) -> int:
    """Suggestion count: explicit, or top-percent of the non-UNKNOWN universe."""
    if explicit is not None:
        return max(1, explicit)
    base = sum(1 for v in universe if v != prep.UNKNOWN)
    return max(1, math.ceil(base * top_percent / 100.0))


def suggest(bundle: ModelBundle, request: SuggestionRequest) -> Suggestion:
    """Run the full suggestion pipeline for one partially filled form."""
    target = request.target
    if target not in bundle.schema.field_names:
        raise TargetError(f"unknown target {target!r}")
    if target not in bundle.preprocess.retained_fields:
        raise TargetError(f"target not modeled: {target!r} was removed at preprocessing")

    pre_filled = prep.apply(bundle.preprocess, dict(request.filled))
    pre_filled.pop(target, None)
    net, model_used = select_model(bundle, pre_filled, use_locals=request.use_locals)

    posterior = infer_posterior(net, pre_filled, target)
    ranked = sorted(
        (
            (value, p)
            for value, p in zip(posterior.values, posterior.probs)
            if value != prep.UNKNOWN
        ),
        key=lambda vp: (-vp[1], vp[0]),
    )
    n_r = resolve_n_r(net.universes[target], request.top_percent, request.n_r)
    top = ranked[:n_r]
    top_mass = float(sum(p for _, p in top))

    filled_names = set(pre_filled)
    check_dep = bool(net.dag.parents(target) & filled_names)
    check_prob = top_mass > request.theta
    endorsed = request.force_endorse or check_dep or check_prob

    return Suggestion(
        endorsed=endorsed,
        items=top if endorsed else [],
        model_used=model_used,
        check_dep=check_dep,
        check_prob=check_prob,
        top_mass=top_mass,
        n_r=n_r,
        target=target,
    )
