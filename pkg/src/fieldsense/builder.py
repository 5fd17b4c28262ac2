"""Training pipeline: global network, cluster keys, and per-cluster locals.

Builds the global model over the whole preprocessed table, takes its root
fields as clustering keys, picks the cluster count at the knee of the
k-modes objective, and trains one local network per cluster (clusters
below a size floor reuse the global structure with refitted tables).
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from . import preprocess as prep
from .bayesnet import BayesNet, BnConfig, fit_cpts, learn_structure
from .cluster import ClusterSet, kmodes, select_k
from .schema import Dataset, FormSchema

FORMAT_VERSION = 1


@dataclass(frozen=True)
class BuildConfig:
    preprocess: prep.PreprocessConfig = field(default_factory=prep.PreprocessConfig)
    bn: BnConfig = field(default_factory=BnConfig)
    k_max: int = 100
    min_cluster_rows: int = 30
    kmodes_max_iters: int = 100

    def to_dict(self) -> dict:
        return {
            "preprocess": {
                "t_missing_field_pct": self.preprocess.t_missing_field_pct,
                "t_unique_ratio": self.preprocess.t_unique_ratio,
                "t_missing_instance_pct": self.preprocess.t_missing_instance_pct,
                "fallback_bins": self.preprocess.fallback_bins,
            },
            "bn": {
                "max_parents": self.bn.max_parents,
                "max_iters": self.bn.max_iters,
                "restarts": self.bn.restarts,
                "seed": self.bn.seed,
                "alpha": self.bn.alpha,
            },
            "k_max": self.k_max,
            "min_cluster_rows": self.min_cluster_rows,
            "kmodes_max_iters": self.kmodes_max_iters,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "BuildConfig":
        return cls(
            preprocess=prep.PreprocessConfig(**doc["preprocess"]),
            bn=BnConfig(**doc["bn"]),
            k_max=int(doc["k_max"]),
            min_cluster_rows=int(doc["min_cluster_rows"]),
            kmodes_max_iters=int(doc["kmodes_max_iters"]),
        )


@dataclass
class ModelBundle:
    """Everything the suggester needs, immutable once built."""

    schema: FormSchema
    preprocess: prep.PreprocessModel
    global_net: BayesNet
    independent_fields: list[str]
    clusters: ClusterSet | None
    locals: list[BayesNet]
    schema_fingerprint: str
    config: BuildConfig
    seed: int

    def __post_init__(self):
        k = self.clusters.k if self.clusters else 0
        if len(self.locals) != k:
            raise ValueError(f"expected {k} local models, got {len(self.locals)}")
        global_roots = {
            n for n in self.global_net.dag.nodes if not self.global_net.dag.parents(n)
        }
        for f in self.independent_fields:
            if f not in global_roots:
                raise ValueError(f"independent field {f!r} has parents in the global model")


def schema_fingerprint(schema: FormSchema) -> str:
    canonical = json.dumps(schema.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def independent_fields(net: BayesNet) -> list[str]:
    """Root nodes (no parents) of a network, in the node/tab order."""
    return [n for n in net.dag.nodes if not net.dag.parents(n)]


def build(
    dataset: Dataset,
    pre_cfg: prep.PreprocessConfig | None = None,
    bn_cfg: BnConfig | None = None,
    seed: int = 0,
    k_max: int = 100,
    min_cluster_rows: int = 30,
) -> ModelBundle:
    """Train the full model bundle from a historical dataset."""
    config = BuildConfig(
        preprocess=pre_cfg or prep.PreprocessConfig(),
        bn=bn_cfg or BnConfig(seed=seed),
        k_max=k_max,
        min_cluster_rows=min_cluster_rows,
    )
    pre_model, table = prep.fit(dataset, config.preprocess)
    universes = pre_model.value_universe

    global_dag = learn_structure(table, config.bn, universes=universes)
    global_net = fit_cpts(global_dag, table, alpha=config.bn.alpha, universes=universes)
    f_ind = independent_fields(global_net)

    clusters: ClusterSet | None = None
    local_nets: list[BayesNet] = []
    if f_ind:
        projection = table.project(f_ind)
        k = select_k(projection, k_max=config.k_max, seed=seed)
        clusters = kmodes(projection, k, seed=seed, max_iters=config.kmodes_max_iters)
        for cid in range(clusters.k):
            member_rows = [i for i, a in enumerate(clusters.assignment) if a == cid]
            sub = table.select(member_rows)
            if len(member_rows) < config.min_cluster_rows:
                dag = global_dag  # too few rows for a trustworthy structure search
            else:
                dag = learn_structure(sub, config.bn, universes=universes)
            local_nets.append(fit_cpts(dag, sub, alpha=config.bn.alpha, universes=universes))

    return ModelBundle(
        schema=dataset.schema,
        preprocess=pre_model,
        global_net=global_net,
        independent_fields=f_ind,
        clusters=clusters,
        locals=local_nets,
        schema_fingerprint=schema_fingerprint(dataset.schema),
        config=config,
        seed=seed,
    )
