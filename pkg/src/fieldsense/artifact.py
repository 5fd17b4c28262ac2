"""Versioned on-disk model artifact with a canonical, byte-stable encoding.

Everything is JSON with sorted keys and fixed separators; CPTs are dense
row lists in canonical value order, so save -> load -> save is
byte-identical and equal builds produce equal files.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .bayesnet import BayesNet, Cpt, Dag
from .builder import FORMAT_VERSION, BuildConfig, ModelBundle
from .cluster import Centroid, ClusterSet
from .errors import DataError
from .preprocess import PreprocessModel
from .schema import FormSchema


def _net_to_dict(net: BayesNet) -> dict:
    return {
        "nodes": list(net.dag.nodes),
        "edges": sorted([list(e) for e in net.dag.edges]),
        "universes": {n: list(vs) for n, vs in net.universes.items()},
        "cpts": {
            n: {
                "parents": list(net.cpts[n].parents),
                "rows": net.cpts[n].probs.tolist(),
            }
            for n in net.dag.nodes
        },
    }


def _net_from_dict(doc: dict) -> BayesNet:
    dag = Dag(
        nodes=tuple(doc["nodes"]),
        edges=frozenset(tuple(e) for e in doc["edges"]),
    )
    universes = {n: list(vs) for n, vs in doc["universes"].items()}
    cpts = {}
    for node, entry in doc["cpts"].items():
        parents = tuple(entry["parents"])
        cards = tuple(len(universes[p]) for p in parents)
        cpts[node] = Cpt(node, parents, cards, np.array(entry["rows"], dtype=float))
    return BayesNet(dag=dag, cpts=cpts, universes=universes)


def bundle_to_dict(bundle: ModelBundle) -> dict:
    doc = {
        "format_version": FORMAT_VERSION,
        "schema": bundle.schema.to_dict(),
        "schema_fingerprint": bundle.schema_fingerprint,
        "preprocess": bundle.preprocess.to_dict(),
        "global": _net_to_dict(bundle.global_net),
        "independent_fields": list(bundle.independent_fields),
        "locals": [_net_to_dict(net) for net in bundle.locals],
        "config": bundle.config.to_dict(),
        "seed": bundle.seed,
    }
    if bundle.clusters is not None:
        doc["clusters"] = {
            "k": bundle.clusters.k,
            "fields": list(bundle.clusters.fields),
            "centroids": [
                [c.values[f] for f in bundle.clusters.fields]
                for c in bundle.clusters.centroids
            ],
            "assignment": list(bundle.clusters.assignment),
        }
    else:
        doc["clusters"] = None
    return doc


def bundle_from_dict(doc: dict) -> ModelBundle:
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise DataError(f"unsupported artifact format version {version!r}")
    clusters = None
    if doc["clusters"] is not None:
        cdoc = doc["clusters"]
        fields = list(cdoc["fields"])
        clusters = ClusterSet(
            k=int(cdoc["k"]),
            fields=fields,
            centroids=[
                Centroid(values=dict(zip(fields, row))) for row in cdoc["centroids"]
            ],
            assignment=list(cdoc["assignment"]),
        )
    return ModelBundle(
        schema=FormSchema.from_dict(doc["schema"]),
        preprocess=PreprocessModel.from_dict(doc["preprocess"]),
        global_net=_net_from_dict(doc["global"]),
        independent_fields=list(doc["independent_fields"]),
        clusters=clusters,
        locals=[_net_from_dict(d) for d in doc["locals"]],
        schema_fingerprint=doc["schema_fingerprint"],
        config=BuildConfig.from_dict(doc["config"]),
        seed=int(doc["seed"]),
    )


def dumps(bundle: ModelBundle) -> str:
    return json.dumps(bundle_to_dict(bundle), sort_keys=True, separators=(",", ":"))


def save_bundle(bundle: ModelBundle, path: str | Path) -> None:
    Path(path).write_text(dumps(bundle) + "\n", encoding="utf-8")


def load_bundle(path: str | Path) -> ModelBundle:
    path = Path(path)
    if not path.exists():
        raise DataError(f"model artifact not found: {path}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: not a valid model artifact: {exc.msg}") from exc
    return bundle_from_dict(doc)
