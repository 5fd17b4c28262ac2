"""Shared fixtures: the worked banking example, a pinned reference bundle,
and brute-force oracles used across test modules."""
from __future__ import annotations

import itertools
from pathlib import Path

import numpy as np
import pytest

from fieldsense.bayesnet import BayesNet, Cpt, Dag, fit_cpts
from fieldsense.builder import BuildConfig, ModelBundle, schema_fingerprint
from fieldsense.cluster import kmodes
from fieldsense.preprocess import PreprocessModel
from fieldsense.schema import load_dataset, load_schema
from fieldsense.table import DiscreteTable

FIXTURES = Path(__file__).parent / "fixtures"

BANK_FIELDS = ["income", "entity", "company type", "primary activity"]


@pytest.fixture
def bank_schema():
    return load_schema(FIXTURES / "bank_schema.json")


@pytest.fixture
def bank_dataset(bank_schema):
    return load_dataset(bank_schema, FIXTURES / "bank_data.csv")


@pytest.fixture
def bank_dataset7(bank_schema):
    return load_dataset(bank_schema, FIXTURES / "bank_data7.csv")


def fig3_table() -> DiscreteTable:
    """The six example rows after cleaning, with the narrative's interval
    labels kept verbatim as plain categorical values."""
    return DiscreteTable(
        fields=BANK_FIELDS,
        columns={
            "income": ["[20,22)", "[20,22)", "[39,41)", "[39,41)", "[39,41)", "[39,41)"],
            "entity": ["Public", "Public", "Private", "Private", "Private", "Public"],
            "company type": ["Investment", "Investment", "Investment",
                             "Leasing", "Leasing", "Leasing"],
            "primary activity": ["Financial Service", "Leasing Service", "Leasing Service",
                                 "Leasing Service", "Leasing Service", "Financial Service"],
        },
    )


def block_b_dag() -> Dag:
    """The reference dependency structure of the worked example."""
    return Dag(
        nodes=tuple(BANK_FIELDS),
        edges=frozenset({
            ("income", "company type"),
            ("entity", "company type"),
            ("company type", "primary activity"),
        }),
    )


def pinned_bank_bundle(alpha: float = 0.0, seed: int = 0) -> ModelBundle:
    """A fully pinned bundle over the six banking rows: fixed cut points,
    the reference DAG, and k=3 clusters on the root fields."""
    schema = load_schema(FIXTURES / "bank_schema.json")
    cuts = [22.0, 39.0]
    labels = ["(-inf,22.0)", "[22.0,39.0)", "[39.0,inf)"]
    income_values = [20, 21, 39, 39, 40, 40]
    table = DiscreteTable(
        fields=BANK_FIELDS,
        columns={
            "income": [labels[0] if v < 22 else labels[2] for v in income_values],
            "entity": ["Public", "Public", "Private", "Private", "Private", "Public"],
            "company type": ["Investment", "Investment", "Investment",
                             "Leasing", "Leasing", "Leasing"],
            "primary activity": ["Financial Service", "Leasing Service", "Leasing Service",
                                 "Leasing Service", "Leasing Service", "Financial Service"],
        },
    )
    universes = {
        "income": labels + ["UNKNOWN"],
        "entity": ["Private", "Public", "UNKNOWN"],
        "company type": ["Investment", "Leasing", "UNKNOWN"],
        "primary activity": ["Financial Service", "Leasing Service", "UNKNOWN"],
    }
    pre = PreprocessModel(
        retained_fields=list(BANK_FIELDS),
        removed_fields=[("name", "unique-ratio>0.9")],
        field_kinds={"income": "numerical", "entity": "categorical",
                     "company type": "textual", "primary activity": "categorical"},
        bins={"income": cuts},
        impute={"income": labels[2], "entity": "UNKNOWN",
                "company type": "UNKNOWN", "primary activity": "UNKNOWN"},
        value_universe=universes,
    )
    dag = block_b_dag()
    global_net = fit_cpts(dag, table, alpha=alpha, universes=universes)
    f_ind = ["income", "entity"]
    clusters = kmodes(table.project(f_ind), k=3, seed=seed)
    locals_ = []
    for cid in range(3):
        members = [i for i, a in enumerate(clusters.assignment) if a == cid]
        locals_.append(fit_cpts(dag, table.select(members), alpha=alpha, universes=universes))
    return ModelBundle(
        schema=schema,
        preprocess=pre,
        global_net=global_net,
        independent_fields=f_ind,
        clusters=clusters,
        locals=locals_,
        schema_fingerprint=schema_fingerprint(schema),
        config=BuildConfig(),
        seed=seed,
    )


def joint_probability(net: BayesNet, assignment: dict[str, str]) -> float:
    p = 1.0
    for node in net.dag.nodes:
        cpt = net.cpts[node]
        parent_codes = tuple(
            net.universes[parent].index(assignment[parent]) for parent in cpt.parents
        )
        p *= float(cpt.row(parent_codes)[net.universes[node].index(assignment[node])])
    return p


def enumerate_posterior(net: BayesNet, evidence: dict[str, str], target: str) -> list[float]:
    """Posterior by summing the full joint table; the independent oracle
    for variable elimination."""
    others = [n for n in net.dag.nodes if n != target and n not in evidence]
    totals = []
    for value in net.universes[target]:
        total = 0.0
        for combo in itertools.product(*[net.universes[o] for o in others]):
            assignment = dict(zip(others, combo)) | evidence | {target: value}
            total += joint_probability(net, assignment)
        totals.append(total)
    denom = sum(totals)
    if denom == 0:
        return [float("nan")] * len(totals)
    return [t / denom for t in totals]


def random_net(rng: np.random.Generator, max_nodes: int = 6, max_states: int = 4,
               allow_zeros: bool = False) -> BayesNet:
    """Seeded random network for oracle-equivalence suites."""
    n = int(rng.integers(1, max_nodes + 1))
    names = [f"n{i}" for i in range(n)]
    order = rng.permutation(n)
    edges = set()
    parent_count = {name: 0 for name in names}
    for j in range(n):
        for i in range(j):
            if parent_count[names[order[j]]] >= 3:
                break
            if rng.random() < 0.4:
                edges.add((names[order[i]], names[order[j]]))
                parent_count[names[order[j]]] += 1
    dag = Dag(nodes=tuple(names), edges=frozenset(edges))
    universes = {
        name: [f"{name}_v{s}" for s in range(int(rng.integers(2, max_states + 1)))]
        for name in names
    }
    cpts = {}
    for name in names:
        parents = dag.ordered_parents(name)
        cards = tuple(len(universes[p]) for p in parents)
        q = int(np.prod(cards)) if cards else 1
        r = len(universes[name])
        raw = rng.random((q, r)) + (0.0 if allow_zeros else 0.05)
        if allow_zeros:
            raw[rng.random((q, r)) < 0.2] = 0.0
            raw[raw.sum(axis=1) == 0, 0] = 1.0
        cpts[name] = Cpt(name, parents, cards, raw / raw.sum(axis=1, keepdims=True))
    return BayesNet(dag=dag, cpts=cpts, universes=universes)
