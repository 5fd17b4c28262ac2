"""Discrete Bayesian networks over form fields.

Structure is learned by greedy hill climbing under a BIC fitness
(log-likelihood minus a (ln N)/2-weighted free-parameter penalty),
parameters by smoothed maximum likelihood, and posteriors by exact
variable elimination that tolerates any subset of observed fields.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .table import DiscreteTable

# Families whose contingency table would exceed this many cells are scored
# -inf: the BIC penalty alone already dwarfs any possible likelihood gain
# there, so the search must never take such a move.
MAX_FAMILY_CELLS = 2_000_000


@dataclass(frozen=True)
class Dag:
    """Directed acyclic graph over named nodes."""

    nodes: tuple[str, ...]
    edges: frozenset[tuple[str, str]]

    def __post_init__(self):
        known = set(self.nodes)
        if len(known) != len(self.nodes):
            raise ValueError("duplicate node names")
        for p, c in self.edges:
            if p not in known or c not in known:
                raise ValueError(f"edge ({p!r},{c!r}) references unknown node")
            if p == c:
                raise ValueError(f"self-loop on {p!r}")
        if self._has_cycle():
            raise ValueError("graph contains a cycle")

    def _has_cycle(self) -> bool:
        children: dict[str, list[str]] = {n: [] for n in self.nodes}
        indeg = {n: 0 for n in self.nodes}
        for p, c in self.edges:
            children[p].append(c)
            indeg[c] += 1
        queue = [n for n in self.nodes if indeg[n] == 0]
        seen = 0
        while queue:
            n = queue.pop()
            seen += 1
            for c in children[n]:
                indeg[c] -= 1
                if indeg[c] == 0:
                    queue.append(c)
        return seen != len(self.nodes)

    def parents(self, node: str) -> set[str]:
        if node not in self.nodes:
            raise ValueError(f"unknown node {node!r}")
        return {p for p, c in self.edges if c == node}

    def ordered_parents(self, node: str) -> tuple[str, ...]:
        """Parents in node-list order (the canonical CPT axis order)."""
        ps = self.parents(node)
        return tuple(n for n in self.nodes if n in ps)


@dataclass(frozen=True)
class BnConfig:
    max_parents: int = 4
    max_iters: int = 100
    restarts: int = 0
    seed: int = 0
    alpha: float = 1.0


class Cpt:
    """Conditional probability table: dense rows over every parent configuration.

    Rows are stored in mixed-radix parent order with the first parent as
    the fastest-varying digit; each row is a distribution over the
    variable's value universe.
    """

    def __init__(self, variable: str, parents: tuple[str, ...],
                 parent_cards: tuple[int, ...], probs: np.ndarray):
        q = int(np.prod(parent_cards)) if parent_cards else 1
        if probs.shape[0] != q:
            raise ValueError(f"{variable}: expected {q} rows, got {probs.shape[0]}")
        if not np.all(probs >= 0):
            raise ValueError(f"{variable}: negative probability")
        if not np.allclose(probs.sum(axis=1), 1.0, atol=1e-9):
            raise ValueError(f"{variable}: rows must sum to 1")
        self.variable = variable
        self.parents = parents
        self.parent_cards = parent_cards
        self.probs = probs

    def row(self, parent_values: tuple[int, ...]) -> np.ndarray:
        idx = 0
        mult = 1
        for v, card in zip(parent_values, self.parent_cards):
            idx += mult * v
            mult *= card
        return self.probs[idx]


@dataclass
class BayesNet:
    """A DAG, one CPT per node, and the shared value universes."""

    dag: Dag
    cpts: dict[str, Cpt]
    universes: dict[str, list[str]]

    def __post_init__(self):
        for node in self.dag.nodes:
            cpt = self.cpts[node]
            if cpt.parents != self.dag.ordered_parents(node):
                raise ValueError(f"{node}: CPT parents disagree with DAG parents")


@dataclass
class Posterior:
    """Exact posterior over one field's universe."""

    values: list[str]
    probs: list[float]
    zero_evidence: bool = False

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.values, self.probs))


def _universes_from(data: DiscreteTable) -> dict[str, list[str]]:
    return {f: sorted(set(data.columns[f])) for f in data.fields}


def _encode(data: DiscreteTable, universes: dict[str, list[str]]) -> dict[str, np.ndarray]:
    codes = {}
    for f in data.fields:
        index = {v: i for i, v in enumerate(universes[f])}
        try:
            codes[f] = np.array([index[v] for v in data.columns[f]], dtype=np.int64)
        except KeyError as exc:
            raise ValueError(f"column {f!r}: value {exc} not in universe") from exc
    return codes


def _family_counts(child: str, parents: tuple[str, ...],
                   codes: dict[str, np.ndarray],
                   cards: dict[str, int]) -> np.ndarray | None:
    """(q, r) contingency counts; None when the table would be too large."""
    r = cards[child]
    q = 1
    for p in parents:
        q *= cards[p]
    if q * r > MAX_FAMILY_CELLS:
        return None
    joint = np.zeros_like(codes[child])
    mult = 1
    for p in parents:
        joint += mult * codes[p]
        mult *= cards[p]
    flat = np.bincount(joint * r + codes[child], minlength=q * r)
    return flat.reshape(q, r)


def _family_score_from_counts(counts: np.ndarray, n: int) -> float:
    q, r = counts.shape
    row_tot = counts.sum(axis=1, keepdims=True)
    nz = counts > 0
    ll = float((counts[nz] * (np.log(counts[nz]) - np.log(np.broadcast_to(row_tot, counts.shape)[nz]))).sum())
    penalty = 0.5 * math.log(n) * (r - 1) * q
    return ll - penalty


class _Scorer:
    """Per-family BIC scores over one encoded table, memoized."""

    def __init__(self, data: DiscreteTable, universes: dict[str, list[str]]):
        if data.n_rows == 0:
            raise ValueError("empty data")
        self.n = data.n_rows
        self.cards = {f: len(universes[f]) for f in data.fields}
        self.codes = _encode(data, universes)
        self._cache: dict[tuple[str, frozenset[str]], float] = {}

    def family(self, child: str, parents: tuple[str, ...]) -> float:
        key = (child, frozenset(parents))
        if key not in self._cache:
            counts = _family_counts(child, parents, self.codes, self.cards)
            score = -math.inf if counts is None else _family_score_from_counts(counts, self.n)
            self._cache[key] = score
        return self._cache[key]


def family_score(child: str, parents: tuple[str, ...], data: DiscreteTable,
                 universes: dict[str, list[str]] | None = None) -> float:
    """BIC contribution of one node given its parent set."""
    universes = universes or _universes_from(data)
    return _Scorer(data, universes).family(child, parents)


def bic_score(dag: Dag, data: DiscreteTable,
              universes: dict[str, list[str]] | None = None) -> float:
    """Decomposable BIC of a DAG on discrete data; higher is better."""
    universes = universes or _universes_from(data)
    scorer = _Scorer(data, universes)
    return sum(scorer.family(node, dag.ordered_parents(node)) for node in dag.nodes)


def _reachable(src: str, dst: str, children: dict[str, set[str]]) -> bool:
    stack = [src]
    seen = {src}
    while stack:
        node = stack.pop()
        if node == dst:
            return True
        for c in children[node]:
            if c not in seen:
                seen.add(c)
                stack.append(c)
    return False


def _hill_climb(nodes: list[str], scorer: _Scorer, config: BnConfig,
                start_edges: set[tuple[str, str]],
                score_trace: list[float] | None) -> tuple[set[tuple[str, str]], float]:
    parents: dict[str, set[str]] = {n: set() for n in nodes}
    children: dict[str, set[str]] = {n: set() for n in nodes}
    for p, c in start_edges:
        parents[c].add(p)
        children[p].add(c)
    edges = set(start_edges)

    def fam(node: str) -> float:
        return scorer.family(node, tuple(sorted(parents[node])))

    score = sum(fam(n) for n in nodes)
    if score_trace is not None:
        score_trace.append(score)

    for _ in range(config.max_iters):
        # Moves must beat this margin: keeps "strictly improving" robust to
        # float accumulation noise when the total score is re-summed.
        best_delta = 1e-6
        best_key: tuple[str, str, str] | None = None

        def consider(delta: float, key: tuple[str, str, str]) -> None:
            nonlocal best_delta, best_key
            if delta > best_delta or (delta == best_delta and best_key is not None
                                      and key < best_key):
                best_delta, best_key = delta, key

        for x in nodes:
            for y in nodes:
                if x == y:
                    continue
                if (x, y) not in edges:
                    if (y, x) in edges or len(parents[y]) >= config.max_parents:
                        continue
                    if _reachable(y, x, children):
                        continue
                    delta = (scorer.family(y, tuple(sorted(parents[y] | {x})))
                             - scorer.family(y, tuple(sorted(parents[y]))))
                    consider(delta, ("add", x, y))
                else:
                    delete_gain = (scorer.family(y, tuple(sorted(parents[y] - {x})))
                                   - scorer.family(y, tuple(sorted(parents[y]))))
                    consider(delete_gain, ("delete", x, y))
                    if len(parents[x]) >= config.max_parents:
                        continue
                    # y -> x is legal iff no other path x ~> y remains
                    children[x].discard(y)
                    creates_cycle = _reachable(x, y, children)
                    children[x].add(y)
                    if creates_cycle:
                        continue
                    delta = (delete_gain
                             + scorer.family(x, tuple(sorted(parents[x] | {y})))
                             - scorer.family(x, tuple(sorted(parents[x]))))
                    consider(delta, ("reverse", x, y))

        if best_key is None:
            break
        op, x, y = best_key
        if op == "add":
            edges.add((x, y))
            parents[y].add(x)
            children[x].add(y)
        elif op == "delete":
            edges.discard((x, y))
            parents[y].discard(x)
            children[x].discard(y)
        else:
            edges.discard((x, y))
            parents[y].discard(x)
            children[x].discard(y)
            edges.add((y, x))
            parents[x].add(y)
            children[y].add(x)
        new_score = sum(fam(n) for n in nodes)
        assert new_score > score, "accepted move must strictly improve the BIC score"
        score = new_score
        if score_trace is not None:
            score_trace.append(score)

    return edges, score


def _random_dag_edges(nodes: list[str], rng: np.random.Generator,
                      max_parents: int) -> set[tuple[str, str]]:
    order = list(rng.permutation(len(nodes)))
    edges: set[tuple[str, str]] = set()
    indeg = {n: 0 for n in nodes}
    for j in range(1, len(order)):
        for i in range(j):
            if indeg[nodes[order[j]]] >= max_parents:
                break
            if rng.random() < 0.2:
                edges.add((nodes[order[i]], nodes[order[j]]))
                indeg[nodes[order[j]]] += 1
    return edges


def learn_structure(data: DiscreteTable, config: BnConfig | None = None,
                    universes: dict[str, list[str]] | None = None,
                    score_trace: list[float] | None = None) -> Dag:
    """Greedy hill climbing from the empty graph over add/delete/reverse moves.

    Applies the best strictly-improving legal move per iteration; optional
    seeded random restarts keep the best-scoring local optimum.
    """
    config = config or BnConfig()
    if not data.fields or data.n_rows == 0:
        raise ValueError("structure learning needs at least one column and one row")
    universes = universes or _universes_from(data)
    scorer = _Scorer(data, universes)
    nodes = list(data.fields)

    best_edges, best_score = _hill_climb(nodes, scorer, config, set(), score_trace)
    for restart in range(config.restarts):
        rng = np.random.default_rng([config.seed, restart])
        start = _random_dag_edges(nodes, rng, config.max_parents)
        edges, score = _hill_climb(nodes, scorer, config, start, None)
        if score > best_score:
            best_edges, best_score = edges, score
    return Dag(nodes=tuple(nodes), edges=frozenset(best_edges))


def fit_cpts(dag: Dag, data: DiscreteTable, alpha: float = 1.0,
             universes: dict[str, list[str]] | None = None) -> BayesNet:
    """Estimate CPT rows as (count + alpha) / (total + alpha * |universe|).

    With alpha=0 this is the pure MLE; parent configurations never seen in
    the data get a uniform row.
    """
    universes = universes or _universes_from(data)
    codes = _encode(data, universes)
    cards = {f: len(universes[f]) for f in dag.nodes}
    cpts = {}
    for node in dag.nodes:
        ps = dag.ordered_parents(node)
        counts = _family_counts(node, ps, codes, cards)
        if counts is None:
            raise ValueError(f"{node}: CPT too large to materialize")
        counts = counts.astype(float)
        r = cards[node]
        totals = counts.sum(axis=1, keepdims=True)
        if alpha > 0:
            probs = (counts + alpha) / (totals + alpha * r)
        else:
            probs = np.full_like(counts, 1.0 / r)
            seen = totals[:, 0] > 0
            probs[seen] = counts[seen] / totals[seen]
        cpts[node] = Cpt(node, ps, tuple(cards[p] for p in ps), probs)
    return BayesNet(dag=dag, cpts=cpts, universes={n: list(universes[n]) for n in dag.nodes})


def parents(net: BayesNet, name: str) -> set[str]:
    """Parent field set of a node in the network's DAG."""
    return net.dag.parents(name)


class _Factor:
    __slots__ = ("vars", "array")

    def __init__(self, vars_: tuple[str, ...], array: np.ndarray):
        self.vars = vars_
        self.array = array


def _factor_product(a: _Factor, b: _Factor) -> _Factor:
    out_vars = a.vars + tuple(v for v in b.vars if v not in a.vars)
    a_arr = a.array.reshape(a.array.shape + (1,) * (len(out_vars) - len(a.vars)))
    perm = [b.vars.index(v) if v in b.vars else None for v in out_vars]
    b_shape = [b.array.shape[b.vars.index(v)] if v in b.vars else 1 for v in out_vars]
    src = [p for p in perm if p is not None]
    b_arr = np.transpose(b.array, src).reshape(b_shape)
    return _Factor(out_vars, a_arr * b_arr)


def _factor_marginalize(f: _Factor, var: str) -> _Factor:
    axis = f.vars.index(var)
    return _Factor(tuple(v for v in f.vars if v != var), f.array.sum(axis=axis))


def _min_fill_order(hidden: set[str], scopes: list[set[str]]) -> list[str]:
    adj: dict[str, set[str]] = {v: set() for v in hidden}
    for scope in scopes:
        for v in scope:
            if v in adj:
                adj[v] |= {u for u in scope if u != v and u in adj}
    order = []
    remaining = set(hidden)
    while remaining:
        best = None
        best_fill = None
        for v in sorted(remaining):
            nbrs = adj[v] & remaining
            fill = sum(1 for a in nbrs for b in nbrs if a < b and b not in adj[a])
            if best_fill is None or fill < best_fill:
                best, best_fill = v, fill
        nbrs = adj[best] & remaining
        for a in nbrs:
            adj[a] |= nbrs - {a}
        remaining.discard(best)
        order.append(best)
    return order


def _eliminate(net: BayesNet, evidence_codes: dict[str, int], target: str) -> np.ndarray:
    factors = []
    for node in net.dag.nodes:
        cpt = net.cpts[node]
        shape = tuple(reversed(cpt.parent_cards)) + (len(net.universes[node]),)
        vars_ = tuple(reversed(cpt.parents)) + (node,)
        f = _Factor(vars_, cpt.probs.reshape(shape))
        for var, code in evidence_codes.items():
            if var in f.vars:
                axis = f.vars.index(var)
                f = _Factor(tuple(v for v in f.vars if v != var),
                            np.take(f.array, code, axis=axis))
        factors.append(f)

    hidden = set(net.dag.nodes) - set(evidence_codes) - {target}
    for var in _min_fill_order(hidden, [set(f.vars) for f in factors]):
        related = [f for f in factors if var in f.vars]
        factors = [f for f in factors if var not in f.vars]
        if not related:
            continue
        prod = related[0]
        for f in related[1:]:
            prod = _factor_product(prod, f)
        factors.append(_factor_marginalize(prod, var))

    result = _Factor((), np.array(1.0))
    for f in factors:
        result = _factor_product(result, f)
    assert result.vars == (target,), f"unexpected residual scope {result.vars}"
    return result.array


def infer_posterior(net: BayesNet, evidence: dict[str, str], target: str) -> Posterior:
    """Exact P(target | evidence) by variable elimination.

    Unobserved non-target fields are marginalized out, so any evidence
    subset is accepted. Evidence with zero probability under the net
    falls back to the target's prior, flagged on the result.
    """
    if target not in net.dag.nodes:
        raise ValueError(f"unknown target {target!r}")
    if target in evidence:
        raise ValueError(f"target {target!r} cannot also be evidence")
    codes = {}
    for var, value in evidence.items():
        if var not in net.dag.nodes:
            raise ValueError(f"unknown evidence field {var!r}")
        try:
            codes[var] = net.universes[var].index(value)
        except ValueError:
            raise ValueError(f"evidence value {value!r} not in universe of {var!r}") from None

    vec = _eliminate(net, codes, target)
    total = float(vec.sum())
    values = list(net.universes[target])
    if total <= 0.0:
        prior = _eliminate(net, {}, target)
        prior = prior / prior.sum()
        return Posterior(values=values, probs=[float(p) for p in prior], zero_evidence=True)
    return Posterior(values=values, probs=[float(p) for p in vec / total])
