"""Comparison algorithms: frequency ranking, association-rule matching,
and first-letter search.

All operate on raw historical rows (EMPTY cells excluded) and return
ranked value lists with deterministic tie-breaks.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import combinations

from .preprocess import UNKNOWN
from .schema import EMPTY

Item = tuple[str, str]


def _row_items(row: dict) -> set[Item]:
    return {
        (f, str(v)) for f, v in row.items()
        if v is not EMPTY and str(v) != UNKNOWN
    }


def mfm_suggest(rows: list[dict], target: str, n_r: int | None = None) -> list[str]:
    """Values of `target` ranked by training frequency (ties alphabetical)."""
    counts = Counter(
        str(v) for row in rows
        for f, v in row.items()
        if f == target and v is not EMPTY and str(v) != UNKNOWN
    )
    ranked = sorted(counts, key=lambda v: (-counts[v], v))
    return ranked if n_r is None else ranked[:n_r]


@dataclass(frozen=True)
class AssociationRule:
    antecedent: frozenset[Item]
    consequent: Item
    support: int
    confidence: float

    def __post_init__(self):
        fields = {f for f, _ in self.antecedent}
        if len(fields) != len(self.antecedent) or self.consequent[0] in fields:
            raise ValueError("antecedent fields must be distinct and exclude the consequent")


def _frequent_itemsets(
    transactions: list[set[Item]], min_support: int, max_size: int
) -> dict[frozenset[Item], int]:
    counts: Counter = Counter()
    for t in transactions:
        for item in t:
            counts[frozenset([item])] += 1
    current = {s: c for s, c in counts.items() if c >= min_support}
    frequent = dict(current)
    size = 1
    while current and size < max_size:
        size += 1
        # join step: unite frequent (size-1)-sets that differ by one item,
        # skipping candidates with two items from the same field
        singles = sorted({item for s in current for item in s})
        candidates = set()
        for s in current:
            fields = {f for f, _ in s}
            for item in singles:
                if item in s or item[0] in fields:
                    continue
                cand = s | {item}
                if all(frozenset(sub) in current for sub in combinations(cand, size - 1)):
                    candidates.add(frozenset(cand))
        tally: Counter = Counter()
        for t in transactions:
            for cand in candidates:
                if cand <= t:
                    tally[cand] += 1
        current = {s: c for s, c in tally.items() if c >= min_support}
        frequent.update(current)
    return frequent


def arm_train(
    rows: list[dict],
    min_support: int = 5,
    min_confidence: float = 0.3,
    max_antecedent: int = 3,
) -> list[AssociationRule]:
    """Apriori rule mining over (field, value) items.

    Emits every rule with a single-item consequent whose support and
    confidence meet the thresholds; antecedents are capped at
    `max_antecedent` items to keep training tractable.
    """
    if not rows:
        raise ValueError("cannot mine rules from an empty table")
    transactions = [_row_items(r) for r in rows]
    frequent = _frequent_itemsets(transactions, min_support, max_antecedent + 1)
    rules = []
    for itemset, support in frequent.items():
        if len(itemset) < 2:
            continue
        for consequent in itemset:
            antecedent = frozenset(itemset - {consequent})
            confidence = support / frequent[antecedent]
            if confidence >= min_confidence:
                rules.append(
                    AssociationRule(
                        antecedent=antecedent,
                        consequent=consequent,
                        support=support,
                        confidence=confidence,
                    )
                )
    rules.sort(key=lambda r: (-r.confidence, -r.support, sorted(r.antecedent), r.consequent))
    return rules


def arm_suggest(
    rules: list[AssociationRule],
    filled: dict,
    target: str,
    n_r: int | None = None,
) -> list[str]:
    """Consequent values of rules matching the filled fields, ranked by
    each value's best (confidence, support) rule."""
    filled_items = _row_items(filled)
    best: dict[str, tuple[float, int]] = {}
    for rule in rules:
        if rule.consequent[0] != target:
            continue
        if not rule.antecedent <= filled_items:
            continue
        value = rule.consequent[1]
        key = (rule.confidence, rule.support)
        if value not in best or key > best[value]:
            best[value] = key
    ranked = sorted(best, key=lambda v: (-best[v][0], -best[v][1], v))
    return ranked if n_r is None else ranked[:n_r]


def fls_suggest(candidates: list[str], first_letter: str) -> list[str]:
    """Alphabetical candidates narrowed to those starting with the letter."""
    if not first_letter:
        return sorted(candidates)
    letter = first_letter[0].casefold()
    return [c for c in sorted(candidates) if c and c[0].casefold() == letter]
