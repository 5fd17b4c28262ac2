"""Synthetic form-submission generator with planted field dependencies.

Rows come from a few latent groups: two root fields reflect the group,
and chains of dependent categorical fields follow noisy value maps, so
learned dependencies (not marginal frequency) are what predicts well.
Used by the benchmark tests and handy for demos.
"""
from __future__ import annotations

import numpy as np

from .schema import Dataset, FieldSchema, FormSchema, InputInstance


def _values(prefix: str, n: int) -> list[str]:
    return [f"{prefix}{i:02d}" for i in range(n)]


def make_synthetic(
    seed: int = 0,
    n_instances: int = 20_000,
    n_groups: int = 3,
    noise: float = 0.1,
    root_focus: float = 0.9,
    missing_rate: float = 0.03,
) -> Dataset:
    """A 10-field form: 9 categorical fields (12-15 values each) plus one
    free-text note column that preprocessing should discard."""
    rng = np.random.default_rng(seed)

    chains = [
        # (field, n values, parent field or None)
        ("region", 12, None),
        ("division", 12, None),
        ("category", 12, None),
        ("product", 15, "category"),
        ("material", 12, "product"),
        ("channel", 12, "division"),
        ("support_tier", 12, "channel"),
        ("warranty", 12, "material"),
        ("freight", 12, "support_tier"),
    ]
    domains = {name: _values(name[:3] + "_", n) for name, n, _ in chains}

    # Deterministic value maps parent-value -> child-value, seeded.
    value_maps: dict[str, list[int]] = {}
    for name, n, parent in chains:
        if parent is not None:
            parent_n = len(domains[parent])
            value_maps[name] = rng.integers(0, n, size=parent_n).tolist()

    fields = [
        FieldSchema(name=name, kind="categorical", candidates=tuple(domains[name]),
                    mandatory=False, tab_index=i)
        for i, (name, _, _) in enumerate(chains)
    ]
    fields.append(FieldSchema(name="note", kind="textual", mandatory=False,
                              tab_index=len(chains)))
    schema = FormSchema(name="synthetic", fields=tuple(fields))

    groups = rng.integers(0, n_groups, size=n_instances)
    codes: dict[str, np.ndarray] = {}
    for name, n, parent in chains:
        noisy = rng.random(n_instances) < noise
        random_vals = rng.integers(0, n, size=n_instances)
        if parent is None:
            # group-driven roots: each group owns a small slice of the domain,
            # concentrated on the slice's first value so the conditional mass
            # of the top value stays high
            per_group = n // n_groups
            offsets = np.where(
                rng.random(n_instances) < root_focus,
                0,
                rng.integers(0, per_group, size=n_instances),
            )
            planted = groups * per_group + offsets
        else:
            vmap = np.array(value_maps[name])
            planted = vmap[codes[parent]]
        codes[name] = np.where(noisy, random_vals, planted)

    drop = rng.random((n_instances, len(chains))) < missing_rate
    instances = []
    for i in range(n_instances):
        values: dict[str, str | None] = {}
        for j, (name, _, _) in enumerate(chains):
            values[name] = None if drop[i, j] else domains[name][codes[name][i]]
        values["note"] = f"free text note {i}"
        instances.append(InputInstance(values=values, submitted_at=20_200_101_000_000 + i))
    return Dataset(schema=schema, instances=instances)
