"""Column-oriented discrete table shared by training components."""
from __future__ import annotations

from dataclasses import dataclass


@dataclass
class DiscreteTable:
    """Fully discrete training table: ordered columns of equal length."""

    fields: list[str]
    columns: dict[str, list[str]]

    def __post_init__(self):
        lengths = {len(self.columns[f]) for f in self.fields}
        if len(lengths) > 1:
            raise ValueError(f"ragged columns: lengths {sorted(lengths)}")

    @property
    def n_rows(self) -> int:
        return len(self.columns[self.fields[0]]) if self.fields else 0

    def row(self, i: int) -> dict[str, str]:
        return {f: self.columns[f][i] for f in self.fields}

    def rows(self) -> list[dict[str, str]]:
        return [self.row(i) for i in range(self.n_rows)]

    def project(self, fields: list[str]) -> "DiscreteTable":
        return DiscreteTable(
            fields=list(fields), columns={f: self.columns[f] for f in fields}
        )

    def select(self, indices: list[int]) -> "DiscreteTable":
        return DiscreteTable(
            fields=list(self.fields),
            columns={f: [self.columns[f][i] for i in indices] for f in self.fields},
        )

    @classmethod
    def from_rows(cls, fields: list[str], rows: list[dict[str, str]]) -> "DiscreteTable":
        return cls(
            fields=list(fields),
            columns={f: [r[f] for r in rows] for f in fields},
        )
