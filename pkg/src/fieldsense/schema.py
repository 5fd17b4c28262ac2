"""Form/data model and loaders for historical form submissions.

A form is an ordered list of typed fields; a submission is one mapping
from field name to value (or EMPTY) plus a sortable timestamp. Loaders
validate against the schema, normalize empty markers, and keep the
instances time-ordered.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DataError, SchemaError

# Sentinel for an empty/unfilled cell. Never a legal candidate value.
EMPTY = None

FIELD_KINDS = ("categorical", "numerical", "textual", "file")

DEFAULT_EMPTY_MARKERS = (
    "", "n/a", "na", "null", "none", "missing", "not applicable",
)

DEFAULT_TIMESTAMP_COLUMN = "submission_time"


@dataclass(frozen=True)
class FieldSchema:
    """One form field: identifier, kind, candidate domain and tab position."""

    name: str
    kind: str
    candidates: tuple[str, ...] = ()
    mandatory: bool = False
    tab_index: int = 0

    def __post_init__(self):
        if self.kind not in FIELD_KINDS:
            raise SchemaError(
                f"field {self.name!r}: unknown kind {self.kind!r} "
                f"(expected one of {', '.join(FIELD_KINDS)})"
            )
        if self.kind == "categorical":
            if not self.candidates:
                raise SchemaError(
                    f"field {self.name!r}: categorical field with empty candidate list"
                )
            if len(set(self.candidates)) != len(self.candidates):
                raise SchemaError(f"field {self.name!r}: duplicate candidate values")
        elif self.candidates:
            raise SchemaError(
                f"field {self.name!r}: candidates only allowed on categorical fields"
            )
        if self.tab_index < 0:
            raise SchemaError(f"field {self.name!r}: negative tab_index")


@dataclass(frozen=True)
class FormSchema:
    """A named form: ordered fields with unique names and a tab-order permutation."""

    name: str
    fields: tuple[FieldSchema, ...]

    def __post_init__(self):
        if not self.fields:
            raise SchemaError(f"form {self.name!r}: empty schema")
        names = [f.name for f in self.fields]
        seen = set()
        for n in names:
            if n in seen:
                raise SchemaError(f"form {self.name!r}: duplicate field name {n!r}")
            seen.add(n)
        tabs = sorted(f.tab_index for f in self.fields)
        if tabs != list(range(len(self.fields))):
            raise SchemaError(
                f"form {self.name!r}: tab_index values must be a permutation of "
                f"0..{len(self.fields) - 1}, got {tabs}"
            )

    def field(self, name: str) -> FieldSchema:
        for f in self.fields:
            if f.name == name:
                return f
        raise SchemaError(f"form {self.name!r}: unknown field {name!r}")

    @property
    def field_names(self) -> list[str]:
        return [f.name for f in self.fields]

    def fields_by_tab(self) -> list[FieldSchema]:
        """Fields in default filling order (ascending tab_index)."""
        return sorted(self.fields, key=lambda f: f.tab_index)

    def categorical_fields(self) -> list[FieldSchema]:
        return [f for f in self.fields_by_tab() if f.kind == "categorical"]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "fields": [
                {
                    "name": f.name,
                    "kind": f.kind,
                    **({"candidates": list(f.candidates)} if f.kind == "categorical" else {}),
                    "mandatory": f.mandatory,
                    "tab_index": f.tab_index,
                }
                for f in self.fields
            ],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "FormSchema":
        if not isinstance(doc, dict) or "fields" not in doc:
            raise SchemaError("schema document must be an object with a 'fields' list")
        fields = []
        for i, entry in enumerate(doc["fields"]):
            try:
                fields.append(
                    FieldSchema(
                        name=str(entry["name"]),
                        kind=str(entry["kind"]),
                        candidates=tuple(entry.get("candidates", ()) or ()),
                        mandatory=bool(entry.get("mandatory", False)),
                        tab_index=int(entry.get("tab_index", i)),
                    )
                )
            except KeyError as exc:
                raise SchemaError(f"fields[{i}]: missing key {exc}") from exc
        return cls(name=str(doc.get("name", "form")), fields=tuple(fields))


@dataclass(frozen=True)
class InputInstance:
    """One submitted form: field→value pairs plus a sortable timestamp.

    The timestamp orders and splits instances; it is never a model feature.
    """

    values: dict[str, str | None]
    submitted_at: int


@dataclass
class LoadReport:
    """Diagnostics from load_dataset: counts only, never value rewrites."""

    rows: int = 0
    empty_cells: int = 0
    out_of_vocabulary: dict[str, int] = field(default_factory=dict)


@dataclass
class Dataset:
    """A schema plus its historical instances, sorted by submission time."""

    schema: FormSchema
    instances: list[InputInstance]
    report: LoadReport = field(default_factory=LoadReport)

    def __len__(self) -> int:
        return len(self.instances)


def load_schema(path: str | Path) -> FormSchema:
    """Load and validate a form schema document (JSON key/value tree)."""
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"schema file not found: {path}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: parse error at line {exc.lineno}: {exc.msg}") from exc
    return FormSchema.from_dict(doc)


def load_dataset(
    schema: FormSchema,
    path: str | Path,
    empty_markers: tuple[str, ...] = DEFAULT_EMPTY_MARKERS,
    timestamp_column: str = DEFAULT_TIMESTAMP_COLUMN,
) -> Dataset:
    """Load a delimited historical-data table into a time-ordered Dataset.

    Cells matching an empty marker (case-insensitive, trimmed) become EMPTY.
    Header names must map onto schema field names plus the timestamp column.
    Values are never rewritten beyond trimming and empty-marker normalization;
    out-of-vocabulary categorical values are counted in the load report.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"data file not found: {path}")
    markers = {m.strip().lower() for m in empty_markers}
    known = set(schema.field_names)
    candidate_sets = {
        f.name: set(f.candidates) for f in schema.fields if f.kind == "categorical"
    }

    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file (no header row)") from None
        header = [h.strip() for h in header]
        if timestamp_column not in header:
            raise DataError(f"{path}: missing timestamp column {timestamp_column!r}")
        for col in header:
            if col != timestamp_column and col not in known:
                raise DataError(f"{path}: header column {col!r} is not a schema field")
        ts_idx = header.index(timestamp_column)

        report = LoadReport()
        instances = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise DataError(
                    f"{path}:{lineno}: expected {len(header)} cells, got {len(row)}"
                )
            raw_ts = row[ts_idx].strip()
            try:
                ts = int(raw_ts)
            except ValueError:
                raise DataError(
                    f"{path}:{lineno}: timestamp {raw_ts!r} is not an integer"
                ) from None
            values: dict[str, str | None] = {name: EMPTY for name in schema.field_names}
            for col, cell in zip(header, row):
                if col == timestamp_column:
                    continue
                cell = cell.strip()
                if cell.lower() in markers:
                    values[col] = EMPTY
                    report.empty_cells += 1
                else:
                    values[col] = cell
                    cands = candidate_sets.get(col)
                    if cands is not None and cell not in cands:
                        report.out_of_vocabulary[col] = (
                            report.out_of_vocabulary.get(col, 0) + 1
                        )
            instances.append(InputInstance(values=values, submitted_at=ts))

    report.rows = len(instances)
    instances.sort(key=lambda inst: inst.submitted_at)
    return Dataset(schema=schema, instances=instances, report=report)
