"""Reader for the covertjam CSV report contract.

Deliberately independent of the simulation package: the wire format ('#'
metadata lines, a header row, typed columns per report kind) is the only
coupling, so either side can be rebuilt against the documented schema.
"""

import csv
from dataclasses import dataclass, field

SCHEMAS = {
    "fig3": {
        "sigma": float,
        "null_space_mean": float,
        "null_space_stderr": float,
        "full_space_mean": float,
        "full_space_stderr": float,
        "n_draws": int,
    },
    "fig4": {
        "sigma": float,
        "scheme": str,
        "mean": float,
        "stderr": float,
        "n_draws": int,
        "N": int,
        "M": int,
    },
    "optimize": {
        "record": str,
        "label": str,
        "i": int,
        "j": int,
        "re": float,
        "im": float,
    },
}


class SchemaError(ValueError):
    """The CSV does not match the declared report schema."""


@dataclass
class Report:
    kind: str
    metadata: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)


def read_report(path, expected_kind=None) -> Report:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    metadata = {}
    body = 0
    for i, line in enumerate(lines):
        if not line.startswith("#"):
            body = i
            break
        key, _, value = line[1:].strip().partition("=")
        metadata[key.strip()] = value
    else:
        raise SchemaError(f"{path}: no header row found")
    kind = metadata.pop("kind", None)
    if kind not in SCHEMAS:
        raise SchemaError(f"{path}: missing or unsupported kind {kind!r}")
    if expected_kind is not None and kind != expected_kind:
        raise SchemaError(f"{path}: kind is {kind!r}, expected {expected_kind!r}")
    schema = SCHEMAS[kind]
    reader = csv.reader(lines[body:])
    header = next(reader, None)
    if header != list(schema):
        raise SchemaError(f"{path}: header {header} does not match the {kind} schema")
    types = list(schema.values())
    rows = []
    for row in reader:
        if not row:
            continue
        if len(row) != len(types):
            raise SchemaError(f"{path}: row {row} has {len(row)} cells, expected {len(types)}")
        try:
            rows.append(tuple(t(v) for t, v in zip(types, row)))
        except ValueError as exc:
            raise SchemaError(f"{path}: cannot parse row {row}: {exc}") from exc
    if not rows:
        raise SchemaError(f"{path}: report has no data rows")
    return Report(kind=kind, metadata=metadata, rows=rows)
