"""CSV report container and its wire format.

Every report is UTF-8 CSV with '#'-prefixed key=value metadata lines (config
echo, seed, version) ahead of the header row. Floats are written with repr so
parse(emit(report)) reproduces the report exactly; emission is deterministic
(no timestamps), so identical configs give byte-identical files.
"""

import csv
import io
from dataclasses import dataclass, field

import numpy as np

# column name -> type, per report kind
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
    "psi-check": {
        "d": int,
        "n_samples": int,
        "ks_stat": float,
        "critical": float,
        "pass": int,
    },
    "covert-check": {
        "epsilon": float,
        "channel_idx": int,
        "error_sum": float,
        "stderr": float,
        "pass": int,
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


@dataclass
class RunReport:
    """One experiment's rows plus the metadata that reproduces them."""

    kind: str
    metadata: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in SCHEMAS:
            raise ValueError(f"unknown report kind {self.kind!r}")

    @property
    def columns(self):
        return list(SCHEMAS[self.kind])


def _cell(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def emit_csv(report: RunReport, path=None) -> str:
    """Serialize a report; also writes it to path when given."""
    buf = io.StringIO()
    buf.write(f"# kind={report.kind}\n")
    for key, value in report.metadata.items():
        if "=" in str(key) or "\n" in str(value):
            raise ValueError(f"metadata entry {key!r} not representable")
        buf.write(f"# {key}={value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(report.columns)
    schema = SCHEMAS[report.kind]
    for row in report.rows:
        if len(row) != len(schema):
            raise ValueError(f"row {row!r} does not match schema {list(schema)}")
        writer.writerow([_cell(v) for v in row])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


def parse_csv(source) -> RunReport:
    """Inverse of emit_csv; source is a path or CSV text."""
    text = source
    if "\n" not in str(source):
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    metadata = {}
    lines = text.splitlines()
    body_start = 0
    for i, line in enumerate(lines):
        if not line.startswith("#"):
            body_start = i
            break
        key, _, value = line[1:].strip().partition("=")
        metadata[key.strip()] = value
    else:
        raise ValueError("no header row found")
    kind = metadata.pop("kind", None)
    if kind not in SCHEMAS:
        raise ValueError(f"missing or unknown kind in metadata: {kind!r}")
    reader = csv.reader(lines[body_start:])
    header = next(reader)
    schema = SCHEMAS[kind]
    if header != list(schema):
        raise ValueError(f"header {header} does not match the {kind} schema")
    types = list(schema.values())
    rows = [tuple(t(v) for t, v in zip(types, row)) for row in reader if row]
    return RunReport(kind=kind, metadata=metadata, rows=rows)
