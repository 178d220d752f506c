"""Report rows and their CSV / JSON serialization."""

from __future__ import annotations

import csv
import datetime as _dt
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

CSV_COLUMNS = ("experiment", "method", "measure", "L", "l", "region", "mu_over_t", "seed", "value", "warnings")
METHODS = ("overlap", "fock", "greens", "asymptotic")


@dataclass(frozen=True)
class ReportRow:
    experiment: str
    method: str
    measure: str
    value: float
    L: int | None = None
    l: int | None = None
    region: str = ""
    mu_over_t: float | None = None
    seed: int | None = None
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not math.isfinite(self.value):
            raise ValueError(f"non-finite value in report row {self}")
        object.__setattr__(self, "warnings", tuple(self.warnings))


@dataclass
class EntanglementReport:
    experiment: str
    config: dict[str, Any] = field(default_factory=dict)
    rows: list[ReportRow] = field(default_factory=list)

    def add(self, **kw) -> None:
        self.rows.append(ReportRow(experiment=self.experiment, **kw))

    def select(self, **match) -> list[ReportRow]:
        return [r for r in self.rows if all(getattr(r, k) == v for k, v in match.items())]

    def values(self, **match) -> list[float]:
        return [r.value for r in self.select(**match)]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.17g}"
    if isinstance(v, tuple):
        return ";".join(v)
    return str(v)


def report_csv(rep: EntanglementReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rep.rows:
        writer.writerow([_fmt(getattr(row, c)) for c in CSV_COLUMNS])
    return buf.getvalue()


def report_json(rep: EntanglementReport, version: str, timestamp: str | None = None) -> str:
    if timestamp is None:
        timestamp = _dt.datetime.now(_dt.timezone.utc).isoformat()
    rows = []
    for row in rep.rows:
        d = asdict(row)
        d["warnings"] = list(row.warnings)
        rows.append(d)
    header = {"experiment": rep.experiment, "config": rep.config, "version": version, "timestamp": timestamp}
    # json writes floats with repr(), the shortest string that round-trips exactly
    return json.dumps({"header": header, "rows": rows}, indent=1)


def emit_report(rep: EntanglementReport, fmt: str, path: str | Path | None, version: str) -> str:
    """Serialize ``rep`` and write it to ``path`` (``None`` or ``-``: return only)."""
    if fmt == "csv":
        text = report_csv(rep)
    elif fmt == "json":
        text = report_json(rep, version)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    if path not in (None, "-"):
        try:
            Path(path).write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write report to {path}: {exc}") from exc
    return text


def load_json_report(text: str) -> EntanglementReport:
    data = json.loads(text)
    rep = EntanglementReport(data["header"]["experiment"], data["header"]["config"])
    for d in data["rows"]:
        d = dict(d)
        d["warnings"] = tuple(d["warnings"])
        rep.rows.append(ReportRow(**d))
    return rep
