"""Machine-readable verification reports."""

from __future__ import annotations

import json
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Optional

SCHEMA_VERSION = 1
STATUSES = ("pass", "fail", "error", "info")


@dataclass
class Entry:
    name: str
    params: dict
    status: str = "pass"
    witness: Optional[str] = None
    millis: Optional[int] = None
    data: dict = field(default_factory=dict)

    def fail(self, witness):
        """Record the first failure; later witnesses are ignored."""
        if self.status == "pass":
            self.status = "fail"
            self.witness = witness

    @property
    def ok(self):
        return self.status in ("pass", "info")

    def to_json(self, timing=False):
        out = {
            "name": self.name,
            "params": _jsonable(self.params),
            "status": self.status,
        }
        if self.witness is not None:
            out["witness"] = self.witness
        if self.data:
            out["data"] = _jsonable(self.data)
        out["millis"] = self.millis if timing else None
        return out


@contextmanager
def timed(entry):
    t0 = time.perf_counter()
    try:
        yield entry
    finally:
        entry.millis = int(round((time.perf_counter() - t0) * 1000))


@dataclass
class Report:
    suite: str
    config: dict
    entries: list = field(default_factory=list)

    @property
    def ok(self):
        return all(e.ok for e in self.entries)

    def sorted_entries(self):
        return sorted(
            self.entries,
            key=lambda e: (e.name, json.dumps(_jsonable(e.params), sort_keys=True)),
        )

    @classmethod
    def from_json(cls, doc):
        """Rebuild a report from its JSON form (as written by :func:`emit_report`)."""
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {doc.get('schema_version')!r}")
        entries = [
            Entry(e["name"], e.get("params", {}), e["status"], e.get("witness"), e.get("millis"), e.get("data", {}))
            for e in doc.get("entries", [])
        ]
        return cls(doc["suite"], doc.get("config", {}), entries)

    def to_json(self, timing=False):
        return {
            "schema_version": SCHEMA_VERSION,
            "suite": self.suite,
            "config": _jsonable(self.config),
            "entries": [e.to_json(timing) for e in self.sorted_entries()],
        }


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (str, int, float, bool)) or x is None:
        return x
    return str(x)


def emit_report(report, fmt="json", timing=False):
    """Render a report as canonical JSON or as plain text."""
    if fmt == "json":
        return json.dumps(report.to_json(timing), sort_keys=True, indent=2) + "\n"
    lines = [f"suite: {report.suite}"]
    cfg = ", ".join(f"{k}={v}" for k, v in sorted(_jsonable(report.config).items()))
    lines.append(f"config: {cfg}")
    for e in report.sorted_entries():
        params = ", ".join(f"{k}={v}" for k, v in sorted(_jsonable(e.params).items()))
        line = f"[{e.status.upper():5}] {e.name} ({params})"
        if timing and e.millis is not None:
            line += f"  {e.millis} ms"
        lines.append(line)
        for k, v in sorted(_jsonable(e.data).items()):
            lines.append(f"        {k}: {v}")
        if e.witness:
            lines.append(f"        witness: {e.witness}")
    n_fail = sum(1 for e in report.entries if not e.ok)
    lines.append(f"{len(report.entries) - n_fail}/{len(report.entries)} passed")
    return "\n".join(lines) + "\n"
