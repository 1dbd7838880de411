"""Canonical JSON reports.

Exact rationals serialize as "p/q" strings, keys are sorted, and floats are
refused, so that equal reports are equal byte strings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__

# exit-code contract
EXIT_OK = 0
EXIT_SCHEMA = 2  # malformed input, including argument errors
EXIT_BUDGET = 3  # enumeration budget or precision window exhausted
EXIT_CERTIFICATE = 4  # a requested certificate or identity check failed

EXIT_CODES = {
    EXIT_OK: "all requested certificates pass",
    EXIT_SCHEMA: "schema violation or invalid configuration",
    EXIT_BUDGET: "budget exhausted or N-stability not reached",
    EXIT_CERTIFICATE: "certificate failure",
}


def plain(obj):
    """Recursively convert to JSON-ready values without floats."""
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return sorted((plain(v) for v in obj), key=lambda v: json.dumps(v, sort_keys=True))
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, np.ndarray):
        return plain(obj.tolist())
    if hasattr(obj, "to_json"):
        return plain(obj.to_json())
    raise TypeError(f"cannot serialize {type(obj).__name__} exactly")


def canonical_json(obj) -> str:
    return json.dumps(plain(obj), sort_keys=True, ensure_ascii=True, indent=1, separators=(",", ": ")) + "\n"


def collect_passes(obj) -> list[bool]:
    """Every "pass" flag anywhere in a result tree."""
    out = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if k == "pass" and isinstance(v, (bool, np.bool_)):
                out.append(bool(v))
            else:
                out.extend(collect_passes(v))
    elif isinstance(obj, (list, tuple)):
        for v in obj:
            out.extend(collect_passes(v))
    return out


@dataclass
class Report:
    subcommand: str
    inputs: dict
    results: dict
    timing: dict | None = None
    versions: dict = field(default_factory=lambda: {"asfgerms": __version__})

    @property
    def passed(self) -> bool:
        return all(collect_passes(self.results))

    def to_json(self) -> dict:
        out = {
            "subcommand": self.subcommand,
            "inputs": self.inputs,
            "results": self.results,
            "certificates": {"all_pass": self.passed, "checked": len(collect_passes(self.results))},
            "versions": self.versions,
        }
        if self.timing is not None:
            out["timing"] = self.timing
        return out

    def dumps(self) -> str:
        return canonical_json(self.to_json())
