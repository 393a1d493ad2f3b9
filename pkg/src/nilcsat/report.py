"""Machine-readable run reports: one canonical JSON document per run."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import __version__


@dataclass
class RunReport:
    command: list
    config: dict
    result: dict
    version: str = __version__
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "command": list(self.command),
            "config": self.config,
            "result": self.result,
            "version": self.version,
        }
        if self.extra:
            out["extra"] = self.extra
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "RunReport":
        return cls(d["command"], d["config"], d["result"], d["version"], d.get("extra", {}))

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls.from_dict(json.loads(text))


def answer_dict(answer, algebra) -> dict:
    """A SolverAnswer as plain data, elements as digit strings."""
    out = {
        "status": answer.status.value,
        "witness": None
        if answer.witness is None
        else [algebra.format_element(e) for e in answer.witness],
        "stats": {
            "candidates_checked": answer.stats.candidates_checked,
            "trials": answer.stats.trials,
            "gate_evals": answer.stats.gate_evals,
            "elapsed": round(answer.stats.elapsed, 6),
        },
    }
    out.update(answer.info)
    return out
