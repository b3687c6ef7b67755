"""Pass/fail check reports shared by the verification entry points."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class CheckReport:
    name: str
    passed: bool
    p: int | None = None
    parameters: dict[str, Any] = field(default_factory=dict)
    counterexamples: list[Any] = field(default_factory=list)

    def to_obj(self) -> dict[str, Any]:
        return {
            "check": self.name,
            "p": self.p,
            "parameters": dict(self.parameters),
            "pass": self.passed,
            "counterexamples": list(self.counterexamples),
        }

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        ptxt = f" p={self.p}" if self.p is not None else ""
        extra = ""
        if self.parameters:
            extra = " " + " ".join(f"{k}={v}" for k, v in sorted(self.parameters.items()))
        ce = ""
        if not self.passed and self.counterexamples:
            ce = f"  counterexample: {self.counterexamples[0]}"
        return f"{tag} {self.name}{ptxt}{extra}{ce}"
