"""Verification report containers shared across the checking suites."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Check:
    """A single verified inequality or identity."""

    label: str
    ok: bool
    lhs: object = None
    rhs: object = None
    note: str = ""

    def __str__(self):
        status = "ok" if self.ok else "VIOLATION"
        body = f"{self.label}: {status}"
        if self.lhs is not None or self.rhs is not None:
            body += f" (lhs={self.lhs!r}, rhs={self.rhs!r})"
        if self.note:
            body += f" [{self.note}]"
        return body


@dataclass
class CheckReport:
    """Accumulates check instances per labelled family.

    Passing instances are always counted; the Check objects themselves are
    stored only for violations unless ``keep_passing`` is set (useful for
    small reports where the computed values are the point).
    """

    title: str
    keep_passing: bool = False
    counts: Counter = field(default_factory=Counter)
    checks: list = field(default_factory=list)

    def add(self, label, ok, lhs=None, rhs=None, note=""):
        self.counts[label] += 1
        if not ok or self.keep_passing:
            self.checks.append(Check(label, ok, lhs, rhs, note))
        return ok

    @property
    def violations(self):
        return [c for c in self.checks if not c.ok]

    @property
    def ok(self):
        return not self.violations

    @property
    def instances(self):
        return sum(self.counts.values())

    def to_dict(self):
        return {
            "title": self.title,
            "ok": self.ok,
            "instances": dict(self.counts),
            "violations": [
                {"label": c.label, "lhs": repr(c.lhs), "rhs": repr(c.rhs), "note": c.note}
                for c in self.violations
            ],
        }

    def summary(self):
        lines = [f"[{'PASS' if self.ok else 'FAIL'}] {self.title}: "
                 f"{self.instances} instances, {len(self.violations)} violations"]
        for c in self.violations:
            lines.append("  " + str(c))
        return "\n".join(lines)
