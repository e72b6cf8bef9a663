"""Machine-readable verification reports."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

SCHEMA_VERSION = 1


@dataclass
class Case:
    name: str
    max_residual: float
    bound: float

    @property
    def passed(self) -> bool:
        return bool(self.max_residual <= self.bound)

    def as_dict(self) -> dict:
        return {"name": self.name, "max_residual": self.max_residual, "bound": self.bound, "pass": self.passed}


@dataclass
class Report:
    suite: str
    space: str
    n: int
    epsilon: float | None = None
    params: dict = field(default_factory=dict)
    cases: list[Case] = field(default_factory=list)
    values: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def add(self, name: str, residual: float, bound: float) -> Case:
        case = Case(name, float(residual), float(bound))
        self.cases.append(case)
        return case

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    def failures(self) -> list[Case]:
        return [c for c in self.cases if not c.passed]

    def as_dict(self, timing: bool = True) -> dict:
        d = {
            "schema_version": SCHEMA_VERSION,
            "suite": self.suite,
            "space": self.space,
            "n": self.n,
            "epsilon": self.epsilon,
            "params": self.params,
            "cases": [c.as_dict() for c in self.cases],
            "values": self.values,
            "pass": self.passed,
        }
        if timing:
            d["wall_time"] = self.wall_time
        return d

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.as_dict(timing), sort_keys=True, indent=2)

    def to_text(self) -> str:
        head = f"{self.suite} [{self.space}, n={self.n}]"
        lines = [head]
        for c in self.cases:
            flag = "pass" if c.passed else "FAIL"
            lines.append(f"  {flag}  {c.name}: {c.max_residual:.3e} (bound {c.bound:.1e})")
        for k, v in sorted(self.values.items()):
            lines.append(f"  value {k} = {v!r}")
        lines.append(f"  overall: {'pass' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def merge(suite: str, reports: list[Report]) -> Report:
    """Concatenate several reports, prefixing case names with their space and n."""
    out = Report(suite, ",".join(sorted({r.space for r in reports})), max(r.n for r in reports),
                 reports[0].epsilon if reports else None)
    for r in reports:
        for c in r.cases:
            out.add(f"{r.space}(n={r.n}).{c.name}", c.max_residual, c.bound)
        for k, v in r.values.items():
            out.values[f"{r.space}(n={r.n}).{k}"] = v
        out.wall_time += r.wall_time
    return out
