"""Law results, their anchors in the theory, and report rendering."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable

from .errors import Verdict

# Every law a report can carry, mapped to the part of the theory it checks.
# Anchors name the section and the result; they are what ``--format json``
# emits under "anchor".
ANCHORS: dict[str, str] = {
    "groupoid-axioms": "Preliminaries on groupoid actions / groupoid structure maps and axioms",
    "etale": "Preliminaries on groupoid actions / étale groupoids: d a local homeomorphism",
    "glocale-axioms": "Preliminaries on groupoid actions / action axioms",
    "projection-identity": "Preliminaries on groupoid actions / projection of the pullback as multiplication by units",
    "module-of-action": "Preliminaries on groupoid actions / module induced by an action",
    "functor-faithful": "Preliminaries on groupoid actions / inverse images give a faithful functor",
    "lax": "Preliminaries on groupoid actions / lax equivariance of locale maps",
    "quantale-laws": "Actions of étale groupoids / unital involutive quantale of opens",
    "inverse-quantal-frame": "Actions of étale groupoids / inverse quantal frame with base locale",
    "actions-coincide": "Actions of étale groupoids / base action agrees with pullback along p",
    "qlocale-axioms": "Actions of étale groupoids / Q-locale condition",
    "alpha-star": "Actions of étale groupoids / partial-unit formula for the adjoint of the action",
    "mu-star": "Actions of étale groupoids / partial-unit formula for the adjoint of multiplication",
    "tensor": "Actions of étale groupoids / tensor product over the base locale",
    "bijection": "Actions of étale groupoids / strict bijection between actions and Q-locales",
    "cat-iso": "Actions of étale groupoids / isomorphism of G-locales and Q-locales",
    "open-qlocale": "Open maps and sheaves / support of an open Q-locale",
    "support-laws": "Open maps and sheaves / support laws for open Q-locales",
    "quantale-support": "Open maps and sheaves / support of the quantale",
    "sections": "Open maps and sheaves / local sections and étale Q-locales",
    "sheaf-cat-iso": "Open maps and sheaves / G-sheaves, étale Q-locales and Q-sheaves",
    "hom": "Preliminaries on groupoid actions / equivariant maps",
}


@dataclass(frozen=True)
class LawResult:
    law: str
    instance: str
    passed: bool
    witness: tuple = ()
    detail: str = ""

    @property
    def anchor(self) -> str:
        return ANCHORS[self.law]

    def as_dict(self) -> dict:
        return {
            "law": self.law,
            "anchor": self.anchor,
            "instance": self.instance,
            "passed": self.passed,
            "witness": _jsonable(self.witness),
            "detail": self.detail,
        }


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))}
    if isinstance(obj, (frozenset, set)):
        return sorted(_jsonable(v) for v in obj)
    if obj is None or isinstance(obj, (bool, int, float, str)):
        return obj
    return str(obj)


def result(law: str, instance: str, verdict: Verdict | bool, detail: str = "") -> LawResult:
    """Wrap a verdict; the failing sub-law goes into the detail."""
    if isinstance(verdict, Verdict):
        parts = [p for p in (verdict.law, verdict.detail, detail) if p]
        return LawResult(law, instance, verdict.ok, tuple(verdict.witness), ": ".join(parts))
    return LawResult(law, instance, bool(verdict), (), detail)


@dataclass
class Report:
    title: str
    results: list[LawResult] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    wall_time: float = 0.0

    def add(self, r: LawResult) -> LawResult:
        self.results.append(r)
        return r

    def extend(self, rs: Iterable[LawResult]) -> None:
        self.results.extend(rs)

    @property
    def passed(self) -> int:
        return sum(r.passed for r in self.results)

    @property
    def failed(self) -> int:
        return len(self.results) - self.passed

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def summary(self) -> dict:
        per_law: dict[str, list[int]] = {}
        for r in self.results:
            counts = per_law.setdefault(r.law, [0, 0])
            counts[0 if r.passed else 1] += 1
        return {
            "total": len(self.results),
            "passed": self.passed,
            "failed": self.failed,
            "laws": {k: {"passed": v[0], "failed": v[1]} for k, v in sorted(per_law.items())},
        }

    def lines(self, *, failures_only: bool = False) -> list[str]:
        out = [f"# {self.title}"]
        for r in self.results:
            if failures_only and r.passed:
                continue
            line = f"{'PASS' if r.passed else 'FAIL'}  {r.law:<22} {r.instance}"
            if r.detail:
                line += f"  ({r.detail})"
            if not r.passed and r.witness:
                line += f"  witness={_jsonable(r.witness)}"
            out.append(line)
        for n in self.notes:
            out.append(f"note: {n}")
        s = self.summary()
        out.append(f"summary: {s['passed']} passed, {s['failed']} failed, {s['total']} total")
        return out

    def render(self, fmt: str = "text", *, timing: bool = True, failures_only: bool = False) -> str:
        """Human text or JSON lines; both list the same results in the same order."""
        if fmt == "json":
            rows = [json.dumps({"title": self.title}, ensure_ascii=False)]
            rows += [json.dumps(r.as_dict(), sort_keys=True, ensure_ascii=False)
                     for r in self.results if not (failures_only and r.passed)]
            rows += [json.dumps({"note": n}, ensure_ascii=False) for n in self.notes]
            tail = {"summary": self.summary()}
            if timing:
                tail["wall_time"] = round(self.wall_time, 3)
            rows.append(json.dumps(tail, sort_keys=True, ensure_ascii=False))
            return "\n".join(rows) + "\n"
        lines = self.lines(failures_only=failures_only)
        if timing:
            lines.append(f"wall time: {self.wall_time:.2f}s")
        return "\n".join(lines) + "\n"
