"""Verdicts returned by law checkers and the exceptions raised by constructions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any


@dataclass(frozen=True)
class Verdict:
    """Outcome of a law check.

    A failing verdict names the first violated law and carries the tuple of
    elements (points, opens, table indices) that violates it.
    """

    ok: bool
    law: str | None = None
    witness: tuple = ()
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        if self.ok:
            return "pass" + (f" ({self.detail})" if self.detail else "")
        text = f"fail [{self.law}] witness={self.witness!r}"
        return text + (f": {self.detail}" if self.detail else "")


PASS = Verdict(True)


def fail(law: str, *witness: Any, detail: str = "") -> Verdict:
    return Verdict(False, law, tuple(witness), detail)


class KitError(Exception):
    """Base class for every error raised by the toolkit."""

    def __init__(self, message: str, witness: Any = None):
        super().__init__(message)
        self.witness = witness


class TopologyError(KitError, ValueError):
    pass


class ContinuityError(KitError, ValueError):
    pass


class NotALattice(KitError, ValueError):
    pass


class NotDistributive(KitError, ValueError):
    pass


class NotJoinPreserving(KitError, ValueError):
    pass


class OpennessViolation(KitError, ValueError):
    pass


class OracleBound(KitError):
    pass


class NotAFrameHom(KitError):
    pass


class NoPointRealization(KitError):
    pass


class NotOpen(KitError):
    """Raised by ``open_qlocale`` when the recovered projection is not open."""


class NotEtale(KitError, ValueError):
    pass


class ConsistencyError(KitError, AssertionError):
    """Two independent routes to the same fact disagreed."""
