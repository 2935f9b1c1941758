"""Brute-force tensor product of modules over a base quantale.

``left ⊗_B right`` is computed as the lattice of subsets ``D`` of
``left × right`` that are down-closed, contain every ``(⊥, x)`` and
``(a, ⊥)``, are closed under joins in each coordinate separately, and are
balanced: ``(a·b, x) ∈ D  iff  (a, b·x) ∈ D`` for ``b`` in the base.  These
are the saturated sets of the congruence on the free sup-lattice of
down-sets, so ordering them by inclusion gives the quotient, and the
closure of ``{(a, x)}`` is the universal balanced bimorphism.

This exists to cross-check the pullback realization on tiny inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Iterable

from .errors import OracleBound
from .order import Frame, bits

DEFAULT_CAP = 8


@dataclass
class Tensor:
    frame: Frame
    left: Frame
    right: Frame
    _pure: dict[tuple[int, int], int]
    _closure: Callable[[int], int]

    def pure(self, a: int, x: int) -> int:
        """Index of ``a ⊗ x`` in :attr:`frame`."""
        return self._pure[a, x]

    def pairs(self, element: int) -> list[tuple[int, int]]:
        """The generating pairs ``(a, x)`` lying under ``element``."""
        n = len(self.right)
        return [divmod(k, n) for k in bits(self.frame.labels[element])]

    def factor(
        self,
        bimorphism: Callable[[int, int], Any],
        join: Callable[[Iterable[Any]], Any],
    ) -> dict[int, Any]:
        """Factor a balanced bimorphism through the universal one.

        Returns the induced map on tensor elements, ``D ↦ ⋁ f(a, x)`` over
        the pairs of ``D``.  Callers check it against ``bimorphism`` on pure
        tensors; a bimorphism that is not bilinear or not balanced fails that
        comparison.
        """
        return {d: join(bimorphism(a, x) for a, x in self.pairs(d)) for d in self.frame}


def tensor_oracle(
    left: Frame,
    right: Frame,
    base: Iterable[Any],
    act_left: Callable[[int, Any], int],
    act_right: Callable[[Any, int], int],
    *,
    cap: int = DEFAULT_CAP,
    max_elements: int = 4096,
) -> Tensor:
    """``left ⊗_B right`` for a right ``B``-action on ``left`` and a left one on ``right``.

    ``act_left(a, b)`` is ``a·b`` in ``left``; ``act_right(b, x)`` is ``b·x``
    in ``right``.  Raises :class:`OracleBound` when a factor has more than
    ``cap`` elements or the quotient grows past ``max_elements``.
    """
    if len(left) > cap or len(right) > cap:
        raise OracleBound(f"tensor factors of sizes {len(left)} and {len(right)} exceed cap {cap}")
    base = list(base)
    nl, nr = len(left), len(right)

    def pid(a: int, x: int) -> int:
        return a * nr + x

    # generators of the closure rules, as (premise mask, conclusion bit)
    down = [0] * (nl * nr)
    for a in left:
        for x in right:
            m = 0
            for a2 in bits(left.below[a]):
                for x2 in bits(right.below[x]):
                    m |= 1 << pid(a2, x2)
            down[pid(a, x)] = m
    always = 0
    for x in right:
        always |= 1 << pid(left.bottom, x)
    for a in left:
        always |= 1 << pid(a, right.bottom)
    joins = []
    for x in right:
        for a in left:
            for a2 in range(a + 1, nl):
                joins.append(((1 << pid(a, x)) | (1 << pid(a2, x)), 1 << pid(left.join(a, a2), x)))
    for a in left:
        for x in right:
            for x2 in range(x + 1, nr):
                joins.append(((1 << pid(a, x)) | (1 << pid(a, x2)), 1 << pid(a, right.join(x, x2))))
    balance = []
    for b in base:
        for a in left:
            for x in right:
                p, q = 1 << pid(act_left(a, b), x), 1 << pid(a, act_right(b, x))
                if p != q:
                    balance.append((p, q))
                    balance.append((q, p))

    def closure(s: int) -> int:
        s |= always
        while True:
            prev = s
            for k in bits(s):
                s |= down[k]
            for prem, concl in joins:
                if s & prem == prem:
                    s |= concl
            for prem, concl in balance:
                if s & prem:
                    s |= concl
            if s == prev:
                return s

    gens = {}
    for a in left:
        for x in right:
            gens[a, x] = closure(1 << pid(a, x))
    elements = {closure(0)}
    frontier = list(elements)
    distinct_gens = set(gens.values())
    while frontier:
        nxt = []
        for d in frontier:
            for g in distinct_gens:
                j = closure(d | g)
                if j not in elements:
                    elements.add(j)
                    nxt.append(j)
                    if len(elements) > max_elements:
                        raise OracleBound(f"tensor closure exceeded {max_elements} elements")
        frontier = nxt
    labels = sorted(elements, key=lambda m: (m.bit_count(), m))
    below = []
    for u in labels:
        m = 0
        for j, v in enumerate(labels):
            if not v & ~u:
                m |= 1 << j
        below.append(m)
    frame = Frame(labels, below)
    pure = {ax: frame.index[d] for ax, d in gens.items()}
    return Tensor(frame, left, right, pure, closure)
