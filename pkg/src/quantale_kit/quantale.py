"""The involutive quantale of opens of an étale groupoid.

Elements are indices into the frame of opens of the arrow space.  Bilinear
laws are checked on join-irreducibles once join preservation in each
variable has been established; on a distributive carrier this is equivalent
to checking every tuple.
"""

from __future__ import annotations

from functools import cached_property
from itertools import product
from typing import Sequence

from .errors import PASS, ConsistencyError, NotEtale, OpennessViolation, Verdict, fail
from .groupoid import FiniteGroupoid, is_etale
from .order import ContinuousMap, Frame, Pullback, bits, frame_of_space, join_preservation


def image_table(
    left: Frame, right: Frame, target: Frame, pb: Pullback, result: ContinuousMap
) -> list[list[int]]:
    """``table[a][x]`` = index of ``result((a × x) ∩ P)`` in ``target``.

    ``left``/``right`` are the frames of the pullback factors; raises
    :class:`OpennessViolation` when an image is not open.
    """
    n_left_pts = len(pb.pi1.target)
    by_left: list[list[tuple[int, int]]] = [[] for _ in range(n_left_pts)]
    for k, (gi, xi) in enumerate(zip(pb.pi1.table, pb.pi2.table)):
        by_left[gi].append((xi, result.table[k]))
    rows = []
    for gi in range(n_left_pts):
        row = []
        for x in right.labels:
            m = 0
            for xi, z in by_left[gi]:
                if x >> xi & 1:
                    m |= 1 << z
            row.append(m)
        rows.append(row)
    table = []
    index = target.index
    nx = len(right)
    for a in left.labels:
        acc = [0] * nx
        for gi in bits(a):
            row = rows[gi]
            acc = [u | v for u, v in zip(acc, row)]
        try:
            table.append([index[m] for m in acc])
        except KeyError as exc:
            raise OpennessViolation(f"image mask {exc} is not open") from None
    return table


class InvQuantale:
    """A finite unital involutive quantale on a frame.

    ``mult[a][b]`` is the product, ``invol[a]`` the involution and ``unit``
    the multiplicative unit ``e``.  ``base`` lists the elements below ``e``.
    """

    def __init__(
        self,
        carrier: Frame,
        mult: Sequence[Sequence[int]],
        invol: Sequence[int],
        unit: int,
        *,
        groupoid: FiniteGroupoid | None = None,
    ):
        self.carrier = carrier
        self.mult = [list(row) for row in mult]
        self.invol = list(invol)
        self.unit = unit
        self.groupoid = groupoid
        self.base = tuple(b for b in carrier if carrier.leq(b, unit))
        self.base_iso: dict[int, int] | None = None

    @property
    def top(self) -> int:
        return self.carrier.top

    @property
    def bottom(self) -> int:
        return self.carrier.bottom

    def mul(self, a: int, b: int) -> int:
        return self.mult[a][b]

    def star(self, a: int) -> int:
        return self.invol[a]

    def leq(self, a: int, b: int) -> bool:
        return self.carrier.leq(a, b)

    def element(self, arrows) -> int:
        """Index of the open set of arrows with the given names."""
        return self.carrier.element(arrows)

    def arrows(self, a: int) -> frozenset:
        return self.carrier.points_of(a)

    def __len__(self) -> int:
        return len(self.carrier)

    @cached_property
    def partial_units(self) -> tuple[int, ...]:
        e = self.unit
        return tuple(
            s for s in self.carrier
            if self.leq(self.mul(s, self.star(s)), e) and self.leq(self.mul(self.star(s), s), e)
        )

    def __repr__(self) -> str:
        return f"<InvQuantale |Q|={len(self)} |B|={len(self.base)}>"


def opens_quantale(G: FiniteGroupoid) -> InvQuantale:
    v = is_etale(G)
    if not v:
        raise NotEtale(f"groupoid is not étale: {v}", witness=v.witness)
    Q1 = frame_of_space(G.arrows)
    try:
        mult = image_table(Q1, Q1, Q1, G.composable, G.m)
    except OpennessViolation as exc:
        raise ConsistencyError(f"multiplication of an étale groupoid left the opens: {exc}") from None
    invol = [Q1.index[G.i.image(u)] for u in Q1.labels]
    unit = Q1.index[G.u.image(G.objects.full)]
    Q = InvQuantale(Q1, mult, invol, unit, groupoid=G)
    G0 = frame_of_space(G.objects)
    iso = {}
    for v_ in G0.labels:
        img = G.u.image(v_)
        if img not in Q1.index:
            raise ConsistencyError("u is not open on an étale groupoid")
        iso[v_] = Q1.index[img]
    if sorted(iso.values()) != sorted(Q.base):
        raise ConsistencyError("u_! is not a bijection onto the base locale")
    for v1, v2 in product(G0.labels, repeat=2):
        if (not v1 & ~v2) != Q1.leq(iso[v1], iso[v2]):
            raise ConsistencyError("u_! is not an order isomorphism onto the base locale")
    Q.base_iso = iso
    return Q


# --------------------------------------------------------------------------
# law checks


def check_partial_units(Q: InvQuantale) -> Verdict:
    units = set(Q.partial_units)
    for s in units:
        if Q.mul(Q.mul(s, Q.star(s)), s) != s:
            return fail("partial-unit-regular", s)
        for t in bits(Q.carrier.below[s]):
            if t not in units:
                return fail("partial-units-down-closed", s, t)
    for a in Q.carrier:
        if Q.carrier.join_all(s for s in units if Q.leq(s, a)) != a:
            return fail("partial-units-join-dense", a)
    if Q.carrier.join_all(units) != Q.top:
        return fail("partial-units-cover")
    return PASS


def check_partial_unit_meet(Q: InvQuantale) -> Verdict:
    """``s·1 ∧ e = s·s*`` for every partial unit."""
    F = Q.carrier
    for s in Q.partial_units:
        if F.meet(Q.mul(s, Q.top), Q.unit) != Q.mul(s, Q.star(s)):
            return fail("partial-unit-meet", s)
    return PASS


def _bilinear(Q: InvQuantale) -> Verdict:
    F = Q.carrier
    for b in F:
        v = join_preservation(F, F, lambda a: Q.mult[a][b])
        if not v:
            return fail("mult-join-left", b, *v.witness)
    for a in F:
        v = join_preservation(F, F, Q.mult[a].__getitem__)
        if not v:
            return fail("mult-join-right", a, *v.witness)
    return PASS


def check_quantale_laws(Q: InvQuantale) -> Verdict:
    """Frame, bilinearity, associativity, unit and involution laws, and the base-locale laws."""
    F = Q.carrier
    v = F.check_frame_law()
    if not v:
        return v
    v = _bilinear(Q)
    if not v:
        return v
    J = F.join_irreducibles()
    for a, b, c in product(J, repeat=3):
        if Q.mul(Q.mul(a, b), c) != Q.mul(a, Q.mul(b, c)):
            return fail("associativity", a, b, c)
    for a in F:
        if Q.mul(Q.unit, a) != a or Q.mul(a, Q.unit) != a:
            return fail("unit", a)
    v = join_preservation(F, F, Q.invol.__getitem__)
    if not v:
        return fail("involution-join", *v.witness)
    for a in F:
        if Q.star(Q.star(a)) != a:
            return fail("involution-involutive", a)
    for a, b in product(J, repeat=2):
        if Q.star(Q.mul(a, b)) != Q.mul(Q.star(b), Q.star(a)):
            return fail("involution-antimultiplicative", a, b)
    for b in Q.base:
        if Q.star(b) != b:
            return fail("base-involution", b)
        if Q.mul(b, b) != b:
            return fail("base-idempotent", b)
    for b in Q.base:
        b1, one_b = Q.mul(b, Q.top), Q.mul(Q.top, b)
        for a in F:
            if Q.mul(b, a) != F.meet(b1, a):
                return fail("base-left-meet", b, a)
            if Q.mul(a, b) != F.meet(one_b, a):
                return fail("base-right-meet", a, b)
    return PASS


class SupportMap:
    def __init__(self, quantale: InvQuantale, table: Sequence[int]):
        self.quantale = quantale
        self.table = tuple(table)

    def __call__(self, a: int) -> int:
        return self.table[a]


def support(Q: InvQuantale, G: FiniteGroupoid | None = None) -> SupportMap:
    """``sp = u_! ∘ d_!``: each open set of arrows goes to the units at their domains."""
    G = G or Q.groupoid
    F = Q.carrier
    return SupportMap(Q, [F.index[G.u.image(G.d.image(a))] for a in F.labels])


def check_support(Q: InvQuantale, sp: SupportMap) -> Verdict:
    F = Q.carrier
    base = set(Q.base)
    v = join_preservation(F, F, sp.table.__getitem__)
    if not v:
        return fail("support-join", *v.witness)
    for a in F:
        if sp(a) not in base:
            return fail("support-in-base", a)
        if Q.mul(sp(a), a) != a:
            return fail("support-absorbs", a)
        if not Q.leq(sp(a), Q.mul(a, Q.star(a))):
            return fail("support-bound", a)
    for b in Q.base:
        for a in F:
            if sp(Q.mul(b, a)) != Q.mul(b, sp(a)):
                return fail("support-module-hom", b, a)
    return PASS


def check_support_derived(Q: InvQuantale, sp: SupportMap) -> Verdict:
    F = Q.carrier
    if sorted(set(sp.table)) != sorted(Q.base):
        return fail("support-image", detail="sp(Q) differs from the base locale")
    for a in F:
        s = sp(a)
        if Q.star(s) != s or Q.mul(s, s) != s:
            return fail("support-selfadjoint", a)
    for a in F:
        for b in F:
            ab = Q.mul(a, b)
            if sp(ab) != sp(Q.mul(a, sp(b))):
                return fail("support-product", a, b)
            if not Q.leq(sp(ab), sp(a)):
                return fail("support-decreasing", a, b)
    return PASS


def find_supports(Q: InvQuantale) -> list[SupportMap]:
    """Every join-preserving ``sp: Q -> B`` satisfying the support axioms.

    Values on join-irreducibles are searched among base elements ``c`` with
    ``c·j = j`` and ``c <= j j*``; each candidate is extended by joins and
    checked in full.
    """
    F = Q.carrier
    J = F.join_irreducibles()
    options = []
    for j in J:
        jj = Q.mul(j, Q.star(j))
        options.append([c for c in Q.base if Q.mul(c, j) == j and Q.leq(c, jj)])
    found = []
    for values in product(*options):
        assign = dict(zip(J, values))
        if any(F.leq(j, k) and not F.leq(assign[j], assign[k]) for j in J for k in J):
            continue
        table = [F.join_all(assign[j] for j in F.irreducibles_below(a)) for a in F]
        sp = SupportMap(Q, table)
        if check_support(Q, sp):
            found.append(sp)
    return found


SUPPORT_SEARCH_LIMIT = 16


def check_inverse_quantal_frame(Q: InvQuantale) -> Verdict:
    """Quantale laws, join-dense partial units and existence of a support.

    With a groupoid attached the support is ``u_! ∘ d_!``; otherwise it is
    searched for when ``|Q| <= 16`` and reported inconclusive beyond that.
    """
    v = check_quantale_laws(Q)
    if not v:
        return v
    v = check_partial_units(Q)
    if not v:
        return v
    if Q.groupoid is not None:
        v = check_support(Q, support(Q))
        if not v:
            return v
        return check_support_derived(Q, support(Q))
    if len(Q) > SUPPORT_SEARCH_LIMIT:
        return fail("support-exists", detail=f"inconclusive: |Q| = {len(Q)} exceeds search limit")
    if not find_supports(Q):
        return fail("support-exists")
    return PASS


# --------------------------------------------------------------------------
# the right adjoint of multiplication


def mu_star(Q: InvQuantale, a: int, S: Sequence[int] | None = None) -> int:
    """``⋁_{s ∈ S} s ⊗ s*a`` as an open mask of the composable-pairs space.

    ``S`` defaults to the partial units; any join-dense involutive
    subsemigroup with ``ss* <= e`` and ``s <= ss*s`` may be passed instead.
    """
    pb = Q.groupoid.composable
    labels = Q.carrier.labels
    out = 0
    for s in (Q.partial_units if S is None else S):
        out |= pb.pure(labels[s], labels[Q.mul(Q.star(s), a)])
    return out


def mu_star_by_definition(Q: InvQuantale, a: int) -> int:
    """``⋁{b ⊗ c | bc <= a}`` over all pairs of elements."""
    pb = Q.groupoid.composable
    labels = Q.carrier.labels
    out = 0
    for b in Q.carrier:
        for c in Q.carrier:
            if Q.leq(Q.mul(b, c), a):
                out |= pb.pure(labels[b], labels[c])
    return out


def check_mu_star(Q: InvQuantale, *, literal_limit: int = 64) -> Verdict:
    """The formula against the adjoint of ``m_!`` (and the literal definition when small).

    The Galois condition is tested on every open of the composable-pairs
    space when there are at most 4096 of them, otherwise on basic opens
    (equivalent, since both sides turn joins into conjunctions).
    """
    G = Q.groupoid
    pb = G.composable
    P = pb.space
    F = Q.carrier
    stars = {a: mu_star(Q, a) for a in F}
    for a in F:
        if stars[a] != G.m.preimage(F.labels[a]):
            return fail("mu-star-adjoint", a, detail="formula differs from the adjoint of m_!")
        if len(F) <= literal_limit and stars[a] != mu_star_by_definition(Q, a):
            return fail("mu-star-definition", a)
    if len(P) <= 12 and len(P.opens()) <= 4096:
        tests = P.opens()
    else:
        tests = sorted(set(P.nbhd))
    for w in tests:
        img = G.m.image(w)
        for a in F:
            if (not img & ~F.labels[a]) != (not w & ~stars[a]):
                return fail("mu-star-galois", w, a)
    if stars[F.bottom] != 0 or stars[F.top] != P.full:
        return fail("mu-star-bounds")
    for a in F:
        for b in range(a + 1, len(F)):
            if stars[F.join(a, b)] != stars[a] | stars[b]:
                return fail("mu-star-join", a, b)
            if stars[F.meet(a, b)] != stars[a] & stars[b]:
                return fail("mu-star-meet", a, b)
    return PASS
