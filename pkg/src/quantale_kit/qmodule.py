"""Q-locales: the module side of groupoid actions.

``Q ⊗_B X`` is realized as the frame of opens of the pullback of ``r`` and
the projection ``p`` recovered from the module; a pure tensor ``a ⊗ x`` is
the open ``(a × x) ∩ P``.  :func:`check_tensor_realization` compares this
with the brute-force quotient from :mod:`quantale_kit.tensor`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

from .errors import (
    PASS,
    ConsistencyError,
    NoPointRealization,
    NotAFrameHom,
    OpennessViolation,
    Verdict,
    fail,
)
from .groupoid import FiniteGroupoid, GLocale, EquivariantMap, check_equivariant, check_glocale
from .order import (
    ContinuousMap,
    FiniteSpace,
    Frame,
    Pullback,
    frame_of_space,
    join_preservation,
    meet_preservation,
    pullback_space,
)
from .quantale import InvQuantale, image_table, opens_quantale
from .tensor import DEFAULT_CAP, tensor_oracle


class QLocale:
    """A frame of opens with a left action ``table[a][x]`` of a groupoid quantale."""

    def __init__(self, quantale: InvQuantale, space: FiniteSpace, table: Sequence[Sequence[int]]):
        self.quantale = quantale
        self.space = space
        self.carrier = frame_of_space(space)
        self.table = [list(row) for row in table]
        self._realization: TensorRealization | None = None

    def act(self, a: int, x: int) -> int:
        return self.table[a][x]

    @property
    def top(self) -> int:
        return self.carrier.top

    @property
    def bottom(self) -> int:
        return self.carrier.bottom

    def element(self, pts: Iterable) -> int:
        return self.carrier.element(pts)

    def points_of(self, x: int) -> frozenset:
        return self.carrier.points_of(x)

    def canonical(self) -> tuple:
        """Hashable form: the space and the action keyed by open masks."""
        Ql, Xl = self.quantale.carrier.labels, self.carrier.labels
        return (
            self.space.points,
            self.space.nbhd,
            tuple((Ql[a], Xl[x], Xl[self.table[a][x]]) for a in self.quantale.carrier for x in self.carrier),
        )

    def __eq__(self, other: object) -> bool:
        return isinstance(other, QLocale) and self.canonical() == other.canonical()

    def __hash__(self) -> int:
        return hash(self.canonical())

    def __repr__(self) -> str:
        return f"<QLocale |X|={len(self.carrier)} over |Q|={len(self.quantale)}>"


def module_of_glocale(G: FiniteGroupoid, A: GLocale, Q: InvQuantale | None = None) -> QLocale:
    """``U·S = act((U × S) ∩ P)``: the module induced by a G-locale."""
    Q = Q or opens_quantale(G)
    Xf = frame_of_space(A.space)
    try:
        table = image_table(Q.carrier, Xf, Xf, A.pullback, A.a)
    except OpennessViolation as exc:
        raise ConsistencyError(f"action of an étale groupoid is not open: {exc}") from None
    return QLocale(Q, A.space, table)


def check_qlocale(Q: InvQuantale, X: QLocale) -> Verdict:
    F, Xf = Q.carrier, X.carrier
    v = Xf.check_frame_law()
    if not v:
        return v
    for x in Xf:
        v = join_preservation(F, Xf, lambda a: X.table[a][x])
        if not v:
            return fail("action-join-left", x, *v.witness)
    for a in F:
        v = join_preservation(Xf, Xf, X.table[a].__getitem__)
        if not v:
            return fail("action-join-right", a, *v.witness)
    JQ, JX = F.join_irreducibles(), Xf.join_irreducibles()
    for a, b in product(JQ, repeat=2):
        for x in JX:
            if X.act(Q.mul(a, b), x) != X.act(a, X.act(b, x)):
                return fail("associativity", a, b, x)
    for x in Xf:
        if X.act(Q.unit, x) != x:
            return fail("unitality", x)
    for b in Q.base:
        b1 = X.act(b, Xf.top)
        for x in Xf:
            if X.act(b, x) != Xf.meet(b1, x):
                return fail("base-meet", b, x)
    return PASS


def check_actions_coincide(G: FiniteGroupoid, A: GLocale, X: QLocale) -> Verdict:
    """``u_!(b)·x = p*(b) ∧ x`` for opens ``b`` of the objects, and ``p*(b) = u_!(b)·1``."""
    Q, Xf = X.quantale, X.carrier
    for v in frame_of_space(G.objects).labels:
        ub = Q.base_iso[v]
        pv = Xf.index[A.p.preimage(v)]
        if X.act(ub, Xf.top) != pv:
            return fail("projection-from-action", v)
        for x in Xf:
            if X.act(ub, x) != Xf.meet(pv, x):
                return fail("actions-coincide", v, x)
    return PASS


def projection_of(X: QLocale) -> ContinuousMap:
    """Recover ``p`` from ``p*(b) = u_!(b)·1``.

    Raises :class:`NoPointRealization` if ``p*`` is not a frame homomorphism
    or some point of ``X`` does not pick out exactly one object.
    """
    Q, Xf = X.quantale, X.carrier
    G = Q.groupoid
    G0 = G.objects
    G0f = frame_of_space(G0)
    pstar = [X.act(Q.base_iso[v], Xf.top) for v in G0f.labels]
    for name, v in (
        ("join", join_preservation(G0f, Xf, pstar.__getitem__)),
        ("meet", meet_preservation(G0f, Xf, pstar.__getitem__)),
    ):
        if not v:
            raise NoPointRealization(f"p* is not a frame homomorphism ({name}): {v}", witness=v.witness)
    table = []
    for i, pt in enumerate(X.space.points):
        hits = {v for v, px in zip(G0f.labels, pstar) if Xf.labels[px] >> i & 1}
        cands = [o for o in range(len(G0)) if {v for v in G0f.labels if v >> o & 1} == hits]
        if len(cands) != 1:
            raise NoPointRealization(f"point {pt!r} determines {len(cands)} objects", witness=pt)
        table.append(cands[0])
    return ContinuousMap(X.space, G0, table=table)


class TensorRealization:
    """``Q ⊗_B X`` as the opens of ``G1 ×_{G0} X`` (pullback of ``r`` and ``p``)."""

    def __init__(self, X: QLocale):
        self.module = X
        self.p = projection_of(X)
        self.pullback: Pullback = pullback_space(X.quantale.groupoid.r, self.p)
        self.space = self.pullback.space
        Q = X.quantale
        self._basic = [
            (a, x, self.pure(a, x))
            for a in Q.carrier.join_irreducibles()
            for x in X.carrier.join_irreducibles()
        ]

    def pure(self, a: int, x: int) -> int:
        return self.pullback.pure(self.module.quantale.carrier.labels[a], self.module.carrier.labels[x])

    def alpha(self, w: int) -> int:
        """The action map on an open ``w``: join of ``a·x`` over basic tensors inside ``w``."""
        X = self.module
        return X.carrier.join_all(X.act(a, x) for a, x, m in self._basic if m and not m & ~w)


def realization(X: QLocale) -> TensorRealization:
    if X._realization is None:
        X._realization = TensorRealization(X)
    return X._realization


def alpha_star(X: QLocale, x: int, S: Sequence[int] | None = None) -> int:
    """``⋁_{s ∈ I(Q)} s ⊗ s*x`` as an open mask of the pullback."""
    R = realization(X)
    Q = X.quantale
    out = 0
    for s in (Q.partial_units if S is None else S):
        out |= R.pure(s, X.act(Q.star(s), x))
    return out


def alpha_star_by_definition(X: QLocale, x: int) -> int:
    """``⋁{a ⊗ y | a·y <= x}`` over every pair of elements."""
    R = realization(X)
    out = 0
    for a in X.quantale.carrier:
        for y in X.carrier:
            if X.carrier.leq(X.act(a, y), x):
                out |= R.pure(a, y)
    return out


def check_alpha_star(X: QLocale, A: GLocale | None = None) -> Verdict:
    """Formula = definition on every element; Galois with the action; joins and meets preserved.

    With the G-locale at hand the formula is also compared with the
    preimage under the action map.
    """
    R = realization(X)
    Xf = X.carrier
    P = R.space
    stars = {x: alpha_star(X, x) for x in Xf}
    for x in Xf:
        if stars[x] != alpha_star_by_definition(X, x):
            return fail("alpha-star-definition", x)
        if A is not None and stars[x] != A.a.preimage(Xf.labels[x]):
            return fail("alpha-star-preimage", x)
    tests = P.opens() if len(P) <= 12 else sorted(set(P.nbhd))
    for w in tests:
        aw = R.alpha(w)
        for x in Xf:
            if Xf.leq(aw, x) != (not w & ~stars[x]):
                return fail("alpha-star-galois", w, x)
    if stars[Xf.bottom] != 0 or stars[Xf.top] != P.full:
        return fail("alpha-star-bounds")
    for x in Xf:
        for y in range(x + 1, len(Xf)):
            if stars[Xf.join(x, y)] != stars[x] | stars[y]:
                return fail("alpha-star-join", x, y)
            if stars[Xf.meet(x, y)] != stars[x] & stars[y]:
                return fail("alpha-star-meet", x, y)
    return PASS


def glocale_of_qlocale(G: FiniteGroupoid, X: QLocale) -> GLocale:
    """Recover the G-locale whose action has inverse image ``alpha_star``."""
    R = realization(X)
    Xf = X.carrier
    P = R.space
    stars = [alpha_star(X, x) for x in Xf]
    if stars[Xf.top] != P.full:
        raise NotAFrameHom("alpha_* does not preserve the top element", witness=_localize(X))
    for x in Xf:
        for y in range(x + 1, len(Xf)):
            if stars[Xf.meet(x, y)] != stars[x] & stars[y]:
                raise NotAFrameHom(f"alpha_* does not preserve the meet of {x}, {y}", witness=_localize(X))
    act = {}
    for k, gx in enumerate(P.points):
        hits = {x for x in Xf if stars[x] >> k & 1}
        cands = [
            z for z in range(len(X.space))
            if {x for x in Xf if Xf.labels[x] >> z & 1} == hits
        ]
        if len(cands) != 1:
            raise NotAFrameHom(f"pullback point {gx!r} has {len(cands)} images", witness=_localize(X))
        act[gx] = X.space.points[cands[0]]
    A = GLocale(G, X.space, R.p.as_dict(), act)
    v = check_glocale(G, A)
    if not v:
        raise NotAFrameHom(f"recovered action is not a G-locale: {v}", witness=_localize(X) or v)
    # alpha_* can be a frame map even when the input breaks a module law
    # (e.g. bx = b1 ∧ x); the recovered action then induces a different module
    if module_of_glocale(G, A, X.quantale) != X:
        bad = _localize(X)
        raise NotAFrameHom(f"input is not a Q-locale: {bad}", witness=bad)
    return A


def _localize(X: QLocale) -> Verdict | None:
    v = check_qlocale(X.quantale, X)
    return None if v else v


def same_glocale(A: GLocale, B: GLocale) -> bool:
    return (
        A.space == B.space
        and A.p.as_dict() == B.p.as_dict()
        and A.act == B.act
    )


# --------------------------------------------------------------------------
# morphisms


def check_module_hom(Q: InvQuantale, source: QLocale, target: QLocale, table: Sequence[int]) -> Verdict:
    """``table`` preserves joins and commutes with the action of ``Q``."""
    v = join_preservation(source.carrier, target.carrier, table.__getitem__)
    if not v:
        return fail("hom-join", *v.witness)
    for a in Q.carrier.join_irreducibles():
        for y in source.carrier.join_irreducibles():
            if table[source.act(a, y)] != target.act(a, table[y]):
                return fail("hom-equivariance", a, y)
    return PASS


def join_preserving_maps(source: Frame, target: Frame):
    """Every join-preserving map, generated from monotone assignments on join-irreducibles."""
    J = source.join_irreducibles()
    below_pairs = [(k, l) for k, j in enumerate(J) for l, i in enumerate(J) if l < k and source.leq(i, j)]
    above_pairs = [(k, l) for k, j in enumerate(J) for l, i in enumerate(J) if l < k and source.leq(j, i)]
    under = [source.irreducibles_below(y) for y in source]
    pos = {j: k for k, j in enumerate(J)}
    vals = [0] * len(J)

    def rec(k: int):
        if k == len(J):
            yield tuple(target.join_all(vals[pos[j]] for j in under[y]) for y in source)
            return
        for c in target:
            vals[k] = c
            if all(target.leq(vals[l], c) for kk, l in below_pairs if kk == k) and all(
                target.leq(c, vals[l]) for kk, l in above_pairs if kk == k
            ):
                yield from rec(k + 1)

    yield from rec(0)


def enumerate_module_homs(Q: InvQuantale, source: QLocale, target: QLocale) -> list[tuple[int, ...]]:
    return [
        t for t in join_preserving_maps(source.carrier, target.carrier)
        if check_module_hom(Q, source, target, t)
    ]


def inverse_image_table(f: ContinuousMap, source: QLocale, target: QLocale) -> tuple[int, ...]:
    """``f*`` as a table from opens of ``target`` (codomain of f) to opens of ``source``."""
    return tuple(source.carrier.index[f.preimage(v)] for v in target.carrier.labels)


def continuous_maps(X: FiniteSpace, Y: FiniteSpace):
    for table in product(range(len(Y)), repeat=len(X)):
        f = ContinuousMap(X, Y, table=table, check=False)
        if f.continuity():
            yield f


def product_map(A: GLocale, B: GLocale, f: ContinuousMap) -> ContinuousMap:
    """``1 × f`` from the action pullback of ``A`` to that of ``B``."""
    idx = B.pullback.space.index
    return ContinuousMap(
        A.pullback.space, B.pullback.space,
        table=[idx[g, f(x)] for g, x in A.pullback.space.points], check=False,
    )


def check_lax_inequality(A: GLocale, B: GLocale, f: ContinuousMap, MA: QLocale, MB: QLocale) -> Verdict:
    """``act_A*(f*(y)) <= (1 ⊗ f*)(act_B*(y))`` for every open ``y``.

    Also checks the chain used for fullness: ``act_A*(f*(y)) = ⋁ s ⊗ f*(s*y)``
    and each ``s ⊗ s*y`` lies under ``act_B*(y)``.  The verdict's detail
    records whether equality held throughout.
    """
    Q = MA.quantale
    fstar = inverse_image_table(f, MA, MB)
    v = check_module_hom(Q, MB, MA, fstar)
    if not v:
        return fail("precondition:module-hom", *v.witness)
    one_f = product_map(A, B, f)
    RA = realization(MA)
    equal = True
    for y in MB.carrier:
        ymask = MB.carrier.labels[y]
        lhs = A.a.preimage(f.preimage(ymask))
        bstar = B.a.preimage(ymask)
        rhs = one_f.preimage(bstar)
        if lhs & ~rhs:
            return fail("lax-inequality", y)
        equal = equal and lhs == rhs
        chain = 0
        for s in Q.partial_units:
            sy = MB.act(Q.star(s), y)
            chain |= RA.pure(s, fstar[sy])
            if realization(MB).pure(s, sy) & ~bstar:
                return fail("fullness-chain", s, y)
        if chain != lhs:
            return fail("fullness-formula", y)
    return Verdict(True, detail="equality" if equal else "strict")


@dataclass
class CategoryCheck:
    verdict: Verdict
    objects: int = 0
    pairs: int = 0
    continuous_maps: int = 0
    equivariant_maps: int = 0
    module_homs: int = 0
    spatial_homs: int = 0
    nonspatial_homs: int = 0
    notes: list[str] = field(default_factory=list)


def check_category_isomorphism(
    G: FiniteGroupoid, corpus: Sequence[GLocale], Q: InvQuantale | None = None
) -> CategoryCheck:
    """G-Loc ≅ Q-Loc on a finite corpus: object bijection, faithfulness and fullness."""
    Q = Q or opens_quantale(G)
    mods = [module_of_glocale(G, A, Q) for A in corpus]
    out = CategoryCheck(PASS, objects=len(corpus))
    for A, M in zip(corpus, mods):
        back = glocale_of_qlocale(G, M)
        if not same_glocale(A, back):
            out.verdict = fail("object-roundtrip", A.name)
            return out
        if module_of_glocale(G, back, Q) != M:
            out.verdict = fail("object-roundtrip-module", A.name)
            return out
    for (ia, A), (ib, B) in product(enumerate(corpus), repeat=2):
        MA, MB = mods[ia], mods[ib]
        out.pairs += 1
        seen: dict[tuple, ContinuousMap] = {}
        induced = set()
        for f in continuous_maps(A.space, B.space):
            out.continuous_maps += 1
            eq = bool(check_equivariant(EquivariantMap(A, B, f)))
            fstar = inverse_image_table(f, MA, MB)
            is_hom = bool(check_module_hom(Q, MB, MA, fstar))
            if eq and not is_hom:
                out.verdict = fail("functor", ia, ib, f.as_dict())
                return out
            if is_hom and not eq:
                out.verdict = fail("full", ia, ib, f.as_dict())
                return out
            if is_hom:
                lax = check_lax_inequality(A, B, f, MA, MB)
                if not lax:
                    out.verdict = fail("lax", ia, ib, *lax.witness, detail=lax.law or "")
                    return out
                induced.add(fstar)
            if eq:
                out.equivariant_maps += 1
                if fstar in seen:
                    out.verdict = fail("faithful", ia, ib, f.as_dict(), seen[fstar].as_dict())
                    return out
                seen[fstar] = f
        homs = enumerate_module_homs(Q, MB, MA)
        spatial = {
            h for h in homs
            if meet_preservation(MB.carrier, MA.carrier, h.__getitem__)
        }
        out.module_homs += len(homs)
        out.spatial_homs += len(spatial)
        out.nonspatial_homs += len(homs) - len(spatial)
        if spatial != induced:
            out.verdict = fail("spatial-homs", ia, ib, detail="frame-hom module homs differ from inverse images")
            return out
    return out


def check_tensor_realization(X: QLocale, *, cap: int = DEFAULT_CAP) -> Verdict:
    """The brute-force ``Q ⊗_B X`` is isomorphic to the pullback frame, intertwining pure tensors."""
    Q = X.quantale
    T = tensor_oracle(
        Q.carrier, X.carrier, Q.base,
        lambda a, b: Q.mul(a, b), lambda b, x: X.act(b, x), cap=cap,
    )
    R = realization(X)
    opens = set(R.space.opens())
    phi = {}
    for d in T.frame:
        m = 0
        for a, x in T.pairs(d):
            m |= R.pure(a, x)
        phi[d] = m
    if len(set(phi.values())) != len(phi):
        return fail("tensor-injective")
    if set(phi.values()) != opens:
        return fail("tensor-surjective", detail=f"{len(T.frame)} tensor elements, {len(opens)} opens")
    for d in T.frame:
        for d2 in T.frame:
            if T.frame.leq(d, d2) != (not phi[d] & ~phi[d2]):
                return fail("tensor-order", d, d2)
    for a in Q.carrier:
        for x in X.carrier:
            if phi[T.pure(a, x)] != R.pure(a, x):
                return fail("tensor-intertwine", a, x)
    return PASS
