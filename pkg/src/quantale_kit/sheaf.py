"""Open and étale Q-locales, local sections and sheaf homomorphisms."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

from .errors import PASS, ConsistencyError, NotOpen, Verdict, fail
from .groupoid import EquivariantMap, FiniteGroupoid, GLocale, check_equivariant
from .order import ContinuousMap, is_local_homeomorphism, is_open_map, join_preservation
from .qmodule import (
    QLocale,
    check_module_hom,
    continuous_maps,
    glocale_of_qlocale,
    join_preserving_maps,
    module_of_glocale,
    product_map,
    projection_of,
    same_glocale,
)
from .quantale import InvQuantale, opens_quantale, support

UNIQUENESS_SEARCH_LIMIT = 32


class OpenQLocale:
    """A Q-locale with its support ``supp: X -> B``."""

    def __init__(self, module: QLocale, supp: Sequence[int], proj: ContinuousMap):
        self.module = module
        self.supp = tuple(supp)
        self.proj = proj

    @property
    def quantale(self) -> InvQuantale:
        return self.module.quantale

    def sp(self, x: int) -> int:
        return self.supp[x]

    def __repr__(self) -> str:
        return f"<OpenQLocale |X|={len(self.module.carrier)}>"


def _support_laws(X: QLocale, supp: Sequence[int]) -> Verdict:
    Q, Xf = X.quantale, X.carrier
    base = set(Q.base)
    v = join_preservation(Xf, Q.carrier, supp.__getitem__)
    if not v:
        return fail("supp-join", *v.witness)
    for x in Xf:
        if supp[x] not in base:
            return fail("supp-in-base", x)
        if X.act(supp[x], x) != x:
            return fail("supp-absorbs", x)
    for b in Q.base:
        for x in Xf:
            if supp[X.act(b, x)] != Q.carrier.meet(b, supp[x]):
                return fail("supp-module-hom", b, x)
    return PASS


def find_module_supports(X: QLocale) -> list[tuple[int, ...]]:
    """Every join-preserving B-module map ``X -> B`` with ``sp(x)·x = x``."""
    Q, Xf = X.quantale, X.carrier
    J = Xf.join_irreducibles()
    options = [[c for c in Q.base if X.act(c, j) == j] for j in J]
    found = []
    for values in product(*options):
        assign = dict(zip(J, values))
        if any(Xf.leq(j, k) and not Q.leq(assign[j], assign[k]) for j in J for k in J):
            continue
        supp = tuple(Q.carrier.join_all(assign[j] for j in Xf.irreducibles_below(x)) for x in Xf)
        if _support_laws(X, supp):
            found.append(supp)
    return found


def open_qlocale(Q: InvQuantale, X: QLocale) -> OpenQLocale:
    """Attach the support ``u_! ∘ p_!``; raises :class:`NotOpen` when ``p`` is not open.

    The support is checked against its axioms and, for carriers of at most
    32 elements, shown to be the only map satisfying them.
    """
    p = projection_of(X)
    v = is_open_map(p)
    if not v:
        raise NotOpen(f"projection is not open: {v}", witness=v.witness)
    G = Q.groupoid
    supp = tuple(Q.carrier.index[G.u.image(p.image(m))] for m in X.carrier.labels)
    v = _support_laws(X, supp)
    if not v:
        raise ConsistencyError(f"u_! ∘ p_! fails the support axioms: {v}")
    if len(X.carrier) <= UNIQUENESS_SEARCH_LIMIT:
        others = find_module_supports(X)
        if others != [supp]:
            raise ConsistencyError(f"support is not unique: {len(others)} candidates")
    return OpenQLocale(X, supp, p)


def check_support_laws(Q: InvQuantale, OX: OpenQLocale) -> Verdict:
    """``sp(ax) = sp(a sp(x))``, ``sp(ax) <= sp(a)``, ``sp(sx) = s sp(x) s*`` for partial units ``s``."""
    X = OX.module
    spQ = support(Q)
    for a in Q.carrier:
        for x in X.carrier:
            ax = OX.sp(X.act(a, x))
            if ax != spQ(Q.mul(a, OX.sp(x))):
                return fail("support-of-product", a, x)
            if not Q.leq(ax, spQ(a)):
                return fail("support-decreasing", a, x)
    for s in Q.partial_units:
        for x in X.carrier:
            if OX.sp(X.act(s, x)) != Q.mul(Q.mul(s, OX.sp(x)), Q.star(s)):
                return fail("support-conjugation", s, x)
    return PASS


def local_sections(OX: OpenQLocale) -> tuple[int, ...]:
    """Elements ``s`` with ``x = sp(x)·s`` for every ``x <= s``."""
    X = OX.module
    Xf = X.carrier
    return tuple(
        s for s in Xf
        if all(X.act(OX.sp(x), s) == x for x in Xf.down(s))
    )


def is_etale_qlocale(OX: OpenQLocale) -> Verdict:
    """Local sections cover the top; cross-checked against ``p`` being a local homeomorphism."""
    Xf = OX.module.carrier
    algebraic = Xf.join_all(local_sections(OX)) == Xf.top
    geometric = is_local_homeomorphism(OX.proj)
    if algebraic != bool(geometric):
        raise ConsistencyError(f"étale criteria disagree: sections cover {algebraic}, local homeo {geometric}")
    if not algebraic:
        return fail("etale", detail="local sections do not cover the top element")
    return PASS


def check_bisections(Q: InvQuantale, OQ: OpenQLocale) -> Verdict:
    """Partial units are the sections whose involutes are sections, with ``sp(s) = ss*``."""
    sections = set(local_sections(OQ))
    if not set(Q.partial_units) <= sections:
        return fail("partial-units-are-sections")
    bisections = {s for s in sections if Q.star(s) in sections}
    if bisections != set(Q.partial_units):
        return fail("bisections", tuple(sorted(bisections ^ set(Q.partial_units))))
    for s in bisections:
        if OQ.sp(s) != Q.mul(s, Q.star(s)) or OQ.sp(Q.star(s)) != Q.mul(Q.star(s), s):
            return fail("bisection-support", s)
    return PASS


# --------------------------------------------------------------------------
# sheaf homomorphisms


def check_sheaf_hom(OX: OpenQLocale, OY: OpenQLocale, h: Sequence[int]) -> Verdict:
    Q = OX.quantale
    v = check_module_hom(Q, OX.module, OY.module, h)
    if not v:
        return v
    for x in OX.module.carrier:
        if OY.sp(h[x]) != OX.sp(x):
            return fail("support-preservation", x)
    ys = set(local_sections(OY))
    for s in local_sections(OX):
        if h[s] not in ys:
            return fail("section-preservation", s)
    return PASS


def enumerate_sheaf_homs(OX: OpenQLocale, OY: OpenQLocale) -> list[tuple[int, ...]]:
    return [
        h for h in join_preserving_maps(OX.module.carrier, OY.module.carrier)
        if check_sheaf_hom(OX, OY, h)
    ]


def direct_image_table(f: ContinuousMap, X: QLocale, Y: QLocale) -> tuple[int, ...] | None:
    """``f_!`` as a table of open indices, or ``None`` when some image is not open."""
    out = []
    for m in X.carrier.labels:
        img = f.image(m)
        if img not in Y.carrier.index:
            return None
        out.append(Y.carrier.index[img])
    return tuple(out)


def map_from_direct_image(h: Sequence[int], X: QLocale, Y: QLocale) -> ContinuousMap | None:
    """The point map whose direct image on minimal neighbourhoods agrees with ``h``."""
    Xs, Ys = X.space, Y.space
    by_nbhd = {n: k for k, n in enumerate(Ys.nbhd)}
    table = []
    for n in Xs.nbhd:
        img = Y.carrier.labels[h[X.carrier.index[n]]]
        if img not in by_nbhd:
            return None
        table.append(by_nbhd[img])
    return ContinuousMap(Xs, Ys, table=table, check=False)


@dataclass
class SheafCheck:
    verdict: Verdict
    sheaves: int = 0
    pairs: int = 0
    equivariant_maps: int = 0
    sheaf_homs: int = 0


def check_sheaf_category_isomorphisms(
    G: FiniteGroupoid, corpus: Sequence[GLocale], Q: InvQuantale | None = None
) -> SheafCheck:
    """BG, Q-Etale and Q-sh agree on a corpus of G-locales.

    Objects: a G-locale is a G-sheaf exactly when its module is étale, and
    the sheaves round-trip.  Morphisms: ``f ↦ f_!`` sends equivariant maps
    to sheaf homomorphisms injectively, and every sheaf homomorphism is
    ``f_!`` of exactly one equivariant local homeomorphism.
    """
    Q = Q or opens_quantale(G)
    out = SheafCheck(PASS)
    sheaves = []
    for A in corpus:
        M = module_of_glocale(G, A, Q)
        try:
            OM = open_qlocale(Q, M)
        except NotOpen:
            if is_local_homeomorphism(A.p):
                out.verdict = fail("sheaf-not-open", A.name)
                return out
            continue
        etale = bool(is_etale_qlocale(OM))
        if etale != bool(is_local_homeomorphism(A.p)):
            out.verdict = fail("objects", A.name)
            return out
        if etale:
            if not same_glocale(glocale_of_qlocale(G, M), A):
                out.verdict = fail("object-roundtrip", A.name)
                return out
            sheaves.append((A, OM))
    out.sheaves = len(sheaves)
    for (ia, (A, OA)), (ib, (B, OB)) in product(enumerate(sheaves), repeat=2):
        out.pairs += 1
        MA, MB = OA.module, OB.module
        images = {}
        for f in continuous_maps(A.space, B.space):
            if not check_equivariant(EquivariantMap(A, B, f)):
                continue
            out.equivariant_maps += 1
            if not is_local_homeomorphism(f):
                out.verdict = fail("equivariant-local-homeo", ia, ib, f.as_dict())
                return out
            fl = direct_image_table(f, MA, MB)
            if fl is None or not check_sheaf_hom(OA, OB, fl):
                out.verdict = fail("direct-image-sheaf-hom", ia, ib, f.as_dict())
                return out
            if fl in images:
                out.verdict = fail("faithful", ia, ib, f.as_dict())
                return out
            images[fl] = f
            one_f = product_map(A, B, f)
            for w in set(A.pullback.space.nbhd):
                if f.image(A.a.image(w)) != B.a.image(one_f.image(w)):
                    out.verdict = fail("direct-image-equivariance", ia, ib, w)
                    return out
        homs = enumerate_sheaf_homs(OA, OB)
        out.sheaf_homs += len(homs)
        for h in homs:
            f = map_from_direct_image(h, MA, MB)
            if f is None or not f.continuity():
                out.verdict = fail("full:no-point-map", ia, ib, h)
                return out
            if direct_image_table(f, MA, MB) != h:
                out.verdict = fail("full:direct-image", ia, ib, h)
                return out
            if not check_equivariant(EquivariantMap(A, B, f)):
                out.verdict = fail("full:equivariance", ia, ib, h)
                return out
        if set(homs) != set(images):
            out.verdict = fail("full", ia, ib)
            return out
    return out
