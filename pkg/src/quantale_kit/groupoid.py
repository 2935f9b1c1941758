"""Finite topological groupoids, their actions, and equivariant maps.

Composition is written left to right: ``comp(g, h)`` is defined exactly
when ``r(g) = d(h)``, and then ``d(gh) = d(g)``, ``r(gh) = r(h)``.  An
action ``act(g, x)`` is defined when ``r(g) = p(x)`` and lands in the fibre
over ``d(g)``.
"""

from __future__ import annotations

from itertools import product
from typing import Hashable, Mapping, Sequence

from .errors import PASS, ConsistencyError, NotEtale, Verdict, fail
from .order import (
    ContinuousMap,
    FiniteSpace,
    Pullback,
    identity_map,
    is_local_homeomorphism,
    is_open_map,
    product_space,
    pullback_space,
)


class FiniteGroupoid:
    """Objects, arrows and the five structure maps.

    ``comp`` must be defined on exactly the composable pairs; anything else
    raises ``ValueError`` since undefined compositions are unrepresentable.
    Continuity and the groupoid laws are checked by :func:`check_groupoid`.
    """

    def __init__(
        self,
        objects: FiniteSpace,
        arrows: FiniteSpace,
        dom: Mapping,
        cod: Mapping,
        unit: Mapping,
        inv: Mapping,
        comp: Mapping[tuple, Hashable],
        *,
        name: str | None = None,
    ):
        self.objects = objects
        self.arrows = arrows
        self.name = name
        self.d = ContinuousMap(arrows, objects, dom, check=False)
        self.r = ContinuousMap(arrows, objects, cod, check=False)
        self.u = ContinuousMap(objects, arrows, unit, check=False)
        self.i = ContinuousMap(arrows, arrows, inv, check=False)
        self.composable: Pullback = pullback_space(self.r, self.d)
        pairs = self.composable.space.points
        extra = set(comp) - set(pairs)
        if extra:
            raise ValueError(f"composition given on non-composable pairs {sorted(extra, key=str)[:3]}")
        missing = [pq for pq in pairs if pq not in comp]
        if missing:
            raise ValueError(f"composition undefined on composable pairs {missing[:3]}")
        self.m = ContinuousMap(self.composable.space, arrows, comp, check=False)
        self.comp = {pq: comp[pq] for pq in pairs}

    def dom(self, g: Hashable) -> Hashable:
        return self.d(g)

    def cod(self, g: Hashable) -> Hashable:
        return self.r(g)

    def unit(self, x: Hashable) -> Hashable:
        return self.u(x)

    def inv(self, g: Hashable) -> Hashable:
        return self.i(g)

    def mul(self, g: Hashable, h: Hashable) -> Hashable:
        return self.comp[g, h]

    def __repr__(self) -> str:
        label = self.name or "groupoid"
        return f"<FiniteGroupoid {label}: {len(self.objects)} objects, {len(self.arrows)} arrows>"


def check_groupoid(G: FiniteGroupoid) -> Verdict:
    for name, f in (("d", G.d), ("r", G.r), ("u", G.u), ("i", G.i), ("m", G.m)):
        v = f.continuity()
        if not v:
            return fail(f"continuity:{name}", *v.witness)
    for x in G.objects.points:
        if G.d(G.u(x)) != x:
            return fail("unit-domain", x)
        if G.r(G.u(x)) != x:
            return fail("unit-codomain", x)
    for (g, h), gh in G.comp.items():
        if G.d(gh) != G.d(g):
            return fail("d-compatibility", g, h, gh)
        if G.r(gh) != G.r(h):
            return fail("r-compatibility", g, h, gh)
    for (g, h), gh in G.comp.items():
        for k in G.arrows.points:
            if G.r(h) == G.d(k) and G.comp[gh, k] != G.comp[g, G.comp[h, k]]:
                return fail("associativity", g, h, k)
    for g in G.arrows.points:
        if G.comp[g, G.u(G.r(g))] != g:
            return fail("right-unit", g)
        if G.comp[G.u(G.d(g)), g] != g:
            return fail("left-unit", g)
    for g in G.arrows.points:
        ig = G.i(g)
        if G.d(ig) != G.r(g) or G.r(ig) != G.d(g):
            return fail("inverse-composable", g, ig)
        if G.comp[g, ig] != G.u(G.d(g)):
            return fail("right-inverse", g)
        if G.comp[ig, g] != G.u(G.r(g)):
            return fail("left-inverse", g)
    return PASS


def is_etale(G: FiniteGroupoid) -> Verdict:
    """Domain map is a local homeomorphism; cross-checked against "d and u open"."""
    v = check_groupoid(G)
    if not v:
        return fail("not-a-groupoid", *v.witness, detail=str(v))
    geometric = is_local_homeomorphism(G.d)
    d_open, u_open = is_open_map(G.d), is_open_map(G.u)
    if bool(geometric) != bool(d_open and u_open):
        raise ConsistencyError(
            f"étale criteria disagree: local homeo {geometric}, d open {d_open}, u open {u_open}"
        )
    if not geometric:
        return fail("etale:" + (geometric.law or ""), *geometric.witness)
    return PASS


# --------------------------------------------------------------------------
# actions


class GLocale:
    """A space ``X`` over the objects, with an action on the pullback of ``r`` and ``p``."""

    def __init__(
        self,
        groupoid: FiniteGroupoid,
        space: FiniteSpace,
        proj: Mapping,
        act: Mapping[tuple, Hashable],
        *,
        name: str | None = None,
    ):
        self.groupoid = groupoid
        self.space = space
        self.name = name
        self.p = ContinuousMap(space, groupoid.objects, proj, check=False)
        self.pullback: Pullback = pullback_space(groupoid.r, self.p)
        pairs = self.pullback.space.points
        extra = set(act) - set(pairs)
        if extra:
            raise ValueError(f"action given outside the pullback of r and p: {sorted(extra, key=str)[:3]}")
        missing = [gx for gx in pairs if gx not in act]
        if missing:
            raise ValueError(f"action undefined on {missing[:3]}")
        self.a = ContinuousMap(self.pullback.space, space, act, check=False)
        self.act = {gx: act[gx] for gx in pairs}

    def proj(self, x: Hashable) -> Hashable:
        return self.p(x)

    def __call__(self, g: Hashable, x: Hashable) -> Hashable:
        return self.act[g, x]

    def __repr__(self) -> str:
        return f"<GLocale {self.name or ''} |X|={len(self.space)}>"


def check_glocale(G: FiniteGroupoid, A: GLocale) -> Verdict:
    """Continuity, the projection square, associativity and unitarity.

    The reformulation ``π1 = m ∘ (1 × (u ∘ p))`` of the projection square is
    checked as a redundant assertion afterwards.
    """
    if A.groupoid is not G:
        if A.groupoid.arrows != G.arrows or A.groupoid.comp != G.comp:
            return fail("groupoid-mismatch")
    v = A.p.continuity()
    if not v:
        return fail("continuity:p", *v.witness)
    v = A.a.continuity()
    if not v:
        return fail("continuity:action", *v.witness)
    for (g, x), y in A.act.items():
        if A.p(y) != G.d(g):
            return fail("action-projection", g, x, y)
    for (h, x), hx in A.act.items():
        for g in G.arrows.points:
            if G.r(g) != G.d(h):
                continue
            if A.act[G.comp[g, h], x] != A.act[g, hx]:
                return fail("associativity", g, h, x)
    for x in A.space.points:
        if A.act[G.u(A.p(x)), x] != x:
            return fail("unitarity", x)
    for (g, x), y in A.act.items():
        gu = G.comp[g, G.u(A.p(x))]
        if gu != g:
            return fail("projection-reformulation", g, x)
        if A.p(y) != G.d(gu):
            return fail("projection-reformulation", g, x, y)
    return PASS


def check_action_pullback(G: FiniteGroupoid, A: GLocale) -> Verdict:
    """``(g, x) ↦ (g, act(g, x))`` is a homeomorphism onto the pullback of ``d`` and ``p``."""
    target = pullback_space(G.d, A.p)
    try:
        phi = ContinuousMap(A.pullback.space, target.space, lambda gx: (gx[0], A.act[gx]), check=False)
    except Exception as exc:  # image leaves the pullback
        return fail("action-square-pullback", detail=str(exc))
    if not phi.is_injective() or len(target.space) != len(A.pullback.space):
        return fail("action-square-pullback", detail="not a bijection")
    if not phi.continuity() or not is_open_map(phi):
        return fail("action-square-pullback", detail="not a homeomorphism")
    return PASS


class EquivariantMap:
    def __init__(self, source: GLocale, target: GLocale, mapping: Mapping | ContinuousMap):
        self.source = source
        self.target = target
        if isinstance(mapping, ContinuousMap):
            self.map = mapping
        else:
            self.map = ContinuousMap(source.space, target.space, mapping, check=False)

    def __call__(self, x: Hashable) -> Hashable:
        return self.map(x)


def check_equivariant(f: EquivariantMap) -> Verdict:
    X, Y = f.source, f.target
    v = f.map.continuity()
    if not v:
        return fail("continuity", *v.witness)
    for x in X.space.points:
        if Y.p(f(x)) != X.p(x):
            return fail("over-base", x)
    for (g, x), y in X.act.items():
        if f(y) != Y.act[g, f(x)]:
            return fail("equivariance", g, x)
    return PASS


# --------------------------------------------------------------------------
# named constructions


def group_table(spec: str | int) -> tuple[tuple[str, ...], dict[tuple[str, str], str]]:
    """Element names and multiplication of a small named group.

    ``"Zn"`` (or an int ``n``) is cyclic of order ``n`` with elements
    ``1, g, g2, ...``; ``"V4"`` is the Klein four-group ``1, a, b, c``.
    """
    if isinstance(spec, int) or spec == "trivial" or (spec.startswith("Z") and spec[1:].isdigit()):
        n = 1 if spec == "trivial" else int(spec if isinstance(spec, int) else spec[1:])
        names = tuple("1" if k == 0 else "g" if k == 1 else f"g{k}" for k in range(n))
        table = {(names[a], names[b]): names[(a + b) % n] for a in range(n) for b in range(n)}
        return names, table
    if spec == "V4":
        names = ("1", "a", "b", "c")
        code = {"1": 0, "a": 1, "b": 2, "c": 3}
        table = {(x, y): names[code[x] ^ code[y]] for x in names for y in names}
        return names, table
    raise ValueError(f"unknown group {spec!r}")


def _group_inverse(names, table):
    return {g: next(h for h in names if table[g, h] == "1") for g in names}


def identity_groupoid(space: FiniteSpace, name: str | None = None) -> FiniteGroupoid:
    ident = {x: x for x in space.points}
    comp = {(x, x): x for x in space.points}
    return FiniteGroupoid(space, space, ident, ident, ident, ident, comp, name=name)


def discrete_group(group: str | int = "Z2") -> FiniteGroupoid:
    names, table = group_table(group)
    inv = _group_inverse(names, table)
    objects = FiniteSpace(["*"])
    arrows = FiniteSpace(names)
    const = {g: "*" for g in names}
    return FiniteGroupoid(objects, arrows, const, const, {"*": "1"}, inv, table, name=f"group-{group}")


def pair_groupoid(n: int, group: str | int = "trivial") -> FiniteGroupoid:
    """Pair groupoid on ``1..n``, optionally times a vertex group: arrows ``(i,j)h``."""
    names, table = group_table(group)
    ginv = _group_inverse(names, table)
    objs = [str(k) for k in range(1, n + 1)]

    def arrow(i, j, h):
        return f"({i},{j})" + ("" if len(names) == 1 else h)

    arrows, dom, cod, inv = [], {}, {}, {}
    for i in objs:
        for j in objs:
            for h in names:
                a = arrow(i, j, h)
                arrows.append(a)
                dom[a], cod[a], inv[a] = i, j, arrow(j, i, ginv[h])
    comp = {}
    for i, j, k in product(objs, repeat=3):
        for h, h2 in product(names, repeat=2):
            comp[arrow(i, j, h), arrow(j, k, h2)] = arrow(i, k, table[h, h2])
    unit = {i: arrow(i, i, "1") for i in objs}
    label = f"pair-{n}" + ("" if len(names) == 1 else f"x{group}")
    return FiniteGroupoid(FiniteSpace(objs), FiniteSpace(arrows), dom, cod, unit, inv, comp, name=label)


def disjoint_sum(parts: Sequence[FiniteGroupoid], name: str | None = None) -> FiniteGroupoid:
    """Coproduct; points of the ``k``-th summand are renamed ``"k.name"``."""
    def tag(k, x):
        return f"{k}.{x}"

    obj_pts, obj_nb, arr_pts, arr_nb = [], [], [], []
    dom, cod, unit, inv, comp = {}, {}, {}, {}, {}
    for k, G in enumerate(parts):
        off_o, off_a = len(obj_pts), len(arr_pts)
        obj_pts += [tag(k, x) for x in G.objects.points]
        obj_nb += [n << off_o for n in G.objects.nbhd]
        arr_pts += [tag(k, g) for g in G.arrows.points]
        arr_nb += [n << off_a for n in G.arrows.nbhd]
        for g in G.arrows.points:
            dom[tag(k, g)] = tag(k, G.d(g))
            cod[tag(k, g)] = tag(k, G.r(g))
            inv[tag(k, g)] = tag(k, G.i(g))
        for x in G.objects.points:
            unit[tag(k, x)] = tag(k, G.u(x))
        for (g, h), gh in G.comp.items():
            comp[tag(k, g), tag(k, h)] = tag(k, gh)
    label = name or "+".join(G.name or "?" for G in parts)
    return FiniteGroupoid(
        FiniteSpace(obj_pts, nbhd=obj_nb), FiniteSpace(arr_pts, nbhd=arr_nb),
        dom, cod, unit, inv, comp, name=label,
    )


def product_with_group(space: FiniteSpace, group: str | int = "Z2") -> FiniteGroupoid:
    """The group bundle ``space × H``; arrows are named ``"x:h"``."""
    names, table = group_table(group)
    ginv = _group_inverse(names, table)
    arrows = product_space(space, FiniteSpace(names), name=lambda x, h: f"{x}:{h}")
    dom, inv, comp = {}, {}, {}
    for x in space.points:
        for h in names:
            dom[f"{x}:{h}"] = x
            inv[f"{x}:{h}"] = f"{x}:{ginv[h]}"
            for h2 in names:
                comp[f"{x}:{h}", f"{x}:{h2}"] = f"{x}:{table[h, h2]}"
    unit = {x: f"{x}:1" for x in space.points}
    return FiniteGroupoid(space, arrows, dom, dom, unit, inv, comp, name=f"bundle-{group}")


def action_groupoid(
    group: str | int, space: FiniteSpace, action: Mapping[tuple[str, Hashable], Hashable]
) -> FiniteGroupoid:
    """Translation groupoid of ``H`` acting on ``space``: arrow ``"h@x"`` goes from ``x`` to ``h·x``."""
    names, table = group_table(group)
    ginv = _group_inverse(names, table)
    arrows = product_space(space, FiniteSpace(names), name=lambda x, h: f"{h}@{x}")
    dom, cod, inv, comp = {}, {}, {}, {}
    for x in space.points:
        for h in names:
            a = f"{h}@{x}"
            hx = action[h, x]
            dom[a], cod[a], inv[a] = x, hx, f"{ginv[h]}@{hx}"
            for k in names:
                comp[a, f"{k}@{hx}"] = f"{table[k, h]}@{x}"
    unit = {x: f"1@{x}" for x in space.points}
    return FiniteGroupoid(space, arrows, dom, cod, unit, inv, comp, name=f"action-{group}")


def make_named(kind: str, **params) -> FiniteGroupoid:
    """Build one of the named example groupoids; refuses non-étale results.

    kinds: ``identity-on-space`` (space), ``discrete-group`` (group),
    ``pair`` (n, group), ``disjoint-sum`` (parts), ``product-with-group``
    (space, group), ``action-groupoid`` (group, space, action).
    """
    builders = {
        "identity-on-space": lambda: identity_groupoid(params["space"], params.get("name")),
        "discrete-group": lambda: discrete_group(params.get("group", "Z2")),
        "pair": lambda: pair_groupoid(params["n"], params.get("group", "trivial")),
        "disjoint-sum": lambda: disjoint_sum(params["parts"], params.get("name")),
        "product-with-group": lambda: product_with_group(params["space"], params.get("group", "Z2")),
        "action-groupoid": lambda: action_groupoid(params["group"], params["space"], params["action"]),
    }
    if kind not in builders:
        raise ValueError(f"unknown groupoid kind {kind!r}; expected one of {sorted(builders)}")
    G = builders[kind]()
    v = check_groupoid(G)
    if not v:
        raise ValueError(f"{kind} parameters do not give a groupoid: {v}")
    v = is_etale(G)
    if not v:
        raise NotEtale(f"{kind} parameters give a non-étale groupoid: {v}", witness=v.witness)
    return G


def self_action(G: FiniteGroupoid) -> GLocale:
    """``G`` acting on its own arrows: ``X = G1``, ``p = d``, action = composition."""
    act = {(g, h): G.comp[g, h] for g, h in G.composable.space.points}
    return GLocale(G, G.arrows, G.d.as_dict(), act, name="self")


def terminal_glocale(G: FiniteGroupoid) -> GLocale:
    """``G0`` with ``p = id`` and ``act(g, r(g)) = d(g)``."""
    act = {(g, G.r(g)): G.d(g) for g in G.arrows.points}
    return GLocale(G, G.objects, {x: x for x in G.objects.points}, act, name="terminal")


def identity_equivariant(A: GLocale) -> EquivariantMap:
    return EquivariantMap(A, A, identity_map(A.space))


def induced_glocale(G: FiniteGroupoid, space: FiniteSpace, proj: Mapping) -> GLocale:
    """``G1 ×_{G0} X`` for a space over the objects, acted on by composition.

    Points are pairs ``(g, x)`` with ``r(g) = p(x)``, named ``"g|x"``; the
    projection is ``d ∘ π1`` and ``h·(g, x) = (hg, x)``.
    """
    p = ContinuousMap(space, G.objects, proj)
    pb = pullback_space(G.r, p)
    names = {gx: f"{gx[0]}|{gx[1]}" for gx in pb.space.points}
    total = FiniteSpace([names[gx] for gx in pb.space.points], nbhd=pb.space.nbhd)
    act = {}
    for (g, x), name in names.items():
        for h in G.arrows.points:
            if G.r(h) == G.d(g):
                act[h, name] = names[G.comp[h, g], x]
    proj_total = {names[gx]: G.d(gx[0]) for gx in pb.space.points}
    return GLocale(G, total, proj_total, act, name="induced")
