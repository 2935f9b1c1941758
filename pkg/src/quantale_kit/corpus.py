"""Exhaustive and sampled corpora of small groupoids, G-locales and Q-locales.

Everything is enumerated as labelled structures and reduced up to
isomorphism by a brute-force canonical form (minimum encoding over all
relabellings).  At these sizes that is a few hundred permutations at most.
"""

from __future__ import annotations

import math
import os
import random
from dataclasses import dataclass
from itertools import combinations_with_replacement, permutations, product
from typing import Iterator, Sequence

from .errors import KitError, OracleBound
from .groupoid import (
    FiniteGroupoid,
    GLocale,
    check_glocale,
    discrete_group,
    disjoint_sum,
    identity_groupoid,
    action_groupoid,
    pair_groupoid,
    product_with_group,
)
from .order import ContinuousMap, FiniteSpace, bits, frame_of_space
from .qmodule import QLocale, check_qlocale, join_preserving_maps
from .quantale import InvQuantale

DEFAULT_MAX_INSTANCES = 200_000


class CorpusTooLarge(KitError):
    """Refusal to enumerate past ``QUANTALE_KIT_MAX_INSTANCES`` candidates."""

    def __init__(self, estimate: int, cap: int, what: str):
        super().__init__(
            f"{what}: about {estimate} candidates exceed the cap of {cap}; "
            "raise QUANTALE_KIT_MAX_INSTANCES or use --seed sampling",
            witness=estimate,
        )
        self.estimate = estimate
        self.cap = cap


def instance_cap() -> int:
    raw = os.environ.get("QUANTALE_KIT_MAX_INSTANCES")
    if not raw:
        return DEFAULT_MAX_INSTANCES
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"QUANTALE_KIT_MAX_INSTANCES must be an integer, got {raw!r}") from None


def _refuse_if_large(estimate: int, what: str) -> None:
    cap = instance_cap()
    if estimate > cap:
        raise CorpusTooLarge(estimate, cap, what)


# --------------------------------------------------------------------------
# finite T0 spaces


def _permute_mask(mask: int, perm: Sequence[int]) -> int:
    out = 0
    for i in bits(mask):
        out |= 1 << perm[i]
    return out


def _permuted_nbhd(nbhd: Sequence[int], perm: Sequence[int]) -> tuple[int, ...]:
    out = [0] * len(nbhd)
    for i, m in enumerate(nbhd):
        out[perm[i]] = _permute_mask(m, perm)
    return tuple(out)


def labelled_t0_topologies(n: int) -> Iterator[tuple[int, ...]]:
    """Minimal-neighbourhood tuples of every T0 topology on ``n`` labelled points.

    These are the partial orders on ``range(n)``: ``nbhd[i]`` is the up-set
    of ``i``, transitive, and pairwise distinct.
    """
    choices = []
    for i in range(n):
        others = [j for j in range(n) if j != i]
        opts = []
        for k in range(1 << len(others)):
            m = 1 << i
            for t, j in enumerate(others):
                if k >> t & 1:
                    m |= 1 << j
            opts.append(m)
        choices.append(opts)
    for nbhd in product(*choices):
        if len(set(nbhd)) != n:
            continue
        if all(nbhd[j] & ~nbhd[i] == 0 for i in range(n) for j in bits(nbhd[i])):
            yield nbhd


def space_key(nbhd: Sequence[int]) -> tuple[int, ...]:
    n = len(nbhd)
    return min(_permuted_nbhd(nbhd, p) for p in permutations(range(n)))


def t0_topologies(n: int) -> list[tuple[int, ...]]:
    """One representative per homeomorphism class, in a fixed order."""
    seen = {}
    for nbhd in labelled_t0_topologies(n):
        key = space_key(nbhd)
        seen.setdefault(key, key)
    return sorted(seen.values(), key=lambda nb: (sorted(m.bit_count() for m in nb), nb))


def t0_spaces(n: int, prefix: str = "x") -> list[FiniteSpace]:
    names = [f"{prefix}{k + 1}" for k in range(n)]
    return [FiniteSpace(names, nbhd=nb) for nb in t0_topologies(n)]


# --------------------------------------------------------------------------
# groupoids


_COMPONENTS = {
    1: ["z1"],
    2: ["z2"],
    3: ["z3"],
    4: ["z4", "v4", "pair2"],
}


def _component(kind: str) -> FiniteGroupoid:
    if kind == "pair2":
        return pair_groupoid(2)
    if kind == "z1":
        return discrete_group("trivial")
    return discrete_group(kind.upper())


def discrete_groupoids(max_arrows: int) -> list[FiniteGroupoid]:
    """Every discrete groupoid with at most ``max_arrows`` arrows, up to isomorphism.

    A finite discrete groupoid is a sum of connected pieces ``pair(n) × H``;
    with at most four arrows these are the groups of order at most 4 and
    ``pair(2)``, so distinct multisets of pieces give the classes.
    """
    if max_arrows > 4:
        raise OracleBound("discrete groupoid classes are tabulated only up to 4 arrows")
    kinds = [(size, k) for size in sorted(_COMPONENTS) for k in _COMPONENTS[size]]
    out = [identity_groupoid(FiniteSpace([]), "empty")]
    for total in range(1, max_arrows + 1):
        for count in range(1, total + 1):
            for combo in combinations_with_replacement(kinds, count):
                if sum(size for size, _ in combo) != total:
                    continue
                names = [k for _, k in combo]
                if len(names) == 1:
                    G = _component(names[0])
                else:
                    G = disjoint_sum([_component(k) for k in names])
                G.name = "+".join(names)
                out.append(G)
    return out


def identity_groupoids(max_points: int) -> list[FiniteGroupoid]:
    out = []
    for n in range(max_points + 1):
        for k, S in enumerate(t0_spaces(n, prefix="o")):
            out.append(identity_groupoid(S, f"id{n}.{k}"))
    return out


def groupoid_key(G: FiniteGroupoid) -> tuple:
    """Canonical form up to isomorphism; relabelling arrows fixes the objects via units."""
    arrows = G.arrows.points
    if len(arrows) > 6:
        return ("named", G.name, arrows)
    idx = {g: k for k, g in enumerate(arrows)}
    unit_of = {x: idx[G.u(x)] for x in G.objects.points}
    best = None
    for perm in permutations(range(len(arrows))):
        objs = sorted(G.objects.points, key=lambda x: perm[unit_of[x]])
        opos = {x: k for k, x in enumerate(objs)}
        operm = [opos[x] for x in G.objects.points]
        inv = {perm[k]: k for k in range(len(arrows))}
        enc = (
            _permuted_nbhd(G.arrows.nbhd, perm),
            _permuted_nbhd(G.objects.nbhd, operm),
            tuple(opos[G.d(arrows[inv[k]])] for k in range(len(arrows))),
            tuple(opos[G.r(arrows[inv[k]])] for k in range(len(arrows))),
            tuple(sorted((perm[idx[g]], perm[idx[h]], perm[idx[gh]]) for (g, h), gh in G.comp.items())),
        )
        if best is None or enc < best:
            best = enc
    return ("small", best)


def named_groupoids(include_large: bool = True) -> list[FiniteGroupoid]:
    z2 = discrete_group("Z2")
    z2.name = "z2"
    p2 = pair_groupoid(2)
    p2.name = "pair2"
    out = [z2, p2]
    if include_large:
        p3 = pair_groupoid(3)
        p3.name = "pair3"
        out.append(p3)
    bundle = product_with_group(FiniteSpace.sierpinski(), "Z2")
    bundle.name = "bundle-z2"
    out.append(bundle)
    if include_large:
        out.append(reflection_groupoid())
    return out


def reflection_groupoid() -> FiniteGroupoid:
    """Z2 swapping two open points of a three-point space and fixing the generic point."""
    S = FiniteSpace(["p", "q", "t"], nbhd=[0b001, 0b010, 0b111])
    swap = {"p": "q", "q": "p", "t": "t"}
    act = {}
    for x in S.points:
        act["1", x] = x
        act["g", x] = swap[x]
    G = action_groupoid("Z2", S, act)
    G.name = "reflection-z2"
    return G


def groupoid_corpus(max_arrows: int = 3, max_points: int = 3, named: bool = True,
                    include_large: bool = True) -> list[FiniteGroupoid]:
    """Discrete groupoids, identity groupoids and named examples, without repeats.

    Named examples are kept even above ``max_arrows``.
    """
    out, seen = [], set()
    pool = discrete_groupoids(min(max_arrows, 4))
    pool += [G for G in identity_groupoids(max_points) if len(G.arrows) <= max(max_arrows, max_points)]
    if named:
        pool += named_groupoids(include_large)
    for G in pool:
        key = groupoid_key(G)
        if key in seen:
            continue
        seen.add(key)
        out.append(G)
    return out


def find_groupoid(name: str, corpus: Sequence[FiniteGroupoid] | None = None) -> FiniteGroupoid:
    corpus = corpus if corpus is not None else groupoid_corpus(4, 3)
    for G in corpus:
        if G.name == name:
            return G
    raise KeyError(f"no groupoid named {name!r}; known: {[G.name for G in corpus]}")


# --------------------------------------------------------------------------
# G-locales


def _bijections(src: Sequence[int], dst: Sequence[int]) -> list[dict[int, int]]:
    if len(src) != len(dst):
        return []
    return [dict(zip(src, perm)) for perm in permutations(dst)]


def estimate_glocales(G: FiniteGroupoid, max_points: int) -> int:
    """Upper bound on labelled candidates examined by :func:`enumerate_glocales`."""
    nonunit = sum(1 for g in G.arrows.points if G.u(G.d(g)) != g)
    pairs = (nonunit + 1) // 2 if nonunit else 0
    total = 0
    for n in range(max_points + 1):
        total += len(t0_topologies(n)) * max(len(G.objects), 1) ** n * math.factorial(n) ** pairs
    return total


def glocale_key(A: GLocale) -> tuple:
    """Canonical form up to equivariant homeomorphism over the same groupoid."""
    pts = A.space.points
    n = len(pts)
    idx = A.space.index
    arrows = A.groupoid.arrows.points
    best = None
    for perm in permutations(range(n)):
        inv = {perm[k]: k for k in range(n)}
        enc = (
            _permuted_nbhd(A.space.nbhd, perm),
            tuple(str(A.p(pts[inv[k]])) for k in range(n)),
            tuple(sorted(
                (arrows.index(g), perm[idx[x]], perm[idx[y]]) for (g, x), y in A.act.items()
            )),
        )
        if best is None or enc < best:
            best = enc
    return best


def _glocales_on(G: FiniteGroupoid, S: FiniteSpace) -> Iterator[GLocale]:
    n = len(S)
    objs = G.objects.points
    arrows = G.arrows.points
    nonunit = [g for g in arrows if G.u(G.d(g)) != g]
    for ptab in product(range(len(objs)), repeat=n):
        p = ContinuousMap(S, G.objects, table=ptab, check=False)
        if not p.continuity():
            continue
        fibre = {x: [k for k in range(n) if objs[ptab[k]] == x] for x in objs}
        # an arrow g: a -> b acts as a bijection from the fibre over r(g) to the one over d(g);
        # g and g^-1 act by mutually inverse bijections
        reps = []
        for g in nonunit:
            if G.i(g) not in reps:
                reps.append(g)
        options = [_bijections(fibre[G.r(g)], fibre[G.d(g)]) for g in reps]
        for choice in product(*options):
            act = {}
            for x in objs:
                for k in fibre[x]:
                    act[G.u(x), S.points[k]] = S.points[k]
            for g, bij in zip(reps, choice):
                for k, v in bij.items():
                    act[g, S.points[k]] = S.points[v]
                    act[G.i(g), S.points[v]] = S.points[k]
            A = GLocale(G, S, {S.points[k]: objs[ptab[k]] for k in range(n)}, act)
            if check_glocale(G, A):
                yield A


def enumerate_glocales(G: FiniteGroupoid, max_points: int = 3, *,
                       exact_points: int | None = None, spaces: Sequence[FiniteSpace] | None = None,
                       check_size: bool = True) -> list[GLocale]:
    """All G-locales on T0 spaces with at most ``max_points`` points, up to isomorphism.

    Deterministic order: by number of points, then topology, then first
    labelled occurrence.
    """
    if check_size:
        _refuse_if_large(estimate_glocales(G, exact_points or max_points), f"G-locales over {G.name}")
    sizes = [exact_points] if exact_points is not None else range(max_points + 1)
    out, seen = [], set()
    for n in sizes:
        pool = spaces if spaces is not None else t0_spaces(n)
        for S in pool:
            if len(S) != n:
                continue
            for A in _glocales_on(G, S):
                key = glocale_key(A)
                if key in seen:
                    continue
                seen.add(key)
                A.name = f"{G.name}/x{n}.{len(out)}"
                out.append(A)
    return out


def sample_glocales(G: FiniteGroupoid, max_points: int, count: int, seed: int) -> list[GLocale]:
    """Random G-locales on random labelled T0 spaces; duplicates up to isomorphism dropped."""
    rng = random.Random(seed)
    spaces = {n: list(labelled_t0_topologies(n)) for n in range(max_points + 1)}
    objs = G.objects.points
    out, seen = [], set()
    attempts = 0
    while len(out) < count and attempts < 200 * count:
        attempts += 1
        n = rng.randint(0, max_points)
        nbhd = rng.choice(spaces[n])
        S = FiniteSpace([f"x{k + 1}" for k in range(n)], nbhd=nbhd)
        cands = list(_glocales_on(G, S))
        if not cands or not objs:
            continue
        A = rng.choice(cands)
        key = glocale_key(A)
        if key in seen:
            continue
        seen.add(key)
        A.name = f"{G.name}/sample{len(out)}"
        out.append(A)
    return out


# --------------------------------------------------------------------------
# Q-locales, enumerated from the module axioms alone


def qlocale_key(X: QLocale) -> tuple:
    Xs = X.space
    n = len(Xs)
    labels = X.carrier.labels
    best = None
    for perm in permutations(range(n)):
        enc = (
            _permuted_nbhd(Xs.nbhd, perm),
            tuple(sorted(
                (a, _permute_mask(labels[x], perm), _permute_mask(labels[X.act(a, x)], perm))
                for a in X.quantale.carrier for x in X.carrier
            )),
        )
        if best is None or enc < best:
            best = enc
    return best


@dataclass
class _Search:
    budget: int
    steps: int = 0

    def tick(self) -> None:
        self.steps += 1
        if self.steps > self.budget:
            raise OracleBound(f"Q-locale search exceeded its budget of {self.budget} steps")


def _qlocales_on(Q: InvQuantale, S: FiniteSpace, search: _Search) -> Iterator[QLocale]:
    Qf = Q.carrier
    Xf = frame_of_space(S)
    J = Qf.join_irreducibles()
    base = set(Q.base)
    order = [j for j in J if j in base] + [j for j in J if j not in base]
    endo = list(join_preserving_maps(Xf, Xf))
    assigned: dict[int, tuple[int, ...]] = {}

    def act(a: int, x: int) -> int | None:
        out = Xf.bottom
        for j in Qf.irreducibles_below(a):
            if j not in assigned:
                return None
            out = Xf.join(out, assigned[j][x])
        return out

    # in an inverse quantal frame a = (aa* ∧ e)a = a(a*a ∧ e), so these base
    # elements must fix the image and the argument of a's action
    guards = {
        j: (Qf.meet(Q.mul(j, Q.star(j)), Q.unit), Qf.meet(Q.mul(Q.star(j), j), Q.unit))
        for j in J if j not in base
    }

    def consistent() -> bool:
        for j, (left, right) in guards.items():
            if j in assigned:
                f = assigned[j]
                if any(act(left, f[x]) != f[x] or f[act(right, x)] != f[x] for x in Xf):
                    return False
        for j in assigned:
            for k in assigned:
                jk = Q.mul(j, k)
                for x in Xf:
                    lhs = act(jk, x)
                    if lhs is not None and lhs != assigned[j][assigned[k][x]]:
                        return False
        if all(b in assigned for b in J if b in base):
            if any(act(Q.unit, x) != x for x in Xf):
                return False
        return True

    def rec(k: int) -> Iterator[tuple[int, ...]]:
        if k == len(order):
            yield tuple(tuple(act(a, x) for x in Xf) for a in Qf)
            return
        j = order[k]
        forced = next(
            (tuple(assigned[a][assigned[b][x]] for x in Xf)
             for a in assigned for b in assigned if Q.mul(a, b) == j),
            None,
        )
        if forced is not None:
            cands = [forced]
        elif j in base:
            cands = [tuple(Xf.meet(c, x) for x in Xf) for c in Xf]
        else:
            cands = endo
        for f in cands:
            search.tick()
            assigned[j] = f
            if consistent():
                yield from rec(k + 1)
            del assigned[j]

    for table in rec(0):
        X = QLocale(Q, S, table)
        if check_qlocale(Q, X):
            yield X


def enumerate_qlocales(Q: InvQuantale, max_points: int = 2, *, budget: int = 2_000_000) -> list[QLocale]:
    """Every Q-locale whose carrier is the frame of a T0 space with at most ``max_points`` points.

    This ignores the groupoid entirely: actions of join-irreducibles are
    searched directly and filtered by the module axioms.
    """
    search = _Search(budget)
    out, seen = [], set()
    for n in range(max_points + 1):
        for S in t0_spaces(n):
            for X in _qlocales_on(Q, S, search):
                key = qlocale_key(X)
                if key not in seen:
                    seen.add(key)
                    out.append(X)
    return out
