"""Finite spaces, finite frames, join-preserving maps and spatial duality.

Open sets are integer bitmasks over the point list of their space: bit ``i``
is set when ``space.points[i]`` belongs to the set.  A finite topology is
stored through the minimal open neighbourhood of every point, so opens are
exactly the unions of neighbourhoods and never need to be listed unless a
frame is materialized with :func:`frame_of_space`.

Frames are index based: element ``i`` has a label (an open mask for spatial
frames) and ``below[i]`` is the bitmask of the indices under it.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping, Sequence

from .errors import (
    PASS,
    ContinuityError,
    NotALattice,
    NotDistributive,
    NotJoinPreserving,
    OpennessViolation,
    TopologyError,
    Verdict,
    fail,
)


def bits(mask: int) -> Iterator[int]:
    """Indices of the set bits of ``mask``, lowest first."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _mask_key(mask: int) -> tuple[int, int]:
    return (mask.bit_count(), mask)


class FiniteSpace:
    """A finite set of named points with a topology.

    ``opens`` may be any family of point collections; it is checked to
    contain the empty set and the whole carrier and to be closed under
    pairwise union and intersection.  When ``opens`` is omitted the space is
    discrete.  ``nbhd`` (minimal neighbourhood masks) is the internal fast path.
    """

    def __init__(
        self,
        points: Iterable[Hashable],
        opens: Iterable[Iterable[Hashable]] | None = None,
        *,
        nbhd: Sequence[int] | None = None,
    ):
        self.points = tuple(points)
        if len(set(self.points)) != len(self.points):
            raise TopologyError(f"duplicate point names in {self.points!r}")
        self.index = {p: i for i, p in enumerate(self.points)}
        self.full = (1 << len(self.points)) - 1
        if nbhd is not None:
            self.nbhd = tuple(nbhd)
            self._check_nbhd()
        elif opens is None:
            self.nbhd = tuple(1 << i for i in range(len(self.points)))
        else:
            self.nbhd = self._nbhd_from_family({self.mask(o) for o in opens})
        self._opens: tuple[int, ...] | None = None
        self._frame: Frame | None = None

    # construction helpers -------------------------------------------------

    def _nbhd_from_family(self, family: set[int]) -> tuple[int, ...]:
        if 0 not in family:
            raise TopologyError("the empty set is not open")
        if self.full not in family:
            raise TopologyError("the whole carrier is not open")
        ordered = sorted(family, key=_mask_key)
        for k, u in enumerate(ordered):
            for v in ordered[k + 1:]:
                if u | v not in family:
                    raise TopologyError(
                        f"union of {sorted(self.subset(u), key=str)} and "
                        f"{sorted(self.subset(v), key=str)} is not open",
                        witness=(self.subset(u), self.subset(v)),
                    )
                if u & v not in family:
                    raise TopologyError(
                        f"intersection of {sorted(self.subset(u), key=str)} and "
                        f"{sorted(self.subset(v), key=str)} is not open",
                        witness=(self.subset(u), self.subset(v)),
                    )
        nb = []
        for i in range(len(self.points)):
            nb.append(reduce(lambda a, b: a & b, (u for u in family if u >> i & 1), self.full))
        return tuple(nb)

    def _check_nbhd(self) -> None:
        if len(self.nbhd) != len(self.points):
            raise TopologyError("one neighbourhood per point is required")
        for i, n in enumerate(self.nbhd):
            if not n >> i & 1:
                raise TopologyError(f"point {self.points[i]!r} is missing from its neighbourhood")
            for j in bits(n):
                if self.nbhd[j] & ~n:
                    raise TopologyError(
                        f"neighbourhoods of {self.points[i]!r} and {self.points[j]!r} are not nested"
                    )

    @classmethod
    def discrete(cls, points: Iterable[Hashable]) -> FiniteSpace:
        return cls(points)

    @classmethod
    def indiscrete(cls, points: Iterable[Hashable]) -> FiniteSpace:
        pts = tuple(points)
        full = (1 << len(pts)) - 1
        return cls(pts, nbhd=[full] * len(pts))

    @classmethod
    def sierpinski(cls, open_point: Hashable = "a", closed_point: Hashable = "b") -> FiniteSpace:
        return cls([open_point, closed_point], [[], [open_point], [open_point, closed_point]])

    # masks ------------------------------------------------------------------

    def mask(self, pts: Iterable[Hashable]) -> int:
        m = 0
        for p in pts:
            m |= 1 << self.index[p]
        return m

    def subset(self, mask: int) -> frozenset:
        return frozenset(self.points[i] for i in bits(mask))

    def is_open(self, mask: int) -> bool:
        return all(not self.nbhd[i] & ~mask for i in bits(mask))

    def interior(self, mask: int) -> int:
        out = 0
        for i in bits(mask):
            if not self.nbhd[i] & ~mask:
                out |= self.nbhd[i]
        return out

    def opens(self) -> tuple[int, ...]:
        """All open masks, ordered by (size, mask)."""
        if self._opens is None:
            found = {0}
            for n in set(self.nbhd):
                found |= {m | n for m in found}
            self._opens = tuple(sorted(found, key=_mask_key))
        return self._opens

    def is_t0(self) -> bool:
        return len(set(self.nbhd)) == len(self.nbhd)

    def is_discrete(self) -> bool:
        return all(n == 1 << i for i, n in enumerate(self.nbhd))

    def __len__(self) -> int:
        return len(self.points)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, FiniteSpace)
            and self.points == other.points
            and self.nbhd == other.nbhd
        )

    def __hash__(self) -> int:
        return hash((self.points, self.nbhd))

    def __repr__(self) -> str:
        if len(self.points) <= 6:
            opens = [sorted(self.subset(u), key=str) for u in self.opens()]
            return f"FiniteSpace({list(self.points)!r}, {opens!r})"
        return f"FiniteSpace(<{len(self.points)} points>)"


def product_space(
    left: FiniteSpace,
    right: FiniteSpace,
    name: Callable[[Hashable, Hashable], Hashable] = lambda a, b: (a, b),
) -> FiniteSpace:
    pts = []
    coords = []
    for i, a in enumerate(left.points):
        for j, b in enumerate(right.points):
            pts.append(name(a, b))
            coords.append((i, j))
    nb = []
    for i, j in coords:
        m = 0
        for k, (i2, j2) in enumerate(coords):
            if left.nbhd[i] >> i2 & 1 and right.nbhd[j] >> j2 & 1:
                m |= 1 << k
        nb.append(m)
    return FiniteSpace(pts, nbhd=nb)


class ContinuousMap:
    """A point map between finite spaces.

    Continuity is enforced unless ``check=False``; unchecked maps are how raw
    groupoid and action data reach the verdict-valued checkers.
    """

    def __init__(
        self,
        source: FiniteSpace,
        target: FiniteSpace,
        mapping: Mapping[Hashable, Hashable] | Callable[[Hashable], Hashable] | None = None,
        *,
        table: Sequence[int] | None = None,
        check: bool = True,
    ):
        self.source = source
        self.target = target
        if table is None:
            get = mapping if callable(mapping) else mapping.__getitem__
            try:
                table = [target.index[get(p)] for p in source.points]
            except KeyError as exc:
                raise ContinuityError(f"map is undefined or leaves the target at {exc}") from None
        self.table = tuple(table)
        fib = [0] * len(target.points)
        for i, t in enumerate(self.table):
            fib[t] |= 1 << i
        self._fibers = tuple(fib)
        if check:
            v = self.continuity()
            if not v:
                raise ContinuityError(f"map is not continuous: {v}", witness=v.witness)

    def __call__(self, point: Hashable) -> Hashable:
        return self.target.points[self.table[self.source.index[point]]]

    def image(self, mask: int) -> int:
        out = 0
        for i in bits(mask):
            out |= 1 << self.table[i]
        return out

    def preimage(self, mask: int) -> int:
        out = 0
        for t in bits(mask):
            out |= self._fibers[t]
        return out

    def continuity(self) -> Verdict:
        for t, n in enumerate(self.target.nbhd):
            if not self.source.is_open(self.preimage(n)):
                return fail("continuity", self.target.points[t], detail="preimage of a basic open is not open")
        return PASS

    def is_injective(self) -> bool:
        return len(set(self.table)) == len(self.table)

    def as_dict(self) -> dict:
        return {p: self.target.points[t] for p, t in zip(self.source.points, self.table)}

    def then(self, other: ContinuousMap) -> ContinuousMap:
        """``other ∘ self``."""
        return ContinuousMap(
            self.source, other.target, table=[other.table[t] for t in self.table], check=False
        )

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, ContinuousMap)
            and self.source == other.source
            and self.target == other.target
            and self.table == other.table
        )

    def __hash__(self) -> int:
        return hash(self.table)

    def __repr__(self) -> str:
        return f"ContinuousMap({self.as_dict()!r})"


def identity_map(space: FiniteSpace) -> ContinuousMap:
    return ContinuousMap(space, space, table=range(len(space.points)), check=False)


def is_open_map(f: ContinuousMap) -> Verdict:
    """Image of every open is open (images preserve unions, so neighbourhoods suffice)."""
    for i, n in enumerate(f.source.nbhd):
        if not f.target.is_open(f.image(n)):
            return fail(
                "openness", f.source.points[i],
                detail=f"image {sorted(f.target.subset(f.image(n)), key=str)} of a basic open is not open",
            )
    return PASS


def is_local_homeomorphism(f: ContinuousMap) -> Verdict:
    """Every point has an open neighbourhood mapped homeomorphically onto an open set.

    The minimal neighbourhood is tested: if any open neighbourhood works, so
    does every smaller open one.
    """
    src, tgt = f.source, f.target
    for i, n in enumerate(src.nbhd):
        img = f.image(n)
        if img.bit_count() != n.bit_count():
            return fail("local-injectivity", src.points[i])
        if not tgt.is_open(img):
            return fail("local-openness", src.points[i])
        for j in bits(n):
            if not tgt.is_open(f.image(src.nbhd[j])):
                return fail("local-openness", src.points[i], src.points[j])
    return PASS


@dataclass(frozen=True)
class Pullback:
    """The fibred product ``{(a, b) | f(a) = g(b)}`` with its projections."""

    space: FiniteSpace
    pi1: ContinuousMap
    pi2: ContinuousMap

    def pure(self, left_mask: int, right_mask: int) -> int:
        """Mask of ``(left × right) ∩ P``: the pullback image of ``left ⊗ right``."""
        return self.pi1.preimage(left_mask) & self.pi2.preimage(right_mask)


def pullback_space(f: ContinuousMap, g: ContinuousMap) -> Pullback:
    if f.target != g.target:
        raise TopologyError("pullback requires maps with a common codomain")
    left, right = f.source, g.source
    coords = [
        (i, j)
        for i in range(len(left.points))
        for j in range(len(right.points))
        if f.table[i] == g.table[j]
    ]
    pts = [(left.points[i], right.points[j]) for i, j in coords]
    nb = []
    for i, j in coords:
        m = 0
        for k, (i2, j2) in enumerate(coords):
            if left.nbhd[i] >> i2 & 1 and right.nbhd[j] >> j2 & 1:
                m |= 1 << k
        nb.append(m)
    space = FiniteSpace(pts, nbhd=nb)
    pi1 = ContinuousMap(space, left, table=[i for i, _ in coords], check=False)
    pi2 = ContinuousMap(space, right, table=[j for _, j in coords], check=False)
    return Pullback(space, pi1, pi2)


# --------------------------------------------------------------------------
# frames


class Frame:
    """A finite lattice on indices ``0..n-1``.

    ``below[i]`` is the bitmask of indices ``j <= i``.  Construction checks
    the lattice property; the frame (distributive) law is checked by
    :meth:`check_frame_law`, since :func:`points_of_frame` must be able to
    receive and reject non-distributive lattices.
    """

    def __init__(
        self,
        labels: Sequence[Any],
        below: Sequence[int],
        *,
        space: FiniteSpace | None = None,
        check: bool = True,
    ):
        self.labels = tuple(labels)
        self.below = tuple(below)
        self.space = space
        n = len(self.labels)
        above = [0] * n
        for i, b in enumerate(self.below):
            for j in bits(b):
                above[j] |= 1 << i
        self.above = tuple(above)
        self.index = {lab: i for i, lab in enumerate(self.labels)}
        self._by_below = {b: i for i, b in enumerate(self.below)}
        self._by_above = {a: i for i, a in enumerate(self.above)}
        if n == 0:
            raise NotALattice("a lattice has at least one element")
        if check:
            self._check_lattice()
        self.bottom = self._by_above[(1 << n) - 1]
        self.top = self._by_below[(1 << n) - 1]
        self._ji: tuple[int, ...] | None = None

    @classmethod
    def from_order(cls, labels: Sequence[Any], leq: Callable[[Any, Any], bool]) -> Frame:
        labels = tuple(labels)
        n = len(labels)
        below = []
        for i in range(n):
            m = 0
            for j in range(n):
                if leq(labels[j], labels[i]):
                    m |= 1 << j
            below.append(m)
        for i in range(n):
            if not below[i] >> i & 1:
                raise NotALattice(f"order is not reflexive at {labels[i]!r}")
            for j in bits(below[i]):
                if j != i and below[j] >> i & 1:
                    raise NotALattice(f"order is not antisymmetric: {labels[i]!r}, {labels[j]!r}")
                if below[j] & ~below[i]:
                    raise NotALattice(f"order is not transitive below {labels[i]!r}")
        return cls(labels, below)

    def _check_lattice(self) -> None:
        n = len(self.labels)
        if (1 << n) - 1 not in self._by_above or (1 << n) - 1 not in self._by_below:
            raise NotALattice("no bottom or no top element")
        for i in range(n):
            for j in range(i + 1, n):
                if self.above[i] & self.above[j] not in self._by_above:
                    raise NotALattice(f"no join for {self.labels[i]!r}, {self.labels[j]!r}", witness=(i, j))
                if self.below[i] & self.below[j] not in self._by_below:
                    raise NotALattice(f"no meet for {self.labels[i]!r}, {self.labels[j]!r}", witness=(i, j))

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[int]:
        return iter(range(len(self.labels)))

    def leq(self, i: int, j: int) -> bool:
        return bool(self.below[j] >> i & 1)

    def join(self, i: int, j: int) -> int:
        return self._by_above[self.above[i] & self.above[j]]

    def meet(self, i: int, j: int) -> int:
        return self._by_below[self.below[i] & self.below[j]]

    def join_all(self, items: Iterable[int]) -> int:
        up = (1 << len(self.labels)) - 1
        for i in items:
            up &= self.above[i]
        return self._by_above[up]

    def meet_all(self, items: Iterable[int]) -> int:
        down = (1 << len(self.labels)) - 1
        for i in items:
            down &= self.below[i]
        return self._by_below[down]

    def rank(self, i: int) -> int:
        return self.below[i].bit_count()

    def down(self, i: int) -> list[int]:
        return list(bits(self.below[i]))

    def join_irreducibles(self) -> tuple[int, ...]:
        if self._ji is None:
            if self.space is not None:
                self._ji = tuple(sorted({self.index[n] for n in self.space.nbhd}))
            else:
                self._ji = tuple(
                    i for i in range(len(self.labels))
                    if i != self.bottom and self.join_all(bits(self.below[i] ^ (1 << i))) != i
                )
        return self._ji

    def irreducibles_below(self, i: int) -> list[int]:
        return [j for j in self.join_irreducibles() if self.below[i] >> j & 1]

    def check_frame_law(self) -> Verdict:
        """Distributivity, tested as: every join-irreducible is join-prime."""
        if self.space is not None:
            return PASS
        n = len(self.labels)
        for j in self.join_irreducibles():
            for a in range(n):
                if self.leq(j, a):
                    continue
                for b in range(a + 1, n):
                    if not self.leq(j, b) and self.leq(j, self.join(a, b)):
                        return fail("frame-law", a, b, j, detail="meet does not distribute over join")
        return PASS

    # spatial conveniences
    def element(self, pts: Iterable[Hashable]) -> int:
        """Index of the open set with the given points (spatial frames only)."""
        return self.index[self.space.mask(pts)]

    def points_of(self, i: int) -> frozenset:
        return self.space.subset(self.labels[i])

    def __repr__(self) -> str:
        return f"Frame(<{len(self.labels)} elements>)"


def frame_of_space(space: FiniteSpace) -> Frame:
    """The frame of opens of ``space``, indexed in (size, mask) order."""
    if space._frame is None:
        labels = space.opens()
        below = []
        for u in labels:
            m = 0
            for j, v in enumerate(labels):
                if not v & ~u:
                    m |= 1 << j
            below.append(m)
        space._frame = Frame(labels, below, space=space, check=False)
    return space._frame


# --------------------------------------------------------------------------
# maps between frames


def join_preservation(source: Frame, target: Frame, fn: Callable[[int], int]) -> Verdict:
    """Whether ``fn`` preserves all joins.

    On a distributive source, join-irreducibles are join-prime, so it is
    enough that ``fn`` sends bottom to bottom and each ``y`` to the join of
    the images of the irreducibles under ``y``.  A failing witness is the
    element and the subset whose join is not preserved.
    """
    if fn(source.bottom) != target.bottom:
        return fail("join-preservation", (), detail="empty join not preserved")
    for y in source:
        parts = source.irreducibles_below(y)
        if target.join_all(fn(j) for j in parts) != fn(y):
            return fail("join-preservation", y, tuple(parts))
    return PASS


def meet_preservation(source: Frame, target: Frame, fn: Callable[[int], int]) -> Verdict:
    if fn(source.top) != target.top:
        return fail("meet-preservation", (), detail="empty meet not preserved")
    for a in source:
        for b in range(a + 1, len(source)):
            if fn(source.meet(a, b)) != target.meet(fn(a), fn(b)):
                return fail("meet-preservation", a, b)
    return PASS


@dataclass(frozen=True)
class LatticeMap:
    source: Frame
    target: Frame
    table: tuple[int, ...]

    def __call__(self, i: int) -> int:
        return self.table[i]


@dataclass(frozen=True)
class SupMap(LatticeMap):
    """A map of frames preserving all joins (including bottom)."""

    def __post_init__(self):
        v = join_preservation(self.source, self.target, self.table.__getitem__)
        if not v:
            raise NotJoinPreserving(f"map does not preserve joins: {v}", witness=v.witness)


def right_adjoint(f: LatticeMap) -> LatticeMap:
    """``g(x) = ⋁{y | f(y) <= x}``; requires ``f`` to preserve joins."""
    v = join_preservation(f.source, f.target, f.table.__getitem__)
    if not v:
        raise NotJoinPreserving(f"no right adjoint: {v}", witness=v.witness)
    src, tgt = f.source, f.target
    table = tuple(src.join_all(y for y in src if tgt.leq(f.table[y], x)) for x in tgt)
    return LatticeMap(tgt, src, table)


def galois_check(f: LatticeMap, g: LatticeMap) -> Verdict:
    """``f(y) <= x  iff  y <= g(x)`` for every pair."""
    for y in f.source:
        for x in f.target:
            if f.target.leq(f.table[y], x) != f.source.leq(y, g.table[x]):
                return fail("galois", y, x)
    return PASS


def direct_image(f: ContinuousMap) -> SupMap:
    """``U ↦ f(U)`` on frames of opens; exists only when ``f`` is open."""
    src = frame_of_space(f.source)
    tgt = frame_of_space(f.target)
    table = []
    for u in src.labels:
        img = f.image(u)
        if img not in tgt.index:
            raise OpennessViolation(
                f"image {sorted(f.target.subset(img), key=str)} of "
                f"{sorted(f.source.subset(u), key=str)} is not open",
                witness=f.source.subset(u),
            )
        table.append(tgt.index[img])
    return SupMap(src, tgt, tuple(table))


def inverse_image(f: ContinuousMap) -> SupMap:
    src = frame_of_space(f.source)
    tgt = frame_of_space(f.target)
    return SupMap(tgt, src, tuple(src.index[f.preimage(v)] for v in tgt.labels))


def points_of_frame(frame: Frame) -> tuple[FiniteSpace, tuple[int, ...]]:
    """Spatialize a finite frame.

    Points are the frame homomorphisms onto the two-element frame, i.e. the
    prime filters ``↑j`` for join-irreducible ``j``.  Returns the space and
    the isomorphism as a tuple sending each frame index to its open mask.
    When the frame came from a T0 space the original point names are reused.
    """
    ji = frame.join_irreducibles()
    if frame.space is not None and frame.space.is_t0():
        by_nbhd = {n: p for p, n in zip(frame.space.points, frame.space.nbhd)}
        names = [by_nbhd[frame.labels[j]] for j in ji]
    else:
        names = [frame.labels[j] for j in ji]

    def phi(a: int) -> int:
        return sum(1 << k for k, j in enumerate(ji) if frame.leq(j, a))

    iso = tuple(phi(a) for a in frame)
    for a in frame:
        for b in range(a + 1, len(frame)):
            if iso[frame.join(a, b)] != iso[a] | iso[b]:
                raise NotDistributive(
                    f"{frame.labels[a]!r} and {frame.labels[b]!r} break the frame law",
                    witness=(a, b),
                )
    nb = [iso[j] for j in ji]
    space = FiniteSpace(names, nbhd=nb)
    return space, iso


def find_isomorphism(
    left: Frame,
    right: Frame,
    accept: Callable[[tuple[int, ...]], bool] | None = None,
) -> tuple[int, ...] | None:
    """Search an order isomorphism ``left -> right`` (as a table), pruning by rank.

    ``accept`` filters complete candidates (e.g. for action preservation).
    """
    n = len(left)
    if n != len(right):
        return None
    sig_l = [(left.rank(i), left.above[i].bit_count()) for i in left]
    sig_r = [(right.rank(i), right.above[i].bit_count()) for i in right]
    if sorted(sig_l) != sorted(sig_r):
        return None
    order = sorted(left, key=lambda i: sig_l[i])
    image = [-1] * n
    used = [False] * n

    def extend(k: int) -> tuple[int, ...] | None:
        if k == n:
            cand = tuple(image)
            return cand if accept is None or accept(cand) else None
        i = order[k]
        for c in right:
            if used[c] or sig_r[c] != sig_l[i]:
                continue
            if any(
                left.leq(j, i) != right.leq(image[j], c) or left.leq(i, j) != right.leq(c, image[j])
                for j in order[:k]
            ):
                continue
            image[i] = c
            used[c] = True
            found = extend(k + 1)
            if found is not None:
                return found
            used[c] = False
        image[i] = -1
        return None

    return extend(0)
