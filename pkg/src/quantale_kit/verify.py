"""Corpus-wide verification: every scope runs its checkers over every instance."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Sequence

from .corpus import (
    CorpusTooLarge,
    enumerate_glocales,
    enumerate_qlocales,
    estimate_glocales,
    groupoid_corpus,
    instance_cap,
    sample_glocales,
)
from .errors import ConsistencyError, KitError, NotOpen, OracleBound, Verdict
from .groupoid import (
    EquivariantMap,
    FiniteGroupoid,
    GLocale,
    check_equivariant,
    check_groupoid,
    is_etale,
    self_action,
)
from .qmodule import (
    QLocale,
    check_actions_coincide,
    check_alpha_star,
    check_category_isomorphism,
    check_lax_inequality,
    check_module_hom,
    check_tensor_realization,
    continuous_maps,
    glocale_of_qlocale,
    inverse_image_table,
    module_of_glocale,
)
from .quantale import (
    InvQuantale,
    check_inverse_quantal_frame,
    check_mu_star,
    check_partial_unit_meet,
    check_support,
    check_support_derived,
    opens_quantale,
    support,
)
from .report import Report, result
from .serial import dumps
from .sheaf import (
    check_bisections,
    check_sheaf_category_isomorphisms,
    check_support_laws,
    is_etale_qlocale,
    local_sections,
    open_qlocale,
)
from .tensor import DEFAULT_CAP

SCOPES = (
    "projection-identity",
    "functor-faithful",
    "lax",
    "actions-coincide",
    "alpha-star",
    "mu-star",
    "bijection",
    "cat-iso",
    "support-laws",
    "sections",
    "sheaf-cat-iso",
    "inverse-quantal-frame",
    "tensor",
)

# the independent Q-locale search is skipped above this quantale size and
# limited to carriers on at most this many points
QLOCALE_SEARCH_MAX_Q = 64
QLOCALE_SEARCH_MAX_POINTS = 3


@dataclass
class Bounds:
    max_arrows: int = 3
    max_points: int = 3
    groupoids: tuple[str, ...] = ()
    named: bool = True
    seed: int | None = None
    samples: int = 20


@dataclass
class Case:
    groupoid: FiniteGroupoid
    quantale: InvQuantale
    glocales: list[GLocale]
    _modules: list[QLocale] | None = None

    @property
    def name(self) -> str:
        return self.groupoid.name or "?"

    @property
    def modules(self) -> list[QLocale]:
        if self._modules is None:
            self._modules = [module_of_glocale(self.groupoid, A, self.quantale) for A in self.glocales]
        return self._modules


@dataclass
class Corpus:
    cases: list[Case] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)


def select_groupoids(bounds: Bounds) -> list[FiniteGroupoid]:
    if bounds.groupoids:
        pool = groupoid_corpus(4, max(bounds.max_points, 3))
        by_name = {G.name: G for G in pool}
        missing = [n for n in bounds.groupoids if n not in by_name]
        if missing:
            raise KeyError(f"unknown groupoids {missing}; known: {sorted(by_name)}")
        return [by_name[n] for n in bounds.groupoids]
    return groupoid_corpus(bounds.max_arrows, bounds.max_points, named=bounds.named)


def build_corpus(bounds: Bounds) -> Corpus:
    """Groupoids within the bounds plus named examples, each with its G-locales.

    Refuses with :class:`CorpusTooLarge` when the exhaustive candidate count
    passes ``QUANTALE_KIT_MAX_INSTANCES``; ``bounds.seed`` switches to
    random sampling instead.
    """
    groupoids = select_groupoids(bounds)
    corpus = Corpus()
    if bounds.seed is None:
        estimate = sum(estimate_glocales(G, bounds.max_points) for G in groupoids)
        cap = instance_cap()
        if estimate > cap:
            raise CorpusTooLarge(estimate, cap, "verification corpus")
    for G in groupoids:
        Q = opens_quantale(G)
        if bounds.seed is None:
            glocales = enumerate_glocales(G, bounds.max_points, check_size=False)
        else:
            glocales = sample_glocales(G, bounds.max_points, bounds.samples, bounds.seed)
        corpus.cases.append(Case(G, Q, glocales))
    mode = "exhaustive" if bounds.seed is None else f"sampled (seed {bounds.seed})"
    corpus.notes.append(
        f"{mode} corpus: {len(corpus.cases)} groupoids, "
        f"{sum(len(c.glocales) for c in corpus.cases)} G-locales with at most {bounds.max_points} points"
    )
    return corpus


# --------------------------------------------------------------------------
# scopes


def _guard(fn: Callable, *args):
    """Run a checker, turning library exceptions into a failing verdict."""
    try:
        return fn(*args)
    except (KitError, ConsistencyError, ValueError) as e:
        return Verdict(False, type(e).__name__, tuple(getattr(e, "witness", None) or ()), str(e))


def scope_projection_identity(case: Case, report: Report) -> None:
    G = case.groupoid
    for A in case.glocales:
        bad = [(g, x) for g, x in A.pullback.space.points if G.comp[g, G.u(A.p(x))] != g]
        report.add(result("projection-identity", A.name, not bad, detail=f"witness {bad[0]}" if bad else ""))


def scope_actions_coincide(case: Case, report: Report) -> None:
    for A, M in zip(case.glocales, case.modules):
        report.add(result("actions-coincide", A.name, _guard(check_actions_coincide, case.groupoid, A, M)))


def scope_alpha_star(case: Case, report: Report) -> None:
    for A, M in zip(case.glocales, case.modules):
        report.add(result("alpha-star", A.name, _guard(check_alpha_star, M, A)))


def scope_mu_star(case: Case, report: Report) -> None:
    report.add(result("mu-star", case.name, _guard(check_mu_star, case.quantale)))


def scope_inverse_quantal_frame(case: Case, report: Report) -> None:
    Q = case.quantale
    v = _guard(check_inverse_quantal_frame, Q)
    if v:
        v = _guard(check_partial_unit_meet, Q)
    report.add(result("inverse-quantal-frame", case.name, v, detail=f"|Q|={len(Q)}, |I(Q)|={len(Q.partial_units)}"))


def _functor_data(case: Case):
    """Yield ``(i, j, equivariant?, f, f*, module hom?)`` over all continuous maps between corpus objects."""
    Q = case.quantale
    for (i, A), (j, B) in product(enumerate(case.glocales), repeat=2):
        MA, MB = case.modules[i], case.modules[j]
        for f in continuous_maps(A.space, B.space):
            eq = bool(check_equivariant(EquivariantMap(A, B, f)))
            fstar = inverse_image_table(f, MA, MB)
            yield i, j, eq, f, fstar, bool(check_module_hom(Q, MB, MA, fstar))


def scope_functor_faithful(case: Case, report: Report) -> None:
    seen: dict[tuple, tuple] = {}
    count = 0
    for i, j, eq, f, fstar, hom in _functor_data(case):
        if not eq:
            continue
        count += 1
        if not hom:
            report.add(result("functor-faithful", case.name, False,
                              detail=f"f* of an equivariant map {i}->{j} is not a module hom"))
            return
        key = (i, j, fstar)
        if key in seen:
            report.add(result("functor-faithful", case.name, False,
                              detail=f"two equivariant maps {i}->{j} share f*"))
            return
        seen[key] = f.table
    report.add(result("functor-faithful", case.name, True, detail=f"{count} equivariant maps"))


def scope_lax(case: Case, report: Report) -> None:
    count = strict = 0
    for i, j, eq, f, fstar, hom in _functor_data(case):
        if not hom:
            continue
        count += 1
        A, B = case.glocales[i], case.glocales[j]
        v = _guard(check_lax_inequality, A, B, f, case.modules[i], case.modules[j])
        if not v:
            report.add(result("lax", f"{A.name}->{B.name}", v))
            return
        strict += v.detail == "strict"
    report.add(result("lax", case.name, True, detail=f"{count} module-hom-inducing maps, {strict} strict"))


def scope_cat_iso(case: Case, report: Report) -> None:
    try:
        c = check_category_isomorphism(case.groupoid, case.glocales, case.quantale)
    except (KitError, ValueError) as e:
        report.add(result("cat-iso", case.name, False, detail=str(e)))
        return
    detail = (f"{c.objects} objects, {c.pairs} pairs, {c.equivariant_maps} equivariant maps, "
              f"{c.module_homs} module homs ({c.spatial_homs} spatial, {c.nonspatial_homs} non-spatial)")
    report.add(result("cat-iso", case.name, c.verdict, detail=detail))


def _qlocale_side(case: Case, max_points: int) -> tuple[list[QLocale] | None, str]:
    if len(case.quantale) > QLOCALE_SEARCH_MAX_Q:
        return None, f"|Q| = {len(case.quantale)} exceeds {QLOCALE_SEARCH_MAX_Q}"
    try:
        return enumerate_qlocales(case.quantale, max_points), ""
    except OracleBound as e:
        return None, str(e)


def scope_bijection(case: Case, report: Report, max_points: int = 3) -> None:
    G, Q = case.groupoid, case.quantale
    for A, M in zip(case.glocales, case.modules):
        try:
            back = glocale_of_qlocale(G, M)
            ok = dumps("glocale", back) == dumps("glocale", A)
        except KitError as e:
            report.add(result("bijection", A.name, False, detail=str(e)))
            continue
        report.add(result("bijection", A.name, ok, detail="" if ok else "G-locale roundtrip differs"))
    qpoints = min(max_points, QLOCALE_SEARCH_MAX_POINTS)
    found, why = _qlocale_side(case, qpoints)
    if found is None:
        report.notes.append(f"{case.name}: Q-locales not enumerated independently: {why}")
        return
    bad = 0
    for X in found:
        try:
            again = module_of_glocale(G, glocale_of_qlocale(G, X), Q)
            bad += dumps("qlocale", again) != dumps("qlocale", X)
        except KitError:
            bad += 1
    n_geo = sum(1 for A in case.glocales if len(A.space) <= qpoints)
    ok = bad == 0 and len(found) == n_geo
    report.add(result("bijection", f"{case.name}/qlocales", ok,
                      detail=f"{len(found)} Q-locales on at most {qpoints} points found from the module axioms, "
                             f"{n_geo} G-locales, {bad} bad roundtrips"))


def _open_modules(case: Case):
    for A, M in zip(case.glocales, case.modules):
        try:
            yield A, open_qlocale(case.quantale, M)
        except NotOpen:
            yield A, None


def scope_support_laws(case: Case, report: Report) -> None:
    Q = case.quantale
    sp = support(Q)
    v = _guard(check_support, Q, sp)
    if v:
        v = _guard(check_support_derived, Q, sp)
    report.add(result("quantale-support", case.name, v))
    closed = 0
    for A, OM in _open_modules(case):
        if OM is None:
            closed += 1
            continue
        report.add(result("support-laws", A.name, _guard(check_support_laws, Q, OM)))
    if closed:
        report.notes.append(f"{case.name}: {closed} G-locales with non-open projection have no support")


def scope_sections(case: Case, report: Report) -> None:
    G, Q = case.groupoid, case.quantale
    try:
        OQ = open_qlocale(Q, module_of_glocale(G, self_action(G), Q))
        gamma = local_sections(OQ)
        v = check_bisections(Q, OQ)
        report.add(result("sections", f"{case.name}/Q", v,
                          detail=f"|Γ_Q|={len(gamma)}, |I(Q)|={len(Q.partial_units)}"))
    except (KitError, ConsistencyError) as e:
        report.add(result("sections", f"{case.name}/Q", False, detail=str(e)))
    for A, OM in _open_modules(case):
        if OM is None:
            continue
        try:
            v = is_etale_qlocale(OM)
            report.add(result("sections", A.name, True, detail="étale" if v else "open, not étale"))
        except ConsistencyError as e:
            report.add(result("sections", A.name, False, detail=str(e)))


def scope_sheaf_cat_iso(case: Case, report: Report) -> None:
    try:
        c = check_sheaf_category_isomorphisms(case.groupoid, case.glocales, case.quantale)
    except (KitError, ConsistencyError, ValueError) as e:
        report.add(result("sheaf-cat-iso", case.name, False, detail=str(e)))
        return
    detail = f"{c.sheaves} sheaves, {c.pairs} pairs, {c.equivariant_maps} equivariant maps, {c.sheaf_homs} sheaf homs"
    report.add(result("sheaf-cat-iso", case.name, c.verdict, detail=detail))


def scope_tensor(case: Case, report: Report) -> None:
    Q = case.quantale
    skipped = 0
    for A, M in zip(case.glocales, case.modules):
        if len(Q) > DEFAULT_CAP or len(M.carrier) > DEFAULT_CAP:
            skipped += 1
            continue
        report.add(result("tensor", A.name, _guard(check_tensor_realization, M)))
    if skipped:
        report.notes.append(f"{case.name}: {skipped} modules exceed the tensor oracle bound of {DEFAULT_CAP}")


RUNNERS: dict[str, Callable[[Case, Report], None]] = {
    "projection-identity": scope_projection_identity,
    "functor-faithful": scope_functor_faithful,
    "lax": scope_lax,
    "actions-coincide": scope_actions_coincide,
    "alpha-star": scope_alpha_star,
    "mu-star": scope_mu_star,
    "bijection": scope_bijection,
    "cat-iso": scope_cat_iso,
    "support-laws": scope_support_laws,
    "sections": scope_sections,
    "sheaf-cat-iso": scope_sheaf_cat_iso,
    "inverse-quantal-frame": scope_inverse_quantal_frame,
    "tensor": scope_tensor,
}


def verify(scopes: Sequence[str], bounds: Bounds | None = None, corpus: Corpus | None = None) -> Report:
    """Run the named scopes (or ``"all"``) over the corpus, in a fixed order."""
    bounds = bounds or Bounds()
    chosen = list(SCOPES) if "all" in scopes else list(scopes)
    unknown = [s for s in chosen if s not in RUNNERS]
    if unknown:
        raise ValueError(f"unknown scopes {unknown}; expected some of {list(SCOPES) + ['all']}")
    start = time.perf_counter()
    corpus = corpus or build_corpus(bounds)
    report = Report(f"verify {' '.join(chosen)}")
    report.notes.extend(corpus.notes)
    for case in corpus.cases:
        G = case.groupoid
        report.add(result("groupoid-axioms", case.name, check_groupoid(G)))
        report.add(result("etale", case.name, _guard(is_etale, G)))
        for scope in chosen:
            if scope == "bijection":
                scope_bijection(case, report, bounds.max_points)
            else:
                RUNNERS[scope](case, report)
    report.wall_time = time.perf_counter() - start
    return report
