"""Command-line interface: check, quantale, convert, verify, enumerate.

Exit status is 0 when every law passes, 1 when some law fails and 2 for
input errors (unreadable files, unknown names, refused bounds).
"""

from __future__ import annotations

import argparse
import difflib
import json
import os
import sys
import time
from pathlib import Path
from typing import Sequence

from .corpus import (
    CorpusTooLarge,
    discrete_groupoids,
    enumerate_glocales,
    enumerate_qlocales,
    estimate_glocales,
    groupoid_corpus,
    identity_groupoids,
    groupoid_key,
    instance_cap,
    sample_glocales,
    t0_spaces,
)
from .errors import NoPointRealization, NotAFrameHom, NotEtale
from .groupoid import (
    FiniteGroupoid,
    check_equivariant,
    check_glocale,
    check_groupoid,
    identity_groupoid,
    is_etale,
    self_action,
)
from .order import is_open_map
from .qmodule import (
    check_actions_coincide,
    check_alpha_star,
    check_lax_inequality,
    check_module_hom,
    check_qlocale,
    glocale_of_qlocale,
    inverse_image_table,
    module_of_glocale,
)
from .quantale import (
    check_inverse_quantal_frame,
    check_mu_star,
    check_partial_unit_meet,
    opens_quantale,
    support,
)
from .report import Report, result
from .serial import (
    InputError,
    InstanceFile,
    InvalidInstance,
    canonical_text,
    document,
    dumps,
    load,
    loads,
)
from .sheaf import check_support_laws, is_etale_qlocale, local_sections, open_qlocale
from .verify import SCOPES, Bounds, Case, Corpus, verify

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _fmt_set(names) -> str:
    return "{" + ", ".join(sorted(str(n) for n in names)) + "}"


def _emit(report: Report, args) -> int:
    sys.stdout.write(report.render(args.format, timing=not args.no_timing,
                                   failures_only=getattr(args, "failures_only", False)))
    return EXIT_OK if report.ok else EXIT_FAIL


# --------------------------------------------------------------------------
# check


def _check_groupoid(G: FiniteGroupoid, name: str, report: Report) -> bool:
    v = check_groupoid(G)
    report.add(result("groupoid-axioms", name, v))
    if not v:
        return False
    et = is_etale(G)
    if not et:
        report.notes.append(f"{name} is not étale ({et}); quantale checks skipped")
        return False
    report.add(result("etale", name, et))
    return True


def cmd_check(args) -> int:
    start = time.perf_counter()
    inst = load(args.path, allow_invalid=True)
    name = inst.metadata.get("name") or Path(args.path).name
    report = Report(f"check {args.path} ({inst.kind})")
    G = inst.groupoid
    etale = _check_groupoid(G, name if inst.kind == "groupoid" else f"{name}:groupoid", report)
    if inst.kind == "groupoid":
        if etale:
            Q = opens_quantale(G)
            v = check_inverse_quantal_frame(Q)
            if v:
                v = check_partial_unit_meet(Q)
            report.add(result("inverse-quantal-frame", name, v, detail=f"|Q|={len(Q)}, |I(Q)|={len(Q.partial_units)}"))
            report.add(result("mu-star", name, check_mu_star(Q)))
    elif inst.kind == "glocale":
        A = inst.value
        v = check_glocale(G, A)
        report.add(result("glocale-axioms", name, v))
        if v and etale:
            Q = opens_quantale(G)
            M = module_of_glocale(G, A, Q)
            report.add(result("module-of-action", name, check_qlocale(Q, M)))
            report.add(result("actions-coincide", name, check_actions_coincide(G, A, M)))
            report.add(result("alpha-star", name, check_alpha_star(M, A)))
            same = dumps("glocale", glocale_of_qlocale(G, M)) == dumps("glocale", A)
            report.add(result("bijection", name, same))
            if is_open_map(A.p):
                OM = open_qlocale(Q, M)
                report.add(result("support-laws", name, check_support_laws(Q, OM)))
                et = is_etale_qlocale(OM)
                report.add(result("sections", name, True, detail="étale" if et else "open, not étale"))
    elif inst.kind == "qlocale":
        X, Q = inst.value, inst.quantale
        v = check_qlocale(Q, X)
        report.add(result("qlocale-axioms", name, v))
        if v:
            try:
                A = glocale_of_qlocale(G, X)
                same = dumps("qlocale", module_of_glocale(G, A, Q)) == dumps("qlocale", X)
                report.add(result("bijection", name, same))
                report.add(result("alpha-star", name, check_alpha_star(X, A)))
            except (NotAFrameHom, NoPointRealization) as e:
                report.add(result("bijection", name, False, detail=str(e)))
    else:
        f = inst.value
        vs = check_glocale(G, f.source)
        vt = check_glocale(G, f.target)
        report.add(result("glocale-axioms", f"{name}:source", vs))
        report.add(result("glocale-axioms", f"{name}:target", vt))
        ve = check_equivariant(f)
        report.add(result("hom", name, ve))
        if vs and vt and ve and etale:
            Q = opens_quantale(G)
            MA, MB = module_of_glocale(G, f.source, Q), module_of_glocale(G, f.target, Q)
            fstar = inverse_image_table(f.map, MA, MB)
            report.add(result("functor-faithful", name, check_module_hom(Q, MB, MA, fstar)))
            report.add(result("lax", name, check_lax_inequality(f.source, f.target, f.map, MA, MB)))
    report.wall_time = time.perf_counter() - start
    return _emit(report, args)


# --------------------------------------------------------------------------
# quantale


def cmd_quantale(args) -> int:
    start = time.perf_counter()
    inst = load(args.path)
    if inst.kind != "groupoid":
        raise InputError(f"{args.path}: expected a groupoid file, got {inst.kind}")
    G = inst.groupoid
    v = is_etale(G)
    if not v:
        raise NotEtale(f"{args.path}: groupoid is not étale: {v}", witness=v.witness)
    Q = opens_quantale(G)
    out = sys.stdout
    show = set(args.show or [])
    name = inst.metadata.get("name") or Path(args.path).name
    out.write(f"O({name}): {len(Q)} elements, unit e = {_fmt_set(Q.arrows(Q.unit))}, "
              f"base locale {len(Q.base)} elements, {len(Q.partial_units)} partial units\n")
    if "elements" in show or "tables" in show:
        out.write("elements:\n")
        for a in Q.carrier:
            out.write(f"  {a}: {_fmt_set(Q.arrows(a))}\n")
    if "tables" in show:
        out.write("multiplication (row · column, by element index):\n")
        for a in Q.carrier:
            out.write("  " + " ".join(str(Q.mul(a, b)) for b in Q.carrier) + "\n")
        out.write("involution: " + " ".join(f"{a}->{Q.star(a)}" for a in Q.carrier) + "\n")
    if "partial-units" in show:
        out.write(f"partial units ({len(Q.partial_units)}):\n")
        for s in sorted(Q.partial_units, key=lambda s: (len(Q.arrows(s)), sorted(Q.arrows(s)))):
            out.write(f"  {_fmt_set(Q.arrows(s))}\n")
    if "support" in show:
        sp = support(Q)
        out.write("support:\n")
        for a in Q.carrier:
            out.write(f"  sp({_fmt_set(Q.arrows(a))}) = {_fmt_set(Q.arrows(sp(a)))}\n")
    if "sections" in show:
        OQ = open_qlocale(Q, module_of_glocale(G, self_action(G), Q))
        gamma = local_sections(OQ)
        out.write(f"local sections of Q ({len(gamma)}):\n")
        for s in gamma:
            out.write(f"  {_fmt_set(Q.arrows(s))}\n")
    if not args.verify:
        return EXIT_OK
    report = Report(f"quantale {args.path} --verify")
    v = check_inverse_quantal_frame(Q)
    if v:
        v = check_partial_unit_meet(Q)
    report.add(result("inverse-quantal-frame", name, v))
    report.add(result("mu-star", name, check_mu_star(Q)))
    report.wall_time = time.perf_counter() - start
    return _emit(report, args)


# --------------------------------------------------------------------------
# convert


def _groupoid_ref(path: Path, inst: InstanceFile, override: str | None):
    if override:
        return override
    raw = json.loads(path.read_text(encoding="utf-8"))["payload"].get("groupoid")
    return raw if isinstance(raw, str) else None


def _convert(inst: InstanceFile):
    G = inst.groupoid
    v = is_etale(G)
    if not v:
        raise NotEtale(f"groupoid is not étale: {v}", witness=v.witness)
    if inst.kind == "glocale":
        Q = opens_quantale(G)
        return "qlocale", module_of_glocale(G, inst.value, Q)
    if inst.kind == "qlocale":
        return "glocale", glocale_of_qlocale(G, inst.value)
    raise InputError(f"convert expects a glocale or qlocale file, got {inst.kind}")


def cmd_convert(args) -> int:
    path = Path(args.path)
    inst = load_with_groupoid(path, Path(args.groupoid)) if args.groupoid else load(path)
    if inst.kind not in ("glocale", "qlocale"):
        raise InputError(f"convert expects a glocale or qlocale file, got {inst.kind}")
    ref = _groupoid_ref(path, inst, args.groupoid)
    kind, value = _convert(inst)
    meta = dict(inst.metadata)
    text = dumps(kind, value, meta, groupoid_ref=ref)
    if args.roundtrip:
        back_kind, back = _convert(InstanceFile(kind, value, meta, inst.groupoid))
        original = canonical_text(document(inst.kind, inst.value, meta, groupoid_ref=ref))
        again = dumps(back_kind, back, meta, groupoid_ref=ref)
        if again == original:
            sys.stdout.write(f"roundtrip {inst.kind} -> {kind} -> {back_kind}: identical canonical form\n")
            return EXIT_OK
        sys.stdout.write(f"roundtrip {inst.kind} -> {kind} -> {back_kind}: DIFFERS\n")
        sys.stdout.writelines(difflib.unified_diff(
            original.splitlines(keepends=True), again.splitlines(keepends=True), "input", "roundtrip"))
        return EXIT_FAIL
    if args.output:
        out = Path(args.output)
        if isinstance(ref, str) and not args.groupoid:
            # keep a relative groupoid reference valid from the output's directory
            target = (path.parent / ref).resolve()
            ref = os.path.relpath(target, out.resolve().parent)
            text = dumps(kind, value, meta, groupoid_ref=ref)
        out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def load_with_groupoid(path: Path, groupoid_path: Path) -> InstanceFile:
    """Load ``path`` with its ``groupoid`` field replaced by the given file."""
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"{path}: {e}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("payload"), dict):
        raise InputError(f"{path}: missing payload")
    doc["payload"]["groupoid"] = str(groupoid_path.resolve())
    return loads(json.dumps(doc), base_dir=path.parent)


# --------------------------------------------------------------------------
# verify


def _resolve_groupoid(spec: str) -> FiniteGroupoid:
    p = Path(spec)
    if p.suffix == ".groupoid" or p.is_file():
        inst = load(p)
        if inst.kind != "groupoid":
            raise InputError(f"{spec}: expected a groupoid file")
        G = inst.value
        G.name = inst.metadata.get("name") or p.stem
        return G
    pool = groupoid_corpus(4, 3)
    for G in pool:
        if G.name == spec:
            return G
    raise InputError(f"unknown groupoid {spec!r}; known names: {[G.name for G in pool]}")


def cmd_verify(args) -> int:
    bounds = Bounds(
        max_arrows=args.max_arrows,
        max_points=args.max_points,
        named=not args.no_named,
        seed=args.seed,
        samples=args.samples,
    )
    corpus = None
    if args.groupoid:
        corpus = Corpus()
        groupoids = [_resolve_groupoid(g) for g in args.groupoid]
        if args.seed is None:
            estimate = sum(estimate_glocales(G, bounds.max_points) for G in groupoids)
            if estimate > instance_cap():
                raise CorpusTooLarge(estimate, instance_cap(), "verification corpus")
        for G in groupoids:
            v = is_etale(G)
            if not v:
                raise NotEtale(f"{G.name} is not étale: {v}", witness=v.witness)
            Q = opens_quantale(G)
            if args.seed is None:
                gl = enumerate_glocales(G, bounds.max_points, check_size=False)
            else:
                gl = sample_glocales(G, bounds.max_points, bounds.samples, args.seed)
            corpus.cases.append(Case(G, Q, gl))
        mode = "exhaustive" if args.seed is None else f"sampled (seed {args.seed})"
        corpus.notes.append(
            f"{mode} corpus: {', '.join(G.name for G in groupoids)} with "
            f"{sum(len(c.glocales) for c in corpus.cases)} G-locales of at most {bounds.max_points} points"
        )
    report = verify(args.scope, bounds, corpus)
    return _emit(report, args)


# --------------------------------------------------------------------------
# enumerate


def cmd_enumerate(args) -> int:
    docs: list[tuple[str, str, object, dict]] = []
    if args.kind == "spaces":
        for n in range(args.max_points + 1):
            if args.points is not None and n != args.points:
                continue
            for k, S in enumerate(t0_spaces(n)):
                G = identity_groupoid(S, f"space{n}.{k}")
                docs.append((f"space{n}.{k}", "groupoid", G, {"name": G.name, "bounds": {"points": n}}))
    elif args.kind == "groupoids":
        pool = discrete_groupoids(min(args.max_arrows, 4))
        if not args.discrete:
            pool += [G for G in identity_groupoids(args.max_arrows) if not G.objects.is_discrete()]
        seen = set()
        for G in pool:
            if args.objects is not None and len(G.objects) != args.objects:
                continue
            key = groupoid_key(G)
            if key in seen:
                continue
            seen.add(key)
            docs.append((G.name, "groupoid", G, {"name": G.name, "bounds": {"arrows": args.max_arrows}}))
    else:
        if not args.groupoid:
            raise InputError(f"enumerate {args.kind} needs --groupoid")
        G = _resolve_groupoid(args.groupoid)
        v = is_etale(G)
        if not v:
            raise NotEtale(f"{G.name} is not étale: {v}", witness=v.witness)
        bounds = {"points": args.points if args.points is not None else args.max_points}
        if args.kind == "glocales":
            if args.seed is not None:
                found = sample_glocales(G, args.max_points, args.samples, args.seed)
            else:
                found = enumerate_glocales(G, args.max_points, exact_points=args.points)
            for A in found:
                if args.discrete and not A.space.is_discrete():
                    continue
                docs.append((A.name, "glocale", A, {"name": A.name, "seed": args.seed, "bounds": bounds}))
        else:
            Q = opens_quantale(G)
            for k, X in enumerate(enumerate_qlocales(Q, args.max_points)):
                if args.points is not None and len(X.space) != args.points:
                    continue
                if args.discrete and not X.space.is_discrete():
                    continue
                label = f"{G.name}/q{k}"
                docs.append((label, "qlocale", X, {"name": label, "bounds": bounds}))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        ext = {"groupoid": "groupoid", "glocale": "glocale", "qlocale": "qlocale"}
        for k, (label, kind, value, meta) in enumerate(docs):
            safe = label.replace("/", "_")
            (out / f"{k:04d}-{safe}.{ext[kind]}").write_text(dumps(kind, value, meta), encoding="utf-8")
        sys.stderr.write(f"wrote {len(docs)} {args.kind} to {out}\n")
    else:
        for label, kind, value, meta in docs:
            sys.stdout.write(json.dumps(document(kind, value, meta), sort_keys=True, ensure_ascii=False) + "\n")
    if args.count:
        sys.stderr.write(f"{len(docs)} {args.kind}\n")
    return EXIT_OK


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="quantale-kit",
        description="Finite étale groupoids, their quantales of opens, and the action/module correspondence.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def output_flags(sp):
        sp.add_argument("--format", choices=["text", "json"], default="text", help="report format")
        sp.add_argument("--no-timing", action="store_true", help="omit wall time so output is reproducible")

    sp = sub.add_parser("check", help="validate an instance file and run its checker stack")
    sp.add_argument("path")
    output_flags(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("quantale", help="build O(G) for a groupoid file")
    sp.add_argument("path")
    sp.add_argument("--show", action="append",
                    choices=["elements", "tables", "partial-units", "support", "sections"],
                    help="what to print; repeatable")
    sp.add_argument("--verify", action="store_true", help="check the inverse quantal frame laws and mu_*")
    output_flags(sp)
    sp.set_defaults(func=cmd_quantale)

    sp = sub.add_parser("convert", help="G-locale to Q-locale or back")
    sp.add_argument("path")
    sp.add_argument("--groupoid", help="groupoid file to use instead of the one the instance names")
    sp.add_argument("--roundtrip", action="store_true", help="convert back and compare canonical forms")
    sp.add_argument("-o", "--output", help="write the converted instance here instead of stdout")
    sp.set_defaults(func=cmd_convert)

    sp = sub.add_parser("verify", help="run law checks over an exhaustive corpus")
    sp.add_argument("scope", nargs="+", choices=list(SCOPES) + ["all"])
    sp.add_argument("--max-arrows", type=int, default=3, help="bound on |G1| for generated groupoids")
    sp.add_argument("--max-points", type=int, default=3, help="bound on |X| for G-locales")
    sp.add_argument("--groupoid", action="append",
                    help="restrict to this groupoid (corpus name or .groupoid file); repeatable")
    sp.add_argument("--no-named", action="store_true", help="leave out the named examples")
    sp.add_argument("--seed", type=int, help="sample G-locales at random instead of enumerating")
    sp.add_argument("--samples", type=int, default=20, help="G-locales per groupoid when sampling")
    sp.add_argument("--failures-only", action="store_true")
    output_flags(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("enumerate", help="list instances up to isomorphism as JSON lines")
    sp.add_argument("kind", choices=["groupoids", "glocales", "qlocales", "spaces"])
    sp.add_argument("--max-arrows", type=int, default=3)
    sp.add_argument("--max-points", type=int, default=3)
    sp.add_argument("--points", type=int, help="only spaces with exactly this many points")
    sp.add_argument("--objects", type=int, help="only groupoids with exactly this many objects")
    sp.add_argument("--discrete", action="store_true", help="only discrete spaces / discrete groupoids")
    sp.add_argument("--groupoid", help="groupoid for glocales/qlocales (corpus name or file)")
    sp.add_argument("--seed", type=int, help="random sampling instead of exhaustive enumeration")
    sp.add_argument("--samples", type=int, default=20)
    sp.add_argument("--out", help="write one file per instance into this directory")
    sp.add_argument("--count", action="store_true", help="print the number of instances on stderr")
    sp.set_defaults(func=cmd_enumerate)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, CorpusTooLarge, InvalidInstance) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (NotEtale, NotAFrameHom, NoPointRealization) as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        if getattr(e, "witness", None) is not None:
            print(f"witness: {e.witness}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
