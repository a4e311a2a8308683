"""Command line interface: ``dimer <command> [file] [options]``.

Files are JSON models; a missing file or ``-`` reads standard input.  Exit
status is nonzero only for tool failures (unreadable input, invalid model,
bad arguments), never for a mathematical verdict.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Sequence

from . import generators, homotopy, matchings, rewrite, strands, svg, transform
from .model import Answer, DimerModel, ModelError, Path, dumps, loads, rotation_system, surface_info, validate

EXIT_FAILURE = 2


class CliError(Exception):
    pass


# -- input helpers ---------------------------------------------------------------------


def read_model(source: str | None, check: bool = True) -> DimerModel:
    if source in (None, "-"):
        text = sys.stdin.read()
        label = "<stdin>"
    else:
        try:
            with open(source) as fh:
                text = fh.read()
        except OSError as exc:
            raise CliError(f"cannot read {source}: {exc.strerror}") from exc
        label = source
    try:
        model = loads(text)
    except ModelError as exc:
        raise CliError(f"{label}: {exc}") from exc
    if check:
        report = validate(model)
        if not report.ok:
            raise CliError(f"{label}: invalid dimer model: " + "; ".join(map(str, report.violations)))
    return model


def parse_path(model: DimerModel, text: str) -> Path:
    """``start:a1,a2,...``; the start may be omitted for nonconstant paths."""
    start, sep, rest = text.partition(":")
    if not sep:
        start, rest = "", text
    arrows = [a for a in rest.split(",") if a]
    try:
        if start:
            return model.path(start, arrows)
        return model.path_from_arrows(arrows)
    except Exception as exc:
        raise CliError(f"bad path {text!r}: {exc}") from exc


def parse_range(text: str) -> list[int]:
    lo, sep, hi = text.partition("..")
    if not sep:
        return [int(x) for x in text.split(",")]
    return list(range(int(lo), int(hi) + 1))


def parse_params(items: Sequence[str]) -> dict:
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep:
            raise CliError(f"parameter {item!r} must look like key=value")
        try:
            out[key] = json.loads(value)
        except json.JSONDecodeError:
            out[key] = value
    return out


def emit(args, payload: dict, text: str) -> None:
    if getattr(args, "json", False):
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)


def write_text(path: str, text: str) -> None:
    with open(path, "w") as fh:
        fh.write(text)


# -- verdict bundle --------------------------------------------------------------------


def comparison(surface: str, strand: Answer, path_verdict: str) -> str:
    """How the strand verdict and the bounded path-consistency verdict relate."""
    if surface == "sphere":
        return "sphere: strand-consistency always fails here, no comparison"
    if strand == Answer.UNKNOWN or path_verdict == rewrite.UNKNOWN:
        return "undecided"
    if (strand == Answer.YES) == (path_verdict == rewrite.CONSISTENT):
        return "agree"
    return "BUG"


def verdict_bundle(model: DimerModel, length: int = 6, budget: int | None = None,
                   cap: int = 10000) -> dict:
    surf = surface_info(model)
    sv = strands.strand_consistency(model)
    pv = rewrite.check_path_consistency(model, length, budget)
    nd = matchings.is_nondegenerate(model)
    count, truncated = matchings.count_matchings(model, cap)
    reduced, log = transform.reduce(model)
    notes = list(log.notes)
    relation = comparison(surf.classification, sv.answer, pv.verdict)
    if relation == "BUG":
        notes.append("BUG: strand and path consistency verdicts disagree")
    witnesses = [b.to_dict() for b in sv.confirmed + sv.potential]
    return {
        "name": model.name,
        "surface": surf.to_dict(),
        "strand_consistent": sv.answer.value,
        "bad_configurations": witnesses,
        "path_consistent_up_to_L": {"L": length, "verdict": pv.verdict, "witness": pv.witness},
        "verdicts": relation,
        "nondegenerate": nd.answer.value,
        "unmatchable_arrows": list(nd.unmatchable),
        "matching_count": count,
        "matching_count_capped": truncated,
        "reduced_digons": len(log),
        "digons_after_reduction": len(reduced.digons),
        "notes": notes,
    }


def stable_bundle(bundle: dict) -> dict:
    """The part of a bundle that the fixture manifest pins down."""
    return {
        "name": bundle["name"],
        "surface": bundle["surface"]["classification"],
        "strand_consistent": bundle["strand_consistent"],
        "path_consistent_up_to_L": bundle["path_consistent_up_to_L"]["verdict"],
        "L": bundle["path_consistent_up_to_L"]["L"],
        "nondegenerate": bundle["nondegenerate"],
        "matching_count": bundle["matching_count"],
        "reduced_digons": bundle["reduced_digons"],
    }


# -- commands --------------------------------------------------------------------------


def cmd_validate(args) -> int:
    model = read_model(args.file, check=False)
    rep = validate(model)
    payload = {"name": model.name, "valid": rep.ok, "violations": [
        {"axiom": v.axiom, "message": v.message, "witness": list(v.witness)} for v in rep.violations]}
    lines = [f"{model.name}: valid"] if rep.ok else [f"{model.name}: invalid"] + [f"  {v}" for v in rep.violations]
    emit(args, payload, "\n".join(lines))
    return 0 if rep.ok else 1


def cmd_surface(args) -> int:
    model = read_model(args.file)
    surf = surface_info(model)
    pres = homotopy.presentation(model, surf)
    payload = dict(surf.to_dict(), name=model.name, fundamental_group_regime=pres.regime, h1=pres.h1)
    lines = [f"{model.name}: {surf.classification}",
             f"  euler characteristic {surf.euler_characteristic}, genus {surf.genus}, "
             f"boundary components {surf.boundary_components}",
             f"  H1 = {pres.h1}; homotopy classes: {pres.regime}"]
    if args.rotation:
        rot = rotation_system(model)
        payload["rotation"] = {v: {"ends": [list(e) for e in r.ends], "cyclic": r.cyclic} for v, r in rot.items()}
        for v, r in rot.items():
            order = " ".join(":".join(e) for e in r.ends)
            lines.append(f"  {v}: {order}" + ("" if r.cyclic else " (boundary)"))
    emit(args, payload, "\n".join(lines))
    return 0


def cmd_strands(args) -> int:
    model = read_model(args.file)
    zs = strands.zigzag_paths(model)
    sv = strands.strand_consistency(model)
    payload = {"name": model.name, "strands": [z.to_dict() for z in zs],
               "strand_consistent": sv.answer.value,
               "bad_configurations": [b.to_dict() for b in sv.confirmed + sv.potential]}
    lines = [f"{model.name}: {len(zs)} strands"]
    for i, z in enumerate(zs):
        lines.append(f"  {i} {z.kind}: {' '.join(z.arrows)}")
    lines.append(f"strand-consistent: {sv.answer.value}")
    for b in sv.confirmed + sv.potential:
        tag = "" if not b.potential else " (potential)"
        lines.append(f"  {b.kind}{tag}: arrows {', '.join(b.arrows)}")
    if args.svg:
        write_text(args.svg, svg.model_svg(model, seed=args.seed))
    if args.dot:
        write_text(args.dot, svg.model_dot(model))
    emit(args, payload, "\n".join(lines))
    return 0


_WITNESS_NAMES = {
    strands.SELF_INTERSECTION: "self-intersection",
    strands.INTERIOR_CYCLE: "interior cycle",
    strands.BAD_LENS: "bad lens",
}
_WITNESS_ORDER = (strands.INTERIOR_CYCLE, strands.SELF_INTERSECTION, strands.BAD_LENS)


def cmd_check(args) -> int:
    model = read_model(args.file)
    surf = surface_info(model)
    sv = strands.strand_consistency(model)
    pv = rewrite.check_path_consistency(model, args.length, args.budget)
    relation = comparison(surf.classification, sv.answer, pv.verdict)
    payload = {"name": model.name, "surface": surf.classification,
               "strand_consistent": sv.answer.value,
               "bad_configurations": [b.to_dict() for b in sv.confirmed + sv.potential],
               "path_consistency": pv.to_dict(), "verdicts": relation}
    strand_txt = f"strand-consistent: {sv.answer.value}"
    found = sv.confirmed or sv.potential
    if found:
        # name one witness; the full list is in --json and `dimer strands`
        first = min(found, key=lambda b: _WITNESS_ORDER.index(b.kind))
        strand_txt += f" ({_WITNESS_NAMES[first.kind]} witness)"
    path_txt = {rewrite.CONSISTENT: "yes", rewrite.INCONSISTENT: "no", rewrite.UNKNOWN: "unknown"}[pv.verdict]
    line = f"{strand_txt}; path-consistent up to {args.length}: {path_txt}"
    if relation == "agree":
        line += "; verdicts agree"
    elif relation == "BUG":
        line += "; BUG: verdicts disagree"
    elif relation == "undecided":
        line += "; comparison undecided"
    else:
        line += f"; {relation}"
    lines = [line]
    if pv.witness:
        lines.append("  witness: " + json.dumps(pv.witness, sort_keys=True))
    if args.cancellative:
        cv = rewrite.check_cancellativity(model, budget=args.budget)
        payload["cancellativity"] = cv.to_dict()
        lines.append(f"cancellativity: {cv}")
    emit(args, payload, "\n".join(lines))
    return 0


def cmd_matchings(args) -> int:
    model = read_model(args.file)
    payload: dict = {"name": model.name}
    lines = []
    if args.enumerate:
        ml = matchings.enumerate_matchings(model, args.cap)
        payload["matchings"] = [m.sorted() for m in ml.matchings]
        payload["truncated"] = ml.truncated
        lines.append(f"{len(ml)} perfect matchings" + (" (capped)" if ml.truncated else ""))
        lines += ["  " + str(m) for m in ml.matchings]
    elif args.count:
        n, truncated = matchings.count_matchings(model, args.cap)
        payload.update(count=n, truncated=truncated)
        lines.append(f"{n}{'+' if truncated else ''} perfect matchings")
    elif args.nondegenerate:
        nd = matchings.is_nondegenerate(model)
        payload.update(nondegenerate=nd.answer.value, unmatchable=list(nd.unmatchable))
        lines.append(f"nondegenerate: {nd.answer.value}")
        if nd.unmatchable:
            lines.append("  arrows in no perfect matching: " + ", ".join(nd.unmatchable))
    else:
        res = matchings.find_matching_with_certificate(model)
        if res.matching is not None:
            payload["matching"] = res.matching.sorted()
            lines.append(f"perfect matching: {res.matching}")
        else:
            c = res.certificate
            payload["matching"] = None
            payload["certificate"] = None if c is None else {
                "colour": c.colour, "faces": list(c.faces), "neighbours": list(c.neighbours)}
            lines.append("no perfect matching")
            if c is not None:
                lines.append(f"  {len(c.faces)} {c.colour} faces {', '.join(c.faces)} "
                             f"are adjacent only to {', '.join(c.neighbours)}")
    emit(args, payload, "\n".join(lines))
    return 0


def cmd_reduce(args) -> int:
    model = read_model(args.file)
    reduced, log = transform.reduce(model)
    text = dumps(reduced)
    if args.output:
        write_text(args.output, text)
    if args.log:
        write_text(args.log, json.dumps(log.to_dict(), indent=2) + "\n")
    if not args.output:
        sys.stdout.write(text)
    else:
        print(f"{len(log)} digons removed; {len(reduced.digons)} left")
    for note in log.notes:
        print(note, file=sys.stderr)
    return 0


def cmd_submodel(args) -> int:
    model = read_model(args.file)
    faces = [f for f in args.faces.split(",") if f]
    try:
        sub = transform.submodel(model, faces)
    except (transform.DisconnectedSelection, transform.NonSurfaceSelection, KeyError) as exc:
        raise CliError(f"cannot form submodel: {exc}") from exc
    text = dumps(sub)
    if args.output:
        write_text(args.output, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_equiv(args) -> int:
    model = read_model(args.file)
    if len(args.path) != 2:
        raise CliError("equiv needs exactly two --path arguments")
    p, q = (parse_path(model, t) for t in args.path)
    try:
        res = rewrite.are_equivalent(model, p, q, args.budget)
    except rewrite.EndpointMismatch as exc:
        raise CliError(str(exc)) from exc
    payload = {"answer": res.answer.value, "reason": res.reason,
               "chain": [s.to_dict() for s in res.chain]}
    lines = [f"equivalent: {res.answer.value}" + (f" ({res.reason})" if res.reason else "")]
    for s in res.chain:
        lines.append(f"  {s.side}-morph at arrow {s.arrow}, position {s.position}")
    if args.normal_form:
        nf = rewrite.normal_form(model, p, args.budget)
        payload["normal_form"] = nf.to_dict()
        lines.append(f"normal form: {nf.to_dict()}")
    emit(args, payload, "\n".join(lines))
    return 0


def cmd_normal(args) -> int:
    model = read_model(args.file)
    p = parse_path(model, args.path)
    nf = rewrite.normal_form(model, p, args.budget)
    left = rewrite.leftmost_form(model, p, args.steps)
    payload = {"normal_form": nf.to_dict(),
               "leftmost": {"start": left.path.start, "arrows": list(left.path.arrows),
                            "diverged": left.diverged, "steps": left.steps}}
    rep = nf.representative
    lines = [f"class: {nf.homotopy_class}",
             "minimal representative: " + ("unknown" if rep is None else " ".join(rep.arrows) or "(constant)"),
             f"c-value: {nf.c_value} ({nf.evidence})",
             ("leftmost form: diverged after " + str(left.steps) + " steps") if left.diverged else
             f"leftmost form: {' '.join(left.path.arrows) or '(constant)'} after {left.steps} steps"]
    emit(args, payload, "\n".join(lines))
    return 0


def cmd_cover(args) -> int:
    model = read_model(args.file)
    vertex = args.vertex or model.vertices[0]
    try:
        patch = homotopy.unfold_cover(model, vertex, args.radius)
    except (homotopy.UnsupportedSurface, homotopy.PatchExhausted) as exc:
        raise CliError(str(exc)) from exc
    text = json.dumps(homotopy.patch_to_json_dict(patch), indent=2) + "\n"
    if args.output:
        write_text(args.output, text)
        s = surface_info(patch.model)
        print(f"cover patch: {len(patch.model.faces)} faces, {len(patch.model.vertices)} vertices, "
              f"{s.classification}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    return 0


def cmd_grade(args) -> int:
    model = read_model(args.file)
    try:
        g = matchings.grading(model, args.cap)
    except matchings.Degenerate as exc:
        emit(args, {"degenerate": list(exc.arrows)}, f"degenerate: {exc}")
        return 0
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    payload = {"degrees": g.degrees, "face_degree": g.face_degree}
    lines = [f"face-path degree {g.face_degree}"] + [f"  {a}: {d}" for a, d in sorted(g.degrees.items())]
    if args.path:
        p = parse_path(model, args.path)
        payload["path_degree"] = g(p)
        lines.append(f"degree of path: {g(p)}")
    emit(args, payload, "\n".join(lines))
    return 0


def _spec_from_args(args) -> generators.GeneratorSpec:
    params = parse_params(args.param or [])
    for key in ("m", "n", "k", "width", "seed"):
        value = getattr(args, key, None)
        if value is not None:
            params[key] = value
    if args.base:
        params["base"] = args.base
    return generators.GeneratorSpec(args.family, params)


def cmd_generate(args) -> int:
    try:
        model = _spec_from_args(args).build()
    except (KeyError, TypeError, ValueError) as exc:
        raise CliError(f"cannot generate {args.family}: {exc}") from exc
    text = dumps(model)
    if args.output:
        write_text(args.output, text)
    else:
        sys.stdout.write(text)
    return 0


def _bundle_job(job: tuple) -> dict:
    label, text, length, budget, cap = job
    try:
        model = loads(text)
        report = validate(model)
        if not report.ok:
            return {"name": label, "error": "; ".join(map(str, report.violations))}
        return verdict_bundle(model, length, budget, cap)
    except Exception as exc:  # reported per model so one bad file does not stop the batch
        return {"name": label, "error": f"{type(exc).__name__}: {exc}"}


def cmd_batch(args) -> int:
    jobs = []
    for path in args.files:
        try:
            with open(path) as fh:
                jobs.append((path, fh.read()))
        except OSError as exc:
            raise CliError(f"cannot read {path}: {exc.strerror}") from exc
    if args.family:
        ms = parse_range(args.m) if args.m else [None]
        ns = parse_range(args.n) if args.n else [None]
        for m in ms:
            for n in ns:
                params = parse_params(args.param or [])
                if m is not None:
                    params["m"] = m
                if n is not None:
                    params["n"] = n
                model = generators.GeneratorSpec(args.family, params).build()
                jobs.append((model.name, dumps(model)))
    if args.corpus or not jobs:
        for spec in generators.default_corpus():
            model = spec.build()
            jobs.append((model.name, dumps(model)))
    work = [(label, text, args.length, args.budget, args.cap) for label, text in jobs]
    workers = args.jobs or min(4, os.cpu_count() or 1)
    if workers > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            bundles = list(pool.map(_bundle_job, work))
    else:
        bundles = [_bundle_job(w) for w in work]
    failures = [b for b in bundles if "error" in b]
    if args.hunt_counterexample:
        hits = [b for b in bundles if "error" not in b and b["surface"]["classification"] != "sphere"
                and b["strand_consistent"] == "yes" and b["digons_after_reduction"] == 0
                and b["matching_count"] == 0]
        print(f"weakly consistent digon-free models without a perfect matching: {len(hits)}")
        for b in hits:
            print(f"  {b['name']}")
    if args.json:
        print(json.dumps(bundles, indent=2, sort_keys=True))
    else:
        for b in bundles:
            if "error" in b:
                print(f"{b['name']}: error: {b['error']}")
                continue
            pc = b["path_consistent_up_to_L"]
            print(f"{b['name']}: {b['surface']['classification']}; strand-consistent {b['strand_consistent']}; "
                  f"path {pc['verdict']} (L={pc['L']}); {b['verdicts']}; nondegenerate {b['nondegenerate']}; "
                  f"matchings {b['matching_count']}{'+' if b['matching_count_capped'] else ''}; "
                  f"digons removed {b['reduced_digons']}")
    return EXIT_FAILURE if failures else 0


def cmd_svg(args) -> int:
    model = read_model(args.file)
    text = svg.model_dot(model) if args.dot else svg.model_svg(model, seed=args.seed, strands=not args.no_strands)
    if args.output:
        write_text(args.output, text)
    else:
        sys.stdout.write(text)
    return 0


# -- parser ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dimer", description="Dimer models on surfaces with boundary.")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, func, help_text, file=True):
        p = sub.add_parser(name, help=help_text)
        if file:
            p.add_argument("file", nargs="?", help="model JSON file (default: standard input)")
        p.set_defaults(func=func)
        return p

    def budget(p):
        p.add_argument("--budget", type=int, default=None,
                       help="node budget per class search (default: DIMER_BUDGET or 20000)")

    p = command("validate", cmd_validate, "check the dimer model axioms")
    p.add_argument("--json", action="store_true")

    p = command("surface", cmd_surface, "Euler characteristic, genus, boundary components")
    p.add_argument("--rotation", action="store_true", help="also print the rotation system")
    p.add_argument("--json", action="store_true")

    p = command("strands", cmd_strands, "zigzag paths and bad configurations")
    p.add_argument("--svg", help="write an SVG drawing of the strand diagram")
    p.add_argument("--dot", help="write the quiver as Graphviz DOT")
    p.add_argument("--seed", type=int, default=0, help="layout seed for the drawing")
    p.add_argument("--json", action="store_true")

    p = command("check", cmd_check, "strand-consistency and bounded path-consistency")
    p.add_argument("--length", type=int, default=6)
    budget(p)
    p.add_argument("--cancellative", action="store_true", help="also search for cancellation failures")
    p.add_argument("--json", action="store_true")

    p = command("matchings", cmd_matchings, "perfect matchings")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--enumerate", action="store_true")
    group.add_argument("--count", action="store_true")
    group.add_argument("--nondegenerate", action="store_true")
    p.add_argument("--cap", type=int, default=10000)
    p.add_argument("--json", action="store_true")

    p = command("reduce", cmd_reduce, "remove removable digons")
    p.add_argument("-o", "--output")
    p.add_argument("--log", help="write the reduction log as JSON")

    p = command("submodel", cmd_submodel, "model induced by a set of faces")
    p.add_argument("--faces", required=True, help="comma separated face ids")
    p.add_argument("-o", "--output")

    p = command("equiv", cmd_equiv, "decide whether two paths are equivalent")
    p.add_argument("--path", action="append", default=[], help="start:a1,a2,... (twice)")
    p.add_argument("--normal-form", action="store_true", help="also print the normal form of the first path")
    budget(p)
    p.add_argument("--json", action="store_true")

    p = command("normal", cmd_normal, "normal form and leftmost form of a path")
    p.add_argument("--path", required=True, help="start:a1,a2,...")
    p.add_argument("--steps", type=int, default=100, help="step budget for the leftmost form")
    budget(p)
    p.add_argument("--json", action="store_true")

    p = command("cover", cmd_cover, "unfold a patch of the universal cover")
    p.add_argument("--vertex")
    p.add_argument("--radius", type=int, default=1)
    p.add_argument("-o", "--output")

    p = command("grade", cmd_grade, "arrow degrees from all perfect matchings")
    p.add_argument("--path", help="also print the degree of this path")
    p.add_argument("--cap", type=int, default=100000)
    p.add_argument("--json", action="store_true")

    def gen_args(p):
        p.add_argument("--m", type=int)
        p.add_argument("--n", type=int)
        p.add_argument("--k", type=int)
        p.add_argument("--width", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--base", help="base family for subdivided / digon_insertions")
        p.add_argument("-p", "--param", action="append", help="extra key=value generator parameter")

    families = sorted(generators.FAMILIES) + ["subdivided", "digon_insertions"]
    p = command("generate", cmd_generate, "write a generated model", file=False)
    p.add_argument("family", choices=families)
    gen_args(p)
    p.add_argument("-o", "--output")

    p = command("batch", cmd_batch, "verdict bundles for files, a generated family or the default corpus",
                file=False)
    p.add_argument("files", nargs="*")
    p.add_argument("--family", choices=families)
    p.add_argument("--m", help="range like 1..3 or list 1,2")
    p.add_argument("--n", help="range like 1..3 or list 1,2")
    p.add_argument("-p", "--param", action="append", help="extra key=value generator parameter")
    p.add_argument("--corpus", action="store_true", help="include the default generated corpus")
    p.add_argument("--length", type=int, default=6)
    budget(p)
    p.add_argument("--cap", type=int, default=10000, help="matching count cap")
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--hunt-counterexample", action="store_true",
                   help="list weakly consistent digon-free models with no perfect matching")
    p.add_argument("--json", action="store_true")

    p = command("svg", cmd_svg, "draw a model and its strands")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-strands", action="store_true")
    p.add_argument("--dot", action="store_true", help="emit Graphviz DOT instead of SVG")
    p.add_argument("-o", "--output")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"dimer: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except BrokenPipeError:
        return 0


if __name__ == "__main__":
    sys.exit(main())
