"""Command line driver: ``ccf analyze | realize | verify | render``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path

from convexcode import code_core as cc
from convexcode import code_graph as cg
from convexcode.geometry import (
    MismatchedTopology,
    export_json,
    export_svg_cross_section,
    load_complex,
    verify,
)
from convexcode.pipeline import construct
from convexcode.realization import check_output_properties, fiber_name, parse_fiber

log = logging.getLogger("convexcode")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_PARSE = 2
EXIT_HYPOTHESIS = 3
EXIT_NO_EMBEDDING = 4
EXIT_VERIFY = 5


def _words(ws) -> list[str]:
    return [str(w) for w in ws]


def analyze(code: cc.NeuralCode) -> dict:
    """Predicates, constants, graph structure and dimension bounds as a JSON-ready dict."""
    mt = cc.maximal_codewords(code)
    mic, mic_wit = cc.is_max_intersection_complete(code, mt)
    strong, strong_wit = cc.is_strongly_mic(code, mt)
    k = cc.compute_constants(code, mt)
    g = cg.build_gc(mt)
    cyc = cg.analyze_cycles(g)
    d_emb = None
    if cyc.D is not None:
        d_emb = cg.embed_disjoint_cycles(g, cyc).d
    bounds = cc.dimension_bound(code, mt)
    return {
        "code": {"n": code.n, "size": len(code), "s": mt.s, "s_prime": mt.s_prime,
                 "words": _words(code)},
        "maximal": _words(mt.maximal),
        "meets": {f"{i + 1},{j + 1}": str(w) for (i, j), w in sorted(mt.meets.items())},
        "predicates": {
            "max_intersection_complete": mic,
            "max_intersection_witness": None if mic_wit is None else {
                "maximal": [k + 1 for k in mic_wit[0]], "intersection": str(mic_wit[1])},
            "strongly_max_intersection_complete": strong,
            "strongly_witness": None if strong_wit is None else {
                "tau": str(strong_wit.tau), "maximal": [k + 1 for k in strong_wit.subset],
                "missing": str(strong_wit.missing)},
        },
        "constants": {"sigma_size": k.sigma_size, "k1": k.k1, "k2": k.k2, "r": k.r},
        "graph": {
            "vertices": mt.s,
            "edges": [[i + 1, j + 1] for i, j in sorted(g.edges)],
            "path_forest": cg.is_path_forest(g),
            "has_3_cycle": cyc.has_3_cycle,
            "cycles": [[v + 1 for v in c] for c in cyc.cycles],
            "cycles_disjoint": cyc.pairwise_disjoint,
            "D": cyc.D,
            "d_emb": d_emb,
        },
        "bounds": {
            "applicable": [{"rule": e.rule, "bound": e.bound, "detail": e.detail} for e in bounds.applicable],
            "best": bounds.best,
        },
    }


def _text_analysis(rep: dict) -> str:
    c = rep["code"]
    p = rep["predicates"]
    k = rep["constants"]
    g = rep["graph"]
    lines = [
        f"n={c['n']}  |C|={c['size']}  s={c['s']}  s'={c['s_prime']}",
        "maximal: " + (" ".join(rep["maximal"]) or "(none)"),
        "meets:   " + (" ".join(f"{e}:{w}" for e, w in rep["meets"].items()) or "(none)"),
        f"max intersection-complete: {p['max_intersection_complete']}",
        f"strongly max intersection-complete: {p['strongly_max_intersection_complete']}",
    ]
    if p["strongly_witness"]:
        w = p["strongly_witness"]
        lines.append(f"  witness: {w['tau']} & maximal {w['maximal']} = {w['missing']} not in code")
    lines.append(f"|sigma|={k['sigma_size']}  k1={k['k1']}  k2={k['k2']}  r={k['r']}")
    lines.append(f"graph: edges={g['edges']} cycles={g['cycles']} D={g['D']} d_emb={g['d_emb']}")
    for e in rep["bounds"]["applicable"]:
        lines.append(f"  bound {e['bound']}  ({e['rule']}: {e['detail']})")
    lines.append(f"best bound: {rep['bounds']['best']}")
    return "\n".join(lines)


def _read_code(path: str) -> cc.NeuralCode:
    text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    return cc.parse_code(text)


def _write_report(rep: dict, path: Path | None) -> None:
    if path is None:
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(rep, indent=1, sort_keys=True) + "\n")


def _default_report(src: str, suffix: str) -> Path | None:
    return None if src == "-" else Path(src).with_suffix(f".{suffix}.json")


def cmd_analyze(args) -> int:
    t0 = time.perf_counter()
    try:
        code = _read_code(args.code)
    except cc.ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    rep = analyze(code)
    if args.timings:
        rep["timings"] = {"analyze_s": time.perf_counter() - t0}
    _write_report(rep, Path(args.report) if args.report else _default_report(args.code, "analyze"))
    print(json.dumps(rep, indent=1, sort_keys=True) if args.json else _text_analysis(rep))
    return EXIT_OK


def cmd_realize(args) -> int:
    timings = {}
    t0 = time.perf_counter()
    try:
        code = _read_code(args.code)
    except cc.ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rep = analyze(code)
    emb = cg.GridEmbedding.load(args.embedding) if args.embedding else None
    try:
        con = construct(code, emb)
    except cg.HypothesisViolated as exc:
        rep["status"] = "hypothesis-violated"
        rep["error"] = str(exc)
        _write_report(rep, out / "report.json")
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (LookupError, MismatchedTopology) as exc:
        rep["status"] = "no-embedding"
        rep["error"] = str(exc)
        _write_report(rep, out / "report.json")
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_EMBEDDING
    timings["construct_s"] = time.perf_counter() - t0

    fam = con.realization.family
    props = check_output_properties(fam, code, con.realization.mt)
    (out / "family.json").write_text(fam.dumps() + "\n")
    export_json(con.complex, out / "complex.json")
    files = ["family.json", "complex.json"]
    if args.svg:
        for f in fam.fibers():
            name = f"{fiber_name(f)}.svg"
            export_svg_cross_section(con.complex, f, out / name)
            files.append(name)
    rep["embedding"] = {"method": con.method, **con.embedding.to_json()}
    rep["constructed_dimension"] = con.embedding.d + 2
    rep["properties"] = {
        k: {"ok": v, "witnesses": [str(w) for w in props.witnesses[k]]} for k, v in props.results.items()
    }
    rep["files"] = files
    rep["status"] = "ok" if props.ok else "properties-failed"
    if args.timings:
        rep["timings"] = timings
    _write_report(rep, out / "report.json")
    print(_text_analysis(rep))
    print(f"embedding ({con.method}) d={con.embedding.d}; realization in R^{con.embedding.d + 2}")
    print("output properties: " + " ".join(f"({k}) {'ok' if v else 'FAIL'}" for k, v in props.results.items()))
    print(f"wrote {', '.join(files)} to {out}")
    return EXIT_OK if props.ok else EXIT_FAILED


def cmd_verify(args) -> int:
    t0 = time.perf_counter()
    tc = load_complex(args.complex)
    res = verify(tc, args.samples, args.pairs, args.seed)
    rep = {"complex": Path(args.complex).name, "samples": args.samples, "pairs": args.pairs,
           "seed": args.seed, **res.to_json()}
    if args.timings:
        rep["timings"] = {"verify_s": time.perf_counter() - t0}
    _write_report(rep, Path(args.report) if args.report else _default_report(args.complex, "verify"))
    print(f"recovered {len(res.recovered_code)} codewords; missing {_words(res.missing) or 'none'}; "
          f"extra {_words(res.extra) or 'none'}")
    print(f"midpoint pairs tested: {res.pairs_tested}; convexity violations: {len(res.convexity_violations)}")
    for v in res.convexity_violations[:5]:
        print(f"  {v}")
    print("PASS" if res.passed else "FAIL")
    return EXIT_OK if res.passed else EXIT_VERIFY


def cmd_render(args) -> int:
    tc = load_complex(args.complex)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    fibers = [parse_fiber(f) for f in args.fiber] if args.fiber else tc.fibers
    for f in fibers:
        if f not in tc.fam.circles:
            print(f"error: no circle {fiber_name(f)}", file=sys.stderr)
            return EXIT_FAILED
        export_svg_cross_section(tc, f, out / f"{fiber_name(f)}.svg")
        print(out / f"{fiber_name(f)}.svg")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ccf", description="Convex realizations of combinatorial neural codes.")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="predicates, constants and dimension bounds")
    a.add_argument("code", help="code file, or - for stdin")
    a.add_argument("--report", help="JSON report path (default: next to the code file)")
    a.add_argument("--json", action="store_true", help="print the JSON report instead of text")
    a.add_argument("--timings", action="store_true", help="include wall-clock timings in the report")
    a.set_defaults(func=cmd_analyze)

    r = sub.add_parser("realize", help="build the labeled circles and the tube complex")
    r.add_argument("code")
    g = r.add_mutually_exclusive_group()
    g.add_argument("--embedding", help="grid drawing JSON for G_C")
    g.add_argument("--auto", action="store_true", help="construct the drawing (default)")
    r.add_argument("--out", required=True, help="output directory")
    r.add_argument("--svg", action="store_true", help="also render one SVG per circle")
    r.add_argument("--timings", action="store_true")
    r.set_defaults(func=cmd_realize)

    v = sub.add_parser("verify", help="check a complex recovers its code with convex sets")
    v.add_argument("complex", help="complex.json written by realize")
    v.add_argument("--samples", type=int, default=10_000)
    v.add_argument("--pairs", type=int, default=2000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--report", help="JSON report path (default: next to the complex file)")
    v.add_argument("--timings", action="store_true")
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("render", help="SVG cross-sections of a complex")
    d.add_argument("complex")
    d.add_argument("--out", required=True)
    d.add_argument("--fiber", action="append", help="circle name such as S1 or S1,2 (repeatable)")
    d.set_defaults(func=cmd_render)
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("CCF_LOG", "WARNING").upper(), format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    log.debug("running %s", args.command)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
