"""Command-line front end: ``dlsat sat|analyze|reduce|encode|gen|bench``.

Exit codes: 0 satisfiable (or success), 1 unsatisfiable, 2 input error,
3 engines disagree during ``bench``.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

from .analysis import analyze, reduce_to_nearly_acyclic
from .concepts import Concept, nnf
from .generate import GenSpec, GenerationError, generate, render_instance
from .satenc import encode_trace_cnf, export_dimacs, solve_cnf
from .semantics import Interpretation, brute_force_sat
from .syntax import (
    KnowledgeBase, ParseError, parse_concept, parse_knowledge_base, print_knowledge_base,
)
from .tableau import SearchStats, decide_alc, decide_with_tboxes, extract_model

EXIT_SAT, EXIT_UNSAT, EXIT_INPUT, EXIT_DISAGREE = 0, 1, 2, 3
STATS_FIELDS = tuple(f for f in SearchStats().as_dict())


class InputError(Exception):
    pass


@dataclass
class Outcome:
    verdict: str
    conclusive: bool = True
    stats: dict = field(default_factory=dict)
    model: Optional[Interpretation] = None


def _normalize_kb(kb: KnowledgeBase) -> KnowledgeBase:
    return KnowledgeBase(tuple((a, nnf(b)) for a, b in kb.definitions),
                         tuple((nnf(l), nnf(r)) for l, r in kb.gcis))


def _verdict(sat: bool) -> str:
    return "satisfiable" if sat else "unsatisfiable"


def run_tableau(c: Concept, kb: Optional[KnowledgeBase], max_domain: int) -> Outcome:
    if kb is None or kb.is_empty():
        r = decide_alc(c)
    else:
        r = decide_with_tboxes(c, kb)
    model = extract_model(r.witness) if r.satisfiable else None
    return Outcome(r.verdict, True, r.stats.as_dict(), model)


def run_sat(c: Concept, kb: Optional[KnowledgeBase], max_domain: int) -> Outcome:
    if kb is not None and not kb.is_empty():
        raise InputError("the sat engine handles empty TBoxes only")
    f = encode_trace_cnf(c)
    assignment = solve_cnf(f)
    stats = {"num_vars": f.num_vars, "num_clauses": f.num_clauses,
             "trace_nodes": len(f.trace_nodes())}
    return Outcome(_verdict(assignment is not None), True, stats)


def run_bruteforce(c: Concept, kb: Optional[KnowledgeBase], max_domain: int) -> Outcome:
    r = brute_force_sat(c, kb, max_domain=max_domain)
    model = r.interpretation if r.satisfiable else None
    # "no model up to n" only settles unsatisfiability for the bounded question
    return Outcome(_verdict(r.satisfiable), r.satisfiable, {"max_domain": max_domain}, model)


ENGINES: dict[str, Callable[[Concept, Optional[KnowledgeBase], int], Outcome]] = {
    "tableau": run_tableau,
    "sat": run_sat,
    "bruteforce": run_bruteforce,
}


def _color(text: str, code: str, stream) -> str:
    if os.environ.get("NO_COLOR") or not getattr(stream, "isatty", lambda: False)():
        return text
    return f"\033[{code}m{text}\033[0m"


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from exc


def _load_concept(path: str) -> Concept:
    try:
        return nnf(parse_concept(_read(path)))
    except ParseError as exc:
        raise InputError(f"{path}:{exc}") from exc


def _load_kb(path: Optional[str]) -> Optional[KnowledgeBase]:
    if path is None:
        return None
    try:
        return _normalize_kb(parse_knowledge_base(_read(path)))
    except ParseError as exc:
        raise InputError(f"{path}:{exc}") from exc


def _write(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def cmd_sat(args) -> int:
    c, kb = _load_concept(args.file), _load_kb(args.tbox)
    outcome = ENGINES[args.engine](c, kb, args.max_domain)
    sat = outcome.verdict == "satisfiable"
    if args.json:
        payload = {"verdict": outcome.verdict, "engine": args.engine,
                   "conclusive": outcome.conclusive, "stats": outcome.stats}
        if args.model and outcome.model is not None:
            payload["model"] = _model_json(outcome.model)
        print(json.dumps(payload))
    else:
        color = "32" if sat else "31"
        print("verdict: " + _color(outcome.verdict, color, sys.stdout))
        if not outcome.conclusive:
            print(f"note: no model with at most {args.max_domain} elements")
        for key, value in outcome.stats.items():
            print(f"{key}={value}")
        if args.model:
            if outcome.model is not None:
                print("model:")
                print(outcome.model.describe())
            elif sat:
                print(f"note: engine {args.engine} does not produce models", file=sys.stderr)
    return EXIT_SAT if sat else EXIT_UNSAT


def _model_json(m: Interpretation) -> dict:
    return {
        "domain": list(m.domain),
        "atoms": {a: sorted(ext) for a, ext in sorted(m.atom_ext.items())},
        "roles": {r: [list(p) for p in sorted(ext)] for r, ext in sorted(m.role_ext.items())},
    }


def cmd_analyze(args) -> int:
    c, kb = _load_concept(args.file), _load_kb(args.tbox)
    try:
        report = analyze(c, kb)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    data = report.as_dict()
    if args.json:
        print(json.dumps(data))
        return 0
    for key, value in data.items():
        if key != "regimes":
            print(f"{key}={value}")
    for param, label in report.regimes:
        print(f"regime.{param}={label}")
    print()
    print(f"Concept fragment {report.fragment.value}, {report.union_count} union(s), "
          f"{report.full_existential_count} full existential(s).")
    if kb is not None and not kb.is_empty():
        print(f"TBox: {report.gci_count} GCI(s), {report.impacted_size} impacted concept(s).")
    width = max(len(p) for p, _ in report.regimes)
    print(f"{'parameter'.ljust(width)}  complexity")
    for param, label in report.regimes:
        print(f"{param.ljust(width)}  {label}")
    return 0


def cmd_reduce(args) -> int:
    kb = _load_kb(args.tbox_file)
    if kb.definitions:
        raise InputError(f"{args.tbox_file}: reduce takes GCIs only, found definitions")
    reduced, fresh = reduce_to_nearly_acyclic(kb)
    _write(print_knowledge_base(reduced), args.out)
    print(f"fresh: {fresh}", file=sys.stdout if args.out else sys.stderr)
    return 0


def cmd_encode(args) -> int:
    if args.tbox is not None:
        raise InputError("encode works on concepts without a TBox")
    c = _load_concept(args.file)
    _write(export_dimacs(encode_trace_cnf(c)), args.out)
    return 0


def cmd_gen(args) -> int:
    count = args.count
    for i in range(count):
        spec = GenSpec(seed=args.seed + i, atoms=args.atoms, roles=args.roles,
                       target_unions=args.unions, target_existentials=args.existentials,
                       max_depth=args.max_depth, gci_count=args.gcis, def_count=args.defs)
        try:
            c, kb = generate(spec)
        except GenerationError as exc:
            raise InputError(str(exc)) from exc
        concept_text, kb_text = render_instance(c, kb)
        if args.out is None:
            sys.stdout.write(concept_text)
            if kb_text is not None:
                sys.stdout.write("# kb\n" + kb_text)
            continue
        if count == 1:
            stem = Path(args.out)
        else:
            Path(args.out).mkdir(parents=True, exist_ok=True)
            stem = Path(args.out) / f"inst_{spec.seed:06d}"
        stem.with_suffix(".cpt").write_text(concept_text, encoding="utf-8")
        if kb_text is not None:
            stem.with_suffix(".kb").write_text(kb_text, encoding="utf-8")
    return 0


def _record(instance: str, engine: str, outcome: Optional[Outcome], wall_ms: float,
            params: dict) -> dict:
    rec: dict = {"instance": instance, "engine": engine,
                 "verdict": outcome.verdict if outcome else "skipped",
                 "conclusive": outcome.conclusive if outcome else False}
    stats = outcome.stats if outcome else {}
    for key in STATS_FIELDS:
        rec[key] = stats.get(key)
    for key in sorted(stats):
        if key not in rec:
            rec[key] = stats[key]
    rec["wall_ms"] = round(wall_ms, 3)
    rec.update(params)
    return rec


def _disagrees(outcomes: dict[str, Outcome], max_domain: int) -> bool:
    conclusive = {o.verdict for o in outcomes.values() if o.conclusive}
    if len(conclusive) > 1:
        return True
    # a small model found by one engine refutes a bounded "no model" answer
    bounded = any(not o.conclusive for o in outcomes.values())
    small = any(o.model is not None and len(o.model.domain) <= max_domain
                for o in outcomes.values())
    return bounded and small


def cmd_bench(args) -> int:
    corpus = Path(args.corpus)
    if not corpus.is_dir():
        raise InputError(f"{corpus}: not a directory")
    engines = [e.strip() for e in args.engines.split(",") if e.strip()]
    unknown = [e for e in engines if e not in ENGINES]
    if unknown or not engines:
        raise InputError(f"unknown engine(s): {', '.join(unknown) or '(none)'}")
    lines, bad = [], []
    for path in sorted(corpus.glob("*.cpt")):
        c = _load_concept(str(path))
        kb_path = path.with_suffix(".kb")
        kb = _load_kb(str(kb_path)) if kb_path.exists() else None
        try:
            params = {k: v for k, v in analyze(c, kb).as_dict().items() if k != "regimes"}
        except ValueError as exc:
            raise InputError(f"{path}: {exc}") from exc
        outcomes: dict[str, Outcome] = {}
        for engine in engines:
            if engine == "sat" and kb is not None and not kb.is_empty():
                lines.append(_record(path.stem, engine, None, 0.0, params))
                continue
            start = time.perf_counter()
            outcomes[engine] = ENGINES[engine](c, kb, args.max_domain)
            elapsed = (time.perf_counter() - start) * 1000
            lines.append(_record(path.stem, engine, outcomes[engine], elapsed, params))
        if _disagrees(outcomes, args.max_domain):
            bad.append(path.stem)
    _write("".join(json.dumps(rec) + "\n" for rec in lines), args.out)
    if bad:
        print("disagreement on: " + " ".join(bad), file=sys.stderr)
        return EXIT_DISAGREE
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dlsat", description="ALC concept satisfiability toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sat", help="decide satisfiability of a concept")
    s.add_argument("file")
    s.add_argument("--tbox")
    s.add_argument("--engine", choices=sorted(ENGINES), default="tableau")
    s.add_argument("--max-domain", type=int, default=3)
    s.add_argument("--model", action="store_true", help="print the extracted model")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_sat)

    a = sub.add_parser("analyze", help="report parameters and complexity regimes")
    a.add_argument("file")
    a.add_argument("--tbox")
    a.add_argument("--json", action="store_true")
    a.set_defaults(func=cmd_analyze)

    r = sub.add_parser("reduce", help="fold GCIs into one definition and top <= A")
    r.add_argument("tbox_file")
    r.add_argument("--out")
    r.set_defaults(func=cmd_reduce)

    e = sub.add_parser("encode", help="write the CNF encoding in DIMACS format")
    e.add_argument("file")
    e.add_argument("--tbox")
    e.add_argument("--out")
    e.set_defaults(func=cmd_encode)

    g = sub.add_parser("gen", help="generate instances with exact parameter values")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--atoms", type=int, default=3)
    g.add_argument("--roles", type=int, default=2)
    g.add_argument("--unions", type=int, default=0)
    g.add_argument("--existentials", type=int, default=0)
    g.add_argument("--max-depth", type=int, default=3)
    g.add_argument("--gcis", type=int, default=0)
    g.add_argument("--defs", type=int, default=0)
    g.add_argument("--count", type=int, default=1)
    g.add_argument("--out", help="file stem, or a directory when --count > 1")
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("bench", help="run engines over a corpus and cross-check verdicts")
    b.add_argument("corpus")
    b.add_argument("--engines", default="tableau,sat")
    b.add_argument("--max-domain", type=int, default=3)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "max_domain", 1) < 1:
        print("dlsat: --max-domain must be at least 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except InputError as exc:
        print(f"dlsat: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
