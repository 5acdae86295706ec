"""The ``fpabd`` command line: problem files in, JSON reports out.

Exit codes: 0 positive verdict or found, 1 negative or none, 2 input error,
3 resource limit.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import abduce, fragments, harness, prap
from .decide import fp_entails, fp_sat
from .formulas import (
    PIT,
    AbductionProblem,
    FormulaError,
    PrAP,
    classify,
    fmt_rational,
    parse_inner,
    parse_outer,
    parse_pit,
    parse_problem,
    render,
    render_problem,
)
from .limits import ResourceLimit, budget
from .semantics import ProbModel, SemanticsError, entropy, eval_fp, world_members

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_LIMIT = 0, 1, 2, 3


class InputError(Exception):
    pass


# ---------------------------------------------------------------- report encoding


def encode(x: Any) -> Any:
    """JSON-ready value: rationals as "a/b", formulas rendered, models as world lists."""
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, Fraction):
        return fmt_rational(x)
    if isinstance(x, float):
        return round(x, 6)
    if isinstance(x, ProbModel):
        return {
            "vars": list(x.varset),
            "worlds": [{"true": sorted(world_members(x.varset, w), key=x.varset.index), "mass": fmt_rational(c)} for w, c in x.dist],
        }
    if isinstance(x, dict):
        return {str(k): encode(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [encode(v) for v in x]
    try:
        return render(x)
    except TypeError:
        return str(x)


def emit_report(report: dict, text: bool = False) -> str:
    """Stable field order (insertion order of the report); entropies to 3 decimals."""
    data = encode(report)
    if not text:
        return json.dumps(data, ensure_ascii=False, indent=2)
    lines: list[str] = []

    def walk(d, indent=""):
        for k, v in d.items():
            if isinstance(v, dict):
                lines.append(f"{indent}{k}:")
                walk(v, indent + "  ")
            elif isinstance(v, list) and v and isinstance(v[0], dict):
                lines.append(f"{indent}{k}:")
                for item in v:
                    lines.append(f"{indent}  - " + ", ".join(f"{a}={b}" for a, b in item.items()))
            elif isinstance(v, list):
                lines.append(f"{indent}{k}: " + ", ".join(map(str, v)))
            else:
                lines.append(f"{indent}{k}: {v}")

    walk(data)
    return "\n".join(lines)


def _entropy(x: float) -> float:
    return round(x, 3)


# ---------------------------------------------------------------- input


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def load_problem(path: str):
    return parse_problem(_read(path))


def _need(obj, cls, what: str):
    if not isinstance(obj, cls):
        raise InputError(f"{what} expected, got a {type(obj).__name__}")
    return obj


def _solution(path: str, P) -> PIT:
    return parse_pit(_read(path), P.variables)


# ---------------------------------------------------------------- commands


def cmd_sat(args) -> tuple[dict, int]:
    T = load_problem(args.file)
    theory = list(T.theory) if not isinstance(T, PrAP) else None
    if theory is None:
        raise InputError("sat expects an FP theory, not a classical PrAP file")
    res = fp_sat(theory, T.variables)
    rep: dict = {"command": "sat", "verdict": res.sat}
    if res.sat:
        rep["witness"] = res.witness
        rep["verified"] = all(eval_fp(res.witness, g) == 1 for g in theory)
    rep["trace"] = {"lp_calls": res.stats.lp_calls, "splits": res.stats.splits}
    return rep, EXIT_OK if res.sat else EXIT_NEGATIVE


def cmd_entail(args) -> tuple[dict, int]:
    T = load_problem(args.file)
    if isinstance(T, PrAP):
        raise InputError("entail expects an FP theory")
    if args.inline:
        delta = parse_outer(args.inline, T.variables)
    elif args.delta:
        delta = parse_outer(_read(args.delta).strip(), T.variables)
    elif T.observation is not None:
        delta = T.observation
    else:
        raise InputError("no formula to entail: give --delta FILE, --inline EXPR or an obs: line")
    mode = "consistent" if args.consistent else "plain"
    res = fp_entails(list(T.theory), delta, mode=mode, varset=T.variables)
    rep: dict = {"command": "entail", "mode": mode, "delta": delta, "verdict": res.holds}
    if res.countermodel is not None:
        rep["countermodel"] = res.countermodel
        rep["verified"] = eval_fp(res.countermodel, delta) != 1
    if res.consistent is not None:
        rep["consistent"] = res.consistent
    return rep, EXIT_OK if res.holds else EXIT_NEGATIVE


def _solution_report(rep: abduce.SolutionReport, P: AbductionProblem) -> dict:
    out: dict = {"verdict": rep.verdict}
    if rep.solution is not None:
        out["solution"] = rep.solution
    if rep.reason:
        out["reason"] = rep.reason
    ev = rep.evidence
    if "entropy" in ev:
        out["entropy"] = _entropy(ev["entropy"])
    for key in ("atoms", "syntactic_atoms", "candidates"):
        if key in ev:
            out[key] = ev[key]
    if "defeater" in ev:
        out["defeater"] = ev["defeater"]
        if "defeater_entropy" in ev:
            out["defeater_entropy"] = _entropy(ev["defeater_entropy"])
    for key in ("model", "countermodel"):
        if key in ev:
            out[key] = ev[key]
    out["trace"] = rep.trace
    return out


def _recheck(P: AbductionProblem, kind: str, pit: PIT) -> bool:
    """End-to-end loop: an emitted solution must pass recognition again."""
    if kind == "sufficient":
        return abduce.recognize_sufficient(P, pit).verdict
    return abduce.recognize_full(P, pit).verdict


def cmd_recognize(args) -> tuple[dict, int]:
    P = _need(load_problem(args.file), AbductionProblem, "an abduction problem")
    pit = _solution(args.solution, P)
    if args.kind == "sufficient":
        rep = abduce.recognize_sufficient(P, pit)
    elif args.kind == "full":
        rep = abduce.recognize_full(P, pit)
    elif args.kind == "minimal":
        rep = abduce.recognize_minimal(P, pit)
    else:
        rep = abduce.recognize_cem(P, pit, hunt_granularity=args.hunt_granularity)
    out = {"command": "recognize", "kind": args.kind, "candidate": pit}
    out.update(_solution_report(rep, P))
    if args.kind in ("full", "cem") and "entropy" not in out:
        try:
            out["entropy"] = _entropy(entropy(pit))
        except (SemanticsError, ValueError):
            pass
    return out, EXIT_OK if rep.verdict else EXIT_NEGATIVE


def _solve_cem(P: AbductionProblem, hunt_granularity: int | None) -> dict:
    first = abduce.solve_concise_full(P)
    out: dict = {"verdict": first.verdict}
    if not first.verdict:
        out["reason"] = first.reason
        return out
    best = first.solution
    rounds = 0
    while True:
        better = abduce.hunt_defeater(P, entropy(best), hunt_granularity)
        if better is None:
            break
        best = better
        rounds += 1
    out["solution"] = best
    out["entropy"] = _entropy(entropy(best))
    out["improvement_rounds"] = rounds
    # the hunt is heuristic; certification needs the exhaustive enumeration
    try:
        out["certified_cem"] = abduce.recognize_cem(P, best, hunt_granularity).verdict
    except ResourceLimit:
        out["certified_cem"] = None
    return out


def cmd_solve(args) -> tuple[dict, int]:
    P = _need(load_problem(args.file), AbductionProblem, "an abduction problem")
    out: dict = {"command": "solve", "mode": args.mode}
    if args.mode == "sufficient":
        out.update(_solution_report(abduce.solve_sufficient(P), P))
        kind = "sufficient"
    elif args.mode == "full":
        out.update(_solution_report(abduce.solve_concise_full(P), P))
        kind = "full"
    else:
        out.update(_solve_cem(P, args.hunt_granularity))
        kind = "full"
    if out.get("solution") is not None:
        out["verified"] = _recheck(P, kind, out["solution"])
    if not out["verdict"]:
        out["verdict"] = "none"
        return out, EXIT_NEGATIVE
    return out, EXIT_OK


def cmd_classify(args) -> tuple[dict, int]:
    obj = load_problem(args.file)
    if isinstance(obj, PrAP):
        out = {"command": "classify", "kind": "PrAP", "is_distribution": prap.is_distribution(obj)}
        return out, EXIT_OK
    flags = classify(obj).as_dict()
    out = {"command": "classify", "kind": "problem" if isinstance(obj, AbductionProblem) else "theory"}
    out.update(flags)
    return out, EXIT_OK


def _term(P: PrAP, text: str | None):
    if text is None:
        raise InputError("--term EXPR is required")
    return parse_inner(text, P.variables)


def cmd_prap(args) -> tuple[dict, int]:
    P = _need(load_problem(args.file), PrAP, "a PrAP file")
    out: dict = {"command": f"prap {args.action}"}
    if args.action == "coherent":
        res = prap.is_coherent(P.assignment, P.varset)
        out["verdict"] = res.coherent
        if res.witness is not None:
            out["witness"] = res.witness
        return out, EXIT_OK if res.coherent else EXIT_NEGATIVE
    if args.action == "exists":
        tau = prap.prap_exists(P)
        out["verdict"] = tau is not None
        if tau is not None:
            out["solution"] = tau
            out["verified"] = prap.prap_recognize(P, tau)
        else:
            out["verdict"] = "none"
        return out, EXIT_OK if tau is not None else EXIT_NEGATIVE
    if args.action == "recognize":
        tau = _term(P, args.term)
        ok = prap.prap_recognize(P, tau, route=args.route)
        out.update(term=tau, verdict=ok)
        out["fp_route"] = prap.prap_recognize_fp(P, tau)
        if ok:
            out["witness"] = prap.coherent_witness(P, tau)
        return out, EXIT_OK if ok else EXIT_NEGATIVE
    # preferred
    sols = prap.prap_solutions(P)
    out["solutions"] = sols
    if args.term is None:
        pref = [t for t in sols if prap.prap_preferred(P, t, sols)]
        out["preferred"] = pref
        out["verdict"] = bool(pref)
        return out, EXIT_OK if pref else EXIT_NEGATIVE
    tau = _term(P, args.term)
    ok = prap.prap_preferred(P, tau, sols)
    out.update(term=tau, verdict=ok, fp_route=prap.prap_preferred_fp(P, tau, sols))
    return out, EXIT_OK if ok else EXIT_NEGATIVE


def cmd_harness(args) -> tuple[dict, int]:
    if args.action == "gen":
        cfg = harness.GenConfig(
            seed=args.seed if args.seed is not None else 0,
            n_vars=args.gen_vars,
            event_class=args.event_class,
            depth=args.depth,
            theory_size=args.theory_size,
            granularity=args.granularity,
            fragment=args.fragment,
        )
        P, st = harness.gen_problem_with_stats(cfg)
        text = render_problem(P)
        if args.out:
            Path(args.out).write_text(text, encoding="utf-8")
        out = {
            "command": "harness gen",
            "fragment": args.fragment,
            "seed": cfg.seed,
            "attempts": st.attempts,
            "bias_ratio": round(st.ratio, 3),
            "problem": text,
        }
        return out, EXIT_OK
    if args.suite is None:
        raise InputError("harness crosscheck needs a suite name")
    summary = harness.crosscheck(args.suite, n=args.n, seed=args.seed or 0, out_dir=args.out_dir)
    d = summary.as_dict()
    if not args.timings:
        d.pop("seconds")
    out = {"command": "harness crosscheck", "verdict": summary.ok}
    out.update(d)
    return out, EXIT_OK if summary.ok else EXIT_NEGATIVE


# ---------------------------------------------------------------- argument parsing


def _globals(parser: argparse.ArgumentParser, suppress: bool) -> None:
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--budget", type=float, metavar="MS", default=default, help="wall-clock budget in milliseconds")
    parser.add_argument("--max-vars", type=int, metavar="N", default=default, help="refuse problems with more variables")
    parser.add_argument("--seed", type=int, metavar="S", default=default, help="seed for generators and suites")
    parser.add_argument("--text", action="store_true", default=argparse.SUPPRESS if suppress else False, help="human-readable report")
    parser.add_argument(
        "--timings", action="store_true", default=argparse.SUPPRESS if suppress else False, help="add wall-clock timings (breaks byte-identical output)"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fpabd", description="Abduction and satisfiability for fuzzy probabilistic logic.")
    _globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="verb", required=True)

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        _globals(p, suppress=True)
        return p

    p = add("sat", "satisfiability of a theory")
    p.add_argument("file")
    p = add("entail", "entailment of a formula by a theory")
    p.add_argument("file")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--delta", metavar="FILE")
    g.add_argument("--inline", metavar="EXPR")
    p.add_argument("--consistent", action="store_true", help="also require the theory to be satisfiable")
    p = add("recognize", "check a candidate solution")
    p.add_argument("file")
    p.add_argument("--kind", choices=("sufficient", "full", "cem", "minimal"), required=True)
    p.add_argument("--solution", metavar="FILE", required=True)
    p.add_argument("--hunt-granularity", type=int, default=20, help="granularity of the CEM defeater hunt")
    p = add("solve", "search for a solution")
    p.add_argument("file")
    p.add_argument("--mode", choices=("sufficient", "full", "cem"), required=True)
    p.add_argument("--hunt-granularity", type=int, default=20)
    p = add("classify", "fragment membership flags")
    p.add_argument("file")
    p = add("prap", "classical probabilistic abduction")
    p.add_argument("action", choices=("recognize", "preferred", "exists", "coherent"))
    p.add_argument("file")
    p.add_argument("--term", metavar="EXPR")
    p.add_argument("--route", choices=("auto", "lp", "distribution"), default="auto")
    p = add("harness", "random instances and cross-check suites")
    p.add_argument("action", choices=("gen", "crosscheck"))
    p.add_argument("suite", nargs="?", choices=harness.SUITES)
    p.add_argument("-n", type=int, default=None, help="number of instances")
    p.add_argument("--out-dir", default=None, help="directory for .fp reproductions")
    p.add_argument("--fragment", choices=harness.FRAGMENTS, default="none")
    p.add_argument("--vars", dest="gen_vars", type=int, default=3)
    p.add_argument("--event-class", choices=harness.EVENT_CLASSES, default="general")
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--theory-size", type=int, default=2)
    p.add_argument("--granularity", type=int, default=4)
    p.add_argument("--out", default=None, help="write the generated problem here")
    return parser


COMMANDS = {
    "sat": cmd_sat,
    "entail": cmd_entail,
    "recognize": cmd_recognize,
    "solve": cmd_solve,
    "classify": cmd_classify,
    "prap": cmd_prap,
    "harness": cmd_harness,
}


def run(argv: Sequence[str] | None = None) -> tuple[dict, int, bool]:
    """Parse and execute; returns (report, exit code, text flag)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = EXIT_OK if exc.code == 0 else EXIT_INPUT
        return {"error": "usage"}, code, False
    t0 = time.perf_counter()
    try:
        with budget(args.budget, args.max_vars):
            report, code = COMMANDS[args.verb](args)
    except ResourceLimit as exc:
        return {"command": args.verb, "error": "resource limit", "detail": str(exc)}, EXIT_LIMIT, args.text
    except (InputError, FormulaError, fragments.FragmentError, SemanticsError, ValueError) as exc:
        return {"command": args.verb, "error": "input error", "detail": str(exc)}, EXIT_INPUT, args.text
    if args.timings:
        report["timings"] = {"total_ms": round((time.perf_counter() - t0) * 1000, 1)}
    return report, code, args.text


def main(argv: Sequence[str] | None = None) -> int:
    report, code, text = run(argv)
    if report.get("error") != "usage":
        print(emit_report(report, text))
    return code


if __name__ == "__main__":
    sys.exit(main())
