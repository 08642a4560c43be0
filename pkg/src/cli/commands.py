# src/cli/commands.py
"""
Command-line front end.

    mf         moonflower number of a family file
    sparsify   build and verify a sparsifier for a code file
    verify     check a sparsifier file against a code file
    lowerbound write the chain code, optionally certify a sparsifier against it
    suite      run acceptance suites
    gen        write generated families and codes
    oracle     run a brute-force engine on a family or code file

Exit codes: 0 pass, 1 verification failure, 2 input error, 3 budget
exceeded, 4 retries exhausted.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np
from dotenv import load_dotenv

from cli.manifest import RunManifest
from common import report
from common.config import default_seed, output_dir
from common.errors import BudgetExceeded, RetriesExhausted, ValidationError
from oracle.bruteforce import OracleBudget, min_sparsifier_bruteforce, mf_bruteforce, nrd_bruteforce, phi_exact
from setfam.family import SetFamily, random_family
from setfam.generate import gen_lower_bound_family
from setfam.moonflower import DEFAULT_NODE_BUDGET, family_stats, mf_exact, mf_greedy
from sparsify.build import SparsifierConfig, build_sparsifier, size_report
from sparsify.code import Code, random_block_code, random_code
from sparsify.lower_bound import GAPS, certify_lower_bound, gen_chain_code
from sparsify.sparsifier import Sparsifier, verify_sparsifier
from suites.run_suites import SUITES, run_suite

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3
EXIT_RETRIES = 4


def emit(args, payload, lines):
    if args.format == "json":
        print(json.dumps(payload, indent=2, default=str))
    else:
        for line in lines:
            print(line)


# ------------------------------------------------------------------ commands

def cmd_mf(args, manifest):
    fam = SetFamily.from_file(args.family)
    manifest.add_input(args.family)
    stats = family_stats(fam, exact=False)
    try:
        result = mf_greedy(fam) if args.greedy else mf_exact(fam, budget=args.budget)
    except BudgetExceeded as exc:
        payload = {"mf_lower": exc.best, "exact": False, "nodes": exc.used,
                   "witness": exc.witness.to_json() if exc.witness else None,
                   "stats": stats.to_json(), "error": str(exc)}
        emit(args, payload, [f"MF >= {exc.best} (search stopped after {exc.used} nodes)"])
        return EXIT_BUDGET

    petals = [sorted(fam[i]) for i in result.witness.petal_indices]
    payload = {"mf": result.value, "exact": result.exact, "nodes": result.nodes,
               "witness": result.witness.to_json(), "petals": petals, "stats": stats.to_json()}
    lines = [
        f"MF         {result.value}{'' if result.exact else ' (greedy lower bound)'}",
        f"members    {stats.size}",
        f"support    {stats.support_size}",
        f"max size   {stats.max_set_size}",
        f"core       {sorted(result.witness.core)}",
    ]
    lines += [f"petal      {p}  private {x}" for p, x in zip(petals, result.witness.private)]
    emit(args, payload, lines)
    return EXIT_OK


def cmd_sparsify(args, manifest):
    code = Code.from_file(args.code)
    manifest.add_input(args.code)
    seed = default_seed() if args.seed is None else args.seed
    manifest.seed = seed
    cfg = SparsifierConfig(epsilon=args.epsilon, seed=seed, max_build_retries=args.retries,
                           k=args.k, w_min=args.w_min, w_star=args.w_star)
    out = Path(args.out) if args.out else output_dir() / "sparsify"
    try:
        sp, log = build_sparsifier(code, cfg)
    except RetriesExhausted as exc:
        sp, log = exc.best
        path = sp.save(out / "sparsifier_best.json")
        log.save(out / "build_log_best.json", code if args.residuals else None)
        manifest.add_output(path)
        emit(args, {"error": str(exc), "attempts": exc.attempts,
                    "best_max_rel_err": float(log.verify.max_rel_err), "saved": str(path)},
             [f"ERROR: {exc}", f"  best attempt saved to {path}"])
        return EXIT_RETRIES

    sp_path = sp.save(out / "sparsifier.json")
    log_path = log.save(out / "build_log.json", code if args.residuals else None)
    manifest.add_output(sp_path)
    manifest.add_output(log_path)
    sizes = size_report(sp, log.k, code.n, args.epsilon)
    payload = {"T": len(sp), "rounds": sp.rounds, "attempts": log.attempts,
               "max_rel_err": float(log.verify.max_rel_err), "k": log.k, "k_source": log.k_source,
               "size_report": sizes, "sparsifier": str(sp_path), "log": str(log_path)}
    emit(args, payload, [
        f"|T|          {len(sp)}",
        f"rounds       {sp.rounds}",
        f"attempts     {log.attempts}",
        f"max rel err  {float(log.verify.max_rel_err):.6g}",
        f"k            {log.k} ({log.k_source})",
        f"size ratio   {sizes['ratio']:.4g} of k log2(n)/eps^2",
        f"written      {sp_path}",
    ])
    return EXIT_OK


def cmd_verify(args, manifest):
    code = Code.from_file(args.code)
    sp = Sparsifier.load(args.sparsifier)
    manifest.add_input(args.code)
    manifest.add_input(args.sparsifier)
    result = verify_sparsifier(code, sp, args.epsilon)
    lines = [f"{'PASS' if result.passed else 'FAIL'}  max rel err {float(result.max_rel_err):.6g} "
             f"(eps {args.epsilon}) over {result.codewords} codewords"]
    if not result.passed:
        lines.append("worst violators:")
        lines += [f"  codeword {r['index']}: wt {r['weight']}, estimate {r['estimate']}, "
                  f"rel err {r['rel_err']:.4g}" for r in result.worst]
    emit(args, result.to_json(), lines)
    return EXIT_OK if result.passed else EXIT_FAIL


def cmd_lowerbound(args, manifest):
    code, spec = gen_chain_code(args.n, args.k, args.epsilon, gap=args.gap)
    out = Path(args.out) if args.out else output_dir() / "lowerbound"
    code_path = code.to_file(out / "chain_code.txt")
    spec_path = out / "chain_spec.json"
    spec_path.write_text(json.dumps(spec.to_json(), indent=2))
    manifest.add_output(code_path)
    manifest.add_output(spec_path)

    payload = {"spec": spec.to_json(), "codewords": len(code), "code": str(code_path)}
    lines = [f"m={spec.m}  a={list(spec.a)}  s={spec.s}  |C|={len(code)}  written {code_path}"]
    exit_code = EXIT_OK
    if args.against:
        manifest.add_input(args.against)
        cert = certify_lower_bound(spec, Sparsifier.load(args.against), args.epsilon)
        payload["certificate"] = cert.to_json()
        lines.append(f"verdict {cert.verdict}: |T|={cert.size}, k*s={cert.required}")
        if cert.witness:
            w = cert.witness
            lines.append(f"  witness i={w['i']} j={w['j']}: estimate {w['estimate']}, weights {w['weights']}")
        if cert.verdict == "invalid":
            exit_code = EXIT_FAIL
    emit(args, payload, lines)
    return exit_code


def cmd_suite(args, manifest):
    names = list(SUITES) if args.suite == "all" else [args.suite]
    seed = default_seed() if args.seed is None else args.seed
    manifest.seed = seed
    results = [run_suite(name, seed=seed, trials=args.trials, out_dir=args.out) for name in names]
    payload = {"suites": [r.to_json() for r in results], "passed": all(r.passed for r in results)}
    lines = [f"{r.name:<12} {'PASS' if r.passed else 'FAIL'}  {len(r.table):>6} rows  {r.seconds:8.1f}s"
             for r in results]
    emit(args, payload, lines)
    return EXIT_OK if payload["passed"] else EXIT_FAIL


def cmd_gen(args, manifest):
    seed = default_seed() if args.seed is None else args.seed
    manifest.seed = seed
    rng = np.random.default_rng(seed)
    if args.kind == "lowerbound":
        obj = gen_lower_bound_family(args.k, args.w)
    elif args.kind == "family":
        obj = random_family(args.n, args.size, args.max_set, rng)
    elif args.kind == "code":
        obj = random_code(args.n, args.size, args.max_set, rng)
    else:
        obj = random_block_code(args.n, args.blocks, args.size, rng)
    path = obj.to_file(args.out)
    manifest.add_output(path)
    emit(args, {"kind": args.kind, "size": len(obj), "n": obj.n, "path": str(path)},
         [f"wrote {len(obj)} sets on n={obj.n} to {path}"])
    return EXIT_OK


def cmd_oracle(args, manifest):
    manifest.add_input(args.file)
    budget = OracleBudget(max_subsets=args.max_subsets)
    if args.engine == "mf":
        result = mf_bruteforce(SetFamily.from_file(args.file), budget)
    elif args.engine == "phi":
        result = phi_exact(SetFamily.from_file(args.file), budget)
    elif args.engine == "nrd":
        result = nrd_bruteforce(Code.from_file(args.file), budget)
    else:
        if args.epsilon is None:
            raise ValidationError("--epsilon is required for the sparsifier oracle")
        result = min_sparsifier_bruteforce(Code.from_file(args.file), args.epsilon, budget)
    payload = result.to_json()
    emit(args, payload, [f"{args.engine}: {result.value}", f"  witness {payload['witness']}"])
    return EXIT_OK


# -------------------------------------------------------------------- parser

def build_parser():
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--format", choices=["text", "json"], default="text")
    shared.add_argument("--quiet", action="store_true", help="suppress progress output")
    shared.add_argument("--manifest", default=None, help="write a run manifest JSON here")

    ap = argparse.ArgumentParser(prog="moonflower", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mf", parents=[shared], help="moonflower number of a family file")
    p.add_argument("family")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", default=True)
    mode.add_argument("--greedy", action="store_true")
    p.add_argument("--budget", type=int, default=DEFAULT_NODE_BUDGET)
    p.set_defaults(handler=cmd_mf)

    p = sub.add_parser("sparsify", parents=[shared], help="build an epsilon-sparsifier")
    p.add_argument("code")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--retries", type=int, default=10)
    p.add_argument("--k", type=int, default=None, help="moonflower parameter; NRD + 1 when omitted")
    p.add_argument("--w-min", type=int, default=None)
    p.add_argument("--w-star", type=int, default=None)
    p.add_argument("--residuals", action="store_true", help="include per-codeword residuals in the log")
    p.add_argument("--out", default=None)
    p.set_defaults(handler=cmd_sparsify)

    p = sub.add_parser("verify", parents=[shared], help="verify a sparsifier file")
    p.add_argument("code")
    p.add_argument("sparsifier")
    p.add_argument("--epsilon", type=float, required=True)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("lowerbound", parents=[shared], help="chain code and certifier")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--gap", choices=GAPS, default="standard")
    p.add_argument("--against", default=None, help="sparsifier file to certify")
    p.add_argument("--out", default=None)
    p.set_defaults(handler=cmd_lowerbound)

    p = sub.add_parser("suite", parents=[shared], help="run acceptance suites")
    p.add_argument("--suite", choices=sorted(SUITES) + ["all"], required=True)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(handler=cmd_suite)

    p = sub.add_parser("gen", parents=[shared], help="generate a family or code file")
    p.add_argument("kind", choices=["lowerbound", "family", "code", "blockcode"])
    p.add_argument("--out", required=True)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--w", type=int, default=2)
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--size", type=int, default=10)
    p.add_argument("--max-set", type=int, default=3)
    p.add_argument("--blocks", type=int, default=4)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(handler=cmd_gen)

    p = sub.add_parser("oracle", parents=[shared], help="brute-force ground truth")
    p.add_argument("engine", choices=["mf", "nrd", "phi", "sparsifier"])
    p.add_argument("file")
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--max-subsets", type=int, default=OracleBudget().max_subsets)
    p.set_defaults(handler=cmd_oracle)
    return ap


def main(argv=None):
    load_dotenv()
    args = build_parser().parse_args(argv)
    report.set_verbose(args.format == "text" and not args.quiet)
    config = {k: v for k, v in vars(args).items() if k != "handler"}
    manifest = RunManifest(command=args.command, config=config)

    try:
        code = args.handler(args, manifest)
    except ValidationError as exc:
        print(f"ERROR: {exc}", file=sys.stderr)
        code = EXIT_INPUT
    except BudgetExceeded as exc:
        print(f"ERROR: {exc}", file=sys.stderr)
        code = EXIT_BUDGET
    except RetriesExhausted as exc:
        print(f"ERROR: {exc}", file=sys.stderr)
        code = EXIT_RETRIES

    if args.manifest:
        manifest.finish(code)
        manifest.save(args.manifest)
    return code


if __name__ == "__main__":
    sys.exit(main())
