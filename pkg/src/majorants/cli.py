"""Command-line front end.

    majorants majorize <file> [--out <file>] [--tol <eps>] [--max-iters <n>] [--seed <s>]
    majorants verify <solution> <problem>
    majorants sidon <list> --j <j>
    majorants gap <file>
    majorants bench <dir> [--workers <n>]
    majorants corpus <dir> [--count <n>] [--seed <s>]

Exit codes: 0 ok, 2 input error, 3 non-convergence, 4 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .seqz import SeqZ, norm_2j_pow_direct
from .solver import MajorantSolution, SolverConfig, derive_target, solve
from .verify import (
    exactness_gap,
    instance_rngs,
    is_sidon_bj,
    random_instance,
    uniqueness_probe,
    verify_solution,
)

EXIT_OK, EXIT_INPUT, EXIT_NOCONV, EXIT_VERIFY = 0, 2, 3, 4

log = logging.getLogger("majorants")


class InputError(ValueError):
    pass


# -- file formats -----------------------------------------------------------


def seq_to_records(x: SeqZ) -> list[dict]:
    return [{"n": n, "re": float(v.real), "im": float(v.imag)}
            for n, v in zip(x.indices(), x.coeffs) if v != 0]


def records_to_seq(records) -> SeqZ:
    if not isinstance(records, list):
        raise InputError("coefficient list expected")
    values, last = {}, None
    for rec in records:
        if not isinstance(rec, dict) or "n" not in rec:
            raise InputError(f"bad coefficient record {rec!r}")
        n = rec["n"]
        if not isinstance(n, int) or isinstance(n, bool):
            raise InputError(f"index must be an integer, got {n!r}")
        if last is not None and n <= last:
            raise InputError("indices must be strictly increasing")
        last = n
        try:
            values[n] = complex(float(rec.get("re", 0.0)), float(rec.get("im", 0.0)))
        except (TypeError, ValueError) as exc:
            raise InputError(f"bad coefficient at n={n}: {exc}") from None
    return SeqZ.from_mapping(values)


def _load_json(path) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON ({exc})") from None
    if not isinstance(data, dict):
        raise InputError(f"{path}: top-level object expected")
    return data


def read_sequence_file(path) -> tuple[int, SeqZ]:
    """Parse ``{"j": int, "coeffs": [{"n", "re", "im"}, ...]}``."""
    data = _load_json(path)
    j = data.get("j")
    if not isinstance(j, int) or isinstance(j, bool) or j < 1:
        raise InputError(f"{path}: 'j' must be a positive integer")
    return j, records_to_seq(data.get("coeffs", []))


def write_sequence_file(path, a: SeqZ, j: int) -> None:
    Path(path).write_text(json.dumps({"j": j, "coeffs": seq_to_records(a)}, indent=1) + "\n")


def solution_to_dict(sol: MajorantSolution, j: int, seed: int) -> dict:
    return {
        "seed": seed, "j": j,
        "b": seq_to_records(sol.b),
        "Fhat": seq_to_records(sol.Fhat),
        "FhatMin": seq_to_records(sol.FhatMin),
        "M": sol.M, "N": sol.N, "r": sol.r, "lam": sol.lam,
        "iters": sol.iters, "kkt_residual": sol.kkt_residual,
        "converged": sol.converged,
    }


def solution_from_dict(data: dict) -> MajorantSolution:
    try:
        return MajorantSolution(
            b=records_to_seq(data["b"]),
            Fhat=records_to_seq(data.get("Fhat", [])),
            FhatMin=records_to_seq(data.get("FhatMin", [])),
            M=float(data.get("M", 0.0)), N=float(data.get("N", 0.0)),
            r=float(data.get("r", 1.0)), lam=float(data.get("lam", 0.0)),
            iters=int(data.get("iters", 0)),
            kkt_residual=float(data.get("kkt_residual", 0.0)),
            converged=bool(data.get("converged", True)),
        )
    except KeyError as exc:
        raise InputError(f"solution is missing field {exc}") from None


# -- commands ---------------------------------------------------------------


def _table(title: str, x: SeqZ) -> list[str]:
    if x.is_zero:
        return [f"{title}: zero"]
    out = [f"{title}:"]
    for n, v in zip(x.indices(), x.coeffs):
        if v != 0:
            out.append(f"  {n:>5d}  {v.real: .12e}" + (f"  {v.imag:+.3e}j" if v.imag else ""))
    return out


def _exit_code(converged: bool, verified: bool) -> int:
    if not converged:
        return EXIT_NOCONV
    return EXIT_OK if verified else EXIT_VERIFY


def cmd_majorize(args) -> int:
    j, a = read_sequence_file(args.input)
    cfg = SolverConfig(max_iters=args.max_iters, seed=args.seed, kkt_tol=args.kkt_tol,
                       restarts=max(args.restarts, 2))
    problem = derive_target(a, j, cfg)
    sol = solve(problem, cfg)
    rep = verify_solution(problem, sol, tol=args.tol)
    print(f"# majorize {args.input}  j={j}  seed={args.seed}  tol={args.tol:g}")
    if problem.trivial:
        print("trivial problem: a = 0, b = 0, r = 1")
    else:
        print(f"|S| = {len(problem.S)}  iters = {sol.iters}  kkt_residual = {sol.kkt_residual:.3e}"
              f"  converged = {sol.converged}")
        if problem.borderline:
            print(f"warning: coefficients of c near the support threshold at {list(problem.borderline)}")
        for line in _table("b", sol.b) + _table("Fhat", sol.Fhat) + _table("FhatMin", sol.FhatMin):
            print(line)
        print(f"M = {sol.M:.12g}")
        print(f"N = {sol.N:.12g}   (N(a) = {problem.normA:.12g})")
        print(f"r = {sol.r:.6f}")
        if args.restarts >= 2:
            dist, bad = uniqueness_probe(problem, cfg)
            print(f"uniqueness: {args.restarts} restarts, max distance {dist:.3e}, "
                  f"{bad} non-convergent")
    for line in rep.lines():
        print(line)
    print("verification:", "PASS" if rep.ok else "FAIL")
    if args.out:
        Path(args.out).write_text(json.dumps(solution_to_dict(sol, j, args.seed), indent=1) + "\n")
    return _exit_code(sol.converged, rep.ok)


def cmd_verify(args) -> int:
    j, a = read_sequence_file(args.problem)
    data = _load_json(args.solution)
    sol = solution_from_dict(data)
    if data.get("j", j) != j:
        raise InputError("solution and problem have different orders j")
    problem = derive_target(a, j)
    rep = verify_solution(problem, sol, tol=args.tol)
    print(f"# verify {args.solution} against {args.problem}  j={j}  seed={data.get('seed', 0)}")
    for line in rep.lines():
        print(line)
    print("verification:", "PASS" if rep.ok else "FAIL")
    return _exit_code(sol.converged, rep.ok)


def cmd_sidon(args) -> int:
    try:
        S = [int(t) for t in args.set.replace(" ", "").split(",") if t]
        result = is_sidon_bj(S, args.j)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    print("true" if result else "false")
    return EXIT_OK


def cmd_gap(args) -> int:
    j, a = read_sequence_file(args.input)
    gap = exactness_gap(a, j)
    scale = norm_2j_pow_direct(a.abs(), j)
    print(f"N(|a|) = {scale:.12g}")
    print(f"N(a)   = {norm_2j_pow_direct(a, j):.12g}")
    print(f"gap    = {gap:.12g}")
    print("predicted: r = 1" if gap <= 1e-10 * scale else "predicted: r > 1")
    return EXIT_OK


def _bench_one(path: str) -> dict:
    j, a = read_sequence_file(path)
    t0 = time.perf_counter()
    problem = derive_target(a, j)
    sol = solve(problem)
    return {
        "instance": Path(path).stem, "S_size": len(problem.S), "j": j,
        "iters": sol.iters, "kkt_residual": f"{sol.kkt_residual:.3e}",
        "r": repr(sol.r), "converged": int(sol.converged),
        "seconds": f"{time.perf_counter() - t0:.4f}",
    }


BENCH_FIELDS = ["instance", "S_size", "j", "iters", "kkt_residual", "r", "converged", "seconds"]


def cmd_bench(args) -> int:
    root = Path(args.corpus)
    try:
        files = sorted(str(p) for p in root.iterdir() if p.suffix == ".json")
    except OSError as exc:
        raise InputError(f"cannot read directory {root}: {exc.strerror}") from None
    if args.workers > 1 and len(files) > 1:
        with ProcessPoolExecutor(args.workers) as pool:
            rows = list(pool.map(_bench_one, files))
    else:
        rows = [_bench_one(f) for f in files]
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.DictWriter(out, fieldnames=BENCH_FIELDS)
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if args.out:
            out.close()
    return EXIT_OK


def cmd_corpus(args) -> int:
    root = Path(args.dir)
    root.mkdir(parents=True, exist_ok=True)
    for i, rng in enumerate(instance_rngs(args.seed, args.count)):
        a, j = random_instance(rng)
        write_sequence_file(root / f"inst{i:04d}.json", a, j)
    print(f"wrote {args.count} instances to {root} (seed={args.seed})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="majorants", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("majorize", help="solve, verify and report one sequence file")
    p.add_argument("input")
    p.add_argument("--out", help="write the solution as JSON")
    p.add_argument("--tol", type=float, default=1e-7, help="verification tolerance")
    p.add_argument("--kkt-tol", type=float, default=SolverConfig.kkt_tol)
    p.add_argument("--max-iters", type=int, default=SolverConfig.max_iters)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=0,
                   help="random restarts for the uniqueness probe (0 = skip)")
    p.set_defaults(func=cmd_majorize)

    p = sub.add_parser("verify", help="re-verify a saved solution")
    p.add_argument("solution")
    p.add_argument("problem")
    p.add_argument("--tol", type=float, default=1e-7)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sidon", help="test the Sidon B_j property of an integer set")
    p.add_argument("set", help="comma separated integers, e.g. 0,1,3")
    p.add_argument("--j", type=int, required=True)
    p.set_defaults(func=cmd_sidon)

    p = sub.add_parser("gap", help="exactness gap N(|a|) - N(a)")
    p.add_argument("input")
    p.set_defaults(func=cmd_gap)

    p = sub.add_parser("bench", help="solve every *.json in a directory, CSV to stdout")
    p.add_argument("corpus")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("corpus", help="write a seeded random corpus of sequence files")
    p.add_argument("dir")
    p.add_argument("--count", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_corpus)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as exc:
        # solver preconditions (window cap, order) are input errors too
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
