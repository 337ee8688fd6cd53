"""Command-line front end.

Data goes to stdout and is machine-parseable (JSON, CSV, or .plr);
diagnostics go to stderr.  Exit codes: 0 success, 1 invalid input or
usage, 2 size-guard refusal, 3 a check that evaluated to false.

JSON outputs carry seed/version/command metadata; big integers are
decimal strings and rationals are {"num", "den"} pairs, so nothing is
truncated to floats on the way out.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, census, expander, lab, plr, sampler, subsquares
from .core import PartialLatinRectangle
from .errors import LatinLabError, SizeGuardExceeded


class _Failed(Exception):
    """A subcommand-defined check came out false (exit 3)."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit 2; the guard owns that code
        self.print_usage(sys.stderr)
        raise LatinLabError(message)


def _jsonable(value):
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, int):
        return str(value)
    if isinstance(value, Fraction):
        return {"num": str(value.numerator), "den": str(value.denominator)}
    if isinstance(value, float):
        return value
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _emit_json(args, payload: dict) -> None:
    doc = {"version": __version__, "command": args.command, "seed": getattr(args, "seed", None)}
    doc.update(payload)
    print(json.dumps(_jsonable(doc)))


def _emit_text(pairs) -> None:
    for key, value in pairs:
        print(f"{key} = {value}")


def _default_seed() -> int:
    return int(os.environ.get("LATINLAB_SEED", "0"))


def _load_pattern(path: str) -> PartialLatinRectangle:
    return plr.parse_plr(Path(path).read_text())


def _load_rectangle(path: str):
    return _load_pattern(path).as_rectangle()


def _apply_thread_cap(threads: int | None) -> None:
    if threads is None:
        return
    if threads < 1:
        raise LatinLabError("--threads must be positive")
    try:
        import numba

        numba.set_num_threads(min(threads, numba.get_num_threads()))
    except ImportError:
        pass


def _cmd_census(args) -> int:
    pattern = _load_pattern(args.pattern) if args.pattern else None
    if pattern is not None and (args.k is None or args.n is None):
        args.k, args.n = pattern.k, pattern.n
    if args.k is None or args.n is None:
        raise LatinLabError("census needs --k and --n (or a --pattern fixing them)")
    result = census.census(args.k, args.n, pattern, guard_override=args.guard_override)
    if args.json:
        payload = {"k": result.k, "n": result.n, "total": result.total}
        if result.constrained is not None:
            payload["constrained"] = result.constrained
        _emit_json(args, payload)
    else:
        pairs = [("k", result.k), ("n", result.n), ("total", result.total)]
        if result.constrained is not None:
            pairs.append(("constrained", result.constrained))
        _emit_text(pairs)
    return 0


def _cmd_sample(args) -> int:
    if args.method == "exact":
        rng = np.random.default_rng(args.seed)
        batch = sampler.ExactSampler(args.k, args.n, guard_override=args.guard_override)(args.count, rng)
    else:
        cfg = sampler.SamplerConfig(
            "switch-mcmc", args.burn_in, args.seed, args.max_cycle_half_length
        )
        batch = sampler.sample_mcmc_batch(args.k, args.n, args.count, cfg)
    blocks = []
    for grid in batch:
        rect = PartialLatinRectangle.from_grid([[int(v) for v in row] for row in grid])
        blocks.append(plr.format_plr(rect))
    print("\n".join(blocks), end="")
    return 0


def _cmd_subsquares(args) -> int:
    rect = _load_rectangle(args.input)
    result = subsquares.subsquare_census(rect, args.order, args.max_symbols, with_witnesses=args.witnesses)
    payload = {"order": result.order, "cap": result.cap, "count": result.count}
    if result.witnesses is not None:
        payload["witnesses"] = [
            {"rows": list(r), "cols": list(c), "symbols": list(s)} for r, c, s in result.witnesses
        ]
    if args.json:
        _emit_json(args, payload)
    else:
        _emit_text([("order", result.order), ("cap", result.cap), ("count", result.count)])
        if result.witnesses is not None:
            for r, c, s in result.witnesses:
                print(f"witness rows={list(r)} cols={list(c)} symbols={list(s)}")
    return 0


def _parse_edge_list(tup, row: int, text: str | None):
    if not text:
        return ()
    cols = [int(tok) for tok in text.split(",") if tok.strip()]
    matching = dict(tup.matchings[row - 1])
    missing = [c for c in cols if c not in matching]
    if missing:
        raise LatinLabError(f"--exclude-cols {missing} are not matched in row {row}")
    return tuple((c, matching[c]) for c in cols)


def _cmd_digraph(args) -> int:
    from .core import to_matchings

    rect = _load_rectangle(args.input)
    tup = to_matchings(rect)
    excluded = _parse_edge_list(tup, args.row, args.exclude_cols)
    d = expander.build_auxiliary_digraph(tup, args.row, excluded)
    if args.check == "degrees":
        outs = [int(x) for x in d.out_degrees()]
        ins = [int(x) for x in d.in_degrees()]
        lo = rect.n - rect.k - len(excluded)
        hi = rect.n - rect.k
        within = all(lo <= x <= hi for x in outs + ins)
        _emit_json(args, {
            "vertices": list(d.labels), "out_degrees": outs, "in_degrees": ins,
            "bound_low": lo, "bound_high": hi, "within_bounds": within,
        })
        if not within:
            raise _Failed("semidegrees escape the predicted bounds")
    elif args.check == "expander":
        verdict = expander.is_robust_outexpander(
            d, args.nu, args.tau, mode=args.mode, budget=args.budget,
            rng=np.random.default_rng(args.seed),
        )
        _emit_json(args, {
            "holds": verdict.holds,
            "witness": list(verdict.witness) if verdict.witness else None,
            "exhaustive": verdict.exhaustive,
            "subsets_checked": verdict.subsets_checked,
            "note": None if verdict.exhaustive else "sampled mode: a pass is not a proof",
        })
        if not verdict.holds:
            raise _Failed("robust outexpansion fails; witness emitted")
    elif args.check == "paths":
        if args.u is None or args.length is None:
            raise LatinLabError("--check paths needs --u and --length (and --v for paths)")
        if args.v is None:
            count = expander.count_cycles_through(d, args.u, args.length)
            _emit_json(args, {"u": args.u, "length": args.length, "cycles": count})
        else:
            count = expander.count_paths(d, args.u, args.v, args.length)
            _emit_json(args, {"u": args.u, "v": args.v, "length": args.length, "paths": count})
    else:
        raise LatinLabError(f"unknown check {args.check!r}")
    return 0


def _cmd_estimate(args) -> int:
    pattern = _load_pattern(args.pattern)
    method = {"exact": "exact-enumeration", "mcmc": "switch-mcmc"}.get(args.method, args.method)
    cfg = sampler.SamplerConfig(method, args.burn_in, args.seed, args.max_cycle_half_length)
    report = lab.estimate_containment(
        pattern, cfg, args.samples, args.epsilon, guard_override=args.guard_override
    )
    payload = {
        "hits": report.hits, "samples": report.samples, "estimate": report.estimate,
        "ci_low": report.ci_low, "ci_high": report.ci_high,
        "reference_low": report.reference_low, "reference_high": report.reference_high,
        "reference_note": lab.ASYMPTOTIC_NOTE,
        "pattern_fill": report.pattern_fill, "method": report.method,
        "exact_probability": report.exact_probability,
        "ci_covers_exact": report.ci_covers_exact,
        "ci_intersects_reference": report.ci_intersects_reference,
    }
    if args.csv:
        cols = ["hits", "samples", "estimate", "ci_low", "ci_high", "reference_low", "reference_high"]
        print(",".join(cols))
        print(",".join(str(payload[c]) for c in cols))
    else:
        _emit_json(args, payload)
    return 0


def _cmd_verify(args) -> int:
    if args.check == "restriction-identity":
        if args.n is None or args.m is None or args.k is None:
            raise LatinLabError("restriction-identity needs --n, --m, --k")
        report = lab.verify_restriction_identity(args.n, args.m, args.k, guard_override=args.guard_override)
        _emit_json(args, {
            "n": report.n, "m": report.m, "k": report.k,
            "mean_full": report.mean_full, "mean_restricted": report.mean_restricted,
            "lhs": report.lhs, "rhs": report.rhs, "equal": report.equal,
        })
        if not report.equal:
            raise _Failed("restriction identity violated")
    elif args.check == "switch-partition":
        if args.n is None or args.k is None:
            raise LatinLabError("switch-partition needs --k and --n")
        table = lab.switching_ratio_sweep(
            args.k, args.n, args.sparsity, tuples=args.tuples, seed=args.seed,
            guard_override=args.guard_override,
        )
        if args.csv:
            print("tuple_index,edge_col,edge_sym,row,a_size,b,total,ratio_num,ratio_den,note")
            for r in table.rows:
                num = r.ratio.numerator if r.ratio is not None else ""
                den = r.ratio.denominator if r.ratio is not None else ""
                print(f"{r.tuple_index},{r.edge[0]},{r.edge[1]},{r.row},{r.a_size},{r.b},{r.total},{num},{den},{r.note}")
        else:
            _emit_json(args, {
                "k": table.k, "n": table.n, "sparsity": table.sparsity,
                "probes": len(table.rows),
                "ratio_min": table.ratio_min, "ratio_max": table.ratio_max,
                "ratio_mean": table.ratio_mean, "note": table.note,
            })
    elif args.check == "single-entry":
        if args.n is None or args.k is None:
            raise LatinLabError("single-entry needs --k and --n")
        expected = Fraction(1, args.n)
        bad = []
        for row in range(1, args.k + 1):
            for col in range(1, args.n + 1):
                for sym in range(1, args.n + 1):
                    p = PartialLatinRectangle.from_entries(args.k, args.n, [(row, col, sym)])
                    got = census.exact_containment_probability(p, guard_override=args.guard_override)
                    if got != expected:
                        bad.append({"row": row, "col": col, "symbol": sym, "probability": got})
        _emit_json(args, {
            "k": args.k, "n": args.n, "expected": expected,
            "triples_checked": args.k * args.n * args.n, "violations": bad,
        })
        if bad:
            raise _Failed("single-entry probability deviates from 1/n")
    else:
        raise LatinLabError(f"unknown check {args.check!r}")
    return 0


def _build_parser() -> _Parser:
    p = _Parser(prog="latinlab", description="A desk-scale laboratory for random Latin rectangles.")
    p.add_argument("--version", action="version", version=f"latinlab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, *, seed=True, guard=True):
        if seed:
            sp.add_argument("--seed", type=int, default=_default_seed())
        if guard:
            sp.add_argument("--guard-override", action="store_true")
        sp.add_argument("--threads", type=int, default=None)
        sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("census", help="exact rectangle counts, optionally under a pattern")
    sp.add_argument("--k", type=int)
    sp.add_argument("--n", type=int)
    sp.add_argument("--pattern", help=".plr file constraining the census")
    common(sp)
    sp.set_defaults(func=_cmd_census)

    sp = sub.add_parser("sample", help="draw rectangles, emitting .plr blocks")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--method", choices=["exact", "mcmc"], default="exact")
    sp.add_argument("--burn-in", type=int, default=None)
    sp.add_argument("--count", type=int, default=1)
    sp.add_argument("--max-cycle-half-length", type=int, default=None)
    common(sp)
    sp.set_defaults(func=_cmd_sample)

    sp = sub.add_parser("subsquares", help="subsquare census of one rectangle")
    sp.add_argument("--input", required=True, help=".plr file with a complete rectangle")
    sp.add_argument("--order", type=int, required=True)
    sp.add_argument("--max-symbols", type=int, default=None)
    sp.add_argument("--witnesses", action="store_true")
    common(sp, seed=False, guard=False)
    sp.set_defaults(func=_cmd_subsquares)

    sp = sub.add_parser("digraph", help="auxiliary-digraph diagnostics")
    sp.add_argument("--input", required=True, help=".plr file with a complete rectangle")
    sp.add_argument("--row", type=int, required=True)
    sp.add_argument("--exclude-cols", default=None, help="comma-separated columns of the designated row")
    sp.add_argument("--check", choices=["expander", "degrees", "paths"], required=True)
    sp.add_argument("--nu", type=float, default=0.1)
    sp.add_argument("--tau", type=float, default=0.25)
    sp.add_argument("--mode", choices=["exact", "sampled"], default="exact")
    sp.add_argument("--budget", type=int, default=1000)
    sp.add_argument("--u", type=int, default=None)
    sp.add_argument("--v", type=int, default=None)
    sp.add_argument("--length", type=int, default=None)
    common(sp)
    sp.set_defaults(func=_cmd_digraph)

    sp = sub.add_parser("estimate", help="Monte Carlo containment probability of a pattern")
    sp.add_argument("--pattern", required=True)
    sp.add_argument("--samples", type=int, required=True)
    sp.add_argument("--method", default="exact", help="exact, mcmc, or a full sampler method name")
    sp.add_argument("--burn-in", type=int, default=None)
    sp.add_argument("--max-cycle-half-length", type=int, default=None)
    sp.add_argument("--epsilon", type=float, default=0.1)
    sp.add_argument("--csv", action="store_true")
    common(sp)
    sp.set_defaults(func=_cmd_estimate)

    sp = sub.add_parser("verify", help="exact identity checks")
    sp.add_argument("--check", choices=["restriction-identity", "switch-partition", "single-entry"], required=True)
    sp.add_argument("--n", type=int)
    sp.add_argument("--k", type=int)
    sp.add_argument("--m", type=int)
    sp.add_argument("--sparsity", type=int, default=1)
    sp.add_argument("--tuples", type=int, default=3)
    sp.add_argument("--csv", action="store_true")
    common(sp)
    sp.set_defaults(func=_cmd_verify)
    return p


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        _apply_thread_cap(args.threads)
        return args.func(args)
    except SizeGuardExceeded as exc:
        print(f"latinlab: {exc}", file=sys.stderr)
        return 2
    except _Failed as exc:
        print(f"latinlab: {exc}", file=sys.stderr)
        return 3
    except (LatinLabError, OSError, ValueError) as exc:
        print(f"latinlab: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
