"""Command-line front end: enumerations, verification suites, resampling
experiments and machine-readable reports.

Exit codes: 0 success, 1 verification failure, 2 invalid arguments,
3 infeasible exact size (guardrail).  Output is canonical: JSON keys are
sorted, big integers are decimal strings, and identical invocations are
bit-identical.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from . import counting, resampler, snake, two_part, verify
from .counting import Constraint, GuardrailError
from .lattice import CodecError, Polygon, Walk, parse_walk, serialize_walk
from .patterns import scan_patterns, slot_partition
from .resampler import WindowUndefinedError

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_GUARDRAIL = 3


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def _csv(rows, header) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _fraction(text: str) -> Fraction:
    return Fraction(text)


def _walk_arg(args, attr="walk") -> Walk:
    value = getattr(args, attr, None)
    if value is None:
        raise SystemExit("missing walk record (use --walk)")
    return parse_walk(value)


def _polygon_arg(args) -> Polygon:
    if args.polygon is None:
        raise SystemExit("missing polygon record (use --polygon with a closed trace)")
    return Polygon.from_closed_trace(parse_walk(args.polygon))


def _prob_pair(p) -> dict:
    return {"num": str(p.numerator), "den": str(p.denominator)}


def _cmd_count(args) -> int:
    n = counting.enumerate_saw(
        args.n, args.d, Constraint(args.constraint), threads=args.threads
    )
    if args.format == "csv":
        _emit(_csv([[args.n, args.d, str(n)]], ["n", "d", "count"]), args.out)
    else:
        _emit(_json({"n": args.n, "d": args.d, "constraint": args.constraint,
                     "count": str(n)}), args.out)
    return EXIT_OK


def _cmd_closing(args) -> int:
    rep = counting.closing_probabilities(args.n, args.d, threads=args.threads)
    if args.format == "csv":
        rows = [[rep.n, rep.d, str(rep.c_n), str(rep.p_n1),
                 str(rep.closing_direct.numerator), str(rep.closing_direct.denominator)]]
        _emit(_csv(rows, ["n", "d", "c_n", "p_n1", "closing_num", "closing_den"]), args.out)
    else:
        _emit(_json(rep.to_json_dict()), args.out)
    return EXIT_OK


def _cmd_decompose(args) -> int:
    w = _walk_arg(args)
    dec = two_part.decompose(w)
    _emit(
        _json(
            {
                "walk": serialize_walk(w),
                "first": serialize_walk(dec.first),
                "second": serialize_walk(dec.second),
                "meeting": list(dec.meeting),
                "first_is_incoming": dec.first_is_incoming,
            }
        ),
        args.out,
    )
    return EXIT_OK


def _cmd_patterns(args) -> int:
    if args.polygon is not None:
        p = _polygon_arg(args)
        sm = slot_partition(p, args.phi if args.phi is not None else 0)
        payload = sm.to_json_dict()
        payload["good_shell"] = sm.good_shell
    else:
        sm = scan_patterns(_walk_arg(args))
        payload = sm.to_json_dict()
    _emit(_json(payload), args.out)
    return EXIT_OK


def _cmd_resample(args) -> int:
    p = _polygon_arg(args)
    if args.samples:
        rep = resampler.equilibrium_and_pmf_test(p, args.samples, args.seed)
        _emit(_json(rep.to_json_dict()), args.out)
        return EXIT_OK
    rec = resampler.resample_local_shell(p, args.seed, ell=args.ell)
    _emit(
        _json(
            {
                "seed": rec.seed,
                "in": serialize_walk(rec.gamma_in.canonical_path),
                "out": serialize_walk(rec.gamma_out.canonical_path),
                "n_one_s1_before": rec.n_one_s1_before,
                "n_one_s1_after": rec.n_one_s1_after,
                "ell": rec.ell,
                "middle_index": rec.middle_index,
            }
        ),
        args.out,
    )
    return EXIT_OK


def _cmd_snake(args) -> int:
    if args.mode == "constants":
        sp = snake.method_constants(args.d, args.alpha, args.beta, args.eta)
        _emit(_json(sp.to_json_dict()), args.out)
        return EXIT_OK
    if args.mode == "profile":
        gamma = _walk_arg(args)
        params = snake.method_constants(
            args.d, args.alpha, args.beta, args.eta, n=args.n, ell=args.ell
        )
        prof = snake.charming_profile(gamma, params)
        rows = [
            [e.k,
             str(e.q.numerator) if e.q is not None else "",
             str(e.q.denominator) if e.q is not None else "",
             int(e.charming)]
            for e in prof.entries
        ]
        if args.format == "csv":
            _emit(_csv(rows, ["k", "q_num", "q_den", "charming"]), args.out)
        else:
            _emit(
                _json(
                    {
                        "walk": serialize_walk(gamma),
                        "entries": [
                            {"k": e.k, "q": (_prob_pair(e.q) if e.q else None),
                             "charming": e.charming}
                            for e in prof.entries
                        ],
                        "charming_count": prof.charming_count,
                        "admissible": prof.admissible,
                        "cs_member": prof.cs_member,
                    }
                ),
                args.out,
            )
        return EXIT_OK
    if args.mode == "q":
        gamma = _walk_arg(args)
        q, charming = snake.conditional_closing_prob(
            gamma, args.k, args.n, args.ell, args.alpha
        )
        _emit(_json({"k": args.k, "q": _prob_pair(q), "charming": charming}), args.out)
        return EXIT_OK
    if args.mode == "select-ell":
        rep = snake.bad_index_set_and_select_ell(args.n, args.alpha_prime, args.delta_prime)
        _emit(
            _json(
                {
                    "n": rep.n,
                    "closing": _prob_pair(rep.closing_probability),
                    "premise_holds": rep.premise_holds,
                    "q_set": list(rep.q_set),
                    "cardinality_bound": rep.cardinality_bound,
                    "bound_holds": rep.bound_holds,
                    "ell": rep.ell,
                }
            ),
            args.out,
        )
        return EXIT_OK
    if args.mode == "bootstrap":
        phi = _walk_arg(args)
        js = [int(tok) for tok in args.indices.split(",")] if args.indices else [0]
        table = snake.bootstrap_table(phi, args.n, js)
        _emit(
            _json(
                {
                    "phi": serialize_walk(phi),
                    "w_size": str(table.w_size),
                    "rows": [
                        {
                            "j": r.j,
                            "p_avoid": _prob_pair(r.p_avoid),
                            "close_given_avoid": (
                                _prob_pair(r.close_given_avoid)
                                if r.close_given_avoid is not None
                                else None
                            ),
                        }
                        for r in table.rows
                    ],
                    "closing_mass": {
                        "num": str(table.closing_mass.numerator),
                        "den": str(table.closing_mass.denominator),
                    },
                    "monotone": table.monotone(),
                }
            ),
            args.out,
        )
        return EXIT_OK
    raise SystemExit(f"unknown snake mode {args.mode!r}")


def _cmd_verify(args) -> int:
    results = verify.run_suite(args.suite, nmax=args.nmax, threads=args.threads)
    bad = 0
    for r in results:
        mark = "ok" if r.ok else "FAIL"
        line = f"[{mark}] {r.suite}: {r.name}"
        if r.detail:
            line += f" ({r.detail})"
        print(line)
        bad += 0 if r.ok else 1
    print(f"{len(results) - bad}/{len(results)} checks passed")
    return EXIT_OK if bad == 0 else EXIT_VERIFY


def _cmd_report(args) -> int:
    if args.kind == "growth":
        rep = counting.growth_report(args.n, args.d, threads=args.threads)
        if args.format == "csv":
            rows = [[r.n, str(r.c_n), f"{r.root:.12g}"] for r in rep.rows]
            _emit(_csv(rows, ["n", "c_n", "root"]), args.out)
        else:
            _emit(
                _json(
                    {
                        "d": rep.d,
                        "rows": [
                            {"n": r.n, "c_n": str(r.c_n), "root": r.root} for r in rep.rows
                        ],
                        "submultiplicative_ok": rep.submultiplicative_ok,
                        "root_infimum": rep.root_infimum,
                        "hw_coefficient": rep.hw_coefficient,
                    }
                ),
                args.out,
            )
        return EXIT_OK
    if args.kind == "first-parts":
        table = counting.first_part_table(args.ell, args.n, args.alpha, args.d)
        rows = [
            [
                table.ell,
                table.n,
                serialize_walk(r.walk),
                r.completions,
                r.closing,
                str(r.q.numerator),
                str(r.q.denominator),
                int(r.in_hphi),
            ]
            for r in table.rows
        ]
        _emit(
            _csv(rows, ["ell", "n", "walk", "completions", "closing",
                        "q_num", "q_den", "in_hphi"]),
            args.out,
        )
        return EXIT_OK
    if args.kind == "histogram":
        bins = two_part.closing_first_length_histogram(args.n, args.d)
        _emit(_csv(list(enumerate(bins)), ["j", "count"]), args.out)
        return EXIT_OK
    if args.kind == "midpoint":
        rep = resampler.midpoint_histogram(args.n, args.d)
        _emit(_csv(rep.to_csv_rows(), ["x", "y", "num", "den"][: args.d + 2]), args.out)
        return EXIT_OK
    raise SystemExit(f"unknown report kind {args.kind!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="saw-lab",
        description="Exact enumeration laboratory for self-avoiding walks and polygons.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p, *, n=False, ell=False, alpha=False):
        p.add_argument("--d", type=int, default=2)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--out")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        if n:
            p.add_argument("--n", type=int, required=True)
        if ell:
            p.add_argument("--ell", type=int)
        if alpha:
            p.add_argument("--alpha", type=_fraction, default=Fraction(1, 2))

    p = sub.add_parser("count", help="count self-avoiding walks")
    common(p, n=True)
    p.add_argument("--constraint", choices=[c.value for c in Constraint],
                   default=Constraint.ORIGIN.value)
    p.set_defaults(fn=_cmd_count)

    p = sub.add_parser("closing", help="closing probability two ways")
    common(p, n=True)
    p.set_defaults(fn=_cmd_closing)

    p = sub.add_parser("decompose", help="two-part decomposition of a walk")
    common(p)
    p.add_argument("--walk", required=True)
    p.set_defaults(fn=_cmd_decompose)

    p = sub.add_parser("patterns", help="pattern occurrences and slots")
    common(p)
    p.add_argument("--walk")
    p.add_argument("--polygon", help="closed trace record of a polygon")
    p.add_argument("--phi", type=_fraction, default=None,
                   help="good-shell density threshold")
    p.set_defaults(fn=_cmd_patterns)

    p = sub.add_parser("resample", help="uniform local-shell resampling")
    common(p, ell=True)
    p.add_argument("--polygon", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=0,
                   help="run the equilibrium chi-square test with this many draws")
    p.set_defaults(fn=_cmd_resample)

    p = sub.add_parser("snake", help="charming profiles, constants, index selection")
    common(p, ell=True, alpha=True)
    p.add_argument("--mode", choices=("constants", "profile", "q", "select-ell", "bootstrap"),
                   default="constants")
    p.add_argument("--walk")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--beta", type=_fraction, default=Fraction(1, 2))
    p.add_argument("--eta", type=_fraction, default=Fraction(0))
    p.add_argument("--alpha-prime", dest="alpha_prime", type=_fraction,
                   default=Fraction(1, 2))
    p.add_argument("--delta-prime", dest="delta_prime", type=_fraction,
                   default=Fraction(1, 4))
    p.add_argument("--indices", help="comma-separated bootstrap indices")
    p.set_defaults(fn=_cmd_snake)

    p = sub.add_parser("verify", help="run invariant suites")
    p.add_argument("--suite", default="all")
    p.add_argument("--nmax", type=int, default=8)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("report", help="machine-readable artifacts")
    common(p, n=True, ell=True, alpha=True)
    p.add_argument("--kind", choices=("growth", "first-parts", "histogram", "midpoint"),
                   required=True)
    p.set_defaults(fn=_cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except GuardrailError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_GUARDRAIL
    except (CodecError, WindowUndefinedError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
