"""Command-line front end: ``khinlab <subcommand> [flags]``.

Every run starts with a provenance line (``# ...`` for CSV and plain output,
a ``{"provenance": ...}`` object for JSON).  Rationals are printed as
``num/den``.  Exit codes: 0 success, 1 a falsified lemma report, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import decimal
import json
import math
import multiprocessing
import sys
from dataclasses import replace
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from khinlab import __version__
from khinlab.montecarlo import sample, tail_hit_fraction
from khinlab.numtheory import coprime_box_density, is_prime, to_rational
from khinlab.psi import constant_psi, load_psi_table, normalize, power_psi, restrict_support
from khinlab.sets import (
    SetDescriptor,
    Variant,
    descriptor,
    measure_closed_form,
    measure_oracle,
    member,
    pair_intersection_measure,
)
from khinlab.target import ApproximantPair, Target
from khinlab import verify

EXIT_OK, EXIT_FALSIFIED, EXIT_USAGE = 0, 1, 2

LEMMA_COLUMNS = {
    "basic-size": ["q", "psi", "b", "a1", "a2", "full_closed", "full_oracle", "tilde_closed", "tilde_oracle", "ok"],
    "overlap": ["q", "r", "gcd", "bound", "ratio", "ok"],
    "key": ["q", "r", "gcd", "hypothesis", "intersection", "ok"],
    "divisor-identity": ["q", "lhs", "rhs", "ok"],
    "divisor-bound": ["q", "delta", "L", "M", "U", "tau", "ok"],
    "ratio": ["Q", "mass", "pair_mass", "R", "ok"],
}
# column mirrored by --decimal
PRIMARY_COLUMN = {
    "basic-size": "tilde_closed",
    "overlap": "ratio",
    "key": "intersection",
    "divisor-identity": "lhs",
    "divisor-bound": "U",
    "ratio": "R",
}


class UsageError(ValueError):
    pass


def fmt(value) -> str:
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)


def approx(value, digits: int) -> str:
    value = to_rational(value)
    with decimal.localcontext() as ctx:
        ctx.prec = digits
        return str(decimal.Decimal(value.numerator) / decimal.Decimal(value.denominator))


def parse_pair(text: str) -> tuple[Fraction, Fraction]:
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"expected a pair 'N1/D1,N2/D2', got {text!r}")
    return to_rational(parts[0]), to_rational(parts[1])


def parse_int_pair(text: str) -> tuple[int, int]:
    a, b = text.split(",")
    return int(a), int(b)


_SUPPORTS: dict[str, Callable[[int], bool]] = {
    "primes": lambda q: is_prime(q),
    "even": lambda q: q % 2 == 0,
    "odd": lambda q: q % 2 == 1,
}


def build_psi(args):
    """``N/D`` constant, ``power:C,DELTA[,GRID]`` or ``table:PATH``."""
    spec = args.psi
    if spec.startswith("power:"):
        fields = spec[len("power:"):].split(",")
        if len(fields) not in (2, 3):
            raise UsageError("power psi takes 'power:C,DELTA[,GRID]'")
        grid = int(fields[2]) if len(fields) == 3 else 1 << 32
        f = power_psi(to_rational(fields[0]), to_rational(fields[1]), grid)
    elif spec.startswith("table:"):
        f = load_psi_table(spec[len("table:"):])
    else:
        f = constant_psi(to_rational(spec))
    if args.support != "all":
        f = restrict_support(f, _SUPPORTS[args.support])
    if args.normalize is not None:
        f = normalize(f, to_rational(args.normalize))
    return f


def build_target(args) -> Target:
    return Target(parse_pair(args.y), to_rational(args.delta))


class Output:
    def __init__(self, args, stream=None):
        self.args = args
        self.stream = stream or sys.stdout
        self.json = getattr(args, "format", "csv") == "json"
        self._writer = csv.writer(self.stream, lineterminator="\n")

    def provenance(self, argv: Sequence[str]) -> None:
        info = {
            "artifact": "khinlab",
            "version": __version__,
            "subcommand": self.args.command,
            "flags": {k: v for k, v in sorted(vars(self.args).items()) if k not in ("command", "func")},
            "argv": list(argv),
            "seed": getattr(self.args, "seed", None),
        }
        if not self.args.deterministic:
            info["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
        if self.json:
            self.stream.write(json.dumps({"provenance": info}, sort_keys=True) + "\n")
        else:
            self.stream.write("# " + json.dumps(info, sort_keys=True) + "\n")

    def row(self, values: Iterable) -> None:
        self._writer.writerow([fmt(v) for v in values])

    def line(self, text: str) -> None:
        self.stream.write(text + "\n")

    def value(self, value) -> None:
        if self.json:
            obj = {"value": fmt(value)}
            if self.args.decimal:
                obj["approx"] = approx(value, self.args.decimal)
            self.line(json.dumps(obj))
        elif self.args.decimal and isinstance(value, Fraction):
            self.line(f"{fmt(value)},{approx(value, self.args.decimal)}")
        else:
            self.line(fmt(value))


# Worker state for --jobs; inherited by forked children.
_WORK: dict = {}


def _run_item(item):
    return _WORK["fn"](item)


def parallel_map(fn, items: list, jobs: int) -> list:
    """Ordered map; with ``jobs > 1`` uses a fork pool so closures need no pickling."""
    if jobs <= 1 or len(items) < 2 or "fork" not in multiprocessing.get_all_start_methods():
        return [fn(item) for item in items]
    _WORK["fn"] = fn
    try:
        with multiprocessing.get_context("fork").Pool(jobs) as pool:
            return pool.map(_run_item, items, chunksize=max(1, len(items) // (4 * jobs)))
    finally:
        _WORK.clear()


def _q_range(args) -> list[int]:
    if args.q is not None:
        return [args.q]
    if args.q_max is not None:
        return list(range(1, args.q_max + 1))
    raise UsageError("give --q or --q-max")


def _override_approximant(args, d: SetDescriptor) -> SetDescriptor:
    if args.b is None or d.variant is not Variant.TILDE:
        return d
    a = parse_int_pair(args.a) if args.a else (1, 0)
    return replace(d, approximant=ApproximantPair(a, args.b, d.q))


def _cmd_measure(args, out: Output) -> int:
    d = descriptor(args.q, build_psi(args), build_target(args), args.variant)
    d = _override_approximant(args, d)
    value = measure_oracle(d) if args.oracle else measure_closed_form(d)
    out.value(value)
    return EXIT_OK


def _cmd_intersect(args, out: Output) -> int:
    psi, target = build_psi(args), build_target(args)
    d1 = descriptor(args.q, psi, target, args.variant_q)
    d2 = descriptor(args.r, psi, target, args.variant_r)
    out.value(pair_intersection_measure(d1, d2))
    return EXIT_OK


def _cmd_member(args, out: Output) -> int:
    d = descriptor(args.q, build_psi(args), build_target(args), args.variant)
    d = _override_approximant(args, d)
    out.value(member(parse_pair(args.x), d))
    return EXIT_OK


def _cmd_approximant(args, out: Output) -> int:
    target = build_target(args)
    out.row(["q", "b", "a1", "a2", "err"])
    for q in _q_range(args):
        pair = target.approximant(q)
        out.row([q, pair.b, pair.a[0], pair.a[1], pair.error(target.y)])
    return EXIT_OK


def _density_without_b(q: int, b: int) -> Fraction:
    """Deliberately wrong Euler product that ignores the p∤b condition."""
    return coprime_box_density(q, 1)


FAULTS = {"none": coprime_box_density, "drop-b-condition": _density_without_b}


def _lemma_reports(args) -> tuple[list, Callable]:
    """Reports for one ``verify-lemma`` invocation and a row renderer."""
    lemma = args.id
    if lemma == "divisor-identity":
        reports = parallel_map(verify.divisor_identity, _q_range(args), args.jobs)
        return reports, lambda rep: [rep.parameters["q"], rep.computed_values["lhs"], rep.computed_values["rhs"], rep.conclusion_verified]
    if lemma == "divisor-bound":
        delta = to_rational(args.delta)
        reports = parallel_map(lambda q: verify.restricted_divisor_bound(q, delta), _q_range(args), args.jobs)
        v = lambda rep: rep.computed_values
        return reports, lambda rep: [rep.parameters["q"], delta, v(rep)["L"], v(rep)["M"], v(rep)["U"], v(rep)["tau"].numerator, rep.conclusion_verified]
    psi, target = build_psi(args), build_target(args)
    if lemma == "basic-size":
        density = FAULTS[args.inject_fault]

        def one(q):
            if args.b is not None:
                a = parse_int_pair(args.a) if args.a else (1, 0)
                pair = ApproximantPair(a, args.b, q)
            else:
                pair = target.approximant(q)
            return verify.verify_basic_size(q, psi, pair, target, density=density)

        reports = parallel_map(one, _q_range(args), args.jobs)

        def row(rep):
            c, p = rep.computed_values, rep.parameters
            return [p["q"], p["psi"], p["b"], p["a"][0], p["a"][1], c.get("full_closed", ""), c.get("full_oracle", ""),
                    c.get("tilde_closed", ""), c.get("tilde_oracle", ""), rep.conclusion_verified]

        return reports, row
    if lemma == "overlap":
        if args.q is not None and args.r is not None:
            pairs = [(args.q, args.r)]
        elif args.q_max is not None:
            pairs = [(q, r) for q in range(2, args.q_max + 1) for r in range(1, q)]
        else:
            raise UsageError("overlap needs --q and --r, or --q-max")
        reports = parallel_map(lambda qr: verify.overlap_report(*qr, psi, target, args.constant), pairs, args.jobs)
        return reports, lambda rep: [rep.parameters["q"], rep.parameters["r"], rep.computed_values.get("gcd", math.gcd(rep.parameters["q"], rep.parameters["r"])),
                                     rep.computed_values.get("bound", ""), rep.computed_values.get("ratio", ""), rep.conclusion_verified]
    if lemma == "key":
        delta = target.delta
        if args.q is not None and args.r is not None:
            pairs = [(args.q, args.r)]
        elif args.q_max is not None:
            pairs = list(verify.key_pairs(args.q_max, delta))
        else:
            raise UsageError("key needs --q and --r, or --q-max")
        reports = parallel_map(lambda qr: verify.key_disjointness(*qr, delta, psi, target), pairs, args.jobs)
        return reports, lambda rep: [rep.parameters["q"], rep.parameters["r"], rep.parameters["gcd"], rep.hypothesis_satisfied,
                                     rep.computed_values.get("intersection", ""), rep.conclusion_verified]
    if lemma == "ratio":
        if args.q_max is None:
            raise UsageError("ratio needs --q-max")
        variant = Variant.TILDE if args.variant == "tilde" else Variant.FULL
        reports = [verify.ratio_report(args.q_max, psi, target, variant)]
        return reports, lambda rep: [rep.parameters["Q"], rep.computed_values["mass"], rep.computed_values["pair_mass"], rep.computed_values["R"], rep.conclusion_verified]
    raise UsageError(f"unknown lemma id {lemma!r}")


def _cmd_verify(args, out: Output) -> int:
    reports, row = _lemma_reports(args)
    sink = open(args.reports, "w") if args.reports else None
    try:
        columns = LEMMA_COLUMNS[args.id]
        primary = columns.index(PRIMARY_COLUMN[args.id])
        if not out.json:
            out.row(columns + (["approx"] if args.decimal else []))
        for rep in reports:
            if sink:
                sink.write(rep.to_json() + "\n")
            if out.json:
                out.line(rep.to_json())
                continue
            values = row(rep)
            if args.decimal:
                v = values[primary]
                values.append(approx(v, args.decimal) if isinstance(v, Fraction) else "")
            out.row(values)
    finally:
        if sink:
            sink.close()
    falsified = [rep for rep in reports if rep.falsified]
    if falsified:
        print(f"khinlab: {len(falsified)} falsified report(s) for lemma {args.id}", file=sys.stderr)
        return EXIT_FALSIFIED
    return EXIT_OK


def _cmd_ratio(args, out: Output) -> int:
    psi, target = build_psi(args), build_target(args)
    if args.checkpoints:
        marks = [int(v) for v in args.checkpoints.split(",")]
    elif args.q_max is not None:
        marks = [args.q_max]
    else:
        raise UsageError("ratio needs --q-max or --checkpoints")
    points = verify.ratio_profile(marks, psi, target, args.variant)
    if out.json:
        for p in points:
            out.line(json.dumps({"Q": p.Q, "mass": fmt(p.mass), "pair_mass": fmt(p.pair_mass), "R": fmt(p.ratio)}))
    else:
        out.row(["Q", "mass", "pair_mass", "R"] + (["approx"] if args.decimal else []))
        for p in points:
            extra = [approx(p.ratio, args.decimal)] if args.decimal else []
            out.row([p.Q, p.mass, p.pair_mass, p.ratio] + extra)
    bad = [p for p in points if p.ratio > 1]
    return EXIT_FALSIFIED if bad else EXIT_OK


def _cmd_estimate(args, out: Output) -> int:
    if not 1 <= args.q0 <= args.q1:
        raise UsageError("need 1 <= --q0 <= --q1")
    psi, target = build_psi(args), build_target(args)
    variant = Variant.TILDE if args.tilde else Variant.FULL
    run = sample(args.n, args.seed)
    fraction = tail_hit_fraction(run, args.q0, args.q1, psi, target, variant)
    windows = []
    for k in range(args.q0.bit_length() - 1, args.q1.bit_length()):
        lo, hi = max(1 << k, args.q0), min((1 << (k + 1)) - 1, args.q1)
        windows.append({"k": k, "lo": lo, "hi": hi, "fraction": fmt(tail_hit_fraction(run, lo, hi, psi, target, variant))})
    result = {"fraction": fmt(fraction), "per_window": windows, "n": args.n, "seed": args.seed, "variant": variant.value}
    if args.decimal:
        result["approx"] = approx(fraction, args.decimal)
    out.line(json.dumps(result, sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--deterministic", action="store_true", help="omit the timestamp from the provenance line")
    common.add_argument("--decimal", type=int, default=0, metavar="K", help="add a K-digit decimal column")
    common.add_argument("--jobs", type=int, default=1)

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--psi", default="1/4", help="N/D constant, power:C,DELTA[,GRID] or table:PATH")
    model.add_argument("--normalize", default=None, metavar="C", help="replace psi by min(C*psi, 1/2)")
    model.add_argument("--support", choices=["all", *_SUPPORTS], default="all")
    model.add_argument("--y", default="0,0", help="shift as N1/D1,N2/D2")
    model.add_argument("--delta", default="1", help="decay exponent P/S")

    parser = argparse.ArgumentParser(prog="khinlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"khinlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measure", parents=[common, model], help="exact measure of one set")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--variant", choices=["full", "tilde"], default="full")
    p.add_argument("--oracle", action="store_true", help="enumerate boxes instead of the closed form")
    p.add_argument("--a", help="explicit approximant numerators A1,A2")
    p.add_argument("--b", type=int, help="explicit approximant denominator (overrides the target's)")
    p.set_defaults(func=_cmd_measure)

    p = sub.add_parser("intersect", parents=[common, model], help="exact measure of a pairwise intersection")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--variant-q", choices=["full", "tilde"], default="full")
    p.add_argument("--variant-r", choices=["full", "tilde"], default="full")
    p.set_defaults(func=_cmd_intersect)

    p = sub.add_parser("member", parents=[common, model], help="exact membership of a point")
    p.add_argument("--x", required=True, help="point as N1/D1,N2/D2")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--variant", choices=["full", "tilde"], default="full")
    p.add_argument("--a", help="explicit approximant numerators A1,A2")
    p.add_argument("--b", type=int, help="explicit approximant denominator (overrides the target's)")
    p.set_defaults(func=_cmd_member)

    p = sub.add_parser("approximant", parents=[common, model], help="canonical approximant (a_q, b_q)")
    p.add_argument("--q", type=int)
    p.add_argument("--q-max", type=int)
    p.set_defaults(func=_cmd_approximant)

    p = sub.add_parser("verify-lemma", parents=[common, model], help="run one audit over a parameter range")
    p.add_argument("--id", required=True, choices=list(LEMMA_COLUMNS))
    p.add_argument("--q", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--q-max", type=int)
    p.add_argument("--a", help="explicit approximant numerators A1,A2 (basic-size)")
    p.add_argument("--b", type=int, help="explicit approximant denominator (basic-size)")
    p.add_argument("--variant", choices=["full", "tilde"], default="tilde")
    p.add_argument("--constant", default=None, help="overlap: check ratio <= CONSTANT")
    p.add_argument("--inject-fault", choices=list(FAULTS), default="none",
                   help="corrupt the closed form to demonstrate that the audit can fail")
    p.add_argument("--reports", metavar="PATH", help="also write one JSON report per line to PATH")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("ratio", parents=[common, model], help="Chung-Erdős ratio R(Q)")
    p.add_argument("--q-max", type=int)
    p.add_argument("--checkpoints", help="comma-separated Q values")
    p.add_argument("--variant", choices=["full", "tilde"], default="tilde")
    p.set_defaults(func=_cmd_ratio)

    p = sub.add_parser("estimate-limsup", parents=[common, model], help="Monte Carlo tail coverage")
    p.add_argument("--q0", type=int, required=True)
    p.add_argument("--q1", type=int, required=True)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tilde", action="store_true")
    p.set_defaults(func=_cmd_estimate)
    return parser


def main(argv: Sequence[str] | None = None, stream=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.command == "estimate-limsup":
        args.format = "json"
    out = Output(args, stream)
    try:
        out.provenance(argv)
        return args.func(args, out)
    except (UsageError, ValueError, TypeError, ZeroDivisionError) as exc:
        print(f"khinlab {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
