"""Command line entry point: ``linniksieve <subcommand> [options]``.

Every run writes a header block (tool version and the fully resolved config)
ahead of its data rows and a trailer with the summary and wall time. Data
rows never contain timestamps, so identical configs give identical rows.

Exit status: 0 on success, 2 on invalid input, 3 when a built-in check fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from contextlib import contextmanager

import numpy as np

from . import __version__
from .betasieve import (
    SiftableSequence,
    StepSizeError,
    build_weights,
    sandwich_violations,
    sifted_sum,
    solve_sieve_functions,
)
from .cache import cache_dir, cached_class_group
from .classgroup import element_order, build_coefficients, orthogonality_check, verify_hecke
from .lfunc import (
    TruncationBudgetError,
    audit_hypothesis,
    cached_zeros,
    class_spec,
    dirichlet_spec,
    explicit_formula_check,
    zero_rows,
    zeta_spec,
)
from .linnik import (
    build_sequence,
    certify,
    congruence_sums,
    decompose,
    exponent_survey,
    least_prime_search,
    pairing_mismatches,
    parameter_schedule,
    s3_partition,
)
from .multiplicative import delta_sum, euler_product
from .window import SmoothWindow

EXIT_OK, EXIT_INVALID, EXIT_CHECK = 0, 2, 3


class CheckFailed(Exception):
    """A run finished but its built-in check did not hold."""


# ---------------------------------------------------------------- output


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


class Emitter:
    """Streams rows as CSV, JSON lines or a single JSON document.

    CSV and JSON-lines rows are flushed one at a time so an interrupted run
    leaves every finished row on disk.
    """

    def __init__(self, fmt: str, stream, config: dict, columns: list[str]):
        self.fmt, self.stream, self.columns = fmt, stream, columns
        self.rows: list[dict] = []
        self.header = {"tool": "linniksieve", "version": __version__, "config": config}
        if fmt == "csv":
            stream.write(f"# linniksieve {__version__}\n")
            stream.write("# config: " + json.dumps(config, sort_keys=True) + "\n")
            self._csv = csv.writer(stream, lineterminator="\n")
            self._csv.writerow(columns)
        elif fmt == "jsonl":
            stream.write(json.dumps({"header": self.header}, sort_keys=True) + "\n")
        stream.flush()

    def row(self, values: dict):
        values = {k: values.get(k) for k in self.columns}
        if self.fmt == "csv":
            self._csv.writerow([_cell(values[k]) for k in self.columns])
        elif self.fmt == "jsonl":
            self.stream.write(json.dumps(values, sort_keys=True) + "\n")
        else:
            self.rows.append(values)
        self.stream.flush()

    def close(self, summary: dict | None, wall: float):
        if self.fmt == "csv":
            if summary is not None:
                self.stream.write("# summary: " + json.dumps(summary, sort_keys=True) + "\n")
            self.stream.write(f"# wall_time_s: {wall:.3f}\n")
        elif self.fmt == "jsonl":
            self.stream.write(json.dumps({"summary": summary, "wall_time_s": round(wall, 3)}, sort_keys=True) + "\n")
        else:
            doc = {"header": {**self.header, "wall_time_s": round(wall, 3)}, "rows": self.rows}
            if summary is not None:
                doc["summary"] = summary
            self.stream.write(json.dumps(doc, sort_keys=True, indent=1) + "\n")
        self.stream.flush()


@contextmanager
def _sink(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


# ---------------------------------------------------------------- subcommands
#
# Each runner gets (args, emit) where emit(columns) opens the Emitter, and
# returns the summary dict. Raising CheckFailed after rows are written keeps
# the rows and turns the exit status into 3.


def _group(args):
    return cached_class_group(args.disc, args.cache)


def run_classgroup(args, emit):
    G = _group(args)
    out = emit(["index", "a", "b", "c", "order", "coordinates"])
    for i, f in enumerate(G.elements):
        order = element_order(G.table, i)
        out.row({"index": i, "a": f.a, "b": f.b, "c": f.c, "order": order, "coordinates": " ".join(map(str, G.coordinates[i]))})
    return {"D": G.D, "h": G.h, "structure": list(G.structure), "generators": list(G.generators)}


def _least_prime_rows(G, pmax):
    table = least_prime_search(G, pmax)
    for row in table.rows:
        yield row, certify(G, row)


def run_least_prime(args, emit):
    G = _group(args)
    out = emit(["D", "class", "p", "exponent", "form", "witness", "certified"])
    ok = True
    for row, cert in _least_prime_rows(G, args.pmax):
        ok &= cert
        out.row(
            {
                "D": row.D,
                "class": f"C{row.class_index}",
                "p": row.p,
                "exponent": None if row.exponent is None else f"{row.exponent:.4f}",
                "form": " ".join(map(str, row.form)),
                "witness": None if row.witness is None else " ".join(map(str, row.witness)),
                "certified": cert,
            }
        )
    if not ok:
        raise CheckFailed(f"D={G.D}: some class has no certified split prime below {args.pmax}")
    return {"h": G.h}


def run_survey(args, emit):
    if args.dmin > args.dmax:
        raise ValueError("dmin must not exceed dmax")
    out = emit(["D", "h", "max_p", "exponent", "certified"])

    def on_row(row):
        out.row(
            {
                "D": row.D,
                "h": row.h,
                "max_p": row.max_p,
                "exponent": None if row.exponent is None else f"{row.exponent:.6f}",
                "certified": row.certified,
            }
        )

    _, summary = exponent_survey(args.dmin, args.dmax, args.pcap, on_row=on_row, threads=args.threads)
    if summary["max_exponent"] is not None:
        summary["max_exponent"] = round(summary["max_exponent"], 6)
    if summary["certified"] != summary["count"]:
        raise CheckFailed(f"{summary['count'] - summary['certified']} discriminants unresolved below pcap={args.pcap}")
    return summary


def _sequence(args, G):
    window = SmoothWindow(1.0 - args.nu, 1.0)
    cls = None if args.class_index < 0 else args.class_index
    return build_sequence(G, cls, args.x, args.nu, window)


def run_congruence(args, emit):
    G = _group(args)
    A = _sequence(args, G)
    rep = congruence_sums(A, args.dmax)
    out = emit(["d", "A_d", "main", "r_d"])
    for row in rep.rows:
        out.row({"d": row.d, "A_d": row.A_d, "main": row.main, "r_d": row.r_d})
    return {"X": rep.X, "h": G.h}


def run_buchstab(args, emit):
    G = _group(args)
    A = _sequence(args, G)
    rep = decompose(A, args.x, args.r)
    out = emit(["x", "r", "z", "S1", "S2", "S3", "sifted", "relative_residual"])
    out.row({"x": rep.x, "r": rep.r, "z": rep.z, "S1": rep.S1, "S2": rep.S2, "S3": rep.S3, "sifted": rep.sifted, "relative_residual": rep.residual})
    return None


def run_s3(args, emit):
    G = _group(args)
    A = _sequence(args, G)
    rep = s3_partition(A, args.x, args.r, args.J)
    cols = ["r", "J", "S3", "V", "V_prime", "V_double_prime", "W_minus", "W_plus", "lower_gap", "upper_gap", "partition_residual"]
    out = emit(cols)
    lo, hi = rep.gaps
    out.row(
        {
            "r": rep.r,
            "J": rep.J,
            "S3": rep.S3,
            "V": rep.V,
            "V_prime": rep.V_prime,
            "V_double_prime": rep.V_double_prime,
            "W_minus": rep.W_minus,
            "W_plus": rep.W_plus,
            "lower_gap": lo,
            "upper_gap": hi,
            "partition_residual": rep.partition_residual,
        }
    )
    return None


def run_sieve_selftest(args, emit):
    up = build_weights(args.kappa, args.y, args.z, "upper")
    lo = build_weights(args.kappa, args.y, args.z, "lower")
    viol = sandwich_violations(up, lo, args.n)
    n = np.arange(args.n + 1, dtype=np.float64)
    terms = np.zeros(args.n + 1)
    terms[1:] = 1.0 / n[1:]
    A = SiftableSequence(terms, "harmonic")
    s_plus = sifted_sum(A, up, check=True)
    s_minus = sifted_sum(A, lo, check=True)
    exact = A.sifted(args.z)
    out = emit(["upper_violations", "lower_violations", "upper_terms", "lower_terms", "S_minus", "S_exact", "S_plus"])
    out.row(
        {
            "upper_violations": viol["upper"],
            "lower_violations": viol["lower"],
            "upper_terms": len(up),
            "lower_terms": len(lo),
            "S_minus": s_minus,
            "S_exact": exact,
            "S_plus": s_plus,
        }
    )
    if viol["upper"] or viol["lower"] or not s_minus <= exact <= s_plus:
        raise CheckFailed("sandwich property failed")
    return {"sequence": "a_n = 1/n"}


def run_sieve_functions(args, emit):
    sf = solve_sieve_functions(args.kappa, s_max=args.smax, step=args.step)
    out = emit(["s", "F", "f"])
    if args.every <= 0:
        raise ValueError("--every must be positive")
    # rows at the multiples of --every inside the grid, values interpolated
    first = math.ceil(float(sf.s[0]) / args.every - 1e-9)
    last = math.floor(float(sf.s[-1]) / args.every + 1e-9)
    for i in range(first, last + 1):
        s = min(max(round(i * args.every, 10), float(sf.s[0])), float(sf.s[-1]))
        out.row({"s": s, "F": float(sf.upper(s)), "f": float(sf.lower(s))})
    return {"beta": sf.beta, "A": sf.A, "step": sf.step, "error_estimate": sf.error_estimate}


def run_euler_product(args, emit):
    st = euler_product(args.disc, args.x)
    out = emit(["D", "x", "E", "L1", "eta"])
    out.row(st.as_dict())
    return None


def run_delta(args, emit):
    val = delta_sum(args.disc, args.z, args.w)
    out = emit(["D", "z", "w", "delta"])
    out.row({"D": args.disc, "z": args.z, "w": args.w, "delta": val})
    return None


def _zero_spec(args):
    if args.disc == 1:
        return zeta_spec()
    if args.chi is None:
        return dirichlet_spec(args.disc)
    return class_spec(args.disc, args.chi)


def run_zeros(args, emit):
    spec = _zero_spec(args)
    zl = cached_zeros(spec, args.height, args.step, args.cache)
    out = emit(["disc", "chi", "ordinate", "refined_to"])
    for row in zero_rows(spec, zl):
        out.row(row)
    summary = {"spec": spec.name, "count": zl.count, "main_term": round(zl.main_term, 6), "audit_ok": zl.audit_ok}
    if not zl.audit_ok:
        raise CheckFailed(f"{spec.name}: {zl.count} zeros against a counting main term of {zl.main_term:.3f}")
    return summary


def run_explicit_check(args, emit):
    window = SmoothWindow(args.a1, args.a2)
    rep = explicit_formula_check(args.disc, args.chi, args.x, window, args.height)
    cols = ["lhs", "rhs", "residual", "tail_estimate", "lhs_primes", "lhs_prime_powers", "main", "zero_sum", "archimedean", "zeros_used"]
    out = emit(cols)
    out.row(rep.as_dict())
    if not rep.residual <= rep.tail_estimate:
        raise CheckFailed(f"residual {rep.residual:.3e} exceeds tail estimate {rep.tail_estimate:.3e}")
    return None


def run_audit_h(args, emit):
    audit = audit_hypothesis(args.disc, args.c, args.height, include_class=not args.no_class)
    out = emit(["name", "conductor", "threshold", "beta_max", "margin", "count_ok", "passed"])
    for e in audit.entries:
        out.row({k: getattr(e, k) for k in out.columns})
    if not audit.passed:
        raise CheckFailed("hypothesis audit failed")
    return {"passed": audit.passed}


def run_selftest(args, emit):
    out = emit(["check", "config", "failures"])
    failed = 0

    def record(name, config, failures):
        nonlocal failed
        failed += failures
        out.row({"check": name, "config": config, "failures": failures})

    for D in args.discs:
        G = cached_class_group(D, args.cache)
        T = build_coefficients(G, args.n)
        orth = orthogonality_check(T)
        record("orthogonality", f"D={D} N={args.n}", orth["forward"] + orth["inverse"])
        lam0 = T.lamC.sum(axis=0)
        record("trivial-character", f"D={D} N={args.n}", int(np.count_nonzero(lam0 != T.lam0)))
        record("hecke", f"D={D} bound={args.hecke}", len(verify_hecke(T, args.hecke)))
        record("pairing", f"D={D} nmax={args.pairing}", pairing_mismatches(T, args.pairing))
    for y, z in ((1e4, 20), (1e4, 100), (3e4, 50)):
        v = sandwich_violations(build_weights(2, y, z, "upper"), build_weights(2, y, z, "lower"), args.sandwich_n)
        record("sandwich", f"kappa=2 y={y:g} z={z:g} N={args.sandwich_n}", v["upper"] + v["lower"])
    G = cached_class_group(23, args.cache)
    A = build_sequence(G, 0, 1e5, 0.5)
    try:
        decompose(A, 1e5, 6)
        record("buchstab", "D=23 x=1e5 r=6", 0)
    except AssertionError:
        record("buchstab", "D=23 x=1e5 r=6", 1)
    if failed:
        raise CheckFailed(f"{failed} identity failures")
    return {"failures": failed}


# ---------------------------------------------------------------- parser


def _positive_int(text):
    v = int(float(text))
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _number(text):
    return float(text)


def _common(p, default_fmt="csv", cache=False):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--csv", dest="fmt", action="store_const", const="csv", help="CSV output")
    g.add_argument("--json", dest="fmt", action="store_const", const="json", help="one JSON document")
    g.add_argument("--jsonl", dest="fmt", action="store_const", const="jsonl", help="JSON lines")
    p.set_defaults(fmt=default_fmt)
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--cache", default=None, help="cache directory (overrides $LINNIKSIEVE_CACHE)")
    p.add_argument("--threads", type=_positive_int, default=1, help="worker threads where a subcommand can use them")


def _sequence_args(p, x=1e5, r=6.0):
    p.add_argument("--disc", type=int, required=True)
    p.add_argument("--x", type=_number, default=x)
    p.add_argument("--nu", type=_number, default=0.5)
    p.add_argument("--class", dest="class_index", type=int, default=0, help="class index; -1 for the principal sequence")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="linniksieve", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"linniksieve {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classgroup", help="reduced forms, structure and element orders")
    p.add_argument("--disc", type=int, required=True)
    _common(p)
    p.set_defaults(run=run_classgroup)

    p = sub.add_parser("least-prime", help="least split prime in each ideal class")
    p.add_argument("--disc", type=int, required=True)
    p.add_argument("--pmax", type=_positive_int, default=10**7)
    _common(p)
    p.set_defaults(run=run_least_prime)

    p = sub.add_parser("survey", help="max over classes of the least split prime, for a range of D")
    p.add_argument("--dmin", type=int, default=7)
    p.add_argument("--dmax", type=int, required=True)
    p.add_argument("--pcap", type=_positive_int, default=10**7)
    _common(p)
    p.set_defaults(run=run_survey)

    p = sub.add_parser("congruence", help="congruence sums A_d = main + r_d")
    _sequence_args(p)
    p.add_argument("--dmax", type=_positive_int, default=50)
    _common(p)
    p.set_defaults(run=run_congruence)

    p = sub.add_parser("buchstab", help="S(A, sqrt x) = S1 + S2 + S3")
    _sequence_args(p)
    p.add_argument("--r", type=_number, default=6.0)
    _common(p)
    p.set_defaults(run=run_buchstab)

    p = sub.add_parser("s3", help="S3 = V + V' + V'' and the brackets W- <= V <= W+")
    _sequence_args(p)
    p.add_argument("--r", type=_number, default=6.0)
    p.add_argument("--J", type=_positive_int, default=4)
    _common(p)
    p.set_defaults(run=run_s3)

    p = sub.add_parser("sieve-selftest", help="sandwich check and sifted-sum bracket for a_n = 1/n")
    p.add_argument("--kappa", type=int, default=2, choices=[1, 2])
    p.add_argument("--y", type=_number, default=1e4)
    p.add_argument("--z", type=_number, default=20.0)
    p.add_argument("--n", type=_positive_int, default=10**5)
    _common(p)
    p.set_defaults(run=run_sieve_selftest)

    p = sub.add_parser("sieve-functions", help="tabulate F(s), f(s)")
    p.add_argument("--kappa", type=int, default=2, choices=[1, 2])
    p.add_argument("--smax", type=_number, default=30.0)
    p.add_argument("--step", type=_number, default=1e-3)
    p.add_argument("--every", type=_number, default=0.1, help="spacing of emitted rows")
    _common(p)
    p.set_defaults(run=run_sieve_functions)

    p = sub.add_parser("euler-product", help="E(x) and eta(x) = log(L(1, chi_D) / E(x))")
    p.add_argument("--disc", type=int, required=True)
    p.add_argument("--x", type=_number, required=True)
    _common(p, "json")
    p.set_defaults(run=run_euler_product)

    p = sub.add_parser("delta", help="sum over z <= p < w of (1 + chi_D(p)) / p")
    p.add_argument("--disc", type=int, required=True)
    p.add_argument("--z", type=_number, required=True)
    p.add_argument("--w", type=_number, required=True)
    _common(p)
    p.set_defaults(run=run_delta)

    p = sub.add_parser("zeros", help="critical-line zeros up to a height, cached")
    p.add_argument("--disc", type=int, required=True, help="1 for zeta")
    p.add_argument("--chi", type=int, default=None, help="class-group character; omit for L(s, chi_D)")
    p.add_argument("--height", type=_number, required=True)
    p.add_argument("--step", type=_number, default=0.05)
    _common(p, "jsonl")
    p.set_defaults(run=run_zeros)

    p = sub.add_parser("explicit-check", help="both sides of the explicit formula")
    p.add_argument("--disc", type=int, required=True)
    p.add_argument("--chi", type=int, default=0)
    p.add_argument("--x", type=_number, default=1e5)
    p.add_argument("--a1", type=_number, default=0.6)
    p.add_argument("--a2", type=_number, default=0.9)
    p.add_argument("--height", type=_number, default=40.0)
    _common(p, "json")
    p.set_defaults(run=run_explicit_check)

    p = sub.add_parser("audit-h", help="zero-free region audit near the real axis")
    p.add_argument("--disc", type=int, required=True)
    p.add_argument("--c", type=_number, default=0.0875)
    p.add_argument("--height", type=_number, default=1.0)
    p.add_argument("--no-class", action="store_true", help="audit L(s, chi_D) only")
    _common(p)
    p.set_defaults(run=run_audit_h)

    p = sub.add_parser("selftest", help="exact identities, sandwich and Buchstab checks")
    p.add_argument("--discs", type=int, nargs="+", default=[7, 23, 31, 47])
    p.add_argument("--n", type=_positive_int, default=10**4)
    p.add_argument("--hecke", type=_positive_int, default=100)
    p.add_argument("--pairing", type=_positive_int, default=1000)
    p.add_argument("--sandwich-n", type=_positive_int, default=10**5)
    _common(p)
    p.set_defaults(run=run_selftest)
    return parser


def _config(args) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("run", "out", "fmt")}
    cfg["cache"] = str(cache_dir(args.cache))
    if args.command in ("congruence", "buchstab", "s3"):
        # desk-scale values are our choice; the asymptotic schedule is echoed for comparison
        cfg["reference_schedule"] = parameter_schedule(getattr(args, "r", 6.0))
    return cfg


def main(argv=None) -> int:
    try:
        return _main(argv)
    except BrokenPipeError:
        # reader went away (e.g. piped into head); nothing left to report
        sys.stdout = open(os.devnull, "w")
        return EXIT_OK


def _main(argv) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)  # exits with status 2 on bad usage
    start = time.perf_counter()
    with _sink(args.out) as stream:
        emitter: list[Emitter] = []

        def emit(columns):
            emitter.append(Emitter(args.fmt, stream, _config(args), columns))
            return emitter[0]

        status, summary = EXIT_OK, None
        try:
            summary = args.run(args, emit)
        except CheckFailed as exc:
            print(f"linniksieve {args.command}: check failed: {exc}", file=sys.stderr)
            status = EXIT_CHECK
        except (AssertionError, StepSizeError) as exc:
            print(f"linniksieve {args.command}: check failed: {exc}", file=sys.stderr)
            status = EXIT_CHECK
        except (ValueError, OverflowError, TruncationBudgetError) as exc:
            print(f"linniksieve {args.command}: invalid input: {exc}", file=sys.stderr)
            status = EXIT_INVALID
        if emitter:
            emitter[0].close(summary, time.perf_counter() - start)
    return status


def data_rows(text: str) -> str:
    """The data part of a CSV or JSON-lines output, for comparing runs."""
    keep = []
    for line in io.StringIO(text):
        if line.startswith("#") or line.startswith('{"header"') or line.startswith('{"summary"'):
            continue
        keep.append(line)
    return "".join(keep)


if __name__ == "__main__":
    sys.exit(main())
