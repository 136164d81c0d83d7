"""Command line front end.

Subcommands: ``solve`` (spectrum of a configured problem), ``check``
(residual-vs-N table, the plot-data channel), ``evaluate`` (basis solution
values at given omega and x), ``benchmark`` (built-in problems against
stored references).  Exit codes: 0 success, 2 configuration error,
3 numerical failure, 4 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time

from .accuracy import residual_table_csv
from .benchmarks import BENCHMARKS, run_benchmark
from .config import load_config
from .errors import ConfigError, NsbfError, NumericalError, VerificationError
from .expressions import parse_constant
from .spectral import assemble, find_complex_spectrum, find_real_spectrum

log = logging.getLogger("nsbf")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_VERIFICATION = 4


def _write_output(text: str, path: str | None):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _spectrum_json(spectrum, n_star, config_warnings):
    doc = {
        "n_star": n_star,
        "eigenvalues": spectrum.to_rows(),
        "warnings": list(config_warnings) + list(spectrum.warnings),
    }
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def _spectrum_csv(spectrum):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "lambda_re", "lambda_im", "omega_re", "omega_im", "residual"])
    for row in spectrum.to_rows():
        w.writerow(
            [row["index"]]
            + [f"{row[k]:.17g}" for k in ("lambda_re", "lambda_im", "omega_re", "omega_im", "residual")]
        )
    return buf.getvalue()


def _load(args):
    cfg = load_config(args.config)
    if args.grid_n is not None:
        cfg.grid_n = args.grid_n
    if args.coeff_N is not None:
        cfg.n_coeffs = args.coeff_N
    if getattr(args, "json", False):
        cfg.output_format = "json"
    if getattr(args, "csv", False):
        cfg.output_format = "csv"
    if getattr(args, "output", None) is not None:
        cfg.output_path = args.output
    return cfg


def _timed(label, fn, *a, **kw):
    t0 = time.perf_counter()
    out = fn(*a, **kw)
    log.info("%s: %.2f s", label, time.perf_counter() - t0)
    return out


def cmd_solve(args) -> int:
    cfg = _load(args)
    problem = cfg.to_problem()
    asm = _timed("assembly (f, coefficients, N selection)", assemble, problem)
    log.info("selected N* = %d (residual %.3e)", asm.selection.n_star, asm.selection.residual)
    search = cfg.search
    if search.get("mode", "real") == "real":
        omega_max = search.get("omega_max")
        spectrum = _timed(
            "real spectrum search",
            find_real_spectrum,
            problem,
            asm.solver,
            count=search.get("count"),
            omega_max=float(omega_max) if omega_max is not None else None,
            nu_max=float(search.get("nu_max", 0.0)),
        )
    else:
        spectrum = _timed(
            "complex spectrum search",
            find_complex_spectrum,
            problem,
            asm.solver,
            tuple(search["rectangle"]),
            int(search.get("max_zeros", 100)),
        )
    for w in spectrum.warnings:
        log.warning("%s", w)
    if cfg.output_format == "json":
        _write_output(_spectrum_json(spectrum, asm.selection.n_star, cfg.warnings), cfg.output_path)
    else:
        _write_output(_spectrum_csv(spectrum), cfg.output_path)
    return EXIT_OK


def cmd_check(args) -> int:
    cfg = _load(args)
    problem = cfg.to_problem()
    asm = _timed("assembly", assemble, problem)
    _write_output(residual_table_csv(asm.selection.table), cfg.output_path)
    log.info("N* = %d, stabilized = %s", asm.selection.n_star, asm.selection.stabilized)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    cfg = _load(args)
    problem = cfg.to_problem()
    asm = _timed("assembly", assemble, problem)
    omegas = [parse_constant(t) for t in args.omega]
    xs = [parse_constant(t).real for t in args.x]
    rows = []
    for om in omegas:
        for xv in xs:
            vals = asm.solver.eval_basis(om, xv)
            dc, ds = asm.solver.eval_omega_derivatives(om, xv)
            rows.append((om, xv, vals.c, vals.s, vals.c_prime, vals.s_prime, dc, ds))
    header = [
        "omega_re", "omega_im", "x",
        "c_re", "c_im", "s_re", "s_im",
        "cprime_re", "cprime_im", "sprime_re", "sprime_im",
        "dcdomega_re", "dcdomega_im", "dsdomega_re", "dsdomega_im",
    ]
    if cfg.output_format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for om, xv, *vals in rows:
            flat = [om.real, om.imag, xv]
            for v in vals:
                flat += [v.real, v.imag]
            w.writerow([f"{v:.17g}" for v in flat])
        _write_output(buf.getvalue(), cfg.output_path)
    else:
        docs = []
        for om, xv, *vals in rows:
            d = {"omega_re": om.real, "omega_im": om.imag, "x": xv}
            for key, v in zip(("c", "s", "cprime", "sprime", "dcdomega", "dsdomega"), vals):
                d[key + "_re"] = v.real
                d[key + "_im"] = v.imag
            docs.append(d)
        _write_output(json.dumps(docs, indent=1, sort_keys=True) + "\n", cfg.output_path)
    return EXIT_OK


def cmd_benchmark(args) -> int:
    report = _timed(f"benchmark {args.name}", run_benchmark, args.name,
                    grid_n=args.grid_n, n_coeffs=args.coeff_N)
    lines = [
        f"benchmark {report.name} (reference source: {report.source}), N* = {report.n_star}",
        f"{'index':>5s} {'expected':>38s} {'computed':>38s} {'|error|':>12s} {'tol':>9s}  status",
    ]
    for r in report.rows:
        lines.append(
            f"{r.index:5d} {r.expected!s:>38s} {r.got!s:>38s} {r.error:12.3e} {r.tolerance:9.1e}  "
            + ("PASS" if r.passed else "FAIL")
        )
    verdict = "PASS" if report.passed else "FAIL"
    lines.append(f"result: {verdict}")
    text = "\n".join(lines) + "\n"
    if getattr(args, "json", False):
        doc = {
            "name": report.name,
            "source": report.source,
            "n_star": report.n_star,
            "passed": report.passed,
            "rows": [
                {
                    "index": r.index,
                    "expected_re": r.expected.real,
                    "expected_im": r.expected.imag,
                    "computed_re": r.got.real,
                    "computed_im": r.got.imag,
                    "error": r.error,
                    "tolerance": r.tolerance,
                    "passed": r.passed,
                }
                for r in report.rows
            ],
        }
        text = json.dumps(doc, indent=1, sort_keys=True) + "\n"
    _write_output(text, getattr(args, "output", None))
    if not report.passed:
        raise VerificationError(f"benchmark {report.name} failed")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="nsbf",
        description="Sturm-Liouville spectral problems via Neumann series of Bessel functions",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, with_config=True):
        if with_config:
            sp.add_argument("config", help="problem configuration file (TOML or JSON)")
        sp.add_argument("-v", "--verbose", action="store_true", help="log stage timings to stderr")
        sp.add_argument("--grid-n", type=int, default=None, help="override grid node count")
        sp.add_argument("--coeff-N", type=int, default=None, help="override coefficient count")
        sp.add_argument("--json", action="store_true", help="force JSON output")
        sp.add_argument("--csv", action="store_true", help="force CSV output")
        sp.add_argument("--output", default=None, help="output path ('-' for stdout)")

    sp = sub.add_parser("solve", help="compute the spectrum")
    common(sp)
    sp.set_defaults(fn=cmd_solve)

    sp = sub.add_parser("check", help="emit the residual-vs-N table (CSV)")
    common(sp)
    sp.set_defaults(fn=cmd_check)

    sp = sub.add_parser("evaluate", help="evaluate basis solutions at omega, x")
    common(sp)
    sp.add_argument("--omega", action="append", required=True,
                    help="omega value (constant expression; repeatable)")
    sp.add_argument("--x", action="append", required=True,
                    help="x value, must be a grid node (repeatable)")
    sp.set_defaults(fn=cmd_evaluate)

    sp = sub.add_parser("benchmark", help="run a built-in benchmark")
    sp.add_argument("name", choices=list(BENCHMARKS))
    common(sp, with_config=False)
    sp.set_defaults(fn=cmd_benchmark)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.fn(args)
    except VerificationError as exc:
        log.error("%s", exc)
        return EXIT_VERIFICATION
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except NumericalError as exc:
        log.error("%s", exc)
        return EXIT_NUMERICAL
    except NsbfError as exc:  # pragma: no cover
        log.error("%s", exc)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
