"""Command-line entry point: ``eurcoh sweep|analyze|tomo-sim|fuzz|plot``.

Exit codes: 0 success, 1 usage or configuration error, 2 bound violation found
by ``fuzz`` under the consistent delta, 3 I/O or malformed input file.
"""

from __future__ import annotations

import argparse
import io
import csv
import sys
from typing import Any, Sequence

from .errors import EurcohError, InvalidConfig, MalformedCsv
from .fuzz import bound_fuzz
from .infotheory import DELTA_VARIANTS, uncertainty_report
from .plotting import plot_csv_text
from .states import StateParams, bell_diagonal_state, mub_qubit
from .sweep import SweepConfig, rows_to_csv, run_sweep
from .tomography import (
    count_table_from_csv,
    count_table_to_csv,
    fidelity,
    linear_reconstruct,
    mle_reconstruct,
    monte_carlo_errors,
    reconstruction_to_text,
    simulate_counts,
    standard_settings,
    write_atomic,
)

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, EXIT_IO = 0, 1, 2, 3

# fallback values when neither a flag nor the config file sets a key
DEFAULTS: dict[str, Any] = {
    "seed": 0,
    "delta_variant": "consistent",
    "pipeline": "analytic",
    "exposure": 1e4,
    "mc_samples": 100,
    "settings": 36,
    "output": None,
    "workers": 1,
    "kind": "theta",
    "fixed": None,
    "grid": None,
    "p": None,
    "theta": None,
    "method": "mle",
    "counts_in": None,
    "counts_out": None,
    "n": 10_000,
    "ranks": "1,2,4",
    "product": False,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _variant(text: str) -> str:
    v = text.strip().replace("-", "_")
    if v not in DELTA_VARIANTS:
        raise InvalidConfig(f"delta variant must be consistent or as-printed, not {text!r}")
    return v


def _floats(text) -> tuple[float, ...] | None:
    if text is None:
        return None
    if isinstance(text, (tuple, list)):
        return tuple(float(t) for t in text)
    try:
        return tuple(float(t) for t in str(text).replace(";", ",").split(",") if t.strip())
    except ValueError as exc:
        raise InvalidConfig(f"expected a comma-separated list of numbers, got {text!r}") from exc


def read_config(path: str) -> dict[str, str]:
    """Flat ``key = value`` file; ``#`` starts a comment, dashes in keys become underscores."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidConfig(f"{path}:{lineno}: expected 'key = value'")
            k, v = (t.strip() for t in line.split("=", 1))
            out[k.replace("-", "_")] = v
    return out


def _coerce(key: str, value):
    if value is None:
        return None
    try:
        if key in ("seed", "mc_samples", "settings", "workers", "n"):
            return int(value)
        if key in ("exposure", "p", "theta"):
            return float(value)
        if key == "product":
            return value if isinstance(value, bool) else str(value).lower() in ("1", "true", "yes", "on")
        if key == "delta_variant":
            return _variant(str(value))
    except ValueError as exc:
        raise InvalidConfig(f"bad value for {key}: {value!r}") from exc
    return value


def resolve(args: argparse.Namespace) -> dict[str, Any]:
    """Merge defaults, then the config file, then explicit flags."""
    merged = dict(DEFAULTS)
    if getattr(args, "config", None):
        cfg = read_config(args.config)
        unknown = set(cfg) - set(DEFAULTS)
        if unknown:
            raise InvalidConfig(f"unknown config keys {sorted(unknown)}")
        merged.update(cfg)
    for k in DEFAULTS:
        v = getattr(args, k, None)
        if v is not None:
            merged[k] = v
    return {k: _coerce(k, v) for k, v in merged.items()}


def _shared(p: argparse.ArgumentParser) -> None:
    # defaults are None so that unset flags fall through to the config file
    p.add_argument("--seed", type=int)
    p.add_argument("--delta-variant", dest="delta_variant", help="consistent | as-printed")
    p.add_argument("--pipeline", choices=("analytic", "tomographic"))
    p.add_argument("--exposure", type=float, help="mean coincidences per setting")
    p.add_argument("--mc-samples", dest="mc_samples", type=int)
    p.add_argument("--settings", type=int, choices=(16, 36))
    p.add_argument("--output", "-o")
    p.add_argument("--config", help="flat key = value file; flags take precedence")
    p.add_argument("--workers", type=int, help="process pool size")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="eurcoh", description="Uncertainty and coherence bounds for two-qubit states.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    sp = sub.add_parser("sweep", help="theta or p sweep over the Bell-diagonal family")
    _shared(sp)
    sp.add_argument("--kind", choices=("theta", "p"))
    sp.add_argument("--fixed", help="branch values: p for a theta sweep, theta for a p sweep (comma list)")
    sp.add_argument("--grid", help="swept values, comma list")

    ap = sub.add_parser("analyze", help="full report for one state")
    _shared(ap)
    ap.add_argument("--p", type=float)
    ap.add_argument("--theta", type=float, help="degrees")

    tp = sub.add_parser("tomo-sim", help="simulate counts and reconstruct")
    _shared(tp)
    tp.add_argument("--p", type=float)
    tp.add_argument("--theta", type=float, help="degrees")
    tp.add_argument("--method", choices=("mle", "linear"))
    tp.add_argument("--counts-in", dest="counts_in", help="reconstruct from this counts CSV")
    tp.add_argument("--counts-out", dest="counts_out", help="write the simulated counts here")

    fp = sub.add_parser("fuzz", help="random-state check of the four lower bounds")
    _shared(fp)
    fp.add_argument("--n", type=int)
    fp.add_argument("--ranks", help="ancilla dimensions to draw from, comma list")
    fp.add_argument("--product", action="store_const", const=True, help="draw separable pure states only")

    pp = sub.add_parser("plot", help="render a sweep CSV as a four-panel SVG")
    _shared(pp)
    pp.add_argument("csv_path")
    return parser


def _state_params(opts) -> StateParams:
    if opts["p"] is None or opts["theta"] is None:
        raise InvalidConfig("--p and --theta are required")
    try:
        return StateParams(opts["p"], opts["theta"])
    except ValueError as exc:
        raise InvalidConfig(str(exc)) from exc


def cmd_sweep(opts, out) -> int:
    cfg = SweepConfig(
        sweep_kind=opts["kind"],
        fixed_values=_floats(opts["fixed"]) or (),
        grid=_floats(opts["grid"]) or (),
        pipeline=opts["pipeline"],
        exposure=opts["exposure"],
        mc_samples=opts["mc_samples"],
        seed=opts["seed"],
        delta_variant=opts["delta_variant"],
        settings_mode=opts["settings"],
        output_path=opts["output"],
        workers=opts["workers"],
    ).resolved()
    rows = run_sweep(cfg)
    if not cfg.output_path:
        out.write(rows_to_csv(rows, cfg))
    else:
        out.write(f"wrote {len(rows)} rows to {cfg.output_path}\n")
    return EXIT_OK


ANALYZE_ROWS = (
    ("S(AB)", "s_ab"), ("S(A)", "s_a"), ("S(B)", "s_b"), ("S(A|B)", "s_a_given_b"), ("I(A:B)", "i_ab"),
    None,
    ("ELHS", "elhs"), ("ERHS1", "erhs1"), ("ERHS2", "erhs2"),
    None,
    ("CLHS", "clhs"), ("CRHS1", "crhs1"), ("CRHS2", "crhs2"),
    None,
    ("delta", "delta"),
)


def cmd_analyze(opts, out) -> int:
    params = _state_params(opts)
    rho = bell_diagonal_state(params)
    reps = {v: uncertainty_report(rho, mub_qubit(), v) for v in DELTA_VARIANTS}
    w = max(len(v) for v in DELTA_VARIANTS) + 2
    out.write(f"state rho(p={params.p:g}, theta={params.theta_deg:g} deg)\n")
    out.write(f"{'quantity':<10}" + "".join(f"{v:>{w + 12}}" for v in DELTA_VARIANTS) + "\n")
    for entry in ANALYZE_ROWS:
        if entry is None:
            out.write("\n")
            continue
        name, attr = entry
        out.write(f"{name:<10}" + "".join(f"{getattr(reps[v], attr):>{w + 12}.12f}" for v in DELTA_VARIANTS) + "\n")
    rep = reps[opts["delta_variant"]]
    for m, h, c, x in zip(rep.labels, rep.per_measurement_conditional_entropy,
                          rep.per_measurement_coherence, rep.holevo):
        out.write(f"  M={m}: S(M|B)={h:.12f}  C={c:.12f}  I(M:B)={x:.12f}\n")
    if opts["output"]:
        cols = ["p", "theta_deg", "delta_variant", *(a for e in ANALYZE_ROWS if e for a in [e[1]])]
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(cols)
        wr.writerow([format(params.p, ".17g"), format(params.theta_deg, ".17g"), rep.delta_variant,
                     *(format(getattr(rep, c), ".17g") for c in cols[3:])])
        write_atomic(opts["output"], buf.getvalue())
    return EXIT_OK


def cmd_tomo_sim(opts, out) -> int:
    params = _state_params(opts)
    rho = bell_diagonal_state(params)
    settings = standard_settings(opts["settings"])
    if opts["exposure"] <= 0:
        raise InvalidConfig("exposure must be positive")
    if opts["counts_in"]:
        with open(opts["counts_in"]) as fh:
            table = count_table_from_csv(fh.read())
    else:
        table = simulate_counts(rho, settings, opts["exposure"], opts["seed"])
    if opts["counts_out"]:
        write_atomic(opts["counts_out"], count_table_to_csv(table))
    if opts["method"] == "linear":
        res = linear_reconstruct(table)
    else:
        res = mle_reconstruct(table)
    out.write(f"method      : {res.method}\n")
    out.write(f"converged   : {res.converged} ({res.iterations} iterations)\n")
    out.write(f"physical    : {res.physical}\n")
    if res.physical:
        out.write(f"fidelity    : {fidelity(res.rho_hat, rho):.12f}\n")
    if opts["output"]:
        write_atomic(opts["output"], reconstruction_to_text(res))
    if opts["mc_samples"] >= 2 and not opts["counts_in"]:
        rep = monte_carlo_errors(
            rho, settings, opts["exposure"], opts["mc_samples"], opts["seed"],
            ("fidelity", "elhs", "clhs", "erhs2", "crhs2"), opts["delta_variant"], opts["workers"],
        )
        out.write(f"Monte Carlo over {rep.n_samples} samples ({rep.n_failed} failed):\n")
        for name, (mean, sd) in rep.as_dict().items():
            out.write(f"  {name:<9} {mean:.6f} +- {sd:.6f}\n")
    return EXIT_OK


def cmd_fuzz(opts, out) -> int:
    ranks = tuple(int(r) for r in _floats(opts["ranks"]))
    if not ranks or any(r < 1 for r in ranks):
        raise InvalidConfig("ranks must be positive integers")
    if opts["n"] < 1:
        raise InvalidConfig("n must be at least 1")
    summary = bound_fuzz(opts["n"], opts["seed"], opts["delta_variant"], ranks, bool(opts["product"]))
    out.write("\n".join(summary.lines()) + "\n")
    if opts["output"]:
        write_atomic(opts["output"], "\n".join(summary.lines()) + "\n")
    if opts["delta_variant"] == "consistent" and summary.violations:
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_plot(opts, out, csv_path: str) -> int:
    with open(csv_path) as fh:
        svg = plot_csv_text(fh.read())
    target = opts["output"] or csv_path.rsplit(".", 1)[0] + ".svg"
    write_atomic(target, svg)
    out.write(f"wrote {target}\n")
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    out, err = sys.stdout, sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        opts = resolve(args)
        if args.command == "sweep":
            return cmd_sweep(opts, out)
        if args.command == "analyze":
            return cmd_analyze(opts, out)
        if args.command == "tomo-sim":
            return cmd_tomo_sim(opts, out)
        if args.command == "fuzz":
            return cmd_fuzz(opts, out)
        return cmd_plot(opts, out, args.csv_path)
    except UsageError as exc:
        err.write(f"{parser.format_usage()}eurcoh: error: {exc}\n")
        return EXIT_USAGE
    except MalformedCsv as exc:
        err.write(f"eurcoh: malformed input: {exc}\n")
        return EXIT_IO
    except OSError as exc:
        err.write(f"eurcoh: I/O error: {exc}\n")
        return EXIT_IO
    except (InvalidConfig, EurcohError, ValueError) as exc:
        err.write(f"eurcoh: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
