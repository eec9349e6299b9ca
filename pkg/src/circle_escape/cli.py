"""Command-line front end.

Every subcommand writes CSV (header row, one row per record) or JSON (an
array of flat records). Floats are printed with 17 significant digits so
outputs re-parse to the exact doubles the engines returned.

Options may also come from a ``key = value`` file given by ``--config``;
keys are long option names (``delta-min`` or ``delta_min``) and flags on the
command line win. Exit status is 0 on success, 1 for a bad configuration
and 2 when an engine fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings

import numpy as np

from . import mellin, probe, reference
from . import zeta as zl
from .billiard import HoleConfiguration
from .errors import AccuracyError, DegenerateFitError, DomainError, PoleError
from .montecarlo import estimate_survival
from .survival import p_infinity, p_infinity_q_holes

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


# ------------------------------------------------------------------ output


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return "" if v is None else str(v)


def _json_value(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g") if math.isfinite(v) else "null"
    if v is None:
        return "null"
    return json.dumps(str(v))


def render(records: list[dict], fmt: str) -> str:
    if fmt == "json":
        rows = ["{" + ", ".join(f"{json.dumps(k)}: {_json_value(v)}" for k, v in r.items()) + "}" for r in records]
        return "[\n" + ",\n".join("  " + r for r in rows) + "\n]\n"
    buf = io.StringIO()
    if records:
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(list(records[0].keys()))
        for r in records:
            writer.writerow([_fmt(v) for v in r.values()])
    return buf.getvalue()


# ------------------------------------------------------------------ helpers


def _grid(args) -> np.ndarray:
    if args.delta is not None:
        return np.asarray(args.delta, dtype=float)
    if args.delta_min is None or args.delta_max is None:
        raise ConfigError("give --delta or both --delta-min and --delta-max")
    if not 0 < args.delta_min <= args.delta_max:
        raise ConfigError("need 0 < delta-min <= delta-max")
    if args.count < 1:
        raise ConfigError("--count must be positive")
    if args.count == 1:
        return np.array([args.delta_max])
    if args.linear:
        return np.linspace(args.delta_max, args.delta_min, args.count)
    return np.logspace(math.log10(args.delta_max), math.log10(args.delta_min), args.count)


def _holes(args, delta: float) -> HoleConfiguration:
    given = [args.theta is not None, args.r is not None or args.q is not None, args.holes is not None]
    if sum(given) > 1:
        raise ConfigError("--theta, --r/--q and --holes are mutually exclusive")
    if args.holes is not None:
        return HoleConfiguration.equal_holes(delta, args.holes)
    if args.r is not None or args.q is not None:
        if args.r is None or args.q is None:
            raise ConfigError("--r and --q must be given together")
        if args.q == 1:
            return HoleConfiguration.one_hole(delta)
        return HoleConfiguration.rational_angle(delta, args.r, args.q)
    return HoleConfiguration.two_holes(delta, args.theta or 0.0)


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise ConfigError(f"cannot parse complex value {text!r}") from exc


# ------------------------------------------------------------------ commands


def cmd_exact(args) -> list[dict]:
    out = []
    for d in _grid(args):
        holes = _holes(args, float(d))
        res = p_infinity(holes)
        out.append({"delta": float(d), "theta": holes.theta, "value": res.value, "terms": res.terms_used})
    return out


def cmd_qholes(args) -> list[dict]:
    if args.q is None or args.q < 2:
        raise ConfigError("qholes needs --q >= 2")
    out = []
    for d in _grid(args):
        res = p_infinity_q_holes(args.q, float(d))
        out.append({"q": args.q, "delta": float(d), "value": res.value, "terms": res.terms_used})
    return out


def _model(args) -> mellin.MellinModel:
    if args.q is None:
        raise ConfigError("--q is required")
    if args.source == "q-hole":
        return mellin.q_hole_model(args.q)
    r = 0 if args.q == 1 else (1 if args.r is None else args.r)
    if args.source == "table-closed-form":
        if r % args.q not in (0, 1, args.q - 1):
            raise ConfigError("closed forms exist only for r = +-1")
        return mellin.model_for(r, args.q) if args.q in mellin.TABLE_MODULI else mellin.table_model(args.q)
    return mellin.character_model(r, args.q)


def cmd_mellin(args) -> list[dict]:
    model = _model(args)
    if args.poles:
        exp = mellin.asymptotic_expansion(model, args.cutoff, args.zeros)
        out = []
        for kind, terms in (
            ("real", exp.real_pole_terms),
            ("log-periodic", exp.oscillatory_terms),
            ("critical", exp.critical_terms),
        ):
            for t in terms:
                out.append(
                    {
                        "kind": kind,
                        "pole_re": t.pole.real,
                        "pole_im": t.pole.imag,
                        "coefficient_re": t.coefficient.real,
                        "coefficient_im": t.coefficient.imag,
                        "log_coefficient_re": t.log_coefficient.real,
                        "log_coefficient_im": t.log_coefficient.imag,
                    }
                )
        return out
    if not args.s:
        raise ConfigError("give --s values or --poles")
    out = []
    for text in args.s:
        s = _complex(text)
        v = complex(model(s))
        out.append({"source": model.source, "q": model.q, "r": model.r, "s_re": s.real, "s_im": s.imag,
                    "value_re": v.real, "value_im": v.imag})
    return out


def _residue_rows(qs) -> list[dict]:
    expected = reference.expected_residues()
    out = []
    for q in qs:
        model = mellin.table_model(q)
        for s0 in reference.RESIDUE_POLES:
            c, lc = mellin.residue_numeric(model, s0)
            ec, elc = expected[(q, s0)]
            err = max(abs(c - ec), abs(lc - elc))
            out.append({"q": q, "s": s0, "measured": c.real, "expected": ec, "measured_log": lc.real,
                        "expected_log": elc, "abs_error": err})
    return out


def cmd_residues(args) -> list[dict]:
    qs = mellin.TABLE_MODULI if args.q is None else (args.q,)
    for q in qs:
        if q not in mellin.TABLE_MODULI:
            raise ConfigError(f"--q must be one of {mellin.TABLE_MODULI}")
    return _residue_rows(qs)


def cmd_zeros(args) -> list[dict]:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", zl.OutsideValidatedBoxWarning)
        zeros = zl.find_zeros(args.t_max)
    return [
        {"index": i + 1, "ordinate": float(t), "multiplicity": int(m)}
        for i, (t, m) in enumerate(zip(zeros.ordinates, zeros.multiplicities))
    ]


def cmd_simulate(args) -> list[dict]:
    if args.delta is None or len(args.delta) != 1:
        raise ConfigError("simulate needs exactly one --delta")
    if args.t is None:
        raise ConfigError("simulate needs --t")
    holes = _holes(args, args.delta[0])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        est = estimate_survival(holes, args.t, args.samples, args.seed, args.streams, args.threads)
    return [
        {
            "delta": holes.delta,
            "theta": holes.theta,
            "t": est.t,
            "samples": est.samples,
            "survivors": est.survivors,
            "p_hat": est.p_hat,
            "std_error": est.std_error,
            "tp_hat": est.tp_hat,
            "tp_std_error": est.tp_std_error,
            "p_infinity": p_infinity(holes).value,
            "seed": est.seed,
            "streams": est.streams,
            "below_regime": est.below_regime,
        }
    ]


def cmd_probe(args) -> list[dict]:
    grid = _grid(args)
    if args.kind == "fluctuation":
        q = 1 if args.q is None else args.q
        r = 0 if q == 1 else (1 if args.r is None else args.r)
        series = probe.fluctuation(q, r, grid, args.cutoff, args.zeros)
    elif args.kind == "one-two":
        series = probe.comparator_one_two(grid, args.cutoff, args.zeros)
    else:
        if args.q is None:
            raise ConfigError("--kind qholes needs --q")
        series = probe.q_hole_comparator(args.q, grid, args.cutoff, args.zeros)
    print(
        f"# {series.label}: exponent {series.envelope_exponent:.4f} +- {series.exponent_half_width:.4f}, "
        f"{series.sign_changes} sign changes",
        file=sys.stderr,
    )
    return [
        {"delta": float(d), "residual": float(r), "envelope_exponent": series.envelope_exponent,
         "exponent_half_width": series.exponent_half_width, "sign_changes": series.sign_changes}
        for d, r in zip(series.deltas, series.residuals)
    ]


def cmd_reproduce_tables(args) -> list[dict]:
    rng = np.random.default_rng(args.seed)
    out = []
    for q in mellin.TABLE_MODULI:
        r = 0 if q == 1 else 1
        pts = rng.uniform(1.2, 5.0, 10) + 1j * rng.uniform(-20, 20, 10)
        closed = mellin.p_tilde_closed(q, pts)
        general = mellin.p_tilde_general(r, q, pts)
        err = float(np.max(np.abs(closed - general) / np.abs(closed)))
        out.append({"table": "transform", "q": q, "s": "10 random points", "measured": err,
                    "expected": 0.0, "abs_error": err, "status": "PASS" if err < 1e-9 else "FAIL"})
    for row in _residue_rows(mellin.TABLE_MODULI):
        ok = row["abs_error"] < 1e-6
        out.append({"table": "residues", "q": row["q"], "s": str(row["s"]), "measured": row["measured"],
                    "expected": row["expected"], "abs_error": row["abs_error"], "status": "PASS" if ok else "FAIL"})
    return out


COMMANDS = {
    "exact": (cmd_exact, "survival constant over a grid of hole widths"),
    "qholes": (cmd_qholes, "survival constant for q equally spaced holes"),
    "mellin": (cmd_mellin, "transform values or its pole/residue list"),
    "residues": (cmd_residues, "contour residues against the closed-form table"),
    "zeros": (cmd_zeros, "zeta zeros on the critical line"),
    "simulate": (cmd_simulate, "Monte Carlo survival estimate"),
    "probe": (cmd_probe, "detrended fluctuations and their envelope exponent"),
    "reproduce-tables": (cmd_reproduce_tables, "verify both transform and residue tables"),
}

COLUMNS = {
    "exact": "delta, theta, value, terms",
    "qholes": "q, delta, value, terms",
    "mellin": "source, q, r, s_re, s_im, value_re, value_im (with --poles: kind, pole_*, coefficient_*, log_coefficient_*)",
    "residues": "q, s, measured, expected, measured_log, expected_log, abs_error",
    "zeros": "index, ordinate, multiplicity",
    "simulate": "delta, theta, t, samples, survivors, p_hat, std_error, tp_hat, tp_std_error, p_infinity, seed, streams, below_regime",
    "probe": "delta, residual, envelope_exponent, exponent_half_width, sign_changes",
    "reproduce-tables": "table, q, s, measured, expected, abs_error, status",
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="circle-escape", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=f"{help_text}. Columns: {COLUMNS[name]}.")
        p.add_argument("--config", help="key = value option file (flags override)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--output", "-o", help="output file (default stdout)")
        p.add_argument("--threads", type=int, default=1, help="worker cap")
        if name in ("exact", "qholes", "probe", "simulate"):
            p.add_argument("--delta", type=float, nargs="+", help="hole width(s) in radians")
            p.add_argument("--delta-min", type=float)
            p.add_argument("--delta-max", type=float)
            p.add_argument("--count", type=int, default=50)
            p.add_argument("--linear", action="store_true", help="linear instead of log spacing")
        if name in ("exact", "simulate"):
            p.add_argument("--theta", type=float, help="hole separation in radians")
            p.add_argument("--holes", type=int, help="q equally spaced holes")
        if name in ("exact", "simulate", "mellin", "probe", "qholes"):
            p.add_argument("--r", type=int)
        if name != "zeros":
            p.add_argument("--q", type=int)
        if name in ("mellin", "probe"):
            p.add_argument("--cutoff", type=int, default=3, help="most negative real pole kept")
            p.add_argument("--zeros", type=int, default=0, help="critical-line pole pairs kept")
        if name == "mellin":
            p.add_argument("--s", action="append", help="evaluation point, e.g. 3 or 2+1j")
            p.add_argument("--poles", action="store_true", help="list residues instead of values")
            p.add_argument("--source", choices=("table-closed-form", "character-series", "q-hole"),
                           default="table-closed-form")
        if name == "zeros":
            p.add_argument("--t-max", type=float, default=100.0)
        if name == "simulate":
            p.add_argument("--t", type=float)
            p.add_argument("--samples", type=int, default=100_000)
            p.add_argument("--seed", type=int, default=0)
            p.add_argument("--streams", type=int, default=8)
        if name == "reproduce-tables":
            p.add_argument("--seed", type=int, default=0)
        if name == "probe":
            p.add_argument("--kind", choices=("fluctuation", "one-two", "qholes"), default="fluctuation")
        p.set_defaults(_subparser=p)
    return parser


def read_config(path: str) -> dict[str, str]:
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (x.strip() for x in line.split("=", 1))
            values[key.replace("_", "-")] = value
    return values


def _apply_config(sub: argparse.ArgumentParser, argv: list[str], path: str) -> argparse.Namespace:
    """Re-parse with config values inserted before the command-line flags."""
    try:
        values = read_config(path)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    known = {opt for a in sub._actions for opt in a.option_strings}
    pre = []
    for key, value in values.items():
        flag = f"--{key}"
        if flag not in known:
            raise ConfigError(f"{path}: unknown key {key!r}")
        action = next(a for a in sub._actions if flag in a.option_strings)
        if action.nargs == 0:
            if value.lower() in ("1", "true", "yes", "on"):
                pre.append(flag)
        elif isinstance(action, argparse._AppendAction):
            for item in value.split(","):
                pre += [flag, item.strip()]
        elif action.nargs in ("+", "*"):
            pre += [flag] + value.replace(",", " ").split()
        else:
            pre += [flag, value]
    return sub.parse_args(pre + argv)


def run(argv: list[str] | None = None, stdout=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.config:
            args = _apply_config(args._subparser, argv[1:], args.config)
            args.command = argv[0]
        if args.threads is not None and args.threads < 1:
            raise ConfigError("--threads must be positive")
        func = COMMANDS[args.command][0]
        records = func(args)
        text = render(records, args.format)
        if args.output:
            with open(args.output, "w", newline="") as fh:
                fh.write(text)
        else:
            stdout.write(text)
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (PoleError, AccuracyError, DegenerateFitError, OSError, MemoryError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def main() -> None:
    sys.exit(run())
