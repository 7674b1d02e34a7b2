"""Command-line entry point.

Every subcommand writes deterministic output: floats use 17 significant
digits, JSON keys keep insertion order, CSV uses '.' and no locale.
Exit codes: 0 success, 1 verification with a failing entry, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from .errors import RenormError
from .extension import energy_curve, energy_singular_model
from .logseries import SingularModel, series_khat, series_ktilde
from .renorm import DEFAULT_EPS_COUNT, DEFAULT_EPS_MAX, DEFAULT_EPS_MIN, EnergyCurve, eps_grid, renorm_limit_fit
from .specfun import ScaledKind, bessel_k
from .spectral import gaussian_profile, pairing, parse_symbol
from .verify import METHODS, VerifyConfig, mode_symbol, paper_symbol, verify_run

PROG = "renormnd"


class UsageError(Exception):
    pass


# ----------------------------------------------------------------------------
# formatting
# ----------------------------------------------------------------------------

def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _encode(obj) -> str:
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (float, np.floating)):
        return fmt(obj) if math.isfinite(obj) else "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def to_json(obj) -> str:
    """JSON text with every float written to 17 significant digits."""
    return _encode(obj) + "\n"


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if v is None else fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


# ----------------------------------------------------------------------------
# argument types
# ----------------------------------------------------------------------------

def _float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"not finite: {text!r}")
    return v


def _positive(text):
    v = _float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return v


def _count(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 2:
        raise argparse.ArgumentTypeError(f"need at least 2: {text!r}")
    return v


def _float_list(text):
    items = [t.strip() for t in text.split(",") if t.strip()]
    if not items:
        raise argparse.ArgumentTypeError("empty list")
    return tuple(_float(t) for t in items)


def _positive_list(text):
    vals = _float_list(text)
    if any(not v > 0 for v in vals):
        raise argparse.ArgumentTypeError(f"entries must be positive: {text!r}")
    return vals


def _methods(text):
    items = tuple(t.strip() for t in text.split(",") if t.strip())
    bad = [m for m in items if m not in METHODS]
    if not items or bad:
        raise argparse.ArgumentTypeError(f"choose from {','.join(METHODS)}: {text!r}")
    return items


def parse_model(text: str) -> SingularModel:
    """Parse ``pow:-2,-1;log;corr:2,4;logcorr:2;log2corr:2`` (any subset, any order)."""
    spec = {"power_exponents": (), "has_log": False, "correction_exponents": (),
            "log_corrections": (), "log2_corrections": ()}
    keys = {"pow": "power_exponents", "corr": "correction_exponents",
            "logcorr": "log_corrections", "log2corr": "log2_corrections"}
    for part in filter(None, (p.strip() for p in text.split(";"))):
        head, _, rest = part.partition(":")
        if head == "log" and not rest:
            spec["has_log"] = True
        elif head == "none" and not rest:
            pass
        elif head in keys and rest:
            spec[keys[head]] = _float_list(rest)
        else:
            raise argparse.ArgumentTypeError(f"bad model component {part!r}")
    return SingularModel(**spec)


def _model_arg(text):
    if text.startswith("@"):
        try:
            with open(text[1:], encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, ValueError) as exc:
            raise argparse.ArgumentTypeError(f"cannot read model file: {exc}") from None
        return SingularModel.from_dict(data.get("model", data))
    try:
        return parse_model(text)
    except RenormError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _add_output(p, formats=("json", "csv"), default="json"):
    p.add_argument("--format", choices=formats, default=default)
    p.add_argument("--out", help="write to this file instead of stdout")


def _add_grid(p):
    p.add_argument("--eps-min", type=_positive, default=DEFAULT_EPS_MIN)
    p.add_argument("--eps-max", type=_positive, default=DEFAULT_EPS_MAX)
    p.add_argument("--eps-count", type=_count, default=DEFAULT_EPS_COUNT)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog=PROG, description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bessel", help="evaluate K_nu or its scaled variants")
    p.add_argument("--kind", choices=[k.value for k in ScaledKind], default="plain")
    p.add_argument("--nu", type=_float, required=True)
    p.add_argument("--z", type=_positive_list, required=True, help="comma-separated arguments")
    _add_output(p, ("text", "json", "csv"), "text")

    p = sub.add_parser("series", help="print a small-z expansion of hat K or tilde K")
    p.add_argument("--kind", choices=["hat", "tilde"], default="hat")
    p.add_argument("--nu", type=_float, required=True)
    p.add_argument("--order", type=_float, default=4.0)
    _add_output(p)

    p = sub.add_parser("renorm", help="renormalized limit of a sampled curve")
    p.add_argument("--input", required=True, help="CSV with columns epsilon,value ('-' for stdin)")
    p.add_argument("--model", type=_model_arg, required=True,
                   help="e.g. 'pow:-1;log;corr:1,2' or @model.json")
    p.add_argument("--eps-min", type=_positive)
    p.add_argument("--eps-max", type=_positive)
    p.add_argument("--eps-count", type=_count, help="thin the windowed samples to this many")
    _add_output(p, ("json",))

    p = sub.add_parser("pairing", help="pair two Gaussians against a multiplier")
    p.add_argument("--d", type=int, choices=(1, 2, 3), default=1)
    p.add_argument("--width", type=_positive, default=1.0)
    p.add_argument("--width2", type=_positive, help="width of the second Gaussian (default: --width)")
    p.add_argument("--symbol", required=True, help="frac:S, log or affine:C0,CLOG")
    _add_output(p, ("json",))

    p = sub.add_parser("energy", help="sample E(eps) for a Gaussian")
    p.add_argument("--nu", type=_float, required=True)
    p.add_argument("--d", type=int, choices=(1, 2, 3), default=1)
    p.add_argument("--width", type=_positive, default=1.0)
    _add_grid(p)
    p.add_argument("--model-out", help="write the singular model (JSON) here")
    _add_output(p, ("csv", "json"), "csv")

    p = sub.add_parser("symbol", help="per-frequency boundary symbol")
    p.add_argument("--nu", type=_float, required=True)
    p.add_argument("--r", type=_positive_list, required=True)
    p.add_argument("--method", choices=list(METHODS) + ["printed", "corrected"], default="subtract")
    _add_output(p)

    p = sub.add_parser("verify", help="run the verification and errata report")
    p.add_argument("--nu", type=_float_list, default=VerifyConfig.nus)
    p.add_argument("--r", type=_positive_list, default=VerifyConfig.rs)
    p.add_argument("--method", type=_methods, default=METHODS)
    p.add_argument("--width", type=lambda t: () if t.strip() in ("", "none") else _positive_list(t),
                   default=VerifyConfig.widths, help="Gaussian widths for pairing entries ('none' to skip)")
    p.add_argument("--d", type=int, choices=(1, 2, 3), default=1)
    p.add_argument("--no-limits", action="store_true", help="omit the small-z limit entries")
    _add_output(p)
    return parser


# ----------------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------------

def _cmd_bessel(a):
    values = [float(bessel_k(ScaledKind(a.kind), a.nu, z)) for z in a.z]
    if a.format == "text":
        return "".join(fmt(v) + "\n" for v in values), 0
    if a.format == "csv":
        return to_csv(["z", "value"], zip(a.z, values)), 0
    return to_json({"kind": a.kind, "nu": a.nu, "z": list(a.z), "values": values}), 0


def _cmd_series(a):
    s = series_khat(a.nu, a.order) if a.kind == "hat" else series_ktilde(a.nu, a.order)
    if a.format == "csv":
        return to_csv(["exponent", "logpower", "coefficient"], s.terms), 0
    return to_json({"kind": a.kind, "nu": a.nu, "order": a.order,
                    "truncation_order": s.truncation_order, "terms": s.to_rows()}), 0


def _read_curve(path):
    try:
        fh = sys.stdin if path == "-" else open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise UsageError(f"{PROG} renorm: error: argument --input: {exc.strerror}: {path}") from None
    with fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise UsageError(f"{PROG} renorm: error: argument --input: empty file")
    header = [h.strip().lower() for h in rows[0]]
    if header[:2] != ["epsilon", "value"]:
        raise UsageError(f"{PROG} renorm: error: argument --input: header must be 'epsilon,value'")
    try:
        data = np.array([[float(x) for x in r[:2]] for r in rows[1:] if r], dtype=float)
    except ValueError as exc:
        raise UsageError(f"{PROG} renorm: error: argument --input: {exc}") from None
    return data.reshape(-1, 2)


def _cmd_renorm(a):
    data = _read_curve(a.input)
    lo = -math.inf if a.eps_min is None else a.eps_min
    hi = math.inf if a.eps_max is None else a.eps_max
    data = data[(data[:, 0] >= lo) & (data[:, 0] <= hi)]
    data = data[np.argsort(-data[:, 0], kind="stable")]
    if a.eps_count is not None and a.eps_count < len(data):
        idx = np.unique(np.round(np.linspace(0, len(data) - 1, a.eps_count)).astype(int))
        data = data[idx]
    curve = EnergyCurve(data[:, 0], data[:, 1], {"source": a.input})
    fit = renorm_limit_fit(curve, a.model)
    return to_json({"model": a.model.to_dict(), "samples": len(curve), **fit.to_dict()}), 0


def _cmd_pairing(a):
    f = gaussian_profile(a.d, a.width)
    g = f if a.width2 is None else gaussian_profile(a.d, a.width2)
    m = parse_symbol(a.symbol)
    return to_json({"d": a.d, "f": f.label, "g": g.label, "symbol": m.label,
                    "value": pairing(f, g, m)}), 0


def _cmd_energy(a):
    f = gaussian_profile(a.d, a.width)
    grid = eps_grid(a.eps_min, a.eps_max, a.eps_count)
    curve = energy_curve(a.nu, f, f, grid)
    model_doc = None
    if a.model_out is not None or a.format == "json":
        ex = energy_singular_model(a.nu, f, f)
        model_doc = {"nu": a.nu, "profile": f.label, "model": ex.model.to_dict(),
                     "coefficients": ex.coefficients, "finite": ex.finite}
    if a.model_out is not None:
        _write(a.model_out, to_json(model_doc))
    if a.format == "csv":
        return to_csv(["epsilon", "E"], zip(curve.eps, curve.values)), 0
    return to_json({**model_doc, "epsilon": curve.eps, "E": curve.values}), 0


def _cmd_symbol(a):
    if a.method in METHODS:
        vals = [mode_symbol(a.nu, r, a.method) for r in a.r]
    else:
        vals = [paper_symbol(a.nu, r, a.method) for r in a.r]
    if a.format == "csv":
        return to_csv(["r", "symbol"], zip(a.r, vals)), 0
    return to_json({"nu": a.nu, "method": a.method, "r": list(a.r), "symbol": vals}), 0


def _cmd_verify(a):
    cfg = VerifyConfig(nus=a.nu, rs=a.r, methods=a.method, widths=a.width, d=a.d,
                       include_limits=not a.no_limits)
    report = verify_run(cfg)
    text = report.to_csv() if a.format == "csv" else to_json(report.to_dict())
    return text, 0 if report.ok else 1


COMMANDS = {
    "bessel": _cmd_bessel,
    "series": _cmd_series,
    "renorm": _cmd_renorm,
    "pairing": _cmd_pairing,
    "energy": _cmd_energy,
    "symbol": _cmd_symbol,
    "verify": _cmd_verify,
}


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def run(argv=None, stdout=None, stderr=None) -> int:
    """Parse ``argv``, dispatch, and return the exit code."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:  # --help
            return int(exc.code or 0)
        text, code = COMMANDS[args.command](args)
    except UsageError as exc:
        print(str(exc), file=stderr)
        return 2
    except (RenormError, ValueError) as exc:
        print(f"{PROG}: error: {exc}", file=stderr)
        return 2
    if getattr(args, "out", None):
        _write(args.out, text)
    else:
        stdout.write(text)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
