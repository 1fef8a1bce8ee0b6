"""Command line front-end ``toeplitz-chains``.

Every command reads a model document (path or ``-`` for stdin) and writes a
report envelope ``{command, schema, model_digest, payload, warnings}`` as JSON,
or the payload table as CSV.  Floats carry 17 significant digits.

Exit status: 0 success, 2 invalid input or usage, 3 numerical instability
under ``--strict``, 1 for a failed ``verify`` check or any other numerical
failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import re
import sys
from pathlib import Path

from . import __version__
from .errors import NumericalError, ToeplitzChainsError, ValidationError
from .model import ModelSpec, classify_genericity, parse_model
from .parallel import ordered_map

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_STRICT = 0, 1, 2, 3
VERIFY_REL_TOL = 1e-8
VERIFY_ABS_TOL = 1e-10

log = logging.getLogger("toeplitz_chains")


class StrictWarning(NumericalError):
    code = "strict_warning"


# ---------------------------------------------------------------------------
# formatting

def _fmt(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x + 0.0, ".17g")  # folds -0.0 into 0


def dump_json(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with floats at 17 significant digits and complex as ``[re, im]``."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fmt(obj)
    if isinstance(obj, complex):
        return dump_json([obj.real, obj.imag], indent, _level)
    if isinstance(obj, str):
        return json.dumps(obj)
    if hasattr(obj, "item") and not hasattr(obj, "__len__"):  # numpy scalar
        return dump_json(obj.item(), indent, _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dump_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dump_json(v) for v in obj) + "]"
        items = [pad + dump_json(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _cell(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, float):
        return _fmt(v).strip('"')
    if isinstance(v, complex):
        return f"{_fmt(v.real)}{'+' if v.imag >= 0 else '-'}{_fmt(abs(v.imag))}j"
    if hasattr(v, "item"):
        return _cell(v.item())
    return "" if v is None else str(v)


def dump_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# argument parsing

def parse_range(text: str) -> list[int]:
    """``"a..b"`` (inclusive) or a single integer."""
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise ValueError
            return list(range(lo, hi + 1))
        return [int(text)]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or a range a..b, got {text!r}") from None


def _complex_arg(text: str) -> complex:
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(f"usage: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("model", help="model JSON file, or - for stdin")
    common.add_argument("--out", type=Path, help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--strict", action="store_true",
                        help="fail (exit 3) instead of perturbing or warning")
    common.add_argument("--perturb", type=float, default=None, metavar="EPS",
                        help="relative split for coincident zeros (default 1e-6)")

    p = _Parser(prog="toeplitz-chains", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("analyze", parents=[common], help="winding, genericity, lengths, bond bounds")
    s = sub.add_parser("string-corr", parents=[common], help="string correlators over an N grid")
    s.add_argument("--alpha", type=parse_range, required=True)
    s.add_argument("--N", type=parse_range, default=parse_range("1..20"))
    s.add_argument("--csv", type=Path, help="shorthand for --format csv --out PATH")
    c = sub.add_parser("corr-matrix", parents=[common], help="entanglement spectra and entropies")
    c.add_argument("--N", type=parse_range, default=parse_range("1..12"))
    c.add_argument("--lambda", dest="lam", type=_complex_arg, default=None,
                   help="also report the characteristic polynomial at this lambda")
    e = sub.add_parser("efp", parents=[common], help="emptiness formation probability")
    e.add_argument("--N", type=parse_range, default=parse_range("1..20"))
    sub.add_parser("transfer", parents=[common], help="transfer-matrix spectrum")
    a = sub.add_parser("approximate", parents=[common], help="approximation sequence for a generic model")
    a.add_argument("--m", type=parse_range, default=parse_range("1..10"))
    v = sub.add_parser("verify", parents=[common], help="closed forms against numeric determinants")
    v.add_argument("--alpha", type=parse_range, default=None)
    v.add_argument("--N", type=parse_range, default=parse_range("1..20"))
    return p


_RANGE_FLAGS = ("--N", "--alpha", "--m", "--lambda")
_NEGATIVE_VALUE = re.compile(r"^-\d")


def _attach_negative_values(argv: list[str]) -> list[str]:
    """Rewrite ``--alpha -3..5`` as ``--alpha=-3..5`` so argparse does not read a flag."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in _RANGE_FLAGS and i + 1 < len(argv) and _NEGATIVE_VALUE.match(argv[i + 1]):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def _read_model(source: str) -> ModelSpec:
    if source == "-":
        return parse_model(sys.stdin.read())
    path = Path(source)
    if not path.exists() or path.is_dir():
        raise ValidationError(f"model file {source!r} not found")
    return parse_model(path.read_text())


# ---------------------------------------------------------------------------
# commands; each returns (payload, csv header, csv rows, warnings)

def _corr_options(args):
    from .string_correlators import DEFAULT_PERTURBATION

    return {"strict": args.strict,
            "perturbation": DEFAULT_PERTURBATION if args.perturb is None else args.perturb}


def cmd_analyze(m: ModelSpec, args):
    from .string_correlators import correlation_lengths, correlator_window, order_parameter
    from .transfer_spectrum import bond_dimension_bounds

    warnings = []
    gen = classify_genericity(m)
    payload = {"class": m.cls, "omega": m.winding, "n_z": m.n_z, "n_Z": m.n_Z, "n_P": m.n_P,
               "multiplicity": m.multiplicity,
               "genericity": {"generic": gen.generic, "strongly_generic": gen.strongly_generic,
                              "mutually_inverse_pairs": [list(p) for p in gen.mutually_inverse_pairs]}}
    rows = []
    if m.multiplicity == 2:
        lengths = correlation_lengths(m)
        payload["window"] = list(correlator_window(m))
        payload["correlation_lengths"] = {str(a): xi for a, xi in sorted(lengths.lengths.items())}
        payload["order_parameter"] = order_parameter(m)
        rows = [(a, xi) for a, xi in sorted(lengths.lengths.items())]
    else:
        warnings.append("multiplicity-1 model: closed forms need doubled zeros; see 'approximate'")
    bounds = bond_dimension_bounds(m)
    payload["bond_dimension"] = bounds.to_json()
    if not bounds.lower_verified:
        warnings.append("model is not strongly generic; the lower bond-dimension bound is unverified")
    return payload, ["alpha", "xi"], rows, warnings


def cmd_string_corr(m: ModelSpec, args):
    from .string_correlators import asymptotic_terms, evaluate_correlator, n_alpha

    opts = _corr_options(args)
    grid = [(a, n) for a in args.alpha for n in args.N]
    values = ordered_map(lambda an: evaluate_correlator(m, an[0], an[1], **opts), grid)
    dominant = {}
    for a in args.alpha:
        try:
            g = asymptotic_terms(m, a, 1)
            dominant[a] = g[0].modulus if g else 0.0
        except ToeplitzChainsError:
            dominant[a] = None
    warnings = sorted({w for v in values for w in v.warnings})
    rows, series = [], []
    for (a, n), v in zip(grid, values):
        r = dominant[a]
        rows.append((a, n, v.value, r, v.method))
        series.append({"alpha": a, "N": n, "value": v.value, "method": v.method,
                       "closed_form": n >= n_alpha(m, a)})
    payload = {"dominant_rM": {str(a): r for a, r in dominant.items()}, "values": series}
    return payload, ["alpha", "N", "value", "dominant_rM", "method"], rows, warnings


def cmd_corr_matrix(m: ModelSpec, args):
    from .correlation_matrix import char_poly, correlation_spectrum

    reports = ordered_map(lambda n: correlation_spectrum(m, n), args.N)
    width = max(r.N for r in reports)
    payload = {"spectra": [r.to_json() for r in reports]}
    if args.lam is not None:
        payload["lambda"] = args.lam
        payload["char_poly"] = [{"N": n, "value": char_poly(m, n, args.lam)} for n in args.N]
    header = ["N", *[f"nu_{i + 1}" for i in range(width)], "d", "S_vonNeumann", "S_2"]
    rows = [r.csv_row(width) for r in reports]
    return payload, header, rows, []


def cmd_efp(m: ModelSpec, args):
    from .string_correlators import emptiness_formation

    vals = ordered_map(lambda n: emptiness_formation(m, n), args.N)
    payload = {"values": [{"N": n, "P": p} for n, p in zip(args.N, vals)]}
    return payload, ["N", "P"], list(zip(args.N, vals)), []


def cmd_transfer(m: ModelSpec, args):
    from .transfer_spectrum import effective_hamiltonian, transfer_eigenvalues

    rep = transfer_eigenvalues(m)
    payload = rep.to_json()
    payload["eps_levels"] = list(rep.eps_levels)
    payload["effective_hamiltonian"] = effective_hamiltonian(m).to_json()
    warnings = []
    if rep.chi_lower != rep.chi_upper:
        warnings.append("bond-dimension bounds differ; the upper bound is only conjectured optimal")
    rows = [(k, mu.real, mu.imag) for k, mu in rep.spectrum]
    return payload, ["subset_mask", "mu_re", "mu_im"], rows, warnings


def cmd_approximate(m: ModelSpec, args):
    from .approximation import order_parameter_convergence, partial_sum_roots

    if m.multiplicity != 1:
        raise ValidationError("approximate expects a generic (multiplicity 1) target model")
    rows = order_parameter_convergence(m, args.m)
    payload = {"target_order_parameter": rows[0].target if rows else None,
               "rows": [{"m": r.m, "value": r.value, "error": r.error, "log_error": r.log_error,
                         "max_abs_lambda": partial_sum_roots(r.m).max_abs} for r in rows]}
    return payload, ["m", "error", "log_error"], [(r.m, r.error, r.log_error) for r in rows], []


def cmd_verify(m: ModelSpec, args):
    from .string_correlators import correlator_window, evaluate_correlator, n_alpha, numeric_string_correlator

    lo, hi = correlator_window(m)
    alphas = args.alpha if args.alpha is not None else list(range(lo - 2, hi + 3))
    opts = _corr_options(args)

    def check(an):
        a, n = an
        if n < n_alpha(m, a):
            return None
        closed = evaluate_correlator(m, a, n, **opts).value
        oracle = numeric_string_correlator(m, a, n)
        err = abs(closed - oracle)
        scale = abs(oracle)
        ok = err <= VERIFY_ABS_TOL or err <= VERIFY_REL_TOL * scale
        return ok, closed, oracle, err

    grid = [(a, n) for a in alphas for n in args.N]
    results = ordered_map(check, grid)
    matrix = {str(a): {} for a in alphas}
    rows = []
    for (a, n), res in zip(grid, results):
        if res is None:
            matrix[str(a)][str(n)] = "n/a"
            continue
        ok, closed, oracle, err = res
        matrix[str(a)][str(n)] = "pass" if ok else "fail"
        rows.append((a, n, closed, oracle, err, "pass" if ok else "fail"))
    passed = all(r[-1] == "pass" for r in rows)
    payload = {"passed": passed, "rel_tol": VERIFY_REL_TOL, "abs_tol": VERIFY_ABS_TOL, "matrix": matrix}
    return payload, ["alpha", "N", "closed_form", "oracle", "abs_error", "status"], rows, []


COMMANDS = {
    "analyze": cmd_analyze,
    "string-corr": cmd_string_corr,
    "corr-matrix": cmd_corr_matrix,
    "efp": cmd_efp,
    "transfer": cmd_transfer,
    "approximate": cmd_approximate,
    "verify": cmd_verify,
}


# ---------------------------------------------------------------------------
# entry point

def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        out.write_text(text if text.endswith("\n") else text + "\n")


def run(argv=None) -> int:
    """Run one command; returns the exit status."""
    try:
        argv = list(sys.argv[1:] if argv is None else argv)
        args = build_parser().parse_args(_attach_negative_values(argv))
        if getattr(args, "csv", None) is not None:
            args.format, args.out = "csv", args.csv
        if args.perturb is not None and not args.perturb > 0:
            raise ValidationError("--perturb must be positive")
        m = _read_model(args.model)
        payload, header, rows, warnings = COMMANDS[args.command](m, args)
        if args.strict and warnings:
            raise StrictWarning("; ".join(warnings))
        if args.format == "csv":
            text = dump_csv(header, rows)
        else:
            text = dump_json({"command": args.command, "schema": SCHEMA_VERSION,
                              "model_digest": m.digest(), "payload": payload,
                              "warnings": list(warnings)})
        _emit(text, args.out)
        for w in warnings:
            print(f"warning: {w}", file=sys.stderr)
        if args.command == "verify" and not payload["passed"]:
            return EXIT_FAILED
        return EXIT_OK
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"error ({exc.code}): {exc}", file=sys.stderr)
        return EXIT_STRICT if "--strict" in argv else EXIT_FAILED


def main() -> None:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    sys.exit(run())


if __name__ == "__main__":
    main()
