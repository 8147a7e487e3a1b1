"""Command-line entry point.

Every subcommand prints (or writes) one JSON report.  Exit status is 0 on
success, 1 when a certificate did not pass, and 2 on configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .enumeration import nat_to_poly
from .kst import LocalLinear, PolySmoother, cube_inner_provider, fit_kst, product_cube_sample
from .lcs import (EuclideanLinear, FunctionalFamilySpec, QuadratureFunctionals, approximate_lcs,
                  cube_grid_sample, sine_curve_sample)
from .neuron import (DEFAULT_GRID, CertificationFailed, DegreeExhausted, ErrorCertificate,
                     TargetFn1D, builtin_targets, neuron_lookup)
from .serialization import dumps, int_to_str
from .superactivation import Mode, Superactivation, sigma_self_check
from .tfnn import (BasicFamily, CompactSample, DecompositionTooLoose, SpanGrid,
                   assemble_network, fit_span, get_activation, product_ridge_demo)

SCHEMA_VERSION = "1"
GOLDEN_ENTRIES = 64


class ConfigError(ValueError):
    """Invalid flags or inputs; exit status 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


# -- argument helpers ---------------------------------------------------------


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0 or not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text}") from None


def _positive_rational(text: str) -> Fraction:
    q = _rational(text)
    if q <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive rational, got {text}")
    return q


def _natural(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a natural number, got {text}")
    return v


def _pos_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _add_sigma_flags(p: argparse.ArgumentParser):
    p.add_argument("--alpha", type=_positive_rational, default=Fraction(1))
    p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.BLEND.value)


def _add_output(p: argparse.ArgumentParser):
    p.add_argument("--output", "-o", help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="uat-topo", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="group", required=True, parser_class=_Parser)

    sigma = sub.add_parser("sigma", help="evaluate or self-check the superactivation")
    ssub = sigma.add_subparsers(dest="action", required=True, parser_class=_Parser)
    ev = ssub.add_parser("eval")
    _add_sigma_flags(ev)
    where = ev.add_mutually_exclusive_group(required=True)
    where.add_argument("--segment", help="m,tau: point alpha*tau + (2m-1)*alpha")
    where.add_argument("--t", type=_rational, help="global argument")
    _add_output(ev)
    ck = ssub.add_parser("check")
    _add_sigma_flags(ck)
    ck.add_argument("--mmax", "--m-max", dest="m_max", type=_pos_int, default=100)
    ck.add_argument("--grid", type=_pos_int, default=101)
    ck.add_argument("--tol", type=_positive, default=1e-9,
                    help="value-continuity tolerance for the certificate")
    _add_output(ck)

    neuron = sub.add_parser("neuron", help="single-neuron lookup")
    nsub = neuron.add_subparsers(dest="action", required=True, parser_class=_Parser)
    nf = nsub.add_parser("fit")
    nsrc = nf.add_mutually_exclusive_group(required=True)
    nsrc.add_argument("--target", choices=sorted(builtin_targets()))
    nsrc.add_argument("--csv", help="two columns x,value with a header row")
    nf.add_argument("--a", type=_rational, default=None, help="default 0, or the CSV's first x")
    nf.add_argument("--b", type=_rational, default=None, help="default 1, or the CSV's last x")
    nf.add_argument("--eps", type=_positive, required=True)
    nf.add_argument("--max-degree", type=_natural, default=1024)
    nf.add_argument("--grid", type=_pos_int, default=DEFAULT_GRID)
    _add_sigma_flags(nf)
    _add_output(nf)

    tfnn = sub.add_parser("tfnn", help="shallow networks over a basic family")
    tsub = tfnn.add_subparsers(dest="action", required=True, parser_class=_Parser)
    tf = tsub.add_parser("fit")
    src = tf.add_mutually_exclusive_group(required=True)
    src.add_argument("--demo", choices=["product"], help="built-in decomposition demo")
    src.add_argument("--csv", help="sample file: id, g, one column per feature")
    tf.add_argument("--eps", type=_positive, required=True)
    tf.add_argument("--points", type=_pos_int, default=21, help="grid points per axis (demo)")
    tf.add_argument("--sigma", choices=["ramp", "tanh", "super"], default="ramp",
                    help="activation for least-squares fits of CSV data")
    tf.add_argument("--weights", type=_pos_int, default=4)
    tf.add_argument("--shifts", type=_pos_int, default=16)
    tf.add_argument("--max-degree", type=_natural, default=1024)
    _add_sigma_flags(tf)
    _add_output(tf)

    lcs = sub.add_parser("lcs", help="linear-functional families")
    lsub = lcs.add_subparsers(dest="action", required=True, parser_class=_Parser)
    lf = lsub.add_parser("fit")
    lf.add_argument("--space", required=True, help="euclidean:D or funcspace:GRID")
    lf.add_argument("--family", type=_pos_int, required=True, help="number of functionals")
    lf.add_argument("--sigma", choices=["ramp", "tanh", "super"], default="ramp")
    lsrc = lf.add_mutually_exclusive_group(required=True)
    lsrc.add_argument("--target")
    lsrc.add_argument("--csv")
    lf.add_argument("--eps", type=_positive, required=True)
    lf.add_argument("--nodes", type=_pos_int, default=128)
    _add_output(lf)

    kst = sub.add_parser("kst", help="Kolmogorov-style networks")
    ksub = kst.add_subparsers(dest="action", required=True, parser_class=_Parser)
    kf = ksub.add_parser("fit")
    kf.add_argument("--dims", required=True, help="comma-separated factor dimensions")
    kf.add_argument("--resolution", type=_pos_int, required=True)
    kf.add_argument("--eps", type=_positive, required=True)
    kf.add_argument("--sweeps", type=_pos_int, default=20)
    ksrc = kf.add_mutually_exclusive_group(required=True)
    ksrc.add_argument("--target")
    ksrc.add_argument("--csv")
    kf.add_argument("--smoother", default="local-linear", help="local-linear or poly:K")
    kf.add_argument("--points", type=_pos_int, default=None, help="grid points per axis")
    kf.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.BLEND.value)
    _add_output(kf)

    golden = sub.add_parser("golden", help="regenerate golden files")
    gsub = golden.add_subparsers(dest="action", required=True, parser_class=_Parser)
    gd = gsub.add_parser("dump")
    gd.add_argument("--dir", default="docs/golden")
    _add_output(gd)
    return ap


# -- subcommands --------------------------------------------------------------


def _sigma(args) -> Superactivation:
    return Superactivation(args.alpha, Mode(args.mode))


def _cert_payload(cert: ErrorCertificate | None):
    return None if cert is None else cert.to_json()


def cmd_sigma_eval(args):
    sigma = _sigma(args)
    if args.segment is not None:
        try:
            m_text, tau_text = args.segment.split(",")
            m, tau = int(m_text), Fraction(tau_text)
        except ValueError:
            raise ConfigError("--segment expects m,tau") from None
        if m < 1 or not 0 <= tau <= 1:
            raise ConfigError("--segment needs m >= 1 and 0 <= tau <= 1")
        value = sigma.segment(m, tau)
        t = sigma.alpha * tau + (2 * m - 1) * sigma.alpha
        results = {"m": m, "tau": tau, "t": t, "polynomial": nat_to_poly(m).to_json()}
    else:
        t = args.t
        value = sigma.at(t)
        results = {"t": t, "location": sigma.locate(t)[0]}
    results["value"] = value if isinstance(value, Fraction) else float(value)
    if isinstance(value, Fraction):
        results["value_float"] = float(value)
    return results, None


def cmd_sigma_check(args):
    sigma = _sigma(args)
    rep = sigma_self_check(sigma, args.m_max, args.grid)
    worst = max(rep["max_deviation"], rep["max_value_gap"])
    cert = ErrorCertificate(args.grid, worst, args.tol)
    return rep, cert


def _read_xy(path: str) -> tuple[np.ndarray, np.ndarray]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    if len(rows) < 3 or [h.strip() for h in rows[0]] != ["x", "value"]:
        raise ConfigError(f"{path}: need header x,value and at least two rows")
    try:
        data = np.array([[float(v) for v in row] for row in rows[1:]])
    except ValueError:
        raise ConfigError(f"{path}: non-numeric value") from None
    if data.shape[1] != 2 or np.any(np.diff(data[:, 0]) <= 0):
        raise ConfigError(f"{path}: x must be strictly increasing")
    return data[:, 0], data[:, 1]


def cmd_neuron_fit(args):
    if args.csv:
        xs, ys = _read_xy(args.csv)
        a = args.a if args.a is not None else Fraction(xs[0])
        b = args.b if args.b is not None else Fraction(xs[-1])
        if a < Fraction(xs[0]) or b > Fraction(xs[-1]):
            raise ConfigError("[a, b] must lie inside the tabulated range")
        func, label = (lambda t: np.interp(t, xs, ys)), Path(args.csv).name
    else:
        a = args.a if args.a is not None else Fraction(0)
        b = args.b if args.b is not None else Fraction(1)
        func, label = builtin_targets()[args.target], args.target
    if not a < b:
        raise ConfigError("need a < b")
    target = TargetFn1D(func, a, b, label)
    params, cert = neuron_lookup(target, args.eps, _sigma(args), max_degree=args.max_degree,
                                 grid_size=args.grid)
    results = {
        "m": params.m,
        "m_bits": params.m.bit_length(),
        "degree": nat_to_poly(params.m).degree,
        "w": params.w,
        "theta": params.theta,
        "alpha": params.alpha,
        "a": params.a,
        "b": params.b,
        "mode": params.mode.value,
    }
    return results, cert


def _read_csv(path: str) -> tuple[list[str], list[str], list[list[float]]]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    if len(rows) < 2:
        raise ConfigError(f"{path}: need a header and at least one row")
    header = [h.strip() for h in rows[0]]
    if header[:2] != ["id", "g"]:
        raise ConfigError(f"{path}: header must start with id,g")
    ids, values = [], []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ConfigError(f"{path}:{i}: expected {len(header)} fields")
        try:
            values.append([float(v) for v in row[1:]])
        except ValueError:
            raise ConfigError(f"{path}:{i}: non-numeric value") from None
        ids.append(row[0])
    return header, ids, values


def cmd_tfnn_fit(args):
    if args.demo:
        sample, family, dec = product_ridge_demo(args.points)
        sigma = _sigma(args)
        try:
            net, cert = assemble_network(sample, family, dec, args.eps, sigma,
                                           max_degree=args.max_degree)
        except DecompositionTooLoose as exc:
            raise ConfigError(str(exc)) from None
        results = {"sample": sample.metadata, "network": net.to_json()}
        return results, cert
    header, ids, values = _read_csv(args.csv)
    if len(header) < 3:
        raise ConfigError("CSV needs at least one feature column")
    table = np.array(values)
    sample = CompactSample(ids, table[:, 0], f"csv {Path(args.csv).name}")
    family = BasicFamily.from_table(ids, {name: table[:, j + 1] for j, name in enumerate(header[2:])})
    sigma = get_activation(args.sigma, args.mode, args.alpha)
    grid = SpanGrid.log_spaced(args.weights, shifts=args.shifts)
    net, residual = fit_span(sample, family, sigma, grid)
    cert = ErrorCertificate(len(sample), residual, args.eps)
    return {"sample": sample.metadata, "residual": residual, "network": net.to_json()}, cert


LCS_EUCLIDEAN_TARGETS: dict[str, Callable[[np.ndarray], float]] = {
    "max": lambda x: float(np.max(x)),
    "sum": lambda x: float(np.sum(x)),
    "norm": lambda x: float(np.linalg.norm(x)),
    "prod": lambda x: float(np.prod(x)),
}


def _parse_space(text: str):
    kind, _, num = text.partition(":")
    try:
        n = int(num)
    except ValueError:
        raise ConfigError(f"--space expects euclidean:D or funcspace:GRID, got {text}") from None
    if kind == "euclidean" and n >= 1:
        return EuclideanLinear(n)
    if kind == "funcspace" and n >= 2:
        return QuadratureFunctionals(n)
    raise ConfigError(f"--space expects euclidean:D (D >= 1) or funcspace:GRID (GRID >= 2), got {text}")


def cmd_lcs_fit(args):
    kind = _parse_space(args.space)
    spec = FunctionalFamilySpec(kind, args.family)
    if args.csv:
        header, ids, values = _read_csv(args.csv)
        table = np.array(values)
        width = kind.d if isinstance(kind, EuclideanLinear) else kind.grid
        if table.shape[1] - 1 != width:
            raise ConfigError(f"CSV has {table.shape[1] - 1} value columns, space needs {width}")
        sample = CompactSample(list(table[:, 1:]), table[:, 0], f"csv {Path(args.csv).name}")
    elif isinstance(kind, EuclideanLinear):
        if args.target not in LCS_EUCLIDEAN_TARGETS:
            raise ConfigError(f"unknown euclidean target {args.target!r}; "
                              f"choose from {sorted(LCS_EUCLIDEAN_TARGETS)}")
        sample = cube_grid_sample(kind.d, LCS_EUCLIDEAN_TARGETS[args.target])
    else:
        if args.target != "intsq":
            raise ConfigError("the function-space target is intsq: (integral of x)^2")
        sample = sine_curve_sample(grid=kind.grid)
    sigma = get_activation(args.sigma)
    net, residual = approximate_lcs(sample, spec, sigma, args.eps, nodes=args.nodes)
    cert = ErrorCertificate(len(sample), residual, args.eps)
    return {"sample": sample.metadata, "residual": residual, "nodes": len(net.terms),
            "network": net.to_json()}, cert


KST_TARGETS: dict[str, Callable[[np.ndarray], float]] = {
    "mean": lambda x: float(np.mean(x)),
    "prod": lambda x: float(np.prod(x)),
    "sinsum": lambda x: float(np.sin(np.pi * np.sum(x) / len(x))),
    "const": lambda x: 0.5,
}


def _parse_dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(d) for d in text.split(","))
    except ValueError:
        raise ConfigError(f"--dims expects comma-separated integers, got {text}") from None
    if not dims or min(dims) < 1:
        raise ConfigError("--dims entries must be >= 1")
    return dims


def cmd_kst_fit(args):
    dims = _parse_dims(args.dims)
    provider = cube_inner_provider(dims, args.resolution)
    M = sum(dims)
    if args.csv:
        header, ids, values = _read_csv(args.csv)
        table = np.array(values)
        if table.shape[1] - 1 != M:
            raise ConfigError(f"CSV has {table.shape[1] - 1} coordinates, dims need {M}")
        bounds = np.cumsum((0,) + dims)
        pts = [tuple(row[1:][bounds[p]:bounds[p + 1]] for p in range(len(dims))) for row in table]
        sample = CompactSample(pts, table[:, 0], f"csv {Path(args.csv).name}")
    else:
        if args.target not in KST_TARGETS:
            raise ConfigError(f"unknown target {args.target!r}; choose from {sorted(KST_TARGETS)}")
        f = KST_TARGETS[args.target]
        sample = product_cube_sample(dims, lambda x: f(np.concatenate(x)), args.points)
    if args.smoother == "local-linear":
        smoother = LocalLinear(3 * provider.cell_width)
    elif args.smoother.startswith("poly:"):
        try:
            smoother = PolySmoother(int(args.smoother[5:]), 0.0, float(len(dims)))
        except ValueError:
            raise ConfigError(f"bad smoother {args.smoother!r}") from None
    else:
        raise ConfigError("--smoother is local-linear or poly:K")
    net, cert = fit_kst(sample, provider, Superactivation(mode=Mode(args.mode)), args.eps,
                        sweeps=args.sweeps, smoother=smoother)
    terms = [{
        "q": q,
        "w": t.w,
        "theta": t.theta,
        "theta_digits": len(int_to_str(abs(t.theta.numerator))),
        "m_bits": t.m.bit_length(),
    } for q, t in enumerate(net.terms)]
    results = {"sample": sample.metadata, "provider": provider.label, "M": M,
               "term_count": len(net.terms), "alpha": net.sigma.alpha, "terms": terms}
    return results, cert


def golden_files() -> dict[str, str]:
    """Deterministic contents of the golden files, keyed by file name."""
    entries = [{"index": n, "coefficients": nat_to_poly(n).to_json()} for n in range(GOLDEN_ENTRIES)]
    checks = {}
    for mode in Mode:
        rep = sigma_self_check(Superactivation(Fraction(1), mode), 20, 21)
        checks[mode.value] = {k: rep[k] for k in ("max_deviation", "max_value_gap",
                                                  "max_flatness_ratio") if k in rep}
        checks[mode.value]["junctions"] = rep["junctions"]
    return {
        "enumeration.json": dumps({"entries": entries}),
        "sigma_selfcheck.json": dumps({"alpha": "1/1", "m_max": 20, "grid": 21, "modes": checks}),
    }


def cmd_golden_dump(args):
    out = Path(args.dir)
    out.mkdir(parents=True, exist_ok=True)
    written = {}
    for name, text in golden_files().items():
        (out / name).write_text(text, encoding="utf-8")
        written[name] = len(text.encode("utf-8"))
    return {"dir": str(out), "files": written, "entries": GOLDEN_ENTRIES}, None


COMMANDS = {
    ("sigma", "eval"): cmd_sigma_eval,
    ("sigma", "check"): cmd_sigma_check,
    ("neuron", "fit"): cmd_neuron_fit,
    ("tfnn", "fit"): cmd_tfnn_fit,
    ("lcs", "fit"): cmd_lcs_fit,
    ("kst", "fit"): cmd_kst_fit,
    ("golden", "dump"): cmd_golden_dump,
}


def _echo(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("output",)}


def run(argv: Sequence[str] | None = None) -> tuple[int, dict | None]:
    """Parse, dispatch and build the report; returns ``(exit status, report)``."""
    try:
        args = build_parser().parse_args(argv)
    except ConfigError as exc:
        return 2, {"error": str(exc)}
    start = time.perf_counter()
    cert = None
    status = 0
    try:
        results, cert = COMMANDS[(args.group, args.action)](args)
    except ConfigError as exc:
        return 2, {"error": str(exc)}
    except (DegreeExhausted, CertificationFailed) as exc:
        results, status = {"error": str(exc), "failure": type(exc).__name__}, 1
    if cert is not None and not cert.passed:
        status = 1
    report = {
        "schema_version": SCHEMA_VERSION,
        "subcommand": f"{args.group}-{args.action}",
        "inputs_echo": _echo(args),
        "results": results,
        "certificate": _cert_payload(cert),
        "timing_ms": int(round(1000 * (time.perf_counter() - start))),
    }
    report["_output"] = args.output
    return status, report


def main(argv: Sequence[str] | None = None) -> int:
    status, report = run(argv)
    if report is not None and "schema_version" not in report:
        print(f"error: {report['error']}", file=sys.stderr)
        return status
    output = report.pop("_output")
    text = dumps(report)
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if status == 1:
        msg = report["results"].get("error") if isinstance(report["results"], dict) else None
        print(f"certificate not passed{': ' + msg if msg else ''}", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
