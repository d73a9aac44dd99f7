"""Command-line interface.

Belief objects are read and written as JSON, series and tables as CSV.
Exit status is 0 on success, 1 when the input is rejected by the domain
layer (the error class name goes to stderr) and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import io as cio
from .cbba import CBBA, commitments, validate
from .entropies import METHODS, fcb_decompose, measure
from .errors import CETError, InvalidCBBA
from .frame import Frame
from .transforms import combine, cpbt, cpbt_iterate, exp_negation, fcbba, joint, negate_iter
from .pipelines.classify import (AGGREGATIONS, accuracy_sweep, fit, predict, split_indices,
                                 train_subset)
from .pipelines.data import ingest_csv
from .pipelines.fusion import FusionConfig, fuse_until_decision

DEFAULT_PRECISION = 6


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- formatting

class Formatter:
    """Rounds scalars for display; ``digits=None`` keeps full precision."""

    def __init__(self, digits: int | None):
        self.digits = digits

    def num(self, x: float | None) -> float | None:
        if x is None or self.digits is None or not math.isfinite(x):
            return x
        return float(f"{x:.{self.digits}g}")

    def text(self, x: float | None) -> str:
        if x is None:
            return ""
        if self.digits is None:
            return repr(float(x))
        return f"{x:.{self.digits}g}"

    def tree(self, obj: Any) -> Any:
        if isinstance(obj, float):
            return self.num(obj)
        if isinstance(obj, dict):
            return {k: self.tree(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [self.tree(v) for v in obj]
        return obj


def _precision(raw: str) -> int | None:
    if raw == "full":
        return None
    try:
        value = int(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer or 'full', got {raw!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("precision must be at least 1")
    return value


def _positive_int(raw: str) -> int:
    try:
        value = int(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {raw!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return value


def _positive_float(raw: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {raw!r}") from None
    if not value > 0 or not math.isfinite(value):
        raise argparse.ArgumentTypeError("must be a positive finite number")
    return value


def _method(raw: str) -> str:
    if raw not in METHODS:
        raise argparse.ArgumentTypeError(f"unknown method {raw!r}; choose from {', '.join(sorted(METHODS))}")
    return raw


def _methods(raw: str) -> list[str]:
    return [_method(m.strip()) for m in raw.split(",") if m.strip()]


def parse_ratios(raw: str) -> list[float]:
    """``start:stop:step`` (inclusive) or a comma list."""
    try:
        if ":" in raw:
            start, stop, step = (float(x) for x in raw.split(":"))
            count = int(round((stop - start) / step)) + 1
            values = [round(start + i * step, 12) for i in range(count)]
        else:
            values = [float(x) for x in raw.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse ratios {raw!r}") from None
    if not values or any(not 0 < v < 1 for v in values):
        raise argparse.ArgumentTypeError("ratios must lie strictly between 0 and 1")
    return values


def _set_name(frame: Frame, bits: int) -> str:
    return "+".join(frame.labels_of(bits))


def _write(args, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _csv(rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _read(path: str) -> CBBA:
    if not Path(path).is_file():
        raise UsageError(f"input file not found: {path}")
    return cio.read_cbba(path)


# ---------------------------------------------------------------- commands

def cmd_validate(args, fmt: Formatter) -> None:
    if not Path(args.input).is_file():
        raise UsageError(f"input file not found: {args.input}")
    c = cio.read_cbba(args.input, check="none")
    report = validate(c)
    _write(args, json.dumps({"valid": report.ok, "violation": report.violation,
                             "residual": fmt.num(report.residual)}, indent=2))
    if not report.ok:
        raise InvalidCBBA(f"{report.violation} (residual {report.residual:.3g})", report)


def cmd_entropy(args, fmt: Formatter) -> None:
    c = _read(args.input)
    value = float(measure(args.method)(c))
    _write(args, json.dumps({"method": args.method, "bits": fmt.num(value)}))


def cmd_entropy_sweep(args, fmt: Formatter) -> None:
    if args.family == "split":
        rows = [["x", "y", "total", "discord", "nonspecificity"]]
        for x, y, parts in split_family_grid(args.points):
            rows.append([fmt.text(x), fmt.text(y), fmt.text(parts.total), fmt.text(parts.discord),
                         fmt.text(parts.nonspecificity)])
        _write(args, _csv(rows))
        return
    if args.input is None:
        raise UsageError("--family negation needs an input CBBA file")
    c = _read(args.input)
    rows = [["iteration", "method", "bits"]]
    for t, state in enumerate(negate_iter(c, args.iterations, not args.exclude_empty)):
        for method in args.methods:
            try:
                value = float(measure(method)(state))
            except CETError:
                value = None   # measure not defined for this CBBA, e.g. a real-only entropy
            rows.append([t, method, fmt.text(value)])
    _write(args, _csv(rows))


def split_family(x: float, y: float) -> CBBA | None:
    """Two-element CBBA with ``x + iy`` on the whole frame and the rest on the first element.

    Returns None where either modulus exceeds 1.
    """
    frame = Frame(("e1", "e2"))
    theta = complex(x, y)
    single = 1 - theta
    if abs(theta) > 1 or abs(single) > 1:
        return None
    return CBBA(frame, {1: single, 3: theta}, check="full")


def split_family_grid(points: int = 21):
    """Yield ``(x, y, decomposition)`` over the feasible part of a square grid."""
    ys_max = math.sqrt(3) / 2
    for x in np.linspace(0.0, 1.0, points):
        for y in np.linspace(-ys_max, ys_max, points):
            c = split_family(float(x), float(y))
            if c is None:
                continue
            yield float(x), float(y), fcb_decompose(c)


def cmd_cpbt(args, fmt: Formatter) -> None:
    c = _read(args.input)
    probs = cpbt(c)
    total = math.fsum(abs(z) for z in probs.values())
    doc = {label: {"re": fmt.num(z.real), "im": fmt.num(z.imag),
                   "com": fmt.num(abs(z) / total if total else 0.0)}
           for label, z in probs.items()}
    _write(args, json.dumps(doc, indent=2))


def cmd_cpbt_iterate(args, fmt: Formatter) -> None:
    c = _read(args.input)
    states = cpbt_iterate(c, args.p, args.steps)
    frame = c.frame
    keys = sorted(set(c.masses) | {1 << i for i in range(frame.n)})
    header = ["step"]
    for k in keys:
        name = _set_name(frame, k)
        header += [f"re:{name}", f"im:{name}", f"com:{name}"]
    rows = [header]
    for t, state in enumerate(states[1:], start=1):
        com = commitments(state)
        row: list[Any] = [t]
        for k in keys:
            z = state.masses.get(k, 0j)
            row += [fmt.text(z.real), fmt.text(z.imag), fmt.text(com.get(k, 0.0))]
        rows.append(row)
    _write(args, _csv(rows))


def cmd_fcbba(args, fmt: Formatter) -> None:
    _write(args, cio.dumps(cio.fcbba_to_doc(fcbba(_read(args.input)))))


def cmd_negate(args, fmt: Formatter) -> None:
    c = _read(args.input)
    for _ in range(args.iterations):
        c = exp_negation(c, include_empty=not args.exclude_empty)
    _write(args, cio.dumps(cio.cbba_to_doc(c, {"negations": args.iterations})))


def cmd_combine(args, fmt: Formatter) -> None:
    if len(args.inputs) < 2:
        raise UsageError("combine needs at least two input files")
    cbbas = [_read(p) for p in args.inputs]
    fused, conflicts = cbbas[0], []
    for other in cbbas[1:]:
        fused, k = combine(fused, other)
        conflicts.append({"re": k.real, "im": k.imag})
    _write(args, cio.dumps(cio.cbba_to_doc(fused, {"conflict": conflicts})))


def cmd_joint(args, fmt: Formatter) -> None:
    _write(args, cio.dumps(cio.cbba_to_doc(joint(_read(args.first), _read(args.second)))))


def _dataset(path: str, label: str):
    if not Path(path).is_file():
        raise UsageError(f"data file not found: {path}")
    return ingest_csv(path, label)


def cmd_classify(args, fmt: Formatter) -> None:
    d = _dataset(args.data, args.label)
    if args.test:
        t = _dataset(args.test, args.label)
        if t.attributes != d.attributes:
            raise UsageError("--test columns differ from the training file")
        model = fit(d, None, args.method, args.aggregation)
        pred = predict(model, t.features)
        truth = [t.classes[y] for y in t.labels]
        rows_idx = range(len(t))
    else:
        test, pool = split_indices(len(d), args.seed)
        model = fit(d, train_subset(pool, args.ratio), args.method, args.aggregation)
        pred = predict(model, d.features[test])
        truth = [d.classes[y] for y in d.labels[test]]
        rows_idx = test.tolist()
    rows = [["row", "actual", "predicted"]]
    hits = 0
    for i, actual, p in zip(rows_idx, truth, pred):
        name = d.classes[p] if p >= 0 else ""
        hits += name == actual
        rows.append([i, actual, name])
    _write(args, _csv(rows))
    print(f"accuracy {fmt.text(hits / len(truth))} on {len(truth)} samples", file=sys.stderr)


def cmd_sweep(args, fmt: Formatter) -> None:
    d = _dataset(args.data, args.label)
    table = accuracy_sweep(d, args.ratios, args.methods, seed=args.seed, aggregation=args.aggregation)
    rows = [["ratio", "method", "accuracy", "n_train", "n_test"]]
    for r in table:
        rows.append([fmt.text(r.ratio), r.method, fmt.text(r.accuracy), r.n_train, r.n_test])
    _write(args, _csv(rows))


def cmd_fuse(args, fmt: Formatter) -> None:
    if len(args.inputs) < 2:
        raise UsageError("fuse needs at least two evidence files")
    evidence = [_read(p) for p in args.inputs]
    names = [Path(p).stem for p in args.inputs]
    trace = fuse_until_decision(evidence, FusionConfig(args.sigma, args.epsilon), names)
    _write(args, json.dumps(fmt.tree(trace.to_doc()), indent=2))


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", help="write here instead of stdout")
    common.add_argument("--precision", type=_precision, default=DEFAULT_PRECISION,
                        help="significant digits for scalar output, or 'full' (default 6)")

    parser = argparse.ArgumentParser(prog="cetk", description="Complex evidence toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name: str, func, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        p.set_defaults(func=func)
        return p

    p = add("validate", cmd_validate, "check a CBBA document against the invariants")
    p.add_argument("input")

    p = add("entropy", cmd_entropy, "entropy of a CBBA in bits")
    p.add_argument("input")
    p.add_argument("--method", type=_method, default="fcb")

    p = add("entropy-sweep", cmd_entropy_sweep, "entropy series as CSV")
    p.add_argument("input", nargs="?")
    p.add_argument("--family", choices=("split", "negation"), default="split",
                   help="split: decomposition over the (x, y) two-element grid; "
                        "negation: measures along repeated exponential negation of INPUT")
    p.add_argument("--points", type=_positive_int, default=21, help="grid points per axis")
    p.add_argument("--iterations", type=_positive_int, default=10)
    p.add_argument("--methods", type=_methods, default=["fcb"])
    p.add_argument("--exclude-empty", action="store_true")

    p = add("cpbt", cmd_cpbt, "complex pignistic transform")
    p.add_argument("input")

    p = add("cpbt-iterate", cmd_cpbt_iterate, "step-by-step pignistic redistribution as CSV")
    p.add_argument("input")
    p.add_argument("--p", type=_positive_float, required=True, help="allocation speed")
    p.add_argument("--steps", type=_positive_int, required=True)

    p = add("fcbba", cmd_fcbba, "fractal redistribution")
    p.add_argument("input")

    p = add("negate", cmd_negate, "iterated exponential negation")
    p.add_argument("input")
    p.add_argument("--iterations", type=_positive_int, default=1)
    p.add_argument("--exclude-empty", action="store_true", help="leave the empty set out of the sum")

    p = add("combine", cmd_combine, "combine two or more CBBAs left to right")
    p.add_argument("inputs", nargs="+")

    p = add("joint", cmd_joint, "joint CBBA on the product of two frames")
    p.add_argument("first")
    p.add_argument("second")

    for name, func, help_text in (("classify", cmd_classify, "classify samples from a CSV dataset"),
                                  ("sweep", cmd_sweep, "accuracy against training ratio")):
        p = add(name, func, help_text)
        p.add_argument("data")
        p.add_argument("--label", required=True, help="name of the class column")
        p.add_argument("--seed", type=_positive_int, default=0)
        p.add_argument("--aggregation", choices=AGGREGATIONS, default="sum")
    classify_p = sub.choices["classify"]
    classify_p.add_argument("--method", type=_method, default="fcb")
    classify_p.add_argument("--ratio", type=lambda s: parse_ratios(s)[0], default=0.5,
                            help="training share of the non-test pool")
    classify_p.add_argument("--test", help="separate test CSV; training then uses all of DATA")
    sweep_p = sub.choices["sweep"]
    sweep_p.add_argument("--ratios", type=parse_ratios, default=parse_ratios("0.01:0.99:0.01"),
                         help="start:stop:step or a comma list (default 0.01:0.99:0.01)")
    sweep_p.add_argument("--methods", type=_methods, default=["fcb", "complex-deng"])

    p = add("fuse", cmd_fuse, "sequential fusion until a decision is reached")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--sigma", type=_positive_float, default=0.5, help="belief threshold")
    p.add_argument("--epsilon", type=_positive_float, default=2.0, help="entropy threshold in bits")
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    fmt = Formatter(args.precision)
    try:
        args.func(args, fmt)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"cetk {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except CETError as exc:
        print(f"{exc.name}: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())
