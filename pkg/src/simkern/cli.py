"""Command line entry point: ``simkern {gram,audit,counterexample,graph,weighted-lb}``.

Exit codes: 0 when every check passes, 1 when a mathematical check fails
(the witness is in the output), 2 for usage or input errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path


from . import __version__
from .counterexample import DEFAULT_SCALE, run_counterexample
from .formats import load_kernel_spec, load_metric_spec, read_points_csv
from .functions import PiecewiseFunction, Weight, check_exponent, load_functions, counterexample_functions
from .graphs import bfs_distances, graph_negative_type_report, read_edge_csv
from .kernels import KernelSpec, MetricSpec, gram
from .linalg import DEFAULT_TOL, is_psd, write_matrix_csv
from .quadrature import QuadratureError
from .validators import (
    AXIOM_TOL,
    Sample,
    check_cnd,
    check_metric,
    check_normalized,
    check_pd,
    check_similarity_normalized,
    sample_functions,
    sample_points,
)

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(text: str, args) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _tol(args, default: float) -> float:
    return default if args.tol is None else args.tol


def _warn(msg: str) -> None:
    print(f"warning: {msg}", file=sys.stderr)


def parse_weight(text: str) -> Weight:
    """``gaussian[:center:width]``, ``indicator:lo:hi``, a JSON object, or a JSON file."""
    text = text.strip()
    if text.startswith("{"):
        return Weight.from_dict(json.loads(text))
    if text.endswith(".json"):
        return Weight.from_dict(json.loads(Path(text).read_text()))
    kind, *rest = text.split(":")
    nums = [float(x) for x in rest]
    if kind == "gaussian" and len(nums) in (0, 2):
        return Weight.gaussian(*nums)
    if kind == "indicator" and len(nums) == 2:
        return Weight.indicator(*nums)
    raise UsageError(f"cannot parse weight {text!r}")


# --- spec assembly ---------------------------------------------------------

def _base_metric(args) -> MetricSpec:
    if args.metric == "weighted_lb":
        weight = parse_weight(args.weight)
        return MetricSpec("weighted_lb", {"b": args.b, "weight": weight.to_dict()})
    return MetricSpec(args.metric)


def _inline_metric(args) -> MetricSpec | None:
    if args.metric is None:
        return None
    base = _base_metric(args)
    tr = getattr(args, "transform", "none")
    if tr == "none":
        return base
    params = {"a": args.a} if tr == "power" else {}
    return MetricSpec(tr, params, (base,))


def _inline_kernel(args) -> KernelSpec | None:
    k = args.kernel
    if k is None:
        return None
    if k == "fbm":
        return KernelSpec("fbm", {"a": args.a, "halved": args.halved})
    if k in ("exp", "cauchy"):
        metric = _inline_metric(args) or MetricSpec("euclidean")
        return KernelSpec(f"{k}_of_metric", {"t": args.t}, (metric,))
    if k == "normalized_euclidean":
        return KernelSpec("normalized_euclidean_similarity")
    if k == "sphere":
        return KernelSpec("sphere_similarity", {"a": args.a})
    raise UsageError(f"unknown kernel {k!r}")


def _resolve(inline, spec_path, loader, what, default=None):
    from_file = loader(spec_path) if spec_path else None
    if inline is None and from_file is None and default is not None:
        return default
    if inline is not None and from_file is not None:
        if inline != from_file:
            _warn(f"inline {what} options override the spec file {spec_path}")
        return inline
    if inline is None and from_file is None:
        raise UsageError(f"no {what} given; use inline options or --spec")
    return inline if inline is not None else from_file


# --- commands --------------------------------------------------------------

def cmd_gram(args) -> int:
    points = read_points_csv(args.points, complex_pairs=args.complex)
    kernel = _resolve(_inline_kernel(args), args.spec, load_kernel_spec, "kernel")
    g = gram(points, kernel)
    tol = DEFAULT_TOL if args.tol is None else args.tol
    verdict = is_psd(g, tol)
    csv_text = write_matrix_csv(g)
    if args.out:
        Path(args.out).write_text(csv_text)
    elif not args.json:
        sys.stdout.write(csv_text)
    if args.json:
        out = {"kernel": kernel.to_dict(), "n": g.n, "seed": args.seed, "tol": tol,
               "min_eigenvalue": verdict.min_eigenvalue, "psd": verdict.passed}
        if not args.out:
            out["gram"] = g.tolist()
        print(json.dumps(out, indent=2))
    else:
        print(f"min eigenvalue: {verdict.min_eigenvalue:.17g}")
        print(f"PSD: {'true' if verdict.passed else 'false'}")
    if args.require_psd and not verdict.passed:
        return EXIT_CHECK_FAILED
    return EXIT_OK


def _audit_sample(args) -> Sample:
    if args.builtin == "x1-x5":
        return Sample(tuple(counterexample_functions()), args.seed, "step functions x1..x5")
    if args.random:
        return sample_points(args.random, args.dim, args.seed, complex_values=args.complex)
    if args.input is None:
        raise UsageError("give an input file, --builtin or --random")
    if str(args.input).endswith(".json"):
        return Sample(tuple(load_functions(args.input)), args.seed, f"functions from {args.input}")
    pts = read_points_csv(args.input, complex_pairs=args.complex)
    return Sample(tuple(pts), args.seed, f"points from {args.input}")


def cmd_audit(args) -> int:
    sample = _audit_sample(args)
    # function samples have an obvious metric; points do not
    default = MetricSpec("sup") if isinstance(sample[0], PiecewiseFunction) else None
    metric = _resolve(_inline_metric(args), args.spec, load_metric_spec, "metric", default)
    selected = [name for name in ("metric_axioms", "normalized", "similarity", "cnd")
                if getattr(args, name)]
    if not selected:
        selected = ["metric_axioms", "normalized", "similarity"]
    reports = []
    for name in selected:
        if name == "metric_axioms":
            reports.append(check_metric(sample, metric, _tol(args, AXIOM_TOL)))
        elif name == "normalized":
            reports.append(check_normalized(sample, metric, _tol(args, AXIOM_TOL)))
        elif name == "similarity":
            sim = KernelSpec("complement", {}, (metric,))
            reports.append(check_similarity_normalized(sample, sim, _tol(args, AXIOM_TOL)))
        else:
            reports.append(check_cnd(sample, metric, _tol(args, DEFAULT_TOL)))
    ok = all(r.passed for r in reports)
    if args.json:
        text = json.dumps({"seed": args.seed, "passed": ok,
                           "reports": [r.to_dict() for r in reports]}, indent=2)
    else:
        text = "\n\n".join(r.to_text() for r in reports)
    _emit(text, args)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def cmd_counterexample(args) -> int:
    report = run_counterexample(args.t, _tol(args, DEFAULT_TOL), literal_x5=args.literal_x5)
    if args.json:
        text = json.dumps({"seed": args.seed, **report.to_dict()}, indent=2)
    else:
        text = report.to_text()
    _emit(text, args)
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_graph(args) -> int:
    g = read_edge_csv(args.edges)
    tol = _tol(args, DEFAULT_TOL)
    if args.negative_type:
        rep = graph_negative_type_report(g, tol)
        ok = rep.passed
        if args.json:
            text = json.dumps({"seed": args.seed, "tol": tol, **rep.to_dict()}, indent=2)
        else:
            lines = [",".join(g.labels), write_matrix_csv(rep.distances).rstrip("\n"),
                     f"eigenvalues: {', '.join(f'{x:.12g}' for x in rep.eigenvalues)}",
                     f"positive eigenvalues: {rep.positive_count}",
                     f"one positive eigenvalue (necessary): "
                     f"{'pass' if rep.necessary_passed else 'fail'}",
                     f"conditionally negative definite: {'pass' if rep.cnd_passed else 'fail'}"]
            if rep.witness is not None:
                lines.append("witness: " + ", ".join(f"{x:.12g}" for x in rep.witness)
                             + f"  (c^T D c = {rep.witness_form:.12g})")
            text = "\n".join(lines)
        _emit(text, args)
        return EXIT_OK if ok else EXIT_CHECK_FAILED
    m = bfs_distances(g)
    if args.json:
        text = json.dumps({"seed": args.seed, "tol": tol, "order": list(g.labels),
                           "distances": m.tolist()}, indent=2)
    else:
        text = ",".join(g.labels) + "\n" + write_matrix_csv(m)
    _emit(text, args)
    return EXIT_OK


def cmd_weighted_lb(args) -> int:
    b = check_exponent(args.b)
    weight = parse_weight(args.weight)
    if args.random:
        sample = sample_functions(args.random, args.seed, "linear", complex_values=args.complex)
    elif args.functions:
        sample = Sample(tuple(load_functions(args.functions)), args.seed,
                        f"functions from {args.functions}")
    else:
        raise UsageError("give a functions file or --random N")
    tol = DEFAULT_TOL if args.tol is None else args.tol
    metric = MetricSpec("weighted_lb", {"b": b, "weight": weight.to_dict()})
    similarity = KernelSpec("exp_of_metric", {"t": 1.0}, (metric,))
    metric_rep = check_metric(sample, metric, tol)
    pd_rep = check_pd(sample, similarity, tol * len(sample))
    ok = metric_rep.passed and pd_rep.passed
    if args.json:
        text = json.dumps({"b": b, "weight": weight.to_dict(), "seed": args.seed, "tol": tol,
                           "passed": ok, "reports": [metric_rep.to_dict(), pd_rep.to_dict()]},
                          indent=2)
    else:
        text = metric_rep.to_text() + "\n\n" + pd_rep.to_text()
    _emit(text, args)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


# --- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="PRNG seed (recorded in reports)")
    common.add_argument("--tol", type=float, default=None, help="override the check tolerance")
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--out", help="write the main output to this file")
    common.add_argument("--complex", action="store_true",
                        help="read CSV columns as (re, im) pairs")

    p = argparse.ArgumentParser(prog="simkern", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def kernel_opts(sp):
        sp.add_argument("--kernel", choices=["fbm", "exp", "cauchy", "normalized_euclidean",
                                             "sphere"])
        sp.add_argument("--a", type=float, default=0.5)
        sp.add_argument("--t", type=float, default=1.0)
        sp.add_argument("--halved", action="store_true")

    def metric_opts(sp, default=None):
        sp.add_argument("--metric", default=default,
                        choices=["euclidean", "squared_euclidean", "normalized_euclidean",
                                 "sup", "weighted_lb"])
        sp.add_argument("--b", type=float, default=1.0, help="exponent for weighted_lb")
        sp.add_argument("--weight", default="gaussian", help="weight for weighted_lb")

    sp = sub.add_parser("gram", parents=[common], help="Gram matrix of a kernel on points")
    sp.add_argument("points")
    kernel_opts(sp)
    metric_opts(sp)
    sp.add_argument("--spec", help="kernel spec JSON file")
    sp.add_argument("--require-psd", action="store_true")
    sp.set_defaults(func=cmd_gram)

    sp = sub.add_parser("audit", parents=[common], help="check metric/similarity axioms")
    sp.add_argument("input", nargs="?", help="points CSV or functions JSON")
    sp.add_argument("--builtin", choices=["x1-x5"])
    sp.add_argument("--random", type=int, default=0, help="audit N seeded random points")
    sp.add_argument("--dim", type=int, default=2)
    metric_opts(sp)
    sp.add_argument("--transform", default="none",
                    choices=["none", "exp_complement", "bounded", "power"])
    sp.add_argument("--a", type=float, default=0.5, help="exponent for the power transform")
    sp.add_argument("--spec", help="metric spec JSON file")
    sp.add_argument("--metric-axioms", action="store_true")
    sp.add_argument("--normalized", action="store_true")
    sp.add_argument("--similarity", action="store_true")
    sp.add_argument("--cnd", action="store_true")
    sp.set_defaults(func=cmd_audit)

    sp = sub.add_parser("counterexample", parents=[common],
                        help="rebuild the sup-metric counterexample")
    sp.add_argument("--t", type=float, default=DEFAULT_SCALE,
                    help="scale applied to x1..x5 before taking exp(-d)")
    sp.add_argument("--literal-x5", action="store_true",
                    help="use x5 = -1 on [2,3] instead of [0,1]")
    sp.set_defaults(func=cmd_counterexample)

    sp = sub.add_parser("graph", parents=[common], help="hop-distance matrix of a graph")
    sp.add_argument("edges")
    sp.add_argument("--negative-type", action="store_true")
    sp.set_defaults(func=cmd_graph)

    sp = sub.add_parser("weighted-lb", parents=[common],
                        help="weighted L^b metric and its exp similarity on functions")
    sp.add_argument("functions", nargs="?")
    sp.add_argument("--random", type=int, default=0, help="use N seeded random ramp functions")
    sp.add_argument("--b", type=float, default=1.0)
    sp.add_argument("--weight", default="gaussian")
    sp.set_defaults(func=cmd_weighted_lb)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError, TypeError, KeyError, OSError, QuadratureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
