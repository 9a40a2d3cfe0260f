"""Command line front end: ``gen``, ``solve`` and ``bench``.

Exit codes: 0 success, 1 usage or I/O error, 2 a proven approximation bound
was violated, 3 the instance does not meet the solver's preconditions.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import approx, exact, ktree, pctsp
from .core import (
    NEGATIVE,
    POSITIVE,
    REVERSED,
    InstanceError,
    LineInstance,
    MetricInstance,
    PreconditionError,
    TdtspCoefficients,
    TreeInstance,
    gen_diameter3,
    gen_line,
    gen_metric,
    gen_penalties,
    gen_tree,
    line_positions,
    line_to_metric,
    metric_closure,
    tdtsp_cost,
)
from .io import format_instance, parse_instance

ORACLE_MAX_N = 11
EXIT_OK, EXIT_USAGE, EXIT_BOUND, EXIT_PRECONDITION = 0, 1, 2, 3
CSV_HEADER = ["instance_id", "algorithm", "value", "oracle_value", "ratio", "bound", "elapsed_ms", "seed"]


@dataclass
class RunRecord:
    instance_id: str
    algorithm: str
    value: float
    oracle_value: float | None = None
    ratio: float | None = None
    bound: float | None = None
    elapsed_ms: int = 0
    seed: int | None = None
    empirical: bool = False
    route: tuple = ()

    @property
    def violated(self) -> bool:
        return self.ratio is not None and self.bound is not None and self.ratio > self.bound * (1 + 1e-9)

    def bound_label(self) -> str:
        if self.bound is None:
            return ""
        if self.oracle_value is None:
            return "unverified"
        return f"empirical:{self.bound:.9g}" if self.empirical else f"{self.bound:.9g}"

    def row(self) -> list[str]:
        return [self.instance_id, self.algorithm, _fmt(self.value), _fmt(self.oracle_value),
                _fmt(self.ratio), self.bound_label(), str(self.elapsed_ms),
                "" if self.seed is None else str(self.seed)]


def _fmt(x) -> str:
    return "" if x is None else f"{float(x):.9g}"


@dataclass
class Prepared:
    """An instance after conversion to what an algorithm consumes."""

    obj: object
    metric: MetricInstance
    penalties: np.ndarray | None = None


@dataclass
class Algo:
    kind: str  # metric | line | tree | unit-tree | diam3 | pctsp
    run: Callable
    oracle: Callable
    bound: Callable
    empirical: bool = False
    maximize: bool = False
    oracle_cap: int = ORACLE_MAX_N


def _coeffs(args, orientation):
    return TdtspCoefficients(args.a, args.b, orientation)


def _bf(p, args):
    r = exact.brute_force_mlt(p.metric)
    return r.route, r.value


def _bf_value(p, args):
    return exact.brute_force_mlt(p.metric).value


def _pctsp_inst(p):
    if p.penalties is None:
        raise PreconditionError("prize-collecting algorithms need PENALTY lines")
    return pctsp.PctspInstance(p.metric, p.penalties)


def _pctsp_run(solver):
    def run(p, args):
        sol = solver(_pctsp_inst(p))
        return sol.cycle, sol.cost
    return run


def _tdtsp_run(orientation):
    def run(p, args):
        tour, cost = approx.tdtsp_positive_linear(p.metric, _coeffs(args, orientation))
        return tuple(tour), cost
    return run


def _tdtsp_oracle(orientation):
    def oracle(p, args):
        return exact.brute_force_tdtsp(p.metric, _coeffs(args, orientation)).value
    return oracle


def _greedy(p, args):
    tour, _, _ = approx.greedy_negative_linear(p.metric)
    return tuple(tour), tdtsp_cost(p.metric, tour, _coeffs(args, NEGATIVE))


def _line9(p, args):
    walk, value = approx.line_doubling(p.obj)
    return walk.order, value


def _one(n):
    return 1.0


ALGORITHMS = {
    "bf": Algo("metric", _bf, _bf_value, _one),
    "line-dp": Algo("line", lambda p, a: _result(exact.dp_line(p.obj)), _bf_value, _one),
    "diam3-dp": Algo("diam3", lambda p, a: _result(exact.dp_diameter3(p.obj)), _bf_value, _one),
    "dfs": Algo("unit-tree", lambda p, a: _result(exact.dfs_unweighted_tree(p.obj)), _bf_value, _one),
    "itree-8approx": Algo("tree", lambda p, a: ktree.mlt_from_itrees(p.obj), _bf_value, lambda n: 8.0),
    "pctsp-gw": Algo("pctsp", _pctsp_run(pctsp.gw_pctsp),
                     lambda p, a: pctsp.brute_force_pctsp(_pctsp_inst(p)).cost,
                     lambda n: 2.0 - 1.0 / (n - 1) if n > 2 else 1.0,
                     oracle_cap=pctsp.MAX_BRUTE_PCTSP_N),
    "pctsp-bf": Algo("pctsp", _pctsp_run(pctsp.brute_force_pctsp),
                     lambda p, a: pctsp.brute_force_pctsp(_pctsp_inst(p)).cost, _one,
                     oracle_cap=pctsp.MAX_BRUTE_PCTSP_N),
    "mlt-144": Algo("metric", lambda p, a: _approx(approx.mlt_approx_doubling(p.metric)), _bf_value,
                    lambda n: approx.DOUBLING_BOUND),
    "mlt-72": Algo("metric", lambda p, a: _approx(approx.mlt_approx_epsilon(p.metric)), _bf_value,
                   lambda n: approx.EPSILON_BOUND),
    "tdtsp": Algo("metric", _tdtsp_run(POSITIVE), _tdtsp_oracle(POSITIVE), lambda n: approx.DOUBLING_BOUND),
    "tdtsp-rev": Algo("metric", _tdtsp_run(REVERSED), _tdtsp_oracle(REVERSED), lambda n: approx.DOUBLING_BOUND),
    "greedy-neg": Algo("metric", _greedy, _tdtsp_oracle(NEGATIVE), lambda n: 2.0, empirical=True, maximize=True),
    "line-9": Algo("line", _line9, lambda p, a: exact.dp_line(p.obj).value, lambda n: 9.0, empirical=True),
}


def _result(r):
    return r.route, r.value


def _approx(t):
    return t.tour, t.latency


def prepare(obj, penalties: dict | None, algo: Algo) -> Prepared:
    """Convert a parsed instance to the form ``algo`` needs, or raise PreconditionError."""
    kind = algo.kind
    if kind in ("line",):
        if not isinstance(obj, LineInstance):
            raise PreconditionError("this algorithm needs a TYPE line instance")
        return Prepared(obj, line_to_metric(obj))
    if kind in ("tree", "unit-tree", "diam3"):
        if not isinstance(obj, TreeInstance):
            raise PreconditionError("this algorithm needs a TYPE tree instance")
        if kind == "unit-tree" and not obj.unit_flag:
            raise PreconditionError("dfs needs unit edge lengths; DFS is not optimal on weighted trees")
        if kind == "diam3":
            exact.diameter3_hubs(obj)
        return Prepared(obj, metric_closure(obj))
    if isinstance(obj, MetricInstance):
        metric = obj
        vertex = list(range(obj.n))
    elif isinstance(obj, TreeInstance):
        metric = metric_closure(obj)
        vertex = list(range(obj.n))
    else:
        metric = line_to_metric(obj)
        x, s = line_positions(obj)
        offset = len(x) - obj.n
        vertex = [k + offset for k in range(obj.n)]
    if not metric.metric_flag:
        raise PreconditionError("instance violates the triangle inequality")
    pen = None
    if kind == "pctsp" and penalties:
        pen = np.zeros(metric.n)
        for v, p in penalties.items():
            pen[vertex[v]] = p
    return Prepared(obj, metric, pen)


def run_algorithm(name: str, obj, penalties=None, args=None, verify=True,
                  instance_id="-", seed=None) -> RunRecord:
    algo = ALGORITHMS[name]
    args = args or argparse.Namespace(a=1.0, b=0.0)
    p = prepare(obj, penalties, algo)
    t0 = time.perf_counter()
    route, value = algo.run(p, args)
    elapsed = int(round((time.perf_counter() - t0) * 1000))
    rec = RunRecord(instance_id, name, float(value), elapsed_ms=elapsed, seed=seed,
                    empirical=algo.empirical, route=tuple(route))
    n = p.metric.n
    rec.bound = float(algo.bound(n))
    if verify and n <= algo.oracle_cap:
        oracle = float(algo.oracle(p, args))
        rec.oracle_value = oracle
        num, den = (oracle, value) if algo.maximize else (value, oracle)
        if den > 0:
            rec.ratio = num / den
        else:
            rec.ratio = 1.0 if num <= 1e-12 else float("inf")
    return rec


# -- commands ----------------------------------------------------------------------

def generate(kind: str, n: int, seed: int):
    if kind == "metric":
        return gen_metric(n, seed)
    if kind == "tree":
        return gen_tree(n, seed)
    if kind == "unit-tree":
        return gen_tree(n, seed, unit=True)
    if kind == "line":
        return gen_line(n, seed)
    if kind == "diam3":
        if n < 2:
            raise ValueError("diam3 needs n >= 2")
        kL = (n - 2) // 2
        return gen_diameter3(kL, n - 2 - kL, seed)
    raise ValueError(f"unknown kind {kind!r}")


def cmd_gen(args) -> int:
    obj = generate(args.kind, args.n, args.seed)
    pens = gen_penalties(obj.n, args.seed) if args.penalties else None
    text = format_instance(obj, pens)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _write_csv(path, records, summary=()):
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(CSV_HEADER)
    for r in records:
        wr.writerow(r.row())
    for row in summary:
        wr.writerow(row)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())


def _report(rec: RunRecord, out):
    print(f"algorithm: {rec.algorithm}", file=out)
    print("route: " + " ".join(str(v) for v in rec.route), file=out)
    print(f"value: {_fmt(rec.value)}", file=out)
    if rec.oracle_value is not None:
        print(f"oracle: {_fmt(rec.oracle_value)}  ratio: {_fmt(rec.ratio)}  bound: {rec.bound_label()}", file=out)


def _status(rec: RunRecord) -> int:
    if rec.violated:
        if rec.empirical:
            print(f"WARN {rec.instance_id} {rec.algorithm}: ratio {_fmt(rec.ratio)} exceeds "
                  f"empirical bound {_fmt(rec.bound)}", file=sys.stderr)
            return EXIT_OK
        print(f"ERROR {rec.instance_id} {rec.algorithm}: ratio {_fmt(rec.ratio)} exceeds "
              f"proven bound {_fmt(rec.bound)}", file=sys.stderr)
        return EXIT_BOUND
    return EXIT_OK


def cmd_solve(args) -> int:
    obj, penalties = parse_instance(args.input)
    n = obj.n
    if args.verify and n > ORACLE_MAX_N:
        print(f"notice: n={n} > {ORACLE_MAX_N}, oracle verification disabled (bounds unverified)",
              file=sys.stderr)
    rec = run_algorithm(args.algo, obj, penalties, args, verify=args.verify, instance_id=args.input)
    _report(rec, sys.stdout)
    if args.out:
        _write_csv(args.out, [rec])
    return _status(rec)


def bench_records(algos, n, seeds, a=1.0, b=0.0):
    """One verified RunRecord per (seed, algorithm), sorted by seed then algorithm order."""
    args = argparse.Namespace(a=a, b=b)
    records = []
    for seed in range(seeds):
        for name in algos:
            algo = ALGORITHMS[name]
            kind = "metric" if algo.kind == "pctsp" else algo.kind
            obj = generate(kind, n, seed)
            pens = None
            if algo.kind == "pctsp":
                pens = dict(enumerate(gen_penalties(obj.n, seed)))
            records.append(run_algorithm(name, obj, pens, args, instance_id=f"{kind}-n{n}-s{seed}", seed=seed))
    return records


def summary_rows(algos, records):
    """Per algorithm: value column = mean ratio, ratio column = max ratio."""
    rows = []
    for name in algos:
        ratios = [r.ratio for r in records if r.algorithm == name and r.ratio is not None]
        if not ratios:
            continue
        proto = next(r for r in records if r.algorithm == name and r.ratio is not None)
        rows.append(["summary", name, _fmt(np.mean(ratios)), "", _fmt(max(ratios)), proto.bound_label(),
                     str(sum(r.elapsed_ms for r in records if r.algorithm == name)), ""])
    return rows


def cmd_bench(args) -> int:
    algos = [s.strip() for s in args.algos.split(",") if s.strip()]
    for name in algos:
        if name not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {name!r}")
    records = bench_records(algos, args.n, args.seeds, args.a, args.b)
    if args.n > ORACLE_MAX_N:
        print(f"notice: n={args.n} > {ORACLE_MAX_N}, oracle verification disabled", file=sys.stderr)
    _write_csv(args.out, records, summary_rows(algos, records))
    status = EXIT_OK
    for r in records:
        status = max(status, _status(r))
    return status


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="minlat", description="Minimum latency solvers and bound checks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="write a random instance file")
    g.add_argument("--kind", required=True, choices=["metric", "tree", "unit-tree", "line", "diam3"])
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--penalties", action="store_true", help="append random PENALTY lines")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="run one algorithm on an instance file")
    s.add_argument("--in", dest="input", required=True)
    s.add_argument("--algo", required=True, choices=sorted(ALGORITHMS))
    s.add_argument("--verify", action="store_true", help="compare with the exact oracle (small n)")
    s.add_argument("--a", type=float, default=1.0)
    s.add_argument("--b", type=float, default=0.0)
    s.add_argument("--out", help="also write a CSV record")
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("bench", help="seeded batch with oracle ratios, written as CSV")
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--seeds", type=int, required=True)
    b.add_argument("--algos", required=True, help="comma-separated algorithm names")
    b.add_argument("--a", type=float, default=1.0)
    b.add_argument("--b", type=float, default=0.0)
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # argparse usage errors and --help
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (InstanceError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
