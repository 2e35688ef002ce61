"""Command-line front end: ``decflow sssp``, ``decflow flow`` and ``decflow verify``.

Exit codes: 0 ok, 1 invariant violation, 2 usage or parse error.  The
default seed comes from DECFLOW_SEED; ``--seed`` overrides it.
"""

import math
import random
import sys

import click

from decflow.covering import layered_sssp
from decflow.estree import ESTree
from decflow.formats import fmt, read_graph, read_updates
from decflow.graph import GraphError, InvariantError
from decflow.oracles import OracleScaleError, oracle_dijkstra, oracle_mbcf

INF = math.inf


class Report:
    """Collects report lines and writes them to stdout and optionally a file."""

    def __init__(self, path=None):
        self.lines = []
        self.path = path

    def add(self, line):
        self.lines.append(line)

    def emit(self):
        text = "\n".join(self.lines) + "\n"
        click.echo(text, nl=False)
        if self.path:
            with open(self.path, "w") as fh:
                fh.write(text)


class Trace:
    def __init__(self, path=None):
        self.fh = open(path, "w") if path else None

    def __call__(self, line):
        if self.fh:
            self.fh.write(line + "\n")

    def close(self):
        if self.fh:
            self.fh.close()


def _fail(code, msg):
    click.echo(f"error: {msg}", err=True)
    sys.exit(code)


def _load_graph(path):
    try:
        return read_graph(path)
    except OSError as exc:
        _fail(2, f"cannot read {path}: {exc.strerror}")
    except GraphError as exc:
        _fail(2, str(exc))


def _parse_seeds(text):
    try:
        if ":" in text:
            a, b = text.split(":", 1)
            return range(int(a), int(b))
        return range(int(text))
    except ValueError:
        raise click.BadParameter(f"expected N or A:B, got {text!r}") from None


seed_option = click.option("--seed", type=int, envvar="DECFLOW_SEED", default=0, show_default=True,
                           help="PRNG seed (default from DECFLOW_SEED).")


@click.group()
@click.version_option(package_name="decflow")
def main():
    """Decremental shortest paths and bounded-cost flow."""


@main.command()
@click.argument("graph_file", type=click.Path(dir_okay=False))
@click.argument("updates_file", type=click.Path(dir_okay=False))
@click.option("--source", "-s", type=int, multiple=True, required=True, help="Source vertex (repeatable).")
@click.option("--eps", type=float, default=0.1, show_default=True)
@click.option("--levels", type=int, default=2, show_default=True)
@click.option("--backend", type=click.Choice(["layered", "es"]), default="layered", show_default=True)
@click.option("--verify", is_flag=True, help="Check every step against Dijkstra.")
@seed_option
@click.option("--trace", "trace_path", type=click.Path(dir_okay=False), help="Write a per-update trace.")
@click.option("--report", "report_path", type=click.Path(dir_okay=False), help="Also write the report here.")
def sssp(graph_file, updates_file, source, eps, levels, backend, verify, seed, trace_path, report_path):
    """Maintain distances from SOURCE under the updates in UPDATES_FILE."""
    g = _load_graph(graph_file)
    try:
        ops = read_updates(updates_file)
    except OSError as exc:
        _fail(2, f"cannot read {updates_file}: {exc.strerror}")
    except GraphError as exc:
        _fail(2, str(exc))
    for v in source:
        if v not in g.adj:
            _fail(2, f"source {v} is not a vertex")
    if not 0 < eps < 1:
        _fail(2, "eps must lie in (0, 1)")
    trace = Trace(trace_path)
    report = Report(report_path)
    try:
        if backend == "es":
            struct = ESTree(g.adj, source)
            est = struct.dist
            bound = 0.0
        else:
            struct = layered_sssp(g, source, eps, levels=levels, rng=random.Random(seed))
            est = struct.estimate
            bound = struct.eps_final
        worst = 1.0
        violations = 0

        def check(step):
            nonlocal worst, violations
            dist = oracle_dijkstra(g, source)
            for v in sorted(g.adj):
                d, e = dist.get(v, INF), est(v)
                if d == INF:
                    ok = e == INF
                else:
                    ok = d - 1e-9 <= e <= (1 + bound) * d + 1e-9
                    if d > 0:
                        worst = max(worst, e / d)
                if not ok:
                    violations += 1
                    trace(f"violation step={step} v={v} dist={fmt(d)} est={fmt(e)}")

        if verify:
            check(0)
        for step, op in enumerate(ops, 1):
            try:
                g.apply(op)
            except GraphError as exc:
                _fail(2, f"update {step}: {exc}")
            if op[0] == "d":
                struct.delete(op[1], op[2])
            else:
                struct.increase(op[1], op[2], op[3])
            trace(f"update {step} {' '.join(map(str, op[:3]))}")
            if verify:
                check(step)
    except InvariantError as exc:
        trace.close()
        _fail(1, f"invariant violated: {exc}")
    trace.close()
    report.add(f"sssp backend={backend} levels={levels if backend == 'layered' else 1} "
               f"eps={fmt(eps)} eps_final={fmt(bound)} seed={seed}")
    report.add(f"sources {' '.join(map(str, sorted(source)))}")
    report.add(f"updates {len(ops)}")
    for v in sorted(g.adj):
        report.add(f"d {v} {fmt(est(v))}")
    if verify:
        report.add(f"max-stretch {fmt(worst)}")
        report.add(f"violations {violations}")
    report.emit()
    if violations:
        sys.exit(1)


@main.command()
@click.argument("graph_file", type=click.Path(dir_okay=False))
@click.option("--s", "s", type=int, required=True, help="Source vertex.")
@click.option("--t", "t", type=int, required=True, help="Sink vertex.")
@click.option("--eps", type=float, default=0.05, show_default=True)
@click.option("--budget", type=float, default=None, help="Cost budget; omit for min-cost flow.")
@click.option("--mode", type=click.Choice(["practical", "theory"]), default="practical", show_default=True)
@seed_option
@click.option("--oracle", is_flag=True, help="Report the gap to the exact optimum.")
@click.option("--dump", "dump_path", type=click.Path(dir_okay=False), help="Write 'f u v value' lines ('-' for stdout).")
@click.option("--trace", "trace_path", type=click.Path(dir_okay=False), help="Write a solver trace.")
@click.option("--report", "report_path", type=click.Path(dir_okay=False), help="Also write the report here.")
def flow(graph_file, s, t, eps, budget, mode, seed, oracle, dump_path, trace_path, report_path):
    """Bounded-cost (with --budget) or min-cost s-t flow."""
    from decflow.pipeline import FlowParams, check_flow, mbcf, min_cost_flow
    g = _load_graph(graph_file)
    for v in (s, t):
        if v not in g.adj:
            _fail(2, f"vertex {v} is not in the graph")
    if s == t:
        _fail(2, "s and t must differ")
    if not 0 < eps < 1:
        _fail(2, "eps must lie in (0, 1)")
    if budget is not None and budget < 0:
        _fail(2, "budget must be nonnegative")
    trace = Trace(trace_path)
    report = Report(report_path)
    try:
        params = FlowParams(mode=mode, log=trace)
        rng = random.Random(seed)
        if budget is None:
            res = min_cost_flow(g, s, t, eps, rng, params)
        else:
            res = mbcf(g, s, t, eps, budget, rng, params)
    except InvariantError as exc:
        trace.close()
        _fail(1, f"invariant violated: {exc}")
    except GraphError as exc:
        trace.close()
        _fail(2, str(exc))
    trace.close()
    bad = check_flow(g, res.flow, s, t, res.budget)
    inn = {}
    for (a, b), x in res.flow.items():
        inn[b] = inn.get(b, 0.0) + x
    cap_ok = all(inn.get(v, 0.0) <= g.vertex_cap[v] * (1 + 1e-9) + 1e-9
                 for v in g.adj if v not in (s, t))
    cons_ok = not any(b.startswith("conservation") for b in bad)
    budget_ok = not any(b.startswith("budget") for b in bad)
    report.add(f"flow mode={mode} eps={fmt(eps)} seed={seed} "
               f"search={'min-cost' if budget is None else 'bounded'}")
    report.add(f"value {fmt(res.value)}")
    report.add(f"cost {fmt(res.cost)}")
    report.add(f"budget {fmt(res.budget)}")
    report.add(f"feasible conservation={str(cons_ok).lower()} capacity={str(cap_ok).lower()} "
               f"budget={str(budget_ok).lower()}")
    report.add(f"mwu-calls {res.mwu_calls}")
    for note in res.notes:
        report.add(f"note {note}")
    if oracle:
        try:
            opt = float(oracle_mbcf(g, s, t, res.budget)[0])
            gap = 1 - res.value / opt if opt > 0 else 0.0
            report.add(f"oracle {fmt(opt)} gap {fmt(gap)}")
        except OracleScaleError as exc:
            report.add(f"oracle unavailable: {exc}")
    report.emit()
    if dump_path:
        lines = [f"f {a} {b} {fmt(x)}" for (a, b), x in sorted(res.flow.items())]
        text = "\n".join(lines) + ("\n" if lines else "")
        if dump_path == "-":
            click.echo(text, nl=False)
        else:
            with open(dump_path, "w") as fh:
                fh.write(text)
    if bad:
        sys.exit(1)


@main.command()
@click.argument("suite_name")
@click.option("--seeds", default=None, help="Seed count N or range A:B (default: the full suite).")
def verify(suite_name, seeds):
    """Run an acceptance suite (or 'all'); exit 0 iff every run passes."""
    from decflow.suites import SUITES, run_suite
    names = list(SUITES) if suite_name == "all" else [suite_name]
    for name in names:
        if name not in SUITES:
            _fail(2, f"unknown suite {name!r}; choose from: all, {', '.join(SUITES)}")
    seed_range = _parse_seeds(seeds) if seeds is not None else None
    ok = True
    for name in names:
        res = run_suite(name, seed_range)
        click.echo(res.summary())
        for line in res.lines:
            click.echo(f"  {line}")
        ok = ok and res.passed
    sys.exit(0 if ok else 1)


if __name__ == "__main__":
    main()
