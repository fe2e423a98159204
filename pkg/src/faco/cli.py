"""Command-line front end: single solves and multi-run benchmarks.

Both subcommands emit JSON documents with a stable field order so
downstream scripts can regenerate result tables without scraping logs.
All timing values live under the "timing" key; everything else is
reproducible from the recorded seed and parameters.
"""

from __future__ import annotations

import json
import pathlib
import sys

import click

from .errors import FacoError
from .route import write_tour
from .solver import FacoParams, RunResult, default_ant_count, resolve_threads, run
from .tsplib import load_instance, read_best_known


def _params_dict(params: FacoParams, ants: int) -> dict:
    return {
        "ants": ants,
        "iterations": params.iterations,
        "rho": params.rho,
        "beta": params.beta,
        "cl_size": params.cl_size,
        "bl_size": params.bl_size,
        "min_new_edges": params.min_new_edges,
        "p_best": params.p_best,
        "p_dec": params.p_dec,
        "gb_source_prob": params.gb_source_prob,
        "seed": params.seed,
        "threads": params.threads,
        "time_limit": params.time_limit,
    }


def run_record(inst, params: FacoParams, result: RunResult, with_trace: bool) -> dict:
    s = result.stats
    ants = params.ants if params.ants is not None else default_ant_count(inst.n)
    rec = {
        "instance": inst.name,
        "n": inst.n,
        "params": _params_dict(params, ants),
        "seed": params.seed,
        "best_cost": s.best_cost,
        "initial_cost": s.initial_cost,
        "best_known": s.best_known,
        "error_percent": s.error_percent,
        "iterations_run": s.iterations_run,
        "truncated": s.truncated,
        "last_improvement_iter": s.last_improvement_iter,
        "timing": {
            "wall_s": s.wall_time,
            "construct_ls_s": s.construct_ls_time,
            "evaporate_s": s.evaporate_time,
            "deposit_s": s.deposit_time,
        },
    }
    if with_trace:
        rec["trace"] = s.trace
    return rec


def _emit(doc: dict, output: str | None) -> None:
    text = json.dumps(doc, indent=2) + "\n"
    if output:
        pathlib.Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _param_options(f):
    opts = [
        click.option("--ants", "-m", type=int, default=None,
                     help="Ants per iteration (default: 4*sqrt(n) rounded up to 64s)."),
        click.option("--iterations", type=int, default=5000, show_default=True),
        click.option("--rho", type=float, default=0.5, show_default=True,
                     help="Pheromone retention factor."),
        click.option("--beta", type=float, default=1.0, show_default=True,
                     help="Heuristic information exponent."),
        click.option("--cl-size", type=int, default=16, show_default=True),
        click.option("--bl-size", type=int, default=64, show_default=True),
        click.option("--min-new-edges", type=int, default=8, show_default=True),
        click.option("--p-best", type=float, default=None,
                     help="Whole-tour best-reconstruction probability for the "
                          "trail-limit formula (overrides --p-dec)."),
        click.option("--p-dec", type=float, default=0.75, show_default=True,
                     help="Per-step probability of picking a maximum-trail edge."),
        click.option("--gb-source-prob", type=float, default=0.01, show_default=True),
        click.option("--seed", type=int, default=1, show_default=True),
        click.option("--threads", type=int, default=None,
                     help="Worker count (default: $FACO_THREADS, then CPU count)."),
        click.option("--time-limit", type=float, default=None,
                     help="Wall-clock cap per run in seconds."),
    ]
    for opt in reversed(opts):
        f = opt(f)
    return f


def _make_params(kw) -> FacoParams:
    return FacoParams(
        ants=kw["ants"],
        iterations=kw["iterations"],
        rho=kw["rho"],
        beta=kw["beta"],
        cl_size=kw["cl_size"],
        bl_size=kw["bl_size"],
        min_new_edges=kw["min_new_edges"],
        p_best=kw["p_best"],
        p_dec=kw["p_dec"],
        gb_source_prob=kw["gb_source_prob"],
        seed=kw["seed"],
        threads=resolve_threads(kw["threads"]),
        time_limit=kw["time_limit"],
    )


@click.group()
def main():
    """Focused ant colony optimization for the symmetric Euclidean TSP."""


@main.command()
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
@_param_options
@click.option("--best-known", type=int, default=None,
              help="Best known cost, for relative-error reporting.")
@click.option("--best-known-file", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Sidecar table of 'instance-name cost' lines.")
@click.option("--tour-out", type=click.Path(dir_okay=False), default=None,
              help="Write the best tour in TSPLIB .tour format.")
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None,
              help="Write the run record here instead of stdout.")
@click.option("--trace/--no-trace", default=False,
              help="Include the per-iteration best-cost trace.")
def solve(instance, best_known, best_known_file, tour_out, output, trace, **kw):
    """Solve one instance and emit a run record."""
    try:
        inst = load_instance(instance)
        if best_known_file and best_known is None:
            table = read_best_known(pathlib.Path(best_known_file).read_text())
            best_known = table.get(inst.name)
        if best_known is not None:
            inst.best_known = int(best_known)
        params = _make_params(kw)
        result = run(inst, params)
    except (FacoError, OSError) as exc:
        raise click.ClickException(str(exc)) from exc
    _emit(run_record(inst, params, result, trace), output)
    if tour_out:
        pathlib.Path(tour_out).write_text(
            write_tour(inst.name, result.route, length=result.stats.best_cost)
        )


def _parse_sweep(text: str | None, cast):
    if not text:
        return None
    return [cast(tok) for tok in text.split(",") if tok.strip()]


@main.command()
@click.argument("instance_list", type=click.Path(exists=True, dir_okay=False))
@_param_options
@click.option("--runs", type=int, default=10, show_default=True,
              help="Seeded runs per instance and configuration.")
@click.option("--sweep-min-new-edges", type=str, default=None,
              help="Comma-separated min_new_edges values to sweep.")
@click.option("--sweep-rho", type=str, default=None,
              help="Comma-separated rho values to sweep.")
@click.option("--sweep-ants", type=str, default=None,
              help="Comma-separated ant counts to sweep.")
@click.option("--best-known-file", type=click.Path(exists=True, dir_okay=False),
              default=None)
@click.option("--output", "-o", type=click.Path(dir_okay=False), default=None)
@click.option("--trace/--no-trace", default=False)
def bench(instance_list, runs, sweep_min_new_edges, sweep_rho, sweep_ants,
          best_known_file, output, trace, **kw):
    """Run R seeded solves per instance and configuration; emit a table."""
    base = _make_params(kw)
    best_known = {}
    if best_known_file:
        best_known = read_best_known(pathlib.Path(best_known_file).read_text())

    paths = []
    for raw in pathlib.Path(instance_list).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            paths.append(line)

    axes = []
    mne_values = _parse_sweep(sweep_min_new_edges, int)
    rho_values = _parse_sweep(sweep_rho, float)
    ant_values = _parse_sweep(sweep_ants, int)
    if mne_values:
        axes.append(("min_new_edges", sorted(mne_values)))
    if rho_values:
        axes.append(("rho", sorted(rho_values)))
    if ant_values:
        axes.append(("ants", sorted(ant_values)))

    configs: list[dict] = [{}]
    for name, values in axes:
        configs = [dict(c, **{name: v}) for c in configs for v in values]

    rows = []
    failures = []
    for path in paths:
        try:
            inst = load_instance(path)
        except (FacoError, OSError) as exc:
            failures.append({"instance": path, "error": str(exc)})
            continue
        if inst.name in best_known:
            inst.best_known = best_known[inst.name]
        for config in configs:
            records = []
            try:
                for r in range(runs):
                    params = FacoParams(**{**base.__dict__, **config,
                                           "seed": base.seed + r})
                    result = run(inst, params)
                    records.append(run_record(inst, params, result, trace))
            except FacoError as exc:
                failures.append({
                    "instance": inst.name,
                    "config": config,
                    "error": str(exc),
                })
                continue
            costs = [rec["best_cost"] for rec in records]
            errors = [rec["error_percent"] for rec in records]
            times = [rec["timing"]["wall_s"] for rec in records]
            rows.append({
                "instance": inst.name,
                "n": inst.n,
                "config": config,
                "runs": runs,
                "mean_cost": sum(costs) / len(costs),
                "best_cost": min(costs),
                "worst_cost": max(costs),
                "mean_error_percent": (
                    sum(errors) / len(errors) if all(e is not None for e in errors)
                    else None
                ),
                "mean_wall_s": sum(times) / len(times),
                "records": records,
            })

    _emit({
        "runs_per_config": runs,
        "base_params": _params_dict(base, base.ants if base.ants is not None else -1),
        "rows": rows,
        "failures": failures,
    }, output)
    if failures:
        raise SystemExit(1)


if __name__ == "__main__":
    main()
