"""Command-line front end: run scenarios, sweep seeds, compare against PSO,
and render SVG figures from run artifacts.

Exit codes: 0 success, 2 usage error, 3 scenario error, 4 I/O or artifact
error, 5 solver fault.
"""
from __future__ import annotations

import argparse
import dataclasses
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .artifacts import (
    SweepReport,
    read_run_result,
    read_trace_csv,
    run_result_doc,
    write_compare_csv,
    write_json,
    write_sweep_csv,
    write_trace_csv,
)
from .baseline import PsoParams, pso_solve
from .errors import ArtifactError, ScenarioError, ScenarioLookupError, SolverFault
from .kinematics import ChainModel, joint_positions
from .objective import ObjectiveSpec
from .optimizer import SolverParams, solve, solve_many
from .scenarios import Scenario, builtin, builtin_ids, load_scenario
from .svgplot import convergence_svg, posture_svg

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SCENARIO = 3
EXIT_IO = 4
EXIT_FAULT = 5

_SOLVER_FIELDS = (
    "a", "A", "c", "alpha", "gamma", "d", "n_max", "variant",
    "trace_every", "stop_loss",
)


def _resolve_scenario(token: str) -> Scenario:
    if token in builtin_ids():
        return builtin(token)
    path = Path(token)
    if path.exists():
        return load_scenario(path)
    raise ScenarioLookupError(token, builtin_ids())


def _effective_spec(scenario: Scenario, args) -> ObjectiveSpec:
    overrides = {}
    if args.w_jmc is not None:
        overrides["w_jmc"] = args.w_jmc
    if args.w_ee is not None:
        overrides["w_ee"] = args.w_ee
    if not overrides:
        return scenario.spec
    return dataclasses.replace(scenario.spec, **overrides)


def _solver_params(args, seed: int) -> SolverParams:
    kwargs = {
        name: getattr(args, name)
        for name in _SOLVER_FIELDS
        if getattr(args, name) is not None
    }
    return SolverParams(seed=seed, **kwargs)


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _safe_name(s: str) -> str:
    return "".join(ch if ch.isalnum() or ch in "._-" else "_" for ch in s)


def cmd_run(args) -> int:
    scenario = _resolve_scenario(args.scenario)
    spec = _effective_spec(scenario, args)
    params = _solver_params(args, args.seed)
    record = solve(spec, scenario.chain, params)
    out = _outdir(args)
    stem = f"run_{_safe_name(scenario.id)}_seed{args.seed}"
    write_trace_csv(out / f"{stem}.csv", record)
    doc = run_result_doc(
        scenario.id, spec, scenario.chain, params, record, f"{stem}.csv"
    )
    write_json(out / f"{stem}.json", doc)
    pose = record.final_pose
    print(
        f"run {scenario.id} seed {args.seed} [{params.variant}]: "
        f"initial loss {record.initial_loss:.4f}, "
        f"final loss {record.final_loss:.4e}, "
        f"pose ({pose.x:.4f}, {pose.y:.4f}, {pose.theta_deg:.4f} deg), "
        f"{record.evaluations} evals, {record.elapsed:.2f}s"
    )
    print(f"wrote {out / f'{stem}.csv'} and {out / f'{stem}.json'}")
    return EXIT_OK


def _sweep_outcomes(spec, chain, params, seeds, jobs: int) -> list:
    if jobs <= 1 or len(seeds) <= 1:
        return solve_many(spec, chain, params, seeds, return_faults=True)
    chunks = [c.tolist() for c in np.array_split(np.asarray(seeds), jobs) if c.size]
    with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
        futures = [
            pool.submit(solve_many, spec, chain, params, chunk, True)
            for chunk in chunks
        ]
        outcomes: list = []
        for future in futures:
            outcomes.extend(future.result())
    return outcomes


def cmd_sweep(args) -> int:
    scenario = _resolve_scenario(args.scenario)
    spec = _effective_spec(scenario, args)
    params = _solver_params(args, seed=0)
    seeds = list(range(args.seeds))
    outcomes = _sweep_outcomes(
        spec, scenario.chain,
        dataclasses.replace(params, trace_every=args.trace_every or params.n_max),
        seeds, args.jobs,
    )
    report = SweepReport.from_outcomes(scenario.id, spec, seeds, outcomes)
    out = _outdir(args)
    stem = f"sweep_{_safe_name(scenario.id)}"
    write_sweep_csv(out / f"{stem}.csv", report)
    write_json(out / f"{stem}.json", report.to_doc())
    stats = report.stats()
    if stats["completed"] == 0:
        print(f"sweep {scenario.id}: all {len(seeds)} seeds faulted")
    else:
        print(
            f"sweep {scenario.id} over {len(seeds)} seeds: median final loss "
            f"{stats['median_final_loss']:.4e} "
            f"(min {stats['min_final_loss']:.4e}, max {stats['max_final_loss']:.4e}), "
            f"median pos err {stats['median_pos_error']:.4f}, "
            f"median |dtheta| {stats['median_theta_error']:.4f} deg, "
            f"{stats['failed']} failed"
        )
    print(f"wrote {out / f'{stem}.csv'} and {out / f'{stem}.json'}")
    return EXIT_OK


def cmd_compare(args) -> int:
    scenario = _resolve_scenario(args.scenario)
    spec = _effective_spec(scenario, args)
    params = _solver_params(args, seed=0)
    budget = args.budget if args.budget is not None else 2 * params.n_max
    if budget < 2:
        raise ValueError(f"budget must be at least 2, got {budget}")
    seeds = list(range(args.seeds))
    nl_params = dataclasses.replace(
        params,
        n_max=max(budget // 2, 1),
        trace_every=args.trace_every or max(budget // 2, 1),
    )
    nl_outcomes = solve_many(
        spec, scenario.chain, nl_params, seeds, return_faults=True
    )
    nl_losses = np.array(
        [
            np.nan if isinstance(o, Exception) else o.final_loss
            for o in nl_outcomes
        ]
    )
    pso_losses = np.full(len(seeds), np.nan)
    for i, seed in enumerate(seeds):
        pso_params = PsoParams(
            population=args.population,
            eval_budget=budget,
            init_spread=args.init_spread,
            seed=seed,
        )
        try:
            pso_losses[i] = pso_solve(spec, scenario.chain, pso_params).final_loss
        except SolverFault:
            pass
    out = _outdir(args)
    stem = f"compare_{_safe_name(scenario.id)}"
    write_compare_csv(out / f"{stem}.csv", seeds, nl_losses, pso_losses)
    nl_median = float(np.nanmedian(nl_losses))
    pso_median = float(np.nanmedian(pso_losses))
    winner = params.variant if nl_median < pso_median else "pso"
    write_json(
        out / f"{stem}.json",
        {
            "scenario_id": scenario.id,
            "eval_budget": budget,
            "population": args.population,
            "init_spread": args.init_spread,
            "seeds": seeds,
            "nlspsa_losses": [None if np.isnan(v) else float(v) for v in nl_losses],
            "pso_losses": [None if np.isnan(v) else float(v) for v in pso_losses],
            "nlspsa_median": nl_median,
            "pso_median": pso_median,
            "winner": winner,
        },
    )
    print(
        f"compare {scenario.id} over {len(seeds)} seeds, budget {budget}: "
        f"{params.variant} median {nl_median:.4e} vs pso median {pso_median:.4e} "
        f"-> {winner} wins"
    )
    print(f"wrote {out / f'{stem}.csv'} and {out / f'{stem}.json'}")
    return EXIT_OK


def cmd_plot(args) -> int:
    doc = read_run_result(args.run)
    run_path = Path(args.run)
    iterations, losses = read_trace_csv(run_path.parent / doc["trace_csv"])
    if iterations.size == 0:
        raise ArtifactError(f"{doc['trace_csv']}: empty loss trace")
    chain = ChainModel(tuple(doc["link_lengths"]))
    initial_pts = joint_positions(chain, doc["q0_deg"])
    final_pts = joint_positions(chain, doc["final_q_deg"])
    target = (doc["target"]["x"], doc["target"]["y"])
    out = _outdir(args)
    stem = f"{_safe_name(str(doc.get('scenario_id', 'run')))}_seed{doc.get('seed', 0)}"
    posture_path = out / f"posture_{stem}.svg"
    conv_path = out / f"convergence_{stem}.svg"
    posture_path.write_text(posture_svg(initial_pts, final_pts, target))
    conv_path.write_text(convergence_svg(iterations, losses))
    print(f"wrote {posture_path} and {conv_path}")
    return EXIT_OK


def _add_common_args(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--scenario",
        required=True,
        help="built-in scenario id (e.g. 1.1) or path to a scenario JSON file",
    )
    p.add_argument("--out", default="runs", help="output directory (default: runs)")
    p.add_argument("--w-jmc", type=float, default=None, dest="w_jmc",
                   help="override the motion-cost weight")
    p.add_argument("--w-ee", type=float, default=None, dest="w_ee",
                   help="override the end-effector weight")
    solver = p.add_argument_group("solver parameters")
    solver.add_argument("--n-max", type=int, default=None, dest="n_max",
                        help="iteration budget (default: 25000)")
    solver.add_argument("--a", type=float, default=None, help="step-size scale")
    solver.add_argument("--A", type=float, default=None, help="step-size stability offset")
    solver.add_argument("--c", type=float, default=None, help="perturbation scale")
    solver.add_argument("--alpha", type=float, default=None, help="step-size decay exponent")
    solver.add_argument("--gamma", type=float, default=None, help="perturbation decay exponent")
    solver.add_argument("--d", type=float, default=None,
                        help="per-joint update saturation bound, degrees")
    solver.add_argument("--variant", choices=("nlspsa", "spsa"), default=None,
                        help="update rule (default: nlspsa)")
    solver.add_argument("--trace-every", type=int, default=None, dest="trace_every",
                        help="record the loss every m iterations (default: 1 for run, "
                             "n-max for sweep/compare)")
    solver.add_argument("--stop-loss", type=float, default=None, dest="stop_loss",
                        help="stop early once the traced loss falls below this "
                             "(default: off)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nlspsa-ik",
        description="Gradient-free planar inverse kinematics with joint-motion-cost "
                    "weighting, solved by norm-limited SPSA.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="solve one scenario once")
    _add_common_args(p_run)
    p_run.add_argument("--seed", type=int, default=0)
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="solve one scenario over a seed range")
    _add_common_args(p_sweep)
    p_sweep.add_argument("--seeds", type=int, default=20,
                         help="number of seeds, 0..n-1 (default: 20)")
    p_sweep.add_argument("--jobs", type=int, default=1,
                         help="worker processes (default: 1)")
    p_sweep.set_defaults(func=cmd_sweep)

    p_cmp = sub.add_parser("compare", help="budget-matched NLSPSA vs PSO comparison")
    _add_common_args(p_cmp)
    p_cmp.add_argument("--seeds", type=int, default=20)
    p_cmp.add_argument("--population", type=int, default=100,
                       help="PSO population size (default: 100)")
    p_cmp.add_argument("--budget", type=int, default=None,
                       help="loss-evaluation budget for both solvers "
                            "(default: 2*n_max; should be even)")
    p_cmp.add_argument("--init-spread", type=float, default=20.0, dest="init_spread",
                       help="PSO initialization half-range, degrees (default: 20)")
    p_cmp.set_defaults(func=cmd_compare)

    p_plot = sub.add_parser("plot", help="render SVG figures from run artifacts")
    p_plot.add_argument("--run", required=True,
                        help="path to a result JSON written by the run command")
    p_plot.add_argument("--out", default="runs")
    p_plot.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return EXIT_SCENARIO
    except (ArtifactError, OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SolverFault as exc:
        print(f"solver fault: {exc}", file=sys.stderr)
        return EXIT_FAULT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
