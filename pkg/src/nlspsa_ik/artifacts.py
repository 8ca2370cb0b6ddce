"""Run, sweep, and comparison artifacts: CSV and JSON readers/writers.

Floats are serialized with ``repr`` (shortest round-trip form), so re-parsing
any file reproduces the in-memory values exactly and repeated writes of the
same data are byte-identical.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ArtifactError
from .kinematics import ChainModel, Pose
from .objective import ObjectiveSpec
from .optimizer import RunRecord, SolverParams


def _fmt_cell(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return repr(int(v))
    return repr(float(v))


def _write_csv(path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt_cell(v) for v in row])


def _read_csv(path, expected_prefix: list[str]) -> tuple[list[str], list[list[str]]]:
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            rows = list(reader)
    except OSError:
        raise
    if header is None or header[: len(expected_prefix)] != expected_prefix:
        raise ArtifactError(
            f"{path}: expected a CSV starting with columns {expected_prefix}, "
            f"got {header}"
        )
    return header, rows


def write_trace_csv(path, record: RunRecord) -> None:
    _write_csv(
        path,
        ["iteration", "loss"],
        zip((int(i) for i in record.trace_iterations), record.loss_trace),
    )


def read_trace_csv(path) -> tuple[np.ndarray, np.ndarray]:
    _, rows = _read_csv(path, ["iteration", "loss"])
    iterations = np.array([int(r[0]) for r in rows], dtype=int)
    losses = np.array([float(r[1]) for r in rows])
    return iterations, losses


@dataclass(eq=False)
class SweepReport:
    """Per-seed results of one scenario swept over a seed range.

    All statistics are recomputed from the stored per-seed values on access;
    failed seeds carry NaN entries and a fault message and are excluded from
    the statistics.
    """

    scenario_id: str
    seeds: list[int]
    final_losses: np.ndarray
    pos_errors: np.ndarray
    theta_errors: np.ndarray
    displacements: np.ndarray  # (n_seeds, n_joints), |q_final - q0| per joint
    wall_ms: np.ndarray
    faults: list[str | None]

    @classmethod
    def from_outcomes(
        cls, scenario_id: str, spec: ObjectiveSpec, seeds, outcomes
    ) -> "SweepReport":
        """Build from per-seed ``solve``/``pso_solve`` outcomes.

        ``outcomes`` holds one :class:`RunRecord` per seed, or an exception
        instance for seeds whose run faulted.
        """
        seeds = [int(s) for s in seeds]
        n_seeds = len(seeds)
        n = spec.n
        target = spec.target
        final_losses = np.full(n_seeds, np.nan)
        pos_errors = np.full(n_seeds, np.nan)
        theta_errors = np.full(n_seeds, np.nan)
        displacements = np.full((n_seeds, n), np.nan)
        wall_ms = np.full(n_seeds, np.nan)
        faults: list[str | None] = [None] * n_seeds
        for i, outcome in enumerate(outcomes):
            if isinstance(outcome, Exception):
                faults[i] = str(outcome)
                continue
            rec: RunRecord = outcome
            final_losses[i] = rec.final_loss
            pos_errors[i] = math.hypot(
                target.x - rec.final_pose.x, target.y - rec.final_pose.y
            )
            theta_errors[i] = abs(target.theta_deg - rec.final_pose.theta_deg)
            displacements[i] = np.abs(rec.final_iterate - spec.reference)
            wall_ms[i] = rec.elapsed * 1e3
        return cls(
            scenario_id=scenario_id,
            seeds=seeds,
            final_losses=final_losses,
            pos_errors=pos_errors,
            theta_errors=theta_errors,
            displacements=displacements,
            wall_ms=wall_ms,
            faults=faults,
        )

    def stats(self) -> dict:
        ok = ~np.isnan(self.final_losses)
        if not ok.any():
            return {"completed": 0, "failed": len(self.seeds)}
        return {
            "completed": int(ok.sum()),
            "failed": int(len(self.seeds) - ok.sum()),
            "median_final_loss": float(np.median(self.final_losses[ok])),
            "min_final_loss": float(self.final_losses[ok].min()),
            "max_final_loss": float(self.final_losses[ok].max()),
            "median_pos_error": float(np.median(self.pos_errors[ok])),
            "median_theta_error": float(np.median(self.theta_errors[ok])),
            "median_displacement": [
                float(v) for v in np.median(self.displacements[ok], axis=0)
            ],
            "median_wall_ms": float(np.median(self.wall_ms[ok])),
            "total_wall_ms": float(self.wall_ms[ok].sum()),
        }

    def to_doc(self) -> dict:
        per_seed = []
        for i, seed in enumerate(self.seeds):
            per_seed.append(
                {
                    "seed": seed,
                    "final_loss": _none_if_nan(self.final_losses[i]),
                    "pos_err": _none_if_nan(self.pos_errors[i]),
                    "theta_err": _none_if_nan(self.theta_errors[i]),
                    "wall_ms": _none_if_nan(self.wall_ms[i]),
                    "dq": None
                    if self.faults[i] is not None
                    else [float(v) for v in self.displacements[i]],
                    "fault": self.faults[i],
                }
            )
        return {
            "scenario_id": self.scenario_id,
            "per_seed": per_seed,
            "stats": self.stats(),
        }


def _none_if_nan(v: float):
    return None if math.isnan(v) else float(v)


def sweep_csv_header(n_joints: int) -> list[str]:
    return ["seed", "final_loss", "pos_err", "theta_err", "wall_ms"] + [
        f"dq_{i + 1}" for i in range(n_joints)
    ]


def write_sweep_csv(path, report: SweepReport) -> None:
    n = report.displacements.shape[1]
    rows = []
    for i, seed in enumerate(report.seeds):
        rows.append(
            [
                seed,
                report.final_losses[i],
                report.pos_errors[i],
                report.theta_errors[i],
                report.wall_ms[i],
                *report.displacements[i],
            ]
        )
    _write_csv(path, sweep_csv_header(n), rows)


def read_sweep_csv(path) -> dict:
    """Columns of a sweep CSV as arrays: seeds, final_losses, pos_errors,
    theta_errors, wall_ms, displacements."""
    header, rows = _read_csv(path, ["seed", "final_loss", "pos_err", "theta_err"])
    n = len(header) - 5
    return {
        "seeds": [int(r[0]) for r in rows],
        "final_losses": np.array([float(r[1]) for r in rows]),
        "pos_errors": np.array([float(r[2]) for r in rows]),
        "theta_errors": np.array([float(r[3]) for r in rows]),
        "wall_ms": np.array([float(r[4]) for r in rows]),
        "displacements": np.array([[float(v) for v in r[5 : 5 + n]] for r in rows]),
    }


def write_compare_csv(path, seeds, nlspsa_losses, pso_losses) -> None:
    _write_csv(
        path,
        ["seed", "nlspsa_loss", "pso_loss"],
        zip((int(s) for s in seeds), nlspsa_losses, pso_losses),
    )


def read_compare_csv(path) -> dict:
    _, rows = _read_csv(path, ["seed", "nlspsa_loss", "pso_loss"])
    return {
        "seeds": [int(r[0]) for r in rows],
        "nlspsa_losses": np.array([float(r[1]) for r in rows]),
        "pso_losses": np.array([float(r[2]) for r in rows]),
    }


def _pose_doc(pose: Pose) -> dict:
    return {"x": pose.x, "y": pose.y, "theta_deg": pose.theta_deg}


def run_result_doc(
    scenario_id: str,
    spec: ObjectiveSpec,
    chain: ChainModel,
    params: SolverParams,
    record: RunRecord,
    trace_csv: str,
) -> dict:
    """Self-contained description of one run, enough to re-plot it."""
    return {
        "scenario_id": scenario_id,
        "seed": record.seed,
        "variant": params.variant,
        "link_lengths": list(chain.link_lengths),
        "q0_deg": [float(v) for v in spec.reference],
        "target": _pose_doc(spec.target),
        "final_q_deg": [float(v) for v in record.final_iterate],
        "final_pose": _pose_doc(record.final_pose),
        "initial_loss": record.initial_loss,
        "final_loss": record.final_loss,
        "best_loss": record.best_loss,
        "evaluations": record.evaluations,
        "trace_evaluations": record.trace_evaluations,
        "iterations": record.iterations,
        "max_step_inf": record.max_step_inf,
        "elapsed_s": record.elapsed,
        "params": {
            "a": params.a,
            "A": params.A,
            "c": params.c,
            "alpha": params.alpha,
            "gamma": params.gamma,
            "d": params.d,
            "n_max": params.n_max,
            "trace_every": params.trace_every,
            "stop_loss": params.stop_loss,
            "w_jmc": spec.w_jmc,
            "w_ee": spec.w_ee,
        },
        "trace_csv": trace_csv,
    }


def write_json(path, doc: dict) -> None:
    Path(path).write_text(json.dumps(doc, indent=2) + "\n")


def read_run_result(path) -> dict:
    """Load and sanity-check a run result JSON written by the run command."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ArtifactError(f"{path}: corrupt run artifact: {exc.msg}") from None
    required = ("link_lengths", "q0_deg", "target", "final_q_deg", "trace_csv")
    missing = [k for k in required if k not in doc]
    if missing:
        raise ArtifactError(f"{path}: run artifact is missing fields {missing}")
    return doc
