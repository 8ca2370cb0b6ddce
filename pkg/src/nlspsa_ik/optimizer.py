"""Norm-limited SPSA solver for the joint-space optimization problem.

The update rule follows stochastic approximation with a simultaneous
perturbation gradient estimate: two loss measurements per iteration at
symmetric random perturbations, regardless of problem dimension. The
"nlspsa" variant saturates every component of the update vector at a bound
``d``, which keeps single-iteration joint motion small and stabilizes the
iteration; the "spsa" variant applies the raw update.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import SolverFault
from .kinematics import ChainModel, Pose, forward_kinematics
from .objective import LossEvaluator, ObjectiveSpec

VARIANTS = ("nlspsa", "spsa")

# Perturbation vectors are drawn per seed in blocks of this many iterations;
# block draws consume the PRNG stream exactly like per-iteration draws.
_DELTA_BLOCK = 512


@dataclass(frozen=True)
class SolverParams:
    """Gain schedule, saturation bound, and budget for one solver run.

    Step size decays as a/(A+k)^alpha and the perturbation size as c/k^gamma
    with the iteration index k starting at 1. ``d`` bounds each component of
    an update (degrees per joint per iteration) in the "nlspsa" variant.
    ``stop_loss`` optionally ends a run early once a traced loss value falls
    below it (checked only at trace points); off by default.
    """

    a: float = 3000.0
    A: float = 10.0
    c: float = 0.1
    alpha: float = 0.602
    gamma: float = 0.101
    d: float = 0.03
    n_max: int = 25000
    seed: int = 0
    variant: str = "nlspsa"
    trace_every: int = 1
    stop_loss: float | None = None

    def __post_init__(self):
        for name in ("a", "c", "alpha", "gamma", "d"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.A < 0:
            raise ValueError(f"A must be nonnegative, got {self.A}")
        if self.n_max < 1:
            raise ValueError(f"n_max must be at least 1, got {self.n_max}")
        if self.seed < 0:
            raise ValueError(f"seed must be nonnegative, got {self.seed}")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.trace_every < 1:
            raise ValueError(f"trace_every must be at least 1, got {self.trace_every}")
        if self.stop_loss is not None and not np.isfinite(self.stop_loss):
            raise ValueError(f"stop_loss must be finite, got {self.stop_loss}")


@dataclass(eq=False)
class RunRecord:
    """Outcome of one solver run.

    ``final_iterate`` is the iterate after the last executed iteration (the
    answer), not the best-so-far; ``best_iterate``/``best_loss`` track the
    minimum over traced loss values and are diagnostic only. ``evaluations``
    counts loss measurements consumed by the optimizer itself (exactly two
    per iteration); the ``trace_evaluations`` bookkeeping measurements are
    counted separately. ``loss_trace[i]`` is the loss after
    ``trace_iterations[i]`` updates, starting from 0 (the initial value) and
    always ending at the final iterate.
    """

    final_iterate: np.ndarray
    final_pose: Pose
    initial_loss: float
    final_loss: float
    loss_trace: np.ndarray
    trace_iterations: np.ndarray
    best_iterate: np.ndarray
    best_loss: float
    evaluations: int
    trace_evaluations: int
    iterations: int
    max_step_inf: float
    seed: int
    elapsed: float


def step_gain(params: SolverParams, k: int) -> float:
    """Decaying step size a/(A+k)^alpha for iteration k >= 1."""
    if k < 1:
        raise ValueError(f"iteration index must be >= 1, got {k}")
    return params.a / (params.A + k) ** params.alpha


def perturbation_gain(params: SolverParams, k: int) -> float:
    """Decaying perturbation size c/k^gamma for iteration k >= 1."""
    if k < 1:
        raise ValueError(f"iteration index must be >= 1, got {k}")
    return params.c / k**params.gamma


def sample_perturbation(n: int, rng: np.random.Generator) -> np.ndarray:
    """Random direction with independent equiprobable +-1 components."""
    return rng.integers(0, 2, size=n) * 2.0 - 1.0


def spsa_gradient(
    loss: Callable[[np.ndarray], float],
    phi: np.ndarray,
    c_k: float,
    delta: np.ndarray,
) -> np.ndarray:
    """Simultaneous-perturbation gradient estimate at ``phi``.

    Uses exactly two loss measurements, independent of dimension:
    g_i = [loss(phi + c_k*delta) - loss(phi - c_k*delta)] / (2*c_k*delta_i).
    The division is a true componentwise reciprocal of ``delta``, so
    non-Bernoulli perturbation distributions remain possible.
    """
    phi = np.asarray(phi, dtype=float)
    delta = np.asarray(delta, dtype=float)
    if c_k <= 0:
        raise ValueError(f"c_k must be positive, got {c_k}")
    if delta.shape != phi.shape:
        raise ValueError(f"delta shape {delta.shape} != phi shape {phi.shape}")
    if np.any(delta == 0):
        raise ValueError("perturbation components must be nonzero")
    loss_plus = float(loss(phi + c_k * delta))
    loss_minus = float(loss(phi - c_k * delta))
    if not (np.isfinite(loss_plus) and np.isfinite(loss_minus)):
        raise SolverFault(
            f"non-finite loss measurement: J+={loss_plus}, J-={loss_minus}"
        )
    return (loss_plus - loss_minus) / (2.0 * c_k) / delta


def saturate(x: np.ndarray, d: float) -> np.ndarray:
    """Componentwise sign-preserving clamp of magnitude to ``d``."""
    if d <= 0:
        raise ValueError(f"saturation bound must be positive, got {d}")
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.minimum(np.abs(x), d)


def take_step(
    phi: np.ndarray, g_hat: np.ndarray, a_k: float, params: SolverParams
) -> np.ndarray:
    """One iterate update: phi - a_k*g_hat, saturated in the nlspsa variant."""
    phi = np.asarray(phi, dtype=float)
    g_hat = np.asarray(g_hat, dtype=float)
    if g_hat.shape != phi.shape:
        raise ValueError(f"gradient shape {g_hat.shape} != phi shape {phi.shape}")
    if not np.isfinite(g_hat).all():
        raise SolverFault("non-finite gradient estimate")
    update = a_k * g_hat
    if params.variant == "nlspsa":
        update = saturate(update, params.d)
    return phi - update


def clamp_to_limits(phi: np.ndarray, limits) -> np.ndarray:
    """Componentwise clamp to (q_min, q_max); no-op when limits are absent."""
    phi = np.asarray(phi, dtype=float)
    if limits is None:
        return phi
    q_min, q_max = limits
    return np.clip(phi, np.asarray(q_min, dtype=float), np.asarray(q_max, dtype=float))


def solve(spec: ObjectiveSpec, chain: ChainModel, params: SolverParams) -> RunRecord:
    """Run the solver once, seeded from ``params.seed``.

    Starts from the reference configuration, runs ``n_max`` iterations (two
    loss measurements each), and returns the final iterate. Raises
    :class:`SolverFault` if any loss measurement or iterate goes non-finite.
    """
    return solve_many(spec, chain, params, [params.seed])[0]


def solve_many(
    spec: ObjectiveSpec,
    chain: ChainModel,
    params: SolverParams,
    seeds: Sequence[int],
    return_faults: bool = False,
) -> list:
    """Run one solver instance per seed, batched over a shared iteration loop.

    Each seed owns an independent PRNG stream, so results per seed do not
    depend on which other seeds share the batch. With ``return_faults`` the
    result list carries the :class:`SolverFault` for a failed seed in its
    slot (other seeds keep running); otherwise the first fault is raised.
    ``elapsed`` is apportioned evenly across the batch.
    """
    seeds = [int(s) for s in seeds]
    if not seeds:
        return []
    evaluator = LossEvaluator(spec, chain)
    n = chain.n
    n_seeds = len(seeds)
    n_iter = params.n_max
    nlspsa = params.variant == "nlspsa"
    d = params.d
    stop_loss = params.stop_loss
    limits = chain.joint_limits
    if limits is not None:
        q_lo = np.asarray(limits[0])
        q_hi = np.asarray(limits[1])

    started = time.perf_counter()
    gens = [np.random.default_rng(s) for s in seeds]
    phi = np.tile(np.asarray(spec.reference), (n_seeds, 1))

    ks = np.arange(1, n_iter + 1)
    a_ks = params.a / (params.A + ks) ** params.alpha
    c_ks = params.c / ks**params.gamma

    trace_ks = list(range(0, n_iter + 1, params.trace_every))
    if trace_ks[-1] != n_iter:
        trace_ks.append(n_iter)
    trace_ks = np.asarray(trace_ks)
    n_trace = len(trace_ks)
    traces = np.full((n_seeds, n_trace), np.nan)

    active = np.ones(n_seeds, dtype=bool)
    faults: list[SolverFault | None] = [None] * n_seeds
    iterations_done = np.zeros(n_seeds, dtype=int)
    evals = np.zeros(n_seeds, dtype=int)
    trace_evals = np.zeros(n_seeds, dtype=int)
    final_phi = np.empty((n_seeds, n))
    final_loss = np.full(n_seeds, np.nan)
    max_step = np.zeros(n_seeds)

    def mark_faults(bad_rows: np.ndarray, k: int, what: str) -> None:
        for s in np.flatnonzero(bad_rows):
            faults[s] = SolverFault(
                f"non-finite {what} at iteration {k} (seed {seeds[s]})", iteration=k
            )
            active[s] = False
        if not return_faults and any(f is not None for f in faults):
            raise next(f for f in faults if f is not None)

    def record_trace(slot: int, values: np.ndarray, k: int) -> None:
        trace_evals[active] += 1
        mark_faults(active & ~np.isfinite(values), k, "loss")
        traces[active, slot] = values[active]
        improved = active & (values < best_loss)
        best_loss[improved] = values[improved]
        for s in np.flatnonzero(improved):
            best_phi[s] = phi[s].copy()
        if stop_loss is not None:
            done = active & (values <= stop_loss)
            for s in np.flatnonzero(done):
                final_phi[s] = phi[s]
                final_loss[s] = values[s]
                active[s] = False

    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        best_phi = phi.copy()
        best_loss = np.full(n_seeds, np.inf)
        initial = evaluator.evaluate_many(phi)
        record_trace(0, initial, 0)
        slot = 1

        for block_start in range(0, n_iter, _DELTA_BLOCK):
            if not active.any():
                break
            block_len = min(_DELTA_BLOCK, n_iter - block_start)
            deltas = np.empty((block_len, n_seeds, n))
            for si, gen in enumerate(gens):
                deltas[:, si, :] = gen.integers(0, 2, size=(block_len, n))
            deltas *= 2.0
            deltas -= 1.0

            for j in range(block_len):
                if not active.any():
                    break
                k = block_start + j + 1
                a_k = a_ks[k - 1]
                c_k = c_ks[k - 1]
                delta = deltas[j]
                loss_plus = evaluator.evaluate_many(phi + c_k * delta)
                loss_minus = evaluator.evaluate_many(phi - c_k * delta)
                evals[active] += 2
                mark_faults(
                    active & ~(np.isfinite(loss_plus) & np.isfinite(loss_minus)),
                    k,
                    "loss",
                )
                g_hat = ((loss_plus - loss_minus) / (2.0 * c_k))[:, None] / delta
                update = a_k * g_hat
                if nlspsa:
                    np.clip(update, -d, d, out=update)
                new_phi = phi - update
                if limits is not None:
                    np.clip(new_phi, q_lo, q_hi, out=new_phi)
                mark_faults(active & ~np.isfinite(new_phi).all(axis=1), k, "iterate")
                step_inf = np.abs(new_phi - phi).max(axis=1)
                np.maximum(max_step, np.where(active, step_inf, 0.0), out=max_step)
                phi = new_phi
                iterations_done[active] += 1
                if slot < n_trace and k == trace_ks[slot]:
                    if active.any():
                        record_trace(slot, evaluator.evaluate_many(phi), k)
                    slot += 1

        still_running = np.flatnonzero(active)
        final_phi[still_running] = phi[still_running]
        final_loss[still_running] = traces[still_running, -1]

    elapsed = (time.perf_counter() - started) / n_seeds
    results: list = []
    for s in range(n_seeds):
        if faults[s] is not None:
            results.append(faults[s])
            continue
        valid = trace_ks <= iterations_done[s]
        results.append(
            RunRecord(
                final_iterate=final_phi[s].copy(),
                final_pose=forward_kinematics(chain, final_phi[s]),
                initial_loss=float(traces[s, 0]),
                final_loss=float(final_loss[s]),
                loss_trace=traces[s, valid].copy(),
                trace_iterations=trace_ks[valid].copy(),
                best_iterate=best_phi[s].copy(),
                best_loss=float(best_loss[s]),
                evaluations=int(evals[s]),
                trace_evaluations=int(trace_evals[s]),
                iterations=int(iterations_done[s]),
                max_step_inf=float(max_step[s]),
                seed=seeds[s],
                elapsed=elapsed,
            )
        )
    return results
