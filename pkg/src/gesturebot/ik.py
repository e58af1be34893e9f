"""Inverse kinematics by a bacterial memetic optimizer.

A population of 8-gene chromosomes (one gene per motor angle) is evolved
with three operators per generation: bacterial mutation (clone a bacterium,
randomize one chromosome segment in all clones but one, keep the best),
a damped-gradient local search applied to each bacterium with a fixed
probability, and horizontal gene transfer from the better population half
to the worse half.  The cost of a chromosome is the squared Cartesian
distance of its forward-kinematics pose from the target pose.

Every random draw comes from one seeded generator, in a fixed order, so a
solve is bit-reproducible from its seed.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from .kinematics import (
    DEFAULT_LIMITS,
    JointAngles,
    JointLimitTable,
    LinkLengths,
    Pose9,
    fk_array,
    pose_error_array,
)

N_GENES = 8


class InvalidParamsError(ValueError):
    """Raised by solve_ik when the parameter set violates its invariants."""


class NumericalDegeneracyError(ArithmeticError):
    """Raised when the damped linear solve is too ill-conditioned to trust."""


@dataclass
class BmaParams:
    """Optimizer parameters; the defaults are the tuned operating point."""

    n_gen: int = 35
    n_ind: int = 12
    n_clones: int = 10
    l_bm: int = 1
    n_inf: int = 15
    l_gt: int = 1
    lm_prob: float = 0.20
    lm_iter: int = 8
    gamma_init: float = 1.0
    tau: float = 0.0001
    rng_seed: int = 0
    target_cost: float = 1e-8
    fd_step: float = 1e-5

    def validate(self):
        checks = [
            (self.n_gen >= 1, "n_gen >= 1"),
            (self.n_ind >= 2, "n_ind >= 2"),
            (self.n_clones >= 1, "n_clones >= 1"),
            (1 <= self.l_bm <= N_GENES, "1 <= l_bm <= 8"),
            (self.n_inf >= 0, "n_inf >= 0"),
            (1 <= self.l_gt <= N_GENES, "1 <= l_gt <= 8"),
            (0.0 <= self.lm_prob <= 1.0, "0 <= lm_prob <= 1"),
            (self.lm_iter >= 1, "lm_iter >= 1"),
            (self.gamma_init > 0.0, "gamma_init > 0"),
            (self.tau > 0.0, "tau > 0"),
            (self.target_cost >= 0.0, "target_cost >= 0"),
            (self.fd_step > 0.0, "fd_step > 0"),
        ]
        bad = [msg for ok, msg in checks if not ok]
        if bad:
            raise InvalidParamsError("invalid BMA parameters: " + "; ".join(bad))


@dataclass
class Bacterium:
    """One candidate chromosome with its cached cost (None = stale)."""

    chromosome: np.ndarray
    cost: float | None = None


@dataclass
class LmState:
    """Damping state of the local search, carried per bacterium.

    gamma adapts across invocations: resetting it every generation would
    spend the whole iteration budget re-shrinking the damping and the
    search would stall well short of the target cost.
    """

    gamma: float
    k: int = 0

    def __post_init__(self):
        if self.gamma <= 0.0:
            raise ValueError("gamma must stay positive")


class Evaluator:
    """Cost function bound to one target pose; counts every evaluation."""

    def __init__(self, target: Pose9, links: LinkLengths,
                 limits: JointLimitTable = DEFAULT_LIMITS, check_limits: bool = False):
        self.target9 = target.to_array()
        self.links = links
        self.limits = limits
        self.check_limits = check_limits
        self.count = 0

    def __call__(self, chromosomes) -> np.ndarray:
        chroms = np.atleast_2d(np.asarray(chromosomes, dtype=float))
        if self.check_limits:
            if np.any(chroms < self.limits.lower) or np.any(chroms > self.limits.upper):
                raise AssertionError("chromosome outside joint limits")
        self.count += chroms.shape[0]
        costs = pose_error_array(self.target9, fk_array(chroms, self.links))
        return costs

    def residuals(self, chromosomes) -> np.ndarray:
        """Signed coordinate residuals (calculated - desired), shape (..., 9).

        A floating input dtype is preserved, so finite-difference callers can
        probe in extended precision.
        """
        chroms = np.atleast_2d(np.asarray(chromosomes))
        if chroms.dtype.kind != "f":
            chroms = chroms.astype(float)
        if self.check_limits:
            if np.any(chroms < self.limits.lower) or np.any(chroms > self.limits.upper):
                raise AssertionError("chromosome outside joint limits")
        self.count += chroms.shape[0]
        return fk_array(chroms, self.links) - self.target9

    def one(self, chromosome) -> float:
        return float(self(np.asarray(chromosome)[None, :])[0])


def evaluate(chromosome, target: Pose9, links: LinkLengths = LinkLengths()) -> float:
    """Squared position error of one chromosome against a target pose."""
    return Evaluator(target, links).one(np.asarray(chromosome, dtype=float))


def _segments(l_bm: int):
    """Consecutive gene-index segments of length l_bm covering all 8 genes."""
    return [np.arange(s, min(s + l_bm, N_GENES)) for s in range(0, N_GENES, l_bm)]


def bacterial_mutation(pop: np.ndarray, costs: np.ndarray, evaluator: Evaluator,
                       params: BmaParams, rng: np.random.Generator):
    """Clone-and-select mutation of every bacterium, segment by segment.

    Each segment is mutated exactly once per bacterium: n_clones copies are
    made, one kept unchanged, the segment uniformly re-drawn within limits
    in the others, and the best copy's segment propagated.  Costs never
    increase.  pop and costs are updated in place.
    """
    segments = _segments(params.l_bm)
    lower, upper = evaluator.limits.lower, evaluator.limits.upper
    for i in range(pop.shape[0]):
        current = pop[i].copy()
        cost = costs[i]
        order = rng.permutation(len(segments))
        for seg_idx in order:
            idx = segments[seg_idx]
            clones = np.repeat(current[None, :], params.n_clones, axis=0)
            if params.n_clones > 1:
                clones[1:, idx] = rng.uniform(
                    lower[idx], upper[idx], size=(params.n_clones - 1, len(idx)))
            clone_costs = evaluator(clones)
            best = int(np.argmin(clone_costs))
            current = clones[best]
            cost = float(clone_costs[best])
        pop[i] = current
        costs[i] = cost
    return pop, costs


def update_gamma(gamma: float, r: float) -> float:
    """Trust-ratio damping adjustment: quadruple, halve, or keep."""
    if r < 0.25:
        return 4.0 * gamma
    if r > 0.75:
        return gamma / 2.0
    return gamma


def central_gradient(chromosome, evaluator: Evaluator, step: float) -> np.ndarray:
    """Central-difference gradient of the cost, probes clamped to limits.

    At a limit boundary the probe pair collapses onto the feasible side; the
    difference quotient then uses the actual probe span.  The probes are
    evaluated in extended precision so the subtractive cancellation stays
    below the O(step^2) truncation error at the default step size; the
    result is rounded back to double.
    """
    lower, upper = evaluator.limits.lower, evaluator.limits.upper
    b = np.asarray(chromosome, dtype=np.longdouble)
    diag = np.arange(N_GENES)
    hi = np.repeat(b[None, :], N_GENES, axis=0)
    lo = hi.copy()
    hi[diag, diag] = np.minimum(b + step, upper)
    lo[diag, diag] = np.maximum(b - step, lower)
    r_hi = evaluator.residuals(hi)
    r_lo = evaluator.residuals(lo)
    f_hi = np.sum(r_hi * r_hi, axis=-1)
    f_lo = np.sum(r_lo * r_lo, axis=-1)
    span = hi[diag, diag] - lo[diag, diag]
    grad = np.zeros(N_GENES, dtype=np.longdouble)
    nonzero = span > 0
    grad[nonzero] = (f_hi[nonzero] - f_lo[nonzero]) / span[nonzero]
    return grad.astype(float)


def central_jacobian(chromosome, evaluator: Evaluator, step: float) -> np.ndarray:
    """Central-difference Jacobian of the 9 coordinate residuals, shape (9, 8).

    Probes are clamped to the joint limits; at a boundary the difference
    quotient uses the actual probe span.  As in central_gradient, the probes
    are evaluated in extended precision and the result rounded to double.
    """
    lower, upper = evaluator.limits.lower, evaluator.limits.upper
    b = np.asarray(chromosome, dtype=np.longdouble)
    hi = np.repeat(b[None, :], N_GENES, axis=0)
    lo = hi.copy()
    diag = np.arange(N_GENES)
    hi[diag, diag] = np.minimum(b + step, upper)
    lo[diag, diag] = np.maximum(b - step, lower)
    r_hi = evaluator.residuals(hi)
    r_lo = evaluator.residuals(lo)
    span = hi[diag, diag] - lo[diag, diag]
    jac = np.zeros((9, N_GENES), dtype=np.longdouble)
    nonzero = span > 0
    jac[:, nonzero] = (r_hi[nonzero] - r_lo[nonzero]).T / span[nonzero]
    return jac.astype(float)


_COND_BOUND = 1e14


def lm_local_search(bacterium: Bacterium, evaluator: Evaluator, params: BmaParams,
                    state: LmState | None = None):
    """Damped least-squares descent on one bacterium; never worsens the cost.

    The invocation is skipped when the cost gradient 2 J^T r already has
    norm <= tau; otherwise it runs up to lm_iter iterations.  Per iteration:
    estimate the residual Jacobian J by central differences, solve
    (J^T J + gamma I) s = -J^T r, clamp the candidate to the joint limits,
    form the trust ratio r_k = (f(b+s) - f(b)) / (grad . s), adapt gamma
    (quadruple below 0.25, halve above 0.75), and accept the step only if
    it strictly decreases the cost.  Returns (bacterium, iterations run,
    updated LmState).
    """
    if state is None:
        state = LmState(params.gamma_init)
    b = bacterium.chromosome.copy()
    f = bacterium.cost if bacterium.cost is not None else evaluator.one(b)
    iters = 0
    for _ in range(params.lm_iter):
        res = evaluator.residuals(b[None, :])[0]
        jac = central_jacobian(b, evaluator, params.fd_step)
        grad = 2.0 * jac.T @ res
        if iters == 0 and np.linalg.norm(grad) <= params.tau:
            break
        iters += 1
        state.k += 1
        a_mat = jac.T @ jac + state.gamma * np.eye(N_GENES)
        if np.linalg.cond(a_mat) > _COND_BOUND:
            raise NumericalDegeneracyError("damped system condition exceeds bound")
        s = np.linalg.solve(a_mat, -jac.T @ res)
        candidate = np.clip(b + s, evaluator.limits.lower, evaluator.limits.upper)
        f_new = evaluator.one(candidate)
        predicted = float(np.dot(grad, candidate - b))
        if predicted != 0.0:
            state.gamma = update_gamma(state.gamma, (f_new - f) / predicted)
        else:
            state.gamma = update_gamma(state.gamma, 0.0)
        if f_new < f:
            b, f = candidate, f_new
    bacterium.chromosome = b
    bacterium.cost = f
    return bacterium, iters, state


def gene_transfer(pop: np.ndarray, costs: np.ndarray, evaluator: Evaluator,
                  params: BmaParams, rng: np.random.Generator, carry: list | None = None):
    """Copy genes from the better population half into the worse half.

    Repeated n_inf times: stable-sort by cost, pick a random source in the
    better half (the median belongs to it when n_ind is odd) and a random
    destination in the worse half, copy l_gt distinct gene positions, and
    re-evaluate the destination.  pop and costs are updated in place;
    ``carry`` is an optional list of per-bacterium state permuted alongside.
    """
    n = pop.shape[0]
    n_better = (n + 1) // 2

    def reorder():
        order = np.argsort(costs, kind="stable")
        pop[:] = pop[order]
        costs[:] = costs[order]
        if carry is not None:
            carry[:] = [carry[j] for j in order]

    for _ in range(params.n_inf):
        reorder()
        src = int(rng.integers(0, n_better))
        dst = n_better + int(rng.integers(0, n - n_better))
        genes = rng.choice(N_GENES, size=params.l_gt, replace=False)
        pop[dst, genes] = pop[src, genes]
        costs[dst] = float(evaluator(pop[dst][None, :])[0])
    reorder()
    return pop, costs


@dataclass
class GenerationRecord:
    generation: int
    best_cost: float
    evaluations: int
    lm_runs: int
    gamma_min: float | None
    gamma_max: float | None

    def to_dict(self):
        return {
            "generation": self.generation,
            "best_cost": self.best_cost,
            "evaluations": self.evaluations,
            "lm_runs": self.lm_runs,
            "gamma_min": self.gamma_min,
            "gamma_max": self.gamma_max,
        }


@dataclass
class SolveReport:
    """Outcome of one inverse-kinematics solve."""

    best_angles: JointAngles
    best_cost: float
    generations_run: int
    lm_invocations: int
    evaluations: int
    wall_time: float
    trace: list = field(default_factory=list)
    target_cost: float | None = None

    @property
    def succeeded(self) -> bool:
        return self.target_cost is not None and self.best_cost <= self.target_cost

    def trace_jsonl(self) -> str:
        """Per-generation records as line-delimited JSON (no wall time)."""
        return "\n".join(json.dumps(rec.to_dict()) for rec in self.trace) + "\n"


def solve_ik(target: Pose9, params: BmaParams = None,
             links: LinkLengths = LinkLengths(),
             limits: JointLimitTable = DEFAULT_LIMITS) -> SolveReport:
    """Find validated joint angles whose forward kinematics match the target.

    Runs the full memetic loop: random initial population, then per
    generation bacterial mutation, probabilistic local search on each
    bacterium, and gene transfer.  Stops after n_gen generations or as soon
    as the best cost reaches target_cost.  Deterministic per rng_seed.
    """
    params = BmaParams() if params is None else params
    params.validate()
    t0 = time.perf_counter()
    rng = np.random.default_rng(params.rng_seed)
    evaluator = Evaluator(target, links, limits)
    pop = rng.uniform(limits.lower, limits.upper, size=(params.n_ind, N_GENES))
    costs = np.asarray(evaluator(pop), dtype=float)

    best_idx = int(np.argmin(costs))
    best_chrom = pop[best_idx].copy()
    best_cost = float(costs[best_idx])
    lm_states = [LmState(params.gamma_init) for _ in range(params.n_ind)]
    lm_invocations = 0
    trace = []
    generations_run = 0

    for gen in range(params.n_gen):
        generations_run = gen + 1
        bacterial_mutation(pop, costs, evaluator, params, rng)
        gammas = []
        for i in range(params.n_ind):
            if rng.uniform() < params.lm_prob:
                bact = Bacterium(pop[i].copy(), float(costs[i]))
                try:
                    bact, _, lm_states[i] = lm_local_search(
                        bact, evaluator, params, lm_states[i])
                except NumericalDegeneracyError:
                    pass  # no step taken
                else:
                    pop[i] = bact.chromosome
                    costs[i] = bact.cost
                    gammas.append(lm_states[i].gamma)
                lm_invocations += 1
        gene_transfer(pop, costs, evaluator, params, rng, carry=lm_states)

        gen_best = int(np.argmin(costs))
        if costs[gen_best] < best_cost:
            best_cost = float(costs[gen_best])
            best_chrom = pop[gen_best].copy()
        trace.append(GenerationRecord(
            generation=gen,
            best_cost=best_cost,
            evaluations=evaluator.count,
            lm_runs=len(gammas),
            gamma_min=min(gammas) if gammas else None,
            gamma_max=max(gammas) if gammas else None,
        ))
        if best_cost <= params.target_cost:
            break

    return SolveReport(
        best_angles=JointAngles.from_array(best_chrom),
        best_cost=best_cost,
        generations_run=generations_run,
        lm_invocations=lm_invocations,
        evaluations=evaluator.count,
        wall_time=time.perf_counter() - t0,
        trace=trace,
        target_cost=params.target_cost,
    )
