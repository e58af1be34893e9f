import cmath

import numpy as np
import pytest

from fk_oracle import fk_oracle

from gesturebot.ik import (
    Bacterium,
    BmaParams,
    Evaluator,
    InvalidParamsError,
    LmState,
    bacterial_mutation,
    central_gradient,
    central_jacobian,
    evaluate,
    gene_transfer,
    lm_local_search,
    solve_ik,
    update_gamma,
)
from gesturebot.kinematics import DEFAULT_LIMITS, LinkLengths, Pose9, fk_array, pose_error_array


def random_angles(rng, n=None):
    size = (n, 8) if n is not None else 8
    return rng.uniform(DEFAULT_LIMITS.lower, DEFAULT_LIMITS.upper, size)


def make_evaluator(theta, links=LinkLengths(), check_limits=False):
    return Evaluator(Pose9.from_array(fk_array(theta, links)), links, check_limits=check_limits)


class TestEvaluate:
    def test_self_target_is_zero(self):
        rng = np.random.default_rng(0)
        theta = random_angles(rng)
        target = Pose9.from_array(fk_array(theta))
        assert evaluate(theta, target) == pytest.approx(0.0, abs=1e-30)

    def test_single_coordinate_offset(self):
        theta = np.zeros(8)
        theta[7] = 0.5  # head within limits
        pose = fk_array(theta)
        target = pose.copy()
        target[0] += 0.1
        assert evaluate(theta, Pose9.from_array(target)) == pytest.approx(0.01)

    def test_agrees_with_oracle_cost(self):
        rng = np.random.default_rng(3)
        theta = random_angles(rng)
        other = random_angles(rng)
        target = fk_array(other)
        expected = float(np.sum((fk_array(theta) - target) ** 2))
        assert evaluate(theta, Pose9.from_array(target)) == pytest.approx(expected, rel=1e-12)

    def test_limit_closure_assertion(self):
        ev = make_evaluator(np.zeros(8) + 0.3, check_limits=False)
        ev.check_limits = True
        bad = np.zeros(8)
        bad[0] = 5.0
        with pytest.raises(AssertionError):
            ev(bad[None, :])


class TestBmaParams:
    def test_defaults_are_operating_point(self):
        p = BmaParams()
        assert (p.n_gen, p.n_ind, p.n_clones, p.l_bm, p.n_inf) == (35, 12, 10, 1, 15)
        assert (p.l_gt, p.lm_prob, p.lm_iter, p.gamma_init, p.tau) == (1, 0.20, 8, 1.0, 0.0001)

    @pytest.mark.parametrize("kwargs", [
        {"n_ind": 1}, {"n_clones": 0}, {"l_bm": 0}, {"l_bm": 9},
        {"lm_prob": 1.5}, {"gamma_init": 0.0}, {"tau": 0.0}, {"fd_step": -1e-5},
    ])
    def test_rejects_invalid(self, kwargs):
        with pytest.raises(InvalidParamsError):
            BmaParams(**kwargs).validate()


class TestBacterialMutation:
    def test_single_clone_is_noop(self):
        rng = np.random.default_rng(1)
        theta = random_angles(rng)
        ev = make_evaluator(theta)
        pop = random_angles(rng, 4)
        costs = np.asarray(ev(pop), float)
        before = pop.copy()
        params = BmaParams(n_clones=1)
        bacterial_mutation(pop, costs, ev, params, np.random.default_rng(2))
        np.testing.assert_array_equal(pop, before)

    def test_zero_cost_stays_zero(self):
        rng = np.random.default_rng(5)
        theta = random_angles(rng)
        ev = make_evaluator(theta)
        pop = np.vstack([theta, random_angles(rng)])
        costs = np.asarray(ev(pop), float)
        assert costs[0] == 0.0
        bacterial_mutation(pop, costs, ev, BmaParams(), np.random.default_rng(6))
        assert costs[0] == 0.0
        np.testing.assert_array_equal(pop[0], theta)

    def test_never_increases_cost_over_seeded_runs(self):
        for seed in range(100):
            rng = np.random.default_rng(seed)
            theta = random_angles(rng)
            ev = make_evaluator(theta)
            pop = random_angles(rng, 1)
            costs = np.asarray(ev(pop), float)
            before = costs[0]
            bacterial_mutation(pop, costs, ev, BmaParams(), rng)
            assert costs[0] <= before

    def test_stays_within_limits(self):
        rng = np.random.default_rng(9)
        ev = make_evaluator(random_angles(rng), check_limits=True)
        pop = random_angles(rng, 6)
        costs = np.asarray(ev(pop), float)
        bacterial_mutation(pop, costs, ev, BmaParams(), rng)
        assert np.all(pop >= DEFAULT_LIMITS.lower) and np.all(pop <= DEFAULT_LIMITS.upper)


class TestGammaUpdate:
    def test_low_ratio_quadruples(self):
        assert update_gamma(1.0, 0.1) == 4.0

    def test_high_ratio_halves(self):
        assert update_gamma(1.0, 0.8) == 0.5

    def test_middle_ratio_keeps(self):
        assert update_gamma(1.0, 0.5) == 1.0


class TestLmLocalSearch:
    def test_stationary_start_stops_immediately(self):
        rng = np.random.default_rng(11)
        theta = random_angles(rng)
        ev = make_evaluator(theta)
        bact = Bacterium(theta.copy(), 0.0)
        out, iters, _ = lm_local_search(bact, ev, BmaParams())
        assert iters == 0
        np.testing.assert_array_equal(out.chromosome, theta)

    def test_descends_toward_known_solution(self):
        rng = np.random.default_rng(13)
        theta = random_angles(rng)
        ev = make_evaluator(theta)
        start = np.clip(theta + 0.05, DEFAULT_LIMITS.lower, DEFAULT_LIMITS.upper)
        f0 = ev.one(start)
        bact, _, state = lm_local_search(Bacterium(start.copy(), f0), ev, BmaParams())
        assert bact.cost <= f0
        assert state.gamma > 0
        # re-check the cached cost against a fresh evaluation
        assert bact.cost == pytest.approx(ev.one(bact.chromosome), rel=1e-12, abs=1e-30)

    def test_gamma_state_persists(self):
        rng = np.random.default_rng(17)
        theta = random_angles(rng)
        ev = make_evaluator(theta)
        start = np.clip(theta + 0.1, DEFAULT_LIMITS.lower, DEFAULT_LIMITS.upper)
        state = LmState(1.0)
        bact = Bacterium(start.copy(), ev.one(start))
        bact, _, state = lm_local_search(bact, ev, BmaParams(), state)
        assert state.k > 0
        gamma_after_first = state.gamma
        bact, _, state = lm_local_search(bact, ev, BmaParams(), state)
        # second invocation resumes from the adapted damping, not gamma_init
        assert state.gamma <= gamma_after_first

    def test_output_within_limits(self):
        rng = np.random.default_rng(19)
        theta = random_angles(rng)
        ev = make_evaluator(theta, check_limits=True)
        start = DEFAULT_LIMITS.upper.copy()  # on the boundary
        bact, _, _ = lm_local_search(Bacterium(start, ev.one(start)), ev, BmaParams())
        assert np.all(bact.chromosome >= DEFAULT_LIMITS.lower)
        assert np.all(bact.chromosome <= DEFAULT_LIMITS.upper)


class TestGradients:
    def test_central_gradient_matches_complex_step(self):
        rng = np.random.default_rng(23)
        theta = random_angles(rng)
        ev = make_evaluator(theta)
        point = random_angles(rng)
        g_fd = central_gradient(point, ev, 1e-6)
        g_exact = complex_step_gradient(point, ev.target9)
        np.testing.assert_allclose(g_fd, g_exact, atol=1e-8)

    def test_jacobian_consistent_with_gradient(self):
        rng = np.random.default_rng(29)
        theta = random_angles(rng)
        ev = make_evaluator(theta)
        point = random_angles(rng)
        jac = central_jacobian(point, ev, 1e-6)
        res = fk_array(point) - ev.target9
        np.testing.assert_allclose(2 * jac.T @ res, central_gradient(point, ev, 1e-6), atol=1e-7)

    def test_richardson_error_ratio(self):
        rng = np.random.default_rng(31)
        ratios = []
        for _ in range(20):
            theta = random_angles(rng)
            ev = make_evaluator(theta)
            point = random_angles(rng)
            g_exact = complex_step_gradient(point, ev.target9)
            err_h = np.linalg.norm(central_gradient(point, ev, 1e-5) - g_exact)
            err_h2 = np.linalg.norm(central_gradient(point, ev, 5e-6) - g_exact)
            if err_h2 > 0:
                ratios.append(err_h / err_h2)
        assert all(2.0 <= r <= 8.0 for r in ratios)


def complex_step_gradient(point, target9, h=1e-200):
    """Machine-precision reference gradient via complex-step differentiation."""
    links = LinkLengths()
    grad = np.zeros(8)
    for j in range(8):
        z = [complex(v) for v in point]
        z[j] += 1j * h
        pose = fk_oracle(*z, links.l01, links.l12, links.l23, links.l34,
                         links.lh1, links.lh2, cos=cmath.cos, sin=cmath.sin)
        cost = sum((p - t) ** 2 for p, t in zip(pose, target9))
        grad[j] = cost.imag / h
    return grad


class TestGeneTransfer:
    def test_zero_transfers_noop(self):
        rng = np.random.default_rng(37)
        theta = random_angles(rng)
        ev = make_evaluator(theta)
        pop = random_angles(rng, 5)
        costs = np.asarray(ev(pop), float)
        order = np.argsort(costs, kind="stable")
        expected = pop[order].copy()
        gene_transfer(pop, costs, ev, BmaParams(n_inf=0), rng)
        np.testing.assert_array_equal(pop, expected)

    def test_identical_population_unchanged(self):
        rng = np.random.default_rng(41)
        theta = random_angles(rng)
        ev = make_evaluator(theta)
        chrom = random_angles(rng)
        pop = np.vstack([chrom, chrom])
        costs = np.asarray(ev(pop), float)
        before_cost = costs.copy()
        gene_transfer(pop, costs, ev, BmaParams(), rng)
        np.testing.assert_array_equal(pop[0], chrom)
        np.testing.assert_array_equal(pop[1], chrom)
        np.testing.assert_allclose(costs, before_cost)

    def test_best_cost_never_degrades(self):
        for seed in range(100):
            rng = np.random.default_rng(seed)
            theta = random_angles(rng)
            ev = make_evaluator(theta)
            pop = random_angles(rng, 7)
            costs = np.asarray(ev(pop), float)
            best_before = costs.min()
            gene_transfer(pop, costs, ev, BmaParams(), rng)
            assert costs.min() <= best_before

    def test_carry_permuted_with_population(self):
        rng = np.random.default_rng(43)
        theta = random_angles(rng)
        ev = make_evaluator(theta)
        pop = random_angles(rng, 4)
        costs = np.asarray(ev(pop), float)
        carry = list(range(4))
        gene_transfer(pop, costs, ev, BmaParams(n_inf=3), rng, carry=carry)
        # carry is permuted alongside the population, never duplicated or lost
        assert sorted(carry) == [0, 1, 2, 3]


class TestSolveIk:
    def test_roundtrip_reaches_target(self):
        rng = np.random.default_rng(47)
        theta = random_angles(rng)
        target = Pose9.from_array(fk_array(theta))
        report = solve_ik(target, BmaParams(rng_seed=7))
        assert report.best_cost <= 1e-8
        recon = fk_array(report.best_angles.to_array())
        assert float(pose_error_array(target.to_array(), recon[None, :])[0]) <= 1e-8

    def test_unreachable_target_best_effort(self):
        target = Pose9((10.0, 10.0, 10.0), (10.0, 10.0, 10.0), (10.0, 10.0, 10.0))
        report = solve_ik(target, BmaParams(rng_seed=3, n_gen=3))
        assert report.best_cost > 0
        assert np.all(np.isfinite(report.best_angles.to_array()))

    def test_deterministic_per_seed(self):
        rng = np.random.default_rng(53)
        target = Pose9.from_array(fk_array(random_angles(rng)))
        r1 = solve_ik(target, BmaParams(rng_seed=11, n_gen=6))
        r2 = solve_ik(target, BmaParams(rng_seed=11, n_gen=6))
        assert r1.best_cost == r2.best_cost
        assert r1.best_angles == r2.best_angles
        assert r1.trace_jsonl() == r2.trace_jsonl()

    def test_invalid_params_rejected_before_work(self):
        target = Pose9((0, 0, 0), (0, 0, 0), (0, 0, 0.1))
        with pytest.raises(InvalidParamsError):
            solve_ik(target, BmaParams(n_ind=1))

    def test_trace_monotone_nonincreasing(self):
        rng = np.random.default_rng(59)
        target = Pose9.from_array(fk_array(random_angles(rng)))
        report = solve_ik(target, BmaParams(rng_seed=2, n_gen=10, target_cost=0.0))
        best = [rec.best_cost for rec in report.trace]
        assert all(b <= a for a, b in zip(best, best[1:]))

    def test_report_counts(self):
        rng = np.random.default_rng(61)
        target = Pose9.from_array(fk_array(random_angles(rng)))
        report = solve_ik(target, BmaParams(rng_seed=4, n_gen=5, target_cost=0.0))
        assert report.generations_run == 5
        assert len(report.trace) == 5
        assert report.evaluations == report.trace[-1].evaluations
        assert report.wall_time > 0
