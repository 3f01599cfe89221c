"""Foundations: projections, mirror maps, prox steps, clipping, oracles."""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from smoothconvex.core import (ConfigurationError, Domain, DomainError,
                               InputError, MirrorMap, OracleSet, StepSchedule,
                               bregman, clip_component, dykstra, make_rng,
                               project_ball, project_l1_ball, project_simplex,
                               project_two_balls, prox_step, prox_step_hnorm)
from smoothconvex.problems import from_arrays


def all_domains(d=4):
    return [
        Domain.ball(1.0),
        Domain.ball(2.5),
        Domain.box(-np.ones(d), 2 * np.ones(d)),
        Domain.simplex(d),
        Domain.l1_ball(1.5, dim=4),
        Domain.halfspace_cut(np.array([1.0, 0.5, -0.3, 0.2]), 0.4),
    ]


def simplex_projection_active_set(x):
    """Exhaustive oracle for d <= 4: enumerate all support sets and solve the
    equality-constrained least squares on each, keeping the best feasible."""
    d = len(x)
    best, best_val = None, math.inf
    for mask in range(1, 2 ** d):
        idx = [i for i in range(d) if mask >> i & 1]
        # on support S: p_i = x_i - theta with sum = 1
        theta = (sum(x[i] for i in idx) - 1.0) / len(idx)
        p = np.zeros(d)
        for i in idx:
            p[i] = x[i] - theta
        if np.any(p < -1e-12):
            continue
        val = float(np.sum((p - x) ** 2))
        if val < best_val:
            best, best_val = p, val
    return best


class TestProjection:
    def test_ball_radial_scaling(self):
        out = Domain.ball(1.0).project(np.array([3.0, 4.0]))
        np.testing.assert_allclose(out, [0.6, 0.8], atol=1e-15)

    def test_simplex_feasible_passthrough(self):
        x = np.array([0.3, 0.2, 0.5])
        np.testing.assert_array_equal(Domain.simplex(3).project(x), x)

    def test_simplex_matches_active_set_oracle(self):
        # frozen from the exhaustive active-set oracle
        out = Domain.simplex(3).project(np.array([1.2, -0.2, 0.0]))
        np.testing.assert_allclose(out, [1.0, 0.0, 0.0], atol=1e-12)
        rng = make_rng(42)
        for _ in range(200):
            x = rng.uniform(-2, 2, size=4)
            got = Domain.simplex(4).project(x)
            want = simplex_projection_active_set(x)
            np.testing.assert_allclose(got, want, atol=1e-9)

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(InputError):
            Domain.box([-1.0, -1.0], [1.0, 1.0]).project(np.zeros(3))

    def test_empty_box_rejected(self):
        with pytest.raises(ConfigurationError):
            Domain.box([1.0], [0.0])

    @pytest.mark.parametrize("dom", all_domains(), ids=lambda d: d.kind + str(d.r))
    def test_idempotence(self, dom):
        rng = make_rng(7)
        for _ in range(1000):
            x = rng.uniform(-3, 3, size=4)
            p = dom.project(x)
            p2 = dom.project(p)
            assert np.max(np.abs(p2 - p)) <= 1e-12

    @pytest.mark.parametrize("dom", all_domains(), ids=lambda d: d.kind + str(d.r))
    def test_optimality_vs_random_feasible(self, dom):
        rng = make_rng(8)
        for _ in range(100):
            x = rng.uniform(-3, 3, size=4)
            p = dom.project(x)
            y = dom.sample(rng, dim=4)
            assert np.linalg.norm(x - p) <= np.linalg.norm(x - y) + 1e-12

    @pytest.mark.parametrize("dom", all_domains(), ids=lambda d: d.kind + str(d.r))
    def test_nonexpansive(self, dom):
        rng = make_rng(9)
        for _ in range(500):
            x = rng.uniform(-3, 3, size=4)
            y = rng.uniform(-3, 3, size=4)
            px, py = dom.project(x), dom.project(y)
            assert np.linalg.norm(px - py) <= np.linalg.norm(x - y) + 1e-12

    @pytest.mark.parametrize("dom", all_domains(), ids=lambda d: d.kind + str(d.r))
    def test_membership_iff_constraint(self, dom):
        rng = make_rng(10)
        for _ in range(300):
            x = rng.uniform(-1.5, 1.5, size=4)
            if dom.kind == "halfspace_cut" and np.linalg.norm(x) > dom.outer_radius:
                continue
            assert dom.contains(x) == (dom.g(x) <= 1e-10)

    @pytest.mark.parametrize("dom", all_domains(), ids=lambda d: d.kind + str(d.r))
    def test_boundary_gradient_bounds(self, dom):
        rng = make_rng(11)
        for _ in range(200):
            outside = rng.uniform(-3, 3, size=4) * 2.0
            b = dom.project(outside)
            if abs(dom.g(b)) > 1e-6:  # interior landed (already feasible start)
                continue
            n = np.linalg.norm(dom.g_grad(b))
            assert dom.rho - 1e-9 <= n <= dom.G2 + 1e-9


class TestTwoBallProjection:
    def test_matches_dykstra(self):
        rng = make_rng(3)
        for _ in range(300):
            c2 = rng.uniform(-0.8, 0.8, size=3)
            r1, r2 = 1.0, float(rng.uniform(0.4, 1.2))
            if np.linalg.norm(c2) > r1 + r2 - 0.05:
                continue
            x = rng.uniform(-3, 3, size=3)
            got = project_two_balls(x, np.zeros(3), r1, c2, r2)
            want = dykstra(x, [lambda v: project_ball(v, r1),
                               lambda v, c2=c2, r2=r2: project_ball(v, r2, c2)],
                           rounds=2000, tol=1e-14)
            np.testing.assert_allclose(got, want, atol=1e-7)
            assert np.linalg.norm(got) <= r1 + 1e-9
            assert np.linalg.norm(got - c2) <= r2 + 1e-9


class TestBregman:
    def test_euclidean_half_squared_distance(self):
        v = bregman(MirrorMap.euclidean(), np.array([1.0, 0.0]), np.zeros(2))
        assert v == 0.5

    def test_zero_at_equal_points(self):
        for mm in (MirrorMap.euclidean(), MirrorMap.entropy()):
            x = np.array([0.25, 0.75])
            assert bregman(mm, x, x) == 0.0

    def test_entropy_matches_kl(self):
        # frozen from the independent KL evaluation sum p_i ln(p_i/q_i)
        v = bregman(MirrorMap.entropy(), np.array([0.5, 0.5]), np.array([0.25, 0.75]))
        want = 0.5 * math.log(0.5 / 0.25) + 0.5 * math.log(0.5 / 0.75)
        assert abs(v - want) < 1e-12
        assert abs(v - 0.14384103622589045) < 1e-12

    def test_entropy_rejects_nonpositive(self):
        with pytest.raises(DomainError):
            bregman(MirrorMap.entropy(), np.array([0.5, 0.5]), np.array([0.0, 1.0]))

    @given(st.lists(st.floats(0.05, 3.0), min_size=2, max_size=6),
           st.lists(st.floats(0.05, 3.0), min_size=2, max_size=6))
    def test_nonnegative(self, xs, ys):
        n = min(len(xs), len(ys))
        x, y = np.array(xs[:n]), np.array(ys[:n])
        for mm in (MirrorMap.euclidean(), MirrorMap.entropy()):
            v = bregman(mm, x, y)
            assert v >= -1e-12
            d = x - y
            if mm.kind == "euclidean":
                assert v >= mm.alpha / 2 * float(d @ d) - 1e-12

    def test_inverse_gradient_roundtrip(self):
        rng = make_rng(5)
        for mm in (MirrorMap.euclidean(), MirrorMap.entropy()):
            for _ in range(100):
                x = rng.uniform(0.01, 2.0, size=5)
                back = mm.grad_inv(mm.grad(x))
                assert np.max(np.abs(back - x)) < 1e-10


class TestProxStep:
    def test_euclidean_is_projected_step(self):
        dom = Domain.box([-10.0, -10.0], [10.0, 10.0])
        out = prox_step(MirrorMap.euclidean(), dom, np.array([1.0, 1.0]),
                        np.array([1.0, 0.0]), 0.5)
        np.testing.assert_allclose(out, [0.5, 1.0], atol=1e-15)

    def test_entropy_zero_gradient_fixed_point(self):
        out = prox_step(MirrorMap.entropy(), Domain.simplex(2),
                        np.array([0.5, 0.5]), np.zeros(2), 3.7)
        np.testing.assert_allclose(out, [0.5, 0.5], atol=1e-15)

    def test_ball_boundary_case_matches_grid(self):
        # frozen from a dense grid search over the unit disc at 1e-3
        out = prox_step(MirrorMap.euclidean(), Domain.ball(1.0),
                        np.array([0.9, 0.0]), np.array([-1.0, 0.0]), 0.5)
        np.testing.assert_allclose(out, [1.0, 0.0], atol=1e-12)

    def test_grid_search_oracle_random_ball_instances(self):
        rng = make_rng(17)
        dom = Domain.ball(1.0)
        mm = MirrorMap.euclidean()
        xs = np.linspace(-1, 1, 2001)
        X, Y = np.meshgrid(xs, xs)
        mask = X**2 + Y**2 <= 1.0
        for _ in range(10):
            z = dom.sample(rng, dim=2)
            g = rng.standard_normal(2)
            eta = float(rng.uniform(0.1, 1.0))
            obj = eta * (g[0] * X + g[1] * Y) + 0.5 * ((X - z[0])**2 + (Y - z[1])**2)
            obj = np.where(mask, obj, np.inf)
            i, j = np.unravel_index(np.argmin(obj), obj.shape)
            grid_best = np.array([X[i, j], Y[i, j]])
            out = prox_step(mm, dom, z, g, eta)
            assert dom.contains(out, tol=1e-12)
            def value(v):
                return eta * float(g @ v) + 0.5 * float((v - z) @ (v - z))
            # the prox point must beat every grid point; 1-strong convexity of
            # the prox objective then pins the argmin to within grid accuracy
            assert value(out) <= value(grid_best) + 1e-12
            assert np.linalg.norm(out - grid_best) <= 2e-2

    def test_matches_projection_identity_on_random_instances(self):
        rng = make_rng(18)
        mm = MirrorMap.euclidean()
        doms = all_domains()
        for _ in range(500):
            dom = doms[int(rng.integers(len(doms)))]
            z = dom.sample(rng, dim=4)
            g = rng.standard_normal(4)
            eta = float(rng.uniform(0.01, 2.0))
            a = prox_step(mm, dom, z, g, eta)
            b = dom.project(z - eta * g)
            assert np.max(np.abs(a - b)) < 1e-10

    def test_entropy_simplex_is_multiplicative_update(self):
        z = np.array([0.2, 0.3, 0.5])
        g = np.array([1.0, -0.5, 0.0])
        eta = 0.7
        out = prox_step(MirrorMap.entropy(), Domain.simplex(3), z, g, eta)
        want = z * np.exp(-eta * g)
        want /= want.sum()
        np.testing.assert_allclose(out, want, atol=1e-14)

    def test_rejects_nonpositive_eta(self):
        with pytest.raises(ConfigurationError):
            prox_step(MirrorMap.euclidean(), Domain.ball(1.0), np.zeros(2),
                      np.zeros(2), 0.0)

    def test_hnorm_ball_constrained(self):
        rng = make_rng(19)
        for _ in range(50):
            d = 3
            A = rng.standard_normal((d, d))
            H = A @ A.T + np.eye(d)
            z = rng.standard_normal(d) * 0.3
            g = rng.standard_normal(d)
            out = prox_step_hnorm(z, g, H, radius=0.5)
            assert np.linalg.norm(out) <= 0.5 + 1e-9
            # optimality vs random feasible directions
            base = g @ out + 0.5 * (out - z) @ H @ (out - z)
            for _ in range(20):
                y = rng.standard_normal(d)
                y *= 0.5 * rng.uniform() ** (1 / 3) / np.linalg.norm(y)
                val = g @ y + 0.5 * (y - z) @ H @ (y - z)
                assert base <= val + 1e-8


class TestClip:
    def test_componentwise_formula(self):
        np.testing.assert_array_equal(clip_component(1.0, np.array([2.0, -0.5])),
                                      [1.0, -0.5])

    def test_noop_within_bound(self):
        np.testing.assert_array_equal(clip_component(10.0, np.array([2.0, -0.5])),
                                      [2.0, -0.5])

    def test_sign_preserved_boundary_exact(self):
        np.testing.assert_array_equal(
            clip_component(0.25, np.array([-3.0, 0.25, 0.0])), [-0.25, 0.25, 0.0])

    def test_rejects_nonpositive_level(self):
        with pytest.raises(ConfigurationError):
            clip_component(0.0, np.array([1.0]))

    @given(st.floats(0.01, 10.0), st.lists(st.floats(-50, 50), min_size=1, max_size=8))
    def test_infinity_norm_bound(self, gamma, gs):
        out = clip_component(gamma, np.array(gs))
        assert np.max(np.abs(out)) <= gamma + 1e-15


class TestSchedulesAndOracles:
    def test_schedule_values(self):
        assert StepSchedule.constant(0.3).at(7) == 0.3
        assert StepSchedule.inverse_sqrt(2.0).at(4) == 1.0
        assert StepSchedule.inverse_t(3.0).at(3) == 1.0
        with pytest.raises(ConfigurationError):
            StepSchedule.constant(0.0)

    def test_oracle_counters_monotone(self):
        prob = from_arrays(np.eye(3), np.zeros(3), 0.0, "squared")
        oracle = OracleSet.from_problem(prob)
        rng = make_rng(0)
        w = np.zeros(3)
        seen = 0
        for _ in range(10):
            oracle.stochastic_gradient(w, rng)
            assert oracle.counters["stochastic"] > seen
            seen = oracle.counters["stochastic"]

    def test_oracle_unbiased(self):
        rng0 = make_rng(123)
        X = rng0.standard_normal((20, 4))
        y = np.where(rng0.standard_normal(20) > 0, 1.0, -1.0)
        prob = from_arrays(X, y, 0.1, "logistic")
        w = rng0.standard_normal(4) * 0.3
        full = prob.full_grad(w)
        rng = make_rng(4)
        n_samples = 100_000
        samples = np.stack([prob.stochastic_grad(w, rng) for _ in range(n_samples)])
        mean = samples.mean(axis=0)
        se = samples.std(axis=0, ddof=1) / math.sqrt(n_samples)
        assert np.all(np.abs(mean - full) <= 5.0 * se + 1e-12)

    def test_seeded_rng_reproducible(self):
        a = make_rng(99).standard_normal(16)
        b = make_rng(99).standard_normal(16)
        np.testing.assert_array_equal(a, b)


class TestEntropyProxBisection:
    def test_norm_ball_projections_feasible_and_optimal(self):
        from smoothconvex.core import bregman as breg
        rng = make_rng(23)
        mm = MirrorMap.entropy()
        z = np.array([0.5, 0.8, 0.9])
        g = np.array([-2.0, -1.0, 0.5])
        for dom in (Domain.ball(1.0), Domain.l1_ball(1.0, dim=3)):
            out = prox_step(mm, dom, z, g, 0.8)
            assert dom.contains(out, tol=1e-5)
            val = 0.8 * float(g @ out) + breg(mm, out, z)
            for _ in range(1000):
                y = np.abs(rng.standard_normal(3)) + 1e-6
                y = (y / np.linalg.norm(y) if dom.kind == "ball"
                     else y / np.abs(y).sum()) * 0.999
                assert 0.8 * float(g @ y) + breg(mm, y, z) >= val - 1e-6

    def test_nonnegative_box_clamp(self):
        out = prox_step(MirrorMap.entropy(), Domain.box([0.1, 0.1], [0.6, 0.6]),
                        np.array([0.5, 0.5]), np.array([-3.0, 0.2]), 1.0)
        assert out[0] == 0.6
        assert 0.1 <= out[1] <= 0.6

    def test_negative_box_rejected(self):
        from smoothconvex.core import DomainError
        with pytest.raises(DomainError):
            prox_step(MirrorMap.entropy(), Domain.box([-1.0], [1.0]),
                      np.array([0.5]), np.array([0.1]), 1.0)


class TestProjectionProperties:
    @given(st.lists(st.floats(-5, 5), min_size=2, max_size=6),
           st.floats(0.2, 3.0))
    def test_ball_projection_properties(self, xs, r):
        x = np.array(xs)
        p = project_ball(x, r)
        assert np.linalg.norm(p) <= r + 1e-12
        if np.linalg.norm(x) <= r:
            np.testing.assert_array_equal(p, x)
        else:
            # boundary point collinear with the input
            assert abs(np.linalg.norm(p) - r) <= 1e-12
            cross = p * np.linalg.norm(x) - x * np.linalg.norm(p)
            assert np.max(np.abs(cross)) <= 1e-9

    @given(st.lists(st.floats(-4, 4), min_size=2, max_size=5))
    def test_simplex_projection_is_distribution(self, xs):
        p = project_simplex(np.array(xs))
        assert abs(p.sum() - 1.0) <= 1e-10
        assert np.all(p >= 0)

    @given(st.lists(st.floats(-4, 4), min_size=2, max_size=5),
           st.floats(0.3, 2.5))
    def test_l1_projection_budget(self, xs, r):
        p = project_l1_ball(np.array(xs), r)
        assert np.abs(p).sum() <= r + 1e-9
        # signs never flip
        assert np.all(p * np.sign(np.array(xs)) >= -1e-15)


class TestHalfspaceCutProjection:
    def test_matches_dykstra_on_random_instances(self):
        rng = make_rng(99)
        for _ in range(500):
            d = int(rng.integers(2, 6))
            a = rng.standard_normal(d)
            b = float(rng.uniform(-0.5, 0.5) * np.linalg.norm(a))
            dom = Domain.halfspace_cut(a, b)
            x = rng.uniform(-3, 3, size=d)
            got = dom.project(x)

            def proj_half(v, a=a, b=b):
                na2 = float(a @ a)
                return v - max(a @ v - b, 0.0) / na2 * a

            want = dykstra(x, [lambda v: project_ball(v, 1.0), proj_half],
                           rounds=4000, tol=1e-15)
            assert np.linalg.norm(got - want) <= 1e-10
            assert dom.contains(got, tol=1e-9)
