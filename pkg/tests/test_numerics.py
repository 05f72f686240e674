"""Integration, root finding, and quadrature against closed-form oracles."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kgcouple.errors import (
    IntegrationDiverged,
    InvalidBracket,
    QuadratureFailure,
)
from kgcouple.numerics import (
    Bracket,
    IvpState,
    Mesh,
    Trajectory,
    find_root,
    integrate_ivp,
    integrate_weighted,
)


def bisect_oracle(fn, lo, hi, iterations=200):
    """Plain bisection, independent of the production root finder."""
    flo = fn(lo)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if fn(mid) * flo <= 0.0:
            hi = mid
        else:
            lo = mid
            flo = fn(lo)
    return 0.5 * (lo + hi)


class TestMesh:
    def test_rejects_too_few_nodes(self):
        with pytest.raises(ValueError):
            Mesh(np.linspace(0, 1, 8))

    def test_rejects_unsorted(self):
        nodes = np.linspace(0, 1, 20)
        nodes[5] = nodes[7]
        with pytest.raises(ValueError):
            Mesh(nodes)

    def test_rejects_negative_start(self):
        with pytest.raises(ValueError):
            Mesh(np.linspace(-1, 1, 20))


class TestIntegrateIvp:
    def test_constant_coefficient_cosh(self):
        mesh = Mesh.uniform(0.0, 5.0, 5001)
        traj = integrate_ivp(lambda x: np.ones_like(x), IvpState(0, 1, 0), mesh)
        exact = np.cosh(mesh.nodes)
        rel = np.max(np.abs(traj.value - exact) / exact)
        assert rel < 1e-8
        assert traj.error_estimate is not None and traj.error_estimate < 1e-8

    def test_constant_coefficient_sinh(self):
        mesh = Mesh.uniform(0.0, 5.0, 5001)
        traj = integrate_ivp(lambda x: np.ones_like(x), IvpState(0, 0, 1), mesh)
        exact = np.sinh(mesh.nodes[1:])
        rel = np.max(np.abs(traj.value[1:] - exact) / exact)
        assert rel < 1e-8

    def test_zero_coefficient_is_linear(self):
        mesh = Mesh.uniform(0.0, 3.0, 61)
        traj = integrate_ivp(lambda x: np.zeros_like(x), IvpState(0, 1, 1), mesh)
        assert np.allclose(traj.value, 1.0 + mesh.nodes, rtol=0, atol=1e-13)

    def test_step_halving_shows_fourth_order(self):
        # halving the step should cut the cosh error about sixteenfold
        def run(n):
            mesh = Mesh.uniform(0.0, 5.0, n)
            traj = integrate_ivp(
                lambda x: np.ones_like(x), IvpState(0, 1, 0), mesh, estimate_error=False
            )
            return np.max(np.abs(traj.value - np.cosh(mesh.nodes)))

        coarse = run(251)
        fine = run(501)
        order = math.log2(coarse / fine)
        assert order >= 3.8

    def test_divergence_reports_last_finite_node(self):
        mesh = Mesh.uniform(0.0, 650.0, 3001)
        with pytest.raises(IntegrationDiverged) as err:
            integrate_ivp(lambda x: np.ones_like(x), IvpState(0, 1, 1), mesh)
        assert err.value.last_position is not None
        assert isinstance(err.value.trajectory, Trajectory)
        assert err.value.trajectory.x[-1] == pytest.approx(err.value.last_position)

    def test_start_must_sit_on_first_node(self):
        mesh = Mesh.uniform(0.0, 1.0, 33)
        with pytest.raises(ValueError):
            integrate_ivp(lambda x: np.ones_like(x), IvpState(0.5, 1, 0), mesh)


class TestFindRoot:
    def test_sqrt_two(self):
        fn = lambda x: x * x - 2.0
        root = find_root(fn, Bracket.from_function(fn, 1.0, 2.0), tol=1e-12)
        assert root == pytest.approx(math.sqrt(2.0), abs=1e-12)

    def test_tangent_matching_value(self):
        fn = lambda k: k * math.tan(k) - 1.0
        expected = bisect_oracle(fn, 0.1, math.pi / 2 - 1e-9)
        root = find_root(fn, Bracket.from_function(fn, 0.1, math.pi / 2 - 1e-9))
        assert root == pytest.approx(expected, abs=1e-10)
        assert root == pytest.approx(0.8603335890193798, abs=1e-9)

    def test_invalid_bracket(self):
        fn = lambda x: x * x + 1.0
        with pytest.raises(InvalidBracket):
            Bracket.from_function(fn, 1.0, 2.0)

    @given(st.floats(min_value=-0.9, max_value=0.9))
    def test_root_stays_inside_bracket(self, shift):
        fn = lambda x: (x - shift) * (1.0 + 0.5 * x * x)
        root = find_root(fn, Bracket.from_function(fn, -1.0, 1.0))
        assert -1.0 <= root <= 1.0
        assert root == pytest.approx(shift, abs=1e-9)


class TestIntegrateWeighted:
    def test_gaussian_tail(self):
        value = integrate_weighted(lambda t: math.exp(-0.8 * t * t), 0.0, math.inf)
        assert value == pytest.approx(0.5 * math.sqrt(math.pi / 0.8), abs=1e-10)

    def test_monomial(self):
        assert integrate_weighted(lambda t: t * t, 0.0, 1.0) == pytest.approx(1 / 3, abs=1e-12)

    def test_weight_power_gamma(self):
        value = integrate_weighted(lambda t: math.exp(-t), 0.0, math.inf, weight_power=2)
        assert value == pytest.approx(2.0, abs=1e-9)

    def test_non_decaying_integrand_fails(self):
        with pytest.raises(QuadratureFailure):
            integrate_weighted(lambda t: 1.0, 0.0, math.inf)

    @given(st.floats(min_value=0.05, max_value=0.95))
    def test_additive_over_splits(self, split):
        fn = lambda t: math.sin(3 * t) * math.exp(-t)
        whole = integrate_weighted(fn, 0.0, 1.0)
        parts = integrate_weighted(fn, 0.0, split) + integrate_weighted(fn, split, 1.0)
        assert whole == pytest.approx(parts, abs=1e-11)
