"""Square-well closed form: matching condition, benchmarks, monotonicity."""

import math

import numpy as np
import pytest

import kgcouple as kg
from kgcouple.errors import InvalidQuery
from kgcouple.exact import SquareWellSpec, square_well_coupling

SQRT_5PI_OVER_4 = math.sqrt(5 * math.pi) / 4.0


def matching_residual(spec: SquareWellSpec, v: float) -> float:
    """Directly evaluate k tan(k t) - kappa at the returned coupling."""
    kappa = math.sqrt(spec.mass**2 - spec.energy**2)
    ksq = (spec.energy + v * spec.depth) ** 2 - spec.mass**2
    k = math.sqrt(ksq)
    return k * math.tan(k * spec.width) - kappa


class TestSquareWellCoupling:
    def test_benchmark_configuration(self):
        spec = SquareWellSpec(width=SQRT_5PI_OVER_4, depth=1.0, mass=1.0, energy=-0.0377)
        v = square_well_coupling(spec)
        assert v == pytest.approx(1.36, abs=0.005)  # published to three figures
        assert matching_residual(spec, v) == pytest.approx(0.0, abs=1e-10)

    def test_unit_well_at_zero_energy(self):
        spec = SquareWellSpec(width=1.0, depth=1.0, mass=1.0, energy=0.0)
        v = square_well_coupling(spec)
        # k solves k tan k = 1 and v = sqrt(1 + k^2)
        k = 0.8603335890193798
        assert v == pytest.approx(math.sqrt(1.0 + k * k), abs=1e-10)

    def test_binding_threshold_behaviour(self):
        # as E -> m the coupling shrinks to zero through positive values
        spec = SquareWellSpec(width=1.0, depth=1.0, mass=1.0, energy=0.0)
        previous = square_well_coupling(spec)
        for E in (0.9, 0.99, 0.999, 0.9999):
            v = square_well_coupling(SquareWellSpec(1.0, 1.0, 1.0, E))
            assert 0.0 < v < previous
            previous = v
        assert previous < 0.05

    def test_strictly_decreasing_away_from_lower_edge(self):
        energies = np.linspace(-0.9, 0.995, 120)
        values = [
            square_well_coupling(SquareWellSpec(SQRT_5PI_OVER_4, 1.0, 1.0, float(E)))
            for E in energies
        ]
        assert all(b < a for a, b in zip(values, values[1:]))

    def test_curve_turns_over_near_lower_edge(self):
        # v -> (m - E)/A = 2 at the lower gap edge, so the curve rises from
        # E = -m to a shallow maximum near E ~ -0.95 before decreasing
        v_edge = square_well_coupling(SquareWellSpec(SQRT_5PI_OVER_4, 1.0, 1.0, -0.999))
        v_bump = square_well_coupling(SquareWellSpec(SQRT_5PI_OVER_4, 1.0, 1.0, -0.947))
        v_after = square_well_coupling(SquareWellSpec(SQRT_5PI_OVER_4, 1.0, 1.0, -0.80))
        assert v_edge < v_bump
        assert v_after < v_bump
        assert v_edge == pytest.approx(2.0, abs=0.05)

    def test_excited_branches_are_larger(self):
        spec = SquareWellSpec(width=2.0, depth=1.0, mass=1.0, energy=0.2)
        v0 = square_well_coupling(spec, node_target=0)
        v1 = square_well_coupling(spec, node_target=1)
        v2 = square_well_coupling(spec, node_target=2)
        assert v0 < v1 < v2
        for n, v in ((1, v1), (2, v2)):
            k = math.sqrt((spec.energy + v) ** 2 - 1.0)
            assert n * math.pi < k * spec.width < n * math.pi + math.pi / 2

    def test_energy_outside_gap_rejected(self):
        with pytest.raises(InvalidQuery):
            SquareWellSpec(width=1.0, depth=1.0, mass=1.0, energy=1.0)

    def test_oracle_root_satisfies_shooting(self):
        spec = SquareWellSpec(width=SQRT_5PI_OVER_4, depth=1.0, mass=1.0, energy=0.3)
        v = square_well_coupling(spec)
        shot = kg.shoot(
            kg.square_well(A=1.0, t=SQRT_5PI_OVER_4), kg.SpectralQuery(energy=0.3), v
        )
        assert abs(shot.mismatch) < 1e-8
