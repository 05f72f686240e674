"""Shape catalog: closed-form values, derivatives, class validation."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kgcouple import potentials as pot
from kgcouple.errors import (
    ClassViolation,
    NonDifferentiablePoint,
    NotCoulombLike,
    SingularEvaluation,
)

ADMITTED_1D = [
    pot.square_well(A=1.0, t=0.99),
    pot.exponential(A=1.0, q=1.0),
    pot.gaussian(A=1.0, q=0.8),
    pot.sech_squared(beta=3.0, q=0.35),
    pot.piecewise_table([0.0, 1.0, 2.0], [-1.0, -0.25, 0.0]),
]
RADIAL_SINGULAR = [pot.yukawa(a=0.5), pot.hulthen(delta=1.001), pot.coulomb_like(strength=0.4)]


class TestEvaluate:
    def test_gaussian_origin(self):
        assert pot.evaluate(pot.gaussian(A=1.0, q=0.8), 0.0) == pytest.approx(-1.0)

    def test_sech_squared_origin_is_quarter_strength(self):
        assert pot.evaluate(pot.sech_squared(beta=3.0, q=0.35), 0.0) == pytest.approx(-0.75)

    def test_square_well_edge_inclusive(self):
        sw = pot.square_well(A=2.0, t=1.5)
        assert pot.evaluate(sw, 1.5) == -2.0
        assert pot.evaluate(sw, 1.5000001) == 0.0

    def test_hulthen_origin_strength(self):
        h = pot.hulthen(delta=1.001)
        r = 1e-9
        assert r * pot.evaluate(h, r) == pytest.approx(-1.0 / 1.001, rel=1e-6)
        assert h.singularity_index == pytest.approx(-1.0 / 1.001)

    def test_singular_at_zero_raises(self):
        with pytest.raises(SingularEvaluation):
            pot.evaluate(pot.yukawa(a=0.5), 0.0)

    def test_negative_coordinate_rejected(self):
        with pytest.raises(ValueError):
            pot.evaluate(pot.gaussian(), -0.5)

    def test_vectorized_matches_scalar(self):
        shape = pot.sech_squared(beta=3.0, q=0.35)
        xs = np.linspace(0.1, 8.0, 40)
        vec = pot.evaluate(shape, xs)
        assert np.allclose(vec, [pot.evaluate(shape, float(x)) for x in xs])

    def test_no_overflow_at_large_argument(self):
        for shape in [pot.hulthen(delta=1.0), pot.sech_squared(beta=3.0, q=0.35)]:
            assert pot.evaluate(shape, 5000.0) == pytest.approx(0.0, abs=1e-300)


class TestDerivative:
    def test_gaussian_closed_form(self):
        # d/dx (-e^{-0.8 x^2}) = 1.6 x e^{-0.8 x^2}
        assert pot.derivative(pot.gaussian(A=1.0, q=0.8), 1.0) == pytest.approx(
            1.6 * math.exp(-0.8), rel=1e-12
        )

    def test_exponential_at_origin(self):
        assert pot.derivative(pot.exponential(A=1.0, q=1.0), 0.0) == pytest.approx(1.0)

    def test_square_well_edge_raises(self):
        with pytest.raises(NonDifferentiablePoint):
            pot.derivative(pot.square_well(A=1.0, t=1.0), 1.0)

    @pytest.mark.parametrize("shape", ADMITTED_1D[1:4] + RADIAL_SINGULAR)
    def test_matches_centered_differences(self, shape):
        for x in (0.3, 0.9, 2.1):
            h = 1e-6 * max(1.0, x)
            fd = (pot.evaluate(shape, x + h) - pot.evaluate(shape, x - h)) / (2 * h)
            exact = pot.derivative(shape, x)
            assert exact == pytest.approx(fd, rel=1e-6, abs=1e-12)

    @pytest.mark.parametrize("shape", ADMITTED_1D[1:4] + RADIAL_SINGULAR)
    def test_nonnegative_for_admitted_shapes(self, shape):
        for x in np.geomspace(0.01, 20.0, 50):
            assert pot.derivative(shape, float(x)) >= 0.0


class TestValidate:
    @pytest.mark.parametrize("shape", ADMITTED_1D)
    def test_even_class_admits_bounded_shapes(self, shape):
        assert pot.validate(shape, "P").admitted

    def test_yukawa_rejected_from_even_class(self):
        report = pot.validate(pot.yukawa(a=0.5), "P")
        assert not report.admitted
        assert any(cond == "bounded_at_origin" for cond, _, _ in report.violations)

    def test_yukawa_admitted_radially_with_index(self):
        report = pot.validate(pot.yukawa(a=0.5), "Pd", dimension=3)
        assert report.admitted
        assert report.singular_limit == pytest.approx(-1.0)

    def test_zero_shape_rejected(self):
        report = pot.validate(pot.square_well(A=0.0, t=1.0), "P")
        assert not report.admitted
        assert any(cond == "not_identically_zero" for cond, _, _ in report.violations)

    def test_singular_rejected_in_two_dimensions(self):
        assert not pot.validate(pot.hulthen(delta=1.0), "Pd", dimension=2).admitted

    def test_gaussian_admitted_is_regression_case(self):
        assert pot.validate(pot.gaussian(A=1.0, q=0.8), "P").admitted

    @given(st.sampled_from(ADMITTED_1D), st.floats(min_value=0.0, max_value=20.0),
           st.floats(min_value=0.0, max_value=20.0))
    def test_admitted_shapes_are_nonpositive_and_monotone(self, shape, x1, x2):
        lo, hi = sorted((x1, x2))
        f_lo = pot.evaluate(shape, lo)
        f_hi = pot.evaluate(shape, hi)
        assert f_lo <= 1e-15 and f_hi <= 1e-15
        assert f_hi >= f_lo - 1e-12

    @pytest.mark.parametrize("shape", ADMITTED_1D + RADIAL_SINGULAR)
    def test_decay_cutoff_bounds_the_tail(self, shape):
        cutoff = pot.decay_cutoff(shape, threshold=1e-12)
        for x in (cutoff * 1.01, cutoff * 3.0, cutoff * 10.0):
            assert abs(pot.evaluate(shape, x)) < 1e-12


class TestCoulombProfile:
    def test_yukawa_profile(self):
        profile = pot.coulomb_w_profile(pot.yukawa(a=0.5))
        assert profile.w_origin == pytest.approx(1.0)
        assert profile.origin_bounded_by_one
        assert profile.non_increasing
        assert profile.vanishes
        # w(r) = exp(-a r)
        assert np.allclose(profile.w, np.exp(-0.5 * profile.r), rtol=1e-12)

    def test_hulthen_profile_origin_value(self):
        for delta in (1.001, 0.966):
            profile = pot.coulomb_w_profile(pot.hulthen(delta=delta))
            assert profile.w_origin == pytest.approx(1.0 / delta)
            assert profile.non_increasing

    def test_bounded_shape_is_not_coulomb_like(self):
        with pytest.raises(NotCoulombLike):
            pot.coulomb_w_profile(pot.square_well(A=1.0, t=1.0))


class TestDocuments:
    def test_round_trip(self):
        doc = {"family": "gaussian", "params": {"A": 1.0, "q": 0.8}, "class": "P"}
        shape, class_name, dimension = pot.from_document(doc)
        assert shape.family == "gaussian" and class_name == "P" and dimension == 1
        assert pot.to_document(shape, class_name, dimension) == doc

    def test_radial_document(self):
        doc = {"family": "yukawa", "params": {"a": 0.5}, "class": "Pd", "dimension": 3}
        shape, class_name, dimension = pot.from_document(doc)
        assert dimension == 3 and shape.singularity_index == pytest.approx(-1.0)

    def test_inadmissible_document_raises_with_report(self):
        doc = {"family": "yukawa", "params": {"a": 0.5}, "class": "P"}
        with pytest.raises(ClassViolation) as err:
            pot.from_document(doc)
        assert err.value.report is not None and not err.value.report.admitted

    def test_unknown_family(self):
        with pytest.raises(ValueError):
            pot.from_document({"family": "morse", "params": {}})

    def test_piecewise_table_document(self):
        doc = {
            "family": "piecewise_table",
            "params": {},
            "class": "P",
            "table": {"x": [0.0, 1.0, 3.0], "f": [-1.0, -0.5, 0.0]},
        }
        shape, _, _ = pot.from_document(doc)
        assert pot.evaluate(shape, 0.5) == pytest.approx(-0.75)
        assert pot.evaluate(shape, 10.0) == 0.0
