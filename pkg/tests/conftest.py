"""Shared fixtures: a warm integration kernel, cached benchmark solutions,
and a terminal summary line per acceptance criterion."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass

import pytest
from hypothesis import settings

import kgcouple as kg
from kgcouple import _kernel

settings.register_profile("ci", deadline=None, max_examples=25, derandomize=True)
settings.load_profile("ci")

SQRT_5PI_OVER_4 = math.sqrt(5 * math.pi) / 4.0


@pytest.fixture(scope="session", autouse=True)
def warm_kernel():
    _kernel.warm_up()


@dataclass(frozen=True)
class BenchmarkCase:
    name: str
    shape: kg.PotentialShape
    query: kg.SpectralQuery


BENCHMARK_CASES = [
    BenchmarkCase("gaussian_E-0.0377", kg.gaussian(A=1.0, q=0.8), kg.SpectralQuery(energy=-0.0377)),
    BenchmarkCase(
        "square_well_E-0.0377",
        kg.square_well(A=1.0, t=SQRT_5PI_OVER_4),
        kg.SpectralQuery(energy=-0.0377),
    ),
    BenchmarkCase(
        "exponential_E-0.0377",
        kg.exponential(A=1.0, q=4.0 / math.sqrt(5 * math.pi)),
        kg.SpectralQuery(energy=-0.0377),
    ),
    BenchmarkCase(
        "sech2_E-0.314", kg.sech_squared(beta=3.0, q=0.35), kg.SpectralQuery(energy=-0.314)
    ),
    BenchmarkCase(
        "exp_lower_E-0.314", kg.exponential(A=1.0, q=0.46666), kg.SpectralQuery(energy=-0.314)
    ),
    BenchmarkCase(
        "exp_upper_E-0.314", kg.exponential(A=0.75, q=0.35), kg.SpectralQuery(energy=-0.314)
    ),
    BenchmarkCase(
        "yukawa_E0.96_d3", kg.yukawa(a=0.5), kg.SpectralQuery(energy=0.96, dimension=3)
    ),
    BenchmarkCase(
        "hulthen1.001_E0.96_d3", kg.hulthen(delta=1.001), kg.SpectralQuery(energy=0.96, dimension=3)
    ),
    BenchmarkCase(
        "hulthen0.966_E0.96_d3", kg.hulthen(delta=0.966), kg.SpectralQuery(energy=0.96, dimension=3)
    ),
]


@pytest.fixture(scope="session")
def solved_states() -> dict[str, kg.CouplingSolution]:
    """Ground states of the benchmark configurations, solved once."""
    return {case.name: kg.solve_coupling(case.shape, case.query) for case in BENCHMARK_CASES}


# ---------------------------------------------------------------------------
# acceptance summary: one pass/fail line per criterion
# ---------------------------------------------------------------------------

_ACCEPTANCE_RESULTS: dict[int, list[bool]] = defaultdict(list)


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.rsplit("::", 1)[-1]
    if not name.startswith("test_criterion_"):
        return
    number = int(name.split("_")[2])
    _ACCEPTANCE_RESULTS[number].append(report.passed)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE_RESULTS):
        outcomes = _ACCEPTANCE_RESULTS[number]
        verdict = "PASS" if all(outcomes) else "FAIL"
        terminalreporter.write_line(
            f"criterion {number}: {verdict} ({sum(outcomes)}/{len(outcomes)} checks)"
        )
