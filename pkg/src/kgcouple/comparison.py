"""Condition integrals, coupling-derivative sign computation, equal-area
bound construction, ordering verification, and the Coulomb-like
energy-sign scan.

The central objects are cumulative (weighted) area differences between two
shapes: when such a profile stays non-negative on [0, inf) the coupling
eigenvalues of the two shapes are ordered at every energy, even when the
shapes themselves cross.  The wavefunction-weighted variants permit
stronger crossings when one ground state is available.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import potentials, solver
from .errors import (
    BoundBuilderError,
    ConditionInapplicable,
    GroundStateRequired,
    KgError,
    NoBoundState,
    NotCoulombLike,
    SupercriticalCoupling,
)
from .numerics import integrate_weighted
from .potentials import PotentialShape, blend, evaluate
from .solver import CouplingSolution, SolverSettings, SpectralQuery, solve_coupling

HOMOTOPY_AUDIT = (0.0, 0.25, 0.5, 0.75, 1.0)
PROFILE_POINTS = 256
# condition integrals certified non-negative only above quadrature noise;
# clearly negative minima fail, the band in between is indeterminate
NOISE_FACTOR = 1e-9
FAIL_FACTOR = 100.0


@dataclass
class ComparisonPair:
    """Two admitted shapes of the same class plus their linear homotopy."""

    f1: PotentialShape
    f2: PotentialShape
    dimension: int = 1

    def __post_init__(self):
        class_name = "P" if self.dimension == 1 else "Pd"
        for a in HOMOTOPY_AUDIT:
            shape = self.shape_at(a)
            report = potentials.validate(shape, class_name, self.dimension)
            if not report.admitted:
                raise ConditionInapplicable(
                    f"homotopy shape at a = {a:g} is not admitted:\n{report.describe()}"
                )

    def shape_at(self, a: float) -> PotentialShape:
        if a == 0.0:
            return self.f1
        if a == 1.0:
            return self.f2
        return blend(self.f1, self.f2, a)

    def difference(self, x):
        return evaluate(self.f2, x) - evaluate(self.f1, x)

    def active_range(self) -> float:
        return max(
            potentials.decay_cutoff(self.f1, 1e-14),
            potentials.decay_cutoff(self.f2, 1e-14),
            1.0,
        )

    def breakpoints(self) -> tuple[float, ...]:
        return tuple(
            sorted(set(potentials.breakpoints(self.f1)) | set(potentials.breakpoints(self.f2)))
        )


@dataclass
class ConditionProfile:
    """Cumulative (weighted) integral of f2 - f1 with its minimum and the
    crossing points of the shape difference."""

    kind: str
    x: np.ndarray
    values: np.ndarray
    min_value: float
    crossings: tuple[float, ...]
    total: float
    noise_scale: float

    @property
    def verdict(self) -> str:
        if self.min_value >= -NOISE_FACTOR * self.noise_scale:
            return "holds"
        if self.min_value < -FAIL_FACTOR * NOISE_FACTOR * self.noise_scale:
            return "fails"
        return "indeterminate"


def crossing_points(pair: ComparisonPair, upper: float | None = None) -> tuple[float, ...]:
    """Sign changes of f2 - f1 located by bisection on a dense audit grid."""
    upper = upper or pair.active_range()
    grid = np.geomspace(1e-6, upper, 2048)
    g = pair.difference(grid)
    out: list[float] = []
    idx = np.nonzero(g[:-1] * g[1:] < 0.0)[0]
    for i in idx:
        lo, hi = grid[i], grid[i + 1]
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if pair.difference(mid) * pair.difference(lo) <= 0.0:
                hi = mid
            else:
                lo = mid
        out.append(0.5 * (lo + hi))
    return tuple(out)


def _profile_grid(pair: ComparisonPair, upper: float) -> np.ndarray:
    grid = np.geomspace(1e-4, upper, PROFILE_POINTS)
    extras = [b for b in pair.breakpoints() if 0.0 < b < upper]
    extras += [c for c in crossing_points(pair, upper)]
    grid = np.unique(np.concatenate([[0.0], grid, np.asarray(extras, dtype=float)]))
    return grid


def _cumulative_profile(
    pair: ComparisonPair, weight_power: int, kind: str
) -> ConditionProfile:
    upper = pair.active_range()
    grid = _profile_grid(pair, upper)
    bps = pair.breakpoints()

    def integrand(t: float) -> float:
        return float(pair.difference(t))

    values = np.zeros_like(grid)
    for i in range(1, grid.size):
        seg = integrate_weighted(
            integrand, grid[i - 1], grid[i], weight_power=weight_power, points=bps
        )
        values[i] = values[i - 1] + seg
    scale = abs(
        integrate_weighted(lambda t: evaluate(pair.f1, t), 0.0, upper, weight_power)
    ) + abs(
        integrate_weighted(lambda t: evaluate(pair.f2, t), 0.0, upper, weight_power)
    )
    return ConditionProfile(
        kind=kind,
        x=grid,
        values=values,
        min_value=float(np.min(values)),
        crossings=crossing_points(pair, upper),
        total=float(values[-1]),
        noise_scale=max(scale, 1e-300),
    )


def condition_mu(pair: ComparisonPair) -> ConditionProfile:
    """Cumulative unweighted area difference for the even one-dimensional
    class; non-negativity everywhere certifies coupling ordering."""
    if pair.dimension != 1:
        raise ConditionInapplicable("the unweighted condition applies to d = 1 pairs")
    return _cumulative_profile(pair, 0, "mu")


def condition_eta(pair: ComparisonPair, dimension: int | None = None) -> ConditionProfile:
    """Cumulative t^(d-1)-weighted area difference for radial pairs."""
    d = pair.dimension if dimension is None else dimension
    if d != pair.dimension:
        raise ConditionInapplicable("dimension does not match the pair")
    if d < 2:
        raise ConditionInapplicable("the weighted condition requires d >= 2")
    try:
        return _cumulative_profile(pair, d - 1, "eta")
    except KgError as exc:
        raise ConditionInapplicable(f"condition inapplicable: {exc}") from exc


def condition_rho_sigma(
    pair: ComparisonPair,
    ground_state_of: int,
    solution: CouplingSolution,
) -> ConditionProfile:
    """Wavefunction-weighted cumulative difference (rho in d = 1, sigma for
    d >= 2), using the supplied ground state of shape 1 or 2."""
    if ground_state_of not in (1, 2):
        raise ValueError("ground_state_of must be 1 or 2")
    if solution.node_count != 0 or not solution.query.is_ground:
        raise GroundStateRequired("condition requires a nodeless ground-state solution")
    if solution.query.dimension != pair.dimension:
        raise ConditionInapplicable("solution dimension does not match the pair")

    d = pair.dimension
    kind = "rho" if d == 1 else "sigma"
    upper = min(pair.active_range(), float(solution.x[-1]))
    grid = _profile_grid(pair, upper)

    # integrate on the union of the profile grid and the solution mesh, so
    # the wavefunction enters at its own sample points with no interpolation
    xs = solution.x
    pos = np.unique(
        np.concatenate([grid[grid > 0.0], xs[(xs > 0.0) & (xs <= upper)]])
    )
    # weight by the reduced profile: t^(d-1) R_j = t^((d-1)/2) u_j
    half_power = (d - 1) / 2.0
    u_pos = np.interp(pos, xs, solution.reduced, left=0.0, right=0.0)
    weight = pos**half_power if half_power else np.ones_like(pos)
    vals = np.asarray(pair.difference(pos), dtype=float) * weight * u_pos
    if d == 1:
        at_zero = float(pair.difference(0.0)) * float(solution.reduced[0])
    else:
        at_zero = 0.0  # the t^((d-1)/2) u weight kills the origin limit
    dense = np.concatenate([[0.0], pos])
    integrand = np.concatenate([[at_zero], vals])
    cumulative = np.concatenate(
        [[0.0], np.cumsum(0.5 * (integrand[1:] + integrand[:-1]) * np.diff(dense))]
    )
    values = np.interp(grid, dense, cumulative)
    values[0] = 0.0
    u_scale = float(np.max(np.abs(solution.reduced)))
    scale = u_scale * (
        abs(integrate_weighted(lambda t: evaluate(pair.f1, t), 0.0, upper, d - 1))
        + abs(integrate_weighted(lambda t: evaluate(pair.f2, t), 0.0, upper, d - 1))
    )
    return ConditionProfile(
        kind=kind,
        x=grid,
        values=values,
        min_value=float(np.min(values)),
        crossings=crossing_points(pair, upper),
        total=float(values[-1]),
        noise_scale=max(scale, 1e-300),
    )


@dataclass
class CouplingDerivative:
    """Sign data for the coupling's derivative along the homotopy."""

    a: float
    coupling: float
    numerator: float
    denominator: float
    value: float  # v_a = v * numerator / denominator
    solution: CouplingSolution


def coupling_derivative(
    pair: ComparisonPair,
    a: float,
    query: SpectralQuery,
    settings: SolverSettings | None = None,
) -> CouplingDerivative:
    """Derivative of the coupling eigenvalue with respect to the homotopy
    parameter, computed from the solved ground state of f1 + a (f2 - f1).

    The denominator E<f> - v<f^2> is negative for every bound state (the
    integrals are wavefunction-weighted over [0, inf), with the radial
    weight for d >= 2); this is asserted at runtime.
    """
    if not query.is_ground:
        raise GroundStateRequired("coupling derivative is defined for ground states")
    shape = pair.shape_at(a)
    sol = solve_coupling(shape, query, settings)
    x = sol.x
    w2 = sol.reduced**2
    f_a = np.asarray(evaluate(shape, x), dtype=float)
    diff = np.asarray(pair.difference(x), dtype=float)
    v = sol.coupling
    E = query.energy

    numerator = float(np.trapezoid(diff * (v * f_a - E) * w2, x))
    denominator = float(
        E * np.trapezoid(f_a * w2, x) - v * np.trapezoid(f_a**2 * w2, x)
    )
    if not denominator < 0.0:
        raise KgError(
            f"coupling-derivative denominator must be negative, got {denominator:.6g}"
        )
    return CouplingDerivative(
        a=a,
        coupling=v,
        numerator=numerator,
        denominator=denominator,
        value=v * numerator / denominator,
        solution=sol,
    )


def _total_area(shape: PotentialShape) -> float:
    return abs(integrate_weighted(lambda t: evaluate(shape, t), 0.0, math.inf, 0,
                                  points=potentials.breakpoints(shape)))


def _require_bounded(shape: PotentialShape, builder: str) -> float:
    if potentials.is_singular(shape):
        raise BoundBuilderError(
            f"{builder} requires a bounded shape; {shape.label()} is singular at the origin"
        )
    return abs(potentials.origin_value(shape))


def build_square_well_bound(shape: PotentialShape) -> PotentialShape:
    """Equal-area square well: depth f(0), width chosen so the total areas
    match.  The well is then a spectral lower bound for the input shape."""
    depth = _require_bounded(shape, "square-well bound builder")
    if depth == 0.0:
        raise BoundBuilderError("cannot fit a square well to a shape vanishing at 0")
    width = _total_area(shape) / depth
    well = potentials.square_well(A=depth, t=width)
    surplus = integrate_weighted(
        lambda t: evaluate(shape, t) - evaluate(well, t), 0.0, width, 0
    )
    if surplus < -1e-10 * max(depth * width, 1.0):
        raise BoundBuilderError("square-well fit lacks the required core surplus")
    return well


def build_exponential_bound(shape: PotentialShape) -> PotentialShape:
    """Equal-area exponential matching the input at the origin; its slower
    core descent makes it a spectral upper bound for the input shape."""
    depth = _require_bounded(shape, "exponential bound builder")
    if depth == 0.0:
        raise BoundBuilderError("cannot fit an exponential to a shape vanishing at 0")
    rate = depth / _total_area(shape)
    upper = potentials.exponential(A=depth, q=rate)
    pair = ComparisonPair(shape, upper, dimension=1)
    crossings = crossing_points(pair)
    if crossings:
        surplus = integrate_weighted(
            lambda t: evaluate(upper, t) - evaluate(shape, t), 0.0, crossings[0], 0
        )
        if surplus < -1e-10:
            raise BoundBuilderError("exponential fit lacks the near-origin surplus")
    return upper


def equal_area_residual(shape: PotentialShape, bound: PotentialShape) -> float:
    """Total signed area difference; ~0 for a correctly fitted bound."""
    bps = tuple(set(potentials.breakpoints(shape)) | set(potentials.breakpoints(bound)))
    return integrate_weighted(
        lambda t: evaluate(bound, t) - evaluate(shape, t), 0.0, math.inf, 0, points=bps
    )


@dataclass
class BoundTriple:
    energy: float
    v_lower: float | None
    v: float | None
    v_upper: float | None
    status: str = "ok"


@dataclass
class BoundReport:
    """Constructed bounds plus their couplings across an energy grid."""

    lower_shape: PotentialShape
    upper_shape: PotentialShape
    lower_residual: float
    upper_residual: float
    rows: list[BoundTriple]

    @property
    def ordered(self) -> bool:
        for row in self.rows:
            if None in (row.v_lower, row.v, row.v_upper):
                continue
            if not (row.v_lower <= row.v <= row.v_upper):
                return False
        return True


def build_bound_report(
    shape: PotentialShape,
    energies: Sequence[float],
    mass: float = 1.0,
    settings: SolverSettings | None = None,
) -> BoundReport:
    """Fit both equal-area bounds and solve the coupling triple per energy."""
    lower = build_square_well_bound(shape)
    upper = build_exponential_bound(shape)
    rows: list[BoundTriple] = []
    for E in energies:
        q = SpectralQuery(energy=float(E), mass=mass)
        vals: list[float | None] = []
        status = "ok"
        for s in (lower, shape, upper):
            try:
                vals.append(solve_coupling(s, q, settings).coupling)
            except KgError as exc:
                vals.append(None)
                status = f"partial: {exc}"
        rows.append(BoundTriple(float(E), vals[0], vals[1], vals[2], status))
    return BoundReport(
        lower_shape=lower,
        upper_shape=upper,
        lower_residual=equal_area_residual(shape, lower),
        upper_residual=equal_area_residual(shape, upper),
        rows=rows,
    )


@dataclass
class OrderingRow:
    energy: float
    v1: float | None
    v2: float | None
    ordered: bool | None  # None marks a vacuous point (one side unbound)
    message: str = ""


@dataclass
class OrderingReport:
    """Per-energy coupling comparison for a shape pair."""

    condition: ConditionProfile
    rows: list[OrderingRow]
    tolerance: float

    @property
    def all_ordered(self) -> bool:
        return all(row.ordered is not False for row in self.rows)

    @property
    def violations(self) -> list[OrderingRow]:
        return [row for row in self.rows if row.ordered is False]


def verify_ordering(
    pair: ComparisonPair,
    kind: str,
    energies: Sequence[float],
    *,
    mass: float = 1.0,
    settings: SolverSettings | None = None,
) -> OrderingReport:
    """Solve both couplings across the grid and check v1 <= v2 pointwise.

    A point where exactly one side has no bound state makes no ordering
    claim and is reported as vacuous rather than as a failure.  The
    condition profile is evaluated and reported alongside; the ordering
    check itself measures the couplings directly.
    """
    if kind == "mu":
        profile = condition_mu(pair)
    elif kind == "eta":
        profile = condition_eta(pair)
    else:
        raise ValueError("verify_ordering supports the 'mu' and 'eta' conditions")

    d = pair.dimension
    root_tol = (settings or SolverSettings()).root_tol
    rows: list[OrderingRow] = []

    def solve_side(shape: PotentialShape, E: float) -> tuple[float | None, str]:
        try:
            q = SpectralQuery(energy=E, mass=mass, dimension=d)
            return solve_coupling(shape, q, settings).coupling, ""
        except (NoBoundState, SupercriticalCoupling) as exc:
            return None, str(exc)

    def check_one(E: float) -> OrderingRow:
        v1, msg1 = solve_side(pair.f1, float(E))
        v2, msg2 = solve_side(pair.f2, float(E))
        if v1 is None and v2 is None:
            return OrderingRow(float(E), None, None, None, msg1 or msg2)
        if v1 is None or v2 is None:
            return OrderingRow(float(E), v1, v2, None, msg1 or msg2)
        tol = 2.0 * root_tol * max(1.0, v1, v2)
        return OrderingRow(float(E), v1, v2, bool(v1 <= v2 + tol))

    energies = [float(E) for E in energies]
    workers = solver._worker_count(len(energies))
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(check_one, energies))
    else:
        rows = [check_one(E) for E in energies]
    return OrderingReport(condition=profile, rows=rows, tolerance=2.0 * root_tol)


@dataclass
class EnergySignRow:
    energy: float
    certified_above: float | None  # no coupling root at or below this value
    violation_coupling: float | None = None


@dataclass
class EnergySignReport:
    """Scan confirming that bound states at non-positive energies need a
    coupling above (d-2)/2 for admissible -w(r)/r shapes."""

    threshold: float
    rows: list[EnergySignRow]

    @property
    def confirmed(self) -> bool:
        return all(row.violation_coupling is None for row in self.rows)

    @property
    def min_coupling_bound(self) -> float:
        values = [
            row.violation_coupling if row.violation_coupling is not None else row.certified_above
            for row in self.rows
        ]
        return min(values) if values else math.nan


def energy_sign_scan(
    shape: PotentialShape,
    dimension: int,
    energies: Sequence[float],
    settings: SolverSettings | None = None,
) -> EnergySignReport:
    """Verify, per non-positive energy, that no ground state exists with
    coupling at or below (d-2)/2.

    Applicable to shapes factorable as -w(r)/r with w(0) <= 1,
    non-increasing, vanishing at infinity (d >= 3).  For each energy the
    coupling scan runs up to the threshold; finding a root there would be
    a genuine counterexample and is reported as a violation.
    """
    if dimension < 3:
        raise ConditionInapplicable("theorem inapplicable: requires d >= 3")
    try:
        profile = potentials.coulomb_w_profile(shape)
    except NotCoulombLike as exc:
        raise ConditionInapplicable(f"theorem inapplicable: {exc}") from exc
    if not profile.theorem_applicable:
        raise ConditionInapplicable(
            "theorem inapplicable: requires w(0) <= 1, w non-increasing, w -> 0 "
            f"(got w(0) = {profile.w_origin:g}, non-increasing = {profile.non_increasing})"
        )

    threshold = (dimension - 2) / 2.0
    s = settings or SolverSettings()
    rows: list[EnergySignRow] = []
    for E in energies:
        E = float(E)
        if E > 0.0:
            raise ValueError("energy-sign scan expects energies <= 0")
        q = SpectralQuery(energy=E, dimension=dimension)
        capped = SolverSettings(
            core_step=s.core_step,
            stretch=s.stretch,
            max_step=s.max_step,
            bracket_dv=s.bracket_dv,
            root_tol=s.root_tol,
            tail_efolds=s.tail_efolds,
            origin_offset=s.origin_offset,
            max_coupling=threshold,
            overflow_cap=s.overflow_cap,
        )
        try:
            sol = solve_coupling(shape, q, capped)
            rows.append(EnergySignRow(E, None, violation_coupling=sol.coupling))
        except (NoBoundState, SupercriticalCoupling):
            rows.append(EnergySignRow(E, certified_above=threshold))
    return EnergySignReport(threshold=threshold, rows=rows)
