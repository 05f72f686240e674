"""Shooting solver for the coupling eigenvalue v = G(E) at fixed energy.

The wave equation phi'' = [m^2 - (E - v f)^2] phi (plus a centrifugal term
in the reduced radial form u = r^((d-1)/2) R) is integrated outward from
the origin and inward from the far tail; the mismatch is the Wronskian of
the two branches at the outermost classical turning point, which is
continuous in v and changes sign exactly at the coupling eigenvalues.
Scanning v upward from zero and refining the first sign change with the
correct node count yields the ground state.

Meshes are fixed (graded: dense near the origin, geometric stretch in the
tail) so the shooting objective is deterministic and smooth in v.  Every
solve allocates its own workspace; nothing here is shared or mutated.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import potentials
from .errors import (
    ClassViolation,
    IntegrationDiverged,
    InvalidQuery,
    KgError,
    NoBoundState,
    StateIdentificationFailure,
    SupercriticalCoupling,
)
from .numerics import Bracket, find_root, propagate_coefficients
from .potentials import PotentialShape

MESH_EXTENT_CAP = 1e4
THREADS_ENV_VAR = "KGCOUPLE_THREADS"


@dataclass(frozen=True)
class SpectralQuery:
    """One eigenproblem: energy, mass, dimension, angular index / parity.

    node_target = 0 selects the ground state.  Parity applies only in one
    dimension; the angular index only for d >= 2.
    """

    energy: float
    mass: float = 1.0
    dimension: int = 1
    angular_index: int = 0
    parity: str | None = None
    node_target: int = 0

    def __post_init__(self):
        if self.mass <= 0:
            raise InvalidQuery("mass must be positive")
        if abs(self.energy) >= self.mass:
            raise InvalidQuery(
                f"requires |E| < m: got E = {self.energy:g}, m = {self.mass:g}"
            )
        if self.dimension < 1:
            raise InvalidQuery("dimension must be >= 1")
        if self.node_target < 0:
            raise InvalidQuery("node_target must be >= 0")
        if self.dimension == 1:
            if self.angular_index != 0:
                raise InvalidQuery("angular_index applies only for d >= 2")
            if self.parity is None:
                object.__setattr__(self, "parity", "even")
            elif self.parity not in ("even", "odd"):
                raise InvalidQuery("parity must be 'even' or 'odd'")
        else:
            if self.parity is not None:
                raise InvalidQuery("parity applies only in one dimension")
            if self.angular_index < 0:
                raise InvalidQuery("angular_index must be >= 0")

    @property
    def kappa(self) -> float:
        """Asymptotic decay rate sqrt(m^2 - E^2)."""
        return math.sqrt(self.mass**2 - self.energy**2)

    @property
    def centrifugal(self) -> float:
        """Coefficient of 1/x^2 in the reduced radial equation."""
        if self.dimension == 1:
            return 0.0
        d, l = self.dimension, self.angular_index
        return (d - 1) * (d - 3) / 4.0 + l * (l + d - 2)

    @property
    def class_name(self) -> str:
        return "P" if self.dimension == 1 else "Pd"

    @property
    def is_ground(self) -> bool:
        if self.node_target != 0:
            return False
        return self.parity == "even" if self.dimension == 1 else self.angular_index == 0



@dataclass
class SolverSettings:
    """Mesh resolution and scan/refinement controls."""

    core_step: float = 0.005
    stretch: float = 1.02
    max_step: float = 0.25
    bracket_dv: float | None = None  # defaults to 0.05 * m
    root_tol: float = 1e-10
    tail_efolds: float = 35.0
    origin_offset: float = 1e-6
    max_coupling: float | None = None  # defaults to 50 * m
    overflow_cap: float = 1e250

    def __post_init__(self):
        positives = [
            self.core_step,
            self.max_step,
            self.root_tol,
            self.tail_efolds,
            self.origin_offset,
            self.overflow_cap,
        ]
        if self.bracket_dv is not None:
            positives.append(self.bracket_dv)
        if self.max_coupling is not None:
            positives.append(self.max_coupling)
        if any(p <= 0 for p in positives) or self.stretch <= 1.0:
            raise ValueError("solver settings must be positive (stretch > 1)")


@dataclass
class SolveDiagnostics:
    """Scan and refinement history plus the post-solve check values."""

    scan: list[tuple[float, float, int]] = field(default_factory=list)
    bracket: tuple[float, float] | None = None
    match_index: int = 0
    mesh_size: int = 0
    norm: float = 0.0
    tail_slope: float = 0.0
    max_monotone_rise: float = 0.0
    lemma_lhs: float = 0.0
    lemma_rhs: float = 0.0


@dataclass
class CouplingSolution:
    """Converged coupling with the normalized wavefunction samples.

    ``wavefunction`` holds phi for d = 1 and the radial factor R for
    d >= 2; ``reduced`` always holds the reduced profile u solving the
    first-derivative-free equation (u = phi in one dimension).  The
    normalization is the full-line integral of phi^2 for d = 1 and the
    r^(d-1)-weighted radial integral of R^2 for d >= 2, both computed by
    the trapezoid rule on the solution mesh.
    """

    coupling: float
    query: SpectralQuery
    shape: PotentialShape
    x: np.ndarray
    wavefunction: np.ndarray
    derivative: np.ndarray
    reduced: np.ndarray
    reduced_derivative: np.ndarray
    kappa: float
    node_count: int
    residual: float
    diagnostics: SolveDiagnostics


@dataclass
class CurvePoint:
    energy: float
    coupling: float | None
    status: str
    message: str = ""


@dataclass
class SpectralCurve:
    """Ordered (E, v) samples with per-point status annotations."""

    points: list[CurvePoint]

    def __post_init__(self):
        energies = [p.energy for p in self.points]
        if any(b <= a for a, b in zip(energies, energies[1:])):
            raise ValueError("curve energies must be strictly increasing")

    def __len__(self) -> int:
        return len(self.points)

    def couplings(self) -> list[float | None]:
        return [p.coupling for p in self.points]


def critical_coupling(shape: PotentialShape, query: SpectralQuery) -> float:
    """Largest coupling with a real power-law start at the origin.

    Beyond it the attractive inverse-square tail of the squared potential
    overwhelms the centrifugal repulsion and the indicial exponent turns
    complex.  Bounded shapes have no cap.
    """
    strength = -shape.singularity_index
    if strength <= 0.0 or query.dimension == 1:
        return math.inf
    return math.sqrt(query.centrifugal + 0.25) / strength


def _indicial_exponent(query: SpectralQuery, strength: float, v: float) -> float:
    disc = query.centrifugal + 0.25 - (v * strength) ** 2
    if disc < 0.0:
        raise SupercriticalCoupling(
            f"supercritical coupling: v = {v:g} exceeds the regular-start cap "
            f"{math.sqrt(query.centrifugal + 0.25) / strength:g}"
        )
    return 0.5 + math.sqrt(disc)


def effective_coefficient(
    shape: PotentialShape, query: SpectralQuery, v: float, x
):
    """Coefficient of the reduced second-order equation at coordinate x.

    Returns m^2 - (E - v f(x))^2 plus, for d >= 2, the reduced
    centrifugal term [(d-1)(d-3)/4 + l(l+d-2)] / x^2.
    """
    f = potentials.evaluate(shape, x)
    base = query.mass**2 - (query.energy - v * f) ** 2
    L = query.centrifugal
    if L != 0.0:
        base = base + L / np.asarray(x, dtype=float) ** 2
    return base


def _turning_point(
    shape: PotentialShape, query: SpectralQuery, v: float, start: float
) -> float | None:
    """Outermost coordinate where v |f| = m - E, or None when the potential
    never becomes classically allowed at this coupling."""
    target = (query.mass - query.energy) / v
    probe = max(start, 1e-6)
    if abs(potentials.evaluate(shape, probe)) <= target:
        return None
    lo = probe
    hi = max(2.0 * probe, 1.0)
    for _ in range(80):
        if abs(potentials.evaluate(shape, hi)) <= target:
            break
        lo, hi = hi, hi * 2.0
    else:
        return None
    for _ in range(120):
        mid = 0.5 * (lo + hi)
        if abs(potentials.evaluate(shape, mid)) <= target:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-12 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def _half_depth_point(shape: PotentialShape, start: float) -> float:
    probe = max(start, 1e-6)
    f0 = abs(potentials.evaluate(shape, probe))
    if f0 == 0.0:
        return 1.0
    lo, hi = probe, max(2.0 * probe, 1.0)
    for _ in range(80):
        if abs(potentials.evaluate(shape, hi)) <= 0.5 * f0:
            break
        lo, hi = hi, hi * 2.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if abs(potentials.evaluate(shape, mid)) <= 0.5 * f0:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass
class _Frame:
    """Frozen mesh + potential samples for one shooting configuration.

    Per-step potential samples carry one-sided limits at breakpoints
    (f_start is the right limit at each step's left endpoint, f_end the
    left limit at its right endpoint) so every RK4 step sees a smooth
    coefficient.  ``f_nodes`` keeps plain node values for diagnostics.
    """

    x: np.ndarray
    f_nodes: np.ndarray
    f_start: np.ndarray
    f_mid: np.ndarray
    f_end: np.ndarray
    centrifugal_nodes: np.ndarray
    centrifugal_mid: np.ndarray
    match_index: int | None = None


def _mesh_nodes(
    shape: PotentialShape, query: SpectralQuery, v: float, s: SolverSettings
) -> np.ndarray:
    kappa = query.kappa
    start = 0.0 if query.dimension == 1 else s.origin_offset
    refine_origin = query.dimension >= 2 and (
        potentials.is_singular(shape) or query.centrifugal != 0.0
    )

    turn = _turning_point(shape, query, v, start)
    anchor = turn if turn is not None else _half_depth_point(shape, start)
    core_end = anchor + 2.0 / kappa
    x_max = min(anchor + s.tail_efolds / kappa, MESH_EXTENT_CAP)
    x_max = max(x_max, core_end + 1.0)

    nodes = [start]
    x = start
    if refine_origin:
        # log-spaced head until the local step reaches the core step
        while x * (s.stretch - 1.0) < s.core_step and x < core_end:
            x *= s.stretch
            nodes.append(x)
    while x < core_end:
        x += s.core_step
        nodes.append(x)
    h = s.core_step
    while x < x_max:
        h = min(h * s.stretch, s.max_step)
        x += h
        nodes.append(x)
    nodes[-1] = x_max

    arr = np.asarray(nodes)
    bps = [b for b in potentials.breakpoints(shape) if start < b < x_max]
    if bps:
        arr = np.concatenate([arr, np.asarray(bps)])
    arr = np.unique(arr)
    # drop near-duplicate nodes created by breakpoint insertion
    keep = np.concatenate([[True], np.diff(arr) > 1e-12])
    return arr[keep]


def _build_frame(
    shape: PotentialShape, query: SpectralQuery, v: float, s: SolverSettings
) -> _Frame:
    x = _mesh_nodes(shape, query, v, s)
    mids = 0.5 * (x[:-1] + x[1:])
    f_nodes = np.asarray(potentials.evaluate(shape, x), dtype=float)
    f_mid = np.asarray(potentials.evaluate(shape, mids), dtype=float)
    if potentials.breakpoints(shape):
        # one-sided limits via a nudge far below any feature scale
        eps = 1e-12 * np.maximum(1.0, x)
        f_start = np.asarray(potentials.evaluate(shape, x[:-1] + eps[:-1]), dtype=float)
        f_end = np.asarray(potentials.evaluate(shape, x[1:] - eps[1:]), dtype=float)
    else:
        f_start = f_nodes[:-1]
        f_end = f_nodes[1:]
    L = query.centrifugal
    if L != 0.0:
        cn = L / x**2
        cm = L / mids**2
    else:
        cn = np.zeros_like(x)
        cm = np.zeros_like(mids)
    return _Frame(x, f_nodes, f_start, f_mid, f_end, cn, cm)


def _coefficients(frame: _Frame, query: SpectralQuery, v: float):
    """Node, per-step-start, midpoint, and per-step-end coefficient arrays."""
    m2 = query.mass**2
    E = query.energy

    def coeff(f, cent):
        return m2 - (E - v * f) ** 2 + cent

    cn = coeff(frame.f_nodes, frame.centrifugal_nodes)
    c_start = coeff(frame.f_start, frame.centrifugal_nodes[:-1])
    c_mid = coeff(frame.f_mid, frame.centrifugal_mid)
    c_end = coeff(frame.f_end, frame.centrifugal_nodes[1:])
    return cn, c_start, c_mid, c_end


def _choose_match(c_nodes: np.ndarray, kappa_sq: float) -> int:
    inside = np.nonzero(c_nodes <= 0.0)[0]
    if inside.size:
        idx = int(inside[-1])
    else:
        midline = 0.5 * (float(np.min(c_nodes)) + kappa_sq)
        below = np.nonzero(c_nodes <= midline)[0]
        idx = int(below[-1]) if below.size else 1
    return min(max(idx, 1), c_nodes.size - 2)


@dataclass
class ShootResult:
    """One shot at fixed coupling: normalized Wronskian mismatch at the
    matching point, interior node count of the outward branch, and the two
    raw branches."""

    mismatch: float
    node_count: int
    v: float
    frame: _Frame
    match_index: int
    out_value: np.ndarray
    out_derivative: np.ndarray
    in_value: np.ndarray
    in_derivative: np.ndarray
    diverged: bool


def _outward_start(
    shape: PotentialShape, query: SpectralQuery, v: float, r0: float
) -> tuple[float, float]:
    if query.dimension == 1:
        return (1.0, 0.0) if query.parity == "even" else (0.0, 1.0)
    strength = -shape.singularity_index
    if strength > 0.0:
        s = _indicial_exponent(query, strength, v)
    else:
        s = query.angular_index + (query.dimension - 1) / 2.0
    if s == 0.0:
        return 1.0, 0.0
    return r0**s, s * r0 ** (s - 1.0)


def shoot(
    shape: PotentialShape,
    query: SpectralQuery,
    v: float,
    settings: SolverSettings | None = None,
    frame: _Frame | None = None,
) -> ShootResult:
    """Integrate outward from the origin and inward from the tail at fixed
    coupling; the mismatch is the Wronskian of the branches at the
    outermost classical turning point (scale-normalized, sign preserved).

    A supercritical singular coupling raises ``SupercriticalCoupling``;
    divergence before the matching point reports the mismatch from the
    last finite node instead of failing.
    """
    s = settings or SolverSettings()
    if v <= 0.0:
        raise ValueError("coupling v must be positive")
    cap = critical_coupling(shape, query)
    if v > cap * (1.0 + 1e-12):
        raise SupercriticalCoupling(
            f"supercritical coupling: v = {v:g} > critical {cap:g}"
        )
    if frame is None:
        frame = _build_frame(shape, query, v, s)
    x = frame.x
    cn, c_start, c_mid, c_end = _coefficients(frame, query, v)
    match = frame.match_index
    if match is None:
        match = _choose_match(cn, query.kappa**2)

    y0, p0 = _outward_start(shape, query, v, float(x[0]))
    out_val, out_der, out_nodes, out_last = propagate_coefficients(
        x[: match + 1], c_start[:match], c_mid[:match], c_end[:match],
        y0, p0, s.overflow_cap,
    )
    diverged = out_last < match
    m_eff = min(match, max(out_last, 1))

    # inward branch: reverse the tail segment so the kernel still marches
    # in increasing coordinate, then flip derivative signs back.  Reversal
    # swaps the roles of the step-start and step-end samples.
    xr = x[m_eff:]
    s_coord = xr[-1] - xr[::-1]
    cs_r = c_end[m_eff:][::-1]
    cm_r = c_mid[m_eff:][::-1]
    ce_r = c_start[m_eff:][::-1]
    tail_rate = math.sqrt(max(float(cn[-1]), 0.25 * query.kappa**2))
    in_val_r, in_der_r, _, in_last = propagate_coefficients(
        s_coord, cs_r, cm_r, ce_r, 1.0, tail_rate, s.overflow_cap
    )
    if in_last < s_coord.size - 1:
        raise IntegrationDiverged(
            f"inward integration diverged at x = {xr[::-1][in_last]:.6g}",
            last_position=float(xr[::-1][in_last]),
        )
    in_val = in_val_r[::-1]
    in_der = -in_der_r[::-1]

    uo, po = float(out_val[m_eff]), float(out_der[m_eff])
    ui, pi = float(in_val[0]), float(in_der[0])
    raw = uo * pi - po * ui
    scale = abs(uo * pi) + abs(po * ui) + 1e-300
    return ShootResult(
        mismatch=raw / scale,
        node_count=int(out_nodes),
        v=v,
        frame=frame,
        match_index=m_eff,
        out_value=out_val[: m_eff + 1],
        out_derivative=out_der[: m_eff + 1],
        in_value=in_val,
        in_derivative=in_der,
        diverged=diverged,
    )


def _scan_grid(dv: float, v_max: float) -> np.ndarray:
    grid = np.arange(dv, v_max * (1.0 + 1e-12), dv)
    if grid.size == 0 or grid[-1] < v_max * (1.0 - 1e-9):
        grid = np.append(grid, v_max)
    # tiny leading probe so a root below the first step still gets bracketed
    return np.concatenate([[min(1e-3 * dv, 0.5 * grid[0])], grid])


def _assemble_solution(
    shape: PotentialShape,
    query: SpectralQuery,
    shot: ShootResult,
    diagnostics: SolveDiagnostics,
) -> CouplingSolution:
    frame = shot.frame
    x = frame.x
    m = shot.match_index
    uo, ui = shot.out_value, shot.in_value
    po, pi = shot.out_derivative, shot.in_derivative
    if abs(uo[m]) < 1e-280:
        raise StateIdentificationFailure("outward branch vanishes at the matching point")
    alpha = ui[0] / uo[m]
    u = np.concatenate([alpha * uo[:m], ui])
    du = np.concatenate([alpha * po[:m], pi])

    d = query.dimension
    norm_sq = np.trapezoid(u * u, x)
    if d == 1:
        norm_sq *= 2.0  # full-line normalization of an even/odd state
    scale = 1.0 / math.sqrt(norm_sq)
    if u[min(m, u.size - 1)] < 0:
        scale = -scale
    u *= scale
    du *= scale

    if d == 1:
        wf, dwf = u, du
    else:
        pw = (d - 1) / 2.0
        grow = x**-pw
        wf = u * grow
        dwf = (du - pw * u / x) * grow

    diagnostics.match_index = m
    diagnostics.mesh_size = x.size
    weighted = u * u
    diagnostics.norm = float((2.0 if d == 1 else 1.0) * np.trapezoid(weighted, x))

    # tail decay rate over the last decade of the mesh, on the reduced profile
    tail_mask = x >= x[-1] / 10.0
    xt = x[tail_mask]
    ut = np.abs(u[tail_mask]) + 1e-320
    diagnostics.tail_slope = float(np.polyfit(xt, np.log(ut), 1)[0])

    f_nodes = frame.f_nodes
    diagnostics.lemma_lhs = float(query.energy * np.trapezoid(f_nodes * weighted, x))
    diagnostics.lemma_rhs = float(shot.v * np.trapezoid(f_nodes**2 * weighted, x))

    node_count = shot.node_count
    if node_count == 0 and query.is_ground:
        # the nodeless even (or s-wave) state must be non-increasing; odd
        # or higher-angular states legitimately rise away from the origin
        rises = np.diff(wf)
        diagnostics.max_monotone_rise = float(max(np.max(rises), 0.0)) if rises.size else 0.0
        tol = 1e-8 * float(np.max(np.abs(wf)))
        if diagnostics.max_monotone_rise > tol:
            raise StateIdentificationFailure(
                f"ground-state wavefunction rises by {diagnostics.max_monotone_rise:.3g}"
            )
    if diagnostics.lemma_lhs >= diagnostics.lemma_rhs:
        raise StateIdentificationFailure(
            "energy-weighted potential integral fails the bound-state inequality"
        )

    return CouplingSolution(
        coupling=shot.v,
        query=query,
        shape=shape,
        x=x,
        wavefunction=wf,
        derivative=dwf,
        reduced=u,
        reduced_derivative=du,
        kappa=query.kappa,
        node_count=node_count,
        residual=abs(shot.mismatch),
        diagnostics=diagnostics,
    )


def solve_coupling(
    shape: PotentialShape,
    query: SpectralQuery,
    settings: SolverSettings | None = None,
) -> CouplingSolution:
    """Smallest coupling whose bound state at this energy has the requested
    node count.

    Scans v upward in steps of ``bracket_dv`` until the shooting mismatch
    changes sign, refines the bracket on a frozen mesh, then normalizes
    the glued wavefunction and verifies the ground-state checks
    (monotone profile, energy-weighted inequality).  Raises
    ``NoBoundState`` when no sign change occurs below the scan cap and
    ``StateIdentificationFailure`` when a refined root has the wrong node
    count.
    """
    s = settings or SolverSettings()
    report = potentials.validate(shape, query.class_name, query.dimension)
    if not report.admitted:
        raise ClassViolation(report.describe(), report=report)

    dv = s.bracket_dv if s.bracket_dv is not None else 0.05 * query.mass
    v_cap = s.max_coupling if s.max_coupling is not None else 50.0 * query.mass
    crit = critical_coupling(shape, query)
    capped_by_crit = crit < v_cap
    v_cap = min(v_cap, crit)

    diagnostics = SolveDiagnostics()
    prev: tuple[float, float, int] | None = None
    for v in _scan_grid(dv, v_cap):
        shot = shoot(shape, query, float(v), s)
        diagnostics.scan.append((float(v), shot.mismatch, shot.node_count))
        if prev is not None and prev[1] * shot.mismatch <= 0.0:
            refined = _refine(shape, query, prev[0], float(v), s)
            if refined is not None:
                if refined.node_count == query.node_target:
                    diagnostics.bracket = (prev[0], float(v))
                    return _assemble_solution(shape, query, refined, diagnostics)
                if refined.node_count > query.node_target:
                    raise StateIdentificationFailure(
                        f"state identification failure: refined root at v = {refined.v:.6g} "
                        f"has {refined.node_count} nodes, wanted {query.node_target}"
                    )
        prev = (float(v), shot.mismatch, shot.node_count)

    detail = (
        f"scan capped at the supercritical threshold v = {v_cap:g}"
        if capped_by_crit
        else f"scan reached v = {v_cap:g}"
    )
    raise NoBoundState(f"no bound state at this energy (E = {query.energy:g}; {detail})")


def _refine(
    shape: PotentialShape,
    query: SpectralQuery,
    v_lo: float,
    v_hi: float,
    s: SolverSettings,
) -> ShootResult | None:
    """Brent refinement on a mesh and matching index frozen at the bracket top."""
    base = shoot(shape, query, v_hi, s)
    frame = base.frame
    frame.match_index = base.match_index

    def objective(v: float) -> float:
        return shoot(shape, query, v, s, frame=frame).mismatch

    w_lo = objective(v_lo)
    w_hi = base.mismatch
    if w_lo * w_hi > 0.0:
        v_lo = max(v_lo - 0.5 * (v_hi - v_lo), 1e-12)
        w_lo = objective(v_lo)
        if w_lo * w_hi > 0.0:
            return None
    root = find_root(objective, Bracket(v_lo, v_hi, w_lo, w_hi), tol=s.root_tol)
    return shoot(shape, query, root, s, frame=frame)


def _worker_count(n_items: int) -> int:
    try:
        limit = int(os.environ.get(THREADS_ENV_VAR, "1"))
    except ValueError:
        limit = 1
    return max(1, min(limit, n_items))


def sweep_curve(
    shape: PotentialShape,
    energies: Sequence[float],
    *,
    mass: float = 1.0,
    dimension: int = 1,
    angular_index: int = 0,
    parity: str | None = None,
    node_target: int = 0,
    settings: SolverSettings | None = None,
) -> SpectralCurve:
    """Coupling curve over an energy grid; per-point failures are recorded
    in the status column without aborting the sweep."""

    def solve_one(E: float) -> CurvePoint:
        try:
            q = SpectralQuery(
                energy=float(E),
                mass=mass,
                dimension=dimension,
                angular_index=angular_index,
                parity=parity,
                node_target=node_target,
            )
            sol = solve_coupling(shape, q, settings)
            return CurvePoint(float(E), sol.coupling, "ok")
        except NoBoundState as exc:
            return CurvePoint(float(E), None, "no-bound-state", str(exc))
        except SupercriticalCoupling as exc:
            return CurvePoint(float(E), None, "supercritical", str(exc))
        except KgError as exc:
            return CurvePoint(float(E), None, "failed", str(exc))

    energies = [float(E) for E in energies]
    workers = _worker_count(len(energies))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(solve_one, energies))
    else:
        points = [solve_one(E) for E in energies]
    return SpectralCurve(points)


def pointwise_energy_residual(
    solution: CouplingSolution, threshold: float = 1e-4
) -> float:
    """Largest deviation from the pointwise energy identity
    E = v f(x) + sqrt(m^2 - phi''/phi) over interior nodes where the
    normalized wavefunction exceeds ``threshold``.

    With phi'' taken from the differential equation itself, the square
    root evaluates to |E - v f(x)|, so the residual measures where the
    positive branch of the identity holds on the support of the state.
    """
    q = solution.query
    x = solution.x[1:-1]
    wf = solution.wavefunction[1:-1]
    mask = wf > threshold
    if not np.any(mask):
        return 0.0
    f = np.asarray(potentials.evaluate(solution.shape, x[mask]), dtype=float)
    shifted = q.energy - solution.coupling * f
    return float(np.max(np.abs(shifted - np.abs(shifted))))
