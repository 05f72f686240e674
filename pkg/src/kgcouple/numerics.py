"""Foundational numerics: fixed-mesh IVP integration, bracketed root
finding, and weighted adaptive quadrature.

All operations are pure and reentrant; nothing here keeps mutable state
between calls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from . import _kernel
from .errors import (
    IntegrationDiverged,
    InvalidBracket,
    NoConvergence,
    QuadratureFailure,
)

DEFAULT_ROOT_TOL = 1e-10
ROOT_ITERATION_CAP = 200
OVERFLOW_CAP = 1e250
TAIL_TRUNCATION_RATIO = 1e-14  # stop infinite integrals once |g| drops below peak * this


@dataclass
class Mesh:
    """Strictly increasing coordinate samples (natural units, hbar = c = 1).

    ``origin_offset`` records the small positive start coordinate used for
    problems whose coefficient is singular at the origin.
    """

    nodes: np.ndarray
    origin_offset: float = 0.0

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=float)
        if self.nodes.ndim != 1 or self.nodes.size < 16:
            raise ValueError("mesh needs at least 16 nodes")
        if self.nodes[0] < 0.0:
            raise ValueError("mesh must start at a non-negative coordinate")
        if not np.all(np.diff(self.nodes) > 0.0):
            raise ValueError("mesh nodes must be strictly increasing")
        if self.origin_offset < 0.0:
            raise ValueError("origin_offset must be non-negative")

    def __len__(self) -> int:
        return self.nodes.size

    @property
    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.nodes[:-1] + self.nodes[1:])

    @classmethod
    def uniform(cls, start: float, stop: float, num: int) -> "Mesh":
        return cls(np.linspace(start, stop, num))

    @classmethod
    def refined(cls, coarse: "Mesh") -> "Mesh":
        """Mesh with every interval of ``coarse`` split in half."""
        nodes = np.sort(np.concatenate([coarse.nodes, coarse.midpoints]))
        return cls(nodes, origin_offset=coarse.origin_offset)


@dataclass
class IvpState:
    """Wavefunction value and derivative at one coordinate."""

    position: float
    value: float
    derivative: float

    def __post_init__(self):
        for name in ("position", "value", "derivative"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"IvpState.{name} must be finite")


@dataclass
class Trajectory:
    """Sampled solution of y'' = c(x) y on a mesh."""

    x: np.ndarray
    value: np.ndarray
    derivative: np.ndarray
    error_estimate: float | None = None

    def __len__(self) -> int:
        return self.x.size

    def state_at(self, index: int) -> IvpState:
        return IvpState(
            float(self.x[index]), float(self.value[index]), float(self.derivative[index])
        )


@dataclass
class Bracket:
    """Sign-changing interval for root refinement."""

    lo: float
    hi: float
    f_lo: float
    f_hi: float

    def __post_init__(self):
        if not (self.lo < self.hi):
            raise InvalidBracket(f"bracket endpoints out of order: [{self.lo}, {self.hi}]")
        if not all(map(math.isfinite, (self.lo, self.hi, self.f_lo, self.f_hi))):
            raise InvalidBracket("bracket endpoints and values must be finite")
        if self.f_lo * self.f_hi > 0.0:
            raise InvalidBracket(
                f"invalid bracket: no sign change on [{self.lo}, {self.hi}] "
                f"(f_lo={self.f_lo:.3g}, f_hi={self.f_hi:.3g})"
            )

    @classmethod
    def from_function(cls, fn: Callable[[float], float], lo: float, hi: float) -> "Bracket":
        return cls(lo, hi, fn(lo), fn(hi))


def _coefficient_samples(rhs: Callable, xs: np.ndarray) -> np.ndarray:
    try:
        c = np.asarray(rhs(xs), dtype=float)
        if c.shape == xs.shape:
            return c
    except (TypeError, ValueError):
        pass
    return np.array([float(rhs(float(x))) for x in xs])


def propagate_coefficients(
    x: np.ndarray,
    c_start: np.ndarray,
    c_mid: np.ndarray,
    c_end: np.ndarray,
    y0: float,
    p0: float,
    cap: float = OVERFLOW_CAP,
):
    """Raw RK4 propagation given per-step coefficient samples (left
    endpoint, midpoint, right endpoint; one-sided limits at
    discontinuities).

    Returns (value, derivative, node_count, last_index); ``last_index`` is
    smaller than ``len(x) - 1`` when the trajectory overflowed.
    """
    return _kernel.propagate(
        np.ascontiguousarray(x, dtype=float),
        np.ascontiguousarray(c_start, dtype=float),
        np.ascontiguousarray(c_mid, dtype=float),
        np.ascontiguousarray(c_end, dtype=float),
        float(y0),
        float(p0),
        float(cap),
    )


def integrate_ivp(
    rhs: Callable,
    start: IvpState,
    mesh: Mesh,
    estimate_error: bool = True,
) -> Trajectory:
    """Integrate y'' = rhs(x) * y across ``mesh`` with classical RK4.

    ``start.position`` must coincide with the first mesh node.  The error
    estimate comes from re-integrating on the step-halved mesh and taking
    the largest deviation at the shared nodes.  Overflow raises
    ``IntegrationDiverged`` carrying the trajectory up to the last finite
    node.
    """
    x = mesh.nodes
    if abs(start.position - x[0]) > 1e-12 * max(1.0, abs(x[0])):
        raise ValueError("start.position must equal the first mesh node")
    c_nodes = _coefficient_samples(rhs, x)
    c_mid = _coefficient_samples(rhs, mesh.midpoints)
    if not (np.all(np.isfinite(c_nodes)) and np.all(np.isfinite(c_mid))):
        raise ValueError("rhs coefficient must be finite on the mesh")

    val, der, _, last = propagate_coefficients(
        x, c_nodes[:-1], c_mid, c_nodes[1:], start.value, start.derivative
    )
    if last < x.size - 1:
        partial = Trajectory(x[: last + 1], val[: last + 1], der[: last + 1])
        raise IntegrationDiverged(
            f"integration diverged at x = {x[last]:.6g}",
            last_position=float(x[last]),
            trajectory=partial,
        )

    err = None
    if estimate_error:
        fine = Mesh.refined(mesh)
        cf_nodes = _coefficient_samples(rhs, fine.nodes)
        cf_mid = _coefficient_samples(rhs, fine.midpoints)
        fval, _, _, flast = propagate_coefficients(
            fine.nodes, cf_nodes[:-1], cf_mid, cf_nodes[1:], start.value, start.derivative
        )
        if flast == fine.nodes.size - 1:
            err = float(np.max(np.abs(fval[::2] - val)))
    return Trajectory(x, val, der, error_estimate=err)


def find_root(
    objective: Callable[[float], float],
    bracket: Bracket,
    tol: float = DEFAULT_ROOT_TOL,
) -> float:
    """Bisection-safeguarded inverse interpolation (Brent) inside ``bracket``.

    ``tol`` is relative; the final bracket width is below
    ``tol * max(1, |root|)``.
    """
    if bracket.f_lo == 0.0:
        return bracket.lo
    if bracket.f_hi == 0.0:
        return bracket.hi
    root, res = brentq(
        objective,
        bracket.lo,
        bracket.hi,
        xtol=tol,
        rtol=max(tol, 4 * np.finfo(float).eps),
        maxiter=ROOT_ITERATION_CAP,
        full_output=True,
        disp=False,
    )
    if not res.converged:
        raise NoConvergence(
            f"no convergence after {ROOT_ITERATION_CAP} iterations on "
            f"[{bracket.lo}, {bracket.hi}]"
        )
    return float(root)


def _tail_cutoff(g: Callable[[float], float], lower: float) -> float:
    """Truncation point for a decaying integrand: first probe beyond the
    peak where |g| has fallen below TAIL_TRUNCATION_RATIO * peak."""
    t = max(lower, 1e-3)
    peak = abs(g(t))
    quiet = 0
    for _ in range(400):
        t *= 1.35
        gt = abs(g(t))
        peak = max(peak, gt)
        if peak > 0.0 and gt < TAIL_TRUNCATION_RATIO * peak:
            quiet += 1
            if quiet >= 3:
                return t
        else:
            quiet = 0
    raise QuadratureFailure(
        "quadrature failure: integrand does not decay on the semi-infinite tail"
    )


def integrate_weighted(
    fn: Callable[[float], float],
    lower: float,
    upper: float,
    weight_power: int = 0,
    points: tuple[float, ...] = (),
) -> float:
    """Adaptive quadrature of fn(t) * t**weight_power over [lower, upper].

    ``upper`` may be ``math.inf`` for integrands that decay (the caller
    guarantees decay); the tail is truncated once the integrand has dropped
    fourteen orders of magnitude below its running peak.  ``points`` marks
    known non-smooth locations.  Raises ``QuadratureFailure`` with the
    partial estimate when refinement does not converge.
    """
    if weight_power < 0 or weight_power != int(weight_power):
        raise ValueError("weight_power must be a non-negative integer")
    p = int(weight_power)
    if p == 0:
        g = fn
    else:
        def g(t, _fn=fn, _p=p):
            return _fn(t) * t**_p

    if math.isinf(upper):
        upper = _tail_cutoff(g, lower)
    if upper <= lower:
        return 0.0

    pts = sorted(q for q in points if lower < q < upper)
    value, err = quad(
        g, lower, upper, points=pts or None, limit=200, epsabs=1e-13, epsrel=1e-12
    )
    scale = max(1.0, abs(value))
    if err > 1e-10 * scale:
        raise QuadratureFailure(
            f"quadrature failure: error estimate {err:.3g} exceeds tolerance",
            partial=value,
            error=err,
        )
    return float(value)
