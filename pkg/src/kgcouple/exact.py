"""Closed-form coupling eigenvalue for the one-dimensional square well.

Inside the well the wave equation has the constant coefficient
m^2 - (E + vA)^2, outside m^2 - E^2, so the even bound state is a cosine
core glued to a decaying exponential.  Continuity of the logarithmic
derivative at the edge gives the matching condition

    k tan(k t) = kappa,   k^2 = (E + vA)^2 - m^2,   kappa^2 = m^2 - E^2,

solved per tangent branch in k; the coupling is recovered as
v = (sqrt(m^2 + k^2) - E) / A.  This parametrization avoids the double
root structure in v.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvalidQuery
from .numerics import Bracket, find_root


@dataclass(frozen=True)
class SquareWellSpec:
    """Well of depth scale A (shape value -A on |x| <= t) at fixed energy."""

    width: float
    depth: float
    mass: float
    energy: float

    def __post_init__(self):
        if self.width <= 0 or self.depth <= 0 or self.mass <= 0:
            raise ValueError("square well spec needs t, A, m > 0")
        if abs(self.energy) >= self.mass:
            raise InvalidQuery(
                f"square well spec requires |E| < m, got E = {self.energy}, m = {self.mass}"
            )


def square_well_coupling(spec: SquareWellSpec, node_target: int = 0) -> float:
    """Coupling of the even bound state with ``node_target`` interior nodes.

    The ground state (node_target = 0) sits on the branch k t in
    (0, pi/2); each additional node shifts the branch by pi.  A root
    exists on the first branch for every |E| < m.
    """
    if node_target < 0:
        raise ValueError("node_target must be >= 0")
    t, A, m, E = spec.width, spec.depth, spec.mass, spec.energy
    kappa = math.sqrt(m * m - E * E)

    def mismatch(k: float) -> float:
        return k * math.tan(k * t) - kappa

    lo = (node_target * math.pi + 1e-12) / t
    hi = (node_target * math.pi + math.pi / 2.0 - 1e-12) / t
    k = find_root(mismatch, Bracket.from_function(mismatch, lo, hi), tol=1e-14)
    return (math.hypot(m, k) - E) / A
