"""Catalog, evaluation, and class validation of attractive potential shapes.

A shape f is the dimensionless profile multiplied by the coupling v > 0 to
form the potential V = v f.  Admissible shapes are non-positive, attractive
(monotone non-decreasing on [0, inf)), and vanish at infinity; the radial
class additionally admits inverse-distance singularities at the origin.
Shapes are immutable after construction and every operation here is
reentrant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    ClassViolation,
    NonDifferentiablePoint,
    NotCoulombLike,
    SingularEvaluation,
)

AUDIT_POINTS = 512
_MONOTONE_SLACK = 1e-12
_DERIVATIVE_EDGE_TOL = 1e-9

FAMILIES = (
    "square_well",
    "exponential",
    "gaussian",
    "sech_squared",
    "yukawa",
    "hulthen",
    "coulomb_like_w",
    "piecewise_table",
    "blend",
)

_SINGULAR_FAMILIES = ("yukawa", "hulthen", "coulomb_like_w")


@dataclass
class PotentialShape:
    """A validated attractive shape f with named parameters.

    ``singularity_index`` is the inverse-distance strength
    lim_{r->0} r f(r) (0 for bounded shapes, negative for Coulomb-like
    ones); it equals the d = 3 origin limit used in radial class checks.
    ``table`` holds the knots of a piecewise_table shape and ``children``
    the two endpoint shapes of a blend.
    """

    family: str
    params: dict[str, float] = field(default_factory=dict)
    singularity_index: float = 0.0
    table: tuple[np.ndarray, np.ndarray] | None = None
    children: tuple["PotentialShape", "PotentialShape"] | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown potential family: {self.family!r}")

    def label(self) -> str:
        inner = ", ".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"{self.family}({inner})"


def square_well(A: float = 1.0, t: float = 1.0) -> PotentialShape:
    """f(x) = -A for x <= t, 0 beyond."""
    if A < 0 or t <= 0:
        raise ValueError("square well needs depth A >= 0 and width t > 0")
    return PotentialShape("square_well", {"A": float(A), "t": float(t)})


def exponential(A: float = 1.0, q: float = 1.0) -> PotentialShape:
    """f(x) = -A exp(-q x)."""
    if A < 0 or q <= 0:
        raise ValueError("exponential needs depth A >= 0 and rate q > 0")
    return PotentialShape("exponential", {"A": float(A), "q": float(q)})


def gaussian(A: float = 1.0, q: float = 0.8) -> PotentialShape:
    """f(x) = -A exp(-q x^2)."""
    if A < 0 or q <= 0:
        raise ValueError("gaussian needs depth A >= 0 and range q > 0")
    return PotentialShape("gaussian", {"A": float(A), "q": float(q)})


def sech_squared(beta: float = 3.0, q: float = 0.35) -> PotentialShape:
    """f(x) = -beta / (exp(-q x) + exp(q x))^2, depth beta/4 at the origin."""
    if beta < 0 or q <= 0:
        raise ValueError("sech_squared needs strength beta >= 0 and rate q > 0")
    return PotentialShape("sech_squared", {"beta": float(beta), "q": float(q)})


def yukawa(a: float = 0.5) -> PotentialShape:
    """f(r) = -exp(-a r) / r, screened inverse-distance well."""
    if a <= 0:
        raise ValueError("yukawa needs screening a > 0")
    return PotentialShape("yukawa", {"a": float(a)}, singularity_index=-1.0)


def hulthen(delta: float = 1.0) -> PotentialShape:
    """f(r) = -1 / (exp(delta r) - 1), behaving as -1/(delta r) at the origin."""
    if delta <= 0:
        raise ValueError("hulthen needs screening delta > 0")
    return PotentialShape(
        "hulthen", {"delta": float(delta)}, singularity_index=-1.0 / float(delta)
    )


def coulomb_like(strength: float = 0.5) -> PotentialShape:
    """f(r) = -strength / r: the constant-w member of the -w(r)/r family."""
    if strength <= 0:
        raise ValueError("coulomb_like needs strength > 0")
    return PotentialShape(
        "coulomb_like_w", {"strength": float(strength)}, singularity_index=-float(strength)
    )


def piecewise_table(xs: Sequence[float], fs: Sequence[float]) -> PotentialShape:
    """Monotone linear interpolation through (xs, fs); zero beyond the last knot.

    The table itself must satisfy the class conditions: non-positive,
    non-decreasing values ending at 0.
    """
    x = np.asarray(xs, dtype=float)
    f = np.asarray(fs, dtype=float)
    if x.ndim != 1 or x.size < 2 or x.shape != f.shape:
        raise ValueError("piecewise table needs matching 1-d arrays with >= 2 knots")
    if x[0] < 0 or not np.all(np.diff(x) > 0):
        raise ValueError("piecewise table knots must be non-negative and increasing")
    if np.any(f > 0) or np.any(np.diff(f) < 0) or f[-1] != 0.0:
        raise ValueError("piecewise table values must be <= 0, non-decreasing, ending at 0")
    return PotentialShape("piecewise_table", {}, table=(x, f))


def blend(f1: PotentialShape, f2: PotentialShape, a: float) -> PotentialShape:
    """Linear interpolation f1 + a (f2 - f1) between two shapes."""
    if not 0.0 <= a <= 1.0:
        raise ValueError("blend parameter a must lie in [0, 1]")
    idx = (1.0 - a) * f1.singularity_index + a * f2.singularity_index
    return PotentialShape("blend", {"a": float(a)}, singularity_index=idx, children=(f1, f2))


def is_singular(shape: PotentialShape) -> bool:
    return shape.singularity_index < 0.0


def evaluate(shape: PotentialShape, x):
    """Shape value f(x) <= 0 for x >= 0 (callers pass |x| for the even case).

    Accepts scalars or arrays.  Evaluating a Coulomb-like shape at x = 0
    raises ``SingularEvaluation``.
    """
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if np.any(arr < 0):
        raise ValueError("evaluation expects x >= 0")
    if is_singular(shape) and np.any(arr == 0.0):
        raise SingularEvaluation(f"singular evaluation: {shape.label()} at x = 0")

    fam = shape.family
    p = shape.params
    if fam == "square_well":
        out = np.where(arr <= p["t"], -p["A"], 0.0)
    elif fam == "exponential":
        out = -p["A"] * np.exp(-p["q"] * arr)
    elif fam == "gaussian":
        out = -p["A"] * np.exp(-p["q"] * arr * arr)
    elif fam == "sech_squared":
        e = np.exp(-2.0 * p["q"] * arr)
        out = -p["beta"] * e / (1.0 + e) ** 2
    elif fam == "yukawa":
        out = np.where(arr > 0, -np.exp(-p["a"] * arr) / np.where(arr > 0, arr, 1.0), 0.0)
    elif fam == "hulthen":
        e = np.exp(-p["delta"] * arr)
        denom = np.where(arr > 0, 1.0 - e, 1.0)
        out = np.where(arr > 0, -e / denom, 0.0)
    elif fam == "coulomb_like_w":
        out = np.where(arr > 0, -p["strength"] / np.where(arr > 0, arr, 1.0), 0.0)
    elif fam == "piecewise_table":
        xs, fs = shape.table
        out = np.interp(arr, xs, fs, right=0.0)
    elif fam == "blend":
        f1, f2 = shape.children
        a = p["a"]
        out = (1.0 - a) * evaluate(f1, arr) + a * evaluate(f2, arr)
    else:  # pragma: no cover
        raise ValueError(fam)
    return float(out[0]) if scalar else out


def derivative(shape: PotentialShape, x: float) -> float:
    """Analytic derivative f'(x) at an interior smooth point; >= 0 for
    admitted shapes.  Square-well edges and table knots raise
    ``NonDifferentiablePoint``."""
    x = float(x)
    if x < 0:
        raise ValueError("derivative expects x >= 0")
    fam = shape.family
    p = shape.params
    if fam == "square_well":
        if abs(x - p["t"]) < _DERIVATIVE_EDGE_TOL:
            raise NonDifferentiablePoint(
                f"nondifferentiable point: square well edge at x = {p['t']:g}"
            )
        return 0.0
    if fam == "exponential":
        return p["A"] * p["q"] * math.exp(-p["q"] * x)
    if fam == "gaussian":
        return 2.0 * p["A"] * p["q"] * x * math.exp(-p["q"] * x * x)
    if fam == "sech_squared":
        e = math.exp(-2.0 * p["q"] * x)
        return 2.0 * p["beta"] * p["q"] * e * (1.0 - e) / (1.0 + e) ** 3
    if fam == "yukawa":
        if x == 0.0:
            raise SingularEvaluation("singular evaluation: yukawa derivative at x = 0")
        return math.exp(-p["a"] * x) * (1.0 + p["a"] * x) / (x * x)
    if fam == "hulthen":
        if x == 0.0:
            raise SingularEvaluation("singular evaluation: hulthen derivative at x = 0")
        e = math.exp(-p["delta"] * x)
        return p["delta"] * e / (1.0 - e) ** 2
    if fam == "coulomb_like_w":
        if x == 0.0:
            raise SingularEvaluation("singular evaluation: coulomb derivative at x = 0")
        return p["strength"] / (x * x)
    if fam == "piecewise_table":
        xs, fs = shape.table
        if np.any(np.abs(xs - x) < _DERIVATIVE_EDGE_TOL):
            raise NonDifferentiablePoint(f"nondifferentiable point: table knot at x = {x:g}")
        if x >= xs[-1]:
            return 0.0
        i = int(np.searchsorted(xs, x)) - 1
        i = max(i, 0)
        return float((fs[i + 1] - fs[i]) / (xs[i + 1] - xs[i]))
    if fam == "blend":
        f1, f2 = shape.children
        a = p["a"]
        return (1.0 - a) * derivative(f1, x) + a * derivative(f2, x)
    raise ValueError(fam)  # pragma: no cover


def breakpoints(shape: PotentialShape) -> tuple[float, ...]:
    """Coordinates where the shape is non-smooth (mesh nodes are pinned there)."""
    if shape.family == "square_well":
        return (shape.params["t"],)
    if shape.family == "piecewise_table":
        return tuple(float(v) for v in shape.table[0])
    if shape.family == "blend":
        f1, f2 = shape.children
        return tuple(sorted(set(breakpoints(f1)) | set(breakpoints(f2))))
    return ()


def origin_value(shape: PotentialShape) -> float:
    """f(0), or -inf for Coulomb-like shapes."""
    if is_singular(shape):
        return -math.inf
    return float(evaluate(shape, 0.0))


def decay_cutoff(shape: PotentialShape, threshold: float = 1e-12) -> float:
    """Smallest coordinate beyond which |f| stays below ``threshold``.

    Relies on |f| being non-increasing for admitted shapes; found by a
    doubling scan plus bisection.
    """
    if shape.family == "square_well":
        return shape.params["t"]
    if shape.family == "piecewise_table":
        xs, fs = shape.table
        idx = np.nonzero(np.abs(fs) > threshold)[0]
        return float(xs[-1] if idx.size == 0 else xs[min(idx[-1] + 1, xs.size - 1)])
    lo = 1e-6
    hi = 1.0
    for _ in range(80):
        if abs(evaluate(shape, hi)) < threshold:
            break
        hi *= 2.0
    else:
        raise ClassViolation(f"{shape.label()} does not decay below {threshold:g}")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if abs(evaluate(shape, mid)) < threshold:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-9 * max(1.0, hi):
            break
    return hi


def audit_grid(shape: PotentialShape, n: int = AUDIT_POINTS) -> np.ndarray:
    """Geometric sampling grid spanning the shape's active range."""
    upper = max(decay_cutoff(shape, 1e-14), 1.0)
    grid = np.geomspace(1e-6, upper, n)
    extra = [b for b in breakpoints(shape) if 1e-6 < b < upper]
    if extra:
        grid = np.unique(np.concatenate([grid, np.asarray(extra)]))
    return grid


@dataclass
class ClassReport:
    """Outcome of validating a shape against a potential class."""

    class_name: str
    admitted: bool
    violations: list[tuple[str, float, str]]
    singular_limit: float = 0.0

    def describe(self) -> str:
        if self.admitted:
            return f"admitted in {self.class_name}"
        lines = [f"rejected from {self.class_name}:"]
        lines += [f"  {cond} at x = {x:g}: {msg}" for cond, x, msg in self.violations]
        return "\n".join(lines)


def validate(shape: PotentialShape, class_name: str, dimension: int = 1) -> ClassReport:
    """Check the admissibility conditions on a dense audit grid.

    ``class_name`` is "P" (even one-dimensional class) or "Pd" (radial
    class, which additionally requires a finite origin limit of
    r^(d-2) f(r)).  Violations are reported with a witnessing sample
    point, never raised.
    """
    if class_name not in ("P", "Pd"):
        raise ValueError("class_name must be 'P' or 'Pd'")
    if class_name == "Pd" and dimension < 2:
        raise ValueError("class Pd requires dimension >= 2")

    violations: list[tuple[str, float, str]] = []
    grid = audit_grid(shape)
    f = evaluate(shape, grid)
    scale = float(np.max(np.abs(f))) if np.any(f != 0) else 0.0

    if scale == 0.0:
        violations.append(("not_identically_zero", 0.0, "shape is identically zero"))
    bad = np.nonzero(f > _MONOTONE_SLACK)[0]
    if bad.size:
        violations.append(
            ("non_positive", float(grid[bad[0]]), f"f = {f[bad[0]]:.3g} > 0")
        )
    rises = np.nonzero(np.diff(f) < -_MONOTONE_SLACK * max(scale, 1.0))[0]
    if rises.size:
        i = rises[0]
        violations.append(
            (
                "monotone_non_decreasing",
                float(grid[i + 1]),
                f"f drops from {f[i]:.6g} to {f[i + 1]:.6g}",
            )
        )
    tail = abs(float(evaluate(shape, grid[-1] * 4.0)))
    if scale > 0.0 and tail > 1e-9 * scale:
        violations.append(
            ("vanishes_at_infinity", float(grid[-1] * 4.0), f"|f| = {tail:.3g}")
        )

    singular_limit = 0.0
    if class_name == "P":
        if is_singular(shape):
            violations.append(
                ("bounded_at_origin", 0.0, "origin-singular shape is outside the even class")
            )
    else:
        # limit of r^(d-2) f(r): finite iff the 1/r strength is compatible
        # with the dimension; the d = 3 limit equals the stored index.
        if dimension == 2:
            if is_singular(shape):
                violations.append(
                    ("origin_limit_finite", 0.0, "r^0 f(r) diverges at the origin")
                )
            else:
                singular_limit = float(evaluate(shape, 1e-12)) if shape.family != "square_well" else -shape.params["A"]
        elif dimension == 3:
            singular_limit = shape.singularity_index
        else:
            singular_limit = 0.0  # 1/r singularities vanish under r^(d-2) for d >= 4
    return ClassReport(
        class_name if class_name == "P" else f"Pd(d={dimension})",
        admitted=not violations,
        violations=violations,
        singular_limit=singular_limit,
    )


@dataclass
class WProfile:
    """Samples of w(r) = -r f(r) with the flags used by the energy-sign test."""

    r: np.ndarray
    w: np.ndarray
    w_origin: float
    origin_bounded_by_one: bool
    non_increasing: bool
    vanishes: bool

    @property
    def theorem_applicable(self) -> bool:
        return self.origin_bounded_by_one and self.non_increasing and self.vanishes


def coulomb_w_profile(shape: PotentialShape, grid: np.ndarray | None = None) -> WProfile:
    """Factor a Coulomb-like shape as f = -w(r)/r and audit w.

    Bounded families (for which w(0) = 0 and w cannot be non-increasing
    with w not identically zero) raise ``NotCoulombLike``.
    """
    if not is_singular(shape):
        raise NotCoulombLike(f"not Coulomb-like: {shape.label()} is bounded at the origin")
    r = audit_grid(shape) if grid is None else np.asarray(grid, dtype=float)
    w = -r * evaluate(shape, r)
    w0 = -shape.singularity_index
    slack = _MONOTONE_SLACK * max(w0, 1.0)
    return WProfile(
        r=r,
        w=w,
        w_origin=w0,
        origin_bounded_by_one=w0 <= 1.0 + 1e-12,
        non_increasing=bool(np.all(np.diff(w) <= slack)),
        vanishes=bool(abs(w[-1]) <= 1e-9 * max(w0, 1.0)),
    )


def from_document(doc: dict) -> tuple[PotentialShape, str, int]:
    """Build a shape from a potential-spec document and validate it.

    The document carries ``family``, ``params`` (a name-to-number map;
    piecewise tables use a ``table`` object with ``x``/``f`` arrays), and
    ``class`` ("P" or "Pd") with ``dimension`` for the radial class.
    Returns (shape, class_name, dimension); an inadmissible shape raises
    ``ClassViolation`` carrying the report.
    """
    try:
        family = doc["family"]
    except (TypeError, KeyError):
        raise ValueError("potential document must carry a 'family' field") from None
    params = doc.get("params", {})
    builders = {
        "square_well": lambda: square_well(**params),
        "exponential": lambda: exponential(**params),
        "gaussian": lambda: gaussian(**params),
        "sech_squared": lambda: sech_squared(**params),
        "yukawa": lambda: yukawa(**params),
        "hulthen": lambda: hulthen(**params),
        "coulomb_like_w": lambda: coulomb_like(**params),
        "piecewise_table": lambda: piecewise_table(doc["table"]["x"], doc["table"]["f"]),
    }
    if family not in builders:
        raise ValueError(f"unknown potential family: {family!r}")
    try:
        shape = builders[family]()
    except TypeError as exc:
        raise ValueError(f"bad parameters for {family}: {exc}") from None

    class_name = doc.get("class", "P")
    dimension = int(doc.get("dimension", 1 if class_name == "P" else 3))
    report = validate(shape, class_name, dimension)
    if not report.admitted:
        raise ClassViolation(report.describe(), report=report)
    return shape, class_name, dimension


def to_document(shape: PotentialShape, class_name: str = "P", dimension: int = 1) -> dict:
    doc: dict = {"family": shape.family, "params": dict(shape.params), "class": class_name}
    if class_name == "Pd":
        doc["dimension"] = dimension
    if shape.family == "piecewise_table":
        xs, fs = shape.table
        doc["table"] = {"x": [float(v) for v in xs], "f": [float(v) for v in fs]}
    return doc
