"""Model-manifold catalog: geometry, distance, cut locus, drift.

Every manifold here is one-dimensional (the hyperbolic model exposes its
radial slice), carries an optional conservative drift Z = grad f through a
potential f, and an optional metric density g used only by the covariant
calculus.  All descriptions are immutable and hashable so they can key
caches.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import cos, inf, pi, sin

import numpy as np

from . import calculus
from .errors import (
    ArgumentError,
    DegeneratePairError,
    DomainError,
    UnsupportedConfigurationError,
)
from .jets import Jet, jet_from_values, jet_scale

__all__ = [
    "Polynomial",
    "TrigPolynomial",
    "ExpOf",
    "Manifold1D",
    "Circle",
    "Line",
    "DirichletInterval",
    "WeightedLine",
    "WeightedCircle",
    "HyperbolicRadial3",
    "ClosedSet",
    "MidpointMeasure",
    "ANTIPODE_TOLERANCE",
    "distance",
    "distance_via",
    "midpoint_measure",
    "christoffel_jet",
    "squared_distance_jet",
    "cut_distance",
    "manifold_from_config",
]

# (x, y) counts as antipodal on Circle(L) when |d(x,y) - L/2| <= this;
# exact-arithmetic test inputs sit on either side of the knife edge.
ANTIPODE_TOLERANCE = 1e-12


# ---------------------------------------------------------------------------
# scalar function representations (potentials and metric densities)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Polynomial:
    """c0 + c1 u + c2 u^2 + ... with coefficients stored ascending."""

    coeffs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        out = np.zeros_like(u)
        for c in reversed(self.coeffs):
            out = out * u + c
        return out if out.ndim else float(out)

    def derivative(self) -> "Polynomial":
        return Polynomial(tuple(k * c for k, c in enumerate(self.coeffs) if k >= 1))

    def jet(self, u: float, order: int) -> np.ndarray:
        vals = np.empty(order + 1)
        p = self
        for k in range(order + 1):
            vals[k] = p(u) if p.coeffs else 0.0
            p = p.derivative()
        return vals


@dataclass(frozen=True)
class TrigPolynomial:
    """a0 + sum_k a_k cos(2 pi k u / period) + b_k sin(2 pi k u / period)."""

    period: float
    a0: float = 0.0
    cos_coeffs: tuple[float, ...] = ()
    sin_coeffs: tuple[float, ...] = ()

    def __post_init__(self):
        if self.period <= 0:
            raise ArgumentError("trig polynomial needs a positive period")
        ncos, nsin = len(self.cos_coeffs), len(self.sin_coeffs)
        n = max(ncos, nsin)
        object.__setattr__(
            self, "cos_coeffs", tuple(self.cos_coeffs) + (0.0,) * (n - ncos)
        )
        object.__setattr__(
            self, "sin_coeffs", tuple(self.sin_coeffs) + (0.0,) * (n - nsin)
        )

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        out = np.full_like(u, self.a0)
        for k, (a, b) in enumerate(zip(self.cos_coeffs, self.sin_coeffs), start=1):
            w = 2 * pi * k / self.period
            out = out + a * np.cos(w * u) + b * np.sin(w * u)
        return out if out.ndim else float(out)

    def derivative(self) -> "TrigPolynomial":
        new_cos, new_sin = [], []
        for k, (a, b) in enumerate(zip(self.cos_coeffs, self.sin_coeffs), start=1):
            w = 2 * pi * k / self.period
            new_cos.append(w * b)
            new_sin.append(-w * a)
        return TrigPolynomial(self.period, 0.0, tuple(new_cos), tuple(new_sin))

    def jet(self, u: float, order: int) -> np.ndarray:
        vals = np.zeros(order + 1)
        vals[0] = self(u)
        for k, (a, b) in enumerate(zip(self.cos_coeffs, self.sin_coeffs), start=1):
            w = 2 * pi * k / self.period
            c, s = cos(w * u), sin(w * u)
            # derivative cycle of (a cos + b sin): next pair is (w b, -w a)
            ca, cb = a, b
            for j in range(1, order + 1):
                ca, cb = w * cb, -w * ca
                vals[j] += ca * c + cb * s
        return vals

    @property
    def is_zero(self) -> bool:
        return (
            self.a0 == 0.0
            and all(c == 0.0 for c in self.cos_coeffs)
            and all(s == 0.0 for s in self.sin_coeffs)
        )


@dataclass(frozen=True)
class ExpOf:
    """exp(inner); positivity for free, used for metric densities like e^{2u}."""

    inner: Polynomial | TrigPolynomial

    def __call__(self, u):
        return np.exp(self.inner(u)) if np.ndim(u) else float(np.exp(self.inner(u)))

    def jet(self, u: float, order: int) -> np.ndarray:
        inner = jet_from_values(self.inner.jet(u, order))
        return calculus.exp_jet(inner).values


# ---------------------------------------------------------------------------
# the manifold catalog
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Manifold1D:
    """Base class: optional metric density g (identity when None)."""

    metric: Polynomial | TrigPolynomial | ExpOf | None = field(default=None, kw_only=True)

    # subclasses override
    kind: str = field(default="abstract", init=False, repr=False)

    @property
    def potential(self):
        return None

    @property
    def circumference(self) -> float | None:
        return None

    def contains(self, u: float) -> bool:
        return True

    def require_inside(self, *points: float) -> None:
        for u in points:
            if not self.contains(u):
                raise DomainError(f"point {u} outside the domain of {self.kind}")

    def config(self) -> dict:
        return {"kind": self.kind}


@dataclass(frozen=True)
class Circle(Manifold1D):
    L: float = 1.0
    kind: str = field(default="circle", init=False, repr=False)

    def __post_init__(self):
        if self.L <= 0:
            raise ArgumentError("circle circumference must be positive")
        _check_periodic_metric(self.metric, self.L)

    @property
    def circumference(self) -> float:
        return self.L

    def config(self) -> dict:
        return {"kind": self.kind, "L": self.L}


@dataclass(frozen=True)
class Line(Manifold1D):
    kind: str = field(default="line", init=False, repr=False)


@dataclass(frozen=True)
class DirichletInterval(Manifold1D):
    a: float = 0.0
    b: float = 1.0
    kind: str = field(default="interval", init=False, repr=False)

    def __post_init__(self):
        if not self.a < self.b:
            raise ArgumentError(f"need a < b, got ({self.a}, {self.b})")

    def contains(self, u: float) -> bool:
        return self.a < u < self.b

    def config(self) -> dict:
        return {"kind": self.kind, "a": self.a, "b": self.b}


@dataclass(frozen=True)
class WeightedLine(Manifold1D):
    """Line with conservative drift Z = grad f, f a polynomial potential."""

    f: Polynomial = Polynomial(())
    kind: str = field(default="weighted-line", init=False, repr=False)

    @property
    def potential(self) -> Polynomial:
        return self.f

    def config(self) -> dict:
        return {"kind": self.kind, "potential": list(self.f.coeffs)}


@dataclass(frozen=True)
class WeightedCircle(Manifold1D):
    """Circle with conservative drift from a trigonometric-polynomial potential."""

    L: float = 1.0
    f: TrigPolynomial = TrigPolynomial(1.0)
    kind: str = field(default="weighted-circle", init=False, repr=False)

    def __post_init__(self):
        if self.L <= 0:
            raise ArgumentError("circle circumference must be positive")
        if abs(self.f.period - self.L) > 1e-15 * max(1.0, self.L):
            raise ArgumentError("potential period must equal the circumference")
        _check_periodic_metric(self.metric, self.L)

    @property
    def potential(self) -> TrigPolynomial:
        return self.f

    @property
    def circumference(self) -> float:
        return self.L

    def config(self) -> dict:
        return {
            "kind": self.kind,
            "L": self.L,
            "potential": {
                "a0": self.f.a0,
                "cos": list(self.f.cos_coeffs),
                "sin": list(self.f.sin_coeffs),
            },
        }


@dataclass(frozen=True)
class HyperbolicRadial3(Manifold1D):
    """Radial slice of 3-dimensional hyperbolic space; coordinates are radii."""

    kind: str = field(default="h3", init=False, repr=False)

    def contains(self, u: float) -> bool:
        return u >= 0


def _check_periodic_metric(metric, L: float) -> None:
    if metric is None:
        return
    inner = metric.inner if isinstance(metric, ExpOf) else metric
    if not isinstance(inner, TrigPolynomial) or abs(inner.period - L) > 1e-15 * max(1.0, L):
        raise ArgumentError("circle metric density must be periodic with the circumference")


# ---------------------------------------------------------------------------
# closed sets and midpoint measures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClosedSet:
    """A finite union of closed points and closed intervals/arcs.

    On circles an interval (lo, hi) is the arc swept from lo towards
    increasing coordinate; hi may exceed the circumference to wrap.
    """

    points: tuple[float, ...] = ()
    intervals: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(float(p) for p in self.points))
        ivs = []
        for lo, hi in self.intervals:
            if hi < lo:
                raise ArgumentError(f"interval endpoints out of order: ({lo}, {hi})")
            ivs.append((float(lo), float(hi)))
        object.__setattr__(self, "intervals", tuple(ivs))

    @property
    def is_empty(self) -> bool:
        return not self.points and not self.intervals


@dataclass(frozen=True)
class MidpointMeasure:
    """Finite weighted set of midpoints of minimal geodesics from x to y.

    ``variables[i]`` lists derivatives of d(., y) at y of orders 1..N taken
    at atom i; weights are exact Fractions summing to 1.
    """

    atoms: tuple[tuple[float, Fraction], ...]
    variables: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        total = sum(w for (_, w) in self.atoms)
        if total != 1:
            raise ArgumentError(f"midpoint weights must sum to 1, got {total}")
        if any(w < 0 for (_, w) in self.atoms):
            raise ArgumentError("midpoint weights must be nonnegative")


# ---------------------------------------------------------------------------
# distances
# ---------------------------------------------------------------------------


def _wrap(u: float, L: float) -> float:
    return u - L * np.floor(u / L)


def distance(m: Manifold1D, x: float, y: float) -> float:
    """Riemannian distance; the drift potential never enters."""
    m.require_inside(x, y)
    if m.circumference is not None:
        L = m.circumference
        delta = abs(_wrap(x - y, L))
        return min(delta, L - delta)
    return abs(x - y)


def _circle_point_sum(L: float, x: float, y: float, z: float) -> float:
    dz_x = min(abs(_wrap(x - z, L)), L - abs(_wrap(x - z, L)))
    dz_y = min(abs(_wrap(y - z, L)), L - abs(_wrap(y - z, L)))
    return dz_x + dz_y


def distance_via(m: Manifold1D, x: float, A: ClosedSet, y: float) -> float:
    """d(x, A, y) = inf over z in A of d(x,z) + d(z,y).

    Exact: on the line the sum is piecewise linear in z; on the circle its
    breakpoints are x, y and their antipodes, so arc minima occur at arc
    endpoints or at interior breakpoints.
    """
    if A.is_empty:
        raise ArgumentError("distance_via needs a nonempty closed set")
    m.require_inside(x, y)
    for p in A.points:
        m.require_inside(p)
    best = inf
    if m.circumference is not None:
        L = m.circumference
        breakpoints = [_wrap(v, L) for v in (x, y, x + L / 2, y + L / 2)]
        for p in A.points:
            best = min(best, _circle_point_sum(L, x, y, p))
        for lo, hi in A.intervals:
            if hi - lo >= L:
                return distance(m, x, y)
            cands = [lo, hi]
            base = _wrap(lo, L)
            for bp in breakpoints:
                shifted = base + _wrap(bp - base, L)
                if lo <= shifted <= hi or lo <= shifted - L <= hi:
                    cands.append(shifted)
            best = min(best, min(_circle_point_sum(L, x, y, z) for z in cands))
        return best
    lo_xy, hi_xy = min(x, y), max(x, y)
    for p in A.points:
        best = min(best, abs(x - p) + abs(p - y))
    for lo, hi in A.intervals:
        m.require_inside(lo, hi)
        if hi >= lo_xy and lo <= hi_xy:
            best = min(best, hi_xy - lo_xy)
        else:
            best = min(
                best,
                abs(x - lo) + abs(lo - y),
                abs(x - hi) + abs(hi - y),
            )
    return best


def cut_distance(m: Manifold1D, x: float, y: float) -> float:
    """Distance from y to the cut locus of x (infinite off the circle)."""
    if m.circumference is None:
        return inf
    L = m.circumference
    return distance(m, _wrap(x + L / 2, L), y)


def squared_distance_jet(m: Manifold1D, x: float, y: float, order: int) -> np.ndarray:
    """y-derivatives of d^2(x, .) at y, orders 0..order (closed form).

    All built-ins are flat in the scan coordinate, so d^2 is quadratic in
    the signed displacement; undefined at circle antipodes.
    """
    from .errors import CutLocusError

    if m.circumference is not None:
        L = m.circumference
        if abs(distance(m, x, y) - L / 2) <= 1e-9:
            raise CutLocusError("squared distance is not smooth at the cut locus")
        s = _wrap(y - x, L)
        if s > L / 2:
            s -= L
    else:
        s = y - x
    vals = np.zeros(order + 1)
    vals[0] = s * s
    if order >= 1:
        vals[1] = 2 * s
    if order >= 2:
        vals[2] = 2.0
    return vals


# ---------------------------------------------------------------------------
# midpoint measures
# ---------------------------------------------------------------------------


def _variables(sign: int, order: int) -> tuple[Fraction, ...]:
    return (Fraction(sign),) + (Fraction(0),) * max(0, order - 1)


def _reflection_preserves_potential(f: TrigPolynomial, x: float) -> bool:
    # reflection through x: u -> 2x - u; require f(2x - u) == f(u)
    for k, (a, b) in enumerate(zip(f.cos_coeffs, f.sin_coeffs), start=1):
        w = 2 * pi * k / f.period
        c2, s2 = cos(2 * w * x), sin(2 * w * x)
        if abs(a * c2 + b * s2 - a) > 1e-12 or abs(a * s2 - b * c2 - b) > 1e-12:
            return False
    return True


def midpoint_measure(m: Manifold1D, x: float, y: float, order: int = 1) -> MidpointMeasure:
    """Midpoints of minimal geodesics with derivative data of d(., y).

    Weights are only assigned where symmetry forces them: a point mass off
    the cut locus, and the uniform pair at circle antipodes when an
    isometry of the full (metric + potential) structure exchanges the two
    midpoints.  Anything else is refused rather than guessed.
    """
    m.require_inside(x, y)
    if order < 1:
        raise ArgumentError("midpoint measure needs order >= 1")
    if m.circumference is None:
        if x == y:
            raise DegeneratePairError("midpoint measure needs x != y")
        mid = (x + y) / 2
        sign = 1 if y > x else -1
        return MidpointMeasure(
            atoms=((mid, Fraction(1)),), variables=(_variables(sign, order),)
        )
    L = m.circumference
    d = distance(m, x, y)
    if d == 0.0:
        raise DegeneratePairError("midpoint measure needs x != y")
    delta = _wrap(y - x, L)
    if abs(d - L / 2) <= ANTIPODE_TOLERANCE:
        f = m.potential
        if f is not None and not f.is_zero and not _reflection_preserves_potential(f, x):
            raise UnsupportedConfigurationError(
                "no symmetry determines midpoint weights for this drift at the antipode"
            )
        plus = _wrap(x + L / 4, L)
        minus = _wrap(x - L / 4, L)
        return MidpointMeasure(
            atoms=((plus, Fraction(1, 2)), (minus, Fraction(1, 2))),
            variables=(_variables(+1, order), _variables(-1, order)),
        )
    if delta < L / 2:
        mid, sign = _wrap(x + delta / 2, L), +1
    else:
        mid, sign = _wrap(x - (L - delta) / 2, L), -1
    return MidpointMeasure(
        atoms=((mid, Fraction(1)),), variables=(_variables(sign, order),)
    )


# ---------------------------------------------------------------------------
# Christoffel jets
# ---------------------------------------------------------------------------


def christoffel_jet(m: Manifold1D, u: float, order: int) -> Jet:
    """Jet of the 1-D Christoffel symbol Gamma = g'/(2g) at u.

    Computed as half the derivative jet of log g, which needs g to be
    (order+1)-times differentiable; identically zero for a flat metric.
    """
    m.require_inside(u)
    if m.metric is None:
        return jet_from_values(np.zeros(order + 1))
    gvals = m.metric.jet(u, order + 1)
    if gvals[0] <= 0:
        raise DomainError("metric density must be positive")
    log_g = calculus.log_jet(jet_from_values(gvals))
    gamma = jet_scale(
        Jet(log_g.values[1:], log_g.errors[1:]),
        0.5,
    )
    return gamma


# ---------------------------------------------------------------------------
# configuration plumbing
# ---------------------------------------------------------------------------


def _scalar_from_config(cfg, L: float | None):
    if cfg is None:
        return None
    if isinstance(cfg, dict) and cfg.get("type") == "exp":
        return ExpOf(_scalar_from_config({k: v for k, v in cfg.items() if k != "type"}, L))
    if isinstance(cfg, dict):
        if L is None:
            raise ArgumentError("trigonometric coefficients need a circle manifold")
        return TrigPolynomial(
            L,
            float(cfg.get("a0", 0.0)),
            tuple(cfg.get("cos", ())),
            tuple(cfg.get("sin", ())),
        )
    return Polynomial(tuple(cfg))


def manifold_from_config(cfg: dict) -> Manifold1D:
    """Build a manifold from a configuration mapping (the CLI's format).

    Fields: ``kind`` plus ``L`` or ``(a, b)``, optional ``potential``
    (coefficient list on line variants, {a0, cos, sin} on circle variants)
    and optional ``metric`` (same formats, or {"type": "exp", ...}).
    """
    known = {"kind", "L", "a", "b", "potential", "metric"}
    unknown = set(cfg) - known
    if unknown:
        raise ArgumentError(f"unknown manifold config fields: {sorted(unknown)}")
    kind = cfg.get("kind")
    L = float(cfg.get("L", 1.0))
    metric = lambda Lv: _scalar_from_config(cfg.get("metric"), Lv)  # noqa: E731
    if kind == "circle":
        return Circle(L, metric=metric(L))
    if kind == "line":
        return Line(metric=metric(None))
    if kind == "interval":
        return DirichletInterval(float(cfg.get("a", 0.0)), float(cfg.get("b", 1.0)), metric=metric(None))
    if kind == "weighted-line":
        pot = _scalar_from_config(cfg.get("potential", ()), None) or Polynomial(())
        return WeightedLine(pot, metric=metric(None))
    if kind == "weighted-circle":
        pot = _scalar_from_config(cfg.get("potential", {"a0": 0.0}), L)
        return WeightedCircle(L, pot, metric=metric(L))
    if kind == "h3":
        return HyperbolicRadial3()
    raise ArgumentError(f"unknown manifold kind: {kind!r}")
