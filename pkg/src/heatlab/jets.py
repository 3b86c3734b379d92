"""Derivative jets: a function's derivatives of orders 0..N at a point.

Jets store raw derivative values (not Taylor coefficients) together with
per-order absolute error bounds, so every downstream quantity can report
how much numerical slack it inherited.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from math import comb

import numpy as np

from .errors import ArgumentError

__all__ = [
    "Jet",
    "SeriesTruncation",
    "jet_from_values",
    "jet_derivative",
    "jet_product",
    "jet_scale",
]


@dataclass(frozen=True)
class SeriesTruncation:
    """Where an infinite series was cut and what the omitted tail may cost.

    ``tail_bound[k]`` bounds the absolute error of the order-k derivative
    caused by dropping all terms past ``cutoff``.
    """

    cutoff: int
    tail_bound: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "tail_bound", np.asarray(self.tail_bound, dtype=float))


@dataclass(frozen=True)
class Jet:
    """Derivatives of orders 0..N of a scalar function at one point.

    ``center`` records the evaluation point as ``(t, x, y)`` for kernel
    jets (``None`` for synthetic jets), ``measure`` tags the reference
    volume a kernel is written against ("mu" for the Riemannian volume,
    "nu" for the symmetrizing volume e^f mu).
    """

    values: np.ndarray
    errors: np.ndarray
    center: tuple[float, float, float] | None = None
    measure: str = "mu"
    truncation: SeriesTruncation | None = field(default=None, compare=False)

    def __post_init__(self):
        vals = np.atleast_1d(np.asarray(self.values, dtype=float))
        errs = np.atleast_1d(np.asarray(self.errors, dtype=float))
        if vals.shape != errs.shape:
            raise ArgumentError(f"jet values/errors shape mismatch: {vals.shape} vs {errs.shape}")
        if not np.all(np.isfinite(errs)) or np.any(errs < 0):
            raise ArgumentError("jet error bounds must be finite and nonnegative")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "errors", errs)

    @property
    def order(self) -> int:
        return self.values.size - 1

    def value(self, k: int) -> float:
        return float(self.values[k])

    def error(self, k: int) -> float:
        return float(self.errors[k])

    def truncated(self, order: int) -> "Jet":
        if order > self.order:
            raise ArgumentError(f"jet of order {self.order} cannot be truncated to {order}")
        return replace(
            self, values=self.values[: order + 1], errors=self.errors[: order + 1]
        )


def jet_from_values(values, errors=None, center=None, measure="mu") -> Jet:
    vals = np.atleast_1d(np.asarray(values, dtype=float))
    errs = np.zeros_like(vals) if errors is None else np.asarray(errors, dtype=float)
    return Jet(vals, errs, center=center, measure=measure)


def jet_derivative(jet: Jet) -> Jet:
    """The jet of f' (one order lower) from the jet of f."""
    if jet.order < 1:
        raise ArgumentError("cannot differentiate an order-0 jet")
    return replace(jet, values=jet.values[1:], errors=jet.errors[1:])


def jet_product(a: Jet, b: Jet) -> Jet:
    """Leibniz product: (fg)^(k) = sum_j C(k,j) f^(j) g^(k-j)."""
    n = min(a.order, b.order)
    vals = np.empty(n + 1)
    errs = np.empty(n + 1)
    for k in range(n + 1):
        c = np.array([comb(k, j) for j in range(k + 1)], dtype=float)
        fa, fb = a.values[: k + 1], b.values[k::-1]
        ea, eb = a.errors[: k + 1], b.errors[k::-1]
        vals[k] = np.dot(c, fa * fb)
        errs[k] = np.dot(c, np.abs(fa) * eb + np.abs(fb) * ea + ea * eb)
    return Jet(vals, errs, center=a.center, measure=a.measure)


def jet_scale(jet: Jet, factor: float) -> Jet:
    return replace(
        jet, values=jet.values * factor, errors=jet.errors * abs(factor)
    )
