"""Combinatorial jet calculus on set partitions.

Everything here works on one-dimensional jets: all derivative slots act on
the same coordinate, so a partition contributes through its block sizes
only.  The partition families themselves are still enumerated explicitly
(restricted-growth strings, lexicographic) because the same enumeration
drives the derivative conversions and the joint cumulants.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from math import factorial, log

import numpy as np

from .errors import ArgumentError, DomainError
from .jets import Jet, jet_derivative, jet_product

__all__ = [
    "PartitionFamily",
    "CumulantResult",
    "set_partitions",
    "log_jet",
    "exp_jet",
    "measure_change_jet",
    "covariant_jet",
    "joint_cumulant",
    "exp_bound_constant",
    "log_bound_constant",
]

MAX_PARTITION_ORDER = 12  # Bell(12) = 4,213,597 is the enforced ceiling

_partition_cache: dict[int, "PartitionFamily"] = {}
_cache_lock = threading.Lock()


@dataclass(frozen=True)
class PartitionFamily:
    """All set partitions of {1..n}, canonically ordered."""

    n: int
    partitions: tuple[tuple[tuple[int, ...], ...], ...]

    def __len__(self) -> int:
        return len(self.partitions)

    @property
    def block_size_profiles(self) -> tuple[tuple[int, ...], ...]:
        """Per-partition tuple of block sizes, in block order."""
        return tuple(tuple(len(b) for b in p) for p in self.partitions)


@dataclass(frozen=True)
class CumulantResult:
    """Joint cumulant of order N for one scalar random variable."""

    order: int
    value: float
    blocks_used: int
    exact: Fraction | None = None


def _enumerate_rgs(n: int):
    """Restricted-growth strings of length n in lexicographic order."""
    a = [0] * n
    while True:
        yield tuple(a)
        # increment the RGS like a mixed-radix counter
        i = n - 1
        while i > 0:
            if a[i] <= max(a[:i]):
                a[i] += 1
                for j in range(i + 1, n):
                    a[j] = 0
                break
            a[i] = 0
            i -= 1
        else:
            return


def set_partitions(n: int) -> PartitionFamily:
    """Enumerate the set partitions of {1..n} (cached per order)."""
    if not 1 <= n <= MAX_PARTITION_ORDER:
        raise ArgumentError(f"partition order must be in 1..{MAX_PARTITION_ORDER}, got {n}")
    with _cache_lock:
        fam = _partition_cache.get(n)
        if fam is not None:
            return fam
    partitions = []
    for rgs in _enumerate_rgs(n):
        nblocks = max(rgs) + 1
        blocks = [[] for _ in range(nblocks)]
        for idx, b in enumerate(rgs):
            blocks[b].append(idx + 1)
        partitions.append(tuple(tuple(b) for b in blocks))
    fam = PartitionFamily(n, tuple(partitions))
    with _cache_lock:
        _partition_cache[n] = fam
    return fam


def log_jet(p_jet: Jet) -> Jet:
    """Jet of log p from the jet of p.

    Order n >= 1 uses the signed partition sum
    sum_pi  (-1)^(|pi|-1) (|pi|-1)! / p^|pi| * prod_B p^(|B|),
    with first-order error propagation through every term.
    """
    p0 = p_jet.value(0)
    if not p0 > 0:
        raise DomainError(f"log jet needs a strictly positive order-0 value, got {p0}")
    n = p_jet.order
    vals = np.empty(n + 1)
    errs = np.empty(n + 1)
    vals[0] = log(p0)
    errs[0] = p_jet.error(0) / p0
    v = p_jet.values
    e = p_jet.errors
    for order in range(1, n + 1):
        total = 0.0
        err = 0.0
        for sizes in set_partitions(order).block_size_profiles:
            m = len(sizes)
            coeff = (-1.0) ** (m - 1) * factorial(m - 1) / p0**m
            prod = 1.0
            for b in sizes:
                prod *= v[b]
            total += coeff * prod
            # d/dv_b and d/dv_0 contributions, first order
            for j, b in enumerate(sizes):
                partial = abs(coeff)
                for i, bi in enumerate(sizes):
                    if i != j:
                        partial *= abs(v[bi])
                err += partial * e[b]
            err += abs(coeff) * m / p0 * abs(prod) * e[0]
        vals[order] = total
        errs[order] = err
    return Jet(vals, errs, center=p_jet.center, measure=p_jet.measure)


def exp_jet(l_jet: Jet) -> Jet:
    """Jet of exp(l) from the jet of l: inverse of :func:`log_jet`.

    Order n >= 1 is  e^l0 * sum_pi prod_B l^(|B|)  over partitions of {1..n}.
    """
    n = l_jet.order
    p0 = float(np.exp(l_jet.value(0)))
    vals = np.empty(n + 1)
    errs = np.empty(n + 1)
    vals[0] = p0
    errs[0] = p0 * l_jet.error(0)
    v = l_jet.values
    e = l_jet.errors
    for order in range(1, n + 1):
        total = 0.0
        err = 0.0
        for sizes in set_partitions(order).block_size_profiles:
            prod = 1.0
            for b in sizes:
                prod *= v[b]
            total += prod
            for j, b in enumerate(sizes):
                partial = 1.0
                for i, bi in enumerate(sizes):
                    if i != j:
                        partial *= abs(v[bi])
                err += partial * e[b]
        vals[order] = p0 * total
        errs[order] = p0 * (err + abs(total) * e[0])
    return Jet(vals, errs, center=l_jet.center, measure=l_jet.measure)


def measure_change_jet(
    p_jet: Jet, density_jet: Jet, variable: str = "y", new_measure: str | None = None
) -> Jet:
    """Rewrite a kernel jet against a new reference volume.

    ``density_jet`` is the jet (in y) of the Radon-Nikodym derivative of
    the old volume with respect to the new one.  y-jets transform by the
    Leibniz rule over derivative subsets; x-jets just pick up the scalar
    density at y.
    """
    if density_jet.value(0) <= 0:
        raise DomainError("measure-change density must be strictly positive")
    if variable not in ("x", "y"):
        raise ArgumentError(f"variable must be 'x' or 'y', got {variable!r}")
    tag = new_measure if new_measure is not None else p_jet.measure + "'"
    if variable == "x":
        rho = density_jet.value(0)
        erho = density_jet.error(0)
        vals = p_jet.values * rho
        errs = np.abs(p_jet.values) * erho + p_jet.errors * (rho + erho)
        return Jet(vals, errs, center=p_jet.center, measure=tag)
    out = jet_product(p_jet, density_jet)
    return Jet(out.values, out.errors, center=p_jet.center, measure=tag)


def covariant_jet(partial_jet: Jet, christoffels: Jet, order: int) -> np.ndarray:
    """Covariant derivatives of orders 1..order from partial derivatives.

    One-dimensional specialization of the tensor recursion: with a single
    coordinate and Christoffel function G,
        (cov^1 f) = f',   (cov^(k+1) f) = d/du (cov^k f) - k G (cov^k f).
    Values are coordinate-frame components; rescale by g^(-N/2) for the
    unit-frame norm.
    """
    if order < 1:
        raise ArgumentError("covariant order must be >= 1")
    if partial_jet.order < order:
        raise ArgumentError(
            f"need a partial jet of order >= {order}, got {partial_jet.order}"
        )
    if order >= 2 and christoffels.order < order - 2:
        raise ArgumentError(
            f"need Christoffel data of order >= {order - 2}, got {christoffels.order}"
        )
    out = np.empty(order)
    current = jet_derivative(partial_jet)  # jet of cov^1 f = f'
    out[0] = current.value(0)
    for k in range(1, order):
        lead = jet_derivative(current)
        corr = jet_product(christoffels, current)
        m = min(lead.order, corr.order)
        vals = lead.values[: m + 1] - k * corr.values[: m + 1]
        errs = lead.errors[: m + 1] + k * corr.errors[: m + 1]
        current = Jet(vals, errs, center=partial_jet.center, measure=partial_jet.measure)
        out[k] = current.value(0)
    return out


def joint_cumulant(measure, order: int) -> CumulantResult:
    """Joint cumulant of order N for the midpoint measure's variable.

    kappa(X,...,X) = sum_pi (-1)^(|pi|-1) (|pi|-1)! prod_B E[X^|B|],
    with all N slots filled by the per-atom order-1 derivative variable.
    Exact Fraction arithmetic whenever atom weights are Fractions.
    """
    if order < 1:
        raise ArgumentError(f"cumulant order must be >= 1, got {order}")
    weights = [w for (_, w) in measure.atoms]
    variables = [vars_[0] for vars_ in measure.variables]
    exact = all(isinstance(w, (Fraction, int)) for w in weights) and all(
        isinstance(x, (Fraction, int)) for x in variables
    )
    if exact:
        weights = [Fraction(w) for w in weights]
        variables = [Fraction(x) for x in variables]
    moments = {}
    for b in range(1, order + 1):
        moments[b] = sum(w * x**b for w, x in zip(weights, variables))
    fam = set_partitions(order)
    total = Fraction(0) if exact else 0.0
    for sizes in fam.block_size_profiles:
        m = len(sizes)
        term = (-1) ** (m - 1) * factorial(m - 1)
        for b in sizes:
            term = term * moments[b]
        total += term
    if exact:
        return CumulantResult(order, float(total), len(fam), exact=total)
    return CumulantResult(order, float(total), len(fam))


def exp_bound_constant(c, order: int) -> float:
    """D'_N = sum_pi prod_B C_|B| for the log->p bound direction.

    ``c[k]`` must hold the order-k constant for k = 1..order.
    """
    total = 0.0
    for sizes in set_partitions(order).block_size_profiles:
        prod = 1.0
        for b in sizes:
            prod *= c[b]
        total += prod
    return total


def log_bound_constant(d, order: int) -> float:
    """C_N = sum_pi (|pi|-1)! prod_B D_|B| for the p->log bound direction.

    Each partition term is majorized by its absolute value, so the signed
    coefficients enter through their magnitudes.
    """
    total = 0.0
    for sizes in set_partitions(order).block_size_profiles:
        m = len(sizes)
        prod = float(factorial(m - 1))
        for b in sizes:
            prod *= d[b]
        total += prod
    return total
