"""Exact/spectral heat kernels for Delta = Delta_LB + Z on the model manifolds.

Every evaluator returns a :class:`~heatlab.jets.Jet` of y-derivatives with
per-order error bounds (series tail + roundoff).  Series cutoffs are chosen
so the estimated tail stays below 1e-14 of the order-0 value, which keeps
relative accuracy after division when forming log-derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil, cosh, exp, expm1, log, log1p, pi, sinh, sqrt

import numpy as np

from . import _spectral
from ._dispatch import fourier_circle_sums, hermite_image_sums, sine_series_sums
from .errors import (
    ArgumentError,
    DomainError,
    StepSizeError,
    UnsupportedConfigurationError,
)
from .jets import Jet, SeriesTruncation, jet_from_values
from .calculus import exp_jet
from .manifolds import (
    Circle,
    DirichletInterval,
    HyperbolicRadial3,
    Line,
    Manifold1D,
    WeightedCircle,
    WeightedLine,
)

__all__ = [
    "KERNEL_IDS",
    "theta_kernel_jet",
    "gauss_kernel_jet",
    "interval_kernel_jet",
    "weighted_line_kernel_jet",
    "hyperbolic3_radial_jet",
    "spectral_kernel_jet",
    "pde_residual",
    "ResidualEstimate",
    "kernel_jet",
    "default_backend",
]

KERNEL_IDS = ("theta", "gauss", "interval", "mehler", "h3", "spectral")

_EPS = float(np.finfo(float).eps)
_REL_TAIL_TARGET = 1e-14


def _check_t_order(t: float, order: int) -> None:
    if not t > 0:
        raise ArgumentError(f"time must be positive, got {t}")
    if order < 0:
        raise ArgumentError(f"derivative order must be >= 0, got {order}")


def _finish(sums, abs_sums, tail, cutoff, center, measure="mu") -> Jet:
    trunc = SeriesTruncation(cutoff, tail)
    errors = tail + 4.0 * _EPS * abs_sums
    return Jet(np.asarray(sums), errors, center=center, measure=measure, truncation=trunc)


# ---------------------------------------------------------------------------
# circle: theta image sum (small t) / Poisson-dual Fourier series (large t)
# ---------------------------------------------------------------------------


def _image_offsets(delta: float, L: float, shells: int) -> np.ndarray:
    # shell order 0, -1, 1, -2, 2, ... keeps +-u pairs adjacent so odd-order
    # cancellations at symmetric configurations stay exact in floating point;
    # at the antipode the pairing is (n, -n-1), which needs one closing image
    ns = [0]
    for n in range(1, shells + 1):
        ns.extend((-n, n))
    if delta > 0:
        ns.append(-(shells + 1))
    elif delta < 0:
        ns.append(shells + 1)
    return delta + L * np.asarray(ns, dtype=float)


def _theta_images(delta, L, t, order, boost):
    d = abs(delta)
    shells = 1 + ceil((d + 2.0 * sqrt(t * (40.0 + 3.0 * order))) / L)
    shells = ceil(shells * boost)
    ones2 = np.ones(2)
    for _ in range(50):
        u = _image_offsets(delta, L, shells)
        sums, abss = hermite_image_sums(u, np.ones_like(u), t, order)
        e1 = hermite_image_sums(
            delta + L * np.array([shells + 1.0, -(shells + 1.0)]), ones2, t, order
        )[1]
        e2 = hermite_image_sums(
            delta + L * np.array([shells + 2.0, -(shells + 2.0)]), ones2, t, order
        )[1]
        contracting = np.all(e2 <= 0.6 * e1 + 1e-300)
        tail = e1 + 2.0 * e2
        if contracting and (sums[0] <= 0 or np.all(tail <= _REL_TAIL_TARGET * abs(sums[0]))):
            return sums, abss, tail, shells
        shells = max(shells + 2, int(shells * 1.5))
    return sums, abss, tail, shells


def _theta_fourier(delta, L, t, order, boost):
    kmax = 2 + ceil((L / (2 * pi)) * sqrt((40.0 + 3.0 * order) / t))
    kmax = ceil(kmax * boost)

    def term_bound(k):
        w = 2 * pi * k / L
        js = np.arange(order + 1, dtype=float)
        return (2.0 / L) * np.exp(-w * w * t + js * np.log(w))

    for _ in range(50):
        b1, b2 = term_bound(kmax + 1), term_bound(kmax + 2)
        if np.all(b2 <= 0.6 * b1 + 1e-300):
            break
        kmax = max(kmax + 2, int(kmax * 1.5))
    sums, abss = fourier_circle_sums(delta, L, t, order, kmax)
    tail = b1 + 2.0 * b2
    return sums, abss, tail, kmax


def theta_kernel_jet(m: Manifold1D, t: float, x: float, y: float, order: int,
                     *, series_boost: float = 1.0) -> Jet:
    """Circle heat kernel p_t(x,y) = (4 pi t)^(-1/2) sum_n e^{-(y-x+nL)^2/(4t)}.

    Uses the Gaussian image sum for t <= L^2/8 and the Poisson-dual Fourier
    series beyond, where image-term cancellation would dominate derivative
    roundoff; the overlap region is cross-validated in the test suite.
    """
    _check_t_order(t, order)
    L = m.circumference
    if L is None:
        raise ArgumentError("theta kernel needs a circle manifold")
    f = m.potential
    if f is not None and not f.is_zero:
        raise UnsupportedConfigurationError("theta kernel covers zero drift only")
    delta = (y - x) - L * np.floor((y - x) / L)
    if delta > L / 2:
        delta -= L
    center = (t, x, y)
    if t <= L * L / 8:
        sums, abss, tail, cutoff = _theta_images(delta, L, t, order, series_boost)
    else:
        sums, abss, tail, cutoff = _theta_fourier(delta, L, t, order, series_boost)
    return _finish(sums, abss, tail, cutoff, center)


# ---------------------------------------------------------------------------
# line: the single Gaussian
# ---------------------------------------------------------------------------


def gauss_kernel_jet(m: Manifold1D, t: float, x: float, y: float, order: int) -> Jet:
    """Euclidean kernel (4 pi t)^(-1/2) e^{-(x-y)^2/(4t)}; zero truncation error."""
    _check_t_order(t, order)
    sums, abss = hermite_image_sums(np.array([y - x]), np.array([1.0]), t, order)
    return _finish(sums, abss, np.zeros(order + 1), 0, (t, x, y))


# ---------------------------------------------------------------------------
# Dirichlet interval: alternating images / sine eigenseries
# ---------------------------------------------------------------------------


def _interval_images(xr, yr, ell, t, order, boost):
    dmin = abs(yr - xr)
    shells = 1 + ceil((dmin + 2.0 * sqrt(t * (40.0 + 3.0 * order))) / (2 * ell))
    shells = ceil(shells * boost)

    def shell_terms(ns):
        us, sg = [], []
        for n in ns:
            us.append(yr - xr + 2 * n * ell)
            sg.append(1.0)
            us.append(yr + xr + 2 * n * ell)
            sg.append(-1.0)
        return np.asarray(us), np.asarray(sg)

    for _ in range(50):
        ns = [0]
        for n in range(1, shells + 1):
            ns.extend((-n, n))
        u, sg = shell_terms(ns)
        sums, abss = hermite_image_sums(u, sg, t, order)
        u1, s1 = shell_terms([shells + 1, -(shells + 1)])
        u2, s2 = shell_terms([shells + 2, -(shells + 2)])
        e1 = hermite_image_sums(u1, np.abs(s1), t, order)[1]
        e2 = hermite_image_sums(u2, np.abs(s2), t, order)[1]
        tail = e1 + 2.0 * e2
        if np.all(e2 <= 0.6 * e1 + 1e-300) and (
            sums[0] <= 0 or np.all(tail <= _REL_TAIL_TARGET * abs(sums[0]))
        ):
            return sums, abss, tail, shells
        shells = max(shells + 2, int(shells * 1.5))
    return sums, abss, tail, shells


def _interval_eigen(xr, yr, ell, t, order, boost):
    kmax = 2 + order + ceil((ell / pi) * sqrt((40.0 + 3.0 * order) / t))
    kmax = ceil(kmax * boost)

    def term_bound(k):
        w = pi * k / ell
        js = np.arange(order + 1, dtype=float)
        return (2.0 / ell) * np.exp(-w * w * t + js * np.log(w))

    for _ in range(50):
        b1, b2 = term_bound(kmax + 1), term_bound(kmax + 2)
        if np.all(b2 <= 0.6 * b1 + 1e-300):
            break
        kmax = max(kmax + 2, int(kmax * 1.5))
    sums, abss = sine_series_sums(xr, yr, ell, t, order, kmax)
    tail = b1 + 2.0 * b2
    return sums, abss, tail, kmax


def _interval_jet_unchecked(ell, t, xr, yr, order, method="auto", boost=1.0):
    """Series evaluation with relative coordinates in [0, ell]; no domain checks.

    Exposed (privately) for boundary-flux evaluations in the localization
    module, where yr sits exactly on the boundary.
    """
    if method == "auto":
        method = "images" if t <= ell * ell / 8 else "eigen"
    if method == "images":
        return _interval_images(xr, yr, ell, t, order, boost) + ("images",)
    if method == "eigen":
        return _interval_eigen(xr, yr, ell, t, order, boost) + ("eigen",)
    raise ArgumentError(f"unknown interval method {method!r}")


def interval_kernel_jet(m: DirichletInterval, t: float, x: float, y: float, order: int,
                        *, method: str = "auto", series_boost: float = 1.0) -> Jet:
    """Dirichlet-killed kernel on (a,b): sine eigenseries or alternating images.

    The two backends converge fastest on opposite sides of t = (b-a)^2/8;
    their overlap agreement is the module's cross-validation oracle.
    """
    _check_t_order(t, order)
    if not (m.a < x < m.b and m.a < y < m.b):
        raise DomainError(f"points must lie strictly inside ({m.a}, {m.b})")
    ell = m.b - m.a
    sums, abss, tail, cutoff, _ = _interval_jet_unchecked(
        ell, t, x - m.a, y - m.a, order, method, series_boost
    )
    return _finish(sums, abss, tail, cutoff, (t, x, y))


# ---------------------------------------------------------------------------
# weighted line: linear-drift Gaussian (quadratic potentials)
# ---------------------------------------------------------------------------


def _quadratic_moments(coeffs, t, x):
    c1 = coeffs[1] if len(coeffs) > 1 else 0.0
    c2 = coeffs[2] if len(coeffs) > 2 else 0.0
    if c2 == 0.0:
        return x + c1 * t, 2.0 * t
    lam = -c2
    mu_inf = c1 / (2.0 * lam)
    mean = mu_inf + (x - mu_inf) * exp(-2.0 * lam * t)
    var = -expm1(-4.0 * lam * t) / (2.0 * lam)
    return mean, var


def weighted_line_kernel_jet(m: WeightedLine, t: float, x: float, y: float, order: int) -> Jet:
    """Transition density of dX = f'(X) dt + sqrt(2) dW for quadratic f.

    Gaussian with mean x e^{-2 lam t} (shifted for a linear term) and
    variance (1 - e^{-4 lam t})/(2 lam); only quadratic potentials ship a
    closed form, everything else routes to the spectral backend.
    """
    _check_t_order(t, order)
    coeffs = m.f.coeffs
    if len(coeffs) > 3 and any(c != 0.0 for c in coeffs[3:]):
        raise UnsupportedConfigurationError(
            "closed-form weighted-line kernel needs a quadratic potential"
        )
    mean, var = _quadratic_moments(coeffs, t, x)
    sums, abss = hermite_image_sums(np.array([y - mean]), np.array([1.0]), var / 2.0, order)
    return _finish(sums, abss, np.zeros(order + 1), 0, (t, x, y))


# ---------------------------------------------------------------------------
# hyperbolic 3-space, radial slice
# ---------------------------------------------------------------------------


def _coth_derivative_values(r: float, order: int) -> np.ndarray:
    """d^k/dr^k coth(r) for k = 0..order via the polynomial recursion in c = coth r."""
    c = 1.0 / np.tanh(r)
    polys = [np.array([0.0, 1.0])]  # P_1 = c
    for _ in range(order):
        p = polys[-1]
        dp = np.polynomial.polynomial.polyder(p)
        polys.append(np.polynomial.polynomial.polymul(dp, np.array([1.0, 0.0, -1.0])))
    return np.array([np.polynomial.polynomial.polyval(c, p) for p in polys])


def hyperbolic3_radial_jet(m: HyperbolicRadial3, t: float, r: float, order: int) -> Jet:
    """Radial H^3 kernel (4 pi t)^(-3/2) (r/sinh r) e^{-t - r^2/(4t)}, jets in r.

    Assembled as exp of the log-kernel jet; log sinh derivatives come from
    the coth polynomial recursion, so every order is closed form.
    """
    _check_t_order(t, order)
    if not r > 0:
        raise ArgumentError(f"radial distance must be positive, got {r}")
    lv = np.zeros(order + 1)
    log_sinh = r + log1p(-exp(-2.0 * r)) - log(2.0)
    lv[0] = -1.5 * log(4 * pi * t) - t - r * r / (4 * t) + log(r) - log_sinh
    coth = _coth_derivative_values(r, max(0, order - 1))
    fact = 1.0
    for k in range(1, order + 1):
        term = -coth[k - 1]  # d^k (-log sinh r)
        term += ((-1.0) ** (k - 1)) * fact / r**k  # d^k log r
        if k == 1:
            term += -r / (2 * t)
        elif k == 2:
            term += -1.0 / (2 * t)
        lv[k] = term
        fact *= k
    log_jet_ = jet_from_values(lv, 4.0 * _EPS * (np.abs(lv) + 1.0), center=(t, 0.0, r))
    out = exp_jet(log_jet_)
    return Jet(out.values, out.errors, center=(t, 0.0, r), measure="mu",
               truncation=SeriesTruncation(0, np.zeros(order + 1)))


# ---------------------------------------------------------------------------
# spectral weighted circle
# ---------------------------------------------------------------------------


def _spectral_values(m, data, t, x, y, order):
    f = m.potential
    lam = data.lam
    weights = np.exp(-lam * t)
    psi_x = _spectral.psi_jets(data, x, 0)[0]
    psi_y = _spectral.psi_jets(data, y, order)
    if f is None or f.is_zero:
        a_x = psi_x
        b_y = psi_y
    else:
        a_x = np.exp(-0.5 * float(f(x))) * psi_x
        half_f = jet_from_values(0.5 * f.jet(y, order))
        ef = exp_jet(half_f).values  # jet of e^{f/2} at y
        b_y = np.empty_like(psi_y)
        from math import comb

        for j in range(order + 1):
            acc = np.zeros_like(psi_x)
            for i in range(j + 1):
                acc += comb(j, i) * ef[i] * psi_y[j - i]
            b_y[j] = acc
    core = weights * a_x
    vals = b_y @ core
    abss = np.abs(b_y) @ np.abs(core)
    return vals, abss


def spectral_kernel_jet(m: Manifold1D, grid_size: int, t: float, x: float, y: float,
                        order: int, *, with_error: bool = True) -> Jet:
    """Weighted-circle kernel from eigenpairs of the discretized generator.

    The kernel is assembled in the nu-weighted (symmetrizing) inner product
    and reported against the flat volume; the error bound is a Richardson
    comparison between grid sizes n and 2n.
    """
    _check_t_order(t, order)
    if m.circumference is None:
        raise ArgumentError("spectral backend needs a circle manifold")
    data = _spectral.eigendata(m, grid_size)
    vals, abss = _spectral_values(m, data, t, x, y, order)
    w_last = sqrt(max(data.lam[-1], 1.0))
    mode_tail = 2.0 * exp(-data.lam[-1] * t) * (2.0 / data.L) * w_last ** np.arange(order + 1)
    if with_error:
        data2 = _spectral.eigendata(m, 2 * grid_size)
        vals2, _ = _spectral_values(m, data2, t, x, y, order)
        errors = np.abs(vals - vals2) * (16.0 / 15.0) + mode_tail + 4.0 * _EPS * abss
    else:
        errors = mode_tail + 4.0 * _EPS * abss
    return Jet(vals, errors, center=(t, x, y), measure="mu",
               truncation=SeriesTruncation(len(data.lam), mode_tail))


# ---------------------------------------------------------------------------
# heat-equation residual
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ResidualEstimate:
    """A PDE residual together with its own discretization-error estimate."""

    value: float
    error_estimate: float


def pde_residual(m: Manifold1D, kernel_id: str, t: float, x: float, y: float,
                 *, rel_step: float = 1e-3) -> ResidualEstimate:
    """Heat-equation residual d/dt p - (forward generator in y) p.

    The time derivative is a Richardson-extrapolated central difference;
    spatial derivatives come from the exact jets.  For drifted manifolds
    the forward (Fokker-Planck) form d^2_y p - d_y(Z(y) p) applies, which
    coincides with Delta_x p for every built-in by symmetry.
    """
    _check_t_order(t, 0)
    h = rel_step * t
    if h <= 8 * _EPS * t:
        raise StepSizeError("time step underflows at this precision")

    def value(tt: float) -> float:
        return kernel_jet(m, kernel_id, tt, x, y, 0).value(0)

    d1 = (value(t + h) - value(t - h)) / (2 * h)
    d2 = (value(t + h / 2) - value(t - h / 2)) / h
    dt_est = (4 * d2 - d1) / 3
    p_scale = abs(value(t))
    fd_err = abs(dt_est - d2) / 7.0 + 8.0 * _EPS * p_scale / h

    jet = kernel_jet(m, kernel_id, t, x, y, 2)
    p0, p1, p2 = jet.values[:3]
    if isinstance(m, HyperbolicRadial3):
        r = abs(y - x)
        sgn = 1.0 if y >= x else -1.0  # jet is in y; radial derivative flips with orientation
        spatial = p2 + sgn * (2.0 / np.tanh(r)) * p1
    elif m.potential is not None and not m.potential.is_zero:
        z = m.potential.derivative()
        spatial = p2 - (float(z.derivative()(y)) * p0 + float(z(y)) * p1)
    else:
        spatial = p2
    jet_err = float(jet.errors[2] + jet.errors[1] + jet.errors[0])
    return ResidualEstimate(value=float(dt_est - spatial),
                            error_estimate=float(fd_err + jet_err))


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------


def default_backend(m: Manifold1D) -> str:
    return {
        "circle": "theta",
        "line": "gauss",
        "interval": "interval",
        "weighted-line": "mehler",
        "weighted-circle": "spectral",
        "h3": "h3",
    }[m.kind]


def kernel_jet(m: Manifold1D, backend_id: str, t: float, x: float, y: float, order: int,
               *, series_boost: float = 1.0, grid_size: int = 2048,
               spectral_error: bool = True) -> Jet:
    """Evaluate the kernel jet selected by a backend identifier."""
    if backend_id == "theta":
        return theta_kernel_jet(m, t, x, y, order, series_boost=series_boost)
    if backend_id == "gauss":
        return gauss_kernel_jet(m, t, x, y, order)
    if backend_id == "interval":
        return interval_kernel_jet(m, t, x, y, order, series_boost=series_boost)
    if backend_id == "mehler":
        return weighted_line_kernel_jet(m, t, x, y, order)
    if backend_id == "h3":
        r = abs(y - x)
        jet = hyperbolic3_radial_jet(m, t, r, order)
        if y < x:  # odd orders flip with the radial orientation
            vals = jet.values * np.array([(-1.0) ** k for k in range(order + 1)])
            return Jet(vals, jet.errors, center=(t, x, y), measure=jet.measure,
                       truncation=jet.truncation)
        return Jet(jet.values, jet.errors, center=(t, x, y), measure=jet.measure,
                   truncation=jet.truncation)
    if backend_id == "spectral":
        return spectral_kernel_jet(m, grid_size, t, x, y, order, with_error=spectral_error)
    raise ArgumentError(f"unknown kernel backend {backend_id!r}; known: {KERNEL_IDS}")
