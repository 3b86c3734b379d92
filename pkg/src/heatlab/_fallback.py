"""Pure-NumPy implementations of the hot numerical kernels.

Selected at import time when the compiled extension (heatlab._speedups)
is unavailable; the two modules expose identical signatures and
semantics.  See benchmarks/bench_backends.py for a side-by-side timing.
"""

import numpy as np

SQRT_PI = 1.7724538509055160273


def hermite_image_sums(u, signs, t, order):
    """Signed Gaussian image sums and their u-derivatives.

    Returns (sums, abs_sums) of shape (order+1,):
      sums[k] = sum_i signs[i] * d^k/du^k [ exp(-u_i^2/(4t)) / sqrt(4 pi t) ]
    with d^k/du^k exp(-z^2) = (-1/(2 sqrt t))^k H_k(z) exp(-z^2), z = u/(2 sqrt t).
    abs_sums accumulates absolute term values for roundoff bounds.
    """
    u = np.asarray(u, dtype=float)
    signs = np.asarray(signs, dtype=float)
    st = np.sqrt(t)
    norm = 1.0 / (2.0 * st * SQRT_PI)
    z = u / (2.0 * st)
    base = signs * np.exp(-z * z) * norm
    sums = np.empty(order + 1)
    abs_sums = np.empty(order + 1)
    h_prev = np.zeros_like(z)
    h_cur = np.ones_like(z)
    scale = 1.0
    for k in range(order + 1):
        terms = scale * h_cur * base
        sums[k] = terms.sum()
        abs_sums[k] = np.abs(terms).sum()
        h_prev, h_cur = h_cur, 2.0 * z * h_cur - 2.0 * k * h_prev
        scale *= -1.0 / (2.0 * st)
    return sums, abs_sums


def sine_series_sums(xrel, yrel, ell, t, order, kmax):
    """Dirichlet eigenseries sums and y-derivatives on an interval of length ell.

    sums[j] = sum_{k=1..kmax} (2/ell) sin(k pi xrel/ell) e^{-(k pi/ell)^2 t}
              * d^j/dy^j sin(k pi yrel/ell)
    """
    k = np.arange(1, kmax + 1, dtype=float)
    w = np.pi * k / ell
    amp = (2.0 / ell) * np.sin(w * xrel) * np.exp(-w * w * t)
    sums = np.empty(order + 1)
    abs_sums = np.empty(order + 1)
    sy, cy = np.sin(w * yrel), np.cos(w * yrel)
    cycle = (sy, cy, -sy, -cy)
    wpow = np.ones_like(w)
    for j in range(order + 1):
        terms = amp * wpow * cycle[j % 4]
        sums[j] = terms.sum()
        abs_sums[j] = np.abs(terms).sum()
        wpow = wpow * w
    return sums, abs_sums


def fourier_circle_sums(delta, L, t, order, kmax):
    """Fourier-side circle kernel sums and derivatives in delta = y - x.

    sums[j] = d^j/d delta^j (1/L)[1 + 2 sum_{k=1..kmax} e^{-(2 pi k/L)^2 t}
                                     cos(2 pi k delta/L)]
    """
    k = np.arange(1, kmax + 1, dtype=float)
    w = 2.0 * np.pi * k / L
    amp = (2.0 / L) * np.exp(-w * w * t)
    sums = np.empty(order + 1)
    abs_sums = np.empty(order + 1)
    cd, sd = np.cos(w * delta), np.sin(w * delta)
    cycle = (cd, -sd, -cd, sd)
    wpow = np.ones_like(w)
    for j in range(order + 1):
        terms = amp * wpow * cycle[j % 4]
        sums[j] = terms.sum()
        abs_sums[j] = np.abs(terms).sum()
        wpow = wpow * w
    sums[0] += 1.0 / L
    abs_sums[0] += 1.0 / L
    return sums, abs_sums


def _drift(kind, dp, x):
    if kind == 0:
        return 0.0
    if kind == 1:
        out = np.zeros_like(x)
        for c in dp[::-1]:
            out = out * x + c
        return out
    period = dp[0]
    a0 = dp[1]
    nk = int(dp[2])
    out = np.full_like(x, a0)
    for k in range(1, nk + 1):
        w = 2.0 * np.pi * k / period
        out = out + dp[2 + k] * np.cos(w * x) + dp[2 + nk + k] * np.sin(w * x)
    return out


def em_evolve(x, xi, dt, drift_kind, dp, wrap_L, kill, lo, hi, ball, center, radius,
              absorbed, absorb_step, exited, exit_step):
    """Euler-Maruyama stepping for dX = Z(X) ds + sqrt(2) dW, in place.

    Step j uses normals xi[:, j]; circle paths wrap modulo wrap_L, interval
    paths absorb on first boundary crossing (checked after each discrete
    step), ball tracking records the first step at which |X - center|
    reaches radius.  Returns 1 if any step had |Z| dt > 0.5.
    """
    n, steps = xi.shape
    sq = np.sqrt(2.0 * dt)
    unstable = 0
    alive = absorbed == 0
    for j in range(steps):
        disp = _drift(drift_kind, dp, x) * dt
        if np.any(np.abs(np.where(alive, disp, 0.0)) > 0.5):
            unstable = 1
        xn = (x + disp) + sq * xi[:, j]
        if wrap_L > 0.0:
            xn = xn - wrap_L * np.floor(xn / wrap_L)
        np.copyto(x, xn, where=alive)
        if kill:
            newly = alive & ((x <= lo) | (x >= hi))
            absorb_step[newly] = j + 1
            absorbed[newly] = 1
            alive = alive & ~newly
        if ball:
            if wrap_L > 0.0:
                d = np.abs(x - center) % wrap_L
                d = np.minimum(d, wrap_L - d)
            else:
                d = np.abs(x - center)
            newly_out = (exited == 0) & (d >= radius)
            exit_step[newly_out] = j + 1
            exited[newly_out] = 1
    return unstable
