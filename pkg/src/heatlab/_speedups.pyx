# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the hot kernels in heatlab._fallback.

Same signatures and semantics; tight C loops instead of vectorized NumPy.
"""

import numpy as np

from libc.math cimport cos, exp, fabs, floor, fmod, sin, sqrt

cdef double SQRT_PI = 1.7724538509055160273
cdef double PI = 3.141592653589793238462643383


def hermite_image_sums(u, signs, double t, int order):
    cdef double[::1] uc = np.ascontiguousarray(u, dtype=np.float64)
    cdef double[::1] sc = np.ascontiguousarray(signs, dtype=np.float64)
    sums_arr = np.zeros(order + 1)
    abs_arr = np.zeros(order + 1)
    cdef double[::1] sums = sums_arr
    cdef double[::1] absums = abs_arr
    cdef Py_ssize_t i, n = uc.shape[0]
    cdef int k
    cdef double st = sqrt(t)
    cdef double norm = 1.0 / (2.0 * st * SQRT_PI)
    cdef double dscale = -1.0 / (2.0 * st)
    cdef double z, base, h_prev, h_cur, h_next, scale, term
    for i in range(n):
        z = uc[i] / (2.0 * st)
        base = sc[i] * exp(-z * z) * norm
        h_prev = 0.0
        h_cur = 1.0
        scale = 1.0
        for k in range(order + 1):
            term = scale * h_cur * base
            sums[k] += term
            absums[k] += fabs(term)
            h_next = 2.0 * z * h_cur - 2.0 * k * h_prev
            h_prev = h_cur
            h_cur = h_next
            scale *= dscale
    return sums_arr, abs_arr


def sine_series_sums(double xrel, double yrel, double ell, double t, int order, int kmax):
    sums_arr = np.zeros(order + 1)
    abs_arr = np.zeros(order + 1)
    cdef double[::1] sums = sums_arr
    cdef double[::1] absums = abs_arr
    cdef int k, j, phase
    cdef double w, amp, sy, cy, wpow, term, tr
    for k in range(1, kmax + 1):
        w = PI * k / ell
        amp = (2.0 / ell) * sin(w * xrel) * exp(-w * w * t)
        sy = sin(w * yrel)
        cy = cos(w * yrel)
        wpow = 1.0
        for j in range(order + 1):
            phase = j % 4
            if phase == 0:
                tr = sy
            elif phase == 1:
                tr = cy
            elif phase == 2:
                tr = -sy
            else:
                tr = -cy
            term = amp * wpow * tr
            sums[j] += term
            absums[j] += fabs(term)
            wpow *= w
    return sums_arr, abs_arr


def fourier_circle_sums(double delta, double L, double t, int order, int kmax):
    sums_arr = np.zeros(order + 1)
    abs_arr = np.zeros(order + 1)
    cdef double[::1] sums = sums_arr
    cdef double[::1] absums = abs_arr
    cdef int k, j, phase
    cdef double w, amp, cd, sd, wpow, term, tr
    for k in range(1, kmax + 1):
        w = 2.0 * PI * k / L
        amp = (2.0 / L) * exp(-w * w * t)
        cd = cos(w * delta)
        sd = sin(w * delta)
        wpow = 1.0
        for j in range(order + 1):
            phase = j % 4
            if phase == 0:
                tr = cd
            elif phase == 1:
                tr = -sd
            elif phase == 2:
                tr = -cd
            else:
                tr = sd
            term = amp * wpow * tr
            sums[j] += term
            absums[j] += fabs(term)
            wpow *= w
    sums[0] += 1.0 / L
    absums[0] += 1.0 / L
    return sums_arr, abs_arr


cdef inline double _drift_at(int kind, double[::1] dp, double x) noexcept:
    cdef double out = 0.0
    cdef double w
    cdef Py_ssize_t i
    cdef int k, nk
    if kind == 0:
        return 0.0
    if kind == 1:
        for i in range(dp.shape[0] - 1, -1, -1):
            out = out * x + dp[i]
        return out
    nk = <int> dp[2]
    out = dp[1]
    for k in range(1, nk + 1):
        w = 2.0 * PI * k / dp[0]
        out = out + dp[2 + k] * cos(w * x) + dp[2 + nk + k] * sin(w * x)
    return out


def em_evolve(x, xi, double dt, int drift_kind, dp, double wrap_L,
              bint kill, double lo, double hi, bint ball, double center, double radius,
              absorbed, absorb_step, exited, exit_step):
    cdef double[::1] xv = x
    cdef double[:, ::1] xiv = xi
    cdef double[::1] dpv = np.ascontiguousarray(dp, dtype=np.float64)
    cdef signed char[::1] ab = absorbed
    cdef long long[::1] ab_step = absorb_step
    cdef signed char[::1] ex = exited
    cdef long long[::1] ex_step = exit_step
    cdef Py_ssize_t i, n = xiv.shape[0]
    cdef Py_ssize_t j, steps = xiv.shape[1]
    cdef double sq = sqrt(2.0 * dt)
    cdef int unstable = 0
    cdef double xc, disp, d
    for i in range(n):
        xc = xv[i]
        if ab[i]:
            continue
        for j in range(steps):
            disp = _drift_at(drift_kind, dpv, xc) * dt
            if fabs(disp) > 0.5:
                unstable = 1
            xc = (xc + disp) + sq * xiv[i, j]
            if wrap_L > 0.0:
                xc = xc - wrap_L * floor(xc / wrap_L)
            if kill:
                if xc <= lo or xc >= hi:
                    ab_step[i] = j + 1
                    ab[i] = 1
                    break
            if ball and ex[i] == 0:
                if wrap_L > 0.0:
                    d = fmod(fabs(xc - center), wrap_L)
                    if wrap_L - d < d:
                        d = wrap_L - d
                else:
                    d = fabs(xc - center)
                if d >= radius:
                    ex_step[i] = j + 1
                    ex[i] = 1
        xv[i] = xc
    return unstable
