# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled orbit kernels: the fast backend.

Operation-for-operation mirror of ``_slowkern.py``; both backends must
produce bitwise-identical float64 trajectories.
"""

from libc.math cimport floor

cdef double GUARD = 2.0 ** -40

backend = "compiled"


cdef inline double _guarded_floor(double x, long* events) nogil:
    cdef double r = floor(x + 0.5)
    if x - r < GUARD and r - x < GUARD:
        events[0] += 1
        return r
    return floor(x)


cdef inline double _g(double diff, long* events) nogil:
    cdef double r = diff - floor(diff)
    if r - 0.5 < GUARD and 0.5 - r < GUARD:
        events[0] += 1
        return 0.5
    return r - floor(r + 0.5)


def torus_orbit(double[::1] u0, double[::1] rho, double eps, long steps, double[:, ::1] out):
    """Iterate the coupled torus map; returns the guard-band event count."""
    cdef long n = u0.shape[0]
    cdef long events = 0
    cdef long t, i, j
    cdef double drift, ui, val
    cdef double[64] u
    cdef double[64] new
    for i in range(n):
        u[i] = u0[i] - floor(u0[i])
        out[0, i] = u[i]
    for t in range(1, steps + 1):
        for i in range(n):
            drift = 0.0
            ui = u[i]
            for j in range(n):
                drift += rho[j] * _g(u[j] - ui, &events)
            val = 2.0 * (ui + eps * drift)
            new[i] = val - floor(val)
        for i in range(n):
            u[i] = new[i]
            out[t, i] = new[i]
    return events


def lorenz_orbit(double x0, double a, double xd, long steps, double[::1] out):
    """Iterate the three-branch interval map."""
    cdef double x = x0
    cdef long t
    out[0] = x
    for t in range(1, steps + 1):
        if x <= xd:
            x = a * x
        elif x < 1.0 - xd:
            x = a * (x - 0.5) + 0.5
        else:
            x = a * (x - 1.0) + 1.0
        out[t] = x
    return 0


def simplex_g_orbit(double[::1] x0, double s0, double[::1] rho, double eps, long steps, double[:, ::1] out):
    """Iterate the reduced simplex map through the float pipeline."""
    cdef long n = rho.shape[0]
    cdef long d = n - 1
    cdef long events = 0
    cdef long t, i, j, m
    cdef double drift, val, last, s, key
    cdef double[64] x
    cdef double[64] u
    cdef double[64] v
    cdef double[64] w
    for i in range(d):
        x[i] = x0[i]
        out[0, i] = x[i]
    s = s0
    for t in range(1, steps + 1):
        u[n - 1] = s
        for i in range(d - 1, -1, -1):
            u[i] = u[i + 1] - x[i]
        for i in range(n):
            v[i] = u[i] - floor(u[i])
        for i in range(n):
            drift = 0.0
            for j in range(n):
                drift += rho[j] * _g(v[j] - v[i], &events)
            val = 2.0 * (v[i] + eps * drift)
            w[i] = val - floor(val)
        last = w[n - 1]
        for i in range(n - 1):
            w[i] = w[i] + _guarded_floor(last - w[i], &events)
        # insertion sort of the head; generic values have no ties
        for i in range(1, n - 1):
            key = w[i]
            m = i - 1
            while m >= 0 and w[m] > key:
                w[m + 1] = w[m]
                m -= 1
            w[m + 1] = key
        s = last
        for i in range(d):
            x[i] = w[i + 1] - w[i]
            out[t, i] = x[i]
    return events
