"""Pure-Python orbit kernels: the fallback backend.

Mirrors ``_fastkern.pyx`` operation for operation so both backends produce
bitwise-identical float64 trajectories. Near-discontinuity floor arguments
are snapped inside a 2^-40 guard band and counted as events.
"""

from __future__ import annotations

import math

GUARD = 2.0**-40

backend = "python"


def _guarded_floor(x: float, events: list) -> float:
    r = math.floor(x + 0.5)
    if abs(x - r) < GUARD:
        events[0] += 1
        return r
    return math.floor(x)


def _g(diff: float, events: list) -> float:
    r = diff - math.floor(diff)
    if abs(r - 0.5) < GUARD:
        events[0] += 1
        return 0.5
    return r - math.floor(r + 0.5)


def torus_orbit(u0, rho, eps, steps, out):
    """Iterate the coupled torus map; returns the guard-band event count."""
    n = len(u0)
    events = [0]
    u = [u0[i] - math.floor(u0[i]) for i in range(n)]
    for i in range(n):
        out[0, i] = u[i]
    new = [0.0] * n
    for t in range(1, steps + 1):
        for i in range(n):
            drift = 0.0
            ui = u[i]
            for j in range(n):
                drift += rho[j] * _g(u[j] - ui, events)
            val = 2.0 * (ui + eps * drift)
            new[i] = val - math.floor(val)
        for i in range(n):
            u[i] = new[i]
            out[t, i] = new[i]
    return events[0]


def lorenz_orbit(x0, a, xd, steps, out):
    """Iterate the three-branch interval map."""
    x = x0
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


def simplex_g_orbit(x0, s0, rho, eps, steps, out):
    """Iterate the reduced simplex map through the float pipeline.

    Rebuilds the increasing representative, applies the coupled step, lifts
    anchored on the last coordinate, sorts the head, and reads gaps back.
    Returns the guard-band event count.
    """
    n = len(rho)
    d = n - 1
    events = [0]
    x = [float(c) for c in x0[:d]]
    s = s0
    for i in range(d):
        out[0, i] = x[i]
    u = [0.0] * n
    v = [0.0] * n
    w = [0.0] * n
    for t in range(1, steps + 1):
        u[n - 1] = s
        for i in range(d - 1, -1, -1):
            u[i] = u[i + 1] - x[i]
        for i in range(n):
            ui = u[i] - math.floor(u[i])
            v[i] = ui
        for i in range(n):
            drift = 0.0
            for j in range(n):
                drift += rho[j] * _g(v[j] - v[i], events)
            val = 2.0 * (v[i] + eps * drift)
            w[i] = val - math.floor(val)
        last = w[n - 1]
        for i in range(n - 1):
            w[i] = w[i] + _guarded_floor(last - w[i], events)
        head = sorted(w[: n - 1])
        for i in range(n - 1):
            w[i] = head[i]
        s = last
        for i in range(d):
            x[i] = w[i + 1] - w[i]
        for i in range(d):
            out[t, i] = x[i]
    return events[0]
