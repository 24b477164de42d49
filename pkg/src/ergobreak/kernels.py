"""Backend selection for the orbit kernels.

Prefers the compiled extension and falls back to the pure-Python mirror when
it is unavailable; both produce bitwise-identical trajectories, so the
choice only affects speed. ``benchmarks/bench_kernels.py`` measures the gap.
"""

from __future__ import annotations

try:  # pragma: no cover - depends on the build host
    from . import _fastkern as _impl
except ImportError:  # pragma: no cover
    from . import _slowkern as _impl

torus_orbit = _impl.torus_orbit
lorenz_orbit = _impl.lorenz_orbit
simplex_g_orbit = _impl.simplex_g_orbit


def backend_name() -> str:
    return _impl.backend


def load_backend(name: str):
    """Explicit backend module by name, for benchmarks and cross-checks."""
    if name == "python":
        from . import _slowkern

        return _slowkern
    if name == "compiled":
        from . import _fastkern

        return _fastkern
    raise ValueError(f"unknown backend {name!r}")
