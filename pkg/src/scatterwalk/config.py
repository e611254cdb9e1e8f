"""Numerical tolerances and resource caps used across the package."""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    norm: float = 1e-10
    unitarity: float = 1e-12
    collapse: float = 1e-10
    # refuse a collapsed fast path when the start state leaks further than this
    residual_refuse: float = 1e-8
    circuit: float = 1e-12
    eigen: float = 1e-10
    materialize_cap: int = 20_000


TOL = Tolerances()
