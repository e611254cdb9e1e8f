"""Classical unstructured-search baselines.

``N`` is an abstract element count: it can be read as vertices or, for the
edge-based comparison with the walk, as edge states.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError


class Variant(str, enum.Enum):
    BLIND = "blind"  # sampling with replacement
    MEMORY = "memory"  # sampling without replacement


@dataclass(frozen=True)
class ClassicalSearchSpec:
    N: int
    v: int
    variant: Variant = Variant.BLIND

    def __post_init__(self):
        if not 1 <= self.v <= self.N:
            raise InvalidParameterError(f"need 1 <= v <= N, got N={self.N}, v={self.v}")
        object.__setattr__(self, "variant", Variant(self.variant))


def blind_pmf(spec: ClassicalSearchSpec, k: int) -> float:
    """Probability that the first hit happens at draw ``k``."""
    if k < 1:
        return 0.0
    p = spec.v / spec.N
    return (1.0 - p) ** (k - 1) * p


def blind_average(spec: ClassicalSearchSpec) -> float:
    return spec.N / spec.v


def memory_pmf(spec: ClassicalSearchSpec, k: int) -> float:
    """First-hit probability at draw ``k`` without replacement; 0 outside ``1..N-v+1``."""
    N, v = spec.N, spec.v
    if not 1 <= k <= N - v + 1:
        return 0.0
    # (N-v)! v / N! * (N-k)! / (N-v-k+1)!, in log space
    log_p = (math.lgamma(N - v + 1) + math.log(v) - math.lgamma(N + 1)
             + math.lgamma(N - k + 1) - math.lgamma(N - v - k + 2))
    return math.exp(log_p)


def memory_pmf_table(spec: ClassicalSearchSpec) -> np.ndarray:
    """``P_1 .. P_{N-v+1}`` by running products (more accurate than per-k lgamma)."""
    N, v = spec.N, spec.v
    k = np.arange(1, N - v + 1)
    ratios = (N - v - k + 1) / (N - k)  # P_{k+1} / P_k
    return (v / N) * np.concatenate([[1.0], np.cumprod(ratios)])


def memory_average(spec: ClassicalSearchSpec) -> float:
    return (spec.N + 1) / (spec.v + 1)


def blind_pmf_table(spec: ClassicalSearchSpec, tail: float = 1e-17) -> np.ndarray:
    """``P_1 .. P_K`` with ``K`` chosen so the neglected mean contribution is below ``tail``."""
    p = spec.v / spec.N
    if p == 1.0:
        return np.array([1.0])
    # sum_{k>K} k (1-p)^(k-1) p = (1-p)^K (K + 1/p)
    K = 1
    while (1 - p) ** K * (K + 1 / p) > tail:
        K *= 2
    k = np.arange(1, K + 1)
    return (1.0 - p) ** (k - 1) * p


def pmf_mean(pmf: np.ndarray) -> float:
    k = np.arange(1, len(pmf) + 1)
    return math.fsum(k * pmf)


def average(spec: ClassicalSearchSpec) -> float:
    return blind_average(spec) if spec.variant is Variant.BLIND else memory_average(spec)


def simulate_steps(spec: ClassicalSearchSpec, trials: int, rng: np.random.Generator,
                   chunk: int = 10_000) -> np.ndarray:
    """Draw counts until the first special element, one entry per trial.

    Elements ``0..v-1`` are the special ones.
    """
    N, v = spec.N, spec.v
    out = np.empty(trials, dtype=np.int64)
    if spec.variant is Variant.BLIND:
        steps = np.zeros(trials, dtype=np.int64)
        active = np.arange(trials)
        while active.size:
            steps[active] += 1
            hit = rng.integers(0, N, size=active.size) < v
            active = active[~hit]
        return steps
    for lo in range(0, trials, chunk):
        n = min(chunk, trials - lo)
        perms = rng.permuted(np.tile(np.arange(N, dtype=np.int32), (n, 1)), axis=1)
        out[lo:lo + n] = np.argmax(perms < v, axis=1) + 1
    return out


def monte_carlo_average(spec: ClassicalSearchSpec, trials: int, seed: int = 0) -> tuple[float, float]:
    """Empirical mean and standard error of the draws-to-success count."""
    if trials < 1:
        raise InvalidParameterError("trials must be >= 1")
    rng = np.random.default_rng(int(seed))
    steps = simulate_steps(spec, trials, rng)
    mean = float(steps.mean())
    stderr = float(steps.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return mean, stderr
