"""Operation and memory counts for a given number of modes and photons."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction
from math import comb, exp, lgamma, log

from .fock import count_states, index_width_bytes

BYTES_PER_COEFFICIENT = 16


def single_output_average(m: int, n: int) -> Fraction:
    """Mean multiplication count for one output drawn uniformly from the layer."""
    if n == 0:
        return Fraction(0)
    return Fraction(m * comb(2 * m + n - 2, n - 1), count_states(m, n))


def _log_comb(a: float, b: float) -> float:
    return lgamma(a + 1) - lgamma(b + 1) - lgamma(a - b + 1)


def _log_average_at_ratio(theta: float, n: int) -> float:
    m = theta * n
    return log(m) + _log_comb(2 * m + n - 2, n - 1) - _log_comb(n + m - 1, n)


def average_growth_ratio(theta: float, n: int) -> float:
    """Ratio of the single-output average at ``n + 1`` to ``n`` photons, with m/n fixed."""
    return exp(_log_average_at_ratio(theta, n + 1) - _log_average_at_ratio(theta, n))


def asymptotic_growth(theta: float) -> float:
    """Limit of :func:`average_growth_ratio` as ``n`` grows (27/16 at theta = 1)."""
    t = theta
    return exp(
        (2 * t + 1) * log(2 * t + 1) + t * log(t) - 2 * t * log(2 * t) - (t + 1) * log(t + 1)
    )


@dataclass(frozen=True)
class ComplexityEstimate:
    m: int
    n: int
    theta: float
    state_count: int
    full_ops: int
    single_output_avg_ops: float
    worst_single_ops: int
    memory_bytes_full: int
    memory_bytes_rolling: int
    memory_bytes_all_layers: int
    index_bytes: int
    avg_growth_ratio: float | None
    asymptotic_growth: float

    def as_dict(self) -> dict:
        return asdict(self)


def estimate(m: int, n: int) -> ComplexityEstimate:
    if m < 1 or n < 0:
        raise ValueError(f"need m >= 1 and n >= 0, got m={m}, n={n}")
    sizes = [count_states(m, k) for k in range(n + 1)]
    m_n = sizes[-1]
    index_bytes = sum(sizes[k] * k * index_width_bytes(sizes[k - 1]) for k in range(1, n + 1))
    theta = m / n if n else float("inf")
    return ComplexityEstimate(
        m=m,
        n=n,
        theta=theta,
        state_count=m_n,
        full_ops=n * m_n,
        single_output_avg_ops=float(single_output_average(m, n)),
        worst_single_ops=n * 2 ** (n - 1) if n else 0,
        memory_bytes_full=BYTES_PER_COEFFICIENT * m_n,
        memory_bytes_rolling=BYTES_PER_COEFFICIENT * (m_n + (sizes[-2] if n else 0)),
        memory_bytes_all_layers=BYTES_PER_COEFFICIENT * sum(sizes),
        index_bytes=index_bytes,
        avg_growth_ratio=average_growth_ratio(theta, n) if n else None,
        asymptotic_growth=asymptotic_growth(theta) if n else float("nan"),
    )
