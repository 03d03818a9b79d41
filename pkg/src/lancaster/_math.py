"""Small exact-arithmetic helpers: rising factorials and Stirling transforms."""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

STIRLING_PRECOMPUTED = 20


def rising(a: float, k: int) -> float:
    """Ascending factorial ``[a]_k = a (a+1) ... (a+k-1)`` with ``[a]_0 = 1``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    out = 1.0
    for r in range(k):
        out *= a + r
    return out


def rising_ratio(a: float, b: float, k: int) -> float:
    """``[a]_k / [b]_k`` evaluated as a product of ratios (no overflow)."""
    out = 1.0
    for r in range(k):
        out *= (a + r) / (b + r)
    return out


@lru_cache(maxsize=None)
def _stirling_tables(size: int) -> tuple[tuple[tuple[int, ...], ...], tuple[tuple[int, ...], ...]]:
    # c1[m][k]: unsigned first kind, [x]_m = sum_k c1[m][k] x^k
    # s2[m][k]: second kind, x^m = sum_k (-1)^(m-k) s2[m][k] [x]_k
    c1 = [[0] * (size + 1) for _ in range(size + 1)]
    s2 = [[0] * (size + 1) for _ in range(size + 1)]
    c1[0][0] = s2[0][0] = 1
    for m in range(1, size + 1):
        for k in range(1, m + 1):
            c1[m][k] = c1[m - 1][k - 1] + (m - 1) * c1[m - 1][k]
            s2[m][k] = s2[m - 1][k - 1] + k * s2[m - 1][k]
    return tuple(map(tuple, c1)), tuple(map(tuple, s2))


def stirling1_unsigned(m: int, k: int) -> int:
    size = max(STIRLING_PRECOMPUTED, m)
    return _stirling_tables(size)[0][m][k]


def stirling2(m: int, k: int) -> int:
    size = max(STIRLING_PRECOMPUTED, m)
    return _stirling_tables(size)[1][m][k]


_stirling_tables(STIRLING_PRECOMPUTED)


def raw_to_ascending(raw: Sequence[float]) -> list[float]:
    """Map ``E[X^k]`` (k = 0..M) to ``E[[X]_k]`` (k = 0..M)."""
    M = len(raw) - 1
    c1, _ = _stirling_tables(max(STIRLING_PRECOMPUTED, M))
    return [float(sum(c1[m][k] * raw[k] for k in range(m + 1))) for m in range(M + 1)]


def ascending_to_raw(asc: Sequence[float]) -> list[float]:
    """Inverse of :func:`raw_to_ascending`."""
    M = len(asc) - 1
    _, s2 = _stirling_tables(max(STIRLING_PRECOMPUTED, M))
    return [
        float(sum((-1) ** (m - k) * s2[m][k] * asc[k] for k in range(m + 1)))
        for m in range(M + 1)
    ]
