"""Exact prior laws: EPPF, ordered EPPF, species counts, order-1 probability,
and the joint law of the first r order frequencies."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .partition import PypParams
from .specialfn import (
    log_gen_factorial_scaled_row,
    log_noncentral_gf_scaled_row,
    log_rising,
)

NEG_INF = -math.inf


def _check_composition(freqs) -> tuple:
    freqs = tuple(int(f) for f in freqs)
    if not freqs or any(f < 1 for f in freqs):
        raise ValueError(f"need a composition of positive parts, got {freqs}")
    return freqs


def log_eppf(freqs: Sequence[int], params: PypParams) -> float:
    """log probability of an unordered partition with block sizes `freqs`."""
    freqs = _check_composition(freqs)
    a, t = params.alpha, params.theta
    n, k = sum(freqs), len(freqs)
    acc = -log_rising(t, n)
    for i in range(k):
        acc += math.log(t + i * a)
    for f in freqs:
        acc += log_rising(1.0 - a, f - 1)
    return acc


def log_ordered_eppf(freqs: Sequence[int], params: PypParams) -> float:
    """log probability of an ordered partition with frequencies (m_1, ..., m_k),
    order 1 carrying the largest weight."""
    freqs = _check_composition(freqs)
    a, t = params.alpha, params.theta
    n = sum(freqs)
    acc = -log_rising(t, n)
    tail = n
    for f in freqs:
        tail_next = tail - f
        acc += math.log(t * f + a * tail_next) - math.log(tail)
        acc += log_rising(1.0 - a, f - 1)
        tail = tail_next
    return acc


def dist_Kn(n: int, params: PypParams) -> np.ndarray:
    """Pr[K_n = k] for k = 0..n (entry 0 is 0); sums to 1."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    a, t = params.alpha, params.theta
    row = log_gen_factorial_scaled_row(n, a)
    i = np.arange(n, dtype=np.float64)
    logpref = np.concatenate(([0.0], np.cumsum(np.log(t + a * i))))
    logp = logpref + row - log_rising(t, n)
    out = np.exp(logp)
    out[0] = 0.0
    return out


def dist_Kmn(m: int, n: int, k: int, params: PypParams) -> np.ndarray:
    """Pr[K_m^(n) = s | K_n = k] for s = 0..m; point mass at 0 when m = 0."""
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if m == 0:
        return np.ones(1)
    a, t = params.alpha, params.theta
    gamma = -n + k * a
    row = log_noncentral_gf_scaled_row(m, a, gamma)
    i = np.arange(m, dtype=np.float64)
    logpref = np.concatenate(([0.0], np.cumsum(np.log(t + (k + i) * a))))
    return np.exp(logpref + row - log_rising(t + n, m))


def expected_Kn(n: int, params: PypParams) -> float:
    """E[K_n] in closed form (harmonic sum at alpha = 0)."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if n == 0:
        return 0.0
    a, t = params.alpha, params.theta
    if a == 0.0:
        i = np.arange(n, dtype=np.float64)
        return float(np.sum(t / (t + i)))
    return t / a * math.expm1(log_rising(t + a, n) - log_rising(t, n))


def expected_Kmn(m: int, n: int, k: int, params: PypParams) -> float:
    """E[K_m^(n) | K_n = k] in closed form."""
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if m == 0:
        return 0.0
    a, t = params.alpha, params.theta
    if a == 0.0:
        i = np.arange(m, dtype=np.float64)
        return float(np.sum(t / (t + n + i)))
    return (k + t / a) * math.expm1(log_rising(t + n + a, m) - log_rising(t + n, m))


def prob_oldest(i: int, n: int, params: PypParams) -> float:
    """Probability that a species of frequency i in a sample of n has order 1.

    Exact branches: i/n at alpha = 0 and 1 at i = n. Otherwise the
    expectation over K_{n-i} is summed exactly against dist_Kn.
    """
    if not 1 <= i <= n:
        raise ValueError(f"need 1 <= i <= n, got i={i}, n={n}")
    a, t = params.alpha, params.theta
    if a == 0.0:
        return i / n
    if i == n:
        return 1.0
    pk = dist_Kn(n - i, params)
    k = np.arange(1, n - i + 1, dtype=np.float64)
    e = float(pk[1:] @ (1.0 / (t + a * k)))
    return (a * n + i * (t - a)) / n * e


def prob_oldest_curve(n: int, params: PypParams) -> np.ndarray:
    """prob_oldest(i, n) for i = 0..n in one sweep (entry 0 is nan)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    a, t = params.alpha, params.theta
    out = np.empty(n + 1)
    out[0] = np.nan
    if a == 0.0:
        out[1:] = np.arange(1, n + 1) / n
        return out
    e = _kernels.oldest_inv_moments(n - 1, a, t)  # E[1/(t + a K_j)], j = 0..n-1
    i = np.arange(1, n, dtype=np.float64)
    out[1:n] = (a * n + i * (t - a)) / n * e[n - 1:0:-1]
    out[n] = 1.0
    return out


def _check_prefix(n: int, prefix) -> tuple:
    prefix = tuple(int(v) for v in prefix)
    if not prefix or any(v < 1 for v in prefix):
        raise ValueError(f"prefix parts must be >= 1, got {prefix}")
    if sum(prefix) > n:
        raise ValueError(f"prefix {prefix} exceeds n={n}")
    return prefix


def _log_multinomial(n: int, parts) -> float:
    acc = math.lgamma(n + 1)
    for p in parts:
        acc -= math.lgamma(p + 1)
    return acc


def _log_crn(N: int, prefix, alpha: float, theta: float) -> float:
    """log of the order-prefix constant: prod_j [alpha(N-|m|_{1:j}) + theta m_j]
    / (N - |m|_{1:j-1}) * (1-alpha)_(m_j - 1)."""
    acc = 0.0
    cum = 0
    for mj in prefix:
        prev = cum
        cum += mj
        acc += math.log(alpha * (N - cum) + theta * mj) - math.log(N - prev)
        acc += log_rising(1.0 - alpha, mj - 1)
    return acc


def log_prior_first_r(n: int, r: int, prefix: Sequence[int], params: PypParams) -> float:
    """log Pr[M_{1,n} = m_1, ..., M_{r,n} = m_r, K_n >= r].

    Admissibility enforced: each m_j >= 1 and their sum <= n (the tighter
    bound involving k applies only to the conditional law).
    """
    prefix = _check_prefix(n, prefix)
    if len(prefix) != r:
        raise ValueError(f"prefix length {len(prefix)} != r={r}")
    a, t = params.alpha, params.theta
    M = sum(prefix)
    return (_log_multinomial(n, prefix + (n - M,))
            + _log_crn(n, prefix, a, t)
            - log_rising(t + n - M, M))


def log_prior_first_r_given_k(n: int, r: int, prefix: Sequence[int], k: int,
                              params: PypParams) -> float:
    """log Pr[M_{1,n} = m_1, ..., M_{r,n} = m_r | K_n = k]."""
    prefix = _check_prefix(n, prefix)
    if len(prefix) != r:
        raise ValueError(f"prefix length {len(prefix)} != r={r}")
    if not r <= k <= n:
        raise ValueError(f"need r <= k <= n, got r={r}, k={k}, n={n}")
    a, t = params.alpha, params.theta
    M = sum(prefix)
    if k - r > n - M:
        return NEG_INF  # not enough residual observations for k-r more species
    row_sub = log_gen_factorial_scaled_row(n - M, a)
    row_full = log_gen_factorial_scaled_row(n, a)
    logpref = 0.0  # log prod_{i=0}^{r-1} (theta + (k-r+i) alpha)
    for i in range(r):
        logpref += math.log(t + (k - r + i) * a)
    return (_log_multinomial(n, prefix + (n - M,))
            + _log_crn(n, prefix, a, t)
            + row_sub[k - r] - logpref - row_full[k])


@dataclass(frozen=True, eq=False)
class PriorFirstR:
    """Joint law of the first r order frequencies: log masses by prefix tuple."""

    n: int
    r: int
    masses: dict

    def total_mass(self) -> float:
        return float(sum(math.exp(v) for v in self.masses.values()))


def prior_first_r_table(n: int, r: int, params: PypParams) -> PriorFirstR:
    """All admissible prefixes (m_1, ..., m_r) with their log prior masses.

    The table sums to Pr[K_n >= r]; exponential in r, intended for small r.
    """
    masses = {}

    def rec(prefix, remaining):
        if len(prefix) == r:
            masses[prefix] = log_prior_first_r(n, r, prefix, params)
            return
        slots_left = r - len(prefix) - 1
        for m in range(1, remaining - slots_left + 1):
            rec(prefix + (m,), remaining - m)

    rec((), n)
    return PriorFirstR(n, r, masses)
