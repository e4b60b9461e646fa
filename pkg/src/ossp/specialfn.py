"""Log-space rising factorials and generalized factorial coefficients.

Every quantity here is nonnegative, so values are plain floats holding the
natural log of the magnitude, with -inf encoding exact zero. Probabilities
are exponentiated only at API boundaries.
"""

from __future__ import annotations

import math

import numpy as np

from . import _kernels

# log-magnitude of a nonnegative quantity; -inf encodes exact zero
LogValue = float

_DIRECT_PRODUCT_MAX = 20


def log_rising(a: float, r: int) -> LogValue:
    """log (a)_(r) = log prod_{i<r} (a+i), the empty product for r = 0.

    Direct log-sum for r <= 20, log-gamma difference beyond. Every factor
    a+i must be positive.
    """
    if r < 0 or int(r) != r:
        raise ValueError(f"r must be a nonnegative integer, got {r}")
    r = int(r)
    if r == 0:
        return 0.0
    if a <= 0.0:
        raise ValueError(f"rising factorial needs a > 0 for r >= 1, got a={a}")
    if r <= _DIRECT_PRODUCT_MAX:
        acc = 0.0
        for i in range(r):
            acc += math.log(a + i)
        return acc
    return math.lgamma(a + r) - math.lgamma(a)


def log_gen_factorial(n: int, k: int, alpha: float) -> LogValue:
    """log C(n,k;alpha) for 0 < alpha < 1, 0 <= k <= n."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    row = _kernels.gfc_log_row(int(n), float(alpha))
    return float(row[k] + k * math.log(alpha))


def log_gen_factorial_scaled_row(n: int, alpha: float) -> np.ndarray:
    """log[C(n,k;alpha)/alpha^k] for k = 0..n; at alpha == 0 this is log|s(n,k)|.

    The scaled ratio is what the species-count laws consume and stays finite
    as alpha -> 0, so the alpha = 0 branch is the same recurrence.
    """
    if not 0.0 <= alpha < 1.0:
        raise ValueError(f"alpha must be in [0, 1), got {alpha}")
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    return _kernels.gfc_log_row(int(n), float(alpha))


def log_noncentral_gf_scaled(m: int, s: int, alpha: float, gamma: float) -> LogValue:
    """log[C(m,s;alpha,gamma)/alpha^s] for gamma < 0; alpha = 0 gives the DP limit."""
    if not 0 <= s <= m:
        raise ValueError(f"need 0 <= s <= m, got s={s}, m={m}")
    return float(log_noncentral_gf_scaled_row(m, alpha, gamma)[s])


def log_noncentral_gf_scaled_row(m: int, alpha: float, gamma: float) -> np.ndarray:
    """log[C(m,s;alpha,gamma)/alpha^s] for s = 0..m, gamma < 0."""
    if not 0.0 <= alpha < 1.0:
        raise ValueError(f"alpha must be in [0, 1), got {alpha}")
    if not gamma < 0.0:
        raise ValueError(f"gamma must be < 0, got {gamma}")
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    return _kernels.gfc_nc_log_row(int(m), float(alpha), float(gamma))
