"""Error-exponent mathematics for guessing decoders on the BSC (all logs base 2).

The scaled cumulant of the noise process is

    Lambda(a) = a * H_{1/(1+a)}       for a > -1
              = -H_min                for a <= -1,

equivalently ``(1 + a) * log2(p**s + q**s)`` with ``s = 1/(1+a)``. Its Legendre
transform is the rate function ``I``; the exponent has a straight-line branch
below ``1 - x*`` and follows ``I(1 - R)`` above it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .params import binary_entropy


@dataclass(frozen=True)
class Tolerances:
    alpha_lo: float = -1.0 + 1e-9
    alpha_hi: float = 64.0
    alpha_cap: float = 2.0**20
    alpha_tol: float = 1e-13
    x_tol: float = 1e-10
    fd_step: float = 1e-5
    max_iter: int = 400


TOL = Tolerances()


class NonConvergence(RuntimeError):
    pass


def _check_p(p: float) -> None:
    if not 0.0 < p < 1.0:
        raise ValueError(f"need 0 < p < 1, got {p}")


def min_entropy(p: float) -> float:
    _check_p(p)
    return -math.log2(max(p, 1.0 - p))


def renyi_entropy(p: float, alpha: float) -> float:
    """Order-``alpha`` Renyi entropy of a Bernoulli(p) bit; alpha=1 is Shannon, inf is min-entropy."""
    _check_p(p)
    if not alpha > 0:
        raise ValueError(f"Renyi order must be positive, got {alpha}")
    if alpha == 1.0:
        return binary_entropy(p)
    if math.isinf(alpha):
        return min_entropy(p)
    q = 1.0 - p
    # factor out the larger term so huge orders do not underflow
    big, small = max(p, q), min(p, q)
    log_sum = alpha * math.log2(big) + math.log2(1.0 + (small / big) ** alpha)
    return log_sum / (1.0 - alpha)


def _log_sum(p: float, s: float) -> float:
    """log2(p**s + q**s), computed without underflow."""
    q = 1.0 - p
    big, small = max(p, q), min(p, q)
    return s * math.log2(big) + math.log2(1.0 + (small / big) ** s)


def lambda_N(p: float, alpha: float) -> float:
    if not 0.0 < p < 0.5 + 1e-15:
        raise ValueError(f"need 0 < p <= 1/2, got {p}")
    if alpha <= -1.0:
        return -min_entropy(p)
    s = 1.0 / (1.0 + alpha)
    return _log_sum(p, s) / s


def lambda_N_prime(p: float, alpha: float) -> float:
    """d Lambda / d alpha; zero for alpha < -1, increasing to 1 as alpha grows."""
    if alpha <= -1.0:
        return 0.0
    s = 1.0 / (1.0 + alpha)
    q = 1.0 - p
    big, small = max(p, q), min(p, q)
    t = (small / big) ** s
    g = _log_sum(p, s)
    dg = (math.log2(big) + t * math.log2(small)) / (1.0 + t)
    return g - s * dg


def argmax_alpha(p: float, x: float, tol: Tolerances = TOL) -> float:
    """Maximiser of ``alpha * x - Lambda(alpha)``, found by bisection on Lambda' = x."""
    if not 0.0 < x <= 1.0:
        raise ValueError(f"rate function argument must lie in (0, 1], got {x}")
    lo, hi = tol.alpha_lo, tol.alpha_hi
    if lambda_N_prime(p, lo) >= x:
        return -1.0
    while lambda_N_prime(p, hi) < x:
        if hi >= tol.alpha_cap:
            return math.inf
        hi *= 2.0
    for _ in range(tol.max_iter):
        mid = 0.5 * (lo + hi)
        if lambda_N_prime(p, mid) < x:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol.alpha_tol * max(1.0, abs(mid)):
            return 0.5 * (lo + hi)
    raise NonConvergence(f"argmax bisection did not converge for p={p}, x={x}")


def rate_function_I(p: float, x: float, tol: Tolerances = TOL) -> float:
    """Legendre-Fenchel transform ``sup_alpha (alpha x - Lambda(alpha))``."""
    a = argmax_alpha(p, x, tol)
    if math.isinf(a):
        # x at (or numerically at) the top of the range: the sup is the limit alpha -> inf
        if x >= 1.0:
            return -1.0 - 0.5 * (math.log2(p) + math.log2(1.0 - p))
        return _limit_value(p, x, tol)
    return a * x - lambda_N(p, a)


def _limit_value(p: float, x: float, tol: Tolerances) -> float:
    a = tol.alpha_cap
    return a * x - lambda_N(p, a)


def critical_x_star(p: float, tol: Tolerances = TOL) -> float:
    """x* where dI/dx = 1, by bisection on a central finite difference of I."""
    if not 0.0 < p < 0.5:
        raise ValueError(f"need 0 < p < 1/2, got {p}")
    h = tol.fd_step

    def slope(x):
        return (rate_function_I(p, x + h, tol) - rate_function_I(p, x - h, tol)) / (2 * h)

    lo = binary_entropy(p)  # slope 0 at the mean
    hi = 1.0 - 2 * h
    if not slope(lo + 2 * h) < 1.0 < slope(hi):
        raise NonConvergence(f"x* bracket failed for p={p}")
    while hi - lo > 1e-9:
        mid = 0.5 * (lo + hi)
        if slope(mid) < 1.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def critical_x_star_dual(p: float) -> float:
    """x* as the point whose maximising alpha is 1, i.e. Lambda'(1)."""
    if not 0.0 < p < 0.5:
        raise ValueError(f"need 0 < p < 1/2, got {p}")
    return lambda_N_prime(p, 1.0)


def error_exponent(R: float, p: float, tol: Tolerances = TOL) -> float:
    """Random-coding exponent (bits per channel use) at rate R over BSC(p)."""
    if not 0.0 < p < 0.5:
        raise ValueError(f"need 0 < p < 1/2, got {p}")
    cap = 1.0 - binary_entropy(p)
    if not 0.0 < R < cap:
        raise ValueError(f"exponent defined only for 0 < R < capacity = {cap:.6f}, got R={R}")
    x_star = critical_x_star_dual(p)
    if R < 1.0 - x_star:
        return 1.0 - R - renyi_entropy(p, 0.5)
    return rate_function_I(p, 1.0 - R, tol)


@dataclass(frozen=True)
class ExponentProfile:
    p: float
    shannon: float
    renyi_half: float
    min_entropy: float
    x_star: float
    capacity: float

    @classmethod
    def of(cls, p: float) -> "ExponentProfile":
        return cls(
            p=p,
            shannon=binary_entropy(p),
            renyi_half=renyi_entropy(p, 0.5),
            min_entropy=min_entropy(p),
            x_star=critical_x_star_dual(p),
            capacity=1.0 - binary_entropy(p),
        )
