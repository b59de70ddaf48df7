"""Closed-form advantage bound for the strong-eavesdropper bin-guessing argument.

The adversary, after reading the clear suffix, is left with ``B1`` candidate
ciphertexts in bin 1 and ``B2`` in bin 2. In the worst case every bin-1
ciphertext has probability ``p_c + eps_c`` and every bin-2 one ``p_c - eps_c``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


def centre_probability(b1: float, b2: float, eps_c: float) -> float:
    """``p_c`` solving ``B1 (p_c + eps_c) + B2 (p_c - eps_c) = 1``."""
    return (1.0 - (b1 - b2) * eps_c) / (b1 + b2)


def eps_c_bound(b1: float, b2: float, k: float, d: float) -> float:
    """Largest ``eps_c`` compatible with a ``1/k**d`` cipher distinguishing advantage."""
    return 2.0 / (k**d * (b1 + b2) + 2.0 * (b1 - b2))


def cipher_advantage(p_c: float, eps_c: float) -> float:
    """``(p_c + eps_c) / 2 p_c - 1/2``: the per-ciphertext distinguishing edge."""
    return (p_c + eps_c) / ((p_c + eps_c) + (p_c - eps_c)) - 0.5


def bin_probability_bound(b1: float, b2: float, k: float, d: float) -> float:
    """Bound on ``Pr[bin 1] - 1/2`` for given bin sizes."""
    kd = k**d
    return (kd * (b1 - b2) + 2.0 * (b1 + b2)) / (2.0 * kd * (b1 + b2) + 4.0 * (b1 - b2))


def worst_case_ratio(k_u: float, t: float) -> float:
    """``B1 / B2`` at the largest deviation ``eps' = k_u**-t`` allowed by concentration."""
    kt = k_u**t
    return (kt + 1.0) / (kt - 1.0)


@dataclass(frozen=True)
class AdvantageBound:
    k_u: float
    d: float
    t: float
    b1: float
    b2: float
    p_c: float
    eps_c: float
    ratio: float
    bound: float


def advantage_bound(k_u: float, d: float, t: float) -> float:
    """``1/(2 k_u^t + 4/k^d) + 1/(k^d + 2/k_u^t)`` with security parameter ``k = k_u``."""
    _check(k_u, d, t)
    kt, kd = k_u**t, k_u**d
    return 1.0 / (2.0 * kt + 4.0 / kd) + 1.0 / (kd + 2.0 / kt)


def advantage_bound_terms(k_u: float, d: float, t: float, b2: float = 1.0) -> AdvantageBound:
    """The final bound together with every intermediate, at ``B2 = b2`` and worst-case ``B1``."""
    _check(k_u, d, t)
    ratio = worst_case_ratio(k_u, t)
    b1 = ratio * b2
    eps_c = eps_c_bound(b1, b2, k_u, d)
    p_c = centre_probability(b1, b2, eps_c)
    return AdvantageBound(
        k_u=k_u, d=d, t=t, b1=b1, b2=b2, p_c=p_c, eps_c=eps_c, ratio=ratio,
        bound=advantage_bound(k_u, d, t),
    )


def _check(k_u, d, t):
    if not k_u >= 2:
        raise ValueError("k_u must be at least 2")
    if not d >= 1:
        raise ValueError("d must be at least 1")
    if not t >= 2:
        raise ValueError("t must be at least 2")
    if math.isinf(k_u**t):
        raise OverflowError("k_u**t overflows a double")
