"""How well a squeezed single photon approximates an odd cat state."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln


@dataclass(frozen=True)
class ScsApprox:
    alpha: float
    r_opt: float
    fidelity: float


def psgs_fock_coeff(r: float, n: int) -> float:
    """Amplitude of ``|2n+1>`` in ``S(r)|1>``; even photon numbers carry none."""
    if n < 0:
        raise ValueError("n must be non-negative")
    t = -math.tanh(r)
    if t == 0:
        return 1.0 if n == 0 else 0.0
    log_mag = (
        n * math.log(abs(t))
        + 0.5 * gammaln(2 * n + 2)
        - 1.5 * math.log(math.cosh(r))
        - n * math.log(2)
        - gammaln(n + 1)
    )
    sign = -1.0 if (t < 0 and n % 2) else 1.0
    return sign * math.exp(log_mag)


def fidelity(r: float, alpha: float) -> float:
    """``|<SCS_-(alpha)|S(r)|1>|^2``."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    a2 = alpha * alpha
    return (
        2 * a2 * math.exp(-a2 * (math.tanh(r) + 1))
        / (math.cosh(r) ** 3 * -math.expm1(-2 * a2))
    )


def optimal_r(alpha: float) -> float:
    """Squeezing (negative branch) that maximizes :func:`fidelity` for ``alpha``."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    c = math.sqrt(0.5 + math.sqrt(9 + 4 * alpha**4) / 6)
    return -math.acosh(c)


def best_approximation(alpha: float) -> ScsApprox:
    r = optimal_r(alpha)
    return ScsApprox(alpha, r, fidelity(r, alpha))


def max_fidelity_curve(alphas) -> list[tuple[float, float]]:
    out = []
    for a in alphas:
        a = float(a)
        out.append((a, fidelity(optimal_r(a), a)))
    return out


def odd_cat_fock(alpha: float, cutoff: int) -> np.ndarray:
    """Normalized Fock amplitudes of ``N(|alpha> - |-alpha>)``."""
    n = np.arange(cutoff + 1)
    amp = np.where(
        n % 2 == 1,
        np.exp(n * math.log(alpha) - 0.5 * gammaln(n + 1)),
        0.0,
    )
    return amp / np.linalg.norm(amp)
