"""Two-mode quasiprobabilities from a 50:50 split with vacuum."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from .quasiprob import (
    HUSIMI,
    KINDS,
    WIGNER,
    CoherentQuasiprob,
    _coherent_overlap,
    q_vacuum,
    wigner_vacuum,
)

SQRT2 = math.sqrt(2.0)
QUAD_RADIUS = 8.0
QUAD_TOL = 1e-9


class QuadratureError(RuntimeError):
    def __init__(self, message, error_estimate):
        super().__init__(f"{message} (error estimate {error_estimate:.2e})")
        self.error_estimate = error_estimate


@dataclass(frozen=True)
class BeamSplitterConfig:
    """Mixing angle ``theta`` with ``R = sin^2(theta/2)`` and ``T = 1 - R``."""

    theta: float

    @classmethod
    def from_transmittivity(cls, T: float) -> "BeamSplitterConfig":
        if not 0 <= T <= 1:
            raise ValueError(f"T must lie in [0, 1], got {T}")
        return cls(2 * math.asin(math.sqrt(1 - T)))

    @property
    def R(self) -> float:
        return math.sin(self.theta / 2) ** 2

    @property
    def T(self) -> float:
        return 1 - self.R


@dataclass(frozen=True)
class TwoModeQuasiprob:
    """Two-mode Wigner or Q function together with its single-mode marginals.

    ``eval``, ``marginal1`` and ``marginal2`` broadcast over complex arrays.
    """

    kind: str
    eval: Callable
    marginal1: Callable
    marginal2: Callable

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")

    def __call__(self, z1, z2):
        return self.eval(z1, z2)


def vacuum_function(kind: str) -> Callable:
    return wigner_vacuum if kind == WIGNER else q_vacuum


def split_5050(single, kind: str | None = None) -> TwoModeQuasiprob:
    """Split a single-mode function at a 50:50 beam splitter with vacuum.

    ``W(z1, z2) = W_in((z1 + z2)/sqrt2) * W_vac((z2 - z1)/sqrt2)``.  Marginals
    are exact when ``single`` provides ``split_marginal()``; otherwise they
    fall back to adaptive quadrature.
    """
    declared = getattr(single, "kind", None)
    if kind is None:
        kind = declared
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    if declared is not None and declared != kind:
        raise ValueError(f"kind mismatch: function is {declared!r}, requested {kind!r}")
    vac = vacuum_function(kind)

    def ev(z1, z2):
        z1 = np.asarray(z1, dtype=complex)
        z2 = np.asarray(z2, dtype=complex)
        return single((z1 + z2) / SQRT2) * vac((z2 - z1) / SQRT2)

    if hasattr(single, "split_marginal"):
        m = single.split_marginal()
        m1 = m2 = m
    else:
        m1 = _quadrature_marginal(ev, 1)
        m2 = _quadrature_marginal(ev, 2)
    return TwoModeQuasiprob(kind, ev, m1, m2)


def _quadrature_marginal(ev: Callable, mode: int) -> Callable:
    def marg(z):
        z = np.asarray(z, dtype=complex)
        flat = [quadrature_marginal(ev, mode, complex(v)) for v in z.ravel()]
        out = np.array(flat).reshape(z.shape)
        return out if out.ndim else float(out)

    return marg


def quadrature_marginal(
    ev: Callable, mode: int, z: complex, radius: float = QUAD_RADIUS, tol: float = QUAD_TOL
) -> float:
    """Integrate ``ev`` over the other mode on the square ``|x|, |y| <= radius``."""
    if mode == 1:
        f = lambda y, x: float(ev(z, complex(x, y)))  # noqa: E731
    elif mode == 2:
        f = lambda y, x: float(ev(complex(x, y), z))  # noqa: E731
    else:
        raise ValueError("mode must be 1 or 2")
    val, err = integrate.dblquad(
        f, -radius, radius, -radius, radius, epsabs=tol, epsrel=0
    )
    if err > 10 * tol:
        raise QuadratureError("marginal quadrature did not converge", err)
    return val


def q_ecs(alpha: float, z1, z2):
    """Q function of the entangled coherent state obtained from an odd cat.

    ``N^2 |<z1, z2|(|beta, -beta> - |-beta, beta>)|^2 / pi^2`` with
    ``beta = alpha / sqrt2``.
    """
    b = alpha / SQRT2
    z1 = np.asarray(z1, dtype=complex)
    z2 = np.asarray(z2, dtype=complex)
    n2 = 1.0 / (2 * -math.expm1(-2 * alpha**2))
    cross = np.exp(
        -(z1 - b) * (np.conj(z1) + b) - (z2 + b) * (np.conj(z2) - b) - 4 * b**2
    )
    val = (
        np.exp(-np.abs(z1 - b) ** 2 - np.abs(z2 + b) ** 2)
        + np.exp(-np.abs(z1 + b) ** 2 - np.abs(z2 - b) ** 2)
        - 2 * np.real(cross)
    )
    return n2 * val / math.pi**2


def ecs_marginal(alpha: float, kind: str = HUSIMI) -> CoherentQuasiprob:
    """Reduced single-mode function of either arm of the entangled coherent state."""
    b = alpha / SQRT2
    g = np.array([b, -b], dtype=complex)
    coeff = np.array([1.0, -1.0])
    # partner-mode overlaps <+-b|+-b> (the partner amplitudes are -g)
    partner = _coherent_overlap(-g[None, :], -g[:, None])
    weights = np.outer(coeff, coeff) * partner
    gram = _coherent_overlap(g[None, :], g[:, None])
    weights = weights / np.real(np.sum(weights * gram))
    return CoherentQuasiprob(g, weights, kind)


def ecs_q(alpha: float) -> TwoModeQuasiprob:
    m = ecs_marginal(alpha, HUSIMI)
    return TwoModeQuasiprob(HUSIMI, lambda z1, z2: q_ecs(alpha, z1, z2), m, m)


def marginal(two: TwoModeQuasiprob, mode: int, z):
    if mode == 1:
        return two.marginal1(z)
    if mode == 2:
        return two.marginal2(z)
    raise ValueError("mode must be 1 or 2")


def product(f1, f2, kind: str) -> TwoModeQuasiprob:
    """Product state ``f1 (x) f2``."""
    return TwoModeQuasiprob(kind, lambda z1, z2: f1(z1) * f2(z2), f1, f2)
