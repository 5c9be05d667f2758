"""Closed-form characteristic, Wigner and Husimi functions.

Phase-space conventions: ``D(z) = exp(z a^dag - z^* a)``, the Wigner function
of the vacuum is ``(2/pi) exp(-2|z|^2)`` and the characteristic function is
``Tr[rho D(eta)]``.  Points are Python/numpy complex numbers.

Every function of the photon-subtracted families is a short sum of
:class:`GaussianAtom` terms.  Characteristic-domain atoms are Fourier
transformed term by term into phase-space atoms; the ordering index
``j`` (0 = Wigner, -1 = Q) only shifts the Gaussian widths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence, Union

import numpy as np

WIGNER = "wigner"
HUSIMI = "q"
KINDS = (WIGNER, HUSIMI)

#: ordering index for each quasiprobability kind
ORDERING = {WIGNER: 0, HUSIMI: -1}

# closest a tap beam splitter may get to full transmission
T_MAX = 1.0 - 1e-6
MIN_SUCCESS_PROB = 1e-12


class PhysicsDomainError(ValueError):
    """A parameter lies outside the physical domain of a model."""


class ZeroProbabilityConditioning(PhysicsDomainError):
    """Conditioning on an event whose probability vanishes."""


def kind_of(j: int) -> str:
    if j == 0:
        return WIGNER
    if j == -1:
        return HUSIMI
    raise ValueError(f"ordering index must be 0 or -1, got {j!r}")


def _xy(z):
    z = np.asarray(z, dtype=complex)
    return z.real, z.imag


# ---------------------------------------------------------------------------
# Gaussian atoms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GaussianAtom:
    """``coeff * exp(-a x^2 - b y^2) * (p0 + px x^2 + py y^2)``."""

    coeff: float
    a: float
    b: float
    p0: float = 1.0
    px: float = 0.0
    py: float = 0.0

    def __call__(self, x, y):
        x2 = np.square(x)
        y2 = np.square(y)
        return self.coeff * np.exp(-self.a * x2 - self.b * y2) * (
            self.p0 + self.px * x2 + self.py * y2
        )

    def integral(self) -> float:
        """Integral over the plane (requires ``a, b > 0``)."""
        if self.a <= 0 or self.b <= 0:
            raise ValueError("atom is not integrable")
        return (
            self.coeff
            * math.pi
            / math.sqrt(self.a * self.b)
            * (self.p0 + self.px / (2 * self.a) + self.py / (2 * self.b))
        )

    def scaled(self, factor: float) -> "GaussianAtom":
        return replace(self, coeff=self.coeff * factor)

    def to_phase_space(self, j: int = 0) -> "GaussianAtom":
        """Transform a characteristic-domain atom into an ordered quasiprobability.

        ``W_j(z) = pi^-2 \\int exp(eta^* z - eta z^*) chi(eta) exp(j |eta|^2 / 2) d^2 eta``.
        The x-width of the result comes from the eta_i-width and vice versa.
        """
        a = self.a - 0.5 * j
        b = self.b - 0.5 * j
        if a <= 0 or b <= 0:
            raise PhysicsDomainError("characteristic function is not integrable")
        return GaussianAtom(
            coeff=self.coeff / (math.pi * math.sqrt(a * b)),
            a=1.0 / b,
            b=1.0 / a,
            p0=self.p0 + self.px / (2 * a) + self.py / (2 * b),
            px=-self.py / b**2,
            py=-self.px / a**2,
        )

    def split_half(self) -> "GaussianAtom":
        """Characteristic atom of one output port of a 50:50 split with vacuum.

        ``chi_1(eta) = chi(eta / sqrt 2) * exp(-|eta|^2 / 4)``.
        """
        return GaussianAtom(
            coeff=self.coeff,
            a=0.5 * self.a + 0.25,
            b=0.5 * self.b + 0.25,
            p0=self.p0,
            px=0.5 * self.px,
            py=0.5 * self.py,
        )


class AtomSum:
    """A finite sum of :class:`GaussianAtom` terms evaluated at complex points."""

    def __init__(self, atoms: Sequence[GaussianAtom]):
        self.atoms = tuple(atoms)
        arr = np.array(
            [[t.coeff, t.a, t.b, t.p0, t.px, t.py] for t in self.atoms], dtype=float
        ).reshape(-1, 6)
        self._c, self._a, self._b, self._p0, self._px, self._py = arr.T

    def __call__(self, z):
        x, y = _xy(z)
        x2 = np.square(x)
        y2 = np.square(y)
        # accumulate term by term: results do not depend on the batch shape
        out = np.zeros(np.shape(x2))
        for c, a, b, p0, px, py in zip(self._c, self._a, self._b, self._p0, self._px, self._py):
            out = out + c * np.exp(-a * x2 - b * y2) * (p0 + px * x2 + py * y2)
        return out if out.ndim else float(out)

    def integral(self) -> float:
        return sum(t.integral() for t in self.atoms)

    def scaled(self, factor: float) -> "AtomSum":
        return AtomSum([t.scaled(factor) for t in self.atoms])

    def __add__(self, other: "AtomSum") -> "AtomSum":
        return AtomSum(self.atoms + other.atoms)

    def __repr__(self):
        return f"AtomSum({list(self.atoms)!r})"


class CharacteristicFunction(AtomSum):
    """Symmetrically ordered characteristic function ``Tr[rho D(eta)]``."""

    def quasiprob(self, j: int = 0) -> "PhaseSpaceFunction":
        return PhaseSpaceFunction(
            [t.to_phase_space(j) for t in self.atoms], kind=kind_of(j), char=self
        )

    def wigner(self) -> "PhaseSpaceFunction":
        return self.quasiprob(0)

    def husimi(self) -> "PhaseSpaceFunction":
        return self.quasiprob(-1)

    def split_half(self) -> "CharacteristicFunction":
        return CharacteristicFunction([t.split_half() for t in self.atoms])

    def scaled(self, factor: float) -> "CharacteristicFunction":
        return CharacteristicFunction([t.scaled(factor) for t in self.atoms])

    def __add__(self, other):
        return CharacteristicFunction(self.atoms + other.atoms)


class PhaseSpaceFunction(AtomSum):
    """A Wigner or Q function stored as a sum of phase-space atoms."""

    def __init__(self, atoms, kind: str, char: CharacteristicFunction | None = None):
        super().__init__(atoms)
        if kind not in KINDS:
            raise ValueError(f"unknown kind {kind!r}")
        self.kind = kind
        self.char = char

    def split_marginal(self) -> "PhaseSpaceFunction":
        """Single-port marginal after a 50:50 split with vacuum in the other port."""
        if self.char is None:
            raise ValueError("closed-form marginal needs the characteristic function")
        return self.char.split_half().quasiprob(ORDERING[self.kind])

    def scaled(self, factor: float) -> "PhaseSpaceFunction":
        char = None if self.char is None else self.char.scaled(factor)
        return PhaseSpaceFunction(
            [t.scaled(factor) for t in self.atoms], self.kind, char
        )

    def __add__(self, other):
        if not isinstance(other, PhaseSpaceFunction) or other.kind != self.kind:
            return NotImplemented
        char = None
        if self.char is not None and other.char is not None:
            char = self.char + other.char
        return PhaseSpaceFunction(self.atoms + other.atoms, self.kind, char)

    def __repr__(self):
        return f"PhaseSpaceFunction(kind={self.kind!r}, atoms={list(self.atoms)!r})"


# ---------------------------------------------------------------------------
# Finite superpositions of coherent states
# ---------------------------------------------------------------------------


def _coherent_overlap(b, a):
    """<b|a> for coherent amplitudes (broadcasting)."""
    return np.exp(-0.5 * np.abs(b) ** 2 - 0.5 * np.abs(a) ** 2 + np.conj(b) * a)


class CoherentQuasiprob:
    """Wigner or Q function of ``rho = sum_kl M_kl |g_k><g_l|``."""

    def __init__(self, amplitudes, weights, kind: str):
        self.amplitudes = np.asarray(amplitudes, dtype=complex)
        self.weights = np.asarray(weights, dtype=complex)
        if kind not in KINDS:
            raise ValueError(f"unknown kind {kind!r}")
        self.kind = kind

    @classmethod
    def pure(cls, amplitudes, coeffs, kind: str) -> "CoherentQuasiprob":
        c = np.asarray(coeffs, dtype=complex)
        g = np.asarray(amplitudes, dtype=complex)
        gram = _coherent_overlap(g[:, None], g[None, :])
        norm = np.real(np.conj(c) @ gram @ c)
        return cls(g, np.outer(c, np.conj(c)) / norm, kind)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape)
        n = len(self.amplitudes)
        for k in range(n):
            gk = self.amplitudes[k]
            for l in range(n):
                gl = self.amplitudes[l]
                if self.kind == WIGNER:
                    # W_{|a><b|}(z) = (2/pi) e^{z^* a - z a^*} <b|2z - a>
                    w = 2 / np.pi * np.exp(
                        np.conj(z) * gk
                        - z * np.conj(gk)
                        - 0.5 * abs(gl) ** 2
                        - 0.5 * np.abs(2 * z - gk) ** 2
                        + np.conj(gl) * (2 * z - gk)
                    )
                else:
                    w = 1 / np.pi * np.exp(
                        -np.abs(z) ** 2
                        - 0.5 * abs(gk) ** 2
                        - 0.5 * abs(gl) ** 2
                        + np.conj(z) * gk
                        + np.conj(gl) * z
                    )
                out = out + np.real(self.weights[k, l] * w)
        return out if out.ndim else float(out)

    def split_marginal(self) -> "CoherentQuasiprob":
        g = self.amplitudes / math.sqrt(2)
        overlap = _coherent_overlap(g[None, :], g[:, None])  # <g_l|g_k>
        return CoherentQuasiprob(g, self.weights * overlap, self.kind)

    def integral(self) -> float:
        gram = _coherent_overlap(self.amplitudes[None, :], self.amplitudes[:, None])
        return float(np.real(np.sum(self.weights * gram)))


# ---------------------------------------------------------------------------
# State parameters
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GaussianVariances:
    """Characteristic-function widths ``C(xi) = exp(-A xi_r^2/2 - B xi_i^2/2)``.

    Vacuum has ``A = B = 1``; ``A * B = 1`` for a pure state.
    """

    A: float
    B: float

    def __post_init__(self):
        if not (self.A > 0 and self.B > 0):
            raise PhysicsDomainError(f"variances must be positive: {self}")
        if self.A * self.B < 1 - 1e-12:
            raise PhysicsDomainError(f"unphysical variances, A*B = {self.A * self.B}")

    @classmethod
    def squeezed(cls, r: float, scale: float = 1.0) -> "GaussianVariances":
        """Squeezed vacuum ``S(r)|0>`` with both variances multiplied by ``scale``."""
        return cls(scale * math.exp(2 * r), scale * math.exp(-2 * r))

    @classmethod
    def from_db(cls, db_a: float, db_b: float) -> "GaussianVariances":
        return cls(db_to_variance(db_a), db_to_variance(db_b))

    @property
    def product(self) -> float:
        return self.A * self.B


def db_to_variance(db: float) -> float:
    """Quadrature variance relative to vacuum for a level given in dB."""
    return 10.0 ** (db / 10.0)


def variance_to_db(v: float) -> float:
    return 10.0 * math.log10(v)


@dataclass(frozen=True)
class CorrelationMatrix:
    """Entries of the 4x4 covariance of the two beam-splitter outputs."""

    n1: float
    n2: float
    c1: float
    c2: float
    m1: float
    m2: float

    def matrix(self) -> np.ndarray:
        n1, n2, c1, c2, m1, m2 = self.n1, self.n2, self.c1, self.c2, self.m1, self.m2
        return np.array(
            [
                [n1, 0, c1, 0],
                [0, n2, 0, c2],
                [c1, 0, m1, 0],
                [0, c2, 0, m2],
            ]
        )


def correlation_matrix(v: GaussianVariances, T: float) -> CorrelationMatrix:
    if not 0 < T < 1:
        raise PhysicsDomainError(f"transmittivity must lie in (0, 1), got {T}")
    R = 1.0 - T
    s = math.sqrt(T * R)
    return CorrelationMatrix(
        n1=T * v.A + R,
        n2=T * v.B + R,
        c1=s * (v.A - 1),
        c2=s * (v.B - 1),
        m1=R * v.A + T,
        m2=R * v.B + T,
    )


# ---------------------------------------------------------------------------
# State models
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Vacuum:
    pass


@dataclass(frozen=True)
class Scs:
    """``N (|alpha> +- |-alpha>)``; ``parity`` is ``"even"`` or ``"odd"``."""

    alpha: float
    parity: str = "odd"

    def __post_init__(self):
        if self.parity not in ("even", "odd"):
            raise ValueError(f"parity must be 'even' or 'odd', got {self.parity!r}")
        if not self.alpha > 0:
            raise PhysicsDomainError("alpha must be positive")


@dataclass(frozen=True)
class PurePsgs:
    """Squeezed single photon ``S(r)|1>`` (photon subtracted from ``S(r)|0>``)."""

    r: float


@dataclass(frozen=True)
class Gaussian:
    """Zero-mean Gaussian state with diagonal variances (e.g. squeezed vacuum)."""

    variances: GaussianVariances


@dataclass(frozen=True)
class KimConditional:
    """Gaussian input, tap beam splitter of transmittivity ``T``, on/off click."""

    variances: GaussianVariances
    T: float

    def __post_init__(self):
        if not 0 < self.T <= T_MAX:
            raise ZeroProbabilityConditioning(
                f"T = {self.T} outside (0, {T_MAX}]: click probability vanishes"
            )


@dataclass(frozen=True)
class LossyPsgs:
    """Pure squeezed input, tap transmittivity ``T``, detector efficiency ``epsilon``.

    ``r`` follows the inefficient-detector model's own sign convention: the
    state is antisqueezed along the real axis for ``r > 0``.
    """

    r: float
    T: float
    epsilon: float = 1.0

    def __post_init__(self):
        if not 0 < self.T < 1:
            raise PhysicsDomainError(f"T must lie in (0, 1), got {self.T}")
        if not 0 < self.epsilon <= 1:
            raise PhysicsDomainError(f"epsilon must lie in (0, 1], got {self.epsilon}")
        if not self.r > 0:
            raise PhysicsDomainError("lossy model requires r > 0")


@dataclass(frozen=True)
class DarkMix:
    """``pm * base + (1 - pm) * reference`` (dark-count mixture)."""

    base: "StateModel"
    reference: "StateModel"
    pm: float

    def __post_init__(self):
        if not 0 <= self.pm <= 1:
            raise PhysicsDomainError(f"pm must lie in [0, 1], got {self.pm}")


StateModel = Union[Vacuum, Scs, PurePsgs, Gaussian, KimConditional, LossyPsgs, DarkMix]


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------


def char_gaussian(v: GaussianVariances) -> CharacteristicFunction:
    return CharacteristicFunction([GaussianAtom(1.0, v.A / 2, v.B / 2)])


def char_pure_psgs_atoms(r: float) -> CharacteristicFunction:
    e = math.exp(2 * r)
    return CharacteristicFunction(
        [GaussianAtom(1.0, e / 2, 1 / (2 * e), p0=1.0, px=-e, py=-1 / e)]
    )


def char_pure_psgs(r: float, eta) -> float:
    """Characteristic function of ``S(r)|1>``."""
    x, y = _xy(eta)
    q = math.exp(2 * r) * x**2 + math.exp(-2 * r) * y**2
    return np.exp(-0.5 * q) * (1 - q)


def wigner_pure_psgs(r: float, z) -> float:
    x, y = _xy(z)
    q = math.exp(2 * r) * x**2 + math.exp(-2 * r) * y**2
    return 2 / np.pi * np.exp(-2 * q) * (4 * q - 1)


def wigner_scs(alpha: float, parity: str, z) -> float:
    """Wigner function of the even or odd cat state of real amplitude ``alpha``."""
    sign = {"even": 1.0, "odd": -1.0}[parity]
    x, y = _xy(z)
    e = math.exp(-2 * alpha**2)
    # 1 - e^{-2 a^2} loses precision for small alpha
    norm = 1 + e if sign > 0 else -math.expm1(-2 * alpha**2)
    # e^{-2|z|^2 - 2a^2 +- 4 a x} written as shifted Gaussians to avoid overflow
    shifted = np.exp(-2 * ((x - alpha) ** 2 + y**2)) + np.exp(
        -2 * ((x + alpha) ** 2 + y**2)
    )
    fringe = 2 * np.exp(-2 * (x**2 + y**2)) * np.cos(4 * alpha * y)
    return (shifted + sign * fringe) / (np.pi * norm)


def wigner_vacuum(z) -> float:
    z = np.asarray(z, dtype=complex)
    return 2 / np.pi * np.exp(-2 * np.abs(z) ** 2)


def q_vacuum(z) -> float:
    z = np.asarray(z, dtype=complex)
    return 1 / np.pi * np.exp(-np.abs(z) ** 2)


def success_prob_ideal(v: GaussianVariances, T: float) -> float:
    """Click probability of an ideal on/off detector on the reflected arm."""
    if not 0 < T <= 1:
        raise PhysicsDomainError(f"T must lie in (0, 1], got {T}")
    if T == 1:
        return 0.0
    c = correlation_matrix(v, T)
    return 1.0 - 2.0 / math.sqrt((1 + c.m1) * (1 + c.m2))


def char_kim_atoms(v: GaussianVariances, T: float) -> CharacteristicFunction:
    if not 0 < T <= T_MAX:
        raise ZeroProbabilityConditioning(f"T = {T} outside (0, {T_MAX}]")
    c = correlation_matrix(v, T)
    s = math.sqrt((c.m1 + 1) * (c.m2 + 1))
    p = 1.0 - 2.0 / s
    if p <= MIN_SUCCESS_PROB:
        raise ZeroProbabilityConditioning(f"click probability {p:.3g} too small")
    norm = 1.0 / p
    return CharacteristicFunction(
        [
            GaussianAtom(norm, c.n1 / 2, c.n2 / 2),
            GaussianAtom(
                -norm * 2.0 / s,
                c.n1 / 2 - c.c1**2 / (2 * (c.m1 + 1)),
                c.n2 / 2 - c.c2**2 / (2 * (c.m2 + 1)),
            ),
        ]
    )


def char_kim_conditional(v: GaussianVariances, T: float, zeta) -> float:
    return char_kim_atoms(v, T)(zeta)


@dataclass(frozen=True)
class LossyParameters:
    """Gaussian widths of the inefficient-detector photon-subtraction model."""

    a1: tuple[float, float]
    a2: tuple[float, float]
    h: tuple[float, float]
    sigma_m: float
    epsilon: float

    @property
    def det(self) -> float:
        return (self.h[0] + self.sigma_m) * (self.h[1] + self.sigma_m)

    @property
    def off_probability(self) -> float:
        return 1.0 / (self.epsilon * math.sqrt(self.det))

    @property
    def success_prob(self) -> float:
        return 1.0 - self.off_probability


def lossy_parameters(r: float, T: float, epsilon: float) -> LossyParameters:
    if not 0 < T < 1:
        raise PhysicsDomainError(f"T must lie in (0, 1), got {T}")
    if not 0 < epsilon <= 1:
        raise PhysicsDomainError(f"epsilon must lie in (0, 1], got {epsilon}")
    t = T
    ch, sh = math.cosh(r), math.sinh(r)
    leak = 1 - epsilon * (1 - t)
    a1 = tuple(0.5 * (1 + (math.exp(s * 2 * r) - 1) * t) for s in (1, -1))
    a2 = (
        0.5 + t * sh / (ch - leak * sh),
        0.5 - t * sh / (ch + leak * sh),
    )
    h = tuple(0.5 * (math.exp(s * 2 * r) * (1 - t) + t) for s in (1, -1))
    return LossyParameters(a1, a2, h, (2 - epsilon) / (2 * epsilon), epsilon)


def _lossy_gaussian(ap: float, am: float, j: int, weight: float) -> GaussianAtom:
    big_a = 0.5 * (ap + am)
    big_b = 0.25 * (am - ap)
    u = 2 * big_a - j
    d = u**2 - 16 * big_b**2
    if d <= 0:
        raise PhysicsDomainError("lossy-model Gaussian is not normalizable")
    # z^2 + z*^2 = 2(x^2 - y^2)
    return GaussianAtom(
        weight * 2 / (math.pi * math.sqrt(d)),
        (2 * u + 8 * big_b) / d,
        (2 * u - 8 * big_b) / d,
    )


def lossy_atoms(r: float, T: float, epsilon: float, j: int) -> PhaseSpaceFunction:
    p = lossy_parameters(r, T, epsilon)
    ps = p.success_prob
    if ps <= MIN_SUCCESS_PROB:
        raise ZeroProbabilityConditioning(f"click probability {ps:.3g} too small")
    norm = 1.0 / ps
    g1 = _lossy_gaussian(*p.a1, j, norm)
    g2 = _lossy_gaussian(*p.a2, j, -norm * p.off_probability)
    # matching characteristic atoms, needed for closed-form split marginals
    char = CharacteristicFunction(
        [
            GaussianAtom(norm, p.a1[1], p.a1[0]),
            GaussianAtom(-norm * p.off_probability, p.a2[1], p.a2[0]),
        ]
    )
    return PhaseSpaceFunction([g1, g2], kind=kind_of(j), char=char)


def quasiprob_lossy(r: float, T: float, epsilon: float, j: int, z) -> float:
    """Wigner (``j=0``) or Q (``j=-1``) function of the inefficient-detector PSGS."""
    return lossy_atoms(r, T, epsilon, j)(z)


def lossy_success_prob(r: float, T: float, epsilon: float) -> float:
    return lossy_parameters(r, T, epsilon).success_prob


def mix_dark(pm: float, w_sub: Callable, w_sq: Callable, z):
    if not 0 <= pm <= 1:
        raise PhysicsDomainError(f"pm must lie in [0, 1], got {pm}")
    return pm * w_sub(z) + (1 - pm) * w_sq(z)


# ---------------------------------------------------------------------------
# Dispatch on state models
# ---------------------------------------------------------------------------


def characteristic(model: StateModel) -> CharacteristicFunction:
    """Characteristic function of any Gaussian-atom state family."""
    if isinstance(model, Vacuum):
        return char_gaussian(GaussianVariances(1.0, 1.0))
    if isinstance(model, Gaussian):
        return char_gaussian(model.variances)
    if isinstance(model, PurePsgs):
        return char_pure_psgs_atoms(model.r)
    if isinstance(model, KimConditional):
        return char_kim_atoms(model.variances, model.T)
    if isinstance(model, LossyPsgs):
        return lossy_atoms(model.r, model.T, model.epsilon, 0).char
    if isinstance(model, DarkMix):
        return characteristic(model.base).scaled(model.pm) + characteristic(
            model.reference
        ).scaled(1 - model.pm)
    raise TypeError(f"no characteristic-atom form for {model!r}")


def quasiprob(model: StateModel, kind: str):
    """Wigner (``kind="wigner"``) or Q (``kind="q"``) function of a state model.

    The result is callable on complex arrays and has ``split_marginal()``.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    if isinstance(model, Scs):
        sign = 1.0 if model.parity == "even" else -1.0
        return CoherentQuasiprob.pure([model.alpha, -model.alpha], [1.0, sign], kind)
    if isinstance(model, LossyPsgs):
        return lossy_atoms(model.r, model.T, model.epsilon, ORDERING[kind])
    if isinstance(model, DarkMix):
        base = quasiprob(model.base, kind)
        ref = quasiprob(model.reference, kind)
        if isinstance(base, PhaseSpaceFunction) and isinstance(ref, PhaseSpaceFunction):
            return base.scaled(model.pm) + ref.scaled(1 - model.pm)
        return MixtureQuasiprob([(model.pm, base), (1 - model.pm, ref)], kind)
    return characteristic(model).quasiprob(ORDERING[kind])


@dataclass
class MixtureQuasiprob:
    """Convex combination of quasiprobability functions of one kind."""

    parts: list = field(default_factory=list)
    kind: str = WIGNER

    def __call__(self, z):
        return sum(w * f(z) for w, f in self.parts)

    def split_marginal(self) -> "MixtureQuasiprob":
        return MixtureQuasiprob([(w, f.split_marginal()) for w, f in self.parts], self.kind)


def transmitted_reference(r: float, T: float) -> Gaussian:
    """Unconditioned transmitted arm of ``S(r)|0>`` after the tap beam splitter.

    This is the squeezed vacuum left behind when the detector fires on a
    dark count; ``r`` uses the lossy model's sign convention.
    """
    # lossy model: antisqueezed along x for r > 0, i.e. A = e^{-2r} in char widths
    v = GaussianVariances(T * math.exp(-2 * r) + 1 - T, T * math.exp(2 * r) + 1 - T)
    return Gaussian(v)
