"""Truncated Fock-space reference numerics.

States are built as explicit density matrices, passed through beam
splitters and detector POVMs, and probed with displaced parity and
displaced vacuum projections.  Nothing here uses the closed forms of
:mod:`psgsbell.quasiprob`; it exists to check them.

Two-mode matrices use the index ``n1 * dim + n2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy.special import eval_genlaguerre, gammaln

from .quasiprob import (
    DarkMix,
    Gaussian,
    GaussianVariances,
    KimConditional,
    LossyPsgs,
    PurePsgs,
    Scs,
    StateModel,
    Vacuum,
    ZeroProbabilityConditioning,
    transmitted_reference,
)

DEFAULT_CUTOFF = 40
DEFAULT_CUTOFF_TWO_MODE = 30
PURE_TAIL = 1e-10
MIXED_TAIL = 1e-8


class CutoffError(ValueError):
    """The Fock truncation cannot represent the requested state or probe."""


@dataclass
class FockState:
    matrix: np.ndarray
    modes: int = 1

    @property
    def dim(self) -> int:
        return round(self.matrix.shape[0] ** (1 / self.modes))

    @property
    def cutoff(self) -> int:
        return self.dim - 1

    @property
    def tail_mass(self) -> float:
        """Population of the top 10% of levels (per mode).

        At least two levels are counted so that parity-definite states,
        which leave every other level empty, cannot slip through.
        """
        d = self.dim
        top = max(2, d // 10)
        pops = np.real(np.diag(self.matrix))
        if self.modes == 1:
            return float(pops[d - top :].sum())
        pops = pops.reshape(d, d)
        return float(pops[d - top :, :].sum() + pops[:, d - top :].sum())

    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def check(self, tol: float = 1e-12) -> None:
        m = self.matrix
        if abs(self.trace() - 1) > tol:
            raise AssertionError(f"trace {self.trace()!r} != 1")
        if np.max(np.abs(m - m.conj().T)) > tol:
            raise AssertionError("not Hermitian")
        if np.linalg.eigvalsh(m).min() < -1e-10:
            raise AssertionError("not positive semidefinite")


# ---------------------------------------------------------------------------
# operators
# ---------------------------------------------------------------------------


def annihilation(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim)), 1).astype(complex)


def squeeze_matrix(r: float, dim: int, pad: int = 80) -> np.ndarray:
    """``S(r) = exp[(r/2)(a^2 - a^dag^2)]`` built in a padded space, then cut."""
    big = dim + pad
    a = annihilation(big)
    s = expm(0.5 * r * (a @ a - a.conj().T @ a.conj().T))
    return s[:dim, :dim]


def displacement_matrix(alpha: complex, dim: int) -> np.ndarray:
    """Exact matrix elements ``<m|D(alpha)|n>`` for ``m, n < dim``."""
    x = abs(alpha) ** 2
    m = np.arange(dim)[:, None]
    n = np.arange(dim)[None, :]
    lo = np.minimum(m, n)
    hi = np.maximum(m, n)
    lag = eval_genlaguerre(lo, hi - lo, x)
    logpre = 0.5 * (gammaln(lo + 1) - gammaln(hi + 1)) - 0.5 * x
    with np.errstate(divide="ignore", invalid="ignore"):
        power = np.where(
            m >= n,
            alpha ** (m - n).clip(0),
            (-np.conj(alpha)) ** (n - m).clip(0),
        )
    return np.exp(logpre) * lag * power


def coherent_ket(alpha: complex, dim: int) -> np.ndarray:
    n = np.arange(dim)
    logmag = -0.5 * abs(alpha) ** 2 - 0.5 * gammaln(n + 1)
    if alpha == 0:
        v = np.zeros(dim, complex)
        v[0] = 1
        return v
    return np.exp(logmag + n * np.log(complex(alpha)))


def _ket_state(psi: np.ndarray, tail: float) -> FockState:
    norm = np.vdot(psi, psi).real
    state = FockState(np.outer(psi, psi.conj()) / norm)
    _guard_tail(state, tail)
    return state


def _guard_tail(state: FockState, tail: float) -> None:
    if state.tail_mass > tail:
        raise CutoffError(
            f"cutoff {state.cutoff} too small: tail mass {state.tail_mass:.2e} > {tail:.0e}"
        )


def squeezed_thermal(v: GaussianVariances, dim: int) -> np.ndarray:
    """Density matrix with characteristic function ``exp(-A x^2/2 - B y^2/2)``."""
    nbar = 0.5 * (math.sqrt(v.A * v.B) - 1)
    r = 0.25 * math.log(v.A / v.B)
    big = dim + 80
    if nbar > 0:
        q = nbar / (nbar + 1)
        pops = (1 - q) * q ** np.arange(big)
    else:
        pops = np.zeros(big)
        pops[0] = 1
    a = annihilation(big)
    s = expm(0.5 * r * (a @ a - a.conj().T @ a.conj().T))
    rho = s @ np.diag(pops) @ s.conj().T
    return rho[:dim, :dim]


# ---------------------------------------------------------------------------
# two-mode operations
# ---------------------------------------------------------------------------


def tensor(a: FockState, b: FockState) -> FockState:
    return FockState(np.kron(a.matrix, b.matrix), modes=2)


def beam_splitter_unitary(T: float, dim: int, sign: int = 1) -> np.ndarray:
    """Number-conserving beam splitter on two modes of ``dim`` levels.

    ``sign=+1`` maps ``a^dag -> sqrt(T) a^dag + sqrt(R) b^dag`` (a coherent
    input ``|alpha, 0>`` exits as ``|sqrt(T) alpha, sqrt(R) alpha>``);
    ``sign=-1`` flips the reflected amplitude.  Built block by block in the
    fixed-total-number subspaces, so it is exact for every total photon
    number below ``dim``.
    """
    if not 0 <= T <= 1:
        raise ValueError(f"T must lie in [0, 1], got {T}")
    theta = 2 * math.asin(math.sqrt(1 - T))
    u = np.zeros((dim * dim, dim * dim), complex)
    for total in range(2 * dim - 1):
        n1 = np.arange(max(0, total - dim + 1), min(total, dim - 1) + 1)
        idx = n1 * dim + (total - n1)
        k = len(n1)
        # generator (theta/2)(a^dag b - b^dag a) restricted to this block
        gen = np.zeros((k, k))
        for i in range(k - 1):
            # a^dag b |n1, n2> = sqrt((n1+1) n2) |n1+1, n2-1>
            amp = math.sqrt((n1[i] + 1) * (total - n1[i]))
            gen[i + 1, i] = amp
            gen[i, i + 1] = -amp
        u[np.ix_(idx, idx)] = expm(-sign * 0.5 * theta * gen)
    return u


def apply_bs(state: FockState, T: float, sign: int = 1) -> FockState:
    if state.modes != 2:
        raise ValueError("beam splitter needs a two-mode state")
    u = beam_splitter_unitary(T, state.dim, sign)
    return FockState(u @ state.matrix @ u.conj().T, modes=2)


def condition_click(state: FockState, epsilon: float) -> tuple[FockState, float]:
    """Condition mode 2 on an on/off click of efficiency ``epsilon``."""
    if not 0 < epsilon <= 1:
        raise ValueError(f"epsilon must lie in (0, 1], got {epsilon}")
    d = state.dim
    click = 1 - (1 - epsilon) ** np.arange(d)
    rho = state.matrix.reshape(d, d, d, d)
    out = np.einsum("ikjk,k->ij", rho, click)
    prob = float(np.real(np.trace(out)))
    if prob < 1e-14:
        raise ZeroProbabilityConditioning(f"click probability {prob:.2e}")
    return FockState(out / prob), prob


def partial_trace(state: FockState, keep: int = 1) -> FockState:
    d = state.dim
    rho = state.matrix.reshape(d, d, d, d)
    if keep == 1:
        return FockState(np.einsum("ikjk->ij", rho))
    return FockState(np.einsum("kikj->ij", rho))


def phase_flip_mode2(state: FockState) -> FockState:
    """Apply ``(-1)^{n_2}``, i.e. the local rotation ``z_2 -> -z_2``."""
    d = state.dim
    p = np.kron(np.eye(d), np.diag((-1.0) ** np.arange(d)))
    return FockState(p @ state.matrix @ p, modes=2)


# ---------------------------------------------------------------------------
# state construction
# ---------------------------------------------------------------------------


def _tap_and_click(input_rho: np.ndarray, T: float, epsilon: float, tail: float):
    d = input_rho.shape[0]
    vac = np.zeros((d, d), complex)
    vac[0, 0] = 1
    two = FockState(np.kron(input_rho, vac), modes=2)
    out, prob = condition_click(apply_bs(two, T), epsilon)
    _guard_tail(out, tail)
    return out, prob


def build_state(model: StateModel, cutoff: int = DEFAULT_CUTOFF) -> FockState:
    """Density matrix of a state model, truncated at ``cutoff`` photons."""
    dim = cutoff + 1
    if isinstance(model, Vacuum):
        psi = np.zeros(dim, complex)
        psi[0] = 1
        return _ket_state(psi, PURE_TAIL)
    if isinstance(model, Scs):
        sign = 1 if model.parity == "even" else -1
        psi = coherent_ket(model.alpha, dim) + sign * coherent_ket(-model.alpha, dim)
        return _ket_state(psi, PURE_TAIL)
    if isinstance(model, PurePsgs):
        one = np.zeros(dim + 80, complex)
        one[1] = 1
        big = dim + 80
        a = annihilation(big)
        s = expm(0.5 * model.r * (a @ a - a.conj().T @ a.conj().T))
        return _ket_state((s @ one)[:dim], PURE_TAIL)
    if isinstance(model, Gaussian):
        state = FockState(squeezed_thermal(model.variances, dim))
        _guard_tail(state, MIXED_TAIL)
        state.matrix /= state.trace()
        return state
    if isinstance(model, KimConditional):
        rho = squeezed_thermal(model.variances, dim)
        return _tap_and_click(rho, model.T, 1.0, MIXED_TAIL)[0]
    if isinstance(model, LossyPsgs):
        # the lossy model's r is S(-r) in the D(z) convention used here
        v = GaussianVariances.squeezed(-model.r)
        rho = squeezed_thermal(v, dim)
        return _tap_and_click(rho, model.T, model.epsilon, MIXED_TAIL)[0]
    if isinstance(model, DarkMix):
        base = build_state(model.base, cutoff)
        ref = build_state(model.reference, cutoff)
        return FockState(model.pm * base.matrix + (1 - model.pm) * ref.matrix)
    raise TypeError(f"cannot build {model!r}")


def click_probability(model: KimConditional | LossyPsgs, cutoff: int = DEFAULT_CUTOFF) -> float:
    dim = cutoff + 1
    if isinstance(model, KimConditional):
        rho = squeezed_thermal(model.variances, dim)
        return _tap_and_click(rho, model.T, 1.0, MIXED_TAIL)[1]
    v = GaussianVariances.squeezed(-model.r)
    return _tap_and_click(squeezed_thermal(v, dim), model.T, model.epsilon, MIXED_TAIL)[1]


def dark_reference(model: LossyPsgs) -> Gaussian:
    return transmitted_reference(model.r, model.T)


def split_5050(state: FockState, sign: int = 1) -> FockState:
    """Send a single-mode state and vacuum through a 50:50 beam splitter."""
    d = state.dim
    vac = np.zeros((d, d), complex)
    vac[0, 0] = 1
    return apply_bs(FockState(np.kron(state.matrix, vac), modes=2), 0.5, sign)


# ---------------------------------------------------------------------------
# probes
# ---------------------------------------------------------------------------


def _guard_displacement(state: FockState, z: complex) -> None:
    if abs(z) ** 2 >= 0.1 * state.cutoff:
        raise CutoffError(f"|z|^2 = {abs(z) ** 2:.3g} too large for cutoff {state.cutoff}")


def parity_operator_displaced(z: complex, dim: int) -> np.ndarray:
    """``D(z) (-1)^n D^dag(z) = D(2z) (-1)^n``."""
    return displacement_matrix(2 * z, dim) * ((-1.0) ** np.arange(dim))[None, :]


def displaced_parity(state: FockState, z: complex) -> float:
    _guard_displacement(state, z)
    op = parity_operator_displaced(z, state.dim)
    return float(np.real(np.trace(state.matrix @ op)))


def displaced_vacuum_overlap(state: FockState, z: complex) -> float:
    _guard_displacement(state, z)
    ket = coherent_ket(z, state.dim)
    return float(np.real(np.conj(ket) @ state.matrix @ ket))


def characteristic(state: FockState, eta: complex) -> float:
    return float(np.real(np.trace(state.matrix @ displacement_matrix(eta, state.dim))))


def oracle_wigner(state: FockState, z: complex) -> float:
    return 2 / math.pi * displaced_parity(state, z)


def oracle_q(state: FockState, z: complex) -> float:
    return displaced_vacuum_overlap(state, z) / math.pi


def two_mode_parity(state: FockState, z1: complex, z2: complex) -> float:
    _guard_displacement(state, z1)
    _guard_displacement(state, z2)
    d = state.dim
    op = np.kron(parity_operator_displaced(z1, d), parity_operator_displaced(z2, d))
    return float(np.real(np.trace(state.matrix @ op)))


def two_mode_vacuum_overlap(state: FockState, z1: complex, z2: complex) -> float:
    _guard_displacement(state, z1)
    _guard_displacement(state, z2)
    d = state.dim
    ket = np.kron(coherent_ket(z1, d), coherent_ket(z2, d))
    return float(np.real(np.conj(ket) @ state.matrix @ ket))


def oracle_wigner2(state: FockState, z1: complex, z2: complex) -> float:
    return (2 / math.pi) ** 2 * two_mode_parity(state, z1, z2)


def oracle_q2(state: FockState, z1: complex, z2: complex) -> float:
    return two_mode_vacuum_overlap(state, z1, z2) / math.pi**2


def build_state_auto(model: StateModel, cutoff: int = DEFAULT_CUTOFF, max_cutoff: int = 100) -> FockState:
    """Like :func:`build_state`, raising the cutoff in steps of 10 until the tail guard passes."""
    while True:
        try:
            return build_state(model, cutoff)
        except CutoffError:
            if cutoff >= max_cutoff:
                raise
            cutoff = min(cutoff + 10, max_cutoff)
