"""Bell-CHSH (parity) and Bell-CH (on/off) functionals and their maximization."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from .quasiprob import HUSIMI, WIGNER
from .twomode import TwoModeQuasiprob

CHSH = "chsh"
CH = "ch"
FUNCTIONALS = (CHSH, CH)

TSIRELSON = 2 * math.sqrt(2)
CH_CAP = 0.5

DEFAULT_STARTS = 64
RANDOM_STARTS = 16
START_BOX = 1.5
SEARCH_RADIUS = 3.0
FTOL = 1e-10
XTOL = 1e-8
TIE_TOL = 1e-9


class OptimizerError(RuntimeError):
    pass


@dataclass(frozen=True)
class DisplacementSet:
    z1: complex
    z2: complex
    z1p: complex
    z2p: complex

    def as_array(self) -> np.ndarray:
        z = (self.z1, self.z2, self.z1p, self.z2p)
        return np.array([c for v in z for c in (v.real, v.imag)])

    @classmethod
    def from_array(cls, x) -> "DisplacementSet":
        x = np.asarray(x, dtype=float)
        z = x[0::2] + 1j * x[1::2]
        return cls(*(complex(v) for v in z))


@dataclass(frozen=True)
class BellResult:
    value: float
    argmax: DisplacementSet
    starts_used: int
    converged: bool


def _points(x):
    """Split ``(..., 8)`` real settings into four complex arrays."""
    x = np.asarray(x, dtype=float)
    z = x[..., 0::2] + 1j * x[..., 1::2]
    return z[..., 0], z[..., 1], z[..., 2], z[..., 3]


def _check_kind(two: TwoModeQuasiprob, kind: str, functional: str) -> None:
    if two.kind != kind:
        raise ValueError(f"{functional} needs a {kind!r} function, got {two.kind!r}")


def chsh_value(two: TwoModeQuasiprob, x):
    """Signed Bell-CHSH value for settings arrays of shape ``(..., 8)``."""
    z1, z2, z1p, z2p = _points(x)
    w = two.eval
    return (math.pi**2 / 4) * (w(z1, z2) + w(z1, z2p) + w(z1p, z2) - w(z1p, z2p))


def ch_value(two: TwoModeQuasiprob, x):
    z1, z2, z1p, z2p = _points(x)
    q = two.eval
    joint = q(z1, z2) + q(z1, z2p) + q(z1p, z2) - q(z1p, z2p)
    return math.pi**2 * joint - math.pi * (two.marginal1(z1) + two.marginal2(z2))


def bell_chsh(two: TwoModeQuasiprob, d: DisplacementSet) -> float:
    _check_kind(two, WIGNER, CHSH)
    return float(chsh_value(two, d.as_array()))


def bell_ch(two: TwoModeQuasiprob, d: DisplacementSet) -> float:
    _check_kind(two, HUSIMI, CH)
    return float(ch_value(two, d.as_array()))


def _clip_to_disk(x: np.ndarray, radius: float) -> np.ndarray:
    z = x.reshape(*x.shape[:-1], 4, 2)
    mod = np.sqrt(np.sum(z**2, axis=-1, keepdims=True))
    scale = np.minimum(1.0, radius / np.maximum(mod, 1e-300))
    return (z * scale).reshape(x.shape)


def starting_points(n_starts: int = DEFAULT_STARTS, seed: int = 0) -> np.ndarray:
    """Deterministic start set: Sobol points, real/imaginary-only copies, random points.

    The Sobol prefix property keeps the set for ``n`` starts a subset of the
    set for any larger ``n``.
    """
    if n_starts < 1:
        raise ValueError("need at least one start")
    sobol = qmc.Sobol(d=8, scramble=True, seed=seed).random(n_starts)
    grid = START_BOX * (2 * sobol - 1)
    head = grid[: min(8, n_starts)]
    real_only = head.copy()
    real_only[:, 1::2] = 0
    imag_only = head.copy()
    imag_only[:, 0::2] = 0
    rng = np.random.default_rng(seed)
    rand = rng.uniform(-START_BOX, START_BOX, size=(RANDOM_STARTS, 8))
    return np.vstack([grid, real_only, imag_only, rand])


def batched_nelder_mead(
    f,
    x0: np.ndarray,
    step: float = 0.3,
    maxiter: int = 4000,
    ftol: float = FTOL,
    xtol: float = XTOL,
):
    """Minimize ``f`` from every row of ``x0`` at once with independent simplices.

    ``f`` maps ``(m, n)`` points to ``(m,)`` values.  Uses the adaptive
    coefficients of Gao and Han for dimension ``n``.  Returns best points,
    best values, and per-start convergence flags.
    """
    x0 = np.atleast_2d(np.asarray(x0, dtype=float))
    m, n = x0.shape
    rho, chi = 1.0, 1.0 + 2.0 / n
    psi, sigma = 0.75 - 1.0 / (2 * n), 1.0 - 1.0 / n

    sim = np.repeat(x0[:, None, :], n + 1, axis=1)
    sim[:, 1:, :] += step * np.eye(n)[None]
    fs = f(sim.reshape(-1, n)).reshape(m, n + 1)
    done = np.zeros(m, bool)
    rows = np.arange(m)

    for _ in range(maxiter):
        order = np.argsort(fs, axis=1, kind="stable")
        sim = np.take_along_axis(sim, order[..., None], axis=1)
        fs = np.take_along_axis(fs, order, axis=1)
        fspread = fs[:, -1] - fs[:, 0]
        xspread = np.max(np.abs(sim[:, 1:] - sim[:, :1]), axis=(1, 2))
        done |= (fspread <= ftol) & (xspread <= xtol)
        active = np.flatnonzero(~done)
        if active.size == 0:
            break
        s = sim[active]
        fa = fs[active]
        centroid = s[:, :-1].mean(axis=1)
        worst = s[:, -1]
        xr = centroid + rho * (centroid - worst)
        xe = centroid + rho * chi * (centroid - worst)
        xoc = centroid + psi * rho * (centroid - worst)
        xic = centroid - psi * (centroid - worst)
        cand = np.stack([xr, xe, xoc, xic], axis=1)
        fc = f(cand.reshape(-1, n)).reshape(-1, 4)
        fr, fe, foc, fic = fc.T
        best, second, worst_f = fa[:, 0], fa[:, -2], fa[:, -1]

        new_x = np.empty_like(worst)
        new_f = np.empty_like(fr)
        shrink = np.zeros(active.size, bool)

        expand = fr < best
        take_e = expand & (fe < fr)
        new_x[take_e], new_f[take_e] = xe[take_e], fe[take_e]
        take_r = (expand & ~take_e) | (~expand & (fr < second))
        new_x[take_r], new_f[take_r] = xr[take_r], fr[take_r]
        outside = ~expand & (fr >= second) & (fr < worst_f)
        oc_ok = outside & (foc <= fr)
        new_x[oc_ok], new_f[oc_ok] = xoc[oc_ok], foc[oc_ok]
        inside = ~expand & (fr >= worst_f)
        ic_ok = inside & (fic < worst_f)
        new_x[ic_ok], new_f[ic_ok] = xic[ic_ok], fic[ic_ok]
        shrink = (outside & ~oc_ok) | (inside & ~ic_ok)

        keep = ~shrink
        s[keep, -1] = new_x[keep]
        fa[keep, -1] = new_f[keep]
        if shrink.any():
            sh = s[shrink]
            sh[:, 1:] = sh[:, :1] + sigma * (sh[:, 1:] - sh[:, :1])
            fsh = f(sh[:, 1:].reshape(-1, n)).reshape(-1, n)
            s[shrink] = sh
            fa[shrink, 1:] = fsh
        sim[active] = s
        fs[active] = fa

    order = np.argmin(fs, axis=1)
    return sim[rows, order], fs[rows, order], done


def objective(functional: str, two: TwoModeQuasiprob):
    """Vectorized function to *minimize* over settings arrays."""
    if functional == CHSH:
        _check_kind(two, WIGNER, CHSH)
        return lambda x: -np.abs(chsh_value(two, _clip_to_disk(x, SEARCH_RADIUS)))
    if functional == CH:
        _check_kind(two, HUSIMI, CH)
        return lambda x: -ch_value(two, _clip_to_disk(x, SEARCH_RADIUS))
    raise ValueError(f"unknown functional {functional!r}")


def optimize(
    functional: str,
    two: TwoModeQuasiprob,
    n_starts: int = DEFAULT_STARTS,
    seed: int = 0,
    restarts: int = 1,
) -> BellResult:
    """Multi-start simplex maximization over the eight setting coordinates.

    CHSH maximizes ``|B_CHSH|``; CH maximizes the signed ``B_CH``.  Each
    start is refined independently (then restarted from its own optimum
    with a fresh simplex), so adding starts never lowers the result.
    """
    f = objective(functional, two)
    x0 = starting_points(n_starts, seed)
    # coarse pass, then restart each start from its own optimum
    x, fx, ok = batched_nelder_mead(f, x0, ftol=1e-8, xtol=1e-4, maxiter=3000)
    for k in range(restarts):
        x, fx, ok = batched_nelder_mead(f, x, step=0.05 / (k + 1))
    x = _clip_to_disk(x, SEARCH_RADIUS)
    values = -fx
    top = values.max()
    ties = np.flatnonzero(values >= top - TIE_TOL)
    pick = ties[np.argmin(np.linalg.norm(x[ties], axis=1))]
    # the reported value is the best one found, so extra starts can never lower it
    return BellResult(
        value=float(top),
        argmax=DisplacementSet.from_array(x[pick]),
        starts_used=len(x0),
        converged=bool(ok[pick]),
    )
