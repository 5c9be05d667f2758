"""Closed form versus Fock oracle comparison suite."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import oracle as fo
from .fidelity import optimal_r
from .quasiprob import (
    DarkMix,
    Gaussian,
    GaussianVariances,
    KimConditional,
    LossyPsgs,
    PurePsgs,
    Scs,
    Vacuum,
    quasiprob,
    transmitted_reference,
)
from .twomode import ecs_q, split_5050

GRID_1D = np.linspace(-1, 1, 5)
SINGLE_GRID = [complex(x, y) for x in GRID_1D for y in GRID_1D]
TWO_MODE_AXIS = (-0.6, 0.1j, 0.5 + 0.3j)
TWO_MODE_GRID = [(a, b) for a in TWO_MODE_AXIS for b in TWO_MODE_AXIS]

PURE_TOL = 1e-10
MIXED_TOL = 1e-6


@dataclass(frozen=True)
class CheckResult:
    name: str
    max_dev: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_dev <= self.tol


def single_mode_families():
    """``(label, model, tolerance)`` for every single-mode state family."""
    kim_v = GaussianVariances.from_db(2.65, -2.56)
    lossy = LossyPsgs(0.3, 0.95, 0.6)
    return [
        ("vacuum", Vacuum(), PURE_TOL),
        ("odd SCS a=1", Scs(1.0, "odd"), PURE_TOL),
        ("even SCS a=1", Scs(1.0, "even"), PURE_TOL),
        ("pure PSGS r=0.3", PurePsgs(0.3), PURE_TOL),
        ("pure PSGS r=-0.313", PurePsgs(-0.313), PURE_TOL),
        ("squeezed vacuum r=0.3", Gaussian(GaussianVariances.squeezed(0.3)), PURE_TOL),
        ("Kim T=0.9 AB=1.02", KimConditional(kim_v, 0.9), MIXED_TOL),
        ("lossy r=0.3 T=0.95 eps=0.6", lossy, MIXED_TOL),
        ("lossy r=0.3 T=0.95 eps=1", LossyPsgs(0.3, 0.95, 1.0), MIXED_TOL),
        ("dark pm=0.8", DarkMix(lossy, transmitted_reference(0.3, 0.95), 0.8), MIXED_TOL),
    ]


def single_mode_checks(cutoff: int = fo.DEFAULT_CUTOFF) -> list[CheckResult]:
    out = []
    for label, model, tol in single_mode_families():
        state = fo.build_state(model, cutoff)
        w = quasiprob(model, "wigner")
        q = quasiprob(model, "q")
        dw = max(abs(w(z) - fo.oracle_wigner(state, z)) for z in SINGLE_GRID)
        dq = max(abs(q(z) - fo.oracle_q(state, z)) for z in SINGLE_GRID)
        out.append(CheckResult(f"wigner {label}", dw, tol))
        out.append(CheckResult(f"q {label}", dq, tol))
    return out


def two_mode_checks(cutoff: int = 30) -> list[CheckResult]:
    """Split states and their marginals against the oracle beam splitter."""
    out = []
    cases = [
        ("PSGS a=1", PurePsgs(optimal_r(1.0)), PURE_TOL),
        ("odd SCS a=1", Scs(1.0, "odd"), PURE_TOL),
        ("Kim T=0.9", KimConditional(GaussianVariances.squeezed(0.3, 1.01), 0.9), MIXED_TOL),
    ]
    for label, model, tol in cases:
        st = fo.split_5050(fo.build_state(model, cutoff))
        red = fo.partial_trace(st, 1), fo.partial_trace(st, 2)
        for kind, probe2, probe1 in (
            ("wigner", fo.oracle_wigner2, fo.oracle_wigner),
            ("q", fo.oracle_q2, fo.oracle_q),
        ):
            two = split_5050(quasiprob(model, kind))
            d2 = max(abs(two(a, b) - probe2(st, a, b)) for a, b in TWO_MODE_GRID)
            dm = max(
                max(abs(two.marginal1(z) - probe1(red[0], z)) for z in TWO_MODE_AXIS),
                max(abs(two.marginal2(z) - probe1(red[1], z)) for z in TWO_MODE_AXIS),
            )
            out.append(CheckResult(f"split {kind} {label}", d2, tol))
            out.append(CheckResult(f"split {kind} marginals {label}", dm, tol))
    # the entangled coherent state comes out with the opposite reflected phase
    st = fo.split_5050(fo.build_state(Scs(1.0, "odd"), cutoff), sign=-1)
    ecs = ecs_q(1.0)
    d2 = max(abs(ecs(a, b) - fo.oracle_q2(st, a, b)) for a, b in TWO_MODE_GRID)
    out.append(CheckResult("ECS q a=1", d2, PURE_TOL))
    return out


def normalization_checks() -> list[CheckResult]:
    from scipy import integrate

    out = []
    for label, model, _ in single_mode_families():
        for kind in ("wigner", "q"):
            f = quasiprob(model, kind)
            val, _ = integrate.dblquad(
                lambda y, x: float(f(complex(x, y))), -8, 8, -8, 8, epsabs=1e-10
            )
            out.append(CheckResult(f"norm {kind} {label}", abs(val - 1), 1e-6))
    return out


def run_all(cutoff: int = fo.DEFAULT_CUTOFF, normalization: bool = True) -> list[CheckResult]:
    results = single_mode_checks(cutoff) + two_mode_checks()
    if normalization:
        results += normalization_checks()
    return results


def format_table(results: list[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'check':<{width}}  {'max dev':>10}  {'tol':>7}  status"]
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"{r.name:<{width}}  {r.max_dev:10.2e}  {r.tol:7.0e}  {status}")
    return "\n".join(lines)


def click_probability_check(n: int = 20, seed: int = 0, cutoff: int = fo.DEFAULT_CUTOFF) -> CheckResult:
    """Ideal-detector click probability against the oracle for random inputs."""
    from .quasiprob import success_prob_ideal

    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        r = rng.uniform(0.05, 0.4)
        scale = rng.uniform(1.0, 1.1)
        T = rng.uniform(0.3, 0.99)
        v = GaussianVariances.squeezed(r, scale)
        p = fo.click_probability(KimConditional(v, T), cutoff)
        worst = max(worst, abs(p - success_prob_ideal(v, T)))
    return CheckResult(f"click probability x{n}", worst, 1e-8)


__all__ = [
    "CheckResult",
    "click_probability_check",
    "format_table",
    "normalization_checks",
    "run_all",
    "single_mode_checks",
    "two_mode_checks",
]
