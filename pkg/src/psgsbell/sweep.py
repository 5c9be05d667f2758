"""Scenario configuration, parameter sweeps and CSV output."""

from __future__ import annotations

import configparser
import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import bell
from .fidelity import max_fidelity_curve, optimal_r
from .quasiprob import (
    DarkMix,
    GaussianVariances,
    KimConditional,
    LossyPsgs,
    PurePsgs,
    Scs,
    Vacuum,
    db_to_variance,
    lossy_success_prob,
    quasiprob,
    success_prob_ideal,
    transmitted_reference,
)
from .twomode import ecs_q, split_5050

CSV_HEADER = [
    "axis", "bell", "p_success",
    "z1r", "z1i", "z2r", "z2i", "z1pr", "z1pi", "z2pr", "z2pi",
    "converged",
]
FIDELITY_HEADER = ["alpha", "F"]

STATES = ("vacuum", "psgs", "scs", "kim", "lossy", "dark")
AXES = ("alpha", "T", "epsilon", "pm", "variance_scale")
SCALINGS = ("multiplicative", "additive")

# keys each state understands besides the common ones
STATE_KEYS = {
    "vacuum": set(),
    "psgs": {"alpha", "r"},
    "scs": {"alpha"},
    "kim": {"r", "T", "variance_scale", "scaling", "db_a", "db_b", "A", "B"},
    "lossy": {"r", "T", "epsilon"},
    "dark": {"r", "T", "epsilon", "pm"},
}
COMMON_KEYS = {"state", "functional", "axis", "grid", "starts", "seed", "output"}


class ConfigError(ValueError):
    """Invalid scenario configuration."""


@dataclass(frozen=True)
class Scenario:
    name: str
    state: str
    functional: str
    axis: str
    grid: tuple[float, ...]
    params: dict = field(default_factory=dict)
    starts: int = bell.DEFAULT_STARTS
    seed: int = 0
    output: str | None = None

    def __post_init__(self):
        if self.state not in STATES:
            raise ConfigError(f"[{self.name}] unknown state {self.state!r}")
        if self.functional not in bell.FUNCTIONALS:
            raise ConfigError(f"[{self.name}] unknown functional {self.functional!r}")
        if self.axis not in AXES:
            raise ConfigError(f"[{self.name}] unknown axis {self.axis!r}")
        allowed = STATE_KEYS[self.state]
        bad = set(self.params) - allowed
        if bad:
            raise ConfigError(f"[{self.name}] unknown keys for {self.state}: {sorted(bad)}")
        # the vacuum has no parameters, so its axis is a dummy label
        if self.state != "vacuum" and self.axis not in allowed and self.axis != "variance_scale":
            raise ConfigError(f"[{self.name}] axis {self.axis!r} does not apply to {self.state}")
        if self.axis == "variance_scale" and self.state != "kim":
            raise ConfigError(f"[{self.name}] variance_scale sweeps need state = kim")
        scaling = self.params.get("scaling", "multiplicative")
        if scaling not in SCALINGS:
            raise ConfigError(f"[{self.name}] scaling must be one of {SCALINGS}")
        if self.starts < 1:
            raise ConfigError(f"[{self.name}] starts must be positive")


@dataclass(frozen=True)
class SweepRow:
    axis_value: float
    bell_value: float
    success_prob: float | None
    argmax: tuple[float, ...]
    converged: bool


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------


def parse_grid(text: str) -> tuple[float, ...]:
    """``"0.1, 0.2, 0.5"`` or an inclusive range ``"start:stop:step"``."""
    text = text.strip()
    if not text:
        return ()
    if ":" in text:
        try:
            start, stop, step = (float(p) for p in text.split(":"))
        except ValueError as exc:
            raise ConfigError(f"bad grid range {text!r}") from exc
        if step <= 0:
            raise ConfigError("grid step must be positive")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(round(start + k * step, 12) for k in range(max(n, 0)))
    try:
        return tuple(float(p) for p in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"bad grid {text!r}") from exc


def _param_value(key: str, raw: str):
    if key == "scaling":
        return raw.strip()
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"{key} must be a number, got {raw!r}") from exc


def scenario_from_mapping(name: str, items: dict) -> Scenario:
    items = dict(items)
    try:
        state = items.pop("state")
        functional = items.pop("functional")
        axis = items.pop("axis")
    except KeyError as exc:
        raise ConfigError(f"[{name}] missing required key {exc.args[0]!r}") from None
    grid = parse_grid(items.pop("grid", ""))
    try:
        starts = int(items.pop("starts", bell.DEFAULT_STARTS))
        seed = int(items.pop("seed", 0))
    except ValueError as exc:
        raise ConfigError(f"[{name}] {exc}") from None
    output = items.pop("output", None)
    allowed = STATE_KEYS.get(state, set()) | COMMON_KEYS
    unknown = set(items) - allowed
    if unknown:
        raise ConfigError(f"[{name}] unknown keys: {sorted(unknown)}")
    params = {k: _param_value(k, v) for k, v in items.items()}
    return Scenario(name, state, functional, axis, grid, params, starts, seed, output)


def load_config(path: str) -> list[Scenario]:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str  # keys are case sensitive (T, A, B)
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    if not parser.sections():
        raise ConfigError(f"{path}: no scenario sections")
    return [scenario_from_mapping(s, parser[s]) for s in parser.sections()]


# ---------------------------------------------------------------------------
# models
# ---------------------------------------------------------------------------


def _need(s: Scenario, params: dict, key: str) -> float:
    if key not in params:
        raise ConfigError(f"[{s.name}] missing parameter {key!r}")
    return params[key]


def kim_variances(params: dict) -> GaussianVariances:
    """Input variances from dB levels, explicit ``A``/``B``, or ``r`` plus scaling."""
    scale = params.get("variance_scale", 1.0)
    if "db_a" in params or "db_b" in params:
        base = (db_to_variance(params["db_a"]), db_to_variance(params["db_b"]))
    elif "A" in params or "B" in params:
        base = (params["A"], params["B"])
    else:
        r = params["r"]
        base = (math.exp(2 * r), math.exp(-2 * r))
    if params.get("scaling", "multiplicative") == "additive":
        return GaussianVariances(base[0] + scale - 1, base[1] + scale - 1)
    return GaussianVariances(scale * base[0], scale * base[1])


def build_model(s: Scenario, value: float):
    """State model at one axis value, and the click probability if defined."""
    p = dict(s.params)
    p[s.axis] = value
    if s.state == "vacuum":
        return Vacuum(), None
    if s.state == "psgs":
        r = p["r"] if "r" in p and s.axis != "alpha" else optimal_r(_need(s, p, "alpha"))
        return PurePsgs(r), None
    if s.state == "scs":
        return Scs(_need(s, p, "alpha"), "odd"), None
    if s.state == "kim":
        if not any(k in p for k in ("r", "db_a", "db_b", "A", "B")):
            raise ConfigError(f"[{s.name}] kim needs r, db_a/db_b or A/B")
        v = kim_variances(p)
        T = _need(s, p, "T")
        return KimConditional(v, T), success_prob_ideal(v, T)
    r = _need(s, p, "r")
    T = _need(s, p, "T")
    eps = p.get("epsilon", 1.0)
    base = LossyPsgs(r, T, eps)
    ps = lossy_success_prob(r, T, eps)
    if s.state == "lossy":
        return base, ps
    return DarkMix(base, transmitted_reference(r, T), _need(s, p, "pm")), ps


def two_mode_for(s: Scenario, model):
    kind = "wigner" if s.functional == bell.CHSH else "q"
    if isinstance(model, Scs) and kind == "q":
        return ecs_q(model.alpha)
    return split_5050(quasiprob(model, kind))


def evaluate_point(s: Scenario, value: float) -> SweepRow:
    model, ps = build_model(s, value)
    res = bell.optimize(s.functional, two_mode_for(s, model), s.starts, s.seed)
    return SweepRow(float(value), res.value, ps, tuple(res.argmax.as_array()), res.converged)


def _evaluate(args):
    return evaluate_point(*args)


# ---------------------------------------------------------------------------
# running and output
# ---------------------------------------------------------------------------


def fmt(x: float) -> str:
    return format(float(x), ".12g")


def row_fields(row: SweepRow) -> list[str]:
    return [
        fmt(row.axis_value),
        fmt(row.bell_value),
        "" if row.success_prob is None else fmt(row.success_prob),
        *(fmt(v) for v in row.argmax),
        "1" if row.converged else "0",
    ]


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def emit_csv(rows, path: str, append: bool = False) -> None:
    exists = append and os.path.exists(path) and os.path.getsize(path) > 0
    try:
        with open(path, "a" if exists else "w", encoding="utf-8", newline="") as fh:
            w = _writer(fh)
            if not exists:
                w.writerow(CSV_HEADER)
            for row in rows:
                w.writerow(row_fields(row))
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def emit_fidelity_csv(pairs, path: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = _writer(fh)
            w.writerow(FIDELITY_HEADER)
            for a, f in pairs:
                w.writerow([fmt(a), fmt(f)])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def read_csv(path: str) -> list[SweepRow]:
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {header!r}")
        rows = []
        for rec in reader:
            if len(rec) != len(CSV_HEADER):
                break  # torn final line from an interrupted run
            rows.append(
                SweepRow(
                    float(rec[0]),
                    float(rec[1]),
                    None if rec[2] == "" else float(rec[2]),
                    tuple(float(v) for v in rec[3:11]),
                    rec[11] == "1",
                )
            )
    return rows


def _completed(path: str | None) -> set[str]:
    if not path or not os.path.exists(path) or os.path.getsize(path) == 0:
        return set()
    return {fmt(r.axis_value) for r in read_csv(path)}


def _rewrite_clean(path: str) -> None:
    """Drop a torn trailing line so appended rows start on a fresh record."""
    rows = read_csv(path)
    emit_csv(rows, path)


def run_scenario(s: Scenario, jobs: int = 1, out: str | None = None) -> list[SweepRow]:
    """Optimize the Bell functional at every axis value, in axis order.

    With ``out`` set, rows are streamed to the CSV as they finish and axis
    values already present in an existing file are skipped.
    """
    done = _completed(out)
    if done:
        _rewrite_clean(out)
    todo = [v for v in s.grid if fmt(v) not in done]
    rows: list[SweepRow] = []
    args = [(s, v) for v in todo]
    if jobs > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = pool.map(_evaluate, args)
            rows = _stream(results, out, bool(done))
    else:
        rows = _stream(map(_evaluate, args), out, bool(done))
    return rows


def _stream(results, out, append):
    rows = []
    if out is None:
        return list(results)
    if not append:
        emit_csv([], out)
    for row in results:
        emit_csv([row], out, append=True)
        rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# figure presets
# ---------------------------------------------------------------------------

T_GRID = parse_grid("0.5:0.99:0.01")
FIGURE_VARIANTS = {
    1: ("curve",),
    2: ("a-psgs", "a-scs", "b-psgs", "b-scs"),
    3: ("pure", "mixed"),
    4: ("pure", "mixed104", "mixed108", "experimental"),
    5: ("eps1", "eps0.8", "eps0.6"),
    6: ("eps1", "eps0.8", "eps0.6", "T0.95", "T0.98"),
    7: ("T0.99", "T0.95"),
}


def figure_scenario(n: int, variant: str | None = None, starts: int = bell.DEFAULT_STARTS, seed: int = 0) -> Scenario:
    """Preset scenario for a figure panel (figure 1 is not a Bell sweep)."""
    if n not in FIGURE_VARIANTS or n == 1:
        raise ValueError(f"no Bell sweep for figure {n}")
    variants = FIGURE_VARIANTS[n]
    variant = variant or variants[0]
    if variant not in variants:
        raise ValueError(f"figure {n} has variants {variants}, not {variant!r}")
    name = f"fig{n}-{variant}"
    common = dict(starts=starts, seed=seed)

    if n == 2:
        panel, state = variant.split("-")
        functional = bell.CHSH if panel == "a" else bell.CH
        return Scenario(name, state, functional, "alpha", parse_grid("0.05:2.5:0.05"), {}, **common)
    if n in (3, 4):
        functional = bell.CHSH if n == 3 else bell.CH
        grid = T_GRID + (0.999,)
        db = {
            "mixed": (2.65, -2.56),
            "mixed104": (2.69, -2.52),
            "mixed108": (2.78, -2.43),
            "experimental": (4.26, -3.57),
        }
        params = {"r": 0.3} if variant == "pure" else dict(zip(("db_a", "db_b"), db[variant]))
        return Scenario(name, "kim", functional, "T", grid, params, **common)
    if n in (5, 6) and variant.startswith("eps"):
        functional = bell.CHSH if n == 5 else bell.CH
        eps = float(variant[3:])
        return Scenario(name, "lossy", functional, "T", T_GRID, {"r": 0.3, "epsilon": eps}, **common)
    if n == 6:
        T = float(variant[1:])
        return Scenario(name, "lossy", bell.CH, "epsilon", parse_grid("0.05:1:0.05"), {"r": 0.3, "T": T}, **common)
    T = float(variant[1:])
    return Scenario(
        name, "dark", bell.CH, "pm", parse_grid("0:1:0.02"),
        {"r": 0.3, "T": T, "epsilon": 0.6}, **common,
    )


def figure(n: int, variant: str | None = None, jobs: int = 1, out: str | None = None, **kw):
    """Rows for a figure panel; figure 1 yields ``(alpha, F)`` pairs."""
    if n == 1:
        if variant not in (None, "curve"):
            raise ValueError(f"figure 1 has no variant {variant!r}")
        pairs = max_fidelity_curve(parse_grid("0.01:2.5:0.01"))
        if out:
            emit_fidelity_csv(pairs, out)
        return pairs
    return run_scenario(figure_scenario(n, variant, **kw), jobs=jobs, out=out)


def csv_text(rows) -> str:
    buf = io.StringIO()
    w = _writer(buf)
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(row_fields(r))
    return buf.getvalue()


def with_overrides(s: Scenario, starts: int | None = None, seed: int | None = None) -> Scenario:
    kw = {}
    if starts is not None:
        kw["starts"] = starts
    if seed is not None:
        kw["seed"] = seed
    return replace(s, **kw) if kw else s


def sweep_values(rows) -> np.ndarray:
    return np.array([[r.axis_value, r.bell_value] for r in rows]).reshape(-1, 2)
