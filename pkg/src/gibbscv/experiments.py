"""Simulation-study harness: replication, aggregation, result tables."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import UNIT_SQUARE, RngStream, Window
from .estimation import (
    DegeneratePatternError,
    LossSpec,
    NoFeasiblePointError,
    ParamGrid,
    TestFunctionSpec,
    WeightScheme,
    build_quadrature,
    fit_tf,
    hardcore_adaptive_grid,
    innovation,
    loss as loss_value,
    _argmin_first,
    ppl_error_table,
)
from .models import (
    GeyerModel,
    HardCoreModel,
    ModelSpec,
    PoissonModel,
    StraussModel,
    model_from_dict,
)
from .sampling import McmcConfig, cv_monte_carlo, sample_model


class InsufficientDataError(ValueError):
    """Too few estimates to decompose the error."""


class StudyError(RuntimeError):
    """The simulation study could not produce a usable result table."""


def mse_decompose(
    estimates: Sequence[float], theta0_component: float
) -> tuple[float, float, float]:
    """Split mean squared error into squared bias plus population variance.

    Returns (mse, bias_sq, variance); the identity mse = variance + bias_sq
    holds exactly in exact arithmetic and to ~1e-15 relative here.
    """
    arr = np.asarray(estimates, dtype=float)
    if arr.size < 2:
        raise InsufficientDataError("variance needs at least 2 estimates")
    dev = arr - theta0_component
    bias = dev.mean()
    variance = float(((dev - bias) ** 2).mean())
    mse = float((dev * dev).mean())
    return mse, float(bias * bias), variance


@dataclass(frozen=True)
class StudyRow:
    scenario: str
    parameter: str
    method: str  # "tf" or "ppl"
    p: float | None
    weight: str | None
    loss: str | None
    mse: float
    bias_sq: float
    variance: float
    n_effective: int


CSV_HEADER = (
    "scenario,parameter,method,p,weight,loss,mse,bias_sq,variance,n_effective"
)


@dataclass(frozen=True)
class StudyResult:
    """Per-parameter error table; every row satisfies the MSE identity."""

    rows: tuple[StudyRow, ...]

    def __post_init__(self) -> None:
        for row in self.rows:
            gap = abs(row.mse - (row.variance + row.bias_sq))
            if gap > 1e-12 * max(row.mse, 1e-300):
                raise ValueError(
                    f"MSE identity violated in row {row}: gap {gap}"
                )

    def to_csv_string(self) -> str:
        lines = [CSV_HEADER]
        for r in self.rows:
            lines.append(
                ",".join(
                    [
                        r.scenario,
                        r.parameter,
                        r.method,
                        "NA" if r.p is None else repr(r.p),
                        r.weight or "NA",
                        r.loss or "NA",
                        repr(r.mse),
                        repr(r.bias_sq),
                        repr(r.variance),
                        str(r.n_effective),
                    ]
                )
            )
        return "\n".join(lines) + "\n"

    def write_csv(self, path: str | Path) -> None:
        Path(path).write_text(self.to_csv_string())


@dataclass(frozen=True)
class StudyConfig:
    """Everything one study run needs; JSON-serializable for the CLI."""

    scenario: str
    model: ModelSpec
    grid: ParamGrid | None  # None: per-pattern adaptive hard-core grid
    n_replications: int = 50
    k: int = 25
    p_values: tuple[float, ...] = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
    weight_schemes: tuple[WeightScheme, ...] = (WeightScheme("p"),)
    losses: tuple[LossSpec, ...] = (
        LossSpec("l1"),
        LossSpec("l2"),
        LossSpec("l3"),
    )
    tf_alpha: float = 1.0
    truncation: float | None = None
    adaptive_grid_size: int = 41
    mcmc: McmcConfig = field(default_factory=McmcConfig)
    seed: int = 0
    dummy_resolution: int = 32
    window: Window = UNIT_SQUARE

    def __post_init__(self) -> None:
        if self.n_replications < 2:
            raise ValueError("n_replications must be at least 2 (variance)")
        if not self.p_values or not self.weight_schemes or not self.losses:
            raise ValueError("p_values, weight_schemes and losses are required")
        if any(not 0.0 < p < 1.0 for p in self.p_values):
            raise ValueError("all p_values must lie in (0, 1)")
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.grid is None and not isinstance(self.model, HardCoreModel):
            raise ValueError("adaptive grid is defined for hard-core only")

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "model": {
                "family": self.model.family,
                **{n: getattr(self.model, n) for n in self.model.param_names},
            },
            "grid": (
                "adaptive"
                if self.grid is None
                else {
                    name: axis.tolist()
                    for name, axis in zip(self.grid.names, self.grid.axes)
                }
            ),
            "n_replications": self.n_replications,
            "k": self.k,
            "p_values": list(self.p_values),
            "weight_schemes": [w.kind for w in self.weight_schemes],
            "k_prime": max(w.k_prime for w in self.weight_schemes),
            "losses": [l.id for l in self.losses],
            "tf_alpha": self.tf_alpha,
            "truncation": self.truncation,
            "adaptive_grid_size": self.adaptive_grid_size,
            "mcmc": {
                "n_steps": self.mcmc.n_steps,
                "burn_in": self.mcmc.burn_in,
                "birth_prob": self.mcmc.birth_prob,
                "initial": self.mcmc.initial,
            },
            "seed": self.seed,
            "dummy_resolution": self.dummy_resolution,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StudyConfig":
        d = dict(d)
        model = model_from_dict(d["model"])
        grid_spec = d.get("grid", "adaptive")
        grid = (
            None
            if grid_spec == "adaptive"
            else ParamGrid.from_dict(grid_spec)
        )
        k_prime = int(d.get("k_prime", 25))
        weights = tuple(
            WeightScheme(kind, k_prime)
            for kind in d.get("weight_schemes", ["p"])
        )
        losses = tuple(LossSpec(i) for i in d.get("losses", ["l1", "l2", "l3"]))
        mcmc_d = d.get("mcmc", {})
        return cls(
            scenario=d["scenario"],
            model=model,
            grid=grid,
            n_replications=int(d.get("n_replications", 50)),
            k=int(d.get("k", 25)),
            p_values=tuple(d.get("p_values", cls.p_values)),
            weight_schemes=weights,
            losses=losses,
            tf_alpha=float(d.get("tf_alpha", 1.0)),
            truncation=d.get("truncation"),
            adaptive_grid_size=int(d.get("adaptive_grid_size", 41)),
            mcmc=McmcConfig(
                n_steps=int(mcmc_d.get("n_steps", 100_000)),
                burn_in=int(mcmc_d.get("burn_in", 50_000)),
                birth_prob=float(mcmc_d.get("birth_prob", 0.5)),
                initial=mcmc_d.get("initial", "empty"),
            ),
            seed=int(d.get("seed", 0)),
            dummy_resolution=int(d.get("dummy_resolution", 32)),
        )


def scenario_config(name: str, **overrides) -> StudyConfig:
    """Bundled study scenario; keyword overrides replace config fields."""
    if name == "poisson":
        cfg = StudyConfig(
            scenario="poisson",
            model=PoissonModel(alpha=2.0, beta=4.0),
            grid=ParamGrid(
                ("alpha", "beta"),
                (np.linspace(-1.0, 3.0, 41), np.linspace(-2.0, 10.0, 41)),
            ),
        )
    elif name == "hardcore":
        cfg = StudyConfig(
            scenario="hardcore",
            model=HardCoreModel(beta=100.0, R=0.05),
            grid=None,
            truncation=1e6,
        )
    elif name == "strauss":
        cfg = StudyConfig(
            scenario="strauss",
            model=StraussModel(beta=100.0, R=0.05, gamma=0.5),
            grid=ParamGrid(
                ("beta", "R", "gamma"),
                (
                    np.linspace(50.0, 150.0, 21),
                    np.linspace(0.035, 0.065, 21),
                    np.linspace(0.10, 0.90, 21),
                ),
            ),
        )
    elif name == "geyer":
        cfg = StudyConfig(
            scenario="geyer",
            model=GeyerModel(
                beta=60.0, R=0.05, gamma=math.sqrt(1.5), sat=2.0
            ),
            grid=ParamGrid(
                ("beta", "R", "gamma", "sat"),
                (
                    np.linspace(40.0, 80.0, 9),
                    np.linspace(0.035, 0.065, 9),
                    np.linspace(0.5, 2.0, 9),
                    np.linspace(1.0, 3.0, 9),
                ),
            ),
        )
    else:
        raise ValueError(f"unknown scenario {name!r}")
    return replace(cfg, **overrides) if overrides else cfg


def _ppl_combo_key(p: float, weight: str, loss_id: str) -> tuple:
    return ("ppl", p, weight, loss_id)


def _params_of(model: ModelSpec) -> dict[str, float]:
    return {n: float(getattr(model, n)) for n in model.param_names}


def _study_replication(cfg: StudyConfig, rep: int) -> dict | None:
    """One replication; None marks a replication-level failure."""
    rng = RngStream(cfg.seed).child(rep)
    family = type(cfg.model)
    tf_spec = TestFunctionSpec(cfg.tf_alpha, cfg.truncation)
    try:
        pattern = sample_model(cfg.model, cfg.window, cfg.mcmc, rng.child(0))
        grid = cfg.grid
        if grid is None:
            quad = build_quadrature(cfg.window, pattern, cfg.dummy_resolution)
            grid = hardcore_adaptive_grid(pattern, cfg.adaptive_grid_size, quad)
    except (DegeneratePatternError, ValueError):
        return None

    out: dict = {}
    try:
        out[("tf",)] = _params_of(
            fit_tf(pattern, family, grid, tf_spec, cfg.dummy_resolution)
        )
    except NoFeasiblePointError:
        out[("tf",)] = None

    for ip, p in enumerate(cfg.p_values):
        cvround = cv_monte_carlo(pattern, p, cfg.k, rng.child(1, ip))
        for iw, scheme in enumerate(cfg.weight_schemes):
            try:
                thetas, errors, nonempty = ppl_error_table(
                    pattern,
                    family,
                    grid,
                    cvround,
                    p,
                    scheme,
                    tf_spec,
                    rng.child(2, ip, iw),
                    cfg.dummy_resolution,
                )
            except NoFeasiblePointError:
                thetas = None
            for ls in cfg.losses:
                key = _ppl_combo_key(p, scheme.kind, ls.id)
                if thetas is None:
                    out[key] = None
                    continue
                try:
                    values = [
                        loss_value(ls, errors[i], nonempty)
                        for i in range(len(thetas))
                    ]
                    theta, _ = _argmin_first(thetas, values)
                    out[key] = _params_of(family(*theta))
                except NoFeasiblePointError:
                    out[key] = None
    return out


def run_study(cfg: StudyConfig, workers: int = 1) -> StudyResult:
    """Simulate, fit and aggregate one scenario into an error table.

    Replication r derives all its randomness from stream (seed, r), so the
    result is independent of execution order and worker count. The study
    aborts if more than 20% of replications fail outright; isolated fit
    failures only reduce a row's n_effective.
    """
    reps = list(range(cfg.n_replications))
    if workers <= 1:
        payloads = [_study_replication(cfg, r) for r in reps]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {r: pool.submit(_study_replication, cfg, r) for r in reps}
            payloads = [futures[r].result() for r in reps]

    n_failed = sum(payload is None for payload in payloads)
    if n_failed > 0.2 * cfg.n_replications:
        raise StudyError(
            f"{n_failed}/{cfg.n_replications} replications failed"
        )

    combos: list[tuple] = [("tf",)]
    for p in cfg.p_values:
        for scheme in cfg.weight_schemes:
            for ls in cfg.losses:
                combos.append(_ppl_combo_key(p, scheme.kind, ls.id))

    rows: list[StudyRow] = []
    for combo in combos:
        method = combo[0]
        p = combo[1] if method == "ppl" else None
        weight = combo[2] if method == "ppl" else None
        loss_id = combo[3] if method == "ppl" else None
        estimates_by_param: dict[str, list[float]] = {
            name: [] for name in cfg.model.param_names
        }
        for payload in payloads:
            if payload is None or payload.get(combo) is None:
                continue
            for name, value in payload[combo].items():
                estimates_by_param[name].append(value)
        for name in cfg.model.param_names:
            estimates = estimates_by_param[name]
            if len(estimates) < 2:
                raise StudyError(
                    f"combination {combo} has {len(estimates)} usable "
                    "replications; cannot decompose the error"
                )
            mse, bias_sq, variance = mse_decompose(
                estimates, getattr(cfg.model, name)
            )
            rows.append(
                StudyRow(
                    scenario=cfg.scenario,
                    parameter=name,
                    method=method,
                    p=p,
                    weight=weight,
                    loss=loss_id,
                    mse=mse,
                    bias_sq=bias_sq,
                    variance=variance,
                    n_effective=len(estimates),
                )
            )
    return StudyResult(tuple(rows))


def gnz_check(
    model: ModelSpec,
    tf: TestFunctionSpec,
    n_reps: int,
    rng: RngStream,
    window: Window = UNIT_SQUARE,
    mcmc: McmcConfig | None = None,
    n_dummy: int = 96,
) -> tuple[float, float]:
    """Mean and standard error of the auto-prediction error at the truth.

    The Georgii-Nguyen-Zessin identity makes the mean zero at the true
    parameter, so |mean| beyond a few standard errors flags a sampler or
    estimator defect. Uses a finer default dummy grid than the study so the
    quadrature bias stays below the Monte-Carlo resolution.
    """
    if n_reps < 30:
        raise ValueError("n_reps must be at least 30")
    mcmc = mcmc or McmcConfig()
    values = np.empty(n_reps)
    for rep in range(n_reps):
        pattern = sample_model(model, window, mcmc, rng.child(rep))
        quad = build_quadrature(window, pattern, n_dummy)
        values[rep] = innovation(model, tf, pattern, quad)
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(n_reps))
