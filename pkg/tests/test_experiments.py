import math

import numpy as np
import pytest

from gibbscv import (
    InsufficientDataError,
    LossSpec,
    ParamGrid,
    PoissonModel,
    RngStream,
    StraussModel,
    StudyConfig,
    StudyResult,
    StudyRow,
    TestFunctionSpec,
    WeightScheme,
    gnz_check,
    mse_decompose,
    run_study,
    scenario_config,
)
from gibbscv.sampling import McmcConfig


def test_mse_decompose_examples():
    assert mse_decompose([5.0, 5.0], 5.0) == (0.0, 0.0, 0.0)
    mse, bias_sq, var = mse_decompose([4.0, 6.0], 5.0)
    assert (mse, bias_sq, var) == (1.0, 0.0, 1.0)
    mse, bias_sq, var = mse_decompose([1.0, 2.0, 3.0], 0.0)
    assert mse == pytest.approx(14.0 / 3.0, rel=1e-14)
    assert bias_sq == pytest.approx(4.0, rel=1e-14)
    assert var == pytest.approx(2.0 / 3.0, rel=1e-14)


def test_mse_decompose_requires_two_estimates():
    with pytest.raises(InsufficientDataError):
        mse_decompose([1.0], 0.0)


def test_mse_identity_holds_on_random_inputs():
    gen = RngStream(1).generator()
    for _ in range(200):
        estimates = 100.0 + gen.normal(size=gen.integers(2, 30)) * gen.gamma(1)
        mse, bias_sq, var = mse_decompose(estimates, 100.0)
        assert abs(mse - (bias_sq + var)) <= 1e-12 * max(mse, 1e-300)


def test_study_result_rejects_broken_identity():
    row = StudyRow("s", "beta", "tf", None, None, None, 5.0, 1.0, 1.0, 10)
    with pytest.raises(ValueError, match="identity"):
        StudyResult((row,))


def _tiny_config(seed=0, **overrides):
    base = dict(
        scenario="poisson-tiny",
        model=PoissonModel(2.0, 4.0),
        grid=ParamGrid(
            ("alpha", "beta"),
            (np.linspace(1.0, 3.0, 3), np.linspace(2.0, 6.0, 3)),
        ),
        n_replications=3,
        k=3,
        p_values=(0.3, 0.6),
        weight_schemes=(WeightScheme("p"),),
        losses=(LossSpec("l1"), LossSpec("l3")),
        seed=seed,
        dummy_resolution=8,
    )
    base.update(overrides)
    return StudyConfig(**base)


def test_run_study_row_count_and_identity():
    result = run_study(_tiny_config())
    # 2 parameters x (1 TF row + 2 p x 1 weight x 2 losses PPL rows)
    assert len(result.rows) == 2 * (1 + 2 * 1 * 2)
    for row in result.rows:
        assert abs(row.mse - (row.bias_sq + row.variance)) <= 1e-12 * max(
            row.mse, 1e-300
        )
        assert row.n_effective == 3
    tf_rows = [r for r in result.rows if r.method == "tf"]
    assert {r.p for r in tf_rows} == {None}
    assert "NA" in result.to_csv_string().splitlines()[1]


def test_run_study_deterministic_and_order_insensitive():
    cfg = _tiny_config(seed=42)
    serial = run_study(cfg, workers=1).to_csv_string()
    again = run_study(cfg, workers=1).to_csv_string()
    parallel = run_study(cfg, workers=2).to_csv_string()
    assert serial == again
    assert serial == parallel


def test_run_study_degenerate_grid_gives_zero_mse():
    # a single-candidate grid equal to the truth estimates perfectly
    cfg = _tiny_config(
        n_replications=2,
        grid=ParamGrid(("alpha", "beta"), (np.array([2.0]), np.array([4.0]))),
        p_values=(0.5,),
        losses=(LossSpec("l1"),),
    )
    result = run_study(cfg)
    for row in result.rows:
        assert row.mse == 0.0 and row.bias_sq == 0.0 and row.variance == 0.0


def test_run_study_estimated_weight_combo():
    cfg = _tiny_config(
        weight_schemes=(WeightScheme("estimate", k_prime=4),),
        p_values=(0.4,),
        losses=(LossSpec("l1"),),
    )
    result = run_study(cfg)
    assert {r.weight for r in result.rows if r.method == "ppl"} == {"estimate"}


def test_study_config_roundtrip():
    cfg = scenario_config("strauss", seed=7, n_replications=4)
    again = StudyConfig.from_dict(cfg.to_dict())
    assert again.to_dict() == cfg.to_dict()
    hc = scenario_config("hardcore")
    assert hc.grid is None and hc.truncation == 1e6
    assert StudyConfig.from_dict(hc.to_dict()).grid is None


def test_scenario_presets():
    poisson = scenario_config("poisson")
    assert poisson.model == PoissonModel(2.0, 4.0)
    axes = dict(zip(poisson.grid.names, poisson.grid.axes))
    assert axes["alpha"][0] == -1.0 and axes["alpha"][-1] == 3.0
    assert len(axes["alpha"]) == 41 and len(axes["beta"]) == 41

    strauss = scenario_config("strauss")
    assert strauss.model == StraussModel(100.0, 0.05, 0.5)
    axes = dict(zip(strauss.grid.names, strauss.grid.axes))
    assert len(axes["beta"]) == 21 and axes["beta"][1] - axes["beta"][0] == 5.0
    assert axes["R"][0] == 0.035 and axes["R"][-1] == 0.065
    assert axes["gamma"][0] == pytest.approx(0.10)

    geyer = scenario_config("geyer")
    assert geyer.model.gamma == pytest.approx(math.sqrt(1.5))
    axes = dict(zip(geyer.grid.names, geyer.grid.axes))
    assert len(axes["sat"]) == 9 and axes["sat"][1] - axes["sat"][0] == 0.25

    with pytest.raises(ValueError):
        scenario_config("thomas")


def test_study_config_validation():
    with pytest.raises(ValueError):
        _tiny_config(n_replications=1)
    with pytest.raises(ValueError):
        _tiny_config(p_values=(0.0,))
    with pytest.raises(ValueError):
        _tiny_config(weight_schemes=())
    with pytest.raises(ValueError, match="adaptive"):
        _tiny_config(grid=None)


def test_gnz_check_preconditions():
    with pytest.raises(ValueError):
        gnz_check(
            PoissonModel(2, 4), TestFunctionSpec(1.0), 10, RngStream(0)
        )


def test_gnz_check_small_run():
    mean, se = gnz_check(
        PoissonModel(2, 4),
        TestFunctionSpec(1.0),
        40,
        RngStream(3),
        mcmc=McmcConfig(n_steps=100, burn_in=0),
        n_dummy=16,
    )
    assert se > 0
    assert abs(mean) <= 5 * se  # loose: 40 replications only
