import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gibbscv import (
    GeyerModel,
    HardCoreModel,
    IntensityEvaluator,
    Point,
    PointPattern,
    PoissonModel,
    RngStream,
    StraussModel,
    UNIT_SQUARE,
    conditional_intensity,
    local_stability_bound,
    log_interaction,
    model_from_json,
    model_to_json,
    neighbor_count,
)

W = UNIT_SQUARE


def pat(*pts):
    return PointPattern(tuple(Point(*p) for p in pts), W)


def test_neighbor_count_examples():
    assert neighbor_count(Point(0.5, 0.5), pat((0.5, 0.5)), 0.1) == 0
    x = pat((0.52, 0.5), (0.5, 0.54), (0.9, 0.9))
    assert neighbor_count(Point(0.5, 0.5), x, 0.05) == 2
    # the ball is closed, so a boundary point counts
    assert neighbor_count(Point(0.0, 0.0), pat((0.05, 0.0)), 0.05) == 1
    with pytest.raises(ValueError):
        neighbor_count(Point(0.5, 0.5), x, 0.0)


def test_log_interaction_examples():
    x = pat((0.52, 0.5), (0.5, 0.54), (0.9, 0.9))
    assert log_interaction(PoissonModel(2, 4), Point(0.3, 0.3), x) == 0.0
    strauss = StraussModel(100, 0.05, 0.5)
    assert log_interaction(strauss, Point(0.5, 0.5), x) == pytest.approx(
        2 * math.log(0.5)
    )
    hc = HardCoreModel(100, 0.05)
    assert log_interaction(hc, Point(0.5, 0.52), x) == -math.inf
    assert log_interaction(hc, Point(0.2, 0.2), x) == 0.0


def test_geyer_interaction_saturation_exponents():
    # two close points saturate each other, so a third nearby point adds
    # only its own capped count; removing one frees both contributions
    R, gamma = 0.1, 1.5
    model = GeyerModel(beta=60, R=R, gamma=gamma, sat=1)
    eta, zeta, xi = Point(0.5, 0.5), Point(0.5, 0.58), Point(0.44, 0.54)
    both = pat((eta.x, eta.y), (zeta.x, zeta.y))
    one = pat((eta.x, eta.y))
    assert log_interaction(model, xi, both) == pytest.approx(math.log(gamma))
    assert log_interaction(model, xi, one) == pytest.approx(2 * math.log(gamma))


def test_geyer_not_monotone_for_gamma_above_one():
    model = GeyerModel(beta=60, R=0.1, gamma=1.5, sat=1)
    eta, zeta, xi = Point(0.5, 0.5), Point(0.5, 0.58), Point(0.44, 0.54)
    lam_one = conditional_intensity(model, xi, pat((eta.x, eta.y)))
    lam_both = conditional_intensity(
        model, xi, pat((eta.x, eta.y), (zeta.x, zeta.y))
    )
    assert lam_one > lam_both


def test_conditional_intensity_examples():
    x = pat((0.52, 0.5), (0.5, 0.54), (0.9, 0.9))
    assert conditional_intensity(
        PoissonModel(2, 4), Point(0.5, 0.77), x
    ) == pytest.approx(math.exp(4.0))
    hc = HardCoreModel(100, 0.05)
    assert conditional_intensity(hc, Point(0.52, 0.53), x) == 0.0
    strauss = StraussModel(100, 0.05, 0.5)
    assert conditional_intensity(strauss, Point(0.5, 0.5), x) == pytest.approx(
        25.0
    )


def test_conditional_intensity_removes_coincident_point():
    # Papangelou convention: a pattern point is evaluated against the rest
    hc = HardCoreModel(100, 0.05)
    x = pat((0.2, 0.2), (0.8, 0.8))
    assert conditional_intensity(hc, Point(0.2, 0.2), x) == 100.0
    strauss = StraussModel(100, 0.05, 0.5)
    y = pat((0.2, 0.2), (0.2, 0.24))
    assert conditional_intensity(strauss, Point(0.2, 0.2), y) == 50.0


def test_local_stability_bound_examples():
    assert local_stability_bound(
        PoissonModel(2, 4), Point(1.0, 0.3)
    ) == pytest.approx(math.exp(6.0))
    assert local_stability_bound(HardCoreModel(100, 0.05), Point(0.5, 0.5)) == 100.0
    assert local_stability_bound(
        StraussModel(100, 0.05, 0.5), Point(0.1, 0.9)
    ) == 100.0


@given(seed=st.integers(0, 10**6))
@settings(max_examples=30, deadline=None)
def test_intensity_never_exceeds_stability_bound(seed):
    gen = RngStream(seed).generator()
    x = PointPattern.from_coords(gen.random((30, 2)), W)
    u = Point(*gen.random(2))
    models = [
        PoissonModel(2, 4),
        HardCoreModel(100, 0.05),
        StraussModel(100, 0.05, 0.5),
        GeyerModel(60, 0.05, math.sqrt(1.5), 2),
    ]
    for model in models:
        lam = conditional_intensity(model, u, x)
        assert lam <= local_stability_bound(model, u) * (1 + 1e-12)


@given(seed=st.integers(0, 10**6))
@settings(max_examples=30, deadline=None)
def test_hardcore_and_strauss_are_repulsive(seed):
    gen = RngStream(seed).generator()
    coords = gen.random((20, 2)) * 0.3 + 0.3  # crowded so interactions bite
    n_sub = int(gen.integers(0, 20))
    subset = PointPattern.from_coords(coords[:n_sub], W)
    full = PointPattern.from_coords(coords, W)
    u = Point(*(gen.random(2) * 0.3 + 0.3))
    for model in (HardCoreModel(100, 0.05), StraussModel(100, 0.08, 0.4)):
        assert conditional_intensity(model, u, subset) >= conditional_intensity(
            model, u, full
        )


def test_family_limits():
    gen = RngStream(17).generator()
    x = PointPattern.from_coords(gen.random((40, 2)) * 0.4 + 0.3, W)
    u = Point(0.45, 0.45)
    # gamma = 1: Strauss reduces to a homogeneous Poisson at rate beta
    assert conditional_intensity(StraussModel(80, 0.05, 1.0), u, x) == 80.0
    # gamma = 0 (with 0^0 = 1): Strauss reduces to the hard-core model
    s0 = StraussModel(80, 0.05, 0.0)
    hc = HardCoreModel(80, 0.05)
    for _ in range(20):
        v = Point(*gen.random(2))
        assert conditional_intensity(s0, v, x) == conditional_intensity(
            hc, v, x
        )
    # saturation 0: Geyer reduces to a homogeneous Poisson
    g0 = GeyerModel(60, 0.05, 2.0, 0)
    for _ in range(10):
        v = Point(*gen.random(2))
        assert conditional_intensity(g0, v, x) == 60.0


def test_evaluator_matches_scalar_op():
    gen = RngStream(23).generator()
    x = PointPattern.from_coords(gen.random((25, 2)) * 0.5 + 0.25, W)
    fresh = gen.random((40, 2))
    nodes = np.vstack([x.coords, fresh])
    models = [
        PoissonModel(1.0, 2.0),
        HardCoreModel(90, 0.06),
        StraussModel(90, 0.06, 0.3),
        GeyerModel(60, 0.06, 1.4, 2),
    ]
    for model in models:
        ev = IntensityEvaluator(nodes, x)
        values = ev.values(model)
        for i, (px, py) in enumerate(nodes):
            assert values[i] == pytest.approx(
                conditional_intensity(model, Point(px, py), x), rel=1e-12
            )


def test_model_json_roundtrip():
    models = [
        PoissonModel(2, 4),
        HardCoreModel(100, 0.05),
        StraussModel(100, 0.05, 0.5),
        GeyerModel(60, 0.05, math.sqrt(1.5), 2),
    ]
    for model in models:
        assert model_from_json(model_to_json(model)) == model
    text = model_to_json(StraussModel(100, 0.05, 0.5))
    assert '"family": "strauss"' in text and '"R": 0.05' in text


def test_parameter_domain_validation():
    with pytest.raises(ValueError):
        StraussModel(100, 0.05, 1.2)
    with pytest.raises(ValueError):
        StraussModel(-1, 0.05, 0.5)
    with pytest.raises(ValueError):
        HardCoreModel(100, 0.0)
    with pytest.raises(ValueError):
        GeyerModel(60, 0.05, 1.5, -1)
    with pytest.raises(ValueError):
        model_from_json('{"family": "thomas", "beta": 1}')
    with pytest.raises(ValueError):
        model_from_json('{"family": "strauss", "beta": 1, "R": 0.1}')
