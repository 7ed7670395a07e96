"""Prediction errors, weights, quadrature, losses and the two fitting routes.

Fitting minimizes either cross-validated weighted prediction errors over a
parameter grid (``fit_ppl``) or the absolute auto-prediction error
(``fit_tf``, Takacs-Fiksel estimation with a scalar test function). The
compensator integrals are approximated by a Berman-Turner counting-weight
quadrature over the validation points plus a regular dummy grid.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .core import (
    UNIT_SQUARE,
    PointPattern,
    RngStream,
    Window,
    thin_independent,
)
from .models import IntensityEvaluator, ModelSpec
from .sampling import (
    CvRound,
    McmcConfig,
    cv_block,
    cv_monte_carlo,
    cv_multinomial_kfold,
    grid_partition,
    sample_model,
)


class InconsistentQuadratureError(ValueError):
    """A validation point is missing from the quadrature nodes."""


class NoFeasiblePointError(RuntimeError):
    """Every candidate parameter produced a non-finite objective."""


class DegeneratePatternError(ValueError):
    """The pattern is too small or too dense for the requested operation."""


@dataclass(frozen=True, eq=False)
class QuadratureScheme:
    """Nodes and positive weights summing to the window area.

    The first ``n_data`` nodes are the data/validation points; the remainder
    is the dummy grid.
    """

    nodes: np.ndarray
    weights: np.ndarray
    n_data: int
    window: Window

    def __post_init__(self) -> None:
        nodes = np.asarray(self.nodes, dtype=float).reshape(-1, 2)
        weights = np.asarray(self.weights, dtype=float).ravel()
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        if nodes.shape[0] != weights.shape[0]:
            raise ValueError("nodes and weights must have equal length")
        if not 0 <= self.n_data <= nodes.shape[0]:
            raise ValueError("n_data out of range")
        if np.any(weights <= 0):
            raise ValueError("quadrature weights must be positive")
        area = self.window.area()
        if abs(weights.sum() - area) > 1e-10 * area:
            raise ValueError(
                f"quadrature weights sum to {weights.sum()}, window area {area}"
            )
        inside = (
            (nodes[:, 0] >= self.window.x_min)
            & (nodes[:, 0] <= self.window.x_max)
            & (nodes[:, 1] >= self.window.y_min)
            & (nodes[:, 1] <= self.window.y_max)
        )
        if not inside.all():
            raise ValueError("quadrature nodes must lie inside the window")

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())


def build_quadrature(
    window: Window,
    data_points: PointPattern | None,
    n_dummy_per_axis: int,
) -> QuadratureScheme:
    """Counting-weight quadrature over data points plus a regular dummy grid.

    The window is tiled by the dummy grid; every node in a tile shares the
    tile area equally, so the weights always sum to the window area.
    """
    if n_dummy_per_axis < 1:
        raise ValueError("n_dummy_per_axis must be at least 1")
    n = n_dummy_per_axis
    wx = (window.x_max - window.x_min) / n
    wy = (window.y_max - window.y_min) / n
    centers_x = window.x_min + (np.arange(n) + 0.5) * wx
    centers_y = window.y_min + (np.arange(n) + 0.5) * wy
    gx, gy = np.meshgrid(centers_x, centers_y, indexing="ij")
    dummy = np.column_stack([gx.ravel(), gy.ravel()])

    data = (
        np.empty((0, 2))
        if data_points is None or len(data_points) == 0
        else data_points.coords
    )
    nodes = np.vstack([data, dummy])

    ix = np.clip(((nodes[:, 0] - window.x_min) / wx).astype(int), 0, n - 1)
    iy = np.clip(((nodes[:, 1] - window.y_min) / wy).astype(int), 0, n - 1)
    tile = ix * n + iy
    counts = np.bincount(tile, minlength=n * n)
    weights = (wx * wy) / counts[tile]
    return QuadratureScheme(nodes, weights, data.shape[0], window)


@dataclass(frozen=True)
class TestFunctionSpec:
    """Reciprocal-power test function with optional truncation.

    ``alpha = 0`` is the raw test function, ``alpha = 1`` the
    Stoyan-Grabarnik (inverse) one. With a truncation C the value is capped
    at C, keeping objectives finite on zero-intensity regions.
    """

    alpha: float = 1.0
    truncation: float | None = None

    __test__ = False  # not a pytest class despite the name

    def __post_init__(self) -> None:
        if self.alpha < 0:
            raise ValueError("alpha must be non-negative")
        if self.truncation is not None and self.truncation <= 0:
            raise ValueError("truncation must be positive")


def test_function(tf: TestFunctionSpec, xi_value: float) -> float:
    """Evaluate min(1 / xi^alpha, C) at a single non-negative xi."""
    if xi_value < 0:
        raise ValueError("xi_value must be non-negative")
    return float(_test_values(tf, np.array([xi_value]))[0])


def _test_values(tf: TestFunctionSpec, xi: np.ndarray) -> np.ndarray:
    if tf.alpha == 0.0:
        return np.ones_like(xi)
    with np.errstate(divide="ignore"):
        h = xi ** (-tf.alpha)
    if tf.truncation is not None:
        h = np.minimum(h, tf.truncation)
    return h


def _compensator_values(tf: TestFunctionSpec, xi: np.ndarray) -> np.ndarray:
    """The product h(xi) * xi entering the compensator integral.

    For alpha = 1 the untruncated product is exactly one, including at
    xi = 0 via the 0/0 := 1 convention, which pins the integral to the
    window area.
    """
    if tf.alpha == 0.0:
        return xi
    if tf.alpha == 1.0:
        out = np.ones_like(xi)
        if tf.truncation is not None:
            capped = (xi > 0) & (xi < 1.0 / tf.truncation)
            out[capped] = tf.truncation * xi[capped]
        return out
    out = _test_values(tf, xi) * xi
    zero = xi == 0.0
    if zero.any():
        # below alpha = 1 the product vanishes at 0; above it diverges
        # unless a truncation keeps h finite
        out[zero] = (
            0.0 if (tf.alpha < 1.0 or tf.truncation is not None) else np.inf
        )
    return out


@dataclass(frozen=True)
class WeightScheme:
    """How the weight multiplying the conditional intensity is obtained.

    ``p`` uses the retention probability itself, ``p-over-1mp`` the odds
    p/(1-p), and ``estimate`` a resampling estimate averaged over the window
    from ``k_prime`` re-thinnings of the data.
    """

    kind: str = "p"
    k_prime: int = 25

    KINDS = ("p", "p-over-1mp", "estimate")

    def __post_init__(self) -> None:
        if self.kind not in self.KINDS:
            raise ValueError(f"weight kind must be one of {self.KINDS}")
        if self.k_prime < 1:
            raise ValueError("k_prime must be at least 1")


class _EstimatedWeight:
    """Resampling weight estimate, shared across a parameter grid.

    The data pattern is re-thinned ``k_prime`` times with retention 1 - p to
    mimic training sets; for each the intensity ratio full/thinned is
    averaged (0/0 := 0), then spatially averaged over the quadrature.
    The thinnings are drawn once so every candidate parameter sees the same
    resamples.
    """

    def __init__(
        self,
        pattern: PointPattern,
        p: float,
        k_prime: int,
        quad: QuadratureScheme,
        rng: RngStream,
    ):
        self.p = p
        self.quad_weights = quad.weights
        self.full = IntensityEvaluator(quad.nodes, pattern)
        self.thinned = []
        for i in range(k_prime):
            z, _ = thin_independent(pattern, lambda _: 1.0 - p, rng.child(i))
            self.thinned.append(IntensityEvaluator(quad.nodes, z))

    def value(self, model: ModelSpec) -> float:
        lam_full = self.full.values(model)
        acc = np.zeros_like(lam_full)
        for ev in self.thinned:
            lam_thin = ev.values(model)
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = lam_full / lam_thin
            ratio[lam_full == 0.0] = 0.0
            acc += ratio
        mean_ratio = acc / len(self.thinned)
        return self.p * float(np.average(mean_ratio, weights=self.quad_weights))


def ppl_weight(
    scheme: WeightScheme,
    p: float,
    model: ModelSpec,
    pattern: PointPattern,
    quad: QuadratureScheme,
    rng: RngStream,
) -> float:
    """Weight applied to the conditional intensity when predicting a thinning."""
    if not 0.0 < p < 1.0:
        raise ValueError("retention probability p must lie in (0, 1)")
    if scheme.kind == "p":
        return p
    if scheme.kind == "p-over-1mp":
        return p / (1.0 - p)
    return _EstimatedWeight(pattern, p, scheme.k_prime, quad, rng).value(model)


class _FoldEval:
    """Prediction error of one (training, validation, quadrature) triple.

    For the untruncated inverse test function the compensator integral is
    the total quadrature weight, so intensities are only needed at the
    validation points; otherwise all nodes are evaluated.
    """

    def __init__(
        self,
        training: PointPattern,
        validation: PointPattern,
        quad: QuadratureScheme,
        tf: TestFunctionSpec,
        check_disjoint: bool = True,
    ):
        if check_disjoint:
            overlap = set(training.points) & set(validation.points)
            if overlap:
                raise ValueError(
                    f"training and validation overlap in {len(overlap)} points"
                )
        node_index: dict[tuple[float, float], int] = {}
        for idx, (x, y) in enumerate(quad.nodes):
            node_index.setdefault((x, y), idx)
        val_idx = []
        for point in validation:
            key = (point.x, point.y)
            if key not in node_index:
                raise InconsistentQuadratureError(
                    f"validation point {point} is not a quadrature node"
                )
            val_idx.append(node_index[key])

        self.tf = tf
        self.sg_exact = tf.alpha == 1.0 and tf.truncation is None
        if self.sg_exact:
            self.evaluator = IntensityEvaluator(validation.coords, training)
            self.total_weight = quad.total_weight
        else:
            self.evaluator = IntensityEvaluator(quad.nodes, training)
            mask = np.zeros(quad.nodes.shape[0], dtype=bool)
            mask[val_idx] = True
            self.val_mask = mask
            self.quad_weights = quad.weights

    def error(self, model: ModelSpec, weight: float) -> float:
        xi = weight * self.evaluator.values(model)
        if self.sg_exact:
            return float(_test_values(self.tf, xi).sum() - self.total_weight)
        sum_term = _test_values(self.tf, xi[self.val_mask]).sum()
        integral = self.quad_weights @ _compensator_values(self.tf, xi)
        return float(sum_term - integral)


def prediction_error(
    model: ModelSpec,
    tf: TestFunctionSpec,
    weight: float,
    training: PointPattern,
    validation: PointPattern,
    quad: QuadratureScheme,
) -> float:
    """Weighted prediction error of the validation set given the training set.

    Sums the test function over validation points and subtracts the
    quadrature approximation of the compensator integral of
    h(xi) * xi with xi = weight * conditional_intensity(. | training).
    """
    if weight < 0:
        raise ValueError("weight must be non-negative")
    fold = _FoldEval(training, validation, quad, tf)
    return fold.error(model, weight)


def innovation(
    model: ModelSpec,
    tf: TestFunctionSpec,
    pattern: PointPattern,
    quad: QuadratureScheme,
) -> float:
    """Auto-prediction error: the pattern predicts itself with unit weight.

    Each point is evaluated with itself removed from the conditioning
    pattern; the expectation vanishes at the true parameter.
    """
    fold = _FoldEval(pattern, pattern, quad, tf, check_disjoint=False)
    return fold.error(model, 1.0)


@dataclass(frozen=True)
class LossSpec:
    """Aggregation of fold prediction errors into one objective value."""

    id: str = "l1"
    exclude_empty: bool = True

    IDS = ("l1", "l2", "l3")

    def __post_init__(self) -> None:
        if self.id not in self.IDS:
            raise ValueError(f"loss id must be one of {self.IDS}")


def loss(
    ls: LossSpec,
    errors: Sequence[float],
    fold_nonempty: Sequence[bool],
) -> float:
    """Aggregate fold errors; +inf when every usable fold is excluded.

    l1 and l2 average |error| and error^2; l3 squares the signed mean, so
    errors of opposite sign cancel.
    """
    errs = np.asarray(errors, dtype=float)
    mask = np.asarray(fold_nonempty, dtype=bool)
    if errs.ndim != 1 or errs.shape != mask.shape or errs.size == 0:
        raise ValueError("errors and fold_nonempty must be equal-length, non-empty")
    used = errs[mask] if ls.exclude_empty else errs
    if used.size == 0:
        return math.inf
    if ls.id == "l1":
        return float(np.abs(used).mean())
    if ls.id == "l2":
        return float((used * used).mean())
    return float(used.mean() ** 2)


@dataclass(frozen=True, eq=False)
class ParamGrid:
    """Ordered per-parameter candidate axes; their product is the search set."""

    names: tuple[str, ...]
    axes: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        axes = tuple(np.asarray(a, dtype=float).ravel() for a in self.axes)
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "names", tuple(self.names))
        if len(self.names) != len(axes):
            raise ValueError("one axis per parameter name required")
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate parameter names")
        for name, axis in zip(self.names, axes):
            if axis.size == 0:
                raise ValueError(f"axis {name} is empty")
            if not np.all(np.isfinite(axis)):
                raise ValueError(f"axis {name} has non-finite values")
            if axis.size > 1 and not np.all(np.diff(axis) > 0):
                raise ValueError(f"axis {name} must be strictly increasing")

    @classmethod
    def from_dict(cls, axes: Mapping[str, Sequence[float]]) -> "ParamGrid":
        return cls(tuple(axes.keys()), tuple(np.asarray(v) for v in axes.values()))

    @property
    def size(self) -> int:
        return int(np.prod([a.size for a in self.axes]))

    def thetas(self) -> Iterable[tuple[float, ...]]:
        """Candidate parameter vectors in lexicographic order."""
        return itertools.product(*(a.tolist() for a in self.axes))

    def check_family(self, family: type) -> None:
        if self.names != family.param_names:
            raise ValueError(
                f"grid names {self.names} do not match "
                f"{family.family} parameters {family.param_names}"
            )


def _argmin_first(
    thetas: Iterable[tuple[float, ...]], values: Iterable[float]
) -> tuple[tuple[float, ...], float]:
    best_theta, best_value = None, math.inf
    for theta, value in zip(thetas, values):
        if math.isfinite(value) and value < best_value:
            best_theta, best_value = theta, value
    if best_theta is None:
        raise NoFeasiblePointError("objective non-finite on the whole grid")
    return best_theta, best_value


def grid_search(
    objective: Callable[[tuple[float, ...]], float],
    grid: ParamGrid,
) -> tuple[tuple[float, ...], float]:
    """Exhaustive minimization; ties keep the lexicographically first point."""
    thetas = list(grid.thetas())
    return _argmin_first(thetas, (float(objective(t)) for t in thetas))


@dataclass(frozen=True)
class CvConfig:
    """Cross-validation settings used by the fitting routines."""

    scheme: str = "monte_carlo"  # or "multinomial"
    p: float = 0.5
    k: int = 25

    def __post_init__(self) -> None:
        if self.scheme not in ("monte_carlo", "multinomial"):
            raise ValueError(
                "fitting supports 'monte_carlo' and 'multinomial' splitting"
            )
        if self.scheme == "monte_carlo":
            if not 0.0 < self.p < 1.0:
                raise ValueError("p must lie in (0, 1)")
            if self.k < 1:
                raise ValueError("k must be at least 1")
        elif self.k < 2:
            raise ValueError("multinomial splitting needs k >= 2")

    @property
    def effective_p(self) -> float:
        """Retention probability feeding the weight schemes (1/k for k-fold)."""
        return self.p if self.scheme == "monte_carlo" else 1.0 / self.k


def draw_cv_round(
    pattern: PointPattern, cv: CvConfig, rng: RngStream
) -> CvRound:
    if cv.scheme == "monte_carlo":
        return cv_monte_carlo(pattern, cv.p, cv.k, rng)
    return cv_multinomial_kfold(pattern, cv.k, rng)


def ppl_error_table(
    pattern: PointPattern,
    family: type,
    grid: ParamGrid,
    cvround: CvRound,
    p: float,
    weight_scheme: WeightScheme,
    tf: TestFunctionSpec,
    rng: RngStream,
    n_dummy: int = 32,
) -> tuple[list[tuple[float, ...]], np.ndarray, np.ndarray]:
    """Per-candidate, per-fold prediction errors for one cross-validation round.

    Returns (thetas, errors[n_theta, k], fold_nonempty). Losses are cheap to
    evaluate on top of this table, so one table serves all loss functions.
    """
    grid.check_family(family)
    window = pattern.window
    folds = [
        _FoldEval(
            training,
            validation,
            build_quadrature(window, validation, n_dummy),
            tf,
        )
        for training, validation in cvround.pairs
    ]
    nonempty = np.array(
        [len(tr) > 0 and len(va) > 0 for tr, va in cvround.pairs], dtype=bool
    )

    if weight_scheme.kind == "estimate":
        weight_quad = build_quadrature(window, None, n_dummy)
        estimator = _EstimatedWeight(
            pattern, p, weight_scheme.k_prime, weight_quad, rng
        )
        weight_of = estimator.value
    else:
        const = p if weight_scheme.kind == "p" else p / (1.0 - p)
        weight_of = lambda model: const  # noqa: E731

    thetas = list(grid.thetas())
    errors = np.empty((len(thetas), len(folds)))
    for it, theta in enumerate(thetas):
        model = family(*theta)
        weight = weight_of(model)
        for i, fold in enumerate(folds):
            errors[it, i] = fold.error(model, weight)
    return thetas, errors, nonempty


def fit_ppl(
    pattern: PointPattern,
    family: type,
    grid: ParamGrid,
    cv: CvConfig,
    weight_scheme: WeightScheme,
    tf: TestFunctionSpec,
    loss_spec: LossSpec,
    rng: RngStream,
    n_dummy: int = 32,
) -> ModelSpec:
    """Estimate parameters by minimizing cross-validated prediction errors.

    One cross-validation round is drawn and reused for every candidate
    parameter, keeping the grid objective deterministic given the stream.
    """
    cvround = draw_cv_round(pattern, cv, rng.child(0))
    thetas, errors, nonempty = ppl_error_table(
        pattern,
        family,
        grid,
        cvround,
        cv.effective_p,
        weight_scheme,
        tf,
        rng.child(1),
        n_dummy,
    )
    values = [loss(loss_spec, errors[i], nonempty) for i in range(len(thetas))]
    theta, _ = _argmin_first(thetas, values)
    return family(*theta)


def fit_tf(
    pattern: PointPattern,
    family: type,
    grid: ParamGrid,
    tf: TestFunctionSpec,
    n_dummy: int = 32,
) -> ModelSpec:
    """Takacs-Fiksel estimate: minimize |auto-prediction error| over the grid."""
    grid.check_family(family)
    quad = build_quadrature(pattern.window, pattern, n_dummy)
    fold = _FoldEval(pattern, pattern, quad, tf, check_disjoint=False)

    def objective(theta: tuple[float, ...]) -> float:
        return abs(fold.error(family(*theta), 1.0))

    theta, _ = grid_search(objective, grid)
    return family(*theta)


def hardcore_adaptive_grid(
    pattern: PointPattern, n_values: int, quad: QuadratureScheme
) -> ParamGrid:
    """Data-driven hard-core search grid.

    The exclusion-distance axis spans [R0/2, R0] for the smallest pairwise
    distance R0; the rate axis runs from count/area to count/(area left
    uncovered by R0-balls around the points), the latter estimated from the
    quadrature weights.
    """
    n = len(pattern)
    if n < 2:
        raise DegeneratePatternError("need at least 2 points for the grid")
    coords = pattern.coords
    dx = coords[:, 0:1] - coords[None, :, 0]
    dy = coords[:, 1:2] - coords[None, :, 1]
    d2 = dx * dx + dy * dy
    np.fill_diagonal(d2, np.inf)
    r0 = math.sqrt(d2.min())

    ndx = quad.nodes[:, 0:1] - coords[None, :, 0]
    ndy = quad.nodes[:, 1:2] - coords[None, :, 1]
    node_d2 = (ndx * ndx + ndy * ndy).min(axis=1)
    uncovered = node_d2 > r0 * r0
    reduced_area = float(quad.weights[uncovered].sum())
    if reduced_area <= 0.0:
        raise DegeneratePatternError("balls of radius R0 cover the window")

    area = pattern.window.area()
    beta_axis = np.linspace(n / area, n / reduced_area, n_values)
    r_axis = np.linspace(r0 / 2.0, r0, n_values)
    return ParamGrid(("beta", "R"), (beta_axis, r_axis))


def _block_error(
    model: ModelSpec,
    tf: TestFunctionSpec,
    training: PointPattern,
    validation: PointPattern,
    rect: Window,
    quad: QuadratureScheme,
    window: Window,
) -> float:
    """Prediction error of one block fold with the indicator weight.

    The weight 1{u in block} restricts both terms to the block's quadrature
    nodes; outside the block the estimator vanishes and contributes nothing.
    """
    x, y = quad.nodes[:, 0], quad.nodes[:, 1]
    x_hi = (x < rect.x_max) | ((rect.x_max == window.x_max) & (x == rect.x_max))
    y_hi = (y < rect.y_max) | ((rect.y_max == window.y_max) & (y == rect.y_max))
    in_block = (x >= rect.x_min) & x_hi & (y >= rect.y_min) & y_hi

    nodes = quad.nodes[in_block]
    weights = quad.weights[in_block]
    evaluator = IntensityEvaluator(nodes, training)
    xi = evaluator.values(model)

    node_index = {}
    for idx, (nx, ny) in enumerate(nodes):
        node_index.setdefault((nx, ny), idx)
    val_idx = []
    for point in validation:
        key = (point.x, point.y)
        if key not in node_index:
            raise InconsistentQuadratureError(
                f"validation point {point} missing from block nodes"
            )
        val_idx.append(node_index[key])
    sum_term = _test_values(tf, xi[val_idx]).sum() if val_idx else 0.0
    integral = weights @ _compensator_values(tf, xi)
    return float(sum_term - integral)


def tf_limit_experiment(
    model: ModelSpec,
    tf: TestFunctionSpec,
    k_values: Sequence[int],
    n_reps: int,
    mode: str,
    rng: RngStream,
    window: Window = UNIT_SQUARE,
    mcmc: McmcConfig | None = None,
    n_dummy: int = 32,
) -> list[tuple[int, float]]:
    """Numerically check that aggregated fold errors approach auto-prediction.

    For each replication one pattern is simulated and, per k, the deviation
    D between the (scaled) sum of fold prediction errors and the
    auto-prediction error is computed:

    - ``monte_carlo``: k splits with retention 1/sqrt(k), fold weight
      1/sqrt(k), D = p_k * sum_i I_i - I_auto;
    - ``block``: an m-by-m partition (k = m^2), indicator fold weights,
      D = sum_i I_i - I_auto.

    All folds and the auto-prediction share one quadrature (dummy grid plus
    all data points) so D reflects the splitting scheme, not per-fold
    quadrature differences. Returns (k, median |D|) rows in the given order.
    """
    if mode not in ("monte_carlo", "block"):
        raise ValueError("mode must be 'monte_carlo' or 'block'")
    k_values = [int(k) for k in k_values]
    if mode == "monte_carlo":
        if any(k < 2 for k in k_values):
            raise ValueError("monte_carlo mode needs k >= 2 so 1/sqrt(k) < 1")
    else:
        for k in k_values:
            m = math.isqrt(k)
            if m * m != k:
                raise ValueError(f"block mode needs square k, got {k}")
    mcmc = mcmc or McmcConfig()

    deviations: dict[int, list[float]] = {k: [] for k in k_values}
    for rep in range(n_reps):
        pattern = sample_model(model, window, mcmc, rng.child(rep, 0))
        quad = build_quadrature(window, pattern, n_dummy)
        auto = innovation(model, tf, pattern, quad)
        for j, k in enumerate(k_values):
            if mode == "monte_carlo":
                p_k = 1.0 / math.sqrt(k)
                cvround = cv_monte_carlo(pattern, p_k, k, rng.child(rep, 1 + j))
                total = p_k * sum(
                    prediction_error(model, tf, p_k, training, validation, quad)
                    for training, validation in cvround.pairs
                )
            else:
                partition = grid_partition(window, math.isqrt(k))
                cvround = cv_block(pattern, partition)
                total = sum(
                    _block_error(
                        model, tf, training, validation, rect, quad, window
                    )
                    for (training, validation), rect in zip(
                        cvround.pairs, partition
                    )
                )
            deviations[k].append(abs(total - auto))
    return [(k, float(np.median(deviations[k]))) for k in k_values]
