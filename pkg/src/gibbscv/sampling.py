"""Samplers for the model families and cross-validation splitters."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import (
    Point,
    PointPattern,
    RngStream,
    Window,
    half_open_contains,
    thin_independent,
)
from .models import (
    GeyerModel,
    HardCoreModel,
    ModelSpec,
    PoissonModel,
    StraussModel,
)


class EnvelopeViolationError(ValueError):
    """An intensity value exceeded the stated dominating bound."""


class InvalidPartitionError(ValueError):
    """A block partition does not tile the window."""


class InvalidProbabilitiesError(ValueError):
    """Fold probabilities at some point do not sum to one."""


@dataclass(frozen=True)
class McmcConfig:
    """Birth-death Metropolis-Hastings settings.

    ``n_steps`` counts total proposals; the chain state after the last
    proposal is returned, so for a single draw ``burn_in`` is bookkeeping
    (it must stay below ``n_steps`` so the returned state lies past it).
    """

    n_steps: int = 100_000
    burn_in: int = 50_000
    birth_prob: float = 0.5
    initial: str = "empty"  # "empty" or "poisson_seed"

    def __post_init__(self) -> None:
        if self.n_steps <= 0:
            raise ValueError("n_steps must be positive")
        if not 0 <= self.burn_in < self.n_steps:
            raise ValueError("burn_in must satisfy 0 <= burn_in < n_steps")
        if not 0.0 < self.birth_prob < 1.0:
            raise ValueError("birth_prob must lie strictly in (0, 1)")
        if self.initial not in ("empty", "poisson_seed"):
            raise ValueError("initial must be 'empty' or 'poisson_seed'")


def sample_poisson(
    intensity: Callable[[Point], float],
    intensity_max: float,
    window: Window,
    rng: RngStream,
) -> PointPattern:
    """Draw an inhomogeneous Poisson pattern by thinning a dominating process.

    A homogeneous pattern at rate ``intensity_max`` is thinned point by point
    with probability intensity/intensity_max, which preserves the Poisson
    property. Raises :class:`EnvelopeViolationError` if the intensity exceeds
    the envelope anywhere it is evaluated.
    """
    if intensity_max <= 0:
        raise ValueError("intensity_max must be positive")
    gen = rng.generator()
    n_total = gen.poisson(intensity_max * window.area())
    xs = window.x_min + (window.x_max - window.x_min) * gen.random(n_total)
    ys = window.y_min + (window.y_max - window.y_min) * gen.random(n_total)
    uniforms = gen.random(n_total)
    kept = []
    for x, y, u in zip(xs, ys, uniforms):
        value = float(intensity(Point(x, y)))
        if value < 0.0 or value > intensity_max * (1.0 + 1e-12):
            raise EnvelopeViolationError(
                f"intensity {value} at ({x}, {y}) outside [0, {intensity_max}]"
            )
        if u * intensity_max < value:
            kept.append(Point(x, y))
    return PointPattern(tuple(kept), window)


def poisson_intensity(model: PoissonModel) -> Callable[[Point], float]:
    return lambda p: math.exp(model.alpha + model.beta * p.x)


def poisson_intensity_max(model: PoissonModel, window: Window) -> float:
    edge = window.x_max if model.beta >= 0 else window.x_min
    return math.exp(model.alpha + model.beta * edge)


class _Chain:
    """Mutable state of a birth-death chain over one of the model families."""

    def __init__(self, capacity: int = 256):
        self.xs = np.empty(capacity)
        self.ys = np.empty(capacity)
        self.n = 0

    def _grow(self) -> None:
        if self.n == self.xs.shape[0]:
            self.xs = np.concatenate([self.xs, np.empty_like(self.xs)])
            self.ys = np.concatenate([self.ys, np.empty_like(self.ys)])

    def _d2_to(self, x: float, y: float) -> np.ndarray:
        dx = self.xs[: self.n] - x
        dy = self.ys[: self.n] - y
        return dx * dx + dy * dy

    def birth_rate(self, x: float, y: float) -> float:
        raise NotImplementedError

    def death_rate(self, i: int) -> float:
        raise NotImplementedError

    def insert(self, x: float, y: float) -> None:
        self._grow()
        self.xs[self.n] = x
        self.ys[self.n] = y
        self.n += 1

    def remove(self, i: int) -> None:
        last = self.n - 1
        self.xs[i] = self.xs[last]
        self.ys[i] = self.ys[last]
        self.n = last

    def coords(self) -> np.ndarray:
        return np.column_stack([self.xs[: self.n], self.ys[: self.n]])


class _PoissonChain(_Chain):
    def __init__(self, model: PoissonModel):
        super().__init__()
        self.model = model

    def birth_rate(self, x: float, y: float) -> float:
        return math.exp(self.model.alpha + self.model.beta * x)

    def death_rate(self, i: int) -> float:
        return math.exp(self.model.alpha + self.model.beta * self.xs[i])


class _HardCoreChain(_Chain):
    def __init__(self, model: HardCoreModel):
        super().__init__()
        self.beta = model.beta
        self.r2 = model.R * model.R

    def birth_rate(self, x: float, y: float) -> float:
        if self.n and (self._d2_to(x, y) <= self.r2).any():
            return 0.0
        return self.beta

    def death_rate(self, i: int) -> float:
        d2 = self._d2_to(self.xs[i], self.ys[i])
        # self-distance is 0, so more than one hit means a true neighbour
        return 0.0 if (d2 <= self.r2).sum() > 1 else self.beta


class _StraussChain(_Chain):
    def __init__(self, model: StraussModel):
        super().__init__()
        self.beta = model.beta
        self.r2 = model.R * model.R
        self.log_gamma = math.log(model.gamma) if model.gamma > 0 else None

    def _rate(self, close: int) -> float:
        if self.log_gamma is None:
            return self.beta if close == 0 else 0.0
        return self.beta * math.exp(self.log_gamma * close)

    def birth_rate(self, x: float, y: float) -> float:
        close = int((self._d2_to(x, y) <= self.r2).sum()) if self.n else 0
        return self._rate(close)

    def death_rate(self, i: int) -> float:
        close = int((self._d2_to(self.xs[i], self.ys[i]) <= self.r2).sum()) - 1
        return self._rate(close)


class _GeyerChain(_Chain):
    """Maintains per-point neighbour counts so each proposal stays O(n)."""

    def __init__(self, model: GeyerModel):
        super().__init__()
        self.beta = model.beta
        self.r2 = model.R * model.R
        self.log_gamma = math.log(model.gamma)
        self.sat = model.sat
        self.deg = np.zeros(self.xs.shape[0], dtype=np.int64)
        self._mask = None  # neighbour mask from the latest rate call

    def _grow(self) -> None:
        if self.n == self.xs.shape[0]:
            self.deg = np.concatenate([self.deg, np.zeros_like(self.deg)])
        super()._grow()

    def birth_rate(self, x: float, y: float) -> float:
        close = self._d2_to(x, y) <= self.r2
        self._mask = close
        count = int(close.sum())
        # a new neighbour raises each qualifying point's count by one
        gained = int((self.deg[: self.n][close] <= self.sat - 1).sum())
        exponent = min(self.sat, count) + gained
        return self.beta * math.exp(self.log_gamma * exponent)

    def insert(self, x: float, y: float) -> None:
        close, count = self._mask, int(self._mask.sum())
        super().insert(x, y)
        self.deg[: self.n - 1][close] += 1
        self.deg[self.n - 1] = count

    def death_rate(self, i: int) -> float:
        close = self._d2_to(self.xs[i], self.ys[i]) <= self.r2
        close[i] = False
        self._mask = close
        kept = int((self.deg[: self.n][close] <= self.sat).sum())
        exponent = min(self.sat, int(self.deg[i])) + kept
        return self.beta * math.exp(self.log_gamma * exponent)

    def remove(self, i: int) -> None:
        self.deg[: self.n][self._mask] -= 1
        last = self.n - 1
        self.deg[i] = self.deg[last]
        super().remove(i)


def _make_chain(model: ModelSpec) -> _Chain:
    if isinstance(model, PoissonModel):
        return _PoissonChain(model)
    if isinstance(model, HardCoreModel):
        return _HardCoreChain(model)
    if isinstance(model, StraussModel):
        return _StraussChain(model)
    if isinstance(model, GeyerModel):
        return _GeyerChain(model)
    raise TypeError(f"unsupported model {model!r}")


def sample_gibbs(
    model: ModelSpec,
    window: Window,
    cfg: McmcConfig,
    rng: RngStream,
) -> PointPattern:
    """Approximate draw from a locally stable Gibbs model.

    Runs a birth-death Metropolis-Hastings chain whose acceptance ratios only
    involve the conditional intensity: a uniform birth proposal u is accepted
    with probability min(1, lambda(u|x) |S| (1-b) / (b (n+1))) and a uniform
    death of x_i with min(1, n b / ((1-b) lambda(x_i|x\\{x_i}) |S|)), where b
    is the birth proposal probability. Zero-intensity states are never
    entered by births and are always left by deaths.
    """
    gen = rng.generator()
    area = window.area()
    wx, wy = window.x_max - window.x_min, window.y_max - window.y_min
    b = cfg.birth_prob
    birth_factor = (1.0 - b) / b
    death_factor = b / (1.0 - b)

    chain = _make_chain(model)
    if cfg.initial == "poisson_seed":
        rate = (
            math.exp(model.alpha)
            if isinstance(model, PoissonModel)
            else model.beta
        )
        n_seed = gen.poisson(rate * area)
        sx = window.x_min + wx * gen.random(n_seed)
        sy = window.y_min + wy * gen.random(n_seed)
        for x, y in zip(sx, sy):
            # keep only seed points the current state allows
            if chain.birth_rate(x, y) > 0.0:
                chain.insert(x, y)

    remaining = cfg.n_steps
    block = 8192
    while remaining > 0:
        m = min(block, remaining)
        remaining -= m
        u = gen.random((m, 5))
        for j in range(m):
            if u[j, 0] < b:
                x = window.x_min + wx * u[j, 1]
                y = window.y_min + wy * u[j, 2]
                rate = chain.birth_rate(x, y)
                if rate > 0.0 and u[j, 3] * (chain.n + 1) < (
                    rate * area * birth_factor
                ):
                    chain.insert(x, y)
            elif chain.n > 0:
                i = min(int(u[j, 4] * chain.n), chain.n - 1)
                rate = chain.death_rate(i)
                if u[j, 3] * rate * area < chain.n * death_factor:
                    chain.remove(i)
    return PointPattern.from_coords(chain.coords(), window)


def sample_model(
    model: ModelSpec,
    window: Window,
    cfg: McmcConfig,
    rng: RngStream,
) -> PointPattern:
    """Draw one realization: direct sampling for Poisson, MCMC otherwise."""
    if isinstance(model, PoissonModel):
        return sample_poisson(
            poisson_intensity(model),
            poisson_intensity_max(model, window),
            window,
            rng,
        )
    return sample_gibbs(model, window, cfg, rng)


@dataclass(frozen=True)
class CvRound:
    """k training/validation pairs plus the scheme that produced them."""

    pairs: tuple[tuple[PointPattern, PointPattern], ...]
    scheme: str
    k: int
    p: float | None = None
    partition: tuple[Window, ...] | None = None


def cv_monte_carlo(
    pattern: PointPattern, p: float, k: int, rng: RngStream
) -> CvRound:
    """k independent splits, each retaining points for validation w.p. p.

    Validation sets of different folds may overlap.
    """
    if not 0.0 < p < 1.0:
        raise ValueError("retention probability p must lie in (0, 1)")
    if k < 1:
        raise ValueError("k must be at least 1")
    pairs = []
    for i in range(k):
        validation, training = thin_independent(
            pattern, lambda _: p, rng.child(i)
        )
        pairs.append((training, validation))
    return CvRound(tuple(pairs), "monte_carlo", k, p=p)


def cv_multinomial_kfold(
    pattern: PointPattern, k: int, rng: RngStream
) -> CvRound:
    """Each point gets a uniform fold label; validation sets partition x."""
    if k < 2:
        raise ValueError("k-fold splitting needs k >= 2")
    labels = rng.generator().integers(0, k, size=len(pattern))
    return CvRound(_pairs_from_labels(pattern, labels, k), "multinomial", k)


def _pairs_from_labels(
    pattern: PointPattern, labels: np.ndarray, k: int
) -> tuple:
    pairs = []
    for fold in range(k):
        val_idx = [i for i, lab in enumerate(labels) if lab == fold]
        train_idx = [i for i, lab in enumerate(labels) if lab != fold]
        pairs.append((pattern.subset(train_idx), pattern.subset(val_idx)))
    return tuple(pairs)


def cv_block(pattern: PointPattern, partition: Sequence[Window]) -> CvRound:
    """Deterministic split by a rectangle partition of the window.

    Boundary points follow the left/bottom-closed tie rule, so each point
    lands in exactly one block.
    """
    window = pattern.window
    rects = tuple(partition)
    if not rects:
        raise InvalidPartitionError("empty partition")
    total = sum(r.area() for r in rects)
    if abs(total - window.area()) > 1e-9 * window.area():
        raise InvalidPartitionError(
            f"partition area {total} does not match window area {window.area()}"
        )
    for a in rects:
        if (
            a.x_min < window.x_min
            or a.x_max > window.x_max
            or a.y_min < window.y_min
            or a.y_max > window.y_max
        ):
            raise InvalidPartitionError(f"rectangle {a} exceeds the window")
    for i, a in enumerate(rects):
        for b in rects[i + 1 :]:
            if (
                a.x_min < b.x_max
                and b.x_min < a.x_max
                and a.y_min < b.y_max
                and b.y_min < a.y_max
            ):
                raise InvalidPartitionError(f"rectangles {a} and {b} overlap")

    labels = np.empty(len(pattern), dtype=np.int64)
    for ip, point in enumerate(pattern):
        hits = [
            j
            for j, rect in enumerate(rects)
            if half_open_contains(rect, window, point.x, point.y)
        ]
        if len(hits) != 1:
            raise InvalidPartitionError(
                f"point {point} covered by {len(hits)} blocks"
            )
        labels[ip] = hits[0]
    pairs = _pairs_from_labels(pattern, labels, len(rects))
    return CvRound(pairs, "block", len(rects), partition=rects)


def grid_partition(window: Window, m: int) -> tuple[Window, ...]:
    """Partition the window into an m-by-m grid of equal rectangles."""
    if m < 1:
        raise ValueError("m must be at least 1")
    xs = np.linspace(window.x_min, window.x_max, m + 1)
    ys = np.linspace(window.y_min, window.y_max, m + 1)
    return tuple(
        Window(xs[i], xs[i + 1], ys[j], ys[j + 1])
        for j in range(m)
        for i in range(m)
    )


def cv_generalized_multinomial(
    pattern: PointPattern,
    prob_fns: Sequence[Callable[[Point], float]],
    rng: RngStream,
) -> CvRound:
    """Fold labels drawn per point from location-dependent probabilities.

    The k probabilities must sum to one at every point of the pattern
    (tolerance 1e-9); constant 1/k functions reduce to multinomial k-fold
    splitting and indicator functions of a partition reduce to block
    splitting.
    """
    k = len(prob_fns)
    if k < 2:
        raise ValueError("need at least two fold probability functions")
    uniforms = rng.generator().random(len(pattern))
    labels = np.empty(len(pattern), dtype=np.int64)
    for ip, point in enumerate(pattern):
        probs = [float(f(point)) for f in prob_fns]
        if any(q < -1e-12 or q > 1.0 + 1e-12 for q in probs):
            raise InvalidProbabilitiesError(
                f"probability outside [0, 1] at {point}: {probs}"
            )
        if abs(sum(probs) - 1.0) > 1e-9:
            raise InvalidProbabilitiesError(
                f"fold probabilities at {point} sum to {sum(probs)}, not 1"
            )
        acc, label = 0.0, k - 1
        for j, q in enumerate(probs):
            acc += q
            if uniforms[ip] < acc:
                label = j
                break
        labels[ip] = label
    return CvRound(
        _pairs_from_labels(pattern, labels, k), "generalized_multinomial", k
    )
