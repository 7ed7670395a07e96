"""Gibbs model families and their conditional intensities.

Each family is parametrised so that the conditional intensity factors into a
trend term (propensity to place a point at a location in the absence of any
interaction) and an interaction term driven by neighbour counts within a
fixed radius. A zero intensity is represented by a log-interaction of -inf,
which flows through ``exp`` without special-casing.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import ClassVar, Union

import numpy as np

from .core import Point, PointPattern, distance


@dataclass(frozen=True)
class PoissonModel:
    """Inhomogeneous Poisson process with intensity exp(alpha + beta * x)."""

    alpha: float
    beta: float

    family: ClassVar[str] = "poisson"
    param_names: ClassVar[tuple[str, ...]] = ("alpha", "beta")


@dataclass(frozen=True)
class HardCoreModel:
    """Points forbidden within distance R of each other; rate beta elsewhere."""

    beta: float
    R: float

    family: ClassVar[str] = "hardcore"
    param_names: ClassVar[tuple[str, ...]] = ("beta", "R")

    def __post_init__(self) -> None:
        if self.beta <= 0 or self.R <= 0:
            raise ValueError("hard-core model requires beta > 0 and R > 0")


@dataclass(frozen=True)
class StraussModel:
    """Pairwise repulsion: each R-close neighbour scales the rate by gamma."""

    beta: float
    R: float
    gamma: float

    family: ClassVar[str] = "strauss"
    param_names: ClassVar[tuple[str, ...]] = ("beta", "R", "gamma")

    def __post_init__(self) -> None:
        if self.beta <= 0 or self.R <= 0:
            raise ValueError("Strauss model requires beta > 0 and R > 0")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("Strauss interaction gamma must lie in [0, 1]")


@dataclass(frozen=True)
class GeyerModel:
    """Saturation model: per-point neighbour contributions are capped at sat.

    gamma may exceed 1 (clustering) because the saturation keeps the density
    integrable.
    """

    beta: float
    R: float
    gamma: float
    sat: float

    family: ClassVar[str] = "geyer"
    param_names: ClassVar[tuple[str, ...]] = ("beta", "R", "gamma", "sat")

    def __post_init__(self) -> None:
        if self.beta <= 0 or self.R <= 0 or self.gamma <= 0:
            raise ValueError("Geyer model requires beta, R, gamma > 0")
        if self.sat < 0:
            raise ValueError("saturation threshold must be >= 0")


ModelSpec = Union[PoissonModel, HardCoreModel, StraussModel, GeyerModel]

MODEL_FAMILIES: dict[str, type] = {
    cls.family: cls
    for cls in (PoissonModel, HardCoreModel, StraussModel, GeyerModel)
}


def model_to_json(model: ModelSpec) -> str:
    d = {"family": model.family}
    for name in model.param_names:
        d[name] = getattr(model, name)
    return json.dumps(d)


def model_from_dict(d: dict) -> ModelSpec:
    d = dict(d)
    family = d.pop("family", None)
    if family not in MODEL_FAMILIES:
        raise ValueError(f"unknown model family {family!r}")
    cls = MODEL_FAMILIES[family]
    missing = [n for n in cls.param_names if n not in d]
    extra = [n for n in d if n not in cls.param_names]
    if missing or extra:
        raise ValueError(
            f"{family} expects fields {cls.param_names}; "
            f"missing {missing}, unexpected {extra}"
        )
    return cls(**{n: float(d[n]) for n in cls.param_names})


def model_from_json(text: str) -> ModelSpec:
    return model_from_dict(json.loads(text))


def neighbor_count(u: Point, pattern: PointPattern, radius: float) -> int:
    """Number of pattern points within closed distance `radius` of u.

    u itself never counts, even when it coincides with a pattern point.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    n = 0
    for q in pattern:
        if q == u:
            continue
        if distance(u, q) <= radius:
            n += 1
    return n


def log_trend(model: ModelSpec, u: Point) -> float:
    if isinstance(model, PoissonModel):
        return model.alpha + model.beta * u.x
    return math.log(model.beta)


def log_interaction(model: ModelSpec, u: Point, pattern: PointPattern) -> float:
    """Interaction exponent of the conditional intensity at u given `pattern`.

    Returns -inf where the intensity is zero (hard-core exclusion). Evaluates
    the formulas literally on the given pattern; use
    :func:`conditional_intensity` for the convention that a point of the
    pattern is dropped before evaluation.
    """
    if isinstance(model, PoissonModel):
        return 0.0
    if isinstance(model, HardCoreModel):
        blocked = any(distance(u, q) <= model.R for q in pattern)
        return -math.inf if blocked else 0.0
    if isinstance(model, StraussModel):
        close = neighbor_count(u, pattern, model.R)
        if model.gamma == 0.0:
            # gamma**0 := 1, so an isolated location keeps full intensity
            return 0.0 if close == 0 else -math.inf
        return close * math.log(model.gamma)
    if isinstance(model, GeyerModel):
        return math.log(model.gamma) * _geyer_exponent(model, u, pattern)
    raise TypeError(f"unsupported model {model!r}")


def _geyer_exponent(model: GeyerModel, u: Point, pattern: PointPattern) -> float:
    sat, R = model.sat, model.R
    u_in_pattern = any(q == u for q in pattern)
    total = min(sat, neighbor_count(u, pattern, R))
    for y in pattern:
        if y == u or distance(y, u) > R:
            continue
        d_aug = neighbor_count(y, pattern, R) + (0 if u_in_pattern else 1)
        if 1 <= d_aug <= sat:
            total += 1
    return total


def conditional_intensity(
    model: ModelSpec, u: Point, pattern: PointPattern
) -> float:
    """Conditional intensity at u given the rest of the pattern.

    If u coincides with a pattern point it is removed first, so callers never
    pre-remove points.
    """
    ev = IntensityEvaluator(np.array([[u.x, u.y]]), pattern)
    return float(ev.values(model)[0])


def local_stability_bound(model: ModelSpec, u: Point) -> float:
    """Finite upper bound on the conditional intensity at u over all patterns."""
    if isinstance(model, PoissonModel):
        return math.exp(model.alpha + model.beta * u.x)
    if isinstance(model, (HardCoreModel, StraussModel)):
        return model.beta
    # A location gains at most sat from its own capped count and at most
    # 7 * (sat + 1) qualifying neighbours inside its interaction disk (a disk
    # of radius R splits into 7 half-radius disks; sat + 2 points in any one
    # of them would each exceed the saturation budget).
    exponent = 8.0 * model.sat + 7.0
    return model.beta * max(1.0, model.gamma) ** exponent


def is_repulsive(model: ModelSpec) -> bool:
    """Whether adding points can only decrease the conditional intensity."""
    return isinstance(model, (HardCoreModel, StraussModel))


class IntensityEvaluator:
    """Conditional intensities of one conditioning pattern at many locations.

    A node that exactly coincides with a point of the conditioning pattern is
    evaluated with that point removed (Papangelou convention). Interaction
    statistics that depend only on the interaction range are cached, so
    sweeping a parameter grid over the same nodes stays cheap.
    """

    def __init__(self, nodes_xy: np.ndarray, conditioning: PointPattern):
        self.nodes = np.asarray(nodes_xy, dtype=float).reshape(-1, 2)
        self.cond = conditioning.coords
        m, n = self.nodes.shape[0], self.cond.shape[0]
        self._cache: dict = {}
        if n == 0:
            self.d2 = np.empty((m, 0))
            self.match_col = np.full(m, -1)
            self.min_d2 = np.full(m, np.inf)
            return
        dx = self.nodes[:, 0:1] - self.cond[None, :, 0]
        dy = self.nodes[:, 1:2] - self.cond[None, :, 1]
        self.d2 = dx * dx + dy * dy
        exact = (dx == 0.0) & (dy == 0.0)
        self.match_col = np.where(
            exact.any(axis=1), exact.argmax(axis=1), -1
        )
        # Mask the matched column so a node never counts itself as a neighbour.
        self.d2[exact] = np.inf
        self.min_d2 = self.d2.min(axis=1)

    @property
    def n_conditioning(self) -> int:
        return self.cond.shape[0]

    def _strauss_counts(self, R: float) -> np.ndarray:
        key = ("counts", R)
        if key not in self._cache:
            self._cache[key] = (self.d2 <= R * R).sum(axis=1)
        return self._cache[key]

    def _pattern_degrees(self, R: float) -> np.ndarray:
        # Neighbour counts within the conditioning pattern itself.
        key = ("degrees", R)
        if key not in self._cache:
            dx = self.cond[:, 0:1] - self.cond[None, :, 0]
            dy = self.cond[:, 1:2] - self.cond[None, :, 1]
            p2 = dx * dx + dy * dy
            self._cache[key] = (p2 <= R * R).sum(axis=1) - 1  # drop self
        return self._cache[key]

    def _geyer_exponents(self, R: float, sat: float) -> np.ndarray:
        key = ("geyer", R, sat)
        if key not in self._cache:
            close = self.d2 <= R * R
            counts = close.sum(axis=1)
            degrees = self._pattern_degrees(R)
            # Neighbours y of a fresh node gain one neighbour from it, so they
            # qualify when their current degree is <= sat - 1; for a node that
            # is itself a pattern point the degrees already include it.
            sat_fresh = close @ (degrees <= sat - 1).astype(float)
            sat_member = close @ (degrees <= sat).astype(float)
            matched = self.match_col >= 0
            own = np.where(
                matched, degrees[np.maximum(self.match_col, 0)], counts
            )
            exponents = np.minimum(sat, own) + np.where(
                matched, sat_member, sat_fresh
            )
            self._cache[key] = exponents
        return self._cache[key]

    def values(self, model: ModelSpec) -> np.ndarray:
        """Conditional intensity of `model` at every node."""
        if isinstance(model, PoissonModel):
            return np.exp(model.alpha + model.beta * self.nodes[:, 0])
        if self.n_conditioning == 0:
            return np.full(self.nodes.shape[0], model.beta)
        if isinstance(model, HardCoreModel):
            free = self.min_d2 > model.R * model.R
            return np.where(free, model.beta, 0.0)
        if isinstance(model, StraussModel):
            counts = self._strauss_counts(model.R)
            if model.gamma == 0.0:
                return np.where(counts == 0, model.beta, 0.0)
            return model.beta * np.exp(math.log(model.gamma) * counts)
        if isinstance(model, GeyerModel):
            exponents = self._geyer_exponents(model.R, model.sat)
            return model.beta * np.exp(math.log(model.gamma) * exponents)
        raise TypeError(f"unsupported model {model!r}")
