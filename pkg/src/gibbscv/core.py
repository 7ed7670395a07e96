"""Windows, point patterns, seeded random streams and independent thinning."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Callable, Iterator, NamedTuple, Sequence

import numpy as np


class InvalidRetentionError(ValueError):
    """A retention probability fell outside [0, 1]."""


class Point(NamedTuple):
    x: float
    y: float


def distance(a: Point, b: Point) -> float:
    """Euclidean distance between two points."""
    return math.hypot(a.x - b.x, a.y - b.y)


@dataclass(frozen=True)
class Window:
    """Axis-aligned rectangular observation window."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float

    def __post_init__(self) -> None:
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError("window requires x_min < x_max and y_min < y_max")

    def area(self) -> float:
        return (self.x_max - self.x_min) * (self.y_max - self.y_min)

    def contains(self, p: Point) -> bool:
        return (
            self.x_min <= p.x <= self.x_max and self.y_min <= p.y <= self.y_max
        )

    def to_dict(self) -> dict:
        return {
            "x_min": self.x_min,
            "x_max": self.x_max,
            "y_min": self.y_min,
            "y_max": self.y_max,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Window":
        return cls(d["x_min"], d["x_max"], d["y_min"], d["y_max"])


UNIT_SQUARE = Window(0.0, 1.0, 0.0, 1.0)


def half_open_contains(rect: Window, outer: Window, x: float, y: float) -> bool:
    """Membership in `rect` under the left/bottom-closed tie rule.

    Right/top edges are open unless they coincide with the enclosing window's
    boundary, so rectangles tiling `outer` assign every location to exactly
    one tile.
    """
    x_hi = x < rect.x_max or (rect.x_max == outer.x_max and x == rect.x_max)
    y_hi = y < rect.y_max or (rect.y_max == outer.y_max and y == rect.y_max)
    return rect.x_min <= x and x_hi and rect.y_min <= y and y_hi


@dataclass(frozen=True)
class PointPattern:
    """Finite collection of distinct points inside a window.

    Points are stored in a fixed order so that index-based subsetting (used
    by the thinning/cross-validation machinery) preserves point identity.
    """

    points: tuple[Point, ...]
    window: Window

    def __post_init__(self) -> None:
        pts = tuple(Point(float(p[0]), float(p[1])) for p in self.points)
        object.__setattr__(self, "points", pts)
        seen = set()
        for p in pts:
            if not (math.isfinite(p.x) and math.isfinite(p.y)):
                raise ValueError(f"non-finite coordinate {p}")
            if not self.window.contains(p):
                raise ValueError(f"point {p} outside window {self.window}")
            if p in seen:
                raise ValueError(f"duplicate point {p}")
            seen.add(p)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[Point]:
        return iter(self.points)

    @cached_property
    def coords(self) -> np.ndarray:
        """Coordinates as an (n, 2) float array."""
        if not self.points:
            return np.empty((0, 2), dtype=float)
        return np.asarray(self.points, dtype=float)

    def subset(self, indices: Sequence[int]) -> "PointPattern":
        return PointPattern(tuple(self.points[i] for i in indices), self.window)

    @classmethod
    def from_coords(cls, coords: np.ndarray, window: Window) -> "PointPattern":
        coords = np.asarray(coords, dtype=float).reshape(-1, 2)
        return cls(tuple(Point(x, y) for x, y in coords), window)

    @classmethod
    def empty(cls, window: Window) -> "PointPattern":
        return cls((), window)


@dataclass(frozen=True)
class RngStream:
    """Root seed plus a path of child-stream indices.

    Identical (seed, stream) values reproduce the same draw sequence;
    distinct paths give statistically independent streams, so replication i
    and fold j can each derive their own stream without coordination.
    """

    seed: int
    stream: tuple[int, ...] = ()

    def child(self, *indices: int) -> "RngStream":
        if any(i < 0 for i in indices):
            raise ValueError("stream indices must be non-negative")
        return RngStream(self.seed, self.stream + tuple(indices))

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(
            np.random.SeedSequence(self.seed, spawn_key=self.stream)
        )


def thin_independent(
    pattern: PointPattern,
    retention: Callable[[Point], float],
    rng: RngStream,
) -> tuple[PointPattern, PointPattern]:
    """Split a pattern by independent thinning.

    Each point enters the first returned pattern (the retained/validation
    part) independently with probability ``retention(point)``; the second
    returned pattern is the complement. The two outputs always partition the
    input exactly.
    """
    uniforms = rng.generator().random(len(pattern))
    retained, removed = [], []
    for i, p in enumerate(pattern.points):
        prob = float(retention(p))
        if not 0.0 <= prob <= 1.0:
            raise InvalidRetentionError(
                f"retention({p}) = {prob} outside [0, 1]"
            )
        (retained if uniforms[i] < prob else removed).append(i)
    return pattern.subset(retained), pattern.subset(removed)


def save_pattern(pattern: PointPattern, csv_path: str | Path) -> None:
    """Write a pattern as `x,y` CSV plus a `.window.json` sidecar."""
    csv_path = Path(csv_path)
    lines = ["x,y"] + [f"{p.x!r},{p.y!r}" for p in pattern.points]
    csv_path.write_text("\n".join(lines) + "\n")
    sidecar = csv_path.with_suffix(".window.json")
    sidecar.write_text(json.dumps(pattern.window.to_dict()) + "\n")


def load_pattern(
    csv_path: str | Path, window: Window | None = None
) -> PointPattern:
    """Read a pattern written by :func:`save_pattern`.

    The window comes from the `.window.json` sidecar unless given explicitly.
    """
    csv_path = Path(csv_path)
    if window is None:
        sidecar = csv_path.with_suffix(".window.json")
        if not sidecar.exists():
            raise FileNotFoundError(
                f"no window given and sidecar {sidecar} not found"
            )
        window = Window.from_dict(json.loads(sidecar.read_text()))
    points = []
    lines = csv_path.read_text().strip().splitlines()
    if not lines or lines[0].strip().lower() != "x,y":
        raise ValueError(f"{csv_path}: expected header 'x,y'")
    for line in lines[1:]:
        xs, ys = line.split(",")
        points.append(Point(float(xs), float(ys)))
    return PointPattern(tuple(points), window)
