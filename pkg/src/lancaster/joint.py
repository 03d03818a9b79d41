"""Finite joint probability tables."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .errors import DegenerateMarginal

MASS_TOL = 1e-12


@dataclass(frozen=True)
class DiscreteJoint:
    """Joint law of ``(X, Y)`` on ``x_support x y_support``.

    ``P[a, b] = Pr(X = x_support[a], Y = y_support[b])``.  Marginals are
    derived from ``P``, so row and column sums match by construction.
    ``mass_stderr`` is set when ``P`` was estimated by Monte Carlo.
    """

    P: np.ndarray
    x_support: np.ndarray
    y_support: np.ndarray
    mass_deficit: float = 0.0
    mass_stderr: float | None = None

    def __post_init__(self):
        P = np.asarray(self.P, dtype=float)
        xs = np.asarray(self.x_support, dtype=float)
        ys = np.asarray(self.y_support, dtype=float)
        if P.ndim != 2 or P.shape != (xs.size, ys.size):
            raise ValueError(f"P has shape {P.shape}, supports {xs.size} x {ys.size}")
        if np.any(P < 0):
            raise ValueError("negative probability in joint table")
        total = float(P.sum())
        tol = MASS_TOL if self.mass_stderr is None else max(MASS_TOL, 10 * self.mass_stderr)
        if abs(total - 1.0) > max(tol, self.mass_deficit + MASS_TOL):
            raise ValueError(f"joint mass {total!r} differs from 1")
        if np.count_nonzero(P.sum(axis=1) > 0) < 2 or np.count_nonzero(P.sum(axis=0) > 0) < 2:
            raise DegenerateMarginal("each marginal needs at least two support points")
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "x_support", xs)
        object.__setattr__(self, "y_support", ys)

    @property
    def px(self) -> np.ndarray:
        return self.P.sum(axis=1)

    @property
    def py(self) -> np.ndarray:
        return self.P.sum(axis=0)

    @property
    def shape(self) -> tuple[int, int]:
        return self.P.shape

    def restricted(self) -> "DiscreteJoint":
        """Drop support points that carry no mass."""
        rows = self.px > 0
        cols = self.py > 0
        if rows.all() and cols.all():
            return self
        return DiscreteJoint(
            self.P[np.ix_(rows, cols)], self.x_support[rows], self.y_support[cols],
            self.mass_deficit, self.mass_stderr,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "x_support": self.x_support.tolist(),
            "y_support": self.y_support.tolist(),
            "P": self.P.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "DiscreteJoint":
        xs = doc["x_support"]
        ys = doc["y_support"]
        P = np.asarray(doc["P"], dtype=float)
        if P.ndim == 1:
            P = P.reshape(len(xs), len(ys))
        return cls(P, np.asarray(xs, dtype=float), np.asarray(ys, dtype=float))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "DiscreteJoint":
        return cls.from_dict(json.loads(text))


def product_joint(px: Sequence[float], py: Sequence[float], x_support=None, y_support=None) -> DiscreteJoint:
    px = np.asarray(px, dtype=float)
    py = np.asarray(py, dtype=float)
    xs = np.arange(px.size) if x_support is None else x_support
    ys = np.arange(py.size) if y_support is None else y_support
    return DiscreteJoint(np.outer(px, py), xs, ys)
