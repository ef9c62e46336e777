"""Basis functions for the density ratio model.

The density ratio between the two populations is modelled as
exp(theta' q(x)) where q(x) is a prespecified vector of transforms whose
first component is always the constant 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError

__all__ = ["BasisSpec", "evaluate", "evaluate_matrix"]


@dataclass(frozen=True)
class BasisSpec:
    """A basis q(x) = (1, t_1(x), ..., t_{d-1}(x)).

    Use the factory methods (:meth:`linear`, :meth:`quadratic`,
    :meth:`linear_log`, :meth:`custom`) rather than the constructor.
    """

    kind: str
    transforms: tuple = field(default=(), repr=False)

    @classmethod
    def linear(cls) -> "BasisSpec":
        """q(x) = (1, x)."""
        return cls(kind="linear")

    @classmethod
    def quadratic(cls) -> "BasisSpec":
        """q(x) = (1, x, x^2)."""
        return cls(kind="quadratic")

    @classmethod
    def linear_log(cls) -> "BasisSpec":
        """q(x) = (1, x, log x); requires x > 0."""
        return cls(kind="linear-log")

    @classmethod
    def custom(cls, transforms: Sequence[Callable[[np.ndarray], np.ndarray]]) -> "BasisSpec":
        """q(x) = (1, t_1(x), ...) for user-supplied vectorized transforms."""
        transforms = tuple(transforms)
        if not transforms:
            raise ValueError("custom basis needs at least one transform")
        return cls(kind="custom", transforms=transforms)

    @classmethod
    def from_name(cls, name: str) -> "BasisSpec":
        table = {
            "linear": cls.linear,
            "quadratic": cls.quadratic,
            "linear-log": cls.linear_log,
        }
        try:
            return table[name]()
        except KeyError:
            raise ValueError(f"unknown basis name {name!r}") from None

    @property
    def dimension(self) -> int:
        """Total length of q(x), constant included."""
        if self.kind == "linear":
            return 2
        if self.kind in ("quadratic", "linear-log"):
            return 3
        if self.kind == "custom":
            return 1 + len(self.transforms)
        raise ValueError(f"unknown basis kind {self.kind!r}")


def evaluate_matrix(spec: BasisSpec, xs) -> np.ndarray:
    """Row i is q(xs[i]); shape (n, spec.dimension).

    Raises :class:`DomainError` naming the first offending index when a
    transform is undefined at some xs[i].
    """
    x = np.asarray(xs, dtype=float)
    if x.ndim != 1:
        x = x.ravel()
    n = x.size
    ones = np.ones(n)

    if spec.kind == "linear":
        return np.column_stack([ones, x])
    if spec.kind == "quadratic":
        return np.column_stack([ones, x, x * x])
    if spec.kind == "linear-log":
        bad = np.flatnonzero(~(x > 0))
        if bad.size:
            i = int(bad[0])
            raise DomainError(f"log undefined at index {i} (x={x[i]!r})", index=i)
        return np.column_stack([ones, x, np.log(x)])
    if spec.kind == "custom":
        cols = [ones]
        for t in spec.transforms:
            with np.errstate(all="ignore"):
                col = np.asarray(t(x), dtype=float)
            bad = np.flatnonzero(~np.isfinite(col))
            if bad.size:
                i = int(bad[0])
                raise DomainError(
                    f"custom transform undefined at index {i} (x={x[i]!r})", index=i
                )
            cols.append(col)
        return np.column_stack(cols)
    raise ValueError(f"unknown basis kind {spec.kind!r}")


def evaluate(spec: BasisSpec, x: float) -> np.ndarray:
    """q(x) for a single point; first component is exactly 1."""
    return evaluate_matrix(spec, np.array([float(x)]))[0]
