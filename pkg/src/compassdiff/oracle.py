"""Oracle and result types shared across the library.

A :class:`DirectionalOracle` bundles a scalar function with an evaluator of
its one-sided directional derivatives.  Everything downstream (compass
differences, ODE sensitivities, optimal-value probing) consumes this
interface and nothing else, so any way of producing directional derivatives
(expression trees, hand-coded closures, auxiliary ODE solves) plugs in
uniformly.

All types here are immutable after construction and safe for concurrent
read-only use.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

#: Membership guarantee labels.  A compass difference is a Clarke subgradient
#: for functions of one or two variables; for three or more variables it is
#: still well defined but carries no membership guarantee (and the built-in
#: three-variable demo refutes it).
GUARANTEED = "guaranteed"
UNGUARANTEED = "unguaranteed"


def guarantee_for_dim(dim: int) -> str:
    return GUARANTEED if dim <= 2 else UNGUARANTEED


class OracleError(RuntimeError):
    """An oracle evaluation failed or returned a non-finite value.

    ``direction`` carries the probe direction that triggered the failure,
    when one is known.
    """

    def __init__(self, message: str, direction: Optional[np.ndarray] = None):
        super().__init__(message)
        self.direction = None if direction is None else np.asarray(direction, dtype=float)


@dataclass(frozen=True)
class DirectionalOracle:
    """A scalar function together with its directional-derivative evaluator.

    ``value(x)`` returns f(x); ``dir_deriv(x, d)`` returns the one-sided
    directional derivative f'(x; d).  The caller promises that directional
    derivatives exist at queried points; oracles that cannot honour a query
    should raise (e.g. :class:`OracleError`) rather than guess.
    """

    value: Callable[[np.ndarray], float]
    dir_deriv: Callable[[np.ndarray, np.ndarray], float]
    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"oracle dimension must be positive, got {self.dim}")


@dataclass(frozen=True)
class VectorOracle:
    """Vector-valued analogue of :class:`DirectionalOracle`.

    Used for ODE right-hand sides f: R^n -> R^n and initial-condition maps
    x0: R^2 -> R^n; ``dir_deriv(x, d)`` returns the componentwise one-sided
    directional derivative.
    """

    value: Callable[[np.ndarray], np.ndarray]
    dir_deriv: Callable[[np.ndarray, np.ndarray], np.ndarray]
    dim_in: int
    dim_out: int


@dataclass(frozen=True)
class Probe:
    """One directional-derivative evaluation: the direction and its value."""

    direction: np.ndarray
    value: float


@dataclass(frozen=True)
class CompassResult:
    """A subgradient candidate plus the probe provenance that produced it.

    ``probes`` holds the 2n directional-derivative evaluations in the fixed
    order (+v1, -v1, +v2, -v2, ...), one pair per basis column.  ``basis`` is
    the matrix whose columns were probed (the identity for a plain compass
    difference).  ``guarantee`` states whether the result is guaranteed to be
    a Clarke subgradient (dimensions one and two) or merely computed
    (dimension three and up).
    """

    subgradient: np.ndarray
    probes: tuple[Probe, ...]
    basis: Optional[np.ndarray]
    guarantee: str

    @property
    def dim(self) -> int:
        return self.subgradient.shape[0]

    def recompute_subgradient(self) -> np.ndarray:
        """Re-derive the subgradient from the stored probes and basis.

        Performs bit-for-bit the same arithmetic as the original evaluation,
        so the result reproduces ``subgradient`` exactly.
        """
        n = self.dim
        if len(self.probes) != 2 * n:
            raise ValueError(f"expected {2 * n} probes, found {len(self.probes)}")
        half = np.empty(n)
        for i in range(n):
            half[i] = 0.5 * (self.probes[2 * i].value - self.probes[2 * i + 1].value)
        if self.basis is None or np.array_equal(self.basis, np.eye(n)):
            return half
        return np.linalg.solve(self.basis.T, half)

    def to_json_dict(self) -> dict:
        return {
            "subgradient": self.subgradient.tolist(),
            "probes": [
                {"direction": p.direction.tolist(), "value": p.value} for p in self.probes
            ],
            "basis": None if self.basis is None else self.basis.tolist(),
            "guarantee": self.guarantee,
        }


@dataclass(frozen=True)
class UnivariateClarkeInterval:
    """The full Clarke generalized gradient of a univariate function, [lo, hi]."""

    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError(f"interval endpoints out of order: [{self.lo}, {self.hi}]")

    def contains(self, s: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= s <= self.hi + tol
