"""Support-function probing of compact convex sets.

A compact convex set is presented only through its support function
sigma(d) = max{<d, x> : x in C}.  Probing sigma in the 2n coordinate
directions yields the set's interval hull; in two dimensions the hull's
midpoint is guaranteed to belong to the set, which locates an element with
four support evaluations.  Three evaluations are never enough, and the
guarantee fails in three dimensions; both facts are reproducible here
(:func:`three_probe_ambiguity` and the bundled three-dimensional polytopes).
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .oracle import GUARANTEED, UNGUARANTEED
from .sampling import unit_directions


@dataclass(frozen=True)
class SupportOracle:
    """Evaluator of a compact convex set's support function."""

    dim: int
    sigma: Callable[[np.ndarray], float]
    description: str = ""

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("support oracle dimension must be positive")


@dataclass(frozen=True)
class IntervalHull:
    """Smallest axis-aligned box containing the set: lower <= x <= upper."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if lower.shape != upper.shape or np.any(lower > upper):
            raise ValueError("interval hull bounds out of order")

    @property
    def midpoint(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)


@dataclass(frozen=True)
class MidpointResult:
    point: np.ndarray
    guarantee: str
    hull: IntervalHull


@dataclass(frozen=True)
class MembershipReport:
    member: bool
    witness: Optional[np.ndarray]   # separating direction when member is False
    max_gap: float                  # largest <d, p> - sigma(d) seen
    n_directions: int

    def message(self) -> str:
        if self.member:
            return f"no separation found among {self.n_directions} directions"
        return f"separated by direction {self.witness.tolist()} with gap {self.max_gap:.6g}"


@dataclass(frozen=True)
class AmbiguityCertificate:
    """Three support probes admit three mutually exclusive consistent sets.

    ``vertices`` are the corners of the triangle cut out by the probe
    half-planes; ``edges`` are its three sides, each a compact convex set
    reproducing all three probed support values; their triple intersection is
    empty, so the probes cannot pin down a set element.
    """

    probes: np.ndarray              # (3, 2)
    vertices: np.ndarray            # (3, 2): a, b, c
    edges: tuple                    # three (2, 2) arrays: conv{a,b}, conv{b,c}, conv{a,c}
    support_values: np.ndarray      # (3 edges, 3 probes)
    max_support_error: float
    intersection_empty: bool
    passed: bool

    def to_json_dict(self) -> dict:
        return {
            "probes": self.probes.tolist(),
            "vertices": self.vertices.tolist(),
            "edges": [e.tolist() for e in self.edges],
            "support_values": self.support_values.tolist(),
            "max_support_error": self.max_support_error,
            "intersection_empty": self.intersection_empty,
            "passed": self.passed,
        }


def polytope_support(vertices, description: str = "") -> SupportOracle:
    """Support oracle of the convex hull of finitely many points."""
    v = np.atleast_2d(np.asarray(vertices, dtype=float))
    if v.size == 0:
        raise ValueError("vertex list must not be empty")
    dim = v.shape[1]

    def sigma(d):
        d = np.asarray(d, dtype=float)
        if d.size != dim:
            raise ValueError(f"direction dimension {d.size} does not match polytope ({dim})")
        return float(np.max(v @ d))

    return SupportOracle(dim=dim, sigma=sigma, description=description or f"polytope with {v.shape[0]} vertices")


def ball_support(radius: float = 1.0, dim: int = 2) -> SupportOracle:
    def sigma(d):
        return radius * float(np.linalg.norm(d))

    return SupportOracle(dim=dim, sigma=sigma, description=f"ball of radius {radius}")


def load_polytope_json(source) -> SupportOracle:
    """Load a polytope oracle from ``{"dim": n, "vertices": [[...], ...]}``."""
    if isinstance(source, (str, os.PathLike)):
        with open(source) as fh:
            data = json.load(fh)
    else:
        data = source
    if "vertices" not in data:
        raise ValueError("polytope JSON needs a 'vertices' field")
    vertices = np.asarray(data["vertices"], dtype=float)
    dim = int(data.get("dim", vertices.shape[1]))
    if vertices.ndim != 2 or vertices.shape[1] != dim:
        raise ValueError(f"vertices must be a list of {dim}-dimensional points")
    return polytope_support(vertices, description=data.get("description", ""))


def interval_hull(oracle: SupportOracle) -> IntervalHull:
    """Interval hull from 2 * dim support evaluations.

    lower_i = -sigma(-e_i) and upper_i = sigma(e_i).
    """
    n = oracle.dim
    lower = np.empty(n)
    upper = np.empty(n)
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        hi = float(oracle.sigma(e))
        lo = -float(oracle.sigma(-e))
        if not (math.isfinite(hi) and math.isfinite(lo)):
            raise ValueError(f"unbounded or empty set: support value along axis {i} is not finite")
        lower[i] = lo
        upper[i] = hi
    return IntervalHull(lower=lower, upper=upper)


def midpoint_element(oracle: SupportOracle, compact_convex: bool = True) -> MidpointResult:
    """Midpoint of the interval hull, with its membership guarantee flag.

    For a compact convex set in the plane the midpoint always belongs to the
    set; in other dimensions it is returned but flagged unguaranteed (the
    bundled three-dimensional demo refutes it).  Compactness and convexity
    are the caller's assertion; a support oracle cannot verify them.
    """
    hull = interval_hull(oracle)
    guaranteed = oracle.dim == 2 and compact_convex
    return MidpointResult(
        point=hull.midpoint,
        guarantee=GUARANTEED if guaranteed else UNGUARANTEED,
        hull=hull,
    )


def membership_check(oracle: SupportOracle, p, directions: int = 360, tol: float = 1e-9,
                     seed: int = 0) -> MembershipReport:
    """Sampled separation test: is <d, p> <= sigma(d) for all unit d?

    A returned ``member=False`` is a certificate (the witness direction
    separates p from the set); ``member=True`` only reports that no
    separation was found among the sampled directions.
    """
    if directions < 8:
        raise ValueError("need at least 8 sample directions")
    p = np.asarray(p, dtype=float)
    dirs = unit_directions(directions, oracle.dim, seed=seed)
    max_gap = -math.inf
    witness = None
    for d in dirs:
        gap = float(p @ d) - float(oracle.sigma(d))
        if gap > max_gap:
            max_gap = gap
            witness = d
    member = max_gap <= tol
    return MembershipReport(
        member=member,
        witness=None if member else witness,
        max_gap=max_gap,
        n_directions=directions,
    )


def _line_intersection(u, cu, v, cv) -> np.ndarray:
    # point with <u, x> = cu and <v, x> = cv
    A = np.array([u, v], dtype=float)
    return np.linalg.solve(A, np.array([cu, cv], dtype=float))


def three_probe_ambiguity(u, v, w) -> AmbiguityCertificate:
    """Certificate that three support probes cannot determine a set element.

    The probes u, v, w (values normalised to 1) bound a triangle T; each of
    T's three edges is a compact convex set with the same three support
    values, yet the edges share no common point.  Raises when the probes fail
    to bound a triangle.
    """
    probes = np.array([np.asarray(q, dtype=float) for q in (u, v, w)])
    if probes.shape != (3, 2):
        raise ValueError("three_probe_ambiguity needs three 2-D probe directions")
    if np.any(np.linalg.norm(probes, axis=1) == 0.0):
        raise ValueError("probe directions must be nonzero")
    # T = {x : <q, x> <= 1} is bounded iff the probe directions positively
    # span the plane, i.e. no angular gap of pi or more between them.  This
    # also rejects parallel and anti-parallel probe pairs.
    angles = np.sort(np.arctan2(probes[:, 1], probes[:, 0]))
    gaps = np.diff(np.concatenate([angles, [angles[0] + 2.0 * np.pi]]))
    if np.max(gaps) >= np.pi - 1e-12:
        raise ValueError("probes do not bound a triangle")

    a = _line_intersection(probes[0], 1.0, probes[1], 1.0)
    b = _line_intersection(probes[1], 1.0, probes[2], 1.0)
    c = _line_intersection(probes[2], 1.0, probes[0], 1.0)
    vertices = np.array([a, b, c])
    edges = (np.array([a, b]), np.array([b, c]), np.array([a, c]))

    support_values = np.empty((3, 3))
    for i, edge in enumerate(edges):
        for j in range(3):
            support_values[i, j] = float(np.max(edge @ probes[j]))
    max_support_error = float(np.max(np.abs(support_values - 1.0)))

    scale = float(np.max(np.abs(vertices))) + 1.0
    pairwise = [np.linalg.norm(vertices[i] - vertices[j]) for i in range(3) for j in range(i + 1, 3)]
    intersection_empty = min(pairwise) > 1e-9 * scale

    return AmbiguityCertificate(
        probes=probes,
        vertices=vertices,
        edges=edges,
        support_values=support_values,
        max_support_error=max_support_error,
        intersection_empty=intersection_empty,
        passed=(max_support_error <= 1e-10 and intersection_empty),
    )
