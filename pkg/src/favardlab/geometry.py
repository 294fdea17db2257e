"""Projections, interval unions, Favard quadrature and the needle experiment.

Projection convention: the coordinate of z along direction theta is
``p = Re(z * exp(-i*theta))``.  Any fixed convention gives the same projected
lengths; this one is pinned for reproducibility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from . import _kernels
from .errors import PreconditionError
from .selfsimilar import DiscSet

#: Default half-width of the needle offset range; every system handled here
#: lives inside the unit disc (the gasket inside B(0, 5/6)).
DEFAULT_OFFSET_HALFWIDTH = 1.0


@dataclass(frozen=True, eq=False)
class IntervalUnion:
    """Disjoint sorted intervals [starts[i], ends[i]] with starts < ends."""

    starts: np.ndarray
    ends: np.ndarray

    @classmethod
    def empty(cls) -> "IntervalUnion":
        return cls(starts=np.empty(0), ends=np.empty(0))

    @classmethod
    def from_intervals(cls, pairs: Iterable[tuple[float, float]]) -> "IntervalUnion":
        """Merge arbitrary intervals; touching intervals coalesce."""
        arr = np.asarray(list(pairs), dtype=np.float64)
        if arr.size == 0:
            return cls.empty()
        keep = arr[:, 1] > arr[:, 0]
        arr = arr[keep]
        if arr.shape[0] == 0:
            return cls.empty()
        order = np.argsort(arr[:, 0], kind="stable")
        starts, ends = _kernels.merge_intervals(
            np.ascontiguousarray(arr[order, 0]),
            np.ascontiguousarray(arr[order, 1]),
        )
        return cls(starts=starts, ends=ends)

    @property
    def count(self) -> int:
        return self.starts.shape[0]

    def __len__(self) -> int:
        return self.count

    def __iter__(self) -> Iterator[tuple[float, float]]:
        return iter(zip(self.starts.tolist(), self.ends.tolist()))

    @property
    def intervals(self) -> list[tuple[float, float]]:
        return list(self)

    def measure(self) -> float:
        return float(np.sum(self.ends - self.starts))

    def contains_union(self, other: "IntervalUnion", tol: float = 1e-12) -> bool:
        """True if every interval of ``other`` lies in some interval of self."""
        if other.count == 0:
            return True
        if self.count == 0:
            return False
        idx = np.searchsorted(self.starts, other.starts + tol, side="right") - 1
        if np.any(idx < 0):
            return False
        return bool(
            np.all(other.starts >= self.starts[idx] - tol)
            and np.all(other.ends <= self.ends[idx] + tol)
        )

    def approx_equal(self, other: "IntervalUnion", tol: float = 1e-12) -> bool:
        if self.count != other.count:
            return False
        if self.count == 0:
            return True
        return bool(
            np.max(np.abs(self.starts - other.starts)) <= tol
            and np.max(np.abs(self.ends - other.ends)) <= tol
        )


@dataclass(frozen=True)
class NeedleEstimate:
    """Monte Carlo needle-drop outcome; estimate = 2R * hits / samples."""

    favard_estimate: float
    standard_error: float
    hits: int
    samples: int
    seed: int


def measure(union: IntervalUnion) -> float:
    """Total length of an interval union."""
    return union.measure()


def project_disc(center: complex, radius: float, theta: float) -> tuple[float, float]:
    """Orthogonal projection of the closed disc B(center, radius).

    Returns the closed interval [p - radius, p + radius] with
    p = Re(center * exp(-i*theta)).
    """
    if radius <= 0:
        raise PreconditionError("radius must be positive")
    p = (center * np.exp(-1j * theta)).real
    return (p - radius, p + radius)


def projected_centers(disc_set: DiscSet, theta: float) -> np.ndarray:
    """Projections Re(z * exp(-i*theta)) of all disc centers (unsorted)."""
    z = disc_set.centers
    return z.real * math.cos(theta) + z.imag * math.sin(theta)


def project_set(disc_set: DiscSet, theta: float) -> IntervalUnion:
    """Exact merged projection of a disc set: sort the k**n projected
    centers, then sweep once with the common radius."""
    if disc_set.count == 0:
        return IntervalUnion.empty()
    p = np.sort(projected_centers(disc_set, theta))
    r = disc_set.radius
    starts, ends = _kernels.merge_intervals(
        np.ascontiguousarray(p - r), np.ascontiguousarray(p + r)
    )
    return IntervalUnion(starts=starts, ends=ends)


def favard_quadrature(
    disc_set: DiscSet,
    nodes: int,
    symmetry_period: float | None = None,
    theta_block: int = 64,
) -> float:
    """Favard length by the midpoint rule: mean projected length over
    ``nodes`` uniform midpoint angles.

    The full average is (1/pi) * integral over [0, pi); when the projected
    length is known to repeat with a shorter period (pi/3 for the gasket),
    pass it as ``symmetry_period`` to spend all nodes on one period.  The
    node sum is a numpy pairwise reduction, so results do not depend on how
    the angle blocks are scheduled.
    """
    if nodes < 1:
        raise PreconditionError("nodes must be >= 1")
    period = math.pi if symmetry_period is None else float(symmetry_period)
    if not 0.0 < period <= math.pi + 1e-12:
        raise PreconditionError("symmetry_period must lie in (0, pi]")
    if disc_set.count == 0:
        return 0.0
    thetas = (np.arange(nodes) + 0.5) * (period / nodes)
    z = disc_set.centers
    x, y = z.real, z.imag
    r = disc_set.radius
    measures = np.empty(nodes)
    for lo in range(0, nodes, theta_block):
        hi = min(lo + theta_block, nodes)
        block = thetas[lo:hi]
        proj = np.cos(block)[:, None] * x[None, :] + np.sin(block)[:, None] * y[None, :]
        proj.sort(axis=1)
        measures[lo:hi] = _kernels.union_measure_sorted_rows(
            np.ascontiguousarray(proj), r
        )
    return float(measures.mean())


def buffon_mc(
    disc_set: DiscSet,
    samples: int,
    seed: int,
    offset_halfwidth: float = DEFAULT_OFFSET_HALFWIDTH,
) -> NeedleEstimate:
    """Buffon needle Monte Carlo estimate of the Favard length.

    Draws (theta, u) with theta uniform on [0, pi) and the signed line offset
    u uniform on [-R, R]; the line hits the set iff some projected center p
    satisfies |u - p| <= radius.  Requires R >= max |center| + radius so that
    every line meeting the set is sampleable.  The generator is counter-based
    (numpy Philox) keyed by ``seed``, so results are reproducible and the
    seed is recorded in the estimate.
    """
    if samples < 1:
        raise PreconditionError("samples must be >= 1")
    R = float(offset_halfwidth)
    if disc_set.count == 0:
        return NeedleEstimate(0.0, 0.0, 0, samples, seed)
    reach = float(np.abs(disc_set.centers).max()) + disc_set.radius
    if R < reach:
        raise PreconditionError(
            f"offset_halfwidth {R} < max |center| + radius = {reach:.6g}; "
            "lines hitting the set would be unsampleable"
        )
    rng = np.random.Generator(np.random.Philox(seed))
    theta = rng.uniform(0.0, math.pi, samples)
    u = rng.uniform(-R, R, samples)
    z = disc_set.centers
    hits = _kernels.needle_hits(
        np.ascontiguousarray(z.real), np.ascontiguousarray(z.imag),
        np.cos(theta), np.sin(theta), u, disc_set.radius,
    )
    p_hat = hits / samples
    estimate = 2.0 * R * p_hat
    stderr = 2.0 * R * math.sqrt(p_hat * (1.0 - p_hat) / samples)
    return NeedleEstimate(estimate, stderr, hits, samples, seed)


def theta_scan_rows(disc_set: DiscSet, thetas: Iterable[float]) -> list[tuple[float, float]]:
    """(theta, projected length) pairs for CSV emission."""
    return [(float(t), project_set(disc_set, float(t)).measure()) for t in thetas]
