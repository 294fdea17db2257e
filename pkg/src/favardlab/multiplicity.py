"""Projection multiplicity functions, their norms, level sets and scans.

The multiplicity function of a level-n disc set at angle theta counts how
many projected discs cover a point, scaled so the function integrates to 1:

    f(x) = 0.5 * (k * ratio)**(-n) * #{discs whose projection covers x}.

For the unit-mass systems used throughout (ratio = 1/k, gasket included) the
scale factor is exactly 1/2, so values are half-integers.  The function is
held as an exact step function (no gridding): norms, level sets and masses
are finite sums over pieces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import PreconditionError
from .geometry import IntervalUnion, projected_centers
from .selfsimilar import DEFAULT_BUDGET, DiscSet, SimilaritySystem, disc_set, theta_period


@dataclass(frozen=True, eq=False)
class StepFunction:
    """Piecewise-constant function: value values[i] on (breakpoints[i],
    breakpoints[i+1]), 0 outside.  Adjacent equal pieces are merged."""

    breakpoints: np.ndarray
    values: np.ndarray

    @classmethod
    def from_pieces(cls, breakpoints, values) -> "StepFunction":
        """Normalize raw pieces: merge equal neighbors, trim zero ends."""
        bps = np.asarray(breakpoints, dtype=np.float64)
        vals = np.asarray(values, dtype=np.float64)
        if vals.size == 0 or not np.any(vals):
            return cls(breakpoints=np.empty(0), values=np.empty(0))
        if np.any(vals < 0):
            raise PreconditionError("step function values must be nonnegative")
        keep = np.empty(vals.shape[0], dtype=bool)
        keep[0] = True
        keep[1:] = vals[1:] != vals[:-1]
        idx = np.flatnonzero(keep)
        merged_vals = vals[idx]
        merged_bps = np.append(bps[idx], bps[-1])
        if merged_vals[0] == 0.0:
            merged_vals = merged_vals[1:]
            merged_bps = merged_bps[1:]
        if merged_vals.size and merged_vals[-1] == 0.0:
            merged_vals = merged_vals[:-1]
            merged_bps = merged_bps[:-1]
        return cls(breakpoints=merged_bps, values=merged_vals)

    @property
    def piece_count(self) -> int:
        return self.values.shape[0]

    @property
    def max_value(self) -> float:
        return float(self.values.max()) if self.values.size else 0.0

    def widths(self) -> np.ndarray:
        return np.diff(self.breakpoints)

    def integral(self) -> float:
        if self.values.size == 0:
            return 0.0
        return float(np.dot(self.values, self.widths()))

    def evaluate(self, x) -> np.ndarray:
        """Pointwise values, right-continuous at breakpoints."""
        x = np.asarray(x, dtype=np.float64)
        if self.values.size == 0:
            return np.zeros_like(x)
        idx = np.searchsorted(self.breakpoints, x, side="right") - 1
        inside = (idx >= 0) & (idx < self.values.shape[0])
        out = np.zeros_like(x)
        out[inside] = self.values[idx[inside]]
        return out

    def support(self) -> IntervalUnion:
        """Closure of {f > 0} as an interval union."""
        return self.sublevel(np.nextafter(0.0, 1.0))

    def sublevel(self, threshold: float) -> IntervalUnion:
        pick = self.values >= threshold
        return IntervalUnion.from_intervals(
            zip(self.breakpoints[:-1][pick], self.breakpoints[1:][pick])
        )


@dataclass
class ExceptionalScan:
    """Angle classification by the smallness of maximal stack level sets."""

    N: int
    eps0: float | None
    K: float
    theta_grid: np.ndarray
    a_star_measures: np.ndarray
    in_E: np.ndarray
    e_measure_estimate: float
    scan_period: float
    full_measure_estimate: float
    paper_bound: float | None

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "eps0": self.eps0,
            "K": self.K,
            "grid_size": int(self.theta_grid.shape[0]),
            "scan_period": self.scan_period,
            "in_E_count": int(self.in_E.sum()),
            "e_measure_estimate": self.e_measure_estimate,
            "full_measure_estimate": self.full_measure_estimate,
            "reference_bound": self.paper_bound,
            "within_reference_bound": (
                None if self.paper_bound is None
                else bool(self.full_measure_estimate < self.paper_bound)
            ),
        }


@dataclass
class ChainReport:
    """Measures, norms and the classical inequalities for one (set, theta, K)."""

    theta: float
    level: int
    K: float
    p: float
    q: float
    measure_L: float
    measure_AK: float
    l2_norm: float
    lp_norm: float
    duality_bound: float
    holder_bound: float
    mass_split_lhs: float
    naive_rhs: float
    naive_holds: bool
    l2sq_over_K: float


def multiplicity_function(disc_set: DiscSet, theta: float) -> StepFunction:
    """Exact multiplicity step function of a disc set at angle theta.

    Built by a single sweep over the 2*k**n sorted projected-disc endpoints;
    integrates to 1 (each disc carries mass k**(-n)).
    """
    if disc_set.count == 0:
        return StepFunction.from_pieces(np.empty(0), np.empty(0))
    p = np.sort(projected_centers(disc_set, theta))
    bps, counts = _kernels.multiplicity_events(
        np.ascontiguousarray(p), disc_set.radius
    )
    unit = 0.5 / (disc_set.count * disc_set.radius)
    return StepFunction.from_pieces(bps, counts * unit)


def lp_norm(f: StepFunction, p: float) -> float:
    """L^p norm of a step function; p = inf returns the max value."""
    if p != math.inf and p < 1.0:
        raise PreconditionError("p must be >= 1")
    if f.values.size == 0:
        return 0.0
    if p == math.inf:
        return f.max_value
    return float(np.dot(f.values ** p, f.widths()) ** (1.0 / p))


def level_set(f: StepFunction, K: float) -> IntervalUnion:
    """The set {f >= K} as a merged interval union."""
    if K <= 0:
        raise PreconditionError("K must be positive")
    return f.sublevel(K)


def maximal_function(
    system: SimilaritySystem,
    N: int,
    theta: float,
    budget: int = DEFAULT_BUDGET,
) -> StepFunction:
    """Pointwise maximum of the level-n multiplicity functions, n = 1..N."""
    if N < 1:
        raise PreconditionError("N must be >= 1")
    fs = [
        multiplicity_function(disc_set(system, n, budget=budget), theta)
        for n in range(1, N + 1)
    ]
    if N == 1:
        return fs[0]
    grid = np.unique(np.concatenate([f.breakpoints for f in fs]))
    mids = 0.5 * (grid[:-1] + grid[1:])
    vals = fs[0].evaluate(mids)
    for f in fs[1:]:
        np.maximum(vals, f.evaluate(mids), out=vals)
    return StepFunction.from_pieces(grid, vals)


def exceptional_set_scan(
    system: SimilaritySystem,
    N: int,
    eps0: float | None,
    grid_size: int,
    K: float | None = None,
    budget: int = DEFAULT_BUDGET,
) -> ExceptionalScan:
    """Classify a theta grid by |{f* >= K}| <= K**-3, K = N**eps0.

    The grid covers one symmetry period of the system (pi/3 for the gasket,
    pi generally) at midpoints; ``e_measure_estimate`` is grid spacing times
    the count of exceptional angles on that period, and
    ``full_measure_estimate`` rescales it to [0, pi).  ``K`` may be passed
    explicitly for diagnostics, in which case eps0 is unused and may be None.
    """
    if K is None:
        if eps0 is None or not 0.0 < eps0 < 1.0 / 11.0:
            raise PreconditionError("eps0 must lie in (0, 1/11)")
        K = float(N) ** eps0
    if grid_size < 1:
        raise PreconditionError("grid_size must be >= 1")
    period = theta_period(system)
    spacing = period / grid_size
    thetas = (np.arange(grid_size) + 0.5) * spacing
    measures = np.empty(grid_size)
    for i, t in enumerate(thetas):
        fstar = maximal_function(system, N, float(t), budget=budget)
        measures[i] = level_set(fstar, K).measure()
    in_e = measures <= K ** -3.0
    e_measure = spacing * float(in_e.sum())
    bound = float(N) ** (-eps0) if eps0 is not None else None
    return ExceptionalScan(
        N=N, eps0=eps0, K=K, theta_grid=thetas, a_star_measures=measures,
        in_E=in_e, e_measure_estimate=e_measure, scan_period=period,
        full_measure_estimate=e_measure * (math.pi / period),
        paper_bound=bound,
    )


def estimate_chain_report(
    disc_set: DiscSet, theta: float, K: float, p: float = 2.0
) -> ChainReport:
    """Compute the measure/norm chain for one disc set, angle and threshold.

    Returns |L| (the support of f), |A_K|, the L2 and Lp norms, the duality
    lower bound |L| >= ||f||_2**-2, the Holder bound ||f||_p**-q with
    q = p/(p-1), the mass split 0.5*(|L| - |A_K|) + K*|A_K| (provably <= 1
    for K > 1/2), and the naive bound 1 - (K-1)*|A_K| which is reported but
    not asserted.  The two provable inequalities are verified here and a
    violation raises, since it can only mean an implementation bug.
    """
    if K <= 0.5:
        raise PreconditionError("K must exceed 1/2")
    if p <= 1.0:
        raise PreconditionError("p must exceed 1 for the dual exponent")
    f = multiplicity_function(disc_set, theta)
    m_L = f.support().measure()
    m_AK = level_set(f, K).measure()
    l2 = lp_norm(f, 2.0)
    lp = lp_norm(f, p)
    q = p / (p - 1.0)
    duality = l2 ** -2.0
    holder = lp ** -q
    mass_split = 0.5 * (m_L - m_AK) + K * m_AK
    naive_rhs = 1.0 - (K - 1.0) * m_AK
    if m_L * l2 ** 2.0 < 1.0 - 1e-9:
        raise ArithmeticError(
            f"duality violated: |L| * ||f||_2^2 = {m_L * l2 ** 2.0} < 1"
        )
    if mass_split > 1.0 + 1e-9:
        raise ArithmeticError(
            f"mass split violated: {mass_split} > 1"
        )
    return ChainReport(
        theta=theta, level=disc_set.level, K=K, p=p, q=q,
        measure_L=m_L, measure_AK=m_AK, l2_norm=l2, lp_norm=lp,
        duality_bound=duality, holder_bound=holder,
        mass_split_lhs=mass_split, naive_rhs=naive_rhs,
        naive_holds=bool(m_L <= naive_rhs + 1e-12),
        l2sq_over_K=l2 ** 2.0 / K,
    )
