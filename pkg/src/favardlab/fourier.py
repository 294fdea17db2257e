"""Fourier-side machinery for the gasket measure and its relatives.

The projected self-similar measure at angle theta has Fourier transform
``prod_{k=1..n} phi_theta(x / 3**k)`` where phi_theta averages three unit
phases.  This module evaluates such trigonometric products (theta-form and
the two-variable t-form), brackets their sets of small values with certified
Lipschitz bounds, and scans the planar sublevel geometry behind them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BudgetError, PreconditionError
from .geometry import projected_centers
from .selfsimilar import DEFAULT_BUDGET, disc_set, gasket_system

TWO_PI = 2.0 * math.pi

#: Direct complex products are kept up to this factor count; longer products
#: are reconstructed from accumulated log-magnitude and phase to dodge
#: underflow.
_DIRECT_PRODUCT_LIMIT = 40

_GASKET_ANGLES = (0.5 * math.pi, -math.pi / 6.0, 7.0 * math.pi / 6.0)


def phi_theta(theta, xi):
    """One-level factor of the projected gasket measure's transform.

    (1/3) * sum over the three gasket directions a of exp(-i*xi*cos(a - theta)).
    Broadcasts over array arguments.
    """
    theta = np.asarray(theta)
    xi = np.asarray(xi)
    acc = 0.0
    for ang in _GASKET_ANGLES:
        acc = acc + np.exp(-1j * xi * np.cos(ang - theta))
    return acc / 3.0


def nu_hat(n: int, theta: float, x):
    """Transform of the level-n projected measure as an n-factor product."""
    if n < 1:
        raise PreconditionError("n must be >= 1")
    x = np.asarray(x, dtype=np.float64)
    acc = np.ones(x.shape, dtype=np.complex128)
    scale = 1.0
    for _ in range(n):
        scale /= 3.0
        acc *= phi_theta(theta, x * scale)
    return acc if acc.shape else complex(acc)


def nu_hat_direct(n: int, theta: float, x, budget: int = DEFAULT_BUDGET):
    """Oracle for :func:`nu_hat`: the direct atomic sum
    3**(-n) * sum_a exp(-i*x*p_a) over all projected level-n centers."""
    if n < 1:
        raise PreconditionError("n must be >= 1")
    ds = disc_set(gasket_system(), n, budget=budget)
    p = projected_centers(ds, theta)
    x = np.asarray(x, dtype=np.float64)
    flat = np.atleast_1d(x)
    out = np.empty(flat.shape, dtype=np.complex128)
    block = max(1, 2 ** 22 // max(p.shape[0], 1))
    for lo in range(0, flat.shape[0], block):
        hi = min(lo + block, flat.shape[0])
        out[lo:hi] = np.exp(-1j * np.outer(flat[lo:hi], p)).mean(axis=1)
    out = out.reshape(x.shape)
    return out if out.shape else complex(out)


def big_phi(x, y):
    """The three-phase sum 1 + exp(ix) + exp(iy)."""
    return 1.0 + np.exp(1j * np.asarray(x)) + np.exp(1j * np.asarray(y))


def phi_t(t, x):
    """Slope-parameterized form: big_phi evaluated along the line y = t*x."""
    x = np.asarray(x)
    return big_phi(x, t * x)


@dataclass(frozen=True)
class ProductSpec:
    """A finite trigonometric product over factor indices k_lo..k_hi.

    theta-form: prod phi_theta(x / 3**k).
    t-form:     prod (1/3) * big_phi(x / 3**k, t * x / 3**k).
    """

    parameterization: str
    parameter: float
    k_lo: int
    k_hi: int
    scale_base: int = 3

    def __post_init__(self):
        if self.parameterization not in ("theta", "t"):
            raise PreconditionError("parameterization must be 'theta' or 't'")
        if self.k_lo > self.k_hi:
            raise PreconditionError("k_lo must not exceed k_hi")
        if self.scale_base != 3:
            raise PreconditionError("scale_base is fixed at 3")


@dataclass(frozen=True)
class ProductValue:
    value: complex
    log_magnitude: float


def _spec_factors(spec: ProductSpec, x) -> np.ndarray:
    """Factor values for each k in the spec's range; last axis indexes k."""
    x = np.asarray(x, dtype=np.float64)
    ks = np.arange(spec.k_lo, spec.k_hi + 1)
    scaled = x[..., None] / (3.0 ** ks)
    if spec.parameterization == "theta":
        return phi_theta(spec.parameter, scaled)
    return big_phi(scaled, spec.parameter * scaled) / 3.0


def _combine_factors(factors: np.ndarray) -> ProductValue:
    """Fold a 1-D factor array into (value, log|value|)."""
    mags = np.abs(factors)
    if np.any(mags == 0.0):
        return ProductValue(value=0.0 + 0.0j, log_magnitude=-math.inf)
    log_mag = float(np.sum(np.log(mags)))
    if factors.shape[0] <= _DIRECT_PRODUCT_LIMIT:
        value = complex(np.prod(factors))
    else:
        phase = float(np.sum(np.angle(factors)))
        value = cmath_from_polar(log_mag, phase)
    return ProductValue(value=value, log_magnitude=log_mag)


def cmath_from_polar(log_mag: float, phase: float) -> complex:
    mag = math.exp(log_mag)
    return complex(mag * math.cos(phase), mag * math.sin(phase))


def product_eval(spec: ProductSpec, x: float) -> ProductValue:
    """Evaluate the product at one point, with its log-magnitude.

    |value| and exp(log_magnitude) agree to relative 1e-8 whenever |value|
    is comfortably above the underflow floor; an exactly-zero factor yields
    value 0 and log-magnitude -inf.
    """
    factors = _spec_factors(spec, float(x))
    return _combine_factors(np.atleast_1d(np.asarray(factors)))


def product_abs(spec: ProductSpec, x) -> np.ndarray:
    """|product| evaluated vectorized over x (factors multiplied directly)."""
    factors = _spec_factors(spec, x)
    return np.abs(factors).prod(axis=-1)


def sample_integral(
    theta: float, n: int, m: int, steps_per_period: int = 8
) -> float:
    """Midpoint quadrature of prod_{k=0..n} |phi_theta(x/3**k)|^2 over the
    sample window [3**(n-m), 3**n].

    The k = 0 factor oscillates at unit scale, so the step is 2*pi divided by
    ``steps_per_period``; doubling the resolution should move the result by
    well under 1%.
    """
    if not 0 <= m <= n:
        raise PreconditionError("need 0 <= m <= n")
    if steps_per_period < 4:
        raise PreconditionError("steps_per_period must be >= 4")
    lo = 3.0 ** (n - m)
    hi = 3.0 ** n
    if hi <= lo:
        return 0.0
    step = TWO_PI / steps_per_period
    count = max(1, int(math.ceil((hi - lo) / step)))
    h = (hi - lo) / count
    xs = lo + (np.arange(count) + 0.5) * h
    spec = ProductSpec("theta", theta, 0, n)
    vals = product_abs(spec, xs) ** 2
    return float(h * np.sum(vals))


def sample_integral_scan(
    thetas: Sequence[float], N: int, eps0: float, steps_per_period: int = 8
) -> dict:
    """Average the sample integral over a theta grid for each admissible
    window level n strictly between N/4 and N/2, and report the minimizer.

    The window width exponent is m = max(1, floor(2*eps0*log3(N))) and the
    reported reference scale is 2*K*m/N with K = N**eps0 (the constant in
    front is not pinned by theory, so this is a report, not a test).
    """
    if not 0.0 < eps0 < 1.0 / 11.0:
        raise PreconditionError("eps0 must lie in (0, 1/11)")
    ns = [n for n in range(1, N + 1) if N / 4.0 < n < N / 2.0]
    if not ns:
        raise PreconditionError(f"no integer window level strictly inside (N/4, N/2) for N={N}")
    m = max(1, int(math.floor(2.0 * eps0 * math.log(N) / math.log(3.0))))
    K = float(N) ** eps0
    averages = []
    for n in ns:
        vals = [sample_integral(float(t), n, min(m, n), steps_per_period) for t in thetas]
        averages.append(float(np.mean(vals)))
    i_star = int(np.argmin(averages))
    reference = 2.0 * K * m / N
    return {
        "N": N,
        "eps0": eps0,
        "m": m,
        "K": K,
        "n_values": ns,
        "averages": averages,
        "n_star": ns[i_star],
        "min_average": averages[i_star],
        "reference_scale": reference,
        "ratio_to_reference": averages[i_star] / reference,
    }


_SSV_STATUS = {0: "outside", 1: "boundary", 2: "inside"}


@dataclass(eq=False)
class SSVReport:
    """Certified bracket of the set where the high-frequency tail product is
    small: cells classified inside/outside/boundary on the sample window."""

    t: float
    n: int
    m: int
    ell: float
    interval: tuple[float, float]
    threshold: float
    lower_measure: float
    upper_measure: float
    cell_lo: np.ndarray
    cell_hi: np.ndarray
    status_codes: np.ndarray
    weighted_integral: tuple[float, float] | None = None

    @property
    def cells(self) -> list[tuple[float, float, str]]:
        return [
            (float(a), float(b), _SSV_STATUS[int(s)])
            for a, b, s in zip(self.cell_lo, self.cell_hi, self.status_codes)
        ]

    def to_json(self) -> dict:
        out = {
            "t": self.t, "n": self.n, "m": self.m, "ell": self.ell,
            "interval": list(self.interval), "threshold": self.threshold,
            "lower_measure": self.lower_measure,
            "upper_measure": self.upper_measure,
            "cell_count": int(self.cell_lo.shape[0]),
            "inside_cells": int((self.status_codes == 2).sum()),
            "boundary_cells": int((self.status_codes == 1).sum()),
        }
        if self.weighted_integral is not None:
            out["weighted_integral_lower"] = self.weighted_integral[0]
            out["weighted_integral_upper"] = self.weighted_integral[1]
        return out


def _tail_spec(t: float, n: int, m: int) -> ProductSpec:
    return ProductSpec("t", t, n - m, n)


def _head_spec(t: float, n: int, m: int) -> ProductSpec:
    return ProductSpec("t", t, 0, n - m)


def tail_lipschitz_bound(t: float, n: int, m: int) -> float:
    """Certified Lipschitz constant of x -> |tail product|.

    Each factor (1/3)*big_phi(x/3**k, t*x/3**k) has derivative bounded by
    (1 + |t|) / 3**(k+1) and modulus at most 1, so the product-rule bound is
    the sum of the per-factor constants.
    """
    ks = np.arange(n - m, n + 1)
    return float(np.sum((1.0 + abs(t)) / 3.0 ** (ks + 1)))


def ssv_detect(
    t: float, n: int, m: int, ell: float, refine_depth: int = 4
) -> SSVReport:
    """Bracket the measure of {x in [3**(n-m), 3**n] : |tail(x)| <= 3**-ell}.

    Uniform cells of width at most 3**(n-m-refine_depth) are classified by
    midpoint value +- Lipschitz slack (clamped to the provable range [0, 1]).
    Unclassifiable cells count toward the upper measure only.
    """
    if m < 1:
        raise PreconditionError("m must be >= 1")
    if m > n:
        raise PreconditionError("need m <= n")
    if ell < 0:
        raise PreconditionError("ell must be >= 0")
    if refine_depth < 0:
        raise PreconditionError("refine_depth must be >= 0")
    lo = 3.0 ** (n - m)
    hi = 3.0 ** n
    h_max = 3.0 ** (n - m - refine_depth)
    cells = max(1, int(math.ceil((hi - lo) / h_max)))
    h = (hi - lo) / cells
    edges = lo + np.arange(cells + 1) * h
    mids = 0.5 * (edges[:-1] + edges[1:])
    vals = product_abs(_tail_spec(t, n, m), mids)
    slack = 0.5 * h * tail_lipschitz_bound(t, n, m)
    upper_vals = np.minimum(vals + slack, 1.0)
    lower_vals = np.maximum(vals - slack, 0.0)
    threshold = 3.0 ** (-ell)
    codes = np.ones(cells, dtype=np.int8)
    codes[upper_vals <= threshold] = 2
    codes[lower_vals > threshold] = 0
    lower = h * float((codes == 2).sum())
    upper = h * float((codes != 0).sum())
    return SSVReport(
        t=t, n=n, m=m, ell=ell, interval=(lo, hi), threshold=threshold,
        lower_measure=lower, upper_measure=upper,
        cell_lo=edges[:-1], cell_hi=edges[1:], status_codes=codes,
    )


def ssv_weighted_integral(
    t: float,
    n: int,
    m: int,
    ell: float,
    refine_depth: int = 4,
    steps_per_period: int = 16,
) -> SSVReport:
    """Bracket the integral of |head product|^2 over the set of small values.

    Reuses the cell classification of :func:`ssv_detect`; inside cells feed
    the lower bound, inside + boundary the upper.  Within each cell the head
    product (whose fastest factor oscillates at unit scale) is integrated by
    midpoints at step 2*pi/steps_per_period.
    """
    report = ssv_detect(t, n, m, ell, refine_depth)
    head = _head_spec(t, n, m)
    h = report.cell_hi[0] - report.cell_lo[0] if report.cell_lo.size else 0.0
    sub = max(1, int(math.ceil(h / (TWO_PI / steps_per_period))))
    lower_sum = 0.0
    boundary_sum = 0.0
    active = np.flatnonzero(report.status_codes != 0)
    if active.size:
        offsets = (np.arange(sub) + 0.5) * (h / sub)
        pts = report.cell_lo[active][:, None] + offsets[None, :]
        cell_vals = (product_abs(head, pts.ravel()) ** 2).reshape(pts.shape)
        cell_ints = cell_vals.mean(axis=1) * h
        inside_mask = report.status_codes[active] == 2
        lower_sum = float(cell_ints[inside_mask].sum())
        boundary_sum = float(cell_ints[~inside_mask].sum())
    report.weighted_integral = (lower_sum, lower_sum + boundary_sum)
    return report


def ssv_double_integral(
    t_values: Sequence[float],
    n: int,
    m: int,
    ell: float,
    refine_depth: int = 4,
) -> dict:
    """Accumulate the weighted integral over a uniform t grid and compare the
    bracket with the scale 3**(2*m - ell/2) (report only; no constant is
    pinned by theory)."""
    t_values = np.asarray(list(t_values), dtype=np.float64)
    if t_values.shape[0] < 1:
        raise PreconditionError("need at least one t value")
    width = float(t_values.max() - t_values.min())
    dt = width / t_values.shape[0] if t_values.shape[0] > 1 else 1.0
    lowers, uppers = [], []
    for t in t_values:
        rep = ssv_weighted_integral(float(t), n, m, ell, refine_depth)
        lowers.append(rep.weighted_integral[0])
        uppers.append(rep.weighted_integral[1])
    reference = 3.0 ** (2.0 * m - ell / 2.0)
    double_lower = dt * float(np.sum(lowers))
    double_upper = dt * float(np.sum(uppers))
    return {
        "t_values": t_values.tolist(),
        "per_t_lower": lowers,
        "per_t_upper": uppers,
        "double_lower": double_lower,
        "double_upper": double_upper,
        "reference_scale": reference,
        "ratio_upper_to_reference": double_upper / reference,
    }


@dataclass(frozen=True)
class KeyInequalityResult:
    """Empirical constant in |big_phi|^2 >= a * (|4cos^2 x - 1|^2 + |4cos^2 y - 1|^2)."""

    a_empirical: float
    argmin: tuple[float, float]
    grid_step: float

    def __float__(self) -> float:
        return self.a_empirical


def key_inequality_ratio(x, y):
    """|big_phi(x, y)|^2 / (|4cos^2 x - 1|^2 + |4cos^2 y - 1|^2), vectorized.

    Points with vanishing denominator yield +inf (they never carry the
    minimum; where big_phi itself vanishes the denominator vanishes too).
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    num = np.abs(big_phi(x, y)) ** 2
    den = (4.0 * np.cos(x) ** 2 - 1.0) ** 2 + (4.0 * np.cos(y) ** 2 - 1.0) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den > 0.0, num / np.where(den > 0.0, den, 1.0), math.inf)
    return out


def inequality_constant(
    grid_step: float = TWO_PI / 1024.0, row_chunk: int = 128
) -> KeyInequalityResult:
    """Minimum of :func:`key_inequality_ratio` over a uniform [0, 2*pi]^2 grid
    (denominator-zero points excluded); records the argmin."""
    if grid_step > TWO_PI / 1024.0 + 1e-15:
        raise PreconditionError("grid_step must be at most 2*pi/1024")
    npts = int(math.floor(TWO_PI / grid_step)) + 1
    xs = np.arange(npts) * grid_step
    best = math.inf
    best_xy = (math.nan, math.nan)
    for lo in range(0, npts, row_chunk):
        hi = min(lo + row_chunk, npts)
        ratios = key_inequality_ratio(xs[lo:hi][:, None], xs[None, :])
        i, j = np.unravel_index(np.argmin(ratios), ratios.shape)
        if ratios[i, j] < best:
            best = float(ratios[i, j])
            best_xy = (float(xs[lo + i]), float(xs[j]))
    if not best > 0.0:
        raise ArithmeticError(f"key inequality ratio minimum {best} is not positive")
    return KeyInequalityResult(a_empirical=best, argmin=best_xy, grid_step=grid_step)


@dataclass(eq=False)
class OmegaScan:
    """Grid scan of the planar sublevel set of prod big_phi(3**k x, 3**k y)."""

    m: int
    ell: float
    grid_step: float
    a_empirical: float
    omega_points: np.ndarray
    containment_violations: np.ndarray
    splitting_violations: int
    touched_squares: int
    square_budget: int
    grid_point_count: int

    def to_json(self) -> dict:
        return {
            "m": self.m, "ell": self.ell, "grid_step": self.grid_step,
            "a_empirical": self.a_empirical,
            "grid_point_count": self.grid_point_count,
            "omega_point_count": int(self.omega_points.shape[0]),
            "containment_violation_count": int(self.containment_violations.shape[0]),
            "splitting_violations": self.splitting_violations,
            "touched_squares": self.touched_squares,
            "square_budget": self.square_budget,
            "within_square_budget": bool(self.touched_squares <= self.square_budget),
        }


def omega_scan(
    m: int,
    ell: float,
    grid_step: float,
    a_empirical: float | None = None,
    a_grid_step: float = TWO_PI / 1024.0,
) -> OmegaScan:
    """Scan [0, 2*pi]^2 for the sublevel set |prod_{k=0..m} big_phi(3**k x,
    3**k y)| <= 3**(m-ell) and verify its square-lattice containment.

    Every detected point must satisfy the safe sine bound
    sin^2(3**(m+1) x) + sin^2(3**(m+1) y) <= 2 * a**-(m+1) * 3**(2(m-ell)),
    which follows pointwise from the key inequality, the telescoping identity
    and the splitting bound prod(A_k + B_k) >= max(prod A_k, prod B_k)
    (the factor 2 converts max to sum).  The splitting bound itself is also
    checked at every grid point.  Touched squares are counted against the
    lattice of 4 * 3**(2m+2) squares centered at the common sine zeros.
    """
    if m < 0:
        raise PreconditionError("m must be >= 0")
    h_req = TWO_PI * 3.0 ** (-(m + 1)) / 8.0
    if grid_step > h_req * (1.0 + 1e-12):
        raise PreconditionError(
            f"grid_step {grid_step:.3g} too coarse: need <= {h_req:.3g} to resolve sin(3**(m+1)x)"
        )
    if a_empirical is None:
        a_empirical = inequality_constant(a_grid_step).a_empirical
    a = float(a_empirical)
    npts = int(math.floor(TWO_PI / grid_step)) + 1
    xs = np.arange(npts) * grid_step
    threshold = 3.0 ** (m - ell)
    sine_bound = 2.0 * a ** (-(m + 1.0)) * 3.0 ** (2.0 * (m - ell))
    lattice_scale = 3.0 ** (m + 1) / math.pi
    lattice_mod = 2 * 3 ** (m + 1)

    ks = 3.0 ** np.arange(m + 1)
    # Per-row factor data along one axis are shared by the row sweep.
    a_sq = (4.0 * np.cos(np.outer(xs, ks)) ** 2 - 1.0) ** 2
    phases = np.exp(1j * np.outer(xs, ks))
    sin_fast = np.sin(3.0 ** (m + 1) * xs) ** 2
    lattice_idx = np.round(xs * lattice_scale).astype(np.int64) % lattice_mod

    pts_chunks = []
    viol_chunks = []
    touched_chunks = []
    splitting_bad = 0
    for i in range(npts):
        prod = np.ones(npts, dtype=np.complex128)
        prod_ab = np.ones(npts)
        prod_a = 1.0
        prod_b = np.ones(npts)
        for k in range(m + 1):
            prod *= phases[i, k] + 1.0 + phases[:, k]
            prod_ab *= a_sq[i, k] + a_sq[:, k]
            prod_a *= a_sq[i, k]
            prod_b *= a_sq[:, k]
        splitting_bad += int(
            np.sum(prod_ab < np.maximum(prod_a, prod_b) * (1.0 - 1e-12))
        )
        mask = np.abs(prod) <= threshold
        if not np.any(mask):
            continue
        ys = xs[mask]
        s = sin_fast[i] + sin_fast[mask]
        pts_chunks.append(np.column_stack([np.full(ys.shape, xs[i]), ys]))
        bad = s > sine_bound
        if np.any(bad):
            viol_chunks.append(
                np.column_stack([np.full(bad.sum(), xs[i]), ys[bad], s[bad]])
            )
        touched_chunks.append(
            np.column_stack([np.full(ys.shape, lattice_idx[i]), lattice_idx[mask]])
        )
    omega_pts = (
        np.concatenate(pts_chunks) if pts_chunks else np.empty((0, 2))
    )
    violations = (
        np.concatenate(viol_chunks) if viol_chunks else np.empty((0, 3))
    )
    if touched_chunks:
        pairs = np.concatenate(touched_chunks)
        touched = np.unique(pairs[:, 0] * lattice_mod + pairs[:, 1]).shape[0]
    else:
        touched = 0
    return OmegaScan(
        m=m, ell=ell, grid_step=grid_step, a_empirical=a,
        omega_points=omega_pts,
        containment_violations=violations,
        splitting_violations=splitting_bad,
        touched_squares=int(touched),
        square_budget=4 * 3 ** (2 * m + 2),
        grid_point_count=npts * npts,
    )


def telescoping_check(x: float, m: int) -> float:
    """Absolute error of prod_{k=0..m} (4cos^2(3**k x) - 1) against
    sin(3**(m+1) x) / sin(x); requires |sin(3**k x)| > 1e-8 for k <= m."""
    if m < 0:
        raise PreconditionError("m must be >= 0")
    for k in range(m + 1):
        if abs(math.sin(3.0 ** k * x)) <= 1e-8:
            raise PreconditionError(
                f"x too close to a pole: |sin(3**{k} * x)| <= 1e-8"
            )
    prod = 1.0
    for k in range(m + 1):
        prod *= 4.0 * math.cos(3.0 ** k * x) ** 2 - 1.0
    rhs = math.sin(3.0 ** (m + 1) * x) / math.sin(x)
    return abs(prod - rhs)
