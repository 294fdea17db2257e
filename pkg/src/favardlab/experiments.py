"""Decay experiments: Favard length tables over levels and model fits.

Two decay models are always on offer.  The gasket-style result is a power
law C / n**c; the general self-similar result is the weaker
C * exp(-c * sqrt(log n)).  Both are fit by ordinary least squares in their
linearizing coordinates.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import PreconditionError
from .geometry import favard_quadrature
from .selfsimilar import (
    DEFAULT_BUDGET,
    SimilaritySystem,
    disc_set,
    resolve_system,
    theta_period,
    validate_general_system,
)

MODELS = ("power", "sqrtlog")


@dataclass
class ExperimentConfig:
    """Inputs of a decay run; mirrors the JSON config file format."""

    system: str = "gasket"
    n_range: Sequence[int] = (2, 3, 4, 5, 6)
    quadrature_nodes: int | None = None
    mc_samples: int = 100_000
    seed: int = 0
    eps0: float = 0.05
    ssv_alpha: float = 2.0
    theta_grid: int = 256
    output: str | None = None
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        self.n_range = [int(n) for n in self.n_range]
        if not self.n_range:
            raise PreconditionError("n_range must be nonempty")
        if any(n < 0 for n in self.n_range):
            raise PreconditionError("levels must be >= 0")
        if not 0.0 < self.eps0 < 1.0 / 11.0:
            raise PreconditionError("eps0 must lie in (0, 1/11)")
        if self.quadrature_nodes is not None and self.quadrature_nodes < 1:
            raise PreconditionError("quadrature_nodes must be >= 1")
        if self.mc_samples < 1 or self.theta_grid < 1:
            raise PreconditionError("counts must be positive")

    @classmethod
    def from_json(cls, obj) -> "ExperimentConfig":
        if isinstance(obj, str):
            obj = json.loads(obj)
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(obj) - known
        if unknown:
            raise PreconditionError(f"unknown config keys: {sorted(unknown)}")
        return cls(**obj)


@dataclass
class DecayFit:
    """Least-squares fit of a decay model with its transformed-space r^2."""

    model: str
    C: float
    c: float
    r_squared: float
    residuals: list[float] = field(default_factory=list)

    def predict(self, n) -> np.ndarray:
        n = np.asarray(n, dtype=np.float64)
        if self.model == "power":
            return self.C * n ** (-self.c)
        return self.C * np.exp(-self.c * np.sqrt(np.log(n)))

    def to_json(self) -> dict:
        return {
            "model": self.model, "C": self.C, "c": self.c,
            "r_squared": self.r_squared, "residuals": self.residuals,
        }


@dataclass
class DecayResult:
    table: list[tuple[int, float]]
    fits: list[DecayFit]

    def to_json(self) -> dict:
        return {
            "table": [[n, v] for n, v in self.table],
            "fits": [f.to_json() for f in self.fits],
        }


def _transform(ns: np.ndarray, model: str) -> np.ndarray:
    if model == "power":
        return np.log(ns)
    return np.sqrt(np.log(ns))


def fit_model(points: Sequence[tuple[float, float]], model: str) -> DecayFit:
    """OLS fit in linearizing coordinates (log v against log n or
    sqrt(log n)); residuals are reported in the original scale."""
    if model not in MODELS:
        raise PreconditionError(f"model must be one of {MODELS}")
    pts = list(points)
    if len(pts) < 3:
        raise PreconditionError(
            "need at least 3 points for a fit with residual reporting"
        )
    ns = np.array([float(n) for n, _ in pts])
    vs = np.array([float(v) for _, v in pts])
    if np.any(vs <= 0.0):
        raise PreconditionError("all values must be positive")
    if np.any(ns < 1.0):
        raise PreconditionError("levels must be >= 1 for log transforms")
    X = _transform(ns, model)
    Y = np.log(vs)
    slope, intercept = np.polyfit(X, Y, 1)
    pred = slope * X + intercept
    ss_res = float(np.sum((Y - pred) ** 2))
    ss_tot = float(np.sum((Y - Y.mean()) ** 2))
    if ss_tot > 0.0:
        r2 = 1.0 - ss_res / ss_tot
    else:
        r2 = 1.0 if ss_res <= 1e-24 else 0.0
    fit = DecayFit(model=model, C=float(np.exp(intercept)), c=float(-slope), r_squared=r2)
    fit.residuals = (vs - fit.predict(ns)).tolist()
    return fit


def default_nodes(n: int) -> int:
    """Level-adaptive node count keeping the angle-discretization error below
    the inter-level Favard gaps (the projected length is Lipschitz in theta
    with constant bounded by twice the set diameter)."""
    return max(1000, int(math.ceil(50.0 * 3.0 ** (n / 2.0))))


def _favard_table(
    system: SimilaritySystem, config: ExperimentConfig
) -> list[tuple[int, float]]:
    period = theta_period(system)
    table = []
    for n in config.n_range:
        nodes = config.quadrature_nodes or default_nodes(n)
        value = favard_quadrature(
            disc_set(system, n, budget=config.budget), nodes, symmetry_period=period
        )
        if not math.isfinite(value):
            raise ArithmeticError(f"non-finite Favard value at level n={n}")
        table.append((n, value))
    return table


def run_decay(config: ExperimentConfig, model: str = "power") -> DecayResult:
    """Favard length per level plus a fit of the chosen decay model."""
    system = resolve_system(config.system)
    table = _favard_table(system, config)
    return DecayResult(table=table, fits=[fit_model(table, model)])


def run_general(config: ExperimentConfig) -> DecayResult:
    """Validated general-system pipeline; emits both decay fits for model
    comparison."""
    system = resolve_system(config.system)
    report = validate_general_system(system)
    if not report.passed:
        raise PreconditionError(
            "system validation failed: " + "; ".join(report.failures)
        )
    table = _favard_table(system, config)
    return DecayResult(
        table=table,
        fits=[fit_model(table, "power"), fit_model(table, "sqrtlog")],
    )


def decay_table_csv(table: Sequence[tuple[int, float]]) -> str:
    """Deterministic CSV rendering of an (n, Favard) table."""
    lines = ["n,favard"]
    lines += [f"{n},{v:.17g}" for n, v in table]
    return "\n".join(lines) + "\n"
