"""Self-similar disc systems.

A :class:`SimilaritySystem` is a family of k homotheties
``S_j(z) = ratio * z + c_j`` acting on the plane.  The stored centers are the
level-1 disc centers ``c_j = S_j(0)``; iterating n times produces the k**n
level-n discs of common radius ``ratio**n``, whose centers are the digit sums

    z(a_1 ... a_n) = sum_{k=1}^{n} ratio**(k-1) * c_{a_k}.

The canonical instance is the three-map gasket system (ratio 1/3, centers at
the vertices of an equilateral triangle at distance 1/3 from the origin);
general systems follow the "k disjoint discs of radius 1/k in the unit disc"
recipe.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import BudgetError, InvalidAddressError, PreconditionError

#: Largest disc count materialized by :func:`disc_set`; beyond it, use
#: :func:`iter_centers`.
DEFAULT_BUDGET = 3 ** 14

#: Gasket digit convention: stored digit d in {0, 1, 2} is the paper-style
#: label alpha = d - 1 in {-1, 0, 1}.  Used everywhere a gasket address
#: appears.
GASKET_DIGIT_OFFSET = -1


@dataclass(frozen=True, eq=False)
class SimilaritySystem:
    """k homotheties of common ratio with level-1 centers ``centers``."""

    branch_count: int
    ratio: float
    centers: np.ndarray
    disjointness_required: bool = False

    def __post_init__(self):
        centers = np.asarray(self.centers, dtype=np.complex128)
        object.__setattr__(self, "centers", centers)
        if self.branch_count < 1:
            raise PreconditionError("branch_count must be >= 1")
        if not 0.0 < self.ratio < 1.0:
            raise PreconditionError("ratio must lie in (0, 1)")
        if centers.shape != (self.branch_count,):
            raise PreconditionError(
                f"expected {self.branch_count} centers, got {centers.shape}"
            )
        if not np.all(np.isfinite(centers.view(np.float64))):
            raise PreconditionError("centers must be finite")


@dataclass(frozen=True, eq=False)
class DiscSet:
    """All level-n discs of a system: k**n centers, common radius ratio**n."""

    level: int
    radius: float
    centers: np.ndarray

    @property
    def count(self) -> int:
        return self.centers.shape[0]


@dataclass
class ValidationReport:
    """Per-invariant pass/fail record produced by validate_general_system."""

    passed: bool
    checks: dict[str, bool]
    failures: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


def gasket_system() -> SimilaritySystem:
    """The three-map system approximating the 1-D Sierpinski gasket.

    Level-1 centers are (1/3) * exp(i*pi*(1/2 + 2*alpha/3)) for
    alpha in {-1, 0, 1}; the level-1 discs overlap, so disjointness is not
    required.
    """
    alphas = np.array([-1.0, 0.0, 1.0])
    centers = np.exp(1j * np.pi * (0.5 + 2.0 * alphas / 3.0)) / 3.0
    return SimilaritySystem(
        branch_count=3, ratio=1.0 / 3.0, centers=centers,
        disjointness_required=False,
    )


def center(system: SimilaritySystem, address: Sequence[int]) -> complex:
    """Center of the disc addressed by a digit word, deepest digit last.

    Evaluates sum_k ratio**(k-1) * c_{a_k} by Horner accumulation from the
    deepest digit to the shallowest (minimizes rounding error).  The empty
    address is the origin.
    """
    k = system.branch_count
    z = 0.0 + 0.0j
    for digit in reversed(address):
        d = int(digit)
        if d != digit or not 0 <= d < k:
            raise InvalidAddressError(
                f"digit {digit!r} outside alphabet range [0, {k})"
            )
        z = complex(system.centers[d]) + system.ratio * z
    return z


def _level_radius(ratio: float, n: int) -> float:
    # ratio**n by repeated multiplication: keeps the value consistent with
    # the per-level recursion used for center enumeration.
    r = 1.0
    for _ in range(n):
        r *= ratio
    return r


def disc_set(
    system: SimilaritySystem, n: int, budget: int = DEFAULT_BUDGET
) -> DiscSet:
    """Materialize all k**n level-n disc centers in lexicographic order."""
    if n < 0:
        raise PreconditionError("level must be >= 0")
    k = system.branch_count
    if k ** n > budget:
        raise BudgetError(
            f"{k}**{n} = {k ** n} centers exceeds budget {budget}; "
            "use iter_centers for streaming enumeration"
        )
    centers = np.zeros(1, dtype=np.complex128)
    for _ in range(n):
        centers = (system.centers[:, None] + system.ratio * centers[None, :]).ravel()
    return DiscSet(level=n, radius=_level_radius(system.ratio, n), centers=centers)


def iter_centers(
    system: SimilaritySystem, n: int, block_size: int = 3 ** 12
) -> Iterator[np.ndarray]:
    """Yield level-n centers in lexicographic address order, block by block.

    Streaming alternative to :func:`disc_set` for levels beyond the budget;
    memory use is bounded by ``block_size`` regardless of n.
    """
    if n < 0:
        raise PreconditionError("level must be >= 0")
    k = system.branch_count
    suffix_len = n
    while suffix_len > 0 and k ** suffix_len > block_size:
        suffix_len -= 1
    prefix_len = n - suffix_len
    suffix = disc_set(system, suffix_len, budget=max(block_size, 1)).centers
    scale = _level_radius(system.ratio, prefix_len)
    if prefix_len == 0:
        yield suffix.copy()
        return
    digits = [0] * prefix_len
    while True:
        z = center(system, digits)
        yield z + scale * suffix
        pos = prefix_len - 1
        while pos >= 0:
            digits[pos] += 1
            if digits[pos] < k:
                break
            digits[pos] = 0
            pos -= 1
        if pos < 0:
            return


def validate_general_system(system: SimilaritySystem) -> ValidationReport:
    """Check the system invariants and report pass/fail per invariant.

    Checks: pairwise-distinct centers, unit-disc containment |c_j| <= 1,
    nesting (max |c_j| + ratio <= 1, which keeps every child disc inside its
    parent), and, when the system requires it, pairwise disjointness of the
    closed level-1 discs B(c_j, ratio).  Centers with |c_j| > 1 - ratio leave
    the level-1 disc sticking out of the unit disc; that is reported as a
    warning, not a failure.
    """
    c = system.centers
    rho = system.ratio
    checks: dict[str, bool] = {}
    failures: list[str] = []
    warnings: list[str] = []

    distinct = True
    for i in range(len(c)):
        for j in range(i + 1, len(c)):
            if c[i] == c[j]:
                distinct = False
                failures.append(f"centers {i} and {j} coincide at {c[i]}")
    checks["centers_distinct"] = distinct

    moduli = np.abs(c)
    inside = moduli <= 1.0 + 1e-12
    checks["unit_disc"] = bool(inside.all())
    for idx in np.flatnonzero(~inside):
        failures.append(
            f"center {idx} has |c| = {moduli[idx]:.6g} > 1 (outside unit disc)"
        )

    nesting_ok = moduli.max(initial=0.0) + rho <= 1.0 + 1e-12
    checks["nesting"] = bool(nesting_ok)
    if not nesting_ok:
        idx = int(np.argmax(moduli))
        failures.append(
            f"max |c| + ratio = {moduli[idx] + rho:.6g} > 1 at center {idx}; "
            "child discs are not nested in their parents"
        )

    if system.disjointness_required:
        disjoint = True
        for i in range(len(c)):
            for j in range(i + 1, len(c)):
                dist = abs(c[i] - c[j])
                if dist <= 2.0 * rho:
                    disjoint = False
                    failures.append(
                        f"level-1 discs {i} and {j} overlap: "
                        f"center distance {dist:.6g} <= 2*ratio = {2 * rho:.6g}"
                    )
        checks["disjoint"] = disjoint

    for idx in np.flatnonzero(moduli > 1.0 - rho + 1e-12):
        warnings.append(
            f"center {idx}: level-1 disc reaches outside the unit disc "
            f"(|c| = {moduli[idx]:.6g} > 1 - ratio = {1 - rho:.6g})"
        )

    return ValidationReport(
        passed=all(checks.values()), checks=checks,
        failures=failures, warnings=warnings,
    )


def theta_period(system: SimilaritySystem) -> float:
    """Smallest angle period of the projection-length map theta -> |proj|.

    Detected from rotational symmetry of the center multiset: if rotation by
    2*pi/q permutes the centers, projected lengths repeat with period
    pi * gcd(2, q) / q.  Falls back to pi when no symmetry is found.
    """
    c = np.sort_complex(system.centers)
    best = math.pi
    for q in range(2, 13):
        rotated = np.sort_complex(system.centers * np.exp(2j * np.pi / q))
        if np.max(np.abs(rotated - c)) <= 1e-12:
            best = min(best, math.pi * math.gcd(2, q) / q)
    return best


def system_from_json(obj) -> SimilaritySystem:
    """Build a system from the JSON document form.

    Expected shape: {"k": int, "ratio": float, "centers": [[re, im], ...],
    "disjoint": bool}.
    """
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        k = int(obj["k"])
        ratio = float(obj["ratio"])
        centers = np.array(
            [complex(re, im) for re, im in obj["centers"]], dtype=np.complex128
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise PreconditionError(f"malformed system document: {exc}") from exc
    return SimilaritySystem(
        branch_count=k, ratio=ratio, centers=centers,
        disjointness_required=bool(obj.get("disjoint", False)),
    )


def system_to_json(system: SimilaritySystem) -> dict:
    """Inverse of :func:`system_from_json`."""
    return {
        "k": system.branch_count,
        "ratio": system.ratio,
        "centers": [[z.real, z.imag] for z in system.centers],
        "disjoint": system.disjointness_required,
    }


def resolve_system(name_or_path: str) -> SimilaritySystem:
    """Resolve a system reference: the reserved name 'gasket' or a JSON file."""
    if name_or_path == "gasket":
        return gasket_system()
    with open(name_or_path, "r", encoding="utf-8") as fh:
        return system_from_json(json.load(fh))
