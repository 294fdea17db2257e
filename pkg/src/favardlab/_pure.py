"""Pure numpy implementations of the hot kernels.

Reference semantics for ``favardlab._core`` (the Cython build of the same
kernels).  Every function here must stay behaviorally identical to its
compiled twin; ``tests/test_kernels.py`` cross-checks the two backends.
"""

import numpy as np

BACKEND_NAME = "pure"


def union_measure_sorted(p, half_width):
    """Measure of the union of intervals [p_i - r, p_i + r] for sorted p."""
    n = p.shape[0]
    if n == 0:
        return 0.0
    two_r = 2.0 * half_width
    if n == 1:
        return two_r
    return float(np.minimum(np.diff(p), two_r).sum() + two_r)


def union_measure_sorted_rows(p, half_width):
    """Row-wise union measure for a 2-D array sorted along axis 1."""
    if p.shape[1] == 0:
        return np.zeros(p.shape[0])
    two_r = 2.0 * half_width
    if p.shape[1] == 1:
        return np.full(p.shape[0], two_r)
    return np.minimum(np.diff(p, axis=1), two_r).sum(axis=1) + two_r


def merge_intervals(starts, ends):
    """Merge intervals given sorted-by-start endpoint arrays.

    Touching intervals (end == next start) are merged.  Returns the merged
    (starts, ends) pair.
    """
    if starts.shape[0] == 0:
        return starts[:0].copy(), ends[:0].copy()
    cmax = np.maximum.accumulate(ends)
    new_group = np.empty(starts.shape[0], dtype=bool)
    new_group[0] = True
    new_group[1:] = starts[1:] > cmax[:-1]
    first = np.flatnonzero(new_group)
    last = np.append(first[1:] - 1, starts.shape[0] - 1)
    return starts[first].copy(), cmax[last].copy()


def multiplicity_events(p, half_width):
    """Coverage-count sweep over intervals [p_i - r, p_i + r], p sorted.

    Returns (breakpoints, counts) where counts[i] is the number of covering
    intervals on the open piece (breakpoints[i], breakpoints[i+1]).  At a
    coordinate carrying both an opening and a closing endpoint the opening is
    processed first, so touching intervals overlap at the shared point only
    (a measure-zero effect).
    """
    n = p.shape[0]
    if n == 0:
        return np.empty(0), np.empty(0, dtype=np.int64)
    coords = np.concatenate([p - half_width, p + half_width])
    deltas = np.concatenate(
        [np.ones(n, dtype=np.int64), -np.ones(n, dtype=np.int64)]
    )
    kinds = np.concatenate(
        [np.zeros(n, dtype=np.int8), np.ones(n, dtype=np.int8)]
    )
    order = np.lexsort((kinds, coords))
    coords = coords[order]
    running = np.cumsum(deltas[order])
    last_at_coord = np.empty(coords.shape[0], dtype=bool)
    last_at_coord[:-1] = coords[1:] > coords[:-1]
    last_at_coord[-1] = True
    breakpoints = coords[last_at_coord]
    counts = running[last_at_coord][:-1]
    return breakpoints, counts


def needle_hits(xs, ys, cos_t, sin_t, u, half_width, chunk=65536):
    """Count needle samples whose line meets some disc.

    Sample i hits iff |u_i - (x_j cos t_i + y_j sin t_i)| <= half_width for
    some disc j.
    """
    n_samples = cos_t.shape[0]
    if xs.shape[0] == 0 or n_samples == 0:
        return 0
    hits = 0
    for lo in range(0, n_samples, chunk):
        hi = min(lo + chunk, n_samples)
        proj = np.outer(cos_t[lo:hi], xs) + np.outer(sin_t[lo:hi], ys)
        dist = np.abs(proj - u[lo:hi, None])
        hits += int((dist.min(axis=1) <= half_width).sum())
    return hits
