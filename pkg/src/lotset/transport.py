"""Exact discrete optimal transport between equal-size uniform point sets.

With squared Euclidean cost and uniform weights 1/N on both sides, the
transport LP always has a permutation solution, so the problem reduces to
a linear assignment. ``solve_lap`` is a dense Jonker-Volgenant style
solver: column reduction with greedy pre-assignment, then shortest
augmenting paths, both sweeping reference indices in ascending order, so
tie-breaking among equal-cost optima is deterministic. Exact (no
regularization), O(N^3) worst case.

The point-set entry points solve a centered, unit-RMS-scaled copy of the
instance: translating either set or rescaling it isotropically changes
the objective only by permutation-independent terms (the variable part is
max over pairings of sum  s_i . r_j), so the set of optimal permutations
is exactly preserved while the search gets much cheaper on strongly
deformed inputs. Reported costs are always recomputed from the raw
coordinates.

``lot_transform`` reorders the source points into reference order using
the optimal assignment. Rows of the resulting embedding are indexed by
the reference, which makes the self-embedding the identity and lets
affine deformations of the source act rowwise on the embedding whenever
the assignment is unchanged.
"""

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import (
    CardinalityMismatch,
    DimensionMismatch,
    NonFiniteCoordinate,
    ReferenceMismatch,
    ShapeMismatch,
)
from .pointset import PointSet


def _lap_kernel(cost):
    # cost[j, i]: row j = reference index, column i = source index.
    # Returns src_of_ref with src_of_ref[j] = matched source index.
    n = cost.shape[0]
    inf = np.inf
    u = np.zeros(n)  # reference duals
    v = np.zeros(n)  # source duals
    src_of_ref = np.full(n, -1, dtype=np.int64)
    ref_of_src = np.full(n, -1, dtype=np.int64)

    # column reduction, then greedy pre-assignment in ascending reference order
    for i in range(n):
        best = cost[0, i]
        for j in range(1, n):
            if cost[j, i] < best:
                best = cost[j, i]
        v[i] = best
    for j in range(n):
        best = inf
        arg = -1
        for i in range(n):
            c = cost[j, i] - v[i]
            if c < best:
                best = c
                arg = i
        u[j] = best
        if ref_of_src[arg] == -1:
            ref_of_src[arg] = j
            src_of_ref[j] = arg

    path = np.full(n, -1, dtype=np.int64)
    remaining = np.empty(n, dtype=np.int64)
    shortest = np.empty(n)
    in_tree = np.zeros(n, dtype=np.bool_)
    scanned = np.empty(n, dtype=np.int64)

    for cur_ref in range(n):
        if src_of_ref[cur_ref] != -1:
            continue
        # Dijkstra over source columns, growing an alternating tree from cur_ref
        num_remaining = n
        for it in range(n):
            remaining[it] = it
        shortest[:] = inf
        in_tree[:] = False
        num_scanned = 0
        min_val = 0.0
        j = cur_ref
        sink = -1
        while sink == -1:
            in_tree[j] = True
            index = -1
            lowest = inf
            for it in range(num_remaining):
                i = remaining[it]
                r = min_val + cost[j, i] - u[j] - v[i]
                if r < shortest[i]:
                    path[i] = j
                    shortest[i] = r
                # on equal path cost prefer an unassigned column: ends the search sooner
                if shortest[i] < lowest or (shortest[i] == lowest and ref_of_src[i] == -1):
                    lowest = shortest[i]
                    index = it
            min_val = lowest
            i_min = remaining[index]
            if ref_of_src[i_min] == -1:
                sink = i_min
            else:
                j = ref_of_src[i_min]
            scanned[num_scanned] = i_min
            num_scanned += 1
            num_remaining -= 1
            remaining[index] = remaining[num_remaining]
        # dual update keeps reduced costs of tree edges at zero
        u[cur_ref] += min_val
        for k in range(n):
            if in_tree[k] and k != cur_ref:
                u[k] += min_val - shortest[src_of_ref[k]]
        for t in range(num_scanned):
            i = scanned[t]
            v[i] -= min_val - shortest[i]
        # augment along the stored predecessor path
        i = sink
        while True:
            j = path[i]
            ref_of_src[i] = j
            nxt = src_of_ref[j]
            src_of_ref[j] = i
            i = nxt
            if j == cur_ref:
                break
    return src_of_ref


try:  # compiled when available; the pure-Python path is semantically identical
    from numba import njit

    _lap_kernel = njit(cache=True, nogil=True)(_lap_kernel)
except ImportError:  # pragma: no cover
    pass


@dataclass(frozen=True)
class Assignment:
    """Optimal matching: perm[j] = index of the source point sent to reference point j."""

    perm: np.ndarray
    total_cost: float  # mean matched squared distance


@dataclass(frozen=True)
class LotEmbedding:
    """Source points reordered into reference order (row j pairs with reference point j)."""

    matrix: np.ndarray
    reference_id: str

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]


def reference_id(r: PointSet) -> str:
    """Content hash identifying a reference point set."""
    return hashlib.sha256(np.ascontiguousarray(r.points).tobytes()).hexdigest()[:16]


def _check_pair(s: PointSet, r: PointSet) -> None:
    if s.n != r.n:
        raise CardinalityMismatch(f"point counts differ: {s.n} vs {r.n}")
    if s.dim != r.dim:
        raise DimensionMismatch(f"dimensions differ: {s.dim} vs {r.dim}")


def _pair_cost(s: np.ndarray, r: np.ndarray) -> np.ndarray:
    diff = s[:, None, :] - r[None, :, :]
    return np.einsum("ijd,ijd->ij", diff, diff)


def cost_matrix(s: PointSet, r: PointSet) -> np.ndarray:
    """Squared Euclidean distances; entry (i, j) = |s_i - r_j|^2."""
    _check_pair(s, r)
    return _pair_cost(s.points, r.points)


def solve_lap(cost: np.ndarray) -> Assignment:
    """Minimize the mean matched cost over all permutations. Exact."""
    cost = np.asarray(cost, dtype=np.float64)
    if cost.ndim != 2 or cost.shape[0] != cost.shape[1]:
        raise ShapeMismatch(f"cost matrix must be square, got shape {cost.shape}")
    if not np.all(np.isfinite(cost)):
        raise NonFiniteCoordinate("cost matrix contains NaN or Inf")
    n = cost.shape[0]
    perm = _lap_kernel(np.ascontiguousarray(cost.T))
    total = float(cost[perm, np.arange(n)].sum() / n)
    return Assignment(perm, total)


def _normalized(points: np.ndarray) -> np.ndarray:
    centered = points - points.mean(axis=0)
    rms = np.sqrt((centered * centered).sum() / points.shape[0])
    return centered / rms if rms > 0 else centered


def _optimal_perm(s: PointSet, r: PointSet) -> np.ndarray:
    """Optimal assignment via the normalized instance (same optimum set)."""
    _check_pair(s, r)
    cost = _pair_cost(_normalized(s.points), _normalized(r.points))
    return _lap_kernel(np.ascontiguousarray(cost.T))


def wasserstein2(s: PointSet, r: PointSet) -> float:
    """Squared Wasserstein-2 distance between the uniform measures on s and r."""
    perm = _optimal_perm(s, r)
    diff = s.points[perm] - r.points
    return float((diff * diff).sum() / s.n)


def lot_transform(s: PointSet, r: PointSet) -> LotEmbedding:
    """Embed s against reference r: row j = source point matched to r_j."""
    perm = _optimal_perm(s, r)
    return LotEmbedding(s.points[perm].copy(), reference_id(r))


def _check_embedding_pair(a: LotEmbedding, b: LotEmbedding) -> None:
    if a.reference_id != b.reference_id:
        raise ReferenceMismatch(
            f"embeddings use different references: {a.reference_id} vs {b.reference_id}"
        )
    if a.matrix.shape != b.matrix.shape:
        raise ShapeMismatch(f"embedding shapes differ: {a.matrix.shape} vs {b.matrix.shape}")


def lot_distance(a: LotEmbedding, b: LotEmbedding) -> float:
    """Uniform-weighted L2 distance between same-reference embeddings.

    Its square upper-bounds the squared Wasserstein-2 distance between the
    underlying point sets, because the shared reference induces a feasible
    (not necessarily optimal) pairing between them.
    """
    _check_embedding_pair(a, b)
    diff = a.matrix - b.matrix
    return float(np.sqrt((diff * diff).sum() / a.n))
