"""Reproducible fixtures built on :class:`~modpchain.rng.SplitMix64`."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .chain import IntegerChain
from .codim0 import GridChain
from .complex import GeometricComplex, build_complex, exact_sqrt
from .errors import ParamOutOfRange
from .rng import SplitMix64

MAX_CELLS = 100_000


def _need(cond: bool, msg: str) -> None:
    if not cond:
        raise ParamOutOfRange(msg)


def _distinct_points(rng: SplitMix64, count: int, dim: int, coord_range: int) -> list[tuple[int, ...]]:
    _need(1 <= dim <= 8, f"dim must be in 1..8, got {dim}")
    _need(coord_range >= 1, "coordinate range must be positive")
    _need(count <= (coord_range + 1) ** dim, f"cannot place {count} distinct points in [0, {coord_range}]^{dim}")
    seen: set[tuple[int, ...]] = set()
    out = []
    while len(out) < count:
        pt = tuple(rng.randint(0, coord_range) for _ in range(dim))
        if pt not in seen:
            seen.add(pt)
            out.append(pt)
    return out


def random_1chain(
    seed: int | SplitMix64,
    vertices: int = 6,
    edges: int = 10,
    coeff_range: int = 5,
    dim: int = 2,
    coord_range: int = 10,
) -> tuple[GeometricComplex, IntegerChain]:
    """Random multigraph on distinct lattice points with a random 1-chain.

    Coefficients are uniform in ``[-coeff_range, coeff_range]``; parallel
    edges are allowed.
    """
    rng = seed if isinstance(seed, SplitMix64) else SplitMix64(seed)
    _need(2 <= vertices <= MAX_CELLS, f"vertices must be in 2..{MAX_CELLS}")
    _need(0 <= edges <= MAX_CELLS, f"edges must be in 0..{MAX_CELLS}")
    _need(coeff_range >= 0, "coeff_range must be nonnegative")
    pts = _distinct_points(rng, vertices, dim, coord_range)
    segs = []
    while len(segs) < edges:
        t, h = rng.below(vertices), rng.below(vertices)
        if t != h:
            segs.append((t, h))
    K = build_complex(pts, segs)
    coeffs = {e: rng.randint(-coeff_range, coeff_range) for e in range(edges)}
    return K, IntegerChain(K, 1, coeffs)


def random_rational_complex(
    seed: int | SplitMix64,
    vertices: int = 5,
    edges: int = 8,
    spacing: Fraction = Fraction(1, 2),
    side: int = 4,
) -> GeometricComplex:
    """Points on a planar lattice joined only where the distance is rational
    (axis-parallel pairs and Pythagorean offsets), so every length is exact."""
    rng = seed if isinstance(seed, SplitMix64) else SplitMix64(seed)
    _need(vertices >= 2, "need at least two vertices")
    for _ in range(100):
        pts = _distinct_points(rng, vertices, 2, side)
        pairs = [
            (i, j)
            for i in range(vertices)
            for j in range(vertices)
            if i != j and exact_sqrt(Fraction(sum((a - b) ** 2 for a, b in zip(pts[i], pts[j])))) is not None
        ]
        if pairs or edges == 0:
            break
    else:
        raise ParamOutOfRange("no pair of lattice points at rational distance after 100 draws")
    segs = [rng.choice(pairs) for _ in range(edges)]
    return build_complex([[spacing * c for c in p] for p in pts], segs)


def random_0chain(rng: SplitMix64, K: GeometricComplex, coeff_range: int) -> IntegerChain:
    return IntegerChain(K, 0, {v: rng.randint(-coeff_range, coeff_range) for v in range(K.n_vertices)})


def random_grid(seed: int | SplitMix64, dims, value_range: int) -> GridChain:
    """Grid chain with cell values uniform in ``[-value_range, value_range]``, row-major draw order."""
    rng = seed if isinstance(seed, SplitMix64) else SplitMix64(seed)
    dims = tuple(int(d) for d in dims)
    _need(bool(dims) and all(d >= 1 for d in dims), f"dims must be positive, got {list(dims)}")
    size = int(np.prod(dims))
    _need(size <= MAX_CELLS, f"grid has {size} cells, limit {MAX_CELLS}")
    _need(value_range >= 0, "range must be nonnegative")
    vals = [rng.randint(-value_range, value_range) for _ in range(size)]
    return GridChain(dims, np.array(vals, dtype=np.int64).reshape(dims))


def parallel_bundle(k: int) -> tuple[GeometricComplex, IntegerChain]:
    """k parallel unit edges 0 -> 1 in R^1, each with multiplicity 1."""
    _need(1 <= k <= MAX_CELLS, f"k must be in 1..{MAX_CELLS}")
    K = build_complex([[0], [1]], [(0, 1)] * k)
    return K, IntegerChain(K, 1, {e: 1 for e in range(k)})


def path_graph(n: int) -> tuple[GeometricComplex, IntegerChain]:
    """Unit edges i -> i+1 for i < n in R^1, each with multiplicity 1."""
    _need(1 <= n <= MAX_CELLS, f"n must be in 1..{MAX_CELLS}")
    K = build_complex([[i] for i in range(n + 1)], [(i, i + 1) for i in range(n)])
    return K, IntegerChain(K, 1, {e: 1 for e in range(n)})
