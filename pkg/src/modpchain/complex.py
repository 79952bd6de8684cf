"""Embedded 1-complexes with exact rational vertex coordinates."""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from .errors import DegenerateSegment, DimensionMismatch

Point = tuple[Fraction, ...]

# extra bits carried through the integer square root before rounding to float
_SQRT_GUARD_BITS = 64


def as_rational(value) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to a Fraction.

    Floats are refused so coordinates never carry binary rounding.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not coordinates")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"expected int, Fraction or 'p/q' string, got {type(value).__name__}")


def as_point(coords: Iterable) -> Point:
    return tuple(as_rational(c) for c in coords)


def squared_distance(a: Point, b: Point) -> Fraction:
    return sum(((x - y) ** 2 for x, y in zip(a, b)), Fraction(0))


def exact_sqrt(q: Fraction) -> Fraction | None:
    """Square root of a nonnegative rational if it is rational, else None."""
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def float_sqrt(q: Fraction) -> float:
    """Nearly correctly rounded float square root of a nonnegative rational."""
    exact = exact_sqrt(q)
    if exact is not None:
        return float(exact)
    n, d = q.numerator, q.denominator
    k = _SQRT_GUARD_BITS
    # sqrt(n/d) = sqrt(n*d) / d, evaluated with k guard bits
    root = math.isqrt((n * d) << (2 * k))
    return float(Fraction(root, d << k))


@dataclass(frozen=True, eq=False)
class GeometricComplex:
    """Vertices in R^n and oriented straight edges between them.

    Parallel edges are allowed; an edge is identified by its index, never by
    its endpoints.
    """

    ambient_dim: int
    vertices: tuple[Point, ...]
    edges: tuple[tuple[int, int], ...]
    edge_lengths: tuple[float, ...] = field(repr=False)

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, GeometricComplex):
            return NotImplemented
        return (
            self.ambient_dim == other.ambient_dim
            and self.vertices == other.vertices
            and self.edges == other.edges
        )

    def __hash__(self) -> int:
        return hash((self.ambient_dim, self.vertices, self.edges))

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def squared_length(self, e: int) -> Fraction:
        t, h = self.edges[e]
        return squared_distance(self.vertices[t], self.vertices[h])

    @cached_property
    def exact_lengths(self) -> tuple[Fraction, ...] | None:
        """Edge lengths as Fractions when every one of them is rational."""
        out = []
        for e in range(self.n_edges):
            r = exact_sqrt(self.squared_length(e))
            if r is None:
                return None
            out.append(r)
        return tuple(out)

    @cached_property
    def incident_edges(self) -> tuple[tuple[int, ...], ...]:
        inc: list[list[int]] = [[] for _ in self.vertices]
        for e, (t, h) in enumerate(self.edges):
            inc[t].append(e)
            inc[h].append(e)
        return tuple(tuple(x) for x in inc)

    def vertex_index(self, point: Point) -> int | None:
        for i, v in enumerate(self.vertices):
            if v == point:
                return i
        return None

    def extend(self, points: Sequence[Point] = (), segments: Sequence[tuple[int, int]] = ()) -> "GeometricComplex":
        """New complex with extra vertices and edges appended after the old ones."""
        return build_complex(list(self.vertices) + list(points), list(self.edges) + list(segments))

    def is_prefix_of(self, other: "GeometricComplex") -> bool:
        return (
            self.ambient_dim == other.ambient_dim
            and other.vertices[: self.n_vertices] == self.vertices
            and other.edges[: self.n_edges] == self.edges
        )


def build_complex(points: Sequence, segments: Sequence[Sequence[int]]) -> GeometricComplex:
    pts = tuple(as_point(p) for p in points)
    dims = {len(p) for p in pts}
    if len(dims) > 1:
        raise DimensionMismatch(f"points have mixed arity {sorted(dims)}")
    n = dims.pop() if dims else 0
    if pts and n == 0:
        raise DimensionMismatch("points must have at least one coordinate")
    edges = []
    lengths = []
    for k, seg in enumerate(segments):
        t, h = (int(i) for i in seg)
        if not (0 <= t < len(pts) and 0 <= h < len(pts)):
            raise IndexError(f"segment {k} references a missing vertex: {(t, h)}")
        if t == h:
            raise DegenerateSegment(f"segment {k} is a loop at vertex {t}")
        sq = squared_distance(pts[t], pts[h])
        if sq == 0:
            raise DegenerateSegment(f"segment {k} joins coincident points {t} and {h}")
        edges.append((t, h))
        lengths.append(float_sqrt(sq))
    return GeometricComplex(n, pts, tuple(edges), tuple(lengths))


@dataclass(frozen=True)
class Refinement:
    """Output of :func:`refine_overlaps`.

    ``segment_map[i]`` lists ``(edge, sign)`` pairs whose signed sum is input
    segment ``i``; ``vertex_map[j]`` is the output index of input point ``j``.
    """

    complex: GeometricComplex
    segment_map: tuple[tuple[tuple[int, int], ...], ...]
    vertex_map: tuple[int, ...]

    def pull(self, coeffs: dict[int, int] | Sequence[int]):
        """Express an integer combination of input segments on the refined complex."""
        from .chain import IntegerChain

        items = coeffs.items() if isinstance(coeffs, dict) else enumerate(coeffs)
        out: dict[int, int] = {}
        for i, c in items:
            for e, s in self.segment_map[i]:
                out[e] = out.get(e, 0) + s * c
        return IntegerChain(self.complex, 1, out)


def _line_key(a: Point, b: Point):
    """Canonical description of the line through a and b, plus the axis used
    as the line parameter."""
    d = [y - x for x, y in zip(a, b)]
    k = next(i for i, c in enumerate(d) if c != 0)
    d = tuple(c / d[k] for c in d)
    base = tuple(x - a[k] * c for x, c in zip(a, d))
    return (k, d, base), k


def refine_overlaps(points: Sequence, segments: Sequence[Sequence[int]]) -> Refinement:
    """Split collinear overlapping segments at every breakpoint.

    Coincident points are merged.  Transversal crossings are left alone.
    Output edges keep the orientation of the first input segment that covers
    them and are numbered in order of first covering segment, then along it.
    """
    pts = [as_point(p) for p in points]
    if len({len(p) for p in pts}) > 1:
        raise DimensionMismatch("points have mixed arity")
    uniq: list[Point] = []
    index_of: dict[Point, int] = {}
    vmap = []
    for p in pts:
        if p not in index_of:
            index_of[p] = len(uniq)
            uniq.append(p)
        vmap.append(index_of[p])

    # parameter value of every output vertex along each carrier line
    lines: dict = {}
    seg_line = []
    for t, h in segments:
        a, b = pts[t], pts[h]
        if a == b:
            seg_line.append(None)
            continue
        key, axis = _line_key(a, b)
        lines.setdefault(key, set()).update((a[axis], b[axis]))
        seg_line.append((key, axis))

    breakpoints = {key: sorted(ts) for key, ts in lines.items()}
    # point on the line at parameter t, as an output vertex index
    def vertex_at(key, t):
        k, d, base = key
        p = tuple(x + t * c for x, c in zip(base, d))
        return index_of[p]

    edges: list[tuple[int, int]] = []
    edge_of_piece: dict = {}
    seg_map = []
    for (t, h), info in zip(segments, seg_line):
        if info is None:
            seg_map.append(())
            continue
        key, axis = info
        ta, tb = pts[t][axis], pts[h][axis]
        forward = ta < tb
        lo, hi = (ta, tb) if forward else (tb, ta)
        bps = [x for x in breakpoints[key] if lo <= x <= hi]
        pieces = list(zip(bps[:-1], bps[1:]))
        if not forward:
            pieces.reverse()
        terms = []
        for u, w in pieces:
            piece = (key, u, w)
            if piece not in edge_of_piece:
                vu, vw = vertex_at(key, u), vertex_at(key, w)
                edge_of_piece[piece] = (len(edges), 1 if forward else -1)
                edges.append((vu, vw) if forward else (vw, vu))
            e, orient = edge_of_piece[piece]
            terms.append((e, orient if forward else -orient))
        seg_map.append(tuple(terms))

    return Refinement(build_complex(uniq, edges), tuple(seg_map), tuple(vmap))
