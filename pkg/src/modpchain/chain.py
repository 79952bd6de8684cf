"""Sparse integer chains on a 1-complex: boundary, mass, support."""

from __future__ import annotations

import math
from collections.abc import Mapping
from fractions import Fraction

from .complex import GeometricComplex, exact_sqrt
from .errors import ComplexMismatch, MalformedChain


class IntegerChain:
    """Integer coefficients on the vertices (degree 0) or edges (degree 1).

    Zero coefficients are never stored.  A negative coefficient on edge
    ``(a, b)`` is the same chain as the positive one on ``(b, a)``.
    """

    __slots__ = ("complex", "degree", "coeffs")

    def __init__(self, complex: GeometricComplex, degree: int, coeffs: Mapping[int, int] | None = None):
        if degree not in (0, 1):
            raise ValueError(f"degree must be 0 or 1, got {degree}")
        size = complex.n_vertices if degree == 0 else complex.n_edges
        clean = {}
        for i, c in (coeffs or {}).items():
            i = int(i)
            if not 0 <= i < size:
                kind = "vertex" if degree == 0 else "edge"
                raise MalformedChain(f"{kind} index {i} out of range (size {size})")
            if isinstance(c, bool) or int(c) != c:
                raise MalformedChain(f"coefficient at {i} is not an integer: {c!r}")
            if c:
                clean[i] = int(c)
        self.complex = complex
        self.degree = degree
        self.coeffs = dict(sorted(clean.items()))

    @classmethod
    def zero(cls, complex: GeometricComplex, degree: int) -> "IntegerChain":
        return cls(complex, degree)

    @classmethod
    def cell(cls, complex: GeometricComplex, degree: int, index: int, coeff: int = 1) -> "IntegerChain":
        return cls(complex, degree, {index: coeff})

    def __getitem__(self, i: int) -> int:
        return self.coeffs.get(i, 0)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs.items())

    def _check(self, other: "IntegerChain") -> None:
        if not isinstance(other, IntegerChain):
            raise TypeError(f"expected IntegerChain, got {type(other).__name__}")
        if self.degree != other.degree:
            raise ComplexMismatch(f"degree {self.degree} vs {other.degree}")
        if self.complex != other.complex:
            raise ComplexMismatch("chains live on different complexes")

    def __add__(self, other: "IntegerChain") -> "IntegerChain":
        self._check(other)
        out = dict(self.coeffs)
        for i, c in other.coeffs.items():
            out[i] = out.get(i, 0) + c
        return IntegerChain(self.complex, self.degree, out)

    def __sub__(self, other: "IntegerChain") -> "IntegerChain":
        return self + (-other)

    def __neg__(self) -> "IntegerChain":
        return IntegerChain(self.complex, self.degree, {i: -c for i, c in self.coeffs.items()})

    def __mul__(self, k: int) -> "IntegerChain":
        if not isinstance(k, int):
            return NotImplemented
        return IntegerChain(self.complex, self.degree, {i: k * c for i, c in self.coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntegerChain):
            return NotImplemented
        return self.degree == other.degree and self.coeffs == other.coeffs and self.complex == other.complex

    def __hash__(self) -> int:
        return hash((self.degree, tuple(self.coeffs.items())))

    def __repr__(self) -> str:
        return f"IntegerChain(degree={self.degree}, coeffs={self.coeffs})"

    def transfer(self, target: GeometricComplex) -> "IntegerChain":
        """Same coefficients on a complex that extends this one."""
        if not self.complex.is_prefix_of(target):
            raise ComplexMismatch("target complex does not extend the chain's complex")
        return IntegerChain(target, self.degree, self.coeffs)

    def max_abs(self) -> int:
        return max((abs(c) for c in self.coeffs.values()), default=0)


def boundary(chain: IntegerChain) -> IntegerChain:
    if chain.degree != 1:
        raise ValueError("boundary is defined here for 1-chains only")
    out: dict[int, int] = {}
    edges = chain.complex.edges
    for e, c in chain.coeffs.items():
        t, h = edges[e]
        out[h] = out.get(h, 0) + c
        out[t] = out.get(t, 0) - c
    return IntegerChain(chain.complex, 0, out)


def mass(chain: IntegerChain) -> int | float:
    """Sum of |coefficient| times cell size; an exact int in degree 0."""
    if chain.degree == 0:
        return sum(abs(c) for c in chain.coeffs.values())
    lengths = chain.complex.edge_lengths
    return math.fsum(abs(c) * lengths[e] for e, c in chain.coeffs.items())


def exact_mass(chain: IntegerChain) -> int | Fraction | None:
    """Mass as an exact rational, or None if a supporting edge has irrational length."""
    if chain.degree == 0:
        return mass(chain)
    total = Fraction(0)
    for e, c in chain.coeffs.items():
        le = exact_sqrt(chain.complex.squared_length(e))
        if le is None:
            return None
        total += abs(c) * le
    return total


def support(chain: IntegerChain) -> frozenset[int]:
    return frozenset(chain.coeffs)
