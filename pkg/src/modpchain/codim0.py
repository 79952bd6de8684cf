"""Top-dimensional chains on axis-aligned cube grids.

A grid chain is an integer function on the cells; its boundary lives on the
cell faces and the multiplicity on a face is the jump of the function across
it.  Outside the grid the function is zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .complex import as_rational
from .modp import check_p


@dataclass(frozen=True, eq=False)
class GridChain:
    dims: tuple[int, ...]
    theta: np.ndarray
    cell_edge: Fraction = field(default=Fraction(1))

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 1 for d in dims):
            raise ValueError(f"grid dims must be positive, got {dims}")
        theta = np.asarray(self.theta)
        if theta.dtype.kind not in "iu":
            if theta.size and not np.all(np.equal(np.mod(theta, 1), 0)):
                raise ValueError("grid values must be integers")
        theta = theta.astype(np.int64).reshape(dims) if theta.shape != dims else theta.astype(np.int64)
        theta.setflags(write=False)
        edge = as_rational(self.cell_edge)
        if edge <= 0:
            raise ValueError("cell_edge must be positive")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "cell_edge", edge)

    @property
    def ndim(self) -> int:
        return len(self.dims)

    @property
    def face_area(self) -> Fraction:
        return self.cell_edge ** (self.ndim - 1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GridChain):
            return NotImplemented
        return self.dims == other.dims and self.cell_edge == other.cell_edge and np.array_equal(self.theta, other.theta)

    def replace(self, theta) -> "GridChain":
        return GridChain(self.dims, theta, self.cell_edge)


def _select_array(a: np.ndarray, p: int) -> np.ndarray:
    r = np.mod(a, p)
    return np.where(2 * r > p, r - p, r)


def face_jumps(T: GridChain) -> list[np.ndarray]:
    """Per axis, the jumps across every face perpendicular to it (outer faces included)."""
    out = []
    for axis in range(T.ndim):
        pad = [(0, 0)] * T.ndim
        pad[axis] = (1, 1)
        out.append(np.diff(np.pad(T.theta, pad), axis=axis))
    return out


def grid_select(T: GridChain, p: int) -> GridChain:
    check_p(p)
    return T.replace(_select_array(T.theta, p))


def grid_boundary_mass(T: GridChain) -> Fraction:
    total = sum(int(np.abs(j).sum()) for j in face_jumps(T))
    return total * T.face_area


def grid_pmass_boundary(T: GridChain, p: int) -> Fraction:
    check_p(p)
    total = sum(int(np.abs(_select_array(j, p)).sum()) for j in face_jumps(T))
    return total * T.face_area


@dataclass(frozen=True)
class GridBoundReport:
    p: int
    lhs: Fraction  # boundary mass of the select representative
    rhs: Fraction  # (p - 1) times the p-mass of the boundary
    max_face_jump: int

    @property
    def passed(self) -> bool:
        return self.lhs <= self.rhs

    @property
    def ratio(self) -> Fraction | None:
        """lhs / rhs (at most 1 when the inequality holds); None if rhs is zero."""
        return self.lhs / self.rhs if self.rhs else None

    @property
    def constant(self) -> Fraction | None:
        """lhs over the p-mass of the boundary (at most p - 1); None if that is zero."""
        pm = self.rhs / (self.p - 1)
        return self.lhs / pm if pm else None


def check_grid_bound(T: GridChain, p: int) -> GridBoundReport:
    """Compare the boundary mass of the select representative with
    ``(p - 1)`` times the p-mass of the boundary, in exact rationals."""
    check_p(p)
    sel = grid_select(T, p)
    jumps = face_jumps(sel)
    max_jump = max(int(np.abs(j).max()) for j in jumps)
    return GridBoundReport(p, grid_boundary_mass(sel), (p - 1) * grid_pmass_boundary(T, p), max_jump)
