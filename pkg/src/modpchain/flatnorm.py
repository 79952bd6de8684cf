"""Bounded exact flat norm (and flat norm mod p) on a finite 1-complex.

For a 0-chain T the oracle minimises ``M(R) + M(S)`` over integer chains
with ``T = R + dS (+ pQ)`` and every coefficient in ``[-B, B]``.  The search
is a depth-first branch and bound over the edge coefficients of S in edge
index order.  A first pass finds the optimal value; a second pass walks
values in ascending order and stops at the first leaf attaining it, which is
the lexicographically smallest ``(S, Q)``.  Q is chosen per vertex once S is
fixed.  A 1-chain has no 2-cells to fill on a 1-complex, so there S is empty
and the minimum is taken over Q alone.

The oracle is exponential on purpose; instances with more than 12 edges or
``B > 50`` are refused unless ``force=True``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from .chain import IntegerChain, boundary, exact_mass, mass
from .complex import GeometricComplex, Point, as_point
from .errors import ApexCollision, DimensionMismatch, InstanceTooLarge, ParamOutOfRange
from .modp import check_p, select_residue

MAX_EDGES = 12
MAX_BOUND = 50
FLOAT_TIE = 1e-9


@dataclass(frozen=True)
class FlatNormDecomposition:
    value: Fraction | float
    R: IntegerChain
    S: IntegerChain | None
    Q: IntegerChain
    bound_used: int
    saturated: bool
    p: int | None = None

    @property
    def exact(self) -> bool:
        return isinstance(self.value, Fraction)

    def residual(self) -> IntegerChain:
        """T rebuilt from the witness."""
        t = self.R + (self.p or 0) * self.Q
        if self.S is not None:
            t = t + boundary(self.S)
        return t


def default_bound(T: IntegerChain, p: int | None = None) -> int:
    return 2 * T.max_abs() + (p or 0)


def _guard(T: IntegerChain, B: int, force: bool) -> None:
    if B < T.max_abs():
        raise ParamOutOfRange(f"bound {B} is below the largest coefficient {T.max_abs()}")
    if force:
        return
    if T.complex.n_edges > MAX_EDGES:
        raise InstanceTooLarge(f"{T.complex.n_edges} edges exceeds the oracle limit {MAX_EDGES}")
    if B > MAX_BOUND:
        raise InstanceTooLarge(f"bound {B} exceeds the oracle limit {MAX_BOUND}")


def _closest(r: int, p: int | None, B: int) -> tuple[int, int] | None:
    """(R, Q) with r = R + pQ, |R|, |Q| <= B and |R| minimal, Q smallest on ties."""
    if p is None:
        return (r, 0) if abs(r) <= B else None
    R = select_residue(r, p)
    Q = (r - R) // p
    if abs(Q) > B:
        Q = B if Q > 0 else -B
        R = r - p * Q
    if abs(R) > B:
        return None
    return R, Q


class _Costs:
    """Integer costs (scaled by twice the common length denominator) when all
    lengths are rational, floats otherwise.  The factor 2 keeps half-edge
    costs integral."""

    def __init__(self, K: GeometricComplex):
        exact = K.exact_lengths
        if exact is not None:
            L = math.lcm(1, *(x.denominator for x in exact))
            self.scale = 2 * L
            self.vertex = 2 * L
            self.edge = [int(2 * x * L) for x in exact]
            self.half = [int(x * L) for x in exact]
            self.eps = 0
        else:
            self.scale = 2.0
            self.vertex = 2.0
            self.edge = [2.0 * x for x in K.edge_lengths]
            self.half = list(K.edge_lengths)
            self.eps = FLOAT_TIE
        self.exact = exact is not None

    def value(self, total):
        return Fraction(total, self.scale) if self.exact else total / self.scale


def _search_vertices(T: IntegerChain, p: int | None, B: int):
    K = T.complex
    E, V = K.n_edges, K.n_vertices
    costs = _Costs(K)
    eps = costs.eps
    edges = K.edges
    fold = (lambda r: abs(r)) if p is None else (lambda r: abs(select_residue(r, p)))

    last = [-1] * V
    for e, (t, h) in enumerate(edges):
        last[t] = max(last[t], e)
        last[h] = max(last[h], e)
    # cheapest way to absorb one unit of residual at v using edges >= k
    cmin = [[costs.vertex] * (E + 1) for _ in range(V)]
    for v in range(V):
        inc = sorted(K.incident_edges[v])
        for k in range(E - 1, -1, -1):
            c = cmin[v][k + 1]
            if k in inc:
                c = min(c, costs.half[k])
            cmin[v][k] = c

    # earlier edges on the same carrier, with relative orientation
    twins: list[list[tuple[int, int]]] = [[] for _ in range(E)]
    for f, (tf, hf) in enumerate(edges):
        for e in range(f):
            te, he = edges[e]
            if (te, he) == (tf, hf):
                twins[f].append((e, 1))
            elif (te, he) == (hf, tf):
                twins[f].append((e, -1))

    # open vertices at depth k grouped by connectivity through edges >= k;
    # edges preserve the residual sum of a group, so only vertices can pay it
    groups: list[list[list[int]]] = []
    for k in range(E + 1):
        parent = list(range(V))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for t, h in edges[k:]:
            parent[find(t)] = find(h)
        by_root: dict[int, list[int]] = {}
        for v in range(V):
            if last[v] >= k:
                by_root.setdefault(find(v), []).append(v)
        groups.append(list(by_root.values()))

    def lower(k: int):
        total = 0
        for g in groups[k]:
            spread = sum(contrib[v] for v in g)
            imbalance = costs.vertex * fold(sum(r[v] for v in g))
            total += spread if spread > imbalance else imbalance
        return total

    r = [T[v] for v in range(V)]
    acc0 = 0
    contrib = [0] * V
    for v in range(V):
        if last[v] < 0:
            got = _closest(r[v], p, B)
            if got is None:
                return None, costs
            acc0 += costs.vertex * abs(got[0])
        else:
            contrib[v] = cmin[v][0] * fold(r[v])

    # incumbent: S = 0
    best = 0
    for v in range(V):
        got = _closest(r[v], p, B)
        if got is None:
            best = math.inf
            break
        best += costs.vertex * abs(got[0])
    S = [0] * E
    by_size = sorted(range(-B, B + 1), key=lambda x: (abs(x), x))

    def close(v: int):
        got = _closest(r[v], p, B)
        return None if got is None else costs.vertex * abs(got[0])

    def dfs(k: int, acc, limit, lexical: bool) -> bool:
        # lexical=False: any leaf below ``limit`` tightens it (value search);
        # lexical=True: stop at the first leaf within ``limit`` (witness search)
        nonlocal best
        if k == E:
            if lexical:
                return acc <= limit + eps
            if acc < best - eps:
                best = acc
            return False
        t, h = edges[k]
        ce = costs.edge[k]
        rt0, rh0 = r[t], r[h]
        ct0, ch0 = contrib[t], contrib[h]
        lo, hi = _twin_window(twins[k], S, B)
        values = range(lo, hi + 1) if lexical else (x for x in by_size if lo <= x <= hi)
        for s in values:
            cap = limit + eps if lexical else best - eps
            a = acc + ce * abs(s)
            if a > cap or (not lexical and a == cap and not eps):
                continue
            r[t] = rt0 + s
            r[h] = rh0 - s
            ok = True
            for v in (t, h):
                if last[v] == k:
                    c = close(v)
                    if c is None:
                        ok = False
                        break
                    a += c
                    contrib[v] = 0
                else:
                    contrib[v] = cmin[v][k + 1] * fold(r[v])
            if ok:
                bound = a + lower(k + 1)
                if bound < cap or (bound == cap and (lexical or eps)):
                    S[k] = s
                    if dfs(k + 1, a, limit, lexical):
                        r[t], r[h] = rt0, rh0
                        contrib[t], contrib[h] = ct0, ch0
                        return True
                    S[k] = 0
            r[t], r[h] = rt0, rh0
            contrib[t], contrib[h] = ct0, ch0
        return False

    dfs(0, acc0, None, False)
    if best == math.inf:
        return None, costs
    saved = contrib.copy()
    if not dfs(0, acc0, best, True):
        raise AssertionError("witness search missed the optimum")
    contrib[:] = saved
    return (best, S.copy()), costs


def _twin_window(twins, S, B) -> tuple[int, int]:
    """Values of S_f compatible with a lexicographically minimal optimum.

    For parallel edges e < f only the sum ``g = S_e + sigma*S_f`` reaches the
    boundary; opposite signs cost strictly more, and among same-sign splits of
    g the smallest S_e is ``max(0, g - B)`` (g >= 0) or ``max(g, -B)`` (g < 0).
    Inverting that for a fixed S_e = a pins sigma*S_f to B (a > 0), [0, B]
    (a = 0), 0 (-B < a < 0) or [-B, 0] (a = -B).
    """
    lo, hi = -B, B
    for e, sigma in twins:
        a = S[e]
        if a > 0:
            wl, wh = B, B
        elif a == 0:
            wl, wh = 0, B
        elif a > -B:
            wl, wh = 0, 0
        else:
            wl, wh = -B, 0
        if sigma < 0:
            wl, wh = -wh, -wl
        lo, hi = max(lo, wl), min(hi, wh)
    return lo, hi


def _decompose(T: IntegerChain, p: int | None, B: int, force: bool) -> FlatNormDecomposition:
    if p is not None:
        check_p(p)
    _guard(T, B, force)
    K = T.complex
    if T.degree == 1:
        return _decompose_edges(T, p, B)
    found, costs = _search_vertices(T, p, B)
    if found is None:
        raise ParamOutOfRange(f"no decomposition with coefficients in [-{B}, {B}]")
    total, svec = found
    S = IntegerChain(K, 1, dict(enumerate(svec)))
    resid = T - boundary(S)
    R, Q = {}, {}
    for v in range(K.n_vertices):
        Rv, Qv = _closest(resid[v], p, B)
        R[v], Q[v] = Rv, Qv
    Rc, Qc = IntegerChain(K, 0, R), IntegerChain(K, 0, Q)
    sat = max(S.max_abs(), Rc.max_abs(), Qc.max_abs()) >= B > 0
    return FlatNormDecomposition(costs.value(total), Rc, S, Qc, B, sat, p)


def _decompose_edges(T: IntegerChain, p: int | None, B: int) -> FlatNormDecomposition:
    K = T.complex
    R, Q = {}, {}
    for e, c in T:
        got = _closest(c, p, B)
        if got is None:
            raise ParamOutOfRange(f"no decomposition with coefficients in [-{B}, {B}]")
        R[e], Q[e] = got
    Rc, Qc = IntegerChain(K, 1, R), IntegerChain(K, 1, Q)
    value = exact_mass(Rc)
    value = mass(Rc) if value is None else Fraction(value)
    sat = max(Rc.max_abs(), Qc.max_abs()) >= B > 0
    return FlatNormDecomposition(value, Rc, None, Qc, B, sat, p)


def flat_norm(T: IntegerChain, B: int | None = None, *, force: bool = False) -> FlatNormDecomposition:
    """Bounded flat norm of T with a canonical witness ``T = R + dS``."""
    return _decompose(T, None, default_bound(T) if B is None else B, force)


def flat_norm_mod_p(T: IntegerChain, p: int, B: int | None = None, *, force: bool = False) -> FlatNormDecomposition:
    """Bounded flat norm mod p with a canonical witness ``T = R + dS + pQ``."""
    check_p(p)
    return _decompose(T, p, default_bound(T, p) if B is None else B, force)


@dataclass(frozen=True)
class Relaxation:
    value: Fraction | float
    method: str  # "dual-certificate", "exact-simplex" or "float"


def _lp_data(T: IntegerChain):
    K = T.complex
    E, V = K.n_edges, K.n_vertices
    A = np.zeros((V, 2 * E + 2 * V), dtype=np.int64)
    for j, (t, h) in enumerate(K.edges):
        A[h, j] += 1
        A[t, j] -= 1
        A[h, E + j] -= 1
        A[t, E + j] += 1
    for v in range(V):
        A[v, 2 * E + v] = 1
        A[v, 2 * E + V + v] = -1
    b = np.array([T[v] for v in range(V)], dtype=np.int64)
    return A, b


def relaxed_flat_norm(T: IntegerChain, B: int | None = None) -> Relaxation:
    """Continuous relaxation of the bounded flat norm of a 0-chain.

    With rational lengths the optimum is returned exactly: the floating LP
    solution is rounded to rationals and accepted only if a primal point and
    a dual Lagrangian bound meet in exact arithmetic; otherwise an exact
    rational simplex decides.
    """
    if T.degree != 0:
        raise ValueError("the relaxation is defined for 0-chains")
    B = default_bound(T) if B is None else B
    K = T.complex
    V = K.n_vertices
    A, b = _lp_data(T)
    exact = K.exact_lengths
    lengths = list(exact) if exact is not None else list(K.edge_lengths)
    c_exact = lengths + lengths + [Fraction(1)] * (2 * V)
    c = np.array([float(x) for x in c_exact])
    res = linprog(c, A_eq=A, b_eq=b, bounds=[(0, B)] * len(c), method="highs-ds")
    if res.status != 0:
        raise ParamOutOfRange(f"relaxation infeasible: {res.message}")
    if exact is None:
        return Relaxation(float(res.fun), "float")

    den = math.lcm(1, *(x.denominator for x in exact))
    x = [Fraction(xi).limit_denominator(1000) for xi in res.x]
    y = [Fraction(yi).limit_denominator(max(1000, 4 * den)) for yi in res.eqlin.marginals]
    primal_ok = all(0 <= xi <= B for xi in x) and all(
        sum(int(A[i, j]) * x[j] for j in range(A.shape[1]) if A[i, j]) == int(b[i]) for i in range(V)
    )
    if primal_ok:
        upper = sum(ci * xi for ci, xi in zip(c_exact, x))
        lower = sum(yi * int(bi) for yi, bi in zip(y, b))
        for j in range(A.shape[1]):
            reduced = c_exact[j] - sum(y[i] * int(A[i, j]) for i in range(V) if A[i, j])
            lower += min(Fraction(0), reduced * B)
        if lower == upper:
            return Relaxation(upper, "dual-certificate")
    return Relaxation(_exact_simplex(c_exact, A, b, B), "exact-simplex")


def _exact_simplex(c_exact, A, b, B) -> Fraction:
    from sympy import Matrix, Rational
    from sympy.solvers.simplex import linprog as sym_linprog

    n = A.shape[1]
    C = Matrix([Rational(x.numerator, x.denominator) for x in c_exact])
    Aeq = Matrix(A.tolist())
    beq = Matrix([int(x) for x in b])
    # sympy wants an inequality block; 0 <= 0 is inert
    value, _ = sym_linprog(C, Matrix([[0] * n]), Matrix([0]), Aeq, beq, bounds=(0, B))
    return Fraction(int(value.p), int(value.q))


def zero_sum_check(R: IntegerChain, p: int) -> bool:
    """True iff the coefficients of the 0-chain R sum to 0 mod p."""
    check_p(p)
    if R.degree != 0:
        raise ValueError("zero_sum_check takes a 0-chain")
    return sum(c for _, c in R) % p == 0


def cone(R: IntegerChain, apex) -> tuple[GeometricComplex, IntegerChain]:
    """Join every atom of the 0-chain R to ``apex`` by a segment oriented
    towards the apex, with R's multiplicity.

    Returns the extended complex and the cone C, for which
    ``dC = (sum of R) * apex - R``.  An existing vertex at the apex is reused.
    """
    if R.degree != 0:
        raise ValueError("cone is built over a 0-chain")
    K = R.complex
    x0: Point = as_point(apex)
    if len(x0) != K.ambient_dim:
        raise DimensionMismatch(f"apex has {len(x0)} coordinates, complex has {K.ambient_dim}")
    for v, _ in R:
        if K.vertices[v] == x0:
            raise ApexCollision(f"apex coincides with support vertex {v}")
    idx = K.vertex_index(x0)
    new_points = []
    if idx is None:
        idx = K.n_vertices
        new_points = [x0]
    segs = [(v, idx) for v, _ in R]
    K2 = K.extend(new_points, segs)
    C = IntegerChain(K2, 1, {K.n_edges + i: c for i, (_, c) in enumerate(R)})
    return K2, C
