"""Boundary-mass repair of 1-chains modulo p.

Starting from the representative with multiplicities in ``{1, ..., p-1}``,
every vertex whose boundary multiplicity has absolute value at least ``p``
is fixed by walking an oriented segment path out of it and replacing each
multiplicity ``m`` on the path by ``p - m`` with the orientation reversed.
Each flip lowers the integer boundary mass by at least 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .chain import IntegerChain, boundary, mass
from .errors import CoefficientOutOfRange, InternalError, MalformedChain, NotInBoundarySupport
from .modp import check_p, positive_representative, select_residue

Step = tuple[int, int]  # (edge index, +1 along stored orientation / -1 against)


@dataclass(frozen=True)
class SegmentPath:
    steps: tuple[Step, ...]
    start: int
    end: int

    def vertices(self, complex) -> list[int]:
        out = [self.start]
        for e, s in self.steps:
            t, h = complex.edges[e]
            out.append(h if s > 0 else t)
        return out

    def reversed(self) -> "SegmentPath":
        return SegmentPath(tuple((e, -s) for e, s in reversed(self.steps)), self.end, self.start)

    def problems(self, chain: IntegerChain) -> list[str]:
        """Violations of the path properties relative to ``chain``; empty if valid."""
        out = []
        edges = chain.complex.edges
        cur = self.start
        seen = set()
        for i, (e, s) in enumerate(self.steps):
            t, h = edges[e]
            tail, head = (t, h) if s > 0 else (h, t)
            if tail != cur:
                out.append(f"step {i} starts at {tail}, expected {cur}")
            if s * chain[e] <= 0:
                out.append(f"step {i} runs against the orientation of edge {e}")
            if (e, s) in seen:
                out.append(f"step {i} repeats edge {e}")
            seen.add((e, s))
            cur = head
        if cur != self.end:
            out.append(f"path ends at {cur}, expected {self.end}")
        return out


@dataclass(frozen=True)
class TraceStep:
    vertex: int
    path: SegmentPath
    boundary_mass_before: int
    boundary_mass_after: int


@dataclass(frozen=True)
class RepairCertificate:
    p: int
    input: IntegerChain
    output: IntegerChain
    quotient: IntegerChain
    trace: tuple[TraceStep, ...] = field(default=())

    @property
    def iterations(self) -> int:
        return len(self.trace)


def _walk(chain: IntegerChain, z: int, bd: IntegerChain) -> SegmentPath:
    # bd[z] < 0 here; consume unit copies of oriented segments until reaching
    # a vertex other than z with positive boundary multiplicity
    edges = chain.complex.edges
    residual = {e: abs(c) for e, c in chain}
    out: dict[int, list[Step]] = {}
    for e, c in chain:
        t, h = edges[e]
        if c > 0:
            out.setdefault(t, []).append((e, 1))
        else:
            out.setdefault(h, []).append((e, -1))
    steps: list[Step] = []
    arrived: dict[int, int] = {z: 0}  # vertex -> path length on arrival
    cur = z
    while True:
        step = next((st for st in out.get(cur, ()) if residual[st[0]] > 0), None)
        if step is None:
            raise InternalError(f"walk from {z} stuck at vertex {cur}")
        e, s = step
        residual[e] -= 1
        t, h = edges[e]
        nxt = h if s > 0 else t
        steps.append(step)
        if nxt in arrived:
            # excise the closed loop just completed
            k = arrived[nxt]
            for ee, ss in steps[k:-1]:
                tt, hh = edges[ee]
                del arrived[hh if ss > 0 else tt]
            del steps[k:]
        else:
            arrived[nxt] = len(steps)
        cur = nxt
        if cur != z and bd[cur] > 0:
            return SegmentPath(tuple(steps), z, cur)


def extract_chain(chain: IntegerChain, z: int) -> SegmentPath:
    """Simple oriented path through the support of ``chain`` joining ``z`` to an
    opposite-sign point of its boundary.

    Starts at ``z`` when the boundary multiplicity there is negative, ends at
    ``z`` when it is positive.  Ties go to the lowest edge index.
    """
    if chain.degree != 1:
        raise ValueError("extract_chain needs a 1-chain")
    if any(c == 0 for c in chain.coeffs.values()):
        raise MalformedChain("zero coefficient in chain")
    bd = boundary(chain)
    if bd[z] == 0:
        raise NotInBoundarySupport(f"vertex {z} has boundary multiplicity 0")
    if bd[z] < 0:
        return _walk(chain, z, bd)
    return _walk(-chain, z, -bd).reversed()


def flip_along_path(chain: IntegerChain, path: SegmentPath, p: int) -> IntegerChain:
    """Replace multiplicity m by p - m with reversed orientation on each path edge."""
    check_p(p)
    coeffs = dict(chain.coeffs)
    for e, s in path.steps:
        m = s * coeffs.get(e, 0)
        if not 1 <= m <= p - 1:
            raise CoefficientOutOfRange(f"edge {e} has multiplicity {m} along the path, need 1..{p - 1}")
        coeffs[e] = s * (m - p)
    return IntegerChain(chain.complex, chain.degree, coeffs)


def _heavy_vertex(bd: IntegerChain, p: int) -> int | None:
    return next((v for v, c in bd if abs(c) >= p), None)


def repair(chain: IntegerChain, p: int) -> tuple[IntegerChain, RepairCertificate]:
    """Representative of ``chain`` mod p with multiplicities and boundary
    multiplicities bounded by ``p - 1`` in absolute value."""
    check_p(p)
    if chain.degree != 1:
        raise ValueError("repair works on 1-chains")
    q = positive_representative(chain, p)
    bd = boundary(q)
    bmass = mass(bd)
    cap = math.ceil(bmass / 2)
    trace = []
    while (z := _heavy_vertex(bd, p)) is not None:
        if len(trace) >= cap:
            raise InternalError(f"repair exceeded its iteration cap {cap}")
        path = extract_chain(q, z)
        q = flip_along_path(q, path, p)
        bd = boundary(q)
        after = mass(bd)
        if after > bmass - 2:
            raise InternalError(f"boundary mass fell only from {bmass} to {after}")
        trace.append(TraceStep(z, path, bmass, after))
        bmass = after
    diff = q - chain
    if any(c % p for _, c in diff):
        raise InternalError("repaired chain left the class of the input")
    quotient = IntegerChain(chain.complex, 1, {e: c // p for e, c in diff})
    return q, RepairCertificate(p, chain, q, quotient, tuple(trace))


@dataclass
class Check:
    name: str
    passed: bool
    witness: dict


@dataclass
class VerificationReport:
    checks: list[Check]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self) -> list[str]:
        return [f"{'PASS' if c.passed else 'FAIL'} {c.name} {c.witness}" for c in self.checks]


def verify_repair(
    original: IntegerChain,
    repaired: IntegerChain,
    p: int,
    certificate: RepairCertificate | None = None,
) -> VerificationReport:
    """Re-derive the repair postconditions from scratch in integer arithmetic.

    The mass bounds are checked cell by cell: ``|new| <= (p-1) |select(old)|``
    on every edge and every vertex, which implies the global inequalities
    without comparing any floating lengths.
    """
    check_p(p)
    original._check(repaired)
    checks = []

    bad = {e: c for e, c in repaired if abs(c) > p - 1}
    checks.append(Check("multiplicity_range", not bad, {"violations": bad}))

    bd_new = boundary(repaired)
    bd_old = boundary(original)
    bad = {v: c for v, c in bd_new if abs(c) > p - 1}
    checks.append(Check("boundary_range", not bad, {"violations": bad, "max_abs": bd_new.max_abs()}))

    bad = {e: (c, original[e]) for e, c in repaired if abs(c) > (p - 1) * abs(select_residue(original[e], p))}
    checks.append(Check("mass_bound", not bad, {"violations": bad}))

    bad = {v: (c, bd_old[v]) for v, c in bd_new if abs(c) > (p - 1) * abs(select_residue(bd_old[v], p))}
    lhs = mass(bd_new)
    rhs = (p - 1) * sum(abs(select_residue(c, p)) for _, c in bd_old)
    checks.append(Check("boundary_mass_bound", not bad, {"violations": bad, "lhs": lhs, "rhs": rhs}))

    diff = repaired - original
    nondiv = {e: c for e, c in diff if c % p}
    witness: dict = {"nondivisible": nondiv}
    ok = not nondiv
    if ok and certificate is not None:
        expected = IntegerChain(diff.complex, 1, {e: c // p for e, c in diff})
        ok = certificate.quotient == expected
        witness["quotient_matches"] = ok
    checks.append(Check("divisibility", ok, witness))

    if certificate is not None:
        checks.append(_check_trace(original, repaired, p, certificate))
    return VerificationReport(checks)


def _check_trace(original, repaired, p, cert: RepairCertificate) -> Check:
    # replay every flip from the positive representative
    q = positive_representative(original, p)
    prev = mass(boundary(q))
    problems = []
    for i, st in enumerate(cert.trace):
        if st.boundary_mass_before != prev:
            problems.append(f"step {i}: recorded before {st.boundary_mass_before}, replay {prev}")
        issues = st.path.problems(q)
        if issues:
            problems.append(f"step {i}: {issues[0]}")
            break
        try:
            q = flip_along_path(q, st.path, p)
        except CoefficientOutOfRange as exc:
            problems.append(f"step {i}: {exc}")
            break
        after = mass(boundary(q))
        if after != st.boundary_mass_after:
            problems.append(f"step {i}: recorded after {st.boundary_mass_after}, replay {after}")
        if after > prev - 2:
            problems.append(f"step {i}: boundary mass {prev} -> {after} drops by less than 2")
        prev = after
    if not problems and q != repaired:
        problems.append("replayed trace does not reproduce the repaired chain")
    return Check("descent", not problems, {"iterations": len(cert.trace), "problems": problems})
