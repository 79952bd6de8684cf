from __future__ import annotations

import importlib

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modpchain.chain import IntegerChain, boundary, mass
from modpchain.complex import build_complex
from modpchain.errors import CoefficientOutOfRange, InternalError, MalformedChain, NotInBoundarySupport
from modpchain.generate import parallel_bundle, path_graph, random_1chain
from modpchain.modp import equiv_mod_p, positive_representative, select_residue
from modpchain.repair import SegmentPath, extract_chain, flip_along_path, repair, verify_repair

from oracles import representative_boundary_masses


def test_walk_parallel_edges():
    K, T = parallel_bundle(2)
    path = extract_chain(T, 0)
    assert path == SegmentPath(((0, 1),), 0, 1)


def test_walk_path_graph():
    K, T = path_graph(2)
    assert extract_chain(T, 0) == SegmentPath(((0, 1), (1, 1)), 0, 2)


def test_walk_excises_loop():
    # a->b, b->c, c->b, b->d
    K = build_complex([[0, 0], [1, 0], [1, 1], [2, 0]], [(0, 1), (1, 2), (2, 1), (1, 3)])
    T = IntegerChain(K, 1, {0: 1, 1: 1, 2: 1, 3: 1})
    path = extract_chain(T, 0)
    assert path.steps == ((0, 1), (3, 1)) and path.end == 3
    assert not path.problems(T)


def test_walk_from_positive_vertex_is_reversed():
    K, T = path_graph(2)
    path = extract_chain(T, 2)
    assert path == SegmentPath(((0, 1), (1, 1)), 0, 2)


def test_walk_respects_negative_coefficients():
    K = build_complex([[0], [1], [2]], [(1, 0), (2, 1)])
    T = IntegerChain(K, 1, {0: -1, 1: -1})  # same current as 0 -> 1 -> 2
    path = extract_chain(T, 0)
    assert path == SegmentPath(((0, -1), (1, -1)), 0, 2)
    assert not path.problems(T)


def test_walk_errors():
    K, T = parallel_bundle(2)
    with pytest.raises(NotInBoundarySupport):
        extract_chain(T + (-T) + IntegerChain(K, 1, {0: 1, 1: -1}), 0)
    T.coeffs = {0: 0, 1: 1}  # bypass canonicalisation on purpose
    with pytest.raises(MalformedChain):
        extract_chain(T, 0)


def test_flip_examples():
    K, T = parallel_bundle(2)
    out = flip_along_path(T, SegmentPath(((0, 1),), 0, 1), 2)
    assert out.coeffs == {0: -1, 1: 1} and not boundary(out)
    assert mass(boundary(T)) == 4
    K, T = parallel_bundle(3)
    out = flip_along_path(T, SegmentPath(((0, 1),), 0, 1), 3)
    assert out.coeffs == {0: -2, 1: 1, 2: 1} and not boundary(out)
    K, T = path_graph(1)
    out = flip_along_path(T, SegmentPath(((0, 1),), 0, 1), 2)
    assert out.coeffs == {0: -1} and mass(boundary(out)) == 2


def test_flip_out_of_range():
    K, T = parallel_bundle(2)
    with pytest.raises(CoefficientOutOfRange):
        flip_along_path(3 * T, SegmentPath(((0, 1),), 0, 1), 3)
    with pytest.raises(CoefficientOutOfRange):
        flip_along_path(T, SegmentPath(((0, -1),), 1, 0), 3)


def test_repair_fixed_point():
    K, T = path_graph(3)
    out, cert = repair(T, 5)
    assert out == T and cert.iterations == 0


def test_repair_parallel_bundle():
    K, T = parallel_bundle(2)
    out, cert = repair(T, 2)
    assert out.coeffs == {0: -1, 1: 1}
    assert cert.iterations == 1
    st = cert.trace[0]
    assert (st.vertex, st.boundary_mass_before, st.boundary_mass_after) == (0, 4, 0)
    assert cert.quotient.coeffs == {0: -1}


def test_repair_null_class():
    K, T = random_1chain(4, edges=6)
    out, cert = repair(3 * T, 3)
    assert not out and cert.quotient == -T


def test_stalled_descent_is_internal_error(monkeypatch):
    rp = importlib.import_module("modpchain.repair")
    K, T = parallel_bundle(4)
    # a flip that changes nothing would loop forever without the guard
    monkeypatch.setattr(rp, "flip_along_path", lambda chain, path, p: chain)
    with pytest.raises(InternalError):
        rp.repair(T, 2)


def independent_postconditions(P: IntegerChain, out: IntegerChain, p: int) -> list[str]:
    """Direct restatement of the repair guarantees, without the library checker."""
    bad = []
    if any(not 1 <= abs(c) <= p - 1 for _, c in out):
        bad.append("multiplicity")
    bd = boundary(out)
    if any(abs(c) > p - 1 for _, c in bd):
        bad.append("boundary range")
    lengths = P.complex.edge_lengths
    if sum(abs(c) * lengths[e] for e, c in out) > (p - 1) * sum(abs(select_residue(c, p)) * lengths[e] for e, c in P) * (1 + 1e-12):
        bad.append("mass")
    if sum(abs(c) for _, c in bd) > (p - 1) * sum(abs(select_residue(c, p)) for _, c in boundary(P)):
        bad.append("boundary mass")
    if any((out[e] - P[e]) % p for e in range(P.complex.n_edges)):
        bad.append("class")
    return bad


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**64 - 1), st.sampled_from([2, 3, 4, 5, 7]))
def test_repair_random(seed, p):
    K, P = random_1chain(seed, vertices=6, edges=14, coeff_range=30)
    out, cert = repair(P, p)
    assert independent_postconditions(P, out, p) == []
    report = verify_repair(P, out, p, cert)
    assert report.passed, report.lines()
    ok, c = equiv_mod_p(out, P, p)
    assert ok and c.quotient == cert.quotient
    # replay: each step is a valid path and the start vertex drops by exactly p
    q = positive_representative(P, p)
    for stp in cert.trace:
        before = boundary(q)
        assert abs(before[stp.vertex]) >= p
        q = flip_along_path(q, stp.path, p)
        assert abs(boundary(q)[stp.vertex]) == abs(before[stp.vertex]) - p
        assert all(1 <= abs(c) <= p - 1 for _, c in q)
        assert stp.boundary_mass_before - stp.boundary_mass_after >= 2
    assert q == out


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**64 - 1), st.sampled_from([2, 3]))
def test_repair_against_exhaustive_representatives(seed, p):
    K, P = random_1chain(seed, vertices=4, edges=6, coeff_range=6)
    out, _ = repair(P, p)
    options = representative_boundary_masses(P, p)
    assert out in [ch for _, ch in options]
    best = min(m for m, _ in options)
    bound = (p - 1) * sum(abs(select_residue(c, p)) for _, c in boundary(P))
    assert best <= mass(boundary(out)) <= bound


def test_verify_catches_mutations():
    K, P = random_1chain(11, vertices=5, edges=10, coeff_range=9)
    out, cert = repair(P, 3)
    assert verify_repair(P, out, 3, cert).passed
    bumped = out + IntegerChain(K, 1, {next(iter(out.coeffs)): 1})
    names = {c.name for c in verify_repair(P, bumped, 3, cert).checks if not c.passed}
    assert "divisibility" in names
    e = next(iter(out.coeffs))
    big = IntegerChain(K, 1, {**out.coeffs, e: 3})
    names = {c.name for c in verify_repair(P, big, 3).checks if not c.passed}
    assert "multiplicity_range" in names
