from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modpchain.chain import IntegerChain, boundary, exact_mass, mass, support
from modpchain.complex import build_complex
from modpchain.errors import ComplexMismatch, MalformedChain
from modpchain.generate import random_1chain

from oracles import dense, incidence


@pytest.fixture
def abc():
    return build_complex([[0, 0], [1, 0], [0, 1]], [(0, 1), (1, 2), (2, 0)])


def test_single_segment_boundary(abc):
    assert boundary(IntegerChain(abc, 1, {0: 1})).coeffs == {0: -1, 1: 1}


def test_cycle_has_no_boundary(abc):
    assert not boundary(IntegerChain(abc, 1, {0: 1, 1: 1, 2: 1}))


def test_parallel_edges_boundary():
    K = build_complex([[0], [1]], [(0, 1), (0, 1)])
    assert boundary(IntegerChain(K, 1, {0: 1, 1: 1})).coeffs == {0: -2, 1: 2}


def test_masses(abc):
    assert mass(IntegerChain(abc, 0, {0: -1, 1: 1})) == 2
    K = build_complex([[0, 0], [3, 4]], [(0, 1)])
    assert mass(IntegerChain(K, 1, {0: -2})) == 10
    assert exact_mass(IntegerChain(K, 1, {0: -2})) == 10
    assert mass(IntegerChain.zero(K, 1)) == 0


def test_support(abc):
    assert support(IntegerChain.zero(abc, 1)) == frozenset()
    assert support(IntegerChain(abc, 1, {1: 3})) == {1}
    a = IntegerChain(abc, 1, {1: 3})
    assert support(a + (-a)) == frozenset()


def test_canonical_sparsity(abc):
    ch = IntegerChain(abc, 1, {0: 0, 2: 4})
    assert ch.coeffs == {2: 4} and ch[0] == 0


def test_reversal_is_negation():
    K = build_complex([[0], [1]], [(0, 1), (1, 0)])
    assert boundary(IntegerChain(K, 1, {0: -1})) == boundary(IntegerChain(K, 1, {1: 1}))


def test_malformed(abc):
    with pytest.raises(MalformedChain):
        IntegerChain(abc, 1, {5: 1})
    with pytest.raises(MalformedChain):
        IntegerChain(abc, 1, {0: 1.5})
    with pytest.raises(ValueError):
        IntegerChain(abc, 2, {})


def test_mixing_complexes_refused(abc):
    other = build_complex([[0], [1]], [(0, 1)])
    with pytest.raises(ComplexMismatch):
        IntegerChain(abc, 1, {0: 1}) + IntegerChain(other, 1, {0: 1})
    with pytest.raises(ComplexMismatch):
        IntegerChain(abc, 1, {0: 1}) + IntegerChain(abc, 0, {0: 1})


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**64 - 1), st.integers(-5, 5), st.integers(-5, 5))
def test_boundary_against_incidence_matrix(seed, a, b):
    K, T1 = random_1chain(seed, vertices=5, edges=8)
    _, T2 = random_1chain(seed ^ 1, vertices=5, edges=8)
    T2 = IntegerChain(K, 1, T2.coeffs)
    A = incidence(K)
    bd = boundary(a * T1 + b * T2)
    assert np.array_equal(dense(bd), A @ (a * dense(T1) + b * dense(T2)))
    assert sum(c for _, c in boundary(T1)) == 0
    assert bd == a * boundary(T1) + b * boundary(T2)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**64 - 1))
def test_mass_is_a_norm(seed):
    K, T1 = random_1chain(seed, vertices=5, edges=8)
    T2 = IntegerChain(K, 1, random_1chain(seed + 1, vertices=5, edges=8)[1].coeffs)
    assert (mass(T1) == 0) == (not T1)
    assert mass(-T1) == mass(T1)
    assert mass(T1 + T2) <= (mass(T1) + mass(T2)) * (1 + 1e-12)
    # float mass agrees with an independent per-edge sum
    direct = sum(abs(c) * math.dist([float(x) for x in K.vertices[K.edges[e][0]]], [float(x) for x in K.vertices[K.edges[e][1]]]) for e, c in T1)
    assert math.isclose(mass(T1), direct, rel_tol=1e-12)
