"""Representatives modulo p, p-mass and certified congruence."""

from __future__ import annotations

from dataclasses import dataclass

from .chain import IntegerChain, mass


def check_p(p: int) -> int:
    if isinstance(p, bool) or not isinstance(p, int) or p < 2:
        raise ValueError(f"p must be an integer >= 2, got {p!r}")
    return p


def select_residue(z: int, p: int) -> int:
    """The unique integer in (-p/2, p/2] congruent to z mod p."""
    r = z % p
    return r - p if 2 * r > p else r


def positive_residue(z: int, p: int) -> int:
    """z mod p in {0, ..., p-1}."""
    return z % p


@dataclass(frozen=True)
class ModPContext:
    p: int

    def __post_init__(self) -> None:
        check_p(self.p)


@dataclass(frozen=True)
class CongruenceCertificate:
    """``quotient`` is Q with A - B = p * Q."""

    quotient: IntegerChain
    checked: bool


def select_representative(chain: IntegerChain, p: int) -> IntegerChain:
    check_p(p)
    return IntegerChain(chain.complex, chain.degree, {i: select_residue(c, p) for i, c in chain})


def positive_representative(chain: IntegerChain, p: int) -> IntegerChain:
    """Residues in {1, ..., p-1} kept on the stored orientation of each cell."""
    check_p(p)
    return IntegerChain(chain.complex, chain.degree, {i: c % p for i, c in chain})


def pmass(chain: IntegerChain, p: int) -> int | float:
    return mass(select_representative(chain, p))


def equiv_mod_p(a: IntegerChain, b: IntegerChain, p: int) -> tuple[bool, CongruenceCertificate | None]:
    """Coefficientwise congruence; returns the verified quotient when it holds."""
    check_p(p)
    diff = a - b  # raises ComplexMismatch
    if any(c % p for _, c in diff):
        return False, None
    q = IntegerChain(diff.complex, diff.degree, {i: c // p for i, c in diff})
    return True, CongruenceCertificate(q, verify_congruence(a, b, q, p))


def verify_congruence(a: IntegerChain, b: IntegerChain, quotient: IntegerChain, p: int) -> bool:
    return a - b == p * quotient
