"""Characteristic-p operations: bracket powers, splitting ideals and
numbers, F-purity, the Kunz regularity test, and splitting-prime
approximation.

Splitting ideals are realized by colon formulas in the ambient polynomial
ring S: the general form ((m^[q] + a^[q]) : (a^[q] : a)) for R = S/a, with
a principal-relation fast path that iterates single colons by f level by
level; the iteration is valid because Frobenius is flat on S, so bracket
powers commute with colons there.  Both routes are cross-checked in the
test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import FsigError
from .groebner import INFINITE, Budget, Ideal, colon, colon_ideal, intersect
from .monomials import mono_one
from .rings import Polynomial, Ring, poly_pow


def maximal_ideal(ring: Ring) -> Ideal:
    """(x1..xn) in the ambient polynomial ring, basis preattached."""
    gens = tuple(ring.variable(i) for i in range(ring.nvars))
    key = ring.order.key
    gb = tuple(sorted(gens, key=lambda g: key(g.lm())))
    return Ideal(ring, gens, _gb=gb)


def bracket_power(I: Ideal, e: int, trust_basis: bool = True) -> Ideal:
    """Ideal generated by g^(p^e) over the generators g of I.

    When I carries a reduced basis, its term-wise power is again a reduced
    basis (flatness of Frobenius on the ambient ring) and is attached to
    the result; pass trust_basis=False to force recomputation downstream.
    """
    if e < 0:
        raise FsigError("bracket power needs e >= 0")
    if e == 0:
        return Ideal(I.ring, I.generators, _gb=I._gb)
    gens = tuple(g.frobenius(e) for g in I.generators)
    gb = None
    if trust_basis and I.has_cached_basis():
        gb = tuple(g.frobenius(e) for g in I.groebner_basis())
    return Ideal(I.ring, gens, _gb=gb)


@dataclass
class SplittingIdealRecord:
    """Level e, q = p^e, the ideal I_e (as an ideal of S containing the
    relations), and a_e = colength(I_e)."""

    e: int
    q: int
    ideal: Ideal
    a_e: int


def _attach_relations(ring: Ring, ideal: Ideal, budget: Budget | None) -> Ideal:
    """Append the defining relations to an ideal of S, keeping the basis
    when they are already members."""
    rels = [r for r in ring.relations if not ideal.contains(r, budget)]
    if not rels:
        return Ideal(ring, ideal.generators + ring.relations, _gb=ideal._gb)
    return Ideal(ring, ideal.generators + ring.relations)


def _splitting_chain_principal(ring: Ring, e_max: int, budget: Budget | None):
    """u_e = (m^[p^e] : f^(p^e - 1)) computed as u_e = ((u_{e-1}^[p] : f) ... : f)
    with p - 1 single colons per level."""
    f = ring.relations[0]
    u = maximal_ideal(ring)
    chain = []
    for e in range(1, e_max + 1):
        u = bracket_power(u, 1)
        for _ in range(ring.p - 1):
            u = colon(u, f, budget)
            u.groebner_basis(budget)
        chain.append(u)
    return chain


def splitting_ideal_general(ring: Ring, e: int, budget: Budget | None = None) -> Ideal:
    """((m^[q] + a^[q]) : (a^[q] : a)) + a, the generating-set-free form."""
    if not ring.relations:
        return bracket_power(maximal_ideal(ring), e)
    rel = Ideal(ring, ring.relations)
    rel_q = bracket_power(rel, e, trust_basis=False)
    dual = colon_ideal(rel_q, rel, budget)
    num = bracket_power(maximal_ideal(ring), e).plus(rel_q)
    ie = colon_ideal(num, dual, budget)
    return _attach_relations(ring, ie, budget)


def splitting_ideal_hypersurface(ring: Ring, e: int, budget: Budget | None = None) -> Ideal:
    """((m^[q] : f^(q-1)) + (f)) computed with a single colon."""
    if len(ring.relations) != 1:
        raise FsigError("hypersurface formula needs exactly one relation")
    f = ring.relations[0]
    q = ring.p**e
    fq1 = poly_pow(f, q - 1)
    ie = colon(bracket_power(maximal_ideal(ring), e), fq1, budget)
    return _attach_relations(ring, ie, budget)


class FrobeniusEngine:
    """Shared cache of splitting-ideal chains per ring."""

    def __init__(self, ring: Ring, budget: Budget | None = None):
        self.ring = ring
        self.budget = budget
        self._records: list[SplittingIdealRecord] = []

    def records(self, e_max: int) -> list[SplittingIdealRecord]:
        while len(self._records) < e_max:
            e = len(self._records) + 1
            self._records.append(self._compute(e))
        return self._records[:e_max]

    def record(self, e: int) -> SplittingIdealRecord:
        return self.records(e)[e - 1]

    def _compute(self, e: int) -> SplittingIdealRecord:
        ring = self.ring
        q = ring.p**e
        if not ring.relations:
            ie = bracket_power(maximal_ideal(ring), e)
            return SplittingIdealRecord(e, q, ie, q**ring.nvars)
        if len(ring.relations) == 1:
            prev = (
                self._records[e - 2].ideal
                if e >= 2
                else maximal_ideal(ring)
            )
            u = bracket_power(_strip_relation(ring, prev), 1)
            f = ring.relations[0]
            for _ in range(ring.p - 1):
                u = colon(u, f, self.budget)
                u.groebner_basis(self.budget)
            ie = _attach_relations(ring, u, self.budget)
        else:
            ie = splitting_ideal_general(ring, e, self.budget)
        a_e = ie.colength(self.budget)
        if a_e is INFINITE:
            raise FsigError(
                "splitting ideal has infinite colength; input ring is "
                "outside the supported class"
            )
        return SplittingIdealRecord(e, q, ie, a_e)


def _strip_relation(ring: Ring, ideal: Ideal) -> Ideal:
    """Drop appended relation generators; the basis already accounts for
    them, and bracketing a basis keeps it a basis."""
    if ideal.has_cached_basis():
        gb = ideal.groebner_basis()
        return Ideal(ring, gb, _gb=gb)
    return ideal


_ENGINES: dict[tuple, FrobeniusEngine] = {}


def _engine(ring: Ring, budget: Budget | None = None) -> FrobeniusEngine:
    key = (ring.fingerprint(),)
    eng = _ENGINES.get(key)
    if eng is None:
        eng = FrobeniusEngine(ring, budget)
        _ENGINES[key] = eng
    return eng


def splitting_ideal(ring: Ring, e: int, budget: Budget | None = None) -> SplittingIdealRecord:
    """SplittingIdealRecord for level e >= 1."""
    if e < 1:
        raise FsigError("splitting ideal needs e >= 1")
    return _engine(ring, budget).record(e)


def splitting_number(ring: Ring, e: int, budget: Budget | None = None) -> int:
    """a_e, the rank of the largest free summand of the e-th Frobenius
    pushforward; equals the colength of I_e."""
    return splitting_ideal(ring, e, budget).a_e


def is_f_pure(ring: Ring, budget: Budget | None = None) -> bool:
    """True iff a_1 > 0; positivity at one level forces it at all levels."""
    return splitting_number(ring, 1, budget) > 0


def is_regular_kunz(ring: Ring, budget: Budget | None = None) -> bool:
    """Regularity via the length criterion l(R/m^[p]) = p^d."""
    rel = Ideal(ring, ring.relations)
    mq = bracket_power(maximal_ideal(ring), 1).plus(rel)
    length = mq.colength(budget)
    if length is INFINITE:
        raise FsigError("m^[p] + a is not m-primary; presentation is degenerate")
    return length == ring.p ** ring.dimension()


def splitting_prime_approx(
    ring: Ring, e_max: int, budget: Budget | None = None
) -> tuple[Ideal, bool]:
    """Finite-level stand-in for the splitting prime: the intersection of
    I_e over 1 <= e <= e_max, plus a flag telling whether the last level
    left the intersection unchanged."""
    if e_max < 2:
        raise FsigError("splitting prime approximation needs e_max >= 2")
    records = _engine(ring, budget).records(e_max)
    approx = records[0].ideal
    prev = None
    for rec in records[1:]:
        prev = approx
        approx = intersect(approx, rec.ideal, budget)
    stabilized = prev is not None and approx.equals(prev, budget)
    return approx, stabilized
