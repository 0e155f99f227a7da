"""Prime fields, polynomial quotient-ring presentations, and sparse polynomials.

A ``Ring`` presents R = F_p[x1..xn]/a by a prime p, ordered variable names,
relation polynomials generating a, and a term order.  With no relations it
is the polynomial ring itself.  Polynomials are immutable sparse term lists
over exponent tuples; coefficients are machine ints in [0, p).
"""

from __future__ import annotations

import hashlib
import re
from typing import Iterable, Mapping, Sequence

from .errors import ExponentOverflowError, FsigError
from .monomials import Monomial, TermOrder, mono_degree, mono_mul, mono_one

EXPONENT_CAP = 2**31

_VAR_NAME = re.compile(r"[A-Za-z][A-Za-z0-9]*\Z")


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


class PrimeField:
    """Arithmetic context for residues mod a prime p < 2^31."""

    __slots__ = ("p",)

    def __init__(self, p: int):
        if not isinstance(p, int) or not is_prime(p):
            raise FsigError(f"modulus {p!r} is not prime")
        if p >= EXPONENT_CAP:
            raise FsigError(f"modulus {p} exceeds the 2^31 cap")
        self.p = p

    def element(self, value: int) -> int:
        return value % self.p

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.p

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.p

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.p

    def neg(self, a: int) -> int:
        return (-a) % self.p

    def inv(self, a: int) -> int:
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero in F_p")
        return pow(a, self.p - 2, self.p)

    def pow(self, a: int, k: int) -> int:
        if k < 0:
            return self.inv(pow(a, -k, self.p))
        return pow(a, k, self.p)

    def __eq__(self, other) -> bool:
        return isinstance(other, PrimeField) and self.p == other.p

    def __hash__(self) -> int:
        return hash(("PrimeField", self.p))

    def __repr__(self) -> str:
        return f"PrimeField({self.p})"


class Polynomial:
    """Immutable sparse polynomial attached to a Ring.

    ``terms`` is a tuple of (monomial, coeff) sorted strictly descending in
    the ring's term order, with no zero coefficients and no repeats; the
    zero polynomial has an empty tuple.
    """

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: "Ring", terms: Mapping[Monomial, int] | Iterable[tuple[Monomial, int]]):
        items = terms.items() if isinstance(terms, Mapping) else terms
        p = ring.p
        acc: dict[Monomial, int] = {}
        n = ring.nvars
        for mono, coeff in items:
            if len(mono) != n:
                raise FsigError("monomial arity does not match ring")
            c = coeff % p
            if c == 0:
                continue
            if mono in acc:
                c = (acc[mono] + c) % p
                if c == 0:
                    del acc[mono]
                    continue
            acc[mono] = c
        for mono in acc:
            for e in mono:
                if e < 0 or e >= EXPONENT_CAP:
                    raise ExponentOverflowError(f"exponent {e} outside [0, 2^31)")
        key = ring.order.key
        object.__setattr__(self, "ring", ring)
        object.__setattr__(
            self,
            "terms",
            tuple(sorted(acc.items(), key=lambda t: key(t[0]), reverse=True)),
        )
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # -- structure ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def lm(self) -> Monomial:
        """Leading monomial."""
        if not self.terms:
            raise FsigError("zero polynomial has no leading term")
        return self.terms[0][0]

    def lc(self) -> int:
        if not self.terms:
            raise FsigError("zero polynomial has no leading term")
        return self.terms[0][1]

    def lt(self) -> tuple[Monomial, int]:
        if not self.terms:
            raise FsigError("zero polynomial has no leading term")
        return self.terms[0]

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(mono_degree(m) for m, _ in self.terms)

    def num_terms(self) -> int:
        return len(self.terms)

    def coeff(self, mono: Monomial) -> int:
        for m, c in self.terms:
            if m == mono:
                return c
        return 0

    def as_dict(self) -> dict[Monomial, int]:
        return dict(self.terms)

    # -- arithmetic --------------------------------------------------------

    def _check_ring(self, other: "Polynomial") -> None:
        if self.ring is not other.ring and self.ring != other.ring:
            raise FsigError("polynomials belong to different rings")

    def __add__(self, other: "Polynomial") -> "Polynomial":
        self._check_ring(other)
        acc = dict(self.terms)
        p = self.ring.p
        for m, c in other.terms:
            v = (acc.get(m, 0) + c) % p
            if v:
                acc[m] = v
            elif m in acc:
                del acc[m]
        return Polynomial(self.ring, acc)

    def __neg__(self) -> "Polynomial":
        p = self.ring.p
        return Polynomial(self.ring, [(m, p - c) for m, c in self.terms])

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        self._check_ring(other)
        acc = dict(self.terms)
        p = self.ring.p
        for m, c in other.terms:
            v = (acc.get(m, 0) - c) % p
            if v:
                acc[m] = v
            elif m in acc:
                del acc[m]
        return Polynomial(self.ring, acc)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        self._check_ring(other)
        p = self.ring.p
        acc: dict[Monomial, int] = {}
        if len(self.terms) > len(other.terms):
            a, b = self.terms, other.terms
        else:
            a, b = other.terms, self.terms
        for m1, c1 in b:
            for m2, c2 in a:
                m = mono_mul(m1, m2)
                v = (acc.get(m, 0) + c1 * c2) % p
                if v:
                    acc[m] = v
                elif m in acc:
                    del acc[m]
        return Polynomial(self.ring, acc)

    def scale(self, c: int) -> "Polynomial":
        p = self.ring.p
        c %= p
        if c == 0:
            return self.ring.zero()
        return Polynomial(self.ring, [(m, (c * v) % p) for m, v in self.terms])

    def mul_term(self, mono: Monomial, coeff: int = 1) -> "Polynomial":
        p = self.ring.p
        coeff %= p
        if coeff == 0:
            return self.ring.zero()
        return Polynomial(
            self.ring, [(mono_mul(m, mono), (coeff * c) % p) for m, c in self.terms]
        )

    def monic(self) -> "Polynomial":
        if not self.terms:
            return self
        return self.scale(self.ring.field.inv(self.lc()))

    def frobenius(self, e: int = 1) -> "Polynomial":
        """Term-wise p^e-th power: exponents scale, coefficients are fixed
        since c^p = c in F_p."""
        q = self.ring.p**e
        return Polynomial(self.ring, [(tuple(x * q for x in m), c) for m, c in self.terms])

    def __pow__(self, k: int) -> "Polynomial":
        return poly_pow(self, k)

    # -- identity ----------------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Polynomial)
            and self.ring == other.ring
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        h = self._hash
        if h is None:
            h = hash((self.ring.p, self.ring.variables, self.terms))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self) -> str:
        return f"<{render(self)}>"

    def __str__(self) -> str:
        return render(self)


def poly_pow(f: Polynomial, k: int) -> Polynomial:
    """f^k using base-p digits: small powers are multiplied out, p^j-th
    powers are term-wise Frobenius."""
    if k < 0:
        raise FsigError("negative polynomial power")
    ring = f.ring
    if k == 0:
        return ring.one()
    if f.is_zero():
        return f
    if len(f.terms) == 1:
        m, c = f.terms[0]
        for e in m:
            if e * k >= EXPONENT_CAP:
                raise ExponentOverflowError("power exceeds exponent cap")
        return Polynomial(ring, [(tuple(e * k for e in m), pow(c, k, ring.p))])
    p = ring.p
    digits = []
    kk = k
    while kk:
        digits.append(kk % p)
        kk //= p
    # small_pows[d] = f^d for 0 <= d < p, filled on demand
    small: dict[int, Polynomial] = {0: ring.one(), 1: f}

    def small_pow(d: int) -> Polynomial:
        if d not in small:
            half = small_pow(d // 2)
            g = half * half
            if d % 2:
                g = g * f
            small[d] = g
        return small[d]

    result = ring.one()
    for j, d in enumerate(digits):
        if d:
            result = result * small_pow(d).frobenius(j)
    return result


def render(f: Polynomial) -> str:
    """Grammar-conformant text for f; parses back to an equal Polynomial."""
    if f.is_zero():
        return "0"
    names = f.ring.variables
    parts: list[str] = []
    for i, (mono, coeff) in enumerate(f.terms):
        factors = []
        if coeff != 1 or not any(mono):
            factors.append(str(coeff))
        for name, e in zip(names, mono):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        text = "*".join(factors)
        parts.append(text if i == 0 else f" + {text}")
    return "".join(parts)


class Ring:
    """Presentation of R = F_p[vars]/(relations) with a fixed term order."""

    def __init__(
        self,
        p: int,
        variables: Sequence[str],
        relations: Sequence[Polynomial | str] = (),
        order: str | TermOrder = "grevlex",
    ):
        self.field = PrimeField(p)
        self.p = p
        names = tuple(variables)
        if not names:
            raise FsigError("ring needs at least one variable")
        if len(set(names)) != len(names):
            raise FsigError("variable names must be unique")
        for name in names:
            if not _VAR_NAME.match(name):
                raise FsigError(f"bad variable name {name!r}")
        self.variables = names
        self.nvars = len(names)
        self.order = order if isinstance(order, TermOrder) else TermOrder(order)
        rels: list[Polynomial] = []
        for r in relations:
            if isinstance(r, str):
                from .parse import parse_polynomial

                r = parse_polynomial(r, self)
            else:
                if r.ring.variables != names or r.ring.p != p:
                    raise FsigError("relation from a different ring")
            if not r.is_zero():
                rels.append(r)
        self.relations = tuple(rels)
        self._relation_ideal = None
        self._dimension: int | None = None

    # -- constructors ------------------------------------------------------

    def zero(self) -> Polynomial:
        return Polynomial(self, [])

    def one(self) -> Polynomial:
        return Polynomial(self, [(mono_one(self.nvars), 1)])

    def constant(self, c: int) -> Polynomial:
        return Polynomial(self, [(mono_one(self.nvars), c)])

    def variable(self, which: int | str) -> Polynomial:
        i = which if isinstance(which, int) else self.variables.index(which)
        mono = tuple(1 if j == i else 0 for j in range(self.nvars))
        return Polynomial(self, [(mono, 1)])

    def monomial(self, mono: Monomial, coeff: int = 1) -> Polynomial:
        return Polynomial(self, [(tuple(mono), coeff)])

    def parse(self, text: str) -> Polynomial:
        from .parse import parse_polynomial

        return parse_polynomial(text, self)

    def gens_of_maximal_ideal(self) -> list[Polynomial]:
        return [self.variable(i) for i in range(self.nvars)]

    # -- quotient structure --------------------------------------------------

    def is_polynomial_ring(self) -> bool:
        return not self.relations

    def relation_ideal(self):
        """Ideal of relations with its reduced basis attached (cached)."""
        if self._relation_ideal is None:
            from .groebner import Ideal

            ideal = Ideal(self, self.relations)
            ideal.groebner_basis()
            self._relation_ideal = ideal
        return self._relation_ideal

    def dimension(self) -> int:
        """Krull dimension of R, cached after first computation."""
        if self._dimension is None:
            from .groebner import krull_dimension

            self._dimension = krull_dimension(self)
        return self._dimension

    # -- identity ----------------------------------------------------------

    def spec_text(self) -> str:
        rels = ", ".join(render(r) for r in self.relations)
        return (
            f"p = {self.p}\n"
            f"vars = {', '.join(self.variables)}\n"
            f"relations = {rels}\n"
            f"order = {self.order.kind}\n"
        )

    def fingerprint(self) -> str:
        return hashlib.sha256(self.spec_text().encode()).hexdigest()[:16]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Ring)
            and self.p == other.p
            and self.variables == other.variables
            and self.order == other.order
            and tuple(r.terms for r in self.relations)
            == tuple(r.terms for r in other.relations)
        )

    def __hash__(self) -> int:
        return hash((self.p, self.variables, self.order.kind))

    def __repr__(self) -> str:
        rels = ", ".join(render(r) for r in self.relations) or "0"
        return f"Ring(F_{self.p}[{', '.join(self.variables)}]/({rels}), {self.order.kind})"
