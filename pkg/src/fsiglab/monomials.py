"""Exponent-tuple monomials and the three supported term orders.

A monomial in n variables is a plain tuple of n non-negative ints.  All
functions here are total on equal-length tuples; the Polynomial layer is
responsible for never mixing arities.
"""

from __future__ import annotations

import operator
from typing import Callable, Iterable, Tuple

Monomial = Tuple[int, ...]

ORDER_NAMES = ("grevlex", "lex", "grlex")

LT, EQ, GT = -1, 0, 1

# two-argument map() runs the comparisons at C speed

_add = operator.add
_sub = operator.sub
_le = operator.le
_neg = operator.neg


def mono_one(n: int) -> Monomial:
    return (0,) * n


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(map(_add, a, b))


def mono_divides(a: Monomial, b: Monomial) -> bool:
    """True iff a | b componentwise."""
    return all(map(_le, a, b))


def mono_div(a: Monomial, b: Monomial) -> Monomial:
    """a / b; caller must ensure b | a."""
    return tuple(map(_sub, a, b))


def mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(map(max, a, b))


def mono_degree(a: Monomial) -> int:
    return sum(a)


def mono_pow(a: Monomial, k: int) -> Monomial:
    return tuple(x * k for x in a)


def coprime(a: Monomial, b: Monomial) -> bool:
    return all(map(_coprime_pair, a, b))


def _coprime_pair(x: int, y: int) -> bool:
    return x == 0 or y == 0


# Sort keys: key(a) < key(b) iff a < b in the order.  grevlex breaks degree
# ties by the *last* nonzero entry of a-b being negative, hence the reversed
# negated tail.

def _key_lex(a: Monomial):
    return a


def _key_grlex(a: Monomial):
    return (sum(a), a)


def _key_grevlex(a: Monomial):
    return (sum(a), tuple(map(_neg, reversed(a))))


_KEYS: dict[str, Callable[[Monomial], object]] = {
    "lex": _key_lex,
    "grlex": _key_grlex,
    "grevlex": _key_grevlex,
}


class TermOrder:
    """Total multiplicative monomial order with 1 as the minimum.

    ``kind`` is one of grevlex / lex / grlex, or ``elim1:<kind>`` which
    orders by the first variable's exponent before falling back to
    ``<kind>`` on the remaining variables (used internally for
    one-variable elimination).
    """

    __slots__ = ("kind", "key")

    def __init__(self, kind: str = "grevlex"):
        if kind in _KEYS:
            self.key = _KEYS[kind]
        elif kind.startswith("elim1:") and kind[6:] in _KEYS:
            base = _KEYS[kind[6:]]
            self.key = lambda a, _b=base: (a[0], _b(a[1:]))
        else:
            raise ValueError(f"unknown term order {kind!r}")
        self.kind = kind

    def compare(self, a: Monomial, b: Monomial) -> int:
        if len(a) != len(b):
            raise ValueError("monomial length mismatch")
        ka, kb = self.key(a), self.key(b)
        if ka < kb:
            return LT
        if ka > kb:
            return GT
        return EQ

    def max(self, monos: Iterable[Monomial]) -> Monomial:
        return max(monos, key=self.key)

    def sort_desc(self, monos: Iterable[Monomial]) -> list[Monomial]:
        return sorted(monos, key=self.key, reverse=True)

    def __eq__(self, other) -> bool:
        return isinstance(other, TermOrder) and self.kind == other.kind

    def __hash__(self) -> int:
        return hash(self.kind)

    def __repr__(self) -> str:
        return f"TermOrder({self.kind!r})"


def monomial_compare(a: Monomial, b: Monomial, order: TermOrder) -> int:
    """Three-way comparison; returns LT, EQ or GT."""
    return order.compare(a, b)
