"""Recursive-descent parser for polynomial expressions.

Grammar (whitespace ignored, offsets are byte positions into the input):

    expr   := term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := INT | VAR ('^' INT)?

INT is a non-negative decimal integer; a unary minus is allowed on the
leading term only.  Variables must be declared in the ring.
"""

from __future__ import annotations

from .errors import ExponentOverflowError, ParseError
from .monomials import mono_mul, mono_one
from .rings import EXPONENT_CAP, Polynomial, Ring


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take(self) -> str:
        ch = self.peek()
        self.pos += 1
        return ch

    def read_int(self) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            raise ParseError("expected integer", start)
        return int(self.text[start : self.pos])

    def read_name(self) -> str:
        self.skip_ws()
        start = self.pos
        if self.pos >= len(self.text) or not self.text[self.pos].isalpha():
            raise ParseError("expected variable name", start)
        self.pos += 1
        while self.pos < len(self.text) and self.text[self.pos].isalnum():
            self.pos += 1
        return self.text[start : self.pos]


def parse_polynomial(text: str, ring: Ring) -> Polynomial:
    """Parse ``text`` into a normalized Polynomial over ``ring``."""
    sc = _Scanner(text)
    p = ring.p
    n = ring.nvars
    var_index = {name: i for i, name in enumerate(ring.variables)}
    acc: dict[tuple, int] = {}

    def parse_factor() -> tuple[tuple, int]:
        ch = sc.peek()
        if ch.isdigit():
            return mono_one(n), sc.read_int() % p
        if ch.isalpha():
            at = sc.pos
            name = sc.read_name()
            if name not in var_index:
                raise ParseError(f"unknown variable {name!r}", at)
            exp = 1
            if sc.peek() == "^":
                sc.take()
                at = sc.pos
                exp = sc.read_int()
                if exp > EXPONENT_CAP:
                    raise ExponentOverflowError(
                        f"exponent {exp} > 2^31 at offset {at}"
                    )
            mono = tuple(exp if j == var_index[name] else 0 for j in range(n))
            return mono, 1
        raise ParseError("expected integer or variable", sc.pos)

    def parse_term() -> tuple[tuple, int]:
        mono, coeff = parse_factor()
        while sc.peek() == "*":
            sc.take()
            m2, c2 = parse_factor()
            mono = mono_mul(mono, m2)
            coeff = (coeff * c2) % p
        return mono, coeff

    sign = 1
    if sc.peek() == "-":
        sc.take()
        sign = -1
    mono, coeff = parse_term()
    acc[mono] = (acc.get(mono, 0) + sign * coeff) % p
    while True:
        ch = sc.peek()
        if ch == "":
            break
        if ch == "+":
            sc.take()
            mono, coeff = parse_term()
            acc[mono] = (acc.get(mono, 0) + coeff) % p
        elif ch == "-":
            sc.take()
            mono, coeff = parse_term()
            acc[mono] = (acc.get(mono, 0) - coeff) % p
        else:
            raise ParseError(f"unexpected character {ch!r}", sc.pos)
    return Polynomial(ring, acc)
