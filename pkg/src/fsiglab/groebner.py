"""Buchberger engine over F_p.

Reduced Groebner bases (normal pair selection, Gebauer-Moeller pair
elimination), full normal forms, staircase counts, ideal sum / colon /
intersection via one-variable elimination, and Krull dimension from
independent sets of the initial ideal.

All outputs are deterministic for a fixed ring, order, and generator list:
inputs are pre-sorted by (leading monomial, input position), pair selection
breaks ties by index, and reduced bases are returned sorted ascending by
leading monomial.
"""

from __future__ import annotations

import bisect
import heapq
from dataclasses import dataclass, field

from .errors import FsigError, NotMPrimaryError, ResourceLimitError
from .monomials import (
    Monomial,
    TermOrder,
    coprime,
    mono_div,
    mono_divides,
    mono_lcm,
    mono_mul,
    mono_one,
)
from .rings import Polynomial, Ring


class _Infinite:
    """Sentinel colength for non-m-primary ideals."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITE"

    def __reduce__(self):
        return (_Infinite, ())


INFINITE = _Infinite()


@dataclass
class Budget:
    """Resource caps for basis computations."""

    max_pairs: int = 200_000
    max_reduction_steps: int = 50_000_000
    pairs: int = field(default=0, repr=False)
    steps: int = field(default=0, repr=False)

    def charge_pair(self) -> None:
        self.pairs += 1
        if self.pairs > self.max_pairs:
            raise ResourceLimitError(
                f"pair budget exhausted ({self.max_pairs} S-pairs)"
            )

    def charge_steps(self, k: int) -> None:
        self.steps += k
        if self.steps > self.max_reduction_steps:
            raise ResourceLimitError(
                f"reduction budget exhausted ({self.max_reduction_steps} steps)"
            )


def _merge_axpy(h, gshift, p, key):
    """h - gshift for descending term lists; gshift pre-scaled."""
    out = []
    i = j = 0
    nh, ng = len(h), len(gshift)
    while i < nh and j < ng:
        mh, ch = h[i]
        mg, cg = gshift[j]
        if mh == mg:
            c = (ch - cg) % p
            if c:
                out.append((mh, c))
            i += 1
            j += 1
        elif key(mh) > key(mg):
            out.append((mh, ch))
            i += 1
        else:
            out.append((mg, (-cg) % p))
            j += 1
    out.extend(h[i:])
    for k in range(j, ng):
        mg, cg = gshift[k]
        out.append((mg, (-cg) % p))
    return out


class _Reducer:
    """Divisor table over a monic basis, kept ascending by leading monomial."""

    def __init__(self, ring: Ring, budget: Budget | None = None):
        self.ring = ring
        self.key = ring.order.key
        self.p = ring.p
        self.budget = budget
        self.lms: list[Monomial] = []
        self.lm_keys: list = []
        self.terms: list[tuple] = []

    def add(self, poly_terms) -> None:
        lm = poly_terms[0][0]
        k = self.key(lm)
        i = bisect.bisect_left(self.lm_keys, k)
        self.lms.insert(i, lm)
        self.lm_keys.insert(i, k)
        self.terms.insert(i, poly_terms)

    def remove(self, index: int) -> tuple:
        self.lm_keys.pop(index)
        self.lms.pop(index)
        return self.terms.pop(index)

    def find_divisor(self, mono: Monomial, mono_key=None) -> int:
        """Index of first basis element whose lm divides mono, else -1."""
        if mono_key is None:
            mono_key = self.key(mono)
        cut = bisect.bisect_right(self.lm_keys, mono_key)
        lms = self.lms
        for i in range(cut):
            lm = lms[i]
            ok = True
            for a, b in zip(lm, mono):
                if a > b:
                    ok = False
                    break
            if ok:
                return i
        return -1

    def reduce(self, terms) -> list:
        """Full normal form of a descending term list."""
        p = self.p
        key = self.key
        out = []
        h = list(terms)
        steps = 0
        while h:
            m, c = h[0]
            i = self.find_divisor(m)
            if i < 0:
                out.append((m, c))
                h = h[1:]
            else:
                g = self.terms[i]
                shift = mono_div(m, g[0][0])
                gshift = [(mono_mul(mg, shift), (c * cg) % p) for mg, cg in g]
                h = _merge_axpy(h, gshift, p, key)
                steps += len(g)
            if self.budget is not None and steps > 4096:
                self.budget.charge_steps(steps)
                steps = 0
        if self.budget is not None and steps:
            self.budget.charge_steps(steps)
        return out


def normal_form(f: Polynomial, basis, budget: Budget | None = None) -> Polynomial:
    """Unique remainder of f modulo a Groebner basis (monic or not)."""
    ring = f.ring
    red = _Reducer(ring, budget)
    for g in basis:
        if not g.is_zero():
            red.add(g.monic().terms)
    return Polynomial(ring, red.reduce(f.terms))


def spoly(f: Polynomial, g: Polynomial) -> Polynomial:
    """S-polynomial of monic f, g."""
    lmf, lmg = f.lm(), g.lm()
    lcm = mono_lcm(lmf, lmg)
    return f.mul_term(mono_div(lcm, lmf)) - g.mul_term(mono_div(lcm, lmg))


class _PairQueue:
    """Pending S-pairs under Gebauer-Moeller elimination.

    Pairs live in ``alive`` (pair -> lcm) and in a lazily cleaned heap
    ordered by (order key of lcm, indices), so selection is O(log) and the
    update scan touches each alive pair once without recomputing lcms.
    """

    def __init__(self, key):
        self.key = key
        self.alive: dict[tuple[int, int], Monomial] = {}
        self.heap: list = []

    def __bool__(self) -> bool:
        return bool(self.alive)

    def pop(self) -> tuple[tuple[int, int], Monomial]:
        while True:
            _, pair = heapq.heappop(self.heap)
            lcm = self.alive.pop(pair, None)
            if lcm is not None:
                return pair, lcm

    def push(self, pair: tuple[int, int], lcm: Monomial) -> None:
        self.alive[pair] = lcm
        heapq.heappush(self.heap, ((self.key(lcm), pair), pair))

    def update(self, lmG, h_index: int) -> None:
        """Drop superseded old pairs, then add minimal new pairs with h."""
        lmh = lmG[h_index]
        for pair in list(self.alive):
            lij = self.alive[pair]
            if not mono_divides(lmh, lij):
                continue
            i, j = pair
            if lij == mono_lcm(lmG[i], lmh) or lij == mono_lcm(lmG[j], lmh):
                continue
            del self.alive[pair]
        by_lcm: dict[Monomial, list[int]] = {}
        for i in range(h_index):
            by_lcm.setdefault(mono_lcm(lmG[i], lmh), []).append(i)
        minimal: list[Monomial] = []
        for L in sorted(by_lcm, key=self.key):
            if all(not mono_divides(M, L) for M in minimal):
                minimal.append(L)
        for L in minimal:
            # Buchberger's first criterion: skip coprime leading terms
            if not any(coprime(lmG[i], lmh) for i in by_lcm[L]):
                self.push((min(by_lcm[L]), h_index), L)


def buchberger(ring: Ring, generators, budget: Budget | None = None) -> tuple:
    """Reduced Groebner basis of the given generators, ascending by lm."""
    if budget is None:
        budget = Budget()
    key = ring.order.key
    gens = [g for g in generators if not g.is_zero()]
    gens.sort(key=lambda g: key(g.lm()))
    if not gens:
        return ()

    G: list[Polynomial] = []
    lmG: list[Monomial] = []
    pairs = _PairQueue(key)
    red = _Reducer(ring, budget)

    def add_element(h: Polynomial):
        G.append(h)
        lmG.append(h.lm())
        pairs.update(lmG, len(G) - 1)
        red.add(h.terms)

    for g in gens:
        h = Polynomial(ring, red.reduce(g.terms)).monic()
        if not h.is_zero():
            add_element(h)

    while pairs:
        (i, j), _ = pairs.pop()
        budget.charge_pair()
        s = spoly(G[i], G[j])
        if s.is_zero():
            continue
        h = Polynomial(ring, red.reduce(s.terms))
        if not h.is_zero():
            add_element(h.monic())

    return _interreduce(ring, G, lmG, budget)


def _interreduce(ring: Ring, G, lmG, budget) -> tuple:
    key = ring.order.key
    # minimal basis: drop any element whose lm is divisible by another's
    order_idx = sorted(range(len(G)), key=lambda i: key(lmG[i]))
    minimal: list[Polynomial] = []
    for i in order_idx:
        if not any(mono_divides(g.lm(), lmG[i]) for g in minimal):
            minimal.append(G[i])
    red = _Reducer(ring, budget)
    for h in minimal:
        red.add(h.terms)
    reduced = []
    for i, g in enumerate(minimal):
        # remove g, reduce it against the rest, reinsert the result
        at = red.lms.index(g.lm())
        red.remove(at)
        r = Polynomial(ring, red.reduce(g.terms)).monic()
        if not r.is_zero():
            reduced.append(r)
            red.add(r.terms)
    reduced.sort(key=lambda g: key(g.lm()))
    return tuple(reduced)


def is_groebner_basis(basis, budget: Budget | None = None) -> bool:
    """Buchberger criterion: every S-polynomial reduces to zero."""
    basis = [g for g in basis if not g.is_zero()]
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            if coprime(basis[i].lm(), basis[j].lm()):
                continue
            if not normal_form(spoly(basis[i].monic(), basis[j].monic()), basis, budget).is_zero():
                return False
    return True


class Ideal:
    """Generator list with a lazily attached reduced Groebner basis."""

    def __init__(self, ring: Ring, generators=(), _gb=None):
        self.ring = ring
        gens = []
        for g in generators:
            if isinstance(g, str):
                g = ring.parse(g)
            if not g.is_zero():
                gens.append(g)
        self.generators = tuple(gens)
        self._gb = tuple(_gb) if _gb is not None else None
        self._colength = None

    def groebner_basis(self, budget: Budget | None = None) -> tuple:
        if self._gb is None:
            self._gb = buchberger(self.ring, self.generators, budget)
        return self._gb

    def has_cached_basis(self) -> bool:
        return self._gb is not None

    def normal_form(self, f: Polynomial, budget: Budget | None = None) -> Polynomial:
        return normal_form(f, self.groebner_basis(), budget)

    def contains(self, f: Polynomial, budget: Budget | None = None) -> bool:
        return self.normal_form(f, budget).is_zero()

    def contains_ideal(self, other: "Ideal", budget: Budget | None = None) -> bool:
        return all(self.contains(g, budget) for g in other.generators)

    def equals(self, other: "Ideal", budget: Budget | None = None) -> bool:
        return self.groebner_basis(budget) == other.groebner_basis(budget)

    def is_proper(self) -> bool:
        gb = self.groebner_basis()
        return not any(g.lm() == mono_one(self.ring.nvars) for g in gb)

    def plus(self, other: "Ideal") -> "Ideal":
        if other.ring != self.ring:
            raise FsigError("ideal sum across different rings")
        return Ideal(self.ring, self.generators + other.generators)

    def leading_monomials(self) -> list[Monomial]:
        return [g.lm() for g in self.groebner_basis()]

    def staircase_is_finite(self) -> bool:
        return _has_all_pure_powers(self.leading_monomials(), self.ring.nvars)

    def colength(self, budget: Budget | None = None):
        """Number of standard monomials, or INFINITE."""
        if self._colength is None:
            gb = self.groebner_basis(budget)
            self._colength = count_standard_monomials(
                [g.lm() for g in gb], self.ring.nvars
            )
        return self._colength

    def standard_monomials(self, cap: int = 2_000_000) -> list[Monomial]:
        return enumerate_standard_monomials(
            self.leading_monomials(), self.ring.nvars, cap
        )

    def __repr__(self) -> str:
        inner = ", ".join(str(g) for g in self.generators) or "0"
        return f"Ideal({inner})"


# -- staircase counting ------------------------------------------------------


def _minimalize_monos(monos) -> tuple:
    out = []
    for m in sorted(set(monos), key=sum):
        if not any(mono_divides(g, m) for g in out):
            out.append(m)
    return tuple(sorted(out))


def _has_all_pure_powers(monos, nvars: int) -> bool:
    seen = [False] * nvars
    for m in monos:
        support = [i for i, e in enumerate(m) if e]
        if len(support) == 1:
            seen[support[0]] = True
        elif len(support) == 0:
            return True  # unit ideal: trivially finite (colength 0)
    return all(seen)


def count_standard_monomials(lead_monomials, nvars: int):
    """Colength of the monomial ideal generated by ``lead_monomials``.

    Counts without enumeration by splitting on a pivot power x_i^b:
    count(M) = count(M + x_i^b) + count(M : x_i^b).  Exact for any size.
    """
    gens = _minimalize_monos(lead_monomials)
    if any(sum(m) == 0 for m in gens):
        return 0
    if not _has_all_pure_powers(gens, nvars):
        return INFINITE
    cache: dict[tuple, int] = {}

    def rec(ms: tuple) -> int:
        if any(sum(m) == 0 for m in ms):
            return 0
        mixed = [m for m in ms if sum(1 for e in m if e) > 1]
        if not mixed:
            bounds = [0] * nvars
            for m in ms:
                for i, e in enumerate(m):
                    if e:
                        bounds[i] = e if bounds[i] == 0 else min(bounds[i], e)
            prod = 1
            for b in bounds:
                prod *= b
            return prod
        hit = cache.get(ms)
        if hit is not None:
            return hit
        counts = [0] * nvars
        for m in mixed:
            for i, e in enumerate(m):
                if e:
                    counts[i] += 1
        i = max(range(nvars), key=lambda v: counts[v])
        exps = sorted(m[i] for m in mixed if m[i])
        b = exps[len(exps) // 2]
        plus_gen = tuple(b if v == i else 0 for v in range(nvars))
        plus = _minimalize_monos(ms + (plus_gen,))
        colon = _minimalize_monos(
            tuple(
                tuple(max(0, e - b) if v == i else e for v, e in enumerate(m))
                for m in ms
            )
        )
        val = rec(plus) + rec(colon)
        cache[ms] = val
        return val

    return rec(gens)


def enumerate_standard_monomials(lead_monomials, nvars: int, cap: int = 2_000_000):
    """Explicit list of standard monomials; raises on infinite staircases."""
    gens = _minimalize_monos(lead_monomials)
    if any(sum(m) == 0 for m in gens):
        return []
    if not _has_all_pure_powers(gens, nvars):
        raise NotMPrimaryError("staircase is infinite")
    bounds = [0] * nvars
    for m in gens:
        support = [i for i, e in enumerate(m) if e]
        if len(support) == 1:
            i = support[0]
            bounds[i] = m[i] if bounds[i] == 0 else min(bounds[i], m[i])
    by_support: list[list[Monomial]] = [[] for _ in range(nvars)]
    for m in gens:
        top = max(i for i, e in enumerate(m) if e)
        by_support[top].append(m)
    out: list[Monomial] = []
    current = [0] * nvars

    def rec(i: int) -> None:
        if i == nvars:
            out.append(tuple(current))
            if len(out) > cap:
                raise ResourceLimitError(f"staircase exceeds cap {cap}")
            return
        for e in range(bounds[i]):
            current[i] = e
            blocked = False
            for m in by_support[i]:
                if all(m[v] <= current[v] for v in range(i + 1)):
                    blocked = True
                    break
            if blocked:
                break
            rec(i + 1)
        current[i] = 0

    rec(0)
    return out


# -- ideal arithmetic --------------------------------------------------------


def _fresh_var_name(ring: Ring) -> str:
    base = "t"
    if base not in ring.variables:
        return base
    i = 0
    while f"t{i}" in ring.variables:
        i += 1
    return f"t{i}"


def _elimination_setup(ring: Ring):
    base_kind = ring.order.kind
    if base_kind.startswith("elim1:"):
        base_kind = base_kind[6:]
    tname = _fresh_var_name(ring)
    ext = Ring(ring.p, (tname,) + ring.variables, (), order=f"elim1:{base_kind}")
    return ext


def _lift(ext: Ring, f: Polynomial, t_exp: int = 0) -> Polynomial:
    return Polynomial(ext, [((t_exp,) + m, c) for m, c in f.terms])


def _project(ring: Ring, f: Polynomial) -> Polynomial | None:
    """Drop the auxiliary variable; None if f involves it."""
    if any(m[0] for m, _ in f.terms):
        return None
    return Polynomial(ring, [(m[1:], c) for m, c in f.terms])


def intersect(I: Ideal, J: Ideal, budget: Budget | None = None) -> Ideal:
    """Intersection I and J via elimination of t from t*I + (1-t)*J."""
    if I.ring != J.ring:
        raise FsigError("intersection across different rings")
    ring = I.ring
    if not I.generators:
        return Ideal(ring, ())
    if not J.generators:
        return Ideal(ring, ())
    # containment fast paths save an elimination on nested chains; only
    # worthwhile when a basis is already cached
    if I.has_cached_basis() and I.contains_ideal(J, budget):
        return Ideal(ring, J.groebner_basis(budget), _gb=J.groebner_basis(budget))
    if J.has_cached_basis() and J.contains_ideal(I, budget):
        return Ideal(ring, I.groebner_basis(budget), _gb=I.groebner_basis(budget))
    ext = _elimination_setup(ring)
    t = ext.variable(0)
    one = ext.one()
    gens = [t * _lift(ext, g) for g in I.generators]
    gens += [(one - t) * _lift(ext, g) for g in J.generators]
    gb = buchberger(ext, gens, budget)
    kept = []
    for g in gb:
        h = _project(ring, g)
        if h is not None:
            kept.append(h)
    # elimination of the lead variable from a GB yields a GB for the
    # intersection in the base order
    return Ideal(ring, tuple(kept), _gb=tuple(kept))


def divide_exact(f: Polynomial, g: Polynomial) -> Polynomial:
    """f / g when g divides f exactly; raises otherwise."""
    if g.is_zero():
        raise FsigError("division by zero polynomial")
    ring = f.ring
    p = ring.p
    inv_lc = ring.field.inv(g.lc())
    lmg = g.lm()
    quot: dict[Monomial, int] = {}
    h = f
    while not h.is_zero():
        m, c = h.lt()
        if not mono_divides(lmg, m):
            raise FsigError("inexact polynomial division")
        shift = mono_div(m, lmg)
        coeff = (c * inv_lc) % p
        quot[shift] = coeff
        h = h - g.mul_term(shift, coeff)
    return Polynomial(ring, quot)


def colon(I: Ideal, f: Polynomial, budget: Budget | None = None) -> Ideal:
    """(I : f) via intersection with (f) followed by exact division."""
    if f.is_zero():
        raise FsigError("colon by the zero polynomial")
    ring = I.ring
    if not I.generators:
        return Ideal(ring, ())
    if len(f.terms) == 1 and all(e == 0 for e in f.lm()):
        return Ideal(ring, I.generators, _gb=I._gb)
    meet = intersect(I, Ideal(ring, (f,)), budget)
    gens = tuple(divide_exact(g, f) for g in meet.groebner_basis(budget))
    out = Ideal(ring, gens)
    return out


def colon_ideal(I: Ideal, J: Ideal, budget: Budget | None = None) -> Ideal:
    """(I : J) as the intersection of (I : g) over generators g of J."""
    if not J.generators:
        raise FsigError("colon by the zero ideal")
    result = None
    for g in J.generators:
        piece = colon(I, g, budget)
        result = piece if result is None else intersect(result, piece, budget)
    return result


def krull_dimension(ring: Ring, budget: Budget | None = None) -> int:
    """dim S/a as the largest variable subset meeting no initial term."""
    rel = ring.relation_ideal()
    gb = rel.groebner_basis(budget)
    if any(g.lm() == mono_one(ring.nvars) for g in gb):
        raise FsigError("relations generate the unit ideal")
    supports = [frozenset(i for i, e in enumerate(g.lm()) if e) for g in gb]
    n = ring.nvars
    best = 0
    for mask in range(1 << n):
        U = frozenset(i for i in range(n) if mask >> i & 1)
        if len(U) <= best:
            continue
        if all(not s <= U for s in supports):
            best = len(U)
    return best
