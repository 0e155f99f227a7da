"""Colengths over the quotient ring: l_R(R/I) = l_S(S/(I + a)).

Strategy dispatch, fastest applicable first:

* no relations, or everything monomial: pivot-splitting count of standard
  monomials (never enumerates);
* monomial I with a single binomial relation f: count(S/I) minus the rank
  of multiplication-by-f on the staircase (per-chain interval kernel);
* bracket powers u^[p^e'] of an ideal with a short binomial basis, single
  binomial relation: digit decomposition of the staircase plus a
  union-find rank over two-entry columns;
* otherwise: a Groebner basis of I + a and the staircase count.

The fast paths are exact; the test suite pins them against the generic
route and the dense oracle.
"""

from __future__ import annotations

import numpy as np

from .errors import ResourceLimitError
from .groebner import (
    INFINITE,
    Budget,
    Ideal,
    _Reducer,
    _minimalize_monos,
    count_standard_monomials,
)
from .kernels import (
    TwoSparseRank,
    binomial_action_rank,
    enumerate_staircase,
)
from .monomials import mono_divides
from .rings import Polynomial, Ring

DEFAULT_MAX_CHAINS = 60_000_000


def _is_monomial(f: Polynomial) -> bool:
    return len(f.terms) == 1


def _pure_power_bounds(gens, nvars: int):
    """Minimal pure-power exponent per variable, or None when a variable
    has no pure power among the generators."""
    bounds = [0] * nvars
    for m in gens:
        support = [i for i, e in enumerate(m) if e]
        if len(support) == 1:
            i = support[0]
            bounds[i] = m[i] if bounds[i] == 0 else min(bounds[i], m[i])
    if any(b == 0 for b in bounds):
        return None
    return bounds


def _estimate_chains(bounds, direction) -> int:
    total = 0
    n = len(bounds)
    for face in range(n):
        d = direction[face]
        if d == 0:
            continue
        width = min(abs(d), bounds[face])
        cells = width
        for i in range(n):
            if i != face:
                cells *= bounds[i]
        total += cells
    return total


def quotient_colength(
    ring: Ring,
    generators,
    budget: Budget | None = None,
    max_chains: int = DEFAULT_MAX_CHAINS,
):
    """l_R(R/(generators)) for an ideal of R given by generators in S."""
    gens = [ring.parse(g) if isinstance(g, str) else g for g in generators]
    gens = [g for g in gens if not g.is_zero()]
    rels = ring.relations

    if all(_is_monomial(g) for g in gens):
        monos = [g.lm() for g in gens]
        if not rels:
            return count_standard_monomials(monos, ring.nvars)
        if all(_is_monomial(r) for r in rels):
            return count_standard_monomials(
                monos + [r.lm() for r in rels], ring.nvars
            )
        if len(rels) == 1 and len(rels[0].terms) == 2 and ring.nvars >= 2:
            result = _monomial_mod_binomial(ring, monos, rels[0], max_chains)
            if result is not None:
                return result

    ideal = Ideal(ring, tuple(gens) + tuple(rels))
    return ideal.colength(budget)


def _monomial_mod_binomial(ring: Ring, monos, f: Polynomial, max_chains: int):
    """l(S/(M + f)) = l(S/M) - rank(mul_f on S/M) for monomial M; None when
    the chain kernel does not apply (no finite box)."""
    minimal = _minimalize_monos(monos)
    if any(sum(m) == 0 for m in minimal):
        return 0
    bounds = _pure_power_bounds(minimal, ring.nvars)
    if bounds is None:
        return None
    count = count_standard_monomials(minimal, ring.nvars)
    (m1, c1), (m2, c2) = f.terms
    direction = [a - b for a, b in zip(m1, m2)]
    est = _estimate_chains(bounds, direction)
    if est > max_chains:
        raise ResourceLimitError(
            f"chain budget exceeded: ~{est} chains > {max_chains}"
        )
    rank = binomial_action_rank(minimal, bounds, m1, c1, m2, c2, ring.p)
    return count - rank


def bracket_quotient_colength(
    ring: Ring,
    u: Ideal,
    e_prime: int = 1,
    budget: Budget | None = None,
):
    """l(S/(u^[p^e'] + a)) for the bracket of an ideal u of S.

    Fast path: single relation with <= 2 terms, u with a basis of <= 2-term
    elements; decomposes the bracket staircase into p^(e'*n) digit copies
    of the staircase of u, multiplication maps become two-entry columns.
    """
    from .frobenius import bracket_power

    if e_prime == 0:
        return quotient_colength(ring, u.generators, budget)
    rels = ring.relations
    p = ring.p
    n = ring.nvars
    qp = p**e_prime

    fast = (
        len(rels) == 1
        and len(rels[0].terms) <= 2
        and u.has_cached_basis()
        and all(len(g.terms) <= 2 for g in u.groebner_basis())
    )
    if fast:
        result = _bracket_digit_colength(ring, u, e_prime)
        if result is not None:
            return result

    big = bracket_power(u, e_prime)
    return quotient_colength(ring, big.generators, budget)


def _bracket_digit_colength(ring: Ring, u: Ideal, e_prime: int):
    p = ring.p
    n = ring.nvars
    qp = p**e_prime
    f = ring.relations[0]
    gb = u.groebner_basis()
    count = u.colength()
    if count is INFINITE:
        return None
    if count == 0:
        return 0
    lead = [g.lm() for g in gb]
    bounds = _pure_power_bounds(_minimalize_monos(lead), n)
    if bounds is None:
        return None
    st = enumerate_staircase(_minimalize_monos(lead), bounds, count)

    # encode staircase rows; one extra step of room for the carry shifts
    caps = np.asarray(bounds, dtype=np.int64) + 1
    strides = np.ones(n, dtype=np.int64)
    for i in range(n - 2, -1, -1):
        strides[i] = strides[i + 1] * caps[i + 1]
    if int(strides[0]) * int(caps[0]) >= 2**62:
        return None
    keys = st @ strides

    def lookup(rows):
        """Index of each row in the staircase, -1 for misses."""
        k = rows @ strides
        pos = np.searchsorted(keys, k)
        pos[pos >= count] = count - 1
        hit = keys[pos] == k
        inside = (rows < caps).all(axis=1)
        out = np.where(hit & inside, pos, -1)
        return out

    # single-variable shift tables on the staircase: idx -> (idx', coeff);
    # one shared reducer handles the boundary cells that leave the staircase
    red = _Reducer(ring)
    for g in gb:
        red.add(g.terms)
    shift_idx = np.empty((n, count), dtype=np.int64)
    shift_coeff = np.empty((n, count), dtype=np.int64)
    for i in range(n):
        shifted = st.copy()
        shifted[:, i] += 1
        idx = lookup(shifted)
        coeff = np.where(idx >= 0, 1, 0).astype(np.int64)
        misses = np.nonzero(idx < 0)[0]
        for j in misses:
            nf = red.reduce([(tuple(int(x) for x in shifted[j]), 1)])
            if not nf:
                idx[j] = -1
                coeff[j] = 0
            else:
                assert len(nf) == 1, "short basis must give monomial normal forms"
                mono, c = nf[0]
                at = int(np.searchsorted(keys, int(np.dot(mono, strides))))
                idx[j] = at
                coeff[j] = c
        shift_idx[i] = idx
        shift_coeff[i] = coeff

    def composed(carry):
        """Multiplication by x^carry as (idx, coeff) arrays."""
        idx = np.arange(count, dtype=np.int64)
        coeff = np.ones(count, dtype=np.int64)
        for i in range(n):
            for _ in range(int(carry[i])):
                ok = idx >= 0
                nidx = np.where(ok, shift_idx[i][np.maximum(idx, 0)], -1)
                ncoeff = np.where(ok, coeff * shift_coeff[i][np.maximum(idx, 0)] % p, 0)
                idx, coeff = nidx, ncoeff
        idx[coeff == 0] = -1
        return idx, coeff

    terms = [(np.asarray(m, dtype=np.int64), c) for m, c in f.terms]
    total_rows = qp**n * count
    ts = TwoSparseRank(total_rows, p)

    # iterate digit cells b in [0, qp)^n
    b = np.zeros(n, dtype=np.int64)
    lin_strides = np.ones(n, dtype=np.int64)
    for i in range(n - 2, -1, -1):
        lin_strides[i] = lin_strides[i + 1] * qp
    comp_cache: dict[tuple, tuple] = {}
    while True:
        cols = [None, None]
        for t, (v, c) in enumerate(terms):
            w = b + v
            digit = w % qp
            carry = w // qp
            key = tuple(int(x) for x in carry)
            if key not in comp_cache:
                comp_cache[key] = composed(carry)
            idx, coeff = comp_cache[key]
            rowbase = int(np.dot(digit, lin_strides)) * count
            rows = np.where(idx >= 0, idx + rowbase, -1)
            cols[t] = (rows, coeff * c % p)
        if len(terms) == 1:
            ts.accumulate(
                cols[0][0],
                np.full(count, -1, dtype=np.int64),
                cols[0][1],
                np.zeros(count, dtype=np.int64),
            )
        else:
            ts.accumulate(cols[0][0], cols[1][0], cols[0][1], cols[1][1])
        pos = n - 1
        while pos >= 0:
            b[pos] += 1
            if b[pos] < qp:
                break
            b[pos] = 0
            pos -= 1
        if pos < 0:
            break
    return qp**n * count - ts.rank
