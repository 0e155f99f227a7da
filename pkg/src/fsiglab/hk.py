"""Hilbert-Kunz function values and multiplicity estimates, F-signature
and F-splitting-ratio estimators, the gap inequality check, and the
uniform-constant probe.

All sequence values are exact rationals; the normalized lengths follow the
error model |l_e/q^d - limit| <= C/p^e, which drives both the
geometric-tail point estimate and the reported bound.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import FsigError, NotMPrimaryError, ResourceLimitError
from .frobenius import (
    FrobeniusEngine,
    _engine,
    bracket_power,
    maximal_ideal,
    splitting_prime_approx,
)
from .groebner import INFINITE, Budget, Ideal, mono_divides, mono_one
from .lengths import (
    DEFAULT_MAX_CHAINS,
    bracket_quotient_colength,
    count_standard_monomials,
    quotient_colength,
)
from .rings import Polynomial, Ring, render

DEFAULT_FLAT_TOLERANCE = Fraction(1, 10**6)


@dataclass
class HKRow:
    e: int
    q: int
    length: int
    normalized: Fraction


@dataclass
class HKTable:
    """Per-level lengths l(R/I^[q]) with the tail-corrected estimate."""

    ring: Ring
    ideal: tuple
    rows: list[HKRow]
    estimate: Fraction
    error_bound: Fraction
    fitted_c: Fraction

    def is_exact(self) -> bool:
        return self.error_bound == 0


def _as_ideal(ring: Ring, I) -> Ideal:
    if isinstance(I, Ideal):
        return I
    return Ideal(ring, I)


def hk_function(ring: Ring, I, e: int, budget: Budget | None = None,
                max_chains: int = DEFAULT_MAX_CHAINS) -> int:
    """l_R(R/I^[p^e]); requires I + a to be m-primary."""
    ideal = _as_ideal(ring, I)
    if e < 0:
        raise FsigError("hk_function needs e >= 0")
    big = bracket_power(ideal, e)
    length = quotient_colength(ring, big.generators, budget, max_chains)
    if length is INFINITE:
        raise NotMPrimaryError("ideal is not m-primary in R")
    return length


def hk_estimate(ring: Ring, I, e_max: int, budget: Budget | None = None,
                max_chains: int = DEFAULT_MAX_CHAINS) -> HKTable:
    """Normalized Hilbert-Kunz rows for e <= e_max plus the tail estimate.

    The estimate adds the geometric tail delta/(p-1) to the last row and
    clamps it to the certified band around that row; the band radius is
    fitted_C * p / ((p-1) p^e_max) with fitted_C = max |delta_e| p^e.
    """
    if e_max < 2:
        raise FsigError("hk_estimate needs e_max >= 2")
    ideal = _as_ideal(ring, I)
    d = ring.dimension()
    p = ring.p
    rows: list[HKRow] = []
    for e in range(1, e_max + 1):
        length = hk_function(ring, ideal, e, budget, max_chains)
        rows.append(HKRow(e, p**e, length, Fraction(length, p ** (e * d))))
    deltas = [rows[i + 1].normalized - rows[i].normalized for i in range(len(rows) - 1)]
    fitted_c = max((abs(dl) * p ** (i + 1) for i, dl in enumerate(deltas)), default=Fraction(0))
    error_bound = fitted_c * p / ((p - 1) * p**e_max)
    last = rows[-1].normalized
    estimate = last + deltas[-1] * Fraction(1, p - 1)
    lo, hi = last - error_bound, last + error_bound
    if estimate < lo:
        estimate = lo
    elif estimate > hi:
        estimate = hi
    return HKTable(ring, ideal.generators, rows, estimate, error_bound, fitted_c)


@dataclass
class SigRow:
    e: int
    q: int
    a_e: int
    lower: Fraction
    upper: Fraction


@dataclass
class SplittingRecord:
    """Splitting-number rows with signature and ratio estimates."""

    ring: Ring
    rows: list[SigRow]
    s_estimate: Fraction
    s_lower: Fraction
    s_upper: Fraction
    cauchy_flat: bool
    tolerance: Fraction
    p_approx: Ideal | None = None
    p_stabilized: bool | None = None
    sdim: int | None = None
    r_f_estimate: Fraction | None = None
    ratio_unstable: bool = False


def f_signature_estimate(
    ring: Ring,
    e_max: int,
    budget: Budget | None = None,
    tolerance: Fraction = DEFAULT_FLAT_TOLERANCE,
) -> SplittingRecord:
    """Lower sequence a_e/q^d, one-step upper sequence, and the point
    estimate: the last lower value when the lower sequence has gone flat,
    otherwise the midpoint of the final bracket."""
    if e_max < 2:
        raise FsigError("f_signature_estimate needs e_max >= 2")
    eng = _engine(ring, budget)
    d = ring.dimension()
    p = ring.p
    rows: list[SigRow] = []
    for rec in eng.records(e_max):
        upper_len = bracket_quotient_colength(ring, rec.ideal, 1, budget)
        rows.append(
            SigRow(
                rec.e,
                rec.q,
                rec.a_e,
                Fraction(rec.a_e, rec.q**d),
                Fraction(upper_len, rec.q**d * p**d),
            )
        )
    last_gap = abs(rows[-1].lower - rows[-2].lower)
    flat = last_gap < tolerance
    if flat:
        s_estimate = rows[-1].lower
    else:
        s_estimate = (rows[-1].lower + rows[-1].upper) / 2
    return SplittingRecord(
        ring,
        rows,
        s_estimate,
        rows[-1].lower,
        rows[-1].upper,
        flat,
        tolerance,
    )


def f_splitting_ratio_estimate(
    ring: Ring,
    e_max: int,
    budget: Budget | None = None,
    tolerance: Fraction = DEFAULT_FLAT_TOLERANCE,
) -> SplittingRecord:
    """Extends the signature record with the splitting-prime approximation,
    its coheight, and the rescaled ratio estimate.

    A non-stabilized intersection is evidence the true intersection is the
    zero ideal, so the record falls back to coheight dim(R) and the plain
    signature estimate, flagged ratio_unstable.
    """
    record = f_signature_estimate(ring, e_max, budget, tolerance)
    approx, stabilized = splitting_prime_approx(ring, e_max, budget)
    record.p_approx = approx
    record.p_stabilized = stabilized
    if stabilized:
        record.sdim = _coheight(approx)
        record.r_f_estimate = Fraction(
            record.rows[-1].a_e, ring.p ** (e_max * record.sdim)
        )
    else:
        record.ratio_unstable = True
        record.sdim = ring.dimension()
        record.r_f_estimate = record.s_estimate
    return record


def _coheight(ideal: Ideal) -> int:
    """dim S/ideal via independent variable subsets of the initial ideal."""
    gb = ideal.groebner_basis()
    n = ideal.ring.nvars
    if any(g.lm() == mono_one(n) for g in gb):
        return 0
    supports = [frozenset(i for i, e in enumerate(g.lm()) if e) for g in gb]
    best = 0
    for mask in range(1 << n):
        U = frozenset(i for i in range(n) if mask >> i & 1)
        if len(U) > best and all(not s <= U for s in supports):
            best = len(U)
    return best


@dataclass
class GapReport:
    lhs: Fraction
    s_estimate: Fraction
    combined_error: Fraction
    holds: bool
    length_jump: int
    table_inner: HKTable
    table_outer: HKTable


def verify_hk_gap(ring: Ring, I, J, e_max: int, budget: Budget | None = None) -> GapReport:
    """Check (e_HK(I) - e_HK(J)) / l(J/I) >= s within reported errors.

    Needs I strictly inside J, both m-primary in R.  The right side is the
    signature estimate minus its bracket halfwidth and final lower-gap; the
    left side carries the two table bounds divided by l(J/I).
    """
    I_ideal = _as_ideal(ring, I)
    J_ideal = _as_ideal(ring, J)
    rel = ring.relations
    J_full = Ideal(ring, J_ideal.generators + rel)
    I_full = Ideal(ring, I_ideal.generators + rel)
    if not all(J_full.contains(g, budget) for g in I_ideal.generators):
        raise FsigError("gap check needs I contained in J")
    if all(I_full.contains(g, budget) for g in J_ideal.generators):
        raise FsigError("gap check needs strict containment I != J")
    li = quotient_colength(ring, I_ideal.generators, budget)
    lj = quotient_colength(ring, J_ideal.generators, budget)
    if li is INFINITE or lj is INFINITE:
        raise NotMPrimaryError("gap check needs m-primary ideals")
    jump = li - lj
    if jump <= 0:
        raise FsigError("length jump must be positive")
    ti = hk_estimate(ring, I_ideal, e_max, budget)
    tj = hk_estimate(ring, J_ideal, e_max, budget)
    lhs = (ti.estimate - tj.estimate) / jump
    sig = f_signature_estimate(ring, e_max, budget)
    s_err = (sig.s_upper - sig.s_lower) / 2
    if len(sig.rows) >= 2:
        s_err += abs(sig.rows[-1].lower - sig.rows[-2].lower)
    combined = (ti.error_bound + tj.error_bound) / jump + s_err
    holds = lhs >= sig.s_estimate - combined
    return GapReport(lhs, sig.s_estimate, combined, holds, jump, ti, tj)


@dataclass
class ProbeSample:
    e: int
    e_prime: int
    extras: tuple
    length: int
    bracket_length: int
    discrepancy: Fraction
    ratio: Fraction


@dataclass
class ProbeReport:
    """Empirical uniform-constant measurements.

    ratio = |l(R/I) - l(R/I^[p^e'])/p^(e'd)| / p^(e(d-1)) over sampled
    ideals I containing m^[p^e]; empirical_C is the max ratio seen.
    """

    ring: Ring
    seed: int
    samples: list[ProbeSample]
    skipped: list[tuple]
    empirical_c: Fraction
    worst: ProbeSample | None
    per_e_max: dict[int, Fraction] = field(default_factory=dict)


def uniform_constant_probe(
    ring: Ring,
    e_range,
    eprime_range,
    samples: int,
    seed: int,
    budget: Budget | None = None,
    max_chains: int = DEFAULT_MAX_CHAINS,
    pool_size: int = 8,
    include_binomials: bool = False,
    jobs: int = 1,
) -> ProbeReport:
    """Sample ideals above m^[p^e] and measure the normalized defect between
    l(R/I) and the rescaled bracket lengths; deterministic for a seed.

    Sample generation is sequential in the seed; only evaluation is fanned
    out over ``jobs`` threads, and results are reduced in sample order, so
    the report does not depend on ``jobs``.  Evaluations whose bracket
    exceeds the chain budget are recorded in ``skipped``.
    """
    d = ring.dimension()
    if d < 1:
        raise FsigError("probe needs positive dimension")
    p = ring.p
    n = ring.nvars
    rng = random.Random(seed)
    eprimes = sorted(eprime_range)

    tasks: list[tuple[int, int, tuple]] = []
    for e in sorted(e_range):
        q = p**e
        degree_cap = q * n
        for s in range(samples):
            extras: list[Polynomial] = []
            pool: list[tuple] = []
            for _ in range(pool_size):
                mono = tuple(rng.randrange(q) for _ in range(n))
                if 0 < sum(mono) <= degree_cap:
                    pool.append(mono)
            for mono in pool:
                if rng.random() < 0.5:
                    extras.append(ring.monomial(mono))
            if include_binomials and pool and rng.random() < 0.5:
                m1 = rng.choice(pool)
                m2 = tuple(rng.randrange(q) for _ in range(n))
                if m1 != m2 and sum(m2) > 0:
                    extras.append(
                        ring.monomial(m1) - ring.monomial(m2, rng.randrange(1, p))
                    )
            gens = tuple(
                ring.variable(i).frobenius(e) for i in range(n)
            ) + tuple(extras)
            tasks.append((e, s, gens))

    def evaluate(task):
        e, s, gens = task
        ideal = Ideal(ring, gens)
        base_len = quotient_colength(ring, gens, budget, max_chains)
        if base_len is INFINITE:
            raise NotMPrimaryError("probe sample not m-primary")
        extras_text = tuple(render(g) for g in gens[n:])
        found: list[ProbeSample] = []
        misses: list[tuple] = []
        for ep in eprimes:
            try:
                blen = hk_function(ring, ideal, ep, budget, max_chains)
            except ResourceLimitError:
                misses.append((e, ep, s, "resource limit"))
                continue
            disc = abs(Fraction(base_len) - Fraction(blen, p ** (ep * d)))
            ratio = disc / p ** (e * (d - 1))
            found.append(
                ProbeSample(e, ep, extras_text, base_len, blen, disc, ratio)
            )
        return found, misses

    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool_exec:
            results = list(pool_exec.map(evaluate, tasks))
    else:
        results = [evaluate(t) for t in tasks]

    out: list[ProbeSample] = []
    skipped: list[tuple] = []
    per_e: dict[int, Fraction] = {}
    for found, misses in results:
        out.extend(found)
        skipped.extend(misses)
        for sample in found:
            if sample.e not in per_e or sample.ratio > per_e[sample.e]:
                per_e[sample.e] = sample.ratio
    worst = max(out, key=lambda smp: smp.ratio, default=None)
    return ProbeReport(
        ring,
        seed,
        out,
        skipped,
        worst.ratio if worst else Fraction(0),
        worst,
        per_e,
    )
