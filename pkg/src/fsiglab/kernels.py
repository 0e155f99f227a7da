"""Numeric hot kernels with selectable backend.

Set FSIG_BACKEND=numpy to skip numba JIT compilation and run the same
loop-level implementations interpreted over numpy arrays (plus a vectorized
dense-elimination variant); the default backend JIT-compiles them with
numba @njit.  ``benchmarks/bench_kernels.py`` compares the two.

Kernels:

* dense row-echelon rank over F_p (oracle linear algebra);
* staircase enumeration of a monomial ideal inside its pure-power box;
* rank of a matrix with at most two nonzeros per column, via weighted
  union-find (kernel behind quotient-by-hypersurface colengths);
* rank of the multiplication-by-binomial map on the staircase of a
  monomial ideal, via per-chain interval scans that never touch
  individual staircase cells.
"""

from __future__ import annotations

import os

import numpy as np

_ENV_FLAG = "FSIG_BACKEND"


def backend() -> str:
    """Active backend: 'numba' unless FSIG_BACKEND=numpy or numba is absent."""
    choice = os.environ.get(_ENV_FLAG, "").strip().lower()
    if choice == "numpy":
        return "numpy"
    if choice in ("", "numba"):
        try:
            import numba  # noqa: F401

            return "numba"
        except ImportError:
            if choice == "numba":
                raise RuntimeError("FSIG_BACKEND=numba but numba is not installed")
            return "numpy"
    raise RuntimeError(f"unknown {_ENV_FLAG}={choice!r}")


_BACKEND = backend()


def _compile(fn):
    if _BACKEND == "numba":
        from numba import njit

        # nogil so probe samples can overlap across threads
        return njit(cache=True, nogil=True)(fn)
    return fn


def _compile_parallel(fn):
    if _BACKEND == "numba":
        from numba import njit

        return njit(cache=True, nogil=True, parallel=True)(fn)
    return fn


if _BACKEND == "numba":
    from numba import get_num_threads as _thread_count
    from numba import get_thread_id as _thread_id
    from numba import prange
else:
    prange = range

    def _thread_count() -> int:
        return 1

    def _thread_id() -> int:
        return 0


# -- dense rank over F_p -------------------------------------------------


def _pow_mod(a: int, k: int, p: int) -> int:
    a %= p
    r = 1
    while k:
        if k & 1:
            r = r * a % p
        a = a * a % p
        k >>= 1
    return r


def _rank_mod_rows(A, p):  # pragma: no cover - exercised via rank_mod
    nrows, ncols = A.shape
    r = 0
    for c in range(ncols):
        piv = -1
        for i in range(r, nrows):
            if A[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(c, ncols):
                t = A[r, j]
                A[r, j] = A[piv, j]
                A[piv, j] = t
        inv = _pow_mod(A[r, c], p - 2, p)
        for j in range(c, ncols):
            A[r, j] = A[r, j] * inv % p
        for i in range(r + 1, nrows):
            m = A[i, c]
            if m:
                for j in range(c, ncols):
                    A[i, j] = (A[i, j] - m * A[r, j]) % p
        r += 1
        if r == nrows:
            break
    return r


# rebind so that njit bodies referencing _pow_mod resolve the compiled one
_pow_mod = _compile(_pow_mod)
_rank_mod_rows_impl = _compile(_rank_mod_rows)


def _rank_mod_vectorized(A, p):
    """Pure-numpy echelon rank: whole-matrix row updates per pivot."""
    A = A % p
    nrows, ncols = A.shape
    r = 0
    for c in range(ncols):
        col = A[r:, c]
        nz = np.nonzero(col)[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        A[r] = A[r] * _pow_mod(int(A[r, c]), p - 2, p) % p
        below = A[r + 1 :, c]
        mask = below != 0
        if mask.any():
            A[r + 1 :][mask] = (
                A[r + 1 :][mask] - np.outer(below[mask], A[r])
            ) % p
        r += 1
        if r == nrows:
            break
    return r


def rank_mod(matrix, p: int) -> int:
    """Rank of an integer matrix over F_p."""
    A = np.ascontiguousarray(np.atleast_2d(np.asarray(matrix, dtype=np.int64)) % p)
    if A.size == 0:
        return 0
    if _BACKEND == "numba":
        return int(_rank_mod_rows_impl(A.copy(), p))
    return int(_rank_mod_vectorized(A.copy(), p))


# -- staircase enumeration ------------------------------------------------


def _enum_staircase(gens, levels, bounds, out):  # pragma: no cover
    """DFS over standard monomials of a monomial ideal, lexicographic in
    variable index; gens must be minimal, bounds the pure-power box.
    Writes rows of ``out`` and returns the count."""
    n = bounds.shape[0]
    k = gens.shape[0]
    current = np.zeros(n, dtype=np.int64)
    count = 0
    level = 0
    # iterative DFS: current[level] is the exponent being tried
    while True:
        if level == n:
            for i in range(n):
                out[count, i] = current[i]
            count += 1
            level -= 1
            current[level] += 1
        blocked = False
        while level >= 0:
            e = current[level]
            if e >= bounds[level]:
                current[level] = 0
                level -= 1
                if level < 0:
                    return count
                current[level] += 1
                continue
            blocked = False
            for g in range(k):
                if levels[g] == level:
                    ok = True
                    for v in range(level + 1):
                        if gens[g, v] > current[v]:
                            ok = False
                            break
                    if ok:
                        blocked = True
                        break
            if blocked:
                current[level] = 0
                level -= 1
                if level < 0:
                    return count
                current[level] += 1
                continue
            break
        if level < 0:
            return count
        level += 1


_enum_staircase_impl = _compile(_enum_staircase)


def enumerate_staircase(gens, bounds, expected: int):
    """Standard monomials (rows, lexicographic) of the minimal monomial
    generators ``gens`` whose staircase fits the pure-power box ``bounds``."""
    gens = np.asarray(gens, dtype=np.int64).reshape(len(gens), -1)
    bounds = np.asarray(bounds, dtype=np.int64)
    levels = np.zeros(gens.shape[0], dtype=np.int64)
    for i in range(gens.shape[0]):
        nz = np.nonzero(gens[i])[0]
        levels[i] = int(nz[-1]) if nz.size else 0
    out = np.empty((expected, bounds.shape[0]), dtype=np.int64)
    count = int(_enum_staircase_impl(gens, levels, bounds, out))
    if count != expected:
        raise RuntimeError(f"staircase enumeration mismatch: {count} != {expected}")
    return out


# -- two-nonzeros-per-column rank via weighted union-find -----------------


class TwoSparseRank:
    """Accumulates the rank of a matrix presented column-by-column, each
    column having at most two nonzero entries.

    Rows form a union-find forest with multiplicative potentials mod p:
    a column with entries in two distinct components merges them (rank+1);
    within one component it either matches the recorded ratio (dependent)
    or grounds the component (rank+1); single-entry columns ground their
    component.  Streaming: feed tiles via accumulate().
    """

    def __init__(self, nrows: int, p: int):
        self.p = p
        self.rank = 0
        self.parent = np.arange(nrows, dtype=np.int64)
        self.pot = np.ones(nrows, dtype=np.int64)
        self.grounded = np.zeros(nrows, dtype=np.uint8)
        self.size = np.ones(nrows, dtype=np.int64)

    def accumulate(self, rows1, rows2, w1, w2) -> None:
        """Feed columns w1*e_rows1 + w2*e_rows2; row index -1 or weight 0
        mean an absent entry."""
        added = _two_sparse_accumulate_impl(
            self.parent,
            self.pot,
            self.grounded,
            self.size,
            np.asarray(rows1, dtype=np.int64),
            np.asarray(rows2, dtype=np.int64),
            np.asarray(w1, dtype=np.int64),
            np.asarray(w2, dtype=np.int64),
            self.p,
        )
        self.rank += int(added)


def _dsu_find(parent, pot, x, p):  # pragma: no cover
    """Root of x and the ratio e_x / e_root, with path compression."""
    root = x
    rho = 1
    while parent[root] != root:
        rho = rho * pot[root] % p
        root = parent[root]
    acc = rho
    while parent[x] != root:
        nxt = parent[x]
        step = pot[x]
        pot[x] = acc
        parent[x] = root
        acc = acc * _pow_mod(step, p - 2, p) % p
        x = nxt
    return root, rho


def _two_sparse_accumulate(parent, pot, grounded, size, rows1, rows2, w1, w2, p):  # pragma: no cover
    added = 0
    ncols = rows1.shape[0]
    for idx in range(ncols):
        u = rows1[idx]
        v = rows2[idx]
        a = w1[idx] % p
        b = w2[idx] % p
        if u < 0 or a == 0:
            u, v = v, u
            a, b = b, a
        if u < 0 or a == 0:
            continue
        if v >= 0 and b != 0 and u == v:
            a = (a + b) % p
            v = -1
            if a == 0:
                continue
        ru, rho_u = _dsu_find(parent, pot, u, p)
        if v < 0 or b == 0:
            if not grounded[ru]:
                grounded[ru] = 1
                added += 1
            continue
        rv, rho_v = _dsu_find(parent, pot, v, p)
        if ru == rv:
            if grounded[ru]:
                continue
            if (a * rho_u + b * rho_v) % p != 0:
                grounded[ru] = 1
                added += 1
            continue
        if size[ru] < size[rv]:
            ru, rv = rv, ru
            rho_u, rho_v = rho_v, rho_u
            a, b = b, a
        # merge rv under ru: e_rv = -(a*rho_u) / (b*rho_v) * e_ru
        num = (p - a * rho_u % p) % p
        den = b * rho_v % p
        parent[rv] = ru
        pot[rv] = num * _pow_mod(den, p - 2, p) % p
        size[ru] += size[rv]
        if grounded[rv]:
            if grounded[ru]:
                # both sides already full on their vertices: edge dependent
                continue
            grounded[ru] = 1
        added += 1
    return added


_dsu_find = _compile(_dsu_find)
_two_sparse_accumulate_impl = _compile(_two_sparse_accumulate)


# -- multiplication-by-binomial rank on a monomial staircase --------------


def _chain_rank(gens, bounds, v1, c1, v2, c2, p):  # pragma: no cover
    """Rank of m -> c1*x^v1*m + c2*x^v2*m on the staircase of the monomial
    ideal ``gens`` clipped to ``bounds``, without enumerating cells.

    Cells along direction d = v1 - v2 form chains; a source chain maps to
    the chain of its shift by v2 with entries at consecutive positions.
    Per chain pair only interval endpoints are scanned: each monomial
    generator blocks a contiguous j-interval.  Chains are indexed linearly
    over the entry faces of the box so the loop parallelizes.
    """
    n = bounds.shape[0]
    k = gens.shape[0]
    d = np.empty(n, dtype=np.int64)
    for i in range(n):
        d[i] = v1[i] - v2[i]

    # entry cells: w in box with w - d outside the box; enumerate per face,
    # deduped by keeping only cells whose first out-of-box witness is that
    # face
    f_lo = np.zeros(n, dtype=np.int64)
    f_hi = np.zeros(n, dtype=np.int64)
    cells = np.zeros(n, dtype=np.int64)
    total = 0
    for face in range(n):
        if d[face] > 0:
            f_lo[face] = 0
            f_hi[face] = min(d[face], bounds[face])
        elif d[face] < 0:
            f_lo[face] = max(0, bounds[face] + d[face])
            f_hi[face] = bounds[face]
        else:
            continue
        if f_lo[face] >= f_hi[face]:
            continue
        size = f_hi[face] - f_lo[face]
        for i in range(n):
            if i != face:
                size *= bounds[i]
        cells[face] = size
        total += size
    if total == 0:
        return 0
    offs = np.zeros(n + 1, dtype=np.int64)
    for face in range(n):
        offs[face + 1] = offs[face] + cells[face]

    nt = _thread_count()
    ws = np.empty((nt, n), dtype=np.int64)
    los = np.empty((nt, k + 1), dtype=np.int64)
    his = np.empty((nt, k + 1), dtype=np.int64)
    lot = np.empty((nt, k + 1), dtype=np.int64)
    hit = np.empty((nt, k + 1), dtype=np.int64)

    rank = 0
    for t in prange(total):
        tid = _thread_id()
        face = 0
        while offs[face + 1] <= t:
            face += 1
        rem = t - offs[face]
        w = ws[tid]
        for i in range(n - 1, -1, -1):
            span = (f_hi[face] - f_lo[face]) if i == face else bounds[i]
            w[i] = rem % span
            rem //= span
        w[face] += f_lo[face]
        dup = False
        for i in range(face):
            if d[i] > 0 and w[i] < d[i]:
                dup = True
                break
            if d[i] < 0 and w[i] >= bounds[i] + d[i]:
                dup = True
                break
        if not dup:
            rank += _chain_pair_rank(
                gens, bounds, w, d, v1, v2, k, n,
                los[tid], his[tid], lot[tid], hit[tid], p,
            )
    return rank


def _line_alive_runs(gens, bounds, base, d, k, n, lo_arr, hi_arr):  # pragma: no cover
    """Blocked j-intervals on the line base + j*d clipped to the box; the
    line's box range is returned as (jmin, jmax, count) with intervals
    stored sorted in lo_arr/hi_arr[0:count]."""
    jmin = np.int64(0)
    jmax = np.int64(2**62)
    for i in range(n):
        if d[i] == 1:
            lo = -base[i]
            if lo > jmin:
                jmin = lo
            hi = bounds[i] - 1 - base[i]
            if hi < jmax:
                jmax = hi
        elif d[i] > 0:
            # 0 <= base + j*d < B
            lo = -base[i] // d[i]
            if -base[i] % d[i]:
                lo += 1
            if lo > jmin:
                jmin = lo
            hi = (bounds[i] - 1 - base[i]) // d[i]
            if hi < jmax:
                jmax = hi
        elif d[i] < 0:
            lo = (bounds[i] - 1 - base[i]) // d[i]
            if (bounds[i] - 1 - base[i]) % d[i]:
                lo += 1
            if lo > jmin:
                jmin = lo
            hi = (-base[i]) // d[i]
            if hi < jmax:
                jmax = hi
        else:
            if base[i] < 0 or base[i] >= bounds[i]:
                return np.int64(1), np.int64(0), 0
    count = 0
    for g in range(k):
        glo = jmin
        ghi = jmax
        ok = True
        for i in range(n):
            rem = gens[g, i] - base[i]
            if d[i] == 1:
                if rem > glo:
                    glo = rem
            elif d[i] > 0:
                lo = rem // d[i]
                if rem % d[i]:
                    lo += 1
                if lo > glo:
                    glo = lo
            elif d[i] < 0:
                hi = rem // d[i]
                if hi < ghi:
                    ghi = hi
            else:
                if base[i] < gens[g, i]:
                    ok = False
                    break
        if ok and glo <= ghi:
            lo_arr[count] = glo
            hi_arr[count] = ghi
            count += 1
    # insertion sort by lo
    for a in range(1, count):
        keylo = lo_arr[a]
        keyhi = hi_arr[a]
        b = a - 1
        while b >= 0 and lo_arr[b] > keylo:
            lo_arr[b + 1] = lo_arr[b]
            hi_arr[b + 1] = hi_arr[b]
            b -= 1
        lo_arr[b + 1] = keylo
        hi_arr[b + 1] = keyhi
    # merge overlaps in place
    m = 0
    for a in range(count):
        if m and lo_arr[a] <= hi_arr[m - 1] + 1:
            if hi_arr[a] > hi_arr[m - 1]:
                hi_arr[m - 1] = hi_arr[a]
        else:
            lo_arr[m] = lo_arr[a]
            hi_arr[m] = hi_arr[a]
            m += 1
    return jmin, jmax, m


def _count_dead_in(lo_arr, hi_arr, m, jmin, jmax, a, b):  # pragma: no cover
    """Dead positions within [a, b] given blocked intervals and box range
    [jmin, jmax]; positions outside the box range are dead too."""
    if a > b:
        return np.int64(0)
    dead = np.int64(0)
    if a < jmin:
        top = jmin - 1 if jmin - 1 < b else b
        dead += top - a + 1
        a = jmin
        if a > b:
            return dead
    if b > jmax:
        bot = jmax + 1 if jmax + 1 > a else a
        dead += b - bot + 1
        b = jmax
        if a > b:
            return dead
    for t in range(m):
        lo = lo_arr[t]
        hi = hi_arr[t]
        if lo < a:
            lo = a
        if hi > b:
            hi = b
        if lo <= hi:
            dead += hi - lo + 1
    return dead


def _is_alive(lo_arr, hi_arr, m, jmin, jmax, j):  # pragma: no cover
    if j < jmin or j > jmax:
        return False
    for t in range(m):
        if lo_arr[t] <= j <= hi_arr[t]:
            return False
    return True


def _chain_pair_rank(gens, bounds, w, d, v1, v2, k, n, lo_s, hi_s, lo_t, hi_t, p):  # pragma: no cover
    """Rank of the block of one source chain (entry cell w) against its
    target chain (shift by v2): columns j give c2*e_j + c1*e_{j+1} with
    dead rows dropped.  rank = #columns - sum over column runs of
    (s - 1 + [left dead] + [right dead]) with s = dead shared targets,
    clamped at runs with s = 0 to [left and right dead]."""
    smin, smax, ms = _line_alive_runs(gens, bounds, w, d, k, n, lo_s, hi_s)
    if smin > smax:
        return 0
    tbase = np.empty(n, dtype=np.int64)
    for i in range(n):
        tbase[i] = w[i] + v2[i]
    tmin, tmax, mt = _line_alive_runs(gens, bounds, tbase, d, k, n, lo_t, hi_t)
    if tmin > tmax:
        # no live targets at all: every present column is a zero column
        return 0

    rank = 0
    # walk alive source runs: complement of blocked intervals within box
    j = smin
    seg = 0
    while j <= smax:
        # next blocked interval at or after j
        blk_lo = smax + 1
        blk_hi = smax + 1
        while seg < ms and hi_s[seg] < j:
            seg += 1
        if seg < ms:
            blk_lo = lo_s[seg]
            blk_hi = hi_s[seg]
        if blk_lo <= j:
            j = blk_hi + 1
            continue
        a = j
        b = blk_lo - 1 if blk_lo - 1 < smax else smax
        # columns a..b all present; targets at positions a..b+1
        ncols = b - a + 1
        s = _count_dead_in(lo_t, hi_t, mt, tmin, tmax, a + 1, b)
        left_dead = 0 if _is_alive(lo_t, hi_t, mt, tmin, tmax, a) else 1
        right_dead = 0 if _is_alive(lo_t, hi_t, mt, tmin, tmax, b + 1) else 1
        if s == 0:
            nullity = 1 if (left_dead and right_dead) else 0
        else:
            nullity = (s - 1) + left_dead + right_dead
        rank += ncols - nullity
        j = b + 1
    return rank


_line_alive_runs = _compile(_line_alive_runs)
_count_dead_in = _compile(_count_dead_in)
_is_alive = _compile(_is_alive)
_chain_pair_rank = _compile(_chain_pair_rank)
_chain_rank_impl = _compile_parallel(_chain_rank)


def binomial_action_rank(gens, bounds, v1, c1, v2, c2, p: int) -> int:
    """Rank over F_p of multiplication by c1*x^v1 + c2*x^v2 on the
    staircase of the monomial ideal with minimal generators ``gens``."""
    gens = np.asarray(gens, dtype=np.int64).reshape(len(gens), -1)
    return int(
        _chain_rank_impl(
            gens,
            np.asarray(bounds, dtype=np.int64),
            np.asarray(v1, dtype=np.int64),
            int(c1) % p,
            np.asarray(v2, dtype=np.int64),
            int(c2) % p,
            p,
        )
    )
