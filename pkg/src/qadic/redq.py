"""Simultaneous reduction of all base-q digits of an accumulator word.

One division does the work of d+1.  With s = floor(r/p), every digit
quotient is already present inside s:

    u_i = floor(r/q**i) - p*floor(s/q**i)    (compression, all u_i in [0, p))

because floor(floor(r/p)/q**i) = floor(floor(r/q**i)/p).  Each u_i is the
*suffix* value floor(r/q**i) mod p, so unless p divides q a second stage
couples neighbouring digits back into true digit residues:

    mu_d = u_d,   mu_i = u_i - q*u_{i+1} mod p    (correction)

When q = 2**t the compression loop runs on bit fields: u_i occupies
(k-i)*t bits, and the subtraction never overflows its field, so fields i
and k-i share one wide word and one multiply-subtract handles both.  That
caps the whole compression at ceil((k+1)/2) wide multiply-subtracts for
k = d+1 digits (the first one, u_0 = r - p*s, needs the full word).

The correction is a matrix-vector product by an upper-bidiagonal matrix
over GF(p) and can be tabulated blockwise: a width-j table corrects j
digits per lookup while consuming one overlap digit, so k digits cost
ceil(d/j) lookups.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .dqt import PackedWord
from .errors import MemoryBudgetExceeded
from .params import PackingParams


@dataclass
class CompressionStats:
    """Operation counters for the instrumented compression path."""

    wide_mul_sub: int = 0
    divisions: int = 0
    table_accesses: int = 0


@dataclass(frozen=True)
class CompressedDigits:
    """Digits u_i = floor(r/q**i) mod p produced by the compression stage."""

    u: tuple[int, ...]

    @property
    def d(self) -> int:
        return len(self.u) - 1


def redq_compress(
    r: int,
    p: int,
    q: int,
    d: int,
    divider=None,
    stats: Optional[CompressionStats] = None,
) -> CompressedDigits:
    """Compression stage: all d+1 digit residues from a single division.

    `divider`, when given, replaces the native floor division by p (it
    receives r and must return floor(r/p) exactly; used to route the one
    division through reciprocal multiplication).
    """
    if r < 0:
        raise ValueError("accumulator must be nonnegative")
    s = divider(r) if divider is not None else r // p
    if stats is not None:
        stats.divisions += 1
    k = d + 1
    if q & (q - 1) == 0 and r < q**k:
        t = q.bit_length() - 1
        u = _compress_binary(r, s, p, t, k, stats)
    else:
        u = [(r // q**i) - p * ((s // q**i)) for i in range(k)]
        if stats is not None:
            stats.wide_mul_sub += k
    return CompressedDigits(tuple(u))


def _compress_binary(
    r: int, s: int, p: int, t: int, k: int, stats: Optional[CompressionStats]
) -> list[int]:
    """Bit-field compression with paired fields.

    Field i holds u_i on (k-i)*t bits.  Pairing field i with field k-i
    keeps each pair inside k*t <= beta bits, so one multiply-subtract
    serves two digits; the lone middle field (k even) and u_0 go alone.
    """
    ops = 1
    u = [0] * k
    u[0] = r - p * s
    for i in range(1, (k - 1) // 2 + 1):
        j = k - i
        w_lo = (k - i) * t
        wt = (r >> (i * t)) | ((r >> (j * t)) << w_lo)
        ws = (s >> (i * t)) | ((s >> (j * t)) << w_lo)
        res = wt - p * ws
        ops += 1
        u[i] = res & ((1 << w_lo) - 1)
        u[j] = res >> w_lo
    if k % 2 == 0 and k >= 2:
        i = k // 2
        u[i] = (r >> (i * t)) - p * (s >> (i * t))
        ops += 1
    if stats is not None:
        stats.wide_mul_sub += ops
    return u


def redq_correct(u: CompressedDigits, p: int, q: int) -> list[int]:
    """Correction stage: true digit residues from the suffix residues.

    Identity when p divides q.
    """
    if q % p == 0:
        return list(u.u)
    out = list(u.u)
    for i in range(len(out) - 1):
        out[i] = (u.u[i] - q * u.u[i + 1]) % p
    return out


def reduce_digits(
    r: int,
    p: int,
    q: int,
    d: int,
    table: Optional["CorrectionTable"] = None,
    divider=None,
    stats: Optional[CompressionStats] = None,
) -> list[int]:
    """Digits 0..d of r, each reduced mod p (compress then correct)."""
    u = redq_compress(r, p, q, d, divider=divider, stats=stats)
    if table is not None:
        return correct_tabulated(u, table, stats=stats)
    return redq_correct(u, p, q)


def redq(
    r: int,
    params: PackingParams,
    digits: Optional[int] = None,
    table: Optional["CorrectionTable"] = None,
    divider=None,
    stats: Optional[CompressionStats] = None,
) -> PackedWord:
    """Reduce all base-q digits of r mod p and repack them.

    `digits` overrides the digit count (default: the packing width d+1,
    dot-product accumulators carry 2(d+1)-1 digits).
    """
    nd = params.k if digits is None else digits
    mu = reduce_digits(
        r, params.p, params.q, nd - 1, table=table, divider=divider, stats=stats
    )
    value = 0
    for i, m in enumerate(mu):
        value += m * params.q**i
    return PackedWord(value=value, params=params, digits_reduced=True)


def correction_matrix(p: int, q: int, k: int) -> np.ndarray:
    """The (k+1)x(k+1) digit-coupling matrix over GF(p).

    Upper bidiagonal: ones on the diagonal, (-q mod p) above it; the
    correction stage is exactly this matrix applied to the u vector mod p.
    Identity when p divides q.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    m = np.eye(k + 1, dtype=np.int64)
    c = (-q) % p
    for i in range(k):
        m[i, i + 1] = c
    return m


# ---------------------------------------------------------------------------
# tabulated correction (time-memory trade-off)
# ---------------------------------------------------------------------------

BASE_P = "base-p"
BINARY_BLOCKS = "binary"


@dataclass(frozen=True)
class CorrectionTable:
    """Block-correction lookup for width-j digit groups.

    Entry (u_0, ..., u_j) holds the j corrected residues
    (u_i - q*u_{i+1} mod p), i = 0..j-1, packed into one integer with
    bits_per_residue bits each.  Indexing is either the compact base-p
    evaluation sum(u_i * p**i) or the wider bit-block form
    sum(u_i << (ceil(log2 p)*i)).
    """

    p: int
    q: int
    j: int
    indexing: str
    bits_per_residue: int
    entries: np.ndarray = field(repr=False)

    def lookup(self, digits: Sequence[int]) -> list[int]:
        """Corrected residues for one (u_0..u_j) tuple."""
        if self.indexing == BASE_P:
            idx = 0
            for u in reversed(digits):
                idx = idx * self.p + int(u)
        else:
            idx = 0
            for i, u in enumerate(digits):
                idx |= int(u) << (self.bits_per_residue * i)
        packed = int(self.entries[idx])
        mask = (1 << self.bits_per_residue) - 1
        return [
            (packed >> (self.bits_per_residue * i)) & mask for i in range(self.j)
        ]


def build_correction_table(
    p: int,
    q: int,
    j: int,
    indexing: str = BASE_P,
    max_entries: int = 1 << 24,
) -> CorrectionTable:
    """Precompute the width-j correction lookup.

    Entry count is p**(j+1) (base-p) or 2**(ceil(log2 p)*(j+1)) (binary
    blocks); MemoryBudgetExceeded when that passes max_entries.
    """
    if j < 1:
        raise ValueError("block width j must be >= 1")
    if indexing not in (BASE_P, BINARY_BLOCKS):
        raise ValueError(f"unknown indexing {indexing!r}")
    bb = max(1, (p - 1).bit_length())
    count = p ** (j + 1) if indexing == BASE_P else 1 << (bb * (j + 1))
    if count > max_entries:
        raise MemoryBudgetExceeded(
            f"{count} entries exceed the {max_entries} budget"
        )
    idx = np.arange(count, dtype=np.int64)
    if indexing == BASE_P:
        digits = [(idx // p**i) % p for i in range(j + 1)]
    else:
        digits = [(idx >> (bb * i)) & ((1 << bb) - 1) for i in range(j + 1)]
    c = (-q) % p
    entries = np.zeros(count, dtype=np.uint64)
    valid = np.ones(count, dtype=bool)
    if indexing == BINARY_BLOCKS:
        for u in digits:
            valid &= u < p
    for i in range(j):
        mu = np.where(valid, (digits[i] + c * digits[i + 1]) % p, 0)
        entries |= mu.astype(np.uint64) << np.uint64(bb * i)
    return CorrectionTable(
        p=p, q=q, j=j, indexing=indexing, bits_per_residue=bb, entries=entries
    )


def correct_tabulated(
    u: CompressedDigits,
    table: CorrectionTable,
    stats: Optional[CompressionStats] = None,
) -> list[int]:
    """Correction via block lookups; identical output to redq_correct.

    Blocks overlap by one digit, so d digits take ceil(d/j) accesses and
    the top digit passes through untouched.
    """
    d = u.d
    j = table.j
    out = [0] * (d + 1)
    out[d] = u.u[d] % table.p
    if d == 0:
        return out
    starts = list(range(0, d - j + 1, j))
    if not starts:
        starts = [0]
    if starts[-1] + j < d:
        starts.append(d - j)
    for s0 in starts:
        window = list(u.u[s0 : s0 + j + 1])
        window += [0] * (j + 1 - len(window))  # top padding, d < j only
        res = table.lookup(window)
        if stats is not None:
            stats.table_accesses += 1
        for i, mu in enumerate(res):
            if s0 + i < d:
                out[s0 + i] = mu
    return out


# ---------------------------------------------------------------------------
# vectorized helpers shared by the matrix/polynomial bulk paths
# ---------------------------------------------------------------------------


def correct_digits_array(u: np.ndarray, p: int, q: int) -> np.ndarray:
    """Vectorized correction over a (..., k) uint64 digit array."""
    if q % p == 0:
        return u.copy()
    c = (p - q % p) % p
    mu = u.copy()
    mu[..., :-1] = (u[..., :-1] + np.uint64(c) * u[..., 1:]) % np.uint64(p)
    return mu


def reduce_words_array(words: np.ndarray, p: int, t: int, d: int) -> np.ndarray:
    """Digit-reduce an array of packed accumulators; returns packed words.

    Every base-2**t digit 0..d of each word is replaced by its residue
    mod p.  Input digits must not have overflowed their fields.
    """
    from . import _kernels

    shape = words.shape
    flat = np.ascontiguousarray(words.reshape(-1), dtype=np.uint64)
    u = _kernels.redq_compress_u64(flat, p, t, d)
    mu = correct_digits_array(u, p, 1 << t)
    shifts = (np.arange(d + 1, dtype=np.uint64) * np.uint64(t))[np.newaxis, :]
    packed = (mu << shifts).sum(axis=1, dtype=np.uint64)
    return packed.reshape(shape)


def reduce_words_digits(words: np.ndarray, p: int, t: int, d: int) -> np.ndarray:
    """Like reduce_words_array but returns the (..., d+1) residue digits."""
    from . import _kernels

    shape = words.shape
    flat = np.ascontiguousarray(words.reshape(-1), dtype=np.uint64)
    u = _kernels.redq_compress_u64(flat, p, t, d)
    mu = correct_digits_array(u, p, 1 << t)
    return mu.reshape(shape + (d + 1,))
