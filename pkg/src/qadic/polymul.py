"""Modular polynomial multiplication over GF(p).

Two strategies:

* delayed reduction: plain convolution on machine integers, reducing each
  output coefficient once (with intermediate reductions only when the
  accumulation bound would overflow);

* packed words: d+1 coefficients share one word, so the polynomial becomes
  a short polynomial in Y = X**(d+1) whose coefficients are words.  Word
  products accumulate unreduced while every base-q digit stays below q,
  then one simultaneous reduction per word recovers all residues.  The
  word-level convolution runs either classically or with Karatsuba.

Karatsuba needs subtractions, which packed nonnegative digits cannot hold.
The recursion therefore adds operands word-wise (digit headroom permitting,
each level doubles the operand digit bound), computes the three sub-products
down to a threshold, and combines them after unpacking to per-coefficient
integers, where signed arithmetic is free.  When the digit budget would be
exceeded the recursion falls back to the classical base case early.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from . import _kernels, redq
from .errors import ParamsViolation
from .params import PackingParams

_I64_MAX = (1 << 63) - 1


@dataclass(frozen=True)
class ModPoly:
    """Coefficient vector over GF(p); index i holds the coefficient of X**i.

    Trailing zeros are legal (degree = len-1 by convention), so equality of
    the mathematical polynomial is `same_poly`, not dataclass equality.
    """

    coeffs: np.ndarray
    p: int

    def __post_init__(self) -> None:
        c = np.asarray(self.coeffs, dtype=np.int64)
        if c.ndim != 1:
            raise ValueError("coefficients must be one-dimensional")
        if c.size and (c.min() < 0 or c.max() >= self.p):
            raise ValueError(f"coefficients not reduced mod {self.p}")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_list(cls, coeffs: Sequence[int], p: int) -> "ModPoly":
        return cls(np.asarray(list(coeffs), dtype=np.int64), p)

    @classmethod
    def random(cls, degree: int, p: int, rng: np.random.Generator) -> "ModPoly":
        return cls(rng.integers(0, p, size=degree + 1, dtype=np.int64), p)

    def __len__(self) -> int:
        return self.coeffs.size

    def same_poly(self, other: "ModPoly") -> bool:
        if self.p != other.p:
            return False
        a, b = np.trim_zeros(self.coeffs, "b"), np.trim_zeros(other.coeffs, "b")
        return np.array_equal(a, b)


@dataclass
class PolymulStats:
    """Counters for the instrumented packed-word path."""

    word_muls: int = 0
    reductions: int = 0


def polymul_delayed(a: ModPoly, b: ModPoly) -> ModPoly:
    """Schoolbook product with delayed reduction; output length la+lb-1.

    Accumulates on int64 and reduces once per coefficient, splitting the
    convolution only when the accumulation bound would overflow (for
    p < 2**26 that takes more than 2**11 terms).
    """
    if a.p != b.p:
        raise ValueError("moduli differ")
    p = a.p
    la, lb = len(a), len(b)
    if la == 0 or lb == 0:
        return ModPoly(np.zeros(0, dtype=np.int64), p)
    if la < lb:  # chunk the longer operand
        a, b, la, lb = b, a, lb, la
    budget = (_I64_MAX - (p - 1)) // (p - 1) ** 2 if p > 1 else _I64_MAX
    out = np.zeros(la + lb - 1, dtype=np.int64)
    if lb <= budget:
        out[:] = _kernels.conv_exact_i64(a.coeffs, b.coeffs) % p
        return ModPoly(out, p)
    for i0 in range(0, la, budget):
        seg = _kernels.conv_exact_i64(a.coeffs[i0 : i0 + budget], b.coeffs)
        out[i0 : i0 + seg.size] = (out[i0 : i0 + seg.size] + seg) % p
    return ModPoly(out, p)


# ---------------------------------------------------------------------------
# packed representation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FqtPoly:
    """A polynomial in Y = X**(d+1) whose coefficients are packed words.

    Word i holds the coefficients of X**(i(d+1)) .. X**(i(d+1)+d); the last
    word is zero-padded.  logical_len preserves the original length.
    """

    words: np.ndarray
    params: PackingParams
    logical_len: int


def fqt_pack_poly(poly: ModPoly, params: PackingParams) -> FqtPoly:
    if poly.p != params.p:
        raise ValueError("modulus mismatch")
    k = params.k
    t = params.t
    if t is None:
        raise ParamsViolation("packed polynomials need a binary radix")
    n = len(poly)
    nw = -(-n // k) if n else 0
    padded = np.zeros(nw * k, dtype=np.uint64)
    padded[:n] = poly.coeffs.astype(np.uint64)
    shifts = (np.arange(k, dtype=np.uint64) * np.uint64(t))[np.newaxis, :]
    words = (padded.reshape(nw, k) << shifts).sum(axis=1, dtype=np.uint64)
    return FqtPoly(words=words, params=params, logical_len=n)


def fqt_unpack_poly(fq: FqtPoly) -> ModPoly:
    k = fq.params.k
    t = fq.params.t
    nw = fq.words.size
    if nw == 0:
        return ModPoly(np.zeros(0, dtype=np.int64), fq.params.p)
    shifts = (np.arange(k, dtype=np.uint64) * np.uint64(t))[np.newaxis, :]
    mask = np.uint64(fq.params.q - 1)
    digits = ((fq.words[:, np.newaxis] >> shifts) & mask).astype(np.int64)
    return ModPoly(digits.reshape(-1)[: fq.logical_len], fq.params.p)


# ---------------------------------------------------------------------------
# packed-word multiplication
# ---------------------------------------------------------------------------


def _chunk_budget(params: PackingParams, ma: int, mb: int) -> int:
    """Products accumulable on one word when operand digits are <= ma, mb.

    Each product word's digit is at most (d+1)*ma*mb, and one already
    reduced carry word (digits < p) rides along, so the digit cap q-1
    leaves room for floor((q-1-(p-1)) / ((d+1)*ma*mb)) products.
    """
    per = params.k * ma * mb
    return (params.q - 1 - (params.p - 1)) // per


def _coeff_len(n_words: int, k: int) -> int:
    # degree (n_words-1) in Y, each word product spans 2k-1 digits
    return (n_words + 1) * k - 1 if n_words else 0


def _wordconv_reduce(
    aw: np.ndarray,
    bw: np.ndarray,
    params: PackingParams,
    ma: int,
    mb: int,
    stats: Optional[PolymulStats],
    validate: bool,
) -> np.ndarray:
    """Word convolution with periodic simultaneous reduction.

    Returns the per-X-coefficient residues (mod p) of the product of the
    two word sequences, as an int64 array of length _coeff_len(na+nb-1, k).
    """
    p, q, t, d, k = params.p, params.q, params.t, params.d, params.k
    na, nb = aw.size, bw.size
    chunk = _chunk_budget(params, ma, mb)
    if chunk < 1:
        raise ParamsViolation("accumulation budget too small for this packing")
    if na < nb:
        aw, bw, na, nb = bw, aw, nb, na
    nout = na + nb - 1
    acc = np.zeros(nout, dtype=np.uint64)
    for c0 in range(0, na, chunk):
        seg = _kernels.conv_exact_u64(aw[c0 : c0 + chunk], bw)
        if stats is not None:
            stats.word_muls += min(chunk, na - c0) * nb
        acc[c0 : c0 + seg.size] += seg
        if validate:
            _check_digits(acc, q, t, 2 * d)
        if c0 + chunk < na:  # fold digits down before the next chunk
            acc = redq.reduce_words_array(acc, p, t, 2 * d)
            if stats is not None:
                stats.reductions += nout
    digits = redq.reduce_words_digits(acc, p, t, 2 * d).astype(np.int64)
    if stats is not None:
        stats.reductions += nout
    # overlap-add the word digit rows into X positions
    out = np.zeros(_coeff_len(nout, k), dtype=np.int64)
    for i in range(2 * d + 1):
        out[i : i + (nout - 1) * k + 1 : k] += digits[:, i]
    return out % p


def _check_digits(words: np.ndarray, q: int, t: int, top: int) -> None:
    for i in range(top + 1):
        if ((words >> np.uint64(i * t)) & np.uint64(q - 1)).max() >= q:
            raise AssertionError("digit overflow")  # pragma: no cover
    if top + 1 <= 63 // t and (words >> np.uint64((top + 1) * t)).max() > 0:
        raise AssertionError("value beyond the top digit")


def _kara_words(
    aw: np.ndarray,
    bw: np.ndarray,
    params: PackingParams,
    ma: int,
    mb: int,
    threshold: int,
    stats: Optional[PolymulStats],
    validate: bool,
) -> np.ndarray:
    """Karatsuba over word sequences; returns per-coefficient residues."""
    k = params.k
    na, nb = aw.size, bw.size
    n = max(na, nb)
    can_split = (
        n > threshold
        and 2 * ma <= params.q - 1
        and 2 * mb <= params.q - 1
        and _chunk_budget(params, 2 * ma, 2 * mb) >= 1
    )
    if not can_split:
        return _wordconv_reduce(aw, bw, params, ma, mb, stats, validate)
    if na < n:
        aw = np.concatenate([aw, np.zeros(n - na, dtype=np.uint64)])
    if nb < n:
        bw = np.concatenate([bw, np.zeros(n - nb, dtype=np.uint64)])
    h = n // 2
    a0, a1 = aw[:h], aw[h:]
    b0, b1 = bw[:h], bw[h:]
    m0 = _kara_words(a0, b0, params, ma, mb, threshold, stats, validate)
    m2 = _kara_words(a1, b1, params, ma, mb, threshold, stats, validate)
    asum = a1.copy()
    asum[: a0.size] += a0
    bsum = b1.copy()
    bsum[: b0.size] += b0
    m1 = _kara_words(
        asum, bsum, params, 2 * ma, 2 * mb, threshold, stats, validate
    ).copy()
    m1[: m0.size] -= m0
    m1[: m2.size] -= m2
    out = np.zeros(_coeff_len(2 * n - 1, k), dtype=np.int64)
    out[: m0.size] += m0
    out[h * k : h * k + m1.size] += m1
    out[2 * h * k : 2 * h * k + m2.size] += m2
    return out % params.p


def polymul_fqt(
    a: ModPoly,
    b: ModPoly,
    params: PackingParams,
    algo: str = "classical",
    threshold: int = 16,
    validate: bool = False,
    stats: Optional[PolymulStats] = None,
) -> ModPoly:
    """Product via packed words; equals polymul_delayed(a, b).

    Output length is 2*max(len(a), len(b)) - 1, never trimmed.  `threshold`
    is the word count below which Karatsuba switches to the classical base
    case; `validate` re-checks digit bounds on every accumulator (slow).
    """
    if a.p != b.p or a.p != params.p:
        raise ValueError("moduli differ")
    if params.t is None:
        raise ParamsViolation("packed multiplication needs a binary radix")
    if params.q ** (2 * params.k - 1) > 1 << params.beta:
        raise ParamsViolation("word budget exceeded for 2d+1 digits")
    lmax = max(len(a), len(b))
    out_len = 2 * lmax - 1 if lmax else 0
    if len(a) == 0 or len(b) == 0:
        return ModPoly(np.zeros(out_len, dtype=np.int64), a.p)
    aw = fqt_pack_poly(a, params).words
    bw = fqt_pack_poly(b, params).words
    pm1 = params.p - 1
    if algo == "classical":
        coeff = _wordconv_reduce(aw, bw, params, pm1, pm1, stats, validate)
    elif algo == "karatsuba":
        coeff = _kara_words(aw, bw, params, pm1, pm1, threshold, stats, validate)
    else:
        raise ValueError(f"unknown algo {algo!r}")
    out = np.zeros(out_len, dtype=np.int64)
    n = min(out_len, coeff.size)
    out[:n] = coeff[:n]
    if coeff.size > out_len and coeff[out_len:].any():
        raise AssertionError("nonzero coefficients beyond the output length")
    return ModPoly(out, a.p)
