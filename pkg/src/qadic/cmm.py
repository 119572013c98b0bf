"""Compressed modular matrix multiplication over GF(p).

Four ways to pack matrix entries into words before multiplying:

* middle product (`cmm_multiply`): both sides packed, the left matrix with
  reversed digit order, so each word product's degree-d digit is exactly a
  length-(d+1) slice of the wanted dot product.  One digit extraction and
  one scalar reduction per output entry.

* right / left compression (`right_cmm` / `left_cmm`): only one side packed
  (forward), every digit of the output words is live, and one simultaneous
  reduction per word recovers d+1 entries at once.

* full compression (`full_cmm`): both sides packed in two radices Q and
  Theta = Q**(d_q+1); one word product carries a (d_q+1) x (d_theta+1)
  output tile.  Since Theta is an exact power of Q, the tile digits form a
  plain Q-adic number and one simultaneous reduction over radix Q covers
  the whole grid (reducing along the Theta axis and correcting along Q in
  a single pass).

All products run on exact unsigned 64-bit words (wrap-around above bit 63
never reaches the live digits while the radix bound holds).  The
multiplication routines enforce the strict digit-capacity bound
k*(p-1)**2 < Q: the inclusive reading that the parameter tables report
admits one adversarial corner (an all-maximal dot product at a threshold
dimension overflows its digit), so boundary radices are refused here and
callers rebuild with strict=True instead.

Matrix file format (used by the CLI): a header line "p rows cols" followed
by row-major whitespace-separated residues.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, TextIO, Union

import numpy as np

from . import _kernels, redq
from .errors import DimensionMismatch, ParamsViolation
from .params import FullCompressionParams, PackingParams

_I64_MAX = (1 << 63) - 1

ROWS, COLS = "rows", "cols"
FORWARD, REVERSED = "forward", "reversed"


@dataclass(frozen=True)
class CompressedMatrix:
    """A matrix whose rows or columns are packed d+1 entries per word.

    orientation "rows" packs along rows (width ceil(cols/(d+1))), "cols"
    along columns.  digit_order "forward" stores the g-th group entry j at
    digit j; "reversed" stores it at digit d-j, which also realizes the
    zero padding of a partial trailing group as multiplication by the
    radix.  logical_shape remembers the uncompressed dimensions.
    """

    words: np.ndarray
    params: PackingParams
    orientation: str
    digit_order: str
    logical_shape: tuple

    @property
    def packed_shape(self) -> tuple:
        return self.words.shape


def _pack_axis(m: np.ndarray, params: PackingParams, order: str) -> np.ndarray:
    """Pack the last axis of m in groups of d+1 (m already 2-D, axis=1)."""
    k = params.k
    t = params.t
    rows, cols = m.shape
    width = -(-cols // k)
    padded = np.zeros((rows, width * k), dtype=np.uint64)
    padded[:, :cols] = m.astype(np.uint64)
    grouped = padded.reshape(rows, width, k)
    exps = np.arange(k, dtype=np.uint64)
    if order == REVERSED:
        exps = exps[::-1].copy()
    shifts = (exps * np.uint64(t))[None, None, :]
    return (grouped << shifts).sum(axis=2, dtype=np.uint64)


def _check_entries(m: np.ndarray, p: int) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2:
        raise DimensionMismatch("matrices must be 2-D")
    if m.size and (m.min() < 0 or m.max() >= p):
        raise ValueError(f"entries must be reduced mod {p}")
    return m


def compress_rows(
    a: np.ndarray, params: PackingParams, digit_order: str = FORWARD
) -> CompressedMatrix:
    """Pack each row, d+1 consecutive entries per word."""
    a = _check_entries(a, params.p)
    if params.t is None:
        raise ParamsViolation("compressed matrices need a binary radix")
    return CompressedMatrix(
        words=_pack_axis(a, params, digit_order),
        params=params,
        orientation=ROWS,
        digit_order=digit_order,
        logical_shape=a.shape,
    )


def compress_cols(
    b: np.ndarray, params: PackingParams, digit_order: str = FORWARD
) -> CompressedMatrix:
    """Pack each column, d+1 consecutive entries per word."""
    b = _check_entries(b, params.p)
    if params.t is None:
        raise ParamsViolation("compressed matrices need a binary radix")
    packed = _pack_axis(b.T, params, digit_order)
    return CompressedMatrix(
        words=packed.T.copy(),
        params=params,
        orientation=COLS,
        digit_order=digit_order,
        logical_shape=b.shape,
    )


def uncompress(cm: CompressedMatrix) -> np.ndarray:
    """Exact inverse of compress_rows / compress_cols, padding dropped."""
    params = cm.params
    k, t = params.k, params.t
    words = cm.words if cm.orientation == ROWS else cm.words.T
    rows, width = words.shape
    shifts = np.arange(k, dtype=np.uint64) * np.uint64(t)
    if cm.digit_order == REVERSED:
        shifts = shifts[::-1].copy()
    mask = np.uint64(params.q - 1)
    digits = (words[:, :, None] >> shifts[None, None, :]) & mask
    flat = digits.reshape(rows, width * k).astype(np.int64)
    lr, lc = cm.logical_shape
    if cm.orientation == ROWS:
        return flat[:, :lc]
    return flat.T[:lr, :].copy()


# ---------------------------------------------------------------------------
# plain modular product (baseline and final reductions)
# ---------------------------------------------------------------------------


def modmatmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Plain C = A*B mod p on the cache-blocked integer kernel."""
    a = _check_entries(a, p)
    b = _check_entries(b, p)
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatch("inner dimensions differ")
    chunk = max(1, (_I64_MAX - (p - 1)) // max(1, (p - 1) ** 2))
    return _kernels.matmul_mod_i64(
        a.astype(np.int64), b.astype(np.int64), p, chunk
    )


# ---------------------------------------------------------------------------
# middle product
# ---------------------------------------------------------------------------


def _require_bounds(params: PackingParams, k_dim: int) -> None:
    params.check_middle_product_bounds(k_dim)
    if params.delayed_sum(k_dim) >= 1 << params.beta:
        raise ParamsViolation(
            "accumulated high part would overflow the word budget"
        )


def cmm_multiply(
    ca: CompressedMatrix, cb: CompressedMatrix, params: Optional[PackingParams] = None
) -> np.ndarray:
    """Middle-product matrix multiplication of packed operands.

    ca must be row-packed with reversed digits, cb column-packed forward;
    each output entry is the degree-d digit of one packed dot product,
    extracted and reduced mod p.
    """
    params = params or ca.params
    if ca.params != params or cb.params != params:
        raise ParamsViolation("operands packed with different parameters")
    if ca.orientation != ROWS or ca.digit_order != REVERSED:
        raise ParamsViolation("left operand must be row-packed, reversed")
    if cb.orientation != COLS or cb.digit_order != FORWARD:
        raise ParamsViolation("right operand must be column-packed, forward")
    m, k_dim = ca.logical_shape
    k2, n = cb.logical_shape
    if k_dim != k2:
        raise DimensionMismatch("inner dimensions differ")
    if ca.words.shape[1] != cb.words.shape[0]:
        raise DimensionMismatch("packed widths differ")
    _require_bounds(params, k_dim)
    acc = _kernels.matmul_exact_u64(ca.words, cb.words)
    t, d = params.t, params.d
    mid = (acc >> np.uint64(d * t)) & np.uint64(params.q - 1)
    return (mid % np.uint64(params.p)).astype(np.int64)


def extract_middle(
    word: Union[int, float], params: PackingParams, mode: str = "inverse_mul"
) -> int:
    """Degree-d digit of one packed accumulator, reduced mod p.

    "inverse_mul" multiplies by the precomputed reciprocal of Q**d (exact,
    Q being a power of two), truncates, masks the low t bits and reduces.
    "add_shift" first adds Q**(2d+1), which pins the exponent so the top
    t(d+1) bits hold the d+1 high coefficients exactly, then extracts the
    low block of those; the price is half the admissible dot length.
    Both modes accept exact integer accumulators or float ones.
    """
    t, d = params.t, params.d
    if t is None:
        raise ParamsViolation("extraction needs a binary radix")
    mask = params.q - 1
    if mode == "inverse_mul":
        if isinstance(word, float):
            y = int(word * 2.0 ** (-d * t))
        else:
            y = int(word) >> (d * t)
        return (y & mask) % params.p
    if mode == "add_shift":
        shifted = word + (1 << ((2 * d + 1) * t))
        if isinstance(shifted, float):
            y = int(shifted * 2.0 ** (-d * t))
        else:
            y = int(shifted) >> (d * t)
        return (y & mask) % params.p
    raise ValueError(f"unknown extraction mode {mode!r}")


# ---------------------------------------------------------------------------
# one-sided compression
# ---------------------------------------------------------------------------


def right_cmm(
    a: np.ndarray,
    cb: CompressedMatrix,
    params: Optional[PackingParams] = None,
    keep_packed: bool = False,
) -> Union[np.ndarray, CompressedMatrix]:
    """Uncompressed A times a row-packed B; one reduction per output word.

    Every digit of the packed product is a live dot product, recovered by
    one simultaneous reduction; keep_packed returns the reduced words still
    packed for chained products.
    """
    params = params or cb.params
    if cb.params != params:
        raise ParamsViolation("operand packed with different parameters")
    if cb.orientation != ROWS or cb.digit_order != FORWARD:
        raise ParamsViolation("right operand must be row-packed, forward")
    a = _check_entries(a, params.p)
    k_dim, n = cb.logical_shape
    if a.shape[1] != k_dim:
        raise DimensionMismatch("inner dimensions differ")
    _require_bounds(params, k_dim)
    acc = _kernels.matmul_exact_u64(a.astype(np.uint64), cb.words)
    t, d = params.t, params.d
    reduced = redq.reduce_words_array(acc, params.p, t, d)
    out = CompressedMatrix(
        words=reduced,
        params=params,
        orientation=ROWS,
        digit_order=FORWARD,
        logical_shape=(a.shape[0], n),
    )
    return out if keep_packed else uncompress(out)


def left_cmm(
    ca: CompressedMatrix,
    b: np.ndarray,
    params: Optional[PackingParams] = None,
    keep_packed: bool = False,
) -> Union[np.ndarray, CompressedMatrix]:
    """Column-packed A times uncompressed B (the transposed right variant)."""
    params = params or ca.params
    if ca.params != params:
        raise ParamsViolation("operand packed with different parameters")
    if ca.orientation != COLS or ca.digit_order != FORWARD:
        raise ParamsViolation("left operand must be column-packed, forward")
    b = _check_entries(b, params.p)
    m, k_dim = ca.logical_shape
    if b.shape[0] != k_dim:
        raise DimensionMismatch("inner dimensions differ")
    _require_bounds(params, k_dim)
    acc = _kernels.matmul_exact_u64(ca.words, b.astype(np.uint64))
    reduced = redq.reduce_words_array(acc, params.p, params.t, params.d)
    out = CompressedMatrix(
        words=reduced,
        params=params,
        orientation=COLS,
        digit_order=FORWARD,
        logical_shape=(m, b.shape[1]),
    )
    return out if keep_packed else uncompress(out)


# ---------------------------------------------------------------------------
# full compression
# ---------------------------------------------------------------------------


def full_cmm(
    a: np.ndarray, b: np.ndarray, params2: FullCompressionParams
) -> np.ndarray:
    """Both-sides two-radix product; each word carries a whole output tile.

    A's columns are packed in Q (d_q+1 rows per word), B's rows in Theta
    (d_theta+1 columns per word); digit (i, j) of a product word sits at
    bit offset i*t + j*theta_exp and holds the (i, j) tile entry.  With
    Theta = Q**(d_q+1) the digit grid is one plain Q-adic number, so a
    single simultaneous reduction recovers the whole tile.
    """
    p = params2.p
    a = _check_entries(a, p)
    b = _check_entries(b, p)
    m, k_dim = a.shape
    k2, n = b.shape
    if k_dim != k2:
        raise DimensionMismatch("inner dimensions differ")
    t, dq, dth = params2.t, params2.d_q, params2.d_theta
    if k_dim * (p - 1) ** 2 >= params2.q:
        raise ParamsViolation(
            "inner dimension fills the digit capacity; use strict parameters"
        )
    # pack A down columns in Q
    pa = PackingParams(p=p, q=params2.q, d=dq, beta=params2.beta, n_max=k_dim)
    ca = _pack_axis(a.T, pa, FORWARD).T.copy()  # (ceil(m/(dq+1)), k)
    # pack B along rows in Theta = 2**theta_exp
    kb = dth + 1
    widthb = -(-n // kb)
    padded = np.zeros((k_dim, widthb * kb), dtype=np.uint64)
    padded[:, :n] = b.astype(np.uint64)
    shifts = (np.arange(kb, dtype=np.uint64) * np.uint64(params2.theta_exp))[
        None, None, :
    ]
    cb = (padded.reshape(k_dim, widthb, kb) << shifts).sum(
        axis=2, dtype=np.uint64
    )
    acc = _kernels.matmul_exact_u64(ca, cb)
    # one reduction across the whole (dq+1)(dth+1)-digit grid
    ndig = (dq + 1) * (dth + 1)
    digits = redq.reduce_words_digits(acc, p, t, ndig - 1)
    tiles = digits.reshape(acc.shape[0], acc.shape[1], dth + 1, dq + 1)
    # scatter tiles: rows gi*(dq+1)+i, cols gj*(dth+1)+j
    out = tiles.transpose(0, 3, 1, 2).reshape(
        acc.shape[0] * (dq + 1), acc.shape[1] * (dth + 1)
    )
    return out[:m, :n].astype(np.int64)


# ---------------------------------------------------------------------------
# matrix file format
# ---------------------------------------------------------------------------


def write_matrix(f: TextIO, m: np.ndarray, p: int) -> None:
    """Header "p rows cols", then row-major whitespace-separated residues."""
    m = _check_entries(m, p)
    f.write(f"{p} {m.shape[0]} {m.shape[1]}\n")
    for row in m:
        f.write(" ".join(str(int(x)) for x in row) + "\n")


def read_matrix(f: TextIO) -> tuple[int, np.ndarray]:
    header = f.readline().split()
    if len(header) != 3:
        raise ValueError("matrix header must be 'p rows cols'")
    p, rows, cols = (int(x) for x in header)
    data = np.loadtxt(f, dtype=np.int64, ndmin=2)
    if rows == 0 or cols == 0:
        data = np.zeros((rows, cols), dtype=np.int64)
    if data.shape != (rows, cols):
        data = data.reshape(rows, cols)
    return p, _check_entries(data, p)
