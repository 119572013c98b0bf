"""Small extension fields GF(p^k) with tabulated packed arithmetic.

Elements are handles: index 0 is the zero element, index i > 0 is g**(i-1)
for a fixed generator g of the multiplicative group.  Four order-sized
tables drive everything (element codes by index, indices by code, packed
radix-q words by index, Zech logarithms), plus two correction tables that
turn the compressed digits of a packed dot-product accumulator directly
into field elements:

    L[u_0..u_{k-1}]    = element of sum_{i<k-1} (u_i - q*u_{i+1} mod p) X^i
    H[u_{k-1}..u_{2k-2}] = element of X^{k-1} * (high part), already reduced
                           by the field polynomial

so a whole dot product costs one word dot product, one compression (k wide
multiply-subtracts for the 2k-1 digits), two table lookups and one field
addition.  The L/H tables are indexed in binary blocks (ceil(log2 p) bits
per digit), which keeps the total table memory within
4*p**k + 2**(1 + k*ceil(log2 p)) entries.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import _kernels, redq
from .errors import (
    DimensionMismatch,
    NoGeneratorFound,
    NotIrreducible,
    ParamsViolation,
    TooLarge,
)
from .params import PackingParams, dqt_params, is_prime

#: Largest supported field order (table-memory guard).
MAX_ORDER = 1 << 22


@dataclass(frozen=True)
class GFqElem:
    """Handle of one field element: 0 is zero, i > 0 is g**(i-1)."""

    index: int


# -- polynomial helpers on coefficient lists (little-endian, monic) ---------


def _poly_divmod(num: list, den: list, p: int) -> tuple[list, list]:
    num = list(num)
    dd = len(den) - 1
    inv_lead = pow(den[-1], -1, p)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i] * inv_lead % p
        if c:
            for j, dj in enumerate(den):
                num[i - dd + j] = (num[i - dd + j] - c * dj) % p
        num[i] = c  # quotient coefficient, remainder stays below dd
    return num[dd:], num[:dd]


def _is_irreducible(coeffs: Sequence[int], p: int) -> bool:
    """Brute-force factor search; fine for the small fields supported here."""
    k = len(coeffs) - 1
    if k < 1 or coeffs[-1] != 1:
        return False
    if k == 1:
        return True
    for deg in range(1, k // 2 + 1):
        for code in range(p**deg):
            den = _code_to_coeffs(code, deg, p) + [1]
            _, rem = _poly_divmod(list(coeffs), den, p)
            if not any(rem):
                return False
    return True


def _code_to_coeffs(code: int, length: int, p: int) -> list:
    out = []
    for _ in range(length):
        code, r = divmod(code, p)
        out.append(r)
    return out


def _coeffs_to_code(coeffs: Sequence[int], p: int) -> int:
    code = 0
    for c in reversed(list(coeffs)):
        code = code * p + int(c)
    return code


class GFqField:
    """GF(p^k) with discrete-log representation and packed-word tables.

    Use build_field() to construct; the initializer expects a verified
    irreducible polynomial and generator code.
    """

    def __init__(
        self,
        p: int,
        k: int,
        irreducible: Sequence[int],
        generator_code: int,
        params: PackingParams,
    ):
        self.p = p
        self.k = k
        self.order = p**k
        self.irreducible = tuple(int(c) for c in irreducible)
        self.params = params
        self._build_log_tables(generator_code)
        self._build_pack_table()
        self._build_lh_tables()

    # -- construction -----------------------------------------------------

    def _mul_codes(self, a: int, b: int) -> int:
        ca = _code_to_coeffs(a, self.k, self.p)
        cb = _code_to_coeffs(b, self.k, self.p)
        prod = [0] * (2 * self.k - 1)
        for i, x in enumerate(ca):
            if x:
                for j, y in enumerate(cb):
                    prod[i + j] = (prod[i + j] + x * y) % self.p
        _, rem = _poly_divmod(prod, list(self.irreducible), self.p)
        return _coeffs_to_code(rem, self.p)

    def _build_log_tables(self, g_code: int) -> None:
        order = self.order
        self.generator_code = g_code
        self.code_of_index = np.zeros(order, dtype=np.int64)
        self.index_of_code = np.full(order, -1, dtype=np.int64)
        self.index_of_code[0] = 0
        val = 1
        for e in range(order - 1):
            if self.index_of_code[val] != -1:
                raise NoGeneratorFound(
                    f"code {g_code} has multiplicative order <= {e}"
                )
            self.code_of_index[e + 1] = val
            self.index_of_code[val] = e + 1
            val = self._mul_codes(val, g_code)
        if val != 1:
            raise NoGeneratorFound(f"code {g_code} does not return to 1")
        # Zech logarithms: zech[e] = log(1 + g**e), -1 when 1 + g**e == 0
        codes = self.code_of_index[1:]
        c0 = codes % self.p
        plus = codes - c0 + (c0 + 1) % self.p
        self.zech = np.where(
            plus == 0, np.int64(-1), self.index_of_code[plus] - 1
        )

    def _build_pack_table(self) -> None:
        q = self.params.q
        t = self.params.t
        codes = self.code_of_index
        digits = np.empty((self.order, self.k), dtype=np.uint64)
        rest = codes.copy()
        for i in range(self.k):
            digits[:, i] = rest % self.p
            rest //= self.p
        if t is not None:
            shifts = (np.arange(self.k, dtype=np.uint64) * np.uint64(t))[None, :]
            self.pack_table = (digits << shifts).sum(axis=1, dtype=np.uint64)
        else:
            weights = np.array([q**i for i in range(self.k)], dtype=np.uint64)
            self.pack_table = (digits * weights[None, :]).sum(
                axis=1, dtype=np.uint64
            )

    def _build_lh_tables(self) -> None:
        p, k, q = self.p, self.k, self.params.q
        bb = max(1, (p - 1).bit_length())
        self.u_bits = bb
        size = 1 << (bb * k)
        idx = np.arange(size, dtype=np.int64)
        u = [(idx >> (bb * i)) & ((1 << bb) - 1) for i in range(k)]
        valid = np.ones(size, dtype=bool)
        for ui in u:
            valid &= ui < p
        cneg = (p - q % p) % p
        # mu_i = u_i - q*u_{i+1} mod p for i < k-1; the top entry passes through
        mu = [
            np.where(valid, (u[i] + cneg * u[i + 1]) % p, 0)
            for i in range(k - 1)
        ]
        # L: polynomial sum mu_i X^i of degree <= k-2
        lcode = np.zeros(size, dtype=np.int64)
        for i in reversed(range(k - 1)):
            lcode = lcode * p + mu[i]
        self.l_table = np.where(valid, self.index_of_code[lcode], 0)
        # H: X^(k-1) * (sum mu'_i X^i) reduced by the field polynomial,
        # a linear combination of the precomputed codes of X^(k-1+i) mod f
        mu_h = mu + [np.where(valid, u[k - 1], 0)]
        xpow = []
        for i in range(k):
            coeffs = [0] * (k - 1 + i) + [1]
            _, rem = _poly_divmod(coeffs, list(self.irreducible), p)
            rem += [0] * (k - len(rem))
            xpow.append(np.array(rem, dtype=np.int64))
        hdigits = np.zeros((size, k), dtype=np.int64)
        for i in range(k):
            hdigits += mu_h[i][:, None] * xpow[i][None, :]
        hdigits %= p
        hcode = np.zeros(size, dtype=np.int64)
        for i in reversed(range(k)):
            hcode = hcode * p + hdigits[:, i]
        self.h_table = np.where(valid, self.index_of_code[hcode], 0)

    # -- scalar field operations -------------------------------------------

    def elem(self, index: int) -> GFqElem:
        if not 0 <= index < self.order:
            raise ValueError(f"index {index} out of range")
        return GFqElem(index)

    @property
    def zero(self) -> GFqElem:
        return GFqElem(0)

    @property
    def one(self) -> GFqElem:
        return GFqElem(1)

    def from_poly(self, coeffs: Sequence[int]) -> GFqElem:
        """Element from little-endian polynomial coefficients (degree < k)."""
        code = _coeffs_to_code([c % self.p for c in coeffs], self.p)
        return GFqElem(int(self.index_of_code[code]))

    def to_poly(self, a: GFqElem) -> list:
        return _code_to_coeffs(int(self.code_of_index[a.index]), self.k, self.p)

    def mul(self, a: GFqElem, b: GFqElem) -> GFqElem:
        if a.index == 0 or b.index == 0:
            return GFqElem(0)
        e = (a.index - 1 + b.index - 1) % (self.order - 1)
        return GFqElem(e + 1)

    def add(self, a: GFqElem, b: GFqElem) -> GFqElem:
        if a.index == 0:
            return b
        if b.index == 0:
            return a
        ea, eb = a.index - 1, b.index - 1
        z = int(self.zech[(eb - ea) % (self.order - 1)])
        if z < 0:
            return GFqElem(0)
        return GFqElem((ea + z) % (self.order - 1) + 1)

    def neg(self, a: GFqElem) -> GFqElem:
        if a.index == 0 or self.p == 2:
            return a
        e = (a.index - 1 + (self.order - 1) // 2) % (self.order - 1)
        return GFqElem(e + 1)

    def inv(self, a: GFqElem) -> GFqElem:
        if a.index == 0:
            raise ZeroDivisionError("the zero element has no inverse")
        return GFqElem((-(a.index - 1)) % (self.order - 1) + 1)

    # -- packed dot products -------------------------------------------------

    def fgdp(
        self,
        v1: Sequence[GFqElem],
        v2: Sequence[GFqElem],
        stats: Optional[redq.CompressionStats] = None,
    ) -> GFqElem:
        """Dot product sum(v1[j]*v2[j]) via one packed word accumulation.

        Pipeline: packed lookups, word dot product, digit compression,
        L/H lookups, one field addition.  Length must not exceed the
        n_max the field was built for.
        """
        if len(v1) != len(v2):
            raise DimensionMismatch("vector lengths differ")
        n = len(v1)
        if n > self.params.n_max:
            raise ParamsViolation(
                f"length {n} exceeds n_max={self.params.n_max}"
            )
        acc = 0
        pt = self.pack_table
        for a, b in zip(v1, v2):
            acc += int(pt[a.index]) * int(pt[b.index])
        u = redq.redq_compress(
            acc, self.p, self.params.q, 2 * self.k - 2, stats=stats
        )
        l_elem, h_elem = self._lh_lookup(u.u, stats)
        if stats is not None:
            stats.table_accesses += 1  # Zech access inside the field addition
        return self.add(l_elem, h_elem)

    def _lh_lookup(self, u: Sequence[int], stats) -> tuple[GFqElem, GFqElem]:
        bb = self.u_bits
        li = 0
        for i in range(self.k):
            li |= int(u[i]) << (bb * i)
        hi = 0
        for i in range(self.k):
            hi |= int(u[self.k - 1 + i]) << (bb * i)
        if stats is not None:
            stats.table_accesses += 2
        return GFqElem(int(self.l_table[li])), GFqElem(int(self.h_table[hi]))

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Matrix product over the field; entries are element indices.

        The inner word products run on the exact matmul kernel; digit
        compression and the L/H correction are vectorized, and the final
        field addition happens on polynomial codes.
        """
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
            raise DimensionMismatch("incompatible shapes")
        if a.shape[1] > self.params.n_max:
            raise ParamsViolation(
                f"inner dimension {a.shape[1]} exceeds n_max={self.params.n_max}"
            )
        for m in (a, b):
            if m.size and (m.min() < 0 or m.max() >= self.order):
                raise ValueError("entries must be element indices")
        wa = self.pack_table[a]
        wb = self.pack_table[b]
        acc = _kernels.matmul_exact_u64(wa, wb)
        t = self.params.t
        u = _kernels.redq_compress_u64(
            acc.reshape(-1), self.p, t, 2 * self.k - 2
        )
        bb = self.u_bits
        li = np.zeros(u.shape[0], dtype=np.int64)
        hi = np.zeros(u.shape[0], dtype=np.int64)
        for i in range(self.k):
            li |= u[:, i].astype(np.int64) << (bb * i)
            hi |= u[:, self.k - 1 + i].astype(np.int64) << (bb * i)
        l_idx = self.l_table[li]
        h_idx = self.h_table[hi]
        out = self._add_indices(l_idx, h_idx)
        return out.reshape(acc.shape)

    def _add_indices(self, ia: np.ndarray, ib: np.ndarray) -> np.ndarray:
        """Vectorized field addition on index arrays, via polynomial codes."""
        ca = self.code_of_index[ia]
        cb = self.code_of_index[ib]
        out = np.zeros(ca.shape, dtype=np.int64)
        mul = 1
        for _ in range(self.k):
            out += mul * ((ca % self.p + cb % self.p) % self.p)
            ca //= self.p
            cb //= self.p
            mul *= self.p
        return self.index_of_code[out]


def build_field(
    p: int,
    k: int,
    irreducible: Optional[Sequence[int]] = None,
    max_dot_length: int = 1,
    beta: int = 53,
) -> GFqField:
    """Construct GF(p^k) with tables sized for dot products of the given length.

    Without an explicit modulus polynomial, monic candidates are scanned in
    base-p code order (constant term least significant) and the first
    irreducible one admitting a small generator wins; generator candidates
    are X, then X+1, X+2, ... (for k = 1, the constants 2, 3, ...).
    Raises NotIrreducible / NoGeneratorFound / TooLarge accordingly.
    """
    if not is_prime(p):
        raise ValueError(f"p must be prime, got {p}")
    if k < 1:
        raise ValueError("extension degree must be >= 1")
    if p**k > MAX_ORDER:
        raise TooLarge(f"order {p}**{k} exceeds the {MAX_ORDER} table guard")
    params = dqt_params(p, n=max_dot_length, k=k, beta=beta)

    def gen_candidates() -> list:
        if k == 1:
            return [1] if p == 2 else list(range(2, p))
        return [p] + [p + c for c in range(1, p)]  # X, X+1, ...

    if irreducible is not None:
        coeffs = [int(c) % p for c in irreducible]
        if len(coeffs) != k + 1 or coeffs[-1] != 1:
            raise ValueError("modulus polynomial must be monic of degree k")
        if not _is_irreducible(coeffs, p):
            raise NotIrreducible(f"{coeffs} has a nontrivial factor mod {p}")
        candidates = [coeffs]
    else:
        candidates = None  # lazy scan below

    def try_build(coeffs) -> Optional[GFqField]:
        for g in gen_candidates():
            try:
                return GFqField(p, k, coeffs, g, params)
            except NoGeneratorFound:
                continue
        return None

    if candidates is not None:
        fld = try_build(candidates[0])
        if fld is None:
            raise NoGeneratorFound(
                f"no small generator found for modulus {candidates[0]}"
            )
        return fld
    for code in range(p**k):
        coeffs = _code_to_coeffs(code, k, p) + [1]
        if not _is_irreducible(coeffs, p):
            continue
        fld = try_build(coeffs)
        if fld is not None:
            return fld
    raise NoGeneratorFound(f"no (modulus, generator) pair found for GF({p}^{k})")


# -- module-level conveniences matching the operation names -----------------


def field_mul(a: GFqElem, b: GFqElem, field: GFqField) -> GFqElem:
    return field.mul(a, b)


def field_add(a: GFqElem, b: GFqElem, field: GFqField) -> GFqElem:
    return field.add(a, b)


def field_inv(a: GFqElem, field: GFqField) -> GFqElem:
    return field.inv(a)


def fgdp(
    v1: Sequence[GFqElem], v2: Sequence[GFqElem], field: GFqField, **kw
) -> GFqElem:
    return field.fgdp(v1, v2, **kw)


def gfq_matmul(a: np.ndarray, b: np.ndarray, field: GFqField) -> np.ndarray:
    return field.matmul(a, b)
