"""Radix packing of residue vectors into single words.

A vector (c_0, ..., c_d) of residues becomes the integer sum(c_i * q**i):
index i is the coefficient of X**i, stored little-endian (bit block
[i*t, (i+1)*t) when q = 2**t).  Packing is a ring morphism as long as the
bounds in `params` hold, so dot products of packed vectors can run on plain
machine arithmetic and be unpacked once at the end.

Two paths share this module: a shift-based fast path for q a power of two
(the production layout) and an arbitrary-radix reference path used to replay
decimal worked examples and as a test oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

from .errors import PackOverflow, ParamsViolation
from .params import PackingParams


@dataclass(frozen=True)
class PackedWord:
    """A radix-q packed residue vector.

    digits_reduced records which invariant the digits satisfy: every base-q
    digit below p ("reduced") or merely below q ("delayed", mid-accumulation).
    """

    value: int
    params: PackingParams
    digits_reduced: bool = True

    def digits(self, count: int | None = None) -> list[int]:
        return unpack(self.value, count or self.params.k, self.params.q)


def pack(coeffs: Sequence[int], params: PackingParams) -> PackedWord:
    """Pack up to d+1 residues into one word, low index first.

    Coefficients must be in [0, q); the packed value must fit the word
    budget 2**beta (PackOverflow otherwise).
    """
    if len(coeffs) > params.k:
        raise ParamsViolation(
            f"{len(coeffs)} coefficients exceed the packing degree {params.d}"
        )
    q = params.q
    value = 0
    t = params.t
    for i, c in enumerate(coeffs):
        c = int(c)
        if not 0 <= c < q:
            raise ValueError(f"coefficient {c} outside [0, {q})")
        if t is not None:
            value |= c << (i * t)
        else:
            value += c * q**i
    if value >= 1 << params.beta:
        raise PackOverflow(
            f"packed value needs {value.bit_length()} bits, budget is {params.beta}"
        )
    reduced = all(int(c) < params.p for c in coeffs)
    return PackedWord(value=value, params=params, digits_reduced=reduced)


def unpack(
    w: Union[PackedWord, int], count: int, q: int | None = None
) -> list[int]:
    """Low `count` base-q digits of w, low digit first.

    Digits beyond `count` are the caller's responsibility; for a word with
    at most k+1 digits, pack(unpack(w, k+1)) == w.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if isinstance(w, PackedWord):
        q = w.params.q
        w = w.value
    elif q is None:
        raise ValueError("unpacking a bare integer needs the radix q")
    w = int(w)
    if q & (q - 1) == 0:
        t = q.bit_length() - 1
        mask = q - 1
        return [(w >> (i * t)) & mask for i in range(count)]
    digits = []
    for _ in range(count):
        w, r = divmod(w, q)
        digits.append(r)
    return digits


def dot_dqt(
    v1: Sequence[Sequence[int]],
    v2: Sequence[Sequence[int]],
    params: PackingParams,
) -> list[int]:
    """Dot product of two vectors of packed polynomials, reduced mod p.

    Each entry is a residue vector of length <= d+1; the result is the
    coefficient vector (length 2(d+1)-1) of sum v1[j]*v2[j] over GF(p)[X].
    All entries are packed, the word products are accumulated unreduced,
    and one simultaneous reduction recovers every coefficient.
    """
    from . import redq  # local import: redq packs its reduced output

    if len(v1) != len(v2):
        raise ValueError("vector lengths differ")
    n = len(v1)
    if n > params.n_max:
        raise ParamsViolation(f"length {n} exceeds n_max={params.n_max}")
    k = params.k
    out_digits = 2 * k - 1
    if n == 0:
        return [0] * out_digits
    acc = 0
    for a, b in zip(v1, v2):
        _check_reduced(a, params)
        _check_reduced(b, params)
        acc += pack(a, params).value * pack(b, params).value
    return redq.reduce_digits(acc, params.p, params.q, out_digits - 1)


def _check_reduced(coeffs: Sequence[int], params: PackingParams) -> None:
    if len(coeffs) > params.k:
        raise ParamsViolation("polynomial degree exceeds the packing degree")
    for c in coeffs:
        if not 0 <= int(c) < params.p:
            raise ValueError(f"coefficient {c} not reduced mod {params.p}")
