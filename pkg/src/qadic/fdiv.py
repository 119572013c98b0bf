"""Exact floor division of machine integers via reciprocal multiplication.

Computing floor(r/p) as floor(round2(r * round1(1/p))) is off by at most one
from the true quotient k, and the direction of the error depends only on the
two rounding modes (up, down, nearest-even).  The nine mode pairs behave as
follows, where "bound on r" is a strict threshold under which the result
never exceeds k:

    case  round1  round2   floor(x) range   bound on r              lost bits
    1     up      up       [k, k+1]         2^b / (4 + 2^(2-b))     3
    2     up      near     [k, k+1]         2^b / (3 + 2^(1-b))     2
    3     up      down     [k, k+1]         2^(b-1)                 1
    4     near    up       [k, k+1]         2^b / (3 + 2^(1-b))     2
    5     near    near     [k-1, k+1]       2^(b-1) / (1 + 2^(-1-b))  2
    6     near    down     [k-1, k]         none needed             0
    7     down    up       [k-1, k+1]       2^(b-1)                 1
    8     down    near     [k-1, k]         none needed             0
    9     down    down     [k-1, k]         none needed             0

(b = mantissa bits.)  In cases 1..4 the result is never below k, so one
comparison p*y > r with a single decrement makes the division exact; pairing
each multiplication mode with the reciprocal mode that lands in cases 2/3/4
is exactly what `applied_fdiv` does.

Two backends realize the arithmetic: `SimFloat`, a sign/mantissa/exponent
simulator with a configurable mantissa width (4..53 bits) whose rounding is
performed on exact integers, small enough to scan all (r, p) pairs
exhaustively; and native IEEE doubles, where directed reciprocals are
obtained by a one-ulp adjustment of the nearest-rounded value and the
multiplication itself always rounds to nearest.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np


class RoundingMode(enum.Enum):
    UP = "up"
    DOWN = "down"
    NEAREST = "nearest"


UP, DOWN, NEAREST = RoundingMode.UP, RoundingMode.DOWN, RoundingMode.NEAREST

#: Row order of the case table: round1 major, round2 minor, both in
#: (up, nearest, down) order.
_MODE_ORDER = (UP, NEAREST, DOWN)


# ---------------------------------------------------------------------------
# simulated floats
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SimFloat:
    """A binary float with beta mantissa bits and unbounded exponent.

    value = sign * mantissa * 2**exponent with mantissa in
    [2**(beta-1), 2**beta - 1], or zero.  Inputs here are bounded, so
    overflow/subnormal handling is never needed.
    """

    sign: int
    mantissa: int
    exponent: int
    beta: int

    def __post_init__(self) -> None:
        if self.mantissa:
            if not (1 << (self.beta - 1)) <= self.mantissa < (1 << self.beta):
                raise ValueError("mantissa not normalized")
        elif self.sign != 0 or self.exponent != 0:
            raise ValueError("zero must be canonical")

    @property
    def is_zero(self) -> bool:
        return self.mantissa == 0

    def as_fraction(self) -> Fraction:
        if self.is_zero:
            return Fraction(0)
        e = self.exponent
        if e >= 0:
            return Fraction(self.sign * self.mantissa * (1 << e))
        return Fraction(self.sign * self.mantissa, 1 << -e)

    def __float__(self) -> float:
        return self.sign * self.mantissa * 2.0**self.exponent

    def floor(self) -> int:
        """floor of the exact value (only nonnegative values occur here)."""
        if self.is_zero:
            return 0
        if self.exponent >= 0:
            return self.sign * (self.mantissa << self.exponent)
        shifted = self.mantissa >> -self.exponent
        if self.sign > 0:
            return shifted
        rem = self.mantissa - (shifted << -self.exponent)
        return -shifted - (1 if rem else 0)


def _round_ratio(num: int, den: int, beta: int, mode: RoundingMode) -> SimFloat:
    """Correctly rounded positive rational num/den at beta mantissa bits."""
    # Normalize so that floor(num/den) has exactly beta bits.
    e = num.bit_length() - den.bit_length() - beta
    while True:
        n2, d2 = (num, den << e) if e >= 0 else (num << -e, den)
        m = n2 // d2
        if m >> beta:
            e += 1
        elif not m >> (beta - 1):
            e -= 1
        else:
            break
    rem = n2 - m * d2
    if rem:
        if mode is UP:
            m += 1
        elif mode is NEAREST:
            twice = 2 * rem
            if twice > d2 or (twice == d2 and m & 1):
                m += 1
    if m == 1 << beta:  # carry out of the mantissa
        m >>= 1
        e += 1
    return SimFloat(sign=1, mantissa=m, exponent=e, beta=beta)


def sim_div(r: int, p: int, mode: RoundingMode, beta: int) -> SimFloat:
    """Correctly rounded r/p (r >= 0, p >= 1) at beta mantissa bits."""
    if r < 0 or p < 1:
        raise ValueError("need r >= 0 and p >= 1")
    if r == 0:
        return SimFloat(0, 0, 0, beta)
    return _round_ratio(r, p, beta, mode)


def sim_reciprocal(p: int, mode: RoundingMode, beta: int) -> SimFloat:
    return _round_ratio(1, p, beta, mode)


def sim_mul_int(f: SimFloat, r: int, mode: RoundingMode) -> SimFloat:
    """r * f correctly rounded (r >= 0 integer)."""
    if r == 0 or f.is_zero:
        return SimFloat(0, 0, 0, f.beta)
    g = _round_ratio(r * f.mantissa, 1, f.beta, mode)
    return SimFloat(g.sign, g.mantissa, g.exponent + f.exponent, f.beta)


# ---------------------------------------------------------------------------
# native doubles
# ---------------------------------------------------------------------------

NATIVE_BETA = 53


def native_reciprocal(p: int, mode: RoundingMode) -> float:
    """Correctly rounded 1/p as an IEEE double for any of the three modes.

    The directed values are one-ulp adjustments of the nearest-rounded
    reciprocal; the comparison against the exact 1/p is done on rationals,
    so no FPU mode switch is ever required.
    """
    base = 1.0 / p
    if mode is NEAREST:
        return base
    exact = Fraction(1, p)
    fb = Fraction(base)
    if mode is UP:
        return base if fb >= exact else math.nextafter(base, math.inf)
    return base if fb <= exact else math.nextafter(base, -math.inf)


def fdiv(
    r: int,
    p: int,
    mode1: RoundingMode,
    mode2: RoundingMode,
    beta: int = NATIVE_BETA,
    backend: str = "sim",
) -> int:
    """floor(round2(r * round1(1/p))); lands within [k-1, k+1] of k = r//p.

    backend "sim" honors both modes at any beta in 2..53; backend "native"
    runs on doubles, where only mode2 == NEAREST is realizable portably.
    """
    if not 0 <= r < (1 << beta) or not 1 <= p < (1 << beta):
        raise ValueError("r and p must fit the mantissa range")
    if backend == "sim":
        invp = sim_reciprocal(p, mode1, beta)
        return sim_mul_int(invp, r, mode2).floor()
    if backend == "native":
        if beta != NATIVE_BETA:
            raise ValueError("native backend is fixed at beta=53")
        if mode2 is not NEAREST:
            raise ValueError(
                "native multiplication only rounds to nearest; use the sim backend"
            )
        return math.floor(r * native_reciprocal(p, mode1))
    raise ValueError(f"unknown backend {backend!r}")


# ---------------------------------------------------------------------------
# the case table
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CaseSpec:
    """One row of the mode-pair table (see the module docstring)."""

    case_id: int
    mode1: RoundingMode
    mode2: RoundingMode
    range_lo: int  # offset from k
    range_hi: int
    bound_on_r: Optional[Fraction]
    lost_bits: int

    def bound_threshold(self) -> Optional[int]:
        """Largest integer r with r < bound_on_r, or None."""
        if self.bound_on_r is None:
            return None
        return math.ceil(self.bound_on_r) - 1


_RANGES = {
    1: (0, 1),
    2: (0, 1),
    3: (0, 1),
    4: (0, 1),
    5: (-1, 1),
    6: (-1, 0),
    7: (-1, 1),
    8: (-1, 0),
    9: (-1, 0),
}
_LOST_BITS = {1: 3, 2: 2, 3: 1, 4: 2, 5: 2, 6: 0, 7: 1, 8: 0, 9: 0}


def _bound_fraction(case_id: int, beta: int) -> Optional[Fraction]:
    b = beta
    if case_id == 1:  # 2^b / (4 + 2^(2-b))
        return Fraction(1 << (2 * b), (1 << (b + 2)) + 4)
    if case_id in (2, 4):  # 2^b / (3 + 2^(1-b))
        return Fraction(1 << (2 * b), 3 * (1 << b) + 2)
    if case_id in (3, 7):  # 2^(b-1)
        return Fraction(1 << (b - 1))
    if case_id == 5:  # 2^(b-1) / (1 + 2^(-1-b))
        return Fraction(1 << (2 * b), (1 << (b + 1)) + 1)
    return None


def case_id_of(mode1: RoundingMode, mode2: RoundingMode) -> int:
    return 3 * _MODE_ORDER.index(mode1) + _MODE_ORDER.index(mode2) + 1


def case_spec(
    mode1: RoundingMode, mode2: RoundingMode, beta: int = NATIVE_BETA
) -> CaseSpec:
    """The table row for a mode pair, bounds as exact rationals."""
    cid = case_id_of(mode1, mode2)
    lo, hi = _RANGES[cid]
    return CaseSpec(
        case_id=cid,
        mode1=mode1,
        mode2=mode2,
        range_lo=lo,
        range_hi=hi,
        bound_on_r=_bound_fraction(cid, beta),
        lost_bits=_LOST_BITS[cid],
    )


def case_spec_by_id(case_id: int, beta: int = NATIVE_BETA) -> CaseSpec:
    if not 1 <= case_id <= 9:
        raise ValueError("case_id must be 1..9")
    m1 = _MODE_ORDER[(case_id - 1) // 3]
    m2 = _MODE_ORDER[(case_id - 1) % 3]
    return case_spec(m1, m2, beta)


# ---------------------------------------------------------------------------
# applied division (always-exact quotients)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InversePack:
    """Per-multiplication-mode reciprocals and correction thresholds.

    For an active multiplication mode o2, the reciprocal is rounded in the
    mode o1 that guarantees floor(x) >= k (cases 4, 2 and 3 for o2 = up,
    nearest, down), so at most one downward correction is ever needed, and
    none at all while r stays below the stored bound.
    """

    p: int
    beta: int
    backend: str
    invp: dict
    bound: dict  # mode -> smallest integer r that requires the test


_PAIRED_MODE1 = {UP: NEAREST, NEAREST: UP, DOWN: UP}


def precompute_inverses(
    p: int, backend: str = "sim", beta: int = NATIVE_BETA
) -> InversePack:
    if not 1 <= p < (1 << beta):
        raise ValueError("p out of range")
    invp = {}
    bound = {}
    for mode2 in _MODE_ORDER:
        mode1 = _PAIRED_MODE1[mode2]
        if backend == "sim":
            invp[mode2] = sim_reciprocal(p, mode1, beta)
        elif backend == "native":
            invp[mode2] = native_reciprocal(p, mode1)
        else:
            raise ValueError(f"unknown backend {backend!r}")
        spec = case_spec(mode1, mode2, beta)
        thr = spec.bound_threshold()
        bound[mode2] = thr + 1  # first r at which floor(x) may exceed k
    return InversePack(p=p, beta=beta, backend=backend, invp=invp, bound=bound)


def applied_fdiv(
    r: int, p: int, active_mode2: RoundingMode, inv: Optional[InversePack] = None,
    backend: str = "sim", beta: int = NATIVE_BETA,
) -> int:
    """Exactly floor(r/p) by reciprocal multiplication plus one test.

    The bound test r >= B and the multiply-back comparison are the only
    corrections; while r < B no correction branch executes, which callers
    use to skip the tests entirely.  The multiply-back product p*y is
    computed on exact integers.
    """
    if inv is None:
        inv = precompute_inverses(p, backend=backend, beta=beta)
    if not 0 <= r < (1 << inv.beta):
        raise ValueError("r out of range")
    f = inv.invp[active_mode2]
    if inv.backend == "sim":
        y = sim_mul_int(f, r, active_mode2).floor()
    else:
        if active_mode2 is not NEAREST:
            raise ValueError("native multiplication only rounds to nearest")
        y = math.floor(r * f)
    if r >= inv.bound[active_mode2]:
        if p * y > r:
            y -= 1
    return y


# ---------------------------------------------------------------------------
# exhaustive scans (vectorized)
# ---------------------------------------------------------------------------


@dataclass
class ScanReport:
    """Findings of an exhaustive (r, p) scan of one case at one beta."""

    beta: int
    case_id: int
    pairs_checked: int = 0
    range_violations: int = 0
    bound_violations: int = 0
    k_minus_1_witness: Optional[tuple] = None  # (r, p) attaining floor = k-1
    k_plus_1_witness: Optional[tuple] = None  # (r, p) attaining floor = k+1
    smallest_overflow_r: Optional[int] = None  # least r with floor > k anywhere

    @property
    def ok(self) -> bool:
        return self.range_violations == 0 and self.bound_violations == 0


def _vec_round_floor(
    prod: np.ndarray, e1: int, beta: int, mode: RoundingMode
) -> np.ndarray:
    """floor(mantissa-rounded prod * 2**e1) for int64 prod >= 0."""
    nbits = np.frexp(prod.astype(np.float64))[1]  # exact: prod < 2**53
    shift = np.maximum(nbits - beta, 0).astype(np.int64)
    mant = prod >> shift
    rem = prod - (mant << shift)
    if mode is UP:
        mant = mant + (rem > 0)
    elif mode is NEAREST:
        half = np.where(shift > 0, 1 << np.maximum(shift - 1, 0), np.int64(0))
        roundup = (rem > half) | ((rem == half) & ((mant & 1) == 1))
        mant = mant + roundup
    e = shift + e1
    return np.where(e >= 0, mant << np.maximum(e, 0), mant >> np.maximum(-e, 0))


def exhaustive_check(beta: int, case_id: int) -> ScanReport:
    """Scan every (r, p) in [0, 2^beta) x [1, 2^beta) for one case.

    Verifies range containment, verifies floor(x) <= k for every r below
    the case bound, and records witnesses where floor(x) = k -/+ 1 occurs.
    """
    if not 4 <= beta <= 16:
        raise ValueError("exhaustive scans support beta in 4..16")
    spec = case_spec_by_id(case_id, beta)
    rep = ScanReport(beta=beta, case_id=case_id)
    thr = spec.bound_threshold()
    r = np.arange(1 << beta, dtype=np.int64)
    for p in range(1, 1 << beta):
        invp = sim_reciprocal(p, spec.mode1, beta)
        fx = _vec_round_floor(r * invp.mantissa, invp.exponent, beta, spec.mode2)
        diff = fx - r // p
        rep.pairs_checked += r.shape[0]
        bad = (diff < spec.range_lo) | (diff > spec.range_hi)
        rep.range_violations += int(bad.sum())
        over = diff > 0
        if thr is not None:
            rep.bound_violations += int((over & (r <= thr)).sum())
        if rep.k_minus_1_witness is None and spec.range_lo == -1:
            idx = np.flatnonzero(diff == -1)
            if idx.size:
                rep.k_minus_1_witness = (int(idx[0]), p)
        if rep.k_plus_1_witness is None and spec.range_hi == 1:
            idx = np.flatnonzero(diff == 1)
            if idx.size:
                rep.k_plus_1_witness = (int(idx[0]), p)
        if over.any():
            first = int(np.flatnonzero(over)[0])
            if rep.smallest_overflow_r is None or first < rep.smallest_overflow_r:
                rep.smallest_overflow_r = first
    return rep


def applied_fdiv_exhaustive(beta: int) -> int:
    """Mismatch count of applied_fdiv against r//p over all (r, p, mode2)."""
    if not 4 <= beta <= 16:
        raise ValueError("exhaustive scans support beta in 4..16")
    mism = 0
    r = np.arange(1 << beta, dtype=np.int64)
    for p in range(1, 1 << beta):
        k = r // p
        for mode2 in _MODE_ORDER:
            mode1 = _PAIRED_MODE1[mode2]
            invp = sim_reciprocal(p, mode1, beta)
            y = _vec_round_floor(r * invp.mantissa, invp.exponent, beta, mode2)
            spec = case_spec(mode1, mode2, beta)
            b = spec.bound_threshold() + 1
            corr = (r >= b) & (p * y > r)
            y = y - corr
            mism += int((y != k).sum())
    return mism


def native_applied_random(n_samples: int, seed: int = 0) -> int:
    """Mismatch count of the native applied division on random 53-bit pairs.

    Draws a manageable set of random divisors (reciprocal preparation is
    per-divisor) and many numerators for each.
    """
    rng = np.random.Generator(np.random.Philox(seed))
    n_p = max(1, min(10_000, n_samples // 1000))
    per_p = -(-n_samples // n_p)
    ps = rng.integers(1, 1 << 53, size=n_p, dtype=np.int64)
    mism = 0
    checked = 0
    for p in ps:
        p = int(p)
        invp = native_reciprocal(p, UP)  # case 2 pairing for nearest mul
        thr = case_spec(UP, NEAREST, NATIVE_BETA).bound_threshold()
        r = rng.integers(0, 1 << 53, size=per_p, dtype=np.int64)
        y = np.floor(r.astype(np.float64) * invp).astype(np.int64)
        corr = (r > thr) & (p * y > r)
        y = y - corr
        mism += int((y != r // p).sum())
        checked += per_p
        if checked >= n_samples:
            break
    return mism


def sim_native_agreement(n_samples: int, seed: int = 0) -> int:
    """Mismatches between nearest-mode sim_div at beta=53 and native doubles.

    Both are correctly rounded, so the count must be zero; this is the
    simulator's self-check.
    """
    rng = np.random.Generator(np.random.Philox(seed))
    rs = rng.integers(0, 1 << 53, size=n_samples, dtype=np.int64)
    ps = rng.integers(1, 1 << 53, size=n_samples, dtype=np.int64)
    mism = 0
    for r, p in zip(rs.tolist(), ps.tolist()):
        native = r / p
        simmed = float(sim_div(r, p, NEAREST, NATIVE_BETA))
        if native != simmed:
            mism += 1
    return mism
