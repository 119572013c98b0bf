"""Parameter selection and operation-count models for packed residue arithmetic.

Everything here is driven by a handful of inequalities.  Writing k = d+1 for
the number of residues packed per word and beta for the mantissa/word bit
budget:

    dot products        q > n*k*(p-1)**2   and   (2k-1)*log2(q) <= beta
    delayed reduction   n_d*(p-1)**2 < 2**(beta+1)      (centered residues)
    middle product      k*(p-1)**2 <= Q   and   Q**(d+1) <= 2**beta
    full compression    Q**(d_q+1) <= Theta   and   Q**((d_q+1)(d_t+1)) < 2**beta

The middle-product radix test is *inclusive* (k*(p-1)**2 == Q allowed): the
published compression-vs-dimension thresholds are only reproducible with the
inclusive reading, and we pin those thresholds in the tests.  The price is a
single unreachable-in-practice corner: a dot product in which every term
equals (p-1)**2 and the sum lands exactly on Q overflows its digit.  See
`PackingParams.check_middle_product_bounds`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import Infeasible, ParamsViolation

#: Upper bound (exclusive) on supported prime moduli.
MAX_PRIME = 1 << 26


def is_prime(n: int) -> bool:
    """Trial-division primality test, adequate for n < 2**26."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _check_modulus(p: int) -> None:
    if not 2 <= p < MAX_PRIME:
        raise ValueError(f"modulus must satisfy 2 <= p < 2**26, got {p}")
    if not is_prime(p):
        raise ValueError(f"modulus must be prime, got {p}")


@dataclass(frozen=True)
class PackingParams:
    """Radix, packing degree and bit budget for one packing scheme.

    q is the radix (a power of two on the fast path, anything >= 2 on the
    reference path), d the packing degree (k = d+1 residues per word), beta
    the mantissa-bit budget and n_max the longest dot product the scheme
    guarantees exact.
    """

    p: int
    q: int
    d: int
    beta: int = 53
    n_max: int = 1

    def __post_init__(self) -> None:
        _check_modulus(self.p)
        if self.q < 2:
            raise ValueError("radix q must be >= 2")
        if self.d < 0:
            raise ValueError("packing degree d must be >= 0")
        if self.beta < 2:
            raise ValueError("beta must be >= 2")
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")

    @property
    def k(self) -> int:
        """Residues per word."""
        return self.d + 1

    @property
    def is_binary(self) -> bool:
        """True when q is a power of two (shift-friendly fast path)."""
        return self.q & (self.q - 1) == 0

    @property
    def t(self) -> Optional[int]:
        """Radix exponent when q = 2**t, else None."""
        return self.q.bit_length() - 1 if self.is_binary else None

    # -- bound checks -------------------------------------------------

    def check_dot_product_bounds(self, n: Optional[int] = None) -> None:
        """Validate the dot-product conditions for length n (default n_max)."""
        n = self.n_max if n is None else n
        k = self.k
        if self.q <= n * k * (self.p - 1) ** 2:
            raise ParamsViolation(
                f"q={self.q} too small for n={n}, k={k}, p={self.p}"
            )
        if self.q ** (2 * k - 1) > 1 << self.beta:
            raise ParamsViolation(
                f"q**{2 * k - 1} exceeds the 2**{self.beta} word budget"
            )

    def check_middle_product_bounds(self, k_dim: int) -> None:
        """Validate the middle-product conditions for inner dimension k_dim.

        The digit-capacity test here is strict (k_dim*(p-1)**2 < q): a dot
        product attaining an inclusive bound exactly overflows its digit,
        so the multiplication routines refuse boundary radices.  Build
        parameters with strict=True when the dimension sits on a threshold.
        """
        if k_dim * (self.p - 1) ** 2 >= self.q:
            raise ParamsViolation(
                f"k_dim={k_dim} fills or exceeds the digit capacity of "
                f"q={self.q}; rebuild the parameters with strict=True"
            )
        if self.q ** self.k > 1 << self.beta:
            raise ParamsViolation(
                f"q**{self.k} exceeds the 2**{self.beta} word budget"
            )

    def delayed_sum(self, k_dim: int) -> int:
        """Exact value of the high-part accumulation bound for dim k_dim.

        sum_{i=0..d} ceil(k_dim/(d+1)) * (i+1) * (p-1)**2 * q**(d-i);
        middle-product recovery requires this to stay below 2**beta.
        """
        words = -(-k_dim // self.k)
        a = (self.p - 1) ** 2
        return sum(
            words * (i + 1) * a * self.q ** (self.d - i)
            for i in range(self.k)
        )


@dataclass(frozen=True)
class FullCompressionParams:
    """Two-radix packing parameters: rows in Q = 2**t, columns in Theta.

    Theta = 2**theta_exp contains a complete Q-polynomial per digit,
    so theta_exp = t*(d_q+1) and Q**((d_q+1)*(d_theta+1)) < 2**beta.
    """

    p: int
    t: int
    d_q: int
    d_theta: int
    theta_exp: int
    beta: int = 53

    def __post_init__(self) -> None:
        _check_modulus(self.p)
        if self.t < 1 or self.d_q < 0 or self.d_theta < 0:
            raise ValueError("invalid full-compression parameters")
        if (1 << self.t) ** (self.d_q + 1) > 1 << self.theta_exp:
            raise ValueError("Theta must contain Q**(d_q+1)")
        if self.t * (self.d_q + 1) * (self.d_theta + 1) >= self.beta:
            raise ValueError("Q**((d_q+1)(d_theta+1)) must stay below 2**beta")

    @property
    def q(self) -> int:
        return 1 << self.t

    @property
    def theta(self) -> int:
        return 1 << self.theta_exp


# ---------------------------------------------------------------------------
# parameter builders
# ---------------------------------------------------------------------------


def dqt_params(p: int, n: int, k: int, beta: int = 53) -> PackingParams:
    """Minimal radix for exact length-n dot products of degree-(k-1) packs.

    Returns the smallest t with 2**t > n*k*(p-1)**2 and (2k-1)*t <= beta.
    Raises Infeasible when no such t exists (lower n or k).
    """
    _check_modulus(p)
    if n < 1 or k < 1 or beta < 2:
        raise ValueError("need n >= 1, k >= 1, beta >= 2")
    t = (n * k * (p - 1) ** 2).bit_length()
    if (2 * k - 1) * t > beta:
        raise Infeasible(
            f"no radix exponent fits: need t={t} but (2k-1)*t <= {beta}"
        )
    return PackingParams(p=p, q=1 << t, d=k - 1, beta=beta, n_max=n)


def delayed_bound(p: int, beta: int = 53, centered: bool = True) -> int:
    """Largest number of products accumulable before one reduction.

    Centered residues (|x| <= (p-1)/2) get the extra sign bit:
    n_d*(p-1)**2 < 2**(beta+1); plain residues in [0, p-1] only
    n_d*(p-1)**2 < 2**beta.
    """
    _check_modulus(p)
    limit = 1 << (beta + 1 if centered else beta)
    return (limit - 1) // (p - 1) ** 2


def _radix_exponent(p: int, k_dim: int, strict: bool) -> int:
    bound = k_dim * (p - 1) ** 2
    t = max(1, (bound - 1).bit_length())
    if strict and bound == 1 << t:
        t += 1
    return t


def cmm_params(
    p: int, k_dim: int, beta: int = 53, strict: bool = False
) -> PackingParams:
    """Radix and compression factor for a common matrix dimension k_dim.

    By default t is the smallest exponent with k_dim*(p-1)**2 <= 2**t
    (inclusive, the reading that reproduces the published compression
    thresholds); the compression factor e = min(beta // t, k_dim) is capped
    by the dimension, and d = e - 1.  strict=True bumps t when the bound is
    attained exactly, which the multiplication routines require (a maximal
    dot product must still fit its digit).
    """
    _check_modulus(p)
    if k_dim < 1:
        raise ValueError("k_dim must be >= 1")
    t = _radix_exponent(p, k_dim, strict)
    e = min(beta // t, k_dim)
    if beta // t < 2:
        raise Infeasible(f"no compression possible: beta//t = {beta // t} < 2")
    return PackingParams(p=p, q=1 << t, d=e - 1, beta=beta, n_max=k_dim)


def full_cmm_params(
    p: int, k_dim: int, beta: int = 53, strict: bool = False
) -> FullCompressionParams:
    """Two-radix parameters with equal degrees d_q = d_theta = d.

    d is maximal with t*(d+1)**2 <= beta, subject to the strict word-budget
    inequality Q**((d+1)**2) < 2**beta; theta_exp = t*(d+1) so Theta holds a
    complete Q-polynomial exactly.  strict as in cmm_params.
    """
    _check_modulus(p)
    if k_dim < 1:
        raise ValueError("k_dim must be >= 1")
    t = _radix_exponent(p, k_dim, strict)
    d = math.isqrt(beta // t) - 1
    while d >= 1 and t * (d + 1) ** 2 >= beta:
        d -= 1
    if d < 1:
        raise Infeasible(f"even d=1 violates the word budget for t={t}")
    return FullCompressionParams(
        p=p, t=t, d_q=d, d_theta=d, theta_exp=t * (d + 1), beta=beta
    )


def fqt_params(p: int, d: int, beta: int = 53) -> PackingParams:
    """Packing parameters for word-packed polynomial multiplication.

    Uses the largest shift-friendly radix q = 2**(beta // (2d+1)) meeting the
    (2k-1)*t <= beta constraint; n_max is the accumulation budget
    n_q = floor(q / ((d+1)*(p-1)**2)).
    """
    _check_modulus(p)
    if d < 0:
        raise ValueError("d must be >= 0")
    t = beta // (2 * d + 1)
    if t < 1:
        raise Infeasible(f"no radix exponent for d={d} within beta={beta}")
    q = 1 << t
    if q < p:
        raise Infeasible(f"radix q={q} cannot hold residues mod {p}")
    n_q = q // ((d + 1) * (p - 1) ** 2)
    if n_q < 1:
        raise Infeasible(f"accumulation budget empty: q={q}, d={d}, p={p}")
    return PackingParams(p=p, q=q, d=d, beta=beta, n_max=n_q)


# ---------------------------------------------------------------------------
# cost models
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CostReport:
    """Operation counts for one strategy.

    mul_add_count is the nominal word multiply-add count of the product
    itself; reduction_count the number of reduction events of the named
    kind.  The derived accessors expose the full audit trail: one machine
    division per reduction (either kind), plus ceil((k+1)/2) word
    multiply-adds per simultaneous reduction of k residues (one per
    single-residue reduction).
    """

    mul_add_count: int
    reduction_count: int
    reduction_kind: str  # "REDC" or "REDQ"
    redq_width: Optional[int] = None
    conversion_count: int = 0
    table_access_count: int = 0

    def __post_init__(self) -> None:
        if min(
            self.mul_add_count,
            self.reduction_count,
            self.conversion_count,
            self.table_access_count,
        ) < 0:
            raise ValueError("counts must be nonnegative")
        if self.reduction_kind not in ("REDC", "REDQ"):
            raise ValueError(f"unknown reduction kind {self.reduction_kind!r}")
        if self.reduction_kind == "REDQ" and not self.redq_width:
            raise ValueError("REDQ reports need a width")

    @property
    def kind_label(self) -> str:
        if self.reduction_kind == "REDQ":
            return f"REDQ_{self.redq_width}"
        return "REDC"

    @property
    def division_count(self) -> int:
        """Machine divisions: one per reduction event of either kind."""
        return self.reduction_count

    @property
    def reduction_axpy_count(self) -> int:
        """Word multiply-adds spent inside the reductions."""
        if self.reduction_kind == "REDQ":
            k = self.redq_width
            return self.reduction_count * ((k + 2) // 2)
        return self.reduction_count

    @property
    def total_mul_add(self) -> int:
        """Product multiply-adds plus the reduction-internal ones."""
        return self.mul_add_count + self.reduction_axpy_count


def polymul_cost(
    p: int,
    n_deg: int,
    d: int = 0,
    beta: int = 53,
    strategy: str = "delayed",
) -> CostReport:
    """Operation counts for degree-n_deg modular polynomial multiplication.

    "delayed": (2N+1)**2 multiply-adds, (2N+1)*ceil((2N+1)/n_d) REDC.
    "fqt": with D_q = ceil((N+1)/(d+1)) - 1 packed words per operand,
    (2*D_q+1)**2 word multiply-adds and (2*D_q+1)*ceil((2*D_q+1)/n_q)
    simultaneous reductions of 2d+1 residues each.

    Both rows count (output length)**2 multiply-adds, the classical
    per-output-coefficient accounting; a schoolbook convolution performs
    (input length)**2 products, i.e. about a quarter of the nominal count.
    """
    if n_deg < 0:
        raise ValueError("degree must be >= 0")
    if strategy == "delayed":
        n_d = delayed_bound(p, beta, centered=True)
        length = 2 * n_deg + 1
        return CostReport(
            mul_add_count=length * length,
            reduction_count=length * (-(-length // n_d)),
            reduction_kind="REDC",
        )
    if strategy == "fqt":
        prm = fqt_params(p, d, beta)
        d_q = -(-(n_deg + 1) // (d + 1)) - 1
        length = 2 * d_q + 1
        return CostReport(
            mul_add_count=length * length,
            reduction_count=length * (-(-length // prm.n_max)),
            reduction_kind="REDQ",
            redq_width=2 * d + 1,
        )
    raise ValueError(f"unknown strategy {strategy!r}")


_CMM_VARIANTS = ("cmm", "right", "left", "full")


def cmm_cost(
    m: int,
    n: int,
    k: int,
    e: int,
    omega: float = 3.0,
    variant: str = "cmm",
) -> CostReport:
    """Arithmetic-operation counts for the compressed matmul variants.

    For omega = 3 the Operations column is the exact classical block count
    (the constant of the O() family); for 2 < omega < 3 the same formula is
    evaluated with the fractional exponent and rounded, an asymptotic-family
    figure only.  "full" requires e to be a perfect square (equal packing
    degrees per axis); its reduction count generalizes to
    ceil(m/sqrt(e)) * ceil(n/sqrt(e)) simultaneous reductions.
    """
    if e < 1:
        raise ValueError("compression factor e must be >= 1")
    if not 2 < omega <= 3:
        raise ValueError("omega must lie in (2, 3]")
    if min(m, n, k) < 1:
        raise ValueError("dimensions must be >= 1")
    variant = variant.lower()
    if variant not in _CMM_VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")

    def blockcount(a: int, b: int, c_over_e: int) -> int:
        # a*b*(c/e)**(omega-2), exact for omega == 3
        if omega == 3:
            return a * b * c_over_e
        return round(a * b * float(c_over_e) ** (omega - 2))

    me, ne, ke = -(-m // e), -(-n // e), -(-k // e)
    conv = -(-m * n // e)
    if variant == "cmm":
        return CostReport(
            mul_add_count=blockcount(m, n, ke),
            reduction_count=m * n,
            reduction_kind="REDC",
            conversion_count=conv,
        )
    if variant == "right":
        return CostReport(
            mul_add_count=blockcount(m, k, ne),
            reduction_count=m * ne,
            reduction_kind="REDQ",
            redq_width=e,
            conversion_count=conv,
        )
    if variant == "left":
        return CostReport(
            mul_add_count=blockcount(n, k, me),
            reduction_count=me * n,
            reduction_kind="REDQ",
            redq_width=e,
            conversion_count=conv,
        )
    # full compression
    s = math.isqrt(e)
    if s * s != e:
        raise ValueError("full compression needs a perfect-square e")
    if omega == 3:
        ops = k * (-(-m * n // e))
    else:
        ops = round(k * float(m * n / e) ** ((omega - 1) / 2))
    return CostReport(
        mul_add_count=ops,
        reduction_count=(-(-m // s)) * (-(-n // s)),
        reduction_kind="REDQ",
        redq_width=e,
        conversion_count=conv,
    )


@dataclass(frozen=True)
class ConversionCost:
    """Per-dot-product conversion budget between field and packed words."""

    memory_entries: int
    axpy: int
    div: int
    table: int
    red: int


def conversion_cost(p: int, k: int, tabulated: bool = True) -> ConversionCost:
    """Conversion cost model for extension-field dot products.

    tabulated=True is the fast pipeline (packed lookup, one compression of
    2k-1 residues at k axpys, two correction lookups plus one inside the
    final field addition); tabulated=False is the plain radix-conversion
    route (2k-1 divisions, at least 5k cheap reductions, no tables).
    The radix-route red figure is a lower bound.
    """
    _check_modulus(p)
    if k < 1:
        raise ValueError("k must be >= 1")
    if tabulated:
        bb = max(1, (p - 1).bit_length())
        return ConversionCost(
            memory_entries=4 * p**k + (1 << (1 + k * bb)),
            axpy=k,
            div=0,
            table=3,
            red=1,
        )
    return ConversionCost(
        memory_entries=3 * p**k, axpy=0, div=2 * k - 1, table=0, red=5 * k
    )
