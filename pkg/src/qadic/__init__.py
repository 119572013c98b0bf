"""Packed residue arithmetic for small prime fields.

Several residues mod a small prime p travel inside one machine word as the
base-q digits of a single integer (q-adic packing / Kronecker substitution).
Products and sums then run on plain word arithmetic, and all digits are
reduced mod p at once by a single division (simultaneous reduction).

Modules
-------
params    bound selection (radix, packing degree, compression factor),
          operation-count models
dqt       the packing codec and the packed dot product
redq      simultaneous reduction: compression, correction, lookup tables
fdiv      exact floor division via reciprocal multiplication under every
          rounding-mode pair, with a small-mantissa float simulator
polymul   modular polynomial multiplication (delayed reduction and packed
          words, classical and Karatsuba)
gfext     small extension fields GF(p^k): discrete-log tables, packed dot
          products, matrix multiplication
cmm       compressed modular matrix multiplication (middle product,
          one-sided, two-radix full compression)
cli       command-line harness (verify / bench / tables / scans)

The hot kernels run on a compiled extension when available and fall back to
pure numpy otherwise; see qadic._kernels.
"""

from . import _kernels
from .errors import (
    DimensionMismatch,
    Infeasible,
    MemoryBudgetExceeded,
    NoGeneratorFound,
    NotIrreducible,
    PackOverflow,
    ParamsViolation,
    QadicError,
    TooLarge,
)
from .params import (
    ConversionCost,
    CostReport,
    FullCompressionParams,
    PackingParams,
    cmm_cost,
    cmm_params,
    conversion_cost,
    delayed_bound,
    dqt_params,
    fqt_params,
    full_cmm_params,
    polymul_cost,
)

__version__ = "0.1.0"

kernel_backend = _kernels.get_backend
