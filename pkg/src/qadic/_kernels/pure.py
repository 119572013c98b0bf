"""Pure numpy fallback for the hot kernels.

Semantics are pinned by the compiled twin in _speed.pyx: unsigned 64-bit
arithmetic wraps mod 2**64, signed arithmetic must stay inside int64 (the
callers enforce the bounds).  Both backends return bit-identical results.
"""

from __future__ import annotations

import numpy as np

name = "pure"


def matmul_exact_u64(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """C = A @ B over uint64 with wrap-around semantics."""
    return np.matmul(a, b, dtype=np.uint64)


def matmul_mod_i64(a: np.ndarray, b: np.ndarray, p: int, chunk: int) -> np.ndarray:
    """C = A @ B mod p, reducing every `chunk` inner-dimension steps."""
    k = a.shape[1]
    if k <= chunk:
        return (a @ b) % p
    c = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for k0 in range(0, k, chunk):
        c = (c + a[:, k0 : k0 + chunk] @ b[k0 : k0 + chunk, :]) % p
    return c


def conv_exact_u64(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Full convolution over uint64 (wraps mod 2**64)."""
    return np.convolve(a, b)


def conv_exact_i64(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Full convolution over int64; caller guarantees no overflow."""
    return np.convolve(a, b)


def redq_compress_u64(r: np.ndarray, p: int, t: int, d: int) -> np.ndarray:
    """Compression stage of the simultaneous reduction, vectorized.

    Returns the (len(r), d+1) matrix of digits u_i = floor(r/2**(i*t)) mod p,
    each in [0, p), obtained from the single division s = floor(r/p).
    """
    r = np.ascontiguousarray(r, dtype=np.uint64)
    s = r // np.uint64(p)
    out = np.empty((r.shape[0], d + 1), dtype=np.uint64)
    pp = np.uint64(p)
    for i in range(d + 1):
        sh = np.uint64(i * t)
        out[:, i] = (r >> sh) - pp * (s >> sh)
    return out
