"""Informational micro-benchmarks comparing the kernel backends.

Each run times one operation on seeded random inputs and reports
nanoseconds per nominal inner operation (word multiply-adds for the matrix
and polynomial products, words for bulk reductions).  Rows are plain dicts
matching the benchmark CSV schema; timings are wall clock and carry no
pass/fail meaning.
"""

from __future__ import annotations

import time
from typing import Iterable, Optional

import numpy as np

from . import _kernels, cmm, polymul, redq
from .params import cmm_params, fqt_params, full_cmm_params

CSV_HEADER = "command,variant,p,d,q_exp,dim_or_deg,seed,repetitions,ns_per_op"


def _philox(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def _time(fn, reps: int) -> float:
    fn()  # warm-up, excluded
    t0 = time.perf_counter()
    for _ in range(reps):
        fn()
    return (time.perf_counter() - t0) / reps


def _matmul_case(op: str, p: int, dim: int, seed: int):
    rng = _philox(seed)
    a = rng.integers(0, p, (dim, dim), dtype=np.int64)
    b = rng.integers(0, p, (dim, dim), dtype=np.int64)
    if op == "matmul-plain":
        return (lambda: cmm.modmatmul(a, b, p)), dim**3, None
    if op == "matmul-full":
        prm = full_cmm_params(p, dim, strict=True)
        e = (prm.d_q + 1) * (prm.d_theta + 1)
        return (lambda: cmm.full_cmm(a, b, prm)), dim**3 // e, prm
    prm = cmm_params(p, dim, strict=True)
    e = prm.k
    if op == "matmul-cmm":
        ca = cmm.compress_rows(a, prm, cmm.REVERSED)
        cb = cmm.compress_cols(b, prm, cmm.FORWARD)
        return (lambda: cmm.cmm_multiply(ca, cb)), dim * dim * (dim // e or 1), prm
    if op == "matmul-right":
        cb = cmm.compress_rows(b, prm, cmm.FORWARD)
        return (lambda: cmm.right_cmm(a, cb)), dim * dim * (dim // e or 1), prm
    if op == "matmul-left":
        ca = cmm.compress_cols(a, prm, cmm.FORWARD)
        return (lambda: cmm.left_cmm(ca, b)), dim * dim * (dim // e or 1), prm
    raise ValueError(f"unknown op {op!r}")


def _poly_case(op: str, p: int, degree: int, d: int, seed: int):
    rng = _philox(seed)
    a = polymul.ModPoly.random(degree, p, rng)
    b = polymul.ModPoly.random(degree, p, rng)
    n_ops = (degree + 1) ** 2
    if op == "polymul-delayed":
        return (lambda: polymul.polymul_delayed(a, b)), n_ops, None
    prm = fqt_params(p, d)
    words = -(-(degree + 1) // prm.k)
    if op == "polymul-fqt":
        return (lambda: polymul.polymul_fqt(a, b, prm)), words**2, prm
    if op == "polymul-fqt-karatsuba":
        fn = lambda: polymul.polymul_fqt(a, b, prm, "karatsuba")
        return fn, words**2, prm
    raise ValueError(f"unknown op {op!r}")


OPS = (
    "matmul-plain",
    "matmul-cmm",
    "matmul-right",
    "matmul-left",
    "matmul-full",
    "polymul-delayed",
    "polymul-fqt",
    "polymul-fqt-karatsuba",
    "redq-bulk",
)


def run_bench(
    op: str,
    p: int = 3,
    dim_or_deg: int = 256,
    d: int = 3,
    seed: int = 0,
    reps: int = 3,
    backends: Optional[Iterable[str]] = None,
) -> list[dict]:
    """Time one operation on every requested backend; returns CSV-ready rows."""
    rows = []
    backends = list(backends) if backends else list(_kernels.available_backends())
    prev = _kernels.get_backend()
    try:
        for backend in backends:
            _kernels.set_backend(backend)
            if op.startswith("matmul"):
                fn, n_ops, prm = _matmul_case(op, p, dim_or_deg, seed)
            elif op.startswith("polymul"):
                fn, n_ops, prm = _poly_case(op, p, dim_or_deg, d, seed)
            elif op == "redq-bulk":
                prm = fqt_params(p, d)
                rng = _philox(seed)
                n_ops = dim_or_deg
                words = rng.integers(
                    0, min(1 << 53, prm.q ** (2 * prm.k - 1)), size=n_ops
                ).astype(np.uint64)
                fn = lambda: redq.reduce_words_array(
                    words, p, prm.t, 2 * prm.d
                )
            else:
                raise ValueError(f"unknown op {op!r}")
            per_call = _time(fn, reps)
            rows.append(
                {
                    "command": "bench",
                    "variant": f"{op}@{backend}",
                    "p": p,
                    "d": getattr(prm, "d", d) if prm is not None else d,
                    "q_exp": getattr(prm, "t", "") if prm is not None else "",
                    "dim_or_deg": dim_or_deg,
                    "seed": seed,
                    "repetitions": reps,
                    "ns_per_op": round(per_call / max(1, n_ops) * 1e9, 3),
                }
            )
    finally:
        _kernels.set_backend(prev)
    return rows


def format_rows(rows: list[dict]) -> str:
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(",".join(str(r[c]) for c in CSV_HEADER.split(",")))
    return "\n".join(lines) + "\n"
