"""Command-line harness: verification suites, tables, scans and benchmarks.

Subcommands
-----------
verify        run acceptance checks (all, by criterion, or by module suite);
              exits 1 on any failure
params-table  compression factors per dimension threshold for one modulus
fdiv-scan     exhaustive rounding-mode scans, one CSV row per (beta, case)
bench         time one operation on every kernel backend (informational)
matmul        one matrix product (files or seeded random), any variant
polymul       one polynomial product (files or seeded random)

Randomized inputs are drawn from a counter-based generator (Philox) keyed
by --seed, so identical configurations give byte-identical outputs;
benchmark timings are the one deliberate exception.  Matrix files use the
header "p rows cols" followed by row-major residues; polynomials are
single-row matrix files.
"""

from __future__ import annotations

import argparse
import sys
from contextlib import contextmanager
from typing import Optional

import numpy as np

from . import _kernels, bench, cmm, fdiv, polymul, verify
from .params import cmm_params, fqt_params, full_cmm_params
from .errors import QadicError


@contextmanager
def _out_stream(path: Optional[str]):
    if path:
        with open(path, "w") as f:
            yield f
    else:
        yield sys.stdout


# ---------------------------------------------------------------------------
# params-table
# ---------------------------------------------------------------------------


def _table_rows(p: int, beta: int, max_dim: int) -> list[dict]:
    """One row per radix exponent, merged where the compression matches."""
    rows = []
    t = 1
    while True:
        a = (p - 1) ** 2
        hi = (1 << t) // a
        lo = ((1 << (t - 1)) // a) + 1
        if hi < 1 or beta // t < 2:
            if beta // t < 2:
                break
            t += 1
            continue
        lo = max(lo, 1)
        e_hi = min(beta // t, hi)
        e_lo = min(beta // t, lo)
        if e_hi >= 2:
            rows.append(
                {"q_exp": t, "dim_lo": lo, "dim_hi": hi, "e_lo": e_lo,
                 "e_hi": e_hi, "d": e_hi - 1}
            )
        if hi >= max_dim:
            break
        t += 1
    # merge consecutive uncapped rows with one and the same compression
    merged: list[dict] = []
    for row in rows:
        if (
            merged
            and merged[-1]["e_lo"] == merged[-1]["e_hi"] == row["e_lo"] == row["e_hi"]
        ):
            merged[-1].update(
                q_exp=row["q_exp"], dim_hi=row["dim_hi"], d=row["d"]
            )
        else:
            merged.append(row)
    for row in merged:
        row["dim_hi"] = min(row["dim_hi"], max_dim)
    return merged


def _cmd_params_table(args) -> int:
    rows = _table_rows(args.p, args.beta, args.max_dim)
    with _out_stream(args.out) as f:
        if args.format == "csv":
            f.write("q_exp,dim_lo,dim_hi,e_lo,e_hi,d\n")
            for r in rows:
                f.write(
                    f"{r['q_exp']},{r['dim_lo']},{r['dim_hi']},"
                    f"{r['e_lo']},{r['e_hi']},{r['d']}\n"
                )
        else:
            f.write(f"compression table: p={args.p}, beta={args.beta}\n")
            f.write(f"{'Q':>6} {'dims':>16} {'compression':>12} {'d':>4}\n")
            for r in rows:
                dims = (
                    f"{r['dim_hi']}"
                    if r["dim_lo"] >= r["dim_hi"]
                    else f"{r['dim_lo']}..{r['dim_hi']}"
                )
                comp = (
                    f"{r['e_hi']}"
                    if r["e_lo"] == r["e_hi"]
                    else f"{r['e_lo']}..{r['e_hi']}"
                )
                f.write(f"{'2^%d' % r['q_exp']:>6} {dims:>16} {comp:>12} {r['d']:>4}\n")
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _cmd_verify(args) -> int:
    names = args.criterion or None
    lines = []

    def report(res):
        line = (
            f"{'PASS' if res.ok else 'FAIL'} {res.name} "
            f"({res.seconds:.2f}s): {res.detail}"
        )
        lines.append(line)
        print(line, flush=True)

    results = verify.run_criteria(names=names, suite=args.suite, report=report)
    if args.out:
        with open(args.out, "w") as f:
            f.write("\n".join(lines) + "\n")
    if not results:
        print(f"no criteria matched suite {args.suite!r}", file=sys.stderr)
        return 2
    return 0 if all(r.ok for r in results) else 1


# ---------------------------------------------------------------------------
# fdiv-scan
# ---------------------------------------------------------------------------


def _cmd_fdiv_scan(args) -> int:
    betas = args.beta or [6, 8, 10]
    cases = [args.case] if args.case else list(range(1, 10))
    with _out_stream(args.out) as f:
        f.write(
            "beta,case_id,mode1,mode2,pairs_checked,range_violations,"
            "bound_violations,k_minus_1_witness,k_plus_1_witness\n"
        )
        bad = 0
        for beta in betas:
            for cid in cases:
                rep = fdiv.exhaustive_check(beta, cid)
                spec = fdiv.case_spec_by_id(cid, beta)
                wm = "{}:{}".format(*rep.k_minus_1_witness) if rep.k_minus_1_witness else ""
                wp = "{}:{}".format(*rep.k_plus_1_witness) if rep.k_plus_1_witness else ""
                f.write(
                    f"{beta},{cid},{spec.mode1.value},{spec.mode2.value},"
                    f"{rep.pairs_checked},{rep.range_violations},"
                    f"{rep.bound_violations},{wm},{wp}\n"
                )
                bad += rep.range_violations + rep.bound_violations
    return 0 if bad == 0 else 1


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------


def _cmd_bench(args) -> int:
    backends = None if args.backend == "both" else [args.backend]
    rows = []
    for op in args.op:
        rows.extend(
            bench.run_bench(
                op,
                p=args.p,
                dim_or_deg=args.dim,
                d=args.d,
                seed=args.seed,
                reps=args.reps,
                backends=backends,
            )
        )
    with _out_stream(args.out) as f:
        f.write(bench.format_rows(rows))
    return 0


# ---------------------------------------------------------------------------
# matmul / polymul
# ---------------------------------------------------------------------------


def _load_or_random_matrices(args):
    if args.a and args.b:
        with open(args.a) as f:
            p, a = cmm.read_matrix(f)
        with open(args.b) as f:
            p2, b = cmm.read_matrix(f)
        if p != p2:
            raise QadicError("operand moduli differ")
        return p, a, b
    if not args.dims or not args.p:
        raise QadicError("need either --a/--b files or --dims and --p")
    m, k, n = (int(x) for x in args.dims.split("x"))
    rng = np.random.Generator(np.random.Philox(args.seed))
    return (
        args.p,
        rng.integers(0, args.p, (m, k), dtype=np.int64),
        rng.integers(0, args.p, (k, n), dtype=np.int64),
    )


def _cmd_matmul(args) -> int:
    p, a, b = _load_or_random_matrices(args)
    if a.shape[1] != b.shape[0]:
        raise QadicError("inner dimensions differ")
    k = a.shape[1]
    if args.variant == "plain":
        c = cmm.modmatmul(a, b, p)
    elif args.variant == "full":
        c = cmm.full_cmm(a, b, full_cmm_params(p, k, strict=True))
    else:
        prm = cmm_params(p, k, strict=True)
        if args.variant == "cmm":
            c = cmm.cmm_multiply(
                cmm.compress_rows(a, prm, cmm.REVERSED),
                cmm.compress_cols(b, prm, cmm.FORWARD),
            )
        elif args.variant == "right":
            c = cmm.right_cmm(a, cmm.compress_rows(b, prm, cmm.FORWARD))
        elif args.variant == "left":
            c = cmm.left_cmm(cmm.compress_cols(a, prm, cmm.FORWARD), b)
        else:
            raise QadicError(f"unknown variant {args.variant!r}")
    with _out_stream(args.out) as f:
        cmm.write_matrix(f, c, p)
    return 0


def _cmd_polymul(args) -> int:
    if args.a and args.b:
        with open(args.a) as f:
            p, a = cmm.read_matrix(f)
        with open(args.b) as f:
            p2, b = cmm.read_matrix(f)
        if p != p2:
            raise QadicError("operand moduli differ")
        pa = polymul.ModPoly(a.reshape(-1), p)
        pb = polymul.ModPoly(b.reshape(-1), p)
    else:
        if not args.p:
            raise QadicError("need either --a/--b files or --degree and --p")
        p = args.p
        rng = np.random.Generator(np.random.Philox(args.seed))
        pa = polymul.ModPoly.random(args.degree, p, rng)
        pb = polymul.ModPoly.random(args.degree, p, rng)
    if args.algo == "delayed":
        c = polymul.polymul_delayed(pa, pb)
    else:
        prm = fqt_params(p, args.d)
        algo = "karatsuba" if args.algo == "fqt-karatsuba" else "classical"
        c = polymul.polymul_fqt(pa, pb, prm, algo)
    with _out_stream(args.out) as f:
        cmm.write_matrix(f, c.coeffs.reshape(1, -1), p)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="qadic",
        description="packed residue arithmetic: verification, tables, benchmarks",
    )
    ap.add_argument(
        "--kernels",
        choices=_kernels.available_backends(),
        help="force a kernel backend for this invocation",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run acceptance checks")
    v.add_argument("--criterion", action="append", choices=list(verify.CRITERIA))
    v.add_argument("--suite", choices=verify.SUITES)
    v.add_argument("--out")
    v.set_defaults(fn=_cmd_verify)

    t = sub.add_parser("params-table", help="compression factors per dimension")
    t.add_argument("--p", type=int, required=True)
    t.add_argument("--beta", type=int, default=53)
    t.add_argument("--max-dim", type=int, default=65536)
    t.add_argument("--format", choices=("plain", "csv"), default="plain")
    t.add_argument("--out")
    t.set_defaults(fn=_cmd_params_table)

    s = sub.add_parser("fdiv-scan", help="exhaustive rounding-mode scans")
    s.add_argument("--beta", type=int, action="append")
    s.add_argument("--case", type=int, choices=range(1, 10))
    s.add_argument("--out")
    s.set_defaults(fn=_cmd_fdiv_scan)

    b = sub.add_parser("bench", help="time operations on each backend")
    b.add_argument("--op", action="append", choices=bench.OPS, required=True)
    b.add_argument("--p", type=int, default=3)
    b.add_argument("--dim", type=int, default=256, help="dimension or degree")
    b.add_argument("--d", type=int, default=3)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--reps", type=int, default=3)
    b.add_argument(
        "--backend",
        choices=("both",) + _kernels.available_backends(),
        default="both",
    )
    b.add_argument("--out")
    b.set_defaults(fn=_cmd_bench)

    m = sub.add_parser("matmul", help="one matrix product")
    m.add_argument(
        "--variant",
        choices=("plain", "cmm", "right", "left", "full"),
        default="plain",
    )
    m.add_argument("--a", help="left operand matrix file")
    m.add_argument("--b", help="right operand matrix file")
    m.add_argument("--dims", help="random operands of shape MxKxN")
    m.add_argument("--p", type=int)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--out")
    m.set_defaults(fn=_cmd_matmul)

    q = sub.add_parser("polymul", help="one polynomial product")
    q.add_argument(
        "--algo", choices=("delayed", "fqt", "fqt-karatsuba"), default="delayed"
    )
    q.add_argument("--a", help="left operand polynomial file (1-row matrix)")
    q.add_argument("--b", help="right operand polynomial file")
    q.add_argument("--degree", type=int, default=100)
    q.add_argument("--p", type=int)
    q.add_argument("--d", type=int, default=1)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out")
    q.set_defaults(fn=_cmd_polymul)
    return ap


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.kernels:
        _kernels.set_backend(args.kernels)
    try:
        return args.fn(args)
    except QadicError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
