"""Hot-kernel backend selection.

Two interchangeable implementations exist: a compiled extension (_speed,
built from Cython) and a pure numpy fallback (pure).  The compiled one is
preferred when importable; QADIC_KERNELS=pure|compiled overrides, and
set_backend() switches at runtime (used by the tests and the benchmark).
Both produce bit-identical results; only speed differs.
"""

from __future__ import annotations

import os
import warnings

from . import pure

_backends = {"pure": pure}

try:  # pragma: no cover - exercised only when the extension is built
    from . import _speed

    _backends["compiled"] = _speed
except ImportError:  # pragma: no cover
    _speed = None

_env = os.environ.get("QADIC_KERNELS")
if _env:
    if _env not in _backends:
        warnings.warn(
            f"QADIC_KERNELS={_env!r} unavailable, falling back to defaults",
            RuntimeWarning,
        )
        _env = None
_active = _backends[_env or ("compiled" if "compiled" in _backends else "pure")]


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_backends))


def get_backend() -> str:
    return _active.name


def set_backend(name: str) -> None:
    global _active
    if name not in _backends:
        raise ValueError(f"unknown kernel backend {name!r}; have {available_backends()}")
    _active = _backends[name]


def matmul_exact_u64(a, b):
    return _active.matmul_exact_u64(a, b)


def matmul_mod_i64(a, b, p, chunk):
    return _active.matmul_mod_i64(a, b, p, chunk)


def conv_exact_u64(a, b):
    return _active.conv_exact_u64(a, b)


def conv_exact_i64(a, b):
    return _active.conv_exact_i64(a, b)


def redq_compress_u64(r, p, t, d):
    return _active.redq_compress_u64(r, p, t, d)
