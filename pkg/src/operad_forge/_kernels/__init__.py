"""Kernel backend selection: compiled speedups when built, else pure Python.

Set OPERAD_FORGE_PURE=1 to force the pure-Python kernels.
"""
import os

from . import _fallback

BACKEND = "python"

if not os.environ.get("OPERAD_FORGE_PURE"):
    try:
        from . import _speedups as _impl

        BACKEND = "compiled"
    except ImportError:
        _impl = _fallback
else:
    _impl = _fallback

invert_perm = _impl.invert_perm
compose_perms = _impl.compose_perms
koszul_sign = _impl.koszul_sign
apply_perm_to_word = _impl.apply_perm_to_word
precompose_entries = _impl.precompose_entries

__all__ = [
    "BACKEND",
    "invert_perm",
    "compose_perms",
    "koszul_sign",
    "apply_perm_to_word",
    "precompose_entries",
]
