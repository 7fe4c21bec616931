# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled kernels mirroring _fallback.py (same signatures, same results)."""

from cpython.tuple cimport PyTuple_New, PyTuple_SET_ITEM
from cpython.ref cimport Py_INCREF


def invert_perm(perm):
    cdef Py_ssize_t n = len(perm)
    cdef list out = [0] * n
    cdef Py_ssize_t i
    for i in range(n):
        out[<Py_ssize_t> perm[i]] = i
    return tuple(out)


def compose_perms(p, q):
    cdef Py_ssize_t n = len(q)
    cdef list out = [0] * n
    cdef Py_ssize_t i
    for i in range(n):
        out[i] = p[<Py_ssize_t> q[i]]
    return tuple(out)


cdef int _koszul(long* perm, long* degs, Py_ssize_t n) nogil:
    cdef int sign = 1
    cdef Py_ssize_t i, j
    cdef long pi
    for i in range(n):
        if degs[i] % 2 == 0:
            continue
        pi = perm[i]
        for j in range(i + 1, n):
            if degs[j] % 2 != 0 and perm[j] < pi:
                sign = -sign
    return sign


def koszul_sign(perm, degrees):
    cdef Py_ssize_t n = len(perm)
    if n > 64:
        raise ValueError("kernel limit: at most 64 slots")
    cdef long p[64]
    cdef long d[64]
    cdef Py_ssize_t i
    for i in range(n):
        p[i] = perm[i]
        d[i] = degrees[i]
    return _koszul(p, d, n)


def apply_perm_to_word(perm, word):
    cdef Py_ssize_t n = len(word)
    if len(perm) != n:
        raise ValueError("permutation and word lengths differ")
    cdef tuple out = PyTuple_New(n)
    cdef Py_ssize_t i, p
    cdef object item
    for i in range(n):
        p = <Py_ssize_t> perm[i]
        if p < 0 or p >= n:
            raise ValueError("permutation entry out of range")
        item = word[i]
        Py_INCREF(item)
        PyTuple_SET_ITEM(out, p, item)
    return out


def precompose_entries(entries, perm, basis_degrees):
    cdef Py_ssize_t n = len(perm)
    if n > 64:
        raise ValueError("kernel limit: at most 64 slots")
    cdef long p[64]
    cdef long bdeg[64]
    cdef long wdeg[64]
    cdef Py_ssize_t i, nb = len(basis_degrees)
    inv = invert_perm(perm)
    for i in range(n):
        p[i] = inv[i]
    for i in range(min(nb, 64)):
        bdeg[i] = basis_degrees[i]
    cdef dict out = {}
    cdef int sign
    for word, value in entries.items():
        for i in range(n):
            wdeg[i] = bdeg[<Py_ssize_t> word[i]]
        sign = _koszul(p, wdeg, n)
        out[apply_perm_to_word(inv, word)] = value if sign > 0 else -value
    return out
