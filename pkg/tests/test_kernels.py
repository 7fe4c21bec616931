"""The compiled and pure kernels must agree entry for entry."""
import random

from hypothesis import given, settings
from hypothesis import strategies as st

from operad_forge._kernels import (
    BACKEND,
    apply_perm_to_word,
    compose_perms,
    invert_perm,
    koszul_sign,
    precompose_entries,
)
from operad_forge._kernels import _fallback as fb


def random_perm(rng, n):
    p = list(range(n))
    rng.shuffle(p)
    return tuple(p)


def test_backend_selected():
    assert BACKEND in ("compiled", "python")


@given(st.integers(0, 6), st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_kosul_sign_matches_fallback(n, seed):
    rng = random.Random(seed)
    perm = random_perm(rng, n)
    degs = tuple(rng.randint(-2, 3) for _ in range(n))
    assert koszul_sign(perm, degs) == fb.koszul_sign(perm, degs)


@given(st.integers(1, 6), st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_word_and_inverse_match_fallback(n, seed):
    rng = random.Random(seed)
    perm = random_perm(rng, n)
    word = tuple(rng.randint(0, 3) for _ in range(n))
    assert apply_perm_to_word(perm, word) == fb.apply_perm_to_word(perm, word)
    assert invert_perm(perm) == fb.invert_perm(perm)
    q = random_perm(rng, n)
    assert compose_perms(perm, q) == fb.compose_perms(perm, q)


@given(st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_cocycle_property(seed):
    """sign(st, deg) = sign(s, t.deg) * sign(t, deg) on random permutations."""
    rng = random.Random(seed)
    n = rng.randint(1, 6)
    s, t = random_perm(rng, n), random_perm(rng, n)
    degs = tuple(rng.randint(-2, 3) for _ in range(n))
    st_perm = compose_perms(s, t)
    permuted = [0] * n
    for i in range(n):
        permuted[t[i]] = degs[i]
    lhs = koszul_sign(st_perm, degs)
    rhs = koszul_sign(s, tuple(permuted)) * koszul_sign(t, degs)
    assert lhs == rhs


def test_koszul_examples():
    assert koszul_sign((1, 0), (1, 1)) == -1
    assert koszul_sign((1, 0), (0, 1)) == 1
    # a 3-cycle on three odd slots composes two adjacent swaps
    assert koszul_sign((1, 2, 0), (1, 1, 1)) == 1


def test_precompose_matches_fallback():
    rng = random.Random(5)
    from fractions import Fraction

    degs = (0, 1, -1, 2)
    for _ in range(40):
        n = rng.randint(1, 5)
        perm = random_perm(rng, n)
        entries = {
            tuple(rng.randint(0, 3) for _ in range(n)): Fraction(rng.randint(-5, 5))
            for _ in range(6)
        }
        entries = {w: v for w, v in entries.items() if v}
        assert precompose_entries(entries, perm, degs) == fb.precompose_entries(
            entries, perm, degs
        )


def test_precompose_is_right_action():
    from fractions import Fraction

    rng = random.Random(9)
    degs = (0, 1, -1, 2)
    for _ in range(30):
        n = rng.randint(1, 5)
        p, q = random_perm(rng, n), random_perm(rng, n)
        entries = {
            tuple(rng.randint(0, 3) for _ in range(n)): Fraction(rng.randint(1, 5))
            for _ in range(5)
        }
        once = precompose_entries(precompose_entries(entries, p, degs), q, degs)
        both = precompose_entries(entries, compose_perms(p, q), degs)
        assert once == both
