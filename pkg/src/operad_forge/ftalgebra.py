"""Residual checkers for algebras over the Feynman transforms.

An algebra is a family of degree-0 multilinear functionals indexed by
canonical orbit representatives: symmetric maps ``(n, genus)`` for the
closed-surface operad (loop homotopy algebras), cyclic maps ``n`` for the
genus-zero open operad, maps keyed by a b-sequence and genus for the open
operad, plus a closed arity for the two-coloured one.

Each defining equation is evaluated twice: generically, through the dual
structure maps and the endomorphism operations, and through hand-coded
contribution formulas with explicit relabelling permutations.  The two
paths are independent and the test suite compares them exactly.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple, Optional

from . import operads as op
from ._kernels import apply_perm_to_word, invert_perm, koszul_sign
from .combinatorics import (
    QCElement,
    QOCSurface,
    QOSurface,
    bseq_arity,
    bseq_boundaries,
    orbit_representative,
    rep_cycle_slots,
    trim_bseq,
)
from .endo import _pair_matrix, endo_compose, endo_contract
from .errors import (
    KeyMissing,
    KindMismatch,
    SingularOmega,
    SymmetryViolation,
    Unstable,
)
from .graded import (
    GradedSymplecticSpace,
    MultiFunctional,
    format_rational,
    functional_differential,
    parse_rational,
    space_from_json,
    space_to_json,
    zero_functional,
)

ZERO = Fraction(0)
HALF = Fraction(1, 2)

ALGEBRA_KINDS = ("loop", "cyclic_ainfty", "quantum_ainfty", "qoc")
OPERAD_OF = {
    "loop": "qc",
    "cyclic_ainfty": "ass",
    "quantum_ainfty": "qo",
    "qoc": "qoc",
}


class LoopKey(NamedTuple):
    n: int
    genus: int


class CyclicKey(NamedTuple):
    n: int


class QuantumKey(NamedTuple):
    bseq: tuple
    g: int


class QocKey(NamedTuple):
    bseq: tuple
    g: int
    closed: int


def key_arity(key) -> int:
    if isinstance(key, (LoopKey, CyclicKey)):
        return key.n
    return bseq_arity(key.bseq)


def key_closed(key) -> int:
    return key.closed if isinstance(key, QocKey) else 0


def key_genus2(key) -> int:
    if isinstance(key, LoopKey):
        return 2 * key.genus
    if isinstance(key, CyclicKey):
        return 0
    b = bseq_boundaries(key.bseq)
    return 4 * key.g + 2 * b + key_closed(key) - 2


def representative(key):
    """Canonical basis element the key's functional is attached to."""
    if isinstance(key, LoopKey):
        return QCElement(labels=frozenset(range(1, key.n + 1)), genus2=2 * key.genus)
    if isinstance(key, CyclicKey):
        return QOSurface(cycles=(tuple(range(1, key.n + 1)),), empties=0, g=0)
    if isinstance(key, QocKey):
        cycles = []
        nxt = 1
        for k in range(1, len(key.bseq)):
            for _ in range(key.bseq[k]):
                cycles.append(tuple(range(nxt, nxt + k)))
                nxt += k
        return QOCSurface(
            cycles=tuple(cycles), empties=key.bseq[0], g=key.g,
            closed=frozenset(range(1, key.closed + 1)),
        )
    return orbit_representative(key.bseq, key.g)


def key_of(kind: str, x) -> object:
    """Map key of the orbit representative of a basis element."""
    if kind == "loop":
        return LoopKey(len(x.labels), x.genus2 // 2)
    if kind == "cyclic_ainfty":
        return CyclicKey(x.arity)
    if kind == "quantum_ainfty":
        return QuantumKey(x.bseq(), x.g)
    return QocKey(x.bseq(), x.g, len(x.closed))


def check_key(kind: str, key) -> None:
    expected = {
        "loop": LoopKey, "cyclic_ainfty": CyclicKey,
        "quantum_ainfty": QuantumKey, "qoc": QocKey,
    }[kind]
    if not isinstance(key, expected):
        raise KeyMissing(f"{kind} data is keyed by {expected.__name__}")
    if isinstance(key, CyclicKey) and key.n < 3:
        raise Unstable("cyclic maps start at arity 3")
    rep = representative(key)  # raises Unstable on bad b-sequences
    if not rep.is_stable():
        raise Unstable(f"{key} indexes an unstable corolla")
    if isinstance(key, QuantumKey) and bseq_boundaries(key.bseq) < 1:
        raise KeyMissing("open surfaces need at least one boundary")


# ---------------------------------------------------------------------------
# stabilizer generators for the symmetry validation


def stab_generators(kind, key):
    """Slot permutations generating the representative's stabilizer."""
    n = key_arity(key)
    c = key_closed(key)
    total = n + c
    gens = []

    def full_perm(core):
        return tuple(core) + tuple(range(len(core), total))

    if kind == "loop":
        for i in range(n - 1):
            p = list(range(n))
            p[i], p[i + 1] = p[i + 1], p[i]
            gens.append(full_perm(p))
        return gens
    if kind == "cyclic_ainfty":
        if n > 1:
            gens.append(tuple((i + 1) % n for i in range(n)))
        return gens
    blocks = rep_cycle_slots(key.bseq)
    for start, length in blocks:
        if length > 1:
            p = list(range(total))
            for i in range(length):
                p[start + i] = start + (i + 1) % length
            gens.append(tuple(p))
    for (s1, l1), (s2, l2) in zip(blocks, blocks[1:]):
        if l1 == l2:
            p = list(range(total))
            for i in range(l1):
                p[s1 + i], p[s2 + i] = s2 + i, s1 + i
            gens.append(tuple(p))
    for i in range(c - 1):
        p = list(range(total))
        p[n + i], p[n + i + 1] = p[n + i + 1], p[n + i]
        gens.append(tuple(p))
    return gens


# ---------------------------------------------------------------------------
# algebra data


@dataclass
class AlgebraData:
    """A candidate algebra: spaces plus representative-keyed functionals."""

    kind: str
    space: GradedSymplecticSpace
    maps: dict
    closed_space: Optional[GradedSymplecticSpace] = None

    def __post_init__(self):
        if self.kind not in ALGEBRA_KINDS:
            raise KindMismatch(f"unknown algebra kind {self.kind!r}")
        if self.kind == "qoc" and self.closed_space is None:
            raise KindMismatch("two-coloured data needs a closed space")
        for key, f in self.maps.items():
            check_key(self.kind, key)
            self.validate_map(key, f)

    def validate_map(self, key, f: MultiFunctional):
        n, c = key_arity(key), key_closed(key)
        dim = self.space.dim
        dim_c = self.closed_space.dim if self.closed_space is not None else 0
        for w in f.entries:
            ok = all(0 <= k < dim for k in w[:n]) and all(
                dim <= k < dim + dim_c for k in w[n:]
            )
            if len(w) != n + c or not ok:
                raise KeyMissing(
                    f"map {key}: entry index {list(w)} is out of range"
                )
        if f.degree != 0 or not f.check_homogeneous():
            raise SymmetryViolation(f"map {key} is not of degree 0")
        if f.arity != n + c:
            raise SymmetryViolation(f"map {key} has the wrong arity")
        for s in stab_generators(self.kind, key):
            if f.precompose_slots(s).entries != f.entries:
                raise SymmetryViolation(
                    f"map {key} is not invariant under its stabilizer"
                )

    def tensor(self, key) -> dict:
        f = self.maps.get(key)
        return f.entries if f is not None else {}

    def functional(self, key) -> MultiFunctional:
        f = self.maps.get(key)
        if f is not None:
            return f
        n, c = key_arity(key), key_closed(key)
        return zero_functional(
            self.space, range(1, n + 1), degree=0,
            cspace=self.closed_space, clabels=range(1, c + 1) if c else (),
        )

    def dims(self):
        return self.space.dim, self.closed_space.dim if self.closed_space else 0


def make_map(data_kind, space, closed_space, key, entries) -> MultiFunctional:
    n, c = key_arity(key), key_closed(key)
    return MultiFunctional(
        space=space, labels=tuple(range(1, n + 1)), entries=entries, degree=0,
        cspace=closed_space if data_kind == "qoc" else None,
        clabels=tuple(range(1, c + 1)) if c else (),
    )


# ---------------------------------------------------------------------------
# equivariant extension


class EquivariantAlgebra:
    """Extension of representative-keyed maps to every basis element."""

    def __init__(self, data: AlgebraData):
        self.data = data

    def functional_for(self, x) -> MultiFunctional:
        data = self.data
        lo = sorted(op.open_labels(x)) if data.kind != "loop" else sorted(x.labels)
        lc = sorted(op.closed_labels(x)) if data.kind == "qoc" else []
        rho = {l: i + 1 for i, l in enumerate(lo)}
        rho_c = {l: i + 1 for i, l in enumerate(lc)}
        if data.kind == "qoc":
            y = op.relabel(x, rho, rho_c)
        else:
            y = op.relabel(x, rho)
        rep, sigma = op.canonical_perm(y)
        key = key_of(data.kind, rep)
        base = data.functional(key)
        if key_closed(key):
            sigma = sigma + tuple(range(len(sigma), len(sigma) + key_closed(key)))
        T = base.precompose_slots(sigma) if sigma else base
        return MultiFunctional(
            space=data.space, labels=tuple(lo), entries=T.entries, degree=0,
            cspace=data.closed_space if data.kind == "qoc" else None,
            clabels=tuple(lc),
        )


def extend_by_equivariance(data: AlgebraData) -> EquivariantAlgebra:
    return EquivariantAlgebra(data)


# ---------------------------------------------------------------------------
# generic residual through dual maps and endomorphism operations


def ft_residual(data: AlgebraData, key) -> MultiFunctional:
    """d(alpha) minus the contraction and gluing terms, at one representative."""
    check_key(data.kind, key)
    rep = representative(key)
    okind = OPERAD_OF[data.kind]
    alpha = EquivariantAlgebra(data)
    R = functional_differential(data.functional(key))
    colours = ("open", "closed") if data.kind == "qoc" else ("open",)
    for colour in colours:
        if data.kind == "cyclic_ainfty":
            continue
        a, b = op.fresh_pair(rep, colour)
        for x in op.dual_contract(okind, rep, a, b, colour=colour):
            R = R.minus(endo_contract(alpha.functional_for(x), a, b, colour=colour))
    for colour in colours:
        a, b = op.fresh_pair(rep, colour)
        for x, y in op.dual_compose(okind, rep, a, b, colour=colour):
            term = endo_compose(
                alpha.functional_for(x), a, alpha.functional_for(y), b, colour=colour
            )
            R = R.minus(term.scaled(HALF))
    return R


# ---------------------------------------------------------------------------
# specialized residuals


def _insert_two_front(table, P, T, word, perm=None):
    """sum_{d,e} P[d][e] * T(rho . (a_d, a_e, word)) with Koszul signs."""
    acc = ZERO
    dim = len(P)
    for d in range(dim):
        row = P[d]
        for e in range(dim):
            coeff = row[e]
            if not coeff:
                continue
            w = (d, e) + word
            if perm is None:
                val = T.get(w, ZERO)
                if val:
                    acc += coeff * val
            else:
                val = T.get(apply_perm_to_word(perm, w), ZERO)
                if val:
                    sign = koszul_sign(perm, tuple(table[k] for k in w))
                    acc += coeff * val * sign
    return acc


def loop_residual(data: AlgebraData, n: int, genus: int) -> MultiFunctional:
    """Hand-coded form of the defining equation for symmetric maps."""
    if data.kind != "loop":
        raise KindMismatch("loop residual needs loop data")
    key = LoopKey(n, genus)
    check_key(data.kind, key)
    space = data.space
    table = space.degrees
    P = _pair_matrix(space)
    dim = space.dim
    R = dict(functional_differential(data.functional(key)).entries)
    words = list(itertools.product(range(dim), repeat=n))
    up = data.tensor(LoopKey(n + 2, genus - 1)) if genus >= 1 else {}
    if up:
        for w in words:
            v = _insert_two_front(table, P, up, w)
            if v:
                R[w] = R.get(w, ZERO) - v
    labels = list(range(1, n + 1))
    for c1 in _all_subsets(labels):
        c2 = [l for l in labels if l not in set(c1)]
        n1, n2 = len(c1), len(c2)
        psi = _unshuffle_perm(labels, c1)
        for g1 in range(0, genus + 1):
            g2 = genus - g1
            if 2 * (g1 - 1) + n1 + 1 <= 0 or 2 * (g2 - 1) + n2 + 1 <= 0:
                continue
            T1 = data.tensor(LoopKey(n1 + 1, g1))
            T2 = data.tensor(LoopKey(n2 + 1, g2))
            if not T1 or not T2:
                continue
            for w in words:
                sign0 = koszul_sign(psi, tuple(table[k] for k in w))
                u = apply_perm_to_word(psi, w)
                x, y = u[:n1], u[n1:]
                degx = sum(table[k] for k in x)
                acc = ZERO
                for d in range(dim):
                    row = P[d]
                    for e in range(dim):
                        coeff = row[e]
                        if not coeff:
                            continue
                        v1 = T1.get((d,) + x, ZERO)
                        if not v1:
                            continue
                        v2 = T2.get((e,) + y, ZERO)
                        if not v2:
                            continue
                        term = coeff * v1 * v2
                        if (table[e] * degx) % 2:
                            term = -term
                        acc += term
                if acc:
                    R[w] = R.get(w, ZERO) - HALF * sign0 * acc
    R = {w: v for w, v in R.items() if v}
    return make_map(data.kind, space, None, key, R)


def cyclic_residual(data: AlgebraData, n: int) -> MultiFunctional:
    """Hand-coded cyclic relation: d(f_n) = half the sum of split terms."""
    if data.kind != "cyclic_ainfty":
        raise KindMismatch("cyclic residual needs cyclic data")
    key = CyclicKey(n)
    check_key(data.kind, key)
    space = data.space
    table = space.degrees
    P = _pair_matrix(space)
    dim = space.dim
    R = dict(functional_differential(data.functional(key)).entries)
    words = list(itertools.product(range(dim), repeat=n))
    for s in range(n):
        psi = tuple((i - s) % n for i in range(n))  # label s+k goes to slot k-1
        for l in range(2, n - 1):
            T1 = data.tensor(CyclicKey(l + 1))
            T2 = data.tensor(CyclicKey(n - l + 1))
            if not T1 or not T2:
                continue
            for w in words:
                sign0 = koszul_sign(psi, tuple(table[k] for k in w))
                u = apply_perm_to_word(psi, w)
                x, y = u[:l], u[l:]
                degx = sum(table[k] for k in x)
                acc = ZERO
                for d in range(dim):
                    row = P[d]
                    for e in range(dim):
                        coeff = row[e]
                        if not coeff:
                            continue
                        v1 = T1.get((d,) + x, ZERO)
                        if not v1:
                            continue
                        v2 = T2.get((e,) + y, ZERO)
                        if not v2:
                            continue
                        term = coeff * v1 * v2
                        if (table[e] * degx) % 2:
                            term = -term
                        acc += term
                if acc:
                    R[w] = R.get(w, ZERO) - HALF * sign0 * acc
    R = {w: v for w, v in R.items() if v}
    return make_map(data.kind, space, None, key, R)


def _all_subsets(items):
    for r in range(len(items) + 1):
        yield from itertools.combinations(items, r)


def _unshuffle_perm(labels, first_block):
    """Slot permutation sending the first_block labels to the leading slots."""
    order = list(first_block) + [l for l in labels if l not in set(first_block)]
    slot = {l: i for i, l in enumerate(sorted(labels))}
    perm = [0] * len(labels)
    for pos, l in enumerate(order):
        perm[slot[l]] = pos
    return tuple(perm)


# -- open-surface residuals (b-sequence keyed, one or two colours) ----------


def _shift_cycles(cycles, offset):
    return tuple(tuple(l + offset for l in c) for c in cycles)


def _stable_open(g, boundaries, arity, closed=0):
    return 4 * g + 2 * boundaries + 2 * closed - 4 + arity > 0


def _ordered_splits_list(items):
    items = tuple(items)
    out = []
    for r in range(len(items) + 1):
        for left in itertools.combinations(items, r):
            ls = set(left)
            out.append((tuple(left), tuple(i for i in items if i not in ls)))
    return out


def _ordered_cycle_sequence(cycles, arc, a_len, tie="lex"):
    """Member labels listed cycle by cycle, nondecreasing lengths, with the
    glued cycle (given by its arc, the glued end omitted) leftmost among the
    cycles of its length; other cycles start at their minimum."""
    keyed = []
    for c in cycles:
        second = c if tie == "lex" else tuple(-x for x in c)
        keyed.append(((len(c), 0, second), c))
    if a_len:
        keyed.append(((a_len, -1, ()), None))
    keyed.sort(key=lambda t: t[0])
    seq = []
    for _, c in keyed:
        seq.extend(arc if c is None else c)
    return seq


def _seq_perm(labels, seq):
    """Slot permutation sending ascending labels to their position in seq."""
    slot = {l: i for i, l in enumerate(sorted(labels))}
    perm = [0] * len(seq)
    for pos, l in enumerate(seq):
        perm[slot[l]] = pos
    return tuple(perm)


def _surface(two, cycles, empties, g, closed_n):
    if two:
        return QOCSurface(
            cycles=op.sort_cycles(cycles), empties=empties, g=g,
            closed=frozenset(range(1, closed_n + 1)),
        )
    return QOSurface(cycles=op.sort_cycles(cycles), empties=empties, g=g)


def _self_glue_value(data, element, table, P, word, tie):
    """sum_d of (f o rho)(a_d (x) b_d (x) a_word) for a self-gluing preimage.

    ``element`` lives on [n+2] with 1 and 2 the glued ends; rho is its
    canonicalizing permutation.
    """
    rep, perm = op.canonical_perm(element, tie=tie)
    T = data.tensor(key_of(data.kind, rep))
    if not T:
        return ZERO
    if isinstance(rep, QOCSurface):
        perm = perm + tuple(range(len(perm), len(perm) + len(rep.closed)))
    return _insert_two_front(table, P, T, word, perm=perm)


def _words_for(data, n, closed_n):
    dim = data.space.dim
    if data.kind != "qoc":
        return list(itertools.product(range(dim), repeat=n))
    dimc = data.closed_space.dim
    return [
        tuple(wo) + tuple(k + dim for k in wc)
        for wo in itertools.product(range(dim), repeat=n)
        for wc in itertools.product(range(dimc), repeat=closed_n)
    ]


def _open_surface_residual(data: AlgebraData, key, tie="lex") -> MultiFunctional:
    check_key(data.kind, key)
    two = data.kind == "qoc"
    closed_ar = key_closed(key)
    rep = representative(key)
    space = data.space
    dim = space.dim
    table = space.degrees + (data.closed_space.degrees if two else ())
    P = _pair_matrix(space)
    n = key_arity(key)
    words = _words_for(data, n, closed_ar)
    R = dict(functional_differential(data.functional(key)).entries)
    cyc = list(rep.cycles)
    b0, g = rep.empties, rep.g
    nb = len(cyc)

    def glue_element(new_cycles, empties, gg, skip):
        kept = _shift_cycles(
            tuple(c for k, c in enumerate(cyc) if k not in set(skip)), 2
        )
        return _surface(two, kept + tuple(new_cycles), empties, gg, closed_ar)

    contr = []
    # ends 1,2 on a single cycle of the preimage, split apart by the gluing
    for i in range(nb):
        for j in range(i + 1, nb):
            ci, cj = cyc[i], cyc[j]
            for p in range(len(ci)):
                for q in range(len(cj)):
                    cycle = (1,) + tuple(l + 2 for l in ci[p:] + ci[:p]) \
                        + (2,) + tuple(l + 2 for l in cj[q:] + cj[:q])
                    contr.append((2, glue_element((cycle,), b0, g, (i, j))))
    if b0 > 0:
        for i in range(nb):
            ci = cyc[i]
            for p in range(len(ci)):
                cycle = (1,) + tuple(l + 2 for l in ci[p:] + ci[:p]) + (2,)
                contr.append((2, glue_element((cycle,), b0 - 1, g, (i,))))
    if b0 > 1:
        x = glue_element(((1, 2),), b0 - 2, g, ())
        if op.is_admissible(x):
            contr.append((1, x))
    # ends 1,2 on two cycles of the preimage, merged by the gluing
    if g >= 1:
        for m in range(nb):
            cm = cyc[m]
            L = len(cm)
            for s in range(L):
                word = cm[s:] + cm[:s]
                for l in range(L - s, L + 1):
                    c1 = (1,) + tuple(k + 2 for k in word[:l])
                    c2 = (2,) + tuple(k + 2 for k in word[l:])
                    contr.append((2, glue_element((c1, c2), b0, g - 1, (m,))))
        if b0 > 0:
            contr.append((1, glue_element(((1,), (2,)), b0 - 1, g - 1, ())))
    for mult, x in contr:
        for w in words:
            v = _self_glue_value(data, x, table, P, w, tie)
            if v:
                R[w] = R.get(w, ZERO) - mult * v
    if two:
        _closed_self_glue(data, key, words, table, R)
    third = _open_glue_splittings(data, key, words, tie)
    for w, v in third.items():
        if v:
            R[w] = R.get(w, ZERO) - HALF * v
    if two:
        closed_third = _closed_glue_splittings(data, key, words, tie)
        for w, v in closed_third.items():
            if v:
                R[w] = R.get(w, ZERO) - HALF * v
    R = {w: v for w, v in R.items() if v}
    return make_map(data.kind, space, data.closed_space, key, R)


def quantum_residual(data: AlgebraData, bseq, g: int, tie: str = "lex"):
    """Hand-coded defining equation for b-sequence indexed maps."""
    if data.kind != "quantum_ainfty":
        raise KindMismatch("quantum residual needs open-surface data")
    return _open_surface_residual(data, QuantumKey(trim_bseq(bseq), g), tie=tie)


def qoc_residual(data: AlgebraData, key: QocKey, tie: str = "lex"):
    """Hand-coded defining equation for the two-coloured maps."""
    if data.kind != "qoc":
        raise KindMismatch("qoc residual needs two-coloured data")
    return _open_surface_residual(data, key, tie=tie)


def _closed_self_glue(data, key, words, table, R):
    """Contraction of two closed ends of the preimage."""
    rep = representative(key)
    if rep.g < 1:
        return
    closed_ar = key_closed(key)
    n = key_arity(key)
    Tc = data.tensor(QocKey(key.bseq, rep.g - 1, closed_ar + 2))
    if not Tc:
        return
    space_c = data.closed_space
    Pc = _pair_matrix(space_c)
    off = data.space.dim
    for w in words:
        wo, wc = w[:n], w[n:]
        dego = sum(table[k] for k in wo) % 2
        acc = ZERO
        for d in range(space_c.dim):
            row = Pc[d]
            degd = space_c.degrees[d]
            for e in range(space_c.dim):
                coeff = row[e]
                if not coeff:
                    continue
                val = Tc.get(wo + (d + off, e + off) + wc, ZERO)
                if not val:
                    continue
                if ((degd + space_c.degrees[e]) * dego) % 2:
                    val = -val
                acc += coeff * val
        if acc:
            R[w] = R.get(w, ZERO) - acc


def _factor_relabelled(two, cycles, arc, empties, g, closed_n, tie,
                       open_glued=True):
    """A splitting factor relabelled onto standard labels.

    For an open gluing the glued end becomes open label 1 and the members
    follow the ordered cycle sequence shifted by one; for a closed gluing
    the glued end becomes closed label 1 instead.
    """
    seq = _ordered_cycle_sequence(cycles, arc, len(arc) + 1 if open_glued else 0,
                                  tie=tie)
    shift = 2 if open_glued else 1
    rho = {l: i + shift for i, l in enumerate(seq)}
    new_cycles = [tuple(rho[l] for l in c) for c in cycles]
    if open_glued:
        new_cycles.append((1,) + tuple(rho[l] for l in arc))
    return _surface(two, tuple(new_cycles), empties, g,
                    closed_n + (0 if open_glued else 1))


def _open_glue_splittings(data, key, words, tie):
    """Ordered splittings glued along an open end: products of two maps."""
    two = data.kind == "qoc"
    space = data.space
    dim = space.dim
    table = space.degrees + (data.closed_space.degrees if two else ())
    P = _pair_matrix(space)
    rep = representative(key)
    cyc = list(rep.cycles)
    b0, g = rep.empties, rep.g
    nb = len(cyc)
    n = key_arity(key)
    closed_ar = key_closed(key)
    closed_labels = list(range(1, closed_ar + 1))
    closed_splits = _ordered_splits_list(closed_labels) if two else [((), ())]
    out: dict = {}
    cases = []
    for m in range(nb):
        cm = cyc[m]
        L = len(cm)
        others = [k for k in range(nb) if k != m]
        for I in _all_subsets(others):
            setI = set(I)
            J = tuple(k for k in others if k not in setI)
            for e in range(b0 + 1):
                for g1 in range(g + 1):
                    for s in range(L):
                        word = cm[s:] + cm[:s]
                        for l in range(L + 1):
                            cases.append((I, J, e, b0 - e, g1, word[:l], word[l:]))
    if b0 > 0:
        for I in _all_subsets(list(range(nb))):
            setI = set(I)
            J = tuple(k for k in range(nb) if k not in setI)
            for e in range(b0):
                for g1 in range(g + 1):
                    cases.append((I, J, e, b0 - 1 - e, g1, (), ()))
    for I, J, e1, e2, g1, arc1, arc2 in cases:
        g2 = g - g1
        cyc1 = [cyc[k] for k in I]
        cyc2 = [cyc[k] for k in J]
        n1 = len(arc1) + sum(len(c) for c in cyc1)
        n2 = len(arc2) + sum(len(c) for c in cyc2)
        for D1, D2 in closed_splits:
            if not _stable_open(g1, e1 + len(cyc1) + 1, n1 + 1, len(D1)):
                continue
            if not _stable_open(g2, e2 + len(cyc2) + 1, n2 + 1, len(D2)):
                continue
            y1 = _factor_relabelled(two, cyc1, arc1, e1, g1, len(D1), tie)
            y2 = _factor_relabelled(two, cyc2, arc2, e2, g2, len(D2), tie)
            rep1, rho1 = op.canonical_perm(y1, tie=tie)
            rep2, rho2 = op.canonical_perm(y2, tie=tie)
            T1 = data.tensor(key_of(data.kind, rep1))
            T2 = data.tensor(key_of(data.kind, rep2))
            if not T1 or not T2:
                continue
            seq1 = _ordered_cycle_sequence(cyc1, arc1, len(arc1) + 1, tie)
            seq2 = _ordered_cycle_sequence(cyc2, arc2, len(arc2) + 1, tie)
            psi_o = _seq_perm(range(1, n + 1), list(seq1) + list(seq2))
            psi_c = _unshuffle_perm(closed_labels, list(D1)) if two else ()
            psi = tuple(psi_o) + tuple(n + p for p in psi_c)
            c1n, c2n = len(D1), len(D2)
            rho1w = tuple(rho1) + tuple(range(n1 + 1, n1 + 1 + c1n))
            rho2w = tuple(rho2) + tuple(range(n2 + 1, n2 + 1 + c2n))
            for w in words:
                sgn0 = koszul_sign(psi, tuple(table[k] for k in w))
                u = apply_perm_to_word(psi, w)
                x_o, rest = u[:n1], u[n1:]
                y_o, rest = rest[:n2], rest[n2:]
                x_c, y_c = rest[:c1n], rest[c1n:]
                degx = sum(table[k] for k in x_o) + sum(table[k] for k in x_c)
                inter = sum(table[k] for k in y_o) * sum(table[k] for k in x_c)
                acc = ZERO
                for d in range(dim):
                    row = P[d]
                    w1 = (d,) + x_o + x_c
                    v1 = T1.get(apply_perm_to_word(rho1w, w1), ZERO)
                    if not v1:
                        continue
                    sg1 = koszul_sign(rho1w, tuple(table[k] for k in w1))
                    for ee in range(dim):
                        coeff = row[ee]
                        if not coeff:
                            continue
                        w2 = (ee,) + y_o + y_c
                        v2 = T2.get(apply_perm_to_word(rho2w, w2), ZERO)
                        if not v2:
                            continue
                        sg2 = koszul_sign(rho2w, tuple(table[k] for k in w2))
                        term = coeff * v1 * v2 * sg1 * sg2
                        if (table[ee] * degx + inter) % 2:
                            term = -term
                        acc += term
                if acc:
                    out[w] = out.get(w, ZERO) + sgn0 * acc
    return out


def _closed_glue_splittings(data, key, words, tie):
    """Ordered splittings glued along a closed end (two colours only)."""
    space = data.space
    space_c = data.closed_space
    table = space.degrees + space_c.degrees
    Pc = _pair_matrix(space_c)
    off = space.dim
    rep = representative(key)
    cyc = list(rep.cycles)
    b0, g = rep.empties, rep.g
    nb = len(cyc)
    n = key_arity(key)
    closed_ar = key_closed(key)
    closed_labels = list(range(1, closed_ar + 1))
    out: dict = {}
    for I in _all_subsets(list(range(nb))):
        setI = set(I)
        J = tuple(k for k in range(nb) if k not in setI)
        cyc1 = [cyc[k] for k in I]
        cyc2 = [cyc[k] for k in J]
        n1 = sum(len(c) for c in cyc1)
        n2 = sum(len(c) for c in cyc2)
        for e1 in range(b0 + 1):
            e2 = b0 - e1
            for g1 in range(g + 1):
                g2 = g - g1
                for D1, D2 in _ordered_splits_list(closed_labels):
                    if not _stable_open(g1, e1 + len(cyc1), n1, len(D1) + 1):
                        continue
                    if not _stable_open(g2, e2 + len(cyc2), n2, len(D2) + 1):
                        continue
                    y1 = _factor_relabelled(True, cyc1, (), e1, g1, len(D1), tie,
                                            open_glued=False)
                    y2 = _factor_relabelled(True, cyc2, (), e2, g2, len(D2), tie,
                                            open_glued=False)
                    rep1, rho1 = op.canonical_perm(y1, tie=tie)
                    rep2, rho2 = op.canonical_perm(y2, tie=tie)
                    T1 = data.tensor(key_of(data.kind, rep1))
                    T2 = data.tensor(key_of(data.kind, rep2))
                    if not T1 or not T2:
                        continue
                    seq1 = _ordered_cycle_sequence(cyc1, (), 0, tie)
                    seq2 = _ordered_cycle_sequence(cyc2, (), 0, tie)
                    psi_o = _seq_perm(range(1, n + 1), list(seq1) + list(seq2))
                    psi_c = _unshuffle_perm(closed_labels, list(D1))
                    psi = tuple(psi_o) + tuple(n + p for p in psi_c)
                    c1n, c2n = len(D1), len(D2)
                    rho1w = tuple(rho1) + tuple(range(n1, n1 + c1n + 1))
                    rho2w = tuple(rho2) + tuple(range(n2, n2 + c2n + 1))
                    for w in words:
                        sgn0 = koszul_sign(psi, tuple(table[k] for k in w))
                        u = apply_perm_to_word(psi, w)
                        x_o, rest = u[:n1], u[n1:]
                        y_o, rest = rest[:n2], rest[n2:]
                        x_c, y_c = rest[:c1n], rest[c1n:]
                        deg_xo = sum(table[k] for k in x_o)
                        deg_xc = sum(table[k] for k in x_c)
                        deg_yo = sum(table[k] for k in y_o)
                        degx = deg_xo + deg_xc
                        inter = deg_yo * deg_xc
                        acc = ZERO
                        for d in range(space_c.dim):
                            row = Pc[d]
                            degd = space_c.degrees[d]
                            w1 = x_o + (d + off,) + x_c
                            v1 = T1.get(apply_perm_to_word(rho1w, w1), ZERO)
                            if not v1:
                                continue
                            sg1 = koszul_sign(rho1w, tuple(table[k] for k in w1))
                            if (degd * deg_xo) % 2:
                                sg1 = -sg1
                            for ee in range(space_c.dim):
                                coeff = row[ee]
                                if not coeff:
                                    continue
                                w2 = y_o + (ee + off,) + y_c
                                v2 = T2.get(apply_perm_to_word(rho2w, w2), ZERO)
                                if not v2:
                                    continue
                                sg2 = koszul_sign(rho2w, tuple(table[k] for k in w2))
                                dege = space_c.degrees[ee]
                                if (dege * deg_yo) % 2:
                                    sg2 = -sg2
                                term = coeff * v1 * v2 * sg1 * sg2
                                if (dege * degx + inter) % 2:
                                    term = -term
                                acc += term
                        if acc:
                            out[w] = out.get(w, ZERO) + sgn0 * acc
    return out


# ---------------------------------------------------------------------------
# key enumeration, random data, serialization


@lru_cache(maxsize=None)
def stab_group(kind, key):
    """Full stabilizer of the representative, as slot permutations."""
    n = key_arity(key) + key_closed(key)
    gens = stab_generators(kind, key)
    ident = tuple(range(n))
    group = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for p in frontier:
            for s in gens:
                q = tuple(s[p[i]] for i in range(n))
                if q not in group:
                    group.add(q)
                    nxt.append(q)
        frontier = nxt
    return tuple(sorted(group))


def _partitions(n, largest=None):
    """Multisets of positive integers summing to n, as count tuples."""
    largest = largest or n
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in _partitions(n - k, k):
            counts = list(rest) + [0] * max(0, k - len(rest))
            counts[k - 1] += 1
            yield tuple(counts)


def enumerate_keys(kind, max_n, max_genus2):
    """All admissible representative keys within arity and genus bounds."""
    out = []
    if kind == "loop":
        for n in range(0, max_n + 1):
            for g in range(0, max_genus2 // 2 + 1):
                if 2 * (g - 1) + n > 0:
                    out.append(LoopKey(n, g))
        return out
    if kind == "cyclic_ainfty":
        return [CyclicKey(n) for n in range(3, max_n + 1)]
    for n in range(0, max_n + 1):
        for part in _partitions(n):
            nonzero = (0,) + part
            base_b = bseq_boundaries(nonzero)
            for b0 in range(0, max_genus2 // 2 + 2):
                bseq = trim_bseq((b0,) + part)
                b = base_b + b0
                for g in range(0, max_genus2 // 4 + 1):
                    if kind == "quantum_ainfty":
                        if b < 1 or 4 * g + 2 * b - 2 > max_genus2:
                            continue
                        if not _stable_open(g, b, n):
                            continue
                        out.append(QuantumKey(bseq, g))
                    else:
                        for c in range(0, max_n + 1 - n):
                            if 4 * g + 2 * b + c - 2 > max_genus2:
                                continue
                            if not _stable_open(g, b, n, c):
                                continue
                            out.append(QocKey(bseq, g, c))
    return sorted(set(out), key=repr)


def random_invariant_map(rng, data_kind, space, closed_space, key,
                         density=0.6, max_num=3) -> MultiFunctional:
    """Random degree-0 functional symmetrized over the stabilizer."""
    n, c = key_arity(key), key_closed(key)
    table = space.degrees + (closed_space.degrees if data_kind == "qoc" else ())
    dim = space.dim
    raw = {}
    for w in _words_for_dims(data_kind, dim, closed_space.dim if closed_space else 0,
                             n, c):
        if sum(table[k] for k in w) != 0:
            continue
        if rng.random() < density:
            num = rng.randint(-max_num, max_num)
            if num:
                raw[w] = Fraction(num, rng.randint(1, max_num))
    entries: dict = {}
    for s in stab_group(data_kind, key):
        inv = invert_perm(s)
        for w, v in raw.items():
            sign = koszul_sign(inv, tuple(table[k] for k in w))
            nw = apply_perm_to_word(inv, w)
            entries[nw] = entries.get(nw, ZERO) + (v if sign > 0 else -v)
    entries = {w: v for w, v in entries.items() if v}
    return make_map(data_kind, space, closed_space, key, entries)


def _words_for_dims(kind, dim, dimc, n, c):
    if kind != "qoc":
        return itertools.product(range(dim), repeat=n)
    return (
        tuple(wo) + tuple(k + dim for k in wc)
        for wo in itertools.product(range(dim), repeat=n)
        for wc in itertools.product(range(dimc), repeat=c)
    )


def random_algebra(kind, space, max_n, max_genus2, rng, closed_space=None,
                   density=0.6) -> AlgebraData:
    maps = {}
    for key in enumerate_keys(kind, max_n, max_genus2):
        f = random_invariant_map(rng, kind, space, closed_space, key, density)
        if f.entries:
            maps[key] = f
    return AlgebraData(kind=kind, space=space, maps=maps, closed_space=closed_space)


def key_to_json(key) -> dict:
    if isinstance(key, LoopKey):
        return {"n": key.n, "genus": key.genus}
    if isinstance(key, CyclicKey):
        return {"n": key.n}
    if isinstance(key, QuantumKey):
        return {"b_sequence": list(key.bseq), "g": key.g}
    return {"b_sequence": list(key.bseq), "g": key.g, "closed": key.closed}


def key_from_json(kind, doc):
    if kind == "loop":
        return LoopKey(int(doc["n"]), int(doc["genus"]))
    if kind == "cyclic_ainfty":
        return CyclicKey(int(doc["n"]))
    if kind == "quantum_ainfty":
        return QuantumKey(trim_bseq([int(x) for x in doc["b_sequence"]]), int(doc["g"]))
    return QocKey(
        trim_bseq([int(x) for x in doc["b_sequence"]]), int(doc["g"]),
        int(doc["closed"]),
    )


def algebra_to_json(data: AlgebraData) -> dict:
    doc = {
        "kind": data.kind,
        "space": space_to_json(data.space),
        "maps": [
            {
                "key": key_to_json(key),
                "entries": [
                    {"index": list(w), "value": format_rational(v)}
                    for w, v in sorted(f.entries.items())
                ],
            }
            for key, f in sorted(data.maps.items(), key=lambda kv: repr(kv[0]))
        ],
    }
    if data.closed_space is not None:
        doc["closed_space"] = space_to_json(data.closed_space)
    return doc


def algebra_from_json(doc) -> AlgebraData:
    if isinstance(doc, str):
        doc = json.loads(doc)
    kind = doc["kind"]
    if kind not in ALGEBRA_KINDS:
        raise KindMismatch(f"unknown algebra kind {kind!r}")
    space = space_from_json(doc["space"])
    closed_space = (
        space_from_json(doc["closed_space"]) if "closed_space" in doc else None
    )
    maps = {}
    for m in doc.get("maps", []):
        key = key_from_json(kind, m["key"])
        entries = {
            tuple(int(i) for i in e["index"]): parse_rational(e["value"])
            for e in m["entries"]
        }
        maps[key] = make_map(kind, space, closed_space, key, entries)
    return AlgebraData(kind=kind, space=space, maps=maps, closed_space=closed_space)


# ---------------------------------------------------------------------------
# cyclic algebras: bracket form and suspended multiplication form


def hom_bracket(F: dict, G: dict, space, deg_F: int = 0, deg_G: int = 0) -> dict:
    """Bracket of two arity-keyed families of functionals.

    The transported commutator of the coderivations the families induce on
    the tensor coalgebra: one family is applied inside the other with the
    paired basis vectors bridging the two, minus the sign-twisted swap.
    With a single degree-0 cyclic family f this yields d(f) = [f,f]/2.
    """
    P = _pair_matrix(space)
    table = space.degrees
    dim = space.dim
    out: dict = {}

    def one_sided(A, B, dB, global_sign):
        # A(pre (x) b_e (x) post (x) last) * B(mid (x) a_e) summed over cuts
        for nA, TA in A.items():
            for nB, TB in B.items():
                N = nA + nB - 2
                if N < 1:
                    continue
                acc = out.setdefault(N, {})
                i2 = nB - 1
                for i1 in range(0, N - i2):
                    for w in itertools.product(range(dim), repeat=N):
                        pre = w[:i1]
                        mid = w[i1 : i1 + i2]
                        post = w[i1 + i2 :]
                        deg_pre = sum(table[k] for k in pre)
                        deg_mid = sum(table[k] for k in mid)
                        s_move = (dB + 1) * deg_pre
                        s_inner = dB + deg_mid
                        val = ZERO
                        for e in range(dim):
                            vB = TB.get(mid + (e,), ZERO)
                            if not vB:
                                continue
                            row = P[e]
                            for k in range(dim):
                                coeff = row[k]
                                if not coeff:
                                    continue
                                vA = TA.get(pre + (k,) + post, ZERO)
                                if not vA:
                                    continue
                                val += coeff * vA * vB
                        if val:
                            if (s_move + s_inner) % 2:
                                val = -val
                            val *= global_sign
                            nv = acc.get(w, ZERO) + val
                            if nv:
                                acc[w] = nv
                            elif w in acc:
                                del acc[w]

    one_sided(F, G, deg_G, 1)
    swap_sign = -1 if ((deg_F + 1) * (deg_G + 1)) % 2 else 1
    one_sided(G, F, deg_F, -swap_sign)
    return {n: T for n, T in out.items() if T}


def multiplication_maps(data: AlgebraData) -> dict:
    """Degree +1 maps keyed by arity, solved from f_{n+1} = omega(m_n (x) id).

    Returned as {n: {word+(k,): coefficient of a_k in m_n(a_word)}}.
    """
    if data.kind != "cyclic_ainfty":
        raise KindMismatch("multiplication maps need cyclic data")
    space = data.space
    table = space.degrees
    dim = space.dim
    P = _pair_matrix(space)
    out = {}
    for key in data.maps:
        n = key.n - 1
        T = data.tensor(key)
        m: dict = {}
        for w in itertools.product(range(dim), repeat=n):
            degw = sum(table[k] for k in w)
            sgn = -1 if (degw + 1) % 2 else 1
            for j in range(dim):
                v = T.get(w + (j,), ZERO)
                if not v:
                    continue
                for k in range(dim):
                    if P[j][k]:
                        c = sgn * v * P[j][k]
                        m[w + (k,)] = m.get(w + (k,), ZERO) + c
        m = {wk: v for wk, v in m.items() if v}
        if m:
            out[n] = m
    return out


def suspended_maps(data: AlgebraData) -> dict:
    """Degree 2-n maps on the shifted space: the usual sign-twisted form."""
    base = multiplication_maps(data)
    table = data.space.degrees
    out = {}
    for n, m in base.items():
        shifted: dict = {}
        for wk, v in m.items():
            w = wk[:-1]
            # unshift the inputs right to left, shift the output
            s = sum((n - 1 - i) * (table[w[i]] + 1) for i in range(n))
            shifted[wk] = -v if s % 2 else v
        out[n] = shifted
    return out


def suspended_relation_residual(data: AlgebraData, mprime: dict | None = None,
                                max_n: int | None = None) -> dict:
    """Residual of the standard shifted relation with the differential as
    the arity-1 map; zero exactly when the algebra solves its equations."""
    space = data.space
    dim = space.dim
    up = tuple(d + 1 for d in space.degrees)
    if mprime is None:
        mprime = dict(suspended_maps(data))
    mprime = dict(mprime)
    d1 = {}
    for col in range(dim):
        for row in range(dim):
            c = space.differential[row][col]
            if c:
                d1[(col, row)] = c
    if d1:
        mprime[1] = d1
    out = {}
    arities = sorted(mprime)
    top = max_n if max_n is not None else (max(arities) + max(arities) - 1 if arities else 0)
    for n in range(1, top + 1):
        acc: dict = {}
        for i2 in arities:
            outer_n = n - i2 + 1
            if outer_n < 1 or outer_n not in mprime:
                continue
            inner = mprime[i2]
            outer = mprime[outer_n]
            deg_inner = 2 - i2
            for i1 in range(0, n - i2 + 1):
                i3 = n - i1 - i2
                sgn_base = -1 if (i1 * i2 + i3) % 2 else 1
                for w in itertools.product(range(dim), repeat=n):
                    pre = sum(up[k] for k in w[:i1])
                    move = -1 if (deg_inner * pre) % 2 else 1
                    for k_mid in range(dim):
                        v_in = inner.get(w[i1 : i1 + i2] + (k_mid,), ZERO)
                        if not v_in:
                            continue
                        outer_word = w[:i1] + (k_mid,) + w[i1 + i2 :]
                        for k_out in range(dim):
                            v_out = outer.get(outer_word + (k_out,), ZERO)
                            if not v_out:
                                continue
                            key = w + (k_out,)
                            acc[key] = acc.get(key, ZERO) + sgn_base * move * v_in * v_out
        acc = {k: v for k, v in acc.items() if v}
        if acc:
            out[n] = acc
    return out


def family_of(data: AlgebraData) -> dict:
    """Arity-keyed entry dicts of a cyclic algebra's maps."""
    return {key.n: dict(data.tensor(key)) for key in data.maps if data.tensor(key)}
