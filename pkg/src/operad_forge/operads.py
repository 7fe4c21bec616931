"""The surface operads: bases, structure maps, duals and the axiom verifier.

Four kinds are supported:

- ``qc``   closed surfaces, one basis element per stable corolla;
- ``qo``   open surfaces: disjoint cycles in the label set, an empty
           boundary count and a genus;
- ``ass``  the genus-zero single-boundary part of ``qo`` (cycles of full
           length, arity at least 3);
- ``qoc``  two-coloured surfaces carrying an extra set of closed ends.

Open and closed labels are independent namespaces; two-coloured operations
take an explicit ``colour``.  All structure maps are degree 0, so no signs
appear in this module.  Dual structure maps are computed twice, generically
by enumerating the source basis and pairing, and through explicit splitting
formulas; the test suite checks the two paths agree term for term.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from .combinatorics import (
    QCElement,
    QOCSurface,
    QOSurface,
    b_sequence,
    canonicalize_cycle,
)
from .errors import (
    ColourMismatch,
    KindMismatch,
    LabelCollision,
    MissingLabel,
    Unstable,
)

KINDS = ("qc", "qo", "ass", "qoc")

# Unstable surfaces admitted by the extension flag: a sphere with one
# closed end and one empty boundary, and a sphere with two empty
# boundaries.  Encoded as (boundaries, g, number of closed ends).
EXTENSION_SHAPES = {(1, 0, 1), (2, 0, 0)}


def sort_cycles(cycles) -> tuple:
    return tuple(
        sorted((canonicalize_cycle(c) for c in cycles), key=lambda c: (len(c), c))
    )


def qc_element(labels, genus2):
    return QCElement(labels=frozenset(labels), genus2=int(genus2))


def qo_surface(cycles, empties=0, g=0):
    return QOSurface(cycles=sort_cycles(cycles), empties=int(empties), g=int(g))


def qoc_surface(cycles, empties=0, g=0, closed=()):
    return QOCSurface(
        cycles=sort_cycles(cycles), empties=int(empties), g=int(g),
        closed=frozenset(closed),
    )


def element_kind(x) -> str:
    if isinstance(x, QCElement):
        return "qc"
    if isinstance(x, QOSurface):
        return "qo"
    if isinstance(x, QOCSurface):
        return "qoc"
    raise KindMismatch(f"not an operad element: {x!r}")


def open_labels(x) -> frozenset:
    return frozenset() if isinstance(x, QCElement) else x.labels


def closed_labels(x) -> frozenset:
    if isinstance(x, QCElement):
        return x.labels
    if isinstance(x, QOCSurface):
        return x.closed
    return frozenset()


def is_admissible(x, extended=False) -> bool:
    """Stable, or one of the two extension shapes when ``extended``; the
    value "free" waives stability altogether (internal series bookkeeping)."""
    if extended == "free":
        return True
    if x.is_stable():
        return True
    if extended and isinstance(x, QOCSurface) and not x.cycles:
        return (x.boundaries, x.g, len(x.closed)) in EXTENSION_SHAPES
    return False


class FormalSum(dict):
    """Rational linear combination of basis elements (or pairs of them)."""

    def add(self, key, value=Fraction(1)):
        value = self.get(key, Fraction(0)) + value
        if value:
            self[key] = value
        elif key in self:
            del self[key]


# ---------------------------------------------------------------------------
# basis enumeration


def _cycle_decorations(labels: tuple):
    """All ways to partition a label set into disjoint nonempty cycles."""
    labels = tuple(sorted(labels))
    n = len(labels)
    for perm in itertools.permutations(range(n)):
        seen = [False] * n
        cycles = []
        for start in range(n):
            if seen[start]:
                continue
            cyc = []
            i = start
            while not seen[i]:
                seen[i] = True
                cyc.append(labels[i])
                i = perm[i]
            cycles.append(tuple(cyc))
        yield sort_cycles(cycles)


@lru_cache(maxsize=None)
def _qo_bases(labels: tuple, genus2: int, closed: tuple, kind: str, extended: bool):
    out = []
    for cycles in _cycle_decorations(labels):
        ne = len(cycles)
        if kind == "ass":
            if ne != 1 or len(labels) < 3 or genus2 != 0:
                continue
            out.append(QOSurface(cycles=cycles, empties=0, g=0))
            continue
        budget = genus2 + 2 - 2 * ne - (len(closed) if kind == "qoc" else 0)
        g = 0
        while 4 * g <= budget:
            rem = budget - 4 * g
            if rem % 2 == 0:
                empties = rem // 2
                if kind == "qoc":
                    x = QOCSurface(
                        cycles=cycles, empties=empties, g=g, closed=frozenset(closed)
                    )
                else:
                    x = QOSurface(cycles=cycles, empties=empties, g=g)
                if x.boundaries >= (0 if kind == "qoc" else 1) and is_admissible(
                    x, extended
                ):
                    out.append(x)
            g += 1
    return tuple(sorted(out, key=repr))


def basis(kind: str, labels: Iterable, genus2: int, closed: Iterable = (),
          extended: bool = False) -> tuple:
    """Complete duplicate-free basis of the (kind, corolla) component."""
    labels = tuple(sorted(labels))
    closed = tuple(sorted(closed))
    if kind not in KINDS:
        raise KindMismatch(f"unknown operad kind {kind!r}")
    if kind == "qc":
        x = QCElement(labels=frozenset(labels), genus2=genus2)
        if not x.is_stable():
            raise Unstable(f"corolla ({labels}, {genus2}/2) is unstable")
        if genus2 % 2:
            return ()  # closed surfaces carry integer genus only
        return (x,)
    if kind != "qoc" and closed:
        raise KindMismatch("closed labels only exist for the two-coloured kind")
    if genus2 + len(labels) + len(closed) <= 2 and not extended:
        raise Unstable(f"corolla ({labels}, {closed}, {genus2}/2) is unstable")
    return _qo_bases(labels, genus2, closed, kind, bool(extended))


# ---------------------------------------------------------------------------
# structure maps


def relabel(x, rho: dict, rho_closed: dict | None = None):
    """Functorial relabelling; one map per colour for two-coloured elements."""
    if isinstance(x, QCElement):
        missing = x.labels - set(rho)
        if missing:
            raise MissingLabel(f"relabelling undefined on {sorted(missing)}")
        return QCElement(labels=frozenset(rho[l] for l in x.labels), genus2=x.genus2)
    missing = x.labels - set(rho)
    if missing:
        raise MissingLabel(f"relabelling undefined on {sorted(missing)}")
    cycles = sort_cycles(tuple(tuple(rho[l] for l in c) for c in x.cycles))
    if isinstance(x, QOSurface):
        return QOSurface(cycles=cycles, empties=x.empties, g=x.g)
    rho_closed = rho_closed if rho_closed is not None else rho
    missing = x.closed - set(rho_closed)
    if missing:
        raise MissingLabel(f"closed relabelling undefined on {sorted(missing)}")
    return QOCSurface(
        cycles=cycles, empties=x.empties, g=x.g,
        closed=frozenset(rho_closed[l] for l in x.closed),
    )


def _cycle_with(x, label):
    for c in x.cycles:
        if label in c:
            return c
    raise MissingLabel(f"label {label} not on any boundary of {x}")


def _arc_after(cycle: tuple, label: int) -> tuple:
    k = cycle.index(label)
    return cycle[k + 1 :] + cycle[:k]


def all_labels(x) -> frozenset:
    return open_labels(x) | closed_labels(x)


def _merge_sorted(old_cycles: tuple, new_cycles) -> tuple:
    """Insert freshly produced cycles among already-canonical ones."""
    items = list(old_cycles)
    items.extend(canonicalize_cycle(c) for c in new_cycles)
    items.sort(key=lambda c: (len(c), c))
    return tuple(items)


@lru_cache(maxsize=1 << 20)
def _compose(x, a, y, b, colour, extended):
    if element_kind(x) != element_kind(y):
        raise KindMismatch("cannot compose elements of different kinds")
    if colour == "closed" and not isinstance(x, (QCElement, QOCSurface)):
        raise ColourMismatch("closed gluing needs the two-coloured kind")
    if not (is_admissible(x, extended) and is_admissible(y, extended)):
        raise Unstable("composition of an unstable element")
    if isinstance(x, QCElement):
        if a not in x.labels or b not in y.labels:
            raise MissingLabel("glued label absent")
        if (x.labels - {a}) & (y.labels - {b}):
            raise LabelCollision("factors share labels")
        return QCElement(
            labels=(x.labels - {a}) | (y.labels - {b}), genus2=x.genus2 + y.genus2
        )
    ox, oy = x.labels, y.labels
    cx = x.closed if isinstance(x, QOCSurface) else frozenset()
    cy = y.closed if isinstance(y, QOCSurface) else frozenset()
    if (ox - {a}) & (oy - {b}) or (cx - {a}) & (cy - {b}):
        raise LabelCollision("factors share labels")
    if colour == "open":
        if a not in ox:
            raise (ColourMismatch if a in cx else MissingLabel)(
                f"label {a} is not an open end of the first factor"
            )
        if b not in oy:
            raise (ColourMismatch if b in cy else MissingLabel)(
                f"label {b} is not an open end of the second factor"
            )
        ca = _cycle_with(x, a)
        cb = _cycle_with(y, b)
        merged = _arc_after(ca, a) + _arc_after(cb, b)
        cycles = tuple(c for c in x.cycles if c != ca) + tuple(
            c for c in y.cycles if c != cb
        )
        empties = x.empties + y.empties
        new = ()
        if merged:
            new = (merged,)
        else:
            empties += 1
        if isinstance(x, QOSurface):
            return QOSurface(
                cycles=_merge_sorted(cycles, new), empties=empties, g=x.g + y.g
            )
        return QOCSurface(
            cycles=_merge_sorted(cycles, new), empties=empties, g=x.g + y.g,
            closed=cx | cy,
        )
    if a not in cx:
        raise (ColourMismatch if a in ox else MissingLabel)(
            f"label {a} is not a closed end of the first factor"
        )
    if b not in cy:
        raise (ColourMismatch if b in oy else MissingLabel)(
            f"label {b} is not a closed end of the second factor"
        )
    return QOCSurface(
        cycles=_merge_sorted(x.cycles + y.cycles, ()), empties=x.empties + y.empties,
        g=x.g + y.g, closed=(cx - {a}) | (cy - {b}),
    )


def compose(x, a, y, b, colour: str = "open", extended: bool = False):
    """Glue end a of x to end b of y along the given colour."""
    return _compose(x, a, y, b, colour, extended if extended == "free" else bool(extended))


@lru_cache(maxsize=1 << 20)
def _contract(x, a, b, colour, extended):
    if a == b:
        raise MissingLabel("contraction needs two distinct labels")
    if not is_admissible(x, extended):
        raise Unstable("contraction of an unstable element")
    if isinstance(x, QCElement):
        if not {a, b} <= x.labels:
            raise MissingLabel(f"labels {a},{b} not both present")
        return QCElement(labels=x.labels - {a, b}, genus2=x.genus2 + 2)
    if colour == "closed":
        if not isinstance(x, QOCSurface):
            raise ColourMismatch("closed contraction needs the two-coloured kind")
        if not {a, b} <= x.closed:
            raise (ColourMismatch if {a, b} & x.labels else MissingLabel)(
                f"labels {a},{b} are not both closed ends"
            )
        return QOCSurface(
            cycles=x.cycles, empties=x.empties, g=x.g + 1, closed=x.closed - {a, b}
        )
    lx = x.labels
    for l in (a, b):
        if l not in lx:
            closed = isinstance(x, QOCSurface) and l in x.closed
            raise (ColourMismatch if closed else MissingLabel)(
                f"label {l} is not an open end"
            )
    ca = _cycle_with(x, a)
    if b not in ca:
        cb = _cycle_with(x, b)
        merged = _arc_after(ca, a) + _arc_after(cb, b)
        cycles = tuple(c for c in x.cycles if c != ca and c != cb)
        empties = x.empties
        g = x.g + 1
        new = ()
        if merged:
            new = (merged,)
        else:
            empties += 1
    else:
        word = _arc_after(ca, a)  # (x_1 .. x_m, b, y_1 .. y_k)
        k = word.index(b)
        cycles = tuple(c for c in x.cycles if c != ca)
        empties = x.empties
        g = x.g
        new = tuple(part for part in (word[:k], word[k + 1 :]) if part)
        empties += 2 - len(new)
    if isinstance(x, QOSurface):
        return QOSurface(cycles=_merge_sorted(cycles, new), empties=empties, g=g)
    return QOCSurface(
        cycles=_merge_sorted(cycles, new), empties=empties, g=g, closed=x.closed
    )


def contract(x, a, b, colour: str = "open", extended: bool = False):
    """Glue ends a and b of the same element together."""
    return _contract(x, a, b, colour, extended if extended == "free" else bool(extended))


# ---------------------------------------------------------------------------
# canonical forms on standard label sets


def canonical_perm(x, tie: str = "lex"):
    """Slot permutation carrying x (over open labels [n]) onto its orbit
    representative.

    Returns (representative, perm) with perm in 0-based one-line notation:
    open label l of x becomes label perm[l-1]+1 of the representative.
    ``tie`` fixes the order among cycles of equal length; any admissible
    choice produces a valid canonicalizing permutation.
    """
    if isinstance(x, QCElement):
        return x, tuple(range(len(x.labels)))
    key = (lambda c: (len(c), c)) if tie == "lex" else (
        lambda c: (len(c), tuple(-l for l in c))
    )
    ordered = sorted(x.cycles, key=key)
    n = x.arity
    perm = [0] * n
    pos = 0
    for c in ordered:
        for l in c:
            perm[l - 1] = pos
            pos += 1
    bs = b_sequence(x.cycles, x.empties)
    if isinstance(x, QOSurface):
        rep = QOSurface(cycles=_rep_cycles(bs), empties=bs[0], g=x.g)
    else:
        rep = QOCSurface(
            cycles=_rep_cycles(bs), empties=bs[0], g=x.g,
            closed=frozenset(range(1, len(x.closed) + 1)),
        )
    return rep, tuple(perm)


def _rep_cycles(bseq):
    cycles = []
    nxt = 1
    for k in range(1, len(bseq)):
        for _ in range(bseq[k]):
            cycles.append(tuple(range(nxt, nxt + k)))
            nxt += k
    return tuple(cycles)


def perm_to_label_map(perm, labels=None) -> dict:
    labels = labels if labels is not None else range(1, len(perm) + 1)
    return {l: perm[i] + 1 for i, l in enumerate(sorted(labels))}


def _squash(x):
    """Relabel both colours increasingly onto standard label sets."""
    rho = {l: i + 1 for i, l in enumerate(sorted(open_labels(x)))}
    rho_c = {l: i + 1 for i, l in enumerate(sorted(closed_labels(x)))}
    if isinstance(x, QCElement):
        return relabel(x, rho_c)
    return relabel(x, rho, rho_c)


def natural_contract(x, a: int, b: int, colour: str = "open"):
    """Contract two standard labels and squash back onto standard labels."""
    return _squash(_contract(x, a, b, colour, "free"))


def natural_compose(x, a: int, y, b: int, colour: str = "open"):
    """Compose standard-label elements; x keeps the lower label block."""
    no_x, nc_x = len(open_labels(x)), len(closed_labels(x))
    if isinstance(x, QCElement):
        y2 = relabel(y, {l: l + nc_x for l in y.labels})
        return _squash(_compose(x, a, y2, b + nc_x, "open", "free"))
    rho = {l: l + no_x for l in open_labels(y)}
    rho_c = {l: l + nc_x for l in closed_labels(y)}
    y2 = relabel(y, rho, rho_c)
    shift = no_x if colour == "open" else nc_x
    return _squash(_compose(x, a, y2, b + shift, colour, "free"))


# ---------------------------------------------------------------------------
# dual structure maps: generic pairing path


def fresh_pair(z, colour: str = "open"):
    pool = open_labels(z) if colour == "open" else closed_labels(z)
    if element_kind(z) == "qc":
        pool = z.labels
    m = max(pool, default=0)
    return m + 1, m + 2


def dual_contract(kind, z, a=None, b=None, colour="open", extended=False) -> FormalSum:
    """Adjoint of contraction: the sum of all x with contract(x, a, b) = z."""
    if a is None or b is None:
        a, b = fresh_pair(z, colour)
    out = FormalSum()
    if z.genus2 < 2:
        return out
    lo = sorted(open_labels(z))
    lc = sorted(closed_labels(z))
    if kind == "qc":
        x = QCElement(labels=z.labels | {a, b}, genus2=z.genus2 - 2)
        if x.is_stable() and contract(x, a, b) == z:
            out.add(x)
        return out
    try:
        if colour == "open":
            src = basis(kind, lo + [a, b], z.genus2 - 2, closed=lc, extended=extended)
        else:
            src = basis(kind, lo, z.genus2 - 2, closed=lc + [a, b], extended=extended)
    except Unstable:
        return out
    for x in src:
        if contract(x, a, b, colour=colour, extended=extended) == z:
            out.add(x)
    return out


def _ordered_splits(items):
    items = tuple(items)
    for r in range(len(items) + 1):
        for left in itertools.combinations(items, r):
            ls = set(left)
            yield tuple(left), tuple(i for i in items if i not in ls)


def dual_compose(kind, z, a=None, b=None, colour="open", extended=False) -> FormalSum:
    """Adjoint of composition, summed over ordered splits of the corolla."""
    if a is None or b is None:
        a, b = fresh_pair(z, colour)
    out = FormalSum()
    lo = sorted(open_labels(z)) if kind != "qc" else sorted(z.labels)
    lc = sorted(closed_labels(z)) if kind == "qoc" else []
    closed_splits = list(_ordered_splits(lc)) if kind == "qoc" else [((), ())]
    for o1, o2 in _ordered_splits(lo):
        for c1, c2 in closed_splits:
            for g2a in range(0, z.genus2 + 1):
                g2b = z.genus2 - g2a
                try:
                    if kind == "qc":
                        xs = basis("qc", set(o1) | {a}, g2a)
                        ys = basis("qc", set(o2) | {b}, g2b)
                    elif colour == "open" or kind != "qoc":
                        xs = basis(kind, o1 + (a,), g2a, closed=c1, extended=extended)
                        ys = basis(kind, o2 + (b,), g2b, closed=c2, extended=extended)
                    else:
                        xs = basis(kind, o1, g2a, closed=c1 + (a,), extended=extended)
                        ys = basis(kind, o2, g2b, closed=c2 + (b,), extended=extended)
                except Unstable:
                    continue
                for x in xs:
                    for y in ys:
                        if compose(x, a, y, b, colour=colour, extended=extended) == z:
                            out.add((x, y))
    return out


# ---------------------------------------------------------------------------
# dual structure maps: explicit splitting formulas


def _drop(cycles, *skip):
    s = set(skip)
    return tuple(c for k, c in enumerate(cycles) if k not in s)


def _rebuild(z, cycles, empties, g, closed=None):
    if isinstance(z, QOSurface):
        return QOSurface(cycles=sort_cycles(cycles), empties=empties, g=g)
    return QOCSurface(
        cycles=sort_cycles(cycles), empties=empties, g=g,
        closed=z.closed if closed is None else frozenset(closed),
    )


def dual_contract_formula(kind, z, a=None, b=None, colour="open", extended=False) -> FormalSum:
    """Splitting-family form of the contraction adjoint."""
    if a is None or b is None:
        a, b = fresh_pair(z, colour)
    out = FormalSum()
    if kind == "qc":
        return dual_contract(kind, z, a, b)
    if kind == "qoc" and colour == "closed":
        if z.g >= 1:
            x = QOCSurface(
                cycles=z.cycles, empties=z.empties, g=z.g - 1, closed=z.closed | {a, b}
            )
            if is_admissible(x, extended):
                out.add(x)
        return out
    cyc = list(z.cycles)
    b0, g = z.empties, z.g
    nb = len(cyc)
    # one new cycle through a and b, split back into two nonempty cycles
    for i in range(nb):
        for j in range(nb):
            if i == j:
                continue
            ci, cj = cyc[i], cyc[j]
            for p in range(len(ci)):
                for q in range(len(cj)):
                    merged = (a,) + ci[p:] + ci[:p] + (b,) + cj[q:] + cj[:q]
                    out.add(_rebuild(z, _drop(cyc, i, j) + (merged,), b0, g))
    # one new cycle through a and b, one side splitting off empty
    if b0 > 0:
        for j in range(nb):
            cj = cyc[j]
            for q in range(len(cj)):
                merged = (a, b) + cj[q:] + cj[:q]
                out.add(_rebuild(z, _drop(cyc, j) + (merged,), b0 - 1, g))
        for i in range(nb):
            ci = cyc[i]
            for p in range(len(ci)):
                merged = (a,) + ci[p:] + ci[:p] + (b,)
                out.add(_rebuild(z, _drop(cyc, i) + (merged,), b0 - 1, g))
    if b0 > 1:
        x = _rebuild(z, tuple(cyc) + ((a, b),), b0 - 2, g)
        if is_admissible(x, extended):
            out.add(x)
    # a and b on two cycles that the contraction merges, lowering the genus
    if g > 0:
        for m in range(nb):
            cm = cyc[m]
            L = len(cm)
            for s in range(L):
                word = cm[s:] + cm[:s]
                for l in range(L + 1):
                    ca = (a,) + word[:l]
                    cb = (b,) + word[l:]
                    out.add(_rebuild(z, _drop(cyc, m) + (ca, cb), b0, g - 1))
        if b0 > 0:
            out.add(_rebuild(z, tuple(cyc) + ((a,), (b,)), b0 - 1, g - 1))
    return out


def _make(is_qoc, cycles, empties, g, closed):
    if is_qoc:
        return QOCSurface(
            cycles=sort_cycles(cycles), empties=empties, g=g, closed=frozenset(closed)
        )
    return QOSurface(cycles=sort_cycles(cycles), empties=empties, g=g)


def _subsets(items):
    items = tuple(items)
    for r in range(len(items) + 1):
        yield from itertools.combinations(items, r)


def dual_compose_formula(kind, z, a=None, b=None, colour="open", extended=False) -> FormalSum:
    """Splitting-family form of the composition adjoint (ordered pairs)."""
    if a is None or b is None:
        a, b = fresh_pair(z, colour)
    out = FormalSum()
    if kind == "qc":
        for c1, c2 in _ordered_splits(sorted(z.labels)):
            for g2a in range(0, z.genus2 + 1, 2):
                x = QCElement(labels=frozenset(c1) | {a}, genus2=g2a)
                y = QCElement(labels=frozenset(c2) | {b}, genus2=z.genus2 - g2a)
                if x.is_stable() and y.is_stable():
                    out.add((x, y))
        return out
    cyc = list(z.cycles)
    b0, g = z.empties, z.g
    nb = len(cyc)
    is_qoc = kind == "qoc"
    closed_splits = (
        list(_ordered_splits(sorted(z.closed))) if is_qoc else [((), ())]
    )
    if is_qoc and colour == "closed":
        for idx1 in _subsets(range(nb)):
            set1 = set(idx1)
            cy1 = tuple(cyc[k] for k in idx1)
            cy2 = tuple(cyc[k] for k in range(nb) if k not in set1)
            for e in range(b0 + 1):
                for g1 in range(g + 1):
                    for c1, c2 in closed_splits:
                        x = _make(True, cy1, e, g1, frozenset(c1) | {a})
                        y = _make(True, cy2, b0 - e, g - g1, frozenset(c2) | {b})
                        if is_admissible(x, extended) and is_admissible(y, extended):
                            out.add((x, y))
        return out
    for m in range(nb):
        cm = cyc[m]
        L = len(cm)
        others = [k for k in range(nb) if k != m]
        for idx1 in _subsets(others):
            set1 = set(idx1)
            cy1 = tuple(cyc[k] for k in idx1)
            cy2 = tuple(cyc[k] for k in others if k not in set1)
            for e in range(b0 + 1):
                for g1 in range(g + 1):
                    for s in range(L):
                        word = cm[s:] + cm[:s]
                        for l in range(L + 1):
                            ca = (a,) + word[:l]
                            cb = (b,) + word[l:]
                            for c1, c2 in closed_splits:
                                x = _make(is_qoc, cy1 + (ca,), e, g1, c1)
                                y = _make(is_qoc, cy2 + (cb,), b0 - e, g - g1, c2)
                                if is_admissible(x, extended) and is_admissible(
                                    y, extended
                                ):
                                    out.add((x, y))
    if b0 > 0:
        for idx1 in _subsets(range(nb)):
            set1 = set(idx1)
            cy1 = tuple(cyc[k] for k in idx1)
            cy2 = tuple(cyc[k] for k in range(nb) if k not in set1)
            for e in range(b0):
                for g1 in range(g + 1):
                    for c1, c2 in closed_splits:
                        x = _make(is_qoc, cy1 + ((a,),), e, g1, c1)
                        y = _make(is_qoc, cy2 + ((b,),), b0 - 1 - e, g - g1, c2)
                        if is_admissible(x, extended) and is_admissible(y, extended):
                            out.add((x, y))
    return out
