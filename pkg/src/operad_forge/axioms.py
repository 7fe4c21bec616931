"""Exhaustive verification of the structure-map axioms for the surface operads.

Every axiom is checked on all basis elements within the requested arity and
genus bounds, over all admissible gluing-label choices.  Relabelling maps in
the equivariance axioms (3 and 4) run over transposition generators plus the
identity; functoriality (axiom 2) is checked on all pairs of permutations,
so equivariance for generators implies it for the whole group.
"""
from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import operads as op
from .errors import Unstable

__all__ = ["AxiomReport", "verify_axioms", "thread_count"]


def thread_count(default: int = 1) -> int:
    raw = os.environ.get("OPERAD_FORGE_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return default


@dataclass
class AxiomReport:
    kind: str
    max_n: int
    max_genus2: int
    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def record(self, axiom, instance, lhs, rhs):
        self.checked += 1
        if lhs != rhs:
            self.fail(axiom, instance, lhs, rhs)

    def fail(self, axiom, instance, lhs, rhs):
        self.failures.append(
            {
                "axiom": axiom,
                "instance": str(instance),
                "lhs": repr(lhs),
                "rhs": repr(rhs),
            }
        )

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "max_n": self.max_n,
            "max_genus2": self.max_genus2,
            "checked": self.checked,
            "passed": self.passed,
            "failures": sorted(
                self.failures, key=lambda f: (f["axiom"], f["instance"])
            ),
        }


def _corollas(kind, max_n, max_genus2, extended):
    out = []
    if kind == "qoc":
        for o in range(0, max_n + 1):
            for c in range(0, max_n + 1 - o):
                for g2 in range(0, max_genus2 + 1):
                    try:
                        op.basis("qoc", range(1, o + 1), g2,
                                 closed=range(1, c + 1), extended=extended)
                    except Unstable:
                        continue
                    out.append((o, c, g2))
        return out
    for n in range(0, max_n + 1):
        for g2 in range(0, max_genus2 + 1, 2):
            if kind == "ass" and g2 > 0:
                continue
            try:
                op.basis(kind, range(1, n + 1), g2)
            except Unstable:
                continue
            out.append((n, 0, g2))
    return out


def _basis(kind, shape, extended, offset_o=0, offset_c=0):
    o, c, g2 = shape
    return op.basis(
        kind,
        range(offset_o + 1, offset_o + o + 1),
        g2,
        closed=range(offset_c + 1, offset_c + c + 1) if kind == "qoc" else (),
        extended=extended,
    )


def _colours(kind):
    return ("open", "closed") if kind == "qoc" else ("open",)


def _ends(x, colour):
    if isinstance(x, op.QCElement):
        return sorted(x.labels)
    if colour == "open":
        return sorted(op.open_labels(x))
    return sorted(op.closed_labels(x))


def _transposition_maps(labels):
    labels = sorted(labels)
    maps = [{l: l for l in labels}]
    for i, j in itertools.combinations(labels, 2):
        m = {l: l for l in labels}
        m[i], m[j] = j, i
        maps.append(m)
    return maps


def _perm_maps(labels):
    labels = sorted(labels)
    return [dict(zip(labels, p)) for p in itertools.permutations(labels)]


def _generator_maps(kind, x):
    """Pairs (open map, closed map) generating the relabelling group."""
    if kind == "qoc":
        out = []
        ids_c = {l: l for l in op.closed_labels(x)}
        ids_o = {l: l for l in op.open_labels(x)}
        for m in _transposition_maps(op.open_labels(x)):
            out.append((m, ids_c))
        for m in _transposition_maps(op.closed_labels(x)):
            if m != ids_c:
                out.append((ids_o, m))
        return out
    return [(m, {}) for m in _transposition_maps(x.labels)]


def _relabel(kind, x, rho_o, rho_c):
    if kind == "qoc":
        return op.relabel(x, rho_o, rho_c)
    return op.relabel(x, rho_o)


def _free_map(kind, rho_o, rho_c, colour, *drop):
    """Combined relabelling restricted away from the glued labels."""
    o = dict(rho_o)
    c = dict(rho_c)
    target = o if (colour == "open" or kind != "qoc") else c
    for l in drop:
        target.pop(l, None)
    return o, c


def verify_axioms(kind, max_n, max_genus2, extended=False, threads=None) -> AxiomReport:
    """Check axioms 1-8 exhaustively within the bounds; report all failures."""
    report = AxiomReport(kind=kind, max_n=max_n, max_genus2=max_genus2)
    corollas = _corollas(kind, max_n, max_genus2, extended)
    ctx = (kind, corollas, max_n, max_genus2, extended)
    tasks = [(fn, ctx) for fn in _AXIOM_FUNCS.values()]
    threads = threads if threads is not None else thread_count()
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            partials = list(pool.map(_run_task, tasks))
    else:
        partials = [_run_task(t) for t in tasks]
    for checked, failures in partials:
        report.checked += checked
        report.failures.extend(failures)
    report.failures.sort(key=lambda f: (f["axiom"], f["instance"]))
    return report


def _run_task(task):
    fn, ctx = task
    sub = AxiomReport(kind=ctx[0], max_n=ctx[2], max_genus2=ctx[3])
    fn(sub, *ctx)
    return sub.checked, sub.failures


def _pairs(corollas, max_n, max_genus2, extra_genus2=0):
    for s1, s2 in itertools.product(corollas, repeat=2):
        if s1[2] + s2[2] + extra_genus2 > max_genus2:
            continue
        if s1[0] + s1[1] + s2[0] + s2[1] - 2 > max_n:
            continue
        yield s1, s2


def _ax1(report, kind, corollas, max_n, max_genus2, extended):
    """Gluing is symmetric in its two factors."""
    for s1, s2 in _pairs(corollas, max_n, max_genus2):
        xs = _basis(kind, s1, extended)
        ys = _basis(kind, s2, extended, offset_o=s1[0], offset_c=s1[1])
        for colour in _colours(kind):
            for x, y in itertools.product(xs, ys):
                for a in _ends(x, colour):
                    for b in _ends(y, colour):
                        lhs = op._compose(x, a, y, b, colour, extended)
                        rhs = op._compose(y, b, x, a, colour, extended)
                        report.checked += 1
                        if lhs != rhs:
                            report.fail(1, (x, a, y, b, colour), lhs, rhs)


def _ax2(report, kind, corollas, max_n, max_genus2, extended):
    """Relabelling is functorial."""
    for shape in corollas:
        for x in _basis(kind, shape, extended):
            lo = sorted(x.labels) if kind != "qoc" else sorted(op.open_labels(x))
            lc = sorted(op.closed_labels(x)) if kind == "qoc" else []
            for rho_o, sig_o in itertools.product(_perm_maps(lo), repeat=2):
                maps_c = _perm_maps(lc) if kind == "qoc" else [{}]
                for rho_c, sig_c in itertools.product(maps_c, repeat=2):
                    comp_o = {l: rho_o[sig_o[l]] for l in lo}
                    comp_c = {l: rho_c[sig_c[l]] for l in lc}
                    lhs = _relabel(kind, x, comp_o, comp_c)
                    rhs = _relabel(kind, _relabel(kind, x, sig_o, sig_c), rho_o, rho_c)
                    report.record(2, (x, rho_o, sig_o, rho_c, sig_c), lhs, rhs)


def _ax3(report, kind, corollas, max_n, max_genus2, extended):
    """Gluing is equivariant."""
    for s1, s2 in _pairs(corollas, max_n, max_genus2):
        xs = _basis(kind, s1, extended)
        ys = _basis(kind, s2, extended, offset_o=s1[0], offset_c=s1[1])
        for colour in _colours(kind):
            for x, y in itertools.product(xs, ys):
                gens_x = _generator_maps(kind, x)
                gens_y = _generator_maps(kind, y)
                for a in _ends(x, colour):
                    for b in _ends(y, colour):
                        z = op.compose(x, a, y, b, colour=colour, extended=extended)
                        for rho_o, rho_c in gens_x:
                            for sig_o, sig_c in gens_y:
                                look_x = rho_o if (colour == "open" or kind != "qoc") else rho_c
                                look_y = sig_o if (colour == "open" or kind != "qoc") else sig_c
                                ro, rc = _free_map(kind, rho_o, rho_c, colour, a)
                                so, sc = _free_map(kind, sig_o, sig_c, colour, b)
                                lhs = _relabel(kind, z, {**ro, **so}, {**rc, **sc})
                                rhs = op.compose(
                                    _relabel(kind, x, rho_o, rho_c), look_x[a],
                                    _relabel(kind, y, sig_o, sig_c), look_y[b],
                                    colour=colour, extended=extended,
                                )
                                report.record(3, (x, a, y, b, colour), lhs, rhs)


def _ax4(report, kind, corollas, max_n, max_genus2, extended):
    """Contraction is equivariant."""
    for shape in corollas:
        if shape[2] + 2 > max_genus2:
            continue
        for x in _basis(kind, shape, extended):
            gens = _generator_maps(kind, x)
            for colour in _colours(kind):
                for a, b in itertools.combinations(_ends(x, colour), 2):
                    z = op.contract(x, a, b, colour=colour, extended=extended)
                    for rho_o, rho_c in gens:
                        look = rho_o if (colour == "open" or kind != "qoc") else rho_c
                        ro, rc = _free_map(kind, rho_o, rho_c, colour, a, b)
                        lhs = _relabel(kind, z, ro, rc)
                        rhs = op.contract(
                            _relabel(kind, x, rho_o, rho_c), look[a], look[b],
                            colour=colour, extended=extended,
                        )
                        report.record(4, (x, a, b, colour), lhs, rhs)


def _ax5(report, kind, corollas, max_n, max_genus2, extended):
    """Contractions commute."""
    for shape in corollas:
        if shape[2] + 4 > max_genus2:
            continue
        for x in _basis(kind, shape, extended):
            for col1, col2 in itertools.product(_colours(kind), repeat=2):
                for a, b in itertools.combinations(_ends(x, col1), 2):
                    for c, d in itertools.combinations(_ends(x, col2), 2):
                        if col1 == col2 and ({a, b} & {c, d} or (a, b) >= (c, d)):
                            continue
                        lhs = op.contract(
                            op.contract(x, c, d, colour=col2, extended=extended),
                            a, b, colour=col1, extended=extended,
                        )
                        rhs = op.contract(
                            op.contract(x, a, b, colour=col1, extended=extended),
                            c, d, colour=col2, extended=extended,
                        )
                        report.record(5, (x, a, b, c, d, col1, col2), lhs, rhs)


def _ax6(report, kind, corollas, max_n, max_genus2, extended):
    """Contracting across a gluing agrees in either order."""
    for s1, s2 in _pairs(corollas, max_n, max_genus2, extra_genus2=2):
        xs = _basis(kind, s1, extended)
        ys = _basis(kind, s2, extended, offset_o=s1[0], offset_c=s1[1])
        for col_ab, col_cd in itertools.product(_colours(kind), repeat=2):
            for x, y in itertools.product(xs, ys):
                for a in _ends(x, col_ab):
                    for c in _ends(x, col_cd):
                        if col_ab == col_cd and c == a:
                            continue
                        for b in _ends(y, col_ab):
                            for d in _ends(y, col_cd):
                                if col_ab == col_cd and d == b:
                                    continue
                                lhs = op._contract(
                                    op._compose(x, c, y, d, col_cd, extended),
                                    a, b, col_ab, extended,
                                )
                                rhs = op._contract(
                                    op._compose(x, a, y, b, col_ab, extended),
                                    c, d, col_cd, extended,
                                )
                                report.checked += 1
                                if lhs != rhs:
                                    report.fail(
                                        6, (x, y, a, b, c, d, col_ab, col_cd), lhs, rhs
                                    )


def _ax7(report, kind, corollas, max_n, max_genus2, extended):
    """Gluing commutes with a contraction inside one factor."""
    for s1, s2 in _pairs(corollas, max_n, max_genus2, extra_genus2=2):
        xs = _basis(kind, s1, extended)
        ys = _basis(kind, s2, extended, offset_o=s1[0], offset_c=s1[1])
        for col_ab, col_cd in itertools.product(_colours(kind), repeat=2):
            for x, y in itertools.product(xs, ys):
                for c, d in itertools.combinations(_ends(x, col_cd), 2):
                    for a in _ends(x, col_ab):
                        if col_ab == col_cd and a in (c, d):
                            continue
                        for b in _ends(y, col_ab):
                            lhs = op._compose(
                                op._contract(x, c, d, col_cd, extended),
                                a, y, b, col_ab, extended,
                            )
                            rhs = op._contract(
                                op._compose(x, a, y, b, col_ab, extended),
                                c, d, col_cd, extended,
                            )
                            report.checked += 1
                            if lhs != rhs:
                                report.fail(
                                    7, (x, y, a, b, c, d, col_ab, col_cd), lhs, rhs
                                )


def _ax8(report, kind, corollas, max_n, max_genus2, extended):
    """Gluing is associative."""
    for s1, s2 in _pairs(corollas, max_n, max_genus2):
        for s3 in corollas:
            if s1[2] + s2[2] + s3[2] > max_genus2:
                continue
            if sum(s[0] + s[1] for s in (s1, s2, s3)) - 4 > max_n:
                continue
            xs = _basis(kind, s1, extended)
            ys = _basis(kind, s2, extended, offset_o=s1[0], offset_c=s1[1])
            zs = _basis(
                kind, s3, extended, offset_o=s1[0] + s2[0], offset_c=s1[1] + s2[1]
            )
            for col_ab, col_cd in itertools.product(_colours(kind), repeat=2):
                for x, y, z in itertools.product(xs, ys, zs):
                    for a in _ends(x, col_ab):
                        for b in _ends(y, col_ab):
                            xy = op._compose(x, a, y, b, col_ab, extended)
                            for c in _ends(y, col_cd):
                                if col_ab == col_cd and c == b:
                                    continue
                                for d in _ends(z, col_cd):
                                    lhs = op._compose(
                                        x, a,
                                        op._compose(y, c, z, d, col_cd, extended),
                                        b, col_ab, extended,
                                    )
                                    rhs = op._compose(xy, c, z, d, col_cd, extended)
                                    report.checked += 1
                                    if lhs != rhs:
                                        report.fail(
                                            8, (x, y, z, a, b, c, d, col_ab, col_cd),
                                            lhs, rhs,
                                        )


_AXIOM_FUNCS = {
    1: _ax1,
    2: _ax2,
    3: _ax3,
    4: _ax4,
    5: _ax5,
    6: _ax6,
    7: _ax7,
    8: _ax8,
}
