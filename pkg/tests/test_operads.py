"""Bases, structure maps, duals and the axiom verifier."""
import math

import pytest

from operad_forge import operads as op
from operad_forge.axioms import verify_axioms
from operad_forge.errors import (
    ColourMismatch,
    LabelCollision,
    MissingLabel,
    Unstable,
)


class TestBasis:
    def test_qc_single_element(self):
        els = op.basis("qc", (1, 2, 3), 2)
        assert els == (op.qc_element((1, 2, 3), 2),)

    def test_qo_three_points_genus_zero(self):
        els = op.basis("qo", (1, 2, 3), 0)
        assert set(els) == {
            op.qo_surface([(1, 2, 3)]), op.qo_surface([(1, 3, 2)]),
        }

    def test_empty_labels_unstable(self):
        with pytest.raises(Unstable):
            op.basis("qo", (), 2)
        els = op.basis("qo", (), 4)
        assert els and all(4 * x.g + 2 * x.boundaries > 4 for x in els)

    @pytest.mark.parametrize("n", [3, 4, 5, 6])
    def test_ass_dimension(self, n):
        assert len(op.basis("ass", range(1, n + 1), 0)) == math.factorial(n - 1)

    def test_qoc_extension_flag(self):
        with pytest.raises(Unstable):
            op.basis("qoc", (), 1, closed=(1,))
        els = op.basis("qoc", (), 1, closed=(1,), extended=True)
        assert els == (op.qoc_surface((), empties=1, g=0, closed=(1,)),)
        els2 = op.basis("qoc", (), 2, closed=(), extended=True)
        assert els2 == (op.qoc_surface((), empties=2, g=0),)
        # the genus-one surface with no ends stays excluded
        assert all(x.g == 0 for x in els2)


class TestRelabel:
    def test_identity(self):
        x = op.qo_surface([(1, 2), (3,)], 1, 1)
        assert op.relabel(x, {1: 1, 2: 2, 3: 3}) == x

    def test_swap_on_pair_invariant(self):
        x = op.qo_surface([(1, 2)], 0, 1)
        assert op.relabel(x, {1: 2, 2: 1}) == x

    def test_three_cycle(self):
        x = op.qo_surface([(1, 2, 3)])
        assert op.relabel(x, {1: 1, 2: 3, 3: 2}) == op.qo_surface([(1, 3, 2)])

    def test_functorial(self):
        x = op.qo_surface([(1, 2, 3), (4,)], 0, 0)
        rho = {1: 3, 2: 1, 3: 4, 4: 2}
        sig = {1: 2, 2: 3, 3: 4, 4: 1}
        comp = {l: rho[sig[l]] for l in sig}
        assert op.relabel(x, comp) == op.relabel(op.relabel(x, sig), rho)


class TestCompose:
    def test_qo_splice(self):
        x = op.qo_surface([(8, 1, 2)])
        y = op.qo_surface([(9, 3, 4)])
        assert op.compose(x, 8, y, 9) == op.qo_surface([(1, 2, 3, 4)])

    def test_qc_genus_addition(self):
        x = op.qc_element((1, 8), 2)
        y = op.qc_element((9, 2, 3), 4)
        assert op.compose(x, 8, y, 9) == op.qc_element((1, 2, 3), 6)

    def test_qoc_closed_gluing(self):
        x = op.qoc_surface([(1,)], closed=(10,))
        y = op.qoc_surface([(2,)], closed=(11, 4))
        got = op.compose(x, 10, y, 11, colour="closed")
        assert got == op.qoc_surface([(1,), (2,)], closed=(4,))
        assert got.genus2 == 2 * 0 + 2 * 2 + 1 - 2

    def test_colour_mismatch(self):
        x = op.qoc_surface([(1,)], closed=(2,))
        y = op.qoc_surface([(3,)], closed=(4,))
        with pytest.raises(ColourMismatch):
            op.compose(x, 2, y, 3, colour="open")

    def test_label_collision(self):
        x = op.qo_surface([(1, 2)], 0, 1)
        y = op.qo_surface([(2, 3)], 0, 1)
        with pytest.raises(LabelCollision):
            op.compose(x, 1, y, 3)


class TestContract:
    def test_two_points_merge_to_empty(self):
        x = op.qo_surface([(1,), (2,)], 0, 1)
        got = op.contract(x, 1, 2)
        assert got == op.qo_surface([], empties=1, g=2)

    def test_pair_splits_to_two_empties(self):
        x = op.qo_surface([(1, 2)], 0, 1)
        got = op.contract(x, 1, 2)
        assert got == op.qo_surface([], empties=2, g=1)

    def test_split_within_cycle(self):
        x = op.qo_surface([(5, 1, 6, 2)])
        assert op.contract(x, 5, 6) == op.qo_surface([(1,), (2,)])

    def test_missing_label(self):
        with pytest.raises(MissingLabel):
            op.contract(op.qo_surface([(1, 2, 3)]), 1, 9)


class TestDuals:
    def test_qc_contract_single_term(self):
        z = op.qc_element((1, 2), 4)
        d = op.dual_contract("qc", z, a=3, b=4)
        assert d == {op.qc_element((1, 2, 3, 4), 2): 1}

    def test_no_preimage_below_genus(self):
        z = op.qo_surface([(1, 2, 3)])
        assert op.dual_contract("qo", z) == {}

    def test_qo_contract_matches_listing(self):
        z = op.qo_surface([], empties=1, g=1)  # one empty boundary, genus one
        d = op.dual_contract("qo", z, a=1, b=2)
        # two glued points merge into the empty boundary, raising the genus
        assert d == {op.qo_surface([(1,), (2,)], 0, 0): 1}
        # a glued pair on one cycle splits into two empty boundaries instead
        z2 = op.qo_surface([], empties=2, g=1)
        d2 = op.dual_contract("qo", z2, a=1, b=2)
        assert op.qo_surface([(1, 2)], 0, 1) in d2

    def test_ass_four_splits(self):
        z = op.qo_surface([(1, 2, 3, 4)])
        d = op.dual_compose_formula("ass", z, a=8, b=9)
        assert len(d) == 4
        assert all(len(x.cycles[0]) == 3 for x, _ in d)

    def test_ass_below_four_vanishes(self):
        z = op.qo_surface([(1, 2, 3)])
        assert op.dual_compose_formula("ass", z, a=8, b=9) == {}

    def test_qc_compose_stability_filter(self):
        z = op.qc_element((1, 2), 4)
        d = op.dual_compose("qc", z, a=3, b=4)
        for x, y in d:
            assert x.is_stable() and y.is_stable()
        assert d == op.dual_compose_formula("qc", z, a=3, b=4)

    @pytest.mark.parametrize("kind,n,g2", [
        ("qo", 2, 4), ("qo", 3, 2), ("qo", 4, 2), ("qc", 3, 4), ("ass", 5, 0),
    ])
    def test_formula_matches_pairing_oracle(self, kind, n, g2):
        for z in op.basis(kind, range(1, n + 1), g2):
            assert op.dual_contract(kind, z) == op.dual_contract_formula(kind, z)
            assert op.dual_compose(kind, z) == op.dual_compose_formula(kind, z)

    @pytest.mark.parametrize("o,c,g2", [(1, 1, 2), (2, 1, 1), (0, 2, 2), (1, 2, 1)])
    def test_qoc_formula_matches_oracle(self, o, c, g2):
        for z in op.basis("qoc", range(1, o + 1), g2, closed=range(1, c + 1)):
            for colour in ("open", "closed"):
                assert op.dual_contract("qoc", z, colour=colour) == \
                    op.dual_contract_formula("qoc", z, colour=colour)
                assert op.dual_compose("qoc", z, colour=colour) == \
                    op.dual_compose_formula("qoc", z, colour=colour)

    def test_adjunction_against_structure_maps(self):
        """The coefficient of z in the contraction of x equals the
        coefficient of x in the contraction adjoint of z."""
        for g2 in (2, 4):
            for z in op.basis("qo", (1, 2), g2):
                pre = op.dual_contract("qo", z, a=3, b=4)
                for x in op.basis("qo", (1, 2, 3, 4), g2 - 2):
                    expected = 1 if op.contract(x, 3, 4) == z else 0
                    assert pre.get(x, 0) == expected


class TestAxiomVerifier:
    def test_small_bounds_pass(self):
        for kind, n, g2 in [("qc", 4, 4), ("qo", 3, 4), ("qoc", 2, 3)]:
            report = verify_axioms(kind, n, g2)
            assert report.passed, report.failures[:3]
            assert report.checked > 0

    def test_extension_bounds_pass(self):
        report = verify_axioms("qoc", 2, 3, extended=True)
        assert report.passed, report.failures[:3]

    def test_detects_broken_composition(self, monkeypatch):
        """A deliberately wrong gluing must surface as failures."""
        real = op._compose.__wrapped__

        def broken(x, a, y, b, colour, extended):
            z = real(x, a, y, b, colour, extended)
            if isinstance(z, op.QOSurface) and a < b:
                return op.QOSurface(cycles=z.cycles, empties=z.empties, g=z.g + 1)
            return z

        monkeypatch.setattr(op, "_compose", broken)
        report = verify_axioms("qo", 2, 4)
        assert not report.passed
