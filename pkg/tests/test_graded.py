"""Spaces, functionals, slot assignments and the differential."""
import itertools
import json
import random
from fractions import Fraction as Fr

import pytest

from operad_forge import graded as G


def two_dim(omega=None, degrees=(0, 1), diff=None):
    omega = omega or [[0, 1], [-1, 0]]
    diff = diff or [[0, 0], [0, 0]]
    return G.GradedSymplecticSpace(
        basis_names=("a", "b"), degrees=degrees, differential=diff, omega=omega
    )


class TestValidateSpace:
    def test_canonical_pair_is_valid(self):
        assert G.validate_space(two_dim()) == []

    def test_omega_degree_violation(self):
        space = two_dim(omega=[[0, 1], [-1, 0]], degrees=(0, 0))
        assert any("degree of omega" in v for v in G.validate_space(space))

    def test_differential_squares(self):
        space = two_dim(degrees=(0, 1), diff=[[0, 0], [1, 0]])
        assert G.validate_space(space) == []
        bad = G.GradedSymplecticSpace(
            basis_names=("a", "b", "c", "d"), degrees=(0, 1, 1, 2),
            differential=[[0, 0, 0, 0], [1, 0, 0, 0], [1, 0, 0, 0], [0, 1, 1, 0]],
            omega=[[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, 1], [0, 0, -1, 0]],
        )
        assert any("squares to zero" in v for v in G.validate_space(bad))

    def test_singular_omega(self):
        space = two_dim(omega=[[0, 0], [0, 0]])
        assert any("singular" in v for v in G.validate_space(space))


class TestContractionPair:
    def test_canonical_pair(self):
        pair = G.contraction_pair(two_dim())
        # the partner of the first vector is the second and conversely
        assert pair.coefficients == ((Fr(0), Fr(1)), (Fr(1), Fr(0)))

    def test_permuted_basis_covariance(self):
        space = G.GradedSymplecticSpace(
            basis_names=("b", "a"), degrees=(1, 0),
            differential=[[0, 0], [0, 0]], omega=[[0, -1], [1, 0]],
        )
        pair = G.contraction_pair(space)
        assert pair.coefficients == ((Fr(0), Fr(1)), (Fr(1), Fr(0)))

    def test_blockwise(self):
        space = G.canonical_space(4)
        pair = G.contraction_pair(space)
        for i in range(4):
            for j in range(4):
                if i // 2 != j // 2:
                    assert pair.coefficients[i][j] == 0

    def test_singular(self):
        with pytest.raises(G.SingularOmega):
            G.contraction_pair(two_dim(omega=[[0, 0], [0, 0]]))

    @pytest.mark.parametrize("space", [
        two_dim(), G.canonical_space(4, with_differential=True),
        G.rich_space(2), G.rich_space(4, with_differential=True),
    ])
    def test_pairing_identity(self, space):
        assert G.pairing_identity_check(space)


class TestEvalViaIota:
    def setup_method(self):
        self.space = two_dim()
        self.f = G.MultiFunctional(
            space=self.space, labels=(3, 7),
            entries={(0, 1): Fr(5), (1, 0): Fr(2), (1, 1): Fr(3)}, degree=None,
        )

    def test_identity_assignment(self):
        psi = {3: 1, 7: 2}
        assert G.eval_via_iota(self.f, psi, (0, 1)) == 5

    def test_odd_transposition(self):
        psi = {3: 2, 7: 1}
        # both slots odd: the swap contributes a minus sign
        assert G.eval_via_iota(self.f, psi, (1, 1)) == -3
        # even past odd keeps the value (on the swapped word)
        assert G.eval_via_iota(self.f, psi, (0, 1)) == 2

    def test_bad_assignment(self):
        with pytest.raises(G.LabelMismatch):
            G.eval_via_iota(self.f, {3: 1, 8: 2}, (0, 0))

    def test_quotient_relation(self):
        """Evaluating through psi agrees with evaluating through tau o psi
        after acting by tau on the arguments."""
        from operad_forge._kernels import apply_perm_to_word, koszul_sign

        rng = random.Random(3)
        space = G.rich_space(4)
        f = G.random_functional(rng, space, (1, 2, 3), degree=0)
        psi = {1: 2, 2: 3, 3: 1}
        for tau in itertools.permutations(range(3)):
            taupsi = {l: tau[psi[l] - 1] + 1 for l in psi}
            for w in itertools.product(range(4), repeat=3):
                degs = tuple(space.degrees[k] for k in w)
                lhs = G.eval_via_iota(f, psi, w)
                rhs = koszul_sign(tau, degs) * G.eval_via_iota(
                    f, taupsi, apply_perm_to_word(tau, w)
                )
                assert lhs == rhs


class TestFunctionalDifferential:
    def test_zero_differential(self):
        f = G.MultiFunctional(space=two_dim(), labels=(1,), entries={(0,): Fr(1)},
                              degree=0)
        assert G.functional_differential(f).is_zero()

    def test_rank_one_expansion(self):
        space = two_dim(diff=[[0, 0], [1, 0]])
        # f = dual of the second vector, degree -1
        f = G.MultiFunctional(space=space, labels=(1,), entries={(1,): Fr(1)},
                              degree=-1)
        df = G.functional_differential(f)
        # (-1)^{|f|} picks up the single matrix entry
        assert df.entries == {(0,): Fr(-1)}
        assert df.degree == 0

    @pytest.mark.parametrize("dim", [2, 4])
    def test_squares_to_zero(self, dim):
        rng = random.Random(11)
        space = G.rich_space(dim, with_differential=(dim == 4))
        for _ in range(10):
            n = rng.randint(1, 4)
            f = G.random_functional(rng, space, range(1, n + 1),
                                    degree=rng.choice([-1, 0, 1]))
            ddf = G.functional_differential(G.functional_differential(f))
            assert ddf.is_zero()


class TestSpaceJson:
    def test_round_trip(self):
        space = G.rich_space(4, with_differential=True)
        doc = G.space_to_json(space)
        text = json.dumps(doc)
        assert G.space_from_json(json.loads(text)) == space

    def test_rational_strings(self):
        assert G.parse_rational("3/4") == Fr(3, 4)
        assert G.format_rational(Fr(-5, 3)) == "-5/3"
        assert G.format_rational(Fr(4, 2)) == "2"
