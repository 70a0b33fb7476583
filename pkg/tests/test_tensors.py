import pytest
from hypothesis import given, strategies as st

from nilkaehler import linalg
from nilkaehler.liealg import LieAlgebra, Vector, center, descending_series, in_subspace
from nilkaehler.scalar import ParamBinding, Scalar, as_scalar
from nilkaehler.tensors import (
    Endomorphism,
    ThreeForm,
    TwoForm,
    almost_complex_residual,
    compat_residual,
    exterior_d,
    is_abelian_J,
    is_closed,
    is_compatible,
    is_integrable,
    is_nilpotent_J,
    j_ascending_series,
    nijenhuis,
    nondegenerate,
)

G21 = LieAlgebra.from_terms(6, [(1, 2, 4, 1), (1, 4, 6, 1), (2, 3, 6, 1)])
G24 = LieAlgebra.from_terms(6, [(1, 4, 6, 1), (2, 3, 5, 1)])
G16 = LieAlgebra.from_terms(
    6, [(1, 3, 5, 1), (1, 4, 6, 1), (2, 3, 6, -1), (2, 4, 5, 1)]
)
ABELIAN = LieAlgebra(6, {})

W2_G21 = TwoForm.from_terms(6, [(1, 6, 1), (2, 5, 1), (3, 4, -1)])
W1_G16 = TwoForm.from_terms(6, [(1, 6, 1), (2, 5, -1), (3, 4, 1)])
W2_G16 = TwoForm.from_terms(6, [(1, 6, 1), (2, 5, 1), (3, 4, -1)])
W_STD = TwoForm.from_terms(6, [(1, 2, 1), (3, 4, 1), (5, 6, 1)])

# canonical structure on g21: J(e2) = -a e1, J(e4) = a e3, J(e6) = a e5,
# the rest forced by J^2 = -I
J21_CANON = Endomorphism([
    ["0", "1/a", "0", "0", "0", "0"],
    ["-a", "0", "0", "0", "0", "0"],
    ["0", "0", "0", "-1/a", "0", "0"],
    ["0", "0", "a", "0", "0", "0"],
    ["0", "0", "0", "0", "0", "-1/a"],
    ["0", "0", "0", "0", "a", "0"],
])

J0_G16 = Endomorphism([
    [0, -1, 0, 0, 0, 0],
    [1, 0, 0, 0, 0, 0],
    [0, 0, 0, 1, 0, 0],
    [0, 0, -1, 0, 0, 0],
    [0, 0, 0, 0, 0, 1],
    [0, 0, 0, 0, -1, 0],
])

J_NAIVE = Endomorphism([
    [0, 1, 0, 0, 0, 0],
    [-1, 0, 0, 0, 0, 0],
    [0, 0, 0, 1, 0, 0],
    [0, 0, -1, 0, 0, 0],
    [0, 0, 0, 0, 0, 1],
    [0, 0, 0, 0, -1, 0],
])


class TestTwoForm:
    def test_rejects_non_antisymmetric(self):
        with pytest.raises(ValueError, match="antisymmetric"):
            TwoForm([[0, 1], [1, 0]])

    def test_from_terms_reversed_pair(self):
        w = TwoForm.from_terms(3, [(2, 1, 5)])
        assert w.entry(0, 1) == Scalar.from_int(-5)
        assert w.entry(1, 0) == Scalar.from_int(5)

    def test_from_terms_rejects_duplicates(self):
        with pytest.raises(ValueError, match="duplicate"):
            TwoForm.from_terms(3, [(1, 2, 1), (2, 1, 1)])

    def test_json_round_trip(self):
        blob = W2_G21.to_json_dict()
        assert blob["terms"] == [
            {"i": 1, "j": 6, "c": "1"},
            {"i": 2, "j": 5, "c": "1"},
            {"i": 3, "j": 4, "c": "-1"},
        ]
        assert TwoForm.from_json_dict(blob) == W2_G21

    def test_apply_matches_entries(self):
        e2 = G21.basis_vector(1)
        e5 = G21.basis_vector(4)
        assert W2_G21.apply(e2, e5) == Scalar.from_int(1)
        assert W2_G21.apply(e5, e2) == Scalar.from_int(-1)


class TestEndomorphism:
    def test_row_is_basis_image(self):
        v = J21_CANON.apply(Vector.of([0, 1, 0, 0, 0, 0]))
        assert v == Vector.of(["-a", 0, 0, 0, 0, 0])

    def test_apply_is_linear_extension(self):
        v = J21_CANON.apply(Vector.of([1, 1, 0, 0, 0, 0]))
        assert v == Vector.of(["-a", "1/a", 0, 0, 0, 0])

    def test_substitute(self):
        j = J21_CANON.substitute(ParamBinding({"a": 2}))
        assert j.entry(0, 1) == as_scalar("1/2")
        assert j.free_params() == frozenset()

    def test_json_round_trip(self):
        blob = J21_CANON.to_json_dict()
        assert blob["rows"][1][0] == "-a"
        assert Endomorphism.from_json_dict(blob) == J21_CANON

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            Endomorphism([[1, 0]])


class TestExteriorDerivative:
    def test_g21_w2_closed(self):
        assert is_closed(G21, W2_G21)

    def test_abelian_everything_closed(self):
        assert is_closed(ABELIAN, W_STD)
        assert is_closed(ABELIAN, TwoForm.from_terms(6, [(3, 6, 7)]))

    def test_e3_wedge_e6_on_g21_not_closed(self):
        w = TwoForm.from_terms(6, [(3, 6, 1)])
        d = exterior_d(G21, w)
        assert not d.is_zero()
        # d(e3^e6)(e1, e3, e4) = -w([e1,e4], e3) = -w(e6, e3) = w(e3, e6) = 1
        assert d.component(0, 2, 3) == Scalar.from_int(1)

    def test_three_form_antisymmetry(self):
        w = TwoForm.from_terms(6, [(3, 6, 1)])
        d = exterior_d(G21, w)
        assert d.component(2, 0, 3) == Scalar.from_int(-1)
        assert d.component(3, 0, 2) == Scalar.from_int(1)
        assert d.component(0, 0, 3).is_zero()

    def test_three_form_rejects_bad_keys(self):
        with pytest.raises(ValueError):
            ThreeForm(6, {(2, 1, 3): Scalar.from_int(1)})


class TestNondegenerate:
    def test_g21_w2(self):
        assert nondegenerate(W2_G21)

    def test_rank_two_form(self):
        assert not nondegenerate(TwoForm.from_terms(6, [(1, 2, 1)]))

    def test_standard_form(self):
        assert nondegenerate(W_STD)


class TestCompatibility:
    def test_g16_w2_with_J0(self):
        assert is_compatible(W2_G16, J0_G16)

    def test_g16_w1_with_J0_fails(self):
        res = compat_residual(W1_G16, J0_G16)
        assert not linalg.is_zero_matrix(res)
        # the failure is concentrated on the (1,5)/(2,6) pairs
        assert res[0][4] == Scalar.from_int(2)
        assert res[1][5] == Scalar.from_int(2)
        assert res[4][0] == Scalar.from_int(-2)
        assert res[5][1] == Scalar.from_int(-2)

    def test_zero_J_compatible(self):
        z = Endomorphism(linalg.zeros(6, 6))
        assert is_compatible(W2_G21, z)

    @given(st.integers(-3, 3), st.integers(-3, 3))
    def test_residual_linear_in_J(self, alpha, beta):
        j1 = J0_G16
        j2 = J_NAIVE
        mix = Endomorphism(
            linalg.mat_add(
                linalg.mat_scale(Scalar.from_int(alpha), j1.rows),
                linalg.mat_scale(Scalar.from_int(beta), j2.rows),
            )
        )
        lhs = compat_residual(W2_G21, mix)
        rhs = linalg.mat_add(
            linalg.mat_scale(Scalar.from_int(alpha), compat_residual(W2_G21, j1)),
            linalg.mat_scale(Scalar.from_int(beta), compat_residual(W2_G21, j2)),
        )
        assert lhs == rhs


class TestAlmostComplex:
    def test_g21_canonical_symbolic(self):
        assert linalg.is_zero_matrix(almost_complex_residual(J21_CANON))

    def test_identity_is_not(self):
        res = almost_complex_residual(Endomorphism(linalg.identity(6)))
        assert res == linalg.mat_scale(Scalar.from_int(2), linalg.identity(6))

    def test_g12_second_type_family(self):
        # four free parameters plus lambda, all symbolic
        j61 = "lambda*psi51 - (psi41^2 + psi31^2)*(lambda + 1)"
        j = Endomorphism([
            ["0", "1", "psi31", "psi41", "psi51", "-lambda*psi52"],
            ["-1", "0", "psi41", "-psi31", "psi52", j61],
            ["0", "0", "0", "1", "psi41*(lambda+1)/lambda", "psi31*(lambda+1)"],
            ["0", "0", "-1", "0", "-psi31*(lambda+1)/lambda", "psi41*(lambda+1)"],
            ["0", "0", "0", "0", "0", "-lambda"],
            ["0", "0", "0", "0", "1/lambda", "0"],
        ])
        assert linalg.is_zero_matrix(almost_complex_residual(j))


class TestNijenhuis:
    def test_abelian_any_J(self):
        assert is_integrable(ABELIAN, J_NAIVE)

    def test_g21_canonical_integrable(self):
        assert is_integrable(G21, J21_CANON)

    def test_g24_naive_pairing_obstruction(self):
        # frozen brute-force expansion over all i < j
        N = nijenhuis(G24, J_NAIVE)
        expected = {
            (0, 2, 4): 1, (0, 2, 5): -1,
            (0, 3, 4): -1, (0, 3, 5): -1,
            (1, 2, 4): -1, (1, 2, 5): -1,
            (1, 3, 4): -1, (1, 3, 5): 1,
        }
        for i in range(6):
            for j in range(i + 1, 6):
                for k in range(6):
                    want = Scalar.from_int(expected.get((i, j, k), 0))
                    assert N[i][j][k] == want, (i, j, k)
        assert not is_integrable(G24, J_NAIVE)

    def test_antisymmetric_in_first_pair(self):
        N = nijenhuis(G24, J_NAIVE)
        for i in range(6):
            for j in range(6):
                for k in range(6):
                    assert N[i][j][k] == -N[j][i][k]


class TestJAscendingSeries:
    def test_g21_canonical_at_one(self):
        j = J21_CANON.substitute(ParamBinding({"a": 1}))
        series = j_ascending_series(G21, j)
        assert [len(b) for b in series] == [2, 4, 6]
        assert is_nilpotent_J(G21, j)

    def test_abelian_reaches_everything_at_once(self):
        series = j_ascending_series(ABELIAN, J_NAIVE)
        assert [len(b) for b in series] == [6]
        assert is_nilpotent_J(ABELIAN, J_NAIVE)

    def test_g24_canonical_bound(self):
        j = Endomorphism([
            ["1", "-2", "0", "0", "0", "0"],
            ["1", "-1", "0", "0", "0", "0"],
            ["0", "0", "0", "-2", "0", "0"],
            ["0", "0", "1/2", "0", "0", "0"],
            ["0", "0", "0", "0", "1", "2"],
            ["0", "0", "0", "0", "-1", "-1"],
        ])
        assert linalg.is_zero_matrix(almost_complex_residual(j))
        assert is_nilpotent_J(G24, j)

    def test_unbound_parameters_rejected(self):
        with pytest.raises(ValueError, match="unbound"):
            j_ascending_series(G21, J21_CANON)

    def test_series_terms_are_J_invariant_and_bounded(self):
        j = J21_CANON.substitute(ParamBinding({"a": 1}))
        jseries = j_ascending_series(G21, j)
        from nilkaehler.liealg import ascending_series

        gseries = ascending_series(G21)
        for level, term in enumerate(jseries):
            for row in term:
                assert in_subspace(term, j.apply(Vector(row)))
                assert in_subspace(gseries[level], Vector(row))


class TestAbelianJ:
    def test_g21_canonical_symbolic(self):
        assert is_abelian_J(G21, J21_CANON)

    def test_g16_J0_not_abelian(self):
        # [J0 e1, J0 e3] = [-e2, e4] = -e5 while [e1, e3] = e5
        assert not is_abelian_J(G16, J0_G16)

    def test_g16_family_member_abelian(self):
        # the psi34 = 1 structure on the second form flips enough signs
        j = Endomorphism([
            ["0", "-1", "0", "0", "0", "0"],
            ["1", "0", "0", "0", "0", "0"],
            ["0", "0", "0", "-1", "0", "0"],
            ["0", "0", "1", "0", "0", "0"],
            ["0", "0", "0", "0", "0", "1"],
            ["0", "0", "0", "0", "-1", "0"],
        ])
        assert is_abelian_J(G16, j)

    def test_g24_canonical_not_abelian(self):
        j = Endomorphism([
            ["1", "-2", "0", "0", "0", "0"],
            ["1", "-1", "0", "0", "0", "0"],
            ["0", "0", "0", "-2", "0", "0"],
            ["0", "0", "1/2", "0", "0", "0"],
            ["0", "0", "0", "0", "1", "2"],
            ["0", "0", "0", "0", "-1", "-1"],
        ])
        assert not is_abelian_J(G24, j)


def test_derived_subalgebra_pairs_trivially_with_center():
    # omega(C1 g, Z) = 0 for the symplectic forms stored on g21
    c1 = descending_series(G21)[1]
    z = center(G21)
    for x in c1:
        for y in z:
            assert W2_G21.apply(Vector(x), Vector(y)).is_zero()
