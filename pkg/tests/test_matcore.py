import random
from fractions import Fraction as Fr

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from integrax.errors import InputError
from integrax.matcore import (
    IntegralExtension,
    JordanSpec,
    RatMatrix,
    char_poly,
    conjugate_integral,
    construct_integral,
    det,
    extension_char_poly,
    inverse,
    is_integrable,
    is_normalized,
    jordan_matrix,
    min_poly,
    multiple_locus,
    normalize_extension,
    rank,
    solve_tail_annihilator,
    solve_taylor_match,
    transport_integral,
    verify_integral,
)
from integrax.polycore import RatPoly, derivative, divrem, is_squarefree, sfull_integral

from oracles import (
    brute_char_poly,
    geometric_multiplicity,
    jordan_specs,
    leibniz_det,
    random_invertible,
    random_normalized_extension,
)

X = RatPoly.x()
MIXED_B = RatMatrix([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, -1, 1], [0, 0, 0, -1]])
MIXED_A = RatMatrix(
    [[1, 0, 0, 0, 0], [0, 1, 0, 0, 0], [0, 0, -1, 1, 0], [0, 0, 0, -1, Fr(4, 3)], [0, 0, 1, 1, 0]]
)
MIXED_SPEC = JordanSpec.of((1, (1, 1)), (-1, (2,)))
DIAG_PM1 = RatMatrix.diag([1, 1, -1, -1])

small_ints = st.integers(-3, 3)


def int_matrix(n):
    return st.lists(st.lists(small_ints, min_size=n, max_size=n), min_size=n, max_size=n)


class TestBasics:
    def test_det_and_inverse(self):
        M = RatMatrix([[2, 1, 0], [1, 3, 1], [0, 1, 4]])
        assert det(M) == leibniz_det(M.entries) == 18
        assert M @ inverse(M) == RatMatrix.identity(3)
        with pytest.raises(InputError):
            inverse(RatMatrix([[1, 2], [2, 4]]))

    @given(st.integers(1, 4).flatmap(int_matrix))
    def test_det_matches_leibniz(self, rows):
        assert det(RatMatrix(rows)) == leibniz_det([[Fr(x) for x in r] for r in rows])

    def test_rank(self):
        assert rank(RatMatrix([[1, 2], [2, 4]])) == 1
        assert rank(RatMatrix.zeros(3)) == 0


class TestCharMinPoly:
    def test_examples(self):
        assert char_poly(DIAG_PM1) == X**4 - X**2 * 2 + 1
        assert char_poly(MIXED_B) == (X - 1) ** 2 * (X + 1) ** 2
        assert char_poly(RatMatrix.zeros(3)) == X**3

    def test_non_square(self):
        with pytest.raises(InputError):
            char_poly(RatMatrix([[1, 2]]))

    @settings(max_examples=60)
    @given(st.integers(1, 5).flatmap(int_matrix))
    def test_char_poly_matches_leibniz(self, rows):
        assert char_poly(RatMatrix(rows)).coeffs == tuple(brute_char_poly(rows))

    @given(st.integers(1, 4).flatmap(int_matrix), st.integers(1, 6))
    def test_char_poly_with_fractions(self, rows, d):
        M = RatMatrix([[Fr(x, d) for x in r] for r in rows])
        p = char_poly(M)
        assert p.coeffs == tuple(brute_char_poly(M.entries))
        assert p.coeffs[-2:-1] == (() if len(rows) == 0 else (-M.trace(),))

    def test_min_poly_examples(self):
        assert min_poly(DIAG_PM1) == X**2 - 1
        assert min_poly(RatMatrix([[0, 1], [0, 0]])) == X**2
        assert min_poly(MIXED_B) == (X - 1) * (X + 1) ** 2

    @settings(max_examples=40)
    @given(st.integers(1, 4).flatmap(int_matrix))
    def test_min_poly_annihilates_minimally(self, rows):
        M = sympy.Matrix(rows)
        m = min_poly(RatMatrix(rows))
        acc = sympy.zeros(len(rows))
        for i, c in enumerate(m.coeffs):
            acc += sympy.Rational(c.numerator, c.denominator) * M**i
        assert acc == sympy.zeros(len(rows))
        assert divrem(char_poly(RatMatrix(rows)), m)[1].is_zero()
        for d in range(m.degree):
            # no monic polynomial of lower degree annihilates: the powers I..M^d are independent
            stack = sympy.Matrix([list((M**i).reshape(1, len(rows) ** 2)) for i in range(d + 1)])
            assert stack.rank() == d + 1

    def test_locus_examples(self):
        assert multiple_locus(DIAG_PM1) == X**2 - 1
        assert multiple_locus(RatMatrix([[0, 1], [0, 0]])) == RatPoly([1])
        assert multiple_locus(MIXED_B) == X - 1

    def test_locus_matches_geometric_multiplicity(self):
        for spec in jordan_specs(5, eigs=(-1, 0, 2)):
            B = jordan_matrix(spec)
            h = multiple_locus(B)
            assert is_squarefree(h)
            want = sorted(ev for ev in spec.eigenvalues if geometric_multiplicity(B.entries, ev) > 1)
            got = RatPoly([1])
            for ev in want:
                got = got * (X - ev)
            assert h == got


class TestIntegrability:
    def test_examples(self):
        assert is_integrable(MIXED_B)
        assert not is_integrable(DIAG_PM1)
        companion = RatMatrix([[0, 0, 5], [1, 0, -2], [0, 1, 3]])
        assert is_integrable(companion)

    def test_known_integral(self):
        assert verify_integral(MIXED_B, MIXED_A)
        assert char_poly(MIXED_A) == X**5 - X**3 * Fr(10, 3) + X * 5 - Fr(8, 3)

    def test_verify_examples(self):
        assert verify_integral(RatMatrix([[0]]), RatMatrix.zeros(2))
        bordered = IntegralExtension(DIAG_PM1, (0,) * 4, (0,) * 4, 1).matrix()
        assert not verify_integral(DIAG_PM1, bordered)

    def test_verify_shape_errors(self):
        with pytest.raises(InputError):
            verify_integral(MIXED_B, RatMatrix.zeros(4))
        with pytest.raises(InputError):
            verify_integral(MIXED_B, RatMatrix.zeros(5))

    def test_corner_and_trace_coefficient(self):
        for spec in jordan_specs(4, eigs=(-1, 1, 2)):
            A = construct_integral(spec)
            if A is None:
                continue
            B = A.B
            n = spec.n
            assert A.b == B.trace() / n
            assert char_poly(A.matrix()).coeffs[n] == -Fr(n + 1, n) * B.trace()

    def test_sfull_implies_integrable_for_all_refinements(self):
        for spec in jordan_specs(5, eigs=(-1, 0, 1)):
            f = spec.char_poly_factored()
            if sfull_integral(f, f.multiple_roots()) is not None:
                assert is_integrable(jordan_matrix(spec))


class TestJordan:
    def test_matrix_examples(self):
        assert jordan_matrix(JordanSpec.of((0, (2,)))) == RatMatrix([[0, 1], [0, 0]])
        assert jordan_matrix(MIXED_SPEC) == MIXED_B
        assert jordan_matrix(JordanSpec.of((5, (1,)))) == RatMatrix([[5]])

    def test_validation(self):
        with pytest.raises(InputError):
            JordanSpec.of((1, (1,)), (1, (2,)))
        with pytest.raises(InputError):
            JordanSpec.of((1, ()))

    def test_cells_sorted(self):
        assert JordanSpec.of((3, (1, 2))).blocks == ((3, (2, 1)),)


class TestNormalization:
    def test_tail_annihilator_examples(self):
        assert solve_tail_annihilator([1, 0, 0]) == RatPoly([1])
        assert solve_tail_annihilator([2, 0]) == RatPoly([Fr(1, 2)])
        assert solve_tail_annihilator([1, 1]) == RatPoly([1, -1])
        with pytest.raises(InputError):
            solve_tail_annihilator([0, 0])

    @given(st.lists(st.fractions(-3, 3, max_denominator=3), min_size=1, max_size=5).filter(any))
    def test_tail_annihilator_property(self, v):
        k = len(v)
        h = solve_tail_annihilator(v)
        J = jordan_matrix(JordanSpec.of((0, (k,))))
        hJ = RatMatrix.zeros(k)
        power = RatMatrix.identity(k)
        for c in h.coeffs:
            hJ = hJ + power * c
            power = power @ J
        out = hJ.transpose().apply(v)  # row vector v times h(J)
        r = next(i for i, x in enumerate(v) if x != 0)
        assert out == [Fr(int(i == r)) for i in range(k)]
        assert h.degree <= k - r - 1

    def test_normalize_example(self):
        spec = JordanSpec.of((0, (2,)))
        A = IntegralExtension(jordan_matrix(spec), (3, 5), (1, 1), 2)
        N = normalize_extension(A, spec)
        assert N.v == (1, 0)
        assert char_poly(N.matrix()) == char_poly(A.matrix())
        assert N.B == A.B

    def test_normalize_fixed_points(self):
        spec = MIXED_SPEC
        B = jordan_matrix(spec)
        A = IntegralExtension(B, (1, 2, 3, 4), (0, 0, 1, 0), 0)
        assert normalize_extension(A, spec) == A
        Z = IntegralExtension(B, (1, 2, 3, 4), (0, 0, 0, 0), 5)
        assert normalize_extension(Z, spec) == Z

    def test_normalize_preserves_char_poly(self):
        rng = random.Random(5)
        specs = [s for s in jordan_specs(4, eigs=(-1, 0, 2))]
        for _ in range(80):
            spec = rng.choice(specs)
            n = spec.n
            u = [Fr(rng.randint(-3, 3)) for _ in range(n)]
            v = [Fr(rng.randint(-2, 2), rng.randint(1, 2)) for _ in range(n)]
            A = IntegralExtension(jordan_matrix(spec), u, v, rng.randint(-2, 2))
            N = normalize_extension(A, spec)
            assert is_normalized(spec, N.v)
            assert char_poly(N.matrix()) == char_poly(A.matrix())


class TestExtensionCharPoly:
    def test_examples(self):
        spec = JordanSpec.of((0, (2,)))
        assert extension_char_poly(spec, (0, 0), (0, 0), 3) == (X - 3) * X**2
        u1, u2 = Fr(2), Fr(-5)
        assert extension_char_poly(spec, (u1, u2), (1, 0), 0) == X**3 - X * u1 - u2

    def test_rejects_unnormalized(self):
        spec = JordanSpec.of((0, (2,)))
        with pytest.raises(InputError):
            extension_char_poly(spec, (1, 1), (1, 1), 0)

    def test_matches_leibniz(self):
        rng = random.Random(19)
        specs = list(jordan_specs(4, eigs=(-1, 0, 1, 2)))
        for _ in range(60):
            spec = rng.choice(specs)
            u, v, b = random_normalized_extension(spec, rng)
            A = IntegralExtension(jordan_matrix(spec), u, v, b).matrix()
            assert extension_char_poly(spec, u, v, b).coeffs == tuple(brute_char_poly(A.entries))


class TestTaylorMatch:
    def test_examples(self):
        F = X**4 * 3 - X**2 + X * 7 + 2
        assert solve_taylor_match(RatPoly([1]), F, 0, 3) == X * 7 - X**2 + 2
        assert solve_taylor_match(X + 1, X, 0, 2) == X
        h1 = solve_taylor_match(X + 1, F, 0, 3)
        h2 = solve_taylor_match((X + 1) * 2, F, 0, 3)
        assert h2 * 2 == h1

    def test_rejects_vanishing_f(self):
        with pytest.raises(InputError):
            solve_taylor_match(X - 1, X, 1, 2)

    @given(
        st.lists(st.fractions(-3, 3, max_denominator=2), min_size=1, max_size=4),
        st.lists(st.fractions(-3, 3, max_denominator=2), min_size=1, max_size=7),
        st.fractions(-2, 2, max_denominator=2),
        st.integers(1, 4),
    )
    def test_derivatives_match(self, fc, Fc, t, count):
        f, F = RatPoly(fc), RatPoly(Fc)
        if f(t) == 0:
            return
        h = solve_taylor_match(f, F, t, count)
        assert h.degree <= count - 1
        diff = f * h - F
        # (x - t)^count divides f*h - F
        assert divrem(diff, (X - t) ** count)[1].is_zero()


class TestConstruction:
    def test_examples(self):
        A = construct_integral(JordanSpec.of((0, (2,))))
        assert char_poly(A.matrix()) == X**3 and A.b == 0
        Z = construct_integral(JordanSpec.of((0, (1, 1))))
        assert Z.matrix() == RatMatrix.zeros(3)
        R = construct_integral(MIXED_SPEC)
        assert derivative(char_poly(R.matrix())) == (X - 1) ** 2 * (X + 1) ** 2 * 5
        assert char_poly(R.matrix()) == char_poly(MIXED_A)

    def test_non_integrable(self):
        assert construct_integral(JordanSpec.of((1, (1, 1)), (-1, (1, 1)))) is None

    def test_border_vanishes_on_locus(self):
        for spec in jordan_specs(4):
            A = construct_integral(spec)
            if A is None:
                continue
            for _, ev, off, k in spec.cell_layout():
                if ev in spec.locus():
                    assert not any(A.u[off:off + k]) and not any(A.v[off:off + k])


class TestConjugation:
    def test_examples(self):
        A = IntegralExtension.from_matrix(MIXED_A)
        assert conjugate_integral(A, RatMatrix.identity(4)) == A
        D = conjugate_integral(A, RatMatrix.identity(4) * 2)
        assert D.u == tuple(2 * x for x in A.u) and D.v == tuple(x / 2 for x in A.v)
        perm = RatMatrix([[0, 1, 0, 0], [0, 0, 1, 0], [1, 0, 0, 0], [0, 0, 0, 1]])
        P = conjugate_integral(A, perm)
        assert verify_integral(P.B, P.matrix())

    def test_singular(self):
        A = IntegralExtension.from_matrix(MIXED_A)
        with pytest.raises(InputError):
            conjugate_integral(A, RatMatrix.zeros(4))

    def test_invariance_random(self):
        rng = random.Random(2)
        for B in (MIXED_B, DIAG_PM1):
            for _ in range(10):
                X_ = RatMatrix(random_invertible(4, rng))
                assert is_integrable(X_ @ B @ inverse(X_)) == is_integrable(B)


class TestTransport:
    def test_scalar_to_jordan(self):
        a = Fr(3)
        diag = JordanSpec.of((a, (1, 1)))
        A = IntegralExtension(jordan_matrix(diag), (0, 0), (0, 0), a)
        T = transport_integral(diag, A, JordanSpec.of((a, (2,))))
        assert T.B == RatMatrix([[3, 1], [0, 3]])
        assert verify_integral(T.B, T.matrix())

    def test_identity_transport(self):
        spec = JordanSpec.of((1, (1, 1)), (-1, (1,)), (2, (1,)))
        A = construct_integral(spec)
        assert transport_integral(spec, A, spec) == A

    def test_mixed_family(self):
        diag = JordanSpec.of((1, (1, 1)), (-1, (1,)), (0, (1,)))
        A = construct_integral(diag)
        assert A is not None
        target = JordanSpec.of((0, (1,)), (1, (2,)), (-1, (1,)))
        T = transport_integral(diag, A, target)
        assert verify_integral(T.B, T.matrix())

    def test_non_integrable_source_rejected(self):
        diag = JordanSpec.of((1, (1, 1)), (-1, (1, 1)))
        bogus = IntegralExtension(jordan_matrix(diag), (0,) * 4, (0,) * 4, 0)
        with pytest.raises(InputError):
            transport_integral(diag, bogus, MIXED_SPEC)

    def test_char_poly_mismatch(self):
        diag = JordanSpec.of((1, (1, 1)))
        A = IntegralExtension(jordan_matrix(diag), (0, 0), (0, 0), 1)
        with pytest.raises(InputError):
            transport_integral(diag, A, JordanSpec.of((2, (2,))))
