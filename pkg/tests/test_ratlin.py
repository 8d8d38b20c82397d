import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from ptrace.kleene import is_defined
from ptrace.ratlin import (
    DimensionError,
    Matrix,
    block_permutation,
    charpoly,
    direct_sum,
    format_matrix,
    inverse,
    kernel_basis,
    kron,
    mul,
    parse_matrix,
    rank,
    rref,
    schur_stable,
    solve_left,
    solve_right,
)
from strategies import any_matrix, matrices, small, square

M = Matrix.from_rows
F = Fraction


def test_mul_example():
    assert mul(M([[1, 1], [1, 2]]), M([[2, -1], [-1, 1]])) == Matrix.identity(2)


def test_mul_empty_inner_dimension():
    assert mul(Matrix.zeros(2, 0), Matrix.zeros(0, 3)) == Matrix.zeros(2, 3)


def test_mul_shape_error_names_both_shapes():
    with pytest.raises(DimensionError, match=r"2x2.*3x1"):
        mul(Matrix.identity(2), Matrix.zeros(3, 1))


@given(matrices(3, 4))
def test_identity_is_neutral(m):
    assert mul(Matrix.identity(3), m) == m
    assert mul(m, Matrix.identity(4)) == m


@given(matrices(2, 3), matrices(3, 2), matrices(2, 4))
def test_mul_associative(a, b, c):
    assert mul(mul(a, b), c) == mul(a, mul(b, c))


def test_mul_matches_numpy():
    rng = np.random.default_rng(0)
    for _ in range(20):
        a = rng.integers(-5, 5, (3, 4))
        b = rng.integers(-5, 5, (4, 2))
        got = mul(M(a.tolist()), M(b.tolist()))
        assert got == M((a @ b).tolist())


@pytest.mark.parametrize(
    "rows, pivots, r",
    [
        ([[1, 1], [1, 2]], [0, 1], 2),
        ([[0, 0], [0, 0]], [], 0),
        ([[1, 2], [2, 4]], [0], 1),
    ],
)
def test_rref_examples(rows, pivots, r):
    _, piv, got = rref(M(rows))
    assert (piv, got) == (pivots, r)


@given(any_matrix())
def test_rref_idempotent(a):
    red, piv, r = rref(a)
    assert rref(red)[0] == red
    assert r == len(piv)


@given(any_matrix())
def test_rank_matches_numpy(a):
    expect = np.linalg.matrix_rank(np.array([[float(x) for x in a.row(i)] for i in range(a.rows)])) if a.rows and a.cols else 0
    assert rank(a) == expect


def test_solve_examples():
    b = M([[1, 2], [3, 4]])
    assert solve_right(Matrix.identity(2), b) == b
    assert not is_defined(solve_right(M([[0]]), M([[1]])))
    assert solve_right(M([[1], [1]]), M([[2], [2]])) == M([[2]])
    assert solve_left(Matrix.identity(2), b) == b
    assert not is_defined(solve_left(M([[0]]), M([[1]])))
    assert solve_left(M([[1, 1]]), M([[2, 2]])) == M([[2]])


def _brute_force_consistent(a: Matrix, b: Matrix) -> bool:
    # independent oracle: the system is consistent iff rank [a | b] == rank a, column by column
    for j in range(b.cols):
        aug = Matrix(a.rows, a.cols + 1, (
            (a[i, k] if k < a.cols else b[i, j]) for i in range(a.rows) for k in range(a.cols + 1)
        ))
        if np.linalg.matrix_rank(np.array([[float(x) for x in aug.row(i)] for i in range(aug.rows)]) if aug.rows else np.zeros((0, 0))) != (
            np.linalg.matrix_rank(np.array([[float(x) for x in a.row(i)] for i in range(a.rows)])) if a.rows and a.cols else 0
        ):
            return False
    return True


@st.composite
def systems(draw):
    r, c, k = (draw(st.integers(1, 3)) for _ in range(3))
    return draw(matrices(r, c)), draw(matrices(r, k))


@given(systems())
def test_solve_right_sound_and_complete(ab):
    a, b = ab
    x = solve_right(a, b)
    if is_defined(x):
        assert mul(a, x) == b
    assert is_defined(x) == _brute_force_consistent(a, b)


@given(systems())
def test_solve_left_sound(ab):
    a, b = ab
    at, bt = a.T, b.T
    x = solve_left(at, bt)
    if is_defined(x):
        assert mul(x, at) == bt
    assert is_defined(x) == is_defined(solve_right(a, b))


def test_inverse_examples():
    assert inverse(M([[-1]])) == M([[-1]])
    assert not is_defined(inverse(M([[0]])))
    assert inverse(Matrix.zeros(0, 0)) == Matrix.zeros(0, 0)


def test_inverse_of_singular_with_late_pivot():
    assert not is_defined(inverse(M([[0, 1], [0, 1]])))


@given(square(max_dim=4))
def test_inverse_is_two_sided(a):
    x = inverse(a)
    if is_defined(x):
        assert mul(a, x) == Matrix.identity(a.rows) == mul(x, a)
    else:
        assert rank(a) < a.rows


@given(any_matrix())
def test_kernel_basis_spans_kernel(a):
    basis = kernel_basis(a)
    assert len(basis) == a.cols - rank(a)
    for v in basis:
        assert mul(a, v).is_zero()


def test_block_examples():
    assert direct_sum(M([[1]]), M([[2]])) == M([[1, 0], [0, 2]])
    assert block_permutation([1, 0], [1, 1]) == M([[0, 1], [1, 0]])
    m = M([[1, 2], [3, 4]])
    assert kron(Matrix.identity(2), m) == direct_sum(m, m)


@given(matrices(2, 3), matrices(1, 2), matrices(3, 2), matrices(2, 1))
def test_direct_sum_bifunctorial(a, b, c, d):
    assert mul(direct_sum(a, b), direct_sum(c, d)) == direct_sum(mul(a, c), mul(b, d))


@given(matrices(2, 2), matrices(1, 2), matrices(2, 1), matrices(2, 3))
def test_kron_bifunctorial(a, b, c, d):
    assert mul(kron(a, b), kron(c, d)) == kron(mul(a, c), mul(b, d))


@given(matrices(2, 3), matrices(2, 2))
def test_kron_matches_numpy(a, b):
    fa = np.array([[float(x) for x in a.row(i)] for i in range(a.rows)])
    fb = np.array([[float(x) for x in b.row(i)] for i in range(b.rows)])
    got = kron(a, b)
    assert np.allclose([[float(x) for x in got.row(i)] for i in range(got.rows)], np.kron(fa, fb))


@given(st.lists(st.integers(0, 3), min_size=1, max_size=4).flatmap(
    lambda ds: st.tuples(st.just(ds), st.permutations(range(len(ds))))))
def test_block_permutation_inverse_is_transpose(dp):
    dims, perm = dp
    p = block_permutation(list(perm), dims)
    assert mul(p, p.T) == Matrix.identity(sum(dims))


def test_block_permutation_moves_blocks():
    # output block k is input block perm[k]
    dims = [1, 2, 1]
    p = block_permutation([2, 0, 1], dims)
    x = M([[10], [20], [21], [30]])
    assert mul(p, x) == M([[30], [10], [20], [21]])


@given(square(max_dim=4, min_dim=1))
def test_charpoly_matches_numpy(a):
    fa = np.array([[float(x) for x in a.row(i)] for i in range(a.rows)])
    ours = [float(c) for c in reversed(charpoly(a))]
    assert np.allclose(ours, np.poly(fa), atol=1e-6)


def test_charpoly_example():
    assert charpoly(M([[1, 2], [3, 4]])) == [F(-2), F(-5), F(1)]


def _companion(coeffs):
    n = len(coeffs) - 1
    rows = [[0] * n for _ in range(n)]
    for i in range(1, n):
        rows[i][i - 1] = 1
    for i in range(n):
        rows[i][n - 1] = -coeffs[i] / coeffs[n]
    return M(rows)


def _lyapunov_stable(coeffs) -> bool:
    """Independent oracle: ``AᵀPA − P = −I`` has a positive definite solution."""
    a = _companion(coeffs)
    n = a.rows
    if n == 0:
        return True
    # vec(AᵀPA) = (Aᵀ ⊗ Aᵀ) vec(P) in row-major vec
    big = kron(a.T, a.T) - Matrix.identity(n * n)
    rhs = Matrix(n * n, 1, (-1 if i == j else 0 for i in range(n) for j in range(n)))
    if rank(big) < n * n:
        return False
    p = solve_right(big, rhs)
    pm = Matrix(n, n, p.entries)
    for k in range(1, n + 1):
        minor = pm.submatrix(0, k, 0, k)
        det = _det(minor)
        if det <= 0:
            return False
    return True


def _det(m: Matrix) -> Fraction:
    n = m.rows
    total = Fraction(0)
    for perm in itertools.permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        prod = Fraction(1)
        for i in range(n):
            prod *= m[i, perm[i]]
        total += sign * prod
    return total


poly = st.integers(1, 3).flatmap(
    lambda n: st.lists(small, min_size=n, max_size=n).map(lambda cs: cs + [Fraction(1)])
)


@given(poly)
def test_schur_stable_matches_lyapunov_oracle(coeffs):
    assert schur_stable(coeffs) == _lyapunov_stable(coeffs)


@given(poly)
def test_schur_stable_matches_numpy_roots(coeffs):
    roots = np.roots([float(c) for c in reversed(coeffs)])
    margin = np.abs(np.abs(roots) - 1.0).min() if roots.size else 1.0
    assume(margin > 1e-6)
    assert schur_stable(coeffs) == bool(np.all(np.abs(roots) < 1.0))


def test_schur_stable_examples():
    assert not schur_stable([F(1, 5), F(-21, 10), F(1)])
    assert schur_stable([F(0), F(0), F(1)])
    assert not schur_stable([F(-1), F(1)])  # root on the unit circle


@given(any_matrix())
def test_format_round_trip(a):
    assert parse_matrix(format_matrix(a)) == a


def test_format_layout():
    assert format_matrix(M([[0]])) == "1 1\n0"
    assert format_matrix(M([[F(1, 2), -3]])) == "1 2\n1/2 -3"


@pytest.mark.parametrize("text", ["", "2", "1 1", "1 1\nx", "1 1\n1/0"])
def test_parse_rejects_garbage(text):
    with pytest.raises(ValueError):
        parse_matrix(text)


@given(any_matrix())
def test_fractions_stay_normalized(a):
    b = a + a - a
    for x in b.entries:
        assert isinstance(x, Fraction)
    assert b == a and hash(b) == hash(a)
