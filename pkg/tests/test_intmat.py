import random

import pytest
import sympy
from sympy.matrices.normalforms import smith_normal_form

from ggsbranch.intmat import IntegerMatrix, companion_matrix, elementary_divisors


def random_matrix(rng, nr, nc, lo=-6, hi=6):
    return IntegerMatrix([[rng.randint(lo, hi) for _ in range(nc)] for _ in range(nr)])


def sympy_invariants(M):
    S = smith_normal_form(sympy.Matrix(M.rows), domain=sympy.ZZ)
    diag = [abs(int(S[i, i])) for i in range(min(S.shape))]
    nonzero = [d for d in diag if d]
    return nonzero + [0] * (len(diag) - len(nonzero))


def test_det_matches_sympy(rng):
    for size in range(0, 7):
        for _ in range(15):
            M = random_matrix(rng, size, size)
            assert M.det() == (sympy.Matrix(M.rows).det() if size else 1)


def test_det_of_singular_and_permuted_matrices():
    assert IntegerMatrix([[1, 2], [2, 4]]).det() == 0
    assert IntegerMatrix([[0, 1], [1, 0]]).det() == -1
    assert IntegerMatrix([[0, 0, 2], [0, 3, 0], [5, 0, 0]]).det() == -30


def test_smith_diagonal_matches_sympy(rng):
    for _ in range(60):
        nr, nc = rng.randint(1, 5), rng.randint(1, 5)
        M = random_matrix(rng, nr, nc)
        assert M.smith_diagonal() == sympy_invariants(M), M.rows


def test_smith_diagonal_divisibility_chain(rng):
    for _ in range(40):
        M = random_matrix(rng, 4, 4, -20, 20)
        d = [x for x in M.smith_diagonal() if x]
        assert all(d[i + 1] % d[i] == 0 for i in range(len(d) - 1))


def test_smith_examples():
    assert IntegerMatrix([[2, 0], [0, 3]]).smith_diagonal() == [1, 6]
    assert IntegerMatrix([[4, 0], [0, 0]]).smith_diagonal() == [4, 0]
    assert IntegerMatrix([[0, 0]]).smith_diagonal() == [0]


@pytest.mark.parametrize('m', [2, 3, 4, 5, 8, 9])
def test_companion_matrix(m):
    M = companion_matrix(m - 1)
    X = sympy.symbols('X')
    charpoly = sympy.Matrix(M.rows).charpoly(X).as_expr()
    assert sympy.expand(charpoly - sum(X ** i for i in range(m))) == 0
    eye = IntegerMatrix.identity(m - 1)
    assert abs((M - eye).det()) == m
    # right action: v_i M = v_{i+1}, and the last basis vector goes to minus the sum
    basis = [tuple(int(i == j) for j in range(m - 1)) for i in range(m - 1)]
    for i in range(m - 2):
        assert M.act(basis[i]) == basis[i + 1]
    assert M.act(basis[-1]) == (-1,) * (m - 1)
    assert M ** m == eye


def test_power_and_arithmetic():
    M = IntegerMatrix([[1, 1], [0, 1]])
    assert (M ** 5).rows == ((1, 5), (0, 1))
    assert M ** 0 == IntegerMatrix.identity(2)
    assert (M + M - M) == M
    with pytest.raises(ValueError):
        M ** -1
    with pytest.raises(ValueError):
        IntegerMatrix([[1, 2], [3]])
    with pytest.raises(ValueError):
        IntegerMatrix([[1, 2]]).det()


def test_text_round_trip():
    M = companion_matrix(4)
    text = M.to_text()
    assert text.splitlines()[-1] == '-1 -1 -1 -1'
    assert IntegerMatrix.from_text(text) == M


def test_elementary_divisors():
    assert elementary_divisors([1, 6, 12]) == sorted([2, 3, 4, 3], reverse=True)
    assert elementary_divisors([3, 3]) == [3, 3]
    assert elementary_divisors([]) == []
    with pytest.raises(ValueError):
        elementary_divisors([0])


def test_big_integers_do_not_overflow():
    M = IntegerMatrix([[10 ** 30, 1], [1, 10 ** 30]])
    assert M.det() == 10 ** 60 - 1
    rng = random.Random(2)
    big = random_matrix(rng, 5, 5, -10 ** 12, 10 ** 12)
    assert big.det() == sympy.Matrix(big.rows).det()
