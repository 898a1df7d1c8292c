import numpy as np
import pytest
from hypothesis import given, strategies as st

from elliptope_faces.cutgeom import (
    CutVector,
    all_cut_vectors,
    cut_matrix,
    cut_vector_from_subset,
    is_correlation_matrix,
    lower_triangle_embed,
    simplicial_dim_feasible,
)
from elliptope_faces.errors import InputError

cut_vectors = st.integers(1, 10).flatmap(
    lambda n: st.lists(st.sampled_from([-1, 1]), min_size=n, max_size=n)
).map(CutVector)


@pytest.mark.parametrize(
    "S, n, expected",
    [({1, 2}, 3, (1, 1, -1)), (set(), 2, (-1, -1)), ({1, 2, 3, 4}, 4, (1, 1, 1, 1))],
)
def test_cut_vector_from_subset(S, n, expected):
    assert tuple(cut_vector_from_subset(S, n)) == expected


def test_cut_vector_from_subset_rejects_out_of_range():
    with pytest.raises(InputError):
        cut_vector_from_subset({0}, 3)
    with pytest.raises(InputError):
        cut_vector_from_subset({4}, 3)


def test_cut_vector_rejects_bad_entries():
    with pytest.raises(InputError):
        CutVector([1, 0, -1])
    with pytest.raises(InputError):
        CutVector([])


def test_cut_matrix_examples():
    assert cut_matrix(CutVector([1, 1])).entries.tolist() == [[1, 1], [1, 1]]
    assert cut_matrix(CutVector([1, -1])).entries.tolist() == [[1, -1], [-1, 1]]


def test_cut_matrix_is_even_on_random_vectors():
    rng = np.random.default_rng(7)
    for _ in range(100):
        c = CutVector(rng.choice([-1, 1], size=8))
        brute = [[c.entries[i] * c.entries[j] for j in range(8)] for i in range(8)]
        brute_neg = [[(-c.entries[i]) * (-c.entries[j]) for j in range(8)] for i in range(8)]
        assert brute == brute_neg
        assert cut_matrix(c) == cut_matrix(-c)
        assert cut_matrix(c).entries.tolist() == brute


@given(cut_vectors)
def test_cut_matrix_invariants(c):
    M = cut_matrix(c)
    E = M.entries
    assert np.array_equal(E, E.T)
    assert np.all(np.diag(E) == 1)
    assert np.linalg.matrix_rank(E) == 1
    assert is_correlation_matrix(M, tol=0)
    # the integer array goes through the exact psd route
    assert is_correlation_matrix(np.array(E), tol=0)


@given(st.integers(1, 8), st.data())
def test_complement_gives_negated_vector(n, data):
    S = data.draw(st.sets(st.integers(1, n)))
    comp = set(range(1, n + 1)) - S
    a, b = cut_vector_from_subset(S, n), cut_vector_from_subset(comp, n)
    assert a == -b
    assert cut_matrix(a) == cut_matrix(b)


def test_vertex_count_is_half_of_cut_vectors():
    for n in range(1, 6):
        mats = {cut_matrix(c) for c in all_cut_vectors(n)}
        assert len(mats) == 2 ** (n - 1)


def test_is_correlation_matrix_examples():
    assert is_correlation_matrix(np.eye(4), tol=0)
    assert is_correlation_matrix(np.ones((3, 3)), tol=1e-12)
    assert not is_correlation_matrix(np.array([[1.0, 2.0], [2.0, 1.0]]), tol=1e-9)
    assert not is_correlation_matrix(np.array([[1, 2], [2, 1]]), tol=0)
    assert not is_correlation_matrix(np.diag([1.0, 2.0]))


def test_is_correlation_matrix_errors():
    with pytest.raises(InputError):
        is_correlation_matrix(np.array([[1.0, np.nan], [np.nan, 1.0]]))
    with pytest.raises(InputError):
        is_correlation_matrix(np.array([[1.0, 0.5], [0.0, 1.0]]))


def test_indefinite_integer_matrix_with_zero_pivot():
    # [[1,1,0],[1,1,1],[0,1,1]] has unit diagonal but determinant -1
    assert not is_correlation_matrix(np.array([[1, 1, 0], [1, 1, 1], [0, 1, 1]]), tol=0)


@pytest.mark.parametrize("k, n, expected", [(2, 4, True), (0, 1, True), (6, 10, False)])
def test_simplicial_dim_feasible(k, n, expected):
    assert simplicial_dim_feasible(k, n) is expected


@given(st.integers(0, 40), st.integers(1, 400))
def test_simplicial_dim_feasible_monotone(k, n):
    if simplicial_dim_feasible(k, n):
        assert simplicial_dim_feasible(k, n + 1)
        if k > 0:
            assert simplicial_dim_feasible(k - 1, n)


def test_lower_triangle_embed():
    assert lower_triangle_embed(np.eye(3)) == (0, 0, 0)
    assert lower_triangle_embed(np.ones((3, 3))) == (1, 1, 1)
    assert lower_triangle_embed(cut_matrix(CutVector([1, -1, 1]))) == (-1, 1, -1)
    with pytest.raises(InputError):
        lower_triangle_embed(np.eye(4))
