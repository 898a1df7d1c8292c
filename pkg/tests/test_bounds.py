import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from elliptope_faces import bounds
from elliptope_faces.bounds import (
    C_THM3,
    ChernoffParams,
    OliveiraParams,
    bound_thm1,
    bound_thm2,
    bound_thm3,
    build_sigma_check,
    chernoff_span_bound,
    exact_second_moment_w,
    exact_second_moment_y,
    exact_second_moment_z,
    hyper_h_bound,
    oliveira_span_bound,
)
from elliptope_faces.errors import InputError

P_GRID = [Fraction(k, 10) for k in range(1, 10)]


def naive_moment(p, r, feature):
    """Loop over all sign vectors with Fraction weights; independent of the grouped route."""
    p = Fraction(p)
    acc = None
    for w in itertools.product([1, -1], repeat=r):
        k = w.count(1)
        prob = p**k * (1 - p) ** (r - k)
        x = feature(w)
        outer = [[prob * a * b for b in x] for a in x]
        acc = outer if acc is None else [[u + v for u, v in zip(r1, r2)] for r1, r2 in zip(acc, outer)]
    return acc


def y_feature(w):
    return [1 - w[i] * w[j] for i, j in itertools.combinations(range(len(w)), 2)]


def z_feature(w):
    return [1] + [w[i] * w[j] for i, j in itertools.combinations(range(len(w)), 2)]


def sigma_check_float(alpha, r):
    """Symmetric tensors as r x r matrices; (A v B)(X) = A X B^t symmetrised."""
    I, J = np.eye(r), np.ones((r, r))
    basis = []
    for i, j in itertools.combinations_with_replacement(range(r), 2):
        E = np.zeros((r, r))
        E[i, j] += 1
        E[j, i] += 1
        basis.append(E / np.linalg.norm(E))

    def op(X):
        return ((1 - alpha) ** 2 * X + alpha * (1 - alpha) * (X @ J + J @ X)
                + 0.5 * (1 - alpha) ** 2 * (J @ X @ J))

    return np.array([[np.sum(a * op(b)) for b in basis] for a in basis])


# ---- theorem bounds -------------------------------------------------------


def test_bound_thm1_examples():
    assert bound_thm1(3, 200) == pytest.approx(1 - 9 * math.exp(-200 / 9), abs=1e-15)
    assert 1 - bound_thm1(3, 200) == pytest.approx(2.0102683e-9, rel=1e-6)
    assert bound_thm1(2, 1) == 0.0
    assert 4 * math.exp(-0.25) > 1
    assert bound_thm1(10, 10**4) == pytest.approx(1.0, abs=1e-40)
    with pytest.raises(InputError):
        bound_thm1(2, 0)


def test_bound_thm2_examples():
    # at p = 1/2 the exponent is -n/(4 r^2)
    for r, n in [(2, 100), (5, 3000)]:
        assert bound_thm2(0.5, r, n) == pytest.approx(max(0, 1 - r * r * math.exp(-n / (4 * r * r))))
        assert bound_thm2(0.5, r, n) <= bound_thm1(r, n)
    assert bound_thm2(0.1, 2, 10**5) == pytest.approx(1 - 4 * math.exp(-4 * 0.0081 * 1e5 / 4))
    assert bound_thm2(0.3, 3, 0) == 0.0
    with pytest.raises(InputError):
        bound_thm2(0.0, 2, 10)
    with pytest.raises(InputError):
        bound_thm2(1.0, 2, 10)


def test_bound_thm3_examples():
    assert C_THM3 == 4 / 13122
    assert C_THM3 >= 0.0003
    # formula value: exponent (4 - (4/13122) * 0.0625 * 1e6) / 4 = -3.7630...
    expo = (4 - (4 / 13122) * 0.0625 * 1e6) / 4
    assert expo == pytest.approx(-3.762993, abs=1e-6)
    assert bound_thm3(0.5, 2, 10**6) == pytest.approx(1 - 4 * math.exp(expo))
    assert bound_thm3(0.5, 2, 10**6) == pytest.approx(0.90714, abs=1e-5)
    assert bound_thm3(0.4, 3, 0) == 0.0
    with pytest.raises(InputError):
        bound_thm3(1.0, 2, 10)


def test_raw_values_are_exposed():
    assert bound_thm1(2, 1, clamp=False) == pytest.approx(1 - 4 * math.exp(-0.25))
    assert bound_thm3(0.5, 3, 0, clamp=False) < 0


@given(st.integers(2, 12), st.integers(0, 10**6), st.integers(1, 10**5), st.floats(0.01, 0.99))
def test_bounds_monotone_in_n(r, n, dn, p):
    assert bound_thm2(p, r, n) <= bound_thm2(p, r, n + dn)
    assert bound_thm3(p, r, n) <= bound_thm3(p, r, n + dn)
    if n >= 1:
        assert bound_thm1(r, n) <= bound_thm1(r, n + dn)


@given(st.integers(2, 12), st.integers(0, 10**7), st.floats(0.01, 0.99))
def test_bounds_symmetric_in_p(r, n, p):
    q = 1.0 - p
    assert bound_thm2(p, r, n) == pytest.approx(bound_thm2(q, r, n), rel=1e-12, abs=1e-15)
    assert bound_thm3(p, r, n) == pytest.approx(bound_thm3(q, r, n), rel=1e-12, abs=1e-15)


# ---- concentration formulas ----------------------------------------------


def test_chernoff_examples():
    for r, n in [(3, 50), (5, 400)]:
        got = chernoff_span_bound(ChernoffParams(d=r, lam=1.0, B=r, s=n), clamp=False)
        assert got == pytest.approx(r * math.exp(-n / (2 * r)))
    assert chernoff_span_bound(ChernoffParams(d=7, lam=0.0, B=3.0, s=100)) == 1.0
    alpha, Rp, n = 0.16, 6, 5000
    got = chernoff_span_bound(ChernoffParams(d=Rp, lam=(1 - alpha) ** 2, B=4 * Rp, s=n), clamp=False)
    assert got == pytest.approx(Rp * math.exp(-((1 - alpha) ** 2) * n / (8 * Rp)))
    with pytest.raises(InputError):
        ChernoffParams(d=2, lam=0.0, B=0.0, s=1)
    with pytest.raises(InputError):
        ChernoffParams(d=2, lam=2.0, B=1.0, s=1)


def test_oliveira_examples():
    p, r, n = 0.3, 4, 10**6
    got = oliveira_span_bound(OliveiraParams(d=r, h=9 / (p * (1 - p)), s=n), clamp=False)
    assert got == pytest.approx(2 * math.exp(r / 2 - p * (1 - p) * n / 1458))
    R = 1 + r * (r - 1) // 2
    got = oliveira_span_bound(OliveiraParams(d=R, h=81 / (p * (1 - p)) ** 2, s=n), clamp=False)
    assert got == pytest.approx(2 * math.exp(R / 2 - (p * (1 - p)) ** 2 * n / 13122))
    assert oliveira_span_bound(OliveiraParams(d=3, h=2.0, s=0)) == 1.0
    with pytest.raises(InputError):
        OliveiraParams(d=3, h=0.5, s=10)


def test_hyper_h_bound():
    assert hyper_h_bound(0.5, 1) == 36
    assert hyper_h_bound(0.3, 0) == 1
    assert hyper_h_bound(0.5, 2) == 1296
    with pytest.raises(InputError):
        hyper_h_bound(0.0, 1)


def test_hypercontractive_ratio_of_linear_forms_below_bound():
    # E(x^t u)^4 / (E(x^t u)^2)^2 for random u, by exact enumeration
    rng = np.random.default_rng(4)
    for p in (0.2, 0.5, 0.8):
        W = np.array(list(itertools.product([1, -1], repeat=4)), dtype=float)
        prob = np.prod(np.where(W > 0, p, 1 - p), axis=1)
        for _ in range(50):
            u = rng.standard_normal(4)
            v = W @ u
            ratio = np.sum(prob * v**4) / np.sum(prob * v**2) ** 2
            assert 1 <= ratio <= hyper_h_bound(p, 1)


# ---- moment oracles -------------------------------------------------------


def test_enumeration_matches_naive_loop():
    for p in (Fraction(1, 2), Fraction(3, 4), Fraction(1, 10)):
        for r in (2, 3, 4):
            rep = exact_second_moment_y(p, r)
            assert rep.Sigma.tolist() == naive_moment(p, r, y_feature)
            assert exact_second_moment_z(p, r).tolist() == naive_moment(p, r, z_feature)
            assert exact_second_moment_w(p, r).matrix.tolist() == naive_moment(p, r, list)


def test_second_moment_w_examples():
    m = exact_second_moment_w(Fraction(1, 2), 3)
    assert m.matrix.tolist() == np.eye(3, dtype=int).tolist()
    assert m.lambda_min == 1.0
    assert exact_second_moment_w(Fraction(1, 7), 1).matrix.tolist() == [[1]]
    m = exact_second_moment_w(Fraction(3, 4), 2)
    assert m.matrix.tolist() == [[1, Fraction(1, 4)], [Fraction(1, 4), 1]]
    assert m.lambda_min == 0.75
    # beyond the enumeration limit only the closed form is returned
    assert not exact_second_moment_w(0.5, 15).enumerated


def test_second_moment_y_examples():
    rep = exact_second_moment_y(Fraction(1, 2), 3)
    assert rep.Sigma.tolist() == (np.eye(3, dtype=int) + 1).tolist()
    assert rep.lambda_min_Sigma == pytest.approx(1.0, abs=1e-12)
    for p in P_GRID:
        alpha = (2 * p - 1) ** 2
        rep2 = exact_second_moment_y(p, 2)
        assert rep2.Sigma.tolist() == [[2 * (1 - alpha)]]
        assert rep2.lambda_min_Sigma >= float((1 - alpha) ** 2)
        rep5 = exact_second_moment_y(p, 5)
        assert all(rep5.Sigma[i, i] == (1 - alpha) ** 2 + (1 - alpha**2) for i in range(10))
    with pytest.raises(InputError):
        exact_second_moment_y(0.5, 13)
    with pytest.raises(InputError):
        exact_second_moment_y(0.5, 1)


def test_second_moment_z_examples():
    assert exact_second_moment_z(Fraction(1, 2), 3).tolist() == np.eye(4, dtype=int).tolist()
    Ez = exact_second_moment_z(Fraction(3, 4), 2)
    assert Ez[0, 0] == 1
    assert Ez[0, 1] == Fraction(1, 4)


@pytest.mark.parametrize("r", range(2, 11))
def test_closed_forms_agree_with_enumeration(r):
    for p in P_GRID:
        rep = exact_second_moment_y(p, r)
        assert rep.closed_form_matches
        assert np.allclose(bounds.to_float(rep.Sigma), bounds.to_float(rep.Sigma_closed_form), atol=1e-12)
        assert rep.claim_holds
        assert rep.lambda_min_Sigma >= float((1 - rep.alpha) ** 2) - 1e-9


def test_sigma_check_against_float_tensor_oracle():
    for p in (Fraction(1, 2), Fraction(1, 5), Fraction(9, 10)):
        alpha = float((2 * p - 1) ** 2)
        for r in (2, 3, 4, 5):
            chk = build_sigma_check(p, r)
            assert np.allclose(chk.to_float(), sigma_check_float(alpha, r), atol=1e-12)


def test_sigma_check_balanced_case():
    chk = build_sigma_check(Fraction(1, 2), 4)
    # (I v I) + (J v J)/2, and the off-diagonal block is I + J
    assert chk.restriction().tolist() == (np.eye(6, dtype=int) + 1).tolist()


def test_sigma_check_vanishes_at_alpha_one():
    for p in (0, 1):
        chk = build_sigma_check(Fraction(p), 3)
        assert all(x == 0 for x in chk.rational.flat)
        assert all(x == 0 for x in chk.sqrt2_part.flat)


@pytest.mark.parametrize("r", range(2, 7))
def test_sigma_check_min_eigenvalue(r):
    for p in P_GRID:
        chk = build_sigma_check(p, r)
        alpha = float((2 * p - 1) ** 2)
        assert np.linalg.eigvalsh(chk.to_float())[0] >= (1 - alpha) ** 2 - 1e-9


# ---- assembly inequalities (small grid; the full grid is an acceptance test)


@pytest.mark.parametrize("r", [2, 3, 7])
@pytest.mark.parametrize("n", [1, 10, 1000])
def test_assembly_inequalities_small(r, n):
    assert bounds.thm1_failure_sum(r, n) <= bounds.thm1_failure_bound(r, n) * (1 + 1e-12)
    for p in (0.2, 0.5):
        assert bounds.thm2_failure_sum(p, r, n) <= bounds.thm2_failure_bound(p, r, n) * (1 + 1e-12)
        assert bounds.thm3_failure_sum(p, r, n) <= bounds.thm3_failure_bound(p, r, n) * (1 + 1e-12)
