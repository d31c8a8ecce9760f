from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from schrocex.optimizer import constraint_slacks, feasible_mask, objective, solve_exponents, threshold, verify_optimality


@pytest.mark.parametrize(
    "n,k,lam,kappa,s",
    [(2, 2, Fraction(2, 3), Fraction(1, 6), Fraction(1, 3)), (2, 3, Fraction(4, 5), Fraction(1, 10), Fraction(3, 10)), (3, 2, Fraction(5, 8), Fraction(1, 4), Fraction(3, 8))],
)
def test_closed_form_examples(n, k, lam, kappa, s):
    e = solve_exponents(n, k)
    assert (e.lam, e.kappa, e.sigma, e.s_star) == (lam, kappa, Fraction(1, 2), s)


@pytest.mark.parametrize("n", range(2, 51))
def test_two_closed_forms_agree(n):
    for k in range(2, 51):
        a = Fraction(k * n, 4 * ((k - 1) * n + 1))
        b = Fraction(1, 4) + Fraction(n - 1, 4 * ((k - 1) * n + 1))
        assert a == b == threshold(n, k)


@given(st.integers(2, 60), st.integers(2, 60))
def test_solution_feasible_and_tight(n, k):
    e = solve_exponents(n, k)
    assert all(v >= 0 for v in e.slack.values())
    assert e.slack["time_window"] == 0 and e.slack["mode_count"] == 0
    lhs = e.lam + e.kappa
    rhs = (n + e.sigma / (k - 1)) / (n + Fraction(1, k - 1))
    assert lhs == rhs
    assert objective(n, e.lam, e.kappa, e.sigma) == e.s_star
    assert threshold(n, k) > Fraction(1, 4)
    assert threshold(n, k + 1) < threshold(n, k)


@pytest.mark.parametrize("n", range(2, 11))
def test_k2_threshold(n):
    assert threshold(n, 2) == Fraction(n, 2 * (n + 1))


@pytest.mark.parametrize("n,k", [(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (3, 4)])
def test_grid_oracle(n, k):
    g = verify_optimality(n, k, 1e-3)
    assert abs(g.grid_max - float(threshold(n, k))) <= 1e-3
    assert g.grid_max <= float(threshold(n, k)) + 1e-12
    L, K, S = g.argmax
    assert feasible_mask(n, k, np.array(L), np.array(K), np.array(S))


def test_grid_rejects_coarse_step():
    with pytest.raises(ValueError):
        verify_optimality(2, 2, 0.01)


def test_closed_form_point_is_in_grid_polytope():
    for n in (2, 3):
        for k in (2, 3, 4):
            e = solve_exponents(n, k)
            # the strict lambda margin and kappa < 1 - lam both hold at the optimum
            assert feasible_mask(n, k, np.array(float(e.lam)), np.array(float(e.kappa)), np.array(0.5))


def test_rejects_small_dimensions():
    with pytest.raises(ValueError):
        solve_exponents(1, 2)
    with pytest.raises(ValueError):
        verify_optimality(2, 1)


def test_slacks_detect_violation():
    s = constraint_slacks(2, 3, Fraction(1, 2), Fraction(1, 10), Fraction(1, 2))
    assert s["lam_floor"] < 0 and s["time_window"] < 0
