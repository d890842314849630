import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from crwburgers.errors import IndeterminateForm, OutOfRange, RNotFinite
from crwburgers.maxplus import BOTTOM, TOP
from crwburgers.ultradiscrete import (
    UdBurgersFull, UdHistory, inflow_X, inflows, reduce_R, reduced_update, solve_p_burgers,
    solve_p_diffusion, step_ud_burgers_full, step_ud_burgers_reduced, step_ud_diffusion,
    ud_cole_hopf, unreduce_R,
)
from crwburgers.automata import make_state


def full_step_loops(U, V, Vp, L, R):
    """Site-by-site oracle written straight from the min formulas."""
    N = len(U)

    def m(Uf, Vf, j):
        drop = TOP if R == BOTTOM else Vf[j % N] - R
        return min(Uf[(j - 1) % N], L - Uf[j % N], drop)

    U1 = [U[j] + m(U, Vp, j) - m(U, Vp, j + 1) for j in range(N)]
    V1 = [V[j] + m(U, Vp, j) - m(U1, V, j) for j in range(N)]
    return U1, V1


def test_ud_diffusion_examples():
    h = step_ud_diffusion(UdHistory([7, 7, 7], [0, BOTTOM, BOTTOM], BOTTOM))
    np.testing.assert_array_equal(h.Fcurr, [BOTTOM, 0, 0])
    h = step_ud_diffusion(UdHistory([5, 5, 5], [0, 0, 0], 0))
    np.testing.assert_array_equal(h.Fcurr, [5, 5, 5])
    for R in (0, -2, BOTTOM):
        h = step_ud_diffusion(UdHistory([4, 4, 4, 4], [4, 4, 4, 4], R))
        np.testing.assert_array_equal(h.Fcurr, [4, 4, 4, 4])


def test_ud_diffusion_bottom_R_is_two_term_max(rng):
    F = rng.integers(-9, 9, 11).astype(float)
    h = step_ud_diffusion(UdHistory(rng.integers(-9, 9, 11), F, BOTTOM))
    np.testing.assert_array_equal(h.Fcurr, np.maximum(np.roll(F, 1), np.roll(F, -1)))


def test_history_rejects_top_R():
    with pytest.raises(OutOfRange):
        UdHistory([0], [0], TOP)


def test_ud_cole_hopf_examples():
    U, V = ud_cole_hopf([0, 1, 2], [1, 2, 3], 2)
    np.testing.assert_array_equal(U, [2, 2, -1])
    np.testing.assert_array_equal(V, [2, 2, 2])
    U, V = ud_cole_hopf([3, 3, 3], [5, 4, 3], 4)
    np.testing.assert_array_equal(U, [2, 2, 2])
    np.testing.assert_array_equal(V, [4, 3, 2])


def test_ud_cole_hopf_bottom_entries():
    # F(1) = bottom: U(1) = F(2) - bottom = top and U(0) = bottom - F(0) = bottom
    U, _ = ud_cole_hopf([0, BOTTOM, 1], [0, 0, 0], 1)
    assert U[1] == TOP
    assert U[0] == BOTTOM
    with pytest.raises(IndeterminateForm):
        ud_cole_hopf([0, BOTTOM, BOTTOM], [0, 0, 0], 1)


@pytest.mark.parametrize("seed", range(20))
def test_full_step_matches_loop_oracle(seed):
    rng = np.random.default_rng(seed)
    N, L = int(rng.integers(1, 12)), int(rng.integers(1, 5))
    R = BOTTOM if seed % 3 == 0 else float(rng.integers(-3, 4))
    U, V, Vp = rng.integers(0, L + 1, N), rng.integers(-4, 6, N), rng.integers(-4, 6, N)
    got = step_ud_burgers_full(UdBurgersFull(U, V, Vp, L, R))
    U1, V1 = full_step_loops(U.tolist(), V.tolist(), Vp.tolist(), L, R)
    np.testing.assert_array_equal(got.U, U1)
    np.testing.assert_array_equal(got.V, V1)
    np.testing.assert_array_equal(got.Vprev, V)


def test_full_bottom_R_matches_classical_and_ignores_V(rng):
    L = 2
    U = rng.integers(0, L + 1, 15)
    a = step_ud_burgers_full(UdBurgersFull(U, rng.integers(-5, 5, 15), rng.integers(-5, 5, 15), L))
    b = step_ud_burgers_full(UdBurgersFull(U, rng.integers(-5, 5, 15), rng.integers(-5, 5, 15), L))
    Ub, Ua = np.roll(U, 1), np.roll(U, -1)
    classical = U + np.minimum(Ub, L - U) - np.minimum(U, L - Ua)
    np.testing.assert_array_equal(a.U, classical)
    np.testing.assert_array_equal(a.U, b.U)


def test_full_table_row_19():
    # sites (j-1, j, j+1) = (0, 1, 2); V^{n-1} - R equals (Vt_j, Vt_{j+1}) = (1, 0)
    s = UdBurgersFull([1, 0, 0], [0, 0, 0], [0, 1, 0], 1, 0)
    assert step_ud_burgers_full(s).U[1] == 1


def test_full_constant_state():
    for L in (1, 2.5, 4):
        s = UdBurgersFull([L / 2] * 5, [L / 2] * 5, [L / 2] * 5, L, 0)
        np.testing.assert_array_equal(step_ud_burgers_full(s).U, L / 2)


def test_reduce_examples():
    s = UdBurgersFull([0, 1], [3, 3], [3, 3], 1, 2)
    r = reduce_R(s)
    np.testing.assert_array_equal(r.V, [1, 1])
    assert r.R == 0
    back = unreduce_R(r, 2)
    np.testing.assert_array_equal(back.V, s.V)
    np.testing.assert_array_equal(back.Vprev, s.Vprev)
    with pytest.raises(RNotFinite):
        reduce_R(UdBurgersFull([0], [0], [0], 1, BOTTOM))


def test_reduced_form_equivalence_50_steps(rng):
    L, N, R = 3, 16, 2.0
    full = UdBurgersFull(rng.integers(0, L + 1, N), rng.integers(0, 6, N), rng.integers(0, 6, N), L, R)
    red = reduce_R(full)
    U, Vt, VtPrev = red.U, red.V, red.Vprev
    for _ in range(50):
        full = step_ud_burgers_full(full)
        U, Vt_new, _, _ = reduced_update(U, Vt, VtPrev, L)
        VtPrev, Vt = Vt, Vt_new
        np.testing.assert_array_equal(U, full.U)
        np.testing.assert_array_equal(Vt + R, full.V)
        np.testing.assert_array_equal(VtPrev + R, full.Vprev)


def test_reduced_step_on_ca_state(rng):
    s = make_state(rng.integers(0, 3, 9), rng.integers(0, 3, 9), rng.integers(0, 3, 9), 2)
    t = step_ud_burgers_reduced(s)
    U1, Vt1, _, _ = reduced_update(s.U, s.Vt, s.VtPrev, 2)
    np.testing.assert_array_equal(t.U, U1)
    np.testing.assert_array_equal(t.Vt, Vt1)
    np.testing.assert_array_equal(t.VtPrev, s.Vt)
    np.testing.assert_array_equal(t.I0, s.I0)


def test_inflow_examples():
    assert inflow_X([1, 0], [1, 1], 1, 1) == 1
    for rest in ([0, 0, 1], [0, 1, 1], [0, 0, 0]):
        assert inflow_X(rest, [1, 1, 1], 1, 1) == 0
    assert inflow_X([1, 0], [0, 0], 1, 1) == 0
    U, Vt = np.array([2, 0, 1, 3]), np.array([1, 2, 0, 3])
    np.testing.assert_array_equal(inflows(U, Vt, 3), [inflow_X(U, Vt, 3, j) for j in range(4)])


def test_reduced_table_row_10_and_empty_road():
    U1, _, X, _ = reduced_update(np.array([0, 1, 0]), np.zeros(3), np.array([0, 0, 1]), 1)
    assert (X[1], X[2], U1[1]) == (0, 1, 0)
    Vt = np.array([2, 0, 1])
    U1, Vt1, _, _ = reduced_update(np.zeros(3, int), Vt, np.array([1, 1, 1]), 2)
    np.testing.assert_array_equal(U1, 0)
    np.testing.assert_array_equal(Vt1, Vt)


def test_solve_p_examples():
    eps = 0.7
    assert solve_p_diffusion(BOTTOM, eps) == 0.5
    p = solve_p_diffusion(eps * math.log(3), eps)
    assert p == pytest.approx(1 / 3, rel=1e-14)
    assert (1 - 2 * p) / p**2 == pytest.approx(3, rel=1e-12)
    assert solve_p_burgers(BOTTOM, eps) == 0.5
    p = solve_p_burgers(eps * math.log(2), eps)
    assert p == pytest.approx(0.25, rel=1e-14)
    assert (1 - 2 * p) / p == pytest.approx(2, rel=1e-12)
    assert solve_p_burgers(-1.0, 1e-3) == pytest.approx(0.5)


def test_solve_p_diffusion_monotone_to_zero():
    ps = [solve_p_diffusion(R, 1.0) for R in (0, 5, 20, 80, 300)]
    assert all(a > b for a, b in zip(ps, ps[1:]))
    assert 0 < ps[-1] < 1e-30


@settings(max_examples=100)
@given(st.floats(-5, 5), st.floats(0.01, 5))
def test_solve_p_back_substitution(R, eps):
    K = math.exp(R / eps)
    p = solve_p_diffusion(R, eps)
    assert 0 < p <= 0.5
    assert (1 - 2 * p) / p**2 == pytest.approx(K, rel=1e-6)
    q = solve_p_burgers(R, eps)
    assert (1 - 2 * q) / q == pytest.approx(K, rel=1e-6)


@pytest.mark.parametrize("seed", range(5))
def test_cole_hopf_commutation_maxplus(seed):
    rng = np.random.default_rng(100 + seed)
    N, L = int(rng.integers(2, 33)), int(rng.integers(1, 5))
    R = BOTTOM if seed == 0 else float(rng.integers(-3, 4))
    h = UdHistory(rng.integers(-5, 6, N), rng.integers(-5, 6, N), R)
    h1 = step_ud_diffusion(h)
    U, V = ud_cole_hopf(h.Fcurr, h1.Fcurr, L)
    _, Vp = ud_cole_hopf(h.Fprev, h.Fcurr, L)
    s = UdBurgersFull(U, V, Vp, L, R)
    for _ in range(50):
        s = step_ud_burgers_full(s)
        h1 = step_ud_diffusion(h1)
        U_ref, V_ref = ud_cole_hopf(h1.Fprev, h1.Fcurr, L)
        np.testing.assert_array_equal(s.U, U_ref)
        np.testing.assert_array_equal(s.V, V_ref)
