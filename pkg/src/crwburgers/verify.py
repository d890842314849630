"""Self-check suites behind ``crwburgers verify``.

Every suite returns a dict with ``suite``, ``passed``, ``checked`` and, on
failure, the first failing instance under ``failure``.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .automata import make_state, rule184_step, run, table1_row
from .discrete import BurgersState, ScalarHistory, cole_hopf, step_burgers, step_crw_scalar
from .errors import InvariantViolation
from .limit import verify_ud_limit
from .maxplus import BOTTOM, make_rng
from .traffic import check_conservation
from .ultradiscrete import UdBurgersFull, UdHistory, step_ud_burgers_full, step_ud_diffusion, ud_cole_hopf

SUITES = ("cole-hopf", "ud-limit", "theorems", "table1", "rule184", "conservation")

# U[j-1] U[j] U[j+1] Vt[j] Vt[j+1] | X_j X_{j+1} | U'[j] | case
TABLE1 = """
0 0 0 0 0 0 0 0 I
0 0 0 0 1 0 0 0 I
0 0 0 1 0 0 0 0 I
0 0 0 1 1 0 0 0 I
0 0 1 0 0 0 0 0 I
0 0 1 0 1 0 0 0 I
0 0 1 1 0 0 0 0 I
0 0 1 1 1 0 0 0 I
0 1 0 0 0 0 0 1 VI
0 1 0 0 1 0 1 0 IV
0 1 0 1 0 0 0 1 VI
0 1 0 1 1 0 1 0 IV
0 1 1 0 0 0 0 1 II
0 1 1 0 1 0 0 1 II
0 1 1 1 0 0 0 1 II
0 1 1 1 1 0 0 1 II
1 0 0 0 0 0 0 0 V
1 0 0 0 1 0 0 0 V
1 0 0 1 0 1 0 1 III
1 0 0 1 1 1 0 1 III
1 0 1 0 0 0 0 0 V
1 0 1 0 1 0 0 0 V
1 0 1 1 0 1 0 1 III
1 0 1 1 1 1 0 1 III
1 1 0 0 0 0 0 1 VI
1 1 0 0 1 0 1 0 IV
1 1 0 1 0 0 0 1 VI
1 1 0 1 1 0 1 0 IV
1 1 1 0 0 0 0 1 II
1 1 1 0 1 0 0 1 II
1 1 1 1 0 0 0 1 II
1 1 1 1 1 0 0 1 II
"""


def table1_reference():
    rows = []
    for line in TABLE1.strip().splitlines():
        *nums, case = line.split()
        nums = [int(t) for t in nums]
        rows.append((tuple(nums[:5]), nums[5], nums[6], nums[7], case))
    return rows


def _result(suite, checked, failure=None, **extra):
    out = {"suite": suite, "passed": failure is None, "checked": checked, "failure": failure}
    out.update(extra)
    return out


def suite_table1(**_):
    rows = table1_reference()
    for no, (args, xj, xj1, u_next, case) in enumerate(rows, start=1):
        got = table1_row(*args)
        if (got.case.value, got.X_j, got.X_j1, got.U_next) != (case, xj, xj1, u_next):
            return _result("table1", no, {"row": no, "inputs": args,
                                          "expected": [case, xj, xj1, u_next],
                                          "got": [got.case.value, got.X_j, got.X_j1, got.U_next]})
    return _result("table1", len(rows))


def suite_rule184(N=10, steps=20, **_):
    """Full-form dynamics with R = -inf and L = 1 against rule 184, all 2^N fields."""
    fields = np.array(list(itertools.product((0, 1), repeat=N)), dtype=float)
    zeros = np.zeros(N)
    for bits in fields:
        s = UdBurgersFull(bits, zeros, zeros, 1.0, BOTTOM)
        ref = bits.astype(np.int64)
        for n in range(steps):
            s = step_ud_burgers_full(s)
            ref = rule184_step(ref)
            if not np.array_equal(s.U, ref):
                return _result("rule184", None, {"initial": bits.astype(int).tolist(), "step": n + 1})
    return _result("rule184", len(fields))


def _random_ca_instance(rng, max_N=32, max_L=4, real=False):
    N = int(rng.integers(2, max_N + 1))
    L = int(rng.integers(1, max_L + 1))
    if real:
        L = float(L) * rng.uniform(0.5, 1.0)
        U0 = rng.uniform(0, L, N)
        if rng.random() < 0.5:
            total = rng.uniform(0, L, N)
            split = rng.uniform(0, 1, N)
            return U0, total * split, total * (1 - split), L
        return U0, rng.uniform(0, 2 * L, N), rng.uniform(0, 2 * L, N), L
    U0 = rng.integers(0, L + 1, N)
    if rng.random() < 0.5:
        total = rng.integers(0, L + 1, N)
        Vm1 = rng.integers(0, total + 1)
        return U0, total - Vm1, Vm1, L
    return U0, rng.integers(0, 2 * L + 1, N), rng.integers(0, 2 * L + 1, N), L


def suite_theorems(seed=0, n_int=1000, n_real=200, steps=100, **_):
    rng = make_rng(seed)
    for k in range(n_int + n_real):
        U0, Vt0, Vm1, L = _random_ca_instance(rng, real=k >= n_int)
        try:
            run(make_state(U0, Vt0, Vm1, L), steps)
        except InvariantViolation as exc:
            return _result("theorems", k, {"U0": np.asarray(U0).tolist(), "Vt0": np.asarray(Vt0).tolist(),
                                           "VtMinus1": np.asarray(Vm1).tolist(), "L": L,
                                           "error": str(exc)})
    return _result("theorems", n_int + n_real)


def suite_conservation(seed=0, n=100, steps=1000, **_):
    rng = make_rng(seed + 1)
    for k in range(n):
        U0, Vt0, Vm1, L = _random_ca_instance(rng)
        traj = run(make_state(U0, Vt0, Vm1, L), steps)
        if not check_conservation(traj):
            return _result("conservation", k, {"U0": np.asarray(U0).tolist(), "L": L})
    return _result("conservation", n)


def _rel_err(a, b):
    return float(np.max(np.abs(a - b) / np.abs(b)))


def suite_cole_hopf(seed=0, n=100, steps=50, tol=1e-10, **_):
    """Transform-then-step against step-then-transform, discrete and max-plus."""
    rng = make_rng(seed + 2)
    worst = 0.0
    for k in range(n):
        N = int(rng.integers(2, 33))
        p = float(rng.uniform(1e-3, 0.5)) if k else 0.5
        f_prev, f_curr = rng.uniform(0.5, 2.0, N), rng.uniform(0.5, 2.0, N)
        h = ScalarHistory(f_prev, f_curr, p)
        h1 = step_crw_scalar(h)
        state = BurgersState.from_history(f_prev, f_curr, p)
        for n_ in range(steps):
            state = step_burgers(state)
            h, h1 = h1, step_crw_scalar(h1)
            u_ref, v_ref = cole_hopf(h1.fPrev, h1.fCurr)
            err = max(_rel_err(state.u, u_ref), _rel_err(state.v, v_ref))
            worst = max(worst, err)
            if err > tol:
                return _result("cole-hopf", k, {"kind": "discrete", "p": p, "N": N,
                                                "step": n_ + 1, "rel_err": err})
    for k in range(n):
        N = int(rng.integers(2, 33))
        L = int(rng.integers(1, 5))
        R = BOTTOM if k % 5 == 0 else float(rng.integers(-3, 4))
        h = UdHistory(rng.integers(-5, 6, N), rng.integers(-5, 6, N), R)
        h1 = step_ud_diffusion(h)
        U, V = ud_cole_hopf(h.Fcurr, h1.Fcurr, L)
        _, Vprev = ud_cole_hopf(h.Fprev, h.Fcurr, L)
        state = UdBurgersFull(U, V, Vprev, L, R)
        for n_ in range(steps):
            state = step_ud_burgers_full(state)
            h1 = step_ud_diffusion(h1)
            U_ref, V_ref = ud_cole_hopf(h1.Fprev, h1.Fcurr, L)
            if not (np.array_equal(state.U, U_ref) and np.array_equal(state.V, V_ref)):
                return _result("cole-hopf", n + k, {"kind": "ultradiscrete", "N": N, "L": L,
                                                    "R": R, "step": n_ + 1})
    return _result("cole-hopf", 2 * n, worst_discrete_rel_err=worst)


def suite_ud_limit(seed=0, n=20, **_):
    rng = make_rng(seed + 3)
    reports = []
    for k in range(n):
        N = int(rng.integers(3, 33))
        R = BOTTOM if k % 4 == 0 else float(rng.integers(-3, 4))
        diff = verify_ud_limit("diffusion", (rng.integers(-10, 11, N), rng.integers(-10, 11, N)), R)
        L = int(rng.integers(1, 5))
        burg = verify_ud_limit("burgers", (rng.integers(0, L + 1, N), rng.integers(-3, 6, N),
                                           rng.integers(-3, 6, N), L), R)
        for rep in (diff, burg):
            final = rep.maxAbsError[-1]
            bound = rep.epsilons[-1] * math.log(3.0) + 1e-6
            reports.append(rep.C)
            if not rep.converged or final > bound:
                return _result("ud-limit", k, {"target": rep.target, "errors": rep.maxAbsError,
                                               "R": R, "N": N})
    return _result("ud-limit", 2 * n, max_C=max(reports))


RUNNERS = {
    "cole-hopf": suite_cole_hopf,
    "ud-limit": suite_ud_limit,
    "theorems": suite_theorems,
    "table1": suite_table1,
    "rule184": suite_rule184,
    "conservation": suite_conservation,
}


def run_suites(names, seed=0):
    if "all" in names:
        names = SUITES
    return [RUNNERS[name](seed=seed) for name in names]
