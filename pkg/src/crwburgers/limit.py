"""Numerical check that one discrete step approaches one max-plus step as
``eps -> 0``.

The discrete side is evaluated entirely in the log domain: fields enter as
``F/eps`` (plus ``n log p`` for the diffusion substitution), sums of
exponentials go through a max-shifted log-sum-exp, and the result is mapped
back with ``eps * log``.  Nothing is ever exponentiated at full scale, so the
schedule reaches ``eps = 0.01`` with fields of size 10 or more.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import OutOfRange, OverflowGuard
from .maxplus import BOTTOM, ahead, behind
from .ultradiscrete import (
    UdBurgersFull,
    UdHistory,
    log_p_burgers,
    log_p_diffusion,
    step_ud_burgers_full,
    step_ud_diffusion,
)

DEFAULT_EPSILONS = (1.0, 0.5, 0.25, 0.1, 0.05, 0.02, 0.01)
SLACK = 1e-9
# errors this small are float noise; the exponentially fast tie-free
# convergence reaches it well before the end of the default schedule
ROUNDOFF_FLOOR = 1e-12

__all__ = ["LimitReport", "verify_ud_limit", "discrete_diffusion_step_log",
           "discrete_burgers_step_log", "DEFAULT_EPSILONS"]


@dataclass
class LimitReport:
    target: str
    epsilons: list
    maxAbsError: list
    converged: bool
    C: float
    bound_factor: float = math.log(3.0)
    notes: dict = field(default_factory=dict)

    def to_json(self, path=None) -> str:
        text = json.dumps(asdict(self), indent=2, sort_keys=True)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text + "\n")
        return text

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["eps", "max_abs_error", "bound"])
            for e, err in zip(self.epsilons, self.maxAbsError):
                w.writerow([repr(e), repr(err), repr(e * self.bound_factor)])


def _lse(*terms):
    """Sitewise ``log(sum(exp(t)))`` with a max shift; all ``-inf`` gives ``-inf``."""
    stack = np.stack(np.broadcast_arrays(*terms))
    m = np.max(stack, axis=0)
    if np.any(m == np.inf) or np.any(np.isnan(stack)):
        raise OverflowGuard("log-domain term left the finite range")
    safe_m = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(invalid="ignore"):
        shifted = np.exp(stack - safe_m)
    shifted = np.where(np.isfinite(stack), shifted, 0.0)
    with np.errstate(divide="ignore"):
        out = safe_m + np.log(np.sum(shifted, axis=0))
    return np.where(np.isfinite(m), out, -np.inf)


def _guard(arr, what):
    if np.any(np.isnan(arr)) or np.any(arr == np.inf):
        raise OverflowGuard(f"{what} left the shifted log domain")
    return arr


def discrete_diffusion_step_log(Fprev, Fcurr, R, eps, n=1):
    """One step of the three-term CRW diffusion recurrence for
    ``f^k = p^k exp(F^k/eps)``, returned as the new ``F`` layer."""
    Fprev = np.asarray(Fprev, dtype=float)
    Fcurr = np.asarray(Fcurr, dtype=float)
    lp = log_p_diffusion(R, eps)
    # 1 - 2p = K p^2 with log K = R/eps
    log_1m2p = -np.inf if R == BOTTOM else R / eps + 2.0 * lp
    lf_prev = (n - 1) * lp + Fprev / eps
    lf_curr = n * lp + Fcurr / eps
    lf_next = _lse(
        lp + behind(lf_curr),
        lp + ahead(lf_curr),
        log_1m2p + lf_prev,
    )
    _guard(lf_next, "diffusion layer")
    return eps * (lf_next - (n + 1) * lp)


def discrete_burgers_step_log(U, V, Vprev, L, R, eps, U_next=None):
    """One step of the CRW-type discrete Burgers system for
    ``u = exp((U - L/2)/eps)``, ``v = exp((V - L/2)/eps)``.

    ``U_next`` optionally replaces the discrete ``u^{n+1}`` fed into the
    temporal-ratio line, which isolates that line's own limit.  Returns the
    new ``(U, V)`` on the max-plus scale.
    """
    U = np.asarray(U, dtype=float)
    V = np.asarray(V, dtype=float)
    Vprev = np.asarray(Vprev, dtype=float)
    half = 0.5 * L
    lp = log_p_burgers(R, eps)
    # 1 - 2p = K p with log K = R/eps
    log_1m2p = -np.inf if R == BOTTOM else R / eps + lp
    lu = (U - half) / eps
    lv = (V - half) / eps
    lvp = (Vprev - half) / eps

    def denominator(lu_, lvp_):
        return _lse(lp + lu_, lp - behind(lu_), log_1m2p - lvp_)

    den_old = denominator(lu, lvp)
    num_u = _lse(lp + ahead(lu), lp - lu, log_1m2p - ahead(lvp))
    lu_new = _guard(lu + num_u - den_old, "spatial ratio")
    lu_feed = lu_new if U_next is None else (np.asarray(U_next, dtype=float) - half) / eps
    lv_new = _guard(lv + denominator(lu_feed, lv) - den_old, "temporal ratio")
    return eps * lu_new + half, eps * lv_new + half


def _max_abs_diff(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    both_bottom = (a == -np.inf) & (b == -np.inf)
    with np.errstate(invalid="ignore"):
        d = np.abs(np.where(both_bottom, 0.0, a - b))
    return float(np.max(d))


def _decreasing_to_floor(errors, floor=ROUNDOFF_FLOOR):
    """Strict decrease until the first error at or below ``floor``; every
    later error must stay at or below it."""
    for a, b in zip(errors, errors[1:]):
        if a <= floor:
            if b > floor:
                return False
        elif not b < a:
            return False
    return True


def verify_ud_limit(target, ud_inputs, R, epsilons=DEFAULT_EPSILONS, n=1) -> LimitReport:
    """Compare one discrete step at each ``eps`` with one max-plus step.

    target : ``"diffusion"`` with ``ud_inputs = (Fprev, Fcurr)``, or
        ``"burgers"`` with ``ud_inputs = (U, V, Vprev, L)``.
    """
    eps_list = [float(e) for e in epsilons]
    if not eps_list or any(e <= 0 for e in eps_list):
        raise OutOfRange("epsilons must be positive")
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise OutOfRange("epsilons must be strictly decreasing")

    errors = []
    if target == "diffusion":
        Fprev, Fcurr = ud_inputs
        exact = step_ud_diffusion(UdHistory(Fprev, Fcurr, R)).Fcurr
        for eps in eps_list:
            approx = discrete_diffusion_step_log(Fprev, Fcurr, R, eps, n=n)
            errors.append(_max_abs_diff(approx, exact))
    elif target == "burgers":
        U, V, Vprev, L = ud_inputs
        nxt = step_ud_burgers_full(UdBurgersFull(U, V, Vprev, L, R))
        for eps in eps_list:
            U_d, V_d = discrete_burgers_step_log(U, V, Vprev, L, R, eps, U_next=nxt.U)
            errors.append(max(_max_abs_diff(U_d, nxt.U), _max_abs_diff(V_d, nxt.V)))
    else:
        raise OutOfRange(f"unknown target {target!r}")

    decreasing = _decreasing_to_floor(errors)
    within = all(err <= eps * math.log(3.0) + SLACK for eps, err in zip(eps_list, errors))
    C = max(err / eps for eps, err in zip(eps_list, errors))
    return LimitReport(
        target=target,
        epsilons=eps_list,
        maxAbsError=errors,
        converged=bool(decreasing and within),
        C=C,
        notes={"n": n, "R": "-inf" if R == BOTTOM else float(R)},
    )
