"""Max-plus evolutions: CRW-type ultradiscrete diffusion, its Cole-Hopf
transform and the two forms (with and without R) of the ultradiscrete
Burgers system.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .errors import IndeterminateForm, LengthMismatch, OutOfRange, RNotFinite
from .maxplus import BOTTOM, TOP, ahead, behind, ext_add, ext_sub

__all__ = [
    "UdHistory", "step_ud_diffusion", "ud_cole_hopf",
    "UdBurgersFull", "step_ud_burgers_full", "reduce_R", "unreduce_R",
    "inflow_X", "inflows", "reduced_update", "step_ud_burgers_reduced",
    "solve_p_diffusion", "solve_p_burgers", "log_p_diffusion", "log_p_burgers",
]


def _ext_field(values, name):
    arr = np.array(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-D array")
    if np.any(np.isnan(arr)):
        raise IndeterminateForm(f"{name} contains NaN", site=int(np.flatnonzero(np.isnan(arr))[0]))
    arr.flags.writeable = False
    return arr


def _check_R(R):
    R = float(R)
    if math.isnan(R) or R == TOP:
        raise OutOfRange(f"R must be finite or -inf, got {R}")
    return R


@dataclass(frozen=True)
class UdHistory:
    Fprev: np.ndarray
    Fcurr: np.ndarray
    R: float = BOTTOM

    def __post_init__(self):
        a = _ext_field(self.Fprev, "Fprev")
        b = _ext_field(self.Fcurr, "Fcurr")
        if a.size != b.size:
            raise LengthMismatch(f"layers have lengths {a.size} and {b.size}")
        object.__setattr__(self, "Fprev", a)
        object.__setattr__(self, "Fcurr", b)
        object.__setattr__(self, "R", _check_R(self.R))


def step_ud_diffusion(h: UdHistory) -> UdHistory:
    """``F[n+1, j] = max(F[n, j-1], F[n, j+1], R + F[n-1, j])``."""
    F = h.Fcurr
    memory = ext_add(h.R, h.Fprev)
    nxt = np.maximum(np.maximum(behind(F), ahead(F)), memory)
    return UdHistory(F, nxt, h.R)


def ud_cole_hopf(Fcurr, Fnext, L: float) -> tuple[np.ndarray, np.ndarray]:
    """``U = F[j+1] - F[j] + L/2`` and ``V = F'[j] - F[j] + L/2``.

    A site where both operands are ``-inf`` raises IndeterminateForm.
    """
    Fcurr = np.asarray(Fcurr, dtype=float)
    Fnext = np.asarray(Fnext, dtype=float)
    if Fcurr.shape != Fnext.shape:
        raise LengthMismatch("layers differ in length")
    half = 0.5 * L
    U = ext_sub(ahead(Fcurr), Fcurr) + half
    V = ext_sub(Fnext, Fcurr) + half
    return U, V


@dataclass(frozen=True)
class UdBurgersFull:
    """``(U^n, V^n, V^{n-1})`` with capacity ``L`` and memory weight ``R``."""

    U: np.ndarray
    V: np.ndarray
    Vprev: np.ndarray
    L: float
    R: float = BOTTOM

    def __post_init__(self):
        arrays = [_ext_field(getattr(self, k), k) for k in ("U", "V", "Vprev")]
        if len({a.size for a in arrays}) != 1:
            raise LengthMismatch("U, V, Vprev must have equal length")
        if not self.L > 0:
            raise OutOfRange(f"capacity L must be positive, got {self.L}")
        for k, a in zip(("U", "V", "Vprev"), arrays):
            object.__setattr__(self, k, a)
        object.__setattr__(self, "R", _check_R(self.R))


def _full_inflow(U, Vp, L, R):
    # min(U_{j-1}, L - U_j, Vp_j - R); -inf R makes the last term +inf
    return np.minimum(np.minimum(behind(U), ext_sub(L, U)), ext_sub(Vp, R))


def step_ud_burgers_full(s: UdBurgersFull) -> UdBurgersFull:
    """One step of the ultradiscrete Burgers system with parameter ``R``.

    ``U`` is advanced first and the ``V`` update reads the new ``U``.
    """
    m_old = _full_inflow(s.U, s.Vprev, s.L, s.R)
    U_new = ext_sub(ext_add(s.U, m_old), ahead(m_old))
    m_new = _full_inflow(U_new, s.V, s.L, s.R)
    V_new = ext_sub(ext_add(s.V, m_old), m_new)
    return UdBurgersFull(U_new, V_new, s.V, s.L, s.R)


def reduce_R(s: UdBurgersFull) -> UdBurgersFull:
    """Absorb a finite ``R`` into the V fields (``V~ = V - R``) and set R to 0."""
    if not math.isfinite(s.R):
        raise RNotFinite("R = -inf cannot be absorbed; step the full form directly")
    return dataclasses.replace(s, V=s.V - s.R, Vprev=s.Vprev - s.R, R=0.0)


def unreduce_R(s: UdBurgersFull, R: float) -> UdBurgersFull:
    """Inverse of :func:`reduce_R` for the original ``R``."""
    if s.R != 0.0:
        raise OutOfRange("state is not in reduced form")
    if not math.isfinite(R):
        raise RNotFinite("R must be finite")
    return dataclasses.replace(s, V=s.V + R, Vprev=s.Vprev + R, R=float(R))


def inflow_X(U, Vt, L, j: int):
    """Cars entering site ``j``: ``min(U[j-1], L - U[j], Vt[j])``."""
    N = len(U)
    return min(U[(j - 1) % N], L - U[j % N], Vt[j % N])


def inflows(U, VtPrev, L):
    """Vector of all ``X_j``; works on the last axis of batched arrays."""
    return np.minimum(np.minimum(behind(U), L - U), VtPrev)


def reduced_update(U, Vt, VtPrev, L):
    """Arrays-in, arrays-out reduced step.

    Returns ``(U', Vt', X, X')`` where ``X`` are the inflows used for this
    step and ``X'`` those that the next step will use.
    """
    X = inflows(U, VtPrev, L)
    U_new = U + X - ahead(X)
    X_new = inflows(U_new, Vt, L)
    Vt_new = Vt + X - X_new
    return U_new, Vt_new, X, X_new


def step_ud_burgers_reduced(s):
    """Reduced (R-free) step on any state carrying ``U, Vt, VtPrev, L``."""
    U_new, Vt_new, _, _ = reduced_update(s.U, s.Vt, s.VtPrev, s.L)
    return dataclasses.replace(s, U=U_new, Vt=Vt_new, VtPrev=s.Vt)


def _check_eps(eps):
    if not eps > 0:
        raise OutOfRange(f"eps must be positive, got {eps}")


def log_p_diffusion(R, eps) -> float:
    """``log p`` for the root of ``(1 - 2p)/p^2 = exp(R/eps)`` in (0, 1/2]."""
    _check_eps(eps)
    R = _check_R(R)
    if R == BOTTOM:
        return -math.log(2.0)
    log_k = R / eps
    # p = 1 / (1 + sqrt(1 + K))
    log_sqrt = 0.5 * np.logaddexp(0.0, log_k)
    return float(-np.logaddexp(0.0, log_sqrt))


def log_p_burgers(R, eps) -> float:
    """``log p`` for ``(1 - 2p)/p = exp(R/eps)``, i.e. ``p = 1/(K + 2)``."""
    _check_eps(eps)
    R = _check_R(R)
    if R == BOTTOM:
        return -math.log(2.0)
    return float(-np.logaddexp(math.log(2.0), R / eps))


def solve_p_diffusion(R, eps) -> float:
    return math.exp(log_p_diffusion(R, eps))


def solve_p_burgers(R, eps) -> float:
    return math.exp(log_p_burgers(R, eps))
