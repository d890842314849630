"""The reduced ultradiscrete Burgers system read as a cellular automaton.

State variables are the car counts ``U`` (capacity ``L`` per site) and the
maximum inflows ``Vt``.  :func:`run` checks the proved bounds after every
step, so a violation always points at an implementation fault.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvariantViolation, LengthMismatch, NonBinary, OutOfRange
from .maxplus import ahead, behind
from .ultradiscrete import inflows, reduced_update

__all__ = [
    "UdBurgersState", "make_state", "Trajectory", "run", "evolve_batch",
    "rule184_step", "CaseLabel", "Table1Row", "classify_case", "table1_row",
    "check_real_valued_bounds", "REAL_SLACK",
]

REAL_SLACK = 1e-9

THM1 = "thm1"
THM2 = "thm2"


def _is_integral(*values) -> bool:
    for v in values:
        a = np.asarray(v, dtype=float)
        if not np.all(np.isfinite(a)) or not np.all(a == np.round(a)):
            return False
    return True


@dataclass(frozen=True)
class UdBurgersState:
    """CA state at time ``n``: ``U^n``, ``Vt^n`` and ``Vt^{n-1}``.

    Build it with :func:`make_state`, which validates the initial data and
    freezes the per-site bound ``I0``.
    """

    U: np.ndarray
    Vt: np.ndarray
    VtPrev: np.ndarray
    L: float
    I0: np.ndarray
    regime: str = THM2
    integral: bool = False

    @property
    def N(self) -> int:
        return self.U.shape[-1]

    @property
    def M(self):
        return self.I0.max()


def make_state(U0, Vt0, VtMinus1, L) -> UdBurgersState:
    """Validate initial data and compute ``I0 = min(U[j-1], L-U[j], Vt^{-1}[j]) + Vt^0[j]``.

    The regime is ``"thm1"`` when ``Vt^{-1} + Vt^0 <= L`` holds everywhere
    (then ``Vt`` stays within ``[0, L]``) and ``"thm2"`` otherwise (then
    ``Vt`` stays within ``[0, I0]``).
    """
    integral = _is_integral(U0, Vt0, VtMinus1, L)
    dtype = np.int64 if integral else float
    U0 = np.array(U0, dtype=dtype)
    Vt0 = np.array(Vt0, dtype=dtype)
    VtMinus1 = np.array(VtMinus1, dtype=dtype)
    L = int(L) if integral else float(L)
    if not (U0.shape == Vt0.shape == VtMinus1.shape) or U0.ndim != 1:
        raise LengthMismatch("U0, Vt0 and VtMinus1 must be 1-D arrays of equal length")
    if U0.size == 0:
        raise OutOfRange("need at least one site")
    if not L > 0:
        raise OutOfRange(f"capacity L must be positive, got {L}")
    for name, arr, hi in (("U0", U0, L), ("Vt0", Vt0, None), ("VtMinus1", VtMinus1, None)):
        bad = ~np.isfinite(arr.astype(float)) | (arr < 0)
        if hi is not None:
            bad |= arr > hi
        if np.any(bad):
            j = int(np.flatnonzero(bad)[0])
            raise OutOfRange(f"{name}[{j}] = {arr[j]} outside the admissible range", site=j)
    regime = THM1 if np.all(VtMinus1 + Vt0 <= L) else THM2
    I0 = inflows(U0, VtMinus1, L) + Vt0
    for arr in (U0, Vt0, VtMinus1, I0):
        arr.flags.writeable = False
    return UdBurgersState(U0, Vt0, VtMinus1, L, I0, regime, integral)


@dataclass(frozen=True)
class Trajectory:
    """Snapshots ``U[n], Vt[n]`` for ``n = 0..steps`` and inflows ``X[n]``.

    ``X[n][j] = min(U[n][j-1], L - U[n][j], Vt[n-1][j])`` is the inflow used
    in the step ``n -> n+1``.
    """

    U: np.ndarray
    Vt: np.ndarray
    X: np.ndarray
    VtMinus1: np.ndarray
    L: float
    I0: np.ndarray
    regime: str

    @property
    def steps(self) -> int:
        return self.U.shape[0] - 1

    @property
    def N(self) -> int:
        return self.U.shape[1]

    @property
    def mass(self) -> np.ndarray:
        return self.U.sum(axis=1)

    def diagnostics(self) -> dict:
        return {
            "mass": self.mass,
            "U_min": self.U.min(axis=1),
            "U_max": self.U.max(axis=1),
            "Vt_min": self.Vt.min(axis=1),
            "Vt_max": self.Vt.max(axis=1),
        }

    def flows(self) -> np.ndarray:
        """Per-step flow ``sum_j X[n][j] / (N L)``."""
        return self.X.sum(axis=1) / (self.N * self.L)


def _check_bounds(U, Vt, X, I0, L, regime, tol, step):
    """Raise InvariantViolation if the proved bounds fail anywhere."""
    Vt_hi = np.minimum(I0, L) if regime == THM1 else I0
    if tol == 0:
        fast_ok = (U.min() >= 0 and U.max() <= L and Vt.min() >= 0
                   and np.all(Vt <= Vt_hi) and np.array_equal(Vt, I0 - X))
    else:
        fast_ok = (U.min() >= -tol and U.max() <= L + tol and Vt.min() >= -tol
                   and np.all(Vt <= Vt_hi + tol) and np.all(np.abs(Vt - (I0 - X)) <= tol))
    if fast_ok:
        return
    checks = [
        ("U >= 0", U >= -tol),
        ("U <= L", U <= L + tol),
        ("Vt >= 0", Vt >= -tol),
        ("Vt <= I0", Vt <= I0 + tol),
        ("Vt == I0 - X", np.abs(Vt - (I0 - X)) <= tol),
    ]
    if regime == THM1:
        checks.append(("Vt <= L", Vt <= L + tol))
    for label, ok in checks:
        if not np.all(ok):
            idx = np.argwhere(~ok)[0]
            j = int(idx[-1])
            sel = tuple(idx[:-1])
            raise InvariantViolation(
                f"{label} violated at step {step}, site {j}",
                context={
                    "step": step, "site": j, "check": label, "regime": regime,
                    "U": np.asarray(U[sel]).tolist(), "Vt": np.asarray(Vt[sel]).tolist(),
                    "X": np.asarray(X[sel]).tolist(), "I0": np.asarray(I0).tolist(), "L": L,
                },
            )


def run(s: UdBurgersState, steps: int) -> Trajectory:
    """Iterate the reduced system ``steps`` times, checking bounds each step."""
    if steps < 0:
        raise OutOfRange("steps must be >= 0")
    tol = 0 if s.integral else REAL_SLACK
    N = s.N
    dtype = s.U.dtype
    Us = np.empty((steps + 1, N), dtype=dtype)
    Vs = np.empty((steps + 1, N), dtype=dtype)
    Xs = np.empty((steps + 1, N), dtype=dtype)
    U, Vt, VtPrev = s.U, s.Vt, s.VtPrev
    X = inflows(U, VtPrev, s.L)
    Us[0], Vs[0], Xs[0] = U, Vt, X
    for n in range(1, steps + 1):
        U, Vt_new, _, X = reduced_update(U, Vt, VtPrev, s.L)
        VtPrev, Vt = Vt, Vt_new
        _check_bounds(U, Vt, X, s.I0, s.L, s.regime, tol, n)
        Us[n], Vs[n], Xs[n] = U, Vt, X
    return Trajectory(Us, Vs, Xs, s.VtPrev, s.L, s.I0, s.regime)


def evolve_batch(U0, Vt0, VtMinus1, L, steps: int, check: bool = True) -> np.ndarray:
    """Run many independent rings at once (leading axis = sample).

    Returns the per-step flows, shape ``(samples, steps + 1)``; column ``n``
    is ``sum_j X[n][j] / (N L)``.
    """
    U = np.asarray(U0)
    Vt = np.asarray(Vt0)
    VtPrev = np.broadcast_to(np.asarray(VtMinus1), U.shape)
    integral = _is_integral(U, Vt, VtPrev, L)
    N = U.shape[-1]
    I0 = inflows(U, VtPrev, L) + Vt
    regime = THM1 if np.all(VtPrev + Vt <= L) else THM2
    tol = 0 if integral else REAL_SLACK
    flows = np.empty(U.shape[:-1] + (steps + 1,))
    X = inflows(U, VtPrev, L)
    flows[..., 0] = X.sum(axis=-1) / (N * L)
    for n in range(1, steps + 1):
        U, Vt_new, _, X = reduced_update(U, Vt, VtPrev, L)
        VtPrev, Vt = Vt, Vt_new
        if check:
            _check_bounds(U, Vt, X, I0, L, regime, tol, n)
        flows[..., n] = X.sum(axis=-1) / (N * L)
    return flows


_RULE = 184


def rule184_step(U) -> np.ndarray:
    """Elementary CA rule 184 by truth-table lookup (periodic ring)."""
    U = np.asarray(U)
    if not np.all((U == 0) | (U == 1)):
        raise NonBinary("rule 184 needs entries in {0, 1}")
    b = U.astype(np.int64)
    idx = 4 * behind(b) + 2 * b + ahead(b)
    return (_RULE >> idx) & 1


class CaseLabel(str, enum.Enum):
    I = "I"        # no car at j-1 or j
    II = "II"      # cars at j and j+1, the one at j is blocked
    III = "III"    # car at j-1 moves into empty j
    IV = "IV"      # car at j moves into empty j+1
    V = "V"        # car at j-1 held back by Vt_j = 0
    VI = "VI"      # car at j held back by Vt_{j+1} = 0

    def __str__(self):
        return self.value


class Table1Row(NamedTuple):
    case: CaseLabel
    X_j: int
    X_j1: int
    U_next: int


def _binary_args(*args):
    out = []
    for a in args:
        if a not in (0, 1):
            raise NonBinary(f"expected 0 or 1, got {a!r}")
        out.append(int(a))
    return out


def classify_case(u_left, u_mid, u_right, vt_mid, vt_right) -> CaseLabel:
    """Case label of a binary neighbourhood at ``L = 1``.

    Arguments are ``U[j-1], U[j], U[j+1], Vt^{n-1}[j], Vt^{n-1}[j+1]``.
    """
    a, b, c, v, w = _binary_args(u_left, u_mid, u_right, vt_mid, vt_right)
    if b == 0:
        if a == 0:
            return CaseLabel.I
        return CaseLabel.III if v == 1 else CaseLabel.V
    if c == 1:
        return CaseLabel.II
    return CaseLabel.IV if w == 1 else CaseLabel.VI


def table1_row(u_left, u_mid, u_right, vt_mid, vt_right) -> Table1Row:
    """Case label together with ``X_j``, ``X_{j+1}`` and ``U[j]`` after the step."""
    a, b, c, v, w = _binary_args(u_left, u_mid, u_right, vt_mid, vt_right)
    x_j = min(a, 1 - b, v)
    x_j1 = min(b, 1 - c, w)
    return Table1Row(classify_case(a, b, c, v, w), x_j, x_j1, b + x_j - x_j1)


def check_real_valued_bounds(s: UdBurgersState, steps: int) -> dict:
    """Run a (typically non-integer) state and report the observed ranges.

    The same assertions as :func:`run` apply; a violation raises.
    """
    traj = run(s, steps)
    return {
        "steps": steps,
        "regime": traj.regime,
        "L": traj.L,
        "M": float(np.max(traj.I0)),
        "U_range": (float(traj.U.min()), float(traj.U.max())),
        "Vt_range": (float(traj.Vt.min()), float(traj.Vt.max())),
        "max_identity_error": float(np.max(np.abs(traj.Vt - (traj.I0 - traj.X)))),
        "ok": True,
    }
