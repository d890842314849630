"""Real-valued evolutions: diffusion, the correlated random walk and its
Cole-Hopf image, the CRW-type discrete Burgers system.

All lattices are periodic; ``ahead(a)[j] == a[j + 1]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LengthMismatch, NonPositiveValue, OutOfRange
from .maxplus import ahead, behind

__all__ = [
    "step_diffusion",
    "CrwPairState", "step_crw_pair", "total_mass",
    "ScalarHistory", "step_crw_scalar",
    "cole_hopf",
    "BurgersState", "step_burgers",
]


def _field(values, name):
    arr = np.array(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-D array")
    arr.flags.writeable = False
    return arr


def _require_positive(arr, name):
    bad = np.flatnonzero(~(arr > 0))
    if bad.size:
        j = int(bad[0])
        raise NonPositiveValue(f"{name} has non-positive entry {arr[j]!r}", site=j)


def _same_length(*arrays):
    sizes = {a.size for a in arrays}
    if len(sizes) != 1:
        raise LengthMismatch(f"field lengths differ: {sorted(sizes)}")


def step_diffusion(f) -> np.ndarray:
    """``out[j] = (f[j+1] + f[j-1]) / 2`` on a ring."""
    f = np.asarray(f, dtype=float)
    return 0.5 * (ahead(f) + behind(f))


@dataclass(frozen=True)
class CrwPairState:
    """Occupation of left- and right-arriving walkers with persistences p, q."""

    muL: np.ndarray
    muR: np.ndarray
    p: float
    q: float

    def __post_init__(self):
        muL = _field(self.muL, "muL")
        muR = _field(self.muR, "muR")
        _same_length(muL, muR)
        for name, arr in (("muL", muL), ("muR", muR)):
            bad = np.flatnonzero(~(arr >= 0) | ~np.isfinite(arr))
            if bad.size:
                raise OutOfRange(f"{name} must be finite and >= 0", site=int(bad[0]))
        for name in ("p", "q"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise OutOfRange(f"{name}={v} outside [0, 1]")
        object.__setattr__(self, "muL", muL)
        object.__setattr__(self, "muR", muR)

    @property
    def N(self) -> int:
        return self.muL.size

    @property
    def occupation(self) -> np.ndarray:
        return self.muL + self.muR


def step_crw_pair(s: CrwPairState) -> CrwPairState:
    p, q = s.p, s.q
    muL = p * ahead(s.muL) + (1.0 - q) * ahead(s.muR)
    muR = (1.0 - p) * behind(s.muL) + q * behind(s.muR)
    return CrwPairState(muL, muR, p, q)


def total_mass(s: CrwPairState) -> float:
    return float(np.sum(s.muL) + np.sum(s.muR))


@dataclass(frozen=True)
class ScalarHistory:
    """Two consecutive layers of the three-term CRW diffusion recurrence."""

    fPrev: np.ndarray
    fCurr: np.ndarray
    p: float

    def __post_init__(self):
        fPrev = _field(self.fPrev, "fPrev")
        fCurr = _field(self.fCurr, "fCurr")
        _same_length(fPrev, fCurr)
        _require_positive(fPrev, "fPrev")
        _require_positive(fCurr, "fCurr")
        if not 0.0 < self.p <= 1.0:
            raise OutOfRange(f"p={self.p} outside (0, 1]")
        object.__setattr__(self, "fPrev", fPrev)
        object.__setattr__(self, "fCurr", fCurr)


def step_crw_scalar(h: ScalarHistory) -> ScalarHistory:
    """Advance ``f[n+1] = p (f[j-1] + f[j+1]) - (2p - 1) f[n-1]`` by one layer.

    Raises NonPositiveValue if the new layer is not strictly positive, since
    the Cole-Hopf ratios downstream need positive values.
    """
    p = h.p
    f = h.fCurr
    nxt = p * (behind(f) + ahead(f)) - (2.0 * p - 1.0) * h.fPrev
    _require_positive(nxt, "next layer")
    return ScalarHistory(f, nxt, p)


def cole_hopf(fCurr, fNext) -> tuple[np.ndarray, np.ndarray]:
    """Spatial ratio ``u = f[j+1]/f[j]`` and temporal ratio ``v = f'[j]/f[j]``."""
    fCurr = np.asarray(fCurr, dtype=float)
    fNext = np.asarray(fNext, dtype=float)
    _same_length(fCurr, fNext)
    _require_positive(fCurr, "fCurr")
    _require_positive(fNext, "fNext")
    return ahead(fCurr) / fCurr, fNext / fCurr


@dataclass(frozen=True)
class BurgersState:
    """``(u^n, v^n, v^{n-1})`` for the CRW-type discrete Burgers system."""

    u: np.ndarray
    v: np.ndarray
    vPrev: np.ndarray
    p: float

    def __post_init__(self):
        if not 0.0 < self.p <= 0.5:
            raise OutOfRange(f"p={self.p} outside (0, 1/2]")
        arrays = []
        for name in ("u", "v", "vPrev"):
            arr = _field(getattr(self, name), name)
            _require_positive(arr, name)
            arrays.append(arr)
            object.__setattr__(self, name, arr)
        _same_length(*arrays)

    @classmethod
    def from_history(cls, fMinus1, f0, p: float) -> "BurgersState":
        """Seed from ``f^{-1}, f^0``; one scalar step supplies ``f^1``."""
        h1 = step_crw_scalar(ScalarHistory(fMinus1, f0, p))
        u, v = cole_hopf(f0, h1.fCurr)
        _, vPrev = cole_hopf(fMinus1, f0)
        return cls(u, v, vPrev, p)


def _burgers_denominator(u, v_prev, p):
    # p (u_j + 1/u_{j-1}) - (2p - 1)/v_j^{n-1}
    return p * (u + 1.0 / behind(u)) - (2.0 * p - 1.0) / v_prev


def step_burgers(s: BurgersState) -> BurgersState:
    """One step of the CRW-type discrete Burgers system.

    ``u`` is advanced first; the ``v`` update needs the new ``u``.
    """
    p = s.p
    den_old = _burgers_denominator(s.u, s.vPrev, p)
    num_u = p * (ahead(s.u) + 1.0 / s.u) - (2.0 * p - 1.0) / ahead(s.vPrev)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        u_new = s.u * num_u / den_old
        den_new = _burgers_denominator(u_new, s.v, p)
        v_new = s.v * den_new / den_old
    for name, arr in (("u", u_new), ("v", v_new)):
        bad = np.flatnonzero(~np.isfinite(arr))
        if bad.size:
            raise NonPositiveValue(f"division by zero while updating {name}", site=int(bad[0]))
    return BurgersState(u_new, v_new, s.v, p)
