"""Extended-real (max-plus) scalars, periodic lattice fields and seeded RNG.

Extended reals are plain floats: ``BOTTOM = -inf`` and ``TOP = +inf``.  The
helpers here refuse to produce NaN; any operation that would combine two
opposite infinities raises :class:`IndeterminateForm` instead.
"""

from __future__ import annotations

import math
from typing import Callable, Iterable

import numpy as np

from .errors import IndeterminateForm, LengthMismatch

BOTTOM = -math.inf
TOP = math.inf

__all__ = [
    "BOTTOM", "TOP",
    "mp_max", "mp_min", "mp_add", "mp_sub", "mp_neg",
    "ext_add", "ext_sub",
    "format_extended", "parse_extended",
    "PeriodicField", "field_map2",
    "make_rng", "sample_rng", "RNG_ALGORITHM",
    "ahead", "behind",
]


def _check_scalar(x):
    x = float(x)
    if math.isnan(x):
        raise IndeterminateForm("NaN is not an extended real")
    return x


def mp_max(a, b):
    """Max-plus addition; ``BOTTOM`` is the identity."""
    a, b = _check_scalar(a), _check_scalar(b)
    return a if a >= b else b


def mp_min(a, b):
    a, b = _check_scalar(a), _check_scalar(b)
    return a if a <= b else b


def mp_neg(a):
    return -_check_scalar(a)


def mp_add(a, b):
    """Max-plus multiplication (ordinary sum); ``BOTTOM + TOP`` is a fault."""
    a, b = _check_scalar(a), _check_scalar(b)
    if math.isinf(a) and math.isinf(b) and a != b:
        raise IndeterminateForm(f"{format_extended(a)} + {format_extended(b)}")
    return a + b


def mp_sub(a, b):
    """``a - b`` with ``x - BOTTOM = TOP`` and ``BOTTOM - x = BOTTOM``.

    Raises :class:`IndeterminateForm` when both operands are the same infinity.
    """
    a, b = _check_scalar(a), _check_scalar(b)
    if math.isinf(a) and a == b:
        raise IndeterminateForm(f"{format_extended(a)} - {format_extended(b)}")
    return a - b


def _raise_on_nan(out, a, b, symbol):
    bad = np.isnan(out) & ~np.isnan(a) & ~np.isnan(b)
    if np.any(bad):
        idx = np.argwhere(bad)[0]
        site = int(idx[-1])
        av = np.broadcast_to(a, out.shape)[tuple(idx)]
        bv = np.broadcast_to(b, out.shape)[tuple(idx)]
        raise IndeterminateForm(
            f"{format_extended(av)} {symbol} {format_extended(bv)}", site=site
        )


def ext_add(a, b):
    """Elementwise extended-real sum of arrays."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    with np.errstate(invalid="ignore"):
        out = a + b
    _raise_on_nan(out, a, b, "+")
    return out


def ext_sub(a, b):
    """Elementwise extended-real difference of arrays (see :func:`mp_sub`)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    with np.errstate(invalid="ignore"):
        out = a - b
    _raise_on_nan(out, a, b, "-")
    return out


def format_extended(x) -> str:
    x = float(x)
    if x == TOP:
        return "+inf"
    if x == BOTTOM:
        return "-inf"
    if math.isnan(x):
        raise IndeterminateForm("NaN is not an extended real")
    # repr gives the shortest string that round-trips exactly
    return repr(x)


def parse_extended(token: str) -> float:
    token = token.strip()
    if token in ("-inf", "bottom"):
        return BOTTOM
    if token in ("+inf", "inf", "top"):
        return TOP
    x = float(token)
    if math.isnan(x):
        raise ValueError(f"not an extended real: {token!r}")
    return x


def ahead(a):
    """``out[..., j] == a[..., j + 1]`` on a ring (last axis)."""
    a = np.asarray(a)
    return np.concatenate((a[..., 1:], a[..., :1]), axis=-1)


def behind(a):
    """``out[..., j] == a[..., j - 1]`` on a ring (last axis)."""
    a = np.asarray(a)
    return np.concatenate((a[..., -1:], a[..., :-1]), axis=-1)


class PeriodicField:
    """Immutable length-``N`` cyclic array; integer indexing wraps modulo ``N``."""

    __slots__ = ("_values",)

    def __init__(self, values: Iterable):
        arr = np.array(values)
        if arr.dtype.kind not in "iuf":
            arr = arr.astype(float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("a periodic field needs a non-empty 1-D array")
        arr.flags.writeable = False
        self._values = arr

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def N(self) -> int:
        return self._values.size

    def __len__(self):
        return self._values.size

    def __getitem__(self, j):
        return self._values[int(j) % self._values.size]

    def get(self, j):
        return self[j]

    def __iter__(self):
        return iter(self._values.tolist())

    def shift(self, k: int) -> "PeriodicField":
        """Field ``g`` with ``g[j] == self[j + k]``."""
        return PeriodicField(np.roll(self._values, -k))

    def __eq__(self, other):
        if not isinstance(other, PeriodicField):
            return NotImplemented
        return self.N == other.N and bool(np.array_equal(self._values, other._values))

    def __hash__(self):
        return hash(tuple(self._values.tolist()))

    def __repr__(self):
        return f"PeriodicField({self.to_tokens()})"

    def to_tokens(self) -> list[str]:
        return [format_extended(v) for v in self._values]

    @classmethod
    def from_tokens(cls, tokens: Iterable[str]) -> "PeriodicField":
        return cls([parse_extended(t) for t in tokens])


def field_map2(f: PeriodicField, g: PeriodicField, op: Callable) -> PeriodicField:
    """Apply a binary scalar operation sitewise."""
    if f.N != g.N:
        raise LengthMismatch(f"fields have lengths {f.N} and {g.N}")
    return PeriodicField([op(a, b) for a, b in zip(f.values.tolist(), g.values.tolist())])


RNG_ALGORITHM = "numpy PCG64"


def make_rng(seed: int) -> np.random.Generator:
    """Generator for a 64-bit seed (PCG64, stable across platforms)."""
    return np.random.Generator(np.random.PCG64(int(seed) & 0xFFFFFFFFFFFFFFFF))


def sample_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for sample ``index`` of a sweep seeded with ``seed``."""
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, int(index)])
    return np.random.Generator(np.random.PCG64(ss))
