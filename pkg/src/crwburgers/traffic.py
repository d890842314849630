"""Traffic observables and fundamental-diagram sweeps for the Burgers CA."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .automata import Trajectory, evolve_batch
from .errors import ConfigError, InsufficientData
from .maxplus import ahead, sample_rng

__all__ = [
    "density", "flow", "check_conservation",
    "DiagramConfig", "DiagramPoint", "TransitionEstimate",
    "fundamental_diagram", "estimate_transitions", "conjectured_transition",
]

CONSERVATION_SLACK = 1e-9
_FIXED_VT_STREAM = 2**32


def density(U, L) -> float:
    """Cars per unit capacity, ``sum(U) / (N L)``."""
    U = np.asarray(U)
    return float(U.sum(axis=-1) / (U.shape[-1] * L))


def flow(U, VtPrev, L) -> float:
    """``sum_j min(Vt[j+1], U[j], L - U[j+1]) / (N L)`` with ``Vt`` one step old."""
    U = np.asarray(U)
    VtPrev = np.asarray(VtPrev)
    per_site = np.minimum(np.minimum(ahead(VtPrev), U), L - ahead(U))
    return float(per_site.sum() / (U.size * L))


def check_conservation(traj: Trajectory) -> bool:
    mass = np.asarray(traj.mass)
    if np.issubdtype(mass.dtype, np.integer):
        return bool(np.all(mass == mass[0]))
    return bool(np.all(np.abs(mass - mass[0]) <= CONSERVATION_SLACK))


@dataclass
class DiagramConfig:
    """Sweep settings.

    ``warmup``/``last_step`` default to the 91..100 measuring window at
    ``N = 50`` and scale linearly with ``N`` otherwise.
    """

    N: int = 50
    L: int = 1
    mode: str = "controlled-density"
    samples_per_density: int = 20
    total_samples: int = 1000
    warmup: Optional[int] = None
    last_step: Optional[int] = None
    seed: int = 0
    vt_min: int = 1
    vt_max: Optional[int] = None
    bin_width: float = 0.02
    tol: float = 0.02
    fixed_vt: bool = False
    pin_vt_min: bool = True

    def __post_init__(self):
        if self.warmup is None:
            self.warmup = 1 + round(90 * self.N / 50)
        if self.last_step is None:
            self.last_step = self.warmup + 9
        if self.vt_max is None:
            self.vt_max = self.L

    def validate(self) -> "DiagramConfig":
        problems = []
        if not isinstance(self.N, int) or self.N < 2:
            problems.append("N must be an integer >= 2")
        if not isinstance(self.L, int) or self.L < 1:
            problems.append("L must be a positive integer")
        if self.mode not in ("scatter", "controlled-density"):
            problems.append(f"unknown mode {self.mode!r}")
        if self.warmup < 1 or self.warmup > self.last_step:
            problems.append("need 1 <= warmup <= last_step")
        if not 0 <= self.vt_min <= self.vt_max:
            problems.append("need 0 <= vt_min <= vt_max")
        if self.samples_per_density < 1 or self.total_samples < 1:
            problems.append("sample counts must be positive")
        if not 0 < self.bin_width <= 1:
            problems.append("bin_width must lie in (0, 1]")
        if problems:
            raise ConfigError("; ".join(problems))
        return self

    def density_grid(self) -> np.ndarray:
        k = int(round(1.0 / self.bin_width))
        return np.round(np.arange(k + 1) * self.bin_width, 12)


@dataclass
class DiagramPoint:
    density: float
    meanFlow: float
    flowStd: float
    sampleCount: int


@dataclass
class TransitionEstimate:
    rho_star_low: float
    rho_star_high: float
    q_star: float
    conjectured_rho_low: float
    conjectured_rho_high: float
    conjectured_q: float
    L: int
    vt_min: float
    tol: float
    degenerate: bool = False
    notes: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def conjectured_transition(vt_min, L) -> tuple[float, float, float]:
    """``(rho*, 1 - rho*, q*)`` with ``rho* = q* = vt_min / (2 L)``."""
    r = vt_min / (2.0 * L)
    return r, 1.0 - r, r


def _draw_vt(rng, cfg: DiagramConfig) -> np.ndarray:
    vt = rng.integers(cfg.vt_min, cfg.vt_max + 1, size=cfg.N)
    if cfg.pin_vt_min and vt.min() > cfg.vt_min:
        vt[rng.integers(cfg.N)] = cfg.vt_min
    return vt


def _place_cars(rng, cars: int, N: int, L: int) -> np.ndarray:
    # choose `cars` of the N*L unit slots; slot s belongs to site s // L
    slots = rng.choice(N * L, size=cars, replace=False)
    return np.bincount(slots // L, minlength=N)


def _initial_conditions(cfg: DiagramConfig):
    """Initial ``U0`` and ``Vt0`` batches plus the target density of each row."""
    fixed = _draw_vt(sample_rng(cfg.seed, _FIXED_VT_STREAM), cfg) if cfg.fixed_vt else None
    U_rows, V_rows, targets = [], [], []
    index = 0
    if cfg.mode == "scatter":
        for _ in range(cfg.total_samples):
            rng = sample_rng(cfg.seed, index)
            index += 1
            U_rows.append(rng.integers(0, cfg.L + 1, size=cfg.N))
            V_rows.append(fixed if fixed is not None else _draw_vt(rng, cfg))
            targets.append(None)
    else:
        for rho in cfg.density_grid():
            cars = int(round(rho * cfg.N * cfg.L))
            for _ in range(cfg.samples_per_density):
                rng = sample_rng(cfg.seed, index)
                index += 1
                U_rows.append(_place_cars(rng, cars, cfg.N, cfg.L))
                V_rows.append(fixed if fixed is not None else _draw_vt(rng, cfg))
                targets.append(float(rho))
    return np.array(U_rows, dtype=np.int64), np.array(V_rows, dtype=np.int64), targets


def fundamental_diagram(cfg: DiagramConfig) -> list[DiagramPoint]:
    """Flow-density points averaged over the ``warmup..last_step`` window.

    Scatter mode yields one point per random initial road (``U0`` uniform in
    ``[0, L]`` sitewise); controlled-density mode places an exact number of
    cars for every grid density and averages the samples of each bin.
    ``Vt^{-1}`` is zero everywhere in both modes.
    """
    cfg.validate()
    U0, Vt0, targets = _initial_conditions(cfg)
    flows = evolve_batch(U0, Vt0, np.zeros(cfg.N, dtype=np.int64), cfg.L, cfg.last_step)
    window = flows[:, cfg.warmup:cfg.last_step + 1]
    per_sample = window.mean(axis=1)
    rho = U0.sum(axis=1) / (cfg.N * cfg.L)

    if cfg.mode == "scatter":
        spread = window.std(axis=1)
        return [DiagramPoint(float(r), float(f), float(s), 1)
                for r, f, s in zip(rho, per_sample, spread)]

    points = []
    k = cfg.samples_per_density
    for b in range(len(per_sample) // k):
        chunk = per_sample[b * k:(b + 1) * k]
        points.append(DiagramPoint(float(rho[b * k]), float(chunk.mean()),
                                   float(chunk.std()), int(chunk.size)))
    return points


def estimate_transitions(points, L, vt_min, tol=0.02, bin_width=0.02,
                         min_bins=10) -> TransitionEstimate:
    """Locate the plateau of a diagram and its two ends.

    ``q*`` is the largest binned mean flow; the transition densities are the
    smallest and largest bins whose mean flow is within ``tol`` of ``q*``.
    """
    bins: dict[int, list] = {}
    for pt in points:
        key = int(round(pt.density / bin_width))
        bins.setdefault(key, []).append((pt.meanFlow, pt.sampleCount))
    if len(bins) < min_bins:
        raise InsufficientData(f"{len(bins)} density bins; need at least {min_bins}")
    keys = sorted(bins)
    means = np.array([
        sum(f * n for f, n in bins[k]) / sum(n for _, n in bins[k]) for k in keys
    ])
    dens = np.array(keys) * bin_width
    q_star = float(means.max())
    c_low, c_high, c_q = conjectured_transition(vt_min, L)
    if q_star <= 0:
        return TransitionEstimate(0.0, 1.0, 0.0, c_low, c_high, c_q, L, vt_min, tol,
                                  degenerate=True, notes={"reason": "zero flow everywhere"})
    near = dens[means >= q_star - tol]
    return TransitionEstimate(
        rho_star_low=float(near.min()),
        rho_star_high=float(near.max()),
        q_star=q_star,
        conjectured_rho_low=c_low,
        conjectured_rho_high=c_high,
        conjectured_q=c_q,
        L=L,
        vt_min=vt_min,
        tol=tol,
        notes={"bins": len(keys), "bin_width": bin_width},
    )
