"""Reduced energy, its gradient descent, and the explicit scheme.

For positions v in (0, 1)^N with weights w[i, j] and penaliser psi the
energy is

    E(v) = 1/2 * sum_i sum_j w[i, j] * (psi(v_j - v_i) + psi(v_j + v_i)),

where psi takes the plain (not squared) argument as in `penaliser.psi`.
The descent direction is, per component,

    d_i = sum_{j: v_j != v_i} w[i, j] * flux(v_j - v_i)
          - sum_j w[i, j] * flux(v_j + v_i),

and the explicit scheme iterates v <- v + tau * d.  Range preservation,
rank-order preservation, and convergence hold for step sizes strictly
below 1 / (2 * L * max row sum) with L the tight flux Lipschitz constant;
the most rapid descent uses half that bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .penaliser import Penaliser, flux_lipschitz_tight
from .weights import LocalDiskWeights, WeightProvider

__all__ = [
    "ParticleState",
    "EvolutionConfig",
    "EnergyTrace",
    "energy",
    "descent_direction",
    "step",
    "max_step",
    "optimal_step",
    "evolve",
]


@dataclass(frozen=True)
class ParticleState:
    """N particle positions, each strictly inside the open unit interval."""

    values: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("state must be a non-empty 1-d vector")
        if not np.all((arr > 0.0) & (arr < 1.0)):
            raise ValueError("positions must lie strictly inside (0, 1)")
        object.__setattr__(self, "values", arr)

    @property
    def size(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class EvolutionConfig:
    """Explicit-scheme parameters.

    tau = None selects the most-rapid-descent step.  total_time may be
    math.inf for a run to convergence, which then requires stop_residual.
    stop_residual ends any run once max |direction| falls below it.
    """

    tau: float | None = None
    total_time: float = 0.0
    record_trace: bool = False
    trace_stride: int = 1
    stop_residual: float | None = None
    max_iterations: int = 10_000_000

    def __post_init__(self) -> None:
        if self.tau is not None and not self.tau > 0:
            raise ValueError("tau must be positive")
        if math.isnan(self.total_time) or self.total_time < 0:
            raise ValueError("total_time must be nonnegative")
        if math.isinf(self.total_time) and self.stop_residual is None:
            raise ValueError("an unbounded run needs a stop_residual")
        if self.trace_stride < 1:
            raise ValueError("trace_stride must be >= 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass
class EnergyTrace:
    """Per-iteration (iteration, elapsed model time, energy) records.

    For symmetric weights the scheme is a plain gradient method, so the
    recorded energies are non-increasing whenever tau <= optimal_step.
    Asymmetric weights (the frequency weights of the global model, say)
    drive the same fixed points through a preconditioned flow whose
    energy may rise transiently along the way.
    """

    records: list[tuple[int, float, float]] = field(default_factory=list)

    def append(self, iteration: int, time: float, value: float) -> None:
        self.records.append((iteration, time, value))

    def energies(self) -> np.ndarray:
        return np.array([r[2] for r in self.records])

    def to_csv(self) -> str:
        lines = ["iteration,time,energy"]
        lines.extend(f"{it},{t!r},{e!r}" for it, t, e in self.records)
        return "\n".join(lines) + "\n"

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())


def _values(state) -> np.ndarray:
    if isinstance(state, ParticleState):
        return state.values
    return ParticleState(np.asarray(state, dtype=float)).values


def _stencil_args(w: LocalDiskWeights):
    return w.offsets_x, w.offsets_y, w.offset_weights


def _use_stencil(w: WeightProvider) -> bool:
    if not isinstance(w, LocalDiskWeights):
        return False
    # a dense matrix wins once the disk holds more cells than there are
    # particles, as long as it fits comfortably in memory
    return w.size > 2048 or w.offsets_x.size < w.size


def energy(state, w: WeightProvider, p: Penaliser) -> float:
    """Energy of the current configuration under the reduced form."""
    v = _values(state)
    if _use_stencil(w):
        v2 = v.reshape(w.n_y, w.n_x)
        U = np.empty((3 * w.n_y, 3 * w.n_x))
        return float(_kernels.stencil_energy(v2, U, *_stencil_args(w), p.a, p.n))
    return float(_kernels.dense_energy(v, w.to_dense(), p.a, p.n))


def descent_direction(state, w: WeightProvider, p: Penaliser) -> np.ndarray:
    """Negative energy gradient, the instantaneous particle velocity."""
    v = _values(state)
    if _use_stencil(w):
        v2 = v.reshape(w.n_y, w.n_x)
        U = np.empty((3 * w.n_y, 3 * w.n_x))
        out = np.empty_like(v2)
        _kernels.stencil_direction(v2, U, *_stencil_args(w), p.a, p.n, out)
        return out.ravel()
    out = np.empty_like(v)
    _kernels.dense_direction(v, w.to_dense(), p.a, p.n, out)
    return out


def max_step(w: WeightProvider, p: Penaliser) -> float:
    """Stability bound: step sizes must stay strictly below this value."""
    return 1.0 / (2.0 * flux_lipschitz_tight(p) * w.max_row_sum())


def optimal_step(w: WeightProvider, p: Penaliser) -> float:
    """Most rapid descent step, half of the stability bound."""
    return 0.5 * max_step(w, p)


def _check_tau(tau: float, w: WeightProvider, p: Penaliser) -> None:
    bound = max_step(w, p)
    if not 0 < tau < bound:
        raise ValueError(
            f"step size tau={tau!r} violates the stability bound; "
            f"it must lie strictly below max_step={bound!r}"
        )


def step(state, w: WeightProvider, p: Penaliser, tau: float) -> ParticleState:
    """One explicit update v + tau * descent_direction."""
    _check_tau(tau, w, p)
    v = _values(state)
    return ParticleState(v + tau * descent_direction(v, w, p))


def evolve(
    state, w: WeightProvider, p: Penaliser, cfg: EvolutionConfig
) -> tuple[ParticleState, EnergyTrace]:
    """Run the explicit scheme to cfg.total_time.

    Applies floor(total_time / tau) full steps plus one shortened final
    step covering the remainder.  Optionally stops early once the residual
    max |direction| drops below cfg.stop_residual; an infinite total_time
    runs until that happens or max_iterations is reached.
    """
    v = _values(state).copy()
    tau = cfg.tau if cfg.tau is not None else optimal_step(w, p)
    _check_tau(tau, w, p)

    if math.isinf(cfg.total_time):
        n_full = cfg.max_iterations
        rem = 0.0
    else:
        n_full = int(math.floor(cfg.total_time / tau))
        rem = max(cfg.total_time - n_full * tau, 0.0)
        if n_full + (1 if rem > 0 else 0) > cfg.max_iterations:
            if cfg.stop_residual is None:
                raise ValueError(
                    f"total_time={cfg.total_time!r} needs more than "
                    f"max_iterations={cfg.max_iterations} steps of tau={tau!r}"
                )
            n_full = cfg.max_iterations
            rem = 0.0

    stop_res = cfg.stop_residual if cfg.stop_residual is not None else 0.0
    record = cfg.record_trace
    n_planned = n_full + (1 if rem > 0 else 0)
    energies = np.empty(n_planned + 1 if record else 1)

    if _use_stencil(w):
        v2 = v.reshape(w.n_y, w.n_x)
        steps, _, _, _ = _kernels.stencil_evolve(
            v2, *_stencil_args(w), p.a, p.n, tau, n_full, rem, stop_res, energies, record
        )
    else:
        steps, _, _, _, _ = _kernels.dense_evolve(
            v, w.to_dense(), p.a, p.n, tau, n_full, rem, stop_res, energies,
            record, np.empty(0, dtype=np.int64),
        )

    trace = EnergyTrace()
    if record and n_planned > 0:
        partial_last = steps == n_full + 1
        for k in range(0, steps + 1, cfg.trace_stride):
            t_k = cfg.total_time if (partial_last and k == steps) else k * tau
            trace.append(k, t_k, float(energies[k]))
    return ParticleState(v), trace
