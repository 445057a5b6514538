"""Raster types, value-range mapping, the hue-preserving colour remap,
and the four contrast-enhancement pipelines.

8-bit levels k map to unit-interval values (k + 0.5)/256, keeping every
particle strictly inside (0, 1); the inverse clamps floor(v * 256) to
[0, 255] and round-trips all 256 levels exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .evolution import EnergyTrace, EvolutionConfig, ParticleState, evolve
from .penaliser import Penaliser
from .steady_state import linear_flux_steady_state, uniform_steady_state
from .weights import GlobalHistogramWeights, KernelName, LocalDiskWeights

__all__ = [
    "GreyImage",
    "ColourImage",
    "to_unit",
    "from_unit",
    "luminance",
    "hue_preserving_remap",
    "enhance_grey_global",
    "enhance_grey_local",
    "enhance_colour",
]

LUMA_R, LUMA_G, LUMA_B = 0.299, 0.587, 0.114


@dataclass(frozen=True)
class GreyImage:
    """8-bit greyscale raster, samples row-major with shape (n_y, n_x)."""

    samples: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.samples)
        if arr.ndim != 2 or arr.size == 0:
            raise ValueError("grey image needs a non-empty 2-d sample array")
        if arr.dtype != np.uint8:
            raise ValueError("samples must be 8-bit (uint8)")
        object.__setattr__(self, "samples", arr)

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def height(self) -> int:
        return self.samples.shape[0]


@dataclass(frozen=True)
class ColourImage:
    """8-bit RGB raster, interleaved samples with shape (n_y, n_x, 3)."""

    samples: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.samples)
        if arr.ndim != 3 or arr.shape[2] != 3 or arr.size == 0:
            raise ValueError("colour image needs a non-empty (n_y, n_x, 3) sample array")
        if arr.dtype != np.uint8:
            raise ValueError("samples must be 8-bit (uint8)")
        object.__setattr__(self, "samples", arr)

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def height(self) -> int:
        return self.samples.shape[0]


def to_unit(level):
    """Map 8-bit level(s) to the open unit interval: (k + 0.5) / 256."""
    out = (np.asarray(level, dtype=float) + 0.5) / 256.0
    return float(out) if np.ndim(level) == 0 else out


def from_unit(v):
    """Quantise unit-interval value(s) back to 8-bit levels."""
    out = np.clip(np.floor(np.asarray(v, dtype=float) * 256.0), 0, 255).astype(np.uint8)
    return int(out) if np.ndim(v) == 0 else out


def luminance(r, g, b):
    """Rec.601 luma of unit-interval channels; coefficients sum to one."""
    out = LUMA_R * np.asarray(r, dtype=float) + LUMA_G * np.asarray(g, dtype=float) \
        + LUMA_B * np.asarray(b, dtype=float)
    return float(out) if np.ndim(r) == 0 else out


def hue_preserving_remap(rgb, f_hat, g_hat, lam: float):
    """Carry pixels from luminance f_hat to g_hat without leaving gamut.

    Blends a multiplicative map (channel scaling towards 0 for darkening,
    complement scaling towards 1 for brightening; always in gamut) with an
    additive shift by g_hat - f_hat (falling back to the multiplicative
    result wherever the shift would leave [0, 1]^3), with weights lam and
    1 - lam.  Both maps transfer the luminance exactly and preserve the
    channel order, so the blend does too.
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError("blend weight must lie in [0, 1]")
    c = np.asarray(rgb, dtype=float)
    if c.shape[-1] != 3:
        raise ValueError("rgb must have a trailing axis of size 3")
    f = np.asarray(f_hat, dtype=float)[..., None]
    g = np.asarray(g_hat, dtype=float)[..., None]

    darken = g <= f
    mult = np.where(darken, c * (g / f), 1.0 - (1.0 - c) * ((1.0 - g) / (1.0 - f)))
    add = c + (g - f)
    in_gamut = np.all((add >= 0.0) & (add <= 1.0), axis=-1, keepdims=True)
    add = np.where(in_gamut, add, mult)
    out = np.clip(lam * mult + (1.0 - lam) * add, 0.0, 1.0)
    # g == f must reproduce the input bit for bit, untouched by blend rounding
    return np.where(g == f, c, out)


def _early_stop(w) -> float:
    # cheap insurance for long runs: once the residual is this small the
    # remaining motion is far below quantisation resolution
    return 1e-12 * max(w.max_row_sum(), 1.0)


def _evolve_values(values, w, pen, t, tau, trace):
    cfg = EvolutionConfig(
        tau=tau,
        total_time=t,
        record_trace=trace is not None,
        stop_residual=_early_stop(w),
    )
    state, tr = evolve(ParticleState(values), w, pen, cfg)
    if trace is not None:
        trace.records.extend(tr.records)
    return state.values


def _global_target_values(levels, counts, pen, t, tau, trace):
    """Evolved (or closed-form) unit values for the distinct levels."""
    values = to_unit(levels.astype(float))
    w = GlobalHistogramWeights(values, counts.astype(float))
    if math.isinf(t):
        if pen.n == 1:
            return linear_flux_steady_state(w)
        if np.all(counts == 1):
            return uniform_steady_state(values)
        raise ValueError(
            f"no closed-form steady state for n={pen.n} with these weights; use a finite time"
        )
    return _evolve_values(values, w, pen, t, tau, trace)


def enhance_grey_global(
    img: GreyImage,
    pen: Penaliser,
    t: float,
    tau: float | None = None,
    *,
    trace: EnergyTrace | None = None,
) -> GreyImage:
    """Histogram-driven global contrast enhancement.

    One particle per occurring grey level, weighted by its frequency;
    t = math.inf short-circuits to the analytic steady state (histogram
    equalisation for n = 1).  The resulting level map is monotone.
    """
    levels, counts = np.unique(img.samples, return_counts=True)
    target = _global_target_values(levels, counts, pen, t, tau, trace)
    lut = np.arange(256, dtype=np.uint8)
    lut[levels] = from_unit(target)
    return GreyImage(lut[img.samples])


def enhance_grey_local(
    img: GreyImage,
    pen: Penaliser,
    t: float,
    tau: float | None = None,
    rho: float = 60.0,
    kernel: KernelName = "box",
    *,
    trace: EnergyTrace | None = None,
) -> GreyImage:
    """Local contrast enhancement with one particle per pixel."""
    if math.isinf(t):
        raise ValueError("local weights admit no closed-form steady state; use a finite time")
    w = LocalDiskWeights(img.width, img.height, rho, kernel)
    values = to_unit(img.samples.astype(float)).ravel()
    out = _evolve_values(values, w, pen, t, tau, trace)
    return GreyImage(from_unit(out).reshape(img.samples.shape))


def enhance_colour(
    img: ColourImage,
    pen: Penaliser,
    t: float,
    mode: Literal["global", "local"],
    tau: float | None = None,
    rho: float = 60.0,
    kernel: KernelName = "box",
    lam: float = 0.5,
    *,
    trace: EnergyTrace | None = None,
) -> ColourImage:
    """Hue-preserving colour contrast enhancement.

    Only the luminance plane evolves: binned to 8-bit levels with
    frequency weights in global mode (pixels then travel from their bin
    midpoint to the bin's evolved value, so t = 0 is the identity),
    per-pixel with disk weights in local mode.  The remap carries each
    pixel's RGB triple to the enhanced luminance without leaving gamut.
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError("blend weight must lie in [0, 1]")
    rgb = to_unit(img.samples.astype(float))
    f_hat = luminance(rgb[..., 0], rgb[..., 1], rgb[..., 2])

    if mode == "global":
        # the global model sees 8-bit luminance bins only, exactly like the
        # greyscale pipeline: each pixel travels from its bin midpoint to
        # the bin's evolved value
        binned = from_unit(f_hat)
        levels, counts = np.unique(binned, return_counts=True)
        target = _global_target_values(levels, counts, pen, t, tau, trace)
        value_map = np.empty(256)
        value_map[levels] = target
        f_hat = to_unit(binned.astype(float))
        g_hat = value_map[binned]
    elif mode == "local":
        if math.isinf(t):
            raise ValueError("local weights admit no closed-form steady state; use a finite time")
        w = LocalDiskWeights(img.width, img.height, rho, kernel)
        g_hat = _evolve_values(f_hat.ravel(), w, pen, t, tau, trace).reshape(f_hat.shape)
    else:
        raise ValueError(f"unknown mode {mode!r}; expected 'global' or 'local'")

    out = hue_preserving_remap(rgb, f_hat, g_hat, lam)
    return ColourImage(from_unit(out))
