import math

import numpy as np
import pytest

from backdiff.imaging import (
    ColourImage,
    GreyImage,
    enhance_colour,
    enhance_grey_global,
    enhance_grey_local,
    from_unit,
    hue_preserving_remap,
    luminance,
    to_unit,
)
from backdiff.penaliser import Penaliser

from oracles import midpoint_cdf_lut

P11 = Penaliser(1, 1)


def _grey(rng, shape=(12, 16)):
    return GreyImage(rng.integers(0, 256, shape, dtype=np.uint8))


def _colour(rng, shape=(10, 14)):
    return ColourImage(rng.integers(0, 256, (*shape, 3), dtype=np.uint8))


# ---------------------------------------------------------------------------
# value mapping
# ---------------------------------------------------------------------------

def test_to_unit_values():
    assert to_unit(0) == 1.0 / 512.0
    assert to_unit(255) == 511.0 / 512.0
    assert to_unit(127) == 0.498046875


def test_from_unit_values():
    assert from_unit(1.0 / 512.0) == 0
    assert from_unit(0.5) == 128
    assert from_unit(511.0 / 512.0) == 255


def test_unit_round_trip_all_levels():
    levels = np.arange(256)
    assert np.array_equal(from_unit(to_unit(levels)), levels)
    assert np.all((to_unit(levels) > 0) & (to_unit(levels) < 1))


def test_luminance():
    assert luminance(1.0, 1.0, 1.0) == pytest.approx(1.0, abs=1e-15)
    assert luminance(0.0, 0.0, 0.0) == 0.0
    assert luminance(1.0, 0.0, 0.0) == 0.299


# ---------------------------------------------------------------------------
# hue-preserving remap
# ---------------------------------------------------------------------------

def test_remap_identity():
    rgb = np.array([0.3, 0.6, 0.1])
    f = luminance(*rgb)
    for lam in (0.0, 0.3, 1.0):
        assert np.array_equal(hue_preserving_remap(rgb, f, f, lam), rgb)


def test_remap_grey_stays_grey():
    for c in (0.1, 0.5, 0.77):
        for g in (0.2, 0.5, 0.9):
            out = hue_preserving_remap(np.array([c, c, c]), c, g, 0.5)
            assert out[0] == out[1] == out[2]
            assert out[0] == pytest.approx(g, abs=1e-12)


def test_remap_multiplicative_halving():
    rgb = np.array([0.5, 0.25, 0.125])
    f = luminance(*rgb)
    out = hue_preserving_remap(rgb, f, f / 2.0, 1.0)
    assert np.allclose(out, [0.25, 0.125, 0.0625], atol=1e-12)
    assert luminance(*out) == pytest.approx(f / 2.0, abs=1e-12)


def test_remap_properties_random_batch():
    rng = np.random.default_rng(5)
    m = 10_000
    rgb = rng.uniform(1e-3, 1 - 1e-3, (m, 3))
    f = luminance(rgb[:, 0], rgb[:, 1], rgb[:, 2])
    g = rng.uniform(1e-3, 1 - 1e-3, m)
    lam = 0.5
    out = hue_preserving_remap(rgb, f, g, lam)
    # gamut
    assert np.all((out >= 0.0) & (out <= 1.0))
    # exact luminance transfer (the additive fallback keeps it exact too)
    lum_out = luminance(out[:, 0], out[:, 1], out[:, 2])
    assert np.abs(lum_out - g).max() < 1e-9
    # channel order preserved
    for i, j in ((0, 1), (0, 2), (1, 2)):
        leq = rgb[:, i] <= rgb[:, j]
        assert np.all(out[leq, i] <= out[leq, j])
        assert np.all(out[~leq, i] >= out[~leq, j])


def test_remap_darkening_preserves_ratios():
    rng = np.random.default_rng(6)
    rgb = rng.uniform(0.05, 0.95, (500, 3))
    f = luminance(rgb[:, 0], rgb[:, 1], rgb[:, 2])
    g = f * rng.uniform(0.1, 0.999, 500)
    out = hue_preserving_remap(rgb, f, g, 1.0)  # pure multiplicative
    ratios_in = rgb / rgb[:, :1]
    ratios_out = out / out[:, :1]
    assert np.abs(ratios_in - ratios_out).max() < 1e-9


def test_remap_validation():
    with pytest.raises(ValueError):
        hue_preserving_remap(np.array([0.1, 0.2, 0.3]), 0.2, 0.3, 1.5)
    with pytest.raises(ValueError):
        hue_preserving_remap(np.array([0.1, 0.2]), 0.2, 0.3, 0.5)


# ---------------------------------------------------------------------------
# greyscale pipelines
# ---------------------------------------------------------------------------

def test_grey_global_zero_time_is_identity():
    img = _grey(np.random.default_rng(7))
    out = enhance_grey_global(img, P11, 0.0)
    assert np.array_equal(out.samples, img.samples)


def test_grey_global_constant_image():
    img = GreyImage(np.full((6, 6), 40, dtype=np.uint8))
    out = enhance_grey_global(img, P11, math.inf)
    assert np.all(out.samples == 128)
    # finite time moves monotonically towards the midpoint
    t_small = enhance_grey_global(img, P11, 1e-3).samples[0, 0]
    t_big = enhance_grey_global(img, P11, 3e-3).samples[0, 0]
    assert 40 <= t_small <= t_big <= 128


def test_grey_global_two_levels_steady_state():
    img = GreyImage(np.array([[10, 200]], dtype=np.uint8))
    out = enhance_grey_global(img, P11, math.inf)
    assert np.array_equal(out.samples, [[from_unit(0.25), from_unit(0.75)]])
    assert np.array_equal(out.samples, [[64, 192]])


def test_grey_global_matches_equalisation_oracle():
    rng = np.random.default_rng(8)
    img = _grey(rng, (20, 30))
    out = enhance_grey_global(img, P11, math.inf)
    lut = midpoint_cdf_lut(img.samples)
    expected = from_unit(lut[img.samples.astype(int)])
    assert np.array_equal(out.samples, expected)


def test_grey_global_sorting_solution_when_counts_are_all_one():
    samples = np.array([[7, 250], [13, 94]], dtype=np.uint8)
    out = enhance_grey_global(GreyImage(samples), Penaliser(1, 2), math.inf)
    order = np.argsort(np.argsort(samples.ravel()))
    expected = from_unit((order + 0.5) / 4.0).reshape(2, 2)
    assert np.array_equal(out.samples, expected)


def test_grey_global_steady_state_needs_linear_flux():
    img = GreyImage(np.array([[3, 3, 9]], dtype=np.uint8))
    with pytest.raises(ValueError, match="closed-form"):
        enhance_grey_global(img, Penaliser(1, 2), math.inf)


def test_grey_global_lut_is_monotone():
    rng = np.random.default_rng(9)
    for t in (5e-4, 2e-3, math.inf):
        img = _grey(rng)
        out = enhance_grey_global(img, P11, t)
        levels = np.unique(img.samples)
        mapped = [int(out.samples[img.samples == k][0]) for k in levels]
        assert all(b >= a for a, b in zip(mapped, mapped[1:]))
        # every pixel of one level maps to one level
        for k, m in zip(levels, mapped):
            assert np.all(out.samples[img.samples == k] == m)


def test_grey_local_zero_time_is_identity():
    img = _grey(np.random.default_rng(10))
    out = enhance_grey_local(img, P11, 0.0, rho=2.5)
    assert np.array_equal(out.samples, img.samples)


def test_grey_local_constant_image_moves_to_midpoint():
    img = GreyImage(np.full((5, 5), 220, dtype=np.uint8))
    levels = [
        int(enhance_grey_local(img, P11, t, rho=2.0).samples[0, 0])
        for t in (0.0, 5e-3, 2e-2)
    ]
    assert np.all(np.diff(levels) <= 0)
    assert levels[0] == 220 and levels[-1] >= 128
    out = enhance_grey_local(img, P11, 5e-3, rho=2.0).samples
    assert np.all(out == out[0, 0])


def test_grey_local_rejects_infinite_time():
    img = _grey(np.random.default_rng(11))
    with pytest.raises(ValueError, match="closed-form"):
        enhance_grey_local(img, P11, math.inf, rho=2.0)


def test_grey_local_enhances_contrast():
    rng = np.random.default_rng(12)
    base = rng.integers(100, 156, (16, 16), dtype=np.uint8)  # low contrast
    img = GreyImage(base)
    out = enhance_grey_local(img, P11, 1e-3, rho=3.0)
    assert out.samples.std() > img.samples.std()


# ---------------------------------------------------------------------------
# colour pipeline
# ---------------------------------------------------------------------------

def test_colour_zero_time_is_identity():
    rng = np.random.default_rng(13)
    img = _colour(rng)
    for mode, kwargs in (("global", {}), ("local", {"rho": 2.5})):
        out = enhance_colour(img, P11, 0.0, mode, **kwargs)
        assert np.array_equal(out.samples, img.samples)


def test_colour_grey_content_matches_grey_pipeline():
    rng = np.random.default_rng(14)
    grey = rng.integers(0, 256, (9, 13), dtype=np.uint8)
    img = ColourImage(np.repeat(grey[:, :, None], 3, axis=2))
    for t in (5e-4, math.inf):
        col = enhance_colour(img, P11, t, "global", lam=0.5)
        ref = enhance_grey_global(GreyImage(grey), P11, t)
        diff = np.abs(col.samples.astype(int) - ref.samples[:, :, None].astype(int))
        assert diff.max() <= 1
    col = enhance_colour(img, P11, 2e-3, "local", rho=3.0, lam=0.5)
    ref = enhance_grey_local(GreyImage(grey), P11, 2e-3, rho=3.0)
    diff = np.abs(col.samples.astype(int) - ref.samples[:, :, None].astype(int))
    assert diff.max() <= 1


def test_colour_two_luminance_steady_state():
    # two grey tones with equal counts equalise to 0.25 and 0.75
    grey = np.array([[30, 170]], dtype=np.uint8)
    img = ColourImage(np.repeat(grey[:, :, None], 3, axis=2))
    out = enhance_colour(img, P11, math.inf, "global", lam=0.5)
    units = to_unit(out.samples.astype(float))
    lum = luminance(units[..., 0], units[..., 1], units[..., 2])
    assert from_unit(lum[0, 0]) == 64
    assert from_unit(lum[0, 1]) == 192
    # grey pixels stay grey: hue (channel equality) preserved
    assert np.all(out.samples[..., 0] == out.samples[..., 1])
    assert np.all(out.samples[..., 1] == out.samples[..., 2])


def test_colour_local_mode_enhances():
    rng = np.random.default_rng(15)
    img = _colour(rng)
    out = enhance_colour(img, P11, 1e-3, "local", rho=2.5, lam=0.25)
    assert out.samples.shape == img.samples.shape
    assert not np.array_equal(out.samples, img.samples)
    units = to_unit(out.samples.astype(float))
    lum = luminance(units[..., 0], units[..., 1], units[..., 2])
    assert lum.std() > 0


def test_colour_validation():
    rng = np.random.default_rng(16)
    img = _colour(rng)
    with pytest.raises(ValueError):
        enhance_colour(img, P11, 1e-3, "global", lam=1.5)
    with pytest.raises(ValueError):
        enhance_colour(img, P11, 1e-3, "diagonal")
    with pytest.raises(ValueError, match="closed-form"):
        enhance_colour(img, P11, math.inf, "local", rho=2.0)


def test_image_type_validation():
    with pytest.raises(ValueError):
        GreyImage(np.zeros((3, 3), dtype=np.float64))
    with pytest.raises(ValueError):
        GreyImage(np.zeros((0, 3), dtype=np.uint8))
    with pytest.raises(ValueError):
        ColourImage(np.zeros((3, 3, 4), dtype=np.uint8))
    img = GreyImage(np.zeros((2, 5), dtype=np.uint8))
    assert img.width == 5 and img.height == 2
