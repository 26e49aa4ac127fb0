import io
import math

import numpy as np
import pytest
from PIL import Image

from ocrforge.augment import (
    TRANSFORM_ORDER,
    AugmentationConfig,
    AugmentationRecipe,
    apply,
    brightness,
    contrast,
    gaussian_blur,
    gaussian_kernel_1d,
    gaussian_noise,
    jpeg_degrade,
    motion_blur,
    motion_kernel,
    plan_recipe,
    resolution_degrade,
    rotate,
    salt_pepper,
    skew,
)
from ocrforge.prng import Stream, substream_for_sample

WHITE = (255, 255, 255)


def gradient_image(h=64, w=256):
    ys, xs = np.mgrid[0:h, 0:w]
    img = np.stack([xs % 256, ys * 3 % 256, (xs + ys) % 256], axis=2)
    return img.astype(np.uint8)


def gray(value, h=64, w=256):
    return np.full((h, w, 3), value, dtype=np.uint8)


class TestPlanRecipe:
    def test_probability_zero_always_clean(self):
        cfg = AugmentationConfig(probability=0.0)
        s = Stream(42)
        for _ in range(200):
            r = plan_recipe(cfg, s)
            assert not r.applied and r.steps == ()

    def test_canonical_order(self):
        cfg = AugmentationConfig(probability=1.0, max_transforms=10)
        s = Stream(7)
        for _ in range(300):
            r = plan_recipe(cfg, s)
            ranks = [TRANSFORM_ORDER.index(k) for k in r.kinds]
            assert ranks == sorted(ranks)
            assert len(set(r.kinds)) == len(r.kinds)

    def test_respects_enabled_subset(self):
        cfg = AugmentationConfig(probability=1.0, enabled=("rotation", "jpeg"), max_transforms=4)
        s = Stream(3)
        for _ in range(100):
            r = plan_recipe(cfg, s)
            assert set(r.kinds) <= {"rotation", "jpeg"}
            assert 1 <= len(r.steps) <= 2

    def test_mean_transforms_and_rates(self):
        cfg = AugmentationConfig(probability=0.7, max_transforms=4)
        total = 0
        augmented = 0
        clean = 0
        per_kind = {k: 0 for k in TRANSFORM_ORDER}
        n = 100_000
        for i in range(n):
            r = plan_recipe(cfg, Stream(substream_for_sample(42, i)))
            if r.applied:
                augmented += 1
                total += len(r.steps)
                for k in r.kinds:
                    per_kind[k] += 1
            else:
                clean += 1
        assert abs(clean / n - 0.30) < 0.01
        assert abs(total / augmented - 2.5) < 0.05
        for k, c in per_kind.items():
            assert abs(c / augmented - 0.25) < 0.01, k

    def test_parameters_within_ranges(self):
        cfg = AugmentationConfig(probability=1.0, max_transforms=10)
        s = Stream(11)
        for _ in range(500):
            plan_recipe(cfg, s)  # bound assertions run at plan time

    def test_no_enabled_transforms_is_clean(self):
        cfg = AugmentationConfig(probability=1.0, enabled=())
        assert plan_recipe(cfg, Stream(1)).applied is False


class TestConfigValidation:
    def test_bad_probability(self):
        with pytest.raises(ValueError):
            AugmentationConfig(probability=1.5)

    def test_bad_quality_domain(self):
        with pytest.raises(ValueError):
            AugmentationConfig(jpeg_quality=(0, 70))

    def test_bad_scale_domain(self):
        with pytest.raises(ValueError):
            AugmentationConfig(resolution_scale=(0.3, 1.5))

    def test_unknown_transform(self):
        with pytest.raises(ValueError):
            AugmentationConfig(enabled=("sharpen",))

    def test_motion_kernel_cap(self):
        AugmentationConfig(motion_kernel=(3, 15))
        with pytest.raises(ValueError):
            AugmentationConfig(motion_kernel=(3, 17))


class TestRotate:
    def test_zero_identity(self):
        img = gradient_image()
        assert np.array_equal(rotate(img, 0.0, WHITE), img)

    def test_constant_invariant(self):
        img = gray(77)
        assert np.array_equal(rotate(img, 9.5, (77, 77, 77)), img)

    def test_ninety_degree_permutation(self):
        img = gradient_image(h=33, w=33)
        got = rotate(img, 90.0, (0, 0, 0))
        n = 33
        expected = img.transpose(1, 0, 2)[:, ::-1]  # out[y, x] = src[n-1-x, y]
        assert np.array_equal(got, expected)

    def test_even_square_ninety(self):
        img = gradient_image(h=32, w=32)
        got = rotate(img, 90.0, (0, 0, 0))
        expected = img.transpose(1, 0, 2)[:, ::-1]
        assert np.array_equal(got, expected)

    def test_corners_take_fill(self):
        img = gray(200, h=32, w=32)
        got = rotate(img, 45.0, (1, 2, 3))
        assert tuple(got[0, 0]) == (1, 2, 3)


class TestSkew:
    def test_zero_identity(self):
        img = gradient_image()
        assert np.array_equal(skew(img, 0.0, 0.0, WHITE), img)

    def test_constant_invariant(self):
        img = gray(150)
        assert np.array_equal(skew(img, 0.2, -0.1, (150, 150, 150)), img)

    def test_center_row_unshifted_displacement_linear(self):
        # vertical line at column 40; shear sx=0.2 moves it by 0.2*(y-cy)
        h, w = 65, 129
        img = np.zeros((h, w, 3), dtype=np.uint8)
        img[:, 40] = 255
        got = skew(img, 0.2, 0.0, (0, 0, 0))
        cy = (h - 1) // 2
        center_cols = np.where(got[cy, :, 0] > 0)[0]
        assert 40 in center_cols
        for dy in (10, 20, 30):
            row_cols = np.where(got[cy + dy, :, 0] > 127)[0]
            # forward shear x' = x + sx*(y-cy): ink shifts right below center
            assert abs(row_cols.mean() - (40 + 0.2 * dy)) <= 1.0


class TestGaussianBlur:
    def test_kernel_normalized(self):
        for sigma in (0.5, 1.0, 2.0, 3.7):
            assert abs(gaussian_kernel_1d(sigma).sum() - 1.0) < 1e-6

    def test_constant_within_one(self):
        img = gray(100)
        out = gaussian_blur(img, 2.0)
        assert np.abs(out.astype(int) - 100).max() <= 1

    def test_single_white_pixel_center_value(self):
        img = np.zeros((33, 33, 3), dtype=np.uint8)
        img[16, 16] = 255
        out = gaussian_blur(img, 1.0)
        # hand-built oracle: separable center weight is k[r]^2
        radius = math.ceil(3.0)
        xs = np.arange(-radius, radius + 1, dtype=np.float64)
        k = np.exp(-(xs**2) / 2.0)
        k /= k.sum()
        expected = int(round(255 * k[radius] ** 2))
        assert int(out[16, 16, 0]) == expected


class TestMotionBlur:
    def test_k_one_identity(self):
        img = gradient_image()
        assert np.array_equal(motion_blur(img, 1, 0.3), img)

    def test_constant_within_one(self):
        img = gray(64)
        out = motion_blur(img, 5, 1.1)
        assert np.abs(out.astype(int) - 64).max() <= 1

    def test_horizontal_equals_box_blur(self):
        from scipy import ndimage

        img = gradient_image()
        got = motion_blur(img, 5, 0.0)
        kern = np.zeros((5, 5))
        kern[2, :] = 1 / 5
        expected = np.empty_like(img)
        f = img.astype(np.float64)
        for ch in range(3):
            expected[:, :, ch] = np.clip(
                np.rint(ndimage.convolve(f[:, :, ch], kern, mode="nearest")), 0, 255
            )
        assert np.array_equal(got, expected)

    def test_even_k_rounds_up(self):
        assert motion_kernel(4, 0.0).shape == (5, 5)

    def test_kernel_weights_sum_one(self):
        for k, a in [(3, 0.0), (5, 0.7), (7, 2.3), (15, 5.5)]:
            assert abs(motion_kernel(k, a).sum() - 1.0) < 1e-12


class TestGaussianNoise:
    def test_sigma_zero_identity(self):
        img = gradient_image()
        assert np.array_equal(gaussian_noise(img, 0.0, Stream(1)), img)

    def test_mid_gray_statistics(self):
        img = gray(128, h=64, w=256)
        out = gaussian_noise(img, 25.0, Stream(42)).astype(np.float64)
        assert abs(out[:, :, 0].mean() - 128) < 0.5
        assert abs(out[:, :, 0].std() - 25) < 1.0

    def test_shared_deviate_across_channels(self):
        img = gray(128, h=8, w=8)
        out = gaussian_noise(img, 20.0, Stream(5)).astype(int)
        assert np.array_equal(out[:, :, 0], out[:, :, 1])
        assert np.array_equal(out[:, :, 0], out[:, :, 2])

    def test_black_never_negative(self):
        img = gray(0, h=16, w=16)
        out = gaussian_noise(img, 50.0, Stream(9))
        assert out.min() >= 0

    def test_consumes_two_uniforms_per_pixel(self):
        img = gray(128, h=4, w=4)
        s = Stream(42)
        before = s.state
        gaussian_noise(img, 10.0, s)
        ref = Stream(before)
        ref.uniform_array(2 * 16)
        assert s.state == ref.state


class TestSaltPepper:
    def test_p_zero_identity(self):
        img = gradient_image()
        assert np.array_equal(salt_pepper(img, 0.0, Stream(1)), img)

    def test_p_one_full_support(self):
        img = gray(128, h=16, w=16)
        out = salt_pepper(img, 1.0, Stream(3))
        flat = out.reshape(-1, 3)
        assert set(map(tuple, flat)) <= {(0, 0, 0), (255, 255, 255)}

    def test_affected_count_in_binomial_band(self):
        img = gray(128, h=64, w=256)
        out = salt_pepper(img, 0.05, Stream(substream_for_sample(42, 0)))
        affected = int((out[:, :, 0] != 128).sum())
        assert abs(affected - 819) <= 90

    def test_consumes_one_uniform_per_pixel(self):
        img = gray(128, h=4, w=4)
        s = Stream(42)
        before = s.state
        salt_pepper(img, 0.5, s)
        ref = Stream(before)
        ref.uniform_array(16)
        assert s.state == ref.state


class TestJpeg:
    def test_high_quality_high_psnr(self, sans_path):
        from ocrforge.fonts import FontEntry
        from ocrforge.renderer import BackgroundSpec, paint_background, plan_layout, render
        from ocrforge.textprep import Segment, grapheme_count

        font = FontEntry(sans_path, 100.0)
        plan = plan_layout(
            Segment("سلام دنیا", grapheme_count("سلام دنیا")), font, 32,
            (0, 0, 0), BackgroundSpec(mode="color"), 256, 64, "rtl", "center", 10, 10,
        )
        img = render(plan, paint_background(plan.background, 256, 64))
        out = jpeg_degrade(img, 100)
        mse = np.mean((img.astype(np.float64) - out.astype(np.float64)) ** 2)
        psnr = 10 * math.log10(255**2 / mse) if mse else math.inf
        assert psnr > 35

    def test_lower_quality_smaller_file(self):
        img = gradient_image()
        sizes = {}
        for q in (30, 90):
            buf = io.BytesIO()
            Image.fromarray(img, "RGB").save(buf, format="JPEG", quality=q)
            sizes[q] = buf.tell()
        assert sizes[30] < sizes[90]

    def test_dimensions_preserved(self):
        img = gradient_image(h=31, w=77)
        for q in (1, 50, 100):
            assert jpeg_degrade(img, q).shape == img.shape


class TestResolution:
    def test_scale_one_identity(self):
        img = gradient_image()
        assert np.array_equal(resolution_degrade(img, 1.0), img)

    def test_constant_within_one(self):
        img = gray(99)
        out = resolution_degrade(img, 0.4)
        assert np.abs(out.astype(int) - 99).max() <= 1

    def test_thin_line_spreads(self):
        img = np.zeros((32, 64, 3), dtype=np.uint8)
        img[:, 30] = 255
        out = resolution_degrade(img, 0.5)
        lit_cols = np.where(out[16, :, 0] > 0)[0]
        assert lit_cols.size >= 2
        assert 0 < out[16, lit_cols[0], 0] < 255 or 0 < out[16, lit_cols[-1], 0] < 255


class TestLighting:
    def test_brightness_identity(self):
        img = gradient_image()
        assert np.array_equal(brightness(img, 0.0), img)

    def test_brightness_scale(self):
        assert brightness(gray(100), 0.15)[0, 0, 0] == 115

    def test_brightness_clips(self):
        assert brightness(gray(255), 0.15)[0, 0, 0] == 255

    def test_contrast_identity_exact_all_levels(self):
        levels = np.arange(256, dtype=np.uint8).reshape(16, 16, 1).repeat(3, axis=2)
        assert np.array_equal(contrast(levels, 1.0), levels)

    def test_contrast_fixed_points(self):
        for gamma in (0.7, 1.3, 2.0):
            assert contrast(gray(0), gamma)[0, 0, 0] == 0
            assert contrast(gray(255), gamma)[0, 0, 0] == 255

    def test_contrast_gamma_two(self):
        assert contrast(gray(128), 2.0)[0, 0, 0] == round(255 * (128 / 255) ** 2) == 64


class TestApply:
    def test_empty_recipe_identity(self):
        img = gradient_image()
        out = apply(img, AugmentationRecipe(), WHITE, Stream(1))
        assert np.array_equal(out, img)

    def test_identity_parameters(self):
        img = gradient_image()
        recipe = AugmentationRecipe(
            steps=(("brightness", {"delta": 0.0}), ("contrast", {"gamma": 1.0})),
            applied=True,
        )
        out = apply(img, recipe, WHITE, Stream(1))
        assert np.array_equal(out, img)

    def test_deterministic(self):
        cfg = AugmentationConfig(probability=1.0, max_transforms=4)
        img = gradient_image()
        r = plan_recipe(cfg, Stream(substream_for_sample(42, 3)))
        a = apply(img, r, WHITE, Stream(substream_for_sample(7, 0)))
        b = apply(img, r, WHITE, Stream(substream_for_sample(7, 0)))
        assert np.array_equal(a, b)

    @pytest.mark.parametrize("kind,params", [
        ("rotation", {"degrees": -10.0}),
        ("rotation", {"degrees": 10.0}),
        ("skew", {"sx": 0.2, "sy": -0.1}),
        ("gaussian_blur", {"sigma": 2.0}),
        ("motion_blur", {"k": 7, "alpha": 5.9}),
        ("gaussian_noise", {"sigma": 25.0}),
        ("salt_pepper", {"p": 0.05}),
        ("jpeg", {"quality": 30}),
        ("resolution", {"scale": 0.3}),
        ("brightness", {"delta": -0.15}),
        ("contrast", {"gamma": 1.3}),
    ])
    def test_every_transform_preserves_validity(self, kind, params):
        img = gradient_image(h=32, w=96)
        recipe = AugmentationRecipe(steps=((kind, params),), applied=True)
        out = apply(img, recipe, WHITE, Stream(11))
        assert out.shape == img.shape
        assert out.dtype == np.uint8
