import math

import numpy as np
import pytest

from recmap.image import Image, uniform
from recmap.metrics import SSIM_C1, psnr, score, ssim, worst_digit
from recmap.plates import render_plate


def test_psnr_identical_is_infinite():
    img = uniform(16, 16, (10, 20, 30))
    assert math.isinf(psnr(img, img))


def test_psnr_unit_difference():
    a = uniform(8, 8, (100, 100, 100))
    b = uniform(8, 8, (101, 101, 101))
    assert psnr(a, b) == pytest.approx(10.0 * math.log10(255.0**2), abs=1e-9)
    assert psnr(a, b) == pytest.approx(48.13, abs=0.005)


def test_psnr_full_range_is_zero():
    a = uniform(8, 8, (0, 0, 0))
    b = uniform(8, 8, (255, 255, 255))
    assert psnr(a, b) == pytest.approx(0.0, abs=1e-12)


def test_psnr_rejects_mismatched_shapes():
    with pytest.raises(ValueError):
        psnr(uniform(8, 8, (0, 0, 0)), uniform(8, 9, (0, 0, 0)))


def test_psnr_strictly_decreases_along_noise_ladder():
    rng = np.random.default_rng(41)
    base = rng.integers(60, 196, (32, 48, 3)).astype(np.int64)
    previous = math.inf
    for amplitude in (1, 2, 5, 10, 25, 60):
        noise = rng.integers(-amplitude, amplitude + 1, base.shape)
        noisy = np.clip(base + noise, 0, 255).astype(np.uint8)
        value = psnr(Image(base.astype(np.uint8)), Image(noisy))
        assert value < previous
        previous = value


def test_ssim_self_is_one():
    rng = np.random.default_rng(42)
    img = Image(rng.integers(0, 256, (24, 40, 3), dtype=np.uint8))
    assert ssim(img, img) == pytest.approx(1.0, abs=1e-9)


def test_ssim_symmetric():
    rng = np.random.default_rng(43)
    a = Image(rng.integers(0, 256, (20, 30, 3), dtype=np.uint8))
    b = Image(rng.integers(0, 256, (20, 30, 3), dtype=np.uint8))
    assert ssim(a, b) == pytest.approx(ssim(b, a), abs=1e-12)


def test_ssim_constant_images_formula():
    a = uniform(24, 24, (100, 100, 100))
    b = uniform(24, 24, (110, 110, 110))
    expected = (2 * 100 * 110 + SSIM_C1) / (100**2 + 110**2 + SSIM_C1)
    assert ssim(a, b) == pytest.approx(expected, abs=1e-12)
    assert abs(ssim(a, b) - 0.9957) < 5e-4


def test_ssim_bounds_and_identity_characterization():
    rng = np.random.default_rng(44)
    for _ in range(10):
        a = Image(rng.integers(0, 256, (16, 20), dtype=np.uint8))
        b = Image(rng.integers(0, 256, (16, 20), dtype=np.uint8))
        v = ssim(a, b)
        assert -1.0 <= v <= 1.0
        if not np.array_equal(a.pixels, b.pixels):
            assert v < 1.0 - 1e-9


def test_ssim_rejects_images_smaller_than_window():
    a = uniform(10, 10, (1, 1, 1))
    with pytest.raises(ValueError):
        ssim(a, a)


def test_worst_digit_localizes_corruption():
    plate = render_plate("135791")
    corrupted = plate.image.pixels.copy()
    box = plate.boxes[3]
    corrupted[box.y : box.y + box.h, box.x : box.x + box.w] ^= 0x55
    bad = Image(corrupted)
    expected = psnr(
        Image(bad.pixels[box.y : box.y + box.h, box.x : box.x + box.w]),
        Image(plate.image.pixels[box.y : box.y + box.h, box.x : box.x + box.w]),
    )
    assert worst_digit(bad, plate.image, plate.boxes, "psnr") == pytest.approx(expected)
    per_digit = [
        psnr(
            Image(bad.pixels[b.y : b.y + b.h, b.x : b.x + b.w]),
            Image(plate.image.pixels[b.y : b.y + b.h, b.x : b.x + b.w]),
        )
        for b in plate.boxes
    ]
    assert worst_digit(bad, plate.image, plate.boxes, "psnr") <= max(per_digit)


def test_worst_digit_identical_images():
    plate = render_plate("223344")
    assert math.isinf(worst_digit(plate.image, plate.image, plate.boxes, "psnr"))
    assert worst_digit(plate.image, plate.image, plate.boxes, "ssim") == pytest.approx(1.0, abs=1e-9)


def test_score_on_identical_images():
    plate = render_plate("772951")
    s = score(plate.image, plate)
    assert math.isinf(s.psnr_plate)
    assert s.ssim_plate == pytest.approx(1.0, abs=1e-9)
    assert s.ocr_plate_ok is True
    assert s.ocr_digit_acc == 1.0


def test_score_single_wrong_digit():
    plate = render_plate("772951")
    other = render_plate("772952")  # differs in the last slot
    s = score(other.image, plate)
    assert s.ocr_digit_acc == pytest.approx(5 / 6)
    assert s.ocr_plate_ok is False


def test_score_order_invariance():
    plate = render_plate("908070")
    other = render_plate("918273")
    first = [score(other.image, plate) for _ in range(3)]
    assert all(s == first[0] for s in first)
