import numpy as np
import pytest

from recmap.sampling import (
    EXTREME,
    STANDARD,
    DatasetSpec,
    SobolStream,
    angle_from_uniform,
    build_dataset,
    sobol_next,
    sobol_point,
    sobol_points,
)


def test_first_points_match_reference_values():
    s = SobolStream()
    assert np.allclose(sobol_next(s), [0.0, 0.0])
    assert np.allclose(sobol_next(s), [0.5, 0.5])
    assert np.allclose(sobol_next(s), [0.75, 0.25])
    assert np.allclose(sobol_next(s), [0.25, 0.75])


def test_matches_published_generator():
    qmc = pytest.importorskip("scipy.stats.qmc")
    reference = qmc.Sobol(2, scramble=False).random(512)
    ours = sobol_points(512)
    assert np.allclose(ours, reference, atol=1e-12)


def test_stream_agrees_with_random_access():
    s = SobolStream(scramble_seed=99)
    for i in range(200):
        assert np.array_equal(sobol_next(s), sobol_point(i, scramble_seed=99))


def _dyadic_counts(pts, ka, kb):
    na, nb = 1 << ka, 1 << kb
    counts = np.zeros((na, nb), dtype=int)
    ia = np.minimum((pts[:, 0] * na).astype(int), na - 1)
    ib = np.minimum((pts[:, 1] * nb).astype(int), nb - 1)
    for a, b in zip(ia, ib):
        counts[a, b] += 1
    return counts


def test_net_property_all_dyadic_shapes():
    # first 2^10 points: every dyadic box of volume 2^-10 holds exactly one
    pts = sobol_points(1024)
    for ka in range(11):
        counts = _dyadic_counts(pts, ka, 10 - ka)
        assert (counts == 1).all(), f"shape 2^-{ka} x 2^-{10 - ka}"


def test_scrambling_preserves_stratification_and_determinism():
    a = sobol_points(1024, scramble_seed=1234)
    b = sobol_points(1024, scramble_seed=1234)
    assert np.array_equal(a, b)
    c = sobol_points(1024, scramble_seed=77)
    assert not np.array_equal(a, c)
    counts = _dyadic_counts(a, 5, 5)
    assert (counts == 1).all()


def test_pseudo_random_baseline_violates_stratification():
    rng = np.random.default_rng(4242)
    pts = rng.random((1024, 2))
    counts = _dyadic_counts(pts, 5, 5)
    assert counts.max() > 1


def test_stream_exhaustion_guard():
    s = SobolStream()
    s.index = 1 << 31
    with pytest.raises(RuntimeError):
        s.next()


# --- angle densities ---------------------------------------------------------


def test_inverse_cdf_endpoints():
    for variant in (STANDARD, EXTREME):
        assert angle_from_uniform(0.0, variant) == 0.0
        assert angle_from_uniform(1.0, variant) == pytest.approx(89.0)


def test_inverse_cdf_monotone():
    us = np.linspace(0, 1, 2001)
    for variant in (STANDARD, EXTREME):
        thetas = angle_from_uniform(us, variant)
        assert (np.diff(thetas) >= 0).all()


def test_inverse_cdf_rejects_out_of_range():
    with pytest.raises(ValueError):
        angle_from_uniform(1.5, STANDARD)


def _density_oracle_mean(variant):
    # quadrature over the defining density, independent of the table code
    thetas = np.linspace(0.0, 89.0, 200001)
    pdf = 1.0 + variant.emphasis_c * np.exp((thetas - 89.0) / variant.emphasis_s)
    z = np.trapezoid(pdf, thetas)
    return np.trapezoid(thetas * pdf, thetas) / z


def _density_oracle_tail(variant, cutoff):
    thetas = np.linspace(0.0, 89.0, 200001)
    pdf = 1.0 + variant.emphasis_c * np.exp((thetas - 89.0) / variant.emphasis_s)
    z = np.trapezoid(pdf, thetas)
    sel = thetas >= cutoff
    return np.trapezoid(pdf[sel], thetas[sel]) / z


def test_standard_variant_emphasizes_large_angles():
    pts = sobol_points(10000)
    mapped = angle_from_uniform(pts[:, 0], STANDARD)
    assert mapped.mean() > 44.5
    assert mapped.mean() == pytest.approx(_density_oracle_mean(STANDARD), abs=0.5)


def test_extreme_variant_has_heavier_tail():
    pts = sobol_points(10000)
    std = angle_from_uniform(pts[:, 0], STANDARD)
    ext = angle_from_uniform(pts[:, 0], EXTREME)
    std_frac = float(np.mean(std > 70.0))
    ext_frac = float(np.mean(ext > 70.0))
    assert ext_frac > std_frac
    assert std_frac == pytest.approx(_density_oracle_tail(STANDARD, 70.0), abs=0.02)
    assert ext_frac == pytest.approx(_density_oracle_tail(EXTREME, 70.0), abs=0.02)


# --- dataset build ------------------------------------------------------------


def _spec(total=48, seed=5, variant=STANDARD):
    per = total - 2 * (total // 8)
    return DatasetSpec(
        variant=variant, total_pairs=total,
        splits=(per, total // 8, total // 8), seed=seed,
    )


def test_spec_validation():
    with pytest.raises(ValueError):
        DatasetSpec(total_pairs=10, splits=(8, 1, 2), seed=0).validate()
    with pytest.raises(ValueError):
        DatasetSpec(total_pairs=0, splits=(0, 0, 0), seed=0).validate()


def test_build_dataset_layout_and_manifest(tmp_path):
    out = tmp_path / "ds"
    manifest = build_dataset(_spec(), out)
    assert (out / "manifest.json").exists()
    assert len(list((out / "clean").glob("*.png"))) == 48
    assert len(list((out / "distorted").glob("*.png"))) == 48
    assert manifest["total_pairs"] == 48
    rec = manifest["records"][0]
    assert set(rec) == {
        "index", "digits", "alpha", "beta", "brightness", "contrast",
        "saturation", "blur_sigma", "jpeg_q", "split",
    }
    splits = [r["split"] for r in manifest["records"]]
    assert splits == ["train"] * 36 + ["val"] * 6 + ["test"] * 6
    for r in manifest["records"]:
        assert 0.0 <= r["alpha"] <= 89.0 and 0.0 <= r["beta"] <= 89.0
        assert 55 <= r["jpeg_q"] <= 85


def test_build_dataset_reruns_are_byte_identical(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    build_dataset(_spec(), out1)
    build_dataset(_spec(), out2)
    m1 = (out1 / "manifest.json").read_bytes()
    m2 = (out2 / "manifest.json").read_bytes()
    assert m1 == m2
    for sub in ("clean", "distorted"):
        for f1 in sorted((out1 / sub).glob("*.png")):
            f2 = out2 / sub / f1.name
            assert f1.read_bytes() == f2.read_bytes(), f1.name


def test_build_dataset_worker_count_invariance(tmp_path):
    out1, out2 = tmp_path / "j1", tmp_path / "j2"
    build_dataset(_spec(total=24), out1, jobs=1)
    build_dataset(_spec(total=24), out2, jobs=3)
    assert (out1 / "manifest.json").read_bytes() == (out2 / "manifest.json").read_bytes()
    for f1 in sorted((out1 / "distorted").glob("*.png")):
        assert f1.read_bytes() == (out2 / "distorted" / f1.name).read_bytes()


def test_different_seeds_give_different_datasets(tmp_path):
    out1, out2 = tmp_path / "s1", tmp_path / "s2"
    build_dataset(_spec(seed=5), out1)
    build_dataset(_spec(seed=6), out2)
    assert (out1 / "manifest.json").read_bytes() != (out2 / "manifest.json").read_bytes()
