"""Line fitting, correction application, and the calibration store."""

from __future__ import annotations

import math
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from vmsolver.calibration import (
    IDENTITY,
    AffineCorrection,
    CalibrationStore,
    FitResult,
    ProfilingSample,
    apply_ctcf,
    fit_ctcf,
)
from vmsolver.errors import (
    DegenerateDesign,
    InsufficientSamples,
    SchemaError,
    UnreadableSource,
)


def _samples(pairs, instance="g4dn.xlarge", phase="prefill"):
    return [
        ProfilingSample(
            instance_name=instance,
            phase=phase,
            batch_size=i + 1,
            theoretical_s=x,
            measured_s=y,
        )
        for i, (x, y) in enumerate(pairs)
    ]


def closed_form_ols(xs, ys):
    """Independent textbook least squares, kept free of numpy fitting."""
    n = len(xs)
    mean_x = sum(xs) / n
    mean_y = sum(ys) / n
    sxx = sum((x - mean_x) ** 2 for x in xs)
    sxy = sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
    alpha = sxy / sxx
    return alpha, mean_y - alpha * mean_x


# --- apply ---------------------------------------------------------------

def test_apply_identity():
    assert apply_ctcf(IDENTITY, 0.5) == 0.5
    assert apply_ctcf(IDENTITY, 0.0) == 0.0


def test_apply_published_correction_row():
    # negative slope with a fixed offset, in seconds
    row = AffineCorrection(alpha=-0.185, beta=0.02435)
    assert apply_ctcf(row, 0.100) == pytest.approx(0.00585, rel=1e-12)
    # larger input drives the line negative; clamped to zero
    assert apply_ctcf(row, 0.200) == 0.0


def test_apply_rejects_negative_time():
    with pytest.raises(ValueError):
        apply_ctcf(IDENTITY, -1.0)


# --- fit -----------------------------------------------------------------

def test_fit_exact_line():
    xs = [0.1, 0.2, 0.4, 0.8]
    fit = fit_ctcf(_samples([(x, 2 * x + 0.01) for x in xs]))
    assert fit.alpha == pytest.approx(2.0, abs=1e-12)
    assert fit.beta == pytest.approx(0.01, abs=1e-12)
    assert fit.avg_error_rate < 1e-12
    assert fit.sample_count == 4


def test_fit_three_collinear_points():
    fit = fit_ctcf(_samples([(1, 3), (2, 5), (3, 7)]))
    assert fit.alpha == pytest.approx(2.0, abs=1e-12)
    assert fit.beta == pytest.approx(1.0, abs=1e-12)
    assert fit.avg_error_rate == pytest.approx(0.0, abs=1e-12)


def test_fit_error_paths():
    with pytest.raises(InsufficientSamples):
        fit_ctcf(_samples([(1.0, 2.0)]))
    with pytest.raises(DegenerateDesign):
        fit_ctcf(_samples([(1.0, 2.0), (1.0, 3.0), (1.0, 4.0)]))


def test_fit_matches_closed_form_on_noisy_data():
    rng = random.Random(99)
    xs = [rng.uniform(0.05, 2.0) for _ in range(40)]
    ys = [1.7 * x + 0.02 + rng.gauss(0, 0.05 * x) for x in xs]
    ys = [max(y, 1e-6) for y in ys]
    fit = fit_ctcf(_samples(list(zip(xs, ys))))
    alpha, beta = closed_form_ols(xs, ys)
    assert fit.alpha == pytest.approx(alpha, rel=1e-9)
    assert fit.beta == pytest.approx(beta, rel=1e-9)


def test_fit_optimality_under_perturbation():
    rng = random.Random(41)
    xs = [rng.uniform(0.01, 1.0) for _ in range(25)]
    ys = [max(1e-9, 0.9 * x + 0.03 + rng.gauss(0, 0.02)) for x in xs]
    fit = fit_ctcf(_samples(list(zip(xs, ys))))

    def sse(a, b):
        return sum((a * x + b - y) ** 2 for x, y in zip(xs, ys))

    best = sse(fit.alpha, fit.beta)
    for da in (-1e-3, 0.0, 1e-3):
        for db in (-1e-3, 0.0, 1e-3):
            assert sse(fit.alpha + da, fit.beta + db) >= best - 1e-15


@given(
    alpha=st.floats(min_value=0.05, max_value=5.0, allow_nan=False),
    beta=st.floats(min_value=0.0, max_value=0.5, allow_nan=False),
)
def test_fit_round_trip_recovery(alpha, beta):
    xs = [0.05, 0.1, 0.2, 0.4, 0.8, 1.6]
    fit = fit_ctcf(_samples([(x, alpha * x + beta) for x in xs]))
    assert fit.alpha == pytest.approx(alpha, rel=1e-9, abs=1e-12)
    assert fit.beta == pytest.approx(beta, rel=1e-9, abs=1e-12)


def test_fit_affine_equivariance():
    xs = [0.1, 0.3, 0.7, 1.1]
    ys = [0.25, 0.5, 1.4, 2.0]
    base = fit_ctcf(_samples(list(zip(xs, ys))))
    scaled = fit_ctcf(_samples([(x, 3.0 * y) for x, y in zip(xs, ys)]))
    assert scaled.alpha == pytest.approx(3.0 * base.alpha, rel=1e-9)
    assert scaled.beta == pytest.approx(3.0 * base.beta, rel=1e-9)
    shifted = fit_ctcf(_samples([(x, y + 0.5) for x, y in zip(xs, ys)]))
    assert shifted.alpha == pytest.approx(base.alpha, rel=1e-9)
    assert shifted.beta == pytest.approx(base.beta + 0.5, rel=1e-9)


def test_error_rate_uses_clamped_prediction():
    # slope forced so negative predictions occur; the error rate must be
    # computed against the clamped (physical) correction
    samples = _samples([(1.0, 0.2), (2.0, 0.1), (3.0, 0.05)])
    fit = fit_ctcf(samples)
    corr = AffineCorrection(fit.alpha, fit.beta)
    expected = np.mean(
        [abs(apply_ctcf(corr, s.theoretical_s) - s.measured_s) / s.measured_s
         for s in samples]
    )
    assert fit.avg_error_rate == pytest.approx(float(expected), rel=1e-12)


# --- profiling ingestion -------------------------------------------------

HEADER = "instance,phase,batch_size,theoretical_ms,measured_ms\n"


def test_ingest_profile_groups_and_units(tmp_path):
    rows = [HEADER]
    for bs, theo in ((1, 10), (2, 20), (4, 40), (8, 80), (16, 160), (32, 320)):
        rows.append(f"g4dn.xlarge,prefill,{bs},{theo},{2 * theo + 5}\n")
    path = tmp_path / "profile.csv"
    path.write_text("".join(rows))

    store = CalibrationStore()
    fitted = store.ingest_profile(path)
    assert [(i, p) for i, p, _ in fitted] == [("g4dn.xlarge", "prefill")]
    entry = store.entry("g4dn.xlarge", "prefill")
    assert entry.alpha == pytest.approx(2.0, rel=1e-9)
    # 5 ms offset arrives as seconds
    assert entry.beta == pytest.approx(0.005, rel=1e-9)
    assert entry.sample_count == 6

    params, uncalibrated = store.params_for("g4dn.xlarge")
    assert not uncalibrated
    assert params.prefill.alpha == pytest.approx(2.0, rel=1e-9)
    assert params.decode == IDENTITY  # missing phase falls back to identity
    assert params.fitted_from == {"prefill": 6, "decode": 0}


def test_ingest_empty_profile(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text(HEADER)
    store = CalibrationStore()
    assert store.ingest_profile(path) == []
    assert store.instances() == ()

    headerless = tmp_path / "zero.csv"
    headerless.write_text("")
    assert store.ingest_profile(headerless) == []


def test_ingest_schema_errors(tmp_path):
    bad_value = tmp_path / "bad.csv"
    bad_value.write_text(HEADER + "g4dn.xlarge,prefill,1,10,-5\n")
    with pytest.raises(SchemaError) as err:
        CalibrationStore().ingest_profile(bad_value)
    assert err.value.line == 2

    bad_phase = tmp_path / "phase.csv"
    bad_phase.write_text(HEADER + "g4dn.xlarge,warmup,1,10,5\n")
    with pytest.raises(SchemaError):
        CalibrationStore().ingest_profile(bad_phase)

    bad_header = tmp_path / "header.csv"
    bad_header.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(SchemaError) as err:
        CalibrationStore().ingest_profile(bad_header)
    assert err.value.line == 1

    with pytest.raises(UnreadableSource):
        CalibrationStore().ingest_profile(tmp_path / "missing.csv")


def test_ingest_unknown_instance_warns_but_stores(tmp_path, caplog):
    path = tmp_path / "profile.csv"
    path.write_text(HEADER + "mystery,decode,1,10,20\nmystery,decode,2,20,40\n")
    store = CalibrationStore()
    with caplog.at_level("WARNING"):
        store.ingest_profile(path, known_instances=["g4dn.xlarge"])
    assert "mystery" in caplog.text
    assert store.has("mystery")


# --- store ---------------------------------------------------------------

def test_store_round_trip(tmp_path):
    store = CalibrationStore(source="test")
    store.put("g4dn.xlarge", "prefill", FitResult(-0.185, 0.02435, 0.0447, 6))
    store.put("g4dn.xlarge", "decode", FitResult(1.2, 0.0, 0.01, 6))
    path = tmp_path / "store.json"
    store.save(path)

    loaded = CalibrationStore.load(path)
    assert loaded.entry("g4dn.xlarge", "prefill").alpha == -0.185
    assert loaded.entry("g4dn.xlarge", "decode").beta == 0.0
    assert loaded.to_document() == store.to_document()


def test_store_last_write_wins(tmp_path):
    store = CalibrationStore()
    store.put("a", "prefill", FitResult(1.0, 0.0, 0.0, 2))
    store.put("a", "prefill", FitResult(3.0, 0.1, 0.0, 4))
    assert store.entry("a", "prefill").alpha == 3.0


def test_identity_fallback():
    store = CalibrationStore.load("identity")
    params, uncalibrated = store.params_for("whatever")
    assert uncalibrated
    assert params.prefill == params.decode == IDENTITY
    assert apply_ctcf(params.prefill, 0.123) == 0.123


def test_bundled_fixtures_parse():
    for fixture in ("online-measured", "online-measured-600slo", "offline-measured"):
        store = CalibrationStore.load(fixture)
        assert store.instances()
        for name in store.instances():
            params, uncalibrated = store.params_for(name)
            assert not uncalibrated
            assert math.isfinite(params.prefill.alpha)
            assert math.isfinite(params.decode.alpha)
