"""Smoke tests for the freqreg extension module."""

import math

import numpy as np
import pytest

import freqreg


def test_idct_matches_cosine_sum():
    rng = np.random.default_rng(0)
    coeffs = rng.normal(size=(4, 5))
    got = freqreg.idct_nd(coeffs)

    expected = np.zeros_like(coeffs)
    d0, d1 = coeffs.shape
    for y0 in range(d0):
        for y1 in range(d1):
            acc = 0.0
            for x0 in range(d0):
                for x1 in range(d1):
                    acc += (
                        coeffs[x0, x1]
                        * math.cos(math.pi / d0 * (y0 + 0.5) * x0)
                        * math.cos(math.pi / d1 * (y1 + 0.5) * x1)
                    )
            expected[y0, y1] = acc
    np.testing.assert_allclose(got, expected, atol=1e-10)


def test_round_trip():
    rng = np.random.default_rng(1)
    v = rng.normal(size=(3, 4, 5))
    np.testing.assert_allclose(freqreg.idct_nd(freqreg.dct_nd(v)), v, atol=1e-10)

    line = rng.normal(size=16).tolist()
    back = freqreg.idct_1d(freqreg.dct_1d(line))
    np.testing.assert_allclose(back, line, atol=1e-10)


def test_zigzag_plan():
    plan = freqreg.ZigzagPlan([3, 3])
    assert [plan.count_below(e) for e in (1, 2, 3)] == [1, 3, 6]
    assert plan.threshold_for_ratio(0.34, 1) == (2, 3)
    mask = plan.mask(2)
    assert mask.sum() == 3
    assert mask[0, 0] == 1 and mask[0, 1] == 1 and mask[1, 0] == 1


def test_frequency_tensor_truncation_and_gradient():
    rng = np.random.default_rng(2)
    w = rng.normal(size=(6, 6))
    t = freqreg.FrequencyTensor.from_spatial(w, 3)
    assert t.nonzero_budget() == 6
    coeffs = t.coefficients
    idx = np.indices(coeffs.shape).sum(axis=0)
    assert np.all(coeffs[idx >= 3] == 0.0)

    grad = t.backward(np.ones_like(w))
    assert np.all(grad[idx >= 3] == 0.0)

    err, ok = freqreg.gradcheck([6, 6], 3, seed=1)
    assert ok and err < 1e-4


def test_pack_round_trip():
    rng = np.random.default_rng(3)
    coeffs = rng.normal(size=(4, 4)).astype(np.float32).astype(np.float64)
    t = freqreg.FrequencyTensor.from_coefficients(coeffs, 3)
    data = freqreg.pack_tensor(t)
    assert data[:4] == b"FRT1"
    back = freqreg.unpack_tensor(data)
    np.testing.assert_array_equal(back.coefficients, t.coefficients)
    assert freqreg.pack_tensor(back) == data


def test_schedule_closed_form():
    s = freqreg.TruncationSchedule(0.01, 0.01)
    for n in range(1, 200):
        s.step()
        assert s.beta == pytest.approx(
            freqreg.TruncationSchedule.closed_form(1.0, 0.01, 0.01, n), abs=1e-12
        )


def test_synthetic_blobs_deterministic():
    xa, ya = freqreg.synthetic_blobs(3, 10, 8, 42)
    xb, yb = freqreg.synthetic_blobs(3, 10, 8, 42)
    np.testing.assert_array_equal(xa, xb)
    assert list(ya) == list(yb)
    assert xa.shape == (30, 1, 1, 8)
