import math

import numpy as np
import pytest

from tlsc.simulate import awgn_trial, noise_sigma, wilson_interval


def test_wilson_interval_closed_form():
    z = 1.959963984540054
    for k, n in ((0, 100), (3, 50), (50, 100), (100, 100)):
        p = k / n
        den = 1 + z * z / n
        mid = (p + z * z / (2 * n)) / den
        half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / den
        lo, hi = wilson_interval(k, n)
        assert lo == pytest.approx(mid - half, abs=1e-12)
        assert hi == pytest.approx(mid + half, abs=1e-12)


def test_noise_sigma():
    assert noise_sigma(math.inf, 4) == 0.0
    assert noise_sigma(0.0, 4) == pytest.approx(0.5)
    assert noise_sigma(10.0, 4) == pytest.approx(math.sqrt(1 / 40))


def test_noiseless_has_no_errors(code05):
    (st,) = awgn_trial(code05, math.inf, 200)
    assert st.errors == 0 and st.rate == 0 and st.ci_low == 0


def test_low_snr_has_errors(code05):
    fast, ml = awgn_trial(code05, 5.0, 400, seed=1, modes=("fast", "ml"))
    assert ml.errors > 0
    assert 0 <= ml.ci_low <= ml.rate <= ml.ci_high <= 1
    # paired trials: ML never makes more errors than the fast decoder by much
    assert ml.errors <= fast.errors + 5


def test_error_rate_falls_with_snr(code03):
    rates = [awgn_trial(code03, s, 400, seed=2)[0].rate for s in (10.0, 16.0, 22.0)]
    assert rates[0] >= rates[1] >= rates[2]


def test_determinism_across_workers(code03):
    a = awgn_trial(code03, 14.0, 300, seed=7, modes=("fast", "ml"), workers=1)
    b = awgn_trial(code03, 14.0, 300, seed=7, modes=("fast", "ml"), workers=4)
    c = awgn_trial(code03, 14.0, 300, seed=7, modes=("fast", "ml"), workers=1)
    assert [s.row() for s in a] == [s.row() for s in b] == [s.row() for s in c]
    d = awgn_trial(code03, 14.0, 300, seed=8, modes=("fast", "ml"))
    assert [s.row() for s in a] != [s.row() for s in d]


def test_trial_count_validated(code05):
    with pytest.raises(ValueError):
        awgn_trial(code05, 10.0, 0)


def test_rate_matches_wilson_width(code05):
    (st,) = awgn_trial(code05, 8.0, 500, seed=3)
    assert st.ci_width == pytest.approx(st.ci_high - st.ci_low)
    assert st.ci_width < 0.1
    assert np.isclose(float(st.row()[4]), st.rate, rtol=1e-5)
