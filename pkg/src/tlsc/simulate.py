"""Monte Carlo symbol error rates over an AWGN channel."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.stats import binomtest

from .codec import TorusCode

SIM_COLUMNS = ("snr_db", "mode", "trials", "errors", "rate", "ci_low", "ci_high")


@dataclass(frozen=True)
class ErrorStats:
    snr_db: float
    mode: str
    trials: int
    errors: int
    ci_low: float
    ci_high: float

    @property
    def rate(self) -> float:
        return self.errors / self.trials

    @property
    def ci_width(self) -> float:
        return self.ci_high - self.ci_low

    def row(self) -> list[str]:
        return [f"{self.snr_db:g}", self.mode, str(self.trials), str(self.errors),
                f"{self.rate:.6g}", f"{self.ci_low:.6g}", f"{self.ci_high:.6g}"]


def wilson_interval(errors: int, trials: int, level: float = 0.95) -> tuple[float, float]:
    ci = binomtest(errors, trials).proportion_ci(confidence_level=level, method="wilson")
    return float(ci.low), float(ci.high)


def noise_sigma(snr_db: float, n: int) -> float:
    """Per-coordinate noise std for unit-energy codewords in R^n."""
    if math.isinf(snr_db) and snr_db > 0:
        return 0.0
    snr = 10.0 ** (snr_db / 10.0)
    return math.sqrt(1.0 / (n * snr))


def _trial(code: TorusCode, sigma: float, seed: int, t: int, modes: Sequence[str]) -> list[bool]:
    # counter-based stream per trial: results do not depend on scheduling
    rng = np.random.default_rng([seed, t])
    label = code.random_label(rng)
    y = code.encode(label) + sigma * rng.standard_normal(2 * code.L)
    if not np.any(y):
        y = code.encode(label)
    return [code.decode(y, m).label != label for m in modes]


def awgn_trial(code: TorusCode, snr_db: float, trials: int, seed: int = 0,
               modes: Sequence[str] = ("ml",), workers: int = 1) -> list[ErrorStats]:
    """Send uniform codewords through AWGN and count symbol errors per decode mode.

    Every mode decodes the same noisy vectors (paired trials).
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    sigma = noise_sigma(snr_db, 2 * code.L)
    idx = range(trials)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            outcomes = list(ex.map(lambda t: _trial(code, sigma, seed, t, modes), idx))
    else:
        outcomes = [_trial(code, sigma, seed, t, modes) for t in idx]
    out = []
    for j, m in enumerate(modes):
        err = sum(o[j] for o in outcomes)
        lo, hi = wilson_interval(err, trials)
        out.append(ErrorStats(float(snr_db), m, trials, err, lo, hi))
    return out
