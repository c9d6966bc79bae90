"""Sum rate, energy efficiency and SINR-threshold connectivity."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .power import PowerVector
from .scheduling import SinrReport


@dataclass
class MetricSet:
    sum_rate: float
    energy_efficiency: float
    connectivity: float
    per_user_rates: np.ndarray


def _sinr(report) -> np.ndarray:
    return report.sinr if isinstance(report, SinrReport) else np.asarray(report, dtype=float)


def per_user_rates(report) -> np.ndarray:
    # log1p keeps tiny positive SINRs at a positive rate.
    return np.log1p(_sinr(report)) / np.log(2.0)


def sum_rate(report) -> float:
    """``sum_i log2(1 + SINR_i)`` in bit/s/Hz."""
    return float(per_user_rates(report).sum())


def energy_efficiency(rate: float, powers) -> float:
    total = powers.total if isinstance(powers, PowerVector) else float(np.sum(powers))
    if not total > 0:
        raise ValueError("energy efficiency needs a positive total power")
    return rate / total


def connectivity(report, threshold_db: float = 0.0) -> float:
    """Fraction of users with ``10 log10(SINR) >= threshold_db``."""
    if not np.isfinite(threshold_db):
        raise ValueError("threshold_db must be finite")
    sinr = _sinr(report)
    if len(sinr) == 0:
        return 0.0
    # Compare in the linear domain so SINR = 0 needs no log special case.
    return float(np.mean(sinr >= 10.0 ** (threshold_db / 10.0)))


def metric_set(report, powers, threshold_db: float = 0.0) -> MetricSet:
    rates = per_user_rates(report)
    total = float(rates.sum())
    return MetricSet(total, energy_efficiency(total, powers), connectivity(report, threshold_db), rates)
