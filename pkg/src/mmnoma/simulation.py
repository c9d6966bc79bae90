"""Seeded Monte Carlo trials, campaigns and sweeps.

A trial runs drop -> classify -> cluster -> beamform -> allocate -> schedule
-> metrics on one channel realisation.  Every random draw comes from streams
derived from ``(master_seed, trial_index)`` alone, so two configs that differ
only in scheme, clustering, allocator or policy see identical drops and
channels (paired comparison), and campaign results do not depend on the
order or thread in which trials run.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .beamforming import build_beams
from .clustering import ClusterAssignment, hybrid_cluster, no_clustering
from .config import ScenarioConfig
from .geometry import ArrayConfig, FieldClass, drop_users, user_channel
from .metrics import MetricSet, metric_set
from .power import PowerVector, brute_force_optimal, equal_allocate, fg_allocate
from .scheduling import LinkState, evaluate, sinr_far_base, sinr_near_base

METRICS = ("sum_rate", "energy_efficiency", "connectivity")
BOOTSTRAP_RESAMPLES = 2000


@dataclass
class TrialResult:
    trial_index: int
    seed: int
    n_near: int
    n_far: int
    metrics: dict[tuple[str, str], MetricSet]
    cluster_count: int
    fg_iterations: dict[str, int] = field(default_factory=dict)
    powers: dict[str, PowerVector] = field(default_factory=dict)
    absent: tuple[str, ...] = ()

    def value(self, population: str, policy: str, metric: str) -> float | None:
        ms = self.metrics.get((population, policy))
        return None if ms is None else getattr(ms, metric)


def trial_streams(master_seed: int, trial_index: int) -> dict[str, np.random.Generator | int]:
    """Independent generators for each pipeline stage of one trial."""
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=(trial_index,))
    drop, chan, beams, clus = ss.spawn(4)
    return {
        "drop": np.random.default_rng(drop),
        "channel": np.random.default_rng(chan),
        "beams": np.random.default_rng(beams),
        "cluster_seed": int(clus.generate_state(1)[0]),
    }


def _budgets(cfg: ScenarioConfig, n_near: int, n_far: int) -> tuple[float, float]:
    if n_near == 0:
        return 0.0, cfg.total_power
    if n_far == 0:
        return cfg.total_power, 0.0
    frac = cfg.near_budget_fraction
    if frac is None:
        frac = n_near / (n_near + n_far)
    return cfg.total_power * frac, cfg.total_power * (1.0 - frac)


def _allocate(cfg: ScenarioConfig, rate_fn, budget: float, n: int) -> PowerVector:
    if n == 0:
        return PowerVector(np.zeros(0), budget)
    if budget <= 0:
        return PowerVector(np.zeros(n), max(budget, 0.0))
    if cfg.allocator == "equal":
        return equal_allocate(n, budget)
    if cfg.allocator == "oracle":
        return brute_force_optimal(rate_fn, budget, n, cfg.oracle_grid_steps)
    return fg_allocate(rate_fn, budget, n, cfg.fg)


def allocate_powers(cfg: ScenarioConfig, state: LinkState) -> tuple[PowerVector, PowerVector]:
    """Allocate near powers first, then far powers with the near powers fixed.

    Per-user rates fed to the allocator come from the base NOMA SINRs, the
    only model in which per-user powers enter individually.
    """
    p_near_budget, p_far_budget = _budgets(cfg, state.n_near, state.n_far)

    def near_rates(p):
        return np.log2(1.0 + sinr_near_base(state.with_powers(powers_near=p)).sinr)

    near = _allocate(cfg, near_rates, p_near_budget, state.n_near)

    def far_rates(p):
        return np.log2(1.0 + sinr_far_base(state.with_powers(near.powers, p)).sinr)

    far = _allocate(cfg, far_rates, p_far_budget, state.n_far)
    return near, far


def run_trial(cfg: ScenarioConfig, trial_index: int) -> TrialResult:
    streams = trial_streams(cfg.master_seed, trial_index)
    array = ArrayConfig(cfg.n_antennas, cfg.carrier_freq, cfg.element_spacing)
    users = drop_users(
        cfg.n_users, cfg.cell_radius, cfg.min_distance, streams["drop"], array, cfg.d0,
        cfg.static_prob,
    )
    near_users = [u for u in users if u.field_class is FieldClass.NEAR]
    far_users = [u for u in users if u.field_class is FieldClass.FAR]
    ordered = near_users + far_users
    channels = [user_channel(u, array, streams["channel"], cfg.path_loss_exp) for u in ordered]
    ch_near = channels[: len(near_users)]
    ch_far = channels[len(near_users):]

    if cfg.clustering_on:
        clusters: ClusterAssignment = hybrid_cluster(
            ordered, channels, cfg.cluster_k, cfg.dbscan_eps, cfg.dbscan_min_pts,
            streams["cluster_seed"],
        )
    else:
        clusters = no_clustering(ordered)

    beams = build_beams(
        cfg.scheme_enum, ch_near, ch_far, cfg.noise_power, cfg.epsilon, streams["beams"],
        cfg.n_antennas, cfg.near_norm,
    )
    state = LinkState(
        ch_near, ch_far, beams, np.zeros(len(ch_near)), np.zeros(len(ch_far)), cfg.noise_power,
        clusters.labels, cfg.leakage, cfg.interference_form,
    )
    p_near, p_far = allocate_powers(cfg, state)
    state = state.with_powers(p_near.powers, p_far.powers)

    metrics: dict[tuple[str, str], MetricSet] = {}
    absent = []
    for pop, policies, pv in (
        ("near", cfg.near_policies(), p_near),
        ("far", cfg.far_policies(), p_far),
    ):
        if len(pv) == 0 or pv.total <= 0:
            absent.append(pop)
            continue
        for pol in policies:
            report = evaluate(state, pol)
            metrics[(pop, pol.value)] = metric_set(report, pv, cfg.connectivity_threshold_db)

    return TrialResult(
        trial_index=trial_index,
        seed=cfg.master_seed,
        n_near=len(near_users),
        n_far=len(far_users),
        metrics=metrics,
        cluster_count=clusters.n_clusters,
        fg_iterations={"near": p_near.iterations, "far": p_far.iterations},
        powers={"near": p_near, "far": p_far},
        absent=tuple(absent),
    )


def resolve_threads(threads: int | None = None) -> int:
    """Explicit value, else ``MMNOMA_THREADS``, else 1; 0 means one per CPU."""
    if threads is None:
        env = os.environ.get("MMNOMA_THREADS", "").strip()
        threads = int(env) if env else 1
    if threads < 0:
        raise ValueError(f"threads must be >= 0, got {threads}")
    if threads == 0:
        threads = os.cpu_count() or 1
    return threads


def run_trials(cfg: ScenarioConfig, threads: int | None = None) -> list[TrialResult]:
    n = resolve_threads(threads)
    indices = range(cfg.trials)
    if n == 1:
        return [run_trial(cfg, i) for i in indices]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(lambda i: run_trial(cfg, i), indices))


@dataclass
class Summary:
    mean: float
    std: float
    ci_lo: float
    ci_hi: float
    n: int
    std_defined: bool = True


def bootstrap_ci(
    values, seed: int, resamples: int = BOOTSTRAP_RESAMPLES, level: float = 0.95
) -> tuple[float, float]:
    """Percentile bootstrap CI of the mean."""
    x = np.asarray(values, dtype=float)
    if len(x) == 0:
        return math.nan, math.nan
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, len(x), size=(resamples, len(x)))
    means = x[idx].mean(axis=1)
    alpha = (1.0 - level) / 2
    lo, hi = np.quantile(means, [alpha, 1.0 - alpha])
    return float(lo), float(hi)


def summarize(values, seed: int) -> Summary:
    x = np.asarray(values, dtype=float)
    n = len(x)
    if n == 0:
        return Summary(math.nan, math.nan, math.nan, math.nan, 0, False)
    mean = float(x.mean())
    if n == 1:
        return Summary(mean, 0.0, mean, mean, 1, False)
    lo, hi = bootstrap_ci(x, seed)
    # Keep the point estimate inside the interval for near-degenerate samples.
    lo, hi = min(lo, mean), max(hi, mean)
    return Summary(mean, float(x.std(ddof=1)), lo, hi, n)


@dataclass
class CampaignStats:
    config: ScenarioConfig
    values: dict[tuple[str, str, str], np.ndarray]
    trial_ids: dict[tuple[str, str, str], np.ndarray]
    summaries: dict[tuple[str, str, str], Summary]
    trials: list[TrialResult] = field(default_factory=list, repr=False)

    def summary(self, population: str, policy: str, metric: str) -> Summary:
        return self.summaries[(population, policy, metric)]

    def keys(self):
        return sorted(self.summaries)


def aggregate(cfg: ScenarioConfig, results: list[TrialResult]) -> CampaignStats:
    results = sorted(results, key=lambda r: r.trial_index)
    keys = []
    for pop, pols in (("near", cfg.near_policies()), ("far", cfg.far_policies())):
        for pol in pols:
            for metric in METRICS:
                keys.append((pop, pol.value, metric))
    values, ids, summaries = {}, {}, {}
    for key in keys:
        pop, pol, metric = key
        pairs = [(r.trial_index, r.value(pop, pol, metric)) for r in results]
        pairs = [(i, v) for i, v in pairs if v is not None]
        ids[key] = np.array([i for i, _ in pairs], dtype=int)
        values[key] = np.array([v for _, v in pairs], dtype=float)
        summaries[key] = summarize(values[key], cfg.master_seed)
    return CampaignStats(cfg, values, ids, summaries, results)


def run_campaign(cfg: ScenarioConfig, threads: int | None = None) -> CampaignStats:
    return aggregate(cfg, run_trials(cfg, threads))


SWEEP_AXES = ("n_users", "total_power")


def sweep(
    cfg: ScenarioConfig, axis: str, values, threads: int | None = None
) -> list[tuple[float, CampaignStats]]:
    """One campaign per axis value, all sharing the master seed; sorted by value."""
    if axis not in SWEEP_AXES:
        raise ValueError(f"axis must be one of {SWEEP_AXES}, got {axis!r}")
    out = []
    for v in sorted(set(values)):
        v = int(v) if axis == "n_users" else float(v)
        out.append((v, run_campaign(cfg.replace(**{axis: v}), threads)))
    return out


@dataclass
class PairedDelta:
    deltas: np.ndarray
    summary: Summary


def paired_delta(
    a: CampaignStats, b: CampaignStats, key: tuple[str, str, str], seed: int | None = None
) -> PairedDelta:
    """Per-trial ``b - a`` on trials where both campaigns report ``key``."""
    ia, ib = a.trial_ids.get(key), b.trial_ids.get(key)
    if ia is None or ib is None:
        return PairedDelta(np.zeros(0), summarize([], 0))
    common, pa, pb = np.intersect1d(ia, ib, return_indices=True)
    deltas = b.values[key][pb] - a.values[key][pa]
    return PairedDelta(deltas, summarize(deltas, a.config.master_seed if seed is None else seed))
