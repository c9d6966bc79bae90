"""Power allocation: fairness-gradual (FG), equal split and a grid oracle."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

log = logging.getLogger(__name__)

RateFn = Callable[[np.ndarray], np.ndarray]

BUDGET_SLACK = 1e-9


@dataclass
class PowerVector:
    powers: np.ndarray
    total_budget: float
    iterations: int = 0

    def __post_init__(self):
        self.powers = np.asarray(self.powers, dtype=float)
        if np.any(self.powers < 0):
            raise ValueError("powers must be nonnegative")
        if self.powers.sum() > self.total_budget + BUDGET_SLACK:
            raise ValueError(
                f"allocated {self.powers.sum()} W exceeds the budget {self.total_budget} W"
            )

    @property
    def total(self) -> float:
        return float(self.powers.sum())

    def __len__(self):
        return len(self.powers)


@dataclass(frozen=True)
class FgConfig:
    step_weight: float = 0.3
    max_iters: int = 200
    tol: float = 1e-6

    def __post_init__(self):
        if not 0 < self.step_weight <= 1:
            raise ValueError(f"step_weight must lie in (0, 1], got {self.step_weight}")
        if int(self.max_iters) != self.max_iters or self.max_iters < 1:
            raise ValueError(f"max_iters must be a positive integer, got {self.max_iters}")
        if not self.tol > 0:
            raise ValueError(f"tol must be > 0, got {self.tol}")


def equal_allocate(n_users: int, total_power: float) -> PowerVector:
    if n_users < 1:
        raise ValueError(f"n_users must be >= 1, got {n_users}")
    return PowerVector(np.full(n_users, total_power / n_users), total_power)


def _check_feasible(p: np.ndarray, total_power: float) -> None:
    assert np.all(p >= 0), "negative power after FG step"
    assert p.sum() <= total_power + BUDGET_SLACK, "FG iterate exceeds the budget"


def fg_allocate(
    rate_fn: RateFn,
    total_power: float,
    n_users: int,
    cfg: FgConfig = FgConfig(),
    trace: list | None = None,
) -> PowerVector:
    """Fairness-gradual power allocation.

    Starting from the equal split, each step moves a user's power share
    towards its share of the achieved rates::

        P_u <- P_u + step_weight * (r_u / sum(r) - P_u / P_T)

    followed by clamping negatives to zero and rescaling onto the budget if it
    is exceeded.  In power-share units the step contracts towards the rate
    shares by ``1 - step_weight / P_T``, so it only settles when
    ``step_weight < 2 P_T``.  Iteration stops once no coordinate moves by more than
    ``tol * P_T`` or after ``max_iters`` steps.

    Parameters
    ----------
    rate_fn : callable
        Maps a power vector of length ``n_users`` to per-user rates.
    total_power : float
        Budget ``P_T`` in watts.
    n_users : int
    cfg : FgConfig
    trace : list, optional
        If given, every iterate (including the initial one) is appended.

    Returns
    -------
    PowerVector
        Final allocation; ``iterations`` holds the number of updates made.
    """
    if not total_power > 0:
        raise ValueError(f"total_power must be > 0, got {total_power}")
    if cfg.step_weight >= 2 * total_power:
        log.warning(
            "step_weight %g >= 2 * total_power %g: the FG update does not contract",
            cfg.step_weight, total_power,
        )
    p = np.full(n_users, total_power / n_users)
    if trace is not None:
        trace.append(p.copy())
    step = 0
    while step < cfg.max_iters:
        rates = np.asarray(rate_fn(p), dtype=float)
        if not np.all(np.isfinite(rates)) or np.any(rates < 0):
            raise ValueError("rate_fn must return finite nonnegative rates")
        rate_sum = rates.sum()
        if rate_sum <= 0:
            log.info("all rates are zero at FG step %d; returning the equal split", step)
            return PowerVector(np.full(n_users, total_power / n_users), total_power, step)
        new = p + cfg.step_weight * (rates / rate_sum - p / total_power)
        np.maximum(new, 0.0, out=new)
        budget_used = new.sum()
        if budget_used > total_power:
            new *= total_power / budget_used
        _check_feasible(new, total_power)
        step += 1
        moved = np.max(np.abs(new - p))
        p = new
        if trace is not None:
            trace.append(p.copy())
        if moved < cfg.tol * total_power:
            break
    return PowerVector(p, total_power, step)


MAX_ORACLE_USERS = 4
MAX_ORACLE_STEPS = 50


def _simplex_grid(n_users: int, steps: int) -> np.ndarray:
    """All integer vectors of length ``n_users`` with entries summing to <= ``steps``."""
    pts = [c for c in itertools.product(range(steps + 1), repeat=n_users) if sum(c) <= steps]
    return np.array(pts, dtype=float)


def brute_force_optimal(
    rate_fn: RateFn, total_power: float, n_users: int, grid_steps: int = 20
) -> PowerVector:
    """Exhaustive sum-rate maximisation over a simplex grid (testing oracle).

    Ties in sum rate go to the allocation with the smaller variance.
    """
    if n_users > MAX_ORACLE_USERS:
        raise ValueError(f"brute force refuses more than {MAX_ORACLE_USERS} users, got {n_users}")
    if grid_steps > MAX_ORACLE_STEPS or grid_steps < 1:
        raise ValueError(f"grid_steps must lie in [1, {MAX_ORACLE_STEPS}], got {grid_steps}")
    if not total_power > 0:
        raise ValueError(f"total_power must be > 0, got {total_power}")
    grid = _simplex_grid(n_users, grid_steps) * (total_power / grid_steps)
    best = None
    best_key = None
    for p in grid:
        total_rate = float(np.sum(rate_fn(p)))
        var = float(np.var(p))
        if best is None:
            best, best_key = p, (total_rate, var)
            continue
        tie = abs(total_rate - best_key[0]) <= 1e-12 * max(1.0, abs(best_key[0]))
        if (not tie and total_rate > best_key[0]) or (tie and var < best_key[1]):
            best, best_key = p, (total_rate, var)
    return PowerVector(best, total_power)
