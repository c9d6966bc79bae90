"""Per-user SINRs for the base NOMA model and the four scheduling policies.

Users are indexed near first, then far.  All channels are effective
(post path-loss) so ``|h_i^H w_m|**2`` already carries the ``1/d**s`` factor of
far users.

Cluster scoping: interference from a user in the same final cluster counts in
full, interference from any other cluster is multiplied by the leakage factor
``rho``.  Without a cluster assignment every term counts in full.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .beamforming import BeamSet, as_matrix


class Policy(enum.Enum):
    BASE_NEAR = "base_near"
    BASE_FAR = "base_far"
    PRIORITY = "priority"
    DYNAMIC = "dynamic"
    FAIR = "fair"
    JOINT = "joint"


NEAR_POLICIES = (Policy.BASE_NEAR, Policy.PRIORITY, Policy.DYNAMIC)
FAR_POLICIES = (Policy.BASE_FAR, Policy.FAIR, Policy.JOINT)


@dataclass
class LinkState:
    channels_near: np.ndarray
    channels_far: np.ndarray
    beams: BeamSet
    powers_near: np.ndarray
    powers_far: np.ndarray
    noise_power: float
    labels: np.ndarray | None = None
    leakage: float = 0.2
    interference_form: str = "literal"
    _gain: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        n = self.beams.n_antennas
        self.channels_near = as_matrix(self.channels_near, n)
        self.channels_far = as_matrix(self.channels_far, n)
        self.powers_near = np.asarray(self.powers_near, dtype=float).reshape(-1)
        self.powers_far = np.asarray(self.powers_far, dtype=float).reshape(-1)
        un, uf = self.n_near, self.n_far
        if self.beams.near_beams.shape[1] != un or self.beams.far_beams.shape[1] != uf:
            raise ValueError("beam count does not match channel count")
        if len(self.powers_near) != un or len(self.powers_far) != uf:
            raise ValueError("power count does not match channel count")
        if self.channels_near.shape[0] != n or self.channels_far.shape[0] != n:
            raise ValueError("channel length does not match the antenna count")
        if not self.noise_power > 0:
            raise ValueError(f"noise_power must be > 0, got {self.noise_power}")
        if self.labels is not None:
            self.labels = np.asarray(self.labels)
            if len(self.labels) != un + uf:
                raise ValueError("need one cluster label per user")
        if self.interference_form not in ("literal", "conventional"):
            raise ValueError(f"unknown interference_form {self.interference_form!r}")

    @property
    def n_near(self) -> int:
        return self.channels_near.shape[1]

    @property
    def n_far(self) -> int:
        return self.channels_far.shape[1]

    @property
    def gain(self) -> np.ndarray:
        """``G[i, m] = |h_i^H w_m|**2`` over all users."""
        if self._gain is None:
            h = np.hstack([self.channels_near, self.channels_far])
            w = self.beams.all_beams()
            self._gain = np.abs(h.conj().T @ w) ** 2
        return self._gain

    def coupling(self) -> np.ndarray:
        """1 within a cluster, ``leakage`` across clusters."""
        u = self.n_near + self.n_far
        if self.labels is None:
            return np.ones((u, u))
        same = self.labels[:, None] == self.labels[None, :]
        return np.where(same, 1.0, self.leakage)

    def with_powers(self, powers_near=None, powers_far=None) -> "LinkState":
        """Copy with new powers; the gain matrix is shared."""
        state = LinkState(
            self.channels_near,
            self.channels_far,
            self.beams,
            self.powers_near if powers_near is None else powers_near,
            self.powers_far if powers_far is None else powers_far,
            self.noise_power,
            self.labels,
            self.leakage,
            self.interference_form,
        )
        state._gain = self.gain
        return state


@dataclass
class SinrReport:
    sinr: np.ndarray
    policy: Policy
    order: np.ndarray | None = None

    def __post_init__(self):
        self.sinr = np.asarray(self.sinr, dtype=float)
        if np.any(~np.isfinite(self.sinr)) or np.any(self.sinr < 0):
            raise ValueError("SINRs must be finite and nonnegative")

    def __len__(self):
        return len(self.sinr)


def _sinr(signal: np.ndarray, interference: np.ndarray, noise: float) -> np.ndarray:
    return signal / (interference + noise)


def _offdiag(mat: np.ndarray) -> np.ndarray:
    out = mat.copy()
    np.fill_diagonal(out, 0.0)
    return out


def sinr_near_base(state: LinkState) -> SinrReport:
    """Near users after SIC.

    The far-user terms enter the interference sum and are subtracted again,
    so only near peers remain.  Summing over near peers directly keeps the
    cancellation exact in floating point.
    """
    un = state.n_near
    g = state.gain[:un, :un]
    c = state.coupling()[:un, :un]
    p = state.powers_near
    interference = _offdiag(c * g) @ p
    return SinrReport(_sinr(p * np.diag(g), interference, state.noise_power), Policy.BASE_NEAR)


def sinr_far_base(state: LinkState) -> SinrReport:
    """Far users decode first and see every other user as interference."""
    un, uf = state.n_near, state.n_far
    g = state.gain[un:, :]
    c = state.coupling()[un:, :]
    p = np.concatenate([state.powers_near, state.powers_far])
    cg = c * g
    cg[np.arange(uf), un + np.arange(uf)] = 0.0
    signal = state.powers_far * g[np.arange(uf), un + np.arange(uf)]
    return SinrReport(_sinr(signal, cg @ p, state.noise_power), Policy.BASE_FAR)


def beam_weights(beams: np.ndarray) -> np.ndarray:
    """``beta_i = ||w_i||**2 / sum_m ||w_m||**2``; equal split if every beam is zero."""
    sq = np.sum(np.abs(beams) ** 2, axis=0)
    total = sq.sum()
    if total == 0:
        return np.full(len(sq), 1.0 / max(len(sq), 1))
    return sq / total


def _scheduled(state: LinkState, near: bool, user_power: np.ndarray, policy: Policy) -> SinrReport:
    un = state.n_near
    sl = slice(0, un) if near else slice(un, un + state.n_far)
    g = state.gain[sl, sl]
    c = state.coupling()[sl, sl]
    # As printed, the near policies weigh interferer m by its own link |h_m^H w_m|^2
    # while the far policies use the victim's channel |h_i^H w_m|^2.
    if near and state.interference_form == "literal":
        x = np.broadcast_to(np.diag(g)[None, :], g.shape)
    else:
        x = g
    interference = _offdiag(c * x) @ user_power
    sinr = _sinr(user_power * np.diag(g), interference, state.noise_power)
    return SinrReport(sinr, policy)


def sinr_priority(state: LinkState) -> SinrReport:
    """Equal share ``P_near_total / U_near``; ``order`` ranks users by channel gain."""
    un = state.n_near
    share = np.full(un, state.powers_near.sum() / un) if un else np.zeros(0)
    report = _scheduled(state, True, share, Policy.PRIORITY)
    gains = np.sum(np.abs(state.channels_near) ** 2, axis=0)
    report.order = np.argsort(-gains, kind="stable")
    return report


def sinr_dynamic(state: LinkState) -> SinrReport:
    """Power ``P_near_total * beta_i`` with beam-magnitude weights."""
    beta = beam_weights(state.beams.near_beams)
    return _scheduled(state, True, state.powers_near.sum() * beta, Policy.DYNAMIC)


def sinr_fair(state: LinkState) -> SinrReport:
    uf = state.n_far
    share = np.full(uf, state.powers_far.sum() / uf) if uf else np.zeros(0)
    return _scheduled(state, False, share, Policy.FAIR)


def sinr_joint(state: LinkState) -> SinrReport:
    beta = beam_weights(state.beams.far_beams)
    return _scheduled(state, False, state.powers_far.sum() * beta, Policy.JOINT)


POLICY_FUNCS = {
    Policy.BASE_NEAR: sinr_near_base,
    Policy.BASE_FAR: sinr_far_base,
    Policy.PRIORITY: sinr_priority,
    Policy.DYNAMIC: sinr_dynamic,
    Policy.FAIR: sinr_fair,
    Policy.JOINT: sinr_joint,
}


def evaluate(state: LinkState, policy: Policy) -> SinrReport:
    return POLICY_FUNCS[policy](state)
