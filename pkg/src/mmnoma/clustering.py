"""Hybrid user clustering: spectral clustering refined by DBSCAN.

Near-field and far-field users are clustered separately on three
standardised features: channel gain (dB), mobility speed and traffic weight.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import pdist, squareform
from sklearn.cluster import DBSCAN, KMeans

from .geometry import ChannelVector, FieldClass, UserProfile

FEATURE_NAMES = ("channel_gain_db", "mobility_speed", "traffic_weight")


@dataclass
class ClusterAssignment:
    labels: np.ndarray
    k_primary: int
    subcluster_map: dict[int, list[int]] = field(default_factory=dict)

    @property
    def n_clusters(self) -> int:
        return len(np.unique(self.labels)) if len(self.labels) else 0

    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels) if len(self.labels) else np.zeros(0, dtype=int)


def standardize(x: np.ndarray) -> np.ndarray:
    """Column-wise z-score with population std; constant columns map to zero."""
    x = np.asarray(x, dtype=float)
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    safe = np.where(std > 0, std, 1.0)
    return np.where(std > 0, (x - mean) / safe, 0.0)


def build_features(users: list[UserProfile], channels: list[ChannelVector]) -> np.ndarray:
    """Standardised ``(U, 3)`` feature matrix, columns as in ``FEATURE_NAMES``."""
    if len(users) != len(channels):
        raise ValueError("need exactly one channel per user")
    if not users:
        return np.zeros((0, len(FEATURE_NAMES)))
    raw = np.array(
        [
            [
                10.0 * math.log10(float(np.sum(np.abs(ch.effective) ** 2))),
                u.mobility_speed,
                u.traffic_weight,
            ]
            for u, ch in zip(users, channels)
        ]
    )
    return standardize(raw)


def _relabel(labels: np.ndarray) -> np.ndarray:
    """Map labels to 0..k-1 in order of first appearance."""
    mapping: dict[int, int] = {}
    out = np.empty(len(labels), dtype=int)
    for idx, lab in enumerate(labels):
        out[idx] = mapping.setdefault(int(lab), len(mapping))
    return out


def spectral_cluster(features: np.ndarray, k: int, seed: int = 0) -> np.ndarray:
    """Normalised spectral clustering (Ng-Jordan-Weiss).

    Gaussian affinity with bandwidth equal to the median pairwise distance,
    symmetric normalised Laplacian, ``k`` smallest eigenvectors with rows
    normalised, then k-means with 20 restarts.
    """
    x = np.asarray(features, dtype=float)
    u = len(x)
    if not 1 <= k <= u:
        raise ValueError(f"need 1 <= k <= {u}, got k={k}")
    if k == 1:
        return np.zeros(u, dtype=int)

    dists = pdist(x)
    gamma = float(np.median(dists)) if len(dists) else 0.0
    if gamma <= 0:
        gamma = 1.0
    affinity = np.exp(-squareform(dists) ** 2 / (2 * gamma**2))
    np.fill_diagonal(affinity, 0.0)
    deg = np.maximum(affinity.sum(axis=1), np.finfo(float).tiny)
    inv_sqrt = 1.0 / np.sqrt(deg)
    lap = np.eye(u) - inv_sqrt[:, None] * affinity * inv_sqrt[None, :]
    _, vecs = np.linalg.eigh(lap)
    emb = vecs[:, :k]
    norms = np.linalg.norm(emb, axis=1, keepdims=True)
    emb = emb / np.where(norms > 0, norms, 1.0)

    with warnings.catch_warnings():
        # Duplicate rows can leave fewer distinct points than k.
        warnings.simplefilter("ignore")
        km = KMeans(n_clusters=k, n_init=20, random_state=seed).fit(emb)
    return _relabel(km.labels_)


def dbscan_refine(
    labels: np.ndarray, features: np.ndarray, eps: float = 0.5, min_pts: int = 2
) -> ClusterAssignment:
    """Run DBSCAN inside each primary cluster; noise points become singletons."""
    if not eps > 0:
        raise ValueError(f"eps must be > 0, got {eps}")
    if min_pts < 1:
        raise ValueError(f"min_pts must be >= 1, got {min_pts}")
    labels = np.asarray(labels, dtype=int)
    x = np.asarray(features, dtype=float)
    final = np.full(len(labels), -1, dtype=int)
    submap: dict[int, list[int]] = {}
    next_id = 0
    for primary in sorted(set(labels.tolist())):
        members = np.flatnonzero(labels == primary)
        sub = DBSCAN(eps=eps, min_samples=min_pts).fit_predict(x[members])
        ids = []
        for s in sorted(set(sub.tolist()) - {-1}):
            final[members[sub == s]] = next_id
            ids.append(next_id)
            next_id += 1
        for m in members[sub == -1]:
            final[m] = next_id
            ids.append(next_id)
            next_id += 1
        submap[primary] = ids
    return ClusterAssignment(final, len(submap), submap)


def default_k(n_users: int) -> int:
    return max(1, math.ceil(n_users / 4))


def hybrid_cluster(
    users: list[UserProfile],
    channels: list[ChannelVector],
    k: int | None = None,
    eps: float = 0.5,
    min_pts: int = 2,
    seed: int = 0,
) -> ClusterAssignment:
    """Spectral + DBSCAN clustering run separately per field class.

    ``k`` is the number of spectral clusters per population (capped at the
    population size); ``None`` uses ``ceil(U_pop / 4)``.  Labels are returned
    in the order of ``users`` and never mix near and far users.
    """
    if len(users) != len(channels):
        raise ValueError("need exactly one channel per user")
    labels = np.full(len(users), -1, dtype=int)
    submap: dict[int, list[int]] = {}
    k_total = 0
    offset = 0
    for fc in (FieldClass.NEAR, FieldClass.FAR):
        idx = [i for i, u in enumerate(users) if u.field_class is fc]
        if not idx:
            continue
        feats = build_features([users[i] for i in idx], [channels[i] for i in idx])
        k_pop = default_k(len(idx)) if k is None else min(k, len(idx))
        primary = spectral_cluster(feats, k_pop, seed)
        refined = dbscan_refine(primary, feats, eps, min_pts)
        labels[idx] = refined.labels + offset
        for p, ids in refined.subcluster_map.items():
            submap[k_total + p] = [i + offset for i in ids]
        k_total += refined.k_primary
        offset += refined.n_clusters
    return ClusterAssignment(labels, k_total, submap)


def no_clustering(users: list[UserProfile]) -> ClusterAssignment:
    """Baseline: one cluster per population."""
    near = [u.field_class is FieldClass.NEAR for u in users]
    if all(near) or not any(near):
        labels = np.zeros(len(users), dtype=int)
    else:
        labels = np.array([0 if n else 1 for n in near], dtype=int)
    k = len(set(labels.tolist()))
    return ClusterAssignment(labels, k, {i: [i] for i in range(k)})
