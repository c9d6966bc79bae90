"""Beam construction for the near and far populations.

Three schemes are provided:

* NOMA-inspired: near beams follow the interference-adjusted direction of each
  near user (unit norm by default); far beams are the far channels projected
  onto the orthogonal complement of the near-beam span, scaled by ``epsilon``.
* Cognitive-NOMA: near beams are ``J / ||J||**2`` so their magnitude carries
  the interference-adjusted priority; far beams are projected against the span
  of the ``J`` vectors and normalised.
* Random: isotropic unit vectors, the comparison baseline.

Channels are given as ``(N, U)`` complex arrays (columns are users) or as lists
of :class:`~mmnoma.geometry.ChannelVector`, in which case their effective
(path-loss scaled) coefficients are used.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field

import numpy as np

from .geometry import ChannelVector


class Scheme(enum.Enum):
    NOMA_INSPIRED = "noma"
    COGNITIVE_NOMA = "cognitive"
    RANDOM = "random"


class SingularProjectionError(np.linalg.LinAlgError):
    """The near-beam collection is rank deficient, the projector is undefined."""


class ZeroBeamError(ValueError):
    """A far channel lies entirely inside the near-beam span."""


class ZeroBeamWarning(UserWarning):
    pass


@dataclass
class InterferenceAdjustedDirection:
    j_vec: np.ndarray
    weight: float


@dataclass
class BeamSet:
    scheme: Scheme
    near_beams: np.ndarray
    far_beams: np.ndarray
    epsilon: float = 1.0
    near_weights: np.ndarray = field(default_factory=lambda: np.zeros(0))
    zero_beams: list[int] = field(default_factory=list)

    @property
    def n_antennas(self) -> int:
        return self.near_beams.shape[0]

    def all_beams(self) -> np.ndarray:
        """Near beams followed by far beams, ``(N, U_near + U_far)``."""
        return np.hstack([self.near_beams, self.far_beams])


def as_matrix(channels, n_antennas: int | None = None) -> np.ndarray:
    """Stack channels column-wise into an ``(N, U)`` complex array."""
    if isinstance(channels, np.ndarray):
        mat = np.asarray(channels, dtype=complex)
        if mat.ndim == 1:
            mat = mat[:, None]
        return mat
    cols = [c.effective if isinstance(c, ChannelVector) else np.asarray(c, dtype=complex)
            for c in channels]
    if not cols:
        if n_antennas is None:
            raise ValueError("cannot infer the antenna count from an empty channel list")
        return np.zeros((n_antennas, 0), dtype=complex)
    return np.column_stack(cols).astype(complex)


def _near_interference_weights(h_near: np.ndarray, noise_power: float) -> np.ndarray:
    # Far-user terms appear in the first interference sum and are subtracted
    # again, so only the near peers and the noise remain.
    gram = np.abs(h_near.conj().T @ h_near) ** 2
    signal = np.diag(gram).copy()
    interference = gram.sum(axis=1) - signal
    return signal / (interference + noise_power)


def interference_adjusted_direction(
    i: int, channels_near, channels_far, noise_power: float
) -> InterferenceAdjustedDirection:
    """Interference-adjusted vector of near user ``i``.

    The scalar ratio ``|h_i^H h_i|**2 / (near-peer interference + noise)``
    scales the user's own channel, giving the vector ``J_i``.
    """
    if not noise_power > 0:
        raise ValueError(f"noise_power must be > 0, got {noise_power}")
    h_near = as_matrix(channels_near)
    if not 0 <= i < h_near.shape[1]:
        raise IndexError(f"near user index {i} out of range")
    # channels_far only enters through terms that cancel exactly.
    h_i = h_near[:, i]
    signal = abs(np.vdot(h_i, h_i)) ** 2
    interference = 0.0
    for m in range(h_near.shape[1]):
        if m != i:
            interference += abs(np.vdot(h_i, h_near[:, m])) ** 2
    weight = signal / (interference + noise_power)
    return InterferenceAdjustedDirection(j_vec=weight * h_i, weight=float(weight))


def orthogonal_projector(span: np.ndarray) -> np.ndarray:
    """``I - A (A^H A)^{-1} A^H`` for the columns ``A`` of ``span``."""
    n, k = span.shape
    eye = np.eye(n, dtype=complex)
    if k == 0:
        return eye
    if k > n or np.linalg.matrix_rank(span) < k:
        raise SingularProjectionError(
            f"near-beam collection of {k} columns in dimension {n} is rank deficient"
        )
    gram = span.conj().T @ span
    return eye - span @ np.linalg.solve(gram, span.conj().T)


def _project_far(
    proj: np.ndarray, h_far: np.ndarray, scale: float, strict: bool
) -> tuple[np.ndarray, list[int]]:
    projected = proj @ h_far
    norms = np.linalg.norm(projected, axis=0)
    ref = np.linalg.norm(h_far, axis=0)
    zero = [int(j) for j in np.flatnonzero(norms <= 1e-10 * np.maximum(ref, np.finfo(float).tiny))]
    beams = np.zeros_like(projected)
    ok = np.setdiff1d(np.arange(h_far.shape[1]), zero)
    beams[:, ok] = scale * projected[:, ok] / norms[ok]
    if zero:
        msg = f"far users {zero} have channels inside the near-beam span; zero beams assigned"
        if strict:
            raise ZeroBeamError(msg)
        warnings.warn(msg, ZeroBeamWarning, stacklevel=3)
    return beams, zero


def _j_vectors(h_near: np.ndarray, noise_power: float) -> tuple[np.ndarray, np.ndarray]:
    if not noise_power > 0:
        raise ValueError(f"noise_power must be > 0, got {noise_power}")
    weights = _near_interference_weights(h_near, noise_power)
    return h_near * weights[None, :], weights


def _normalise_near(j_vecs: np.ndarray, power: int) -> np.ndarray:
    norms = np.linalg.norm(j_vecs, axis=0)
    if np.any(norms == 0):
        raise SingularProjectionError("a near user has an all-zero channel")
    return j_vecs / norms[None, :] ** power


def noma_beams(
    channels_near,
    channels_far,
    noise_power: float,
    epsilon: float = 0.95,
    near_norm: str = "unit",
    strict: bool = False,
) -> BeamSet:
    """NOMA-inspired beams.

    ``near_norm`` selects ``J/||J||`` (``"unit"``) or the literal
    ``J/||J||**2`` (``"squared"``) for the near beams.
    """
    if not 0 < epsilon <= 1:
        raise ValueError(f"epsilon must lie in (0, 1], got {epsilon}")
    h_near = as_matrix(channels_near)
    h_far = as_matrix(channels_far, h_near.shape[0])
    if h_near.shape[1] < 1:
        raise ValueError("noma_beams needs at least one near user")
    j_vecs, weights = _j_vectors(h_near, noise_power)
    near = _normalise_near(j_vecs, 1 if near_norm == "unit" else 2)
    proj = orthogonal_projector(near)
    far, zero = _project_far(proj, h_far, epsilon, strict)
    return BeamSet(Scheme.NOMA_INSPIRED, near, far, epsilon, weights, zero)


def cognitive_beams(
    channels_near,
    channels_far,
    noise_power: float,
    epsilon: float = 0.95,
    near_norm: str = "squared",
    strict: bool = False,
) -> BeamSet:
    """Cognitive-NOMA beams.

    Near beams are ``J (J^H J)^{-1} = J/||J||**2`` with magnitude
    ``1/(weight * ||h||) = (interference + noise) / ||h||**5``: at equal
    channel norms the user facing more near-peer interference gets the larger
    beam.  Far beams use the leftover spatial dimensions: the projector onto
    the complement of ``span{J_1, ..., J_Unear}``, applied to each far channel
    and normalised.  ``epsilon`` is recorded but not applied.
    """
    if not 0 < epsilon <= 1:
        raise ValueError(f"epsilon must lie in (0, 1], got {epsilon}")
    h_near = as_matrix(channels_near)
    h_far = as_matrix(channels_far, h_near.shape[0])
    if h_near.shape[1] < 1:
        raise ValueError("cognitive_beams needs at least one near user")
    j_vecs, weights = _j_vectors(h_near, noise_power)
    near = _normalise_near(j_vecs, 2 if near_norm == "squared" else 1)
    proj = orthogonal_projector(j_vecs)
    far, zero = _project_far(proj, h_far, 1.0, strict)
    return BeamSet(Scheme.COGNITIVE_NOMA, near, far, epsilon, weights, zero)


def random_beams(
    n_near: int, n_far: int, n_antennas: int, rng: np.random.Generator
) -> BeamSet:
    if n_antennas < 1:
        raise ValueError(f"n_antennas must be >= 1, got {n_antennas}")
    total = n_near + n_far
    draw = rng.standard_normal((n_antennas, total)) + 1j * rng.standard_normal((n_antennas, total))
    draw /= np.linalg.norm(draw, axis=0, keepdims=True)
    return BeamSet(Scheme.RANDOM, draw[:, :n_near], draw[:, n_near:], 1.0)


def build_beams(
    scheme: Scheme,
    channels_near,
    channels_far,
    noise_power: float,
    epsilon: float,
    rng: np.random.Generator,
    n_antennas: int,
    near_norm: str | None = None,
) -> BeamSet:
    """Dispatch on ``scheme``; an empty near population leaves far channels unprojected."""
    h_near = as_matrix(channels_near, n_antennas)
    h_far = as_matrix(channels_far, n_antennas)
    if scheme is Scheme.RANDOM:
        return random_beams(h_near.shape[1], h_far.shape[1], n_antennas, rng)
    if h_near.shape[1] == 0:
        scale = epsilon if scheme is Scheme.NOMA_INSPIRED else 1.0
        far, zero = _project_far(np.eye(n_antennas, dtype=complex), h_far, scale, False)
        return BeamSet(scheme, h_near.copy(), far, epsilon, np.zeros(0), zero)
    kwargs = {} if near_norm is None else {"near_norm": near_norm}
    if scheme is Scheme.NOMA_INSPIRED:
        return noma_beams(h_near, h_far, noise_power, epsilon, **kwargs)
    return cognitive_beams(h_near, h_far, noise_power, epsilon, **kwargs)
