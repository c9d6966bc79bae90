"""User drops, near/far field classification and channel synthesis.

The base station carries a uniform linear array laid out along the y axis and
centred on ``bs_position``.  Near-field users see exact spherical phase terms
per element; far-field users see i.i.d. Rayleigh flat fading with a distance
path loss ``1/d**s`` kept in the ``gain`` field.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0


class FieldClass(enum.Enum):
    NEAR = "near"
    FAR = "far"


@dataclass(frozen=True)
class ArrayConfig:
    n_antennas: int = 128
    carrier_freq: float = 28e9
    element_spacing: float | None = None  # None -> half wavelength
    bs_position: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if int(self.n_antennas) != self.n_antennas or self.n_antennas < 1:
            raise ValueError(f"n_antennas must be a positive integer, got {self.n_antennas}")
        if not self.carrier_freq > 0:
            raise ValueError(f"carrier_freq must be > 0, got {self.carrier_freq}")
        if self.element_spacing is None:
            object.__setattr__(self, "element_spacing", self.wavelength / 2)
        if not self.element_spacing > 0:
            raise ValueError(f"element_spacing must be > 0, got {self.element_spacing}")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.carrier_freq

    def element_positions(self) -> np.ndarray:
        """(N, 2) element coordinates in metres."""
        offsets = (np.arange(self.n_antennas) - (self.n_antennas - 1) / 2) * self.element_spacing
        pos = np.zeros((self.n_antennas, 2))
        pos[:, 0] = self.bs_position[0]
        pos[:, 1] = self.bs_position[1] + offsets
        return pos


@dataclass
class UserProfile:
    id: int
    position: tuple[float, float]
    distance: float
    mobility_speed: float = 0.0
    traffic_weight: float = 1.0
    field_class: FieldClass = FieldClass.FAR


@dataclass
class ChannelVector:
    coeffs: np.ndarray
    gain: float
    owner: int
    field_class: FieldClass = FieldClass.NEAR

    @property
    def effective(self) -> np.ndarray:
        """Channel as seen by the link budget.

        Near-field coefficients already carry the free-space amplitude.  For
        far-field users the power gain ``1/d**s`` multiplies ``|h^H w|**2``,
        so the amplitude is scaled by its square root.
        """
        if self.field_class is FieldClass.FAR:
            return self.coeffs * math.sqrt(self.gain)
        return self.coeffs


def rayleigh_distance(array: ArrayConfig, d: float, wavelength: float | None = None) -> float:
    """Rayleigh distance ``2((N-1) d)**2 / lambda`` with ``d`` the user-BS distance."""
    lam = array.wavelength if wavelength is None else wavelength
    if not d > 0:
        raise ValueError(f"distance must be > 0, got {d}")
    if not lam > 0:
        raise ValueError(f"wavelength must be > 0, got {lam}")
    return 2.0 * ((array.n_antennas - 1) * d) ** 2 / lam


def classify_user(user: UserProfile, array: ArrayConfig, d0: float = 20.0) -> FieldClass:
    if not d0 > 0:
        raise ValueError(f"reference distance must be > 0, got {d0}")
    # Equality is not "higher than" the reference, so ties stay near field.
    if rayleigh_distance(array, user.distance) > rayleigh_distance(array, d0):
        return FieldClass.FAR
    return FieldClass.NEAR


def near_field_channel(user: UserProfile, array: ArrayConfig) -> ChannelVector:
    if not user.distance > 0:
        raise ValueError(f"user distance must be > 0, got {user.distance}")
    elems = array.element_positions()
    d_m = np.linalg.norm(elems - np.asarray(user.position, dtype=float), axis=1)
    if np.any(d_m <= 0):
        raise ValueError(f"user {user.id} is collocated with an array element")
    lam = array.wavelength
    eta = SPEED_OF_LIGHT / (4 * math.pi * array.carrier_freq * user.distance)
    coeffs = eta * np.exp(-2j * math.pi / lam * d_m)
    return ChannelVector(coeffs=coeffs, gain=eta, owner=user.id, field_class=FieldClass.NEAR)


def far_field_channel(
    user: UserProfile, array: ArrayConfig, rng: np.random.Generator, path_loss_exp: float = 2.7
) -> ChannelVector:
    if not user.distance > 0:
        raise ValueError(f"user distance must be > 0, got {user.distance}")
    n = array.n_antennas
    coeffs = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2)
    return ChannelVector(
        coeffs=coeffs,
        gain=user.distance ** (-path_loss_exp),
        owner=user.id,
        field_class=FieldClass.FAR,
    )


def drop_users(
    count: int,
    cell_radius: float,
    min_distance: float,
    rng: np.random.Generator,
    array: ArrayConfig | None = None,
    d0: float = 20.0,
    static_prob: float = 0.3,
) -> list[UserProfile]:
    """Drop ``count`` users uniformly over the annulus around the BS.

    Mobility is 0 with probability ``static_prob`` and Uniform(0.5, 15) m/s
    otherwise; traffic weight is Uniform(0.1, 1].
    """
    if int(count) != count or count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if not 0 < min_distance < cell_radius:
        raise ValueError("need 0 < min_distance < cell_radius")
    array = ArrayConfig() if array is None else array
    bs = np.asarray(array.bs_position, dtype=float)

    # Area-uniform radius via inverse CDF on r**2.
    u = rng.random(count)
    r = np.sqrt(min_distance**2 + u * (cell_radius**2 - min_distance**2))
    theta = rng.uniform(-math.pi, math.pi, count)
    moving = rng.random(count) >= static_prob
    speeds = np.where(moving, rng.uniform(0.5, 15.0, count), 0.0)
    # 1 - U[0,1) lies in (0, 1], mapped affinely onto (0.1, 1].
    traffic = 0.1 + 0.9 * (1.0 - rng.random(count))

    users = []
    for k in range(count):
        pos = (float(bs[0] + r[k] * math.cos(theta[k])), float(bs[1] + r[k] * math.sin(theta[k])))
        dist = float(math.hypot(pos[0] - bs[0], pos[1] - bs[1]))
        user = UserProfile(
            id=k,
            position=pos,
            distance=dist,
            mobility_speed=float(speeds[k]),
            traffic_weight=float(traffic[k]),
        )
        user.field_class = classify_user(user, array, d0)
        users.append(user)
    return users


def user_channel(
    user: UserProfile, array: ArrayConfig, rng: np.random.Generator, path_loss_exp: float = 2.7
) -> ChannelVector:
    if user.field_class is FieldClass.NEAR:
        return near_field_channel(user, array)
    return far_field_channel(user, array, rng, path_loss_exp)
