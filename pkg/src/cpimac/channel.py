"""
Complex baseband model of the cognitive PIMAC.

Tx1 talks to Rx1 over a point-to-point link while Tx2 and Tx3 form a
multiple access channel towards Rx2. The received signal at receiver j is

    Y_j = sum_k h_kj X_k + Z_j,    Z_j ~ CN(0, 1).

Transmitters and receivers are indexed from 1 throughout, so ``ch.h(1, 2)``
is the gain from Tx1 to Rx2.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import FrozenSet, Optional

import numpy as np

from .errors import DegenerateChannel

__all__ = [
    "MAGNITUDE_FLOOR",
    "ChannelRealization",
    "CognitionCase",
    "NoiseModel",
    "RotationDecomposition",
    "decompose",
    "derive_seed",
    "from_real_vec",
    "receive",
    "receive_real",
    "rotation",
    "sample_channel",
    "to_real_vec",
]

MAGNITUDE_FLOOR = 1e-6
_MAX_REDRAWS = 100


def to_real_vec(x: complex) -> np.ndarray:
    """Return ``[Re x, Im x]``."""
    x = complex(x)
    return np.array([x.real, x.imag])


def from_real_vec(v) -> complex:
    """Inverse of :func:`to_real_vec`."""
    return complex(v[0], v[1])


def rotation(angle: float) -> np.ndarray:
    """2x2 planar rotation by ``angle`` radians."""
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True, eq=False)
class RotationDecomposition:
    """A complex scalar written as ``magnitude * U`` acting on ``[Re; Im]``."""

    magnitude: float
    angle: float
    U: np.ndarray

    def apply(self, v) -> np.ndarray:
        return self.magnitude * (self.U @ np.asarray(v, dtype=float))


def decompose(h: complex) -> RotationDecomposition:
    """Split ``h`` into its magnitude and a rotation matrix.

    Raises
    ------
    DegenerateChannel
        If ``h`` is zero or not finite.
    """
    h = complex(h)
    if not cmath.isfinite(h):
        raise DegenerateChannel(f"non-finite channel coefficient {h!r}")
    mag = abs(h)
    if mag == 0.0:
        raise DegenerateChannel("zero channel coefficient has no rotation")
    angle = math.atan2(h.imag, h.real)
    if angle == -math.pi:
        angle = math.pi
    # cos/sin taken as Re/|h|, Im/|h| keeps the matrix exact for Gaussian integers
    c, s = h.real / mag, h.imag / mag
    U = np.array([[c, -s], [s, c]])
    U.setflags(write=False)
    return RotationDecomposition(mag, angle, U)


@dataclass(frozen=True)
class NoiseModel:
    """Circularly symmetric complex Gaussian receiver noise."""

    variance: float = 1.0

    @property
    def real_variance(self) -> float:
        """Variance of each of the real and imaginary parts."""
        return self.variance / 2.0

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        std = math.sqrt(self.real_variance)
        return std * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


class ChannelRealization:
    """The six complex gains ``h_kj`` (k = transmitter, j = receiver).

    Parameters
    ----------
    coeffs : array_like, shape (3, 2)
        ``coeffs[k-1, j-1]`` is the gain from Tx k to Rx j.
    """

    __slots__ = ("_h", "_dec")

    def __init__(self, coeffs):
        h = np.array(coeffs, dtype=complex)
        if h.shape != (3, 2):
            raise ValueError(f"expected a 3x2 coefficient array, got {h.shape}")
        if not np.all(np.isfinite(h)):
            raise DegenerateChannel("channel coefficients must be finite")
        if np.any(np.abs(h) == 0.0):
            raise DegenerateChannel("channel coefficients must be nonzero")
        h.setflags(write=False)
        self._h = h
        self._dec = {(k, j): decompose(h[k - 1, j - 1])
                     for k in (1, 2, 3) for j in (1, 2)}

    @classmethod
    def unit(cls) -> "ChannelRealization":
        """All gains equal to 1 (every rotation is the identity)."""
        return cls(np.ones((3, 2)))

    @property
    def coeffs(self) -> np.ndarray:
        return self._h

    def h(self, k: int, j: int) -> complex:
        return complex(self._h[k - 1, j - 1])

    def mag(self, k: int, j: int) -> float:
        return self._dec[k, j].magnitude

    def U(self, k: int, j: int) -> np.ndarray:
        return self._dec[k, j].U

    def decomposition(self, k: int, j: int) -> RotationDecomposition:
        return self._dec[k, j]

    def min_magnitude(self) -> float:
        return float(np.min(np.abs(self._h)))

    def swapped_mac(self) -> "ChannelRealization":
        """The same channel with the labels of Tx2 and Tx3 exchanged."""
        return ChannelRealization(self._h[[0, 2, 1], :])

    def rotated_receiver(self, j: int, phase: complex) -> "ChannelRealization":
        """Multiply every gain into receiver ``j`` by ``phase``."""
        h = self._h.copy()
        h[:, j - 1] *= phase
        return ChannelRealization(h)

    def __eq__(self, other):
        if not isinstance(other, ChannelRealization):
            return NotImplemented
        return np.array_equal(self._h, other._h)

    def __hash__(self):
        return hash(self._h.tobytes())

    def __repr__(self):
        return f"ChannelRealization({self._h.tolist()!r})"


def derive_seed(seed: int, stream: int) -> int:
    """Independent 64-bit child seed for a named sub-stream of ``seed``."""
    ss = np.random.SeedSequence(seed, spawn_key=(stream,))
    return int(ss.generate_state(1, np.uint64)[0])


def sample_channel(seed: int) -> ChannelRealization:
    """Draw six i.i.d. CN(0, 1) gains, redrawing any below ``MAGNITUDE_FLOOR``."""
    rng = np.random.default_rng(seed)
    noise = NoiseModel()
    h = noise.sample(rng, (3, 2))
    for _ in range(_MAX_REDRAWS):
        bad = np.abs(h) < MAGNITUDE_FLOOR
        if not bad.any():
            return ChannelRealization(h)
        h[bad] = noise.sample(rng, int(bad.sum()))
    raise RuntimeError("channel redraw limit exceeded; RNG is broken")


def receive(ch: ChannelRealization, X, Z=None) -> np.ndarray:
    """Complex-domain received signals.

    Parameters
    ----------
    X : array_like, shape (3, ...)
        Complex transmit symbols of Tx1..Tx3.
    Z : array_like, shape (2, ...), optional
        Complex noise at Rx1, Rx2.

    Returns
    -------
    Y : ndarray, shape (2, ...)
    """
    X = np.asarray(X, dtype=complex)
    Y = np.tensordot(ch.coeffs.T, X, axes=1)
    if Z is not None:
        Y = Y + np.asarray(Z, dtype=complex)
    return Y


def receive_real(ch: ChannelRealization, Xvec, Zvec=None) -> np.ndarray:
    """Received signals computed with the 2x2 rotation representation.

    ``Xvec`` has shape (3, 2, ...) holding ``[Re; Im]`` of each transmit
    symbol; the result has shape (2, 2, ...).
    """
    Xvec = np.asarray(Xvec, dtype=float)
    Y = np.zeros((2,) + Xvec.shape[1:])
    for j in (1, 2):
        for k in (1, 2, 3):
            Y[j - 1] += ch.mag(k, j) * np.tensordot(ch.U(k, j), Xvec[k - 1], axes=1)
    if Zvec is not None:
        Y = Y + np.asarray(Zvec, dtype=float)
    return Y


_SIDE_INFO = frozenset({"m2", "m3"})


@dataclass(frozen=True)
class CognitionCase:
    """Which transmitters know which foreign messages.

    ``number`` is 1..4. Case 2 carries the subset of ``{"m2", "m3"}`` known
    at Tx1; case 3 names the single cognitive MAC transmitter (2 or 3).
    """

    number: int
    side_info: FrozenSet[str] = field(default_factory=frozenset)
    cognitive: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "side_info", frozenset(self.side_info))
        n = self.number
        if n not in (1, 2, 3, 4):
            raise ValueError(f"cognition case must be 1..4, got {n}")
        if n == 2:
            if not self.side_info or not self.side_info <= _SIDE_INFO:
                raise ValueError("case 2 needs a nonempty subset of {'m2', 'm3'}")
        elif self.side_info:
            raise ValueError("side_info is only meaningful for case 2")
        if n == 3:
            if self.cognitive not in (2, 3):
                raise ValueError("case 3 needs exactly one cognitive MAC transmitter (2 or 3)")
        elif self.cognitive is not None:
            raise ValueError("cognitive is only meaningful for case 3")

    @classmethod
    def case1(cls):
        return cls(1)

    @classmethod
    def case2(cls, side_info=("m2", "m3")):
        return cls(2, frozenset(side_info))

    @classmethod
    def case3(cls, cognitive: int = 2):
        return cls(3, cognitive=cognitive)

    @classmethod
    def case4(cls):
        return cls(4)

    @classmethod
    def parse(cls, label: str) -> "CognitionCase":
        """Parse a CLI label: ``1``, ``2``, ``3a``, ``3b`` or ``4``."""
        table = {"1": cls.case1, "2": cls.case2, "3a": lambda: cls.case3(2),
                 "3b": lambda: cls.case3(3), "4": cls.case4}
        try:
            return table[str(label).strip().lower()]()
        except KeyError:
            raise ValueError(f"unknown cognition case {label!r}") from None

    @property
    def label(self) -> str:
        if self.number == 3:
            return "3a" if self.cognitive == 2 else "3b"
        return str(self.number)

    @property
    def cognitive_mac(self) -> FrozenSet[int]:
        """MAC transmitters that know m1."""
        if self.number == 3:
            return frozenset({self.cognitive})
        if self.number == 4:
            return frozenset({2, 3})
        return frozenset()

    def __str__(self):
        return f"Case{self.label}"
