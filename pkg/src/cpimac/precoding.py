"""
Interference alignment plus neutralization for the cognitive MAC cases.

Every complex symbol is carried by a real codeword along a 2x1 real
direction of the complex plane:

    X1 = V1 x1,    Xc = Vc xc + V0 x1,    Xo = Vo xo

where Tx c is the cognitive MAC transmitter (it knows m1) and Tx o is the
other one. ``V0`` and ``Vo`` are drawn at random; ``Vc`` is chosen so that
x2 and x3 arrive along the same direction at Rx1 (alignment), and ``V1`` so
that the two copies of x1 cancel over the air at Rx2 (neutralization).
Rx1 then projects out the single interference direction, while Rx2 sees
x2 and x3 along two independent directions of its 2-D real space.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .channel import MAGNITUDE_FLOOR, ChannelRealization
from .errors import DegenerateChannel, LinearDependence, ZeroInterferenceDirection

__all__ = [
    "EffectiveChannels",
    "PrecoderSet",
    "design_ian_precoders",
    "effective_channels",
    "ian_precoders_from_directions",
    "rx1_interference_coefficients",
    "rx2_x1_coefficient",
    "transmit_vectors",
    "verify_alignment",
    "verify_neutralization",
    "zero_forcing_direction",
]

INDEPENDENCE_TOL = 1e-9
_ZERO_DIRECTION = 1e-12


@dataclass(frozen=True, eq=False)
class PrecoderSet:
    """Real 2x1 precoders and per-symbol powers of the real codewords.

    ``V2`` and ``V3`` always belong to Tx2 and Tx3 respectively; ``V0`` is
    the neutralizing copy of x1 sent by Tx ``cognitive``.
    """

    V0: np.ndarray
    V1: np.ndarray
    V2: np.ndarray
    V3: np.ndarray
    p1: float
    p2: float
    p3: float
    P: float
    cognitive: int = 2

    def tx_powers(self):
        """Average transmit power of Tx1, Tx2, Tx3."""
        own = {2: self.V2 @ self.V2 * self.p2, 3: self.V3 @ self.V3 * self.p3}
        own[self.cognitive] += self.V0 @ self.V0 * self.p1
        return (float(self.V1 @ self.V1 * self.p1), float(own[2]), float(own[3]))

    def satisfies_power(self, rtol: float = 1e-9) -> bool:
        return all(p <= self.P * (1 + rtol) for p in self.tx_powers())

    def swapped(self) -> "PrecoderSet":
        """Exchange the roles of Tx2 and Tx3."""
        return replace(self, V2=self.V3, V3=self.V2, p2=self.p3, p3=self.p2,
                       cognitive=5 - self.cognitive)


@dataclass(frozen=True, eq=False)
class EffectiveChannels:
    """Post-precoding directions at both receivers.

    ``d1``: direction of x1 at Rx1; ``i1``: the aligned interference
    direction at Rx1, along which x2 and x3 arrive with gains ``a2`` and
    ``a3``; ``g2``, ``g3``: directions of x2 and x3 at Rx2.
    """

    d1: np.ndarray
    i1: np.ndarray
    g2: np.ndarray
    g3: np.ndarray
    a2: float
    a3: float


def _unit_circle(rng: np.random.Generator) -> np.ndarray:
    theta = rng.uniform(0.0, 2.0 * math.pi)
    return np.array([math.cos(theta), math.sin(theta)])


def _check_channel(ch: ChannelRealization):
    if ch.min_magnitude() < MAGNITUDE_FLOOR:
        raise DegenerateChannel(
            f"channel magnitude {ch.min_magnitude():.3g} below floor {MAGNITUDE_FLOOR}")


def _canonical(ch, pre):
    # cognitive Tx3 is handled by relabelling it as Tx2
    if pre.cognitive == 3:
        return ch.swapped_mac(), pre.swapped()
    return ch, pre


def ian_precoders_from_directions(ch: ChannelRealization, V0, Vfree, P: float,
                                  alpha: float = 0.5, cognitive: int = 2) -> PrecoderSet:
    """Complete a precoder set from the two freely chosen directions.

    Parameters
    ----------
    V0 : array_like
        Direction of the neutralizing copy of x1 at the cognitive transmitter.
    Vfree : array_like
        Direction of the non-cognitive MAC transmitter's own stream.
    alpha : float
        Share of the cognitive transmitter's power spent on x1.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if P < 0:
        raise ValueError("power must be nonnegative")
    if cognitive not in (2, 3):
        raise ValueError("cognitive transmitter must be 2 or 3")
    _check_channel(ch)
    c = ch.swapped_mac() if cognitive == 3 else ch
    V0 = np.asarray(V0, dtype=float)
    V3 = np.asarray(Vfree, dtype=float)
    # U is orthogonal, so U^-1 = U^T
    V2 = c.U(2, 1).T @ c.U(3, 1) @ V3
    V1 = -(c.mag(2, 2) / c.mag(1, 2)) * (c.U(1, 2).T @ c.U(2, 2) @ V0)
    p1 = min(P / (V1 @ V1), alpha * P / (V0 @ V0))
    p2 = (1.0 - alpha) * P / (V2 @ V2)
    p3 = P / (V3 @ V3)
    pre = PrecoderSet(V0=V0, V1=V1, V2=V2, V3=V3, p1=float(p1), p2=float(p2),
                      p3=float(p3), P=float(P), cognitive=2)
    return pre.swapped() if cognitive == 3 else pre


def design_ian_precoders(ch: ChannelRealization, seed: int, P: float,
                         alpha: float = 0.5, cognitive: int = 2) -> PrecoderSet:
    """Draw V0 and the free MAC direction uniformly on the unit circle, then
    solve the alignment and neutralization conditions in closed form."""
    rng = np.random.default_rng(seed)
    V0 = _unit_circle(rng)
    Vfree = _unit_circle(rng)
    return ian_precoders_from_directions(ch, V0, Vfree, P, alpha, cognitive)


def verify_alignment(ch: ChannelRealization, pre: PrecoderSet) -> float:
    """Relative residual of ``U21 V2 = U31 V3``; 0 means aligned at Rx1."""
    r = ch.U(2, 1) @ pre.V2 - ch.U(3, 1) @ pre.V3
    return float(np.linalg.norm(r) / max(np.linalg.norm(pre.V2), np.linalg.norm(pre.V3)))


def verify_neutralization(ch: ChannelRealization, pre: PrecoderSet) -> float:
    """Relative residual of the over-the-air cancellation of x1 at Rx2."""
    c = pre.cognitive
    r = ch.mag(1, 2) * ch.U(1, 2) @ pre.V1 + ch.mag(c, 2) * ch.U(c, 2) @ pre.V0
    return float(np.linalg.norm(r) / (ch.mag(c, 2) * np.linalg.norm(pre.V0)))


def _independent(u, v) -> bool:
    det = u[0] * v[1] - u[1] * v[0]
    return abs(det) > INDEPENDENCE_TOL * np.linalg.norm(u) * np.linalg.norm(v)


def effective_channels(ch: ChannelRealization, pre: PrecoderSet) -> EffectiveChannels:
    """Received directions of every real stream after precoding.

    Raises
    ------
    LinearDependence
        If x1 arrives parallel to the interference at Rx1, or x2 parallel to
        x3 at Rx2.
    """
    c, p = _canonical(ch, pre)
    d1 = c.mag(1, 1) * c.U(1, 1) @ p.V1 + c.mag(2, 1) * c.U(2, 1) @ p.V0
    i1 = c.U(3, 1) @ p.V3
    g2 = c.mag(2, 2) * c.U(2, 2) @ p.V2
    g3 = c.mag(3, 2) * c.U(3, 2) @ p.V3
    a2, a3 = c.mag(2, 1), c.mag(3, 1)
    if pre.cognitive == 3:
        g2, g3, a2, a3 = g3, g2, a3, a2
    if not _independent(d1, i1):
        raise LinearDependence("desired and interference directions at Rx1 are dependent")
    if not _independent(g2, g3):
        raise LinearDependence("x2 and x3 directions at Rx2 are dependent")
    return EffectiveChannels(d1=d1, i1=i1, g2=g2, g3=g3, a2=a2, a3=a3)


def zero_forcing_direction(eff: EffectiveChannels) -> np.ndarray:
    """Unit vector orthogonal to the Rx1 interference, signed so ``q.d1 > 0``."""
    n = np.linalg.norm(eff.i1)
    if n < _ZERO_DIRECTION:
        raise ZeroInterferenceDirection(f"interference direction norm {n:.3g}")
    q = np.array([-eff.i1[1], eff.i1[0]]) / n
    return -q if q @ eff.d1 < 0 else q


def transmit_vectors(pre: PrecoderSet, x) -> np.ndarray:
    """``[Re; Im]`` of X1, X2, X3 for real symbols ``x = (x1, x2, x3)``.

    Each ``x_k`` may be a scalar or an array of samples; the result has
    shape (3, 2, ...).
    """
    x1, x2, x3 = (np.asarray(v, dtype=float) for v in x)
    out = np.stack([np.multiply.outer(pre.V1, x1),
                    np.multiply.outer(pre.V2, x2),
                    np.multiply.outer(pre.V3, x3)])
    out[pre.cognitive - 1] += np.multiply.outer(pre.V0, x1)
    return out


def _complex_tx(pre, x):
    v = transmit_vectors(pre, x)
    return v[:, 0] + 1j * v[:, 1]


def rx1_interference_coefficients(ch: ChannelRealization, pre: PrecoderSet,
                                  q: np.ndarray):
    """Coefficients of x2 and x3 in ``q . Y1``, found by complex-domain
    propagation of unit symbols (independent of the rotation algebra)."""
    out = []
    for x in ((0.0, 1.0, 0.0), (0.0, 0.0, 1.0)):
        Y1 = np.sum(ch.coeffs[:, 0] * _complex_tx(pre, x))
        out.append(float(q @ [Y1.real, Y1.imag]))
    return tuple(out)


def rx2_x1_coefficient(ch: ChannelRealization, pre: PrecoderSet) -> np.ndarray:
    """``[Re; Im]`` coefficient of x1 in Y2 (zero when neutralized)."""
    Y2 = np.sum(ch.coeffs[:, 1] * _complex_tx(pre, (1.0, 0.0, 0.0)))
    return np.array([Y2.real, Y2.imag])
