"""
Closed-form achievable rates and converse bounds, in bits per complex
channel use.

Noise is CN(0, 1), i.e. variance 1/2 on each real dimension. The IAN
scheme signals with real codewords, so each real stream is worth half of
a complex-channel-use rate.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import numpy as np

from .channel import ChannelRealization, CognitionCase
from .precoding import (EffectiveChannels, PrecoderSet, design_ian_precoders,
                        effective_channels, zero_forcing_direction)

__all__ = [
    "RatePoint",
    "Scheme",
    "UpperBoundParams",
    "ian_cognitive_tx",
    "rate_ian",
    "rate_joint_decoding",
    "rate_tdm",
    "scheme_rate",
    "shannon",
    "upper_bound",
]


class Scheme(enum.Enum):
    TDM = "tdm"
    JOINT = "joint"
    IAN = "ian"

    @classmethod
    def parse(cls, s) -> "Scheme":
        return s if isinstance(s, cls) else cls(str(s).lower())


@dataclass(frozen=True)
class RatePoint:
    R1: float
    R2: float
    R3: float
    scheme: Scheme

    def __post_init__(self):
        for r in (self.R1, self.R2, self.R3):
            if not (math.isfinite(r) and r >= 0.0):
                raise ValueError(f"invalid rate {r!r}")

    @property
    def total(self) -> float:
        return self.R1 + self.R2 + self.R3


@dataclass(frozen=True)
class UpperBoundParams:
    """Correlation coefficients between X1 and X2 / X3 used by the bounds.

    The defaults (1) are the worst case and give bounds valid for every
    codebook. A coefficient is ignored when the cognition case makes the
    two inputs independent.
    """

    rho12: complex = 1.0
    rho13: complex = 1.0

    def __post_init__(self):
        for r in (self.rho12, self.rho13):
            if abs(r) > 1.0 + 1e-12:
                raise ValueError(f"|rho| must be <= 1, got {abs(r)}")


def shannon(x: float) -> float:
    """``log2(1 + x)``."""
    if x < 0:
        raise ValueError(f"shannon() needs a nonnegative argument, got {x}")
    return math.log2(1.0 + x)


def _clip(r: float) -> float:
    # roundoff can leave -1e-17 where a difference of logs is exactly zero
    return 0.0 if r < 0.0 else r


def rate_tdm(ch: ChannelRealization, P: float) -> RatePoint:
    """Two half slots at power 2P: Tx1 alone, then the MAC alone.

    The MAC half slot sits at the corner that decodes x3 first.
    """
    if P < 0:
        raise ValueError("power must be nonnegative")
    r1 = 0.5 * shannon(2 * ch.mag(1, 1) ** 2 * P)
    g2, g3 = ch.mag(2, 2) ** 2, ch.mag(3, 2) ** 2
    mac = 0.5 * shannon(2 * P * (g2 + g3))
    r3 = 0.5 * shannon(2 * g3 * P / (1 + 2 * g2 * P))
    return RatePoint(r1, _clip(mac - r3), r3, Scheme.TDM)


def rate_joint_decoding(ch: ChannelRealization, P: float) -> RatePoint:
    """Both receivers decode all three messages.

    The sum rate is limited by the weaker receiver; it is split across
    users in proportion to their received powers there.
    """
    if P < 0:
        raise ValueError("power must be nonnegative")
    rx_gain = [sum(ch.mag(k, j) ** 2 for k in (1, 2, 3)) for j in (1, 2)]
    j = 1 if rx_gain[0] <= rx_gain[1] else 2
    total = shannon(P * rx_gain[j - 1])
    shares = [ch.mag(k, j) ** 2 / rx_gain[j - 1] for k in (1, 2, 3)]
    return RatePoint(*(total * s for s in shares), Scheme.JOINT)


def rate_ian(ch: ChannelRealization, pre: PrecoderSet, eff: EffectiveChannels,
             P: float) -> RatePoint:
    """Rates of the alignment/neutralization scheme.

    Rx1 zero-forces the aligned interference and decodes x1 from a scalar
    real observation. Rx2 decodes x2 and x3 from its 2-D real observation
    at the corner that decodes x3 first.
    """
    if P < 0:
        raise ValueError("power must be nonnegative")
    if not math.isclose(pre.P, P, rel_tol=1e-12, abs_tol=0.0):
        raise ValueError(f"precoder powers were set for P={pre.P}, not P={P}")
    q = zero_forcing_direction(eff)
    r1 = 0.5 * math.log2(1.0 + 2.0 * (q @ eff.d1) ** 2 * pre.p1)
    G = np.column_stack([eff.g2, eff.g3])
    S = np.eye(2) + 2.0 * G @ np.diag([pre.p2, pre.p3]) @ G.T
    total = 0.5 * math.log2(np.linalg.det(S))
    r2 = 0.5 * math.log2(1.0 + 2.0 * pre.p2 * (eff.g2 @ eff.g2))
    return RatePoint(r1, r2, _clip(total - r2), Scheme.IAN)


def ian_cognitive_tx(case: CognitionCase) -> int:
    """MAC transmitter that carries the neutralizing copy of x1.

    In case 4 Tx3's side information is simply not used.
    """
    if case.number == 3:
        return case.cognitive
    if case.number == 4:
        return 2
    raise ValueError(f"IAN needs a cognitive MAC transmitter; {case} has none")


def _rx1_cooperative_power(ch, txs, rho):
    total = sum(ch.mag(k, 1) ** 2 for k in txs)
    for a, b in combinations(sorted(txs), 2):
        total += 2 * ch.mag(a, 1) * ch.mag(b, 1) * rho[a, b]
    return total


def upper_bound(case: CognitionCase, ch: ChannelRealization, P: float,
                params: Optional[UpperBoundParams] = None) -> float:
    """Converse bound on R1 + R2 + R3.

    Cases 1 and 2 use a genie that hands Rx1 the MAC output and messages.
    Cases 3 and 4 average three pairwise bounds; the pair bound on R1 + Rk
    gives the remaining MAC message to both receivers.
    """
    if P < 0:
        raise ValueError("power must be nonnegative")
    params = params or UpperBoundParams()
    mag2 = lambda k, j: ch.mag(k, j) ** 2  # noqa: E731
    if case.number in (1, 2):
        known = case.side_info
        cross = 0.0
        if "m2" in known:
            cross += 2 * ch.mag(1, 2) * ch.mag(2, 2) * params.rho12.real
        if "m3" in known:
            cross += 2 * ch.mag(1, 2) * ch.mag(3, 2) * params.rho13.real
        rx2 = P * (mag2(1, 2) + mag2(2, 2) + mag2(3, 2) + cross)
        return shannon(max(rx2, 0.0)) + shannon(mag2(1, 1) * P / (1 + mag2(1, 2) * P))

    cog = case.cognitive_mac
    rho = {(1, 2): params.rho12.real if 2 in cog else 0.0,
           (1, 3): params.rho13.real if 3 in cog else 0.0,
           # both MAC inputs depend on m1 in case 4; take the worst case
           (2, 3): 1.0 if cog == {2, 3} else 0.0}
    pair = []
    for k, other in ((2, 3), (3, 2)):
        # the genie's message fixes Tx_other only when it is not cognitive
        txs = {1, k} | ({other} if other in cog else set())
        pw = max(_rx1_cooperative_power(ch, txs, rho), 0.0)
        pair.append(shannon(P * pw) + shannon(mag2(k, 2) * P / (1 + mag2(k, 1) * P)))
    mac = shannon(P * (mag2(2, 2) + mag2(3, 2)))
    return 0.5 * (pair[0] + pair[1] + mac)


def scheme_rate(scheme, case: CognitionCase, ch: ChannelRealization, P: float,
                alpha: float = 0.5, precoder_seed: int = 0) -> RatePoint:
    """Evaluate ``scheme`` on one channel at power ``P``."""
    scheme = Scheme.parse(scheme)
    if scheme is Scheme.TDM:
        return rate_tdm(ch, P)
    if scheme is Scheme.JOINT:
        return rate_joint_decoding(ch, P)
    pre = design_ian_precoders(ch, precoder_seed, P, alpha, ian_cognitive_tx(case))
    return rate_ian(ch, pre, effective_channels(ch, pre), P)
