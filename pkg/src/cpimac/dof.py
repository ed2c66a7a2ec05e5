"""DoF estimation: slope of the channel-averaged sum rate against log2(P)."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

from .channel import ChannelRealization, CognitionCase, derive_seed
from .errors import InsufficientGrid, PoorFit
from .rates import Scheme, scheme_rate, upper_bound

__all__ = ["DEFAULT_GRID_DB", "UPPER_BOUND", "DofEstimate", "db_to_linear",
           "estimate_dof", "fit_dof", "precoder_seed", "sum_rate_fn"]

UPPER_BOUND = "upper"
DEFAULT_GRID_DB = tuple(range(40, 101, 10))
MIN_SPAN_DB = 40.0
MIN_POINT_DB = 40.0
MIN_POINTS = 4
R2_GATE = 0.99

# stream id for precoder randomness, kept apart from the channel draw
_PRECODER_STREAM = 1


def db_to_linear(p_db):
    return 10.0 ** (np.asarray(p_db, dtype=float) / 10.0)


def precoder_seed(trial_seed: int) -> int:
    return derive_seed(trial_seed, _PRECODER_STREAM)


@dataclass(frozen=True)
class DofEstimate:
    slope: float
    intercept: float
    r_squared: float
    grid: Tuple[Tuple[float, float], ...]


def fit_dof(grid_db: Sequence[float], sum_rates: Sequence[float]) -> DofEstimate:
    """Least-squares line of ``sum_rates`` against ``log2(P)``."""
    x = np.log2(db_to_linear(grid_db))
    y = np.asarray(sum_rates, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(resid @ resid) / ss_tot if ss_tot > 0 else 1.0
    r2 = min(max(r2, 0.0), 1.0)
    return DofEstimate(float(slope), float(intercept), r2,
                       tuple((float(p), float(r)) for p, r in zip(grid_db, y)))


def sum_rate_fn(scheme, case: CognitionCase, alpha: float = 0.5
                ) -> Callable[[ChannelRealization, float, int], float]:
    """``f(ch, P, trial_seed) -> R_sum`` for a scheme tag or ``"upper"``."""
    if scheme == UPPER_BOUND:
        return lambda ch, P, seed: upper_bound(case, ch, P)
    scheme = Scheme.parse(scheme)
    return lambda ch, P, seed: scheme_rate(
        scheme, case, ch, P, alpha, precoder_seed(seed)).total


def _check_grid(grid_db):
    g = sorted(float(p) for p in grid_db)
    if len(g) < MIN_POINTS:
        raise InsufficientGrid(f"need at least {MIN_POINTS} grid points, got {len(g)}")
    if g[0] < MIN_POINT_DB:
        raise InsufficientGrid(f"lowest grid point {g[0]} dB is below {MIN_POINT_DB} dB")
    if g[-1] - g[0] < MIN_SPAN_DB:
        raise InsufficientGrid(f"grid spans {g[-1] - g[0]} dB, need {MIN_SPAN_DB} dB")


def estimate_dof(scheme: Union[Scheme, str, Callable], case: CognitionCase,
                 channels: Sequence[ChannelRealization],
                 grid_db: Sequence[float] = DEFAULT_GRID_DB, *,
                 alpha: float = 0.5, seeds: Optional[Sequence[int]] = None
                 ) -> DofEstimate:
    """Estimate the DoF of ``scheme`` over a batch of channels.

    Parameters
    ----------
    scheme : Scheme, str or callable
        A scheme tag, ``"upper"`` for the converse bound of ``case``, or any
        ``f(ch, P) -> R_sum``.
    seeds : sequence of int, optional
        Trial seed of each channel, used to derive IAN precoder draws.
        Defaults to the channel index.

    Raises
    ------
    InsufficientGrid, PoorFit
    """
    _check_grid(grid_db)
    if len(channels) == 0:
        raise ValueError("need at least one channel")
    if seeds is None:
        seeds = range(len(channels))
    if callable(scheme):
        user_fn = scheme
        fn = lambda ch, P, seed: user_fn(ch, P)  # noqa: E731
    else:
        fn = sum_rate_fn(scheme, case, alpha)
    powers = db_to_linear(grid_db)
    avg = [np.mean([fn(ch, P, s) for ch, s in zip(channels, seeds)]) for P in powers]
    est = fit_dof(grid_db, avg)
    if est.r_squared < R2_GATE:
        raise PoorFit(f"r^2 = {est.r_squared:.4f} below {R2_GATE}")
    return est
