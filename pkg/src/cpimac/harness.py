"""Monte Carlo driver and command line interface.

Subcommands::

    cpimac simulate --case 3a --trials 10 --out rates.csv
    cpimac dof      --case 1 --scheme tdm --scheme joint
    cpimac verify   --case 4 --trials 1000

Trial ``i`` uses seed ``seed + i`` for its channel draw; IAN precoder
directions come from an independent stream derived from the same seed.
"""
from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .channel import CognitionCase, sample_channel
from .dof import UPPER_BOUND, db_to_linear, estimate_dof, precoder_seed
from .errors import ConfigError
from .precoding import design_ian_precoders, effective_channels, verify_alignment, verify_neutralization
from .rates import Scheme, ian_cognitive_tx, scheme_rate, upper_bound

log = logging.getLogger(__name__)

CSV_HEADER = ("seed", "case", "scheme", "P_dB", "R1", "R2", "R3", "R_sum", "upper_bound")
RESIDUAL_TOL = 1e-9
_SCHEME_ORDER = {s: i for i, s in enumerate(Scheme)}


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


@dataclass
class SimConfig:
    case: CognitionCase = field(default_factory=CognitionCase.case1)
    schemes: Tuple[Scheme, ...] = (Scheme.TDM,)
    p_min_db: float = 40.0
    p_max_db: float = 100.0
    p_step_db: float = 10.0
    trials: int = 100
    seed: int = 0
    alpha: float = 0.5
    out_path: Optional[Path] = None

    def __post_init__(self):
        self.schemes = tuple(sorted({Scheme.parse(s) for s in self.schemes},
                                    key=_SCHEME_ORDER.__getitem__))
        if not self.schemes:
            raise ConfigError("at least one scheme is required")
        if self.p_step_db <= 0:
            raise ConfigError("power step must be positive")
        if self.p_min_db > self.p_max_db:
            raise ConfigError("p_min_db exceeds p_max_db")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError("alpha must lie in (0, 1)")
        if Scheme.IAN in self.schemes and self.case.number not in (3, 4):
            raise ConfigError(f"IAN needs a cognitive MAC transmitter (case 3 or 4), not {self.case}")

    @property
    def grid_db(self) -> List[float]:
        n = int(np.floor((self.p_max_db - self.p_min_db) / self.p_step_db + 1e-9))
        return [self.p_min_db + i * self.p_step_db for i in range(n + 1)]

    def trial_seeds(self) -> List[int]:
        return [self.seed + i for i in range(self.trials)]


@dataclass(frozen=True)
class CsvRow:
    seed: int
    case: str
    scheme: str
    P_dB: float
    R1: float
    R2: float
    R3: float
    R_sum: float
    upper_bound: float

    def cells(self):
        return [str(self.seed), self.case, self.scheme, _fmt(self.P_dB), _fmt(self.R1),
                _fmt(self.R2), _fmt(self.R3), _fmt(self.R_sum), _fmt(self.upper_bound)]


def _write(path: Path, header, rows):
    path = Path(path)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    try:
        if path.parent != Path(""):
            path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(buf.getvalue(), encoding="utf-8", newline="")
    except OSError as e:
        raise OSError(f"cannot write {path}: {e}") from e


def write_csv(path: Path, rows: Sequence[CsvRow]):
    _write(path, CSV_HEADER, [r.cells() for r in rows])


def run_simulate(cfg: SimConfig) -> List[CsvRow]:
    """Rates of every scheme on every trial channel and grid power."""
    rows = []
    grid = cfg.grid_db
    for seed in cfg.trial_seeds():
        ch = sample_channel(seed)
        for scheme in cfg.schemes:
            for p_db in grid:
                P = float(db_to_linear(p_db))
                r = scheme_rate(scheme, cfg.case, ch, P, cfg.alpha, precoder_seed(seed))
                rows.append(CsvRow(seed, cfg.case.label, scheme.value, p_db, r.R1, r.R2,
                                   r.R3, r.R1 + r.R2 + r.R3, upper_bound(cfg.case, ch, P)))
    rows.sort(key=lambda r: (r.seed, _SCHEME_ORDER[Scheme(r.scheme)], r.P_dB))
    if cfg.out_path is not None:
        write_csv(cfg.out_path, rows)
    return rows


def run_dof(cfg: SimConfig, with_bound: bool = True) -> dict:
    """DoF estimate of each configured scheme (and the converse bound)."""
    seeds = cfg.trial_seeds()
    channels = [sample_channel(s) for s in seeds]
    out = {}
    for scheme in cfg.schemes:
        out[scheme.value] = estimate_dof(scheme, cfg.case, channels, cfg.grid_db,
                                         alpha=cfg.alpha, seeds=seeds)
    if with_bound:
        out[UPPER_BOUND] = estimate_dof(UPPER_BOUND, cfg.case, channels, cfg.grid_db,
                                        seeds=seeds)
    if cfg.out_path is not None:
        _write(cfg.out_path, ("case", "scheme", "slope", "intercept", "r_squared"),
               [[cfg.case.label, name, _fmt(e.slope), _fmt(e.intercept), _fmt(e.r_squared)]
                for name, e in out.items()])
    return out


def format_dof_table(case: CognitionCase, estimates: dict) -> str:
    lines = [f"{'case':<6}{'scheme':<8}{'slope':>10}{'intercept':>12}{'r^2':>10}"]
    for name, e in estimates.items():
        lines.append(f"{case.label:<6}{name:<8}{e.slope:>10.4f}{e.intercept:>12.4f}"
                     f"{e.r_squared:>10.6f}")
    return "\n".join(lines)


@dataclass(frozen=True)
class VerifyRecord:
    seed: int
    alignment: float
    neutralization: float
    det_rx1: float
    det_rx2: float


def _det(u, v):
    return float(u[0] * v[1] - u[1] * v[0])


def run_verify(cfg: SimConfig, inject_fault: bool = False) -> List[VerifyRecord]:
    """Alignment/neutralization residuals and independence determinants.

    ``inject_fault`` perturbs V2 by (0.1, 0) after design; it exists so the
    failure path can be exercised.
    """
    if cfg.case.number not in (3, 4):
        raise ConfigError(f"verify needs case 3 or 4, not {cfg.case}")
    cog = ian_cognitive_tx(cfg.case)
    P = float(db_to_linear(cfg.p_max_db))
    out = []
    for seed in cfg.trial_seeds():
        ch = sample_channel(seed)
        pre = design_ian_precoders(ch, precoder_seed(seed), P, cfg.alpha, cog)
        if inject_fault:
            pre = replace(pre, V2=pre.V2 + np.array([0.1, 0.0]))
        eff = effective_channels(ch, pre)
        out.append(VerifyRecord(seed, verify_alignment(ch, pre), verify_neutralization(ch, pre),
                                _det(eff.d1, eff.i1), _det(eff.g2, eff.g3)))
    if cfg.out_path is not None:
        _write(cfg.out_path, ("seed", "alignment", "neutralization", "det_rx1", "det_rx2"),
               [[str(r.seed), _fmt(r.alignment), _fmt(r.neutralization), _fmt(r.det_rx1),
                 _fmt(r.det_rx2)] for r in out])
    return out


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cpimac", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (("simulate", "per-trial rates to CSV"),
                        ("dof", "DoF estimates from a high-SNR sweep"),
                        ("verify", "precoder residual report")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--case", default="3a" if name == "verify" else "1",
                       choices=["1", "2", "3a", "3b", "4"])
        p.add_argument("--scheme", action="append", choices=[s.value for s in Scheme],
                       help="repeatable; defaults to every scheme valid for the case")
        p.add_argument("--pmin-db", type=float, default=40.0)
        p.add_argument("--pmax-db", type=float, default=100.0)
        p.add_argument("--step-db", type=float, default=10.0)
        p.add_argument("--trials", type=int, default=1000 if name == "verify" else 100)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--alpha", type=float, default=0.5)
        p.add_argument("--out", type=Path,
                       default={"simulate": Path("rates.csv"), "dof": Path("dof.csv")}.get(name))
        p.add_argument("-v", "--verbose", action="store_true")
        if name == "verify":
            p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    return parser


def _config(args) -> SimConfig:
    case = CognitionCase.parse(args.case)
    schemes = args.scheme
    if not schemes:
        schemes = [Scheme.TDM, Scheme.JOINT] + ([Scheme.IAN] if case.number in (3, 4) else [])
    return SimConfig(case=case, schemes=tuple(schemes), p_min_db=args.pmin_db,
                     p_max_db=args.pmax_db, p_step_db=args.step_db, trials=args.trials,
                     seed=args.seed, alpha=args.alpha, out_path=args.out)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _config(args)
        if args.command == "simulate":
            rows = run_simulate(cfg)
            print(f"wrote {len(rows)} rows to {cfg.out_path}")
        elif args.command == "dof":
            print(format_dof_table(cfg.case, run_dof(cfg)))
        else:
            recs = run_verify(cfg, inject_fault=args.inject_fault)
            worst_a = max(r.alignment for r in recs)
            worst_n = max(r.neutralization for r in recs)
            min_d1 = min(abs(r.det_rx1) for r in recs)
            min_d2 = min(abs(r.det_rx2) for r in recs)
            print(f"trials={len(recs)} max_alignment={worst_a:.3e} "
                  f"max_neutralization={worst_n:.3e} min|det_rx1|={min_d1:.3e} "
                  f"min|det_rx2|={min_d2:.3e}")
            if max(worst_a, worst_n) > RESIDUAL_TOL:
                print(f"FAIL: residual above {RESIDUAL_TOL:g}", file=sys.stderr)
                return 1
            print("OK")
    except (ConfigError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return 0
