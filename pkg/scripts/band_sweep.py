"""Maximal-ratio band sweep on an annulus, for the vertical line and the parabolic curve.

    python scripts/band_sweep.py --out sweep_out
"""
import argparse
from dataclasses import asdict, dataclass, field
from typing import List

from hypwave.experiments import band_sweep
from hypwave.geometry import Annulus, Space, parse_curve
from hypwave.reporting import RunRecorder, output_dir


@dataclass
class SweepConfig:
    space: str = "h3"
    annulus: tuple = (1.0, 2.0)
    curves: List[tuple] = field(default_factory=lambda: [("vertical", 1.0), ("parabolic:1", 0.2)])
    exponents: tuple = (4, 5, 6, 7, 8, 9, 10)
    beta: float = 0.25
    seed: int = None
    slope_band: float = 0.15


def main(cfg: SweepConfig, out) -> bool:
    rec = RunRecorder(output_dir(out), "band_sweep", asdict(cfg))
    space = Space.parse(cfg.space)
    annulus = Annulus(*cfg.annulus)
    N_list = [2 ** k for k in cfg.exponents]
    for spec, T in cfg.curves:
        curve = parse_curve(spec)
        sweep = band_sweep(space, curve, annulus, T, N_list, cfg.beta, cfg.seed)
        name = spec.split(":")[0]
        rec.csv(f"sweep_{name}.csv", ["N", "lhs", "sobolev_norm", "ratio", "refinement_delta"],
                ((N, *row[1:]) for N, row in zip(N_list, sweep.report.rows())),
                {"curve": spec, "T": T, "slope": sweep.slope})
        rec.check(f"slope_{name}", sweep.within(cfg.slope_band))
        print(f"{spec:12s} slope {sweep.slope:+.4f}")
    return rec.finish()["passed"]


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out")
    ap.add_argument("--space", default="h3")
    args = ap.parse_args()
    raise SystemExit(0 if main(SweepConfig(space=args.space), args.out) else 2)
