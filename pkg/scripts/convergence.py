"""Convergence tables e(tau) for Gaussian-band data on H3 and R^3."""
import argparse
from dataclasses import asdict, dataclass

from hypwave.experiments import convergence_table, gaussian_band
from hypwave.geometry import Annulus, Space, parse_curve
from hypwave.reporting import RunRecorder, output_dir


@dataclass
class ConvergenceConfig:
    spaces: tuple = ("h3", "rn:3")
    curves: tuple = ("vertical", "parabolic:1")
    annulus: tuple = (1.0, 2.0)
    taus: tuple = (0.2, 0.1, 0.05, 0.025)
    band_center: float = 1.0
    band_sigma: float = 0.5
    max_final_ratio: float = 0.5


def main(cfg: ConvergenceConfig, out) -> bool:
    rec = RunRecorder(output_dir(out), "convergence", asdict(cfg))
    band = gaussian_band(cfg.band_center, cfg.band_sigma)
    rows = []
    for label in cfg.spaces:
        for spec in cfg.curves:
            table = convergence_table(Space.parse(label), band, parse_curve(spec), Annulus(*cfg.annulus),
                                      cfg.taus)
            ratio = table.error[-1] / table.error[0]
            rows += [(label, spec, tau, err) for tau, err in table.rows()]
            rec.check(f"{label}_{spec}", table.strictly_decreasing and ratio < cfg.max_final_ratio)
            print(f"{label:5s} {spec:12s} e(tau) = {', '.join(f'{e:.3e}' for e in table.error)}")
    rec.csv("convergence.csv", ["space", "curve", "tau", "error"], rows)
    return rec.finish()["passed"]


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out")
    raise SystemExit(0 if main(ConvergenceConfig(), ap.parse_args().out) else 2)
