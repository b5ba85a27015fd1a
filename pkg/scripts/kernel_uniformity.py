"""Scaled oscillatory kernel |I_N| |s - s'|^{1/2} across frequency cutoffs N."""
import argparse
from dataclasses import asdict, dataclass

from hypwave.experiments import kernel_uniformity
from hypwave.geometry import Annulus, parse_curve
from hypwave.reporting import RunRecorder, output_dir


@dataclass
class KernelConfig:
    curve: str = "parabolic:1"
    annulus: tuple = (1.0, 2.0)
    T: float = 0.2
    N_list: tuple = (16, 64, 256, 1024)
    pairs: int = 100
    seed: int = 0
    max_spread: float = 4.0


def main(cfg: KernelConfig, out) -> bool:
    rec = RunRecorder(output_dir(out), "kernel_uniformity", asdict(cfg))
    rep = kernel_uniformity(parse_curve(cfg.curve), Annulus(*cfg.annulus), cfg.T, cfg.N_list, cfg.pairs,
                            seed=cfg.seed)
    rec.csv("kernel.csv", ["N", "max_scaled"], zip(rep.N, rep.max_scaled), {"spread": rep.spread})
    rec.check("spread", rep.spread < cfg.max_spread)
    print(f"spread across N: {rep.spread:.5f}")
    return rec.finish()["passed"]


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    raise SystemExit(0 if main(KernelConfig(seed=args.seed), args.out) else 2)
