"""Blow-up construction over a few parameter choices: certificates, lower bounds, ratios."""
import argparse
from dataclasses import asdict, dataclass

from hypwave.counterexample import CounterexampleConfig, blowup_report, build_sequences
from hypwave.errors import CertificateError
from hypwave.reporting import RunRecorder, output_dir


@dataclass
class ScanConfig:
    c6_values: tuple = (1e-3, 1e-2, 1e-1)
    M_values: tuple = (2.0, 3.0)
    K: int = 3


def main(cfg: ScanConfig, out) -> bool:
    rec = RunRecorder(output_dir(out), "counterexample_scan", asdict(cfg))
    rows = []
    for c6 in cfg.c6_values:
        for M in cfg.M_values:
            data = build_sequences(CounterexampleConfig(c6=c6, M=M, K=cfg.K))
            try:
                rep = blowup_report(data)
            except CertificateError as exc:
                print(f"c6={c6:g} M={M:g}: {exc}")
                rows.append((c6, M, "", "", False))
                continue
            low = min(r.ratio for r in rep.rows)
            rows.append((c6, M, rep.rows[-1].lower_bound, low, rep.increasing))
            print(f"c6={c6:g} M={M:g}: last lower bound {rep.rows[-1].lower_bound:.4f}, min ratio {low:.4f}")
    rec.csv("scan.csv", ["c6", "M", "last_lower_bound", "min_ratio", "increasing"], rows)
    rec.check("default_increasing", bool(rows[0][4]))
    return rec.finish()["passed"]


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out")
    raise SystemExit(0 if main(ScanConfig(), ap.parse_args().out) else 2)
