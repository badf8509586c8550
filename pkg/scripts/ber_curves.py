"""BER/FER vs Eb/N0 for baseline and optimized constructions.

Runs one comparison per (n, rate) with that row's thresholds from the
reference table and writes plot-ready CSV/JSON per configuration.

    python scripts/ber_curves.py --out-dir curves --frames 20000 --workers 4
"""

import argparse
from pathlib import Path

import numpy as np

from ccpolar.reference import LATENCY_TARGETS, k_for
from ccpolar.sim import SimConfig, compare_constructions, write_results


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out-dir", default="curves")
    ap.add_argument("--lengths", default="1024,2048")
    ap.add_argument("--ebno", default="1.0,1.5,2.0,2.5,3.0")
    ap.add_argument("--frames", type=int, default=20_000)
    ap.add_argument("--min-errors", type=int, default=100)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lengths = [int(v) for v in args.lengths.split(",")]
    ebno = [float(v) for v in args.ebno.split(",")]
    for (n, rate), (_, rows) in LATENCY_TARGETS.items():
        if n not in lengths:
            continue
        cfg = SimConfig(n=n, k=k_for(n, rate), thresholds=tuple(t for t, _, _ in rows),
                        ebno_db=tuple(ebno), max_frames=args.frames,
                        min_frame_errors=args.min_errors, master_seed=args.seed)
        comp = compare_constructions(cfg, workers=args.workers)
        stem = f"n{n}_r{rate:g}"
        write_results(comp, out / f"{stem}.csv", out / f"{stem}.json", manifest_name="none")
        for row in comp.tradeoff():
            ratio = row["ber_ratio"]
            print(f"{stem} T_h={row['T_h']:<8g} {row['ebno_db']:4.1f} dB  ber={row['ber']:.3e} "
                  f"ratio={ratio if np.isnan(ratio) else round(ratio, 3)}  red={row['reduction_percent']:.1f}%")


if __name__ == "__main__":
    main()
