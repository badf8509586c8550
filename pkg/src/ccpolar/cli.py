"""Command line front end: construct, latency, simulate, sweep."""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .construction import optimize_layout
from .reliability import baseline_layout, bec_profile, dump_layout, load_layout
from .reference import DESIGN_EPSILON, LATENCY_TARGETS, k_for
from .sim import SimConfig, compare_constructions, latency_rows, write_results
from .tree import LATENCY_CSV_COLUMNS, OverheadMode, build_pruned_tree, total_latency

MANIFEST = "manifest.json"


class UsageError(Exception):
    pass


@dataclass
class RunManifest:
    command: str
    config: dict
    outputs: list = field(default_factory=list)
    version: str = __version__
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())

    def write(self, out_dir: Path) -> Path:
        path = out_dir / MANIFEST
        with open(path, "w") as fh:
            json.dump(asdict(self), fh, indent=1, sort_keys=True)
        return path


def _modes(name: str) -> list[OverheadMode]:
    if name in ("both", "all"):
        return list(OverheadMode)
    return [OverheadMode(name)]


def _resolve_k(args) -> int:
    if args.k is not None:
        return args.k
    if args.rate is not None:
        return k_for(args.n, args.rate)
    raise UsageError("one of --k or --rate is required")


def _write_latency_csv(path: Path, rows: list[dict], config: dict) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# manifest: {MANIFEST}\n")
        fh.write(f"# config: {json.dumps(config, sort_keys=True)}\n")
        w = csv.DictWriter(fh, fieldnames=LATENCY_CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)


def cmd_construct(args) -> int:
    if args.n is None:
        raise UsageError("--n is required")
    k = _resolve_k(args)
    profile = bec_profile(args.epsilon, args.n)
    base = baseline_layout(profile, k)
    opt, swaps = optimize_layout(base, profile, args.threshold)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    config = {"n": args.n, "k": k, "epsilon": args.epsilon, "threshold": args.threshold}
    dump_layout(out / "baseline_layout.json", profile, base, manifest=MANIFEST, config=config)
    dump_layout(out / "optimized_layout.json", profile, opt, manifest=MANIFEST, config=config)
    with open(out / "swaps.json", "w") as fh:
        json.dump({"manifest": MANIFEST, "config": config, "swaps": [s.to_json() for s in swaps]}, fh, indent=1)
    outputs = ["baseline_layout.json", "optimized_layout.json", "swaps.json"]
    RunManifest("construct", config, outputs).write(out)

    if args.n <= 64:
        print(f"baseline : {base.kinds}")
        print(f"optimized: {opt.kinds}")
    print(f"swaps: {len(swaps)}")
    for s in swaps:
        print(f"  i={s.info_index} f={s.frozen_index} delta={s.delta:.6g}")
    tb, to = build_pruned_tree(base), build_pruned_tree(opt)
    for m in OverheadMode:
        rep = total_latency(to, m, tb)
        print(f"latency[{m.value}]: {rep.baseline_cycles} -> {rep.total_cycles} "
              f"({rep.reduction_percent:.1f}% reduction)")
    return 0


def cmd_latency(args) -> int:
    if args.layout:
        _, layout = load_layout(args.layout)
        base = load_layout(args.baseline)[1] if args.baseline else layout
        threshold = float("nan")
        config = {"layout": str(args.layout), "baseline": str(args.baseline) if args.baseline else None}
    else:
        if args.n is None:
            raise UsageError("give --layout or --n with --k/--rate")
        k = _resolve_k(args)
        profile = bec_profile(args.epsilon, args.n)
        base = baseline_layout(profile, k)
        layout, _ = optimize_layout(base, profile, args.threshold)
        threshold = args.threshold
        config = {"n": args.n, "k": k, "epsilon": args.epsilon, "threshold": threshold}
    tree, btree = build_pruned_tree(layout), build_pruned_tree(base)
    if args.tree:
        print(tree.to_text())
    rows = []
    for m in _modes(args.mode):
        rep = total_latency(tree, m, btree)
        rows.append(rep.csv_row(layout.n, layout.k / layout.n, threshold))
        print(f"{m.value}: {rep.total_cycles} cycles (baseline {rep.baseline_cycles}, "
              f"reduction {rep.reduction_percent:.1f}%)")
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        _write_latency_csv(out / "latency.csv", rows, config)
        with open(out / "tree.json", "w") as fh:
            json.dump({"manifest": MANIFEST, **tree.to_json()}, fh, indent=1)
        RunManifest("latency", config, ["latency.csv", "tree.json"]).write(out)
    return 0


def _parse_value(text: str):
    text = text.strip()
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def load_config(path) -> dict:
    """JSON object, or ``key = value`` lines (comma-separated lists, ``#`` comments)."""
    raw = Path(path).read_text()
    if raw.lstrip().startswith("{"):
        doc = json.loads(raw)
        if not isinstance(doc, dict):
            raise ValueError("config must be a JSON object")
        return doc
    doc = {}
    for lineno, line in enumerate(raw.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if "," in value:
            doc[key] = [_parse_value(v) for v in value.split(",") if v.strip()]
        else:
            doc[key] = _parse_value(value)
    return doc


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


_LIST_KEYS = ("thresholds", "ebno_db")


def _sim_config(args) -> SimConfig:
    doc = load_config(args.config) if args.config else {}
    overrides = {
        "n": args.n, "k": args.k, "rate": args.rate, "epsilon_design": args.epsilon,
        "thresholds": args.threshold, "ebno_db": args.ebno, "max_frames": args.max_frames,
        "min_frame_errors": args.min_errors, "master_seed": args.seed,
        "kernel": args.kernel, "decoder": args.decoder,
    }
    for key, value in overrides.items():
        if value is not None:
            doc[key] = value
            if key == "rate":
                doc.pop("k", None)
            if key == "k":
                doc.pop("rate", None)
    for key in _LIST_KEYS:
        if key in doc and not isinstance(doc[key], (list, tuple)):
            doc[key] = [doc[key]]
    if "n" not in doc or ("k" not in doc and "rate" not in doc):
        raise UsageError("config needs n and k (or rate)")
    return SimConfig.from_dict(doc)


def cmd_simulate(args) -> int:
    config = _sim_config(args)
    workers = args.workers or os.cpu_count() or 1
    comp = compare_constructions(config, workers=workers)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_results(comp, out / "results.csv", out / "results.json", MANIFEST)
    _write_latency_csv(out / "latency.csv", latency_rows(config.n, config.k, comp.latency), config.to_json())
    RunManifest(
        "simulate", {**config.to_json(), "workers": workers},
        ["results.csv", "results.json", "latency.csv"],
    ).write(out)
    for row in comp.tradeoff():
        print(f"T_h={row['T_h']:<8g} ebno={row['ebno_db']:<5g} cycles={row['cycles']:<5d} "
              f"red={row['reduction_percent']:5.1f}% ber={row['ber']:.3e} ratio={row['ber_ratio']:.3f}")
    return 0


def _sweep_grid(args) -> list[tuple[int, float, list[float]]]:
    if args.config:
        doc = load_config(args.config)
        ns = doc.get("n", [])
        rates = doc.get("rate", [])
        ths = doc.get("thresholds", [])
        ns = ns if isinstance(ns, list) else [ns]
        rates = rates if isinstance(rates, list) else [rates]
        ths = ths if isinstance(ths, list) else [ths]
        if not ns or not rates:
            raise ValueError("sweep config needs n and rate")
        return [(int(n), float(r), [float(t) for t in ths]) for n in ns for r in rates]
    if args.n is not None or args.rate is not None:
        if args.n is None or args.rate is None:
            raise UsageError("sweep needs both --n and --rate (or neither for the reference grid)")
        return [(args.n, args.rate, args.threshold or [])]
    return [(n, r, [t for t, _, _ in rows]) for (n, r), (_, rows) in LATENCY_TARGETS.items()]


def cmd_sweep(args) -> int:
    """Latency-only sweep over (n, rate, threshold); defaults to the reference grid."""
    modes = _modes(args.mode)
    rows = []
    for n, rate, ths in _sweep_grid(args):
        k = k_for(n, rate)
        profile = bec_profile(args.epsilon, n)
        base = baseline_layout(profile, k)
        btree = build_pruned_tree(base)
        target = LATENCY_TARGETS.get((n, rate)) if args.epsilon == DESIGN_EPSILON else None
        ref = {t: (c, r) for t, c, r in target[1]} if target else {}
        for th in [0.0] + [t for t in ths if t != 0.0]:
            lay = optimize_layout(base, profile, th)[0] if th else base
            tree = build_pruned_tree(lay)
            for m in modes:
                rep = total_latency(tree, m, btree)
                rows.append(rep.csv_row(n, rate, th))
                want = ""
                if target and th == 0.0:
                    want = f"  target {target[0]}"
                elif th in ref:
                    want = f"  target {ref[th][0]} ({ref[th][1]}%)"
                print(f"n={n:<6d} rate={rate:<4g} T_h={th:<8g} {m.value:<19s} "
                      f"{rep.total_cycles:6d} {rep.reduction_percent:5.1f}%{want}")
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    config = {"epsilon": args.epsilon, "modes": [m.value for m in modes],
              "config": str(args.config) if args.config else None}
    _write_latency_csv(out / "latency.csv", rows, config)
    RunManifest("sweep", config, ["latency.csv"]).write(out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ccpolar", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, threshold_list=False):
        sp.add_argument("--n", type=int)
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--k", type=int)
        g.add_argument("--rate", type=float)
        sp.add_argument("--epsilon", type=float, default=None if threshold_list else DESIGN_EPSILON)
        if threshold_list:
            sp.add_argument("--threshold", type=_floats, help="comma-separated list")
        else:
            sp.add_argument("--threshold", type=float, default=0.0)
        sp.add_argument("--out-dir", default=".")

    c = sub.add_parser("construct", help="baseline + optimized layouts and swap log")
    common(c)
    c.set_defaults(func=cmd_construct)

    lat = sub.add_parser("latency", help="modeled decode cycles")
    common(lat)
    lat.add_argument("--layout", help="layout JSON (overrides --n/--k)")
    lat.add_argument("--baseline", help="reference layout JSON for the reduction")
    lat.add_argument("--mode", default=OverheadMode.SUM_OF_LEAVES.value,
                     choices=[m.value for m in OverheadMode] + ["both", "all"])
    lat.add_argument("--tree", action="store_true", help="print the pruned tree")
    lat.set_defaults(func=cmd_latency, out_dir=None)

    s = sub.add_parser("simulate", help="Monte Carlo BER/FER, baseline vs optimized")
    s.add_argument("--config")
    common(s, threshold_list=True)
    s.add_argument("--ebno", type=_floats, help="comma-separated Eb/N0 values in dB")
    s.add_argument("--max-frames", type=int)
    s.add_argument("--min-errors", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--kernel", choices=["min-sum", "exact"])
    s.add_argument("--decoder", choices=["fast", "sc", "rate01"])
    s.add_argument("--workers", type=int, default=0, help="0 = all cores")
    s.set_defaults(func=cmd_simulate)

    w = sub.add_parser("sweep", help="latency sweep; default grid is the reference table")
    w.add_argument("--config")
    common(w, threshold_list=True)
    w.add_argument("--mode", default="all", choices=[m.value for m in OverheadMode] + ["both", "all"])
    w.set_defaults(func=cmd_sweep, epsilon=DESIGN_EPSILON)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (ValueError, KeyError, TypeError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
