"""Monte Carlo BER/FER engine over BPSK-AWGN.

Every frame draws its info bits and noise from its own generator, seeded
from ``(master_seed, ebno_index, frame_index)``. Frames are processed in
fixed blocks whose boundaries do not depend on the worker count, so the
tallies are identical for any degree of parallelism. The seed does not
depend on the construction, so all thresholds see the same noise.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import Executor, ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from .codec import Kernel, encode, fast_decode, sc_decode
from .construction import optimize_layout
from .reliability import BitLayout, baseline_layout, bec_profile, log2_exact
from .tree import (
    ALL_CONSTITUENTS,
    RATE01_ONLY,
    OverheadMode,
    build_pruned_tree,
    total_latency,
)

BLOCK_FRAMES = 256
DECODERS = ("fast", "sc", "rate01")


@dataclass
class SimConfig:
    n: int
    k: int
    epsilon_design: float = 0.3
    thresholds: tuple = ()
    ebno_db: tuple = (2.0,)
    max_frames: int = 10_000
    min_frame_errors: int = 100  # 0 disables early stopping
    master_seed: int = 0
    kernel: Kernel = Kernel.MIN_SUM
    decoder: str = "fast"

    def __post_init__(self):
        log2_exact(self.n)
        if not 0 < self.k <= self.n:
            raise ValueError(f"k must lie in (0, n], got {self.k}")
        if not 0.0 <= self.epsilon_design <= 1.0:
            raise ValueError("epsilon_design must lie in [0, 1]")
        self.thresholds = tuple(float(t) for t in self.thresholds)
        if any(t < 0 for t in self.thresholds):
            raise ValueError("thresholds must be non-negative")
        self.ebno_db = tuple(float(e) for e in np.atleast_1d(self.ebno_db))
        if not self.ebno_db:
            raise ValueError("ebno_db must not be empty")
        if self.max_frames < 1:
            raise ValueError("max_frames must be >= 1")
        if self.min_frame_errors < 0:
            raise ValueError("min_frame_errors must be >= 0")
        self.kernel = Kernel(self.kernel)
        if self.decoder not in DECODERS:
            raise ValueError(f"decoder must be one of {DECODERS}, got {self.decoder!r}")

    @property
    def rate(self) -> float:
        return self.k / self.n

    def to_json(self) -> dict:
        doc = asdict(self)
        doc["kernel"] = self.kernel.value
        doc["thresholds"] = list(self.thresholds)
        doc["ebno_db"] = list(self.ebno_db)
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "SimConfig":
        doc = dict(doc)
        for alias, name in (("epsilon", "epsilon_design"), ("seed", "master_seed")):
            if alias in doc:
                doc[name] = doc.pop(alias)
        if "rate" in doc:
            rate = float(doc.pop("rate"))
            doc.setdefault("k", int(round(rate * int(doc["n"]))))
        known = set(cls.__dataclass_fields__)
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**doc)


@dataclass
class SimResult:
    ebno_db: float
    frames: int
    bit_errors: int
    frame_errors: int
    k: int
    bit_errors_sq: int = 0  # sum over frames of (bit errors in frame)^2
    seed_provenance: dict = field(default_factory=dict)

    @property
    def ber(self) -> float:
        return self.bit_errors / (self.frames * self.k) if self.frames else 0.0

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames if self.frames else 0.0

    def fer_ci(self, level: float = 0.95) -> tuple[float, float]:
        ci = stats.binomtest(self.frame_errors, self.frames).proportion_ci(level, method="wilson")
        return ci.low, ci.high

    def ber_ci(self, level: float = 0.95) -> tuple[float, float]:
        """Normal interval on the per-frame bit error fraction.

        Bit errors cluster inside failed frames, so frames rather than
        bits are the independent samples.
        """
        n = self.frames
        mean = self.bit_errors / n
        var = max(self.bit_errors_sq / n - mean * mean, 0.0) * n / max(n - 1, 1)
        half = stats.norm.ppf(0.5 + level / 2) * math.sqrt(var / n)
        return max(mean - half, 0.0) / self.k, min(mean + half, self.k) / self.k

    def to_json(self) -> dict:
        return {
            "ebno_db": self.ebno_db,
            "frames": self.frames,
            "bit_errors": self.bit_errors,
            "frame_errors": self.frame_errors,
            "bit_errors_sq": self.bit_errors_sq,
            "ber": self.ber,
            "fer": self.fer,
            "seed_provenance": self.seed_provenance,
        }


def noise_variance(ebno_db: float, rate: float) -> float:
    if rate <= 0:
        raise ValueError(f"rate must be positive, got {rate}")
    return 1.0 / (2.0 * rate * 10.0 ** (ebno_db / 10.0))


def awgn_bpsk_llr(codeword, ebno_db: float, rate: float, rng: np.random.Generator) -> np.ndarray:
    """BPSK (0 -> +1, 1 -> -1) over AWGN; returns channel LLRs ``2y/sigma^2``."""
    sigma2 = noise_variance(ebno_db, rate)
    s = 1.0 - 2.0 * np.asarray(codeword, dtype=float)
    y = s + math.sqrt(sigma2) * rng.standard_normal(s.shape)
    return 2.0 * y / sigma2


def frame_rng(master_seed: int, ebno_index: int, frame: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(ebno_index, frame)))


def _simulate_block(args) -> np.ndarray:
    info, decoder, kernel, ebno_db, seed, ebno_index, start, stop, channel = args
    layout = BitLayout(info)
    n, k = layout.n, layout.k
    rate = k / n
    frames = stop - start
    bits = np.empty((frames, k), dtype=np.uint8)
    llr = np.empty((frames, n))
    for j in range(frames):
        rng = frame_rng(seed, ebno_index, start + j)
        bits[j] = rng.integers(0, 2, k, dtype=np.uint8)
        llr[j] = channel(encode(layout, bits[j]), ebno_db, rate, rng)
    if decoder == "sc":
        est, _ = sc_decode(llr, layout, kernel)
    else:
        allowed = RATE01_ONLY if decoder == "rate01" else ALL_CONSTITUENTS
        est, _ = fast_decode(llr, build_pruned_tree(layout, allowed), kernel)
    return np.count_nonzero(est != bits, axis=1)


def run_point(
    config: SimConfig,
    layout: BitLayout,
    ebno_db: float,
    ebno_index: int = 0,
    workers: int = 1,
    channel=awgn_bpsk_llr,
    executor: Executor | None = None,
) -> SimResult:
    """Simulate frames at one Eb/N0 until ``max_frames`` or ``min_frame_errors``.

    The run stops at the exact frame where the error target is met, so the
    result is independent of block scheduling.
    """
    if layout.n != config.n or layout.k != config.k:
        raise ValueError("layout does not match config (n, k)")
    own_pool = None
    if executor is None and workers > 1:
        executor = own_pool = ProcessPoolExecutor(workers)
    try:
        per_frame: list[np.ndarray] = []
        done = 0
        errors = 0
        next_start = 0
        wave = max(workers, 1)
        while done < config.max_frames:
            tasks = []
            for _ in range(wave):
                if next_start >= config.max_frames:
                    break
                stop = min(next_start + BLOCK_FRAMES, config.max_frames)
                tasks.append((layout.info, config.decoder, config.kernel, ebno_db,
                              config.master_seed, ebno_index, next_start, stop, channel))
                next_start = stop
            mapped = executor.map(_simulate_block, tasks) if executor else map(_simulate_block, tasks)
            stop_now = False
            for errs in mapped:
                if stop_now:
                    continue
                if config.min_frame_errors:
                    cum = errors + np.cumsum(errs > 0)
                    hit = np.flatnonzero(cum >= config.min_frame_errors)
                    if len(hit):
                        errs = errs[: hit[0] + 1]
                        stop_now = True
                per_frame.append(errs)
                done += len(errs)
                errors += int(np.count_nonzero(errs))
            if stop_now:
                break
    finally:
        if own_pool is not None:
            own_pool.shutdown()
    errs = np.concatenate(per_frame) if per_frame else np.zeros(0, dtype=np.int64)
    return SimResult(
        ebno_db=float(ebno_db),
        frames=int(len(errs)),
        bit_errors=int(errs.sum()),
        frame_errors=int(np.count_nonzero(errs)),
        k=config.k,
        bit_errors_sq=int((errs.astype(np.int64) ** 2).sum()),
        seed_provenance={
            "master_seed": config.master_seed,
            "ebno_index": ebno_index,
            "frame_seed": "SeedSequence(master_seed, spawn_key=(ebno_index, frame))",
        },
    )


@dataclass
class Comparison:
    config: SimConfig
    layouts: dict  # threshold -> BitLayout
    swaps: dict  # threshold -> list[SwapRecord]
    results: dict  # threshold -> list[SimResult]
    latency: dict  # threshold -> {OverheadMode: LatencyReport}

    def rows(self) -> list[dict]:
        """One row per (threshold, Eb/N0): results CSV columns."""
        out = []
        for th, res in self.results.items():
            for r in res:
                out.append({
                    "n": self.config.n, "rate": self.config.rate, "T_h": th,
                    "ebno_db": r.ebno_db, "frames": r.frames, "bit_errors": r.bit_errors,
                    "frame_errors": r.frame_errors, "ber": r.ber, "fer": r.fer,
                })
        return out

    def tradeoff(self, mode: OverheadMode = OverheadMode.ONE_PER_MIXED) -> list[dict]:
        """Latency reduction next to the BER ratio against the baseline."""
        base = self.results[0.0]
        out = []
        for th, res in self.results.items():
            rep = self.latency[th][mode]
            for b, r in zip(base, res):
                out.append({
                    "T_h": th, "ebno_db": r.ebno_db, "cycles": rep.total_cycles,
                    "reduction_percent": rep.reduction_percent,
                    "ber": r.ber, "ber_ratio": r.ber / b.ber if b.ber else float("nan"),
                })
        return out


def build_layouts(config: SimConfig):
    profile = bec_profile(config.epsilon_design, config.n)
    base = baseline_layout(profile, config.k)
    layouts, swaps = {0.0: base}, {0.0: []}
    for th in config.thresholds:
        if th == 0.0:
            continue
        layouts[th], swaps[th] = optimize_layout(base, profile, th)
    return profile, layouts, swaps


def latency_reports(layouts: dict) -> dict:
    base_tree = build_pruned_tree(layouts[0.0])
    out = {}
    for th, lay in layouts.items():
        tree = build_pruned_tree(lay)
        out[th] = {m: total_latency(tree, m, base_tree) for m in OverheadMode}
    return out


def compare_constructions(config: SimConfig, workers: int = 1, channel=awgn_bpsk_llr) -> Comparison:
    """Baseline (threshold 0) plus every listed threshold: layouts, latency, BER/FER."""
    _, layouts, swaps = build_layouts(config)
    latency = latency_reports(layouts)
    results: dict = {}
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        for th, lay in layouts.items():
            results[th] = [
                run_point(config, lay, e, i, workers, channel, pool)
                for i, e in enumerate(config.ebno_db)
            ]
    finally:
        if pool is not None:
            pool.shutdown()
    return Comparison(config, layouts, swaps, results, latency)


RESULT_CSV_COLUMNS = ["n", "rate", "T_h", "ebno_db", "frames", "bit_errors", "frame_errors", "ber", "fer"]


def write_results(comparison: Comparison, csv_path, json_path, manifest_name: str = "manifest.json") -> None:
    """CSV and JSON outputs; both echo the config and name their manifest."""
    cfg = comparison.config.to_json()
    with open(csv_path, "w", newline="") as fh:
        fh.write(f"# manifest: {manifest_name}\n")
        fh.write(f"# config: {json.dumps(cfg, sort_keys=True)}\n")
        w = csv.DictWriter(fh, fieldnames=RESULT_CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        w.writerows(comparison.rows())
    doc = {
        "manifest": manifest_name,
        "config": cfg,
        "constructions": [
            {
                "T_h": th,
                "kinds": comparison.layouts[th].kinds,
                "swaps": [s.to_json() for s in comparison.swaps[th]],
                "latency": {m.value: rep.to_json() for m, rep in comparison.latency[th].items()},
                "points": [r.to_json() for r in comparison.results[th]],
            }
            for th in comparison.results
        ],
    }
    with open(json_path, "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)


def latency_rows(n: int, k: int, reports: dict, modes=tuple(OverheadMode)) -> list[dict]:
    rows = []
    for th, by_mode in reports.items():
        for m in modes:
            rows.append(by_mode[m].csv_row(n, k / n, th))
    return rows

