"""BEC Bhattacharyya parameters and the baseline frozen/information split.

Bit indices are in natural order: index ``i`` is row ``i`` of ``F^{(x)m}``
(no bit-reversal permutation). The most significant bit of ``i`` selects
the first polarization step.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np


def is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def log2_exact(n: int) -> int:
    if not is_power_of_two(n):
        raise ValueError(f"length must be a power of two, got {n}")
    return n.bit_length() - 1


@dataclass(frozen=True, eq=False)
class ReliabilityProfile:
    """Per-bit erasure probabilities of the synthesized channels."""

    epsilon: float
    z: np.ndarray

    @property
    def n(self) -> int:
        return len(self.z)


@dataclass(frozen=True, eq=False)
class BitLayout:
    """Frozen/information designation, ``info[i]`` is True for an info bit."""

    info: np.ndarray

    def __post_init__(self):
        info = np.asarray(self.info, dtype=bool).copy()
        info.setflags(write=False)
        object.__setattr__(self, "info", info)

    @classmethod
    def from_string(cls, kinds: str) -> "BitLayout":
        bad = set(kinds) - {"F", "I"}
        if bad:
            raise ValueError(f"layout string may only contain F/I, got {sorted(bad)}")
        return cls(np.array([c == "I" for c in kinds], dtype=bool))

    @property
    def n(self) -> int:
        return len(self.info)

    @property
    def k(self) -> int:
        return int(self.info.sum())

    @property
    def kinds(self) -> str:
        return "".join("I" if b else "F" for b in self.info)

    @property
    def info_indices(self) -> np.ndarray:
        return np.flatnonzero(self.info)

    def __eq__(self, other):
        if not isinstance(other, BitLayout):
            return NotImplemented
        return np.array_equal(self.info, other.info)

    def __hash__(self):
        return hash(self.info.tobytes())

    def __repr__(self):
        return f"BitLayout({self.kinds!r})"


def bec_profile(epsilon: float, n: int) -> ReliabilityProfile:
    """Bhattacharyya parameters of all ``n`` bit-channels of a BEC(epsilon).

    >>> bec_profile(0.3, 2).z.round(4).tolist()
    [0.51, 0.09]
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon}")
    m = log2_exact(n)
    z = np.array([float(epsilon)])
    for _ in range(m):
        nxt = np.empty(2 * len(z))
        nxt[0::2] = 2.0 * z - z * z
        nxt[1::2] = z * z
        z = nxt
    z.setflags(write=False)
    return ReliabilityProfile(float(epsilon), z)


def baseline_layout(profile: ReliabilityProfile, k: int) -> BitLayout:
    """Put the ``k`` most reliable channels (smallest z) in the info set.

    Ties on z go to the larger index.
    """
    n = profile.n
    if not 0 <= k <= n:
        raise ValueError(f"k must lie in [0, {n}], got {k}")
    idx = np.arange(n)
    # lexsort: last key is primary
    order = np.lexsort((-idx, profile.z))
    info = np.zeros(n, dtype=bool)
    info[order[:k]] = True
    return BitLayout(info)


def generator_matrix(n: int) -> np.ndarray:
    """Explicit ``F^{(x)m}`` over GF(2) as a uint8 matrix."""
    m = log2_exact(n)
    g = np.ones((1, 1), dtype=np.uint8)
    f = np.array([[1, 0], [1, 1]], dtype=np.uint8)
    for _ in range(m):
        g = np.kron(g, f)
    return g


ORACLE_MAX_N = 16


def _in_span(row: int, basis: dict[int, int]) -> bool:
    while row:
        top = row.bit_length() - 1
        if top not in basis:
            return False
        row ^= basis[top]
    return True


def _insert(row: int, basis: dict[int, int]) -> None:
    while row:
        top = row.bit_length() - 1
        if top not in basis:
            basis[top] = row
            return
        row ^= basis[top]


def bec_exhaustive_oracle(epsilon: float, n: int, bit_index: int) -> float:
    """Erasure probability of bit-channel ``bit_index`` by brute force.

    Enumerates every erasure pattern of the ``n`` channel uses. With
    ``u_0..u_{i-1}`` supplied by a genie, ``u_i`` is erased iff row ``i`` of
    the generator, restricted to the unerased positions, lies in the span
    of rows ``i+1..n-1`` restricted the same way.
    """
    if n > ORACLE_MAX_N:
        raise ValueError(f"oracle enumerates 2^n patterns; n={n} exceeds {ORACLE_MAX_N}")
    log2_exact(n)
    if not 0 <= bit_index < n:
        raise ValueError(f"bit_index out of range: {bit_index}")
    g = generator_matrix(n)
    rows = [int("".join(map(str, r)), 2) for r in g]
    total = 0.0
    for seen in range(1 << n):
        basis: dict[int, int] = {}
        for j in range(bit_index + 1, n):
            _insert(rows[j] & seen, basis)
        if _in_span(rows[bit_index] & seen, basis):
            erased = n - bin(seen).count("1")
            total += epsilon**erased * (1.0 - epsilon) ** (n - erased)
    return total


def to_json(profile: ReliabilityProfile, layout: BitLayout) -> dict:
    if profile.n != layout.n:
        raise ValueError("profile and layout lengths differ")
    return {
        "n": layout.n,
        "epsilon": profile.epsilon,
        "z": [float(v) for v in profile.z],
        "kinds": layout.kinds,
        "k": layout.k,
    }


def from_json(doc: dict) -> tuple[ReliabilityProfile, BitLayout]:
    layout = BitLayout.from_string(doc["kinds"])
    if layout.n != doc["n"] or layout.k != doc["k"]:
        raise ValueError("layout document is inconsistent: n/k do not match kinds")
    z = np.asarray(doc["z"], dtype=float)
    if len(z) != layout.n:
        raise ValueError("layout document is inconsistent: len(z) != n")
    z.setflags(write=False)
    return ReliabilityProfile(float(doc["epsilon"]), z), layout


def dump_layout(path, profile: ReliabilityProfile, layout: BitLayout, **extra) -> None:
    doc = to_json(profile, layout)
    doc.update(extra)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)


def load_layout(path) -> tuple[ReliabilityProfile, BitLayout]:
    with open(path) as fh:
        return from_json(json.load(fh))
