"""Constituent-code oriented construction: swap lone info/frozen bits.

A layout is cut top-down into maximal sub-codewords of four kinds:

* TYPE_I   all frozen
* TYPE_II  all info
* TYPE_III exactly one info bit
* TYPE_IV  exactly one frozen bit

Exchanging the lone info bit of a type-III span with the lone frozen bit
of a later type-IV span turns both into uniform (N0/N1) nodes. The swap is
only taken when the two channels have Bhattacharyya parameters closer than
a threshold, which keeps the error-rate penalty small.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .reliability import BitLayout, ReliabilityProfile, log2_exact


class SubcodeType(enum.Enum):
    TYPE_I = "I"
    TYPE_II = "II"
    TYPE_III = "III"
    TYPE_IV = "IV"


@dataclass(frozen=True)
class SubcodeEntry:
    node_id: int  # heap index in the full binary decode tree, root = 0
    start: int
    size: int
    ctype: SubcodeType
    special_index: int | None = None

    @property
    def stage(self) -> int:
        return self.size.bit_length() - 1


@dataclass(frozen=True)
class SwapRecord:
    info_index: int
    frozen_index: int
    delta: float

    def to_json(self) -> dict:
        return {"i": self.info_index, "f": self.frozen_index, "delta": self.delta}


def _classify(info: np.ndarray) -> list[SubcodeEntry]:
    n = len(info)
    log2_exact(n)
    csum = np.concatenate(([0], np.cumsum(info, dtype=np.int64)))
    out: list[SubcodeEntry] = []

    def visit(node_id: int, start: int, size: int) -> None:
        ones = int(csum[start + size] - csum[start])
        if ones == 0:
            out.append(SubcodeEntry(node_id, start, size, SubcodeType.TYPE_I))
        elif ones == size:
            out.append(SubcodeEntry(node_id, start, size, SubcodeType.TYPE_II))
        elif ones == 1:
            lone = start + int(np.argmax(info[start:start + size]))
            out.append(SubcodeEntry(node_id, start, size, SubcodeType.TYPE_III, lone))
        elif ones == size - 1:
            lone = start + int(np.argmin(info[start:start + size]))
            out.append(SubcodeEntry(node_id, start, size, SubcodeType.TYPE_IV, lone))
        else:
            half = size // 2
            visit(2 * node_id + 1, start, half)
            visit(2 * node_id + 2, start + half, half)

    visit(0, 0, n)
    return out


def classify_subcodes(layout: BitLayout) -> list[SubcodeEntry]:
    """Maximal type I-IV spans of ``layout`` in left-to-right order."""
    return _classify(layout.info)


_PARTNER = {SubcodeType.TYPE_III: SubcodeType.TYPE_IV, SubcodeType.TYPE_IV: SubcodeType.TYPE_III}


def optimize_layout(
    layout: BitLayout, profile: ReliabilityProfile, threshold: float
) -> tuple[BitLayout, list[SwapRecord]]:
    """Single forward pass of the III/IV swap search.

    For each type-III (type-IV) entry, the later type-IV (type-III) entries
    are searched for the lone bit whose z is closest to the entry's own lone
    bit (ties to the smaller index). If that gap is strictly below
    ``threshold`` the two bits trade roles, the table is rebuilt, and the
    scan moves on to the next position of the rebuilt table.
    """
    if profile.n != layout.n:
        raise ValueError(f"profile has {profile.n} bits, layout has {layout.n}")
    if threshold < 0:
        raise ValueError(f"threshold must be non-negative, got {threshold}")
    z = profile.z
    info = layout.info.copy()
    table = _classify(info)
    swaps: list[SwapRecord] = []
    pos = 0
    while pos < len(table):
        entry = table[pos]
        partner = _PARTNER.get(entry.ctype)
        if partner is not None:
            cands = np.array(
                [e.special_index for e in table[pos + 1:] if e.ctype is partner], dtype=np.int64
            )
            if len(cands):
                own = entry.special_index
                gaps = np.abs(z[own] - z[cands])
                # argmin returns the first minimum; candidates are in increasing index order
                best = int(np.argmin(gaps))
                if gaps[best] < threshold:
                    other = int(cands[best])
                    if entry.ctype is SubcodeType.TYPE_III:
                        i, f = own, other
                    else:
                        i, f = other, own
                    info[i], info[f] = False, True
                    swaps.append(SwapRecord(i, f, float(gaps[best])))
                    table = _classify(info)
        pos += 1
    return BitLayout(info), swaps
