"""Polar encoder, successive-cancellation decoder and pruned (fast) decoder.

All decoders accept a single frame of shape ``(n,)`` or a batch of shape
``(B, n)``; every frame in a batch is decoded independently with
elementwise arithmetic, so a frame's result does not depend on the batch.

LLR convention: positive means 0 is more likely; an LLR of exactly zero
decides 0.
"""

from __future__ import annotations

import enum

import numpy as np

from .reliability import BitLayout, log2_exact
from .tree import NodeClass, PrunedTree

# channel LLRs are clipped here so that g never sees inf - inf
LLR_MAX = 1e12


class Kernel(enum.Enum):
    MIN_SUM = "min-sum"
    EXACT = "exact"


def polar_transform(u: np.ndarray) -> np.ndarray:
    """``u F^{(x)m}`` over GF(2) along the last axis via the butterfly.

    The transform is its own inverse.
    """
    x = np.array(u, dtype=np.uint8, copy=True)
    n = x.shape[-1]
    log2_exact(n)
    lead = x.shape[:-1]
    h = 1
    while h < n:
        v = x.reshape(*lead, n // (2 * h), 2, h)
        v[..., 0, :] ^= v[..., 1, :]
        h *= 2
    return x


def encode(layout: BitLayout, info_bits) -> np.ndarray:
    """Codeword(s) for ``info_bits`` (shape ``(k,)`` or ``(B, k)``); frozen bits are 0."""
    info_bits = np.asarray(info_bits, dtype=np.uint8)
    if info_bits.shape[-1] != layout.k:
        raise ValueError(f"expected {layout.k} info bits, got {info_bits.shape[-1]}")
    u = np.zeros(info_bits.shape[:-1] + (layout.n,), dtype=np.uint8)
    u[..., layout.info] = info_bits
    return polar_transform(u)


def f_minsum(a, b):
    return np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))


def f_exact(a, b):
    """``2 atanh(tanh(a/2) tanh(b/2))`` in a form that does not saturate."""
    return (
        f_minsum(a, b)
        + np.log1p(np.exp(-np.abs(a + b)))
        - np.log1p(np.exp(-np.abs(a - b)))
    )


def g_op(a, b, s):
    return b + (1 - 2 * np.asarray(s, dtype=np.int8)) * a


def f_op(a, b, kernel: Kernel = Kernel.MIN_SUM):
    return f_exact(a, b) if Kernel(kernel) is Kernel.EXACT else f_minsum(a, b)


def hard(llr) -> np.ndarray:
    return (np.asarray(llr) < 0).astype(np.uint8)


def _prepare(channel_llrs, n: int) -> tuple[np.ndarray, bool]:
    llr = np.asarray(channel_llrs, dtype=float)
    if llr.shape[-1] != n:
        raise ValueError(f"expected {n} LLRs per frame, got {llr.shape[-1]}")
    single = llr.ndim == 1
    llr = np.clip(np.atleast_2d(llr), -LLR_MAX, LLR_MAX)
    return llr, single


def sc_decode(channel_llrs, layout: BitLayout, kernel: Kernel = Kernel.MIN_SUM):
    """Conventional SC decoding down to every single bit.

    Returns ``(info_estimate, codeword_estimate)``.
    """
    f = f_exact if Kernel(kernel) is Kernel.EXACT else f_minsum
    llr, single = _prepare(channel_llrs, layout.n)
    info = layout.info
    u = np.zeros(llr.shape, dtype=np.uint8)

    def rec(alpha: np.ndarray, start: int) -> np.ndarray:
        size = alpha.shape[-1]
        if size == 1:
            bit = hard(alpha) if info[start] else np.zeros(alpha.shape, dtype=np.uint8)
            u[:, start:start + 1] = bit
            return bit
        h = size // 2
        a, b = alpha[:, :h], alpha[:, h:]
        left = rec(f(a, b), start)
        right = rec(g_op(a, b, left), start + h)
        return np.concatenate((left ^ right, right), axis=1)

    x = rec(llr, 0)
    u_info = u[:, info]
    if single:
        return u_info[0], x[0]
    return u_info, x


def decode_rep(alpha: np.ndarray) -> np.ndarray:
    bit = hard(alpha.sum(axis=-1, keepdims=True))
    return np.broadcast_to(bit, alpha.shape).copy()


def decode_spc(alpha: np.ndarray) -> np.ndarray:
    """Wagner rule: hard decisions, then flip the least reliable bit if parity fails."""
    beta = hard(alpha)
    odd = np.bitwise_xor.reduce(beta, axis=-1).astype(bool)
    weakest = np.argmin(np.abs(alpha), axis=-1)
    rows = np.flatnonzero(odd)
    beta[rows, weakest[rows]] ^= 1
    return beta


def fast_decode(channel_llrs, tree: PrunedTree, kernel: Kernel = Kernel.MIN_SUM):
    """SC decoding that stops at the pruned leaves of ``tree``.

    Leaves return their partial sums in one shot (N0 zeros, N1 hard
    decisions, REP sign of the sum, SPC Wagner). The u-domain bits of a
    leaf are recovered by transforming its partial sums back.
    """
    f = f_exact if Kernel(kernel) is Kernel.EXACT else f_minsum
    llr, single = _prepare(channel_llrs, tree.n)
    u = np.zeros(llr.shape, dtype=np.uint8)
    nodes = tree.nodes

    def rec(alpha: np.ndarray, idx: int) -> np.ndarray:
        nd = nodes[idx]
        cls = nd.cls
        if cls is NodeClass.MIXED:
            h = nd.size // 2
            a, b = alpha[:, :h], alpha[:, h:]
            left = rec(f(a, b), nd.children[0])
            right = rec(g_op(a, b, left), nd.children[1])
            return np.concatenate((left ^ right, right), axis=1)
        if cls is NodeClass.N0:
            return np.zeros(alpha.shape, dtype=np.uint8)
        if cls is NodeClass.N1:
            beta = hard(alpha)
        elif cls is NodeClass.REP:
            beta = decode_rep(alpha)
        else:
            beta = decode_spc(alpha)
        u[:, nd.start:nd.start + nd.size] = polar_transform(beta)
        return beta

    x = rec(llr, 0)
    u_info = u[:, tree.layout.info]
    if single:
        return u_info[0], x[0]
    return u_info, x
