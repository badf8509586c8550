"""Constituent-code oriented polar code construction, decoding and latency modeling."""

__version__ = "0.1.0"

from .codec import Kernel, encode, fast_decode, polar_transform, sc_decode
from .construction import SubcodeType, classify_subcodes, optimize_layout
from .reliability import BitLayout, ReliabilityProfile, baseline_layout, bec_profile
from .tree import NodeClass, OverheadMode, build_pruned_tree, total_latency
