"""Capacity-achieving shaping for binary channels with unequal symbol durations."""

from .capacity import CapacityResult, solve_capacity
from .channel import BinaryChannel, bsc
from .ghc import MatcherCode, build_matcher_code, ghc, ghc_matcher, joint_pmf
from .ldpc import LdpcCode, decode_bp, encode, parse_alist, regular_code
from .matcher import dematch, match
from .report import TransmissionReport

__all__ = [
    "BinaryChannel",
    "CapacityResult",
    "LdpcCode",
    "MatcherCode",
    "TransmissionReport",
    "bsc",
    "build_matcher_code",
    "decode_bp",
    "dematch",
    "encode",
    "ghc",
    "ghc_matcher",
    "joint_pmf",
    "match",
    "parse_alist",
    "regular_code",
    "solve_capacity",
]
