"""Exact sumset engines, progression finders and extremal constructions for
experiments on long arithmetic progressions in sumsets."""
from .core import IntSet, ResidueSet, SeqPrefix, sumset
from .errors import CapExceeded, PreconditionError
from .gap import Gap, parse_gap, format_gap
from .structure import ApRun, longest_ap, find_proper_gap
from .sumsets import SumCap, iterated_sumset, distinct_sumset, star_sum, subset_sums

__version__ = "0.1.0"

__all__ = [
    "IntSet", "ResidueSet", "SeqPrefix", "sumset", "CapExceeded", "PreconditionError",
    "Gap", "parse_gap", "format_gap", "ApRun", "longest_ap", "find_proper_gap",
    "SumCap", "iterated_sumset", "distinct_sumset", "star_sum", "subset_sums",
]
