"""Functionally equivalent view pairs, probes and structural negatives."""

from sigmakit.views.mining import MiningConfig, MiningResult, mine_dataset, read_pairs, write_dataset, write_pairs
from sigmakit.views.pairs import (
    NegativeSet,
    PairCheck,
    ViewError,
    ViewPair,
    check_pair,
    make_views,
    sample_negatives,
    verify_pair,
)
from sigmakit.views.partition import PartitionedMol, PartitionError, cuttable_bonds, partition
from sigmakit.views.probe import ProbeError, probe_complete, probe_suffix, strip_probe

__all__ = [
    "MiningConfig",
    "MiningResult",
    "NegativeSet",
    "PairCheck",
    "PartitionError",
    "PartitionedMol",
    "ProbeError",
    "ViewError",
    "ViewPair",
    "check_pair",
    "cuttable_bonds",
    "make_views",
    "mine_dataset",
    "partition",
    "probe_complete",
    "probe_suffix",
    "read_pairs",
    "sample_negatives",
    "strip_probe",
    "verify_pair",
    "write_dataset",
    "write_pairs",
]
