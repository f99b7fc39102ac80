"""Structure-invariant contrastive training and isomorphism-aware decoding for SMILES models."""

__version__ = "0.1.0"
