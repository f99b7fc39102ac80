import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sigmakit.corpus import drug_like_corpus
from sigmakit.smiles import ParseStatus, canonical_key, mol_from_smiles, parse_smiles
from sigmakit.views import (
    MiningConfig,
    PairCheck,
    PartitionError,
    ProbeError,
    ViewError,
    ViewPair,
    check_pair,
    cuttable_bonds,
    make_views,
    mine_dataset,
    partition,
    probe_complete,
    probe_suffix,
    read_pairs,
    sample_negatives,
    strip_probe,
    verify_pair,
    write_dataset,
)

ASPIRIN = "CC(=O)Oc1ccccc1C(=O)O"
CORPUS = drug_like_corpus(60, seed=11)


def test_cuttable_bonds_excludes_ring_bonds():
    g = mol_from_smiles("CCc1ccccc1")
    assert len(cuttable_bonds(g)) == 1
    assert cuttable_bonds(mol_from_smiles("Cc1ccccc1")) == []
    assert cuttable_bonds(mol_from_smiles("c1ccccc1")) == []


def test_partition_reattach_restores_parent():
    g = mol_from_smiles(ASPIRIN)
    for bond in cuttable_bonds(g):
        part = partition(g, bond)
        assert canonical_key(part.reattach()) == canonical_key(g)
        assert part.prefix_graph.num_heavy <= part.suffix_graph.num_heavy


def test_partition_rejects_ring_bond():
    g = mol_from_smiles("CCc1ccccc1")
    ring = next(i for i in range(len(g.bonds)) if i not in cuttable_bonds(g))
    with pytest.raises(PartitionError):
        partition(g, ring)


def test_make_views_aspirin(rng):
    pair = make_views(mol_from_smiles(ASPIRIN), rng)
    assert pair.prefix_u != pair.prefix_v
    assert verify_pair(pair)
    assert parse_smiles(pair.prefix_u).status is not ParseStatus.IRRECOVERABLE


def test_make_views_error_codes(rng):
    with pytest.raises(ViewError) as info:
        make_views(mol_from_smiles("c1ccccc1"), rng)
    assert info.value.code == "no-cuttable-bond"
    with pytest.raises(ViewError) as info:
        make_views(mol_from_smiles("CCCC"), rng, retries=0)
    assert info.value.code == "exhausted-retries"


@settings(max_examples=40, deadline=None)
@given(st.integers(0, len(CORPUS) - 1), st.integers(0, 2**31))
def test_pairs_satisfy_dual_consistency(index, seed):
    rng = np.random.default_rng(seed)
    try:
        pair = make_views(mol_from_smiles(CORPUS[index]), rng)
    except ViewError as err:
        assert err.code != "verification-failed"
        return
    assert check_pair(pair) is PairCheck.OK
    for prefix, probe in ((pair.prefix_u, pair.probe), (pair.prefix_v, pair.probe_v)):
        if probe is not None:
            assert parse_smiles(prefix + probe).complete


def test_check_pair_reason_codes():
    key = canonical_key(mol_from_smiles("CCO"))
    assert check_pair(ViewPair("C", "C", "CO", key)) is PairCheck.SAME_PREFIX
    assert check_pair(ViewPair("C(", "C", "CO", key)) is PairCheck.INCOMPLETE_U
    assert check_pair(ViewPair("N", "C", "CO", key)) is PairCheck.KEY_MISMATCH_U
    assert check_pair(ViewPair("C", "O", "CC", key)) is PairCheck.KEY_MISMATCH_U


@pytest.mark.parametrize("prefix", ["CC(=O)c1cc", "C1CC(", "CC=", "c1ccc2c", "CC(C", "CC(=O)", "C(C(C"])
def test_probe_completes(prefix):
    probe = probe_suffix(prefix)
    assert parse_smiles(prefix + probe).complete
    assert strip_probe(probe_complete(prefix), probe) == prefix


def test_probe_of_complete_text_is_empty():
    assert probe_suffix("CCO") == ""


def test_probe_rejects_irrecoverable():
    with pytest.raises(ProbeError):
        probe_suffix("C)")


def test_strip_probe_requires_suffix():
    with pytest.raises(ProbeError):
        strip_probe("CCO", "N")


def test_negatives_are_compatible_and_different():
    rng = np.random.default_rng(0)
    batch = []
    for s in CORPUS[:12]:
        try:
            batch.append(make_views(mol_from_smiles(s), rng))
        except ViewError:
            pass
    for i, anchor in enumerate(batch):
        neg = sample_negatives(batch, i, 7)
        assert len(neg.prefixes) == len(neg.mask) == 7
        for p in neg.usable:
            r = parse_smiles(p + anchor.suffix)
            assert r.complete and canonical_key(r.graph) != anchor.parent_key


def test_mining_manifest(tmp_path):
    corpus = tmp_path / "c.smi"
    corpus.write_text("\n".join(CORPUS[:30] + ["C)C", "CC@C"]) + "\n")
    result = mine_dataset(corpus, MiningConfig(epochs=2), np.random.default_rng(0))
    m = result.manifest
    assert m["counts"]["malformed"] == 2
    assert m["counts"]["pairs"] == len(result.pairs)
    assert m["counts"]["attempts"] == 2 * 30
    assert len(m["input"]["sha256"]) == 64
    assert all(verify_pair(p) for p in result.pairs)
    pairs_path, manifest_path = write_dataset(tmp_path / "out", result)
    assert read_pairs(pairs_path) == result.pairs
    assert json.loads(manifest_path.read_text())["counts"] == m["counts"]


def test_mining_is_seeded(tmp_path):
    corpus = tmp_path / "c.smi"
    corpus.write_text("\n".join(CORPUS[:20]) + "\n")
    a = mine_dataset(corpus, MiningConfig(), np.random.default_rng(5)).pairs
    b = mine_dataset(corpus, MiningConfig(), np.random.default_rng(5)).pairs
    assert a == b
