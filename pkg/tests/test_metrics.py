import csv
import itertools

import numpy as np
import pytest
from numpy.testing import assert_allclose

from sigmakit.corpus import drug_like_corpus
from sigmakit.decode import ngram_fit
from sigmakit.metrics.diversity import CURVE_HEADER
from sigmakit.metrics import (

    EmptySetWarning,
    GenSet,
    diversity_curve,
    export_embeddings,
    fcd,
    heatmap,
    intdiv,
    novelty,
    scaffold_count,
    tis,
    train_keys,
    uniqueness,
    validity,
    write_curve,
)
from sigmakit.model import SigmaModel, Vocab
from sigmakit.model.vocab import BOS_ID, EOS_ID
from sigmakit.smiles import mol_from_smiles
from sigmakit.smiles.fingerprint import circular_fingerprint

FIXTURE = GenSet.of(["CCO", "CCO", "CCN", "C1CC"])
FIVE = ["CCO", "c1ccccc1", "CC(=O)c1ccccc1", "CCN", "c1ccncc1"]


def random_model(seed=0, texts=()):
    return SigmaModel.create(Vocab.build(texts), np.random.default_rng(seed), d_model=64, n_layers=2, n_heads=2, d_proj=16, max_len=128)


def test_validity_uniqueness_novelty_fixture():
    assert_allclose(validity(FIXTURE), 3 / 4, rtol=0, atol=1e-12)
    assert_allclose(uniqueness(FIXTURE), 2 / 3, rtol=0, atol=1e-12)
    assert_allclose(novelty(FIXTURE, train_keys(["CCO"])), 1 / 3, rtol=0, atol=1e-12)
    assert_allclose(novelty(FIXTURE, train_keys(["OCC"]), unique=True), 1 / 2, rtol=0, atol=1e-12)
    assert novelty(GenSet.of(["CCCl"]), train_keys(["CCO"])) == 1.0


def test_empty_set_warns():
    with pytest.warns(EmptySetWarning):
        assert validity(GenSet.of([])) == 0.0
    with pytest.warns(EmptySetWarning):
        assert uniqueness(GenSet.of(["C1CC"])) == 0.0


def test_intdiv_fixtures():
    assert intdiv(GenSet.of(["CCO"])) == 0.0
    assert intdiv(GenSet.of(["CCO", "OCC"])) == 0.0
    with pytest.raises(ValueError):
        intdiv(GenSet.of(["C1CC"]))


def test_intdiv_five_molecules_against_direct_loop():
    fps = [circular_fingerprint(mol_from_smiles(s)) for s in FIVE]
    bits = [set(f.on_bits()) for f in fps]
    sim = [[len(a & b) / len(a | b) if a | b else 1.0 for b in bits] for a in bits]
    expected = 1.0 - sum(map(sum, sim)) / 25
    got = intdiv(GenSet.of(FIVE))
    assert_allclose(got, expected, rtol=0, atol=1e-12)
    assert_allclose(got, 0.7245230769230769, rtol=0, atol=1e-12)
    off = 1.0 - sum(sim[i][j] for i, j in itertools.permutations(range(5), 2)) / 20
    assert_allclose(intdiv(GenSet.of(FIVE), off_diagonal=True), off, rtol=0, atol=1e-12)


def test_scaffold_count_fixtures():
    assert scaffold_count(GenSet.of(["CC(=O)c1ccccc1", "c1ccccc1"])) == 1
    assert scaffold_count(GenSet.of(["CCO", "CCN", "CCCC"])) == 1
    assert scaffold_count(GenSet.of(FIVE)) == 3


def test_genset_is_derived_from_raw():
    g = GenSet.of(FIVE)
    again = GenSet.of(list(g.raw))
    assert g.keys == again.keys and g.scaffold_keys == again.scaffold_keys


def test_fcd_is_explicitly_unavailable():
    with pytest.raises(NotImplementedError):
        fcd(FIVE, FIVE)


def test_tis_identical_pairs_is_zero():
    m = random_model()
    assert tis(m, [(s, s) for s in FIVE]) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(ValueError):
        tis(m, [])


def test_tis_random_init_fixture():
    corpus = drug_like_corpus(40, seed=3)
    m = random_model(0, corpus)
    value = tis(m, list(zip(corpus[:20], corpus[20:])))
    assert 0.0 <= value <= 2.0
    assert abs(value - 0.645) <= 0.3


def test_heatmap_shape_and_diagonal(tmp_path):
    m = random_model()
    aspirin = "CC(=O)Oc1ccccc1C(=O)O"
    h = heatmap(m, aspirin, aspirin)
    assert h.cells.shape == (21, 21)
    assert_allclose(np.diag(h.cells), 1.0, atol=1e-6)
    assert np.all(np.abs(h.cells) <= 1.0)
    h.to_csv(tmp_path / "h.csv")
    rows = list(csv.reader(open(tmp_path / "h.csv")))
    assert len(rows) == 22 and rows[0][1:] == h.cols
    pair = heatmap(m, "CC(=O)c1ccccc1", "O=C(C)c1ccccc1")
    assert pair.block_mean(4, 5) == pytest.approx(pair.cells[:4, :5].mean())


def test_export_embeddings(tmp_path):
    m = random_model()
    emb = export_embeddings(m, FIVE, tmp_path / "e.csv")
    assert emb.shape == (5, 64)
    assert_allclose(np.linalg.norm(emb, axis=1), 1.0)


def test_diversity_curve_small(tmp_path):
    sc = ngram_fit(drug_like_corpus(200, seed=2))
    rows = diversity_curve(sc, [5, 10], 48)
    assert [r.K for r in rows] == [5, 10]
    assert all(r.valid_count_std <= r.K and r.valid_count_iso <= r.K for r in rows)
    assert rows[0].scaf_iso <= rows[1].scaf_iso
    write_curve(tmp_path / "c.csv", rows)
    assert tuple(next(csv.reader(open(tmp_path / "c.csv")))) == CURVE_HEADER
    with pytest.raises(ValueError):
        diversity_curve(sc, [10, 5], 48)


class TrieScorer:
    """Uniform over continuations that stay inside a fixed set of strings."""

    def __init__(self, strings):
        self.vocab = Vocab.build(strings)
        self.seqs = [(BOS_ID, *self.vocab.encode(s), EOS_ID) for s in strings]

    def logprobs(self, prefixes):
        rows = np.full((len(prefixes), len(self.vocab)), -np.inf)
        for r, p in enumerate(prefixes):
            nxt = {q[len(p)] for q in self.seqs if len(q) > len(p) and q[:len(p)] == tuple(p)}
            nxt = nxt or {EOS_ID}
            rows[r, sorted(nxt)] = -np.log(len(nxt))
        return rows


def test_curve_support_bound():
    # four strings, three molecules, two ring scaffolds plus the acyclic bucket
    sc = TrieScorer(["CCO", "OCC", "c1ccccc1", "CC(=O)c1ccncc1"])
    rows = diversity_curve(sc, [2, 8, 32], 30)
    for r in rows:
        assert r.scaf_std <= 3 and r.scaf_iso <= 3
        assert r.valid_count_iso <= 3
    assert rows[-1].valid_count_std == 4 and rows[-1].scaf_iso == 3
