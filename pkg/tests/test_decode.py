import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from sigmakit.corpus import drug_like_corpus
from sigmakit.decode import (
    BeamEntry,
    ModelScorer,
    NGramScorer,
    ScorerFailure,
    Status,
    isobeam_search,
    iso_filter,
    ngram_fit,
    ngram_score,
    standard_beam_search,
    step_expand,
)
from sigmakit.decode.beam import Beam, complete_keys, entry_text
from sigmakit.model import SigmaModel, Vocab
from sigmakit.model.vocab import BOS_ID, EOS_ID, PAD_ID
from sigmakit.smiles import canonical_key, mol_from_smiles, parse_smiles

CORPUS = drug_like_corpus(300, seed=9)


@pytest.fixture(scope="module")
def ngram():
    return ngram_fit(CORPUS)


def entry(vocab, text, logp, finished=False):
    ids = (BOS_ID, *vocab.encode(text)) + ((EOS_ID,) if finished else ())
    return BeamEntry(ids, logp, Status.FINISHED if finished else Status.INCOMPLETE)


# n-gram scorer


def test_ngram_rows_normalize(ngram):
    rows = ngram.logprobs([[BOS_ID], [BOS_ID, *ngram.vocab.encode("CC(=O)")], [BOS_ID] + [5] * 20])
    assert_allclose(np.logaddexp.reduce(rows, axis=1), 0.0, atol=1e-9)
    assert np.all(rows[:, [PAD_ID, BOS_ID]] == -np.inf)


def test_ngram_modal_continuation():
    sc = ngram_fit(["CC"], n=2)
    row = ngram_score(sc, "C")
    c = sc.vocab.id_of("C")
    assert row.argmax() == c
    assert row[c] > row[EOS_ID] > row[sc.vocab.id_of("N")]
    assert np.argmax(ngram_score(sc, "")) == c


def test_ngram_fit_is_deterministic():
    a, b = ngram_fit(CORPUS[:50]), ngram_fit(CORPUS[:50])
    assert a.counts == b.counts


def test_ngram_errors():
    with pytest.raises(ValueError):
        ngram_fit([])
    with pytest.raises(ValueError):
        ngram_fit(["CC"], weights=[0.5, 0.6], n=2)


def test_model_scorer_masks_specials():
    m = SigmaModel.create(Vocab.build(), np.random.default_rng(0), d_model=16, n_layers=1, n_heads=2, d_proj=8, max_len=16)
    rows = ModelScorer(m).logprobs([[BOS_ID], [BOS_ID, 5]])
    assert np.all(rows[:, [PAD_ID, BOS_ID]] == -np.inf)
    assert_allclose(np.logaddexp.reduce(rows, axis=1), 0.0, atol=1e-9)


# single steps


def test_iso_filter_acetophenone_example(ngram):
    v = ngram.vocab
    cands = [
        entry(v, "CC(=O)c1ccccc1", -1.0),
        entry(v, "O=C(C)c1ccccc1", -1.2),
        entry(v, "CC(=O)c1ccncc1", -1.5),
    ]
    beam, stats = iso_filter(cands, 2, ngram)
    assert [entry_text(ngram, e) for e in beam.entries] == ["CC(=O)c1ccccc1", "CC(=O)c1ccncc1"]
    assert (stats.admitted, stats.pruned_isomorphic, stats.discarded_irrecoverable, stats.unscanned) == (2, 1, 0, 0)
    std, _ = iso_filter(cands, 2, ngram, iso=False)
    assert [e.cum_logp for e in std.entries] == [-1.0, -1.2]


def test_iso_filter_incomplete_and_irrecoverable(ngram):
    v = ngram.vocab
    cands = [entry(v, "CC(=O)c1cc", -0.5), entry(v, "CC)", -0.6), entry(v, "CC(", -0.7, finished=True), entry(v, "CCO", -0.8)]
    beam, stats = iso_filter(cands, 5, ngram)
    assert [entry_text(ngram, e) for e in beam.entries] == ["CC(=O)c1cc", "CCO"]
    assert stats.discarded_irrecoverable == 2 and stats.balanced()


def test_iso_filter_distinct_candidates_equal_top_k(ngram):
    v = ngram.vocab
    cands = [entry(v, t, -i) for i, t in enumerate(["CCO", "CCN", "CCC", "c1ccccc1", "CC=O"])]
    a, sa = iso_filter(cands, 3, ngram)
    b, _ = iso_filter(cands, 3, ngram, iso=False)
    assert a.entries == b.entries
    assert sa.unscanned == 2


def test_finished_molecule_prunes_live_isomorph_by_default(ngram):
    v = ngram.vocab
    cands = [entry(v, "CCO", -1.0, finished=True), entry(v, "OCC", -1.1)]
    beam, stats = iso_filter(cands, 5, ngram)
    assert len(beam.entries) == 1 and stats.pruned_isomorphic == 1
    beam, _ = iso_filter(cands, 5, ngram, finished_blocks_live=False)
    assert len(beam.entries) == 2


def test_ties_break_on_ids(ngram):
    v = ngram.vocab
    cands = [entry(v, "CCN", -1.0), entry(v, "CCC", -1.0)]
    beam, _ = iso_filter(cands, 1, ngram, iso=False)
    assert beam.entries[0].ids == min(c.ids for c in cands)


def test_step_expand(ngram):
    v = ngram.vocab
    done = entry(v, "CCO", -2.0, finished=True)
    out = step_expand(Beam([BeamEntry((BOS_ID,), 0.0), done]), ngram, 3)
    assert done in out and len(out) == 4
    row = ngram.logprobs([[BOS_ID]])[0]
    for e in out:
        if e is not done:
            assert e.cum_logp == pytest.approx(row[e.ids[-1]])
    with pytest.raises(ValueError):
        step_expand(Beam([]), ngram, 3)


def test_scorer_failure_has_context(ngram):
    class Broken:
        vocab = ngram.vocab

        def logprobs(self, prefixes):
            raise RuntimeError("boom")

    with pytest.raises(ScorerFailure, match="boom"):
        isobeam_search(Broken(), 2, 4)


# full searches


def test_k1_is_greedy(ngram):
    res = standard_beam_search(ngram, 1, 64)
    ids = [BOS_ID]
    while ids[-1] != EOS_ID and len(ids) < 65:
        ids.append(int(np.argmax(ngram.logprobs([ids])[0])))
    if res.finished:
        assert res.finished[0].ids == tuple(ids)
    assert isobeam_search(ngram, 1, 64).texts == res.texts


def test_iso_finished_set_is_unique(ngram):
    res = isobeam_search(ngram, 20, 64, keep_beams=True)
    keys = [canonical_key(mol_from_smiles(t)) for t in res.texts]
    assert len(keys) == len(set(keys))
    for beam in res.beams:
        ks = complete_keys(ngram, beam.entries)
        assert len(ks) == len(set(ks))
        assert len(beam.entries) <= 20
        assert [e.sort_key() for e in beam.entries] == sorted(e.sort_key() for e in beam.entries)
    assert all(s.balanced() for s in res.trace)


def test_outputs_written(ngram, tmp_path):
    res = isobeam_search(ngram, 5, 64)
    res.write_smi(tmp_path / "x.smi")
    res.write_trace(tmp_path / "t.jsonl")
    lines = (tmp_path / "x.smi").read_text().splitlines()
    assert [line.split("\t")[0] for line in lines] == res.texts
    assert len((tmp_path / "t.jsonl").read_text().splitlines()) == len(res.trace)


def test_bad_arguments(ngram):
    with pytest.raises(ValueError):
        isobeam_search(ngram, 0, 10)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 12))
def test_invariants_on_random_scorers(seed, K):
    rng = np.random.default_rng(seed)
    corpus = [CORPUS[i] for i in rng.choice(len(CORPUS), 40, replace=False)]
    sc = ngram_fit(corpus, n=int(rng.integers(2, 6)))
    res = isobeam_search(sc, K, 48, keep_beams=True)
    for stats in res.trace:
        assert stats.balanced()
    for beam in res.beams:
        ks = complete_keys(sc, beam.entries)
        assert len(ks) == len(set(ks))
    for t in res.texts:
        assert parse_smiles(t).complete
