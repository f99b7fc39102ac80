import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from sigmakit.model import (
    AdamW,
    CheckpointError,
    ForwardError,
    LossError,
    ModelConfig,
    SigmaModel,
    TrainConfig,
    TrainingAborted,
    Vocab,
    VocabError,
    build_batch,
    clip_grads,
    forward,
    gradcheck,
    init_params,
    load_checkpoint,
    loss_and_grad,
    loss_nll,
    loss_sigma,
    loss_total,
    lr_at,
    project,
    save_checkpoint,
    toy_problem,
    train,
)
import importlib

train_module = importlib.import_module("sigmakit.model.train")
from sigmakit.model.losses import LossReport
from sigmakit.model.vocab import BOS_ID, EOS_ID, PAD_ID


def small_model(seed=0, **dims):
    dims = {"d_model": 16, "n_layers": 2, "n_heads": 2, "d_proj": 8, "max_len": 32, **dims}
    return SigmaModel.create(Vocab.build(), np.random.default_rng(seed), **dims)


# vocabulary


def test_vocab_specials_and_roundtrip():
    v = Vocab.build(["C[NH4+]"])
    assert v.tokens[:3] == ("[PAD]", "[BOS]", "[EOS]")
    assert (PAD_ID, BOS_ID, EOS_ID) == (0, 1, 2)
    assert "[NH4+]" in v.tokens
    assert v.decode([BOS_ID, *v.encode("CC(=O)c1ccccc1"), EOS_ID]) == "CC(=O)c1ccccc1"


def test_vocab_errors():
    v = Vocab.build()
    with pytest.raises(VocabError):
        v.encode("[NH4+]")
    with pytest.raises(VocabError):
        v.decode([len(v)])
    with pytest.raises(VocabError):
        Vocab(("C", "[PAD]", "[BOS]", "[EOS]"))


# forward pass


def test_shapes_and_projection_norm():
    m = small_model()
    ids = np.array([[BOS_ID, 5, 6, 7], [BOS_ID, 8, 9, PAD_ID]])
    H, logits, _ = forward(m.params, m.config, ids)
    assert H.shape == (2, 4, 16) and logits.shape == (2, 4, len(m.vocab))
    z, _ = project(m.params, H)
    assert z.shape == (2, 4, 8)
    assert_allclose(np.linalg.norm(z, axis=-1), 1.0, atol=1e-12)


def test_projection_of_zero_vector_stays_finite():
    m = small_model()
    params = dict(m.params, **{"proj.w2": np.zeros_like(m.params["proj.w2"]), "proj.b2": np.zeros_like(m.params["proj.b2"])})
    z, _ = project(params, np.ones((1, 16)))
    assert np.all(z == 0.0)


def test_causality():
    m = small_model()
    a = np.array([[BOS_ID, 5, 6, 7, 8]])
    b = a.copy()
    b[0, 3:] = [9, 10]
    Ha, _, _ = forward(m.params, m.config, a)
    Hb, _, _ = forward(m.params, m.config, b)
    assert_allclose(Ha[0, :3], Hb[0, :3], atol=1e-12)
    assert not np.allclose(Ha[0, 3], Hb[0, 3])


def test_zero_head_gives_uniform_distribution():
    m = small_model()
    m.params["head.w"][:] = 0.0
    lp = m.next_logprobs([[BOS_ID, 5, 6]])
    assert_allclose(lp, -math.log(len(m.vocab)), atol=1e-12)


def test_forward_rejects_bad_ids():
    m = small_model()
    with pytest.raises(ForwardError):
        forward(m.params, m.config, np.array([[1, 999]]))
    with pytest.raises(ForwardError):
        forward(m.params, m.config, np.ones((1, 40), dtype=int))


def test_model_config_validation():
    with pytest.raises(ValueError):
        ModelConfig(vocab_size=10, d_model=16, d_proj=16)
    with pytest.raises(ValueError):
        ModelConfig(vocab_size=10, d_model=15, n_heads=2)


# losses


def test_nll_hand_computed():
    logits = np.log(np.array([[[0.5, 0.25, 0.25], [0.1, 0.2, 0.7]]]))
    targets = np.array([[0, 2]])
    loss, d = loss_nll(logits, targets, np.array([[True, True]]))
    assert_allclose(loss, -(math.log(0.5) + math.log(0.7)) / 2, rtol=1e-12)
    assert_allclose(d[0, 0], np.array([-0.5, 0.25, 0.25]) / 2, atol=1e-12)
    loss_masked, d_masked = loss_nll(logits, targets, np.array([[True, False]]))
    assert_allclose(loss_masked, -math.log(0.5), rtol=1e-12)
    assert np.all(d_masked[0, 1] == 0)
    with pytest.raises(LossError):
        loss_nll(logits, targets, np.zeros((1, 2), dtype=bool))


def _unit(*v):
    v = np.array(v, dtype=float)
    return v / np.linalg.norm(v)


def test_sigma_identical_views_one_orthogonal_negative():
    z = np.stack([_unit(1, 0)] * 3)
    neg = np.stack([_unit(0, 1)] * 3)[None]
    res = loss_sigma(z, z, neg, np.array([True]), tau=1.0)
    assert_allclose(res.value, math.log(1 + math.exp(-1)), rtol=1e-14)


def test_sigma_equal_similarities_gives_log_k_plus_one():
    z = np.stack([_unit(1, 0, 0)] * 2)
    other = np.stack([_unit(0, 1, 0)] * 2)
    res = loss_sigma(z, other, np.stack([other] * 5), np.ones(5, dtype=bool), tau=0.1)
    assert_allclose(res.value, math.log(6), rtol=1e-14)
    res = loss_sigma(z, other, other[None], np.array([True]), tau=0.1)
    assert_allclose(res.value, math.log(2), rtol=1e-14)


def test_sigma_masked_negatives_are_ignored():
    z = np.stack([_unit(1, 0)] * 2)
    neg = np.stack([np.stack([_unit(0, 1)] * 2), np.stack([_unit(1, 0)] * 2)])
    a = loss_sigma(z, z, neg, np.array([True, False]), tau=0.1)
    b = loss_sigma(z, z, neg[:1], np.array([True]), tau=0.1)
    assert_allclose(a.value, b.value, rtol=1e-14)
    assert_allclose(a.value, math.log1p(math.exp(-10)), rtol=0, atol=1e-15)


def test_sigma_anchor_without_negatives():
    z = np.stack([_unit(1, 0)] * 2)
    res = loss_sigma(z, z, np.zeros((1, 2, 2)), np.array([False]))
    assert res.value == 0.0 and not res.used[0]
    with pytest.raises(LossError):
        loss_sigma(z, z, np.zeros((1, 2, 2)), np.array([False]), strict=True)


def test_sigma_rejects_bad_temperature():
    z = np.stack([_unit(1, 0)])
    with pytest.raises(LossError):
        loss_sigma(z, z, z[None], np.array([True]), tau=0.0)


def test_loss_total():
    assert loss_total(2.0, 3.0, 0.0) == 2.0
    assert loss_total(2.0, 3.0, 0.5) == 3.5


# batch and objective


def test_batch_alignment():
    params, cfg, batch = toy_problem()
    batch.check_alignment()
    assert batch.neg_mask.any(1).all()
    assert len(batch.neg_owner) == batch.neg_mask.sum()


def test_lambda_zero_is_pure_mle():
    params, cfg, batch = toy_problem()
    rep, grads = loss_and_grad(params, cfg, batch, lam=0.0)
    assert rep.sigma == 0.0 and rep.total == rep.nll
    for name in ("proj.w1", "proj.b1", "proj.w2", "proj.b2"):
        assert np.all(grads[name] == 0)


def test_unused_embedding_rows_get_no_gradient():
    params, cfg, batch = toy_problem()
    _, grads = loss_and_grad(params, cfg, batch, lam=0.5)
    present = set(np.unique(np.concatenate([batch.ids_u.ravel(), batch.ids_v.ravel(), batch.ids_neg.ravel()])))
    for row in range(cfg.vocab_size):
        if row not in present:
            assert np.all(grads["tok_emb"][row] == 0)


@pytest.mark.parametrize("lam", [0.0, 0.5])
def test_gradcheck_sampled(lam):
    params, cfg, batch = toy_problem()
    report = gradcheck(params, cfg, batch, lam, max_entries=6, rng=np.random.default_rng(1))
    assert report.max_rel_error < 1e-4, report.per_param


# optimizer


def test_schedule_shape():
    lrs = [lr_at(s, 100, 1.0, 0.1) for s in range(100)]
    assert_allclose(lrs[:10], np.arange(1, 11) / 10)
    assert lrs[10] == pytest.approx(1.0)
    assert all(a >= b for a, b in zip(lrs[10:], lrs[11:]))
    assert lrs[-1] < 1e-3


def test_clipping():
    grads = {"a": np.full(4, 3.0), "b": np.full(1, 4.0)}
    norm = clip_grads(grads, 1.0)
    assert norm == pytest.approx(math.sqrt(52.0))
    assert math.sqrt(sum((g**2).sum() for g in grads.values())) == pytest.approx(1.0, rel=1e-5)


def test_adamw_decays_matrices_only():
    params = {"w": np.ones((2, 2)), "b": np.ones(2)}
    opt = AdamW(weight_decay=0.5)
    opt.step(params, {"w": np.zeros((2, 2)), "b": np.zeros(2)}, lr=0.1)
    assert_allclose(params["w"], 0.95)
    assert_allclose(params["b"], 1.0)


# checkpoint


def test_checkpoint_roundtrip(tmp_path):
    m = small_model()
    path = tmp_path / "m.ckpt"
    m.save(path, {"note": "x"})
    back = SigmaModel.load(path)
    assert back.config == m.config and back.vocab == m.vocab
    for k in m.params:
        assert np.array_equal(back.params[k], m.params[k])
    assert back.checkpoint_header["note"] == "x"
    assert_allclose(back.next_logprobs([[1, 5]]), m.next_logprobs([[1, 5]]))


def test_checkpoint_rejects_corruption(tmp_path):
    path = tmp_path / "m.ckpt"
    save_checkpoint(path, {"a": np.arange(3.0)}, {})
    data = path.read_bytes()
    (tmp_path / "bad").write_bytes(b"XXXXXXXX" + data[8:])
    with pytest.raises(CheckpointError):
        load_checkpoint(tmp_path / "bad")
    (tmp_path / "long").write_bytes(data + b"\0")
    with pytest.raises(CheckpointError):
        load_checkpoint(tmp_path / "long")
    assert not (tmp_path / "m.ckpt.tmp").exists()


# training



def tiny_pairs(n=24, seed=0):
    from sigmakit.corpus import drug_like_corpus
    from sigmakit.smiles import mol_from_smiles
    from sigmakit.views import ViewError, make_views

    rng = np.random.default_rng(seed)
    out = []
    for s in drug_like_corpus(n, seed=seed):
        try:
            out.append(make_views(mol_from_smiles(s), rng))
        except ViewError:
            pass
    return out


TINY = TrainConfig(d_model=16, n_layers=1, n_heads=2, d_proj=8, batch_size=8, epochs=2, n_negatives=3)


def test_training_is_deterministic(tmp_path):
    pairs = tiny_pairs()
    a = train(TINY, pairs, val_pairs=pairs[:4], checkpoint_path=tmp_path / "a.ckpt", log_path=tmp_path / "a.jsonl")
    b = train(TINY, pairs, val_pairs=pairs[:4])
    assert a.log_rows == b.log_rows
    for k in a.model.params:
        assert np.array_equal(a.model.params[k], b.model.params[k])
    assert (tmp_path / "a.ckpt").exists()
    assert len((tmp_path / "a.jsonl").read_text().splitlines()) == len(a.log_rows)
    assert sum("val_tis" in r for r in a.log_rows) == 2


def test_training_reduces_loss():
    pairs = tiny_pairs(60)
    cfg = TrainConfig(**{**TINY.__dict__, "epochs": 4, "lr": 3e-3})
    rows = [r for r in train(cfg, pairs).log_rows if "total" in r]
    assert np.mean([r["total"] for r in rows[-3:]]) < np.mean([r["total"] for r in rows[:3]])


def test_non_finite_loss_aborts_with_last_good_state(tmp_path, monkeypatch):
    real = train_module.loss_and_grad
    calls = {"n": 0}

    def flaky(*args, **kwargs):
        calls["n"] += 1
        rep, grads = real(*args, **kwargs)
        if calls["n"] > 4:
            rep = LossReport(float("nan"), rep.sigma, float("nan"), rep.per_token_sigma)
        return rep, grads

    monkeypatch.setattr(train_module, "loss_and_grad", flaky)
    path = tmp_path / "m.ckpt"
    with pytest.raises(TrainingAborted) as info:
        train(TINY, tiny_pairs(), checkpoint_path=path)
    saved = SigmaModel.load(path)
    for k, v in info.value.model.params.items():
        assert_allclose(saved.params[k], v)
    assert all(math.isfinite(r["total"]) for r in info.value.log_rows)


def test_train_config_rejects_unknown_keys():
    with pytest.raises(ValueError):
        TrainConfig.from_dict({"d_model": 16, "bogus": 1})
    with pytest.raises(ValueError):
        TrainConfig(lam=-1.0)


def test_build_batch_respects_max_len():
    params, cfg, batch = toy_problem()
    from sigmakit.model.gradcheck import GRADCHECK_PAIRS  # noqa: F401
    with pytest.raises(ValueError):
        build_batch(tiny_pairs(8), Vocab.build(), max_len=4)
