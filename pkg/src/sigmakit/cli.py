"""Command-line entry point: canonicalize, mine, train, gradcheck, decode, eval.

Every subcommand writes ``manifest.json`` into ``--out`` with the resolved
configuration, seed, package version and SHA-256 digests of its inputs.

Exit codes: 0 success, 1 some input records failed, 2 usage or config error,
3 internal invariant violated.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

import sigmakit

EXIT_OK, EXIT_PARTIAL, EXIT_USAGE, EXIT_INVARIANT = 0, 1, 2, 3
REPORT_SCHEMA = 1

log = logging.getLogger("sigmakit")


class UsageError(Exception):
    """Bad configuration or arguments (exit code 2)."""


class InvariantViolation(Exception):
    """An internal guarantee failed (exit code 3)."""


def _digest(path: str | Path) -> str:
    from sigmakit.views.mining import file_digest

    return file_digest(path)


def _load_config(path: str | None, section: str) -> dict:
    if not path:
        return {}
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    block = data.get(section, {})
    if not isinstance(block, dict):
        raise UsageError(f"config section {section!r} must be an object")
    return block


def _rngs(seed: int, n: int) -> list[np.random.Generator]:
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def _write_manifest(out: Path, args: argparse.Namespace, config: dict, inputs: list[str], outputs: list[str], extra: dict | None = None) -> None:
    manifest = {
        "command": args.command,
        "args": {k: v for k, v in vars(args).items() if k != "func"},
        "config": config,
        "seed": args.seed,
        "version": sigmakit.__version__,
        "inputs": {p: _digest(p) for p in inputs},
        "outputs": outputs,
    }
    if extra:
        manifest.update(extra)
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _out_dir(args: argparse.Namespace) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_canonicalize(args: argparse.Namespace) -> int:
    from sigmakit.smiles.canon import write_canonical
    from sigmakit.smiles.io import read_smi
    from sigmakit.smiles.parser import parse_smiles

    out = _out_dir(args)
    target = out / "canonical.smi"
    failures = []
    with open(target, "w", encoding="utf-8") as fh:
        for rec in read_smi(args.input):
            r = parse_smiles(rec.smiles)
            if not r.complete:
                failures.append(rec.line_no)
                print(f"line {rec.line_no}: {r.status.value}: {r.reason or 'open rings or branches'}", file=sys.stderr)
                continue
            fh.write(f"{write_canonical(r.graph)}\t{rec.ident or rec.line_no}\n")
    _write_manifest(out, args, {}, [args.input], [str(target)], {"failed_lines": failures})
    return EXIT_PARTIAL if failures else EXIT_OK


def cmd_mine(args: argparse.Namespace) -> int:
    from sigmakit.views.mining import MiningConfig, mine_dataset, write_dataset

    block = _load_config(args.config, "mine")
    if args.epochs is not None:
        block["epochs"] = args.epochs
    if args.all_cuts:
        block["enumerate_all_cuts"] = True
    try:
        config = MiningConfig(**block)
    except TypeError as exc:
        raise UsageError(f"bad mine config: {exc}") from exc
    out = _out_dir(args)
    (rng,) = _rngs(args.seed, 1)
    result = mine_dataset(args.input, config, rng)
    result.manifest["seed"] = args.seed
    pairs_path, mpath = write_dataset(out / Path(args.input).stem, result)
    _write_manifest(out, args, asdict(config), [args.input], [str(pairs_path), str(mpath)], {"counts": result.manifest["counts"]})
    print(json.dumps(result.manifest["counts"], sort_keys=True))
    return EXIT_PARTIAL if result.manifest["counts"]["malformed"] else EXIT_OK


def cmd_train(args: argparse.Namespace) -> int:
    from sigmakit.model.train import TrainConfig, TrainingAborted, train
    from sigmakit.views.mining import read_pairs

    block = _load_config(args.config, "train")
    for key in ("lam", "tau", "epochs", "batch_size"):
        val = getattr(args, key)
        if val is not None:
            block[key] = val
    block["seed"] = args.seed
    try:
        config = TrainConfig.from_dict(block)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad train config: {exc}") from exc
    pairs = read_pairs(args.pairs)
    val = read_pairs(args.val) if args.val else None
    out = _out_dir(args)
    ckpt, log_path = out / "model.ckpt", out / "train_log.jsonl"
    inputs = [args.pairs] + ([args.val] if args.val else [])
    try:
        train(config, pairs, val, checkpoint_path=ckpt, log_path=log_path)
    except TrainingAborted as exc:
        print(f"training aborted: {exc}; last good checkpoint kept at {ckpt}", file=sys.stderr)
        _write_manifest(out, args, asdict(config), inputs, [str(ckpt), str(log_path)], {"aborted": str(exc)})
        return EXIT_INVARIANT
    _write_manifest(out, args, asdict(config), inputs, [str(ckpt), str(log_path)])
    return EXIT_OK


def cmd_gradcheck(args: argparse.Namespace) -> int:
    from sigmakit.model.gradcheck import gradcheck, toy_problem

    params, cfg, batch = toy_problem(d_model=args.d_model, n_layers=args.layers, seed=args.seed)
    worst = 0.0
    rows = []
    for lam in args.lams:
        report = gradcheck(params, cfg, batch, lam, max_entries=args.max_entries, rng=np.random.default_rng(args.seed))
        worst = max(worst, report.max_rel_error)
        rows.append({"lam": lam, "max_rel_error": report.max_rel_error})
        print(f"lambda={lam}: max relative error {report.max_rel_error:.3e}")
    print(f"max relative error {worst:.3e}")
    if args.out:
        out = _out_dir(args)
        _write_manifest(out, args, {"d_model": args.d_model, "layers": args.layers}, [], [], {"results": rows})
    return EXIT_OK if worst < 1e-4 else EXIT_INVARIANT


def _scorer(args: argparse.Namespace):
    from sigmakit.decode.scorer import ModelScorer, ngram_fit
    from sigmakit.model.model import SigmaModel
    from sigmakit.smiles.io import read_smi

    if bool(args.checkpoint) == bool(args.ngram):
        raise UsageError("give exactly one of --checkpoint or --ngram")
    if args.checkpoint:
        return ModelScorer(SigmaModel.load(args.checkpoint)), [args.checkpoint]
    corpus = [r.smiles for r in read_smi(args.ngram)]
    return ngram_fit(corpus, n=args.order, k_smooth=args.k_smooth), [args.ngram]


def cmd_decode(args: argparse.Namespace) -> int:
    from sigmakit.decode.beam import isobeam_search, standard_beam_search
    from sigmakit.metrics.genset import GenSet

    scorer, inputs = _scorer(args)
    if args.iso:
        result = isobeam_search(scorer, args.K, args.T_max, args.branch_k, finished_blocks_live=not args.keep_live_isomorphs)
    else:
        result = standard_beam_search(scorer, args.K, args.T_max, args.branch_k)
    out = _out_dir(args)
    result.write_smi(out / "decoded.smi")
    result.write_trace(out / "trace.jsonl")
    if not all(s.balanced() for s in result.trace):
        raise InvariantViolation("beam bookkeeping does not balance")
    if args.iso and len(GenSet.of(result.texts).keys) != len(result.texts):
        raise InvariantViolation("isomorphic duplicates in the finished set")
    _write_manifest(out, args, {}, inputs, [str(out / "decoded.smi"), str(out / "trace.jsonl")], {"finished": len(result.texts)})
    print(f"{len(result.texts)} finished molecules in {len(result.trace)} steps")
    return EXIT_OK


def evaluation_report(genset_path: str, train_path: str, checkpoint: str | None = None, pairs_path: str | None = None) -> dict:
    """The metric report written by ``sigmakit eval``."""
    from sigmakit.metrics.genset import GenSet, intdiv, novelty, scaffold_count, train_keys, uniqueness, validity
    from sigmakit.smiles.io import read_smi

    gen = GenSet.of(r.smiles for r in read_smi(genset_path))
    known = train_keys(r.smiles for r in read_smi(train_path))
    report: dict = {
        "schema_version": REPORT_SCHEMA,
        "n_generated": len(gen.raw),
        "validity": validity(gen),
        "uniqueness": uniqueness(gen),
        "novelty": novelty(gen, known),
        "novelty_unique": novelty(gen, known, unique=True),
        "intdiv": intdiv(gen) if gen.valid else None,
        "intdiv_off_diagonal": intdiv(gen, off_diagonal=True) if len(gen.valid) > 1 else None,
        "scaffolds": scaffold_count(gen),
    }
    if checkpoint and pairs_path:
        from sigmakit.metrics.invariance import tis
        from sigmakit.model.model import SigmaModel
        from sigmakit.views.mining import read_pairs

        model = SigmaModel.load(checkpoint)
        report["tis"] = tis(model, [(p.prefix_u, p.prefix_v) for p in read_pairs(pairs_path)])
    else:
        report["tis"] = None
        report["notes"] = ["TIS omitted: needs both --checkpoint and --pairs"]
    return report


def cmd_eval(args: argparse.Namespace) -> int:
    out = _out_dir(args)
    report = evaluation_report(args.genset, args.train, args.checkpoint, args.pairs)
    (out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    inputs = [p for p in (args.genset, args.train, args.checkpoint, args.pairs) if p]
    _write_manifest(out, args, {}, inputs, [str(out / "report.json")])
    print(json.dumps(report, sort_keys=True))
    return EXIT_OK


def cmd_curve(args: argparse.Namespace) -> int:
    from sigmakit.metrics.diversity import diversity_curve, write_curve

    scorer, inputs = _scorer(args)
    rows = diversity_curve(scorer, sorted(args.K_list), args.T_max, args.branch_k, not args.keep_live_isomorphs)
    out = _out_dir(args)
    write_curve(out / "diversity_curve.csv", rows)
    _write_manifest(out, args, {}, inputs, [str(out / "diversity_curve.csv")])
    for r in rows:
        print(asdict(r))
    return EXIT_OK


def cmd_heatmap(args: argparse.Namespace) -> int:
    from sigmakit.metrics.invariance import heatmap
    from sigmakit.model.model import SigmaModel

    model = SigmaModel.load(args.checkpoint)
    hm = heatmap(model, args.s1, args.s2)
    out = _out_dir(args)
    hm.to_csv(out / "heatmap.csv")
    _write_manifest(out, args, {}, [args.checkpoint], [str(out / "heatmap.csv")])
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sigmakit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=sigmakit.__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file with per-command sections")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=".", help="output directory")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("canonicalize", parents=[common], help="canonical SMILES for a .smi file")
    p.add_argument("input")
    p.set_defaults(func=cmd_canonicalize)

    p = sub.add_parser("mine", parents=[common], help="mine verified view pairs from a .smi corpus")
    p.add_argument("input")
    p.add_argument("--epochs", type=int)
    p.add_argument("--all-cuts", action="store_true")
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("train", parents=[common], help="train a model on mined pairs")
    p.add_argument("pairs")
    p.add_argument("--val")
    p.add_argument("--lam", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch-size", dest="batch_size", type=int)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("gradcheck", parents=[common], help="finite-difference gradient check")
    p.add_argument("--d-model", dest="d_model", type=int, default=8)
    p.add_argument("--layers", type=int, default=2)
    p.add_argument("--lams", type=float, nargs="+", default=[0.0, 0.5, 1.0])
    p.add_argument("--max-entries", dest="max_entries", type=int)
    p.set_defaults(func=cmd_gradcheck, out=None)

    def scorer_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--checkpoint")
        p.add_argument("--ngram", help=".smi corpus to fit an n-gram scorer on")
        p.add_argument("--order", type=int, default=6)
        p.add_argument("--k-smooth", dest="k_smooth", type=float, default=0.01)
        p.add_argument("--T-max", dest="T_max", type=int, default=64)
        p.add_argument("--branch-k", dest="branch_k", type=int)
        p.add_argument(
            "--keep-live-isomorphs", dest="keep_live_isomorphs", action="store_true",
            help="IsoBeam variant: finished molecules do not prune live spellings of themselves",
        )

    p = sub.add_parser("decode", parents=[common], help="beam decoding (standard or --iso)")
    scorer_flags(p)
    p.add_argument("--iso", action="store_true")
    p.add_argument("-K", type=int, default=10)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("eval", parents=[common], help="metric report for a generated set")
    p.add_argument("genset")
    p.add_argument("--train", required=True)
    p.add_argument("--checkpoint")
    p.add_argument("--pairs")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("curve", parents=[common], help="diversity-vs-K curve CSV")
    scorer_flags(p)
    p.add_argument("--K-list", dest="K_list", type=int, nargs="+", default=[10, 50, 100, 500])
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("heatmap", parents=[common], help="hidden-state similarity CSV for two strings")
    p.add_argument("checkpoint")
    p.add_argument("s1")
    p.add_argument("s2")
    p.set_defaults(func=cmd_heatmap)
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=os.environ.get("SIGMAKIT_LOG", "WARNING").upper(), format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvariantViolation, AssertionError) as exc:
        print(f"invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
