"""Standard and isomorphism-pruning beam search over any Scorer.

Each step expands every live entry, sorts candidates by cumulative
log-probability (ties broken on token ids) and scans them in order:

* Irrecoverable text is discarded.
* Incomplete text is admitted without a structural check.
* Complete text is admitted unless, in iso mode, an entry with the same
  canonical key was already admitted this step. With
  ``finished_blocks_live=False`` the key also carries the entry status, so a
  finished molecule no longer prunes a live spelling of itself; this breaks
  the one-key-per-step invariant and is off by default.

The scan stops once K entries are admitted; the rest count as unscanned.
An entry that emits EOS finishes if its text is a complete molecule and is
discarded otherwise. Finished entries pass through later steps unchanged.
"""

from __future__ import annotations

import json
from collections.abc import Sequence
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from sigmakit.decode.scorer import Scorer
from sigmakit.model.vocab import BOS_ID, EOS_ID
from sigmakit.smiles.canon import CanonicalKey, canonical_key
from sigmakit.smiles.parser import ParseStatus, parse_smiles


class Status(str, Enum):
    INCOMPLETE = "incomplete"
    FINISHED = "finished"


@dataclass(frozen=True)
class BeamEntry:
    ids: tuple[int, ...]
    cum_logp: float
    status: Status = Status.INCOMPLETE

    def sort_key(self) -> tuple:
        return (-self.cum_logp, self.ids)


@dataclass
class Beam:
    entries: list[BeamEntry]
    step_seen: set = field(default_factory=set)


@dataclass(frozen=True)
class StepStats:
    step: int
    candidates: int
    admitted: int
    pruned_isomorphic: int
    discarded_irrecoverable: int
    unscanned: int

    def balanced(self) -> bool:
        return self.admitted + self.pruned_isomorphic + self.discarded_irrecoverable + self.unscanned == self.candidates


@dataclass
class SearchResult:
    finished: list[BeamEntry]
    texts: list[str]
    trace: list[StepStats]
    beams: list[Beam] | None = None

    def write_smi(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for text, entry in zip(self.texts, self.finished):
                fh.write(f"{text}\t{entry.cum_logp:.6f}\n")

    def write_trace(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for row in self.trace:
                rec = {k: v for k, v in asdict(row).items()}
                fh.write(json.dumps(rec, sort_keys=True) + "\n")


class ScorerFailure(RuntimeError):
    """The scorer raised while scoring a beam entry."""


def entry_text(scorer: Scorer, entry: BeamEntry) -> str:
    return scorer.vocab.decode(i for i in entry.ids if i not in (BOS_ID, EOS_ID))


def step_expand(beam: Beam, scorer: Scorer, branch_k: int) -> list[BeamEntry]:
    """Top ``branch_k`` extensions of every live entry; finished entries carried over."""
    if not beam.entries:
        raise ValueError("cannot expand an empty beam")
    live = [e for e in beam.entries if e.status is Status.INCOMPLETE]
    out = [e for e in beam.entries if e.status is Status.FINISHED]
    if live:
        try:
            rows = scorer.logprobs([list(e.ids) for e in live])
        except Exception as exc:  # noqa: BLE001 - re-raised with context
            raise ScorerFailure(f"scorer failed on beam of {len(live)} entries, first {live[0].ids}: {exc}") from exc
        token_ids = np.arange(rows.shape[1])
        for e, row in zip(live, rows):
            order = np.lexsort((token_ids, -row))
            taken = 0
            for tok in order:
                if taken == branch_k or not np.isfinite(row[tok]):
                    break
                status = Status.FINISHED if tok == EOS_ID else Status.INCOMPLETE
                out.append(BeamEntry(e.ids + (int(tok),), e.cum_logp + float(row[tok]), status))
                taken += 1
    return out


def iso_filter(
    candidates: list[BeamEntry],
    K: int,
    scorer: Scorer,
    iso: bool = True,
    step: int = 0,
    finished_blocks_live: bool = True,
) -> tuple[Beam, StepStats]:
    """Descending scan admitting at most K candidates (see module docstring)."""
    ordered = sorted(candidates, key=BeamEntry.sort_key)
    beam = Beam([])
    pruned = discarded = scanned = 0
    for cand in ordered:
        if len(beam.entries) == K:
            break
        scanned += 1
        result = parse_smiles(entry_text(scorer, cand))
        if cand.status is Status.FINISHED and not result.complete:
            discarded += 1
            continue
        if result.status is ParseStatus.IRRECOVERABLE:
            discarded += 1
            continue
        if result.complete:
            key = canonical_key(result.graph)
            if not finished_blocks_live:
                key = (cand.status, key)
            if iso and key in beam.step_seen:
                pruned += 1
                continue
            beam.step_seen.add(key)
        beam.entries.append(cand)
    stats = StepStats(step, len(candidates), len(beam.entries), pruned, discarded, len(candidates) - scanned)
    return beam, stats


def _search(
    scorer: Scorer, K: int, T_max: int, iso: bool, branch_k: int | None, keep_beams: bool, finished_blocks_live: bool = True
) -> SearchResult:
    if K < 1 or T_max < 1:
        raise ValueError("need K >= 1 and T_max >= 1")
    branch_k = branch_k or K
    beam = Beam([BeamEntry((BOS_ID,), 0.0)])
    trace: list[StepStats] = []
    beams: list[Beam] = []
    for step in range(1, T_max + 1):
        if not beam.entries or all(e.status is Status.FINISHED for e in beam.entries):
            break
        candidates = step_expand(beam, scorer, branch_k)
        beam, stats = iso_filter(candidates, K, scorer, iso=iso, step=step, finished_blocks_live=finished_blocks_live)
        trace.append(stats)
        if keep_beams:
            beams.append(beam)
    finished: list[BeamEntry] = []
    texts: list[str] = []
    seen: set[CanonicalKey] = set()
    for e in beam.entries:
        if e.status is not Status.FINISHED:
            continue
        text = entry_text(scorer, e)
        if iso:
            key = canonical_key(parse_smiles(text).graph)
            if key in seen:
                continue
            seen.add(key)
        finished.append(e)
        texts.append(text)
    return SearchResult(finished, texts, trace, beams if keep_beams else None)


def isobeam_search(
    scorer: Scorer,
    K: int,
    T_max: int,
    branch_k: int | None = None,
    keep_beams: bool = False,
    finished_blocks_live: bool = True,
) -> SearchResult:
    """Beam search that keeps one linearization per molecule at every step."""
    return _search(scorer, K, T_max, True, branch_k, keep_beams, finished_blocks_live)


def standard_beam_search(scorer: Scorer, K: int, T_max: int, branch_k: int | None = None, keep_beams: bool = False) -> SearchResult:
    """Same machinery without the structural key check."""
    return _search(scorer, K, T_max, False, branch_k, keep_beams)


def complete_keys(scorer: Scorer, entries: Sequence[BeamEntry]) -> list[CanonicalKey]:
    """Keys of the entries whose text parses Complete (used by invariant checks)."""
    keys = []
    for e in entries:
        r = parse_smiles(entry_text(scorer, e))
        if r.complete:
            keys.append(canonical_key(r.graph))
    return keys
