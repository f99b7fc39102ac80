"""Reading and writing ``.smi`` files (``SMILES[<whitespace>ID]`` per line)."""

from __future__ import annotations

from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class SmiRecord:
    line_no: int
    smiles: str
    ident: str | None


def read_smi(path: str | Path) -> Iterator[SmiRecord]:
    """Yield records, skipping blank lines and ``#`` comments."""
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.strip().split(maxsplit=1)
            yield SmiRecord(line_no, parts[0], parts[1].strip() if len(parts) > 1 else None)


def write_smi(path: str | Path, rows: Iterable[tuple[str, str | None]]) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for smiles, ident in rows:
            fh.write(f"{smiles}\t{ident}\n" if ident else f"{smiles}\n")
            n += 1
    return n
