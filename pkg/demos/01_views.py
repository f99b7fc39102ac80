"""Walk through one molecule: canonical keys, a cut, two prefix views, probes.

Run: python demos/01_views.py
"""

from __future__ import annotations

import numpy as np

from sigmakit.smiles import canonical_key, mol_from_smiles, parse_smiles, write_canonical, write_random
from sigmakit.views import cuttable_bonds, make_views, partition, probe_suffix

ASPIRIN = "CC(=O)Oc1ccccc1C(=O)O"


def main() -> None:
    rng = np.random.default_rng(0)
    g = mol_from_smiles(ASPIRIN)
    print(f"aspirin canonical form: {write_canonical(g)}")

    # many spellings, one key
    spellings = {write_random(g, rng) for _ in range(6)}
    for s in sorted(spellings):
        print(f"  {s:28s} key matches: {canonical_key(mol_from_smiles(s)) == canonical_key(g)}")

    # every cut that leaves two fragments of at least two heavy atoms
    print("\ncuttable bonds:")
    for bond in cuttable_bonds(g):
        part = partition(g, bond)
        print(f"  bond {bond}: prefix {part.canonical_prefix_text():10s} suffix {part.suffix_text()}")

    # a verified pair: two prefixes of the same fragment sharing one suffix
    pair = make_views(g, rng)
    print(f"\nview u: {pair.prefix_u} | {pair.suffix}")
    print(f"view v: {pair.prefix_v} | {pair.suffix}")

    # intermediate strings are classified, and incomplete ones can be probed
    for text in ("CC(=O)c1cc", "CC)C", "C1CC("):
        r = parse_smiles(text)
        extra = f" -> probe {probe_suffix(text)!r}" if not r.irrecoverable else ""
        print(f"  {text:12s} {r.status.value}{extra}")


if __name__ == "__main__":
    main()
