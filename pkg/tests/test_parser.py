import pytest

from sigmakit.smiles import ParseStatus, mol_from_smiles, parse_smiles
from sigmakit.smiles.parser import SmilesError


@pytest.mark.parametrize("text, status", [
    ("CCO", ParseStatus.COMPLETE),
    ("c1ccccc1", ParseStatus.COMPLETE),
    ("[NH4+]", ParseStatus.COMPLETE),
    ("c1ccc2ccccc2c1", ParseStatus.COMPLETE),
    ("Cc1ccc[nH]1", ParseStatus.COMPLETE),
    ("C1CC", ParseStatus.INCOMPLETE),
    ("CC(=O)c1cc", ParseStatus.INCOMPLETE),
    ("CC(", ParseStatus.INCOMPLETE),
    ("CC=", ParseStatus.INCOMPLETE),
    ("Cc", ParseStatus.INCOMPLETE),
    ("", ParseStatus.INCOMPLETE),
    ("C)", ParseStatus.IRRECOVERABLE),
    ("C(=O)(=O)=O", ParseStatus.IRRECOVERABLE),
    ("cC", ParseStatus.IRRECOVERABLE),
    ("C11", ParseStatus.IRRECOVERABLE),
    ("C1CC=1C", ParseStatus.COMPLETE),
    ("C=1CC-1", ParseStatus.IRRECOVERABLE),
    ("[*]C[*]", ParseStatus.IRRECOVERABLE),
    ("C@C", ParseStatus.IRRECOVERABLE),
])
def test_three_way_classification(text, status):
    assert parse_smiles(text).status is status


def test_incomplete_reports_partial_state():
    r = parse_smiles("CC(C1CC")
    assert r.partial.open_branches == 1
    assert [label for label, _, _ in r.partial.open_rings] == [1]
    assert r.partial.current_atom == 4


def test_irrecoverable_reports_position():
    r = parse_smiles("CC)C")
    assert r.irrecoverable and r.position == 2


def test_implicit_hydrogens():
    g = mol_from_smiles("CC(=O)O")
    assert [a.hydrogens for a in g.atoms] == [3, 0, 0, 1]
    assert [a.hydrogens for a in mol_from_smiles("c1ccncc1").atoms] == [1, 1, 1, 0, 1, 1]


def test_mol_from_smiles_raises_on_incomplete():
    with pytest.raises(SmilesError):
        mol_from_smiles("C1CC")
