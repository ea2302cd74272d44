import pytest

from wittdisp.exceptions import BadSpec
from wittdisp.selftest import PROPERTIES, run_all


def test_registered_properties():
    assert set(PROPERTIES) == {
        "ghost_identities",
        "witt_ring_axioms",
        "frobenius_verschiebung",
        "divided_frobenius_conjugation",
        "orbit_equivalence",
        "slopes",
        "adjoint_nilpotence",
        "gmzcf",
        "lift_count",
        "adlv",
        "rz_invariance",
    }


def test_quick_run_is_seeded():
    names = ["ghost_identities", "slopes", "gmzcf"]
    first = run_all(seed=3, names=names, quick=True)
    assert first["ok"]
    assert list(first["properties"]) == names
    assert run_all(seed=3, names=names, quick=True, threads=2) == first


def test_unknown_property():
    with pytest.raises(BadSpec):
        run_all(names=["no_such_property"])
