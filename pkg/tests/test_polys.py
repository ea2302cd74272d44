import json

import pytest

from wittdisp.exceptions import BadSpec
from wittdisp.polys import configure_cache, derive_universal_polys, evaluate, verify_ghost_identities
from wittdisp.rings import FiniteField


@pytest.mark.parametrize("p,n", [(2, 4), (3, 3), (5, 2)])
def test_ghost_identities(p, n):
    assert verify_ghost_identities(derive_universal_polys(p, n))


def test_p2_sum_and_negation():
    polys = derive_universal_polys(2, 2)
    x0, x1, y0, y1 = polys.ring.gens
    assert polys.sum_polys[0] == x0 + y0
    assert polys.sum_polys[1] == x1 + y1 - x0 * y0
    assert polys.prod_polys[0] == x0 * y0
    assert polys.neg_polys[0] == -x0
    assert polys.neg_polys[1] == -x0**2 - x1


def test_p3_frobenius():
    polys = derive_universal_polys(3, 2)
    x0, x1, _, _ = polys.ring.gens
    assert polys.frob_polys == (x0**3 + 3 * x1,)


def test_evaluate_in_f2():
    F2 = FiniteField.of(2)
    polys = derive_universal_polys(2, 2)
    values = [F2.one, F2.zero, F2.one, F2.zero]
    # (1, 0) + (1, 0) = (0, 1)
    assert [evaluate(f, values, F2.from_int) for f in polys.sum_polys] == [F2.zero, F2.one]


def test_disk_cache_roundtrip(tmp_path):
    configure_cache(str(tmp_path))
    try:
        derive_universal_polys.cache_clear()
        fresh = derive_universal_polys(2, 3)
        assert (tmp_path / "witt-polys-p2-n3.json").exists()
        derive_universal_polys.cache_clear()
        assert derive_universal_polys(2, 3) == fresh
    finally:
        configure_cache(None)
        derive_universal_polys.cache_clear()


def test_zero_length_rejected():
    with pytest.raises(BadSpec):
        derive_universal_polys(2, 0)


@pytest.mark.parametrize("corrupt", ["swap", "garbage"])
def test_corrupted_disk_cache_is_rederived(tmp_path, corrupt):
    configure_cache(str(tmp_path))
    try:
        derive_universal_polys.cache_clear()
        fresh = derive_universal_polys(2, 3)
        path = tmp_path / "witt-polys-p2-n3.json"
        if corrupt == "swap":
            data = json.loads(path.read_text(encoding="utf-8"))
            data["sum"], data["prod"] = data["prod"], data["sum"]
            path.write_text(json.dumps(data), encoding="utf-8")
        else:
            path.write_text("{not json", encoding="utf-8")
        derive_universal_polys.cache_clear()
        assert derive_universal_polys(2, 3) == fresh
        rewritten = json.loads(path.read_text(encoding="utf-8"))
        assert rewritten == fresh.to_json()
    finally:
        configure_cache(None)
        derive_universal_polys.cache_clear()
