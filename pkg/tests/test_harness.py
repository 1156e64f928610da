import json
from fractions import Fraction

import pytest

from refdet import harness
from refdet.cli import main
from refdet.harness import (
    DegenerateRhsError,
    FileFormatError,
    ScaleLimitError,
    VerifyParams,
    WeightSpec,
    calibrate_constants,
    fit_exponents,
    load_vector_system,
    parse_range,
    random_weights,
    verify_identity,
)


def write_json(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


# weights ----------------------------------------------------------------------


def test_unit_weights():
    w = random_weights(WeightSpec("unit"), 1, 3)
    assert [w[(i,)] for i in (1, 2, 3)] == [1, 1, 1]


def test_random_weights_are_reproducible():
    a = random_weights(WeightSpec("random", seed=7, bound=5), 2, 3)
    b = random_weights(WeightSpec("random", seed=7, bound=5), 2, 3)
    c = random_weights(WeightSpec("random", seed=8, bound=5), 2, 3)
    assert a == b and a != c
    assert all(x != 0 and x.denominator <= 5 and abs(x.numerator) <= 5 for x in a.entries.values())


def test_symbolic_weights():
    w = random_weights(WeightSpec("symbolic"), 2, 2)
    names = sorted(str(w[(i, j)]) for i in (1, 2) for j in (1, 2))
    assert names == ["w[1,1]", "w[1,2]", "w[2,1]", "w[2,2]"]


def test_explicit_weights(tmp_path):
    path = write_json(tmp_path, "w.json", {"weights": {"w[1]": "3/4", "w[2]": 2}})
    w = random_weights(WeightSpec("explicit", path=path), 1, 2)
    assert w[(1,)] == Fraction(3, 4) and w[(2,)] == 2
    with pytest.raises(FileFormatError):
        random_weights(WeightSpec("explicit", path=path), 1, 3)
    bad = write_json(tmp_path, "bad.json", {"weights": {"w[1]": "x/y"}})
    with pytest.raises(FileFormatError):
        random_weights(WeightSpec("explicit", path=bad), 1, 1)
    with pytest.raises(FileFormatError):
        random_weights(WeightSpec("explicit", path=str(tmp_path / "missing.json")), 1, 1)


def test_weight_spec_validation():
    with pytest.raises(ValueError):
        WeightSpec("gaussian")
    with pytest.raises(ValueError):
        WeightSpec("explicit")


# vector system files ------------------------------------------------------------


def test_vector_system_file(tmp_path):
    path = write_json(tmp_path, "s.json", {"ambient_dim": 2, "vectors": [["1/2", "0"], ["0", "3"]], "reference_basis": [2, 1]})
    s = load_vector_system(path)
    assert s.vector(1) == (Fraction(1, 2), 0)
    assert s.reference_basis == (2, 1)
    bad = write_json(tmp_path, "bad.json", {"ambient_dim": 3, "vectors": [["1", "0"]]})
    with pytest.raises(FileFormatError):
        load_vector_system(bad)
    dep = write_json(tmp_path, "dep.json", {"ambient_dim": 2, "vectors": [["1", "0"], ["0", "1"]], "reference_basis": [1]})
    with pytest.raises(FileFormatError):
        load_vector_system(dep)


# verification -------------------------------------------------------------------


def test_k1_on_a2_symbolic():
    r = verify_identity("k1", VerifyParams("an:2"))
    assert r.equal and r.ratio == "1"
    assert r.checks["substitution_rechecks"] == [True, True, True]


def test_matrix_tree_four_vertices_unit():
    r = verify_identity("matrix-tree", VerifyParams("an:3", weights=WeightSpec("unit")))
    assert r.lhs == r.rhs == "16"
    assert r.equal and r.term_count == 16


def test_gendet_orthogonal_vectors(tmp_path):
    path = write_json(tmp_path, "orth.json", {"ambient_dim": 2, "vectors": [["1", "0"], ["0", "1"]]})
    r = verify_identity("gendet", VerifyParams(f"file:{path}", k=2))
    assert r.lhs == r.rhs == "0"
    assert r.equal and r.ratio is None


def test_report_invariants():
    for name, fam in [("k1", "bn:2"), ("keven-pf", "an:2"), ("mv", "an:2")]:
        r = verify_identity(name, VerifyParams(fam))
        if r.equal:
            assert r.ratio == "1"
    r = verify_identity("keven-pf", VerifyParams("an:2"))
    assert not r.equal and r.ratio == "-1/2" and r.holds


def test_float_mode():
    r = verify_identity("keven-pf", VerifyParams("an:2", mode="float"))
    assert r.parameters["weights"] == "random"
    assert r.checks["residual"] > 0.1  # off by the calibrated constant
    r = verify_identity("gendet", VerifyParams("random:3x4", k=3, mode="float", seed=3))
    assert r.equal and r.checks["residual"] <= 1e-9
    # even k on an odd-dimensional span: both sides vanish
    r = verify_identity("gendet", VerifyParams("random:3x4", k=2, mode="float", seed=3))
    assert r.rhs == "0.0" and r.equal


def test_literal_triangle_weight_is_not_a_constant_multiple():
    r = verify_identity("mv", VerifyParams("an:2"), variant="literal")
    assert r.ratio == "non-constant" and not r.holds


def test_timing_is_off_by_default():
    assert verify_identity("k1", VerifyParams("an:1")).elapsed_ms is None
    assert isinstance(verify_identity("k1", VerifyParams("an:1", timing=True)).elapsed_ms, int)


def test_scale_and_argument_errors():
    with pytest.raises(ScaleLimitError):
        verify_identity("matrix-tree", VerifyParams("an:6"))
    with pytest.raises(ScaleLimitError):
        verify_identity("gendet", VerifyParams("random:6x12", k=4))
    with pytest.raises(ValueError):
        verify_identity("mv", VerifyParams("an:3"))
    with pytest.raises(ValueError):
        verify_identity("bn-tree", VerifyParams("an:2"))
    with pytest.raises(ValueError):
        verify_identity("nope", VerifyParams())


def test_symbolic_fallback_beyond_term_budget(monkeypatch):
    monkeypatch.setattr(harness, "TERM_BUDGET", 100)
    r = verify_identity("gendet", VerifyParams("random:3x4", k=3, weights=WeightSpec("symbolic")))
    assert r.parameters["weights_fallback"] == "random"
    assert r.equal


# calibration -------------------------------------------------------------------


def test_calibrate_k1():
    table = calibrate_constants("k1", [1, 2, 3])
    assert [row["ratio"] for row in table["rows"]] == ["1", "1", "1"]
    assert table["single_constant"] == "1"


def test_calibrate_bn_tree_n1():
    table = calibrate_constants("bn-tree", [1])
    assert table["rows"][0]["ratio"] == "1/2"
    assert table["classes"] == [{"n": 1, "ell": 1, "d": 1, "correction_exponent": -1}]
    # one structure class cannot pin down two exponents
    assert table["fit"]["determined"] is False


def test_fit_exponents():
    rows = [{"ell": l, "d": d, "correction_exponent": 3 * d - l} for l, d in [(0, 1), (1, 1), (2, 2)]]
    assert fit_exponents(rows) == {"alpha": "-1", "beta": "3", "determined": True, "exact": True}


def test_degenerate_calibration():
    with pytest.raises(DegenerateRhsError):
        calibrate_constants("gendet", [1])


def test_parse_range():
    assert parse_range("n=1..3") == ("n", [1, 2, 3])
    assert parse_range("n=2,4") == ("n", [2, 4])
    with pytest.raises(ValueError):
        parse_range("1..3")


# CLI --------------------------------------------------------------------------


def test_cli_exit_codes(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["verify", "k1", "--family", "an:2", "--report", str(out)]) == 0
    assert json.loads(out.read_text())["equal"] is True
    assert main(["verify", "mv", "--family", "an:2", "--triangle-weight", "literal"]) == 1
    assert main(["verify", "matrix-tree", "--family", "an:9"]) == 2
    assert main(["verify", "bogus"]) == 2
    assert main(["calibrate", "mv", "--range", "m=1..2"]) == 0
    assert main(["calibrate", "bn-tree", "--range", "n=1..3"]) == 0
    assert main(["enumerate", "trees", "--vertices", "4", "--count-only"]) == 0
    capsys.readouterr()


def test_cli_enumerate_output(capsys):
    main(["enumerate", "doombs", "--vertices", "2", "--edges", "2"])
    out = json.loads(capsys.readouterr().out)
    assert out["count"] == 2 and out["items"] == [[[1, 1], [2, 2]], [[1, 2], [2, 1]]]
    main(["enumerate", "bbasic", "--vertices", "2", "--count-only"])
    assert json.loads(capsys.readouterr().out) == {"kind": "bbasic", "vertices": 2, "count": 6}
    assert main(["enumerate", "3trees", "--vertices", "4"]) == 2


def test_report_bytes_are_stable(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["verify", "gendet", "--family", "an:2", "--k", "3", "--report", str(a)])
    main(["verify", "gendet", "--family", "an:2", "--k", "3", "--report", str(b)])
    assert a.read_bytes() == b.read_bytes()
    keys = list(json.loads(a.read_text()))
    assert keys == ["identity", "parameters", "lhs", "rhs", "equal", "ratio", "term_count", "elapsed_ms", "checks"]
