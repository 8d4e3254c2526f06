import io
import json

import pytest

from btcompact.cli import main
from btcompact.matrix import Matrix


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out), out


def test_cartan_example(capsys):
    code, out, _ = run(capsys, "cartan", "--matrix", '[["1","0"],["1/2","1"]]', "-p", "2")
    assert code == 0 and out["nu"] == [-1, 1]
    k1 = Matrix.from_json(out["k1"])
    k2 = Matrix.from_json(out["k2"])
    g = k1 @ Matrix.p_diag(out["nu"]) @ k2
    assert g == Matrix.from_json([["1", "0"], ["1/2", "1"]])


def test_classify_example(capsys):
    code, out, _ = run(capsys, "classify-seq", "--spec", '{"n":3,"a":[0,0,1],"b":[0,0,0]}')
    assert code == 0 and out["I"] == [1] and out["d"] == ["0"]


def test_limit_group_and_member(capsys):
    code, out, _ = run(capsys, "limit-group", "--spec", '{"n":2,"a":[0,1],"b":[0,0]}')
    assert code == 0 and out["kind"] == "D" and out["I"] == []
    desc = json.dumps(out)
    code, out, _ = run(capsys, "member", "--desc", desc, "--matrix", '[["1","7/8"],["0","1"]]')
    assert out["member"] is True
    code, out, _ = run(capsys, "member", "--desc", desc, "--matrix", '[["1","0"],["1","1"]]')
    assert out["member"] is False


def test_chabauty_mismatch(capsys):
    desc = '{"kind":"D","n":2,"I":[1],"d":["0"]}'
    code, out, _ = run(capsys, "chabauty-verify", "--spec", '{"n":2,"a":[0,1],"b":[0,0]}', "--desc", desc)
    assert code == 2 and out["error"]["code"] == "DESC_MISMATCH"


def test_chabauty_satisfied(capsys):
    desc = '{"kind":"D","n":3,"I":[1],"d":["0"]}'
    code, out, _ = run(capsys, "chabauty-verify", "--spec", '{"n":3,"a":[0,0,1],"b":[0,0,0]}', "--desc", desc)
    assert code == 0 and out["verdict"] == "SATISFIED"


@pytest.mark.parametrize("argv, code", [
    (["vertex", "--matrix", '[["1/0","0"],["0","1"]]'], "ZERO_DENOMINATOR"),
    (["cartan", "--matrix", '[["2","0"],["0","1"]]'], "NOT_UNIMODULAR"),
    (["cartan", "--matrix", '[["1","0"],["1"]]'], None),
    (["frobnicate"], "UNKNOWN_COMMAND"),
    (["cartan", "--matrix", "[[1,"], "BAD_JSON"),
    (["catalog", "--id", "borel"], None),
])
def test_error_codes(capsys, argv, code):
    rc, out, _ = run(capsys, *argv)
    assert rc == 2
    err = out["error"]
    assert set(err) == {"code", "message", "context"}
    if code is not None:
        assert err["code"] == code


def test_error_codes_are_distinct(capsys):
    codes = set()
    for argv in (["vertex", "--matrix", '[["1/0","0"],["0","1"]]'], ["cartan", "--matrix", '[["1","0"],["1"]]'],
                 ["frobnicate"], ["cartan", "--matrix", "[[1,"]):
        codes.add(run(capsys, *argv)[1]["error"]["code"])
    assert len(codes) == 4


def test_stdin_matrix(capsys, monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO('[["1","0"],["1/2","1"]]'))
    code, out, _ = run(capsys, "cartan", "--matrix", "-")
    assert code == 0 and out["nu"] == [-1, 1]


def test_tree_commands(capsys):
    _, out, _ = run(capsys, "tree", "neighbors")
    assert len(out["neighbors"]) == 3
    _, out, _ = run(capsys, "tree", "neighbors", "-p", "3")
    assert len(out["neighbors"]) == 4
    _, out, _ = run(capsys, "tree", "gap", "--end", '{"proj":["1","0"]}')
    assert out["gap"] == "2/3"
    _, out, _ = run(capsys, "tree", "measure", "--vertex", '[["2","0"],["0","1"]]')
    assert sorted(out["masses"].values()) == ["1/6", "1/6", "2/3"]
    _, out, _ = run(capsys, "tree", "busemann", "--vertex", '[["1","0"],["0","2"]]', "--end", '{"proj":["1","0"]}')
    assert out["busemann"] == -1
    _, out, _ = run(capsys, "tree", "end-member", "--end", '{"proj":["1","0"]}',
                    "--matrix", '[["2","0"],["0","1/2"]]', "--horo")
    assert out["member"] is False


def test_distal_commands(capsys):
    _, out, _ = run(capsys, "distal", "--matrix", '[["0","1"],["-1","0"]]')
    assert out["verdict"] is True
    _, out, _ = run(capsys, "distal", "--gens", '[[["2","0"],["0","1/2"]]]', "--trials", "5")
    assert out["verdict"] is False and len(out["counterexample"]) == 1
    _, out, _ = run(capsys, "distal", "--desc", '{"kind":"D","n":3,"I":[1],"d":["0"]}', "--trials", "300")
    assert out["verdict"] is True
    _, out, _ = run(capsys, "catalog", "--id", "torus-normalizer")
    assert out["passed"] and out["details"]["orbit_size"] == 6


def test_poly_and_facets(capsys):
    _, out, _ = run(capsys, "poly", "--seq", '["1/m", "m"]')
    assert out["limit"]["d"] == ["0", "inf"] and out["stratum"] == [1]
    _, out, _ = run(capsys, "facet-equal", "--x", '{"d":["1","inf"]}', "--y", '{"d":["2","inf"]}')
    assert out["equal"] is False and out["witness"]["side"] in ("left", "right")
    _, out, _ = run(capsys, "closed-orbit", "--n", "3")
    assert len(out["descriptors"]) == 6 and len(out["witnesses"]) == 15


def test_determinism_and_round_trip(capsys):
    argv = ["chabauty-verify", "--spec", '{"n":3,"a":[0,1,2],"b":[0,0,0]}',
            "--desc", '{"kind":"D","n":3,"I":[],"d":[]}', "--seed", "7"]
    _, first, raw1 = run(capsys, *argv)
    _, _, raw2 = run(capsys, *argv)
    assert raw1 == raw2
    assert json.dumps(first, sort_keys=True, separators=(",", ":")) == raw1.strip()
    _, pretty, raw3 = run(capsys, *argv, "--pretty")
    assert pretty == first and raw3 != raw1


def test_no_floats_in_output(capsys):
    _, _, raw = run(capsys, "tree", "measure", "--depth", "2")
    obj = json.loads(raw, parse_float=lambda s: pytest.fail(f"float in output: {s}"))
    assert obj["depth"] == 2
