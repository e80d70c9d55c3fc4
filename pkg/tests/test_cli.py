import json

import pytest

from rso.cli import RunManifest, main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def p3(tmp_path):
    path = tmp_path / "p3.txt"
    path.write_text("# n=3 colored=0 directed=0\n1 2\n2 3\n")
    return path


def test_verify_path3_reports_zero(capsys, p3):
    code, out, _ = run(capsys, "verify", "robustness", "--input", p3, "--exact")
    assert code == 0
    assert json.loads(out)["gamma_exact"] == "0"


def test_unknown_flag_is_usage_error(capsys, p3):
    code, _, err = run(capsys, "verify", "robustness", "--input", p3, "--exact", "--nope")
    assert code == 2 and "unrecognized" in err


def test_missing_seed_is_usage_error(capsys, tmp_path):
    code, _, _ = run(capsys, "gen", "dense", "--kind", "random", "--n", 5, "--out", tmp_path)
    assert code == 2


def test_validation_error_exits_one(capsys, tmp_path):
    code, _, err = run(capsys, "gen", "schreier", "--p", 9, "--out", tmp_path)
    assert code == 1 and "odd prime" in err


def test_schreier_artifacts_and_reproducibility(capsys, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(capsys, "gen", "schreier", "--p", 5, "--out", a)[0] == 0
    assert run(capsys, "--out", b, "gen", "schreier", "--p", 5)[0] == 0
    for name in ("schreier_p5_primary.json", "schreier_p5_secondary.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    man = RunManifest.from_dict(json.loads((a / "schreier_p5.manifest.json").read_text()))
    doc = json.loads((a / "schreier_p5_primary.json").read_text())
    assert doc["manifest"] == man.hash
    assert set(man.artifacts) == {"schreier_p5_primary.json", "schreier_p5_secondary.json"}


def test_verify_refuses_foreign_manifest(capsys, tmp_path):
    run(capsys, "gen", "schreier", "--p", 5, "--out", tmp_path)
    run(capsys, "gen", "dense", "--kind", "random", "--n", 6, "--seed", 1, "--out", tmp_path)
    ok = run(capsys, "verify", "self-ordered", "--input", tmp_path / "dense_random.json", "--manifest", tmp_path / "dense_random.manifest.json")
    assert ok[0] == 0
    bad = run(capsys, "verify", "self-ordered", "--input", tmp_path / "dense_random.json", "--manifest", tmp_path / "schreier_p5.manifest.json")
    assert bad[0] == 1 and "not produced" in bad[2]
    path = tmp_path / "dense_random.json"
    doc = json.loads(path.read_text())
    doc["edges"] = doc["edges"][1:]
    path.write_text(json.dumps(doc))
    tampered = run(capsys, "verify", "self-ordered", "--input", path, "--manifest", tmp_path / "dense_random.manifest.json")
    assert tampered[0] == 1 and "modified" in tampered[2]


def test_edgelist_artifacts_embed_hash(capsys, tmp_path):
    run(capsys, "gen", "schreier", "--p", 5, "--format", "edgelist", "--out", tmp_path)
    lines = (tmp_path / "schreier_p5_primary.txt").read_text().splitlines()
    assert lines[0].startswith("# n=6") and lines[1].startswith("# manifest=")
    code, out, _ = run(capsys, "verify", "robustness", "--exact", "--input", tmp_path / "schreier_p5_primary.txt",
                       "--manifest", tmp_path / "schreier_p5.manifest.json")
    assert code == 0 and json.loads(out)["gamma_exact"] == "5/3"


def test_three_step_and_local_order(capsys, tmp_path):
    code, out, _ = run(capsys, "gen", "three-step", "--n", 48, "--ell", 12, "--dprime", 3, "--seed", 0, "--local-code", "--augment", "--out", tmp_path)
    assert code == 0 and json.loads(out)["augmented_n"] == 1344
    args = ["order", "local", "--graph", tmp_path / "three_step_augmented.json", "--params", tmp_path / "three_step.params.json"]
    code, out, _ = run(capsys, *args, "--vertex", 7)
    doc = json.loads(out)
    assert code == 0 and doc["image"] == 7 and doc["queries"] <= doc["budget"]
    code, out, _ = run(capsys, *args, "--vertex", 7, "--reverse", 900)
    assert code == 0 and json.loads(out)["preimage"] == 900
    code, out, _ = run(capsys, "order", "local", "--graph", tmp_path / "three_step.json", "--params", tmp_path / "three_step.params.json", "--vertex", 3)
    assert code == 0 and json.loads(out)["image"] == 3


def test_reduce_round_trips(capsys, tmp_path):
    run(capsys, "gen", "dense", "--kind", "random", "--n", 6, "--seed", 3, "--out", tmp_path)
    base = tmp_path / "dense_random.json"
    assert run(capsys, "reduce", "encode-bd", "--base", base, "--string", "101101", "--out", tmp_path)[0] == 0
    code, out, _ = run(capsys, "reduce", "decode-bd", "--base", base, "--input", tmp_path / "encoded_bd.json")
    assert code == 0 and json.loads(out)["string"] == "101101"
    code, out, _ = run(capsys, "reduce", "query-log", "--base", base, "--string", "101101", "--seed", 0, "--out", tmp_path)
    doc = json.loads(out)
    assert code == 0 and doc["string_queries"] <= doc["graph_queries"]
    log = json.loads((tmp_path / "query_log.json").read_text())
    assert len(log["events"]) == 1000
    assert run(capsys, "reduce", "encode-bd", "--base", base, "--string", "10x", "--out", tmp_path)[0] == 1


def test_reduce_dense(capsys, tmp_path):
    run(capsys, "gen", "dense", "--kind", "random", "--n", 4, "--seed", 7, "--out", tmp_path / "s")
    run(capsys, "gen", "dense", "--kind", "random", "--n", 40, "--seed", 2, "--out", tmp_path / "b")
    small, big = tmp_path / "s" / "dense_random.json", tmp_path / "b" / "dense_random.json"
    code, out, err = run(capsys, "reduce", "encode-dense", "--small", small, "--big", big, "--string", "1010,0110,0001,1111", "--out", tmp_path)
    assert code == 0, err
    code, out, err = run(capsys, "reduce", "decode-dense", "--small", small, "--big", big, "--input", tmp_path / "encoded_dense.json")
    assert code in (0, 1)
    if code == 0:
        assert json.loads(out)["string"] == "1010,0110,0001,1111"


def test_transform_chain(capsys, tmp_path):
    src = tmp_path / "m.json"
    src.write_text(json.dumps({"n": 2, "colored": True, "directed": False, "edges": [[1, 1, 1], [2, 2, 2], [1, 2, 3]]}))
    code, out, _ = run(capsys, "transform", "gadgetize", "--input", src, "--seed", 0, "--out", tmp_path)
    assert code == 0 and json.loads(out)["n"] == 20
    d = tmp_path / "d.json"
    d.write_text(json.dumps({"n": 3, "colored": True, "directed": True, "edges": [[1, 2, 1], [2, 3, 1], [3, 1, 1], [1, 1, 2], [2, 3, 2]]}))
    code, out, _ = run(capsys, "transform", "directed-to-undirected", "--input", d, "--out", tmp_path)
    assert code == 0 and json.loads(out)["n"] == 8
    code, _, err = run(capsys, "transform", "directed-to-undirected", "--input", src, "--out", tmp_path)
    assert code == 1 and "expected" in err


def test_robustness_report_writes_csv_and_figures(capsys, tmp_path):
    run(capsys, "gen", "dense", "--kind", "random", "--n", 12, "--seed", 0, "--out", tmp_path)
    rep = tmp_path / "rep"
    code, out, _ = run(capsys, "verify", "robustness", "--input", tmp_path / "dense_random.json", "--adversarial", "--seed", 0, "--samples", 300, "--report", rep)
    assert code == 0
    assert (rep / "robustness.csv").read_text().startswith("moved,ratio")
    assert (rep / "robustness_ratios.png").stat().st_size > 0
    assert (rep / "robustness_degrees.png").stat().st_size > 0


def test_adversarial_requires_seed(capsys, p3):
    assert run(capsys, "verify", "robustness", "--input", p3, "--adversarial")[0] == 2


def test_threads_env_override(capsys, monkeypatch, tmp_path):
    monkeypatch.setenv("RSO_THREADS", "3")
    code, out, _ = run(capsys, "demo", "--criteria", "9", "--report", tmp_path, "--threads", 1)
    assert code == 0
    assert json.loads((tmp_path / "acceptance.json").read_text())["threads"] == 3
    assert (tmp_path / "acceptance_timing.png").exists()
    monkeypatch.setenv("RSO_THREADS", "many")
    assert run(capsys, "demo", "--criteria", "9")[0] == 2


def test_demo_exit_code_tracks_failures(capsys):
    code, out, _ = run(capsys, "demo", "--criteria", "4")
    assert code == 1 and "[FAIL]  4" in out
