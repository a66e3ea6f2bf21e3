import json

import numpy as np
import pytest

from nestkit import covers, nets, serialize
from nestkit.cli import main
from nestkit.corpus import ExperimentConfig, generate_corpus, random_dsf, random_operator
from nestkit.intervals import Family, OrderMap, interval
from nestkit.nest import NestGrid


def roundtrip(obj, kind):
    return serialize.loads(serialize.dumps(obj), kind)


def test_roundtrips():
    P = Family.of((0, "1/3"), ("1/4", 2))
    assert roundtrip(P, "family") == P
    assert roundtrip(interval("-1/2", 3), "interval") == interval("-1/2", 3)
    c = covers.build_outer_cover(Family.of((0, 2), (1, 3)), interval(0, 3))
    assert roundtrip(c, "cover") == c
    theta = OrderMap(((0, 1), ("1/2", 5)))
    assert roundtrip(theta, "order_map") == theta
    g = NestGrid(5, (0, 2, 5), labels=(0, 1, 2))
    assert roundtrip(g, "grid") == g
    rng = np.random.default_rng(0)
    X = random_operator(rng, g, complex_entries=True)
    assert roundtrip(X, "operator") == X
    d = random_dsf(rng, g)
    assert roundtrip(d, "dsf") == d
    n = nets.canonical_nets(NestGrid.uniform(4), "radical")
    assert roundtrip(n, "net") == n


def test_dumps_is_deterministic_text():
    text = serialize.dumps(Family.of((0, 1)))
    assert text.endswith("\n") and text == serialize.dumps(Family.of((0, 1)))
    with pytest.raises(TypeError):
        serialize.to_jsonable(object())


def test_corpus_is_seeded():
    cfg = ExperimentConfig(seed=3, corpus_size=5)
    for kind in ("families", "grids", "operators", "dsfs", "chain_nets"):
        a = serialize.dumps(generate_corpus(cfg, kind))
        b = serialize.dumps(generate_corpus(cfg, kind))
        assert a == b
    other = ExperimentConfig(seed=4, corpus_size=5)
    assert serialize.dumps(generate_corpus(cfg, "operators")) != serialize.dumps(generate_corpus(other, "operators"))
    with pytest.raises(ValueError):
        ExperimentConfig(corpus_size=0)


@pytest.fixture
def files(tmp_path):
    def write(name, obj):
        path = tmp_path / name
        path.write_text(serialize.dumps(obj))
        return str(path)
    return write


def run_json(argv, capsys):
    code = main(argv + ["--json"])
    return code, json.loads(capsys.readouterr().out)


def test_cli_covers(files, capsys):
    fam = files("fam.json", Family.of((0, 2), (1, 3)))
    code, rep = run_json(["covers", "outer", "--family", fam, "--base", "0", "3"], capsys)
    assert code == 0 and rep["passed"]
    code, rep = run_json(["covers", "chain", "--family", fam, "--base", "0", "3"], capsys)
    assert code == 0
    code, _ = run_json(["covers", "chain", "--family", fam, "--base", "-1", "3"], capsys)
    assert code == 1


def test_cli_text_output_and_out_file(files, tmp_path, capsys):
    fam = files("fam.json", Family.of((0, 2), (1, 3)))
    assert main(["covers", "inner", "--family", fam, "--base", "0", "3"]) == 0
    text = capsys.readouterr().out
    assert "status: ok" in text and "[PASS]" in text
    out = tmp_path / "rep.json"
    assert main(["covers", "inner", "--family", fam, "--base", "0", "3", "--json", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["passed"]


def test_cli_usage_errors(tmp_path, capsys):
    assert main(["covers", "chain", "--family", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["covers", "chain", "--family", str(bad)]) == 2
    assert main(["no-such-command"]) == 2
    capsys.readouterr()


def test_cli_seminorms_and_nets(files, capsys):
    g = NestGrid.uniform(3)
    X = random_operator(np.random.default_rng(1), g)
    op = files("op.json", X)
    code, rep = run_json(["seminorms", "greatest", "--op", op, "--a", "2.0"], capsys)
    assert code == 0
    code, rep = run_json(["nets", "limit", "--op", op, "--kind", "compacts"], capsys)
    assert code == 0 and rep["outputs"]["estimate"] == pytest.approx(np.linalg.norm(X.entries, 2))
    net = files("net.json", nets.canonical_nets(g, "radical"))
    code, rep = run_json(["nets", "quotient", "--op", op, "--net", net], capsys)
    assert code == 0 and rep["outputs"]["difference"] <= 1e-9
    assert main(["nets", "limit"]) == 2
    code, rep = run_json(["quotient", "--op", op, "--partition", "0:1,1:3"], capsys)
    assert code == 0
    code, rep = run_json(["quotient", "--op", op, "--partition", "0:1,2:3"], capsys)
    assert code == 1 and "NotAPartition" in rep["error"]


def test_cli_witness_and_corpus(capsys):
    code, rep = run_json(["witness", "--cuts", "0,1,2", "--q", "0:1,1:2", "--targets", "0:2"], capsys)
    assert code == 0
    code, rep = run_json(["witness", "--cuts", "0,1,2", "--q", "0:2", "--targets", "0:1"], capsys)
    assert code == 1
    code, rep = run_json(["corpus", "--kind", "grids", "--corpus-size", "3"], capsys)
    assert code == 0


def test_cli_verify_small(capsys):
    code, rep = run_json(["verify", "4", "--corpus-size", "20"], capsys)
    assert code == 0 and rep["passed"]
