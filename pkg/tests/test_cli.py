import csv
import io
import json

import pytest

from dforest.cli import main, parse_ops, pick_queries
from dforest.graph import EdgeListParseError
from dforest.serialize import load
from dforest.testkit import random_digraph


def run(*argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out=out)
    return code, out.getvalue()


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return p
    return write


CYCLE = "0 1\n1 2\n2 0\n"
TWO = CYCLE + "3 4\n4 5\n5 3\n"
JOINED = TWO + "2 3\n"


def test_build_three_cycle(files, tmp_path):
    g = files("c.txt", CYCLE)
    code, text = run("build", g, "-o", tmp_path / "c.dfi")
    assert code == 0
    assert "kmax: 1" in text and "index_bytes:" in text
    assert len(load(tmp_path / "c.dfi").trees) == 2


def test_builders_write_identical_files(files, tmp_path):
    g = files("g.txt", JOINED + "0 4\n4 0\n1 5\n")
    assert run("build", g, "-o", tmp_path / "a", "--method", "topdown")[0] == 0
    assert run("build", g, "-o", tmp_path / "b", "--method", "bottomup")[0] == 0
    assert (tmp_path / "a").read_bytes() == (tmp_path / "b").read_bytes()


def test_build_json(files, tmp_path):
    code, text = run("build", files("c.txt", CYCLE), "-o", tmp_path / "i", "--format", "json")
    rec = json.loads(text)
    assert rec["n"] == 3 and rec["method"] == "bottomup"


def test_build_errors(files, tmp_path):
    assert run("build", tmp_path / "missing.txt", "-o", tmp_path / "i")[0] == 2
    assert run("build", files("bad.txt", "0 1\nnope\n"), "-o", tmp_path / "i")[0] == 2


def test_query(files, tmp_path):
    run("build", files("t.txt", TWO), "-o", tmp_path / "t.dfi")
    code, text = run("query", tmp_path / "t.dfi", "--q", "0", "--k", "1", "--l", "1")
    assert code == 0
    assert text.splitlines()[0] == "0 1 2"
    assert "size: 3" in text
    code, text = run("query", tmp_path / "t.dfi", "--q", "0", "--k", "2", "--l", "1")
    assert code == 0 and text.startswith("(empty)")
    code, text = run("query", tmp_path / "t.dfi", "--q", "0", "--k", "1", "--l", "1", "--format", "json")
    assert json.loads(text)["community"] == ["0", "1", "2"]


def test_query_unknown_vertex(files, tmp_path):
    run("build", files("t.txt", TWO), "-o", tmp_path / "t.dfi")
    assert run("query", tmp_path / "t.dfi", "--q", "99", "--k", "1", "--l", "1")[0] == 3


def test_query_scsd(files, tmp_path):
    g = files("j.txt", JOINED)
    run("build", g, "-o", tmp_path / "j.dfi")
    code, text = run("query", tmp_path / "j.dfi", "--q", "0", "--k", "1", "--l", "1", "--scsd", "--graph", g)
    assert code == 0 and text.splitlines()[0] == "0 1 2"
    assert run("query", tmp_path / "j.dfi", "--q", "0", "--k", "1", "--l", "1", "--scsd")[0] == 2


def test_query_bad_index(files, tmp_path):
    run("build", files("c.txt", CYCLE), "-o", tmp_path / "c.dfi")
    data = bytearray((tmp_path / "c.dfi").read_bytes())
    data[30] ^= 1
    (tmp_path / "c.dfi").write_bytes(bytes(data))
    assert run("query", tmp_path / "c.dfi", "--q", "0", "--k", "1", "--l", "1")[0] == 2


def test_verify(files, tmp_path):
    g = files("c.txt", CYCLE)
    code, text = run("verify", g)
    assert code == 0 and "ok: True" in text
    run("build", g, "-o", tmp_path / "c.dfi")
    assert run("verify", g, "--index", tmp_path / "c.dfi")[0] == 0
    data = bytearray((tmp_path / "c.dfi").read_bytes())
    data[-1] ^= 0x40
    (tmp_path / "c.dfi").write_bytes(bytes(data))
    assert run("verify", g, "--index", tmp_path / "c.dfi")[0] == 2


def test_verify_stale_index(files, tmp_path):
    run("build", files("c.txt", CYCLE), "-o", tmp_path / "c.dfi")
    other = files("d.txt", "0 1\n1 2\n2 0\n1 0\n")
    code, text = run("verify", other, "--index", tmp_path / "c.dfi")
    assert code == 4 and "stored index differs" in text


def test_verify_seeded_graphs(tmp_path):
    from dforest.graph import write_edge_list

    for seed in range(3):
        p = tmp_path / f"g{seed}.txt"
        with open(p, "w") as fh:
            write_edge_list(random_digraph("uniform", 40, 0.1, seed), fh)
        assert run("verify", p, "--budget", 5000)[0] == 0


def test_bench(files):
    g = files("c.txt", TWO)
    code, text = run("bench", g, "--queries", 0)
    assert code == 0 and text.strip() == "query,size,idx_us,oracle_us,nodes_visited"
    code, first = run("bench", g, "--queries", 4, "--k", 1, "--seed", 3)
    rows = list(csv.DictReader(io.StringIO(first)))
    assert len(rows) == 4 and all(r["size"] == "3" for r in rows)
    _, second = run("bench", g, "--queries", 4, "--k", 1, "--seed", 3)
    assert [r["query"] for r in rows] == [r["query"] for r in csv.DictReader(io.StringIO(second))]


def test_pick_queries_fallback(caplog):
    g = random_digraph("uniform", 30, 0.1, 1)
    qs, used = pick_queries(g, 10, 8, 0)
    assert used < 8 and len(qs) == 10
    assert "is empty" in caplog.text


def test_maintain(files, tmp_path):
    g = files("p.txt", "0 1\n1 2\n")
    run("build", g, "-o", tmp_path / "p.dfi")
    ops = files("ops.txt", "+ 2 0\n")
    code, text = run("maintain", tmp_path / "p.dfi", g, ops, "--check-rebuild",
                     "-o", tmp_path / "q.dfi", "--graph-output", tmp_path / "q.txt")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(text)))
    assert rows[0]["op"] == "+ 2 0" and rows[0]["check"] == "ok"
    assert len(load(tmp_path / "q.dfi").trees) == 2
    assert "2 0" in (tmp_path / "q.txt").read_text()


def test_maintain_malformed_changes_nothing(files, tmp_path):
    g = files("p.txt", "0 1\n1 2\n")
    run("build", g, "-o", tmp_path / "p.dfi")
    before = (tmp_path / "p.dfi").read_bytes()
    ops = files("ops.txt", "+ 2 0\n* 1 2\n")
    assert run("maintain", tmp_path / "p.dfi", g, ops)[0] == 2
    assert (tmp_path / "p.dfi").read_bytes() == before


def test_maintain_stream_with_check(tmp_path):
    import random

    from dforest.graph import write_edge_list

    g = random_digraph("uniform", 30, 0.08, 5)
    gp = tmp_path / "g.txt"
    with open(gp, "w") as fh:
        write_edge_list(g, fh)
    run("build", gp, "-o", tmp_path / "g.dfi")
    rng = random.Random(5)
    lines = ["+v new", "+ new 3", "+ 4 new"]
    for _ in range(60):
        u, v = rng.sample(range(30), 2)
        lines.append(f"{rng.choice('+-')} {u} {v}")
    lines.append("-v 7")
    ops = tmp_path / "ops.txt"
    ops.write_text("\n".join(lines) + "\n")
    code, text = run("maintain", tmp_path / "g.dfi", gp, ops, "--check-rebuild")
    assert code == 0
    assert "DIVERGED" not in text


def test_parse_ops():
    assert parse_ops(["+ a b", "# c", "", "-v x"]) == [("+", "a", "b"), ("-v", "x")]
    with pytest.raises(EdgeListParseError):
        parse_ops(["+ a"])
