import json
import random
import subprocess
import sys

import pytest

from fgcq.cli import EXIT_OK, EXIT_PARSE, EXIT_REFUSED, EXIT_RUNTIME, main
from fgcq.engine import brute_force_answers
from fgcq.generators import random_acyclic_query, random_database
from fgcq.storage import write_database

TRIANGLE = "q() :- R(x,y), S(y,z), T(z,x).\n"
STAR_BAR = "q(x1,x2) :- R1(x1,z), R2(x2,z).\n"
STAR_HAT = "q(x1,x2,z) :- R1(x1,z), R2(x2,z).\n"


def run(capsys, *argv):
    code = main(list(map(str, argv)))
    out = capsys.readouterr()
    return code, (json.loads(out.out) if code == EXIT_OK else None), out.err


@pytest.fixture
def star_db(tmp_path):
    (tmp_path / "bar.cq").write_text(STAR_BAR)
    (tmp_path / "hat.cq").write_text(STAR_HAT)
    db = tmp_path / "db"
    db.mkdir()
    (db / "R1.csv").write_text("a,1\nb,1\nc,2\n")
    (db / "R2.csv").write_text("d,1\ne,2\n")
    return tmp_path


def test_analyze_triangle(tmp_path, capsys):
    (tmp_path / "t.cq").write_text(TRIANGLE)
    code, rep, _ = run(capsys, "analyze", tmp_path / "t.cq")
    assert code == EXIT_OK
    assert rep["acyclic"] is False
    assert rep["classes"]["decide"]["tractable"] is False
    assert "Triangle" in rep["classes"]["decide"]["hypotheses"]


def test_analyze_star_and_single_atom(star_db, tmp_path, capsys):
    _, rep, _ = run(capsys, "analyze", star_db / "bar.cq")
    assert rep["acyclic"] is True and rep["free_connex"] is False
    (tmp_path / "one.cq").write_text("q(x,y,z) :- R(x,y,z).\n")
    _, rep, _ = run(capsys, "analyze", tmp_path / "one.cq")
    assert all(c["tractable"] for c in rep["classes"].values())


def test_parse_error_exit(tmp_path, capsys):
    (tmp_path / "bad.cq").write_text("q(x) :- R(x,\n")
    code, _, err = run(capsys, "analyze", tmp_path / "bad.cq")
    assert code == EXIT_PARSE and "parse error" in err


def test_count_refused_then_forced(star_db, capsys):
    code, _, err = run(capsys, "run", "--task", "count", star_db / "bar.cq", star_db / "db")
    assert code == EXIT_REFUSED and "free-connex" in err
    code, rep, _ = run(capsys, "run", "--task", "count", "--force-brute", star_db / "bar.cq", star_db / "db")
    assert code == EXIT_OK and rep["result"] == 3 and rep["algorithm"] == "brute-force"


def test_access_orders(star_db, capsys):
    code, rep, _ = run(capsys, "run", "--task", "access", "--order", "z,x1,x2", "--i", 1,
                       star_db / "hat.cq", star_db / "db")
    assert code == EXIT_OK and rep["algorithm"] == "lexicographic index"
    assert rep["result"]["answer"] == ["a", "d", "1"]
    code, _, _ = run(capsys, "run", "--task", "access", "--order", "x1,x2,z", "--i", 1,
                     star_db / "hat.cq", star_db / "db")
    assert code == EXIT_REFUSED
    code, _, _ = run(capsys, "run", "--task", "access", "--order", "z,x1,x2", "--i", 99,
                     star_db / "hat.cq", star_db / "db")
    assert code == EXIT_RUNTIME


def test_prefix_test(star_db, capsys):
    args = ["run", "--task", "test", "--order", "z,x1,x2", star_db / "hat.cq", star_db / "db"]
    _, rep, _ = run(capsys, *args, "--prefix", "2,c")
    assert rep["result"]["present"] is True
    _, rep, _ = run(capsys, *args, "--prefix", "2,a")
    assert rep["result"]["present"] is False


def test_missing_option(star_db, capsys):
    code, _, err = run(capsys, "run", "--task", "access", "--i", 1, star_db / "hat.cq", star_db / "db")
    assert code == EXIT_RUNTIME and "--order" in err


def test_boolean_matches_oracle(tmp_path, capsys):
    rng = random.Random(7)
    for k in range(20):
        q = random_acyclic_query(rng, head="none")
        db = random_database(q, rng, domain_size=4, max_tuples=30)
        (tmp_path / f"q{k}.cq").write_text(f"q() :- {', '.join(map(str, q.body))}.\n")
        write_database(db, tmp_path / f"db{k}")
        code, rep, _ = run(capsys, "run", "--task", "boolean", tmp_path / f"q{k}.cq", tmp_path / f"db{k}")
        assert code == EXIT_OK
        assert rep["result"] == bool(brute_force_answers(q, db))


def test_reduce_subcommands(tmp_path, capsys):
    (tmp_path / "k4.csv").write_text("4\n0,1\n0,2\n0,3\n1,2\n1,3\n2,3\n")
    (tmp_path / "c5.cq").write_text("q() :- A(a,b), B(b,c), C(c,d), D(d,e), E(e,a).\n")
    (tmp_path / "h.txt").write_text("3\n0,1,2\n0,1,3\n0,2,3\n1,2,3\n")
    (tmp_path / "a.txt").write_text("2\n0,1\n")
    (tmp_path / "b.txt").write_text("2\n1,0\n")
    (tmp_path / "s.txt").write_text("1,2\n3\n5\n")
    cases = [
        (["triangle", "--graph", tmp_path / "k4.csv", "--query", tmp_path / "c5.cq"], "query_true", True),
        (["hyperclique", "--hypergraph", tmp_path / "h.txt"], "query_true", True),
        (["kds", "--graph", tmp_path / "k4.csv", "--kprime", 2], "dominating_set", True),
        (["bmm", "--a", tmp_path / "a.txt", "--b", tmp_path / "b.txt"], "nonzeros", [[0, 0]]),
        (["threesum", "--input", tmp_path / "s.txt"], "threesum", True),
        (["clique-embedding", "--graph", tmp_path / "k4.csv"], "min_weight", None),
    ]
    for argv, key, expected in cases:
        code, out, _ = run(capsys, "reduce", *argv, "--check")
        assert code == EXIT_OK, argv
        assert out[key] == expected == out["oracle"]


def test_bench_tiny(tmp_path, capsys):
    out = tmp_path / "curve.csv"
    code, rep, _ = run(capsys, "bench", "yannakakis", "--sizes", "1e3,2e3,4e3", "--repeats", 1, "--out", out)
    assert code == EXIT_OK
    (curve,) = rep.values()
    assert len(curve["m"]) == 3 and "slope" in curve
    assert out.read_text().splitlines()[0] == "series,m,seconds"


def test_console_entry_point(tmp_path):
    (tmp_path / "t.cq").write_text(TRIANGLE)
    res = subprocess.run([sys.executable, "-m", "fgcq.cli", "analyze", str(tmp_path / "t.cq")],
                         capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["acyclic"] is False
