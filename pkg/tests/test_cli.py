import pytest
from click.testing import CliRunner

from decflow.cli import main

GRAPH = """\
p 5 6
n 1 4 1
n 2 3 2
n 3 5 1
e 0 1 1
e 1 4 2
e 0 2 1
e 2 4 1
e 0 3 3
e 3 4 1
"""

UPDATES = """\
# one deletion, one increase
d 2 4
i 0 1 5
"""


@pytest.fixture
def files(tmp_path):
    g = tmp_path / "g.txt"
    u = tmp_path / "u.txt"
    g.write_text(GRAPH)
    u.write_text(UPDATES)
    return tmp_path, str(g), str(u)


def run(*args, env=None):
    return CliRunner().invoke(main, list(args), env=env)


def test_sssp_report(files):
    _, g, u = files
    res = run("sssp", g, u, "-s", "0", "--verify")
    assert res.exit_code == 0, res.output
    lines = res.output.splitlines()
    assert lines[1] == "sources 0"
    assert lines[2] == "updates 2"
    assert "d 4 4.000000000" in lines
    assert "d 1 5.000000000" in lines
    assert "violations 0" in lines


def test_sssp_es_backend_and_files(files):
    tmp, g, u = files
    rep, tr = tmp / "rep.txt", tmp / "trace.txt"
    res = run("sssp", g, u, "-s", "0", "--backend", "es", "--report", str(rep), "--trace", str(tr))
    assert res.exit_code == 0
    assert rep.read_text() == res.output
    assert tr.read_text().splitlines() == ["update 1 d 2 4", "update 2 i 0 1"]


def test_flow_bounded_with_dump(files):
    tmp, g, _ = files
    dump = tmp / "f.txt"
    res = run("flow", g, "--s", "0", "--t", "4", "--budget", "10", "--oracle", "--dump", str(dump))
    assert res.exit_code == 0, res.output
    out = dict(line.split(" ", 1) for line in res.output.splitlines())
    assert out["feasible"] == "conservation=true capacity=true budget=true"
    assert out["budget"] == "10.000000000"
    assert float(out["cost"]) <= 10 + 1e-9
    for line in dump.read_text().splitlines():
        tag, a, b, x = line.split()
        assert tag == "f" and float(x) > 0 and len(x.split(".")[1]) == 9


def test_flow_dump_to_stdout(files):
    _, g, _ = files
    res = run("flow", g, "--s", "0", "--t", "4", "--budget", "5", "--dump", "-")
    assert res.exit_code == 0
    assert any(line.startswith("f 0 ") for line in res.output.splitlines())


def test_seed_from_environment(files):
    _, g, _ = files
    a = run("flow", g, "--s", "0", "--t", "4", "--budget", "5", env={"DECFLOW_SEED": "7"})
    b = run("flow", g, "--s", "0", "--t", "4", "--budget", "5", "--seed", "7")
    c = run("flow", g, "--s", "0", "--t", "4", "--budget", "5", "--seed", "3", env={"DECFLOW_SEED": "7"})
    assert "seed=7" in a.output.splitlines()[0]
    assert a.output == b.output
    assert "seed=3" in c.output.splitlines()[0]


def test_reruns_are_identical(files):
    _, g, u = files
    for args in (["sssp", g, u, "-s", "0", "-s", "3", "--verify"],
                 ["flow", g, "--s", "0", "--t", "4", "--budget", "6", "--dump", "-"]):
        assert run(*args).output == run(*args).output


@pytest.mark.parametrize("args", [
    ["sssp", "{g}", "{u}"],
    ["sssp", "{g}", "{u}", "-s", "9"],
    ["sssp", "{g}", "{u}", "-s", "0", "--eps", "1.5"],
    ["sssp", "{g}", "missing.txt", "-s", "0"],
    ["flow", "{g}", "--s", "0", "--t", "9", "--budget", "1"],
    ["flow", "{g}", "--s", "0", "--t", "0", "--budget", "1"],
    ["flow", "{g}", "--s", "0", "--t", "4", "--budget", "-1"],
    ["verify", "no-such-suite"],
    ["verify", "es-exact", "--seeds", "x"],
])
def test_usage_errors_exit_2(files, args):
    _, g, u = files
    res = run(*[a.format(g=g, u=u) for a in args])
    assert res.exit_code == 2


def test_parse_error_exit_2(files):
    tmp, _, u = files
    bad = tmp / "bad.txt"
    bad.write_text("p 2 1\ne 0 1 zero\n")
    res = run("sssp", str(bad), u, "-s", "0")
    assert res.exit_code == 2
    assert "bad.txt:2" in res.output


def test_bad_update_exit_2(files):
    tmp, g, _ = files
    upd = tmp / "u2.txt"
    upd.write_text("d 0 4\n")
    assert run("sssp", g, str(upd), "-s", "0").exit_code == 2
    upd.write_text("i 0 1 0.5\n")
    assert run("sssp", g, str(upd), "-s", "0").exit_code == 2


def test_verify_suite(files):
    res = run("verify", "es-exact", "--seeds", "3")
    assert res.exit_code == 0
    assert res.output.startswith("PASS es-exact runs=3 failures=0")
    res = run("verify", "reductions", "--seeds", "5:8")
    assert res.exit_code == 0 and "runs=3" in res.output
