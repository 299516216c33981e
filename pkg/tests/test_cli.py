import json
from pathlib import Path

import pytest

from ftra.cli import main
from ftra.model import Instance, instance_from_json, instance_to_json, load_instance, load_solution, save_instance

DATA = Path(__file__).parent / "data"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def forced_file(tmp_path, forced):
    p = tmp_path / "forced.json"
    save_instance(forced, p)
    return p


def test_gen_is_reproducible(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(capsys, "gen", "--nf", 5, "--nc", 6, "--seed", 7, "-o", a)[0] == 0
    assert run(capsys, "gen", "--nf", 5, "--nc", 6, "--seed", 7, "-o", b)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    text = a.read_text()
    assert instance_to_json(instance_from_json(text)) == text


def test_gen_graph_family(tmp_path, capsys):
    p = tmp_path / "g.json"
    assert run(capsys, "gen", "--family", "graph", "--nf", 4, "--nc", 4, "--seed", 1, "-o", p)[0] == 0
    assert load_instance(p).n_f == 4


def test_gen_impossible(capsys):
    code, _, err = run(capsys, "gen", "--rmax", 99, "--nf", 1, "--Rmax", 1)
    assert code == 2 and "error" in err


def test_solve_forced(forced_file, capsys, tmp_path):
    out = tmp_path / "sol.json"
    code, text, _ = run(capsys, "solve", forced_file, "--alg", "apd", "-o", out)
    assert code == 0
    assert json.loads(text)[0]["cost"] == 21
    assert load_solution(out).y == (3,)


def test_pd_and_apd_write_same_file(tmp_path, capsys):
    inst = tmp_path / "i.json"
    run(capsys, "gen", "--nf", 6, "--nc", 6, "--seed", 3, "-o", inst)
    a, b = tmp_path / "pd.json", tmp_path / "apd.json"
    assert run(capsys, "solve", inst, "--alg", "pd", "-o", a)[0] == 0
    assert run(capsys, "solve", inst, "--alg", "apd", "-o", b)[0] == 0
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("alg", ["ulpr", "pd", "apd", "aga152", "reduce"])
def test_every_output_reverifies(alg, tmp_path, capsys):
    inst = tmp_path / "i.json"
    run(capsys, "gen", "--family", "graph", "--nf", 5, "--nc", 5, "--seed", 11, "-o", inst)
    sol = tmp_path / "s.json"
    assert run(capsys, "solve", inst, "--alg", alg, "-o", sol)[0] == 0
    code, text, _ = run(capsys, "solve", inst, "--verify-only", sol)
    assert code == 0 and json.loads(text)["feasible"]


def test_verify_only_flags_violation(forced_file, tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"y": [2], "x": [[3]]}))
    code, text, err = run(capsys, "solve", forced_file, "--verify-only", bad)
    assert code == 3
    assert not json.loads(text)["feasible"] and "x_ij <= y_i" in err


def test_pk_needs_k(forced_file, capsys):
    assert run(capsys, "solve", forced_file, "--alg", "pk")[0] == 2


def test_pk_with_seeds(forced_file, capsys):
    code, text, _ = run(capsys, "solve", forced_file, "--alg", "pk", "--k", 3, "--seeds", 4)
    assert code == 0
    summary = json.loads(text)["summary"]
    assert summary["mean_cost"] == 21 and summary["margin_4x"] == 4 * 21 - 21


def test_trace_lines(forced_file, tmp_path, capsys):
    tr = tmp_path / "t.jsonl"
    assert run(capsys, "solve", forced_file, "--alg", "apd", "--trace", tr)[0] == 0
    rows = [json.loads(line) for line in tr.read_text().splitlines()]
    assert rows and all({"t", "event", "site", "toc"} <= row.keys() for row in rows)


def test_lp_export(forced_file, tmp_path, capsys):
    lp = tmp_path / "m.lp"
    assert run(capsys, "solve", forced_file, "--lp-export", lp)[0] == 0
    assert "req_0" in lp.read_text()


def test_missing_file(capsys, tmp_path):
    assert run(capsys, "solve", tmp_path / "nope.json")[0] == 2


def test_garbled_file(capsys, tmp_path):
    p = tmp_path / "x.json"
    p.write_text("{not json")
    assert run(capsys, "solve", p)[0] == 2


def test_bad_flag():
    with pytest.raises(SystemExit) as e:
        main(["solve", "--alg", "nonsense", "x.json"])
    assert e.value.code == 2


def test_oracle_command(forced_file, capsys):
    code, text, _ = run(capsys, "oracle", forced_file)
    assert code == 0 and json.loads(text)["cost"] == 21


def test_oracle_budget(tmp_path, capsys):
    p = tmp_path / "i.json"
    run(capsys, "gen", "--nf", 8, "--nc", 8, "--seed", 2, "-o", p)
    assert run(capsys, "oracle", p, "--budget", 1)[0] == 4


def test_report_schema_golden(capsys):
    code, text, _ = run(capsys, "solve", DATA / "small.json", "--alg", "apd")
    assert code == 0
    rep = json.loads(text)
    for r in rep:
        r["wall_time"] = 0.0
        r["instance_id"] = "small.json"
    golden = json.loads((DATA / "report_apd_golden.json").read_text())
    assert rep == golden


def test_bench_json(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, text, _ = run(capsys, "bench", "--count", 3, "--nf", 4, "--nc", 4, "--alg", "ulpr", "--alg", "apd",
                        "--oracle", "--json", out)
    assert code == 0
    rows = json.loads(out.read_text())
    assert len(rows) == 6
    golden_keys = set(json.loads((DATA / "report_apd_golden.json").read_text())[0])
    assert all(set(r) == golden_keys for r in rows)
    assert [(r["instance_id"], r["algorithm"]) for r in rows] == [
        (i, a) for i in ("euclid-0", "graph-1", "euclid-2") for a in ("ulpr", "apd")]
    assert all(r["ratio_oracle"] >= 1 - 1e-9 and r["ratio_lp"] >= 1 - 1e-9 for r in rows)
    assert "ulpr" in text and "apd" in text


def test_bench_parallel_matches_serial(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["bench", "--count", 4, "--nf", 4, "--nc", 4, "--alg", "reduce"]
    assert run(capsys, *args, "--json", a)[0] == 0
    assert run(capsys, *args, "--jobs", 2, "--json", b)[0] == 0
    strip = lambda p: [{**r, "wall_time": 0} for r in json.loads(p.read_text())]  # noqa: E731
    assert strip(a) == strip(b)


def test_bench_empty(capsys):
    code, text, _ = run(capsys, "bench", "--count", 0)
    assert code == 0


def test_bench_pk_uniform(capsys):
    code, _, err = run(capsys, "bench", "--count", 3, "--nf", 4, "--nc", 4, "--uniform", "--alg", "pk",
                       "--seeds", 5)
    assert code == 0, err


def test_infeasible_instance_rejected(tmp_path, capsys):
    p = tmp_path / "i.json"
    p.write_text(instance_to_json(Instance([1], [[1]], [1], [1])).replace('"r": [1]', '"r": [5]'))
    assert run(capsys, "solve", p)[0] == 2
