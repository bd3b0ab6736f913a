import json

import pytest

from collatz3k import table
from collatz3k.cli import EXIT_FAILURE, EXIT_IO, EXIT_OK, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def usage_code(capsys, *argv):
    with pytest.raises(SystemExit) as info:
        main(list(argv))
    capsys.readouterr()
    return info.value.code


def test_seq_examples(capsys):
    code, out, _ = run(capsys, "seq", "17", "--k", "1")
    assert code == EXIT_OK
    assert out.split() == "54 27 84 42 21 66 33 102 51 156 78 39 120 60 30 15 48 24 12 6 3".split()

    code, out, err = run(capsys, "seq", "9", "--k", "2")
    assert code == EXIT_OK and out == "" and "t=0" in err

    code, out, _ = run(capsys, "seq", "11", "--k", "4", "--format", "csv")
    values = [int(line.split(",")[1]) for line in out.splitlines()[1:]]
    assert values == [114, 57, 252, 126, 63, 270, 135, 486, 243, 810, 405, 1296, 648, 324, 162, 81]


def test_seq_json_and_budget_exit(capsys):
    code, out, _ = run(capsys, "seq", "27", "--budget", "10", "--format", "json")
    assert code == EXIT_FAILURE
    d = json.loads(out)
    assert d["status"] == "BudgetExhausted" and d["t"] is None and len(d["terms"]) == 10


def test_seq_usage_errors(capsys):
    assert usage_code(capsys, "seq", "0") == EXIT_USAGE
    assert usage_code(capsys, "seq", "x") == EXIT_USAGE
    assert usage_code(capsys, "nope") == EXIT_USAGE


def test_table_default_matches_golden(capsys):
    code, out, _ = run(capsys, "table")
    assert code == EXIT_OK and out == table.golden_text()


def test_table_single_column_and_usage(capsys):
    code, out, _ = run(capsys, "table", "--k", "0", "--n-max", "1")
    assert out.split()[2:] == ["1", "4", "2", "1"]
    assert usage_code(capsys, "table", "--n-max", "0") == EXIT_USAGE


def test_table_to_file(capsys, tmp_path):
    dest = tmp_path / "t.txt"
    code, out, _ = run(capsys, "table", "-o", str(dest))
    assert code == EXIT_OK and out == ""
    assert dest.read_bytes() == table.golden_text().encode()


def test_figdata_examples(capsys):
    code, out, _ = run(capsys, "figdata", "--k", "2", "--window", "32:35")
    lines = out.splitlines()
    assert lines[0] == "# figdata-schema: 1 k=2 window=32:35"
    assert lines[1] == "n,t,odd_count,tag"
    assert lines[2].startswith("32,10,") and lines[2].endswith(",Shortcut")
    assert lines[3] == "33,10,4,Standard" and lines[5] == "35,10,4,Standard"

    code, out, _ = run(capsys, "figdata", "--k", "2", "--window", "1:2")
    assert out.splitlines()[2:] == ["1,5,3,Shortcut", "2,6,3,Shortcut"]

    code, out, _ = run(capsys, "figdata", "--k", "0", "--window", "1:1")
    assert out.splitlines()[2:] == ["1,0,1,Short"]


def test_figdata_defaults_nine_datasets(capsys):
    code, out, _ = run(capsys, "figdata")
    headers = [ln for ln in out.splitlines() if ln.startswith("# figdata-schema")]
    assert len(headers) == 9
    assert sum(1 for ln in out.splitlines() if ln and ln[0].isdigit()) == 3 * (100 + 101 + 101)
    code, out, _ = run(capsys, "figdata", "--format", "json", "--k", "1", "--window", "5:6")
    d = json.loads(out)
    assert d["datasets"][0]["rows"][0] == {"n": 5, "t": 9, "odd_count": 4, "tag": "Standard"}


def test_check(capsys):
    code, out, _ = run(capsys, "check", "1:17", "--k", "3")
    assert code == EXIT_OK and "PASS=17 FAIL=0" in out
    code, out, _ = run(capsys, "check", "9:9", "--k", "2")
    assert code == EXIT_OK and "PASS=1" in out
    code, out, _ = run(capsys, "check", "27:27", "--budget", "5")
    assert code == EXIT_FAILURE and "UNRESOLVED=1" in out


def test_verify(capsys, tmp_path):
    code, out, _ = run(capsys, "verify", "--k", "2", "--start", "1", "--end", "100000", "--jobs", "1")
    assert code == EXIT_OK and "verified=100000 failed=0" in out
    assert usage_code(capsys, "verify", "--start", "1") == EXIT_USAGE
    code, _, err = run(capsys, "verify", "--start", "10", "--end", "5")
    assert code == EXIT_USAGE and "after end" in err


def test_verify_failure_dumps_trajectory(capsys):
    code, out, err = run(capsys, "verify", "--start", "25", "--end", "28", "--budget", "30",
                         "--format", "json", "--jobs", "1")
    assert code == EXIT_FAILURE
    assert json.loads(out)["totals"]["failed"] == 1
    assert "candidate n=27" in err and err.split("\n")[1].startswith("27 82 41")


def test_verify_checkpoint_resume(capsys, tmp_path):
    ck = str(tmp_path / "c.jsonl")
    argv = ["verify", "--k", "1", "--start", "1", "--end", "30000", "--chunk", "4000",
            "--checkpoint", ck, "--format", "json", "--jobs", "1"]
    _, first, _ = run(capsys, *argv)
    _, again, _ = run(capsys, *argv)
    a, b = json.loads(first), json.loads(again)
    for d in (a, b):
        del d["elapsed"], d["throughput"]
        for c in d["chunks"]:
            del c["elapsed"]
    assert a == b


def test_verify_io_error(capsys, tmp_path):
    code, _, err = run(capsys, "verify", "--start", "1", "--end", "10", "--jobs", "1",
                       "--checkpoint", str(tmp_path / "no" / "such" / "dir"))
    assert code == EXIT_IO and "checkpoint" in err


def test_spot(capsys):
    code, out, _ = run(capsys, "spot", "2^1000-1", "--format", "json")
    d = json.loads(out)
    assert code == EXIT_OK and d["t"] == 12157 and d["n_bits"] == 1000
    code, out, _ = run(capsys, "spot", "9*2^1000", "--k", "2")
    assert code == EXIT_OK and "t=1000" in out
    code, out, _ = run(capsys, "spot", "27", "--budget", "3")
    assert code == EXIT_FAILURE
