import csv
import io
import json
import subprocess
import sys

import pytest

from primesums.cli import PRODUCT_COLUMNS, TABLE_COLUMNS, fmt, main, parse_grid, parse_params


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_parse_grid():
    assert parse_grid("1000:1000000:g10") == (1000, 10**4, 10**5, 10**6)
    assert parse_grid("1000,10000,100000") == (1000, 10000, 100000)
    assert parse_grid("1e3,1e4") == (1000, 10000)
    for bad in ("1000,100", "a:b:c", "10:100:x2", "10:100:g1", "", "10.5,20"):
        with pytest.raises(ValueError):
            parse_grid(bad)


def test_parse_params():
    assert parse_params(["m=1", "k=2"]) == {"m": 1.0, "k": 2.0}
    with pytest.raises(ValueError):
        parse_params(["m"])


def test_fmt():
    assert fmt(1000) == "1000"
    assert fmt(1 / 3) == "0.333333333333"
    assert fmt(1e20 / 3) == "3.33333333333e+19"


def test_table_csv(capsys):
    code, out, _ = run(capsys, "table", "--function", "one", "--grid", "1000:1000000:g10")
    assert code == 0
    assert out.endswith("\r\n")
    table = rows(out)
    assert tuple(table[0]) == TABLE_COLUMNS
    assert [int(r[0]) for r in table[1:]] == [10**3, 10**4, 10**5, 10**6]
    ratio = [abs(float(r[7]) - 1) for r in table[1:]]
    assert all(b < a for a, b in zip(ratio, ratio[1:]))
    assert table[-1][1] == "78498"


def test_table_log_and_recip(capsys):
    _, out, _ = run(capsys, "table", "--function", "log")
    exact_over_n = [abs(float(r[1]) / int(r[0]) - 1) for r in rows(out)[1:]]
    assert all(b < a for a, b in zip(exact_over_n, exact_over_n[1:]))
    _, out, _ = run(capsys, "table", "--function", "recip", "--grid", "1000000,2000000")
    import math
    exact = float(rows(out)[1][1])
    assert abs(exact - math.log(math.log(1e6))) < 1


def test_table_json_echo(capsys):
    code, out, _ = run(capsys, "table", "--function", "power", "--param", "m=0.5", "--grid", "1000,10000",
                       "--c", "2", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["columns"] == list(TABLE_COLUMNS)
    cfg = doc["config"]
    assert cfg["function"] == "power" and cfg["params"] == {"m": 0.5}
    assert cfg["grid"] == [1000, 10000] and cfg["c"] == 2.0
    assert {"c1", "c2", "epsilon", "theta", "rel_tol", "format", "command"} <= set(cfg)
    assert len(doc["rows"]) == 2


def test_determinism_and_jobs(capsys):
    args = ["table", "--function", "recip", "--grid", "1000:100000:g10"]
    outs = [run(capsys, *args)[1] for _ in range(2)]
    outs.append(run(capsys, *args, "--jobs", "2")[1])
    assert outs[0] == outs[1] == outs[2]


def test_out_file(tmp_path, capsys):
    path = tmp_path / "t.csv"
    code, out, _ = run(capsys, "table", "--grid", "1000,10000", "--out", str(path))
    assert code == 0 and out == ""
    assert path.read_bytes().startswith(b"n,exact,")
    assert b"\r\n" in path.read_bytes()


@pytest.mark.parametrize("argv", [
    ["table", "--function", "nope"],
    ["table", "--grid", "100,10"],
    ["table", "--c", "-1"],
    ["table", "--epsilon", "0.7"],
    ["table", "--function", "power", "--param", "m=-2"],
    ["table", "--jobs", "0"],
    ["conditions", "--grid", "1000,10000"],
    ["frobnicate"],
])
def test_usage_errors(capsys, argv):
    try:
        code = main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 2


def test_hypothesis_violation(capsys):
    code, _, err = run(capsys, "table", "--function", "log_over_t", "--grid", "1000,10000")
    assert code == 3
    assert "hypothesis" in err


def test_resource_limit(capsys):
    code, _, err = run(capsys, "table", "--function", "exp2", "--grid", "2000,3000")
    assert code == 4
    assert "resource" in err


def test_conditions(capsys):
    code, out, _ = run(capsys, "conditions", "--function", "recip", "--grid", "1000:1000000:g10")
    assert code == 0
    table = rows(out)
    assert table[0] == ["function", "check", "condition", "verdict", "n", "statistic"]
    assert {r[3] for r in table[1:]} == {"holds"}
    code, out, _ = run(capsys, "conditions", "--function", "exp2", "--grid", "1000:1000000:g10", "--format", "json")
    assert code == 3
    doc = json.loads(out)
    verdicts = {(v["check"], v["condition"]): v["verdict"] for v in doc["verdicts"]}
    assert verdicts[("necessary", "vanishing-last-term")] == "fails"


def test_product_bound(capsys):
    code, out, _ = run(capsys, "product-bound")
    assert code == 0
    table = rows(out)
    assert tuple(table[0]) == PRODUCT_COLUMNS
    assert [int(r[0]) for r in table[1:]] == [10**k for k in range(1, 8)]
    assert all(float(r[-1]) > 0 for r in table[1:])
    # theta(n) < n throughout this range, so even tiny constants leave positive slack
    code, out, _ = run(capsys, "product-bound", "--c1", "1e-6", "--c2", "1e-6", "--grid", "10,1000,100000")
    assert code == 0
    assert all(float(r[-1]) > 0 for r in rows(out)[1:])


def test_verify(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == 0
    table = rows(out)
    assert {r[0] for r in table[1:]} == {"abel", "parts"}
    assert all(r[-1] == "pass" for r in table[1:])


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "primesums", "product-bound", "--grid", "10,100"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == ",".join(PRODUCT_COLUMNS)
