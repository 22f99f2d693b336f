import csv
import io
import json
import math
import subprocess
import sys

import pytest

from bsseries.cli import PriceReport, compare_rows, main, self_check, table_rows
from bsseries.market import MarketParams, atm_forward_spot
from bsseries.series import SeriesConfig

REPORT_KEYS = {"spot", "strike", "rate", "vol", "tau", "method", "price", "max_n", "max_m",
               "abs_diff_vs_closed_form", "wall_time_ns"}


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows_of(text):
    return list(csv.reader(io.StringIO(text)))


def test_price_series_json(capsys):
    code, out, _ = run(capsys, "price", "--spot", "3800", "--strike", "4000", "--rate", "0.01",
                       "--vol", "0.2", "--tau", "1", "--method", "series")
    data = json.loads(out)
    assert code == 0 and set(data) == REPORT_KEYS
    assert data["price"] == pytest.approx(235.5135954, abs=1e-6)
    assert data["abs_diff_vs_closed_form"] <= 1e-6
    assert (data["max_n"], data["max_m"]) == (20, 20)
    assert isinstance(data["wall_time_ns"], int) and data["wall_time_ns"] >= 0


def test_price_degenerate_closed_form(capsys):
    code, out, _ = run(capsys, "price", "--vol", "0", "--method", "closed_form", "--spot", "4200",
                       "--strike", "4000", "--rate", "0", "--tau", "1")
    data = json.loads(out)
    assert code == 0 and data["price"] == 200.0
    assert data["max_n"] is None and data["max_m"] is None


@pytest.mark.parametrize("method", ["closed_form", "series", "brenner", "quadrature", "contour2d"])
def test_price_every_method(capsys, method):
    code, out, _ = run(capsys, "price", "--method", method, "--format", "csv")
    rows = rows_of(out)
    assert code == 0 and set(rows[0]) == REPORT_KEYS and len(rows) == 2
    price = float(rows[1][rows[0].index("price")])
    if method == "brenner":
        assert price == pytest.approx(0.4 * 3800 * 0.2, rel=1e-15)
    else:
        assert price == pytest.approx(235.5135954, abs=1e-3)


def test_price_atm_series(capsys):
    spot = atm_forward_spot(4000, 0.01, 1)
    code, out, _ = run(capsys, "price", "--method", "atm_series", "--spot", repr(spot))
    assert code == 0 and json.loads(out)["price"] == pytest.approx(315.45, abs=0.005)
    code, _, err = run(capsys, "price", "--method", "atm_series", "--spot", "3960.2")
    assert code == 3 and "ATM" in err


def test_price_domain_errors(capsys):
    code, _, err = run(capsys, "price", "--spot", "-5")
    assert code == 3 and "error" in err
    code, _, _ = run(capsys, "price", "--tau", "0", "--method", "series")
    assert code == 3
    code, _, _ = run(capsys, "price", "--spot", "4200", "--method", "contour2d")
    assert code == 3


def test_usage_errors(capsys):
    for argv in (["price", "--method", "nope"], ["price", "--spot", "abc"], ["frobnicate"], []):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 2
    code, _, err = run(capsys, "price", "--max-m", "0")
    assert code == 2 and "max_m" in err


def test_table1(capsys):
    code, out, _ = run(capsys, "table", "--max-n", "6", "--max-m", "7")
    rows = rows_of(out)
    assert code == 0
    assert rows[0] == ["n"] + [f"m={m}" for m in range(1, 8)]
    assert [r[0] for r in rows[1:]] == [str(n) for n in range(7)] + ["Call"]
    assert float(rows[1][1]) == pytest.approx(315.978, abs=5e-4)
    assert rows[4][1] == "0"  # (n, m) = (3, 1) is a Gamma pole
    assert float(rows[-1][-1]) == pytest.approx(235.514, abs=5e-4)


def test_table2(capsys):
    code, out, _ = run(capsys, "table", "--tau", "5", "--max-m", "9")
    assert code == 0 and float(rows_of(out)[-1][-1]) == pytest.approx(670.338, abs=5e-4)


def test_table_atm_leading_term(capsys):
    spot = atm_forward_spot(4000, 0.01, 1)
    code, out, _ = run(capsys, "table", "--spot", repr(spot))
    rows = rows_of(out)
    leading = spot * 0.2 / math.sqrt(2 * math.pi)
    assert code == 0 and float(rows[1][1]) == pytest.approx(leading, abs=1e-9)
    # with [log] = 0 the (n, 1) cell is (S/2) (-1)^n Z^(n+1) / (n! Gamma((3-n)/2))
    z = 0.2 / math.sqrt(2)
    assert float(rows[2][1]) == pytest.approx(-0.5 * spot * z * z, rel=1e-9)
    assert rows[4][1] == "0" and rows[6][1] == "0"


def test_table_full_precision_and_self_check(capsys):
    code, out, err = run(capsys, "table", "--self-check")
    assert code == 0 and err == ""
    header, rows = table_rows(MarketParams(3800, 4000, 0.01, 0.2, 1), SeriesConfig(6, 7))
    assert rows_of(out)[1][1] == format(rows[0][1], ".17g")
    assert float(rows_of(out)[1][1]) == rows[0][1]


def test_self_check_detects_tampering():
    header, rows = compare_rows([3800.0], [1.0], 4000.0, 0.01, 0.2, SeriesConfig())
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows([header, [format(x, ".17g") for x in rows[0]]])
    assert self_check(buf.getvalue(), header, rows) == []
    tampered = buf.getvalue().replace(format(rows[0][2], ".17g"), "235.51")
    assert self_check(tampered, header, rows)


@pytest.mark.parametrize("cmd", [["compare"], ["converge"], ["converge", "--tau", "5"], ["table", "--tau", "5"]])
def test_self_check_round_trip(capsys, cmd):
    code, _, err = run(capsys, *cmd, "--self-check")
    assert code == 0 and err == ""


def test_compare_defaults(capsys):
    code, out, _ = run(capsys, "compare")
    rows = rows_of(out)
    assert code == 0 and rows[0] == ["spot", "tau", "closed_form", "series", "abs_diff"]
    table = {(float(r[0]), float(r[1])): [float(x) for x in r[2:]] for r in rows[1:]}
    assert len(table) == 15 and all(v[2] <= 1e-6 for v in table.values())
    assert table[(3800.0, 5.0)][0] == pytest.approx(670.3385381, abs=5e-8)
    assert table[(4200.0, 1.0)][0] == pytest.approx(458.7930654, abs=5e-8)
    assert table[(4000.0, 3.0)][0] == pytest.approx(603.0304375, abs=5e-8)


@pytest.mark.parametrize("tau,m,expected", [(1, 3, 235.295), (5, 4, 669.082)])
def test_converge_traces(capsys, tau, m, expected):
    code, out, _ = run(capsys, "converge", "--tau", str(tau))
    rows = rows_of(out)
    assert code == 0 and rows[0] == ["m", "column_sum", "cumulative_price", "abs_error_vs_closed_form"]
    assert float(rows[m][2]) == pytest.approx(expected, abs=5e-4)
    errors = [float(r[3]) for r in rows[3:]]
    # non-increasing until the error reaches the rounding floor of the closed form
    for a, b in zip(errors, errors[1:]):
        assert b <= a or b < 1e-9


def test_validate_default(capsys):
    code, out, _ = run(capsys, "validate")
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 7 and all(line.startswith("PASS") for line in lines)


def test_validate_inadmissible_contour(capsys):
    code, _, err = run(capsys, "validate", "--c2", "1.5")
    assert code == 3 and "contour outside convergence polyhedron" in err


def test_validate_short_height_fails(capsys):
    code, out, _ = run(capsys, "validate", "--height", "5")
    assert code == 1 and "FAIL" in out


def test_bench(capsys):
    code, out, _ = run(capsys, "bench", "--repetitions", "2", "--grid-size", "5")
    rows = rows_of(out)
    assert code == 0 and rows[0] == ["method", "params_per_sec", "mean_ns", "p99_ns"]
    assert [r[0] for r in rows[1:]] == ["closed_form", "series"]
    assert all(float(r[1]) > 0 for r in rows[1:])
    code, out, _ = run(capsys, "bench", "--repetitions", "0")
    assert code == 0 and out == "method,params_per_sec,mean_ns,p99_ns\n"
    with pytest.raises(SystemExit) as exc:
        main(["bench", "--methods", "warp_drive"])
    assert exc.value.code == 2


def test_output_file(tmp_path, capsys):
    target = tmp_path / "t.csv"
    code, out, _ = run(capsys, "table", "--output", str(target))
    assert code == 0 and out == ""
    assert rows_of(target.read_text())[0][0] == "n"


def test_json_table(capsys):
    code, out, _ = run(capsys, "table", "--format", "json", "--max-n", "1", "--max-m", "2")
    data = json.loads(out)
    assert code == 0 and [d["n"] for d in data] == [0, 1, "Call"]


def test_report_dataclass():
    r = PriceReport(1.0, 1.0, 0.0, 0.1, 1.0, "series", 0.5, 20, 20, 0.0, 10)
    assert set(r.to_dict()) == REPORT_KEYS


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "bsseries", "price", "--method", "closed_form"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["price"] == pytest.approx(235.5135954, abs=1e-7)
    proc = subprocess.run([sys.executable, "-m", "bsseries", "price", "--spot", "-1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 3
