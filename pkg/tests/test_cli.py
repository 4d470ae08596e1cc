import csv
import math
import shutil
import subprocess
import sys

import pytest

from zerodepth.cli import EXIT_COND, EXIT_DATA, EXIT_OK, EXIT_USAGE, main


def run_main(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def csv_rows(text):
    return list(csv.reader(line for line in text.splitlines() if not line.startswith("#")))


def test_legendre_sweep_rows(capsys):
    code, out, _ = run_main(capsys, "legendre", "--family", "power", "--alpha", "0.5",
                            "--s-values", "0.1,0.01", "--reproducible")
    assert code == EXIT_OK
    rows = csv_rows(out)
    assert rows[0] == ["s", "y_s", "Q", "Q1", "Q2", "residual"]
    assert [float(v) for v in rows[1][:5]] == pytest.approx([0.1, 50, 5, -50, 1000])
    assert float(rows[2][2]) == pytest.approx(50.0)


def test_legendre_log_grid_and_header(capsys):
    code, out, _ = run_main(capsys, "legendre", "--family", "sqrt", "--s-start", "0.1",
                            "--s-stop", "0.001", "--s-count", "3")
    assert code == EXIT_OK
    assert out.startswith("# zerodepth ")
    rows = csv_rows(out)
    assert [float(r[1]) for r in rows[1:]] == pytest.approx([100, 1e4, 1e6])


def test_reproducible_output_is_byte_identical(tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"run{k}.csv"
        code = main(["legendre", "--family", "power", "--alpha", "0.3", "--s-values",
                     "0.05,0.005", "--reproducible", "--out", str(path)])
        assert code == EXIT_OK
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# power weight\nfamily = power\nalpha = 0.5\ns-values = 0.1\nreproducible = yes\n")
    code, out, _ = run_main(capsys, "legendre", "--config", str(cfg))
    assert code == EXIT_OK
    assert float(csv_rows(out)[1][1]) == pytest.approx(50.0)
    # flags on the command line win over the file
    code, out, _ = run_main(capsys, "legendre", "--config", str(cfg), "--s-values", "0.01")
    assert float(csv_rows(out)[1][1]) == pytest.approx(5000.0)


def test_bad_config_is_data_error(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("family power\n")
    assert run_main(capsys, "legendre", "--config", str(cfg))[0] == EXIT_DATA
    assert run_main(capsys, "legendre", "--config", str(tmp_path / "missing.cfg"))[0] == EXIT_DATA


@pytest.mark.parametrize("argv", [
    ["legendre"],
    ["legendre", "--family", "power", "--alpha", "1.5"],
    ["legendre", "--family", "power", "--majorant", "inv-power:1"],
    ["legendre", "--family", "power", "--s-start", "0.001", "--s-stop", "0.1"],
    ["legendre", "--family", "power", "--s-values", "0.1,abc"],
    ["legendre", "--family", "power", "--s-values=-1,0.1"],
    ["legendre", "--family", "nope"],
    ["asym", "compare", "--family", "power"],
    ["apps", "ls", "--family", "power"],
    ["frobnicate"],
])
def test_usage_errors(capsys, argv):
    assert run_main(capsys, *argv)[0] == EXIT_USAGE


def test_missing_sequence_file_is_data_error(tmp_path, capsys):
    code, _, err = run_main(capsys, "legendre", "--sequence", str(tmp_path / "none.txt"))
    assert code == EXIT_DATA
    assert "zerodepth:" in err


def test_asym_compare_laplace(capsys):
    code, out, _ = run_main(capsys, "asym", "compare", "--target", "laplace", "--family", "sqrt",
                            "--s-values", "0.1,0.01,0.001", "--reproducible")
    assert code == EXIT_OK
    rows = csv_rows(out)
    assert rows[0] == ["s", "log_asym", "log_oracle", "ratio_minus_1", "eta", "k_final", "tail_log"]
    assert float(rows[2][1]) == pytest.approx(108.173, abs=5e-4)
    assert out.rstrip().endswith("# trend: decreasing")


def test_asym_compare_fourier_with_nonpositive_s(capsys):
    code, out, _ = run_main(capsys, "asym", "compare", "--target", "fourier", "--family", "power",
                            "--alpha", "0.5", "--s-values=-1,0.1,0.01", "--reproducible")
    assert code == EXIT_OK
    rows = csv_rows(out)
    assert rows[0][:3] == ["s", "p", "log_oracle_abs"]
    assert float(rows[1][2]) == -math.inf
    assert float(rows[3][2]) == pytest.approx(-43.09, abs=0.1)
    assert "# trend: decreasing" in out


def test_asym_compare_bad_p(capsys):
    assert run_main(capsys, "asym", "compare", "--target", "fourier", "--family", "power",
                    "--p", "0.5", "--s-values", "0.1")[0] == EXIT_USAGE


def test_apps_poly_and_ls(capsys):
    code, out, _ = run_main(capsys, "apps", "poly", "--family", "power", "--alpha", "0.5",
                            "--s-values", "0.01,0.001", "--reproducible")
    assert code == EXIT_OK
    rows = csv_rows(out)
    assert rows[0] == ["s", "logQ_asym", "taylor_log", "lo_log", "hi_log", "bang_c"]
    assert [float(r[1]) for r in rows[1:]] == pytest.approx([-50, -500])
    code, out, _ = run_main(capsys, "apps", "ls", "--majorant", "inv-power:1",
                            "--s-values", "0.1,0.01", "--reproducible")
    assert code == EXIT_OK
    assert [float(r[1]) for r in csv_rows(out)[1:]] == pytest.approx([20, 200], rel=1e-4)


def test_apps_dc(capsys, tmp_path):
    seq = tmp_path / "fact2.txt"
    seq.write_text("\n".join(repr(2 * math.lgamma(n + 1)) for n in range(401)) + "\n")
    code, out, _ = run_main(capsys, "apps", "dc", "--sequence", str(seq),
                            "--s-values", "0.1", "--reproducible")
    assert code == EXIT_OK
    row = [float(v) for v in csv_rows(out)[1]]
    assert row[2] == pytest.approx(-7.921, abs=5e-4)
    assert row[1] < row[2]


def test_apps_dc_refuses_quasianalytic(capsys):
    code, _, err = run_main(capsys, "apps", "dc", "--family", "factorial", "--k", "1",
                            "--s-values", "0.1")
    assert code == EXIT_COND
    assert "refused" in err


def test_weight_describe(capsys):
    code, out, err = run_main(capsys, "weight", "describe", "--family", "power", "--alpha", "0.5",
                              "--y-grid", "1:100:3", "--reproducible")
    assert code == EXIT_OK
    assert "iii     pass" in err
    rows = csv_rows(out)
    assert len(rows) == 4
    assert float(rows[1][0]) == 1.0


def test_weight_describe_flags_failed_condition(capsys, tmp_path):
    seq = tmp_path / "fact.txt"
    seq.write_text("\n".join(repr(math.lgamma(n + 1)) for n in range(301)) + "\n")
    code, _, _ = run_main(capsys, "weight", "describe", "--sequence", str(seq),
                          "--y-grid", "1:10:2", "--reproducible")
    assert code == EXIT_COND


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "zerodepth.cli", "legendre", "--family", "power",
                           "--s-values", "0.1", "--reproducible"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0, proc.stderr
    assert proc.stdout.splitlines()[0] == "s,y_s,Q,Q1,Q2,residual"
    proc = subprocess.run([sys.executable, "-m", "zerodepth.cli", "bogus"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == EXIT_USAGE


def test_package_main_and_script():
    proc = subprocess.run([sys.executable, "-m", "zerodepth", "--version"],
                          capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0 and proc.stdout.strip()
    exe = shutil.which("zerodepth")
    if exe is None:
        pytest.skip("console script not on PATH")
    proc = subprocess.run([exe, "apps", "ls", "--majorant", "inv-power:1", "--s-values", "0.1",
                           "--reproducible"], capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0, proc.stderr
    assert float(proc.stdout.splitlines()[1].split(",")[1]) == pytest.approx(20, rel=1e-4)
