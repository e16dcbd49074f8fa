import subprocess
import sys

import pytest

from natpower.cli import main
from natpower.experiments import SERIES_HEADER
from natpower.io import format_matrix
from natpower.ltv import TRAJECTORY_COLUMNS, a_alpha


def _write_system(path, alpha=0.5):
    path.write_text(format_matrix(a_alpha(alpha)) + "\n0\n0\n1\n\n1,0,0\n")
    return path


def test_run_fig1(tmp_path, capsys):
    out = tmp_path / "fig1.csv"
    code = main(["run", "--experiment", "fig1", "--alpha", "0,0.5", "--max-iter", "5", "--out", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(SERIES_HEADER)
    assert len(lines) == 1 + 2 * 6
    assert float(lines[2].split(",")[3]) <= 1e-10
    assert "wrote 12 rows" in capsys.readouterr().out


def test_run_is_byte_identical(tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        main(["run", "--experiment", "fig4", "--alpha", "0.5", "--seed", "3", "--max-iter", "30", "--out", str(p)])
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_run_checks(tmp_path):
    out = tmp_path / "c.csv"
    assert main(["run", "--experiment", "lemma-checks", "--alpha", "0.2", "--out", str(out)]) == 0
    assert out.read_text().count(",pass") == 9


def test_eig(tmp_path, capsys):
    p = tmp_path / "a.csv"
    p.write_text(format_matrix(a_alpha(0.5)))
    assert main(["eig", "--matrix", str(p)]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "index,real,imag,modulus"
    assert out[1].startswith("1,1.0,0.0") and out[2].startswith("2,-1.0,0.0") and out[3].startswith("3,0.5,")
    assert out[4] == "# ties at 1/2"


def test_mor(tmp_path, capsys):
    assert main(["mor", "--system", str(_write_system(tmp_path / "s.csv")), "--r", "2"]) == 0
    out = capsys.readouterr().out
    assert "# U-side Ar" in out and "# V-side Cr" in out
    assert ",fail" not in out


def test_mor_bad_order(tmp_path, capsys):
    assert main(["mor", "--system", str(_write_system(tmp_path / "s.csv")), "--r", "3"]) == 2
    assert "--r" in capsys.readouterr().err


def test_ltv(tmp_path):
    out = tmp_path / "l.csv"
    assert main(["ltv", "--alpha", "0.2", "--horizon", "50", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(TRAJECTORY_COLUMNS) and len(lines) == 51


@pytest.mark.parametrize(
    "argv",
    [["eig", "--matrix", "/nonexistent/a.csv"],
     ["run", "--experiment", "fig1", "--alpha", "1.5", "--out", "x.csv"]],
)
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    assert "error" in capsys.readouterr().err


def test_parse_error_exit_2(tmp_path, capsys):
    p = tmp_path / "bad.csv"
    p.write_text("1,2\n3,x\n")
    assert main(["eig", "--matrix", str(p)]) == 2
    assert "line 2" in capsys.readouterr().err


def test_numerical_error_exit_1(tmp_path, capsys):
    p = tmp_path / "s.csv"
    p.write_text("1,1000000000000\n0,1\n\n1\n1\n\n1,1\n")
    assert main(["mor", "--system", str(p), "--r", "1"]) == 1
    assert "CrossGramSingular" in capsys.readouterr().err


def test_argparse_usage(capsys):
    with pytest.raises(SystemExit) as info:
        main(["run", "--experiment", "fig7", "--out", "x"])
    assert info.value.code == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "natpower", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("natpower ")
