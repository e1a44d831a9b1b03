import subprocess
import sys

from cfmasim.cli import main
from cfmasim.gf2_codes import parse_alist, regular_ldpc, write_alist
from test_simharness import BASE


def test_region(capsys):
    assert main(["region", "--gains", "1,1.7320508075688772", "--power-db", "7.912"]) == 0
    out = capsys.readouterr().out
    assert "B'" in out and "0.97424" in out and "corner" in out


def test_region_csv(capsys):
    assert main(["region", "--gains", "1,1", "--power-db", "0", "3", "--csv"]) == 0
    assert len(capsys.readouterr().out.strip().split("\n")) == 3


def test_minpower(capsys):
    assert main(["minpower", "--gains", "1", "--rate", "0.9355"]) == 0
    assert abs(float(capsys.readouterr().out) - 6.57) < 0.15


def test_precision_exit_code(capsys):
    argv = ["region", "--gains", "1,1", "--family", "pam", "--L", "2", "--nodes", "2", "--power-db", "3"]
    assert main(argv) == 3
    assert "error" in capsys.readouterr().err


def test_validation_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text(BASE.replace("trials = 6", "trials = -5"))
    assert main(["ber", str(bad)]) == 2
    assert "line 19" in capsys.readouterr().err
    assert main(["minpower", "--gains", "1,1", "--rate", "1.5", "0.2"]) == 2
    assert main(["ber", str(tmp_path / "missing.cfg")]) == 2


def test_merge(tmp_path):
    H = regular_ldpc(96, 3, 6, seed=0)
    src = tmp_path / "base.alist"
    src.write_text(write_alist(H))
    out = tmp_path / "super.alist"
    assert main(["merge", str(src), "-o", str(out), "--merges", "4", "--seed", "1"]) == 0
    Hs = parse_alist(out.read_text())
    assert Hs.n == 96 and Hs.rank == H.rank - 4


def test_ber_and_encode_decode(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(BASE.replace("trials = 6", "trials = 2"))
    csv = tmp_path / "out.csv"
    assert main(["ber", str(cfg), "-o", str(csv), "--workers", "2"]) == 0
    text = csv.read_bytes()
    assert text.startswith(b"scenario,P_dB,stage") and b"\r" not in text
    assert "theoretical bound" in capsys.readouterr().err
    assert main(["encode-decode", str(cfg), "--noise-off", "--power-db", "20"]) == 0
    assert capsys.readouterr().out.count(": 0 bit errors") == 3


def test_console_script():
    r = subprocess.run([sys.executable, "-m", "cfmasim.cli", "region", "--gains", "1,1", "--power-db", "0"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "dominant face" in r.stdout
    r = subprocess.run([sys.executable, "-m", "cfmasim.cli", "nonsense"], capture_output=True, text=True)
    assert r.returncode == 2
