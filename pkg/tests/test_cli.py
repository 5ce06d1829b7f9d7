import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from nftlab.cli import main
from nftlab.core import read_potential_csv


def _spec(tmp_path, obj, name="spec.json"):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return str(path)


def _rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_empty_spectrum_gives_zero_csv(tmp_path):
    spec = _spec(tmp_path, {})
    assert main(["inft", "--spectrum", spec, "--N", "64", "--out", str(tmp_path)]) == 0
    q = read_potential_csv(tmp_path / "potential.csv")
    assert q.grid.N == 64 and not np.any(q.q)
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["schema"] == "nftlab/1" and report["e_rel_q"] == 0


def test_sech_report_error(tmp_path):
    spec = _spec(tmp_path, {"rho": {"kind": "sech", "A_R": 0.4}})
    assert main(["inft", "--spectrum", spec, "--N", "4096", "--eps", "1e-12",
                 "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["e_rel_q"] < 1e-4
    assert report["grid"]["T2"] == pytest.approx(1.1 * np.log(0.8e12))
    assert report["config"]["N"] == 4096 and "version" in report


def test_rc_report_records_domain(tmp_path):
    spec = _spec(tmp_path, {"rho": {"kind": "rc", "A_rc": 20, "tau_s": 1, "beta": 0.5}})
    assert main(["inft", "--spectrum", spec, "--N", "512", "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["domain"]["T_eps"] == pytest.approx(137.6, abs=0.1)
    assert report["grid"]["T2"] == pytest.approx(137.6, abs=0.1)


def test_inft_is_deterministic(tmp_path):
    spec = _spec(tmp_path, {"rho": {"kind": "qpsk-rc", "N_sym": 4, "A_eff": 2}})
    outs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        assert main(["inft", "--spectrum", spec, "--N", "1024", "--seed", "7",
                     "--out", str(out)]) == 0
        outs.append((out / "potential.csv").read_bytes())
    assert outs[0] == outs[1]


def test_exit_codes(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["inft", "--spectrum", str(bad), "--out", str(tmp_path)]) == 2
    spec = _spec(tmp_path, {"rho": {"kind": "rc"}})
    # fast path needs a power of two
    assert main(["inft", "--spectrum", spec, "--N", "100", "--out", str(tmp_path)]) == 2
    # grid too coarse for the band
    assert main(["inft", "--spectrum", spec, "--N", "16", "--out", str(tmp_path)]) == 2
    assert main(["inft", "--spectrum", spec, "--N", "64", "--dt", "fdt",
                 "--T2", "5", "--out", str(tmp_path)]) == 2
    # Darboux overflow is a numerical failure
    huge = _spec(tmp_path, {"bound_states": [{"zeta": [0, 1e151], "b": [1, 0]}]},
                 "huge.json")
    assert main(["inft", "--spectrum", huge, "--N", "16", "--T2", "1",
                 "--out", str(tmp_path)]) == 3


def test_nft_round_trip(tmp_path):
    spec = _spec(tmp_path, {"rho": {"kind": "sech", "A_R": 0.4, "K": 1}})
    assert main(["inft", "--spectrum", spec, "--N", "2048", "--T2", "30",
                 "--out", str(tmp_path)]) == 0
    assert main(["nft", "--signal", str(tmp_path / "potential.csv"),
                 "--zeta", "0,0.9", "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "report.json").read_text())
    b = complex(*report["bound_states"][0]["b"])
    assert abs(b + 1) < 1e-3
    rows = _rows(tmp_path / "rho.csv")
    assert len(rows) == 8 * 2048
    assert set(rows[0]) == {"xi", "re_rho", "im_rho", "near_zero"}


def test_convergence_zero_spectrum(tmp_path):
    spec = _spec(tmp_path, {})
    assert main(["convergence", "--spectrum", spec, "--sweep", "64,128",
                 "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "convergence.csv")
    assert [float(r["e_rel_q"]) for r in rows] == [0.0, 0.0]
    assert {"N", "runtime_s", "order"} <= set(rows[0])


def test_convergence_forward_order(tmp_path):
    assert main(["convergence", "--sech", "4.4", "--scheme", "ia3",
                 "--sweep", "1024,2048,4096", "--out", str(tmp_path)]) == 0
    orders = [float(r["order"]) for r in _rows(tmp_path / "convergence.csv")[1:]]
    assert all(abs(o - 4) <= 0.5 for o in orders)


def test_domain_command(tmp_path, capsys):
    spec = _spec(tmp_path, {"rho": {"kind": "qpsk-rc", "N_sym": 16, "A_eff": 10}})
    assert main(["domain", "--spectrum", spec, "--seed", "1", "--out", str(tmp_path)]) == 0
    res = json.loads((tmp_path / "domain.json").read_text())
    assert res["T1"] == pytest.approx(-20 * res["T2"])
    assert res["provenance"]["method"] == "qpsk_domain"
    assert json.loads(capsys.readouterr().out)["T2"] == res["T2"]


def test_bench_smoke(tmp_path):
    assert main(["bench", "--sweep", "16,32", "--repeat", "1", "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "bench.csv")
    assert [int(r["N"]) for r in rows] == [16, 32]
    assert all(float(r["seconds"]) >= 0 for r in rows)


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "nftlab.cli", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip()
