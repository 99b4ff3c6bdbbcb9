import json
import math
import os
import signal
import subprocess
import sys
import time
from pathlib import Path

import pytest

from zetagaps.cli import main, verify_file
from zetagaps.errors import CheckpointMismatch, ConfigError
from zetagaps.gap_stats import read_csv, summarize
from zetagaps.sweep import Route, SweepConfig, run_sweep


@pytest.fixture(scope="module")
def base_sweep(tmp_path_factory):
    out = tmp_path_factory.mktemp("sweep") / "base"
    assert main(["sweep", "--from-n", "2", "--to-n", "1000", "--route", "both",
                 "--out", str(out), "--checkpoint-every", "300"]) == 0
    return out


def test_sweep_rows_and_summary(base_sweep):
    lines = Path(f"{base_sweep}.csv").read_text().splitlines()
    assert lines[0].startswith("n,t_n,t_next,g,g_prime")
    assert len(lines) == 999
    summ = json.loads(Path(f"{base_sweep}.summary.json").read_text())
    assert summ["range"] == [2, 999]
    assert summ["violations"] == {"bound3": 0, "gpb1": 0, "hyp2": 0}
    assert summ["max_g_prime"] < 3
    mon = json.loads(Path(f"{base_sweep}.monitor.json").read_text())
    assert mon["h1_events"] == [] and mon["route_disagreements"] == []
    assert mon["max_route_diff"] < 1e-8


def test_csv_round_trip_summary(base_sweep):
    with open(f"{base_sweep}.csv") as fh:
        recs = list(read_csv(fh))
    assert summarize(recs).to_json() == json.loads(Path(f"{base_sweep}.summary.json").read_text())


def test_resume_after_stop_is_byte_identical(tmp_path, base_sweep):
    cfg = SweepConfig(n_lo=2, n_hi=1000, route=Route.BOTH, out=str(tmp_path / "r"),
                      checkpoint_every=300)
    run_sweep(cfg, stop_after=300)
    ck = json.loads(cfg.paths["checkpoint"].read_text())
    assert ck["last_n"] == 301
    # garbage after the checkpoint offset, as left by a kill mid-write
    with open(cfg.paths["data"], "a") as fh:
        fh.write("302,12")
    run_sweep(cfg)
    assert cfg.paths["data"].read_bytes() == Path(f"{base_sweep}.csv").read_bytes()
    assert cfg.paths["summary"].read_bytes() == Path(f"{base_sweep}.summary.json").read_bytes()
    assert cfg.paths["monitor"].read_bytes() == Path(f"{base_sweep}.monitor.json").read_bytes()


def test_sigkill_resume(tmp_path):
    out = tmp_path / "k"
    args = ["sweep", "--from-n", "2", "--to-n", "2500", "--route", "trans",
            "--checkpoint-every", "250", "--out", str(out)]
    ref = tmp_path / "ref"
    assert main(args[:-1] + [str(ref)]) == 0
    proc = subprocess.Popen([sys.executable, "-m", "zetagaps"] + args)
    ck = Path(f"{out}.ckpt.json")
    deadline = time.time() + 120
    while not ck.exists() and time.time() < deadline:
        time.sleep(0.05)
    os.kill(proc.pid, signal.SIGKILL)
    proc.wait()
    assert ck.exists()
    assert main(args) == 0
    assert Path(f"{out}.csv").read_bytes() == Path(f"{ref}.csv").read_bytes()
    assert Path(f"{out}.summary.json").read_bytes() == Path(f"{ref}.summary.json").read_bytes()


def test_checkpoint_mismatch(tmp_path, capsys):
    out = str(tmp_path / "m")
    cfg = SweepConfig(n_lo=2, n_hi=400, route=Route.TRANS, out=out, checkpoint_every=100)
    run_sweep(cfg, stop_after=100)
    other = SweepConfig(n_lo=2, n_hi=400, route=Route.TRANS, out=out, checkpoint_every=100,
                        ladder=(1e-3, 1e-4, 1e-5))
    with pytest.raises(CheckpointMismatch):
        run_sweep(other)
    code = main(["sweep", "--from-n", "2", "--to-n", "400", "--route", "trans",
                 "--delta-ladder", "1e-3,1e-4,1e-5", "--checkpoint-every", "100", "--out", out])
    assert code == 2
    assert "CONFIG" in capsys.readouterr().err
    # parallelism is not part of the identity
    run_sweep(SweepConfig(n_lo=2, n_hi=400, route=Route.TRANS, out=out, checkpoint_every=100,
                          parallelism=2))


def test_parallel_determinism(tmp_path):
    outs = []
    for p in (1, 2):
        cfg = SweepConfig(n_lo=990, n_hi=2100, route=Route.TRANS, parallelism=p,
                          out=str(tmp_path / f"p{p}"))
        run_sweep(cfg)
        outs.append((cfg.paths["data"].read_bytes(), cfg.paths["summary"].read_bytes()))
    assert outs[0] == outs[1]
    # rows on either side of a shard boundary share the boundary zero bit for bit
    assert verify_file(tmp_path / "p1.csv")["corrupted_rows"] == []
    cfg = SweepConfig(n_lo=990, n_hi=2100, route=Route.TRANS, checkpoint_every=300,
                      out=str(tmp_path / "r"))
    run_sweep(cfg, stop_after=600)
    assert json.loads(cfg.paths["checkpoint"].read_text())["last_n"] == 1589
    run_sweep(cfg)
    assert cfg.paths["data"].read_bytes() == outs[0][0]


def test_json_format(tmp_path):
    out = tmp_path / "j"
    assert main(["sweep", "--from-n", "2", "--to-n", "50", "--format", "json",
                 "--out", str(out)]) == 0
    rows = [json.loads(x) for x in Path(f"{out}.jsonl").read_text().splitlines()]
    assert [r["n"] for r in rows] == list(range(2, 50))
    assert set(rows[0]) >= {"n", "t_n", "t_next", "g", "g_prime", "a_n", "b_n", "db"}


def test_figures(tmp_path, base_sweep):
    out = str(tmp_path / "f")
    for which, col, line in ((1, "g_prime", 3.0), (2, "g", 3.18)):
        assert main(["figure", "--which", str(which), "--data", f"{base_sweep}.csv",
                     "--out", out]) == 0
        dat = Path(f"{out}.fig{which}.dat").read_text().splitlines()
        assert dat[0] == f"# n {col}" and len(dat) == 999
        side = json.loads(Path(f"{out}.fig{which}.dat.lines.json").read_text())
        assert side["reference_lines"] == [line]
    with open(f"{base_sweep}.csv") as fh:
        recs = list(read_csv(fh))
    f1 = Path(f"{out}.fig1.dat").read_text().splitlines()[1:]
    f2 = Path(f"{out}.fig2.dat").read_text().splitlines()[1:]
    for rec, a, b in list(zip(recs, f1, f2))[::37]:
        gp, g = float(a.split()[1]), float(b.split()[1])
        ratio = math.log(rec.t_n) / math.log(rec.t_n / (2 * math.pi * math.e))
        assert g / gp == pytest.approx(ratio, rel=1e-12)


def test_verify_clean(base_sweep):
    rep = verify_file(f"{base_sweep}.csv")
    assert rep["rows"] == 998 and rep["corrupted_rows"] == []
    assert rep["violations"]["gpb1"] == 0 and rep["violations"]["bound3"] == 0
    assert rep["reference_lines"] == {"3": True, "5": True}
    assert rep["h1_events"] == []
    maxima = [r["g_prime"] for r in rep["running_max_g_prime"]]
    assert maxima == sorted(maxima)


def test_verify_flags_corrupted_row(tmp_path, base_sweep):
    lines = Path(f"{base_sweep}.csv").read_text().splitlines()
    fields = lines[500].split(",")
    fields[4] = str(float(fields[4]) + 1e-3)
    lines[500] = ",".join(fields)
    bad = tmp_path / "bad.csv"
    bad.write_text("\n".join(lines) + "\n")
    rep = verify_file(bad)
    assert len(rep["corrupted_rows"]) == 1
    row = rep["corrupted_rows"][0]
    assert row["line"] == 501 and row["n"] == int(fields[0])
    assert row["problems"][0]["field"] == "g_prime"


def test_exit_codes(tmp_path, capsys):
    assert main(["sweep", "--from-n", "10", "--to-n", "5"]) == 2
    assert main(["sweep", "--family", "dirichlet:3:1", "--out", str(tmp_path / "x")]) == 2
    assert main(["verify", "--data", str(tmp_path / "missing.csv")]) == 4
    bad = tmp_path / "z.txt"
    bad.write_text("1.0\nnope\n")
    assert main(["lgaps", "--family", "cusp:12", "--ingest", str(bad), "--out", str(tmp_path / "l")]) == 4
    assert main(["euler-arg", "--t", "100", "--cutoff", "gonek", "--sigma", "0.5",
                 "--prime-cache", str(tmp_path / "p.bin")]) in (0,)
    with pytest.raises(SystemExit):
        main(["sweep", "--route", "sideways"])
    err = capsys.readouterr().err
    assert "error [CONFIG]" in err and "error [IO]" in err


def test_numeric_exit_code(tmp_path):
    # pushing the Gonek cutoff past the prime cap is a numeric failure
    assert main(["euler-arg", "--t", "1e5", "--prime-cache", str(tmp_path / "p.bin")]) == 3


def test_lgaps_dirichlet(tmp_path, capsys):
    out = tmp_path / "d"
    assert main(["lgaps", "--family", "dirichlet:4:1", "--to-t", "60", "--out", str(out)]) == 0
    summ = json.loads(Path(f"{out}.lgaps.summary.json").read_text())
    assert summ["family"] == "dirichlet:4:1" and summ["below_3"]
    rows = Path(f"{out}.lgaps.csv").read_text().splitlines()
    assert rows[0] == "n,t_n,t_next,gap" and len(rows) == summ["count"] + 1


def test_lgaps_ingest(tmp_path):
    zf = tmp_path / "zeros.txt"
    zf.write_text("# first zeta ordinates\n14.134725142\n21.022039639\n25.010857580\n30.424876126\n")
    out = tmp_path / "i"
    assert main(["lgaps", "--family", "zeta", "--ingest", str(zf), "--out", str(out)]) == 0
    summ = json.loads(Path(f"{out}.lgaps.summary.json").read_text())
    # the zeta normalization is negative below 2 pi e, so only t > 17.08 rows survive
    assert summ["count"] == 2 and summ["range"] == [2, 3]


def test_euler_arg_and_primes(tmp_path, capsys):
    cache = str(tmp_path / "p.bin")
    assert main(["primes", "--prime-cache", cache, "--count", "1000"]) == 0
    info = json.loads(capsys.readouterr().out)
    assert info["count"] >= 1000 and info["largest"] >= 7919
    assert main(["euler-arg", "--t", "20,40", "--cutoff", "100000", "--sigma", "2",
                 "--prime-cache", cache]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert [r["t"] for r in rows] == [20.0, 40.0]
    assert main(["euler-arg", "--t", "50", "--prime-cache", cache]) == 0
    row = json.loads(capsys.readouterr().out)[0]
    assert abs(row["euler_arg"] - row["tracked_arg"]) < 1.5


def test_config_validation():
    with pytest.raises(ConfigError):
        SweepConfig(n_lo=2, n_hi=10, ladder=(1e-3, 1e-4))
    with pytest.raises(ConfigError):
        SweepConfig(n_lo=0, n_hi=10)
