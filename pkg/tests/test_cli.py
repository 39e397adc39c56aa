import csv
import io
import re
import subprocess
import sys
import time

import pytest

from gk_secrecy import cli
from gk_secrecy.errors import NonConvergenceError
from gk_secrecy.sop_engine import SecrecyScenario, asop_distinct, asop_equal, sop_approx, sop_exact


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def parse_kv(line):
    return dict(re.findall(r"(\w+)=(\S+)", line))


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


SCEN = ("--kd", "2", "--md", "2.5", "--ke", "2", "--me", "2.5", "--snr-d-db", "20", "--snr-e-db", "15", "--rs", "1")


# -- eval ---------------------------------------------------------------------

def test_eval_reports_variance():
    code, out, _ = run("eval", *SCEN)
    assert code == 0
    kv = parse_kv(out)
    assert float(kv["sigma_e_sq"]) == pytest.approx(1100.0, abs=0.5)
    assert kv["validity_warning"] in ("true", "false")


def test_eval_all_methods():
    code, out, _ = run("eval", *SCEN, "--method", "all", "--mc-samples", "200000")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 4
    assert {ln.split()[0] for ln in lines} == {"approx", "exact-quadrature", "monte-carlo", "asymptotic-distinct"}
    exact = float(parse_kv(lines[1])["value"])
    s = SecrecyScenario.from_db(2, 2.5, 20, 2, 2.5, 15, 1)
    assert exact == pytest.approx(sop_exact(s).value, rel=1e-7)


@pytest.mark.parametrize("bad,flag", [(("--rs", "0"), "--rs"), (("--kd", "-1"), "--kd"), (("--snr-d-db", "nan"), "--snr-d-db")])
def test_eval_rejects_invalid_input(bad, flag):
    argv = list(SCEN)
    i = argv.index(bad[0])
    argv[i + 1] = bad[1]
    code, out, err = run("eval", *argv)
    assert code == 2 and out == ""
    assert flag in err


def test_eval_missing_flag_and_unknown_method():
    assert run("eval", "--kd", "2")[0] == 2
    assert run("eval", *SCEN, "--method", "magic")[0] == 2
    assert run("frobnicate")[0] == 2


def test_help_exits_zero(capsys):
    assert cli.main(["--help"]) == 0
    assert cli.main(["curve", "--help"]) == 0
    assert "--preset" in capsys.readouterr().out


def test_mc_command_is_reproducible():
    a = run("mc", *SCEN, "--mc-samples", "100000", "--seed", "3")
    b = run("mc", *SCEN, "--mc-samples", "100000", "--seed", "3", "--workers", "2")
    assert a[0] == 0 and a[1] == b[1]
    assert parse_kv(a[1])["samples"] == "100000"
    assert run("mc", *SCEN, "--mc-samples", "10")[0] == 2


# -- curve --------------------------------------------------------------------

def test_fig1_curve():
    code, out, _ = run("curve", "--preset", "fig1", "--snr-e-db", "5")
    assert code == 0
    table = rows(out)
    assert len(table) == 31
    assert list(table[0]) == list(cli.CSV_COLUMNS)
    exact = [float(r["sop_exact"]) for r in table]
    assert all(b <= a for a, b in zip(exact, exact[1:]))
    assert all(r["sop_mc"] == "" and r["validity_warning"] in ("true", "false") for r in table)


def test_fig1_requires_eve_snr():
    code, _, err = run("curve", "--preset", "fig1")
    assert code == 2 and "--snr-e-db" in err


def test_fig2_uses_distinct_asymptote():
    code, out, _ = run("curve", "--preset", "fig2", "--md", "0.5", "--start-db", "40", "--stop-db", "60",
                       "--step-db", "10", "--method", "asymptotic")
    assert code == 0
    for r in rows(out):
        s = SecrecyScenario.from_db(1.5, 0.5, float(r["snr_d_db"]), 1.5, 1.5, 0.0, 1.0)
        assert float(r["sop_asymptotic"]) == pytest.approx(asop_distinct(s).value, rel=1e-8)
        assert r["sop_exact"] == ""


@pytest.mark.parametrize("m", ["1", "2"])
def test_fig3_uses_equal_asymptote(m):
    code, out, _ = run("curve", "--preset", "fig3", "--md", m, "--start-db", "40", "--stop-db", "50",
                       "--step-db", "10", "--method", "asymptotic")
    assert code == 0
    for r in rows(out):
        s = SecrecyScenario.from_db(float(m), float(m), float(r["snr_d_db"]), 2, 2, 5.0, 1.0)
        assert float(r["sop_asymptotic"]) == pytest.approx(asop_equal(s).value, rel=1e-8)


def test_fig3_rejects_unsupported_shape():
    assert run("curve", "--preset", "fig3", "--md", "0.5", "--method", "asymptotic")[0] == 2
    assert run("curve", "--preset", "fig3", "--md", "2", "--kd", "1.5")[0] == 2


def test_curve_rows_round_trip():
    code, out, _ = run("curve", *SCEN, "--start-db", "0.1", "--stop-db", "3.1", "--step-db", "0.7",
                       "--method", "approx,exact")
    assert code == 0
    for r in rows(out):
        s = SecrecyScenario.from_db(2, 2.5, float(r["snr_d_db"]), 2, 2.5, 15, 1)
        assert r["sop_approx"] == cli._fmt(sop_approx(s).value)
        assert r["sop_exact"] == cli._fmt(sop_exact(s).value)


def test_curve_workers_do_not_change_output():
    argv = ("curve", "--preset", "fig1", "--snr-e-db", "0", "--stop-db", "6", "--method", "all",
            "--mc-samples", "20000")
    assert run(*argv)[1] == run(*argv, "--workers", "3")[1]


def test_curve_tiny_values_are_flagged():
    code, out, _ = run("curve", "--kd", "4", "--md", "4", "--ke", "1", "--me", "1", "--snr-e-db", "-20",
                       "--start-db", "80", "--stop-db", "81", "--method", "asymptotic")
    assert code == 0
    for r in rows(out):
        assert float(r["sop_asymptotic"]) == 0.0
        assert r["validity_warning"] == "true"


def test_curve_to_file(tmp_path):
    target = tmp_path / "c.csv"
    code, out, _ = run("curve", "--preset", "fig1", "--snr-e-db", "0", "--stop-db", "2", "--out", str(target))
    assert code == 0 and out == ""
    assert len(rows(target.read_text())) == 3
    assert run("curve", "--preset", "fig1", "--snr-e-db", "0", "--out", str(tmp_path / "no" / "x.csv"))[0] == 2


@pytest.mark.parametrize("argv", [("--step-db", "0"), ("--start-db", "5", "--stop-db", "1"), ("--method", "approx,nope")])
def test_curve_rejects_bad_sweep(argv):
    assert run("curve", "--preset", "fig1", "--snr-e-db", "0", *argv)[0] == 2


def test_non_convergence_exit_code(monkeypatch):
    def failing(s, *a, **k):
        if s.main.mean_snr > 5:
            raise NonConvergenceError("quadrature missed target")
        return sop_exact(s, *a, **k)

    monkeypatch.setattr(cli, "sop_exact", failing)
    code, out, err = run("curve", "--preset", "fig1", "--snr-e-db", "0", "--stop-db", "10")
    assert code == 3
    assert out == ""
    assert "numerical" in err


# -- config -------------------------------------------------------------------

def test_config_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nsnr-e-db = 5\nstop-db = 4  # trailing\nstep-db = 2\n")
    # config beats preset and default
    code, out, _ = run("curve", "--preset", "fig1", "--config", str(cfg), "--method", "approx")
    assert code == 0
    assert [float(r["snr_d_db"]) for r in rows(out)] == [0.0, 2.0, 4.0]
    # flag beats config
    out2 = run("curve", "--preset", "fig1", "--config", str(cfg), "--method", "approx", "--stop-db", "2")[1]
    assert [float(r["snr_d_db"]) for r in rows(out2)] == [0.0, 2.0]
    # preset from config, default step when nothing overrides it
    cfg.write_text("preset = fig1\nsnr-e-db = 5\nstop-db = 3\n")
    out3 = run("curve", "--config", str(cfg), "--method", "approx")[1]
    assert len(rows(out3)) == 4
    s = SecrecyScenario.from_db(2, 2.5, 3.0, 2, 2.5, 5, 1)
    assert float(rows(out3)[-1]["sop_approx"]) == pytest.approx(sop_approx(s).value, rel=1e-8)


@pytest.mark.parametrize("text", ["colour = blue\n", "preset = fig1\nout\n", "stop-db = ten\n", "preset = fig9\n"])
def test_config_errors(tmp_path, text):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(text)
    code, _, err = run("curve", "--config", str(cfg), "--snr-e-db", "0")
    assert code == 2 and "bad.cfg" in err


def test_config_key_must_belong_to_subcommand(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("preset = fig1\n")
    assert run("eval", *SCEN, "--config", str(cfg))[0] == 2
    assert run("eval", *SCEN, "--config", str(tmp_path / "missing.cfg"))[0] == 2


# -- validate -----------------------------------------------------------------

def test_validate_forced_failure():
    code, out, _ = run("validate", "--quick", "--debug-bad-tolerance", "variance_scalar")
    assert code == 1
    assert re.search(r"FAIL.*variance_scalar|variance_scalar.*FAIL", out)
    assert "some checks FAILED" in out
    assert run("validate", "--debug-bad-tolerance", "nope")[0] == 2


def test_validate_quick_is_fast_and_green():
    t0 = time.perf_counter()
    code, out, _ = run("validate", "--quick")
    assert time.perf_counter() - t0 < 60
    assert code == 0
    assert out.count("PASS") == len(cli.validation.CHECKS)


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gk_secrecy", "eval", *SCEN], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("approx")
