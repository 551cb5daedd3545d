import csv
import io
import json
import subprocess
import sys

import pytest

from iruwb_tradeoff.cli import HEADER, main

SMALL = {
    "total_gain": 64,
    "num_users": 4,
    "noise_psd": 0.2,
    "coding": "uncoded",
    "sync": "chip",
    "tx_jitter": {"family": "uniform", "half_width": 25e-12},
    "factorizations": [[1, 64], [4, 16], [16, 4]],
    "label": "small",
}


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "small.json"
    path.write_text(json.dumps(SMALL))
    return str(path)


def test_fig4_analytic_rows(capsys):
    code, out, err = run(["--preset", "fig4", "--evaluators", "analytic"], capsys)
    assert code == 0 and err == ""
    assert out.splitlines()[0] == HEADER
    data = rows(out)
    assert len(data) == 40
    for r in data:
        assert r["mc_bep"] == r["mc_std_err"] == r["seed"] == r["symbols"] == ""
        assert int(r["N"]) == int(r["N_f"]) * int(r["N_c"]) == 512
        assert r["analytic_bep"] != ""
    assert {(r["coding"], r["sync"]) for r in data} == {
        ("coded", "symbol"), ("coded", "chip"), ("uncoded", "symbol"), ("uncoded", "chip")}


def test_number_format_has_nine_significant_digits(capsys):
    _, out, _ = run(["--preset", "fig4"], capsys)
    value = rows(out)[0]["analytic_bep"]
    mantissa = value.split("e")[0]
    assert len(mantissa.replace(".", "").lstrip("-")) == 9


def test_zero_symbols_with_mc_is_rejected(capsys):
    code, out, err = run(["--preset", "fig4", "--evaluators", "analytic,mc", "--symbols", "0"], capsys)
    assert code != 0 and out == ""
    assert "--symbols must be >= 1" in err


def test_custom_config_reproducible(small_config, capsys):
    argv = ["--preset", "custom", "--config", small_config, "--evaluators", "analytic,mc",
            "--symbols", "2000", "--seed", "7"]
    code1, out1, _ = run(argv, capsys)
    code2, out2, _ = run(argv, capsys)
    assert code1 == code2 == 0
    assert out1 == out2
    data = rows(out1)
    assert [r["N_f"] for r in data] == ["1", "4", "16"]
    assert all(r["symbols"] == "2000" and r["seed"] != "" for r in data)
    assert all(r["preset"] == "small" for r in data)


def test_worker_count_does_not_change_output(small_config, tmp_path, capsys):
    outs = []
    for w in (1, 4, 16):
        path = tmp_path / f"w{w}.csv"
        code, out, _ = run(["--preset", "custom", "--config", small_config, "--evaluators", "mc",
                            "--symbols", "3000", "--seed", "5", "--workers", str(w), "--out", str(path)],
                           capsys)
        assert code == 0 and out == ""
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] == outs[2]


@pytest.mark.parametrize("patch,needle", [
    ({"factorizations": [[3, 20]]}, "N = N_f * N_c"),
    ({"num_users": 3, "interferer_energies": [1.0]}, "num_users - 1"),
    ({"coding": "turbo"}, "coding must be one of"),
    ({"noise_psd": -1}, "noise_psd"),
    ({"bogus": 1}, "unknown config keys"),
    ({"tx_jitter": {"family": "laplace"}}, "unsupported jitter family"),
])
def test_invalid_config_names_invariant(tmp_path, capsys, patch, needle):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({**SMALL, **patch}))
    code, out, err = run(["--preset", "custom", "--config", str(path)], capsys)
    assert code != 0 and out == ""
    assert needle in err


def test_custom_needs_config(capsys):
    code, _, err = run(["--preset", "custom"], capsys)
    assert code != 0 and "--config" in err


def test_fig5_and_fig6_row_counts(capsys):
    _, out5, _ = run(["--preset", "fig5"], capsys)
    data5 = rows(out5)
    assert len(data5) == 160
    assert {r["preset"] for r in data5} == {f"fig5:sigma_n2={s}" for s in ("0.1", "0.05", "0.02", "0.01")}
    _, out6, _ = run(["--preset", "fig6"], capsys)
    data6 = rows(out6)
    assert len(data6) == 80
    assert {r["preset"] for r in data6} == {"fig6:uniform", "fig6:gaussian"}


def test_fig7_blank_rows_warn(capsys):
    code, out, err = run(["--preset", "fig7"], capsys)
    assert code == 0
    data = rows(out)
    assert len(data) == 20
    assert {r["case"] for r in data} == {"case1", "case2"}
    for r in data:
        assert int(r["N"]) == int(r["N_f"]) * int(r["N_c"])
        if int(r["N_c"]) < 10:
            assert r["analytic_bep"] == "" and r["jitter_term"] == ""
        else:
            assert r["analytic_bep"] != ""
    # N_f = 64..512 leave N_c < 10 for each of the two cases
    assert err.count("warning:") == 8


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "iruwb_tradeoff", "--preset", "fig4"], capture_output=True,
                         text=True, check=True)
    assert len(out.stdout.splitlines()) == 41
