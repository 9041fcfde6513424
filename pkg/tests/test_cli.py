import io
import json
from pathlib import Path

import pytest

from k0forge.cli import main

DATA = Path(__file__).parent / "data"


def run(*argv, env=None, monkeypatch=None):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def test_fusion_example():
    code, text = run("fusion", "--p", "2", "--ell", "7")
    doc = json.loads(text)
    assert code == 0 and doc["schema"] == 1 and doc["ok"]
    assert doc["simples"] == 6 and doc["ring"]["labels"] == [f"T{i}" for i in range(6)]


def test_fusion_even():
    code, text = run("fusion", "--p", "3", "--ell", "7", "--even")
    assert json.loads(text)["ring"]["labels"] == ["T0", "T2", "T4"]


def test_fusion_rejects_ramified(capsys):
    code, _ = run("fusion", "--p", "5", "--ell", "5")
    assert code != 0
    assert "ramified" in capsys.readouterr().err


def test_unknown_flag_rejected():
    with pytest.raises(SystemExit) as info:
        main(["fusion", "--p", "2", "--ell", "7", "--bogus"])
    assert info.value.code == 2


def test_findell_example():
    code, text = run("findell", "--p", "2", "--q", "3", "--n", "1")
    doc = json.loads(text)
    assert code == 0
    assert {k: doc[k] for k in ("p", "q", "n", "ell", "ord")} == {"p": 2, "q": 3, "n": 1, "ell": 7, "ord": 3}
    assert doc["witness_poly"] in ([1, 1, 0, 1], [1, 0, 1, 1])


def test_findell_inconclusive_names_certificate():
    code, text = run("findell", "--p", "2", "--q", "11", "--n", "1", "--search-bound", "1")
    doc = json.loads(text)
    assert code == 1 and not doc["ok"] and doc["failed"].startswith("findell")


def test_output_is_deterministic():
    a = run("k0iso", "--p", "3", "--ell", "11")[1]
    b = run("k0iso", "--p", "3", "--ell", "11")[1]
    assert a == b and json.loads(a)["certificates"][0]["ok"]


def test_grid_threads_sorted_and_identical(monkeypatch):
    argv = ("k0iso", "--ell-max", "13", "--primes", "7,2,5")
    monkeypatch.setenv("K0FORGE_THREADS", "1")
    single = run(*argv)[1]
    monkeypatch.setenv("K0FORGE_THREADS", "4")
    threaded = run(*argv)[1]
    assert single == threaded
    certs = json.loads(single)["certificates"]
    keys = [(c["p"], c["ell"]) for c in certs]
    assert keys == sorted(keys) and len(keys) == 3 * 5 - 2


def test_gcdlemma_grid():
    code, text = run("gcdlemma", "--threads", "3")
    doc = json.loads(text)
    assert code == 0 and doc["checked"] == 6 * 6 * 4
    code, text = run("gcdlemma", "--p", "3", "--q", "2", "--n", "2")
    assert json.loads(text)["rows"] == [{"p": 3, "q": 2, "n": 2, "value": 2}]


def test_present_files():
    code, text = run("present", str(DATA / "z_half.json"))
    doc = json.loads(text)
    assert code == 0 and doc["inverted_primes"] == [2]
    assert [c["status"] for c in doc["checks"]] == ["equal", "distinct"]
    code, text = run("present", str(DATA / "real_cyclotomic_5.json"))
    assert code == 0 and json.loads(text)["versal"]["ok"]


def test_present_failure_names_relation():
    code, text = run("present", str(DATA / "bad_versal.json"))
    doc = json.loads(text)
    assert code == 1 and doc["failed"] == "versal(relation 0)"


def test_present_missing_file():
    code, _ = run("present", str(DATA / "missing.json"))
    assert code == 2


def test_density_formats():
    code, text = run("density", "--poly", "1,0,1", "--N", "200", "--format", "csv")
    lines = text.strip().splitlines()
    assert code == 0 and lines[0] == "prime,has_root" and lines[1] == "2,1" and lines[2] == "3,0"
    doc = json.loads(run("density", "--poly", "1,0,1", "--N", "10000")[1])
    assert 0.47 <= doc["empirical"] <= 0.53 and doc["predicted"] == "1/2"


def test_modp():
    code, text = run("modp", "--p", "19", "--ell", "5")
    doc = json.loads(text)
    assert code == 0 and doc["description"] == "F_19 x F_19"
    code, text = run("modp", "--p", "2", "--ell", "7")
    assert json.loads(text)["description"] == "F_2^3"


def test_table_format():
    code, text = run("fusion", "--p", "2", "--ell", "5", "--format", "table")
    assert code == 0 and text.splitlines()[0].startswith("command\t")
