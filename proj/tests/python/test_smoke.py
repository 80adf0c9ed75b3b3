import json
import math
import os
import subprocess

import numpy as np
import pytest

import pontryagin as p

SEMI = {"kind": "semicircle", "s": 1.0}


def test_gznt_semicircle():
    g = p.gznt(SEMI)
    assert g["kind"] == "interior"
    assert abs(g["point"] - 1j / math.sqrt(2)) < 1e-12
    assert abs(p.q_eval(SEMI, 1j / math.sqrt(2))) < 1e-12


def test_gznt_methods_agree_on_atoms():
    rng = np.random.default_rng(4)
    for _ in range(20):
        atoms = sorted(rng.normal(size=5).tolist())
        weights = rng.uniform(0.1, 1.0, size=5).tolist()
        mu = {"kind": "discrete", "atoms": atoms, "weights": weights}
        a = float(rng.normal())
        g1 = p.gznt(mu, a=a, method="newton")
        g2 = p.gznt(mu, a=a, method="discrete")
        assert abs(g1["point"] - g2["point"]) < 1e-6


def test_stieltjes_against_numpy():
    mu = {"kind": "discrete", "atoms": [-1.0, 0.5], "weights": [0.25, 0.75]}
    z = 0.2 + 0.7j
    expected = 0.25 / (-1.0 - z) + 0.75 / (0.5 - z)
    assert abs(p.stieltjes(mu, z) - expected) < 1e-14
    with pytest.raises(ValueError):
        p.gznt(mu, method="bisection")


def test_classification_matches_numpy():
    spec = {"model": "signed_wigner", "N": 40, "s": 1.0, "seed": 8}
    a, b, c = p.sample(spec, trial=2)
    x = p.assemble(a, b, c)
    assert p.is_h_selfadjoint(x)
    cc = p.nonpositive_type_eigenvalue(a, b, c)
    h = np.diag([-1.0] + [1.0] * len(b))
    lam, vec = np.linalg.eig(x)
    norms = [np.real(np.conj(v) @ h @ v) / np.real(np.conj(v) @ v) for v in vec.T]
    k = int(np.argmin(abs(lam - cc["beta"])))
    assert abs(lam[k] - cc["beta"]) < 1e-8
    assert norms[k] <= 1e-10
    assert sum(n <= 1e-10 for n in norms) <= 2


def test_schur_identity_numpy():
    spec = {"model": "signed_wigner", "N": 30, "s": 1.0, "seed": 1}
    a, b, c = p.sample(spec)
    x = p.assemble(a, b, c)
    z = 0.4 + 1.1j
    h = np.diag([-1.0] + [1.0] * len(b))
    e = np.zeros(len(b) + 1)
    e[0] = 1.0
    direct = e @ h @ np.linalg.solve(x - z * np.eye(len(e)), e)
    assert abs(direct - p.scalar_resolvent(a, b, c, z)) < 1e-10


def test_run_trials_threads():
    spec = {"model": "signed_wigner", "N": 50, "s": 1.0, "seed": 3}
    r1 = p.run_trials(spec, 6, threads=1)
    r3 = p.run_trials(spec, 6, threads=3)
    assert [r["beta"] for r in r1] == [r["beta"] for r in r3]
    assert all(r["ok"] for r in r1)


def test_negative_squares_semicircle():
    pts = [0.3j, 1j, -0.5 + 0.8j, 0.7 + 0.2j, 2j]
    assert p.negative_squares(SEMI, pts) == 1


def test_bad_json_raises():
    with pytest.raises(ValueError):
        p.gznt({"kind": "semicircle", "sigma": 1.0})


def test_run_cli_in_process():
    code, out, err = p.run_cli(["gznt", "--measure", json.dumps(SEMI)])
    assert code == 0, err
    assert "0.7071" in out
    code, _, err = p.run_cli(["nosuchcommand"])
    assert code != 0


def test_cli_binary():
    exe = os.environ.get("PONTRYAGIN_CLI")
    if not exe:
        pytest.skip("PONTRYAGIN_CLI not set")
    res = subprocess.run([exe, "gznt", "--measure", json.dumps(SEMI)], capture_output=True, text=True)
    assert res.returncode == 0
    assert "0.7071" in res.stdout
