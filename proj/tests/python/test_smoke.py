import json
import math

import numpy as np
import pytest

import evanescent as ev


def test_params_and_gamma():
    p = ev.ModelParams(b=2, n=100)
    assert p.gamma == pytest.approx(1e-4)
    assert p.horizon(1.0) == pytest.approx(100 ** 1.75)
    with pytest.raises(ev.ConfigError):
        ev.ModelParams(n=0)


def test_g0_and_residue_route():
    m = 0.5 * (math.pi / 2) ** 1.5
    assert ev.G0(0.5) == pytest.approx(complex(m, m))
    p = ev.ModelParams(b=2, n=64)
    for y in (-0.31, 0.02, 0.4):
        assert abs(ev.Gn_residue(y, p.gamma) - ev.Gn_quadrature(y, p)) < 1e-8


def test_kernel_mass_and_shape():
    u = np.linspace(-6, 10, 321)
    P = np.array(ev.kernel(1.0, u.tolist()))
    assert abs(ev.kernel_mass(1.0) - 1) < 1e-6
    assert P.min() > -1e-12
    # heavy tail on the right
    assert P[-1] > P[0]


def test_simulation_is_seeded():
    p = ev.ModelParams(n=8)
    w = ev.sample_gibbs(p, 64, 3)
    a = ev.simulate(w, p, 2.0, 9)
    b = ev.simulate(w, p, 2.0, 9)
    assert a["omega"] == b["omega"]
    assert sum(x * x for x in a["omega"]) == pytest.approx(sum(x * x for x in w), rel=1e-12)


def test_energy_kernel_mass():
    p = ev.ModelParams(n=8, a=1)
    k = ev.energy_kernel(p, 1.0, 32)
    assert sum(k["S"]) == pytest.approx(2.0, abs=1e-8)


def test_volume_regimes():
    r = ev.classify_regime(1, 1.5)
    assert r["label"] == "transport"
    assert r["transport"] == 2
    assert ev.classify_energy(1.5, 2) == "fractional-heat"
    f = ev.gaussian()
    p = ev.ModelParams(a=1, b=1.5, n=10000)
    lim = ev.limit_correlation(1, 1.5, f, f, 0.5, p)
    assert abs(ev.eta(f, f, 0.5, p) - lim) < 1e-2


def test_run_kernel(tmp_path):
    code, log = ev.run({"kind": "kernel", "t": [1.0], "out": str(tmp_path), "u_grid": {"points": 11}})
    assert code == 0
    report = json.loads((tmp_path / "kernel.json").read_text())
    assert report["exit_code"] == 0
    assert (tmp_path / "kernel.csv").read_text().startswith("t,u,P_t(u)")


def test_run_rejects_unknown_field():
    with pytest.raises(ev.ConfigError):
        ev.run({"kind": "kernel", "colour": "blue"})
