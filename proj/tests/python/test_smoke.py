import json
import math
import os
import tempfile

import pytest

import aclab


def _tmpdir():
    base = os.environ.get("ACLAB_TEST_TMP") or tempfile.gettempdir()
    os.makedirs(base, exist_ok=True)
    return tempfile.mkdtemp(dir=base)


def test_beta_closed_form():
    ic = aclab.compute_beta(1e-12)
    assert abs(ic.beta - 12 * math.sqrt(2)) / (12 * math.sqrt(2)) < 1e-10


def test_toda_constants_k2():
    c = aclab.toda_constants(2, 12 * math.sqrt(2))
    assert c.b[0] == pytest.approx(math.log(24 * math.sqrt(2)) / math.sqrt(2))
    assert c.gamma == pytest.approx([-c.b[0] / 2, c.b[0] / 2])
    c_eigs, a_eigs = aclab.reduction_eigenvalues(3)
    assert c_eigs == pytest.approx([1.0, 3.0])
    assert min(a_eigs) > 0


def test_eta_and_layers():
    eta = aclab.solve_eta(1e4)
    assert eta.value(-1.0) == 0.0
    assert eta.value(-1e4) == pytest.approx(5.635370951857477, rel=1e-8)
    c = aclab.toda_constants(2, 12 * math.sqrt(2))
    s = aclab.first_approximation(2, c, eta, -1e3)
    out = aclab.integrate_toda(2, c.beta, s, -1e4, sample_times=[-5e3, -1e4])
    assert len(out) == 2
    assert out[-1].rho[0] < out[-1].rho[1]


def test_ansatz_midpoint():
    assert aclab.evaluate_z([4.0, 7.0], 5.5) == pytest.approx(2 * aclab.heteroclinic(1.5) - 1)


def test_config_validation_names_window():
    with pytest.raises(aclab.ConfigError, match=r"\(sqrt\(2\)/2, sqrt\(2\)\)"):
        aclab.validate_config("[ansatz]\nsigma = 2.0\n")
    assert "[picard]" in aclab.default_config_text()


def test_run_and_compare():
    d1, d2 = _tmpdir(), _tmpdir()
    ini = "[run]\nscenario = constants\nk = 4\n"
    code, msg, report = aclab.run(ini, d1)
    assert code == 0, msg
    assert report["k"] == 4 and len(report["gamma"]) == 4
    assert aclab.run(ini, d2)[0] == 0
    assert aclab.compare_reports(d1, d2) == []
    with open(os.path.join(d1, "manifest.json")) as fh:
        assert "wall_time_seconds" in json.load(fh)
