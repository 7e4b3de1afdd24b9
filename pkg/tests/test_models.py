import numpy as np
import pytest

from renlab import models
from renlab.geometry import SingularEvaluationError, metric_eval


def test_h3_boundary_data(h3):
    bd = h3.boundary_data(8, 8)
    assert np.all(bd.h3 == 0)
    assert np.all(bd.R_h == 2)
    assert bd.mass == 0


def test_hm_boundary_data(hm):
    bd = hm.boundary_data(4, 4)
    assert np.allclose(bd.h3[0, 0], np.diag([-2 / 3, 1 / 3]))
    assert np.allclose(bd.tr_h3, -1 / 3)
    assert np.allclose(bd.mu, 3 * bd.tr_h3)
    assert np.isclose(bd.mass, -bd.area)
    P = bd.h3 + bd.tr_h3[..., None, None] * bd.h
    assert np.allclose(P[0, 0], np.diag([-1, 0]))


def test_hm_default_period():
    assert np.isclose(models.horowitz_myers().theta_period, 4 * np.pi / 3)


@pytest.mark.parametrize("name", ["h3", "hm"])
def test_native_and_fg_charts_agree(name, request):
    m = request.getfixturevalue(name)
    rng = np.random.default_rng(0)
    Y = np.stack([rng.uniform(0.05, 0.6, 100), rng.uniform(0, 2, 100), rng.uniform(-0.3, 0.3, 100)], -1)
    Z = m.native_from_fg(Y)
    J = np.stack([np.imag(m.native_from_fg(Y + 1e-30j * e)) / 1e-30 for e in np.eye(3)], -1)
    pulled = np.einsum("nai,nab,nbj->nij", J, m.native_physical(Z), J)
    assert np.max(np.abs(pulled - m.physical(Y)) / np.abs(m.physical(Y)).max(axis=(1, 2))[:, None, None]) < 1e-10
    assert np.allclose(m.native_potential(Z), m.potential(Y), rtol=1e-12)


def test_physical_is_v2_times_compact(hm):
    p = np.array([0.3, 1.0, 0.2])
    g = metric_eval(hm, p, "physical").components
    gb = metric_eval(hm, p, "compact").components
    assert np.allclose(g, hm.potential(p) ** 2 * gb, rtol=1e-12)


def test_physical_singular_at_boundary(hm):
    with pytest.raises(SingularEvaluationError):
        metric_eval(hm, np.array([0.0, 0.0, 0.0]), "physical")


def test_prescribed_round_trip():
    h3 = np.array([[-0.5, 0.1], [0.1, 0.2]])
    m = models.PrescribedFG(np.eye(2), h3)
    bd = m.boundary_data()
    assert np.max(np.abs(bd.h3 - h3)) < 1e-8
    assert np.allclose(bd.mu, 3 * bd.tr_h3)


def test_warped_torus_round_trip():
    h3 = np.array([[-0.3, 0.0], [0.0, 0.1]])
    m = models.WarpedTorus(lambda t: 1 + 0.2 * np.cos(t), h3)
    bd = m.boundary_data()
    assert np.max(np.abs(bd.h3 - h3)) < 1e-8


def test_config_rejects_unknown_keys():
    with pytest.raises(models.ModelError):
        models.from_config({"kind": "horowitz_myers", "colour": 1})
    with pytest.raises(models.ModelError):
        models.from_config({"kind": "anti_de_sitter"})


def test_config_builds_warped_torus():
    m = models.from_config({"kind": "warped_torus", "h3": [[0, 0], [0, 0]], "f_fourier": [1.0, 0.1]})
    assert np.isclose(m.f_values[0], 1.1)
