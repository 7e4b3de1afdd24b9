import numpy as np
import pytest

from renlab import models
from renlab.geometry import (
    ChartPoint,
    christoffel,
    curvature,
    gamma_x_ss_candidates,
    geodesic_integrate,
    metric_eval,
    static_residual,
)
from renlab.models import hm_radius


def test_boundary_metrics(h3, hm):
    assert np.allclose(metric_eval(hm, ChartPoint(0, 0.3, 0.2)).components, np.eye(3))
    g = metric_eval(h3, ChartPoint(0, 0.3, 0.2)).components
    assert np.allclose(g, np.diag([1, np.sin(h3.alpha + 0.2) ** 2, 1]))


def test_hm_compact_by_substitution(hm):
    x, th, s = 0.1, 0.4, 0.7
    r = hm_radius(x)
    dr = (hm_radius(x + 1e-7) - hm_radius(x - 1e-7)) / 2e-7
    f = 1 - r ** -3
    expect = np.diag([dr * dr / (r * r * f), r * r * f, r * r]) / r ** 2
    assert np.allclose(metric_eval(hm, ChartPoint(x, th, s)).components, expect, rtol=1e-8)


@pytest.mark.parametrize("name", ["h3", "hm"])
def test_scalar_curvature_and_static_equation(name, request):
    m = request.getfixturevalue(name)
    for p in ([0.3, 0.5, 0.1], [0.7, 1.3, -0.2]):
        cur = curvature(m, np.array(p))
        assert abs(cur["scalar"] + 6) < 1e-6
        tr = np.einsum("ij,ij->", np.linalg.inv(cur["metric"]), cur["ricci"])
        assert abs(tr - cur["scalar"]) < 1e-12
        assert np.max(np.abs(static_residual(m, np.array(p)))) < 1e-6


def test_h3_is_einstein(h3):
    cur = curvature(h3, np.array([0.4, 0.5, 0.2]))
    assert np.allclose(cur["ricci"], -2 * cur["metric"], atol=1e-6)


def test_perturbed_potential_breaks_static_equation(hm):
    res = static_residual(hm, np.array([0.3, 0.2, 0.1]), potential=lambda Y: hm.potential(Y) * (1 + 0.1 * np.sin(Y[..., 2])))
    assert np.max(np.abs(res)) > 1e-3


def test_hm_ricci_radial(hm):
    eps = 0.05
    cur = curvature(hm, np.array([eps, 0.0, 0.0]))
    ric_xx = cur["ricci"][0, 0] * eps * eps
    assert abs(ric_xx - (-2 - 1.5 * (-1 / 3) * eps ** 3)) < 5 * eps ** 4


def test_gamma_x_ss(h3, hm):
    eps = 0.01
    g = christoffel(h3, np.array([eps, 0.0, 0.0]))[0, 2, 2]
    cand = gamma_x_ss_candidates(2.0, 0.0, eps)
    assert abs(g - cand["from_metric"]) < 1e-5
    assert abs(christoffel(hm, np.array([eps, 0.0, 0.0]))[0, 2, 2]) < 1e-5


def test_christoffel_vanish_in_flat_region():
    m = models.PrescribedFG(np.eye(2), np.zeros((2, 2)))
    assert np.allclose(christoffel(m, np.array([0.0, 1.0, 2.0])), 0)


def test_geodesic_speed_conserved_fourth_order(hm):
    drifts = [geodesic_integrate(hm, np.array([0.2, 0.0, 0.0]), np.array([0.3, 0.5, 1.0]), 0.5, n).speed_drift for n in (20, 40)]
    assert drifts[1] < drifts[0] / 10


def test_geodesic_stays_on_slice(hm):
    path = geodesic_integrate(hm, np.array([0.2, 0.0, 0.3]), np.array([0.1, 1.0, 0.0]), 0.5, 50)
    assert np.max(np.abs(path.points[:, 2] - 0.3)) < 1e-14


def test_hm_normal_geodesic_off_slice(hm):
    # start on {x = eps, s = s0}, unit normal to the slice: x changes only at O(eps^3 t) + O(t^3)
    for eps in (1e-2, 1e-3):
        path = geodesic_integrate(hm, np.array([eps, 0.0, 0.0]), np.array([0.0, 0.0, 1.0]), 0.05, 20)
        assert np.max(np.abs(path.points[:, 0] - eps)) < 10 * eps ** 3 * 0.05


def test_h3_normal_geodesic_bends_toward_boundary(h3):
    eps, T = 1e-3, 0.02
    path = geodesic_integrate(h3, np.array([eps, 0.0, 0.0]), np.array([0.0, 0.0, 1.0]), T, 20)
    t = path.t
    pred = eps - 0.5 * eps * t * t  # -(R_h/4) eps t^2 with R_h = 2
    assert np.max(np.abs(path.points[:, 0] - pred)) < 10 * eps * T ** 3
