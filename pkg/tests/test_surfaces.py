import numpy as np
import pytest

from renlab import models
from renlab.surfaces import (
    BoundaryCurve,
    ConfigurationError,
    collar_determinant,
    geodesic_curvature,
    load_surface,
    save_surface,
    solve_minimal_graph,
)


def test_solver_converges(equator, cap, perturbed, hm_slice):
    for S in (equator, cap, perturbed, hm_slice):
        assert S.converged and S.residual < 1e-9


def test_hm_slice_is_flat(hm_slice):
    assert np.max(np.abs(hm_slice.Y[..., 2] - 0.1)) < 1e-12
    assert np.max(np.abs(hm_slice.geometry().H[1:])) < 1e-9


def test_equatorial_disk_totally_geodesic(equator):
    geo = equator.geometry()
    assert np.max(np.abs(geo.b2[1:])) < 1e-8
    col = equator.collar()
    assert np.max(np.abs(col.u)) < 1e-10


def test_cap_matches_closed_form(cap):
    a = np.pi / 3
    col = cap.collar()
    x = col.x
    exact = np.arccos(np.cos(a) * (4 + x * x) / (4 - x * x)) - a
    assert np.max(np.abs(col.u - exact[:, None])) < 1e-8
    assert np.max(np.abs(col.u3)) < 1e-6
    assert np.allclose(col.u2, -col.kappa / 2, atol=1e-6)


def test_latitude_geodesic_curvature():
    for a in (np.pi / 4, np.pi / 3, np.pi / 2):
        k = geodesic_curvature(BoundaryCurve("sphere", a), np.linspace(0, 6, 7))
        assert np.allclose(k, 1 / np.tan(a), atol=1e-8)


def test_perturbed_collar_defect_vanishes(perturbed):
    col = perturbed.collar()
    assert np.max(np.abs(col.defect)) < 1e-5
    assert np.max(np.abs(col.u3)) > 1e-3


def test_determinant_tends_to_boundary_length_element(perturbed):
    d = collar_determinant(perturbed, x=np.array([1e-3, 2e-3]))
    lim = d["x"][:, None] ** 2 * d["det"]
    assert np.max(np.abs(lim[0] - d["sqrt_det_h"])) < 1e-4
    assert np.max(np.abs(lim[0] - d["sqrt_det_h"])) < np.max(np.abs(lim[1] - d["sqrt_det_h"]))


def test_save_load_bit_exact(perturbed, h3, tmp_path):
    path = tmp_path / "surface.csv"
    save_surface(perturbed, path)
    back = load_surface(h3, path)
    assert np.array_equal(back.Y, perturbed.Y)
    assert back.curve == perturbed.curve


def test_curve_must_stay_in_chart(h3):
    with pytest.raises(ConfigurationError):
        solve_minimal_graph(h3, BoundaryCurve("sphere", 0.05, 0.2, 1))


def test_unsupported_closure(h3):
    with pytest.raises(ConfigurationError):
        solve_minimal_graph(h3, BoundaryCurve("sphere", np.pi / 2), closure="annulus")


def test_model_without_bulk_chart_rejected():
    m = models.PrescribedFG(np.eye(2), np.zeros((2, 2)))
    with pytest.raises(ConfigurationError):
        solve_minimal_graph(m, BoundaryCurve("torus", 0.1, period=m.theta_period))
