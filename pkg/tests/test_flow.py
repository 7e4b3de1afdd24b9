import numpy as np
import pytest

from renlab.flow import (
    GEODESIC,
    RENORMALIZED,
    Generator,
    first_variation_check,
    flow_integrate,
    mean_curvature_evolution_check,
    monotonicity,
    neumann_density,
    orientation_sign,
    rena_curve,
    riccati_check,
    second_variation_terms,
    variant_values,
)
from renlab.surfaces import BoundaryCurve, ConfigurationError


@pytest.fixture(scope="module")
def hm_family(hm, hm_slice):
    return flow_integrate(hm, hm_slice, T=0.2, K=4)


@pytest.fixture(scope="module")
def pert_family(h3, perturbed):
    return flow_integrate(h3, perturbed, T=0.04, K=4)


def test_hm_flow_translates_slice(hm_family):
    assert hm_family.complete()
    for t, S in zip(hm_family.times, hm_family.surfaces):
        assert np.max(np.abs(S.Y[0, :, 2] - (0.1 + t))) < 1e-10


def test_hm_rena_constant_along_flow(hm, hm_family):
    pts = rena_curve(hm, hm_family)
    vals = np.array([p.fit.c for p in pts])
    assert np.max(np.abs(vals - vals[0])) < 1e-8
    assert monotonicity(pts) < 1e-8


def test_length_and_free_divergence_agree_along_flow(h3, pert_family):
    for p in rena_curve(h3, pert_family):
        assert abs(p.fit.L_free - p.fit.L) < 1e-6


def test_orientation_points_to_increasing_s(hm_slice):
    assert orientation_sign(hm_slice) in (-1.0, 1.0)


def test_first_variation(h3, perturbed):
    r = first_variation_check(h3, perturbed)
    assert r.first_rel_error < 1e-3
    assert abs(r.fd_first_order - 2) < 0.1


def test_transport_modes_agree(h3, perturbed):
    g = flow_integrate(h3, perturbed, T=0.02, K=2, mode=GEODESIC)
    r = flow_integrate(h3, perturbed, T=0.02, K=2, mode=RENORMALIZED)
    a = [p.fit.c for p in rena_curve(h3, g)]
    b = [p.fit.c for p in rena_curve(h3, r)]
    assert np.allclose(a, b, atol=1e-6)


def test_mean_curvature_evolution(h3, pert_family):
    assert mean_curvature_evolution_check(h3, pert_family).max_residual < 1e-6


def test_riccati_inequality(h3, pert_family):
    assert riccati_check(h3, pert_family).min_margin >= -1e-6


def test_general_generator_needs_rim_samples(h3, perturbed):
    with pytest.raises(ConfigurationError):
        flow_integrate(h3, perturbed, generator=Generator(np.ones(5)), T=0.01, K=1)


def test_unknown_transport_mode(h3, perturbed):
    with pytest.raises(ConfigurationError):
        flow_integrate(h3, perturbed, mode="sideways")


def test_variant_bookkeeping():
    t = {"V_b2": 1.0, "V2_b2": 2.0, "kappa_u3": 0.5, "neumann": 0.4}
    v = variant_values(t)
    assert np.isclose(v["k3_V"], -1.0 - 1.5 + 0.3)
    assert np.isclose(v["k1_V2"], -2.0 - 0.5 + 0.4)


def test_second_variation_terms_vanish_on_geodesic_disk(h3, equator):
    t = second_variation_terms(h3, equator)
    assert abs(t["V_b2"]) < 1e-6 and abs(t["kappa_u3"]) < 1e-6


def test_neumann_density_hm(hm):
    c = BoundaryCurve("torus", 0.1, period=hm.theta_period)
    assert np.allclose(neumann_density(hm, c, np.linspace(0, 1, 5)), 0.0, atol=1e-12)
