import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from shearlab.catalog import AnalyticMapSpec, catalog_dilatation, catalog_map
from shearlab.errors import (
    DegenerateDilatation,
    PreconditionViolated,
    TransformUndefined,
    VanishingDerivative,
)
from shearlab.grid import DiscGrid
from shearlab.harmonic import (
    affine_shift,
    eval_harmonic,
    harmonic_parts,
    jacobian,
    lambda_slice,
    pre_schwarzian,
    pre_schwarzian_f_alpha_closed,
    ray_integrals,
    shear,
    slice_derivative,
    slice_log_derivative,
    transform_F_alpha,
    transform_f_alpha,
    transformed_base,
    winding_number,
)
from shearlab.series import TruncatedSeries, differentiate, evaluate, mul

HP = catalog_map("halfplane")
KOEBE = catalog_map("koebe")
ZERO = catalog_dilatation("zero")
Z = catalog_dilatation("power", n=1)


def polynomial_map(coeffs, name="poly"):
    """Analytic map with the given Taylor coefficients, for precondition tests."""
    c = np.asarray(coeffs, dtype=complex)
    p = np.polynomial.Polynomial(c)
    dp, ddp = p.deriv(), p.deriv(2)
    return AnalyticMapSpec(
        name=name,
        value=lambda z: p(np.asarray(z, dtype=complex)),
        d1=lambda z: dp(np.asarray(z, dtype=complex)),
        d2=lambda z: ddp(np.asarray(z, dtype=complex)),
        log_d1=lambda z: np.log(dp(np.asarray(z, dtype=complex))),
        series_fn=lambda n: TruncatedSeries(c, order=n),
    )


def test_halfplane_shear_closed_form():
    f = shear(HP, Z)
    k = np.arange(33)
    assert np.max(np.abs(f.h.coeffs[1:33] - (k[1:33] + 1) / 2)) < 1e-12
    assert np.max(np.abs(f.g.coeffs[1:33] - (k[1:33] - 1) / 2)) < 1e-12
    z = np.array([0.3, -0.5 + 0.2j, 0.99j])
    h, g = harmonic_parts(f, z)
    assert np.max(np.abs(h - (z - z**2 / 2) / (1 - z) ** 2)) < 1e-10
    assert np.max(np.abs(g - (z**2 / 2) / (1 - z) ** 2)) < 1e-10


def test_constant_dilatation_normalized():
    f = shear(catalog_map("identity"), catalog_dilatation("constant", c=0.5), normalize=True)
    assert np.allclose(f.h.coeffs[:3], [0, 1, 0], atol=1e-15)
    assert np.allclose(f.g.coeffs[:3], [0, 0.5, 0], atol=1e-15)
    assert f.provenance["normalized"] is True


def test_constant_dilatation_default_keeps_shear_identity():
    f = shear(catalog_map("identity"), catalog_dilatation("constant", c=0.5))
    assert np.allclose(f.h.coeffs[:2], [0, 2]) and np.allclose(f.g.coeffs[:2], [0, 1])


def test_alpha_zero_is_identity():
    f = transform_F_alpha(KOEBE, Z, 0.0)
    assert np.allclose(f.h.coeffs[:4], [0, 1, 0, 0]) and not np.any(f.g.coeffs)


def test_F_alpha_of_identity_is_affine():
    f = transform_F_alpha(catalog_map("identity"), Z, 0.25)
    z = np.array([0.2, 0.7j])
    assert np.max(np.abs(f.h_prime(z) - 1 / (1 - 0.25 * z))) < 1e-15


def test_f_alpha_half_of_koebe_frozen():
    # (k')^(1/2) = (1+z)^(1/2) (1-z)^(-3/2)
    f = transform_f_alpha(KOEBE, ZERO, 0.5)
    z = np.array([0.5, -0.4 + 0.3j])
    assert np.max(np.abs(f.h_prime(z) - np.sqrt(1 + z) * (1 - z) ** -1.5)) < 1e-14
    assert np.allclose(f.h.coeffs[:4], [0, 1, 1, 5 / 6], atol=1e-14)


def test_ray_integrals_near_boundary():
    z = np.array([0.999, 0.9997j, -0.5])
    (v,) = ray_integrals(lambda t: [1 / (1 - t) ** 2], z)
    assert np.max(np.abs(v - z / (1 - z))) < 1e-9 * np.max(np.abs(z / (1 - z)))


def test_eval_quadrature_matches_series_inside():
    f = transform_f_alpha(KOEBE, catalog_dilatation("linear", c=0.5), 0.2, order=320)
    z = 0.9 * np.exp(2j * np.pi * np.arange(16) / 16)
    assert np.max(np.abs(eval_harmonic(f, z) - eval_harmonic(f, z, method="series"))) < 1e-9


@pytest.mark.parametrize("phi", [KOEBE, HP, catalog_map("mu", mu=1 + 1j)])
@pytest.mark.parametrize("alpha", [-0.25, 0.25])
def test_classical_reduction(phi, alpha):
    """With w = 0, F_alpha is the classical integral of (phi/z)^alpha."""
    f = transform_F_alpha(phi, ZERO, alpha, order=320)
    base = transformed_base(phi, alpha, "F", order=320)
    z = 0.9 * np.exp(2j * np.pi * np.arange(24) / 24)
    assert np.max(np.abs(eval_harmonic(f, z) - base.series(320)(z))) < 1e-9


def test_transformed_base_tags():
    assert "convex" in transformed_base(HP, 0.5, "f").tags
    assert "convex" in transformed_base(KOEBE, 0.5, "F").tags
    assert "convex" not in transformed_base(KOEBE, 0.5, "f").tags
    assert "convex" not in transformed_base(HP, -0.5, "f").tags


def test_winding_number():
    assert winding_number(lambda z: z) == 1
    assert winding_number(lambda z: z**3) == 3
    assert winding_number(lambda z: z - 0.5 + 0 * z) == 1
    assert winding_number(lambda z: np.ones_like(z)) == 0


def test_transform_undefined_when_phi_alpha_vanishes():
    # phi(z)/z = 1 - 2.5 z^2 vanishes inside the disc
    phi = polynomial_map([0, 1, 0, -2.5])
    with pytest.raises(TransformUndefined):
        transform_F_alpha(phi, ZERO, 1.0, order=16)


def test_vanishing_derivative():
    z0 = DiscGrid().points()[12, 0].real
    phi = polynomial_map([0, 1, -0.5 / z0])
    with pytest.raises(VanishingDerivative):
        shear(phi, ZERO, order=16)


def test_preconditions():
    with pytest.raises(PreconditionViolated):
        transform_f_alpha(HP, Z, 1.5)
    with pytest.raises(PreconditionViolated):
        transform_F_alpha(HP, Z, 0.1 + 0.1j)
    with pytest.raises(PreconditionViolated):
        shear(HP, catalog_dilatation("constant", c=0.5), scale=2.5)
    with pytest.raises(DegenerateDilatation):
        shear(HP, catalog_dilatation("constant", c=0.5), scale=2.0)
    with pytest.raises(DegenerateDilatation):
        affine_shift(shear(HP, Z, 0.5), 1.0)


PRODUCT_MAPS = [("identity", {}), ("koebe", {}), ("halfplane", {}), ("mu", {"mu": 0.5}), ("gamma", {"gamma": -0.5})]
PRODUCT_OMEGAS = [("zero", {}), ("constant", {"c": 0.5}), ("linear", {"c": 0.5j}), ("power", {"n": 2}),
                  ("mobius", {"a": 0.3 - 0.2j, "c": 0.9})]


@given(
    st.sampled_from(PRODUCT_MAPS),
    st.sampled_from(PRODUCT_OMEGAS),
    st.floats(-1, 1),
    st.sampled_from(["F", "f"]),
)
def test_shear_identities(phi_spec, om_spec, alpha, kind):
    phi = catalog_map(phi_spec[0], **phi_spec[1])
    om = catalog_dilatation(om_spec[0], **om_spec[1])
    if abs(alpha) * 1.0 >= 1 - 1e-6:
        return
    build = transform_F_alpha if kind == "F" else transform_f_alpha
    f = build(phi, om, alpha, order=48)
    base = transformed_base(phi, alpha, kind).series(48)
    scale = max(1.0, np.max(np.abs(base.coeffs)))
    assert np.max(np.abs((f.h - f.g).coeffs - base.coeffs)) < 1e-9 * scale
    lhs = differentiate(f.g)
    rhs = mul(alpha * om.series(47), differentiate(f.h))
    assert np.max(np.abs(lhs.coeffs - rhs.coeffs)) < 1e-9 * scale
    z = DiscGrid().points()
    assert np.min(jacobian(f, z)) > 0


def test_pre_schwarzian_frozen_oracle():
    # independent high-precision evaluation of the closed form
    f = transform_f_alpha(KOEBE, catalog_dilatation("linear", c=0.5), 0.2)
    expected = 1.0427869172751747 + 0.2074210315711370j
    assert abs(pre_schwarzian(f, 0.3 + 0.2j) - expected) < 1e-14


def test_pre_schwarzian_routes_agree():
    om = catalog_dilatation("mobius", a=0.2j, c=0.7)
    f = transform_f_alpha(HP, om, -0.6, order=256)
    z = 0.6 * np.exp(1j * np.linspace(0, 6, 11))
    closed = pre_schwarzian(f, z)
    assert np.max(np.abs(closed - pre_schwarzian(f, z, method="series"))) < 1e-9
    assert np.max(np.abs(closed - pre_schwarzian_f_alpha_closed(HP, om, -0.6, z))) < 1e-12


def test_pre_schwarzian_of_analytic_map():
    f = shear(KOEBE, ZERO)
    z = np.array([0.3, 0.5j])
    assert np.max(np.abs(pre_schwarzian(f, z) - KOEBE.d2(z) / KOEBE.d1(z))) < 1e-13


@given(st.floats(0, 0.95), st.floats(0, 2 * np.pi), st.floats(0, 0.9), st.floats(0, 2 * np.pi))
def test_affine_shift_invariance(r, t, ra, ta):
    f = transform_F_alpha(KOEBE, catalog_dilatation("linear", c=0.5), 0.15, order=32)
    a = ra * np.exp(1j * ta)
    z = r * np.exp(1j * t)
    fs = affine_shift(f, a)
    assert abs(pre_schwarzian(fs, z) - pre_schwarzian(f, z)) < 1e-8 * max(1.0, abs(pre_schwarzian(f, z)))


def test_affine_shift_parts():
    f = shear(HP, Z, 0.5, order=32)
    a = 0.3 - 0.4j
    fs = affine_shift(f, a)
    assert np.max(np.abs(fs.h.coeffs - (f.h + a.conjugate() * f.g).coeffs)) < 1e-15
    z = np.array([0.4, -0.7j])
    hp, gp = fs.derivatives(z)
    hp0, gp0 = f.derivatives(z)
    assert np.max(np.abs(hp - (hp0 + np.conj(a) * gp0))) < 1e-13
    assert np.max(np.abs(gp - (gp0 + a * hp0))) < 1e-13


def test_slices():
    f = shear(HP, Z, 0.5, order=64)
    lam = np.exp(0.7j)
    s = lambda_slice(f, complex(lam))
    z = np.array([0.1, 0.3j])
    assert np.max(np.abs(evaluate(differentiate(s), z) - slice_derivative(f, lam, z))) < 1e-12
    d1 = differentiate(s)
    assert np.max(np.abs(evaluate(differentiate(d1), z) / evaluate(d1, z) - slice_log_derivative(f, lam, z))) < 1e-12
