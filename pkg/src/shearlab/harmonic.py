"""Harmonic maps ``f = h + conj(g)`` built by horizontal shear.

Given a locally univalent analytic ``phi`` and a dilatation ``w``, the shear
solves ``h - g = phi`` and ``g' = s*w*h'`` (``s`` is a real scale), i.e.
``h' = phi'/(1 - s w)``.  The two integral transforms apply this to

* ``F_alpha``: ``phi_alpha = int_0^z (phi(t)/t)**alpha dt`` with scale ``alpha``;
* ``f_alpha``: ``phi_alpha = int_0^z phi'(t)**alpha dt`` with scale ``alpha``.

A :class:`HarmonicMap` keeps ``h`` and ``g`` as truncated series (for
coefficient identities) together with closed-form evaluators of ``h'`` and
``h''/h'``.  Everything evaluated near the unit circle goes through the
closed forms; values of ``h`` and ``g`` there come from Gauss-Legendre
quadrature of the closed-form derivatives along the ray from 0, on panels
graded geometrically toward the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .catalog import AnalyticMapSpec, DilatationSpec
from .errors import (
    DegenerateDilatation,
    OutsideDisc,
    PreconditionViolated,
    TransformUndefined,
    VanishingDerivative,
)
from .grid import DiscGrid
from .series import (
    DEFAULT_ORDER,
    DIVISION_EPS,
    TruncatedSeries,
    differentiate,
    evaluate,
    integrate,
    mul,
    pow_alpha,
    reciprocal,
)

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)
# panel ends rho_k with 1 - rho_k = 3**-k: each panel is at most twice as long
# as its distance to the circle, so 16-point Gauss-Legendre stays at ~1e-13
_MAX_PANELS = 40
_RHO = 1.0 - 3.0 ** -np.arange(_MAX_PANELS + 1)
_RHO[0] = 0.0


def _c(z):
    return np.asarray(z, dtype=complex)


def _out(x):
    x = np.asarray(x)
    return complex(x) if x.ndim == 0 else x


def _check_disc(z):
    if np.any(np.abs(z) >= 1):
        raise OutsideDisc("points must satisfy |z| < 1")


def ray_integrals(integrand: Callable[[np.ndarray], list], z, n_out: int = 1) -> list:
    """``int_0^z F(t) dt`` along the segment ``[0, z]`` for each output of F.

    ``integrand`` maps an array of points to a list of ``n_out`` arrays.
    """
    zz = _c(z)
    shape = zz.shape
    zf = zz.ravel()
    _check_disc(zf)
    r = np.abs(zf)
    u = np.where(r > 0, zf / np.where(r > 0, r, 1.0), 1.0)
    totals = [np.zeros(zf.shape, dtype=complex) for _ in range(n_out)]
    for k in range(_MAX_PANELS):
        active = np.nonzero(r > _RHO[k])[0]
        if active.size == 0:
            break
        a = _RHO[k]
        b = np.minimum(r[active], _RHO[k + 1])
        half = 0.5 * (b - a)
        mid = 0.5 * (b + a)
        rho = mid[:, None] + half[:, None] * _GL_X[None, :]
        pts = rho * u[active, None]
        vals = integrand(pts)
        for out, v in zip(totals, vals):
            out[active] += (v @ _GL_W) * half * u[active]
    return [t.reshape(shape) for t in totals]


@dataclass(frozen=True, eq=False)
class HarmonicMap:
    """Sense-preserving harmonic map with analytic part ``h`` and co-analytic ``g``.

    ``h_prime`` and ``h_log_deriv`` are closed-form evaluators of ``h'`` and
    ``h''/h'``; the effective dilatation is ``omega_scale * omega``.
    """

    h: TruncatedSeries
    g: TruncatedSeries
    omega: DilatationSpec
    omega_scale: complex
    h_prime: Callable
    h_log_deriv: Callable
    provenance: dict = field(default_factory=dict)

    @property
    def order(self) -> int:
        return min(self.h.order, self.g.order)

    def dilatation(self, z):
        return self.omega_scale * self.omega.value(_c(z))

    def dilatation_d1(self, z):
        return self.omega_scale * self.omega.d1(_c(z))

    def derivatives(self, z):
        """``(h'(z), g'(z))`` from the closed forms."""
        hp = self.h_prime(_c(z))
        return hp, self.dilatation(z) * hp


# -- construction -------------------------------------------------------------


def _check_shear_inputs(base_d1, omega: DilatationSpec, scale, grid: DiscGrid | None):
    pts = (grid or DiscGrid()).points()
    w = scale * omega.value(pts)
    if np.min(np.abs(1 - w)) <= DIVISION_EPS:
        raise DegenerateDilatation("1 - scale*omega vanishes on the check grid")
    sup = float(np.max(np.abs(w)))
    if sup >= 1:
        raise PreconditionViolated(f"|scale|*sup|omega| = {sup:.6g} >= 1; the shear would not be sense-preserving")
    if np.min(np.abs(base_d1(pts))) <= DIVISION_EPS:
        raise VanishingDerivative("the sheared map is not locally univalent on the check grid")


def _build_shear(
    base_prime: TruncatedSeries,
    base_d1: Callable,
    base_dlog: Callable,
    omega: DilatationSpec,
    scale: float,
    provenance: dict,
    normalize: bool,
    grid: DiscGrid | None = None,
) -> HarmonicMap:
    _check_shear_inputs(base_d1, omega, scale, grid)
    n = base_prime.order
    w = scale * omega.series(n)
    hp = mul(base_prime, reciprocal(1 - w))
    h = integrate(hp)
    g = integrate(mul(w, hp))

    norm = complex(hp.coeffs[0]) if normalize else 1.0 + 0j
    if normalize:
        h, g = h / norm, g / norm
    provenance = dict(provenance, order=h.order, normalized=normalize, norm_factor=[norm.real, norm.imag])

    def h_prime(z):
        z = _c(z)
        return base_d1(z) / (1 - scale * omega.value(z)) / norm

    def h_log_deriv(z):
        z = _c(z)
        ws = scale * omega.value(z)
        return base_dlog(z) + scale * omega.d1(z) / (1 - ws)

    return HarmonicMap(h, g, omega, scale, h_prime, h_log_deriv, provenance)


def shear(
    phi: AnalyticMapSpec,
    omega: DilatationSpec,
    scale: float = 1.0,
    order: int = DEFAULT_ORDER,
    normalize: bool = False,
) -> HarmonicMap:
    """Horizontal shear of ``phi`` with dilatation ``scale * omega``.

    With ``normalize=True`` both parts are divided by ``h'(0)``, which restores
    ``h'(0) = 1`` when ``omega(0) != 0`` (the dilatation is unchanged, but then
    ``h - g = phi / h'(0)``).
    """
    prov = {"phi": phi.label, "omega": omega.label, "transform": "shear", "alpha": float(np.real(scale))}
    return _build_shear(
        differentiate(phi.series(order)),
        lambda z: phi.d1(z),
        lambda z: phi.d2(z) / phi.d1(z),
        omega,
        scale,
        prov,
        normalize,
    )


def _check_alpha(alpha):
    if np.iscomplexobj(alpha) and np.imag(alpha) != 0:
        raise PreconditionViolated("alpha must be real")
    alpha = float(np.real(alpha))
    if abs(alpha) > 1:
        raise PreconditionViolated(f"|alpha| = {abs(alpha)} exceeds 1")
    return alpha


def transformed_base(phi: AnalyticMapSpec, alpha: float, kind: str, order: int = DEFAULT_ORDER) -> AnalyticMapSpec:
    """The analytic map ``phi_alpha`` behind ``F_alpha`` (kind "F") or ``f_alpha`` (kind "f")."""
    if kind == "F":
        log_d1 = lambda z: alpha * phi.log_quotient(z)
        dlog = lambda z: alpha * phi.dlog_quotient(z)

        def series_fn(n):
            q = TruncatedSeries(phi.series(n).coeffs[1:])
            return integrate(pow_alpha(q, alpha))

    elif kind == "f":
        log_d1 = lambda z: alpha * phi.log_d1(z)
        dlog = lambda z: alpha * phi.d2(z) / phi.d1(z)

        def series_fn(n):
            return integrate(pow_alpha(differentiate(phi.series(n)), alpha))

    else:
        raise ValueError(f"kind must be 'F' or 'f', got {kind!r}")

    d1 = lambda z: np.exp(log_d1(_c(z)))

    def value(z):
        (v,) = ray_integrals(lambda p: [d1(p)], z)
        return v

    tags = {"locally_univalent"}
    if kind == "f" and "convex" in phi.tags and 0 <= alpha <= 1:
        tags |= {"convex", "starlike", "in_S"}
    if kind == "F" and "starlike" in phi.tags and 0 <= alpha <= 1:
        tags |= {"convex", "starlike", "in_S"}
    return AnalyticMapSpec(
        name=f"{kind}_alpha[{phi.label}]",
        value=value,
        d1=d1,
        d2=lambda z: d1(z) * dlog(_c(z)),
        log_d1=lambda z: log_d1(_c(z)),
        series_fn=series_fn,
        tags=frozenset(tags),
        lif_order=1.0 if "convex" in tags else None,
        params={"alpha": alpha},
    )


def winding_number(func: Callable, r: float = 0.999, samples: int = 16384) -> int:
    """Winding number of ``func`` around 0 along ``|z| = r``."""
    z = r * np.exp(2j * np.pi * np.arange(samples + 1) / samples)
    v = func(z)
    if np.min(np.abs(v)) == 0:
        return -1
    phase = np.unwrap(np.angle(v))
    return int(round((phase[-1] - phase[0]) / (2 * np.pi)))


def transform_F_alpha(
    phi: AnalyticMapSpec,
    omega: DilatationSpec,
    alpha: float,
    order: int = DEFAULT_ORDER,
    normalize: bool = False,
    check_zeros: bool = True,
) -> HarmonicMap:
    """Shear of ``int_0^z (phi(t)/t)**alpha dt`` with dilatation ``alpha * omega``."""
    alpha = _check_alpha(alpha)
    if check_zeros and alpha != 0 and winding_number(phi.value) != 1:
        raise TransformUndefined(f"{phi.label} vanishes away from 0, so (phi/z)**alpha has no analytic branch")
    base = transformed_base(phi, alpha, "F")
    q = TruncatedSeries(phi.series(order).coeffs[1:])
    prov = {"phi": phi.label, "omega": omega.label, "transform": "F_alpha", "alpha": alpha}
    return _build_shear(
        pow_alpha(q, alpha),
        base.d1,
        lambda z: alpha * phi.dlog_quotient(z),
        omega,
        alpha,
        prov,
        normalize,
    )


def transform_f_alpha(
    phi: AnalyticMapSpec,
    omega: DilatationSpec,
    alpha: float,
    order: int = DEFAULT_ORDER,
    normalize: bool = False,
) -> HarmonicMap:
    """Shear of ``int_0^z phi'(t)**alpha dt`` with dilatation ``alpha * omega``."""
    alpha = _check_alpha(alpha)
    base = transformed_base(phi, alpha, "f")
    prov = {"phi": phi.label, "omega": omega.label, "transform": "f_alpha", "alpha": alpha}
    return _build_shear(
        pow_alpha(differentiate(phi.series(order)), alpha),
        base.d1,
        lambda z: alpha * phi.d2(z) / phi.d1(z),
        omega,
        alpha,
        prov,
        normalize,
    )


# -- pointwise quantities ----------------------------------------------------


def harmonic_parts(f: HarmonicMap, z):
    """``(h(z), g(z))`` by quadrature of the closed-form derivatives."""

    def integrand(p):
        hp = f.h_prime(p)
        return [hp, f.dilatation(p) * hp]

    h, g = ray_integrals(integrand, z, n_out=2)
    return _out(h), _out(g)


def eval_harmonic(f: HarmonicMap, z, method: str = "quadrature"):
    """``h(z) + conj(g(z))``.

    ``method="series"`` evaluates the truncated series (accurate only where
    the tail is negligible); the default integrates the closed-form
    derivatives and stays accurate up to the grid radius.
    """
    zz = _c(z)
    _check_disc(zz)
    if method == "series":
        return _out(evaluate(f.h, zz) + np.conj(evaluate(f.g, zz)))
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")
    h, g = harmonic_parts(f, zz)
    return _out(np.asarray(h) + np.conj(g))


def jacobian(f: HarmonicMap, z):
    zz = _c(z)
    _check_disc(zz)
    hp, gp = f.derivatives(zz)
    out = np.abs(hp) ** 2 - np.abs(gp) ** 2
    return float(out) if np.ndim(out) == 0 else out


def pre_schwarzian(f: HarmonicMap, z, method: str = "closed"):
    """``h''/h' - conj(w) w'/(1 - |w|^2)`` for the effective dilatation ``w``.

    ``method="series"`` takes ``h''/h'`` from the truncated series of ``h``
    instead of the closed form.
    """
    zz = _c(z)
    _check_disc(zz)
    if method == "closed":
        if np.any(np.abs(f.h_prime(zz)) <= DIVISION_EPS):
            raise VanishingDerivative("h' vanishes")
        hl = f.h_log_deriv(zz)
    elif method == "series":
        d1 = differentiate(f.h)
        hp = evaluate(d1, zz)
        if np.any(np.abs(hp) <= DIVISION_EPS):
            raise VanishingDerivative("h' vanishes")
        hl = evaluate(differentiate(d1), zz) / hp
    else:
        raise ValueError(f"unknown method {method!r}")
    w = f.dilatation(zz)
    wp = f.dilatation_d1(zz)
    return _out(hl - np.conj(w) * wp / (1 - np.abs(w) ** 2))


def pre_schwarzian_f_alpha_closed(phi: AnalyticMapSpec, omega: DilatationSpec, alpha: float, z):
    """Closed form of the pre-Schwarzian of ``f_alpha`` in terms of ``phi`` and ``omega``."""
    zz = _c(z)
    _check_disc(zz)
    d1 = phi.d1(zz)
    if np.any(np.abs(d1) <= DIVISION_EPS):
        raise VanishingDerivative("phi' vanishes")
    w = omega.value(zz)
    aw = alpha * w
    frac = (1 - np.conj(aw)) / ((1 - aw) * (1 - abs(alpha) ** 2 * np.abs(w) ** 2))
    return _out(alpha * (phi.d2(zz) / d1 + omega.d1(zz) * frac))


# -- slices and affine shifts -------------------------------------------------


def lambda_slice(f: HarmonicMap, lam: complex) -> TruncatedSeries:
    """The analytic function ``h + lam*g``."""
    return f.h + lam * f.g


def slice_derivative(f: HarmonicMap, lam: complex, z):
    zz = _c(z)
    return _out(f.h_prime(zz) * (1 + lam * f.dilatation(zz)))


def slice_log_derivative(f: HarmonicMap, lam: complex, z):
    """``Phi''/Phi'`` for ``Phi = h + lam*g``, from the closed forms."""
    zz = _c(z)
    w = f.dilatation(zz)
    return _out(f.h_log_deriv(zz) + lam * f.dilatation_d1(zz) / (1 + lam * w))


def affine_shift(f: HarmonicMap, a: complex) -> HarmonicMap:
    """``f + conj(a f)``: analytic part ``h + conj(a) g``, co-analytic part ``g + a h``."""
    a = complex(a)
    if abs(a) >= 1:
        raise DegenerateDilatation(f"|a| = {abs(a)} >= 1 gives a map that is not sense-preserving")
    if a == 0:
        return f
    ab = a.conjugate()
    s = f.omega_scale
    om = f.omega

    def value(z):
        w = s * om.value(_c(z))
        return (w + a) / (1 + ab * w)

    def d1(z):
        w = s * om.value(_c(z))
        return s * om.d1(_c(z)) * (1 - abs(a) ** 2) / (1 + ab * w) ** 2

    def compose_series(t):
        w = s * om.compose_series(t)
        return mul(w + a, reciprocal(1 + ab * w))

    new_omega = DilatationSpec(
        name=f"shift({om.label},a={a})",
        value=value,
        d1=d1,
        compose_series=compose_series,
        params={},
    )

    def h_prime(z):
        z = _c(z)
        return f.h_prime(z) * (1 + ab * f.dilatation(z))

    def h_log_deriv(z):
        z = _c(z)
        return f.h_log_deriv(z) + ab * f.dilatation_d1(z) / (1 + ab * f.dilatation(z))

    h = f.h + ab * f.g
    g = f.g + a * f.h
    prov = dict(f.provenance, affine_shift=[a.real, a.imag])
    return replace(f, h=h, g=g, omega=new_omega, omega_scale=1.0, h_prime=h_prime,
                   h_log_deriv=h_log_deriv, provenance=prov)
