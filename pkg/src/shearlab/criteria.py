"""Norms, univalence criteria and alpha-thresholds, evaluated on disc grids.

Suprema over the disc are estimated on nested polar grids and refined until
two consecutive levels agree to ``REFINE_TOL``.  Grid values are lower bounds
of the true supremum, so a threshold computed from estimated norms is
optimistic; prefer the catalog's exact norms where they exist.

A ``not_certified`` verdict only means that a sufficient condition failed at
the reported witness.  It never shows that a map is not univalent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import bisect

from .catalog import AnalyticMapSpec, DilatationSpec
from .errors import DomainError, InsufficientSamples, InvalidC, VanishingDerivative
from .grid import DiscGrid, grid_argmax
from .harmonic import HarmonicMap, pre_schwarzian
from .series import DIVISION_EPS, TruncatedSeries, differentiate, evaluate

REFINE_TOL = 1e-4
MAX_LEVELS = 4
ARC_TOL = 1e-7


@dataclass(frozen=True)
class NormEstimate:
    value: float
    witness: complex
    grid: DiscGrid
    converged: bool
    history: tuple = ()
    exact: Optional[float] = None

    @property
    def error_vs_exact(self) -> Optional[float]:
        return None if self.exact is None else abs(self.value - self.exact)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "witness": [self.witness.real, self.witness.imag],
            "converged": self.converged,
            "history": list(self.history),
            "exact": self.exact,
            "grid": self.grid.to_dict(),
        }


@dataclass(frozen=True)
class CriterionReport:
    """Outcome of a grid-evaluated criterion.

    ``direction="max"``: ``value`` is the grid maximum of the left-hand side
    and the criterion holds when it does not exceed ``threshold``.
    ``direction="min"``: ``value`` is a grid minimum that must stay above
    ``threshold`` (``strict`` selects ``>`` over ``>=``).
    """

    criterion: str
    value: float
    witness: complex
    threshold: float
    verdict: str
    grid: DiscGrid
    converged: bool
    direction: str = "max"
    details: dict = field(default_factory=dict)

    @property
    def max_lhs(self) -> float:
        return self.value

    @property
    def certified(self) -> bool:
        return self.verdict == "certified"

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "direction": self.direction,
            "value": self.value,
            "witness": [self.witness.real, self.witness.imag],
            "threshold": self.threshold,
            "verdict": self.verdict,
            "converged": self.converged,
            "grid": self.grid.to_dict(),
            "details": self.details,
        }


def refined_max(func: Callable, grid: DiscGrid, tol: float = REFINE_TOL, max_levels: int = MAX_LEVELS,
                workers: int = 1):
    """Refine the grid maximum of ``func`` until consecutive levels differ by < tol.

    Returns ``(value, witness, final_grid, converged, history)``.
    """
    history = []
    prev = None
    for step in range(max_levels):
        g = grid.at_level(grid.level + step)
        value, witness, _ = grid_argmax(func, g, workers=workers)
        history.append(value)
        if prev is not None and abs(value - prev) < tol:
            return value, witness, g, True, tuple(history)
        prev = value
    return value, witness, g, False, tuple(history)


def _report(name, func, grid, threshold, direction="max", strict=False, details=None, workers=1):
    if direction == "max":
        value, witness, g, conv, hist = refined_max(func, grid, workers=workers)
        ok = value < threshold if strict else value <= threshold
    else:
        value, witness, g, conv, hist = refined_max(lambda z: -np.asarray(func(z)), grid, workers=workers)
        value = -value
        hist = tuple(-h for h in hist)
        ok = value > threshold if strict else value >= threshold
    d = {"history": list(hist)}
    d.update(details or {})
    verdict = "certified" if (ok and conv) else "not_certified"
    return CriterionReport(name, float(value), witness, float(threshold), verdict, g, conv, direction, d)


# -- norms -------------------------------------------------------------------


def sup_norm(omega: DilatationSpec, grid: DiscGrid | None = None) -> NormEstimate:
    grid = grid or DiscGrid()
    v, w, g, conv, hist = refined_max(lambda z: np.abs(omega.value(z)), grid)
    return NormEstimate(v, w, g, conv, hist, omega.exact_sup_norm)


def hyperbolic_density(omega: DilatationSpec, z):
    """``|w'(z)|(1 - |z|^2)/(1 - |w(z)|^2)``."""
    z = np.asarray(z, dtype=complex)
    return np.abs(omega.d1(z)) * (1 - np.abs(z) ** 2) / (1 - np.abs(omega.value(z)) ** 2)


def hyperbolic_norm(omega: DilatationSpec, grid: DiscGrid | None = None) -> NormEstimate:
    grid = grid or DiscGrid()
    v, w, g, conv, hist = refined_max(lambda z: hyperbolic_density(omega, z), grid)
    return NormEstimate(v, w, g, conv, hist, omega.exact_hyp_norm)


def norms(omega: DilatationSpec, grid: DiscGrid | None = None) -> tuple[float, float, bool]:
    """``(sup norm, hyperbolic norm, exact)``; exact values when the catalog has them."""
    if omega.exact_sup_norm is not None and omega.exact_hyp_norm is not None:
        return omega.exact_sup_norm, omega.exact_hyp_norm, True
    return sup_norm(omega, grid).value, hyperbolic_norm(omega, grid).value, False


# -- Becker-type criteria ----------------------------------------------------


def _dilatation_term(f: HarmonicMap, z):
    w = f.dilatation(z)
    return np.abs(z * f.dilatation_d1(z)) * (1 - np.abs(z) ** 2) / (1 - np.abs(w) ** 2)


def becker_lhs(f: HarmonicMap, z):
    z = np.asarray(z, dtype=complex)
    P = pre_schwarzian(f, z)
    return (1 - np.abs(z) ** 2) * np.abs(z * P) + _dilatation_term(f, z)


def theorem_c_lhs(f: HarmonicMap, c: complex, z):
    z = np.asarray(z, dtype=complex)
    P = pre_schwarzian(f, z)
    r2 = np.abs(z) ** 2
    return np.abs((1 - r2) * z * P + c * r2) + _dilatation_term(f, z)


def becker_check(f: HarmonicMap, grid: DiscGrid | None = None, workers: int = 1) -> CriterionReport:
    return _report("becker", lambda z: becker_lhs(f, z), grid or DiscGrid(), 1.0, workers=workers)


def theorem_c_check(f: HarmonicMap, c: complex, grid: DiscGrid | None = None) -> CriterionReport:
    c = complex(c)
    if abs(c) > 1 or c == -1:
        raise InvalidC(f"c must satisfy |c| <= 1 and c != -1, got {c}")
    return _report("theorem_c", lambda z: theorem_c_lhs(f, c, z), grid or DiscGrid(), 1.0,
                   details={"c": [c.real, c.imag]})


# -- alpha thresholds --------------------------------------------------------


def _unit(name, x):
    if not 0 <= x <= 1:
        raise DomainError(f"{name} must lie in [0, 1], got {x}")


def _beta(beta):
    if beta < 1:
        raise DomainError(f"order beta must be >= 1, got {beta}")


def alpha_bound_shs(sup_norm: float, hyp_norm: float) -> float:
    """Stable-univalence bound for ``F_alpha`` when ``phi`` is in S."""
    _unit("sup_norm", sup_norm)
    _unit("hyp_norm", hyp_norm)
    return 1.0 / (2.0 * (2.0 + hyp_norm * (1.0 + sup_norm)))


def alpha_bound_lif(beta: float, sup_norm: float, hyp_norm: float) -> float:
    """Stable-univalence bound for ``F_alpha`` when ``phi`` lies in a LIF of order ``beta``.

    With ``k = hyp_norm * (1 + sup_norm)`` the bound is
    ``1/(1 + 2 beta + k^2)`` for ``k <= 1`` and ``1/(2 beta + 2 k)`` otherwise.
    """
    _beta(beta)
    _unit("sup_norm", sup_norm)
    _unit("hyp_norm", hyp_norm)
    k = hyp_norm * (1.0 + sup_norm)
    if k <= 1:
        return 1.0 / (1.0 + 2.0 * beta + k * k)
    return 1.0 / (2.0 * beta + 2.0 * k)


def delta_beta(x, beta: float):
    """``x(1+x)^b / ((1+x)^b - (1-x)^b)`` on ``(0, 1]``, written as
    ``x / (1 - ((1-x)/(1+x))^b)`` to avoid cancellation."""
    _beta(beta)
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0) or np.any(xa > 1):
        raise DomainError("delta_beta is defined for x in (0, 1]")
    with np.errstate(divide="ignore"):
        ratio_log = np.log1p(-xa) - np.log1p(xa)
    out = xa / -np.expm1(beta * ratio_log)
    return float(out) if out.ndim == 0 else out


def alpha_bound_f_alpha(beta: float, sup_norm: float, hyp_norm: float) -> float:
    """Univalence bound for ``f_alpha`` over a LIF of order ``beta``."""
    _beta(beta)
    _unit("sup_norm", sup_norm)
    _unit("hyp_norm", hyp_norm)
    return 1.0 / (2.0 * beta + (3.0 + sup_norm) * hyp_norm)


def linear_connectivity_bound(m: float) -> float:
    """Largest admissible ``||w||`` (strict) for a shear onto an m-linearly connected domain."""
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    return 1.0 / (2.0 * m + 1.0)


def alpha_bound_convex_f_alpha(sup_norm: float) -> float:
    """Supremum of admissible ``alpha`` in [0, 1] with ``alpha*||w|| < 1/3`` (strict when < 1)."""
    _unit("sup_norm", sup_norm)
    if sup_norm == 0:
        return 1.0
    return min(1.0, 1.0 / (3.0 * sup_norm))


def _shcc_y(x):
    return x * math.pi + 2.0 * math.asin(x)


def shcc_constants(tolerance: float = 1e-6) -> tuple[float, float]:
    """``(x0, upper)``: the root of ``x*pi + 2 asin(x) = pi/2`` and ``sqrt(2)/2``.

    The stable close-to-convex interval for ``F_alpha`` of a convex map is
    ``(-x0, upper)``.
    """
    if tolerance <= 0:
        raise DomainError("tolerance must be positive")
    x0 = bisect(lambda x: 2.0 * _shcc_y(x) - math.pi, 0.0, 0.5, xtol=tolerance)
    return float(x0), math.sqrt(2.0) / 2.0


def lif_growth_lhs(phi: AnalyticMapSpec, z):
    z = np.asarray(z, dtype=complex)
    zero = z == 0
    safe = np.where(zero, 0.5, z)
    q = np.where(zero, 1.0, safe * phi.d1(safe) / phi.value(safe))
    return (1 - np.abs(z) ** 2) * np.abs(q)


def lif_growth_check(phi: AnalyticMapSpec, beta: float, grid: DiscGrid | None = None) -> CriterionReport:
    _beta(beta)
    return _report("lif_growth", lambda z: lif_growth_lhs(phi, z), grid or DiscGrid(), 2.0 * beta,
                   details={"beta": beta})


# -- close-to-convexity ------------------------------------------------------


def _arc_integrand(dlog, r, theta):
    z = r * np.exp(1j * theta)
    return np.real(1 + z * dlog(z))


def shcc_arc_integral(slice_, r: float, theta1: float, theta2: float, panels: int = 16,
                      tol: float = ARC_TOL, max_doublings: int = 16) -> float:
    """Composite Simpson value of ``int Re{1 + z Phi''/Phi'} dtheta`` on ``|z| = r``.

    ``slice_`` is a :class:`TruncatedSeries` for ``Phi`` or a callable
    returning ``Phi''/Phi'``.  Panels double until successive values differ
    by less than ``tol``.
    """
    if not 0 <= r < 1:
        raise DomainError("arc radius must lie in [0, 1)")
    if not 0 <= theta2 - theta1 <= 2 * np.pi + 1e-12:
        raise DomainError("need 0 <= theta2 - theta1 <= 2 pi")
    if isinstance(slice_, TruncatedSeries):
        d1 = differentiate(slice_)
        d2 = differentiate(d1)

        def dlog(z):
            p = evaluate(d1, z)
            if np.any(np.abs(p) <= DIVISION_EPS):
                raise VanishingDerivative("Phi' vanishes on the arc")
            return evaluate(d2, z) / p
    else:
        dlog = slice_
    if theta2 == theta1:
        return 0.0

    def simpson(n):
        th = np.linspace(theta1, theta2, 2 * n + 1)
        y = _arc_integrand(dlog, r, th)
        hstep = (theta2 - theta1) / (2 * n)
        return hstep / 3 * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum())

    n = max(int(panels), 1)
    prev = simpson(n)
    for _ in range(max_doublings):
        n *= 2
        cur = simpson(n)
        if abs(cur - prev) < tol:
            return float(cur)
        prev = cur
    return float(prev)


def ctc_halfplane_check(f: HarmonicMap, lambda_samples: int = 16, grid: DiscGrid | None = None) -> CriterionReport:
    """Minimum of ``Re{Phi_lam'}`` over the grid and ``lam`` on the unit circle."""
    if lambda_samples < 8:
        raise InsufficientSamples(f"need at least 8 lambda samples, got {lambda_samples}")
    lams = np.exp(2j * np.pi * np.arange(lambda_samples) / lambda_samples)

    def field_(z):
        hp = f.h_prime(z)
        w = f.dilatation(z)
        return np.min(np.real(hp[..., None] * (1 + lams * w[..., None])), axis=-1)

    return _report("ctc_halfplane", field_, grid or DiscGrid(), 0.0, direction="min", strict=True,
                   details={"lambda_samples": lambda_samples})


# -- convexity / starlikeness ------------------------------------------------


def _ratio(phi, z, num):
    z = np.asarray(z, dtype=complex)
    d1 = phi.d1(z)
    if np.any(np.abs(d1) <= DIVISION_EPS):
        raise VanishingDerivative(f"{phi.label}: phi' vanishes on the grid")
    return num(z, d1)


def convexity_field(phi: AnalyticMapSpec, z):
    return _ratio(phi, z, lambda z, d1: np.real(1 + z * phi.d2(z) / d1))


def starlike_field(phi: AnalyticMapSpec, z):
    z = np.asarray(z, dtype=complex)
    zero = z == 0
    safe = np.where(zero, 0.5, z)
    q = _ratio(phi, safe, lambda s, d1: s * d1 / phi.value(s))
    return np.where(zero, 1.0, np.real(q))


def convexity_check(phi: AnalyticMapSpec, grid: DiscGrid | None = None) -> CriterionReport:
    """``min Re{1 + z phi''/phi'} >= 0``; also reports ``min Re{z phi'/phi}``
    (at least 1/2 for convex maps) and ``min Re{phi(z)/z}``."""
    grid = grid or DiscGrid()
    rep = _report("convexity", lambda z: convexity_field(phi, z), grid, 0.0, direction="min")
    star_min = -refined_max(lambda z: -starlike_field(phi, z), grid)[0]
    quot_min = -refined_max(lambda z: -np.real(phi.quotient(z)), grid)[0]
    rep.details.update({"min_re_zphi1_over_phi": star_min, "min_re_phi_over_z": quot_min})
    return rep


def starlike_check(phi: AnalyticMapSpec, grid: DiscGrid | None = None) -> CriterionReport:
    return _report("starlike", lambda z: starlike_field(phi, z), grid or DiscGrid(), 0.0, direction="min")
