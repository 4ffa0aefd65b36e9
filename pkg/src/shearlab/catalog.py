"""Closed-form analytic maps and dilatations used as inputs and oracles.

Every analytic entry is normalized by ``phi(0) = 0, phi'(0) = 1`` and carries
its first two derivatives in closed form, the principal logarithms
``log(phi(z)/z)`` and ``log phi'(z)`` (both analytic in the disc and zero at
the origin), class tags, and an exact Taylor expansion.  Dilatations are
analytic self-maps of the disc with their derivative and, where known, the
exact sup norm and hyperbolic norm.

All evaluators accept scalars or numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ParamOutOfRange, UnknownName
from .series import TruncatedSeries, binomial_series, integrate, mul, reciprocal

Evaluator = Callable[[np.ndarray], np.ndarray]

TAGS = frozenset({"in_S", "starlike", "convex", "locally_univalent"})
_PARAM_TOL = 1e-12


def _c(z):
    return np.asarray(z, dtype=complex)


def _log1m(z):
    return np.log(1.0 - _c(z))


def _out(x):
    x = np.asarray(x)
    return complex(x) if x.ndim == 0 else x


@dataclass(frozen=True, eq=False)
class AnalyticMapSpec:
    name: str
    value: Evaluator
    d1: Evaluator
    d2: Evaluator
    log_d1: Evaluator
    series_fn: Callable[[int], TruncatedSeries]
    tags: frozenset = frozenset()
    lif_order: Optional[float] = None
    params: dict = field(default_factory=dict)
    log_quotient_fn: Optional[Evaluator] = None
    dlog_quotient_fn: Optional[Evaluator] = None

    def __post_init__(self):
        unknown = set(self.tags) - TAGS
        if unknown:
            raise ValueError(f"unknown tags {sorted(unknown)}")

    @property
    def label(self) -> str:
        if not self.params:
            return self.name
        inner = ",".join(f"{k}={_fmt(v)}" for k, v in sorted(self.params.items()))
        return f"{self.name}:{inner}"

    def series(self, order: int) -> TruncatedSeries:
        return self.series_fn(order)

    def log_quotient(self, z):
        """Analytic branch of ``log(phi(z)/z)`` vanishing at the origin."""
        if self.log_quotient_fn is not None:
            return _out(self.log_quotient_fn(_c(z)))
        return _out(_continued_log_quotient(self, _c(z)))

    def dlog_quotient(self, z):
        """``phi'(z)/phi(z) - 1/z``, the derivative of :meth:`log_quotient`."""
        if self.dlog_quotient_fn is not None:
            return _out(self.dlog_quotient_fn(_c(z)))
        zz = _c(z)
        a = self.series(3).coeffs
        small = np.abs(zz) < 1e-4
        safe = np.where(small, 0.5, zz)
        out = self.d1(safe) / self.value(safe) - 1.0 / safe
        taylor = a[2] + (2 * a[3] - a[2] ** 2) * zz
        return _out(np.where(small, taylor, out))

    def quotient(self, z):
        """``phi(z)/z`` with the removable singularity at 0 filled in."""
        zz = _c(z)
        small = zz == 0
        safe = np.where(small, 0.5, zz)
        return _out(np.where(small, 1.0, self.value(safe) / safe))


@dataclass(frozen=True, eq=False)
class DilatationSpec:
    name: str
    value: Evaluator
    d1: Evaluator
    compose_series: Callable[[TruncatedSeries], TruncatedSeries]
    exact_sup_norm: Optional[float] = None
    exact_hyp_norm: Optional[float] = None
    params: dict = field(default_factory=dict)

    @property
    def label(self) -> str:
        if not self.params:
            return self.name
        inner = ",".join(f"{k}={_fmt(v)}" for k, v in sorted(self.params.items()))
        return f"{self.name}:{inner}"

    def series(self, order: int) -> TruncatedSeries:
        return self.compose_series(TruncatedSeries.identity(order))


def _fmt(v) -> str:
    if isinstance(v, complex):
        if v.imag == 0:
            return repr(v.real)
        return f"{v.real!r}{v.imag:+}j"
    return repr(v)


def _continued_log_quotient(spec: AnalyticMapSpec, z: np.ndarray, steps: int = 48) -> np.ndarray:
    # follow arg(phi(tz)/tz) along the ray so the branch stays analytic; the
    # steps are uniform in -log(1 - t|z|), where the phase can move fastest
    shape = z.shape
    zf = z.ravel()
    r = np.abs(zf)
    s_max = -np.log1p(-r)
    k = np.arange(steps + 1)[:, None] / steps
    with np.errstate(invalid="ignore", divide="ignore"):
        t = np.where(r > 0, -np.expm1(-k * s_max) / r, k)
    q = np.atleast_2d(spec.quotient(t * zf))
    phase = np.unwrap(np.angle(q), axis=0)[-1]
    return (np.log(np.abs(q[-1])) + 1j * phase).reshape(shape)


def _shift_up(s: TruncatedSeries) -> TruncatedSeries:
    """Multiply by ``z`` keeping the order."""
    return TruncatedSeries(np.concatenate([[0.0], s.coeffs[:-1]]))


# -- analytic maps -----------------------------------------------------------


def _identity() -> AnalyticMapSpec:
    zero = lambda z: np.zeros_like(_c(z))
    return AnalyticMapSpec(
        name="identity",
        value=lambda z: _c(z),
        d1=lambda z: np.ones_like(_c(z)),
        d2=zero,
        log_d1=zero,
        series_fn=TruncatedSeries.identity,
        tags=TAGS,
        lif_order=1.0,
        log_quotient_fn=zero,
        dlog_quotient_fn=zero,
    )


def _koebe() -> AnalyticMapSpec:
    return AnalyticMapSpec(
        name="koebe",
        value=lambda z: _c(z) / (1 - _c(z)) ** 2,
        d1=lambda z: (1 + _c(z)) / (1 - _c(z)) ** 3,
        d2=lambda z: (4 + 2 * _c(z)) / (1 - _c(z)) ** 4,
        log_d1=lambda z: np.log(1 + _c(z)) - 3 * _log1m(z),
        series_fn=lambda n: _shift_up(binomial_series(-2, n)),
        tags=frozenset({"in_S", "starlike", "locally_univalent"}),
        lif_order=2.0,
        log_quotient_fn=lambda z: -2 * _log1m(z),
        dlog_quotient_fn=lambda z: 2 / (1 - _c(z)),
    )


def _halfplane() -> AnalyticMapSpec:
    return AnalyticMapSpec(
        name="halfplane",
        value=lambda z: _c(z) / (1 - _c(z)),
        d1=lambda z: 1 / (1 - _c(z)) ** 2,
        d2=lambda z: 2 / (1 - _c(z)) ** 3,
        log_d1=lambda z: -2 * _log1m(z),
        series_fn=lambda n: _shift_up(binomial_series(-1, n)),
        tags=TAGS,
        lif_order=1.0,
        log_quotient_fn=lambda z: -_log1m(z),
        dlog_quotient_fn=lambda z: 1 / (1 - _c(z)),
    )


def mu_admissible(mu: complex) -> bool:
    """``(1-z)**mu`` is univalent iff ``mu`` lies in one of the two closed
    unit discs centred at -1 and 1."""
    return abs(mu - 1) <= 1 + _PARAM_TOL or abs(mu + 1) <= 1 + _PARAM_TOL


def _mu_family(mu: complex) -> AnalyticMapSpec:
    mu = complex(mu)
    if not mu_admissible(mu):
        raise ParamOutOfRange(f"mu={mu} needs |mu-1| <= 1 or |mu+1| <= 1")
    if mu == 0:
        # normalized limit of (1 - (1-z)**mu)/mu as mu -> 0
        value = lambda z: -_log1m(z)
    else:
        value = lambda z: (1 - np.exp(mu * _log1m(z))) / mu
    convex = mu.imag == 0 and -1 <= mu.real <= 1
    tags = {"in_S", "locally_univalent"}
    if convex:
        tags |= {"convex", "starlike"}
    return AnalyticMapSpec(
        name="mu",
        value=value,
        d1=lambda z: np.exp((mu - 1) * _log1m(z)),
        d2=lambda z: (1 - mu) * np.exp((mu - 2) * _log1m(z)),
        log_d1=lambda z: (mu - 1) * _log1m(z),
        series_fn=lambda n: integrate(binomial_series(mu - 1, n - 1)),
        tags=frozenset(tags),
        lif_order=1.0 if convex else 2.0,
        params={"mu": mu},
    )


def _gamma_family(gamma: complex) -> AnalyticMapSpec:
    gamma = complex(gamma)
    if abs(1 + gamma) > 1 + _PARAM_TOL:
        raise ParamOutOfRange(f"gamma={gamma}: z(1-z)^gamma needs |1+gamma| <= 1 to be locally univalent")
    g = gamma
    starlike = g.imag == 0 and -2 <= g.real <= 0
    tags = {"locally_univalent"}
    if starlike:
        tags |= {"in_S", "starlike"}
    if g in (0, -1):
        tags |= {"convex"}
    return AnalyticMapSpec(
        name="gamma",
        value=lambda z: _c(z) * np.exp(g * _log1m(z)),
        d1=lambda z: np.exp((g - 1) * _log1m(z)) * (1 - (1 + g) * _c(z)),
        d2=lambda z: g * np.exp((g - 2) * _log1m(z)) * ((1 + g) * _c(z) - 2),
        log_d1=lambda z: (g - 1) * _log1m(z) + np.log(1 - (1 + g) * _c(z)),
        series_fn=lambda n: _shift_up(binomial_series(g, n)),
        tags=frozenset(tags),
        lif_order=(1.0 if "convex" in tags else 2.0) if starlike else None,
        params={"gamma": gamma},
        log_quotient_fn=lambda z: g * _log1m(z),
        dlog_quotient_fn=lambda z: -g / (1 - _c(z)),
    )


_MAPS = {
    "identity": (_identity, ()),
    "koebe": (_koebe, ()),
    "halfplane": (_halfplane, ()),
    "mu": (_mu_family, ("mu",)),
    "gamma": (_gamma_family, ("gamma",)),
}


def catalog_map(name: str, **params) -> AnalyticMapSpec:
    """Look up a normalized analytic map by name.

    >>> catalog_map("koebe").value(0.5)
    (2+0j)
    """
    try:
        factory, names = _MAPS[name]
    except KeyError:
        raise UnknownName(f"unknown analytic map {name!r}; known: {sorted(_MAPS)}") from None
    extra = set(params) - set(names)
    if extra:
        raise ParamOutOfRange(f"{name} takes parameters {list(names)}, got {sorted(params)}")
    missing = [p for p in names if p not in params]
    if missing:
        raise ParamOutOfRange(f"{name} requires parameters {missing}")
    return factory(*(params[p] for p in names))


def map_names() -> list[str]:
    return sorted(_MAPS)


# -- dilatations ------------------------------------------------------------


def _zero() -> DilatationSpec:
    return DilatationSpec(
        name="zero",
        value=lambda z: np.zeros_like(_c(z)),
        d1=lambda z: np.zeros_like(_c(z)),
        compose_series=lambda s: TruncatedSeries.constant(0.0, s.order),
        exact_sup_norm=0.0,
        exact_hyp_norm=0.0,
    )


def _constant(c: complex) -> DilatationSpec:
    c = complex(c)
    if abs(c) >= 1:
        raise ParamOutOfRange(f"constant dilatation needs |c| < 1, got {c}")
    return DilatationSpec(
        name="constant",
        value=lambda z: np.full_like(_c(z), c),
        d1=lambda z: np.zeros_like(_c(z)),
        compose_series=lambda s: TruncatedSeries.constant(c, s.order),
        exact_sup_norm=abs(c),
        exact_hyp_norm=0.0,
        params={"c": c},
    )


def _linear(c: complex) -> DilatationSpec:
    c = complex(c)
    if abs(c) >= 1:
        raise ParamOutOfRange(f"linear dilatation needs |c| < 1, got {c}")
    return DilatationSpec(
        name="linear",
        value=lambda z: c * _c(z),
        d1=lambda z: np.full_like(_c(z), c),
        compose_series=lambda s: c * s,
        exact_sup_norm=abs(c),
        exact_hyp_norm=abs(c),
        params={"c": c},
    )


def _power(n) -> DilatationSpec:
    if int(n) != n or n < 1:
        raise ParamOutOfRange(f"power dilatation needs an integer n >= 1, got {n}")
    n = int(n)

    def compose(s):
        out = s
        for _ in range(n - 1):
            out = mul(out, s)
        return out

    return DilatationSpec(
        name="power",
        value=lambda z: _c(z) ** n,
        d1=lambda z: n * _c(z) ** (n - 1),
        compose_series=compose,
        exact_sup_norm=1.0,
        exact_hyp_norm=1.0,
        params={"n": n},
    )


def _mobius(a: complex, c: complex = 1.0) -> DilatationSpec:
    a, c = complex(a), complex(c)
    if abs(a) >= 1:
        raise ParamOutOfRange(f"mobius needs |a| < 1, got {a}")
    if abs(c) > 1:
        raise ParamOutOfRange(f"mobius needs |c| <= 1, got {c}")
    ab = a.conjugate()
    return DilatationSpec(
        name="mobius",
        value=lambda z: c * (_c(z) - a) / (1 - ab * _c(z)),
        d1=lambda z: c * (1 - abs(a) ** 2) / (1 - ab * _c(z)) ** 2,
        compose_series=lambda s: c * mul(s - a, reciprocal(1 - ab * s)),
        exact_sup_norm=abs(c),
        exact_hyp_norm=abs(c),
        params={"a": a, "c": c},
    )


_DILATATIONS = {
    "zero": (_zero, (), ()),
    "constant": (_constant, ("c",), ()),
    "linear": (_linear, ("c",), ()),
    "power": (_power, ("n",), ()),
    "mobius": (_mobius, ("a",), ("c",)),
}


def catalog_dilatation(name: str, **params) -> DilatationSpec:
    """Look up a dilatation by name.

    ``zero``; ``constant`` (c); ``linear`` (c, for c*z); ``power`` (n, for
    z**n); ``mobius`` (a, optional c, for c*(z-a)/(1-conj(a)z)).
    """
    try:
        factory, required, optional = _DILATATIONS[name]
    except KeyError:
        raise UnknownName(f"unknown dilatation {name!r}; known: {sorted(_DILATATIONS)}") from None
    extra = set(params) - set(required) - set(optional)
    if extra:
        raise ParamOutOfRange(f"{name} takes parameters {list(required + optional)}, got {sorted(params)}")
    missing = [p for p in required if p not in params]
    if missing:
        raise ParamOutOfRange(f"{name} requires parameters {missing}")
    return factory(**params)


def dilatation_names() -> list[str]:
    return sorted(_DILATATIONS)


def compose(outer: DilatationSpec, inner: DilatationSpec) -> DilatationSpec:
    """``outer o inner``; again a self-map of the disc, norms left unknown."""
    return DilatationSpec(
        name=f"{outer.label}∘{inner.label}",
        value=lambda z: outer.value(inner.value(z)),
        d1=lambda z: outer.d1(inner.value(z)) * inner.d1(z),
        compose_series=lambda s: outer.compose_series(inner.compose_series(s)),
    )


def series_of(spec: AnalyticMapSpec | DilatationSpec, order: int) -> TruncatedSeries:
    return spec.series(order)
