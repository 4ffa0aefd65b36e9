"""Empirical univalence checks: sampled collision search and theorem scans.

The sampler looks for two well-separated preimages whose images nearly
coincide.  Image points are indexed in a k-d tree; a nearby pair is kept as a
candidate only when its image gap is small compared with what the local
differential predicts for that preimage separation, which filters out
neighbours on the same sheet.  Candidates are polished with a damped
Gauss-Newton iteration on ``|f(z1) - f(z2)|^2``.

Finding nothing is evidence, not proof: the sampler never certifies
univalence.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .catalog import AnalyticMapSpec, DilatationSpec, catalog_dilatation, catalog_map
from .criteria import (
    alpha_bound_convex_f_alpha,
    alpha_bound_f_alpha,
    alpha_bound_shs,
    convexity_check,
    linear_connectivity_bound,
    norms,
)
from .errors import InsufficientSamples, NumericalError, PreconditionViolated
from .grid import DiscGrid
from .harmonic import (
    HarmonicMap,
    harmonic_parts,
    shear,
    slice_derivative,
    transform_F_alpha,
    transform_f_alpha,
    transformed_base,
)

MIN_SEPARATION = 1e-3
GAP_TOL = 1e-9
SCAN_ORDER = 32  # transforms built only for sampling need few coefficients


@dataclass(frozen=True)
class CollisionReport:
    z1: complex
    z2: complex
    separation: float
    image_gap: float
    refined: bool = True

    @property
    def confirmed(self) -> bool:
        return self.separation > MIN_SEPARATION and self.image_gap < GAP_TOL

    def to_dict(self) -> dict:
        return {
            "z1": [self.z1.real, self.z1.imag],
            "z2": [self.z2.real, self.z2.imag],
            "separation": self.separation,
            "image_gap": self.image_gap,
            "refined": self.refined,
        }


@dataclass
class ScanOutcome:
    params: dict
    collision: Optional[CollisionReport] = None
    status: str = "no_collision_found"
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "params": self.params,
            "status": self.status,
            "collision": None if self.collision is None else self.collision.to_dict(),
            "details": self.details,
        }


@dataclass
class ScanResult:
    kind: str
    outcomes: list
    theorem_threshold: Optional[float] = None
    asserted: bool = True
    notes: list = field(default_factory=list)

    @property
    def parameter_grid(self) -> list:
        return [o.params for o in self.outcomes]

    @property
    def collisions(self) -> list:
        return [o for o in self.outcomes if o.status == "collision"]

    @property
    def has_collision(self) -> bool:
        return bool(self.collisions)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "theorem_threshold": self.theorem_threshold,
            "asserted": self.asserted,
            "n_collisions": len(self.collisions),
            "outcomes": [o.to_dict() for o in self.outcomes],
            "notes": list(self.notes),
        }


# -- sampler -----------------------------------------------------------------


def _fd_differential(map_eval, z, eps=1e-7):
    """Wirtinger derivatives ``(df/dz, df/dconj(z))`` by forward differences."""
    f0 = map_eval(z)
    fx = (map_eval(z + eps) - f0) / eps
    fy = (map_eval(z + 1j * eps) - f0) / eps
    return 0.5 * (fx - 1j * fy), 0.5 * (fx + 1j * fy)


def refine_collision(map_eval, z1: complex, z2: complex, differential=None, r_max: float = DiscGrid().r_max,
                     iterations: int = 50):
    """Damped Gauss-Newton on ``|f(z1) - f(z2)|^2`` with minimum-norm steps.

    Returns ``(z1, z2, gap)``; iterates are clipped to ``|z| <= r_max``.
    """
    diff = differential or (lambda z: _fd_differential(map_eval, z))

    def residual(a, b):
        v = map_eval(np.array([a, b]))
        return v[0] - v[1]

    def clip(z):
        r = abs(z)
        return z if r <= r_max else z * (r_max / r)

    res = residual(z1, z2)
    gap = abs(res)
    mu = 1e-3 * max(gap, 1e-300)
    for _ in range(iterations):
        if gap < 1e-15 * max(1.0, abs(map_eval(np.array([z1]))[0])):
            break
        a, b = diff(np.array([z1, z2]))
        a, b = np.asarray(a), np.asarray(b)
        cols = [a[0] + b[0], 1j * (a[0] - b[0]), -(a[1] + b[1]), -1j * (a[1] - b[1])]
        J = np.array([[c.real for c in cols], [c.imag for c in cols]])
        r = np.array([res.real, res.imag])
        improved = False
        for _ in range(8):
            step = -J.T @ np.linalg.solve(J @ J.T + mu * np.eye(2), r)
            n1 = clip(z1 + complex(step[0], step[1]))
            n2 = clip(z2 + complex(step[2], step[3]))
            new_res = residual(n1, n2)
            if abs(new_res) < gap:
                z1, z2, res, gap = n1, n2, new_res, abs(new_res)
                mu = max(mu / 4, 1e-300)
                improved = True
                break
            mu = mu * 4 + 1e-300
        if not improved:
            break
    return z1, z2, gap


def _grid_neighbour_spacing(vals: np.ndarray) -> np.ndarray:
    """Largest image distance from each grid node to its four grid neighbours."""
    s = np.zeros(vals.shape)
    s[1:] = np.maximum(s[1:], np.abs(vals[1:] - vals[:-1]))
    s[:-1] = np.maximum(s[:-1], np.abs(vals[:-1] - vals[1:]))
    s[1:] = np.maximum(s[1:], np.abs(vals[1:] - np.roll(vals[1:], 1, axis=1)))
    s[1:] = np.maximum(s[1:], np.abs(vals[1:] - np.roll(vals[1:], -1, axis=1)))
    return s


def injectivity_sample(
    map_eval: Callable,
    grid: DiscGrid | None = None,
    min_separation: float = MIN_SEPARATION,
    values: np.ndarray | None = None,
    differential: Callable | None = None,
    max_candidates: int = 32,
    neighbours: int = 12,
) -> Optional[CollisionReport]:
    """Search the grid images of ``map_eval`` for a confirmed collision.

    ``values`` may carry precomputed images of ``grid.points()``;
    ``differential(z)`` returns ``(df/dz, df/dconj(z))`` and falls back to
    finite differences.  Returns the first confirmed collision or ``None``.
    """
    grid = grid or DiscGrid()
    pts = grid.points()
    vals = np.asarray(map_eval(pts) if values is None else values, dtype=complex)
    if differential is None:
        a, b = _fd_differential(map_eval, pts)
    else:
        a, b = differential(pts)
    sigma = np.abs(np.abs(a) - np.abs(b))
    spacing = _grid_neighbour_spacing(vals)

    n_r, n_t = pts.shape
    ir, it = np.meshgrid(np.arange(n_r), np.arange(n_t), indexing="ij")
    keep = np.ones(pts.shape, dtype=bool)
    keep[0, 1:] = False  # the origin appears once
    keep &= np.isfinite(vals)
    z = pts[keep]
    w = vals[keep]
    sg = np.broadcast_to(sigma, pts.shape)[keep]
    sp = spacing[keep]
    ir, it = ir[keep], it[keep]
    if z.size < 2:
        return None

    k = min(neighbours + 1, z.size)
    tree = cKDTree(np.column_stack([w.real, w.imag]))
    dist, nbr = tree.query(np.column_stack([w.real, w.imag]), k=k)
    i = np.repeat(np.arange(z.size), k)
    j = nbr.ravel()
    d = dist.ravel()
    ok = (j < z.size) & (j != i)
    i, j, d = i[ok], j[ok], d[ok]
    dr = np.abs(ir[i] - ir[j])
    dt = np.abs(it[i] - it[j])
    dt = np.minimum(dt, n_t - dt)
    adjacent = (dr <= 2) & ((dt <= 2) | (np.minimum(ir[i], ir[j]) == 0))
    sep = np.abs(z[i] - z[j])
    predicted = np.minimum(sg[i], sg[j]) * sep
    with np.errstate(divide="ignore", invalid="ignore"):
        score = np.where(predicted > 0, d / predicted, np.inf)
    cand = (~adjacent) & (sep > min_separation) & (d <= np.maximum(sp[i], sp[j])) & (score < 0.5)
    if not np.any(cand):
        return None
    i, j, score = i[cand], j[cand], score[cand]
    lo, hi = np.minimum(i, j), np.maximum(i, j)
    order = np.lexsort((hi, lo, score))
    seen = set()
    tried = 0
    for idx in order:
        key = (int(lo[idx]), int(hi[idx]))
        if key in seen:
            continue
        seen.add(key)
        z1, z2, gap = refine_collision(map_eval, complex(z[key[0]]), complex(z[key[1]]), differential, grid.r_max)
        rep = CollisionReport(z1, z2, abs(z1 - z2), float(gap), True)
        if rep.separation > min_separation and rep.image_gap < GAP_TOL:
            return rep
        tried += 1
        if tried >= max_candidates:
            break
    return None


def confirm_collision(report: CollisionReport, map_eval: Callable, min_separation: float = MIN_SEPARATION) -> bool:
    """Re-evaluate a reported collision with an independent evaluator."""
    v = map_eval(np.array([report.z1, report.z2]))
    return abs(report.z1 - report.z2) > min_separation and abs(v[0] - v[1]) < GAP_TOL


# -- evaluators for harmonic maps --------------------------------------------


def harmonic_evaluator(f: HarmonicMap):
    def ev(z):
        h, g = harmonic_parts(f, z)
        return np.asarray(h) + np.conj(g)

    def diff(z):
        hp, gp = f.derivatives(z)
        return hp, np.conj(gp)

    return ev, diff


def harmonic_injectivity(f: HarmonicMap, grid: DiscGrid | None = None,
                         min_separation: float = MIN_SEPARATION) -> Optional[CollisionReport]:
    ev, diff = harmonic_evaluator(f)
    return injectivity_sample(ev, grid, min_separation, differential=diff)


def analytic_injectivity(phi: AnalyticMapSpec, grid: DiscGrid | None = None,
                         min_separation: float = MIN_SEPARATION) -> Optional[CollisionReport]:
    return injectivity_sample(
        phi.value, grid, min_separation, differential=lambda z: (phi.d1(z), np.zeros_like(z))
    )


def _outcome(params, rep, **details) -> ScanOutcome:
    if rep is None:
        return ScanOutcome(params, None, "no_collision_found", details)
    return ScanOutcome(params, rep, "collision", details)


def stable_family_scan(f: HarmonicMap, lambda_count: int = 16, grid: DiscGrid | None = None,
                       theorem_threshold: float | None = None) -> ScanResult:
    """Collision search on the analytic slices ``h + lam*g``, ``lam`` on the unit circle."""
    if lambda_count < 8:
        raise InsufficientSamples(f"need at least 8 lambda samples, got {lambda_count}")
    grid = grid or DiscGrid()
    pts = grid.points()
    H, G = harmonic_parts(f, pts)
    outcomes = []
    for j in range(lambda_count):
        lam = np.exp(2j * np.pi * j / lambda_count)

        def ev(z, lam=lam):
            h, g = harmonic_parts(f, z)
            return np.asarray(h) + lam * np.asarray(g)

        def diff(z, lam=lam):
            return slice_derivative(f, lam, z), np.zeros_like(np.asarray(z, dtype=complex))

        rep = injectivity_sample(ev, grid, values=H + lam * G, differential=diff)
        outcomes.append(_outcome({"lambda": [lam.real, lam.imag], "alpha": f.provenance.get("alpha")}, rep))
    return ScanResult("stable_family", outcomes, theorem_threshold)


# -- family probes -----------------------------------------------------------


def mu_family_probe(mu: complex, alphas: Sequence[float], grid: DiscGrid | None = None) -> ScanResult:
    """Classical ``f_alpha`` (no dilatation) of the normalized ``(1-z)**mu`` map."""
    phi = catalog_map("mu", mu=mu)
    zero = catalog_dilatation("zero")
    outcomes = []
    for alpha in alphas:
        f = transform_f_alpha(phi, zero, alpha, order=SCAN_ORDER)
        rep = harmonic_injectivity(f, grid)
        outcomes.append(_outcome({"alpha": float(alpha), "mu": [complex(mu).real, complex(mu).imag]}, rep))
    return ScanResult("mu_probe", outcomes, 0.25, asserted=False,
                      notes=["univalence is guaranteed for |alpha| < 1/4; larger alpha is exploratory"])


def gamma_family_probe(alpha: float, gammas: Sequence[complex], grid: DiscGrid | None = None) -> ScanResult:
    """Classical ``F_alpha`` of ``z(1-z)**gamma`` for each gamma (exploratory)."""
    if abs(alpha) <= 0.5:
        raise PreconditionViolated(f"the gamma probe targets |alpha| > 1/2, got {alpha}")
    zero = catalog_dilatation("zero")
    outcomes = []
    for gamma in gammas:
        params = {"alpha": float(alpha), "gamma": [complex(gamma).real, complex(gamma).imag]}
        phi = catalog_map("gamma", gamma=gamma)
        phi_rep = analytic_injectivity(phi, grid)
        try:
            f = transform_F_alpha(phi, zero, alpha, order=SCAN_ORDER)
        except NumericalError as exc:
            outcomes.append(ScanOutcome(params, None, "undefined", {"error": f"{type(exc).__name__}: {exc}"}))
            continue
        rep = harmonic_injectivity(f, grid)
        outcomes.append(_outcome(params, rep, phi_collision=None if phi_rep is None else phi_rep.to_dict()))
    return ScanResult("gamma_probe", outcomes, 0.25, asserted=False,
                      notes=["existence of a non-univalent F_alpha is not constructive; report only"])


def convex_shear_check(phi: AnalyticMapSpec, omega: DilatationSpec, alpha: float,
                       grid: DiscGrid | None = None) -> ScanResult:
    """``f_alpha`` of a convex map with ``alpha*||w|| < 1/3``: convexity of
    ``phi_alpha`` plus a collision search."""
    if "convex" not in phi.tags:
        raise PreconditionViolated(f"{phi.label} is not tagged convex")
    if not 0 <= alpha <= 1:
        raise PreconditionViolated(f"alpha must lie in [0, 1], got {alpha}")
    sup = omega.exact_sup_norm if omega.exact_sup_norm is not None else norms(omega)[0]
    if alpha * sup >= 1 / 3:
        raise PreconditionViolated(f"alpha*||omega|| = {alpha * sup:.6g} is not below 1/3")
    conv = convexity_check(transformed_base(phi, alpha, "f"))
    f = transform_f_alpha(phi, omega, alpha, order=SCAN_ORDER)
    rep = harmonic_injectivity(f, grid)
    out = _outcome({"phi": phi.label, "omega": omega.label, "alpha": alpha}, rep,
                   phi_alpha_convexity=conv.to_dict())
    return ScanResult("convex_shear", [out], 1 / 3)


# -- theorem consistency matrix ----------------------------------------------

DEFAULT_PHIS = (("identity", {}), ("halfplane", {}), ("koebe", {}))
DEFAULT_OMEGAS = (("zero", {}), ("constant", {"c": 0.5}), ("linear", {"c": 0.5}), ("power", {"n": 1}))


def _matrix_rows(phis, omegas, fraction):
    """``(params, phi, omega)`` triples for every applicable check."""
    rows = []
    for pname, pparams in phis:
        phi = catalog_map(pname, **pparams)
        for oname, oparams in omegas:
            omega = catalog_dilatation(oname, **oparams)
            sup, hyp, _ = norms(omega)
            base = {"phi": phi.label, "omega": omega.label}
            if "in_S" in phi.tags:
                bound = alpha_bound_shs(sup, hyp)
                for sign in (1, -1):
                    rows.append((dict(base, check="shs_F_alpha", alpha=sign * fraction * bound,
                                      threshold=bound), phi, omega))
            if phi.lif_order is not None:
                bound = alpha_bound_f_alpha(phi.lif_order, sup, hyp)
                for sign in (1, -1):
                    rows.append((dict(base, check="f_alpha_lif", alpha=sign * fraction * bound,
                                      threshold=bound, beta=phi.lif_order), phi, omega))
            if "convex" in phi.tags:
                bound = alpha_bound_convex_f_alpha(sup)
                rows.append((dict(base, check="convex_f_alpha", alpha=fraction * bound, threshold=bound),
                             phi, omega))
                bound = linear_connectivity_bound(1)
                scale = fraction * bound / sup if sup > 0 else 1.0
                rows.append((dict(base, check="linear_connectivity", scale=scale, threshold=bound, m=1),
                             phi, omega))
    return rows


def _run_row(row, grid, lambda_count):
    params, phi, omega = row
    check = params["check"]
    if check == "shs_F_alpha":
        f = transform_F_alpha(phi, omega, params["alpha"], order=SCAN_ORDER)
        hits = stable_family_scan(f, lambda_count, grid, params["threshold"]).collisions
        return _outcome(params, hits[0].collision if hits else None, lambda_slices=lambda_count)
    if check == "f_alpha_lif":
        f = transform_f_alpha(phi, omega, params["alpha"], order=SCAN_ORDER)
        return _outcome(params, harmonic_injectivity(f, grid))
    if check == "convex_f_alpha":
        out = convex_shear_check(phi, omega, params["alpha"], grid).outcomes[0]
        return ScanOutcome(params, out.collision, out.status, out.details)
    if check == "linear_connectivity":
        f = shear(phi, omega, params["scale"], order=SCAN_ORDER)
        return _outcome(params, harmonic_injectivity(f, grid))
    raise ValueError(f"unknown check {check!r}")


def consistency_matrix(grid: DiscGrid | None = None, lambda_count: int = 16, fraction: float = 0.9,
                       phis=DEFAULT_PHIS, omegas=DEFAULT_OMEGAS, workers: int = 1) -> ScanResult:
    """Run every applicable sufficient condition at ``fraction`` of its bound.

    Any confirmed collision would contradict a univalence theorem.
    """
    grid = grid or DiscGrid(level=2)
    rows = _matrix_rows(phis, omegas, fraction)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(lambda r: _run_row(r, grid, lambda_count), rows))
    else:
        outcomes = [_run_row(r, grid, lambda_count) for r in rows]
    return ScanResult("consistency_matrix", outcomes, None, asserted=True,
                      notes=[f"alpha sampled at {fraction:g} of each bound, exact catalog norms"])


def sensitivity_probe(grid: DiscGrid | None = None) -> dict:
    """Known non-injective maps the sampler must catch, plus a harmonic stress case."""
    grid = grid or DiscGrid(level=1)
    out = {}
    for name, p, dp in (("z^2", lambda z: z**2, lambda z: 2 * z), ("z^3", lambda z: z**3, lambda z: 3 * z**2)):
        rep = injectivity_sample(p, grid, differential=lambda z, dp=dp: (dp(z), np.zeros_like(z)))
        out[name] = rep
    f = shear(catalog_map("halfplane"), catalog_dilatation("constant", c=0.9), 1.0, order=SCAN_ORDER)
    out["halfplane_constant_0.9"] = harmonic_injectivity(f, grid)
    return out
