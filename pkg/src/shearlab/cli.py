"""Command-line front end.

    shearlab transform --phi koebe --omega linear:c=0.5 --alpha 0.2 --svg out.svg
    shearlab bounds --omega power:n=1
    shearlab certify --phi halfplane --criterion becker
    shearlab scan --scan consistency_matrix

Every command writes one JSON report (to ``--out`` or stdout).  Exit codes:
0 success or certified, 1 not certified or collision, 2 configuration
error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import datetime as _dt
import json
import sys
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .catalog import catalog_dilatation, catalog_map
from .criteria import (
    alpha_bound_convex_f_alpha,
    alpha_bound_f_alpha,
    alpha_bound_lif,
    alpha_bound_shs,
    becker_check,
    hyperbolic_norm,
    linear_connectivity_bound,
    shcc_constants,
    sup_norm,
    theorem_c_check,
)
from .errors import ConfigurationError, InvalidC, NumericalError, ParamOutOfRange, ShearlabError
from .grid import R_MAX, DiscGrid, grid_argmax
from .harmonic import eval_harmonic, jacobian, shear, transform_F_alpha, transform_f_alpha
from .verify import (
    ScanOutcome,
    ScanResult,
    consistency_matrix,
    gamma_family_probe,
    injectivity_sample,
    mu_family_probe,
    stable_family_scan,
)

SCHEMA_VERSION = "1.0"
TRANSFORMS = ("F_alpha", "f_alpha", "shear_only")
SCAN_KINDS = ("stable_family", "mu_probe", "gamma_probe", "consistency_matrix")
CRITERIA = ("becker", "theorem_c")
# known non-injective maps used to demonstrate that the scan can fail
DEBUG_MAPS = {
    "z^2": (lambda z: z**2, lambda z: 2 * z),
    "z^3": (lambda z: z**3, lambda z: 3 * z**2),
}
N_COEFFS = 16
N_CIRCLES, N_SPOKES, POLY_SAMPLES = 20, 24, 512


def _cx(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _parse_value(text: str):
    text = text.strip()
    for cast in (int, float, complex):
        try:
            return cast(text)
        except ValueError:
            pass
    raise ParamOutOfRange(f"cannot parse parameter value {text!r}")


def parse_named(text: str) -> tuple[str, dict]:
    """``"name:key=value,key=value"`` -> ``(name, {key: value})``."""
    name, _, rest = text.partition(":")
    params = {}
    for part in filter(None, (p.strip() for p in rest.split(","))):
        key, eq, val = part.partition("=")
        if not eq:
            raise ParamOutOfRange(f"parameter {part!r} is not of the form key=value")
        params[key.strip()] = _parse_value(val)
    return name.strip(), params


def _named_from_json(obj) -> tuple[str, dict]:
    if isinstance(obj, str):
        return parse_named(obj)
    if isinstance(obj, dict) and "name" in obj:
        params = {}
        for k, v in obj.get("params", {}).items():
            params[k] = complex(v[0], v[1]) if isinstance(v, list) else v
        return obj["name"], params
    raise ConfigurationError(f"cannot read catalog entry from {obj!r}")


@dataclass
class RunConfig:
    phi: tuple = ("identity", {})
    omega: tuple = ("zero", {})
    transform: str = "F_alpha"
    alpha: float = 0.0
    scale: float = 1.0
    order: int = 128
    grid_radii: int = 32
    grid_angles: int = 128
    grid_level: Optional[int] = None
    rmax: float = R_MAX
    seed: int = 0
    out: Optional[str] = None
    svg: Optional[str] = None
    criterion: str = "becker"
    c: Optional[complex] = None
    scan: str = "consistency_matrix"
    lambda_count: int = 16
    alphas: Optional[list] = None
    gammas: Optional[list] = None
    beta: Optional[float] = None
    m: float = 1.0
    debug_map: Optional[str] = None

    def validate(self) -> "RunConfig":
        if self.transform not in TRANSFORMS:
            raise ConfigurationError(f"transform must be one of {TRANSFORMS}, got {self.transform!r}")
        if not 8 <= self.order <= 1024:
            raise ParamOutOfRange(f"order must lie in [8, 1024], got {self.order}")
        if self.transform != "shear_only" and abs(self.alpha) > 1:
            raise ParamOutOfRange(f"|alpha| must not exceed 1, got {self.alpha}")
        if self.criterion not in CRITERIA:
            raise ConfigurationError(f"criterion must be one of {CRITERIA}")
        if self.scan not in SCAN_KINDS:
            raise ConfigurationError(f"scan must be one of {SCAN_KINDS}")
        if self.debug_map is not None and self.debug_map not in DEBUG_MAPS:
            raise ConfigurationError(f"debug map must be one of {sorted(DEBUG_MAPS)}")
        self.grid(0)
        self.phi_spec()
        self.omega_spec()
        return self

    def grid(self, default_level: int = 0) -> DiscGrid:
        level = default_level if self.grid_level is None else self.grid_level
        try:
            return DiscGrid(level, self.grid_radii, self.grid_angles, self.rmax)
        except ValueError as exc:
            raise ConfigurationError(str(exc)) from None

    def phi_spec(self):
        return catalog_map(self.phi[0], **self.phi[1])

    def omega_spec(self):
        return catalog_dilatation(self.omega[0], **self.omega[1])

    def to_dict(self) -> dict:
        def enc(v):
            if isinstance(v, complex):
                return _cx(v)
            if isinstance(v, (list, tuple)):
                return [enc(x) for x in v]
            if isinstance(v, dict):
                return {k: enc(x) for k, x in v.items()}
            return v

        d = {f.name: getattr(self, f.name) for f in dataclasses.fields(self)}
        d["phi"] = {"name": self.phi[0], "params": enc(self.phi[1])}
        d["omega"] = {"name": self.omega[0], "params": enc(self.omega[1])}
        for key in ("out", "svg"):
            d.pop(key)
        return {k: enc(v) for k, v in d.items()}


def _parse_c(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
        return complex(text)
    except ValueError:
        raise ConfigurationError(f"--c expects RE,IM, got {text!r}") from None


def build_config(args: argparse.Namespace) -> RunConfig:
    """Merge the optional JSON config file with command-line flags (flags win)."""
    cfg = RunConfig()
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read config {args.config}: {exc}") from None
        for key, value in data.items():
            if key in ("phi", "omega"):
                value = _named_from_json(value)
            elif key == "c" and value is not None:
                value = complex(value[0], value[1]) if isinstance(value, list) else complex(value)
            elif key == "gammas" and value is not None:
                value = [complex(v[0], v[1]) if isinstance(v, list) else v for v in value]
            if not hasattr(cfg, key):
                raise ConfigurationError(f"unknown config key {key!r}")
            setattr(cfg, key, value)
    for f in dataclasses.fields(cfg):
        value = getattr(args, f.name, None)
        if value is None:
            continue
        if f.name in ("phi", "omega"):
            value = parse_named(value)
        elif f.name == "c":
            value = _parse_c(value)
        setattr(cfg, f.name, value)
    return cfg.validate()


# -- building blocks ---------------------------------------------------------


def build_map(cfg: RunConfig, order: Optional[int] = None):
    phi, omega = cfg.phi_spec(), cfg.omega_spec()
    n = cfg.order if order is None else order
    if cfg.transform == "F_alpha":
        return transform_F_alpha(phi, omega, cfg.alpha, order=n)
    if cfg.transform == "f_alpha":
        return transform_f_alpha(phi, omega, cfg.alpha, order=n)
    return shear(phi, omega, cfg.scale, order=n)


def _norms_block(omega, grid):
    out = {}
    for key, exact, est in (
        ("sup_norm", omega.exact_sup_norm, sup_norm),
        ("hyperbolic_norm", omega.exact_hyp_norm, hyperbolic_norm),
    ):
        if exact is not None:
            out[key] = {"value": exact, "exact": True}
        else:
            e = est(omega, grid)
            out[key] = {"value": e.value, "exact": False, "converged": e.converged, "witness": _cx(e.witness)}
    return out


def render_svg(f, path: str, r_max: float = R_MAX) -> int:
    """Image of 20 circles and 24 spokes; returns the number of polylines."""
    t = np.linspace(0.0, 1.0, POLY_SAMPLES)
    curves = []
    for j in range(1, N_CIRCLES + 1):
        r = min(j / N_CIRCLES, r_max)
        curves.append(("circle", r * np.exp(2j * np.pi * t)))
    for k in range(N_SPOKES):
        curves.append(("spoke", r_max * t * np.exp(2j * np.pi * k / N_SPOKES)))
    images = [(kind, np.asarray(eval_harmonic(f, z))) for kind, z in curves]
    allpts = np.concatenate([w for _, w in images])
    allpts = allpts[np.isfinite(allpts)]
    x0, x1 = float(allpts.real.min()), float(allpts.real.max())
    y0, y1 = float(allpts.imag.min()), float(allpts.imag.max())
    pad = 0.02 * max(x1 - x0, y1 - y0, 1e-12)
    width = (x1 - x0) + 2 * pad
    height = (y1 - y0) + 2 * pad
    svg = ET.Element("svg", xmlns="http://www.w3.org/2000/svg", width="800", height="800",
                     viewBox=f"{x0 - pad:.6g} {-(y1 + pad):.6g} {width:.6g} {height:.6g}")
    stroke = f"{0.002 * max(width, height):.4g}"
    for kind, w in images:
        w = w[np.isfinite(w)]
        pts = " ".join(f"{p.real:.6g},{-p.imag:.6g}" for p in w)
        colour = "#1f4e79" if kind == "circle" else "#a23b2a"
        ET.SubElement(svg, "polyline", points=pts, fill="none", stroke=colour,
                      **{"stroke-width": stroke, "class": kind})
    ET.ElementTree(svg).write(path, encoding="utf-8", xml_declaration=True)
    return len(images)


# -- commands ----------------------------------------------------------------


def cmd_transform(cfg: RunConfig) -> tuple[dict, int]:
    f = build_map(cfg)
    grid = cfg.grid()
    value, witness, _ = grid_argmax(lambda z: -jacobian(f, z), grid)
    result = {
        "provenance": f.provenance,
        "h_coeffs": [_cx(c) for c in f.h.coeffs[:N_COEFFS]],
        "g_coeffs": [_cx(c) for c in f.g.coeffs[:N_COEFFS]],
        "norms": _norms_block(cfg.omega_spec(), grid),
        "jacobian_min": {"value": -value, "witness": _cx(witness), "grid": grid.to_dict()},
    }
    if cfg.svg:
        result["svg"] = {"path": cfg.svg, "polylines": render_svg(f, cfg.svg, grid.r_max)}
    return result, 0


def cmd_bounds(cfg: RunConfig) -> tuple[dict, int]:
    omega = cfg.omega_spec()
    phi = cfg.phi_spec()
    grid = cfg.grid()
    nb = _norms_block(omega, grid)
    sup, hyp = nb["sup_norm"]["value"], nb["hyperbolic_norm"]["value"]
    betas = {1.0, 2.0}
    for b in (cfg.beta, phi.lif_order):
        if b is not None:
            betas.add(float(b))
    th = [{"id": "SHS", "formula": "1/(2(2+k)), k=||w*||(1+||w||)", "value": alpha_bound_shs(sup, hyp)}]
    for b in sorted(betas):
        th.append({"id": "f_alpha", "beta": b, "formula": "1/(2b+(3+||w||)||w*||)",
                   "value": alpha_bound_f_alpha(b, sup, hyp)})
        th.append({"id": "LIF", "beta": b, "formula": "1/(1+2b+k^2) if k<=1 else 1/(2b+2k)",
                   "value": alpha_bound_lif(b, sup, hyp)})
    th.append({"id": "convex_f_alpha", "formula": "alpha*||w|| < 1/3, 0 <= alpha <= 1",
               "value": alpha_bound_convex_f_alpha(sup)})
    th.append({"id": "linear_connectivity", "m": cfg.m, "formula": "1/(2m+1)",
               "value": linear_connectivity_bound(cfg.m)})
    lo, hi = shcc_constants()
    th.append({"id": "SHCC", "formula": "(-x0, sqrt(2)/2), x0*pi + 2*arcsin(x0) = pi/2", "interval": [-lo, hi]})
    return {"norms": nb, "phi": phi.label, "thresholds": th}, 0


def cmd_certify(cfg: RunConfig) -> tuple[dict, int]:
    f = build_map(cfg)
    grid = cfg.grid()
    if cfg.criterion == "theorem_c":
        if cfg.c is None:
            raise InvalidC("theorem_c requires --c RE,IM")
        rep = theorem_c_check(f, cfg.c, grid)
    else:
        rep = becker_check(f, grid)
    return {"provenance": f.provenance, "report": rep.to_dict()}, 0 if rep.certified else 1


def _debug_scan(cfg: RunConfig) -> ScanResult:
    p, dp = DEBUG_MAPS[cfg.debug_map]
    rep = injectivity_sample(p, cfg.grid(), differential=lambda z: (dp(z), np.zeros_like(z)))
    status = "no_collision_found" if rep is None else "collision"
    return ScanResult("debug_map", [ScanOutcome({"map": cfg.debug_map}, rep, status)], None)


def cmd_scan(cfg: RunConfig) -> tuple[dict, int]:
    if cfg.debug_map is not None:
        res = _debug_scan(cfg)
    elif cfg.scan == "consistency_matrix":
        res = consistency_matrix(cfg.grid(2), cfg.lambda_count)
    elif cfg.scan == "stable_family":
        res = stable_family_scan(build_map(cfg, order=32), cfg.lambda_count, cfg.grid())
    elif cfg.scan == "mu_probe":
        if cfg.phi[0] != "mu":
            raise ConfigurationError("mu_probe needs --phi mu:mu=VALUE")
        res = mu_family_probe(cfg.phi[1]["mu"], cfg.alphas or [cfg.alpha], cfg.grid())
    else:
        gammas = cfg.gammas or [-1.0, -2.0, -0.5 + 0.5j, -1.5 + 0.5j]
        res = gamma_family_probe(cfg.alpha, gammas, cfg.grid())
    code = 1 if res.has_collision and res.asserted else 0
    return {"scan": res.to_dict()}, code


def cmd_render(cfg: RunConfig) -> tuple[dict, int]:
    if not cfg.svg:
        raise ConfigurationError("render requires --svg PATH")
    f = build_map(cfg)
    n = render_svg(f, cfg.svg, cfg.rmax)
    return {"provenance": f.provenance, "svg": {"path": cfg.svg, "polylines": n}}, 0


COMMANDS = {
    "transform": cmd_transform,
    "bounds": cmd_bounds,
    "certify": cmd_certify,
    "scan": cmd_scan,
    "render": cmd_render,
}


def _jsonable(obj):
    if isinstance(obj, (complex, np.complexfloating)):
        return _cx(obj)
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_jsonable(x) for x in obj.tolist()]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def make_report(command: str, cfg: Optional[RunConfig], result=None, error=None, exit_code=0) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "command": command,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "config": None if cfg is None else cfg.to_dict(),
        "exit_code": exit_code,
        "result": result,
        "error": error,
    }


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, default=_jsonable) + "\n"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file; flags override its entries")
    common.add_argument("--phi", help="analytic map NAME[:param=value,...]")
    common.add_argument("--omega", help="dilatation NAME[:param=value,...]")
    common.add_argument("--transform", choices=TRANSFORMS)
    common.add_argument("--alpha", type=float)
    common.add_argument("--scale", type=float, help="dilatation scale for shear_only")
    common.add_argument("--order", type=int)
    common.add_argument("--grid-radii", type=int)
    common.add_argument("--grid-angles", type=int)
    common.add_argument("--grid-level", type=int)
    common.add_argument("--rmax", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="report path (default stdout)")
    common.add_argument("--svg", help="write an SVG rendering of the image")
    common.add_argument("--criterion", choices=CRITERIA)
    common.add_argument("--c", help="criterion constant c as RE,IM (negative: --c=-1,0)")
    common.add_argument("--scan", choices=SCAN_KINDS)
    common.add_argument("--lambda-count", type=int)
    common.add_argument("--beta", type=float, help="extra linear-invariance order for bounds")
    common.add_argument("--m", type=float, help="linear-connectivity constant")
    common.add_argument("--debug-map", choices=sorted(DEBUG_MAPS), help="scan a known non-injective map")

    parser = argparse.ArgumentParser(prog="shearlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = None
    try:
        cfg = build_config(args)
        result, code = COMMANDS[args.command](cfg)
        report = make_report(args.command, cfg, result, exit_code=code)
    except ConfigurationError as exc:
        code = 2
        report = make_report(args.command, cfg, error=f"{type(exc).__name__}: {exc}", exit_code=code)
    except (NumericalError, ShearlabError, FloatingPointError) as exc:
        code = 3
        report = make_report(args.command, cfg, error=f"{type(exc).__name__}: {exc}", exit_code=code)
    text = dumps(report)
    if report["error"]:
        print(f"shearlab {args.command}: {report['error']}", file=sys.stderr)
    out = getattr(args, "out", None) or (cfg.out if cfg else None)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
