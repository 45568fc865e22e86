"""Command-line front end: simulate | forces | rank | maneuver.

Configuration is a JSON document with a versioned ``schema`` field; every
setting can also be overridden by a flag.  Trajectories are written as CSV
with fixed column order (t, r1, r2, theta, a_1, b_1, ..., lagrangian,
vol_drift, constraintF_resid), rank certificates as JSON, and plots as
hand-emitted SVG polylines.

Exit codes: 0 ok, 2 config error, 3 numerical fault, 4 diagnostic ceiling
breached.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from typing import Optional, Sequence

import numpy as np

from . import dynamics, fields, forces, shape, strokes, svg
from .errors import AmoebaError, ConfigError
from .shape import PhysicalConstants, ShapeCoefficients, ShapeVelocity

SCHEMA_VERSION = 1
EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_CEILING = 4

_TWO_PI = 2.0 * math.pi


@dataclasses.dataclass
class RunConfig:
    """Validated run settings shared by all subcommands."""

    n_modes: int = 6
    mu: float = 0.5
    rho_f: float = 1.0
    rho_0: Optional[float] = None
    neutral_buoyancy: bool = False
    preset: Optional[str] = None
    preset_params: dict = dataclasses.field(default_factory=dict)
    curve_table: Optional[str] = None
    constant_coeffs: Optional[list] = None
    t0: float = 0.0
    t1: float = _TWO_PI
    dt: float = 1e-3
    q0: tuple = (0.0, 0.0, 0.0)
    out: Optional[str] = None
    svg: Optional[str] = None
    seed: int = 0
    sample_stride: int = 1
    step_check: bool = True
    step_guard: float = 1e-3
    require_domain_d: bool = False
    ceilings: dict = dataclasses.field(default_factory=lambda: {
        "vol_drift": 1e-8, "constraint_f": 1e-8})
    forces: dict = dataclasses.field(default_factory=dict)
    rank: dict = dataclasses.field(default_factory=dict)
    maneuver: dict = dataclasses.field(default_factory=dict)

    def validate(self) -> None:
        if self.n_modes < 1:
            raise ConfigError("n_modes must be a positive integer")
        if not self.dt > 0:
            raise ConfigError(f"dt must be positive (got {self.dt!r})")
        if not self.t1 > self.t0:
            raise ConfigError(f"t1 must exceed t0 (got t0={self.t0}, t1={self.t1})")
        if not self.mu > 0:
            raise ConfigError(f"mu must be positive (got {self.mu!r})")
        if not self.rho_f > 0:
            raise ConfigError(f"rho_f must be positive (got {self.rho_f!r})")
        if self.neutral_buoyancy and self.rho_0 is not None:
            raise ConfigError("give exactly one of rho_0 / neutral_buoyancy, not both")
        if not self.neutral_buoyancy and self.rho_0 is None:
            raise ConfigError("give exactly one of rho_0 / neutral_buoyancy")
        if self.sample_stride < 1:
            raise ConfigError("sample_stride must be at least 1")
        if len(self.q0) != 3:
            raise ConfigError("q0 must be [r1, r2, theta]")

    def constants(self) -> PhysicalConstants:
        if self.neutral_buoyancy:
            return PhysicalConstants.neutrally_buoyant(rho_f=self.rho_f, mu=self.mu)
        return PhysicalConstants(rho_f=self.rho_f, rho_0=self.rho_0, mu=self.mu)


def _load_config(path: Optional[str]) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    schema = doc.pop("schema", SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema version {schema!r}")
    return doc


def _build_config(args: argparse.Namespace) -> RunConfig:
    doc = _load_config(args.config)
    known = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    cfg = RunConfig(**doc)
    if args.N is not None:
        cfg.n_modes = args.N
    if args.mu is not None:
        cfg.mu = args.mu
    if args.rho_f is not None:
        cfg.rho_f = args.rho_f
    if args.rho_0 is not None:
        cfg.rho_0 = args.rho_0
    if args.neutral_buoyancy:
        cfg.neutral_buoyancy = True
    if args.preset is not None:
        cfg.preset = args.preset
    if args.dt is not None:
        cfg.dt = args.dt
    if args.t_end is not None:
        cfg.t1 = args.t_end
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.out = args.out
    if args.svg is not None:
        cfg.svg = args.svg
    cfg.validate()
    return cfg


def _build_curve(cfg: RunConfig):
    given = [x for x in (cfg.preset, cfg.curve_table, cfg.constant_coeffs)
             if x is not None]
    if len(given) != 1:
        raise ConfigError("give exactly one of preset / curve_table / constant_coeffs")
    if cfg.constant_coeffs is not None:
        arr = np.asarray(cfg.constant_coeffs, dtype=float).reshape(-1)
        return ShapeCoefficients.from_reals(arr)
    if cfg.curve_table is not None:
        return _spline_curve(cfg.curve_table)
    if cfg.preset == "constant":
        coeffs = cfg.preset_params.get("coeffs")
        if coeffs is None:
            raise ConfigError("preset 'constant' needs preset_params.coeffs")
        return ShapeCoefficients.from_reals(np.asarray(coeffs, dtype=float))
    try:
        return strokes.preset(cfg.preset, mu=cfg.mu, **cfg.preset_params)
    except AmoebaError:
        raise
    except TypeError as exc:
        raise ConfigError(f"bad preset_params: {exc}") from exc


class _SplineCurve:
    """Shape curve interpolated from a (t, a_1, b_1, ...) table."""

    def __init__(self, ts: np.ndarray, table: np.ndarray):
        from scipy.interpolate import CubicSpline
        self._spline = CubicSpline(ts, table, axis=0)
        self._deriv = self._spline.derivative()

    def sample(self, t: float):
        return (ShapeCoefficients.from_reals(self._spline(t)),
                ShapeVelocity.from_reals(self._deriv(t)))

    def sample_batch(self, ts):
        return self._spline(np.asarray(ts)), self._deriv(np.asarray(ts))


def _spline_curve(path: str) -> _SplineCurve:
    try:
        raw = np.loadtxt(path, delimiter=",", skiprows=1)
    except OSError as exc:
        raise ConfigError(f"cannot read curve_table {path!r}: {exc}") from exc
    if raw.ndim != 2 or raw.shape[1] < 3 or raw.shape[1] % 2 == 0:
        raise ConfigError("curve_table needs columns t, a1, b1, ..., aN, bN")
    return _SplineCurve(raw[:, 0], raw[:, 1:])


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_trajectory_csv(path: str, samples, n_modes: int) -> None:
    header = ["t", "r1", "r2", "theta"]
    for k in range(1, n_modes + 1):
        header += [f"a{k}", f"b{k}"]
    header += ["lagrangian", "vol_drift", "constraintF_resid"]
    rows = [",".join(header)]
    for s in samples:
        vals = ([s.t, s.state.r[0], s.state.r[1], s.state.theta]
                + list(s.shape.reals)
                + [s.diagnostics.lagrangian, s.diagnostics.volume_drift,
                   s.diagnostics.constraint_f])
        rows.append(",".join(_fmt(v) for v in vals))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(rows) + "\n")


def _winding(samples) -> float:
    rs = np.array([s.state.r for s in samples])
    center = rs.mean(axis=0)
    rel = rs - center
    if np.min(np.linalg.norm(rel, axis=1)) < 1e-12:
        return 0.0
    ang = np.unwrap(np.arctan2(rel[:, 1], rel[:, 0]))
    return float(ang[-1] - ang[0])


def cmd_simulate(cfg: RunConfig) -> int:
    curve = _build_curve(cfg)
    k = cfg.constants()
    samples = dynamics.integrate(
        curve, dynamics.RigidState(r=np.array(cfg.q0[:2]), theta=cfg.q0[2]),
        (cfg.t0, cfg.t1), cfg.dt, k, check_step=cfg.step_check,
        step_guard=cfg.step_guard, require_domain_D=cfg.require_domain_d,
        sample_stride=cfg.sample_stride)
    if cfg.out:
        _write_trajectory_csv(cfg.out, samples, samples[0].shape.n_modes)
    if cfg.svg:
        svg.polyline_svg([np.array([s.state.r for s in samples])], cfg.svg,
                         labels=["center of mass"])
    net = samples[-1].state.r - samples[0].state.r
    max_vol = max(abs(s.diagnostics.volume_drift) for s in samples)
    max_con = max(abs(s.diagnostics.constraint_f) for s in samples)
    print(f"net displacement: ({net[0]:.6g}, {net[1]:.6g})")
    print(f"net rotation:     {samples[-1].state.theta - samples[0].state.theta:.6g}")
    print(f"path winding:     {_winding(samples):.6g}")
    print(f"max |vol drift|:  {max_vol:.3e}")
    print(f"max |constraintF|: {max_con:.3e}")
    if (max_vol > cfg.ceilings.get("vol_drift", math.inf)
            or max_con > cfg.ceilings.get("constraint_f", math.inf)):
        print("diagnostic ceiling breached", file=sys.stderr)
        return EXIT_CEILING
    return EXIT_OK


def _force_table(curve, cfg: RunConfig, k: PhysicalConstants):
    ts = np.arange(cfg.t0, cfg.t1 + 0.5 * cfg.dt, cfg.dt)
    h = 1e-6
    rows = []
    for t in ts:
        c, cd = curve.sample(float(t))
        _, cdm = curve.sample(float(t) - h)
        _, cdp = curve.sample(float(t) + h)
        cdd = ShapeVelocity((cdp.coeffs - cdm.coeffs) / (2.0 * h))
        rows.append(forces.force_from_shape(c, cd, cdd, k).components)
    return ts, np.array(rows)


def cmd_forces(cfg: RunConfig) -> int:
    curve = _build_curve(cfg)
    if isinstance(curve, ShapeCoefficients):
        curve = dynamics.as_provider(curve, cfg.dt)
    k = cfg.constants()
    ts, table = _force_table(curve, cfg, k)
    n_axes = table.shape[1]
    if cfg.out:
        header = ["t"] + [f"F{i}" for i in range(1, n_axes + 1)]
        rows = [",".join(header)]
        for t, row in zip(ts, table):
            rows.append(",".join(_fmt(v) for v in [t, *row]))
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write("\n".join(rows) + "\n")
    print(f"force axes: {n_axes}; samples: {ts.size}")
    print(f"max |F2|: {np.abs(table[:, 1]).max():.3e}")
    print(f"effort integral: {forces.cost_functional(ts, table):.6g}")
    if cfg.forces.get("round_trip"):
        from scipy.interpolate import CubicSpline
        spline = CubicSpline(ts, table, axis=0)
        c0, cd0 = curve.sample(cfg.t0)
        recovered = forces.shape_from_force(
            lambda t: spline(np.clip(t, ts[0], ts[-1])), c0, cd0,
            (cfg.t0, cfg.t1), cfg.dt, k)
        err = 0.0
        for t, c, _ in recovered[:: max(1, len(recovered) // 128)]:
            c_ref, _ = curve.sample(t)
            err = max(err, float(np.abs(c.coeffs - c_ref.coeffs).max()))
        print(f"round-trip recovery error: {err:.3e}")
        if err > 1e-6:
            print("round-trip recovery above 1e-6", file=sys.stderr)
            return EXIT_CEILING
    return EXIT_OK


def cmd_rank(cfg: RunConfig) -> int:
    spec = dict(cfg.rank)
    mode = spec.get("mode", "config")
    depth = int(spec.get("bracket_depth", 3))
    tol = float(spec.get("tol", 1e-8))
    draws = int(spec.get("draws", 20))
    rng = np.random.default_rng(cfg.seed)
    n = cfg.n_modes
    certificates = []

    def one_point(point, mu, rho, k):
        point = np.asarray(point, dtype=float)
        shape_part = point[3:] if mode == "config" else point
        record = {"mode": mode, "mu": mu, "rho": rho,
                  "point": [float(x) for x in point], "bracket_depth": depth,
                  "tol": tol}
        if float(np.max(np.abs(shape_part))) == 0.0:
            record["flag"] = "outside domain of claim (c = 0)"
            certificates.append(record)
            return
        base = [fields.shape_field(1, 2, 1, n), fields.shape_field(1, 2, 2, n)]
        if mode == "config":
            fam = fields.config_fields(base, k,
                                       det_scaled=bool(spec.get("det_scaled", False)))
        else:
            fam = base
        cert = fields.rank_certificate(fam, point, bracket_depth=depth, tol=tol)
        record.update({
            "rank": cert.rank,
            "sigma": [float(s) for s in cert.singular_values],
            "sigma_ratio": cert.sigma_ratio,
            "labels": list(cert.labels),
        })
        certificates.append(record)

    if "points" in spec:
        k = cfg.constants()
        for point in spec["points"]:
            one_point(point, cfg.mu, k.rho, k)
    else:
        for _ in range(draws):
            mu = float(rng.uniform(0.2, 1.2))
            rho = float(rng.uniform(0.2, 4.0))
            k = PhysicalConstants(rho_f=1.0, rho_0=rho, mu=mu)
            x = mu / math.sqrt(3.0)
            sign = 1.0 if rng.uniform() < 0.5 else -1.0
            c = np.zeros(2 * n)
            c[0] = sign * x
            c[2] = sign * x
            point = np.concatenate([[0.0, 0.0, 0.0], c]) if mode == "config" else c
            one_point(point, mu, rho, k)

    doc = {"schema": SCHEMA_VERSION, "command": "rank",
           "certificates": certificates}
    payload = json.dumps(doc, indent=2)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
    else:
        print(payload)
    ranks = [c.get("rank") for c in certificates if "rank" in c]
    if ranks:
        print(f"ranks: min {min(ranks)} max {max(ranks)} over {len(ranks)} points",
              file=sys.stderr)
    return EXIT_OK


def _moonwalk_report(cfg: RunConfig, k: PhysicalConstants) -> dict:
    spec = dict(cfg.maneuver)
    omega = float(spec.get("omega", 1e4))
    t1 = float(spec.get("t1", _TWO_PI))
    base = strokes.preset("moonwalk_base", mu=cfg.mu)
    rev = strokes.preset("moonwalk_reverse", mu=cfg.mu, omega=omega)
    q0 = dynamics.RigidState.origin()
    tb = dynamics.integrate(base, q0, (0.0, t1), min(cfg.dt, 1e-3), k,
                            check_step=False, sample_stride=16)
    dt_fast = min(cfg.dt, _TWO_PI / (40.0 * omega))
    tr = dynamics.integrate(rev, q0, (0.0, t1), dt_fast, k,
                            check_step=False, sample_stride=256)
    gap = 0.0
    for t in np.linspace(0.0, t1, 997):
        cb, _ = base.sample(float(t))
        cr, _ = rev.sample(float(t))
        gap = max(gap, shape.norm_S(ShapeCoefficients(cb.coeffs - cr.coeffs)))
    return {
        "omega": omega,
        "base_dr1": float(tb[-1].state.r[0] - tb[0].state.r[0]),
        "reverse_dr1": float(tr[-1].state.r[0] - tr[0].state.r[0]),
        "shape_gap_S": gap,
    }


def _commutator_report(cfg: RunConfig, k: PhysicalConstants) -> dict:
    spec = dict(cfg.maneuver)
    eps_list = [float(e) for e in spec.get("epsilons", (0.1, 0.05, 0.025))]
    cycles = int(spec.get("cycles", 1))
    n = cfg.n_modes
    c0_vals = spec.get("c0")
    if c0_vals is None:
        c0 = np.zeros(2 * n)
        c0[0] = 0.5
    else:
        c0 = np.asarray(c0_vals, dtype=float)
    pair = (fields.shape_field(1, 2, 1, n), fields.shape_field(1, 2, 2, n))
    q0 = dynamics.RigidState.origin()
    c0s = ShapeCoefficients.from_reals(c0)
    rows = []
    for eps in eps_list:
        traj = fields.commutator_maneuver(pair, eps, max(cycles, 1), q0, c0s, k)
        per_cycle = len(traj[1:]) // max(cycles, 1)
        end = traj[per_cycle]
        drift = float(np.linalg.norm(end.shape.reals - c0))
        rows.append({"epsilon": eps, "shape_drift_per_cycle": drift,
                     "drift_over_eps2": drift / eps ** 2})
    slope = None
    if len(rows) >= 2:
        le = np.log([r["epsilon"] for r in rows])
        ld = np.log([r["shape_drift_per_cycle"] for r in rows])
        slope = float(np.polyfit(le, ld, 1)[0])
    out = {"cycles": cycles, "table": rows, "loglog_slope": slope}
    if cycles == 0:
        out["table"] = []
        out["loglog_slope"] = None
    return out


def cmd_maneuver(cfg: RunConfig) -> int:
    kind = cfg.maneuver.get("kind", "moonwalk")
    k = cfg.constants()
    if kind == "moonwalk":
        report = _moonwalk_report(cfg, k)
    elif kind == "commutator":
        report = _commutator_report(cfg, k)
    else:
        raise ConfigError(f"unknown maneuver kind {kind!r}")
    payload = json.dumps({"schema": SCHEMA_VERSION, "command": "maneuver",
                          "kind": kind, "report": report}, indent=2)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
    print(payload)
    return EXIT_OK


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="amoeba",
                                description="2D shape-changing swimmer toolkit")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("simulate", "forces", "rank", "maneuver"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", default=None)
        sp.add_argument("--out", default=None)
        sp.add_argument("--svg", default=None)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--dt", type=float, default=None)
        sp.add_argument("--t-end", type=float, default=None)
        sp.add_argument("--preset", default=None)
        sp.add_argument("--N", type=int, default=None)
        sp.add_argument("--mu", type=float, default=None)
        sp.add_argument("--rho-f", type=float, default=None)
        sp.add_argument("--rho-0", type=float, default=None)
        sp.add_argument("--neutral-buoyancy", action="store_true")
    return p


_COMMANDS = {
    "simulate": cmd_simulate,
    "forces": cmd_forces,
    "rank": cmd_rank,
    "maneuver": cmd_maneuver,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = _build_config(args)
        return _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AmoebaError as exc:
        print(f"numerical fault: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
