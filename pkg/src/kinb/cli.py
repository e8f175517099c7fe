"""Command-line front end.

Subcommands: simulate, diagnose, constants, verify, induction.
Exit codes: 0 success, 1 configuration or parse error, 2 numerical
failure, 3 property-suite counterexample.

Configuration files are INI text with a fixed schema; unknown sections or
keys are rejected so typos fail loudly instead of silently using defaults.
The KINB_THREADS environment variable caps the BLAS thread pool.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import math
import os
import sys
from dataclasses import replace

import numpy as np

from .collision import AngularQuadrature, CrossSection
from .diagnostics import (GevreyWeight, build_induction_schedule,
                          cb_constant, check_hypotheses, commutation_error,
                          fit_gevrey_order, weighted_norms, _default_lambda0)
from .evolution import Trajectory, run
from .inequalities import (alpha_md, epsilon, optimize_lambdas,
                           required_moment)
from .spectral import (ConfigError, GridSpec, InitialDatum, NumericalFailure,
                       SpectralState, init_state)
from .verify import SUITE_NAMES, run_suite

__all__ = ["main", "load_config", "write_manifest", "read_snapshot",
           "write_snapshot"]


# ----------------------------------------------------------------------------
# configuration schema
# ----------------------------------------------------------------------------

_SCHEMA = {
    "grid": {"dimension": int, "mode": str, "n": int, "eta_max": float},
    "kernel": {"nu": float, "kappa": float},
    "quad": {"theta_min": float, "panels": int, "nodes_per_panel": int,
             "azimuthal_nodes": int},
    "time": {"dt": float, "t_end": float, "snapshots": int},
    "init": {"kind": str, "params": str},
    "weight": {"alpha": float, "beta": float, "lambda": float},
    "induction": {"part": str, "lambda0": float, "n_max": int, "m": int,
                  "M": float, "B": float, "T0": float, "theta0": float,
                  "vartheta0": float},
}

# keys that must be present whenever their section appears
_REQUIRED = {
    "grid": ("dimension", "mode", "n", "eta_max"),
    "kernel": ("nu",),
    "quad": ("theta_min",),
    "time": ("dt", "t_end"),
    "init": ("kind",),
    "weight": (),
    "induction": ("part",),
}

_DEFAULTS = {
    "kernel": {"kappa": 1.0},
    "quad": {"panels": 8, "nodes_per_panel": 5, "azimuthal_nodes": 8},
    "time": {"snapshots": 0},
    "init": {"params": ""},
}


def load_config(path: str) -> dict:
    """Parse and validate an INI config into {section: {key: typed value}}.

    Unknown sections or keys, type errors, and missing required keys all
    raise ConfigError. Sections listed in _DEFAULTS get their optional
    keys filled, so the result is fully resolved.
    """
    cp = configparser.ConfigParser(interpolation=None)
    read = cp.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path!r}")
    cfg: dict = {}
    for sec in cp.sections():
        if sec not in _SCHEMA:
            raise ConfigError(f"unknown config section [{sec}]")
        out = {}
        for key, raw in cp.items(sec):
            if key not in _SCHEMA[sec]:
                raise ConfigError(f"unknown key {key!r} in [{sec}]")
            typ = _SCHEMA[sec][key]
            try:
                out[key] = raw if typ is str else typ(raw)
            except ValueError:
                raise ConfigError(
                    f"key {key!r} in [{sec}]: cannot parse {raw!r} as "
                    f"{typ.__name__}") from None
        for key in _REQUIRED[sec]:
            if key not in out:
                raise ConfigError(f"missing key {key!r} in [{sec}]")
        for key, val in _DEFAULTS.get(sec, {}).items():
            out.setdefault(key, val)
        cfg[sec] = out
    return cfg


def _require_sections(cfg: dict, names) -> None:
    for name in names:
        if name not in cfg:
            missing = ", ".join(repr(k) for k in _REQUIRED[name]) or "keys"
            raise ConfigError(f"missing section [{name}] (needs {missing})")


def write_manifest(cfg: dict, path: str) -> None:
    cp = configparser.ConfigParser(interpolation=None)
    for sec, kv in cfg.items():
        cp[sec] = {k: (v if isinstance(v, str) else repr(v))
                   for k, v in kv.items()}
    with open(path, "w") as fh:
        cp.write(fh)


# ----------------------------------------------------------------------------
# object construction from config
# ----------------------------------------------------------------------------

def _parse_params(raw: str) -> dict:
    """Parse the [init] params string: space-separated key=value tokens.

    Values are floats, comma-separated float tuples, or for `components`
    a semicolon list of weight:center:sigma with a comma-separated center.
    """
    out: dict = {}
    for tok in raw.split():
        if "=" not in tok:
            raise ConfigError(f"init params token {tok!r} is not key=value")
        key, val = tok.split("=", 1)
        if key == "components":
            comps = []
            for item in val.split(";"):
                parts = item.split(":")
                if len(parts) != 3:
                    raise ConfigError(
                        f"component {item!r} is not weight:center:sigma")
                w, c, s = parts
                comps.append((float(w), tuple(float(x) for x in c.split(",")),
                              float(s)))
            out[key] = tuple(comps)
        elif "," in val:
            out[key] = tuple(float(x) for x in val.split(","))
        else:
            out[key] = float(val)
    return out


def _build_datum(dimension: int, kind: str, params: str) -> InitialDatum:
    p = _parse_params(params)
    kw: dict = {"kind": kind, "dimension": dimension}
    if kind == "gaussian":
        kw["sigma"] = p.get("sigma", 1.0)
        kw["mass"] = p.get("mass", 1.0)
        if "center" in p:
            c = p["center"]
            kw["center"] = c if isinstance(c, tuple) else (c,)
    elif kind == "gaussian-mixture":
        if "components" not in p:
            raise ConfigError("gaussian-mixture needs params components=...")
        comps = []
        for w, c, s in p["components"]:
            comps.append((w, c, s))
        kw["components"] = tuple(comps)
    elif kind == "laplace":
        kw["a"] = p.get("a", 1.0)
        kw["mass"] = p.get("mass", 1.0)
    else:
        raise ConfigError(f"unknown init kind {kind!r}")
    known = {"sigma", "mass", "center", "components", "a"}
    for key in p:
        if key not in known:
            raise ConfigError(f"unknown init param {key!r}")
    return InitialDatum(**kw)


def _build_grid(cfg: dict) -> GridSpec:
    g = cfg["grid"]
    return GridSpec(dimension=g["dimension"], mode=g["mode"], n=g["n"],
                    eta_max=g["eta_max"])


def _build_quad(cfg: dict) -> AngularQuadrature:
    q = cfg["quad"]
    return AngularQuadrature(theta_min=q["theta_min"], panels=q["panels"],
                             nodes_per_panel=q["nodes_per_panel"],
                             azimuthal_nodes=q["azimuthal_nodes"])


def _snapshot_times(cfg: dict) -> tuple:
    t_end = cfg["time"]["t_end"]
    k = cfg["time"]["snapshots"]
    if k <= 0:
        return ()
    if k == 1:
        return (t_end,)
    return tuple(i * t_end / (k - 1) for i in range(k))


# ----------------------------------------------------------------------------
# snapshot and CSV files
# ----------------------------------------------------------------------------

def write_snapshot(state: SpectralState, path: str) -> None:
    g = state.grid
    with open(path, "w", newline="") as fh:
        fh.write("# spectral snapshot\n")
        fh.write(f"# dimension={g.dimension}\n")
        fh.write(f"# mode={g.mode}\n")
        fh.write(f"# n={g.n}\n")
        fh.write(f"# eta_max={g.eta_max!r}\n")
        fh.write(f"# t={state.t!r}\n")
        fh.write("re,im\n")
        wr = csv.writer(fh)
        for z in state.values.reshape(-1):
            wr.writerow([repr(float(z.real)), repr(float(z.imag))])


def read_snapshot(path: str) -> SpectralState:
    meta: dict = {}
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if "=" in body:
                    k, v = body.split("=", 1)
                    meta[k.strip()] = v.strip()
                continue
            if line.startswith("re,"):
                continue
            a, b = line.split(",")
            rows.append(complex(float(a), float(b)))
    try:
        grid = GridSpec(dimension=int(meta["dimension"]), mode=meta["mode"],
                        n=int(meta["n"]), eta_max=float(meta["eta_max"]))
        t = float(meta["t"])
    except KeyError as exc:
        raise ConfigError(f"snapshot {path!r} is missing header {exc}") from None
    vals = np.array(rows, dtype=complex)
    if vals.size != int(np.prod(grid.shape)):
        raise ConfigError(f"snapshot {path!r} has {vals.size} values, "
                          f"grid wants {int(np.prod(grid.shape))}")
    return SpectralState(grid=grid, t=t, values=vals.reshape(grid.shape))


def _fmt(x) -> str:
    if x is None:
        return ""
    if not math.isfinite(x):
        raise NumericalFailure("refusing to write a non-finite value to CSV")
    return repr(float(x))


def _write_run_csv(traj: Trajectory, path: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("t,mass,energy,entropy,sup_ratio,tail\n")
        wr = csv.writer(fh)
        for r in traj.rows:
            wr.writerow([_fmt(r.t), _fmt(r.mass), _fmt(r.energy),
                         _fmt(r.entropy), _fmt(r.sup_ratio), _fmt(r.tail)])


def _write_induction_csv(rows, schedule, path: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("t,scale,hyp1,hyp2,hyp3,empirical_M,weighted_l2,cap_ok\n")
        wr = csv.writer(fh)
        for r in rows:
            wr.writerow([_fmt(r.t), _fmt(r.scale), _fmt(r.hyp1),
                         _fmt(r.hyp2), _fmt(r.hyp3), _fmt(schedule.M),
                         _fmt(r.weighted_l2), "1" if r.passed else "0"])


# ----------------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------------

def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    _require_sections(cfg, ("grid", "kernel", "quad", "time", "init"))
    grid = _build_grid(cfg)
    cs = CrossSection(nu=cfg["kernel"]["nu"], kappa=cfg["kernel"]["kappa"])
    quad = _build_quad(cfg)
    datum = _build_datum(grid.dimension, cfg["init"]["kind"],
                         cfg["init"]["params"])
    state = init_state(grid, datum)
    times = _snapshot_times(cfg)
    traj = run(state, cs, quad, dt=cfg["time"]["dt"],
               t_end=cfg["time"]["t_end"], snapshot_times=times)
    os.makedirs(args.out, exist_ok=True)
    _write_run_csv(traj, os.path.join(args.out, "run.csv"))
    for i, (t, snap) in enumerate(traj.snapshots):
        write_snapshot(snap, os.path.join(args.out,
                                          f"snapshot_{i:04d}_t{t:.6f}.csv"))
    write_manifest(cfg, os.path.join(args.out, "manifest.ini"))
    last = traj.rows[-1]
    print(f"simulate: {len(traj.rows)} monitor rows, "
          f"{len(traj.snapshots)} snapshots -> {args.out}")
    print(f"final t={last.t:g} mass={last.mass:.12g} energy={last.energy:.12g}")
    return 0


def cmd_diagnose(args) -> int:
    try:
        reports = []
        for path in args.snapshots:
            state = read_snapshot(path)
            window = tuple(args.fit_window) if args.fit_window else None
            rep = fit_gevrey_order(state, fit_window=window)
            reports.append((path, state, rep))
            print(f"{path}: t={state.t!r}")
            print(f"  alpha_hat  = {rep.alpha_hat!r}")
            print(f"  beta_t_hat = {rep.beta_t_hat!r}")
            if state.t > 0:
                print(f"  beta_hat   = {rep.beta_hat(state.t)!r}")
            print(f"  residual   = {rep.residual!r}")
            print(f"  window     = {rep.window!r}  n_points = {rep.n_points}")
            if args.alpha is not None and args.beta is not None:
                lam = args.lam if args.lam is not None else math.inf
                w = GevreyWeight(alpha=args.alpha, beta=args.beta,
                                 t=state.t, lam=lam)
                norms = weighted_norms(state, w)
                print(f"  weighted l2={norms.l2!r} sup={norms.sup!r} "
                      f"h_alpha={norms.h_alpha!r}")
                clam = lam if math.isfinite(lam) else \
                    state.grid.eta_max / math.sqrt(2.0)
                cw = w if math.isfinite(lam) else replace(w, lam=clam)
                cs = CrossSection(nu=args.nu, kappa=1.0)
                quad = AngularQuadrature(theta_min=0.05, panels=6,
                                         nodes_per_panel=4)
                com = commutation_error(state, cw, cs, quad)
                print(f"  commutator lhs={com.lhs!r} rhs_bound={com.rhs_bound!r}")
                print(f"             i_term={com.i_term!r} "
                      f"i_plus_term={com.i_plus_term!r}")
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "fit.csv"), "w", newline="") as fh:
            fh.write("snapshot,t,alpha_hat,beta_t_hat,residual,"
                     "window_lo,window_hi,n_points\n")
            wr = csv.writer(fh)
            for path, state, rep in reports:
                wr.writerow([path, _fmt(state.t), _fmt(rep.alpha_hat),
                             _fmt(rep.beta_t_hat), _fmt(rep.residual),
                             _fmt(rep.window[0]), _fmt(rep.window[1]),
                             rep.n_points])
        return 0
    except (NumericalFailure, OSError, ValueError) as exc:
        print(f"kinb diagnose: error: {exc}", file=sys.stderr)
        return 1


def cmd_constants(args) -> int:
    m = args.m
    dims = (args.d,) if args.d else (1, 2, 3)
    rows = []
    print("smoothing exponents")
    for d in dims:
        a = alpha_md(m, d)
        print(f"  alpha(m={m}, n={d}) = {a:.6f}")
    lp = optimize_lambdas(m)
    pts = ";".join(f"{x:.6f}" for x in lp.points)
    print(f"derivative interpolation constant (m={m})")
    print(f"  C_{m} = {lp.constant:.6f}  at lambda = {pts}")
    if args.nu is not None:
        mm = required_moment(args.nu, bounded=args.bounded)
        label = "bounded" if args.bounded else "unbounded"
        print(f"required moment order (nu={args.nu:g}, {label}): m = {mm}")
        cs = CrossSection(nu=args.nu, kappa=1.0)
        print("kernel constants")
        for d in dims:
            parts = [f"scaled={cb_constant(cs, d, 'scaled'):.6f}"]
            if d >= 2:
                parts.append(f"plain={cb_constant(cs, d, 'plain'):.6f}")
            print(f"  c_b(d={d}): " + "  ".join(parts))
    print("default base scales")
    for d in dims:
        cells = [f"part I: {_default_lambda0(1, d):.4f}"]
        if d >= 2:
            cells.append(f"part II: {_default_lambda0(2, d):.4f}")
            cells.append(f"part III: {_default_lambda0(3, d):.4f}")
        print(f"  d={d}  " + "  ".join(cells))
    for d in dims:
        rows.append((m, d, alpha_md(m, d), lp.constant, pts))
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            fh.write("m,n,alpha_md,C_m,lambda_points\n")
            wr = csv.writer(fh)
            for row in rows:
                wr.writerow([row[0], row[1], _fmt(row[2]), _fmt(row[3]),
                             row[4]])
    return 0


def cmd_verify(args) -> int:
    res = run_suite(args.suite, seed=args.seed, n=args.n)
    print(res.message)
    if res.ok:
        return 0
    print(f"counterexample: {res.counterexample}")
    return 3


def _angle_condition(name: str, angle: float, alpha: float, m: int,
                     half: bool) -> None:
    target = 2.0 * m / (2.0 * m + 2.0)
    u = 1.0 / math.tan(angle / 2.0 if half else angle) ** 2
    if not 0.0 < angle < math.pi / 4.0 or epsilon(alpha, u) > target + 1e-12:
        raise ConfigError(
            f"{name}={angle:g} violates the grazing-cone condition "
            f"eps <= 2m/(2m+2) = {target:g}; shrink the angle")


def cmd_induction(args) -> int:
    cfg_path = args.config or os.path.join(args.rundir, "manifest.ini")
    cfg = load_config(cfg_path)
    _require_sections(cfg, ("kernel", "induction"))
    ind = cfg["induction"]
    cs = CrossSection(nu=cfg["kernel"]["nu"], kappa=cfg["kernel"]["kappa"])

    paths = sorted(p for p in os.listdir(args.rundir)
                   if p.startswith("snapshot_") and p.endswith(".csv"))
    if not paths:
        raise ConfigError(f"run dir {args.rundir!r} contains no snapshots")
    states = [read_snapshot(os.path.join(args.rundir, p)) for p in paths]
    states.sort(key=lambda s: s.t)
    grid = states[0].grid

    part = ind["part"]
    m = ind.get("m", 2)
    T0 = ind.get("T0", states[-1].t)
    n_sec = {"I": grid.dimension, "1": grid.dimension, "II": 2, "2": 2,
             "III": 1, "3": 1}.get(part)
    if n_sec is None:
        raise ConfigError(f"unknown induction part {part!r}")
    alpha = cfg.get("weight", {}).get(
        "alpha", min(alpha_md(m, n_sec), cs.nu))

    schedule = build_induction_schedule(
        states, part=part, m=m, alpha=alpha, T0=T0, cs=cs,
        lambda0=ind.get("lambda0"), n_max=ind.get("n_max", 16))
    if ind.get("theta0") is not None:
        _angle_condition("theta0", ind["theta0"], alpha, m, half=True)
        schedule = replace(schedule, theta0=ind["theta0"])
    if ind.get("vartheta0") is not None:
        _angle_condition("vartheta0", ind["vartheta0"], alpha, m, half=False)
        schedule = replace(schedule, vartheta0=ind["vartheta0"])
    over = {}
    if "M" in ind:
        over["M"] = ind["M"]
    if "B" in ind:
        over["B"] = ind["B"]
    if "beta" in cfg.get("weight", {}):
        over["beta"] = cfg["weight"]["beta"]
    if over:
        schedule = replace(schedule, **over)

    omega = cfg.get("quad", {}).get("azimuthal_nodes", 8)
    traj = Trajectory(grid=grid, dt=cfg.get("time", {}).get("dt", 0.0),
                      rows=[], snapshots=[(s.t, s) for s in states],
                      final=states[-1], w_total=0.0, dt_limit=math.inf)
    rows = check_hypotheses(traj, schedule, n_random=args.n_random,
                            omega_nodes=omega, seed=args.seed)
    _write_induction_csv(rows, schedule,
                         os.path.join(args.rundir, "induction.csv"))
    by_scale: dict = {}
    for r in rows:
        by_scale.setdefault(r.scale, []).append(r.passed)
    print(f"induction part {schedule.part}: beta={schedule.beta!r} "
          f"M={schedule.M!r} B={schedule.B!r}")
    best = None
    for scale in sorted(by_scale):
        ok = all(by_scale[scale])
        print(f"  scale {scale:.6f}: {'pass' if ok else 'FAIL'} "
              f"({len(by_scale[scale])} snapshots)")
        if ok:
            best = scale
    if best is None:
        print("no scale passes the hypothesis chain")
    else:
        print(f"largest passing scale: {best:.6f}")
    return 0


# ----------------------------------------------------------------------------
# entry point
# ----------------------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="kinb",
        description="Spectral simulator and certificate checker for "
                    "non-cutoff kinetic equations")
    sub = p.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("simulate", help="run a configured simulation")
    ps.add_argument("config")
    ps.add_argument("--out", default="out")
    ps.set_defaults(fn=cmd_simulate)

    pd = sub.add_parser("diagnose", help="fit decay rates on snapshots")
    pd.add_argument("snapshots", nargs="+")
    pd.add_argument("--fit-window", nargs=2, type=float, metavar=("LO", "HI"))
    pd.add_argument("--alpha", type=float)
    pd.add_argument("--beta", type=float)
    pd.add_argument("--lambda", dest="lam", type=float)
    pd.add_argument("--nu", type=float, default=0.5)
    pd.add_argument("--out", default=".")
    pd.set_defaults(fn=cmd_diagnose)

    pc = sub.add_parser("constants", help="print the closed-form constants")
    pc.add_argument("--m", type=int, default=2)
    pc.add_argument("--d", type=int, choices=(1, 2, 3))
    pc.add_argument("--nu", type=float)
    pc.add_argument("--bounded", action="store_true")
    pc.add_argument("--csv")
    pc.set_defaults(fn=cmd_constants)

    pv = sub.add_parser("verify", help="run a randomized property suite")
    pv.add_argument("suite", choices=SUITE_NAMES)
    pv.add_argument("--seed", type=int, default=0)
    pv.add_argument("--n", type=int)
    pv.set_defaults(fn=cmd_verify)

    pi = sub.add_parser("induction",
                        help="check the hypothesis chain over a stored run")
    pi.add_argument("rundir")
    pi.add_argument("--config")
    pi.add_argument("--seed", type=int, default=0)
    pi.add_argument("--n-random", type=int, default=64)
    pi.set_defaults(fn=cmd_induction)
    return p


_THREAD_LIMITER = None


def _apply_thread_cap() -> None:
    global _THREAD_LIMITER
    raw = os.environ.get("KINB_THREADS")
    if not raw:
        return
    try:
        k = max(1, int(raw))
    except ValueError:
        raise ConfigError("KINB_THREADS must be an integer") from None
    try:
        from threadpoolctl import threadpool_limits
    except ImportError:
        return
    _THREAD_LIMITER = threadpool_limits(limits=k)


def main(argv=None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        _apply_thread_cap()
        return args.fn(args)
    except ConfigError as exc:
        print(f"kinb: config error: {exc}", file=sys.stderr)
        return 1
    except NumericalFailure as exc:
        print(f"kinb: numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
