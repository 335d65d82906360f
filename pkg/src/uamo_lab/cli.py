"""Command-line interface: uamo-lab <command> [options]."""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import analytics, dynamics, optics, spectral
from .checks import run_validation
from .export import dumps, write_json, write_table
from .model import GOLDEN, Lattice, ModelError, ModelParams, build_floquet, localized_state

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


DEFAULTS = {
    "evolve": dict(lambda1=0.67, lambda2=0.2, theta=0.0, eta=0.0, phi="golden", steps=6, n=None,
                   lossy=False, poisson_counts=0),
    "spectrum": dict(lambda1=0.25, lambda2=0.5, theta=0.0, etas=[0.0, 0.119, 0.328, 0.4], n=89,
                     vectors=False, no_loss_tol=1e-4),
    "winding": dict(lambda1=0.25, lambda2=0.5, theta=0.0, etas=[0.0, 0.05, 0.2, 0.4], n=89,
                    z_count=32, M=256, M_cap=8192, locate_transitions=False),
    "phase-diagram": dict(grid=32, eta=0.0, steps=6, theta=0.0, phi="golden", observable="auto"),
    "critical": dict(lambda1=0.25, lambda2=0.5),
    "validate": dict(fault=None),
}

FIGURES = {
    "fig1a": [("spectrum", dict(etas=[0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4]))],
    "fig2g": [("evolve", dict(lambda1=0.67, lambda2=0.2)), ("evolve", dict(lambda1=0.2, lambda2=0.67))],
    "fig2h": [("phase-diagram", dict(grid=32, eta=0.0))],
    "fig3": [("evolve", dict(lambda1=0.5, lambda2=0.25, eta=0.05)),
             ("evolve", dict(lambda1=0.25, lambda2=0.5, eta=0.05)),
             ("spectrum", dict(lambda1=0.5, lambda2=0.25, etas=[0.05])),
             ("spectrum", dict(lambda1=0.25, lambda2=0.5, etas=[0.05]))],
    "fig4": [("spectrum", dict(etas=[0.135, 0.335], vectors=True))],
    "figS3": [("phase-diagram", dict(grid=32, eta=0.1, observable="x2"))],
}


def resolve_config(command: str, path: str | None, overrides: list) -> dict:
    cfg = dict(DEFAULTS[command])
    if path:
        try:
            user = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config {path}: {e}") from e
        if not isinstance(user, dict):
            raise ConfigError("config must be a JSON object")
        user.pop("format_version", None)
        cfg.update(user["config"] if "config" in user else user)
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        try:
            cfg[k] = json.loads(v)
        except json.JSONDecodeError:
            cfg[k] = v
    unknown = set(cfg) - set(DEFAULTS[command])
    if unknown:
        raise ConfigError(f"unknown config keys for {command}: {sorted(unknown)}")
    return cfg


def _flux(spec):
    if spec in (None, "golden"):
        return GOLDEN
    if isinstance(spec, str) and "/" in spec:
        return Fraction(spec)
    return float(spec)


def _threads(args) -> int:
    env = os.environ.get("UAMO_LAB_THREADS")
    n = int(env) if env else (args.threads or 1)
    if n < 1:
        raise ConfigError("thread count must be >= 1")
    return n


def _pmap(fn, items, threads):
    if threads <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(threads) as ex:
        return list(ex.map(fn, items))


# ---- commands

def cmd_evolve(cfg, out: Path, fmt="csv", seed=0, threads=1) -> dict:
    steps = int(cfg["steps"])
    if steps < 0:
        raise ConfigError("steps must be >= 0")
    n = cfg["n"] or 2 * steps + 5
    if n % 2 == 0:
        n += 1
    p = ModelParams(cfg["lambda1"], cfg["lambda2"], cfg["theta"], cfg["eta"], _flux(cfg["phi"]))
    lat = Lattice.open(int(n))
    psi0 = localized_state(lat)
    if cfg["lossy"]:
        states, rec = optics.simulate_lossy_walk(psi0, p, lat, steps)
        states = np.array(states)
        overall = optics.reconstruct_overall_probability(rec, p.eta)
    else:
        states = dynamics.evolve(psi0, build_floquet(p, lat), steps)
        overall = None
    obs = dynamics.observables(states, lat)
    if overall is None:
        overall = obs.overall_P
    x = lat.positions
    dist = [(t, xi, obs.P[t, i]) for t in obs.t for i, xi in enumerate(x)]
    header = ["t", "sigma", "x2", "overallP", "mean"]
    cols = [obs.t, obs.sigma, obs.second_moment, overall, obs.mean]
    if cfg["poisson_counts"]:
        rng = np.random.default_rng(seed)
        sims = [dynamics.similarity(optics.poisson_resample(P, int(cfg["poisson_counts"]), rng), P) for P in obs.P]
        header.append("similarity")
        cols.append(np.array(sims))
    write_table(out / "distribution.csv", ["t", "x", "p"], dist, cfg, fmt)
    write_table(out / "observables.csv", header, zip(*cols), cfg, fmt)
    return dict(sigma=obs.sigma, overallP=overall, mean=obs.mean)


def cmd_spectrum(cfg, out: Path, fmt="csv", seed=0, threads=1) -> dict:
    n = int(cfg["n"])
    base = ModelParams(cfg["lambda1"], cfg["lambda2"], cfg["theta"], 0.0, _fibonacci(n))
    etas = list(cfg["etas"])

    def one(eta):
        return spectral.eigendecompose(build_floquet(base.with_(eta=float(eta)), Lattice.ring(n)),
                                       vectors=bool(cfg["vectors"]))

    specs = _pmap(one, etas, threads)
    rows, classes = [], []
    for eta, s in zip(etas, specs):
        E = s.E
        rows += [(eta, z.real, z.imag, e.real, e.imag) for z, e in zip(s.z, E)]
        rep = s.phase.to_dict()
        rep["eta"] = eta
        rep["tol_unit"] = s.tol_unit
        rep["tol_gap"] = s.tol_gap
        if cfg["vectors"]:
            nl = spectral.find_no_loss_states(s, cfg["no_loss_tol"])
            rep["no_loss_states"] = [dict(index=st.index, re_E=st.E.real, im_E=st.E.imag, center=st.center,
                                          participation_ratio=st.participation_ratio) for st in nl]
        classes.append(rep)
    write_table(out / "eigenvalues.csv", ["eta", "re_z", "im_z", "re_E", "im_E"], rows, cfg, fmt)
    write_json(out / "classification.json", dict(classification=classes), cfg)
    return dict(classification=[(c["eta"], c["phase"], c["boundary_zone"]) for c in classes])


def cmd_winding(cfg, out: Path, fmt="csv", seed=0, threads=1) -> dict:
    n = int(cfg["n"])
    base = ModelParams(cfg["lambda1"], cfg["lambda2"], cfg["theta"], 0.0, _fibonacci(n))
    lat = Lattice.ring(n)
    etas = list(cfg["etas"])

    def one(eta):
        return spectral.winding_profile(base.with_(eta=float(eta)), lat, int(cfg["z_count"]), int(cfg["M"]),
                                        int(cfg["M_cap"]))

    profiles = _pmap(one, etas, threads)
    rows = [r.to_row(eta) for eta, prof in zip(etas, profiles) for r in prof]
    summary = dict(regimes={str(e): spectral.winding_regime(p) for e, p in zip(etas, profiles)})
    if cfg["locate_transitions"]:
        summary["transitions"] = spectral.winding_transitions(cfg["lambda1"], cfg["lambda2"], n,
                                                              int(cfg["z_count"]), int(cfg["M"]))
    write_table(out / "winding.csv", ["eta", "re_z", "im_z", "nu_raw", "nu_quantized", "valid"], rows, cfg, fmt)
    write_json(out / "summary.json", summary, cfg)
    return summary


def phase_grid_value(l1, l2, eta, steps, theta=0.0, phi=GOLDEN, observable="sigma"):
    lat = Lattice.open(2 * steps + 5)
    p = ModelParams(l1, l2, theta, eta, phi)
    states = dynamics.evolve(localized_state(lat), build_floquet(p, lat), steps)
    P = dynamics.position_distribution(states[-1])
    x = lat.positions.astype(float)
    if observable == "sigma":
        return dynamics.standard_deviation(P, x)
    return dynamics.second_moment(P, x)


def cmd_phase_diagram(cfg, out: Path, fmt="csv", seed=0, threads=1) -> dict:
    g = int(cfg["grid"])
    if g < 1:
        raise ConfigError("grid must be >= 1")
    obs = cfg["observable"]
    if obs == "auto":
        obs = "sigma" if cfg["eta"] == 0 else "x2"
    if obs not in ("sigma", "x2"):
        raise ConfigError("observable must be sigma, x2 or auto")
    axis = np.linspace(0.0, 1.0, g)
    pts = [(a, b) for a in axis for b in axis]
    eta, steps = float(cfg["eta"]), int(cfg["steps"])
    vals = _pmap(lambda ab: phase_grid_value(ab[0], ab[1], eta, steps, cfg["theta"], _flux(cfg["phi"]), obs),
                 pts, threads)
    rows = []
    for (a, b), v in zip(pts, vals):
        bnd = analytics.localization_boundary(a, eta) if a > 0 else 0.0
        rows.append((a, b, v, bnd))
    col = "sigma_t%d" % steps if obs == "sigma" else "x2_t%d" % steps
    write_table(out / "phase.csv", ["lambda1", "lambda2", col, "boundary_lambda2"], rows, cfg, fmt)
    return dict(points=len(rows), observable=col)


def cmd_critical(cfg, out: Path | None, fmt="csv", seed=0, threads=1) -> dict:
    cp = analytics.critical_points(float(cfg["lambda1"]), float(cfg["lambda2"])).to_dict()
    if out is not None:
        write_json(out / "critical.json", cp, cfg)
    return cp


def cmd_validate(cfg, out: Path | None, fmt="csv", seed=0, threads=1) -> dict:
    rep = run_validation(seed, cfg["fault"])
    if out is not None:
        write_json(out / "report.json", rep, cfg)
    return rep


COMMANDS = {"evolve": cmd_evolve, "spectrum": cmd_spectrum, "winding": cmd_winding,
            "phase-diagram": cmd_phase_diagram, "critical": cmd_critical, "validate": cmd_validate}


def _fibonacci(n):
    from .model import fibonacci_ring
    return fibonacci_ring(n)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="uamo-lab", description="(P)UAMO quantum-walk simulation and spectra")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file (a previous output's embedded config also works)")
    common.add_argument("--out", default=None, help="output directory (default: out/<command>)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=None)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override one config entry (value parsed as JSON)")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "critical":
            sp.add_argument("lambdas", nargs="*", type=float, help="lambda1 lambda2")
        if name == "validate":
            sp.add_argument("--inject-fault", choices=sorted(optics.FAULTS), default=None)
    sp = sub.add_parser("reproduce", parents=[common])
    sp.add_argument("figure", choices=sorted(FIGURES))
    return ap


def _error(code: int, message: str, context: dict) -> int:
    sys.stderr.write(dumps(dict(code=code, message=message, context=context)) + "\n")
    return code


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    ctx = dict(command=args.command)
    try:
        threads = _threads(args)
        if args.command == "reproduce":
            out = Path(args.out or f"out/{args.figure}")
            summary = {}
            for k, (cmd, over) in enumerate(FIGURES[args.figure]):
                cfg = dict(DEFAULTS[cmd])
                cfg.update(over)
                d = out / f"{k}_{cmd}"
                d.mkdir(parents=True, exist_ok=True)
                summary[d.name] = COMMANDS[cmd](cfg, d, args.format, args.seed, threads)
            print(dumps(summary))
            return EXIT_OK
        cfg = resolve_config(args.command, args.config, args.set)
        if args.command == "critical" and args.lambdas:
            if len(args.lambdas) != 2:
                raise ConfigError("critical takes exactly two couplings: lambda1 lambda2")
            cfg["lambda1"], cfg["lambda2"] = args.lambdas
        if args.command == "validate" and args.inject_fault:
            cfg["fault"] = args.inject_fault
        out = Path(args.out or f"out/{args.command}")
        out.mkdir(parents=True, exist_ok=True)
        ctx["config"] = cfg
        res = COMMANDS[args.command](cfg, out, args.format, args.seed, threads)
        print(dumps(res))
        if args.command == "validate" and not res["passed"]:
            return EXIT_FAIL
        return EXIT_OK
    except (ConfigError, ModelError, KeyError, TypeError) as e:
        return _error(EXIT_CONFIG, f"invalid config: {e}", ctx)
    except (spectral.SpectralError, np.linalg.LinAlgError, FloatingPointError) as e:
        return _error(EXIT_NUMERIC, f"numerical failure: {e}", ctx)


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
