"""Command-line front end.

    cn-sutherland simulate   --config run.json --out results/
    cn-sutherland scatter    --config run.json --out results/
    cn-sutherland dual       --config dual.json --out results/
    cn-sutherland verify     --config run.json --out results/ [--perturb-xi 1e-3]
    cn-sutherland identities --seed 7 --out results/

Configs are JSON. Outputs are CSV (header row, 17 significant digits) and
JSON. Every subcommand exits with 0 iff all reported residuals are within
their bounds, 1 if some residual is out of bounds and 2 on invalid input.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import matrixkit as mk
from .dual import (
    DualCoordinates,
    build_dual_lax,
    dual_consistency_residual,
    rsvd_hamiltonian,
    rsvd_hamiltonian_trace,
)
from .errors import ConfigInvalid, InvalidCoupling, OutOfChamber, SutherlandError
from .lax import build_xi, commutation_residual, lax_residual
from .model import CouplingParams, IntegratorOptions, PhasePoint, integrate
from .scattering import (
    asymptotic_data,
    check_A_entries_residual,
    quad_eqn_residual,
    scattering_report,
    spectral_frame,
    theorem3_residual,
    z_closed_form,
    z_linear_residual,
    z_quadratic_residual,
)
from .specflow import flow_vs_ode_residual

log = logging.getLogger("cn_sutherland")

DEFAULT_BOUNDS = {
    "energy_drift": 1e-8,
    "commutation": 1e-11,
    "lax": 1e-4,
    "spectral_identification": 1e-7,
    "check_A_entries": 1e-9,
    "quad_eqn": 1e-10,
    "z_linear": 1e-8,
    "z_quadratic": 1e-8,
    "z_closed_form": 1e-8,
    "dual_consistency": 1e-8,
    "theorem3_closed": 1e-9,
    "theorem3_fit": 1e-3,
    "dual_det": 1e-8,
    "dual_hamiltonian": 1e-10,
}

# default n = 2 scenario used when the config names neither q0/p0 nor n
DEFAULT_Q0 = (2.0, 0.8)
DEFAULT_P0 = (0.5, -0.3)

_RUN_KEYS = {"n", "g", "g2", "q0", "p0", "t_final", "integrator", "tolerances", "seed", "out",
             "lax_check", "fit_T"}


@dataclass
class RunConfig:
    cp: CouplingParams
    pp0: PhasePoint
    t_final: float = 20.0
    integrator: IntegratorOptions = field(default_factory=IntegratorOptions)
    bounds: dict = field(default_factory=lambda: dict(DEFAULT_BOUNDS))
    seed: int = 0
    lax_check: bool = False
    fit_T: float = 20.0


def random_phase_point(rng: np.random.Generator, n: int, min_gap: float = 0.3) -> PhasePoint:
    """Chamber positions with gaps >= ``min_gap`` and momenta in [-1.5, 1.5]."""
    q = np.cumsum(min_gap + rng.uniform(0.0, 1.0, n))[::-1]
    p = rng.uniform(-1.5, 1.5, n)
    return PhasePoint(q, p)


def load_json(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigInvalid(f"cannot read config {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigInvalid(f"{path}: top level must be a JSON object")
    return data


def _field(data: dict, key: str, kind, default=None):
    if key not in data:
        if default is None:
            raise ConfigInvalid(f"missing field '{key}'")
        return default
    try:
        return kind(data[key])
    except (TypeError, ValueError) as exc:
        raise ConfigInvalid(f"field '{key}': {exc}") from exc


def parse_run_config(data: dict, seed: int | None = None, t_final: float | None = None) -> RunConfig:
    unknown = set(data) - _RUN_KEYS
    if unknown:
        raise ConfigInvalid(f"unknown field(s): {sorted(unknown)}")
    seed = int(data.get("seed", 0)) if seed is None else seed
    try:
        cp = CouplingParams(_field(data, "g", float, 1.0), _field(data, "g2", float, 0.5))
    except InvalidCoupling as exc:
        raise ConfigInvalid(f"fields 'g'/'g2': {exc}") from exc
    vec = lambda v: np.asarray(v, float)  # noqa: E731
    try:
        if "q0" in data or "p0" in data:
            pp0 = PhasePoint(_field(data, "q0", vec), _field(data, "p0", vec))
        elif "n" in data:
            pp0 = random_phase_point(np.random.default_rng(seed), _field(data, "n", int))
        else:
            pp0 = PhasePoint(DEFAULT_Q0, DEFAULT_P0)
    except (OutOfChamber, ValueError) as exc:
        raise ConfigInvalid(f"fields 'q0'/'p0': {exc}") from exc
    if "n" in data and int(data["n"]) != pp0.n:
        raise ConfigInvalid(f"field 'n' = {data['n']} but q0 has {pp0.n} entries")
    try:
        opts = IntegratorOptions.from_dict(data.get("integrator", {}))
    except (KeyError, TypeError) as exc:
        raise ConfigInvalid(f"field 'integrator': {exc}") from exc
    bounds = dict(DEFAULT_BOUNDS)
    tol = data.get("tolerances", {})
    bad = set(tol) - set(bounds)
    if bad:
        raise ConfigInvalid(f"field 'tolerances': unknown key(s) {sorted(bad)}")
    bounds.update({k: float(v) for k, v in tol.items()})
    bounds["energy_drift"] = opts.energy_drift_bound
    return RunConfig(
        cp=cp,
        pp0=pp0,
        t_final=_field(data, "t_final", float, 20.0) if t_final is None else float(t_final),
        integrator=opts,
        bounds=bounds,
        seed=seed,
        lax_check=bool(data.get("lax_check", False)),
        fit_T=_field(data, "fit_T", float, 20.0),
    )


def _floats(v) -> list[float]:
    return [float(a) for a in np.asarray(v).ravel()]


def write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def write_csv(path: Path, header: list[str], rows) -> None:
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([f"{float(v):.17g}" for v in row])


def _checks(values: dict, bounds: dict) -> dict:
    return {k: {"value": float(v), "bound": float(bounds[k]), "ok": bool(v <= bounds[k])}
            for k, v in values.items()}


def cmd_simulate(cfg: RunConfig, out: Path) -> int:
    traj = integrate(cfg.pp0, cfg.cp, cfg.t_final, cfg.integrator)
    n = cfg.pp0.n
    header = ["t"] + [f"q_{c + 1}" for c in range(n)] + [f"p_{c + 1}" for c in range(n)] + ["energy"]
    rows = np.column_stack([traj.times, traj.q, traj.p, traj.energies])
    write_csv(out / "trajectory.csv", header, rows)
    values = {"energy_drift": traj.energy_drift / max(1.0, abs(traj.energies[0]))}
    if cfg.lax_check and abs(cfg.t_final) > 0:
        steps = int(round(abs(cfg.t_final) / 1e-3))
        fine = traj.sample(np.linspace(0.0, cfg.t_final, steps + 1))
        values["lax"] = lax_residual(fine, cfg.cp, relative=True)
    checks = _checks(values, cfg.bounds)
    summary = {
        "n": n,
        "g": cfg.cp.g,
        "g2": cfg.cp.g2,
        "q0": _floats(cfg.pp0.q),
        "p0": _floats(cfg.pp0.p),
        "t_final": cfg.t_final,
        "samples": len(traj),
        "energy_initial": float(traj.energies[0]),
        "energy_drift": float(traj.energy_drift),
        "checks": checks,
    }
    write_json(out / "simulate_summary.json", summary)
    return 0 if all(c["ok"] for c in checks.values()) else 1


def cmd_scatter(cfg: RunConfig, out: Path) -> int:
    opts = IntegratorOptions(cfg.integrator.rel_tol, cfg.integrator.abs_tol,
                             cfg.integrator.energy_drift_bound, max(cfg.integrator.grid_points, 2001))
    report = scattering_report(cfg.pp0, cfg.cp, cfg.fit_T, opts)
    checks = _checks({"theorem3_closed": max(report["theorem3_residual"]),
                      "theorem3_fit": max(report["fit"]["theorem3_residual"])}, cfg.bounds)
    report["checks"] = checks
    write_json(out / "scattering.json", report)
    return 0 if all(c["ok"] for c in checks.values()) else 1


def verify_report(cfg: RunConfig, perturb_xi: float = 0.0) -> dict:
    pp, cp = cfg.pp0, cfg.cp
    n = pp.n
    xi = build_xi(cp, n)
    if perturb_xi:
        xi = xi + 1j * perturb_xi * (np.ones((2 * n, 2 * n)) - np.eye(2 * n))
    frame = spectral_frame(pp, cp)
    T = min(abs(cfg.t_final), 20.0) or 1.0
    opts = cfg.integrator
    coarse = integrate(pp, cp, T, opts)
    fine = coarse.sample(np.linspace(0.0, T, int(round(T / 1e-3)) + 1))
    closed = asymptotic_data(frame)
    values = {
        "commutation": commutation_residual(pp, cp, xi=xi, relative=True),
        "lax": lax_residual(fine, cp, relative=True),
        "spectral_identification": flow_vs_ode_residual(pp, cp, np.linspace(-10, 10, 21), opts),
        "check_A_entries": check_A_entries_residual(frame, pp, cp, relative=True),
        "quad_eqn": quad_eqn_residual(frame, cp),
        "z_linear": float(z_linear_residual(frame, cp).max()),
        "z_quadratic": float(z_quadratic_residual(frame, cp, relative=True).max()),
        "z_closed_form": float(np.abs(frame.z - z_closed_form(frame.lam, cp)).max()
                               / np.abs(frame.z).max()),
        "dual_consistency": dual_consistency_residual(pp, cp, relative=True),
        "theorem3_closed": float(theorem3_residual(closed, cp).max()),
    }
    checks = _checks(values, cfg.bounds)
    return {
        "n": n,
        "g": cp.g,
        "g2": cp.g2,
        "q0": _floats(pp.q),
        "p0": _floats(pp.p),
        "perturb_xi": float(perturb_xi),
        "lambda": _floats(frame.lam),
        "checks": checks,
        "passed": all(c["ok"] for c in checks.values()),
    }


def cmd_verify(cfg: RunConfig, out: Path, perturb_xi: float = 0.0) -> int:
    report = verify_report(cfg, perturb_xi)
    write_json(out / "verify.json", report)
    return 0 if report["passed"] else 1


def cmd_dual(data: dict, out: Path, bounds: dict | None = None) -> int:
    bounds = dict(DEFAULT_BOUNDS, **(bounds or {}))
    unknown = set(data) - {"lambda", "theta", "g", "g2", "tolerances"}
    if unknown:
        raise ConfigInvalid(f"unknown field(s): {sorted(unknown)}")
    try:
        cp = CouplingParams(_field(data, "g", float), _field(data, "g2", float))
        dc = DualCoordinates(_field(data, "lambda", lambda v: np.asarray(v, float)),
                             _field(data, "theta", lambda v: np.asarray(v, float)))
    except (InvalidCoupling, ValueError) as exc:
        raise ConfigInvalid(str(exc)) from exc
    bounds.update({k: float(v) for k, v in data.get("tolerances", {}).items()})
    A = build_dual_lax(dc, cp)
    N = A.shape[0]
    write_csv(out / "dual_lax.csv", ["row", "col", "re", "im"],
              ((i, j, A[i, j].real, A[i, j].imag) for i in range(N) for j in range(N)))
    h_closed = rsvd_hamiltonian(dc, cp)
    h_trace = rsvd_hamiltonian_trace(A)
    det = mk.determinant(A)
    checks = _checks({"dual_det": abs(det - 1.0),
                      "dual_hamiltonian": abs(h_closed - h_trace) / abs(h_closed)}, bounds)
    write_json(out / "dual_report.json", {
        "lambda": _floats(dc.lam),
        "theta": _floats(dc.theta),
        "g": cp.g,
        "g2": cp.g2,
        "det_re": det.real,
        "det_im": det.imag,
        "det_residual": abs(det - 1.0),
        "hamiltonian_closed_form": h_closed,
        "hamiltonian_trace": h_trace,
        "checks": checks,
    })
    return 0 if all(c["ok"] for c in checks.values()) else 1


def cmd_identities(seed: int, sizes, out: Path, trials: int = 200) -> int:
    report = mk.identity_suites(seed, sizes, trials)
    write_json(out / "identities.json", report)
    return 0 if report["passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cn-sutherland", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("simulate", "scatter", "dual", "verify", "identities"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", help="JSON configuration file")
        sp.add_argument("--out", default=".", help="output directory (created if missing)")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--t-final", type=float, default=None)
        sp.add_argument("-v", "--verbose", action="store_true")
        if name == "verify":
            sp.add_argument("--perturb-xi", type=float, default=0.0,
                            help="add i*delta to every off-diagonal entry of xi (negative control)")
        if name == "identities":
            sp.add_argument("--sizes", type=int, nargs="+", default=[1, 2, 3, 4, 5, 6])
            sp.add_argument("--trials", type=int, default=200)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        data = load_json(args.config)
        if args.command == "identities":
            seed = args.seed if args.seed is not None else int(data.get("seed", 0))
            code = cmd_identities(seed, data.get("sizes", args.sizes), out, int(data.get("trials", args.trials)))
        elif args.command == "dual":
            code = cmd_dual(data, out)
        else:
            cfg = parse_run_config(data, args.seed, args.t_final)
            if args.command == "simulate":
                code = cmd_simulate(cfg, out)
            elif args.command == "scatter":
                code = cmd_scatter(cfg, out)
            else:
                code = cmd_verify(cfg, out, args.perturb_xi)
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SutherlandError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    log.info("%s finished with exit code %d", args.command, code)
    return code


if __name__ == "__main__":
    sys.exit(main())
