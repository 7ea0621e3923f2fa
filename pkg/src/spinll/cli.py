"""Command-line entry point.

Every subcommand is a thin wrapper over a pipeline function that writes
files and returns their paths.  ``run CONFIG`` dispatches on the config's
``mode`` and finishes with a manifest holding SHA-256 checksums of all
outputs.  Exit codes: 0 ok, 2 config error, 3 numerical guard, 4 pipeline.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from . import __version__
from . import algebra, duality, exact
from . import semiclassical as sc
from . import spectroscopy as spec
from .config import RunConfig, check_guards, load_config, parse_config
from .errors import ConfigError, SpinLLError

WORKERS_ENV = "SPINLL_MAX_WORKERS"
TRAJECTORY_COLUMNS = ("t", "site", "sx", "sy", "sz", "norm")
FIELD_COLUMNS = ("t", "z_or_k", "sx", "sy", "sz", "norm")


# ---------------------------------------------------------------------------
# deterministic writers

def write_csv(path, columns, rows):
    """Header plus rows at 17 significant digits; byte-stable across runs."""
    rows = np.asarray(rows, dtype=float).reshape(-1, len(columns))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, rows, fmt="%.17g", delimiter=",", header=",".join(columns), comments="")
    return path


def write_json(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    return path


def sha256(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def read_trajectory_csv(path) -> sc.FieldTrajectory:
    """Read a CSV written by the ``exact``, ``lattice`` or ``continuum`` commands."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"trajectory file not found: {path}")
    with path.open() as fh:
        header = fh.readline().strip().split(",")
    if header[0] != "t" or header[2:5] != ["sx", "sy", "sz"]:
        raise ConfigError(f"{path}: not a trajectory CSV (header {header})")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    times = np.unique(data[:, 0])
    if times.size == 0 or data.shape[0] % times.size:
        raise ConfigError(f"{path}: rows do not form complete time slices")
    n_sites = data.shape[0] // times.size
    sigma = data[:, 2:5].reshape(times.size, n_sites, 3)
    return sc.FieldTrajectory(data[::n_sites, 0], sigma)


# ---------------------------------------------------------------------------
# pipelines; each writes into ``out`` and returns the written paths

def algebra_report(N: int, site: int, component: str = "all", convention: str = "single",
                   chain=None) -> dict:
    chain = (chain or exact.ChainConfig()).with_(N=N)
    reports = algebra.verify_derivation(chain, site, convention)
    if component != "all":
        reports = [r for r in reports if r.component == component]
    oracle = algebra.commutator_oracle(chain, site)
    return {"N": N, "site": site, "convention": convention, "chain": chain.to_dict(),
            "reports": [r.to_dict() for r in reports], "oracle_error": oracle}


def algebra_text(report: dict) -> str:
    lines = [f"N={report['N']} site={report['site']} convention={report['convention']}"]
    for r in report["reports"]:
        ratios = ", ".join(f"{re:g}{im:+g}i" for re, im in r["ratios"]) or "-"
        lines.append(f"{r['source']:11s} {r['component']:6s} match={str(r['matches']).lower():5s} "
                     f"same_terms={str(r['same_structure']).lower():5s} ratios=[{ratios}]")
        lines.append(f"      difference: {r['difference']}")
    lines.append("oracle: " + " ".join(f"{k}={v:.3g}" for k, v in report["oracle_error"].items()))
    return "\n".join(lines) + "\n"


def run_verify_algebra(cfg: RunConfig, out: Path) -> list[Path]:
    a = cfg.algebra
    report = algebra_report(cfg.chain.N, a.site, a.component, a.convention, cfg.chain)
    text = out / "derivation.txt"
    text.write_text(algebra_text(report))
    return [write_json(out / "derivation.json", report), text]


def duality_report(E, H) -> dict:
    F = duality.from_fields(duality.EMFieldVectors(tuple(E), tuple(H)))
    D = duality.dual(F)
    ext = duality.extract(D)
    scalar, pseudo = duality.invariants(F)
    return {"E": list(E), "H": list(H), "F": F.entries.tolist(), "dual": D.entries.tolist(),
            "dual_fields": {"E": list(ext.E), "H": list(ext.H)},
            "invariants": {"scalar": scalar, "pseudoscalar": pseudo}}


def duality_text(report: dict) -> str:
    def block(name, M):
        rows = [" ".join(f"{x:10.4g}" for x in row) for row in M]
        return [f"{name}:"] + ["  " + r for r in rows]

    lines = block("F", report["F"]) + block("dual", report["dual"])
    d = report["dual_fields"]
    lines.append(f"dual fields: E={d['E']} H={d['H']}")
    inv = report["invariants"]
    lines.append(f"invariants: scalar={inv['scalar']:.17g} pseudoscalar={inv['pseudoscalar']:.17g}")
    return "\n".join(lines) + "\n"


def run_duality(cfg: RunConfig, out: Path) -> list[Path]:
    return [write_json(out / "duality.json", duality_report(cfg.duality.E, cfg.duality.H))]


def initial_state(cfg: RunConfig) -> np.ndarray:
    N = cfg.chain.N
    if cfg.initial.kind == "random":
        rng = np.random.default_rng(cfg.numerics.seed)
        psi = rng.normal(size=2 ** N) + 1j * rng.normal(size=2 ** N)
        return psi / np.linalg.norm(psi)
    theta = np.broadcast_to(cfg.initial.theta, (N,)) if len(cfg.initial.theta) == 1 else cfg.initial.theta
    phi = np.broadcast_to(cfg.initial.phi, (N,)) if len(cfg.initial.phi) == 1 else cfg.initial.phi
    return exact.product_state(theta, phi)


def run_exact(cfg: RunConfig, out: Path, path: Path | None = None) -> list[Path]:
    n = cfg.numerics
    traj = exact.evolve(initial_state(cfg), cfg.chain, n.dt, n.steps, n.sample_every)
    S, N = traj.sigma.shape[:2]
    rows = np.column_stack([
        np.repeat(traj.times, N), np.tile(np.arange(1, N + 1), S),
        traj.sigma.reshape(-1, 3), np.repeat(traj.norm, N)])
    return [write_csv(path or out / "trajectory.csv", TRAJECTORY_COLUMNS, rows)]


def initial_field(cfg: RunConfig, model: str) -> sc.SpinField:
    g = cfg.grid
    spacing = cfg.chain.a if model == "lattice" else g.spacing
    if g.profile == "kick":
        field = sc.kicked_pinned_chain(g.n_points, g.kick_angle, spacing)
        if g.boundary != "pinned":
            field = sc.uniform_field(g.n_points, g.kick_angle, 0.0, spacing, g.boundary)
        return field
    return sc.uniform_field(g.n_points, g.theta, g.phi, spacing, g.boundary)


def _field_rows(traj: sc.FieldTrajectory, model: str) -> np.ndarray:
    S, M = traj.sigma.shape[:2]
    position = np.arange(1, M + 1) if model == "lattice" else np.arange(M) * traj.spacing
    return np.column_stack([np.repeat(traj.times, M), np.tile(position, S),
                            traj.sigma.reshape(-1, 3), traj.norm.reshape(-1)])


def run_field(cfg: RunConfig, out: Path, model: str, path: Path | None = None,
              raman: bool | None = None) -> list[Path]:
    n = cfg.numerics
    raman = cfg.raman.enabled if raman is None else raman
    field = initial_field(cfg, model)
    path = Path(path or out / "trajectory.csv")
    if raman:
        traj = sc.integrate(sc.RamanState(field, field), cfg.chain, n.dt, n.steps, n.sample_every,
                            model=model, raman_mode=cfg.raman.mode, cross_term=cfg.raman.cross_term)
        return [write_csv(path.with_name(f"{path.stem}_{name}{path.suffix}"), FIELD_COLUMNS,
                          _field_rows(getattr(traj, name), model))
                for name in ("sigma1", "sigma2")]
    traj = sc.integrate(field, cfg.chain, n.dt, n.steps, n.sample_every, model=model)
    return [write_csv(path, FIELD_COLUMNS, _field_rows(traj, model))]


def _peaks_payload(peaks, fit, resolution, predicted=None) -> dict:
    return {"peaks": [[w, a] for w, a in peaks], "resolution": resolution,
            "fit": fit.to_dict() if fit is not None else None, "predicted_C": predicted}


def spectrum_from_file(src, spectrum_out, peaks_out, site=None, min_prominence=0.35,
                       fmin=None, pad_factor=4, window="rect", n_modes=None) -> list[Path]:
    """Spectrum, peaks and a mode-law fit of the lowest ``n_modes`` peaks (all if None)."""
    traj = read_trajectory_csv(src)
    s = spec.ringdown_spectrum(traj, site, pad_factor=pad_factor, window=window)
    peaks = spec.detect_peaks(s, min_prominence, fmin=fmin)
    try:
        fit = spec.fit_mode_law(peaks[:n_modes])
    except spec.FitError:
        fit = None
    return [write_csv(spectrum_out, ("omega", "amplitude"), np.column_stack([s.freqs, s.amps])),
            write_json(peaks_out, _peaks_payload(peaks, fit, s.resolution))]


def run_spectrum(cfg: RunConfig, out: Path) -> list[Path]:
    p = cfg.protocol
    if cfg.io.input:
        return spectrum_from_file(cfg.io.input, out / "spectrum.csv", out / "peaks.json",
                                  p.probe_site, p.min_prominence, cfg.chain.omega0,
                                  p.pad_factor, p.window, p.n_modes)
    result = spec.pinned_chain_ringdown(cfg.chain, p)
    s = result.spectrum
    return [write_csv(out / "spectrum.csv", ("omega", "amplitude"), np.column_stack([s.freqs, s.amps])),
            write_json(out / "peaks.json",
                       _peaks_payload(result.peaks, result.fit, s.resolution, result.predicted_C))]


def raman_report(cfg: RunConfig) -> dict:
    cmp = spec.raman_doubling(cfg.chain, cfg.protocol, cross_term=cfg.raman.cross_term,
                              raman_mode=cfg.raman.mode)
    return cmp.to_dict()


def run_raman(cfg: RunConfig, out: Path, path: Path | None = None) -> list[Path]:
    return [write_json(path or out / "raman.json", raman_report(cfg))]


def _sweep_point(args):
    chain, protocol = args
    r = spec.pinned_chain_ringdown(chain, protocol)
    return r.spectrum.freqs, r.spectrum.amps, r.fit.to_dict(), r.predicted_C


def max_workers(n_tasks: int) -> int:
    cap = os.environ.get(WORKERS_ENV)
    if cap is not None:
        try:
            cap = int(cap)
        except ValueError:
            raise ConfigError(f"{WORKERS_ENV} must be an integer, got {cap!r}") from None
        if cap < 1:
            raise ConfigError(f"{WORKERS_ENV} must be >= 1")
    else:
        cap = os.cpu_count() or 1
    return max(1, min(cap, n_tasks))


def run_sweep(cfg: RunConfig, out: Path) -> list[Path]:
    Js = [cfg.chain.J_eff * f for f in cfg.sweep.J_factors]
    tasks = [(cfg.chain.with_(J_eff=J), cfg.protocol) for J in Js]
    workers = max_workers(len(tasks))
    if workers == 1:
        results = [_sweep_point(t) for t in tasks]
    else:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_sweep_point, tasks))
    paths, table = [], []
    for i, (J, (freqs, amps, fit, C_pred)) in enumerate(zip(Js, results)):
        paths.append(write_csv(out / f"spectrum_{i}.csv", ("omega", "amplitude"),
                               np.column_stack([freqs, amps])))
        table.append((J, fit["C"], C_pred, fit["omega0_fit"], fit["residual"],
                      1.0 if fit["assignment"] == "odd" else 0.0))
    paths.append(write_csv(out / "fits.csv",
                           ("J_eff", "C_fit", "C_pred", "omega0_fit", "residual", "odd_assignment"),
                           table))
    return paths


PIPELINES = {
    "verify-algebra": run_verify_algebra,
    "duality": run_duality,
    "exact": run_exact,
    "lattice": lambda cfg, out: run_field(cfg, out, "lattice"),
    "continuum": lambda cfg, out: run_field(cfg, out, "continuum"),
    "spectrum": run_spectrum,
    "raman-compare": run_raman,
    "sweep": run_sweep,
}


@dataclass
class RunManifest:
    config: dict
    version: str
    mode: str
    wall_time: float
    outputs: dict

    def to_dict(self) -> dict:
        return asdict(self)


def run(cfg: RunConfig, out_dir=None) -> RunManifest:
    """Run the configured pipeline; writes outputs, the effective config and a manifest."""
    check_guards(cfg)
    out = Path(out_dir or cfg.io.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    effective = out / "config.yaml"
    effective.write_text(cfg.dump())
    paths = [effective] + PIPELINES[cfg.mode](cfg, out)
    manifest = RunManifest(cfg.to_dict(), __version__, cfg.mode, time.perf_counter() - start,
                           {p.name: sha256(p) for p in paths})
    write_json(out / "manifest.json", manifest.to_dict())
    return manifest


# ---------------------------------------------------------------------------
# argument parsing

def _vector(text: str) -> tuple[float, float, float]:
    try:
        parts = tuple(float(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y,z numbers, got {text!r}") from None
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected three components, got {text!r}")
    return parts


def _emit(text_out: str, payload: dict, fmt: str, out: str | None):
    body = json.dumps(payload, indent=2, sort_keys=True) + "\n" if fmt == "json" else text_out
    if out:
        Path(out).write_text(body)
    else:
        sys.stdout.write(body)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinll", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-algebra", help="check equations of motion symbolically")
    p.add_argument("--sites", type=int, default=4)
    p.add_argument("--site", type=int, default=2)
    p.add_argument("--component", choices=("z", "plus", "minus", "all"), default="all")
    p.add_argument("--convention", choices=("single", "doubled"), default="single")
    p.add_argument("--J", type=float, default=1.0, help="exchange constant J_eff")
    p.add_argument("--rabi", type=float, default=0.5)
    p.add_argument("--omega0", type=float, default=1.0)
    p.add_argument("--emit", choices=("text", "json"), default="text")
    p.add_argument("--out")

    p = sub.add_parser("duality", help="field tensor, its dual and invariants")
    p.add_argument("--e", type=_vector, default=(0.0, 0.0, 0.0))
    p.add_argument("--h", type=_vector, default=(0.0, 0.0, 0.0))
    p.add_argument("--emit", choices=("text", "json"), default="json")
    p.add_argument("--out")

    p = sub.add_parser("exact", help="exact state-vector evolution")
    p.add_argument("config")
    p.add_argument("--out", default="trajectory.csv")

    for name in ("lattice", "continuum"):
        p = sub.add_parser(name, help=f"mean-field {name} dynamics")
        p.add_argument("config")
        p.add_argument("--out", default="trajectory.csv")
        p.add_argument("--raman", action="store_true", help="two-component system")

    p = sub.add_parser("spectrum", help="ring-down spectrum of a trajectory CSV")
    p.add_argument("--in", dest="src", required=True)
    p.add_argument("--out", default="spectrum.csv")
    p.add_argument("--peaks-out", default="peaks.json")
    p.add_argument("--site", type=int, default=None, help="0-based probe index (default: sum)")
    p.add_argument("--prominence", type=float, default=0.35)
    p.add_argument("--fmin", type=float, default=None)
    p.add_argument("--pad", type=int, default=4)
    p.add_argument("--window", choices=("rect", "hann"), default="rect")
    p.add_argument("--modes", type=int, default=None, help="fit only the lowest peaks")

    p = sub.add_parser("raman-compare", help="two-component vs single-component splitting")
    p.add_argument("config", nargs="?")
    p.add_argument("--out")
    p.add_argument("--no-cross-term", action="store_true")

    p = sub.add_parser("sweep", help="ring-down spectra over a set of exchange constants")
    p.add_argument("config")
    p.add_argument("--out-dir")

    p = sub.add_parser("run", help="run the pipeline named by the config's mode")
    p.add_argument("config")
    p.add_argument("--out-dir")
    return parser


def _config(path, mode) -> RunConfig:
    cfg = parse_config({}) if path is None else load_config(path)
    cfg = replace(cfg, mode=mode)
    check_guards(cfg)
    return cfg


def dispatch(args) -> int:
    cmd = args.command
    if cmd == "verify-algebra":
        chain = exact.ChainConfig(N=args.sites, omega0=args.omega0, rabi=args.rabi, J_eff=args.J)
        report = algebra_report(args.sites, args.site, args.component, args.convention, chain)
        _emit(algebra_text(report), report, args.emit, args.out)
    elif cmd == "duality":
        report = duality_report(args.e, args.h)
        _emit(duality_text(report), report, args.emit, args.out)
    elif cmd == "exact":
        cfg = _config(args.config, "exact")
        run_exact(cfg, Path("."), Path(args.out))
    elif cmd in ("lattice", "continuum"):
        cfg = _config(args.config, cmd)
        run_field(cfg, Path("."), cmd, Path(args.out), raman=args.raman or None)
    elif cmd == "spectrum":
        spectrum_from_file(args.src, args.out, args.peaks_out, args.site, args.prominence,
                           args.fmin, args.pad, args.window, args.modes)
    elif cmd == "raman-compare":
        cfg = _config(args.config, "raman-compare")
        if args.no_cross_term:
            cfg = replace(cfg, raman=replace(cfg.raman, cross_term=False))
        report = raman_report(cfg)
        _emit(json.dumps(report, indent=2, sort_keys=True) + "\n", report, "json", args.out)
    elif cmd == "sweep":
        cfg = _config(args.config, "sweep")
        run(cfg, args.out_dir)
    elif cmd == "run":
        cfg = load_config(args.config)
        run(cfg, args.out_dir)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return dispatch(args)
    except SpinLLError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ConfigError.exit_code


if __name__ == "__main__":
    sys.exit(main())
