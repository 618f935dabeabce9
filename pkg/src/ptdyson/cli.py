"""Command line interface: ``solve``, ``verify`` and ``sweep``.

Exit status is 0 on success, 1 when a check fails (or a run produces no
usable samples) and 2 for usage or configuration errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import platform
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .config import (
    ConfigError,
    RunConfig,
    config_hash,
    load_config,
    parse_config,
    serialize_config,
    with_model_value,
)
from .evolution import solve_trajectory
from .symmetry import classify_phase, summarize_phases
from .verify import run_checks

log = logging.getLogger("ptdyson")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
FLOAT_FMT = "%.15g"
SWEEP_PARAMS = ("alpha", "c1", "c2.re", "c2.im", "A", "B")

ENERGY_COLUMNS = ["t", "ReE+", "ImE+", "ReE-", "ImE-", "chi"]
DYSON_COLUMNS = ["t", "eta1", "eta2", "eta3", "eta4", "detEta", "delta", "singularFlag", "etaImagMax"]
STATE_COLUMNS = [
    "t",
    "psi+_0_re", "psi+_0_im", "psi+_1_re", "psi+_1_im",
    "psi-_0_re", "psi-_0_im", "psi-_1_re", "psi-_1_im",
    "theta", "theta_im",
]
SWEEP_COLUMNS = [
    "value", "phase", "htilde_label", "H_PT_label", "valid", "max_imag_energy",
    "symmetric_samples", "broken_samples", "excluded_samples",
]

PLOT_SCRIPT = '''"""Plot the observable energies written by `ptdyson solve`."""
import sys
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np

here = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).parent
data = np.genfromtxt(here / "energies.csv", delimiter=",", names=True)
fig, (ax_re, ax_im) = plt.subplots(2, 1, sharex=True, figsize=(7, 6))
ax_re.plot(data["t"], data["ReE"], label="Re E+")
ax_re.plot(data["t"], data["ReE_1"], label="Re E-")
ax_im.plot(data["t"], data["ImE"], label="Im E+")
ax_im.plot(data["t"], data["ImE_1"], label="Im E-")
ax_re.set_ylabel("Re E")
ax_im.set_ylabel("Im E")
ax_im.set_xlabel("t")
for ax in (ax_re, ax_im):
    ax.legend()
fig.tight_layout()
fig.savefig(here / "energies.png", dpi=150)
'''


class RunError(RuntimeError):
    pass


def _write_table(path: Path, columns: list[str], rows: np.ndarray) -> None:
    # newline="" keeps the bytes identical across platforms
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(",".join(columns) + "\n")
        np.savetxt(fh, rows, fmt=FLOAT_FMT, delimiter=",", newline="\n")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _prepare(out: Path) -> Path:
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise RunError(f"cannot create output directory {out}: {exc}") from None
    if not os.access(out, os.W_OK):
        raise RunError(f"output directory {out} is not writable")
    return out


def write_manifest(out: Path, cfg: RunConfig, command: str, files: list[str], extra=None) -> None:
    import scipy

    manifest = {
        "command": command,
        "config_hash": config_hash(cfg),
        "config": json.loads(serialize_config(cfg)),
        "versions": {
            "ptdyson": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "rk4_backend": kernels.BACKEND,
        },
        "files": {name: _sha256(out / name) for name in files},
    }
    if extra:
        manifest.update(extra)
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def run_solve(cfg: RunConfig, out) -> list[str]:
    """Write energies, Dyson-map and state tables plus the plot sidecar."""
    out = _prepare(Path(out))
    params = cfg.model.to_params()
    t = np.linspace(cfg.grid.t0, cfg.grid.t1, cfg.grid.samples)
    traj = solve_trajectory(params, t)
    fr = traj.frame
    if np.all(fr.singular):
        raise RunError("every grid sample is singular")
    ep, em = traj.e_plus, traj.e_minus
    energies = np.column_stack([t, ep.real, ep.imag, em.real, em.imag, np.real(fr.chi)])
    n = t.size
    full = lambda c: np.broadcast_to(np.asarray(c), (n,))  # noqa: E731
    dyson = np.column_stack([
        t, *(np.real(full(c)) for c in (fr.eta1, fr.eta2, fr.eta3, fr.eta4, fr.det_eta)),
        np.full(n, np.real(fr.delta)), fr.singular.astype(float), fr.max_imag,
    ])
    th = np.asarray(traj.theta, dtype=complex)
    states = np.column_stack([
        t,
        *(f(traj.psi_plus[:, k]) for k in (0, 1) for f in (np.real, np.imag)),
        *(f(traj.psi_minus[:, k]) for k in (0, 1) for f in (np.real, np.imag)),
        th.real, th.imag,
    ])
    _write_table(out / "energies.csv", ENERGY_COLUMNS, energies)
    _write_table(out / "dyson.csv", DYSON_COLUMNS, dyson)
    _write_table(out / "states.csv", STATE_COLUMNS, states)
    (out / "plot_energies.py").write_text(PLOT_SCRIPT)
    files = ["energies.csv", "dyson.csv", "states.csv", "plot_energies.py"]
    write_manifest(out, cfg, "solve", files)
    return files


def run_verify(cfg: RunConfig, out, tol_scale: float = 1.0):
    out = _prepare(Path(out))
    report = run_checks(cfg, cfg.tolerances.scaled(tol_scale))
    (out / "verify_report.json").write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    write_manifest(out, cfg, "verify", ["verify_report.json"], {"tol_scale": tol_scale})
    return report


def parse_range(text: str) -> tuple[float, float, int]:
    try:
        lo, hi, n = text.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        raise ConfigError([("range", "expected lo:hi:n")]) from None
    if n < 2 or not hi > lo:
        raise ConfigError([("range", "need hi > lo and n >= 2")])
    return lo, hi, n


def sweep_point(cfg: RunConfig, param: str, value: float) -> dict:
    """Phase of H~ under PT~ and energy reality at one sweep value."""
    try:
        point = with_model_value(cfg, param, value)
    except ConfigError as exc:
        return {"value": value, "phase": "invalid-config", "error": str(exc)}
    params = point.model.to_params()
    t = np.linspace(cfg.grid.t0, cfg.grid.t1, cfg.grid.samples)
    summary = summarize_phases(classify_phase(params, t))
    traj = solve_trajectory(params, t)
    keep = ~traj.singular
    imag = np.maximum(np.abs(traj.e_plus.imag), np.abs(traj.e_minus.imag))[keep]
    labels = summary.labels
    h_pt = labels["H_PT"]
    return {
        "value": value,
        "phase": _phase(summary.htilde_label),
        "htilde_label": summary.htilde_label,
        "H_PT_label": max(h_pt, key=h_pt.get) if h_pt else "none",
        "valid": params.is_valid(),
        "max_imag_energy": float(imag.max()) if imag.size else float("nan"),
        "symmetric_samples": labels["Htilde_PTtilde"].get("symmetric", 0),
        "broken_samples": summary.samples - summary.excluded - labels["Htilde_PTtilde"].get("symmetric", 0),
        "excluded_samples": summary.excluded,
    }


def _phase(label: str) -> str:
    if label in ("symmetric", "undetermined"):
        return label
    return "broken"


def _sweep_task(args):
    text, param, value = args
    return sweep_point(parse_config(text), param, value)


def find_boundaries(rows: list[dict]) -> list[dict]:
    """Midpoints between consecutive sweep points whose phase differs."""
    out = []
    usable = [r for r in rows if r["phase"] in ("symmetric", "broken")]
    for a, b in zip(usable, usable[1:]):
        if a["phase"] != b["phase"]:
            out.append({
                "lower": a["value"], "upper": b["value"],
                "estimate": 0.5 * (a["value"] + b["value"]),
                "from": a["phase"], "to": b["phase"],
            })
    return out


def run_sweep(cfg: RunConfig, param: str, lo: float, hi: float, n: int, out, workers: int | None = None):
    if param not in SWEEP_PARAMS:
        raise ConfigError([("param", f"must be one of {', '.join(SWEEP_PARAMS)}")])
    out = _prepare(Path(out))
    values = np.linspace(lo, hi, n).tolist()
    text = serialize_config(cfg)
    tasks = [(text, param, v) for v in values]
    workers = workers or min(8, os.cpu_count() or 1)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_task, tasks, chunksize=max(1, n // (4 * workers))))
    else:
        rows = [_sweep_task(task) for task in tasks]
    # single writer: results arrive in input order and are written here only
    with open(out / "sweep.csv", "w", encoding="ascii", newline="") as fh:
        fh.write(",".join(SWEEP_COLUMNS) + "\n")
        for r in rows:
            fields = []
            for c in SWEEP_COLUMNS:
                v = r.get(c, "")
                if isinstance(v, bool):
                    v = int(v)
                fields.append(FLOAT_FMT % v if isinstance(v, float) else str(v))
            fh.write(",".join(fields) + "\n")
    boundaries = find_boundaries(rows)
    (out / "sweep_boundary.json").write_text(
        json.dumps({"param": param, "range": [lo, hi, n], "boundaries": boundaries}, indent=2) + "\n"
    )
    write_manifest(out, cfg, "sweep", ["sweep.csv", "sweep_boundary.json"])
    return rows, boundaries


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ptdyson", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("solve", "verify", "sweep"):
        s = sub.add_parser(name)
        s.add_argument("--config", required=True, type=Path)
        s.add_argument("--out", required=True, type=Path)
        s.add_argument("--tol-scale", type=float, default=1.0)
        if name == "sweep":
            s.add_argument("--param", required=True, choices=SWEEP_PARAMS)
            s.add_argument("--range", required=True, dest="range_")
            s.add_argument("--workers", type=int, default=None)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config)
        if not args.tol_scale > 0:
            raise ConfigError([("tol-scale", "must be positive")])
        if args.command == "solve":
            files = run_solve(cfg, args.out)
            print(f"wrote {', '.join(files)} to {args.out}")
            return EXIT_OK
        if args.command == "verify":
            report = run_verify(cfg, args.out, args.tol_scale)
            for c in report.checks:
                status = "PASS" if c.passed else "FAIL"
                print(f"{status} {c.name}: {c.max_residual:.3e} (tol {c.tolerance:.1e}, excluded {c.excluded})")
            print("overall:", "PASS" if report.overall_pass else "FAIL")
            return EXIT_OK if report.overall_pass else EXIT_FAIL
        lo, hi, n = parse_range(args.range_)
        _, boundaries = run_sweep(cfg, args.param, lo, hi, n, args.out, args.workers)
        for b in boundaries:
            print(f"{args.param}: {b['from']} -> {b['to']} near {b['estimate']:.6g}")
        return EXIT_OK
    except (ConfigError, FileNotFoundError, IsADirectoryError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RunError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE if "directory" in str(exc) else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
