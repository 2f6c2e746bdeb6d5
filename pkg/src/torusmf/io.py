"""File formats and run persistence.

Everything numeric goes to CSV (plot-ready) or JSON (machine-readable);
densities can also ride along in npz archives.  Writes are atomic
(temp file + rename) so reruns with identical configs are idempotent.
"""

from __future__ import annotations

import dataclasses
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from . import __version__
from . import density as dens
from .critical import PhaseDiagram, SolveReport
from .density import Density
from .flow import FlowTrace
from .potentials import Potential, make_potential

_FLOAT_FMT = "%.17g"


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path, obj) -> None:
    _atomic_write(Path(path), json.dumps(obj, indent=2, sort_keys=True) + "\n")


def read_json(path):
    with open(path) as f:
        return json.load(f)


def _csv(rows, header) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(
            _FLOAT_FMT % v if isinstance(v, float) else str(v) for v in row
        ))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# densities


def save_density_json(path, q: Density) -> None:
    write_json(path, dens.to_dict(q))


def load_density_json(path) -> Density:
    return dens.from_dict(read_json(path))


def save_density_csv(path, q: Density) -> None:
    rows = zip(q.theta.tolist(), q.grid_values.tolist())
    _atomic_write(Path(path), _csv(rows, ["theta", "q"]))


def save_densities_npz(path, densities: list[Density], times=None) -> None:
    arrays = {f"q{i:05d}": d.grid_values for i, d in enumerate(densities)}
    if times is not None:
        arrays["times"] = np.asarray(times)
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    np.savez_compressed(path, **arrays)


# ---------------------------------------------------------------------------
# potentials


def save_potential_json(path, w: Potential) -> None:
    write_json(path, {
        "model": w.name,
        "params": {k: v for k, v in w.params.items() if k != "scale"},
        "truncation": w.truncation,
    })


def load_potential_json(path) -> Potential:
    rec = read_json(path)
    return make_potential(rec["model"], rec["truncation"], **rec["params"])


def save_coeffs_csv(path, w: Potential) -> None:
    rows = ((k + 1, float(c)) for k, c in enumerate(w.coeffs))
    _atomic_write(Path(path), _csv(rows, ["k", "what_k"]))


# ---------------------------------------------------------------------------
# scan results


def save_phase_diagram(outdir, pd: PhaseDiagram) -> None:
    outdir = Path(outdir)
    rows = (
        (r.coupling, r.best_gap, r.order_parameter, r.n_seeds_converged,
         r.l1_to_uniform)
        for r in pd.rows
    )
    _atomic_write(outdir / "phase_diagram.csv", _csv(
        rows,
        ["K", "best_gap", "order_parameter", "n_seeds_converged", "l1"],
    ))
    write_json(outdir / "verdict.json", pd.as_verdict())


def save_solve_report(outdir, report: SolveReport, stem: str = "minimizer") -> None:
    outdir = Path(outdir)
    save_density_csv(outdir / f"{stem}_density.csv", report.density)
    save_density_json(outdir / f"{stem}_density.json", report.density)
    write_json(outdir / f"{stem}.json", {
        "residual": report.residual,
        "free_energy": report.free_energy,
        "iterations": report.iterations,
        "damping_used": report.damping_used,
        "seed_id": report.seed_id,
        "converged": report.converged,
        "order_parameter": report.order_parameter,
    })


# ---------------------------------------------------------------------------
# flow traces


def save_trace_csv(path, trace: FlowTrace) -> None:
    modes = sorted(trace.mode_abs)
    header = (["t", "l2_dist", "w2_dist"]
              + [f"mode{k}" for k in modes]
              + ["free_energy", "mass_defect"])
    cols = [trace.times, trace.l2, trace.w2]
    cols += [trace.mode_abs[k] for k in modes]
    cols += [trace.free_energy, trace.mass_defect]
    rows = zip(*(c.tolist() for c in cols))
    _atomic_write(Path(path), _csv(rows, header))


def save_trace(outdir, trace: FlowTrace) -> None:
    outdir = Path(outdir)
    save_trace_csv(outdir / "trace.csv", trace)
    if trace.snapshots:
        save_densities_npz(outdir / "snapshots.npz", trace.snapshots,
                           trace.snapshot_times)
    write_json(outdir / "trace_meta.json", {
        **trace.meta,
        "terminated_early": trace.terminated_early,
        "final_residual": trace.final_residual,
    })


# ---------------------------------------------------------------------------
# manifests


def write_manifest(outdir, config: dict) -> None:
    """Record everything needed to reproduce the run bit-identically."""
    write_json(Path(outdir) / "manifest.json", {
        "package_version": __version__,
        "config": config,
    })


def dataclass_dict(obj) -> dict:
    """JSON-safe dict of a (nested) dataclass, arrays dropped."""
    out = {}
    for f in dataclasses.fields(obj):
        v = getattr(obj, f.name)
        if isinstance(v, (str, int, float, bool)) or v is None:
            out[f.name] = v
    return out
