"""Command-line front end.

    spectra <command> --config <path> [--out <dir>]

Each run reads one JSON config, writes ``report.json`` (and CSV tables for
the commands that produce them) into ``--out``, or prints the report to
stdout when no directory is given. Exit codes: 0 success, 1 invalid input,
2 numerical failure. Failed runs still emit a report whose ``reason`` field
names the error class.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .bands import band_edges, compute_band_grid, flat_band_check
from .config import COMMANDS, RunConfig, parse_config
from .errors import NoGenericPoint, OutOfRange, SpectraError, ValidationError
from .fermi_complex import (
    det_laurent,
    discriminant,
    draw_admissible,
    edge_degeneracy_check,
    internal_edges,
    levelset_dimension_probe,
    polynomial_roots,
    separation_scan,
    sylvester_discriminant,
)
from .fermi_real import bz_sweep, fermi_sample
from .lattice import classification_report, lattice_from_dict, make_lattice
from .potential import checkerboard, direction_periodic, potential_from_config, random_potential

_FAILURE_CODES = {"NoGenericPoint": NoGenericPoint.exit_code, "OutOfRange": OutOfRange.exit_code}


def _complex_list(values) -> dict:
    values = np.asarray(values, dtype=complex)
    return {"real": values.real.tolist(), "imag": values.imag.tolist()}


def _summary(cfg: RunConfig, lat, pot):
    grid = compute_band_grid(lat, pot, cfg.resolution)
    summary = band_edges(grid, refine=cfg.refine, tol=cfg.edge_tol, gap_tol=cfg.gap_tol)
    return grid, summary


def _sign(edge: str) -> int:
    return 1 if edge == "upper" else -1


def _setup(cfg: RunConfig):
    lat = lattice_from_dict(cfg.lattice)
    return lat, potential_from_config(lat, cfg.potential)


# Each handler returns (result, tables, failure) where tables maps a file name
# to a writer and failure is None or (exit code, reason, message).


def _lattice_info(cfg):
    lat = lattice_from_dict(cfg.lattice)
    result = classification_report(lat)
    result["lattice"] = lat.to_dict()
    result["dual_reps"] = [[str(x) for x in b] for b in lat.dual_reps_exact]
    result["primal_reps"] = lat.primal_reps.tolist()
    return result, {}, None


def _bands(cfg):
    lat, pot = _setup(cfg)
    grid, summary = _summary(cfg, lat, pot)
    result = summary.to_dict()
    result["min_band_width"] = flat_band_check(summary)
    return result, {"bands.csv": grid.write_csv}, None


def _gaps(cfg):
    lat, pot = _setup(cfg)
    _, summary = _summary(cfg, lat, pot)
    result = {
        "gaps": [list(g) for g in summary.gaps],
        "is_interval": summary.is_interval,
        "edge_error": summary.edge_error,
        "gap_tol": cfg.gap_tol,
    }
    return result, {}, None


def _fermi(cfg):
    lat = lattice_from_dict(cfg.lattice)
    sample = fermi_sample(cfg.energy, cfg.samples, lat.dim, cfg.seed, lattice=lat, tau=cfg.tau)
    result = {
        "energy": sample.energy,
        "n_points": int(len(sample.points)),
        "n_generic": int(np.count_nonzero(sample.generic)),
        "n_singular_adjacent": int(np.count_nonzero(sample.singular_adjacent)),
        "max_residual": float(np.max(sample.residuals, initial=0.0)),
    }
    return result, {"fermi.csv": sample.write_csv}, None


def _bz_verify(cfg):
    lat = lattice_from_dict(cfg.lattice)
    report = bz_sweep(lat, cfg.energies, cfg.retries, cfg.seed)
    failure = None
    if report.failures:
        energy, reason = report.failures[0]
        msg = f"{len(report.failures)} energies not certified, first E = {energy}"
        failure = (max(_FAILURE_CODES[r] for _, r in report.failures), reason, msg)
    return report.to_dict(), {}, failure


def _edge_check(cfg):
    lat, pot = _setup(cfg)
    _, summary = _summary(cfg, lat, pot)
    if cfg.band is not None:
        targets = [(cfg.band, _sign(cfg.edge or "upper"))]
    else:
        n = len(summary.edges)
        targets = [(0, -1)] + internal_edges(summary) + [(n - 1, 1)]
    reports = [edge_degeneracy_check(lat, pot, j, s, summary, cfg.degeneracy_tol) for j, s in targets]
    result = {
        "edges": [r.to_dict() for r in reports],
        "all_passed": all(r.passed for r in reports),
        "tol": cfg.degeneracy_tol,
    }
    return result, {}, None


def _edge_dimension(cfg):
    lat, pot = _setup(cfg)
    _, summary = _summary(cfg, lat, pot)
    est = levelset_dimension_probe(
        lat, pot, cfg.band, _sign(cfg.edge), cfg.h, summary=summary, threshold=cfg.threshold
    )
    return est.to_dict(), {"dimension.csv": est.write_csv}, None


def _theta_rest(cfg, lat):
    if cfg.theta_rest is not None:
        if len(cfg.theta_rest) != lat.dim - 1:
            raise ValidationError("theta_rest", f"expected {lat.dim - 1} values")
        return np.asarray(cfg.theta_rest, dtype=float)
    return np.random.default_rng(cfg.seed).random(lat.dim - 1)


def _discriminant(cfg):
    lat, pot = _setup(cfg)
    theta_rest = _theta_rest(cfg, lat)
    lp = det_laurent(lat, pot, theta_rest, cfg.energy)
    roots = polynomial_roots(lp)
    roots = roots[np.lexsort((roots.imag, roots.real))]
    result = {
        "energy": float(cfg.energy),
        "theta_rest": theta_rest.tolist(),
        "degree": 2 * lp.n,
        "coefficients": _complex_list(lp.coeffs),
        "roots": _complex_list(roots),
        "discriminant": _complex_list([discriminant(lp)]),
        "sylvester_discriminant": _complex_list([sylvester_discriminant(lp)]),
    }
    return result, {}, None


def _separation_scan(cfg):
    lat = lattice_from_dict(cfg.lattice)
    if cfg.theta_rest is not None:
        theta_rest = _theta_rest(cfg, lat)
    else:
        theta_rest = draw_admissible(lat, cfg.u, cfg.seed)
    rep = separation_scan(lat, theta_rest, cfg.u, cfg.t_grid, cfg.samples, cfg.seed)
    result = rep.to_dict()
    result["theta_rest"] = theta_rest.tolist()
    result["u"] = list(cfg.u)
    return result, {}, None


def _demo(cfg):
    if cfg.name == "checkerboard":
        eps = 0.1 if cfg.epsilon is None else float(cfg.epsilon)
        lat = make_lattice([[1, 1], [1, -1]])
        pot = checkerboard(lat, -eps, eps)
        targets = "internal"
    elif cfg.name == "p-periodic":
        p = 3 if cfg.p is None else int(cfg.p)
        values = [0.0] + [float(p)] * (p - 1) if cfg.values is None else cfg.values
        lat = make_lattice([[1, p], [1, 0]])
        pot = direction_periodic(lat, [1, -1], p, values)
        targets = [(0, 1)]
    else:  # bethe-sommerfeld
        eps = 0.05 if cfg.epsilon is None else float(cfg.epsilon)
        lat = make_lattice([[2, 1], [0, 2]])
        pot = random_potential(lat, eps, cfg.seed)
        targets = []
    _, summary = _summary(cfg, lat, pot)
    if targets == "internal":
        targets = internal_edges(summary)
    probes = [
        levelset_dimension_probe(lat, pot, j, s, cfg.h, summary=summary, threshold=cfg.threshold)
        for j, s in targets
    ]
    result = {
        "name": cfg.name,
        "lattice": lat.to_dict(),
        "classification": classification_report(lat),
        "potential": pot.values.tolist(),
        "bands": summary.to_dict(),
        "min_band_width": flat_band_check(summary),
        "dimension": [p.to_dict() for p in probes],
    }
    return result, {}, None


_HANDLERS = {
    "lattice-info": _lattice_info,
    "bands": _bands,
    "gaps": _gaps,
    "fermi": _fermi,
    "bz-verify": _bz_verify,
    "edge-check": _edge_check,
    "edge-dimension": _edge_dimension,
    "discriminant": _discriminant,
    "separation-scan": _separation_scan,
    "demo": _demo,
}


def _report(command, config, status, reason=None, message=None, result=None, files=()):
    return {
        "command": command,
        "config": config,
        "status": status,
        "reason": reason,
        "message": message,
        "result": result,
        "files": list(files),
    }


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def execute(cfg: RunConfig, out: str | None = None) -> tuple[int, dict]:
    """Run one configured command; returns (exit code, report).

    With ``out`` set the report and any tables are written there.
    """
    tables = {}
    try:
        result, tables, failure = _HANDLERS[cfg.command](cfg)
    except SpectraError as exc:
        code, report = exc.exit_code, _report(cfg.command, cfg.to_dict(), "error", exc.reason, str(exc))
        tables = {}
    else:
        if failure is None:
            code, report = 0, _report(cfg.command, cfg.to_dict(), "ok", result=result)
        else:
            code = failure[0]
            report = _report(cfg.command, cfg.to_dict(), "failed", failure[1], failure[2], result)
    if out is not None:
        os.makedirs(out, exist_ok=True)
        for name, writer in sorted(tables.items()):
            writer(os.path.join(out, name))
        report["files"] = sorted(tables)
        with open(os.path.join(out, "report.json"), "w", newline="\n") as fh:
            fh.write(dumps(report))
    return code, report


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="spectra", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="JSON run configuration")
    parser.add_argument("--out", default=None, help="directory for report.json and CSV tables")
    args = parser.parse_args(argv)

    try:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
        cfg = parse_config(text, args.command)
    except OSError as exc:
        report = _report(args.command, None, "error", "ConfigUnreadable", str(exc))
        code = 1
    except SpectraError as exc:
        report = _report(args.command, None, "error", exc.reason, str(exc))
        for attr in ("line", "column", "field"):
            if hasattr(exc, attr):
                report[attr] = getattr(exc, attr)
        code = exc.exit_code
    else:
        code, report = execute(cfg, args.out)
        if args.out is None:
            sys.stdout.write(dumps(report))
        else:
            print(os.path.join(args.out, "report.json"))
        return code
    if args.out is None:
        sys.stdout.write(dumps(report))
    else:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "report.json"), "w", newline="\n") as fh:
            fh.write(dumps(report))
        print(os.path.join(args.out, "report.json"))
    return code


if __name__ == "__main__":
    sys.exit(main())
