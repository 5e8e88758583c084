"""Run configuration: a single JSON object per run, validated into :class:`RunConfig`."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

from .errors import ParseError, ValidationError

COMMANDS = (
    "lattice-info",
    "bands",
    "gaps",
    "fermi",
    "bz-verify",
    "edge-check",
    "edge-dimension",
    "discriminant",
    "separation-scan",
    "demo",
)
DEMOS = ("checkerboard", "p-periodic", "bethe-sommerfeld")
THRESHOLDS = ("curvature", "lipschitz")


@dataclass
class RunConfig:
    command: str
    lattice: dict | None = None
    potential: dict | None = None
    resolution: int | None = None
    refine: bool = True
    gap_tol: float = 1e-6
    edge_tol: float = 1e-9
    degeneracy_tol: float = 1e-5
    tau: float = 1e-6
    seed: int = 0
    retries: int = 64
    energy: float | None = None
    energies: list[float] = field(default_factory=list)
    samples: int = 1000
    band: int | None = None
    edge: str | None = None
    h: list[float] = field(default_factory=lambda: [1 / 32, 1 / 64, 1 / 128, 1 / 256])
    threshold: str = "curvature"
    theta_rest: list[float] | None = None
    u: list[int] | None = None
    t_grid: list[float] = field(default_factory=lambda: [float(t) for t in range(1, 13)])
    name: str | None = None
    epsilon: float | None = None
    values: list[float] | None = None
    p: int | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def _energy_grid(grid) -> list[float]:
    if isinstance(grid, list):
        return [float(e) for e in grid]
    try:
        start, stop, step = float(grid["start"]), float(grid["stop"]), float(grid["step"])
    except (KeyError, TypeError):
        raise ValidationError("energies", "expected a list or {start, stop, step}") from None
    if step <= 0:
        raise ValidationError("energies.step", "must be positive")
    n = int(round((stop - start) / step)) + 1
    return [round(start + k * step, 12) for k in range(n)]


def _positive(name: str, value) -> float:
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ValidationError(name, "expected a number") from None
    if not v > 0:
        raise ValidationError(name, "must be positive")
    return v


def parse_config(text: str, command: str | None = None) -> RunConfig:
    """Parse and validate a JSON configuration, filling defaults.

    ``command`` (from the command line) supplies the command when the file
    omits it and must agree with it otherwise.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(raw, dict):
        raise ParseError("top-level value must be an object", 1, 1)
    raw = dict(raw)
    cmd = raw.pop("command", None) or command
    if cmd is None:
        raise ValidationError("command", "missing")
    if command is not None and cmd != command:
        raise ValidationError("command", f"config says {cmd!r}, command line says {command!r}")
    if cmd not in COMMANDS:
        raise ValidationError("command", f"unknown command {cmd!r}")

    known = set(RunConfig.__dataclass_fields__) - {"command"}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ValidationError(unknown[0], "unknown field")
    if "energies" in raw:
        raw["energies"] = _energy_grid(raw["energies"])
    cfg = RunConfig(command=cmd, **raw)

    if cmd == "demo":
        if cfg.name not in DEMOS:
            raise ValidationError("name", f"demo must be one of {', '.join(DEMOS)}")
    else:
        lat = cfg.lattice
        if not isinstance(lat, dict):
            raise ValidationError("lattice", "missing")
        basis = lat.get("basis")
        if basis is None:
            raise ValidationError("lattice.basis", "missing")
        if (
            not isinstance(basis, list)
            or not basis
            or not all(isinstance(r, list) and len(r) == len(basis) for r in basis)
        ):
            raise ValidationError("lattice.basis", "must be a square list of lists")
        if not all(isinstance(x, int) and not isinstance(x, bool) for r in basis for x in r):
            raise ValidationError("lattice.basis", "entries must be integers")
        if "dim" in lat and lat["dim"] != len(basis):
            raise ValidationError("lattice.dim", "does not match basis size")

    for name in ("gap_tol", "edge_tol", "degeneracy_tol", "tau"):
        setattr(cfg, name, _positive(name, getattr(cfg, name)))
    if cfg.resolution is None:
        d = len(cfg.lattice["basis"]) if cfg.lattice else 2
        cfg.resolution = {2: 128, 3: 32}.get(d, 16)
    if not isinstance(cfg.resolution, int) or cfg.resolution < 2:
        raise ValidationError("resolution", "must be an integer >= 2")
    if not isinstance(cfg.seed, int):
        raise ValidationError("seed", "must be an integer")
    if cfg.samples < 1 or cfg.retries < 1:
        raise ValidationError("samples" if cfg.samples < 1 else "retries", "must be >= 1")
    if cfg.edge is not None and cfg.edge not in ("upper", "lower"):
        raise ValidationError("edge", "must be 'upper' or 'lower'")
    if cfg.threshold not in THRESHOLDS:
        raise ValidationError("threshold", f"must be one of {', '.join(THRESHOLDS)}")
    cfg.h = [_positive("h", x) for x in cfg.h]
    if cmd in ("fermi", "discriminant") and cfg.energy is None:
        raise ValidationError("energy", "missing")
    if cmd == "bz-verify" and not cfg.energies:
        raise ValidationError("energies", "missing")
    if cmd == "edge-dimension" and (cfg.band is None or cfg.edge is None):
        raise ValidationError("band" if cfg.band is None else "edge", "missing")
    if cmd == "separation-scan" and cfg.u is None:
        raise ValidationError("u", "missing")
    return cfg
