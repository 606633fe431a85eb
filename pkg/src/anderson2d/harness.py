"""Reproducible run orchestration: configs, pipelines, manifests.

Every command is a pure function of its RunConfig: identical config and
seed produce byte-identical numeric artifacts.  The manifest records the
config echo, RNG algorithm, timings and a sha256 checksum of every file
written.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import grid as tg
from . import potentials, spectral, variational, choquard
from .noise import RNG_ALGORITHM, sample_white_noise, mollify
from .operator import AndersonOperator
from .version import __version__

COMMANDS = ("sample-noise", "spectrum", "kato-check", "diagnose-heat",
            "solve-mp", "solve-fountain", "solve-choquard")


class ConfigError(ValueError):
    """Invalid run configuration."""


@dataclass
class RunConfig:
    command: str
    n: int = 32
    seed: int = 0
    out: str = "runs"
    potential: str = "builtin:const:0"
    nonlinearity: str = "pow3"
    tol: float = 1e-6
    max_iter: int = 5000
    count: int = 6
    cutoff: Optional[int] = None
    times: tuple = (0.05, 0.1, 0.5)
    sweep_r: tuple = (0.4, 0.2, 0.1, 0.05)
    sweep_T: tuple = (1.0, 0.5, 0.25, 0.125)
    sweep_lambda: tuple = (1.0, 10.0, 100.0, 1000.0)
    # Choquard block
    a_spec: str = "builtin:const:1"
    w_spec: str = "builtin:negconst:1"
    p: float = 2.0
    q: float = 3.0
    init: str = "one"

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"command: unknown command {self.command!r}")
        if self.n <= 0 or self.n % 2:
            raise ConfigError(f"n: must be positive even, got {self.n}")
        if self.seed < 0:
            raise ConfigError(f"seed: must be non-negative, got {self.seed}")
        if self.tol <= 0:
            raise ConfigError(f"tol: must be positive, got {self.tol}")
        return self

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        for key in ("times", "sweep_r", "sweep_T", "sweep_lambda"):
            if key in data and isinstance(data[key], list):
                data[key] = tuple(data[key])
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data)


@dataclass
class RunManifest:
    config: dict
    version: str
    rng_algorithm: str
    wall_clock_s: float
    timings: dict = field(default_factory=dict)
    checksums: dict = field(default_factory=dict)

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True, indent=2)


def _sha256(path):
    h = hashlib.sha256()
    h.update(Path(path).read_bytes())
    return h.hexdigest()


def _fmt(x):
    return f"{x:.17g}"


def emit_plotdata(series, path, header):
    """Write a CSV of numeric rows with 17 significant digits."""
    series = list(series)
    if not series:
        raise ValueError("refusing to write an empty series")
    path = Path(path)
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in series:
            fh.write(",".join(_fmt(float(v)) for v in row) + "\n")
    return path


def _write_json(obj, path):
    Path(path).write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")
    return path


def _solution_frame(grid, results, outdir, files):
    for i, res in enumerate(results):
        fpath = outdir / f"solution_{i}.f64"
        tg.save_field(grid, res.u, fpath)
        files.append(fpath)
        files.append(_write_json({
            "phi": res.phi,
            "residual_l2": res.residual_l2,
            "grad_e_norm": res.grad_e_norm,
            "iterations": res.iterations,
            "method": res.method,
            "converged": res.converged,
            "seed": res.seed,
        }, outdir / f"result_{i}.json"))
        if res.trace:
            files.append(emit_plotdata(
                [(k, t[0], t[1]) for k, t in enumerate(res.trace)],
                outdir / f"trace_{i}.csv", ["iter", "phi", "grad_norm"]))


def run(config):
    """Execute a pipeline and return its RunManifest."""
    config.validate()
    t0 = time.perf_counter()
    outdir = Path(config.out)
    outdir.mkdir(parents=True, exist_ok=True)
    grid = tg.TorusGrid(config.n)
    files = []
    timings = {}

    def clock(name, fn):
        t = time.perf_counter()
        out = fn()
        timings[name] = time.perf_counter() - t
        return out

    cmd = config.command
    if cmd == "sample-noise":
        xi = clock("sample", lambda: sample_white_noise(grid, config.seed))
        if config.cutoff is not None:
            xi = mollify(xi, config.cutoff)
        fpath = outdir / "noise.f64"
        tg.save_field(grid, xi.field, fpath)
        files.append(fpath)
    elif cmd == "diagnose-heat":
        xi = sample_white_noise(grid, config.seed)
        op = clock("operator", lambda: AndersonOperator(grid, xi))
        report = clock("heat", lambda: op.heat_kernel_diagnostics(config.times))
        lo, hi = clock("green", op.green_log_ratio)
        report["green_ratio_low"], report["green_ratio_high"] = lo, hi
        files.append(_write_json(report, outdir / "report.json"))
    elif cmd == "spectrum":
        xi = sample_white_noise(grid, config.seed)
        op = AndersonOperator(grid, xi)
        a = potentials.from_spec(grid, config.potential)
        spec_obj = clock("eigendecompose",
                         lambda: spectral.eigendecompose(op, a, config.count))
        delta = clock("gap", lambda: spectral.gap_delta(op, a, spec_obj))
        files.append(_write_json({
            "eigenvalues": list(map(float, spec_obj.eigenvalues)),
            "m": spec_obj.m,
            "delta": delta,
            "residuals": list(map(float, spec_obj.residuals)),
        }, outdir / "spectrum.json"))
    elif cmd == "kato-check":
        xi = sample_white_noise(grid, config.seed)
        op = AndersonOperator(grid, xi)
        a = potentials.from_spec(grid, config.potential)
        rows_r = [(r, spectral.kato_modulus_log(grid, a, r))
                  for r in config.sweep_r]
        rows_T = [(T, spectral.kato_modulus_heat(op, a, T))
                  for T in config.sweep_T]
        rows_l = [(lam, spectral.resolvent_sup_norm(op, a, lam))
                  for lam in config.sweep_lambda]
        files.append(emit_plotdata(rows_r, outdir / "kato_log.csv",
                                   ["r", "modulus"]))
        files.append(emit_plotdata(rows_T, outdir / "kato_heat.csv",
                                   ["T", "modulus"]))
        files.append(emit_plotdata(rows_l, outdir / "resolvent_sweep.csv",
                                   ["lambda", "sup_norm"]))
        files.append(_write_json({
            "kato_log": {_fmt(r): v for r, v in rows_r},
            "kato_heat": {_fmt(T): v for T, v in rows_T},
            "resolvent": {_fmt(l): v for l, v in rows_l},
        }, outdir / "report.json"))
    elif cmd == "solve-mp":
        xi = sample_white_noise(grid, config.seed)
        op = AndersonOperator(grid, xi)
        a = potentials.from_spec(grid, config.potential)
        nl = variational.from_spec(config.nonlinearity)
        problem = variational.AndersonProblem(op, a, nl)
        res = clock("solve", lambda: variational.mountain_pass_solve(
            problem, tol=config.tol, max_iter=config.max_iter,
            seed=config.seed))
        _solution_frame(grid, [res], outdir, files)
    elif cmd == "solve-fountain":
        xi = sample_white_noise(grid, config.seed)
        op = AndersonOperator(grid, xi)
        a = potentials.from_spec(grid, config.potential)
        nl = variational.from_spec(config.nonlinearity)
        problem = variational.AndersonProblem(op, a, nl)
        results = clock("solve", lambda: variational.fountain_solve(
            problem, config.count, tol=config.tol, seed=config.seed))
        _solution_frame(grid, results, outdir, files)
        files.append(_write_json({
            "requested": config.count,
            "found": len(results),
            "phi": [r.phi for r in results],
        }, outdir / "summary.json"))
    elif cmd == "solve-choquard":
        xi = sample_white_noise(grid, config.seed)
        op = AndersonOperator(grid, xi)
        a = potentials.from_spec(grid, config.a_spec)
        w = _kernel_from_spec(grid, config.w_spec)
        prob = choquard.ChoquardProblem(op, a, w, p=config.p, q=config.q)
        init = _init_from_spec(grid, config.init)
        res = clock("solve", lambda: choquard.selfdual_minimize(
            prob, init=init, tol=config.tol, max_iter=config.max_iter))
        fpath = outdir / "solution_0.f64"
        tg.save_field(grid, res.u, fpath)
        files.append(fpath)
        files.append(_write_json({
            "selfdual_value": res.info["selfdual_value"],
            "residual_l2": res.residual_l2,
            "trivial": res.info["trivial"],
            "iterations": res.iterations,
            "converged": res.converged,
        }, outdir / "result_0.json"))
        files.append(emit_plotdata(
            [(k, t[0], t[1]) for k, t in enumerate(res.trace)],
            outdir / "trace_0.csv", ["iter", "selfdual_value", "residual_l2"]))

    config_path = outdir / "config.json"
    config_path.write_text(config.to_json() + "\n")
    files.append(config_path)

    manifest = RunManifest(
        config=asdict(config),
        version=__version__,
        rng_algorithm=RNG_ALGORITHM,
        wall_clock_s=time.perf_counter() - t0,
        timings=timings,
        checksums={str(Path(f).name): _sha256(f) for f in files},
    )
    (outdir / "manifest.json").write_text(manifest.to_json() + "\n")
    return manifest


def _kernel_from_spec(grid, spec):
    if spec.startswith("builtin:negconst:"):
        return np.full((grid.n, grid.n), -abs(float(spec.split(":")[2])))
    _, field_vals = tg.load_field(spec)
    return field_vals


def _init_from_spec(grid, spec):
    if spec == "zero":
        return grid.zeros()
    if spec == "one":
        return np.ones((grid.n, grid.n))
    if spec.startswith("random:"):
        rng = np.random.default_rng(int(spec.split(":")[1]))
        return rng.standard_normal((grid.n, grid.n))
    raise ConfigError(f"init: unknown initializer {spec!r}")
